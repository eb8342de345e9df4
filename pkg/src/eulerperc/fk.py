"""Random-cluster (FK) model: exact tables, Edwards-Sokal erasure, planar duality, ordering checks."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .clusters import crossing_bits, two_point_bits
from .contour import EdgeConfig, contour_bits
from .exactgraph import FiniteGraph
from .ising import IsingParams, SpinConfig, exact_local_distribution, run_chain
from .lattice import BoxGeometry, build_box

P_C_EVEN = 1 - 1 / math.sqrt(2)
SELF_DUAL = math.sqrt(2) / (1 + math.sqrt(2))
MAX_EXACT_EDGES = 20


@dataclass(frozen=True)
class FKParams:
    p: float | Fraction
    q: float | int | Fraction = 2
    boundary: str = "free"

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError(f"p must lie strictly between 0 and 1, got {self.p}")
        if not self.q > 0:
            raise ValueError("q must be positive")
        if self.boundary not in ("free", "wired"):
            raise ValueError("boundary must be 'free' or 'wired'")


def f_of_beta(beta: float) -> float:
    if beta < 0:
        raise ValueError("the erasure probability is defined for beta >= 0")
    return -math.expm1(-2.0 * beta)


def dual_params(p):
    """Dual bond parameter at cluster weight 2."""
    return (2 - 2 * p) / (2 - p)


def beta_of_fk(p: float) -> float:
    """Ising coupling whose erasure probability is ``p``."""
    if not 0 <= p < 1:
        raise ValueError("p must lie in [0, 1)")
    return -0.5 * math.log1p(-p)


# -- small graphs ---------------------------------------------------------------

def n_clusters(graph: FiniteGraph, mask: int, wired: frozenset = frozenset()) -> int:
    """Open clusters of ``graph``; vertices in ``wired`` count as one."""
    parent = list(range(graph.n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    w = sorted(wired)
    for a in w[1:]:
        parent[find(a)] = find(w[0])
    for e, (a, b) in enumerate(graph.edges):
        if mask >> e & 1:
            parent[find(a)] = find(b)
    return len({find(i) for i in range(graph.n_vertices)})


def fk_weight(graph: FiniteGraph, mask: int, params: FKParams, boundary_vertices=()) -> Fraction | float:
    """(p/(1-p))^#open * q^k, with ``boundary_vertices`` merged when wired."""
    wired = frozenset(boundary_vertices) if params.boundary == "wired" else frozenset()
    k = n_clusters(graph, mask, wired)
    p = params.p
    return (p / (1 - p)) ** bin(mask).count("1") * params.q ** k


def exact_fk_table(graph: FiniteGraph, params: FKParams, boundary_vertices=()) -> dict[int, Fraction | float]:
    if graph.n_edges > MAX_EXACT_EDGES:
        raise ValueError(f"graph has {graph.n_edges} edges; the exact table is limited to {MAX_EXACT_EDGES}")
    w = {mask: fk_weight(graph, mask, params, boundary_vertices) for mask in range(1 << graph.n_edges)}
    if isinstance(params.p, Fraction):
        z = sum(w.values())
    else:
        z = math.fsum(w.values())
    return {k: v / z for k, v in w.items()}


def _connected_without(graph: FiniteGraph, mask: int, e: int, wired: frozenset) -> bool:
    a, b = graph.edges[e]
    m = mask & ~(1 << e)
    parent = list(range(graph.n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    w = sorted(wired)
    for v in w[1:]:
        parent[find(v)] = find(w[0])
    for f, (u, v) in enumerate(graph.edges):
        if m >> f & 1:
            parent[find(u)] = find(v)
    return find(a) == find(b)


def heat_bath_open_probability(p: float, q: float, connected: bool) -> float:
    return p if connected else p / (p + q * (1 - p))


def fk_glauber_sweep(graph: FiniteGraph, mask: int, params: FKParams, seed=None,
                     boundary_vertices=()) -> int:
    """One pass of single-bond heat bath over the edges in index order."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.Generator(np.random.PCG64(seed))
    wired = frozenset(boundary_vertices) if params.boundary == "wired" else frozenset()
    u = rng.random(graph.n_edges)
    p, q = float(params.p), float(params.q)
    for e in range(graph.n_edges):
        connected = _connected_without(graph, mask, e, wired)
        if u[e] < heat_bath_open_probability(p, q, connected):
            mask |= 1 << e
        else:
            mask &= ~(1 << e)
    return mask


def heat_bath_kernel(graph: FiniteGraph, params: FKParams, e: int, boundary_vertices=()) -> dict:
    """Exact single-bond update at edge ``e``: {(from, to): probability}."""
    wired = frozenset(boundary_vertices) if params.boundary == "wired" else frozenset()
    p, q = params.p, params.q
    out = {}
    for mask in range(1 << graph.n_edges):
        connected = _connected_without(graph, mask, e, wired)
        po = p if connected else p / (p + q * (1 - p))
        out[(mask, mask | 1 << e)] = out.get((mask, mask | 1 << e), 0) + po
        out[(mask, mask & ~(1 << e))] = out.get((mask, mask & ~(1 << e)), 0) + (1 - po)
    return out


def box_graph(g: BoxGeometry) -> FiniteGraph:
    """Primal sites and edges of the box, in box edge order."""
    names = [f"{x},{y}" for x, y in g.primal_sites]
    return FiniteGraph(names, [tuple(int(s) for s in e) for e in g.edge_ends])


def planar_dual_graph(g: BoxGeometry) -> FiniteGraph:
    """Inner faces plus one outer vertex; the dual edge of box edge e has index e."""
    m = g.m
    inner = [(r, c) for r in range(1, m - 1) for c in range(1, m - 1)]
    pos = {rc: i for i, rc in enumerate(inner)}
    outer = len(inner)
    edges = []
    for a, b in g.edge_dual:
        ends = []
        for s in (int(a), int(b)):
            ends.append(pos.get(divmod(s, m), outer))
        edges.append(tuple(ends))
    names = [f"face{r},{c}" for r, c in inner] + ["outer"]
    return FiniteGraph(names, edges)


def dual_config(cfg: EdgeConfig) -> EdgeConfig:
    """Dual edge e* open iff e closed; dual edges share the primal index."""
    return EdgeConfig(cfg.geometry, cfg.bits ^ 1)


def complement_table(table: dict[int, object], n_edges: int) -> dict[int, object]:
    full = (1 << n_edges) - 1
    return {full ^ k: v for k, v in table.items()}


# -- Edwards-Sokal ---------------------------------------------------------------

def edwards_sokal(spins: SpinConfig, f: float, seed=None) -> EdgeConfig:
    """Open each dual bond between equal spins with probability ``f``.

    Bit e of the result is the bond crossing box edge e.
    """
    if not 0 <= f <= 1:
        raise ValueError("f must lie in [0, 1]")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.Generator(np.random.PCG64(seed))
    g = spins.geometry
    equal = 1 - contour_bits(g, spins.spins)
    u = rng.random(g.n_edges)
    return EdgeConfig(g, (equal & (u < f)).astype(np.uint8))


def es_composite_law(L: int, beta: float, boundary="plus") -> dict[int, float]:
    """Exact law of the Edwards-Sokal bonds over the box edges' duals.

    Spins on the inner faces follow the exact Ising table with the ring
    frozen to ``boundary``; bonds are indexed like box edges.
    """
    g = build_box(L)
    if g.n_edges > MAX_EXACT_EDGES:
        raise ValueError("box too large for exhaustive enumeration")
    f = f_of_beta(beta)
    params = IsingParams(beta, boundary)
    ising = exact_local_distribution(g, params, g.interior_mask())
    base = np.ones((g.m, g.m), dtype=np.int8) if boundary == "plus" else -np.ones((g.m, g.m), dtype=np.int8)
    rows, cols = zip(*ising.sites)
    law = np.zeros(1 << g.n_edges)
    masks = np.arange(1 << g.n_edges)
    bits = (masks[:, None] >> np.arange(g.n_edges)) & 1
    n_open = bits.sum(axis=1)
    for conf, pr in zip(ising.configs, ising.probs):
        base[rows, cols] = conf
        equal = 1 - contour_bits(g, base)
        allowed = ~np.any(bits & (1 - equal), axis=1)
        n_eq = int(equal.sum())
        law += np.where(allowed, pr * f ** n_open * (1 - f) ** (n_eq - n_open), 0.0)
    return {int(k): float(v) for k, v in enumerate(law) if v > 0}


def es_exact_fk_law(L: int, beta: float) -> dict[int, float]:
    """FK table on the dual graph of the box with the outer vertex wired in."""
    g = build_box(L)
    dual = planar_dual_graph(g)
    table = exact_fk_table(dual, FKParams(f_of_beta(beta), 2, "wired"), [dual.n_vertices - 1])
    return {k: v for k, v in table.items() if v > 0}


# -- Monte Carlo comparison ------------------------------------------------------

def iter_fk_free(L: int, p_fk: float, n_samples: int, n_burnin: int = 100, thinning: int = 1,
                 seed=0):
    """Free-boundary FK(p_fk, 2) configurations on the box, via Ising spins on
    the primal sites and Edwards-Sokal erasure."""
    g = build_box(L)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.Generator(np.random.PCG64(seed))
    spins = np.ones((g.n, g.n), dtype=np.int8)
    frozen = np.zeros((g.n, g.n), dtype=np.uint8)
    beta = beta_of_fk(p_fk)
    run_chain(spins, frozen, beta, n_burnin, rng, "sw")
    for _ in range(n_samples):
        run_chain(spins, frozen, beta, thinning, rng, "sw")
        h = (spins[:, :-1] == spins[:, 1:]) & (rng.random((g.n, g.n - 1)) < p_fk)
        v = (spins[:-1, :] == spins[1:, :]) & (rng.random((g.n - 1, g.n)) < p_fk)
        bits = np.empty(g.n_edges, dtype=np.uint8)
        bits[g.h_index.ravel()] = h.ravel()
        bits[g.v_index.ravel()] = v.ravel()
        yield bits


def default_events(L: int) -> dict[str, object]:
    return {
        "horizontal_crossing": lambda g, b: crossing_bits(g, b, "horizontal"),
        "two_point_0_(3,0)": lambda g, b: two_point_bits(g, b, (0, 0), (3, 0)),
    }


def compare_mu_to_fk(L: int, p: float, samples: int, seed=0, n_burnin: int | None = None,
                     thinning: int = 2) -> dict:
    """Monte Carlo estimates of increasing events under the even measure at p
    and the free FK measure at (2p, 2); flags violations beyond 3 combined SEs."""
    from .evenperc import iter_mu_p
    from .seeding import seed_stream

    if not 0 < p <= 0.5:
        raise ValueError("the comparison needs 0 < p <= 1/2")
    g = build_box(L)
    burn = max(100, 2 * L) if n_burnin is None else n_burnin
    events = default_events(L)
    hits_mu = dict.fromkeys(events, 0)
    hits_fk = dict.fromkeys(events, 0)
    mu_seed, fk_seed = seed_stream(seed, 0), seed_stream(seed, 1)
    for bits in iter_mu_p(L, p, samples, burn, thinning, mu_seed, "sw"):
        for name, ev in events.items():
            hits_mu[name] += bool(ev(g, bits))
    p_fk = min(2 * p, 1 - 1e-12)
    for bits in iter_fk_free(L, p_fk, samples, burn, thinning, fk_seed):
        for name, ev in events.items():
            hits_fk[name] += bool(ev(g, bits))
    rows = []
    for name in events:
        a, b = hits_mu[name] / samples, hits_fk[name] / samples
        se = math.sqrt(a * (1 - a) / samples + b * (1 - b) / samples)
        rows.append({
            "event": name, "mu": a, "mu_se": math.sqrt(a * (1 - a) / samples),
            "fk": b, "fk_se": math.sqrt(b * (1 - b) / samples),
            "violation": bool(a - b > 3 * se),
        })
    return {"L": L, "p": p, "p_fk": 2 * p, "q": 2, "samples": samples, "seed": seed,
            "events": rows, "any_violation": any(r["violation"] for r in rows)}


def exact_ordering_check(L: int = 1, p=Fraction(1, 4)) -> list[dict]:
    """Exact probabilities of increasing events under the even measure of the
    box at p and the free FK(2p, 2) measure of the same box."""
    from .evenperc import exact_even_measure

    g = build_box(L)
    graph = box_graph(g)
    even = exact_even_measure(g, list(range(g.n_edges)), None, p)
    fk = exact_fk_table(graph, FKParams(2 * p, 2, "free"))
    events = {f"edge_{e}_open": (lambda m, e=e: m >> e & 1) for e in range(g.n_edges)}
    for row in range(1, g.m - 1):
        for col in range(1, g.m - 1):
            sq = g.face_edges(row, col)
            events[f"square_{row}_{col}_open"] = lambda m, sq=sq: all(m >> e & 1 for e in sq)

    def crossing_mask(m):
        bits = np.array([m >> e & 1 for e in range(g.n_edges)], dtype=np.uint8)
        return crossing_bits(g, bits, "horizontal", full_box=True)

    events["horizontal_crossing"] = crossing_mask
    out = []
    for name, ev in events.items():
        a = sum(pr for m, pr in even.table.items() if ev(m))
        b = sum(pr for m, pr in fk.items() if ev(m))
        out.append({"event": name, "mu": a, "fk": b, "ordered": a <= b})
    return out
