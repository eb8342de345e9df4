"""Square-by-square coupling of Ber(p) and Ber(1-p) edges on the even faces of a box.

Each even face carries four edges.  The coupled pair either agrees on the
square or the second configuration is the complement of the first there;
complementing a square preserves the degree parity of its corners.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from . import kernels
from .contour import EdgeConfig, contour_bits
from .ising import IsingParams, beta_of_p, checkerboard_sign, default_burnin, iter_gibbs
from .lattice import BoxGeometry, build_box, even_face_mask, even_sublattice_squares

# corners of a face: 0 bottom-left, 1 bottom-right, 2 top-right, 3 top-left;
# face edges come as (bottom, right, top, left)
SQUARE_EDGE_CORNERS = ((0, 1), (1, 2), (2, 3), (3, 0))


def _check_p(p):
    if not 0 < p < 0.5:
        raise ValueError(f"the coupling needs 0 < p < 1/2 (some table entries are negative otherwise), got {p}")


def _popcount4(a: int) -> int:
    return bin(a & 15).count("1")


@dataclass
class SquareCouplingTable:
    """Joint law of (omega, omega_tilde) on one square.

    ``same[a]`` is P(omega = a, omega_tilde = a) and ``flip[a]`` is
    P(omega = a, omega_tilde = ~a), for 4-bit masks ``a``.
    """

    p: Fraction | float
    same: list
    flip: list

    def entries(self) -> dict[tuple[int, int], Fraction | float]:
        out = {}
        for a in range(16):
            out[(a, a)] = out.get((a, a), 0) + self.same[a]
            out[(a, a ^ 15)] = out.get((a, a ^ 15), 0) + self.flip[a]
        return out

    def total(self):
        return sum(self.same) + sum(self.flip)

    def first_marginal(self) -> list:
        return [self.same[a] + self.flip[a] for a in range(16)]

    def second_marginal(self) -> list:
        return [self.same[b] + self.flip[b ^ 15] for b in range(16)]


def bernoulli4(p, a: int):
    """Probability of the 4-bit pattern ``a`` under independent Ber(p) bits."""
    k = _popcount4(a)
    return p ** k * (1 - p) ** (4 - k)


def build_table(p) -> SquareCouplingTable:
    _check_p(p)
    same, flip = [], []
    for a in range(16):
        k = _popcount4(a)
        same.append(bernoulli4(p, a) if k >= 2 else p ** (4 - k) * (1 - p) ** k)
        if k == 0:
            flip.append((1 - p) ** 4 - p ** 4)
        elif k == 1:
            flip.append(p * (1 - p) ** 3 - p ** 3 * (1 - p))
        else:
            flip.append(p * 0)
    return SquareCouplingTable(p, same, flip)


def flip_probability(n_open: int, p):
    """P(complement the square | omega has ``n_open`` open edges there)."""
    _check_p(p)
    q = p / (1 - p)
    if n_open == 0:
        return 1 - q ** 4
    if n_open == 1:
        return 1 - q ** 2
    return p * 0


def conditional_flip(omega4, p, rng=None) -> tuple[int, int, int, int]:
    """Draw omega_tilde on one square given omega there (4 bits)."""
    bits = tuple(int(b) for b in omega4)
    if len(bits) != 4 or any(b not in (0, 1) for b in bits):
        raise ValueError("a square has exactly four 0/1 bits")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    if rng.random() < flip_probability(sum(bits), p):
        return tuple(1 - b for b in bits)
    return bits


def _square_connectivity(a: int) -> frozenset:
    """Pairs of corners joined through open edges of the pattern ``a``."""
    parent = list(range(4))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for i, (u, v) in enumerate(SQUARE_EDGE_CORNERS):
        if a >> i & 1:
            parent[find(u)] = find(v)
    return frozenset((u, v) for u in range(4) for v in range(u + 1, 4) if find(u) == find(v))


def square_domination_cases(p=Fraction(1, 4)) -> list[tuple[int, int, bool]]:
    """Every (omega, omega_tilde) square pair with positive mass, and whether
    omega_tilde connects all corner pairs that omega connects."""
    table = build_table(p)
    cases = []
    for (a, b), mass in sorted(table.entries().items()):
        if mass > 0:
            cases.append((a, b, _square_connectivity(a) <= _square_connectivity(b)))
    return cases


# -- box coupling --------------------------------------------------------------

@dataclass
class CouplingSample:
    omega: EdgeConfig
    omega_tilde: EdgeConfig


def coupling_frozen_mask(g: BoxGeometry) -> np.ndarray:
    """Ring plus the odd faces of the outermost inner layer.

    Freezing those faces to the ring value closes every edge that is not on
    an inner even square, so omega lives on the union of the squares.
    """
    frozen = ~g.interior_mask()
    layer = np.zeros_like(frozen)
    layer[1, 1:-1] = layer[-2, 1:-1] = layer[1:-1, 1] = layer[1:-1, -2] = True
    return frozen | (layer & ~even_face_mask(g))


def square_array(g: BoxGeometry) -> np.ndarray:
    return np.array(even_sublattice_squares(g), dtype=np.intp).reshape(-1, 4)


def coupled_edges(g: BoxGeometry) -> np.ndarray:
    return np.sort(square_array(g).ravel())


def apply_flips(omega_bits: np.ndarray, squares: np.ndarray, p: float, u: np.ndarray) -> np.ndarray:
    """Vectorised conditional flips; ``u`` holds one uniform per square."""
    q = p / (1 - p)
    k = omega_bits[squares].sum(axis=1)
    flip = ((k == 0) & (u < 1 - q ** 4)) | ((k == 1) & (u < 1 - q ** 2))
    out = omega_bits.copy()
    sel = squares[flip].ravel()
    out[sel] ^= 1
    return out


def iter_omega(L: int, p: float, n_samples: int, n_burnin: int | None = None, thinning: int = 1,
               seed=0, method: str = "glauber") -> Iterator[np.ndarray]:
    """Even configurations at p supported on the even squares of the box."""
    g = build_box(L)
    beta = beta_of_p(p)
    if n_burnin is None:
        n_burnin = default_burnin(L, beta, method)
    frozen = coupling_frozen_mask(g)
    # for p > 1/2 ask for the checkerboard boundary of the ferromagnetic twin,
    # so the emitted spins see a plus boundary
    boundary = checkerboard_sign(g.m) if beta < 0 else "plus"
    for spins in iter_gibbs(g, IsingParams(beta, boundary, frozen), n_burnin, n_samples,
                            thinning, seed, method):
        yield contour_bits(g, spins)


def iter_couplings(L: int, p: float, n_samples: int, n_burnin: int | None = None, thinning: int = 1,
                   seed=0, method: str = "glauber"):
    """Yield (omega_bits, omega_tilde_bits) pairs from one chain."""
    _check_p(p)
    g = build_box(L)
    squares = square_array(g)
    if isinstance(seed, np.random.Generator):
        chain = rng = seed
    else:
        chain_seed, flip_seed = np.random.SeedSequence(seed).spawn(2)
        chain = np.random.Generator(np.random.PCG64(chain_seed))
        rng = np.random.Generator(np.random.PCG64(flip_seed))
    for omega in iter_omega(L, p, n_samples, n_burnin, thinning, chain, method):
        yield omega, apply_flips(omega, squares, p, rng.random(len(squares)))


def couple_even_box(L: int, p: float, sweeps: int | None = None, seed=0,
                    method: str = "glauber") -> CouplingSample:
    g = build_box(L)
    omega, tilde = next(iter_couplings(L, p, 1, sweeps, 1, seed, method))
    return CouplingSample(EdgeConfig(g, omega), EdgeConfig(g, tilde))


def _labels(g: BoxGeometry, bits: np.ndarray) -> np.ndarray:
    h, v = g.split(bits)
    return kernels.label_grid(np.ascontiguousarray(h, dtype=np.uint8),
                              np.ascontiguousarray(v, dtype=np.uint8))


def refines(g: BoxGeometry, a: np.ndarray, b: np.ndarray) -> bool:
    """Every pair connected in ``a`` is connected in ``b``."""
    la, lb = _labels(g, a), _labels(g, b)
    # each a-cluster must sit inside one b-cluster
    first_b = np.full(la.max() + 1, -1, dtype=np.int64)
    first_b[la[::-1]] = lb[::-1]
    return bool(np.all(first_b[la] == lb))


def check_P2(sample: CouplingSample) -> bool:
    return refines(sample.omega.geometry, sample.omega.bits, sample.omega_tilde.bits)


def check_P3(sample: CouplingSample) -> bool:
    g = sample.omega.geometry
    mask = g.inner_sites_mask()
    da = g.degrees(sample.omega.bits)[mask] & 1
    db = g.degrees(sample.omega_tilde.bits)[mask] & 1
    return bool(np.array_equal(da, db))


def is_incomparable(sample: CouplingSample) -> bool:
    a, b = sample.omega.bits, sample.omega_tilde.bits
    return bool(np.any(a & ~b & 1) and np.any(b & ~a & 1))


def squares_consistent(sample: CouplingSample) -> bool:
    """On every square omega_tilde equals omega or its complement."""
    sq = square_array(sample.omega.geometry)
    a, b = sample.omega.bits[sq], sample.omega_tilde.bits[sq]
    return bool(np.all(np.all(a == b, axis=1) | np.all(a != b, axis=1)))


def exact_coupled_measure(L: int, p):
    """Exact law, on the squares of the box, of even configurations at ``p``
    with every other edge closed."""
    from .evenperc import exact_even_measure

    g = build_box(L)
    return exact_even_measure(g, list(coupled_edges(g)), None, p)


def coupling_tv_unit(p) -> float:
    """Largest deviation of the table marginals from the Bernoulli laws."""
    t = build_table(p)
    first = t.first_marginal()
    second = t.second_marginal()
    return max(
        max(abs(first[a] - bernoulli4(p, a)) for a in range(16)),
        max(abs(second[a] - bernoulli4(1 - p, a)) for a in range(16)),
    )


def verify_coupling_report(L: int, p: float, samples: int, seed: int = 0, method: str = "sw",
                           thinning: int = 2, n_burnin: int | None = None) -> dict:
    """Run the coupled sampler and check it sample by sample.

    Window marginals of omega and omega_tilde are compared with the exact
    laws at p and 1 - p when the box is small enough to enumerate (window:
    coupled edges around the central 2 x 2 faces), and otherwise with
    independent direct samples on the central even square, whose few
    patterns keep the two-sample distance informative.
    """
    from .evenperc import central_window, total_variation, window_distribution
    from .seeding import seed_stream

    _check_p(p)
    g = build_box(L)
    if n_burnin is None:
        n_burnin = max(100, 2 * L) if method == "sw" else default_burnin(L, beta_of_p(p), method)
    if L <= 2:
        coupled = set(int(e) for e in coupled_edges(g))
        window = [e for e in central_window(g) if e in coupled]
    else:
        window = list(g.face_edges(L + 1, L + 2))
    omegas = np.empty((samples, g.n_edges), dtype=np.uint8)
    tildes = np.empty_like(omegas)
    p2 = p3 = incomparable = inconsistent = 0
    for i, (a, b) in enumerate(iter_couplings(L, p, samples, n_burnin, thinning, seed_stream(seed, 0), method)):
        omegas[i], tildes[i] = a, b
        s = CouplingSample(EdgeConfig(g, a), EdgeConfig(g, b))
        p2 += not check_P2(s)
        p3 += not check_P3(s)
        incomparable += is_incomparable(s)
        inconsistent += not squares_consistent(s)
    emp_o = window_distribution(omegas, window)
    emp_t = window_distribution(tildes, window)
    if L <= 2:
        ref_o = exact_coupled_measure(L, p).marginal(window)
        ref_t = exact_coupled_measure(L, 1 - p).marginal(window)
        method_used = "exact"
    else:
        ref_o = window_distribution(
            np.array(list(iter_omega(L, p, samples, n_burnin, thinning, seed_stream(seed, 1), method))), window)
        ref_t = window_distribution(
            np.array(list(iter_omega(L, 1 - p, samples, n_burnin, thinning, seed_stream(seed, 2), method))), window)
        method_used = "independent-samples"
    return {
        "p": p, "L": L, "samples": samples, "seed": seed,
        "p1_tv_omega": total_variation(emp_o, ref_o),
        "p1_tv_tilde": total_variation(emp_t, ref_t),
        "p1_method": method_used,
        "p1_window_edges": len(window),
        "p2_violations": p2,
        "p3_violations": p3,
        "square_violations": inconsistent,
        "incomparable_fraction": incomparable / samples,
    }
