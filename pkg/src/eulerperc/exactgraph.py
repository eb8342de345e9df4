"""Exact even-subgraph sums on small finite multigraphs."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import gf2
from .polyarith import IntPolynomial

MAX_CYCLE_RANK = 30


@dataclass
class FiniteGraph:
    """Multigraph with named vertices and indexed edges (loops allowed)."""

    vertices: list[str]
    edges: list[tuple[int, int]]
    index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.vertices = [str(v) for v in self.vertices]
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex names")
        self.index = {v: i for i, v in enumerate(self.vertices)}
        n = len(self.vertices)
        self.edges = [(int(a), int(b)) for a, b in self.edges]
        for a, b in self.edges:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a}, {b}) refers to a missing vertex")

    @classmethod
    def from_pairs(cls, pairs) -> FiniteGraph:
        """Build from (u, v) name pairs; vertices appear in first-seen order."""
        names: list[str] = []
        seen: dict[str, int] = {}
        edges = []
        for u, v in pairs:
            for w in (str(u), str(v)):
                if w not in seen:
                    seen[w] = len(names)
                    names.append(w)
            edges.append((seen[str(u)], seen[str(v)]))
        return cls(names, edges)

    @classmethod
    def parse(cls, text: str) -> FiniteGraph:
        """One edge per line, ``u v``; blank lines and ``#`` comments ignored."""
        pairs = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected two vertex names, got {line!r}")
            pairs.append(tuple(parts))
        return cls.from_pairs(pairs)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degree(self, v) -> int:
        i = self.index[v] if isinstance(v, str) else v
        return sum((a == i) + (b == i) for a, b in self.edges)

    def degrees(self) -> list[int]:
        return [self.degree(i) for i in range(self.n_vertices)]

    def edge_index(self, u: str, v: str) -> int:
        a, b = self.index[u], self.index[v]
        for e, (x, y) in enumerate(self.edges):
            if {x, y} == {a, b}:
                return e
        raise KeyError(f"no edge between {u} and {v}")

    def n_components(self) -> int:
        parent = list(range(self.n_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.edges:
            parent[find(a)] = find(b)
        return len({find(i) for i in range(self.n_vertices)})

    def cycle_rank(self) -> int:
        return self.n_edges - self.n_vertices + self.n_components()

    def parity_rows(self) -> list[int]:
        rows = [0] * self.n_vertices
        for e, (a, b) in enumerate(self.edges):
            if a != b:
                rows[a] ^= 1 << e
                rows[b] ^= 1 << e
        return rows


def build_figure_graph() -> FiniteGraph:
    """Hub E0 joined to F0 directly and through three arms E0-Ei-Fi-F0."""
    pairs = [("E0", "F0")]
    for i in (1, 2, 3):
        pairs += [("E0", f"E{i}"), (f"E{i}", f"F{i}"), (f"F{i}", "F0")]
    names = ["E0", "E1", "E2", "E3", "F0", "F1", "F2", "F3"]
    g = FiniteGraph.from_pairs(pairs)
    return FiniteGraph(names, [(names.index(g.vertices[a]), names.index(g.vertices[b]))
                               for a, b in g.edges])


def even_subgraph_basis(g: FiniteGraph) -> list[int]:
    """Basis of the even-subgraph space, as edge bitmasks."""
    _, kernel = gf2.solve_affine(g.parity_rows(), [0] * g.n_vertices, g.n_edges)
    return kernel


def even_subgraphs(g: FiniteGraph) -> list[int]:
    basis = even_subgraph_basis(g)
    if len(basis) > MAX_CYCLE_RANK:
        raise ValueError(f"cycle rank {len(basis)} exceeds the enumeration limit {MAX_CYCLE_RANK}")
    return list(gf2.span(0, basis))


def mask_to_bits(mask: int, n: int) -> tuple[int, ...]:
    return tuple(mask >> i & 1 for i in range(n))


@dataclass(frozen=True)
class EventSpec:
    """Edges required open and required closed."""

    open: frozenset = frozenset()
    closed: frozenset = frozenset()
    name: str = ""

    def __post_init__(self):
        if self.open & self.closed:
            raise ValueError("an edge cannot be required both open and closed")

    def __and__(self, other: EventSpec) -> EventSpec:
        name = f"{self.name}&{other.name}" if self.name and other.name else ""
        return EventSpec(self.open | other.open, self.closed | other.closed, name)

    def holds(self, mask: int) -> bool:
        return all(mask >> e & 1 for e in self.open) and not any(mask >> e & 1 for e in self.closed)


ALWAYS = EventSpec(name="true")


def figure_events(g: FiniteGraph | None = None) -> dict[str, EventSpec]:
    """X0 = (E0F0) open, Xi = (EiFi) open, Ci = X0 and Xi."""
    g = g or build_figure_graph()
    ev = {"X0": EventSpec(frozenset({g.edge_index("E0", "F0")}), name="X0")}
    for i in (1, 2, 3):
        ev[f"X{i}"] = EventSpec(frozenset({g.edge_index(f"E{i}", f"F{i}")}), name=f"X{i}")
    for i in (1, 2, 3):
        c = ev["X0"] & ev[f"X{i}"]
        ev[f"C{i}"] = EventSpec(c.open, c.closed, f"C{i}")
    return ev


def parse_event(text: str, g: FiniteGraph, named: dict[str, EventSpec] | None = None) -> EventSpec:
    """``&``-joined terms: a named event, ``u-v`` (edge open), ``!u-v`` (closed) or ``#k``."""
    named = named or {}
    ev = EventSpec(name=text)
    out_open, out_closed = set(), set()
    for term in (t.strip() for t in text.split("&")):
        if not term:
            raise ValueError(f"empty term in event {text!r}")
        if term in named:
            out_open |= named[term].open
            out_closed |= named[term].closed
            continue
        neg = term.startswith("!")
        body = term[1:] if neg else term
        if body.startswith("#"):
            e = int(body[1:])
            if not 0 <= e < g.n_edges:
                raise ValueError(f"edge index {e} out of range")
        elif "-" in body:
            u, v = body.split("-", 1)
            e = g.edge_index(u, v)
        else:
            raise ValueError(f"cannot parse event term {term!r}")
        (out_closed if neg else out_open).add(e)
    return EventSpec(frozenset(out_open), frozenset(out_closed), ev.name)


def partition_poly(g: FiniteGraph) -> IntPolynomial:
    return event_poly(g, ALWAYS)


def event_poly(g: FiniteGraph, ev: EventSpec) -> IntPolynomial:
    terms: dict[int, int] = {}
    for mask in even_subgraphs(g):
        if ev.holds(mask):
            k = gf2.popcount(mask)
            terms[k] = terms.get(k, 0) + 1
    return IntPolynomial.from_terms(terms)


def covariance_numerator(g: FiniteGraph, a: EventSpec, b: EventSpec) -> IntPolynomial:
    """Numerator of Cov(A, B) over Z^2."""
    return event_poly(g, a & b) * partition_poly(g) - event_poly(g, a) * event_poly(g, b)


def probability(g: FiniteGraph, ev: EventSpec, p) -> Fraction:
    p = Fraction(p)
    q = p / (1 - p)
    return event_poly(g, ev)(q) / partition_poly(g)(q)


def q_of_p(p):
    return p / (1 - p)
