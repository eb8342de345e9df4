"""Finite boxes of Z^2, their dual sites and edge indexing.

Primal sites are the integer points of [-L, L]^2, stored row-major with the
row given by y.  Dual sites are the faces (a + 1/2, b + 1/2) for
a, b in {-L-1, ..., L}: the (2L)^2 faces inside the box plus one frozen ring
of outer faces, so every box edge separates two dual sites.  Arrays of dual
spins have shape (2L+2, 2L+2) with row b + L + 1 and column a + L + 1.

Edges are numbered by scanning sites row-major and emitting the edge to the
right, then the edge going up.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

Site = tuple[int, int]


def _frozen_array(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class BoxGeometry:
    L: int
    n: int = field(init=False)
    m: int = field(init=False)
    h_index: np.ndarray = field(init=False, repr=False)
    v_index: np.ndarray = field(init=False, repr=False)
    edge_ends: np.ndarray = field(init=False, repr=False)
    edge_dual: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        L = self.L
        n, m = 2 * L + 1, 2 * L + 2
        h_index = np.empty((n, n - 1), dtype=np.intp)
        v_index = np.empty((n - 1, n), dtype=np.intp)
        ends, dual = [], []
        k = 0
        for r in range(n):
            for c in range(n):
                s = r * n + c
                if c < n - 1:
                    h_index[r, c] = k
                    ends.append((s, s + 1))
                    # faces below and above the horizontal edge
                    dual.append((r * m + c + 1, (r + 1) * m + c + 1))
                    k += 1
                if r < n - 1:
                    v_index[r, c] = k
                    ends.append((s, s + n))
                    # faces left and right of the vertical edge
                    dual.append(((r + 1) * m + c, (r + 1) * m + c + 1))
                    k += 1
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "h_index", _frozen_array(h_index))
        object.__setattr__(self, "v_index", _frozen_array(v_index))
        object.__setattr__(self, "edge_ends", _frozen_array(np.array(ends, dtype=np.intp)))
        object.__setattr__(self, "edge_dual", _frozen_array(np.array(dual, dtype=np.intp)))

    # -- counts and coordinates -------------------------------------------
    @property
    def n_edges(self) -> int:
        return len(self.edge_ends)

    @property
    def n_sites(self) -> int:
        return self.n * self.n

    @property
    def primal_sites(self) -> list[Site]:
        L = self.L
        return [(x, y) for y in range(-L, L + 1) for x in range(-L, L + 1)]

    @property
    def dual_sites(self) -> list[tuple[float, float]]:
        L = self.L
        return [(a + 0.5, b + 0.5) for b in range(-L - 1, L + 1) for a in range(-L - 1, L + 1)]

    @property
    def edges(self) -> list[tuple[Site, Site]]:
        sites = self.primal_sites
        return [(sites[a], sites[b]) for a, b in self.edge_ends]

    def site_index(self, x: Site) -> int:
        if not self.contains(x):
            raise ValueError(f"site {x} is outside the box of half-width {self.L}")
        return (x[1] + self.L) * self.n + (x[0] + self.L)

    def contains(self, x: Site) -> bool:
        return abs(x[0]) <= self.L and abs(x[1]) <= self.L

    def dual_index(self, face: tuple[int, int]) -> tuple[int, int]:
        """Array position (row, col) of the face whose lower-left corner is ``face``."""
        a, b = face
        if not (-self.L - 1 <= a <= self.L and -self.L - 1 <= b <= self.L):
            raise ValueError(f"face {face} is outside the dual box")
        return b + self.L + 1, a + self.L + 1

    # -- dual structure ----------------------------------------------------
    def interior_mask(self) -> np.ndarray:
        """Boolean (m, m) mask of the faces inside the box."""
        mask = np.zeros((self.m, self.m), dtype=bool)
        mask[1:-1, 1:-1] = True
        return mask

    def dual_edge(self, e: int) -> tuple[int, int]:
        """Flat dual-site indices of the dual edge crossing edge ``e``."""
        a, b = self.edge_dual[e]
        return int(a), int(b)

    def edge_of_dual(self, a: int, b: int) -> int:
        """Index of the primal edge crossed by the dual edge {a, b}."""
        m = self.m
        a, b = min(a, b), max(a, b)
        (ra, ca), (rb, cb) = divmod(a, m), divmod(b, m)
        if ra + 1 == rb and ca == cb and 1 <= ca <= m - 2:
            return int(self.h_index[ra, ca - 1])
        if ra == rb and ca + 1 == cb and 1 <= ra <= m - 2:
            return int(self.v_index[ra - 1, ca])
        raise ValueError(f"dual sites {a}, {b} do not cross a box edge")

    def edges_touching_dual(self, cells) -> list[int]:
        """Edges whose dual edge has an end among ``cells`` ((row, col) pairs)."""
        flat = {r * self.m + c for r, c in cells}
        return [e for e, (a, b) in enumerate(self.edge_dual) if a in flat or b in flat]

    def face_edges(self, row: int, col: int) -> tuple[int, int, int, int]:
        """The four edges around the interior face at dual array position (row, col)."""
        if not (1 <= row <= self.m - 2 and 1 <= col <= self.m - 2):
            raise ValueError("face is not inside the box")
        r, c = row - 1, col - 1
        return (
            int(self.h_index[r, c]),
            int(self.v_index[r, c + 1]),
            int(self.h_index[r + 1, c]),
            int(self.v_index[r, c]),
        )

    # -- primal structure --------------------------------------------------
    def incident_edges(self, x: Site) -> list[int]:
        return incident_edges(self, x)

    def inner_sites_mask(self) -> np.ndarray:
        """Primal sites not on the box boundary, as an (n, n) mask."""
        mask = np.zeros((self.n, self.n), dtype=bool)
        mask[1:-1, 1:-1] = True
        return mask

    def split(self, bits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Horizontal (n, n-1) and vertical (n-1, n) views of an edge bit vector."""
        return bits[self.h_index], bits[self.v_index]

    def degrees(self, bits: np.ndarray) -> np.ndarray:
        """Open degree of every primal site, shape (n, n)."""
        h, v = self.split(np.asarray(bits, dtype=np.int16))
        deg = np.zeros((self.n, self.n), dtype=np.int16)
        deg[:, :-1] += h
        deg[:, 1:] += h
        deg[:-1, :] += v
        deg[1:, :] += v
        return deg


@lru_cache(maxsize=64)
def build_box(L: int) -> BoxGeometry:
    if not isinstance(L, (int, np.integer)) or L < 1:
        raise ValueError(f"box half-width must be a positive integer, got {L!r}")
    return BoxGeometry(int(L))


def incident_edges(g: BoxGeometry, x: Site) -> list[int]:
    s = g.site_index(x)
    return [e for e, (a, b) in enumerate(g.edge_ends) if a == s or b == s]


def star_neighbors(x: Site) -> list[Site]:
    return [(x[0] + dx, x[1] + dy) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if dx or dy]


def neighbors(x: Site) -> list[Site]:
    return [(x[0] + 1, x[1]), (x[0], x[1] + 1), (x[0] - 1, x[1]), (x[0], x[1] - 1)]


def even_sublattice_squares(g: BoxGeometry) -> list[tuple[int, int, int, int]]:
    """Edge groups of the faces inside the box whose centre has even coordinate sum.

    The groups are pairwise disjoint; edges whose even face lies outside the
    box are not covered.
    """
    squares = []
    for row in range(1, g.m - 1):
        for col in range(1, g.m - 1):
            # centre coordinate sum is row + col - 2L - 1
            if (row + col) % 2 == 1:
                squares.append(g.face_edges(row, col))
    return squares


def even_face_mask(g: BoxGeometry) -> np.ndarray:
    parity = np.add.outer(np.arange(g.m), np.arange(g.m)) % 2
    return (parity == 1) & g.interior_mask()
