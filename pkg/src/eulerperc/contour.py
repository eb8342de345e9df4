"""Edge configurations, the contour map from dual spins to even edge sets, and its inverse."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ising import SpinConfig
from .lattice import BoxGeometry, build_box


@dataclass
class EdgeConfig:
    """One open/closed bit per edge of ``geometry``."""

    geometry: BoxGeometry
    bits: np.ndarray

    def __post_init__(self):
        self.bits = np.ascontiguousarray(self.bits, dtype=np.uint8)
        if self.bits.shape != (self.geometry.n_edges,):
            raise ValueError(
                f"expected {self.geometry.n_edges} edge bits, got shape {self.bits.shape}")

    @classmethod
    def empty(cls, geometry: BoxGeometry) -> EdgeConfig:
        return cls(geometry, np.zeros(geometry.n_edges, dtype=np.uint8))

    @classmethod
    def full(cls, geometry: BoxGeometry) -> EdgeConfig:
        return cls(geometry, np.ones(geometry.n_edges, dtype=np.uint8))

    @classmethod
    def from_edges(cls, geometry: BoxGeometry, edges) -> EdgeConfig:
        bits = np.zeros(geometry.n_edges, dtype=np.uint8)
        bits[list(edges)] = 1
        return cls(geometry, bits)

    @property
    def n_open(self) -> int:
        return int(self.bits.sum())

    def open_edges(self) -> list[int]:
        return [int(e) for e in np.flatnonzero(self.bits)]

    def __eq__(self, other):
        return (isinstance(other, EdgeConfig) and other.geometry.L == self.geometry.L
                and np.array_equal(self.bits, other.bits))

    def __xor__(self, other: EdgeConfig) -> EdgeConfig:
        return EdgeConfig(self.geometry, self.bits ^ other.bits)

    def to_hex(self) -> str:
        """Bits in edge order, packed most-significant-bit first."""
        return np.packbits(self.bits).tobytes().hex()

    @classmethod
    def from_hex(cls, geometry: BoxGeometry, text: str) -> EdgeConfig:
        raw = np.frombuffer(bytes.fromhex(text), dtype=np.uint8)
        return cls(geometry, np.unpackbits(raw)[: geometry.n_edges])

    def to_ascii(self) -> str:
        """Grid picture, top row first: 'o' sites, '-' and '|' open edges."""
        g = self.geometry
        h, v = g.split(self.bits)
        lines = []
        for r in range(g.n - 1, -1, -1):
            lines.append("o" + "".join(("-" if h[r, c] else " ") + "o" for c in range(g.n - 1)))
            if r > 0:
                lines.append(" ".join("|" if v[r - 1, c] else " " for c in range(g.n)))
        return "\n".join(lines)

    @classmethod
    def from_ascii(cls, text: str) -> EdgeConfig:
        lines = text.split("\n")
        n = (len(lines) + 1) // 2
        g = build_box((n - 1) // 2)
        bits = np.zeros(g.n_edges, dtype=np.uint8)
        for i, r in enumerate(range(n - 1, -1, -1)):
            row = lines[2 * i].ljust(2 * n - 1)
            for c in range(n - 1):
                if row[2 * c + 1] == "-":
                    bits[g.h_index[r, c]] = 1
            if r > 0:
                vrow = lines[2 * i + 1].ljust(2 * n - 1)
                for c in range(n):
                    if vrow[2 * c] == "|":
                        bits[g.v_index[r - 1, c]] = 1
        return cls(g, bits)


def _as_spin_array(spins) -> tuple[BoxGeometry, np.ndarray]:
    if isinstance(spins, SpinConfig):
        return spins.geometry, spins.spins
    arr = np.asarray(spins)
    return build_box((arr.shape[0] - 2) // 2), arr


def contour_bits(geometry: BoxGeometry, spins: np.ndarray) -> np.ndarray:
    """Edge bits of the contour configuration of an (m, m) spin array."""
    h = spins[:-1, 1:-1] != spins[1:, 1:-1]
    v = spins[1:-1, :-1] != spins[1:-1, 1:]
    bits = np.empty(geometry.n_edges, dtype=np.uint8)
    bits[geometry.h_index.ravel()] = h.ravel()
    bits[geometry.v_index.ravel()] = v.ravel()
    return bits


def contours(spins) -> EdgeConfig:
    """Open exactly the edges whose two adjacent dual spins differ."""
    g, arr = _as_spin_array(spins)
    return EdgeConfig(g, contour_bits(g, arr))


def is_even(cfg: EdgeConfig, interior=None) -> bool:
    """Every site of ``interior`` has even open degree.

    ``interior`` is an (n, n) mask over primal sites, a list of (x, y)
    sites, or None for all sites off the box boundary.
    """
    g = cfg.geometry
    deg = g.degrees(cfg.bits)
    if interior is None:
        mask = g.inner_sites_mask()
    elif isinstance(interior, np.ndarray) and interior.dtype == bool:
        mask = interior
    else:
        mask = np.zeros((g.n, g.n), dtype=bool)
        for x, y in interior:
            mask[y + g.L, x + g.L] = True
    return not np.any(deg[mask] & 1)


def root_position(geometry: BoxGeometry) -> tuple[int, int]:
    """Dual array position of the face just above and right of the origin."""
    return geometry.L + 1, geometry.L + 1


def coloring_of(cfg: EdgeConfig, root_value: int = 1) -> SpinConfig:
    """The coloring whose contours are ``cfg`` and whose root spin is ``root_value``.

    Spins are propagated across box edges only; the four ring corners, which
    touch no box edge, copy their horizontal neighbour.
    """
    if root_value not in (1, -1):
        raise ValueError("root_value must be +1 or -1")
    if not is_even(cfg):
        raise ValueError("configuration is not even at every inner site; no coloring exists")
    g = cfg.geometry
    m = g.m
    h, v = g.split(cfg.bits.astype(np.int8))
    r0, c0 = root_position(g)
    out = np.zeros((m, m), dtype=np.int8)
    # along the root row through vertical edges
    row = np.zeros(m, dtype=np.int64)
    row[1:] = np.cumsum(v[r0 - 1, :])
    row -= row[c0]
    out[r0, :] = np.where(row % 2 == 0, 1, -1) * root_value
    # each inner column through horizontal edges
    col = np.zeros((m, m - 2), dtype=np.int64)
    col[1:, :] = np.cumsum(h, axis=0)
    col -= col[r0, :]
    out[:, 1:-1] = np.where(col % 2 == 0, 1, -1) * out[r0, 1:-1]
    # left and right ring columns
    out[1:-1, 0] = np.where(v[:, 0] == 1, -out[1:-1, 1], out[1:-1, 1])
    out[1:-1, -1] = np.where(v[:, -1] == 1, -out[1:-1, -2], out[1:-1, -2])
    for r in (0, m - 1):
        out[r, 0] = out[r, 1]
        out[r, -1] = out[r, -2]
    return SpinConfig(g, out)


def _path_vertices(g: BoxGeometry, path: list[int]) -> list[int]:
    ends = [tuple(int(s) for s in g.edge_ends[e]) for e in path]
    if len(ends) == 1:
        return list(ends[0])
    a, b = ends[0]
    start = a if a not in ends[1] else b
    verts = [start]
    for u, w in ends:
        cur = verts[-1]
        if cur == u:
            verts.append(w)
        elif cur == w:
            verts.append(u)
        else:
            raise ValueError("consecutive path edges do not share an endpoint")
    return verts


def star_chain_from_path(spins, path) -> list[tuple[int, int]]:
    """Plus-spin dual sites hugging an open contour path.

    For each path edge, take the dual site on its +1 side; consecutive
    repeats are merged.  Successive sites are *-neighbours because the
    +1 faces of two edges sharing a vertex both touch that vertex.
    Returns dual array positions (row, col).
    """
    g, arr = _as_spin_array(spins)
    path = [int(e) for e in path]
    if not path:
        raise ValueError("empty path")
    bits = contour_bits(g, arr)
    closed = [e for e in path if not bits[e]]
    if closed:
        raise ValueError(f"edges {closed} are not open in the contour configuration")
    verts = _path_vertices(g, path)
    if len(set(verts)) != len(verts):
        raise ValueError("path is not self-avoiding")
    m = g.m
    flat = arr.ravel()
    chain: list[tuple[int, int]] = []
    for e in path:
        a, b = g.edge_dual[e]
        site = int(a) if flat[a] > 0 else int(b)
        pos = divmod(site, m)
        if not chain or chain[-1] != pos:
            chain.append(pos)
    return chain
