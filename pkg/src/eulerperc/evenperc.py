"""Even (Eulerian) bond percolation in a box: exact conditional tables and contour sampling."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from . import gf2
from .contour import EdgeConfig, contour_bits, contours
from .ising import (IsingParams, beta_of_p, checkerboard_sign, default_burnin,
                    exact_local_distribution, iter_gibbs)
from .lattice import BoxGeometry, build_box

MAX_KERNEL_DIM = 22


class UnsatisfiableBoundary(ValueError):
    """The boundary leaves no even completion of the window."""


@dataclass
class EvenBoxMeasure:
    """Exact law of the window edges given the boundary.

    ``table`` maps a window bitmask (bit i = window[i] open) to its probability.
    """

    geometry: BoxGeometry
    window: list[int]
    boundary: np.ndarray
    p: float | Fraction
    table: dict[int, float | Fraction]

    def __len__(self):
        return len(self.table)

    def probability(self, edges_open) -> float | Fraction:
        pos = {e: i for i, e in enumerate(self.window)}
        mask = 0
        for e in edges_open:
            mask |= 1 << pos[e]
        return self.table.get(mask, 0)

    def marginal(self, edges) -> dict[tuple[int, ...], float | Fraction]:
        """Law of the bits of ``edges`` (a subset of the window), keyed by bit tuples."""
        pos = {e: i for i, e in enumerate(self.window)}
        idx = [pos[e] for e in edges]
        out: dict[tuple[int, ...], float | Fraction] = {}
        for mask, pr in self.table.items():
            key = tuple(mask >> i & 1 for i in idx)
            out[key] = out.get(key, 0) + pr
        return out

    def configs(self) -> list[EdgeConfig]:
        """Full edge configurations (boundary plus window) in the support."""
        out = []
        for mask in self.table:
            bits = self.boundary.copy()
            for i, e in enumerate(self.window):
                bits[e] = mask >> i & 1
            out.append(EdgeConfig(self.geometry, bits))
        return out


def even_completions(geometry: BoxGeometry, window, boundary=None) -> tuple[list[int], int, list[int]]:
    """Parity system for the window edges.

    Every site touched by a window edge must have even open degree; edges
    outside the box count as closed.  Returns (window, particular, kernel)
    with bitmasks over window positions.
    """
    window = [int(e) for e in window]
    if len(set(window)) != len(window):
        raise ValueError("window lists an edge twice")
    bits = np.zeros(geometry.n_edges, dtype=np.uint8) if boundary is None else _bits(boundary)
    pos = {e: i for i, e in enumerate(window)}
    sites = sorted({int(s) for e in window for s in geometry.edge_ends[e]})
    incident: dict[int, list[int]] = {s: [] for s in sites}
    for e, (a, b) in enumerate(geometry.edge_ends):
        for s in (int(a), int(b)):
            if s in incident:
                incident[s].append(e)
    rows, rhs = [], []
    for s in sites:
        row, parity = 0, 0
        for e in incident[s]:
            if e in pos:
                row |= 1 << pos[e]
            else:
                parity ^= int(bits[e])
        rows.append(row)
        rhs.append(parity)
    x, kernel = gf2.solve_affine(rows, rhs, len(window))
    if x is None:
        raise UnsatisfiableBoundary("no even completion of the window exists for this boundary")
    return window, x, kernel


def _bits(boundary) -> np.ndarray:
    if isinstance(boundary, EdgeConfig):
        return boundary.bits.copy()
    return np.asarray(boundary, dtype=np.uint8).copy()


def exact_even_measure(geometry: BoxGeometry, window, boundary=None, p=0.5) -> EvenBoxMeasure:
    """Enumerate the even completions of ``window`` with weight (p/(1-p))^#open.

    A Fraction ``p`` gives exact Fraction probabilities.
    """
    if not 0 < p < 1:
        raise ValueError(f"p must lie strictly between 0 and 1, got {p}")
    window, x, kernel = even_completions(geometry, window, boundary)
    if len(kernel) > MAX_KERNEL_DIM:
        raise ValueError(f"window has {len(kernel)} independent cycles; the limit is {MAX_KERNEL_DIM}")
    bits = np.zeros(geometry.n_edges, dtype=np.uint8) if boundary is None else _bits(boundary)
    bits[window] = 0
    counts = {mask: gf2.popcount(mask) for mask in gf2.span(x, kernel)}
    if isinstance(p, Fraction):
        q = p / (1 - p)
        w = {mask: q ** k for mask, k in counts.items()}
        z = sum(w.values())
        table = {mask: v / z for mask, v in w.items()}
    else:
        q = p / (1 - p)
        # shift exponents so the largest weight is 1
        kmax = max(counts.values()) if q > 1 else min(counts.values())
        w = {mask: q ** (k - kmax) for mask, k in counts.items()}
        z = math.fsum(w.values())
        table = {mask: v / z for mask, v in w.items()}
    return EvenBoxMeasure(geometry, window, bits, p, table)


def count_even_completions(geometry: BoxGeometry, window, boundary=None) -> int:
    _, _, kernel = even_completions(geometry, window, boundary)
    return 1 << len(kernel)


# -- sampling ----------------------------------------------------------------

def iter_mu_p(L: int, p: float, n_samples: int, n_burnin: int | None = None, thinning: int = 1,
              seed=0, method: str = "glauber") -> Iterator[np.ndarray]:
    """Edge-bit arrays of the contours of a dual Ising chain at beta(p), plus boundary.

    For p > 1/2 the chain is antiferromagnetic and runs through the
    checkerboard map, so the effective boundary alternates.
    """
    g = build_box(L)
    beta = beta_of_p(p)
    if n_burnin is None:
        n_burnin = default_burnin(L, beta, method)
    for spins in iter_gibbs(g, IsingParams(beta, "plus"), n_burnin, n_samples, thinning, seed, method):
        yield contour_bits(g, spins)


def sample_mu_p(L: int, p: float, sweeps: int | None = None, seed=0, method: str = "glauber") -> EdgeConfig:
    bits = next(iter_mu_p(L, p, 1, sweeps, 1, seed, method))
    return EdgeConfig(build_box(L), bits)


def sample_mu_p_batch(L: int, p: float, n_samples: int, n_burnin: int | None = None, thinning: int = 1,
                      seed=0, method: str = "glauber") -> np.ndarray:
    """(n_samples, n_edges) uint8 array from one chain."""
    g = build_box(L)
    out = np.empty((n_samples, g.n_edges), dtype=np.uint8)
    for i, bits in enumerate(iter_mu_p(L, p, n_samples, n_burnin, thinning, seed, method)):
        out[i] = bits
    return out


def sampler_boundary(L: int, p: float) -> np.ndarray:
    """Coloring, on the box one size larger, that freezes the sampler's ring at p.

    Array positions shift by one between the two boxes, which leaves the
    checkerboard parity unchanged.
    """
    big = build_box(L + 1)
    if p > 0.5:
        return checkerboard_sign(big.m)
    return np.ones((big.m, big.m), dtype=np.int8)


def edge_map(small: BoxGeometry, big: BoxGeometry) -> np.ndarray:
    """Index in ``big`` of every edge of ``small`` (same coordinates)."""
    sites = small.primal_sites
    out = np.empty(small.n_edges, dtype=np.intp)
    for e, (a, b) in enumerate(small.edge_ends):
        sa, sb = big.site_index(sites[a]), big.site_index(sites[b])
        out[e] = next(f for f, (x, y) in enumerate(big.edge_ends) if {int(x), int(y)} == {sa, sb})
    return out


def exact_box_measure(L: int, p) -> tuple[EvenBoxMeasure, np.ndarray]:
    """Exact law of all edges of the box as produced by the contour sampler.

    The box sits inside the next larger box so that edges leaving it are
    fixed by the frozen ring.  Returns the measure and the map from box
    edge indices to window positions in the larger geometry.
    """
    small, big = build_box(L), build_box(L + 1)
    emap = edge_map(small, big)
    ring = sampler_boundary(L, float(p))
    boundary = contour_bits(big, ring)
    meas = exact_even_measure(big, list(emap), boundary, p)
    return meas, emap


def window_distribution(samples: np.ndarray, edges) -> dict[tuple[int, ...], float]:
    """Empirical law of the bits of ``edges`` over rows of ``samples``."""
    sub = np.ascontiguousarray(samples[:, list(edges)])
    keys = Counter(map(bytes, sub))
    n = len(samples)
    return {tuple(k): c / n for k, c in keys.items()}


def total_variation(d1: dict, d2: dict) -> float:
    keys = set(d1) | set(d2)
    return 0.5 * math.fsum(abs(float(d1.get(k, 0)) - float(d2.get(k, 0))) for k in keys)


def central_window(g: BoxGeometry, size: int = 2) -> list[int]:
    """Edges bounding the central ``size`` x ``size`` block of faces."""
    lo = g.L + 1 - size // 2
    cells = [(r, c) for r in range(lo, lo + size) for c in range(lo, lo + size)]
    return g.edges_touching_dual(cells)


# -- the push-forward identity ---------------------------------------------

@dataclass
class PushForwardReport:
    shape: tuple[int, int]
    p: float
    boundary: str
    n_edge_configs: int
    max_discrepancy: float
    supports_equal: bool

    @property
    def passed(self) -> bool:
        return self.supports_equal and self.max_discrepancy < 1e-10

    def as_dict(self) -> dict:
        return {**self.__dict__, "shape": list(self.shape), "passed": self.passed}


def _boundary_coloring(m: int, boundary, seed) -> tuple[np.ndarray, str]:
    if isinstance(boundary, str):
        if boundary == "plus":
            return np.ones((m, m), dtype=np.int8), boundary
        if boundary == "minus":
            return -np.ones((m, m), dtype=np.int8), boundary
        if boundary == "checkerboard":
            return checkerboard_sign(m), boundary
        if boundary == "random":
            rng = np.random.Generator(np.random.PCG64(seed))
            return np.where(rng.random((m, m)) < 0.5, 1, -1).astype(np.int8), f"random({seed})"
        raise ValueError(f"unknown boundary {boundary!r}")
    arr = np.asarray(boundary, dtype=np.int8)
    if arr.shape != (m, m):
        raise ValueError(f"boundary coloring must have shape {(m, m)}")
    return arr, "explicit"


def verify_lemmeimage(shape: tuple[int, int] = (2, 2), boundary="plus", p: float = 0.3,
                      seed: int = 0) -> PushForwardReport:
    """Compare the contour image of the exact Ising table with the exact even measure.

    The dual interior is an h x w block of faces with at least one layer of
    faces between it and the box edge; everything outside it is frozen to
    the boundary coloring.
    """
    h, w = shape
    if h < 1 or w < 1 or h * w > 12:
        raise ValueError("interior must be a block of 1 to 12 dual sites")
    L = math.ceil((max(h, w) + 2) / 2)
    g = build_box(L)
    m = g.m
    if isinstance(boundary, np.ndarray) and boundary.shape != (m, m):
        raise ValueError(f"boundary coloring must have shape {(m, m)} for this interior")
    c, label = _boundary_coloring(m, boundary, seed)
    block = np.zeros((m, m), dtype=bool)
    block[2:2 + h, 2:2 + w] = True
    window = g.edges_touching_dual([tuple(rc) for rc in np.argwhere(block)])
    pos = np.array(window)

    ising = exact_local_distribution(g, IsingParams(beta_of_p(p), c, frozen=~block), block)
    pushed: dict[int, float] = {}
    weights = 1 << np.arange(len(window), dtype=np.int64)
    spins = c.copy()
    rows, cols = zip(*ising.sites)
    for conf, pr in zip(ising.configs, ising.probs):
        spins[rows, cols] = conf
        key = int(contour_bits(g, spins)[pos].astype(np.int64) @ weights)
        pushed[key] = pushed.get(key, 0.0) + float(pr)

    exact = exact_even_measure(g, window, contour_bits(g, c), p)
    keys = set(pushed) | set(exact.table)
    disc = max(abs(pushed.get(k, 0.0) - float(exact.table.get(k, 0.0))) for k in keys)
    return PushForwardReport((h, w), float(p), label, len(exact.table), float(disc),
                       set(pushed) == set(exact.table))
