"""Open clusters of box configurations, crossing events and threshold scans."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binomtest

from . import kernels
from .lattice import BoxGeometry, build_box


@dataclass
class ClusterLabeling:
    geometry: BoxGeometry
    labels: np.ndarray  # (n, n), row = y + L
    sizes: np.ndarray

    @property
    def n_clusters(self) -> int:
        return len(self.sizes)

    def label_of(self, x) -> int:
        L = self.geometry.L
        return int(self.labels[x[1] + L, x[0] + L])


def _grid_labels(h: np.ndarray, v: np.ndarray) -> np.ndarray:
    H, W = v.shape[0] + 1, h.shape[1] + 1
    lab = kernels.label_grid(np.ascontiguousarray(h, dtype=np.uint8), np.ascontiguousarray(v, dtype=np.uint8))
    return np.asarray(lab).reshape(H, W)


def label_bits(g: BoxGeometry, bits: np.ndarray) -> np.ndarray:
    h, v = g.split(bits)
    return _grid_labels(h, v)


def components(cfg) -> ClusterLabeling:
    g, bits = cfg.geometry, cfg.bits
    labels = label_bits(g, bits)
    return ClusterLabeling(g, labels, np.bincount(labels.ravel()))


def _sub_box(g: BoxGeometry, bits: np.ndarray, full_box: bool):
    h, v = g.split(bits)
    if full_box:
        return h, v
    r = g.L // 2
    lo, hi = g.L - r, g.L + r + 1
    return h[lo:hi, lo:hi - 1], v[lo:hi - 1, lo:hi]


def _side_labels(g: BoxGeometry, bits: np.ndarray, direction: str, full_box: bool, within: bool):
    """Cluster labels on the two opposite sides of the target square."""
    if direction not in ("horizontal", "vertical"):
        raise ValueError("direction must be 'horizontal' or 'vertical'")
    if within or full_box:
        h, v = _sub_box(g, bits, full_box)
        lab = _grid_labels(h, v)
        if direction == "vertical":
            lab = lab.T
        return lab[:, 0], lab[:, -1]
    lab = label_bits(g, bits)
    if direction == "vertical":
        lab = lab.T
    r = g.L // 2
    lo, hi = g.L - r, g.L + r
    return lab[lo:hi + 1, lo], lab[lo:hi + 1, hi]


def crossing_bits(g: BoxGeometry, bits: np.ndarray, direction: str = "horizontal",
                  full_box: bool = False, within: bool = False) -> bool:
    """Some open cluster touches both opposite sides of the central square of
    half-width L // 2.

    Clusters are those of the whole box; ``within=True`` uses only edges
    inside the square, ``full_box=True`` makes the square the whole box.
    """
    left, right = _side_labels(g, bits, direction, full_box, within)
    return bool(np.intersect1d(left, right).size)


def crossing_cluster_count(g: BoxGeometry, bits: np.ndarray, direction: str = "horizontal",
                           within: bool = False) -> int:
    left, right = _side_labels(g, bits, direction, False, within)
    return int(np.intersect1d(left, right).size)


def crossing(cfg, direction: str = "horizontal", within: bool = False) -> bool:
    return crossing_bits(cfg.geometry, cfg.bits, direction, within=within)


def two_point_bits(g: BoxGeometry, bits: np.ndarray, x, y) -> bool:
    lab = label_bits(g, bits)
    L = g.L
    return bool(lab[x[1] + L, x[0] + L] == lab[y[1] + L, y[0] + L])


def two_point(cfg, x, y) -> bool:
    return two_point_bits(cfg.geometry, cfg.bits, x, y)


def largest_cluster_fraction_bits(g: BoxGeometry, bits: np.ndarray) -> float:
    lab = label_bits(g, bits)
    return float(np.bincount(lab.ravel()).max() / lab.size)


def largest_cluster_fraction(cfg) -> float:
    return largest_cluster_fraction_bits(cfg.geometry, cfg.bits)


def bfs_labels(g: BoxGeometry, bits: np.ndarray) -> np.ndarray:
    """Reference labeling by breadth-first search (slow)."""
    adj: list[list[int]] = [[] for _ in range(g.n_sites)]
    for e, (a, b) in enumerate(g.edge_ends):
        if bits[e]:
            adj[a].append(int(b))
            adj[b].append(int(a))
    lab = np.full(g.n_sites, -1, dtype=np.int64)
    nxt = 0
    for s in range(g.n_sites):
        if lab[s] >= 0:
            continue
        lab[s] = nxt
        queue = [s]
        while queue:
            u = queue.pop()
            for w in adj[u]:
                if lab[w] < 0:
                    lab[w] = nxt
                    queue.append(w)
        nxt += 1
    return lab.reshape(g.n, g.n)


# -- threshold scan -----------------------------------------------------------------

def wilson_interval(k: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    ci = binomtest(k, n).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


def scan_point(p: float, L: int, samples: int, seed, method: str = "sw", n_burnin: int | None = None,
               thinning: int = 2) -> dict:
    """Crossing frequency and mean largest-cluster fraction at one (p, L)."""
    from .evenperc import iter_mu_p

    g = build_box(L)
    if n_burnin is None:
        n_burnin = max(100, 2 * L) if method == "sw" else None
    hits, frac = 0, 0.0
    for bits in iter_mu_p(L, p, samples, n_burnin, thinning, seed, method):
        hits += crossing_bits(g, bits)
        frac += largest_cluster_fraction_bits(g, bits)
    lo, hi = wilson_interval(hits, samples)
    return {"p": p, "L": L, "samples": samples, "crossing_freq": hits / samples,
            "ci_low": lo, "ci_high": hi, "largest_frac_mean": frac / samples}


def _scan_task(args):
    return scan_point(*args)


def threshold_scan(p_grid, L_list, samples: int, seed: int = 0, method: str = "sw",
                   n_burnin: int | None = None, thinning: int = 2, threads: int = 1) -> list[dict]:
    """Rows sorted by (L, p); each point draws its own seed stream."""
    from .seeding import seed_stream

    points = sorted((float(L), float(p)) for L in L_list for p in p_grid)
    tasks = [(p, int(L), samples, seed_stream(seed, i), method, n_burnin, thinning)
             for i, (L, p) in enumerate(points)]
    if threads > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_scan_task, tasks))
    else:
        rows = [_scan_task(t) for t in tasks]
    return sorted(rows, key=lambda r: (r["L"], r["p"]))


def _curve(rows, L):
    pts = sorted((r["p"], r["crossing_freq"]) for r in rows if r["L"] == L)
    if len(pts) < 2:
        raise ValueError(f"need at least two points at L = {L}")
    return np.array([a for a, _ in pts]), np.array([b for _, b in pts])


def half_crossing_point(rows, L: int) -> float:
    """Linear interpolation of the first upward passage of 1/2."""
    p, f = _curve(rows, L)
    for i in range(len(p) - 1):
        if f[i] < 0.5 <= f[i + 1]:
            return float(p[i] + (0.5 - f[i]) * (p[i + 1] - p[i]) / (f[i + 1] - f[i]))
    return math.nan


def curve_intersection(rows, L1: int, L2: int, saturation: float = 0.95) -> float:
    """Where the crossing curve of the larger box takes over for good.

    Returns the last p (interpolated) at which the larger box crosses no
    more often than the smaller one, beyond which it crosses strictly more
    often.  Points where both curves exceed ``saturation`` are ignored.
    NaN if the larger box never takes over, or never falls behind.
    """
    small, large = sorted((L1, L2))
    p1, f1 = _curve(rows, small)
    p2, f2 = _curve(rows, large)
    if not np.array_equal(p1, p2):
        raise ValueError("the two curves must share their p grid")
    keep = ~((f1 > saturation) & (f2 > saturation))
    p, d = p1[keep], (f2 - f1)[keep]
    behind = np.flatnonzero(d <= 0)
    if behind.size == 0 or behind[-1] == len(p) - 1:
        return math.nan
    i = int(behind[-1])
    if d[i] == 0:
        return float(p[i])
    return float(p[i] - d[i] * (p[i + 1] - p[i]) / (d[i + 1] - d[i]))
