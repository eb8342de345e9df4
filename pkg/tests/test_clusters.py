import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from eulerperc.clusters import (bfs_labels, components, crossing, crossing_bits,
                                crossing_cluster_count, curve_intersection, half_crossing_point,
                                label_bits, largest_cluster_fraction, scan_point, threshold_scan,
                                two_point, wilson_interval)
from eulerperc.contour import EdgeConfig
from eulerperc.lattice import build_box


def _same_partition(a, b):
    pairs = set(zip(a.ravel().tolist(), b.ravel().tolist()))
    return len(pairs) == len(np.unique(a)) == len(np.unique(b))


@given(st.integers(1, 6), st.floats(0.0, 1.0), st.integers(0, 2**32 - 1))
def test_labels_match_bfs(L, p, seed):
    g = build_box(L)
    bits = (np.random.default_rng(seed).random(g.n_edges) < p).astype(np.uint8)
    assert _same_partition(label_bits(g, bits), bfs_labels(g, bits))


def test_labels_match_bfs_many():
    g = build_box(5)
    rng = np.random.default_rng(0)
    for _ in range(1000):
        bits = (rng.random(g.n_edges) < rng.random()).astype(np.uint8)
        assert _same_partition(label_bits(g, bits), bfs_labels(g, bits))


def test_component_basics():
    g = build_box(3)
    empty = components(EdgeConfig.empty(g))
    assert empty.n_clusters == g.n_sites and empty.sizes.sum() == g.n_sites
    assert components(EdgeConfig.full(g)).n_clusters == 1
    sq = components(EdgeConfig.from_edges(g, g.face_edges(3, 3)))
    assert sq.n_clusters == g.n_sites - 3
    assert sorted(sq.sizes)[-1] == 4


def test_crossing_basics():
    g = build_box(8)
    assert crossing(EdgeConfig.full(g))
    assert not crossing(EdgeConfig.empty(g))
    # a two-row ladder across the whole box at y = 0, 1
    edges = [int(g.h_index[r, c]) for r in (8, 9) for c in range(g.n - 1)]
    edges += [int(g.v_index[8, c]) for c in range(g.n)]
    cfg = EdgeConfig.from_edges(g, edges)
    assert crossing(cfg, "horizontal")
    assert not crossing(cfg, "vertical")
    assert crossing_cluster_count(g, cfg.bits) == 1
    with pytest.raises(ValueError):
        crossing(cfg, "diagonal")


def test_crossing_uses_whole_box_clusters():
    # a detour outside the central square still counts, but not with within=True
    g = build_box(8)
    L, r = 8, 4
    left, right = L - r, L + r
    path = [int(g.v_index[y, left]) for y in range(L, L + 7)]
    path += [int(g.h_index[L + 7, c]) for c in range(left, right)]
    path += [int(g.v_index[y, right]) for y in range(L, L + 7)]
    cfg = EdgeConfig.from_edges(g, path)
    assert crossing(cfg)
    assert not crossing(cfg, within=True)


def test_two_point_and_fraction():
    g = build_box(4)
    cfg = EdgeConfig.from_edges(g, [int(g.h_index[4, c]) for c in range(4, 7)])
    assert two_point(cfg, (0, 0), (3, 0))
    assert not two_point(cfg, (0, 0), (0, 1))
    assert largest_cluster_fraction(EdgeConfig.full(g)) == 1
    assert largest_cluster_fraction(EdgeConfig.empty(g)) == 1 / g.n_sites


def test_wilson_interval():
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    # closed form of the Wilson score interval
    z = 1.959963984540054
    n, ph = 100, 0.5
    centre = (ph + z * z / (2 * n)) / (1 + z * z / n)
    half = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / (1 + z * z / n)
    assert lo == pytest.approx(centre - half, abs=1e-9)
    assert hi == pytest.approx(centre + half, abs=1e-9)
    assert wilson_interval(0, 10)[0] == pytest.approx(0, abs=1e-12)


def test_scan_reproducible_and_sorted():
    a = threshold_scan([0.35, 0.25], [6, 4], 20, seed=3)
    b = threshold_scan([0.25, 0.35], [4, 6], 20, seed=3)
    assert a == b
    assert [(r["L"], r["p"]) for r in a] == [(4, 0.25), (4, 0.35), (6, 0.25), (6, 0.35)]


def test_scan_threads_match_serial():
    a = threshold_scan([0.3, 0.4], [4], 10, seed=1, threads=1)
    b = threshold_scan([0.3, 0.4], [4], 10, seed=1, threads=2)
    assert a == b


def test_largest_fraction_orders():
    lo = scan_point(0.25, 16, 40, seed=1)
    hi = scan_point(0.45, 16, 40, seed=1)
    assert hi["largest_frac_mean"] > lo["largest_frac_mean"]


def _rows(L, ps, fs):
    return [{"p": p, "L": L, "crossing_freq": f} for p, f in zip(ps, fs)]


def test_estimators():
    ps = [0.1, 0.2, 0.3, 0.4]
    rows = _rows(8, ps, [0.0, 0.2, 0.6, 1.0]) + _rows(16, ps, [0.0, 0.1, 0.8, 1.0])
    assert half_crossing_point(rows, 8) == pytest.approx(0.275)
    # behind at 0.2 (-0.1), ahead at 0.3 (+0.2): crossing at 0.2 + 0.1/3; 0.4 is saturated
    assert curve_intersection(rows, 8, 16) == pytest.approx(0.2 + 0.1 / 3)
    assert math.isnan(curve_intersection(_rows(8, ps, [0.1] * 4) + _rows(16, ps, [0.2] * 4), 8, 16))
    with pytest.raises(ValueError):
        half_crossing_point(_rows(8, [0.1], [0.0]), 8)
