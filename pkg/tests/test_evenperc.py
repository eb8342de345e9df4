import itertools
from fractions import Fraction

import numpy as np
import pytest

from eulerperc.contour import EdgeConfig, contour_bits, is_even
from eulerperc.evenperc import (UnsatisfiableBoundary, central_window, count_even_completions,
                                exact_box_measure, exact_even_measure, iter_mu_p, sample_mu_p,
                                total_variation, verify_lemmeimage, window_distribution)
from eulerperc.ising import checkerboard_sign
from eulerperc.lattice import build_box


def test_unit_square_window():
    g = build_box(2)
    sq = list(g.face_edges(3, 3))
    p = Fraction(3, 10)
    q = p / (1 - p)
    meas = exact_even_measure(g, sq, None, p)
    assert len(meas) == 2
    assert meas.probability(sq) == q**4 / (1 + q**4)
    assert meas.probability([]) == 1 / (1 + q**4)


def test_unit_square_brute_force():
    g = build_box(2)
    sq = list(g.face_edges(2, 3))
    evens = [b for b in itertools.product((0, 1), repeat=4)
             if is_even(EdgeConfig.from_edges(g, [e for e, x in zip(sq, b) if x]), interior=np.ones((5, 5), bool))]
    assert evens == [(0, 0, 0, 0), (1, 1, 1, 1)]


def test_half_is_uniform():
    g = build_box(1)
    meas = exact_even_measure(g, range(g.n_edges), None, 0.5)
    assert np.allclose(list(meas.table.values()), 1 / len(meas))


def test_completion_count_matches_brute_force():
    g = build_box(1)
    allsites = np.ones((3, 3), dtype=bool)
    brute = sum(is_even(EdgeConfig(g, np.array(b)), interior=allsites)
                for b in itertools.product((0, 1), repeat=12))
    # cycle rank of the 3x3 grid is 12 - 9 + 1
    assert brute == count_even_completions(g, range(12)) == 2**4


def test_table_invariants():
    g = build_box(2)
    rng = np.random.default_rng(0)
    c = rng.choice([-1, 1], size=(g.m, g.m))
    bnd = contour_bits(g, c)
    window = central_window(g, 2)
    p = Fraction(2, 7)
    meas = exact_even_measure(g, window, bnd, p)
    assert sum(meas.table.values()) == 1
    q = p / (1 - p)
    base = min(meas.table, key=lambda k: bin(k).count("1"))
    for cfg, (mask, pr) in zip(meas.configs(), meas.table.items()):
        assert is_even(cfg, interior=[(x, y) for x in (-1, 0, 1) for y in (-1, 0, 1)])
        assert pr / meas.table[base] == q ** (bin(mask).count("1") - bin(base).count("1"))


def test_boundary_flip_invariance():
    g = build_box(2)
    c = np.random.default_rng(1).choice([-1, 1], size=(g.m, g.m))
    window = central_window(g, 2)
    a = exact_even_measure(g, window, contour_bits(g, c), 0.3)
    b = exact_even_measure(g, window, contour_bits(g, -c), 0.3)
    assert a.table == b.table


def test_unsatisfiable():
    g = build_box(2)
    e = int(g.h_index[2, 1])
    bnd = np.zeros(g.n_edges, dtype=np.uint8)
    bnd[int(g.v_index[2, 1])] = 1
    with pytest.raises(UnsatisfiableBoundary):
        exact_even_measure(g, [e], bnd, 0.3)


def test_rejects_bad_p():
    with pytest.raises(ValueError):
        exact_even_measure(build_box(1), [0], None, 1.0)


def _square_all_open(p):
    g = build_box(1)
    sq = list(g.face_edges(1, 2))
    return exact_even_measure(g, range(12), None, p).marginal(sq)[(1, 1, 1, 1)]


def test_full_square_increasing_below_half():
    probs = [_square_all_open(Fraction(k, 40)) for k in range(1, 21)]
    assert all(a < b for a, b in zip(probs, probs[1:]))


def test_full_square_dips_above_half():
    # the closed 3x3 grid has odd-degree sides, so nothing forces monotonicity past 1/2
    assert _square_all_open(Fraction(1, 2)) == Fraction(1, 8)
    assert _square_all_open(Fraction(11, 20)) < Fraction(1, 8)
    assert _square_all_open(Fraction(19, 20)) > Fraction(1, 8)


@pytest.mark.parametrize("p", [0.2, 0.5, 0.8])
def test_samples_even(p):
    for bits in iter_mu_p(6, p, 20, 30, 1, seed=2):
        assert is_even(EdgeConfig(build_box(6), bits))


def test_low_p_mostly_empty():
    g = build_box(8)
    window = central_window(g, 2)
    samples = np.array(list(iter_mu_p(8, 0.01, 200, 200, 1, seed=5)))
    empty = window_distribution(samples, window).get(tuple([0] * len(window)), 0)
    assert empty >= 0.99


def test_sample_deterministic():
    a = sample_mu_p(4, 0.3, sweeps=20, seed=17)
    b = sample_mu_p(4, 0.3, sweeps=20, seed=17)
    assert a == b


def test_small_box_sampler_tv():
    # the L = 1 sampler against its exact law; 3e4 draws keep the noise floor near 0.01
    meas, emap = exact_box_measure(1, 0.3)
    samples = np.array(list(iter_mu_p(1, 0.3, 30_000, 100, 2, seed=3)))
    exact = {tuple(mask >> i & 1 for i in range(12)): pr for mask, pr in meas.table.items()}
    assert total_variation(window_distribution(samples, range(12)), exact) < 0.03


@pytest.mark.parametrize("shape", [(1, 1), (2, 2), (2, 3)])
@pytest.mark.parametrize("boundary", ["plus", "minus", "checkerboard", "random"])
@pytest.mark.parametrize("p", [0.3, 0.5, 0.7])
def test_pushforward_identity(shape, boundary, p):
    rep = verify_lemmeimage(shape, boundary, p, seed=4)
    assert rep.passed, rep


def test_pushforward_uniform_at_half():
    rep = verify_lemmeimage((2, 2), "plus", 0.5)
    assert rep.passed


def test_pushforward_explicit_boundary():
    c = checkerboard_sign(6) * -1
    assert verify_lemmeimage((2, 2), c, 0.2).passed
