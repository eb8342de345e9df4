import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eulerperc.ising import (BETA_C, IsingParams, SpinConfig, beta_of_p, boundary_config,
                             checkerboard_sign, checkerboard_transform, exact_local_distribution,
                             glauber_sweep, hamiltonian, heat_bath_table, iter_gibbs, p_of_beta,
                             sample_gibbs)
from eulerperc.lattice import build_box


def test_beta_of_p_values():
    assert beta_of_p(0.5) == 0
    assert beta_of_p(1 - 1 / math.sqrt(2)) == pytest.approx(BETA_C, abs=1e-14)
    assert BETA_C == pytest.approx(0.440687, abs=1e-6)
    assert beta_of_p(1 / math.sqrt(2)) == pytest.approx(-BETA_C, abs=1e-14)
    for p in (0, 1, -0.1):
        with pytest.raises(ValueError):
            beta_of_p(p)


@given(st.floats(0.01, 0.49), st.floats(0.001, 0.009))
def test_beta_of_p_decreasing_and_inverse(p, dp):
    assert beta_of_p(p + dp) < beta_of_p(p)
    assert p_of_beta(beta_of_p(p)) == pytest.approx(p, rel=1e-12)


def _inner2x2(m):
    return [(r, c) for r in range(1, m - 1) for c in range(1, m - 1)]


def test_hamiltonian_extremes():
    g = build_box(1)
    plus = SpinConfig(g, np.ones((4, 4)))
    cb = SpinConfig(g, checkerboard_sign(4))
    interior = _inner2x2(4)
    # 4 bonds inside the 2x2 block and 8 to the ring
    assert hamiltonian(plus, interior) == -12
    assert hamiltonian(cb, interior) == 12


@given(st.integers(0, 2**16 - 1), st.integers(0, 3), st.integers(0, 3))
def test_hamiltonian_single_flip(code, i, j):
    g = build_box(1)
    s = np.array([1 if code >> k & 1 else -1 for k in range(16)]).reshape(4, 4)
    interior = _inner2x2(4)
    r, c = 1 + i % 2, 1 + j % 2
    before = hamiltonian(SpinConfig(g, s), interior)
    nb = sum(s[r + dr, c + dc] for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)))
    t = s.copy()
    t[r, c] *= -1
    assert hamiltonian(SpinConfig(g, t), interior) - before == 2 * s[r, c] * nb


def test_exact_uniform_at_beta_zero():
    d = exact_local_distribution(build_box(1), IsingParams(0.0), _inner2x2(4))
    assert np.allclose(d.probs, 1 / 16)


@pytest.mark.parametrize("beta", [0.3, -0.7, 1.0])
def test_exact_single_site(beta):
    g = build_box(1)
    d = exact_local_distribution(g, IsingParams(beta), [(1, 1)])
    # (1, 1) has two frozen plus neighbours and two interior neighbours, which are plus here
    expect = math.exp(4 * beta) / (math.exp(4 * beta) + math.exp(-4 * beta))
    assert d.as_dict()[(1,)] == pytest.approx(expect, abs=1e-12)


def test_exact_two_sites_brute_force():
    g = build_box(1)
    rng = np.random.default_rng(3)
    bnd = rng.choice([-1, 1], size=(4, 4))
    sites = [(1, 1), (1, 2)]
    d = exact_local_distribution(g, IsingParams(1.0, bnd), sites).as_dict()
    w = {}
    for a, b in itertools.product((-1, 1), repeat=2):
        s = bnd.copy()
        s[1, 1], s[1, 2] = a, b
        w[(a, b)] = math.exp(-1.0 * hamiltonian(SpinConfig(g, s), sites))
    Z = sum(w.values())
    for k in w:
        assert d[k] == pytest.approx(w[k] / Z, abs=1e-12)


def test_exact_normalised_and_flip_invariant():
    g = build_box(1)
    rng = np.random.default_rng(5)
    bnd = rng.choice([-1, 1], size=(4, 4))
    a = exact_local_distribution(g, IsingParams(0.6, bnd), _inner2x2(4))
    b = exact_local_distribution(g, IsingParams(0.6, -bnd), _inner2x2(4))
    assert abs(a.probs.sum() - 1) < 1e-12
    da, db = a.as_dict(), b.as_dict()
    for k, v in da.items():
        assert db[tuple(-x for x in k)] == pytest.approx(v, abs=1e-14)


def test_exact_rejects_large_interior():
    g = build_box(2)
    with pytest.raises(ValueError):
        exact_local_distribution(g, IsingParams(0.1), g.interior_mask() | True)


@pytest.mark.parametrize("seed", range(4))
def test_s_conjugation(seed):
    # law at -beta with boundary c is the S-image of the law at +beta with boundary S(c)
    g = build_box(1)
    S = checkerboard_sign(4)
    c = np.random.default_rng(seed).choice([-1, 1], size=(4, 4))
    inner = _inner2x2(4)
    neg = exact_local_distribution(g, IsingParams(-0.8, c), inner).as_dict()
    pos = exact_local_distribution(g, IsingParams(0.8, c * S), inner).as_dict()
    signs = [S[r, c_] for r, c_ in inner]
    for k, v in pos.items():
        assert neg[tuple(x * s for x, s in zip(k, signs))] == pytest.approx(v, abs=1e-14)


def test_checkerboard_involution():
    g = build_box(2)
    plus = SpinConfig(g, np.ones((6, 6)))
    cb = checkerboard_transform(plus)
    assert np.array_equal(cb.spins, checkerboard_sign(6))
    assert np.array_equal(checkerboard_transform(cb).spins, plus.spins)


def _site_kernel(beta, site, sites, bnd, g):
    """4x4 single-site heat-bath transition matrix on a 2-site interior."""
    states = list(itertools.product((-1, 1), repeat=2))
    P = np.zeros((4, 4))
    r, c = sites[site]
    for i, st_ in enumerate(states):
        s = bnd.copy()
        for (rr, cc), v in zip(sites, st_):
            s[rr, cc] = v
        h = s[r + 1, c] + s[r - 1, c] + s[r, c + 1] + s[r, c - 1]
        up = heat_bath_table(beta)[h + 4]
        for v, pr in ((1, up), (-1, 1 - up)):
            new = list(st_)
            new[site] = v
            P[i, states.index(tuple(new))] += pr
    return states, P


def test_heat_bath_detailed_balance():
    g = build_box(1)
    beta = 0.7
    bnd = np.random.default_rng(1).choice([-1, 1], size=(4, 4))
    sites = [(1, 1), (1, 2)]
    pi = exact_local_distribution(g, IsingParams(beta, bnd), sites).as_dict()
    for site in (0, 1):
        states, P = _site_kernel(beta, site, sites, bnd, g)
        w = np.array([pi[s] for s in states])
        flow = w[:, None] * P
        assert np.allclose(flow, flow.T, atol=1e-15)


def test_glauber_frozen_and_determinism():
    g = build_box(3)
    rng = np.random.default_rng(0)
    start = boundary_config(g, IsingParams(0.4, rng.choice([-1, 1], size=(g.m, g.m))))
    a = glauber_sweep(start, 0.4, seed=11)
    b = glauber_sweep(start, 0.4, seed=11)
    assert np.array_equal(a.spins, b.spins)
    assert np.array_equal(a.spins[a.frozen], start.spins[start.frozen])


def test_glauber_marginals_match_exact():
    # free 3x3 block inside a fixed random environment
    g = build_box(2)
    rng = np.random.default_rng(2)
    env = rng.choice([-1, 1], size=(g.m, g.m))
    free = np.zeros((g.m, g.m), dtype=bool)
    free[1:4, 2:5] = True
    params = IsingParams(0.35, env, frozen=~free)
    exact = exact_local_distribution(g, params, free).site_marginals()
    n = 100_000
    acc = np.zeros(free.sum())
    for s in iter_gibbs(g, params, 50, n, 1, seed=9):
        acc += s[free] > 0
    emp = acc / n
    # sweeps are correlated; the bound allows an integrated time of a few sweeps
    se = np.sqrt(exact * (1 - exact) / n) * 3
    assert np.all(np.abs(emp - exact) < 3 * se)


def test_beta_zero_product_measure():
    from scipy.stats import chisquare

    spins = sample_gibbs(4, IsingParams(0.0), n_burnin=1, n_samples=400, seed=4)
    inner = np.array([s.spins[1:-1, 1:-1] for s in spins])
    plus = int((inner > 0).sum())
    total = inner.size
    assert chisquare([plus, total - plus]).pvalue > 0.01


def test_magnetised_at_beta_one():
    out = sample_gibbs(16, IsingParams(1.0), n_burnin=200, n_samples=5, seed=1, method="sw")
    for s in out:
        assert s.spins[1:-1, 1:-1].mean() > 0.9


@pytest.mark.parametrize("method", ["glauber", "sw"])
def test_negative_beta_is_checkerboard_image(method):
    g = build_box(4)
    S = checkerboard_sign(g.m)
    pos = list(iter_gibbs(g, IsingParams(1.0, S), 20, 3, 1, seed=6, method=method))
    neg = list(iter_gibbs(g, IsingParams(-1.0, S), 20, 3, 1, seed=6, method=method))
    for a, b in zip(pos, neg):
        assert np.array_equal(a * S, b)


def test_ascii_roundtrip():
    g = build_box(2)
    s = SpinConfig(g, np.random.default_rng(8).choice([-1, 1], size=(6, 6)))
    back = SpinConfig.from_ascii(s.to_ascii())
    assert np.array_equal(back.spins, s.spins)
    assert s.to_ascii().splitlines()[0] == "".join("+" if v > 0 else "-" for v in s.spins[-1])
