"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line (also collected into the
terminal summary).  Run on its own with

    pytest tests/test_acceptance.py -v -s
"""
import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

RESULTS: list[str] = []


def report(number, title, ok, detail, elapsed, budget):
    ok = ok and elapsed < budget
    line = f"{'PASS' if ok else 'FAIL'}  [{number}] {title}: {detail} ({elapsed:.1f}s, budget {budget:.0f}s)"
    RESULTS.append(line)
    print("\n" + line)
    return ok


def test_criterion_1_contour_pushforward():
    from eulerperc.evenperc import verify_lemmeimage

    t = time.perf_counter()
    worst, n = 0.0, 0
    ok = True
    for h, w in itertools.product(range(1, 4), repeat=2):
        for p in (0.2, 0.3, 0.5, 0.7):
            for boundary in ("plus", "minus", "checkerboard", "random"):
                rep = verify_lemmeimage((h, w), boundary, p, seed=h * 10 + w)
                worst = max(worst, rep.max_discrepancy)
                ok &= rep.passed
                n += 1
    el = time.perf_counter() - t
    assert report(1, "contour push-forward equals exact even measure", ok and worst < 1e-10,
                  f"{n} instances up to 3x3, max discrepancy {worst:.2e}", el, 60)


def test_criterion_2_exact_finite_graph():
    from eulerperc.exactgraph import (build_figure_graph, covariance_numerator, event_poly,
                                      figure_events, partition_poly)
    from eulerperc.polyarith import IntPolynomial

    t = time.perf_counter()
    g = build_figure_graph()
    ev = figure_events(g)
    Z = partition_poly(g)
    C1 = event_poly(g, ev["C1"])
    cov = covariance_numerator(g, ev["C1"], ev["C2"])
    el = time.perf_counter() - t
    ok = (Z == IntPolynomial.from_terms({0: 1, 4: 3, 6: 3, 10: 1})
          and C1 == IntPolynomial.from_terms({4: 1, 10: 1})
          and cov == IntPolynomial.from_terms({8: -1, 10: 1, 14: 1, 16: 3}))
    assert report(2, "reference-graph polynomials", ok, f"Z = {Z}; P(C1) = {C1}; cov = {cov}", el, 1)


def test_criterion_3_negative_correlation():
    from eulerperc.exactgraph import build_figure_graph, covariance_numerator, figure_events
    from eulerperc.polyarith import IntPolynomial, bisect_root

    t = time.perf_counter()
    g = build_figure_graph()
    ev = figure_events(g)
    cov = covariance_numerator(g, ev["C1"], ev["C2"])
    grid = [Fraction(42 * k, 100 * 51) for k in range(1, 51)]
    neg = all(cov(p / (1 - p)) < 0 for p in grid)
    pos_grid = [Fraction(45, 100) + Fraction(k, 100) for k in range(0, 55)]
    pos = all(cov(p / (1 - p)) > 0 for p in pos_grid)
    lo, hi = bisect_root(IntPolynomial([-1, 0, 1, 0, 0, 0, 1, 0, 3]), Fraction(74, 100), Fraction(75, 100))
    bracket = Fraction(74, 100) < lo <= hi < Fraction(75, 100)
    el = time.perf_counter() - t
    assert report(3, "C1, C2 negatively correlated below 0.42", neg and pos and bracket,
                  f"negative on 50 points in (0, 0.42): {neg}; positive on [0.45, 0.99]: {pos}; "
                  f"root of -1+q^2+q^6+3q^8 = {float(lo):.7f}", el, 1)


def test_criterion_4_monotone_certification():
    from eulerperc.monotone import certify_monotonicity

    t = time.perf_counter()
    rep = certify_monotonicity()
    el = time.perf_counter() - t
    counts = tuple(rep["counts_per_arity"][n] for n in range(1, 5))
    ok = (counts == (3, 6, 20, 168) and rep["matches_expected_set"] and rep["n_distinct_RF"] == 17
          and not rep["positive_root_violations"])
    assert report(4, "monotone functions and R_F roots", ok,
                  f"counts {counts}, {rep['n_distinct_RF']} distinct R_F, set match {rep['matches_expected_set']}, "
                  f"{len(rep['positive_root_violations'])} with positive roots", el, 10)


def test_criterion_5_coupling():
    from eulerperc.coupling import (CouplingSample, bernoulli4, build_table, check_P2, check_P3,
                                    is_incomparable, iter_couplings, square_domination_cases,
                                    squares_consistent)
    from eulerperc.contour import EdgeConfig
    from eulerperc.lattice import build_box

    t = time.perf_counter()
    exact = True
    for p in (Fraction(1, 10), Fraction(1, 4), Fraction(2, 5)):
        tab = build_table(p)
        exact &= tab.first_marginal() == [bernoulli4(p, a) for a in range(16)]
        exact &= tab.second_marginal() == [bernoulli4(1 - p, a) for a in range(16)]
        exact &= tab.total() == 1
    cases = square_domination_cases()
    squares_ok = all(ok for _, _, ok in cases) and {a for a, _, _ in cases} == set(range(16))
    L, p, n = 32, 0.3, 10_000
    g = build_box(L)
    p2 = p3 = inc = bad = 0
    for a, b in iter_couplings(L, p, n, 100, 2, seed=5, method="sw"):
        s = CouplingSample(EdgeConfig(g, a), EdgeConfig(g, b))
        p2 += not check_P2(s)
        p3 += not check_P3(s)
        bad += not squares_consistent(s)
        inc += is_incomparable(s)
    el = time.perf_counter() - t
    ok = exact and squares_ok and p2 == 0 and p3 == 0 and bad == 0 and inc > 0
    assert report(5, "square coupling", ok,
                  f"exact marginals {exact}, 16-case domination {squares_ok}; L=32 p=0.3 {n} samples: "
                  f"P2 violations {p2}, P3 violations {p3}, incomparable fraction {inc / n:.3f}", el, 300)


def _sampler_tv(p, n, seed):
    from eulerperc.evenperc import (central_window, exact_box_measure, iter_mu_p, total_variation,
                                    window_distribution)
    from eulerperc.lattice import build_box

    g = build_box(2)
    window = central_window(g, 2)
    meas, emap = exact_box_measure(2, p)
    exact = meas.marginal([int(emap[e]) for e in window])
    samples = np.fromiter(
        itertools.chain.from_iterable(iter_mu_p(2, p, n, None, 2, seed)), dtype=np.uint8).reshape(n, g.n_edges)
    return total_variation(window_distribution(samples, window), exact)


def test_criterion_6_sampler_correctness():
    t = time.perf_counter()
    tv3 = _sampler_tv(0.3, 100_000, 31)
    tv7 = _sampler_tv(0.7, 100_000, 37)
    el = time.perf_counter() - t
    assert report(6, "sampler window marginals vs exact", tv3 < 0.02 and tv7 < 0.02,
                  f"TV at p=0.3: {tv3:.4f}; at p=0.7 (checkerboard route): {tv7:.4f}; 1e5 samples, 2x2 window",
                  el, 600)


def test_criterion_7_threshold():
    from eulerperc.clusters import curve_intersection, half_crossing_point, scan_point, threshold_scan

    t = time.perf_counter()
    lo = scan_point(0.20, 64, 2000, seed=71)
    hi = scan_point(0.40, 64, 2000, seed=72)
    grid = [round(0.26 + 0.005 * i, 3) for i in range(17)]
    rows = threshold_scan(grid, [32, 64], 2000, seed=2024)
    est = curve_intersection(rows, 32, 64)
    el = time.perf_counter() - t
    ok = lo["crossing_freq"] < 0.1 and hi["crossing_freq"] > 0.9 and abs(est - 0.293) <= 0.02
    assert report(7, "crossing frequencies and pseudo-intersection", ok,
                  f"L=64: f(0.20) = {lo['crossing_freq']:.4f}, f(0.40) = {hi['crossing_freq']:.4f}; "
                  f"L=32/64 intersection {est:.4f} (half-crossing L=32 {half_crossing_point(rows, 32):.4f}, "
                  f"L=64 {half_crossing_point(rows, 64):.4f})", el, 1800)


def test_criterion_8_fk_layer():
    from eulerperc.fk import (P_C_EVEN, SELF_DUAL, compare_mu_to_fk, dual_params, es_composite_law,
                              es_exact_fk_law)
    from eulerperc.ising import BETA_C

    t = time.perf_counter()
    es_err = 0.0
    for beta in (0.2, BETA_C, 0.8):
        a, b = es_composite_law(1, beta), es_exact_fk_law(1, beta)
        es_err = max(es_err, max(abs(a.get(k, 0) - b.get(k, 0)) for k in set(a) | set(b)))
    sd_err = abs(dual_params(SELF_DUAL) - SELF_DUAL)
    pc_err = abs(2 * P_C_EVEN - SELF_DUAL)
    reps = [compare_mu_to_fk(32, p, 2000, seed=80 + i) for i, p in enumerate((0.1, 0.3))]
    viol = [f"{r['p']}:{e['event']}" for r in reps for e in r["events"] if e["violation"]]
    summary = "; ".join(f"p={r['p']} " + ", ".join(f"{e['event']} {e['mu']:.3f}<={e['fk']:.3f}" for e in r["events"])
                        for r in reps)
    el = time.perf_counter() - t
    ok = es_err < 1e-10 and sd_err < 1e-14 and pc_err < 1e-14 and not viol
    assert report(8, "FK layer", ok,
                  f"ES error {es_err:.1e}, self-dual error {sd_err:.1e}, 2p_c,even - p_c(2) {pc_err:.1e}; "
                  f"{summary}; violations {viol or 'none'}", el, 900)


def test_criterion_9_conjecture_probe():
    from eulerperc.clusters import threshold_scan

    t = time.perf_counter()
    rows = threshold_scan([0.7071], [16, 32, 64], 1000, seed=9)
    el = time.perf_counter() - t
    body = "; ".join(f"L={r['L']}: {r['crossing_freq']:.3f} [{r['ci_low']:.3f}, {r['ci_high']:.3f}]" for r in rows)
    line = f"INFO  [9] conjecture probe at p = 0.7071 (no verdict): {body} ({el:.1f}s)"
    RESULTS.append(line)
    print("\n" + line)
    assert len(rows) == 3 and all(0 <= r["ci_low"] <= r["crossing_freq"] <= r["ci_high"] <= 1 for r in rows)
