import itertools
import random
from fractions import Fraction

import pytest

from eulerperc.exactgraph import EventSpec, build_figure_graph, event_poly
from eulerperc.monotone import (EXPECTED_VARIATIONS, Z_POLY, MonotoneFunction, brute_force_monotone,
                                certify_monotonicity, enumerate_monotone, evaluate, integral_poly,
                                variation_poly)
from eulerperc.polyarith import count_positive_roots, parse

FUNCS = enumerate_monotone(4)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_enumeration_matches_brute_force(n):
    rec = sorted(F.truth_table() for F in enumerate_monotone(n))
    assert rec == sorted(brute_force_monotone(n))


def test_dedekind_counts():
    assert [len(enumerate_monotone(n)) for n in range(1, 5)] == [3, 6, 20, 168]
    with pytest.raises(ValueError):
        enumerate_monotone(5)


def test_all_monotone_and_distinct():
    assert all(F.is_monotone() for F in FUNCS)
    assert len({F.number for F in FUNCS}) == 168


def test_encoding_last_input_selects_half():
    # two inputs: number = a * 4 + b, a is the last-input-0 branch
    F = MonotoneFunction(2, 0b0111)  # a = 01 (x0), b = 11 (constant 1)
    assert F(0, 0) == 0 and F(1, 0) == 1 and F(0, 1) == 1 and F(1, 1) == 1
    assert evaluate(0b10, [0]) == 1 and evaluate(0b10, [1]) == 0


def test_integral_poly_examples():
    one = MonotoneFunction(4, (1 << 16) - 1)
    assert integral_poly(one) == Z_POLY == parse("1 + 3*q^4 + 3*q^6 + q^10")
    assert integral_poly(MonotoneFunction(4, 0)).is_zero()
    and4 = next(F for F in FUNCS if F.truth_table() == [0] * 15 + [1])
    assert integral_poly(and4) == parse("q^10")
    assert variation_poly(and4) == parse("12*q^15 + 18*q^13 + 10*q^9")
    assert variation_poly(one).is_zero()


def test_negative_coefficient_member():
    target = parse("12*q^15 + 6*q^13 - 2*q^9 + 8*q^3")
    hits = [F for F in FUNCS if variation_poly(F) == target]
    assert hits
    assert count_positive_roots(target) == 0


def test_certification():
    rep = certify_monotonicity()
    assert rep["counts_per_arity"] == {1: 3, 2: 6, 3: 20, 4: 168}
    assert rep["n_functions"] == 168
    assert rep["n_distinct_RF"] == 17
    assert rep["matches_expected_set"]
    assert rep["positive_root_violations"] == []
    assert {parse(s) for s in rep["distinct_RF"]} == {parse(s) for s in EXPECTED_VARIATIONS}
    assert len({r["R"] for r in rep["negative_coefficient_functions"]}) == 3


def test_derivative_sign_on_grid():
    rng = random.Random(7)
    for F in rng.sample(FUNCS, 20):
        P = integral_poly(F)
        vals = []
        for k in range(1, 20):
            p = Fraction(k, 20)
            q = p / (1 - p)
            vals.append(P(q) / Z_POLY(q))
        assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_cross_check_with_exact_engine():
    G = build_figure_graph()
    X = [G.edge_index("E0", "F0")] + [G.edge_index(f"E{i}", f"F{i}") for i in (1, 2, 3)]
    rng = random.Random(3)
    for F in rng.sample(FUNCS, 25):
        total = None
        for x in itertools.product((0, 1), repeat=4):
            if F(x):
                ev = EventSpec(frozenset(e for e, b in zip(X, x) if b), frozenset(e for e, b in zip(X, x) if not b))
                P = event_poly(G, ev)
                total = P if total is None else total + P
        expect = integral_poly(F)
        assert (total if total is not None else expect * 0) == expect
