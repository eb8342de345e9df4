"""Monotone boolean functions of four edge indicators and the sign of d/dp of their mean.

A function of n inputs is stored as a 2^n-bit number.  The high half holds
the function with the last input set to 0, the low half with it set to 1,
recursively, so a monotone function of n + 1 inputs is a pair (a, b) of
monotone functions of n inputs with a <= b pointwise, numbered a * 2^(2^n) + b.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .polyarith import IntPolynomial, count_positive_roots, derivative, parse, to_string

MAX_ARITY = 4

# the distinct values of P_F' Z - P_F Z' over all 168 monotone F
EXPECTED_VARIATIONS = [
    "0",
    "10*q^9 + 18*q^5 + 12*q^3",
    "12*q^13 + 22*q^9 + 18*q^5 + 4*q^3",
    "12*q^15 + 12*q^13 + 4*q^9 + 4*q^3",
    "12*q^15 + 18*q^13 + 10*q^9",
    "12*q^15 + 6*q^13 - 2*q^9 + 8*q^3",
    "12*q^15 - 8*q^9 + 12*q^3",
    "18*q^13 + 28*q^9 + 18*q^5",
    "4*q^15 + 12*q^13 + 16*q^9 + 12*q^5 + 4*q^3",
    "4*q^15 + 18*q^13 + 22*q^9 + 12*q^5",
    "4*q^15 + 4*q^9 + 12*q^5 + 12*q^3",
    "4*q^15 + 6*q^13 + 10*q^9 + 12*q^5 + 8*q^3",
    "6*q^13 + 16*q^9 + 18*q^5 + 8*q^3",
    "8*q^15 + 12*q^13 + 10*q^9 + 6*q^5 + 4*q^3",
    "8*q^15 + 18*q^13 + 16*q^9 + 6*q^5",
    "8*q^15 - 2*q^9 + 6*q^5 + 12*q^3",
    "8*q^15 + 6*q^13 + 4*q^9 + 6*q^5 + 8*q^3",
]


@dataclass(frozen=True)
class MonotoneFunction:
    n: int
    number: int

    def __call__(self, *inputs) -> int:
        if len(inputs) == 1 and isinstance(inputs[0], (tuple, list)):
            inputs = tuple(inputs[0])
        if len(inputs) != self.n:
            raise ValueError(f"expected {self.n} inputs")
        return evaluate(self.number, inputs)

    def truth_table(self) -> list[int]:
        """Values on all inputs, input tuple x read as the integer sum x_j 2^j."""
        return [evaluate(self.number, _bits(i, self.n)) for i in range(1 << self.n)]

    def is_monotone(self) -> bool:
        return is_monotone_table(self.truth_table(), self.n)


def _bits(i: int, n: int) -> tuple[int, ...]:
    return tuple(i >> j & 1 for j in range(n))


def evaluate(number: int, inputs) -> int:
    inputs = list(inputs)
    while inputs:
        half = 1 << (len(inputs) - 1)
        low = number & ((1 << half) - 1)
        number = low if inputs.pop() == 1 else number >> half
    return number & 1


def is_monotone_table(table: list[int], n: int) -> bool:
    for i in range(1 << n):
        for j in range(n):
            if not i >> j & 1 and table[i] > table[i | 1 << j]:
                return False
    return True


def enumerate_monotone(n: int) -> list[MonotoneFunction]:
    if not 0 <= n <= MAX_ARITY:
        raise ValueError(f"arity must be between 0 and {MAX_ARITY}")
    nums = [0, 1]
    width = 1
    for _ in range(n):
        nums = [a << width | b for a in nums for b in nums if a & b == a]
        width *= 2
    return [MonotoneFunction(n, x) for x in nums]


def brute_force_monotone(n: int) -> list[list[int]]:
    """All monotone truth tables of n inputs, by filtering every boolean function."""
    return [list(t) for t in itertools.product((0, 1), repeat=1 << n) if is_monotone_table(list(t), n)]


def weight_exponent(x) -> int | None:
    """q-exponent of the input (x0, x1, x2, x3), or None if x0 breaks parity."""
    a, b, c, d = x
    if (a + b + c + d) % 2:
        return None
    return 3 * (b + c + d) + a


def integral_poly(F: MonotoneFunction) -> IntPolynomial:
    if F.n != 4:
        raise ValueError("the weight formula needs four inputs")
    terms: dict[int, int] = {}
    for x in itertools.product((0, 1), repeat=4):
        k = weight_exponent(x)
        if k is not None and F(x):
            terms[k] = terms.get(k, 0) + 1
    return IntPolynomial.from_terms(terms)


Z_POLY = integral_poly(MonotoneFunction(4, (1 << 16) - 1))


def variation_poly(F: MonotoneFunction) -> IntPolynomial:
    P = integral_poly(F)
    return derivative(P) * Z_POLY - P * derivative(Z_POLY)


def certify_monotonicity() -> dict:
    counts = {n: len(enumerate_monotone(n)) for n in range(1, MAX_ARITY + 1)}
    funcs = enumerate_monotone(4)
    distinct: dict[IntPolynomial, list[int]] = {}
    violations, negative = [], []
    for F in funcs:
        R = variation_poly(F)
        distinct.setdefault(R, []).append(F.number)
        if not R.is_zero():
            if count_positive_roots(R) > 0:
                violations.append({"number": F.number, "truth_table": F.truth_table(), "R": to_string(R)})
            if any(c < 0 for c in R.coeffs):
                negative.append({"number": F.number, "R": to_string(R)})
    expected = {parse(s) for s in EXPECTED_VARIATIONS}
    return {
        "counts_per_arity": counts,
        "n_functions": len(funcs),
        "distinct_RF": sorted(to_string(R) for R in distinct),
        "n_distinct_RF": len(distinct),
        "matches_expected_set": set(distinct) == expected,
        "positive_root_violations": violations,
        "negative_coefficient_functions": negative,
    }
