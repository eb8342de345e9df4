"""Exact one-variable integer polynomials in q, with Sturm root counting."""
from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering


@total_ordering
class IntPolynomial:
    """Dense integer polynomial; ``coeffs[k]`` multiplies q^k.  Immutable."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = [int(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    def __setattr__(self, name, value):
        raise AttributeError("IntPolynomial is immutable")

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> IntPolynomial:
        return cls([0] * k + [c])

    @classmethod
    def from_terms(cls, terms: dict[int, int]) -> IntPolynomial:
        if not terms:
            return cls()
        c = [0] * (max(terms) + 1)
        for k, a in terms.items():
            c[k] += a
        return cls(c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def terms(self) -> dict[int, int]:
        return {k: a for k, a in enumerate(self.coeffs) if a}

    # ring operations
    def __add__(self, other):
        other = _coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPolynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return IntPolynomial(-a for a in self.coeffs)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        if self.is_zero() or other.is_zero():
            return IntPolynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = IntPolynomial([1])
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPolynomial([other])
        return isinstance(other, IntPolynomial) and self.coeffs == other.coeffs

    def __lt__(self, other):
        return (len(self.coeffs), self.coeffs[::-1]) < (len(other.coeffs), other.coeffs[::-1])

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        return eval_at(self, x)

    def __repr__(self):
        return f"IntPolynomial({self})"

    def __str__(self):
        return to_string(self)


def _coerce(x) -> IntPolynomial:
    if isinstance(x, IntPolynomial):
        return x
    if isinstance(x, int):
        return IntPolynomial([x])
    raise TypeError(f"cannot combine a polynomial with {type(x).__name__}")


Q = IntPolynomial([0, 1])


def derivative(P: IntPolynomial) -> IntPolynomial:
    return IntPolynomial(k * a for k, a in enumerate(P.coeffs) if k)


def mul(P: IntPolynomial, R: IntPolynomial) -> IntPolynomial:
    return P * R


def sub(P: IntPolynomial, R: IntPolynomial) -> IntPolynomial:
    return P - R


def eval_at(P: IntPolynomial, x):
    """Horner evaluation; exact for ints and Fractions."""
    acc = 0
    for a in reversed(P.coeffs):
        acc = acc * x + a
    return acc


def eval_at_rational(P: IntPolynomial, num: int, den: int = 1) -> Fraction:
    return eval_at(P, Fraction(num, den))


def to_string(P: IntPolynomial) -> str:
    """Canonical text form, ascending degree: ``1 + 3*q^4 - q^10``."""
    if P.is_zero():
        return "0"
    parts = []
    for k, a in enumerate(P.coeffs):
        if a == 0:
            continue
        mag = abs(a)
        if k == 0:
            body = str(mag)
        else:
            var = "q" if k == 1 else f"q^{k}"
            body = var if mag == 1 else f"{mag}*{var}"
        if not parts:
            parts.append(body if a > 0 else "-" + body)
        else:
            parts.append(("+ " if a > 0 else "- ") + body)
    return " ".join(parts)


_TERM = re.compile(r"^(\d+)?\*?(q(?:\^(\d+))?)?$")


def parse(text: str) -> IntPolynomial:
    """Inverse of :func:`to_string`; also accepts any order and repeated degrees."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial text")
    if s[0] not in "+-":
        s = "+" + s
    terms: dict[int, int] = {}
    for sign, body in re.findall(r"([+-])([^+-]+)", s):
        m = _TERM.match(body)
        if not m or (m.group(1) is None and m.group(2) is None):
            raise ValueError(f"cannot parse term {body!r}")
        c = int(m.group(1)) if m.group(1) else 1
        if m.group(2) is None:
            k = 0
        else:
            k = int(m.group(3)) if m.group(3) else 1
        terms[k] = terms.get(k, 0) + (c if sign == "+" else -c)
    if "".join(sign + body for sign, body in re.findall(r"([+-])([^+-]+)", s)) != s:
        raise ValueError(f"cannot parse {text!r}")
    return IntPolynomial.from_terms(terms)


# -- root counting ----------------------------------------------------------

def _divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    """Polynomial long division on ascending Fraction lists."""
    a = a[:]
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and any(a):
        shift = len(a) - len(b)
        f = a[-1] / b[-1]
        q[shift] = f
        for i, c in enumerate(b):
            a[i + shift] -= f * c
        while a and a[-1] == 0:
            a.pop()
    return q, a


def _trim(c: list[Fraction]) -> list[Fraction]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    while b:
        _, r = _divmod(a, b)
        a, b = b, _trim(r)
    return [x / a[-1] for x in a]


def square_free(P: IntPolynomial) -> list[Fraction]:
    c = [Fraction(a) for a in P.coeffs]
    d = [Fraction(a) for a in derivative(P).coeffs]
    if not d:
        return c
    g = _gcd(c, d)
    q, r = _divmod(c, g)
    assert not _trim(r)
    return _trim(q)


def sturm_chain(c: list[Fraction]) -> list[list[Fraction]]:
    chain = [c]
    d = [k * a for k, a in enumerate(c) if k]
    if not d:
        return chain
    chain.append(d)
    while True:
        _, r = _divmod(chain[-2], chain[-1])
        r = _trim([-x for x in r])
        if not r:
            return chain
        chain.append(r)


def _variations(signs: list[int]) -> int:
    s = [x for x in signs if x]
    return sum(1 for a, b in zip(s, s[1:]) if a != b)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def count_positive_roots(P: IntPolynomial) -> int:
    """Number of distinct real roots in (0, inf), counted by a Sturm chain."""
    if P.is_zero():
        raise ValueError("the zero polynomial has infinitely many roots")
    # drop the factor q^k so 0 is not a root
    c = list(P.coeffs)
    while c[0] == 0:
        c.pop(0)
    sf = square_free(IntPolynomial(c))
    chain = sturm_chain(sf)
    at_zero = _variations([_sign(p[0]) for p in chain])
    at_inf = _variations([_sign(p[-1]) for p in chain])
    return at_zero - at_inf


def count_roots_between(P: IntPolynomial, lo, hi) -> int:
    """Distinct real roots in (lo, hi]; endpoints are rationals."""
    if P.is_zero():
        raise ValueError("the zero polynomial has infinitely many roots")
    chain = sturm_chain(square_free(P))

    def v(x):
        return _variations([_sign(_feval(p, Fraction(x))) for p in chain])

    return v(lo) - v(hi)


def _feval(c: list[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for a in reversed(c):
        acc = acc * x + a
    return acc


def bisect_root(P: IntPolynomial, lo, hi, tol=Fraction(1, 10**12)) -> tuple[Fraction, Fraction]:
    """Shrink a sign-change bracket of P to width ``tol`` with exact arithmetic."""
    lo, hi = Fraction(lo), Fraction(hi)
    flo, fhi = _sign(eval_at(P, lo)), _sign(eval_at(P, hi))
    if flo == 0:
        return lo, lo
    if fhi == 0:
        return hi, hi
    if flo == fhi:
        raise ValueError("no sign change on the bracket")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        fm = _sign(eval_at(P, mid))
        if fm == 0:
            return mid, mid
        if fm == flo:
            lo = mid
        else:
            hi = mid
    return lo, hi
