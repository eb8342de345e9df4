"""Linear algebra over GF(2) with rows packed into Python ints."""
from __future__ import annotations

from typing import Iterator


def _pack(row) -> int:
    v = 0
    for i, b in enumerate(row):
        if b:
            v |= 1 << i
    return v


def solve_affine(rows: list[int], rhs: list[int], n_vars: int) -> tuple[int | None, list[int]]:
    """Solve A x = b over GF(2).

    ``rows`` are bitmasks over ``n_vars`` variables.  Returns a particular
    solution (or None if the system is inconsistent) and a kernel basis.
    """
    pivots: list[tuple[int, int, int]] = []  # (pivot bit, row, rhs)
    for row, b in zip(rows, rhs):
        b &= 1
        for bit, prow, pb in pivots:
            if row >> bit & 1:
                row ^= prow
                b ^= pb
        if row == 0:
            if b:
                return None, []
            continue
        bit = row.bit_length() - 1
        # keep the echelon form reduced
        reduced = []
        for pbit, prow, pb in pivots:
            if prow >> bit & 1:
                prow ^= row
                pb ^= b
            reduced.append((pbit, prow, pb))
        pivots = reduced + [(bit, row, b)]
    pivot_bits = {bit for bit, _, _ in pivots}
    x = 0
    for bit, _, b in pivots:
        if b:
            x |= 1 << bit
    kernel = []
    for free in range(n_vars):
        if free in pivot_bits:
            continue
        v = 1 << free
        for bit, prow, _ in pivots:
            if prow >> free & 1:
                v |= 1 << bit
        kernel.append(v)
    return x, kernel


def rank(rows: list[int]) -> int:
    basis: list[int] = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
    return len(basis)


def span(base: int, kernel: list[int]) -> Iterator[int]:
    """All vectors ``base + span(kernel)``, in Gray-code order."""
    v = base
    yield v
    for i in range(1, 1 << len(kernel)):
        v ^= kernel[(i & -i).bit_length() - 1]
        yield v


def popcount(x: int) -> int:
    return bin(x).count("1")
