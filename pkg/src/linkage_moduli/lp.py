"""Exact rational feasibility for open polyhedral cones.

Two independent decision paths:

* :func:`feasible_interior` maximizes a common slack ``t`` with a dense
  Fraction simplex (Bland's rule, so it cannot cycle);
* :func:`fourier_motzkin_feasible` eliminates variables one at a time,
  tracking strictness.  It is exponential and meant as a test oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

Row = tuple[Fraction, ...]


def _row(coeffs: Sequence) -> Row:
    return tuple(Fraction(c) for c in coeffs)


@dataclass(frozen=True)
class LinearSystem:
    """``strict`` rows mean ``c.x > 0``, ``nonstrict`` rows mean ``c.x >= 0``.

    All rows are homogeneous, so the solution set is a cone; a returned point
    is rescaled to ``sum(x) == 1`` when ``normalize`` is set.
    """
    nvars: int
    strict: tuple[Row, ...] = ()
    nonstrict: tuple[Row, ...] = ()
    normalize: bool = True

    def __post_init__(self):
        object.__setattr__(self, "strict", tuple(_row(r) for r in self.strict))
        object.__setattr__(self, "nonstrict", tuple(_row(r) for r in self.nonstrict))
        for r in self.strict + self.nonstrict:
            if len(r) != self.nvars:
                raise ValueError(f"row of length {len(r)} in a system with {self.nvars} variables")

    def satisfied_by(self, x: Sequence) -> bool:
        dot = lambda r: sum(c * v for c, v in zip(r, x))
        return all(dot(r) > 0 for r in self.strict) and all(dot(r) >= 0 for r in self.nonstrict)


def ordered_cone(n: int, strict=(), nonstrict=()) -> LinearSystem:
    """Adds ``0 < x_1 <= x_2 <= ... <= x_n`` to the given rows."""
    pos = [0] * n
    pos[0] = 1
    order = []
    for i in range(n - 1):
        r = [0] * n
        r[i], r[i + 1] = -1, 1
        order.append(r)
    return LinearSystem(n, tuple(strict) + (tuple(pos),), tuple(nonstrict) + tuple(order))


@dataclass
class _Tableau:
    """max c.y  s.t.  A y <= b, y >= 0, with b >= 0 so the origin is feasible."""
    A: list[list[Fraction]]
    b: list[Fraction]
    c: list[Fraction]
    basis: list[int] = field(init=False)
    nonbasis: list[int] = field(init=False)

    def __post_init__(self):
        m, n = len(self.A), len(self.c)
        self.nonbasis = list(range(n))
        self.basis = list(range(n, n + m))
        self.value = Fraction(0)

    def pivot(self, i: int, j: int) -> None:
        A, b, c = self.A, self.b, self.c
        piv = A[i][j]
        row = A[i]
        inv = 1 / piv
        for l in range(len(row)):
            row[l] = inv if l == j else row[l] * inv
        b[i] *= inv
        for r in range(len(A)):
            if r == i:
                continue
            f = A[r][j]
            if f:
                Ar = A[r]
                for l in range(len(Ar)):
                    Ar[l] = -f * inv if l == j else Ar[l] - f * row[l]
                b[r] -= f * b[i]
        f = c[j]
        if f:
            for l in range(len(c)):
                c[l] = -f * inv if l == j else c[l] - f * row[l]
            self.value += f * b[i]
        self.basis[i], self.nonbasis[j] = self.nonbasis[j], self.basis[i]

    def solve(self) -> str:
        while True:
            entering = [(self.nonbasis[j], j) for j in range(len(self.c)) if self.c[j] > 0]
            if not entering:
                return "optimal"
            _, j = min(entering)
            leaving = [(self.b[i] / self.A[i][j], self.basis[i], i)
                       for i in range(len(self.A)) if self.A[i][j] > 0]
            if not leaving:
                return "unbounded"
            _, _, i = min(leaving)
            self.pivot(i, j)

    def primal(self) -> list[Fraction]:
        y = [Fraction(0)] * len(self.c)
        for i, v in enumerate(self.basis):
            if v < len(y):
                y[v] = self.b[i]
        return y


def max_slack(system: LinearSystem) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Optimal ``t`` and a point for: strict rows >= t, nonstrict rows >= 0.

    Variables are the cone coordinates (taken >= 0, which every cone used here
    implies) plus ``t``; ``sum(x) <= 1`` and ``t <= 1`` keep the LP bounded.
    """
    n = system.nvars
    one, zero = Fraction(1), Fraction(0)
    A, b = [], []
    for r in system.strict:
        A.append([-c for c in r] + [one])
        b.append(zero)
    for r in system.nonstrict:
        A.append([-c for c in r] + [zero])
        b.append(zero)
    A.append([one] * n + [zero])
    b.append(one)
    A.append([zero] * n + [one])
    b.append(one)
    c = [zero] * n + [one]
    tab = _Tableau(A, b, c)
    status = tab.solve()
    assert status == "optimal", status
    y = tab.primal()
    return y[n], tuple(y[:n])


def feasible_interior(system: LinearSystem) -> tuple[Fraction, ...] | None:
    t, x = max_slack(system)
    if t <= 0:
        return None
    if system.normalize:
        s = sum(x)
        x = tuple(v / s for v in x)
    assert system.satisfied_by(x)
    return x


def integer_point(x: Sequence[Fraction]) -> tuple[int, ...]:
    """Smallest positive integer multiple of a rational point."""
    den = math.lcm(*(Fraction(v).denominator for v in x))
    ints = [int(Fraction(v) * den) for v in x]
    g = math.gcd(*ints)
    return tuple(v // g for v in ints)


def _normalized(row: Row) -> Row:
    scale = next((abs(c) for c in row if c), None)
    if scale is None:
        return row
    return tuple(c / scale for c in row)


def fourier_motzkin_feasible(system: LinearSystem, max_vars: int = 12) -> bool:
    """Whether the open cone is non-empty, decided by variable elimination."""
    if system.nvars > max_vars:
        raise ValueError(f"Fourier-Motzkin oracle limited to {max_vars} variables")
    rows: dict[Row, bool] = {}

    def add(r: Row, strict: bool) -> None:
        r = _normalized(r)
        rows[r] = rows.get(r, False) or strict

    for r in system.strict:
        add(r, True)
    for r in system.nonstrict:
        add(r, False)
    for v in range(system.nvars):
        pos = [(r, s) for r, s in rows.items() if r[v] > 0]
        neg = [(r, s) for r, s in rows.items() if r[v] < 0]
        rest = {r: s for r, s in rows.items() if r[v] == 0}
        rows = {}
        for r, s in rest.items():
            add(r, s)
        for rp, sp in pos:
            for rn, sn in neg:
                a, b = rp[v], -rn[v]
                add(tuple(b * x + a * y for x, y in zip(rp, rn)), sp or sn)
        for r, s in rows.items():
            if s and not any(r):
                return False
    return not any(s and not any(r) for r, s in rows.items())
