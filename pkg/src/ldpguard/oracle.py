"""Desk-scale ground-truth oracles.

``rational_feasible`` decides ``G x >= h`` exactly, treating every double as
the rational number it encodes. ``bruteforce_min_norm`` finds the minimum-norm
feasible point by enumerating candidate active sets with an SVD-based
least-squares routine, so it shares no code path with the NNLS solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .problem import LdpProblem, ToleranceConfig
from .verify import verify_feasible

__all__ = [
    "DimensionTooLarge",
    "RationalVerdict",
    "MinNormVerdict",
    "rational_feasible",
    "bruteforce_min_norm",
]

RATIONAL_MAX_M, RATIONAL_MAX_N = 64, 8
BRUTE_MAX_M, BRUTE_MAX_N = 8, 4


class DimensionTooLarge(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RationalVerdict:
    feasible: bool
    witness: tuple[Fraction, ...] | None = None


@dataclass(frozen=True, eq=False)
class MinNormVerdict:
    feasible: bool
    x: np.ndarray | None = None


def _pivot(T: list[list[Fraction]], obj: list[Fraction], basis: list[int], r: int, c: int):
    row = T[r]
    pv = row[c]
    if pv != 1:
        T[r] = row = [v / pv for v in row]
    for i, other in enumerate(T):
        if i != r:
            factor = other[c]
            if factor:
                T[i] = [a - factor * b for a, b in zip(other, row)]
    factor = obj[c]
    if factor:
        obj[:] = [a - factor * b for a, b in zip(obj, row)]
    basis[r] = c


def _simplex(T, obj, basis, allowed: int) -> bool:
    """Bland's-rule simplex on the tableau. Returns False if unbounded."""
    while True:
        enter = next((j for j in range(allowed) if obj[j] < 0), None)
        if enter is None:
            return True
        best = None
        for i, row in enumerate(T):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return False
        _pivot(T, obj, basis, best[1], enter)


def rational_feasible(prob: LdpProblem) -> RationalVerdict:
    """Exact feasibility of ``G x >= h`` by two-phase simplex over the rationals.

    When feasible, the witness returned minimises ``||x||_1`` over the feasible
    set, which makes it a deterministic, exactly representable point.
    """
    m, n = prob.m, prob.n
    if m > RATIONAL_MAX_M or n > RATIONAL_MAX_N:
        raise DimensionTooLarge(
            f"rational oracle limited to m <= {RATIONAL_MAX_M}, n <= {RATIONAL_MAX_N}"
        )
    G = [[Fraction(float(v)) for v in row] for row in prob.G]
    h = [Fraction(float(v)) for v in prob.h]

    # columns: x+ (n), x- (n), slack (m), artificial (m), rhs
    width = 2 * n + 2 * m
    T = []
    for i in range(m):
        sign = 1 if h[i] >= 0 else -1
        row = [Fraction(0)] * (width + 1)
        for j in range(n):
            row[j] = sign * G[i][j]
            row[n + j] = -sign * G[i][j]
        row[2 * n + i] = Fraction(-sign)
        row[2 * n + m + i] = Fraction(1)
        row[-1] = sign * h[i]
        T.append(row)
    basis = [2 * n + m + i for i in range(m)]
    obj = [Fraction(0)] * (width + 1)
    for j in range(2 * n + m):
        obj[j] = -sum((row[j] for row in T), Fraction(0))
    obj[-1] = -sum((row[-1] for row in T), Fraction(0))

    _simplex(T, obj, basis, 2 * n + m)
    if obj[-1] != 0:
        return RationalVerdict(False)

    # drive remaining artificials out of the basis, dropping redundant rows
    first_art = 2 * n + m
    i = 0
    while i < len(T):
        if basis[i] >= first_art:
            c = next((j for j in range(first_art) if T[i][j] != 0), None)
            if c is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, obj, basis, i, c)
        i += 1
    T = [row[:first_art] + [row[-1]] for row in T]

    # phase 2: minimise sum(x+) + sum(x-)
    cost = [Fraction(1)] * (2 * n) + [Fraction(0)] * m
    obj = cost + [Fraction(0)]
    for i, b in enumerate(basis):
        if cost[b]:
            obj = [a - cost[b] * v for a, v in zip(obj, T[i])]
    if not _simplex(T, obj, basis, first_art):
        raise AssertionError("L1 objective cannot be unbounded below")
    values = [Fraction(0)] * first_art
    for i, b in enumerate(basis):
        values[b] = T[i][-1]
    witness = tuple(values[j] - values[n + j] for j in range(n))
    return RationalVerdict(True, witness)


def bruteforce_min_norm(prob: LdpProblem) -> MinNormVerdict:
    """Minimum-norm feasible point by active-set enumeration.

    Every subset of at most ``n`` rows with full row rank is made active and
    the least-norm point on that face is kept if it is feasible with
    ``tau_feas = 1e-10``. The origin is always a candidate. Infeasibility is
    decided by :func:`rational_feasible`.
    """
    m, n = prob.m, prob.n
    if m > BRUTE_MAX_M or n > BRUTE_MAX_N:
        raise DimensionTooLarge(
            f"brute-force oracle limited to m <= {BRUTE_MAX_M}, n <= {BRUTE_MAX_N}"
        )
    if not rational_feasible(prob).feasible:
        return MinNormVerdict(False)
    tight = ToleranceConfig(tau_feas=1e-10)
    best = None
    best_norm = np.inf
    zero = np.zeros(n)
    if verify_feasible(prob, zero, tight).passed:
        return MinNormVerdict(True, zero)
    for k in range(1, min(n, m) + 1):
        for rows in combinations(range(m), k):
            Gs = prob.G[list(rows)]
            if np.linalg.matrix_rank(Gs) < k:
                continue
            x = np.linalg.lstsq(Gs, prob.h[list(rows)], rcond=None)[0]
            norm = float(np.linalg.norm(x))
            if norm < best_norm and verify_feasible(prob, x, tight).passed:
                best, best_norm = x, norm
    if best is None:
        raise RuntimeError("feasible problem but no enumerated candidate passed the check")
    return MinNormVerdict(True, best)
