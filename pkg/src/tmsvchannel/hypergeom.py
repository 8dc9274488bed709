"""Generalized hypergeometric series 3F2 for the output-state coefficients."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import SeriesConvergenceError

DEFAULT_TOL = 1e-14
MAX_ITER = 10_000


@dataclass(frozen=True)
class HypergeometricSpec:
    """Parameters of ``3F2(upper; lower; argument)``."""

    upper: tuple[float, float, float]
    lower: tuple[float, float]
    argument: float

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(float(u) for u in self.upper))
        object.__setattr__(self, "lower", tuple(float(d) for d in self.lower))
        object.__setattr__(self, "argument", float(self.argument))
        if len(self.upper) != 3 or len(self.lower) != 2:
            raise ValueError("3F2 needs three upper and two lower parameters")
        if not 0.0 <= self.argument < 1.0:
            raise ValueError(f"argument must lie in [0, 1), got {self.argument}")
        for d in self.lower:
            if d <= 0 and d == int(d):
                raise ValueError(f"lower parameter {d} is a non-positive integer")

    @classmethod
    def for_coefficient(cls, k: int, l: int, m: int, z: float) -> "HypergeometricSpec":
        a = max(k, l)
        return cls((a + 1, a + m + 1, 1), (a - k + 1, a - l + 1), z)


def _cancel(upper, lower):
    """Drop equal upper/lower pairs; the Pochhammer symbols divide out exactly."""
    upper, lower = list(upper), list(lower)
    for d in list(lower):
        if d in upper:
            upper.remove(d)
            lower.remove(d)
    return upper, lower


def hyp_series(spec: HypergeometricSpec, tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER) -> float:
    """Sum ``sum_j prod (u)_j / prod (d)_j * z^j / j!`` to relative accuracy ``tol``.

    Summation stops once a rigorous geometric bound on the remaining tail is
    below ``tol * |partial sum|``: for ``j`` past every sign change each
    factor ``(u + j) / (d + j)`` is monotone in ``j`` and tends to 1, so the
    term ratio never exceeds ``z * prod max((u + j) / (d + j), 1)``.
    """
    z = spec.argument
    upper, lower = _cancel(spec.upper, spec.lower)
    # j! is the implicit lower parameter 1
    pairs = list(zip(upper, lower + [1.0]))
    if z == 0.0:
        return 1.0

    def ratio_bound(j):
        bound = z
        for u, d in pairs:
            if u + j <= 0 or d + j <= 0:
                return math.inf
            bound *= max((u + j) / (d + j), 1.0)
        return bound

    total = 1.0
    term = 1.0
    for j in range(max_iter):
        factor = z
        for u, d in pairs:
            factor *= (u + j) / (d + j)
        term *= factor
        total += term
        if term == 0.0:
            return total
        rho = ratio_bound(j + 1)
        if rho < 1.0 and abs(term) * rho <= tol * abs(total) * (1.0 - rho):
            return total
    raise SeriesConvergenceError(
        f"3F2{spec.upper};{spec.lower};{z} did not converge in {max_iter} terms"
    )
