"""Pure-Python kernels for the Fock-space output coefficients.

Mirrors ``_ckernels.pyx`` line for line; used when the extension is absent
or ``TMSV_PURE_PYTHON`` is set.
"""

import math

import numpy as np

from .errors import SeriesConvergenceError


def hyp2f1_unit(a, b, c, z, tol=1e-14, max_iter=10000):
    """``2F1(a, b; c; z)`` for ``a, b >= c >= 1`` and ``0 <= z < 1``.

    With these parameters the term ratio decreases monotonically towards
    ``z``, so once it drops below one the remaining tail is bounded by a
    geometric series.
    """
    if z == 0.0:
        return 1.0
    total = 1.0
    term = 1.0
    j = 0
    while True:
        term *= (a + j) * (b + j) / ((c + j) * (1.0 + j)) * z
        total += term
        j += 1
        ratio = (a + j) * (b + j) / ((c + j) * (1.0 + j)) * z
        if ratio < 1.0 and term * ratio <= tol * total * (1.0 - ratio):
            return total
        if j >= max_iter:
            raise SeriesConvergenceError(
                f"2F1({a}, {b}; {c}; {z}) did not converge in {max_iter} terms"
            )


def _log_power(base, exponent):
    # log(base**exponent) with 0**0 == 1; None encodes log(0)
    if exponent == 0:
        return 0.0
    if base == 0.0:
        return None
    return exponent * math.log(base)


def k_coefficient(k, l, m, q2, t1, t2, tol=1e-14, max_iter=10000):
    """Coefficient ``K_{k,l,m}`` of the lossy squeezed-vacuum output.

    ``q2 = q^2`` and ``t1, t2`` are the intensity transmissions ``|T_i|^2``.
    """
    a = max(k, l)
    logs = (
        _log_power(q2, a),
        _log_power(1.0 - t1, a - k),
        _log_power(1.0 - t2, a - l),
        _log_power(t1, k),
        _log_power(t2, l),
    )
    if any(v is None for v in logs):
        return 0.0
    lg = math.lgamma
    log_pref = (
        sum(logs)
        + lg(a + 1) + lg(a + m + 1)
        - 0.5 * (lg(k + 1) + lg(l + 1) + lg(k + m + 1) + lg(l + m + 1))
        - lg(a - k + 1) - lg(a - l + 1)
    )
    z = q2 * (1.0 - t1) * (1.0 - t2)
    series = hyp2f1_unit(a + 1.0, a + m + 1.0, abs(k - l) + 1.0, z, tol, max_iter)
    return math.exp(log_pref) * series


def k_table(q2, t1, t2, n_max, tol=1e-14, max_iter=10000):
    """All ``K_{k,l,m}`` with ``k + m <= n_max`` and ``l + m <= n_max``."""
    out = np.zeros((n_max + 1, n_max + 1, n_max + 1))
    for m in range(n_max + 1):
        for k in range(n_max + 1 - m):
            for l in range(n_max + 1 - m):
                out[k, l, m] = k_coefficient(k, l, m, q2, t1, t2, tol, max_iter)
    return out
