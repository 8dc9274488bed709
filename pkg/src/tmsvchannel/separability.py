"""Simon (Peres-Horodecki) separability test and closed-form thresholds."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import Regime
from .gaussian import J, CovarianceMatrix, SqueezeSpec

MARGIN_TOL = 1e-12
DENOM_TOL = 1e-14


@dataclass(frozen=True)
class SeparabilityVerdict:
    """Both sides of the Simon inequality and their difference ``margin``.

    ``margin`` defaults to ``lhs - rhs``; :func:`simon_criterion` supplies a
    factored evaluation that avoids cancelling large terms for strong squeezing.
    """

    lhs: float
    rhs: float
    margin: float = None

    def __post_init__(self):
        if self.margin is None:
            object.__setattr__(self, "margin", self.lhs - self.rhs)

    @property
    def separable_consistent(self) -> bool:
        # margin == 0 counts as separable
        return self.margin >= 0.0

    def verdict(self, tol: float = MARGIN_TOL) -> str:
        """``"separable"``, ``"inseparable"`` or ``"boundary"`` (``|margin| <= tol``)."""
        m = self.margin
        if abs(m) <= tol:
            return "boundary"
        return "separable" if m > 0 else "inseparable"


def _det2(m) -> float:
    return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def simon_criterion(V: CovarianceMatrix) -> SeparabilityVerdict:
    """Simon inequality ``lhs >= rhs``; a negative margin certifies entanglement.

    The margin equals ``(nu_+^2 - 1/4)(nu_-^2 - 1/4)`` with ``nu_+-`` the
    symplectic eigenvalues of the partially transposed covariance (taking
    ``|det Z|`` covers both signs of ``det Z``), evaluated without the
    cancellation of the expanded form.
    """
    X, Y, Z = V.X, V.Y, V.Z
    det_x, det_y, det_z = _det2(X), _det2(Y), _det2(Z)
    trace_term = float(np.trace(X @ J @ Z @ J @ Y @ J @ Z.T @ J))
    lhs = det_x * det_y + (0.25 - abs(det_z)) ** 2 - trace_term
    rhs = 0.25 * (det_x + det_y)

    v = V.entries
    x, y = v[0, 0], v[2, 2]
    z1, z2 = v[0, 2], v[0, 3]
    structured = np.array_equal(
        v, [[x, 0.0, z1, z2], [0.0, x, z2, -z1], [z1, z2, y, 0.0], [z2, -z1, 0.0, y]]
    )
    if structured:
        det_v = (x * y - (z1 * z1 + z2 * z2)) ** 2
    else:
        det_v = float(np.linalg.det(v))
    delta = det_x + det_y + 2.0 * abs(det_z)
    root = math.sqrt(max(delta * delta - 4.0 * det_v, 0.0))
    nu_plus2 = 0.5 * (delta + root)
    nu_minus2 = det_v / nu_plus2 if nu_plus2 > 0.0 else 0.0
    margin = (nu_plus2 - 0.25) * (nu_minus2 - 0.25)
    return SeparabilityVerdict(lhs=lhs, rhs=rhs, margin=margin)


def nth_threshold(spec: SqueezeSpec, T: float, R: float, sigma=Regime.ABSORBING) -> float:
    """Thermal occupation of two equal devices above which the output is separable.

    Returns ``math.inf`` when the device injects no noise (``|T|^2 + |R|^2 = 1``)
    and the squeezed input stays entangled at any temperature.
    """
    sigma = Regime.parse(sigma)
    s = float(sigma)
    t2, r2 = abs(T) ** 2, abs(R) ** 2
    e = math.exp(-2.0 * spec.zeta)
    numerator = (1.0 - s) * (1.0 - r2) + t2 * (s - e)
    denominator = 2.0 * s * (1.0 - r2 - t2)
    if abs(numerator) <= DENOM_TOL:
        return 0.0
    if abs(denominator) <= DENOM_TOL:
        return math.inf
    return numerator / denominator


def max_length(spec: SqueezeSpec, n_th: float, l_A: float = 1.0) -> float:
    """Longest pair of equal absorbing fibers (``R = 0``) that keeps the state inseparable.

    Zero temperature never separates an entangled input, so ``n_th = 0``
    returns ``math.inf`` (and so does any ``zeta > 0`` in that limit).
    """
    if n_th < 0.0:
        raise ValueError(f"n_th must be >= 0, got {n_th}")
    if l_A <= 0.0:
        raise ValueError(f"absorption length must be > 0, got {l_A}")
    if n_th == 0.0:
        return 0.0 if spec.zeta == 0.0 else math.inf
    return 0.5 * l_A * math.log1p(-math.expm1(-2.0 * spec.zeta) / (2.0 * n_th))


def gain_boundary(spec: SqueezeSpec, R: float = 0.0) -> float:
    """Intensity gain ``|T|^2`` at which two equal zero-temperature amplifiers separate the state."""
    return 2.0 * (1.0 - abs(R) ** 2) / (1.0 + math.exp(-2.0 * spec.zeta))


def excess_gain(spec: SqueezeSpec) -> float:
    """``|T|^2 - 1`` at the boundary for ``R = 0``; equals ``tanh(zeta)``."""
    return math.tanh(spec.zeta)
