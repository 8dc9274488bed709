"""Entanglement of pure states and convexity-based estimates for lossy transmission.

All entropies are in nats.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect
from scipy.special import entr

from . import _kernels
from .errors import DecompositionError, NoSolutionError
from .fock import default_n_max
from .gaussian import SqueezeSpec

NORM_TOL = 1e-12
DEGENERACY_SWITCH = 1e-6
LENGTH_RTOL = 1e-10


class EstimateKind(enum.Enum):
    EXACT = "exact"
    UPPER_BOUND = "upper_bound"
    ESTIMATE = "estimate"


@dataclass(frozen=True)
class EntanglementReport:
    value: float
    lam: float
    kind: EstimateKind = EstimateKind.ESTIMATE

    def __post_init__(self):
        if not self.value >= 0.0:
            raise ValueError(f"entanglement must be >= 0, got {self.value}")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must lie in [0, 1], got {self.lam}")


@dataclass(frozen=True, eq=False)
class PureTwoModeState:
    """``sum_n c_n |n n>`` in its Schmidt basis."""

    amplitudes: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.amplitudes, dtype=complex)
        norm = float(np.vdot(c, c).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm!r} differs from 1 by more than {NORM_TOL:g}")
        c.setflags(write=False)
        object.__setattr__(self, "amplitudes", c)

    @classmethod
    def normalized(cls, amplitudes) -> "PureTwoModeState":
        c = np.asarray(amplitudes, dtype=complex)
        return cls(c / math.sqrt(float(np.vdot(c, c).real)))

    @property
    def schmidt_weights(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def pure_entropy(state: PureTwoModeState) -> float:
    """Reduced von Neumann entropy ``-sum p_n ln p_n``."""
    return float(entr(state.schmidt_weights).sum())


def _xlogx(x: float) -> float:
    return x * math.log(x) if x > 0.0 else 0.0


def truncated_state_entanglement(q: float) -> float:
    """Entanglement of ``(|00> + q|11>) / sqrt(1 + q^2)``."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    q2 = q * q
    return math.log1p(q2) - _xlogx(q2) / (1.0 + q2)


def truncated_upper_bound(q: float, T1: complex, T2: complex) -> float:
    """Convexity bound for the truncated input after two zero-temperature fibers."""
    y = abs(q * complex(T1) * complex(T2)) ** 2
    return ((1.0 + y) * math.log1p(y) - _xlogx(y)) / (1.0 + q * q)


def tmsv_entanglement(q: float) -> float:
    """Entanglement of the two-mode squeezed vacuum; ``inf`` at ``q = 1``."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    if q == 1.0:
        return math.inf
    q2 = q * q
    return -math.log1p(-q2) - _xlogx(q2) / (1.0 - q2)


def _loss_variables(q: float, T1: complex, T2: complex) -> tuple[float, float]:
    t1, t2 = abs(complex(T1)) ** 2, abs(complex(T2)) ** 2
    q2 = q * q
    return q2 * (1.0 - t1) * (1.0 - t2), q2 * t1 * t2


def estimate_value(q: float, T1: complex, T2: complex) -> float:
    """Closed form of ``(1 - lambda) E(Psi)`` for the extracted pure state.

    With ``x = q^2 (1 - |T1|^2)(1 - |T2|^2)``, ``y = |q T1 T2|^2``,
    ``u = (1 - x)^2`` and ``D = u - y``::

        (1 - q^2) * [ (1 - x)/D ln((1 - x)/D)
                      + (1 - x) ((y + u) ln(1 - x) - y ln y) / D^2 ]

    The second numerator vanishes to first order as ``D -> 0``; inside
    ``|D| < 1e-6 u`` it is replaced by its expansion
    ``D ln(1 - x) + D - D^2/(2u) - D^3/(6u^2)``.
    """
    if not 0.0 <= q < 1.0:
        raise ValueError(f"q must lie in [0, 1), got {q}")
    if q == 0.0:
        return 0.0
    x, y = _loss_variables(q, T1, T2)
    w = 1.0 - x
    u = w * w
    D = u - y
    if y == 0.0:
        # separable remainder; pure part is |00>
        return 0.0
    first = w / D * math.log(w / D)
    if abs(D) < DEGENERACY_SWITCH * u:
        numer = D * math.log(w) + D - D * D / (2.0 * u) - D**3 / (6.0 * u * u)
    else:
        numer = (y + u) * math.log(w) - y * math.log(y)
    value = (1.0 - q * q) * (first + w * numer / (D * D))
    return max(value, 0.0)


def estimate_upper_bound(spec: SqueezeSpec, T1: complex, T2: complex) -> EntanglementReport:
    """Entanglement estimate of the transmitted squeezed vacuum (zero temperature).

    The entanglement left in the separable-looking remainder is neglected,
    hence ``kind = ESTIMATE`` rather than a strict bound.
    """
    x, y = _loss_variables(spec.q, T1, T2)
    D = (1.0 - x) ** 2 - y
    lam = 1.0 - (1.0 - spec.q2) * (1.0 - x) / D if D > 0 else 0.0
    return EntanglementReport(
        value=estimate_value(spec.q, T1, T2), lam=min(max(lam, 0.0), 1.0), kind=EstimateKind.ESTIMATE
    )


def extract_pure_state(
    spec: SqueezeSpec, T1: complex, T2: complex, n_max: int | None = None
) -> tuple[float, PureTwoModeState]:
    """Split off the pure part ``(1 - lambda)|Psi><Psi|`` of the lossy output.

    ``sqrt(1 - lambda) <nn|Psi> = sqrt((1 - q^2) / K_000) K_00n (q T1 T2)^n``,
    which reproduces every ``<00|rho|nn>`` coherence of the output exactly.
    """
    q = spec.q
    if n_max is None:
        n_max = default_n_max(q)
    T1, T2 = complex(T1), complex(T2)
    t1, t2 = min(abs(T1) ** 2, 1.0), min(abs(T2) ** 2, 1.0)
    q2 = q * q
    K = np.array([_kernels.k_coefficient(0, 0, n, q2, t1, t2) for n in range(n_max + 1)])
    phase = (q * T1 * T2) ** np.arange(n_max + 1)
    amps = math.sqrt((1.0 - q2) / K[0]) * K * phase
    weight = float(np.vdot(amps, amps).real)
    lam = 1.0 - weight
    if not -1e-10 <= lam <= 1.0 + 1e-10:
        raise DecompositionError(f"extracted weight 1 - lambda = {weight!r} outside [0, 1]")
    return min(max(lam, 0.0), 1.0), PureTwoModeState.normalized(amps)


def degradation_length(spec: SqueezeSpec, l_A: float = 1.0, rtol: float = LENGTH_RTOL) -> float:
    """Fiber length at which the estimate falls to half the input entanglement.

    Both fibers are equal, ``R = 0`` and ``|T| = exp(-l / l_A)``.
    """
    if spec.q == 0.0:
        raise NoSolutionError("vacuum input carries no entanglement to degrade")
    if l_A <= 0.0:
        raise ValueError(f"absorption length must be > 0, got {l_A}")
    target = 0.5 * tmsv_entanglement(spec.q)

    def excess(l):
        T = math.exp(-l / l_A)
        return estimate_value(spec.q, T, T) - target

    hi = l_A
    while excess(hi) > 0.0:
        hi *= 2.0
        if hi > 1e3 * l_A:
            raise NoSolutionError("no half-entanglement length found below 1000 absorption lengths")
    return bisect(excess, 0.0, hi, xtol=1e-300, rtol=rtol, maxiter=2000)
