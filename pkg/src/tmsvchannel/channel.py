"""Absorbing and amplifying four-port devices acting on two-mode covariances."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import PhysicalityError, UnsupportedConfigurationError
from .gaussian import CovarianceMatrix

ENERGY_TOL = 1e-12


class Regime(enum.IntEnum):
    ABSORBING = 1
    AMPLIFYING = -1

    @classmethod
    def parse(cls, value) -> "Regime":
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            key = value.strip().upper()
            aliases = {"ABSORB": "ABSORBING", "AMPLIFY": "AMPLIFYING", "+1": "ABSORBING", "-1": "AMPLIFYING"}
            return cls[aliases.get(key, key)]
        return cls(int(value))


@dataclass(frozen=True)
class DeviceParams:
    """A single four-port device at one frequency.

    ``T`` is the transmission into the signal output, ``R`` the reflection
    from the unused input port and ``n_th`` the thermal occupation of the
    device's noise reservoir.
    """

    T: complex = 1.0
    R: complex = 0.0
    sigma: Regime = Regime.ABSORBING
    n_th: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "T", complex(self.T))
        object.__setattr__(self, "R", complex(self.R))
        object.__setattr__(self, "sigma", Regime.parse(self.sigma))
        object.__setattr__(self, "n_th", float(self.n_th))
        if not (math.isfinite(self.n_th) and self.n_th >= 0.0):
            raise ValueError(f"n_th must be finite and >= 0, got {self.n_th}")
        if not (np.isfinite(self.T) and np.isfinite(self.R)):
            raise ValueError("T and R must be finite")
        total = abs(self.T) ** 2 + abs(self.R) ** 2
        if self.sigma is Regime.ABSORBING and total > 1.0 + ENERGY_TOL:
            raise ValueError(f"absorbing device needs |T|^2 + |R|^2 <= 1, got {total}")
        if self.sigma is Regime.AMPLIFYING and total < 1.0 - ENERGY_TOL:
            raise ValueError(f"amplifying device needs |T|^2 + |R|^2 >= 1, got {total}")

    @property
    def noise_weight(self) -> float:
        """``sigma (1 - |T|^2 - |R|^2)``, the non-negative reservoir coupling."""
        return float(self.sigma) * (1.0 - abs(self.T) ** 2 - abs(self.R) ** 2)

    def with_n_th(self, n_th: float) -> "DeviceParams":
        return DeviceParams(self.T, self.R, self.sigma, n_th)


@dataclass(frozen=True)
class FiberGeometry:
    length: float
    absorption_length: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.length) and self.length >= 0.0):
            raise ValueError(f"length must be finite and >= 0, got {self.length}")
        if not (math.isfinite(self.absorption_length) and self.absorption_length > 0.0):
            raise ValueError(f"absorption length must be > 0, got {self.absorption_length}")


def transmission_from_length(geom: FiberGeometry) -> float:
    """Amplitude transmission ``exp(-l / l_A)`` of a fiber (Lambert-Beer)."""
    return math.exp(-geom.length / geom.absorption_length)


def fiber(length: float, absorption_length: float = 1.0, n_th: float = 0.0) -> DeviceParams:
    """Absorbing fiber with perfect input coupling (``R = 0``)."""
    T = transmission_from_length(FiberGeometry(length, absorption_length))
    return DeviceParams(T=T, R=0.0, sigma=Regime.ABSORBING, n_th=n_th)


def thermal_occupation(hw_over_kt: float) -> float:
    """Bose factor ``1 / (exp(hbar w / k T) - 1)``."""
    if hw_over_kt <= 0.0:
        raise ValueError(f"hbar*omega/(k_B T) must be positive, got {hw_over_kt}")
    return 1.0 / math.expm1(hw_over_kt)


def _structured_parts(v: np.ndarray):
    x, y = v[0, 0], v[2, 2]
    z1, z2 = v[0, 2], v[0, 3]
    ok = (
        v[1, 1] == x
        and v[3, 3] == y
        and v[0, 1] == 0.0
        and v[2, 3] == 0.0
        and v[1, 3] == -z1
        and v[1, 2] == z2
    )
    return (x, y, complex(z1, z2)) if ok else None


def propagate_covariance(
    V_in: CovarianceMatrix, dev1: DeviceParams, dev2: DeviceParams, check: bool = True
) -> CovarianceMatrix:
    """Output covariance after device 1 on mode 1 and device 2 on mode 3.

    ``V_in`` must have diagonal blocks proportional to the identity and a
    cross block ``[[z1, z2], [z2, -z1]]`` (the squeezed-vacuum structure).
    The unused device input ports are in the vacuum.
    """
    if dev1.sigma != dev2.sigma:
        raise UnsupportedConfigurationError("mixed absorbing/amplifying device pairs are not supported")
    parts = _structured_parts(V_in.entries)
    if parts is None:
        raise UnsupportedConfigurationError(
            "input covariance must have X = x I, Y = y I, Z = [[z1, z2], [z2, -z1]]"
        )
    x_in, y_in, zc = parts

    def diag(x, dev):
        t2, r2 = abs(dev.T) ** 2, abs(dev.R) ** 2
        return x * t2 + 0.5 * r2 + (dev.n_th + 0.5) * dev.noise_weight

    x = diag(x_in, dev1)
    y = diag(y_in, dev2)
    # z1 + i z2 picks up the product of the two transmissions
    zo = dev1.T * dev2.T * zc
    z1, z2 = zo.real, zo.imag
    V = CovarianceMatrix(
        np.array(
            [[x, 0.0, z1, z2], [0.0, x, z2, -z1], [z1, z2, y, 0.0], [z2, -z1, 0.0, y]]
        )
    )
    if check and not V.is_physical(1e-10):
        raise PhysicalityError(f"propagated covariance violates the uncertainty relation: {V!r}")
    return V
