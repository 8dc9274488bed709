"""Two-mode squeezed vacuum in covariance and Fock form.

Quadratures are ordered ``(q1, p1, q3, p3)`` and the vacuum variance is 1/2.
The covariance matrix of the squeezed vacuum with parameter ``zeta`` has
diagonal blocks ``cosh(2 zeta)/2 * I`` and cross block
``diag(-sinh(2 zeta)/2, sinh(2 zeta)/2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStateError

#: Single-mode symplectic unit.
J = np.array([[0.0, 1.0], [-1.0, 0.0]])
#: Two-mode symplectic form, block diagonal in ``J``.
OMEGA = np.kron(np.eye(2), J)

DET_TOL = 1e-12


@dataclass(frozen=True)
class SqueezeSpec:
    """Squeezing strength of the input state.

    Build with :meth:`from_zeta`, :meth:`from_q` or :meth:`from_mean_photons`;
    the three fields are kept mutually consistent.
    """

    zeta: float
    q: float
    mean_photons: float

    def __post_init__(self):
        if not (math.isfinite(self.zeta) and self.zeta >= 0.0):
            raise ValueError(f"zeta must be a finite non-negative real, got {self.zeta}")
        if not 0.0 <= self.q < 1.0:
            raise ValueError(f"q must lie in [0, 1), got {self.q}")

    @classmethod
    def from_zeta(cls, zeta: float) -> "SqueezeSpec":
        zeta = float(zeta)
        return cls(zeta=zeta, q=math.tanh(zeta), mean_photons=math.sinh(zeta) ** 2)

    @classmethod
    def from_q(cls, q: float) -> "SqueezeSpec":
        q = float(q)
        if not 0.0 <= q < 1.0:
            raise ValueError(f"q must lie in [0, 1), got {q}")
        return cls(zeta=math.atanh(q), q=q, mean_photons=q * q / (1.0 - q * q))

    @classmethod
    def from_mean_photons(cls, mean_photons: float) -> "SqueezeSpec":
        n = float(mean_photons)
        if not (math.isfinite(n) and n >= 0.0):
            raise ValueError(f"mean photon number must be finite and >= 0, got {n}")
        q = math.sqrt(n / (n + 1.0))
        return cls(zeta=math.asinh(math.sqrt(n)), q=q, mean_photons=n)

    @property
    def q2(self) -> float:
        return self.q * self.q


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Symmetric 4x4 quadrature covariance matrix with blocks X, Z / Z^T, Y."""

    entries: np.ndarray

    def __post_init__(self):
        v = np.array(self.entries, dtype=float)
        if v.shape != (4, 4):
            raise ValueError(f"covariance matrix must be 4x4, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("covariance matrix has non-finite entries")
        if not np.array_equal(v, v.T):
            raise ValueError("covariance matrix must be exactly symmetric")
        v.setflags(write=False)
        object.__setattr__(self, "entries", v)

    @classmethod
    def from_blocks(cls, X, Y, Z) -> "CovarianceMatrix":
        X, Y, Z = (np.asarray(b, dtype=float) for b in (X, Y, Z))
        v = np.block([[X, Z], [Z.T, Y]])
        # enforce exact symmetry against round-off in the caller's blocks
        return cls(0.5 * (v + v.T))

    @property
    def X(self) -> np.ndarray:
        return self.entries[:2, :2]

    @property
    def Y(self) -> np.ndarray:
        return self.entries[2:, 2:]

    @property
    def Z(self) -> np.ndarray:
        return self.entries[:2, 2:]

    def det(self) -> float:
        return float(np.linalg.det(self.entries))

    def uncertainty_min_eigenvalue(self) -> float:
        """Smallest eigenvalue of ``V + (i/2) Omega``; non-negative for physical states."""
        return float(np.linalg.eigvalsh(self.entries + 0.5j * OMEGA).min())

    def is_physical(self, tol: float = 1e-10) -> bool:
        return self.uncertainty_min_eigenvalue() >= -tol

    def allclose(self, other: "CovarianceMatrix", atol: float) -> bool:
        return bool(np.allclose(self.entries, other.entries, rtol=0.0, atol=atol))

    def __repr__(self):
        return f"CovarianceMatrix({self.entries.tolist()!r})"


def vacuum_covariance() -> CovarianceMatrix:
    return CovarianceMatrix(0.5 * np.eye(4))


def tmsv_covariance(spec: SqueezeSpec) -> CovarianceMatrix:
    c = math.cosh(2.0 * spec.zeta)
    s = math.sinh(2.0 * spec.zeta)
    return CovarianceMatrix(
        np.array(
            [
                [c / 2, 0.0, -s / 2, 0.0],
                [0.0, c / 2, 0.0, s / 2],
                [-s / 2, 0.0, c / 2, 0.0],
                [0.0, s / 2, 0.0, c / 2],
            ]
        )
    )


def _structured_inverse(v: np.ndarray):
    """Closed-form inverse for X = x I, Y = y I, Z = [[z1, z2], [z2, -z1]].

    Returns ``(inverse, det)`` or ``None`` when ``v`` lacks that structure.
    """
    x, y = v[0, 0], v[2, 2]
    z1, z2 = v[0, 2], v[0, 3]
    expected = np.array(
        [[x, 0.0, z1, z2], [0.0, x, z2, -z1], [z1, z2, y, 0.0], [z2, -z1, 0.0, y]]
    )
    if not np.array_equal(v, expected):
        return None
    w = x * y - (z1 * z1 + z2 * z2)
    det = w * w
    inv = np.array(
        [[y, 0.0, -z1, -z2], [0.0, y, -z2, z1], [-z1, -z2, x, 0.0], [-z2, z1, 0.0, x]]
    ) / w if w != 0.0 else None
    return inv, det


def wigner_value(V: CovarianceMatrix, point) -> float | np.ndarray:
    """Gaussian Wigner function of a zero-mean two-mode state.

    ``point`` is a 4-vector ``(q1, p1, q3, p3)`` or an array of shape
    ``(..., 4)``; the result has the matching leading shape.
    """
    xi = np.asarray(point, dtype=float)
    if xi.shape[-1] != 4:
        raise ValueError(f"quadrature points must have last dimension 4, got {xi.shape}")
    if not np.all(np.isfinite(xi)):
        raise ValueError("quadrature point has non-finite entries")

    structured = _structured_inverse(V.entries)
    if structured is not None:
        inv, det = structured
    else:
        det = float(np.linalg.det(V.entries))
        inv = None
    if not det > DET_TOL:
        raise DegenerateStateError(f"covariance determinant {det:.3e} below {DET_TOL:g}")
    if inv is None:
        inv = np.linalg.solve(V.entries, np.eye(4))

    quad = np.einsum("...i,ij,...j->...", xi, inv, xi)
    value = np.exp(-0.5 * quad) / (4.0 * math.pi**2 * math.sqrt(det))
    return float(value) if value.ndim == 0 else value


def tmsv_fock_amplitudes(spec: SqueezeSpec, n_max: int) -> tuple[np.ndarray, float]:
    """Schmidt amplitudes ``sqrt(1 - q^2) q^n`` for ``n = 0..n_max``.

    Also returns the discarded norm ``q^(2 (n_max + 1))``.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    q = spec.q
    n = np.arange(n_max + 1)
    amps = math.sqrt(1.0 - q * q) * q**n
    return amps, q ** (2 * (n_max + 1))
