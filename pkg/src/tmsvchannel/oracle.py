"""Brute-force reference computations used to cross-check the closed forms.

Loss is modelled by a beam-splitter unitary between each signal mode and a
vacuum environment mode, followed by a partial trace over the environment.
The unitary's action on ``|n>|0>`` is the binomial photon-splitting
amplitude; :func:`beam_splitter_unitary` builds the full unitary from its
generator for cross-checking.
Photon number is conserved by the beam splitter, so an environment cutoff
equal to the signal cutoff is exact.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .errors import PrecisionWarning, TruncationError
from .fock import FockDensityMatrix, _hermitian_from_lower, sector_eigenvalues, sector_min_eigenvalue
from .gaussian import CovarianceMatrix


@dataclass(frozen=True)
class DilationConfig:
    n_max: int
    T1: complex = 1.0
    T2: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "T1", complex(self.T1))
        object.__setattr__(self, "T2", complex(self.T2))
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        if abs(self.T1) > 1.0 + 1e-12 or abs(self.T2) > 1.0 + 1e-12:
            raise ValueError("beam-splitter transmittances must satisfy |T| <= 1")


def annihilation(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1.0, n_max + 1)), k=1)


def beam_splitter_unitary(T: float, n_max: int) -> np.ndarray:
    """Real beam splitter ``exp(theta (a^dag b - a b^dag))`` with ``cos(theta) = |T|``.

    Acts on ``signal (x) environment``, each truncated at ``n_max``; exact on
    every sector with total photon number ``<= n_max``.
    """
    a = annihilation(n_max)
    eye = np.eye(n_max + 1)
    a_sig, a_env = np.kron(a, eye), np.kron(eye, a)
    theta = math.acos(min(abs(T), 1.0))
    # U|1,0> = cos(theta)|1,0> - sin(theta)|0,1>
    return expm(theta * (a_sig.T @ a_env - a_sig @ a_env.T))


@lru_cache(maxsize=128)
def _binomial_columns(abs_t: float, n_max: int) -> np.ndarray:
    # <k, e| U |n, 0> = sqrt(C(n, k)) |T|^k (-R)^e on k + e = n, R = sqrt(1 - |T|^2)
    r = math.sqrt(max(0.0, 1.0 - abs_t * abs_t))
    d = n_max + 1
    cols = np.zeros((d, d, d))
    for n in range(d):
        for k in range(n + 1):
            cols[k, n - k, n] = math.sqrt(math.comb(n, k)) * abs_t**k * (-r) ** (n - k)
    cols.setflags(write=False)
    return cols


def loss_isometry(T: complex, n_max: int) -> np.ndarray:
    """``V[k, e, n] = <k|_sig <e|_env U |n>_sig |0>_env`` including the phase of ``T``."""
    T = complex(T)
    cols = _binomial_columns(abs(T), n_max)
    phase = np.exp(1j * np.angle(T) * np.arange(n_max + 1))
    return phase[:, None, None] * cols


def apply_loss(rho: FockDensityMatrix, T1: complex, T2: complex) -> FockDensityMatrix:
    """Send a (possibly mixed) two-mode state through two vacuum-environment beam splitters."""
    V1 = loss_isometry(T1, rho.n_max)
    V2 = loss_isometry(T2, rho.n_max)
    t = rho.tensor()
    out = np.einsum("aen,bfm,nmpr,cep,dfr->abcd", V1, V2, t, V1.conj(), V2.conj(), optimize=True)
    d = rho.dim
    return FockDensityMatrix(rho.n_max, _hermitian_from_lower(out.reshape(d * d, d * d)), rho.tail_bound)


def dilation_output(input_amplitudes, config: DilationConfig) -> FockDensityMatrix:
    """Output of the pure input ``sum_n c_n |n n>`` after loss on both modes."""
    c = np.asarray(input_amplitudes, dtype=complex)
    d = config.n_max + 1
    if c.size > d:
        if np.any(c[d:] != 0):
            raise TruncationError(f"input has support above n_max={config.n_max}")
        c = c[:d]
    c = np.concatenate([c, np.zeros(d - c.size, dtype=complex)])
    V1 = loss_isometry(config.T1, config.n_max)
    V2 = loss_isometry(config.T2, config.n_max)
    # psi[k1, k2, e1, e2] of the joint signal + environment pure state
    psi = np.einsum("n,aen,bfn->abef", c, V1, V2, optimize=True)
    M = psi.reshape(d * d, d * d)
    if not M.imag.any():
        M = np.ascontiguousarray(M.real)
    rho = (M @ M.conj().T).astype(complex)
    tail = max(0.0, 1.0 - float(np.vdot(c, c).real))
    return FockDensityMatrix(config.n_max, _hermitian_from_lower(rho), tail)


# quadratures q = i (a - a^dag) / sqrt 2 and p = (a + a^dag) / sqrt 2, written
# as alpha a + beta a^dag; this orientation gives the squeezed vacuum with
# positive Schmidt amplitudes the cross block diag(-s/2, s/2)
_QUAD = ((1j / math.sqrt(2), -1j / math.sqrt(2)), (1 / math.sqrt(2), 1 / math.sqrt(2)))


def covariance_from_fock(rho: FockDensityMatrix, warn_tail: float = 1e-8) -> CovarianceMatrix:
    """Symmetric-ordered quadrature covariance of a truncated two-mode state.

    Normally ordered moments are exact on the truncated space; the state is
    renormalized by its trace before the moments are taken.
    """
    if rho.tail_bound > warn_tail:
        warnings.warn(
            f"tail bound {rho.tail_bound:.2e} limits the reconstructed moments",
            PrecisionWarning,
            stacklevel=2,
        )
    t = rho.tensor() / rho.trace()
    ladder = _mode_ladders(rho.n_max)

    def ev(x, y):
        # expectation of the product of two mode-local operator pairs
        return np.einsum("abcd,ca,db->", t, x[0] @ y[0], x[1] @ y[1])

    ident = (np.eye(rho.dim), np.eye(rho.dim))
    mean = np.array([ev(ident, L) for L in ladder])
    N = np.array([[ev(_dagger(A), B) for B in ladder] for A in ladder])  # <a_j^dag a_k>
    M = np.array([[ev(A, B) for B in ladder] for A in ladder])  # <a_j a_k>

    V = np.zeros((4, 4))
    means = np.zeros(4, dtype=complex)
    labels = [(mode, quad) for mode in range(2) for quad in range(2)]
    for i, (j, qi) in enumerate(labels):
        al, be = _QUAD[qi]
        means[i] = al * mean[j] + be * np.conj(mean[j])
    for i, (j, qi) in enumerate(labels):
        a1, b1 = _QUAD[qi]
        for k_idx, (k, qk) in enumerate(labels):
            a2, b2 = _QUAD[qk]
            delta = 0.5 if j == k else 0.0
            sym = (
                a1 * a2 * M[j, k]
                + b1 * b2 * np.conj(M[j, k])
                + a1 * b2 * (N[k, j] + delta)
                + b1 * a2 * (N[j, k] + delta)
            )
            V[i, k_idx] = (sym - means[i] * means[k_idx]).real
    return CovarianceMatrix(0.5 * (V + V.T))


def _mode_ladders(n_max: int):
    a = annihilation(n_max)
    eye = np.eye(n_max + 1)
    return ((a, eye), (eye, a))


def _dagger(op):
    return (op[0].T, op[1].T)


def first_moments(rho: FockDensityMatrix) -> np.ndarray:
    """``(<a_1>, <a_2>)`` of the normalized state."""
    t = rho.tensor() / rho.trace()
    return np.array([np.einsum("abcd,ca,db->", t, x, y) for x, y in _mode_ladders(rho.n_max)])


def moment_tail_bound(q: float, n_max: int) -> float:
    """Conservative truncation error of second moments for squeezed-vacuum-derived states.

    Loss never raises photon numbers, so the input distribution
    ``(1 - q^2) q^(2n)`` dominates the tail of either output mode.
    """
    q2 = q * q
    M = n_max + 1
    tail = q2**M
    if tail == 0.0:
        return 0.0
    mean = q2 / (1.0 - q2)
    # sum_{n >= M} (2n + 1) (1 - q^2) q^(2n)
    weighted = 2.0 * tail * (M * (1.0 - q2) + q2) / (1.0 - q2) + tail
    return 2.0 * (weighted + tail * (2.0 * mean + 1.0)) / (1.0 - tail)


def ppt_min_eigenvalue(rho: FockDensityMatrix) -> float:
    """Smallest eigenvalue of the partial transpose over mode 2."""
    # equal-offset states transpose into blocks of fixed m1 + m2
    return sector_min_eigenvalue(rho.partial_transpose(), rho.sector_labels("sum"))


def log_negativity(rho: FockDensityMatrix) -> float:
    """``ln || rho^T2 ||_1`` in nats."""
    ev = sector_eigenvalues(rho.partial_transpose(), rho.sector_labels("sum"))
    return float(math.log(np.abs(ev).sum()))
