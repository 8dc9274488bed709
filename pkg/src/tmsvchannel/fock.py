"""Fock-basis density matrices of the transmitted squeezed vacuum.

Two-mode basis states ``|m1, m2>`` are flattened to ``m1 * (n_max + 1) + m2``.

For zero-temperature fibers with amplitude transmissions ``T1, T2`` the
output has only elements with equal photon-number offsets in both modes,

    <k + m, l + m| rho |k, l> = (1 - q^2) K[k, l, m] (q T1 T2)^m,

with ``K`` a product of binomial loss weights and the Gauss series
``2F1(a + 1, a + m + 1; |k - l| + 1; q^2 (1 - |T1|^2)(1 - |T2|^2))``,
``a = max(k, l)`` (see :func:`tmsvchannel._pykernels.k_coefficient`).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import TruncationWarning
from .gaussian import SqueezeSpec

DEFAULT_TAIL = 1e-12
SERIES_TOL = 1e-14
JSON_CUTOFF = 1e-14


@dataclass(frozen=True, eq=False)
class FockDensityMatrix:
    """Truncated two-mode density matrix.

    ``tail_bound`` bounds the trace discarded by the photon-number cutoff.
    """

    n_max: int
    elements: np.ndarray
    tail_bound: float = 0.0

    def __post_init__(self):
        dim = (self.n_max + 1) ** 2
        rho = np.asarray(self.elements, dtype=complex)
        if rho.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix for n_max={self.n_max}, got {rho.shape}")
        rho = rho.copy()
        rho.setflags(write=False)
        object.__setattr__(self, "elements", rho)

    @property
    def dim(self) -> int:
        return self.n_max + 1

    def tensor(self) -> np.ndarray:
        """View indexed as ``[m1, m2, n1, n2]``."""
        d = self.dim
        return self.elements.reshape(d, d, d, d)

    def element(self, m1: int, m2: int, n1: int, n2: int) -> complex:
        d = self.dim
        return complex(self.elements[m1 * d + m2, n1 * d + n2])

    def trace(self) -> float:
        return float(np.trace(self.elements).real)

    def hermiticity_error(self) -> float:
        return float(np.abs(self.elements - self.elements.conj().T).max())

    def sector_labels(self, kind: str = "difference") -> np.ndarray:
        """``m1 - m2`` (``"difference"``) or ``m1 + m2`` (``"sum"``) per flat index."""
        m1, m2 = np.divmod(np.arange(self.dim**2), self.dim)
        if kind == "difference":
            return m1 - m2
        if kind == "sum":
            return m1 + m2
        raise ValueError(f"unknown sector kind {kind!r}")

    def min_eigenvalue(self) -> float:
        return sector_min_eigenvalue(self.elements, self.sector_labels("difference"))

    def partial_transpose(self) -> np.ndarray:
        """Partial transpose over the second mode, as a flat matrix."""
        d = self.dim
        return self.tensor().transpose(0, 3, 2, 1).reshape(d * d, d * d)

    def reduced(self, mode: int) -> np.ndarray:
        """Reduced single-mode density matrix of mode 0 or 1."""
        t = self.tensor()
        if mode == 0:
            return np.einsum("ajbj->ab", t)
        if mode == 1:
            return np.einsum("jajb->ab", t)
        raise ValueError(f"mode must be 0 or 1, got {mode}")

    def mean_photons(self, mode: int) -> float:
        return float(np.real(np.diag(self.reduced(mode)) @ np.arange(self.dim)))

    def restrict(self, n_max: int) -> "FockDensityMatrix":
        """Compress onto the photon numbers ``<= n_max`` of both modes."""
        if n_max > self.n_max:
            raise ValueError(f"cannot restrict n_max={self.n_max} to the larger {n_max}")
        d = n_max + 1
        t = self.tensor()[:d, :d, :d, :d]
        dropped = max(0.0, 1.0 - self.tail_bound - float(np.real(np.einsum("abab->", t))))
        return FockDensityMatrix(n_max, t.reshape(d * d, d * d), self.tail_bound + dropped)

    def check_invariants(self, psd_tol: float = 1e-10, trace_tol: float = 1e-12) -> None:
        """Raise ``AssertionError`` when a structural invariant fails."""
        rho = self.elements
        assert np.array_equal(rho, rho.conj().T), "density matrix is not exactly Hermitian"
        tr = self.trace()
        assert 1.0 - self.tail_bound - trace_tol <= tr <= 1.0 + trace_tol, (
            f"trace {tr!r} outside [1 - {self.tail_bound:g}, 1]"
        )
        lam = self.min_eigenvalue()
        assert lam >= -psd_tol, f"minimum eigenvalue {lam:g} below -{psd_tol:g}"

    def to_json_dict(self, cutoff: float = JSON_CUTOFF) -> dict:
        rows, cols = np.nonzero(np.abs(self.elements) > cutoff)
        values = self.elements[rows, cols]
        return {
            "n_max": int(self.n_max),
            "elements": [
                [int(i), int(j), float(v.real), float(v.imag)]
                for i, j, v in zip(rows, cols, values)
            ],
        }

    @classmethod
    def from_json_dict(cls, doc: dict, tail_bound: float = 0.0) -> "FockDensityMatrix":
        n_max = int(doc["n_max"])
        dim = (n_max + 1) ** 2
        rho = np.zeros((dim, dim), dtype=complex)
        for i, j, re, im in doc["elements"]:
            rho[int(i), int(j)] = complex(re, im)
        return cls(n_max, rho, tail_bound)

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "FockDensityMatrix":
        return cls.from_json_dict(json.loads(text))


def sector_eigenvalues(mat: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Spectrum of a Hermitian matrix, block by block when possible.

    Blocks are the index sets sharing a label; if any element couples two
    different labels the dense spectrum is used instead.
    """
    coupled = labels[:, None] != labels[None, :]
    if np.any(mat[coupled]):
        return np.linalg.eigvalsh(mat)
    blocks = []
    for label in np.unique(labels):
        idx = np.flatnonzero(labels == label)
        blocks.append(np.linalg.eigvalsh(mat[np.ix_(idx, idx)]))
    return np.concatenate(blocks)


def sector_min_eigenvalue(mat: np.ndarray, labels: np.ndarray) -> float:
    return float(sector_eigenvalues(mat, labels).min())


def _hermitian_from_lower(rho: np.ndarray) -> np.ndarray:
    # mirror every stored element so that rho == rho^H holds bit for bit
    upper = np.triu_indices_from(rho, k=1)
    rho[upper] = rho.T[upper].conj()
    np.fill_diagonal(rho, rho.diagonal().real)
    return rho


def default_n_max(q: float, tail: float = DEFAULT_TAIL) -> int:
    """Smallest ``n`` with ``q^(2 (n + 1)) < tail``."""
    if q == 0.0:
        return 0
    n = max(0, math.ceil(math.log(tail) / (2.0 * math.log(q))) - 1)
    while q ** (2 * (n + 1)) >= tail:
        n += 1
    while n > 0 and q ** (2 * n) < tail:
        n -= 1
    return n


def truncated_output(q: float, T1: complex, T2: complex) -> FockDensityMatrix:
    """Output of two lossy fibers for the input ``(|00> + q|11>) / sqrt(1 + q^2)``.

    A mixture of ``|00>, |10>, |01>`` populations and the pure state with
    ``q`` replaced by ``T1 T2 q``. ``n_max`` is 1 and the trace is exact.
    """
    if not 0.0 <= q < 1.0:
        raise ValueError(f"q must lie in [0, 1), got {q}")
    T1, T2 = complex(T1), complex(T2)
    t1, t2 = abs(T1) ** 2, abs(T2) ** 2
    norm = 1.0 + q * q
    qp = T1 * T2 * q
    rho = np.zeros((4, 4), dtype=complex)
    # index: |00> -> 0, |01> -> 1, |10> -> 2, |11> -> 3
    w = q * q / norm
    rho[0, 0] = w * (1.0 - t1) * (1.0 - t2) + 1.0 / norm
    rho[2, 2] = w * t1 * (1.0 - t2)
    rho[1, 1] = w * t2 * (1.0 - t1)
    rho[3, 3] = abs(qp) ** 2 / norm
    rho[3, 0] = qp / norm
    return FockDensityMatrix(1, _hermitian_from_lower(rho), 0.0)


def output_density(
    spec: SqueezeSpec,
    T1: complex,
    T2: complex,
    n_max: int | None = None,
    tail_tol: float = DEFAULT_TAIL,
) -> FockDensityMatrix:
    """Exact Fock-basis output of the squeezed vacuum after two zero-temperature fibers.

    Elements are exact up to the series tolerance; only photon numbers above
    ``n_max`` are discarded, which removes at most ``q^(2 (n_max + 1))`` of the
    trace. A :class:`TruncationWarning` is issued when that exceeds ``tail_tol``.
    """
    q = spec.q
    if n_max is None:
        n_max = default_n_max(q, tail_tol)
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    T1, T2 = complex(T1), complex(T2)
    t1, t2 = abs(T1) ** 2, abs(T2) ** 2
    if t1 > 1.0 + 1e-12 or t2 > 1.0 + 1e-12:
        raise ValueError("fiber transmissions must satisfy |T| <= 1")
    t1, t2 = min(t1, 1.0), min(t2, 1.0)
    tail = q ** (2 * (n_max + 1))
    if tail > tail_tol:
        warnings.warn(
            f"n_max={n_max} discards up to {tail:.3e} of the trace (> {tail_tol:g})",
            TruncationWarning,
            stacklevel=2,
        )

    K = _kernels.k_table(q * q, t1, t2, n_max, SERIES_TOL)
    d = n_max + 1
    flat = np.zeros((d * d, d * d), dtype=complex)
    phase = q * T1 * T2
    for m in range(d):
        n = d - m
        kk, ll = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        # row |k+m, l+m>, column |k, l>; all on or below the diagonal
        flat[(kk + m) * d + (ll + m), kk * d + ll] = (1.0 - q * q) * phase**m * K[:n, :n, m]
    return FockDensityMatrix(n_max, _hermitian_from_lower(flat), tail)


def fock_density_from_pure(amplitudes) -> FockDensityMatrix:
    """Density matrix of ``sum_n c_n |n n>`` with ``n_max = len(amplitudes) - 1``."""
    c = np.asarray(amplitudes, dtype=complex)
    d = c.size
    psi = np.zeros((d, d), dtype=complex)
    psi[np.arange(d), np.arange(d)] = c
    v = psi.reshape(-1)
    tail = max(0.0, 1.0 - float(np.vdot(v, v).real))
    return FockDensityMatrix(d - 1, _hermitian_from_lower(np.outer(v, v.conj())), tail)
