"""Oracle cross-checks behind the hidden ``verify`` subcommand."""

from __future__ import annotations

import itertools
import warnings

import numpy as np

from .channel import DeviceParams, propagate_covariance
from .fock import default_n_max, output_density
from .gaussian import SqueezeSpec, tmsv_covariance, tmsv_fock_amplitudes
from .oracle import DilationConfig, covariance_from_fock, dilation_output, ppt_min_eigenvalue
from .separability import simon_criterion


def _check(name, error, tol):
    return {"name": name, "max_error": float(error), "tolerance": tol, "passed": bool(error <= tol)}


def run_checks(quick: bool = False) -> list[dict]:
    qs = (0.4,) if quick else (0.2, 0.4, 0.6)
    ts = (0.7, 1.0) if quick else (0.3, 0.7, 0.9, 1.0)
    n_max = 10
    fock_err = cov_err = 0.0
    sign_mismatch = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for q, t1, t2 in itertools.product(qs, ts, ts):
            spec = SqueezeSpec.from_q(q)
            # offsets up to n_max need input photons up to n_max + the norm cutoff
            cutoff = n_max + default_n_max(q)
            amps, _ = tmsv_fock_amplitudes(spec, cutoff)
            ref = dilation_output(amps, DilationConfig(cutoff, t1, t2)).restrict(n_max)
            rho = output_density(spec, t1, t2, n_max=n_max)
            fock_err = max(fock_err, np.abs(ref.elements - rho.elements).max())

            V_fock = covariance_from_fock(output_density(spec, t1, t2))
            V_gauss = propagate_covariance(tmsv_covariance(spec), DeviceParams(t1), DeviceParams(t2))
            cov_err = max(cov_err, np.abs(V_fock.entries - V_gauss.entries).max())

            # inseparable <=> margin < 0 <=> negative partial-transpose eigenvalue
            margin = simon_criterion(V_gauss).margin
            if abs(margin) >= 1e-9 and np.sign(ppt_min_eigenvalue(rho)) != np.sign(margin):
                sign_mismatch += 1
    return [
        _check("fock_vs_dilation", fock_err, 1e-8),
        _check("covariance_fock_vs_gaussian", cov_err, 1e-8),
        _check("ppt_sign_vs_simon", sign_mismatch, 0),
    ]
