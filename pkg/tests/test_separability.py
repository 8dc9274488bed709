import itertools
import math

import numpy as np
import pytest
from scipy.optimize import brentq

from tmsvchannel.channel import DeviceParams, Regime, fiber, propagate_covariance
from tmsvchannel.gaussian import CovarianceMatrix, SqueezeSpec, tmsv_covariance, vacuum_covariance
from tmsvchannel.separability import (
    SeparabilityVerdict,
    excess_gain,
    gain_boundary,
    max_length,
    nth_threshold,
    simon_criterion,
)


def _margin_along_length(spec, n_th, l_A=1.0):
    V = tmsv_covariance(spec)

    def margin(l):
        dev = fiber(l, l_A, n_th)
        return simon_criterion(propagate_covariance(V, dev, dev)).margin

    return margin


def _margin_at_gain(spec, gain):
    dev = DeviceParams(math.sqrt(gain), sigma=Regime.AMPLIFYING)
    return simon_criterion(propagate_covariance(tmsv_covariance(spec), dev, dev)).margin


def test_vacuum_separable():
    v = simon_criterion(vacuum_covariance())
    assert v.margin >= 0
    assert v.verdict() in ("separable", "boundary")


@pytest.mark.parametrize("zeta", [0.05, 0.5, 2.0])
def test_tmsv_inseparable(zeta):
    v = simon_criterion(tmsv_covariance(SqueezeSpec.from_zeta(zeta)))
    assert v.margin < 0
    assert v.verdict() == "inseparable"
    assert not v.separable_consistent


def test_equal_device_margin_closed_form():
    # symmetric state: margin = ((x - z)^2 - 1/4)((x + z)^2 - 1/4)
    x, z = 0.9, 0.6
    V = CovarianceMatrix(np.array([[x, 0, -z, 0], [0, x, 0, z], [-z, 0, x, 0], [0, z, 0, x]]))
    expected = ((x - z) ** 2 - 0.25) * ((x + z) ** 2 - 0.25)
    assert simon_criterion(V).margin == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("zeta, T, n_th", [(0.3, 0.9, 0.0), (1.0, 0.5, 0.4), (2.5, 0.2, 3.0)])
def test_factored_margin_matches_expanded(zeta, T, n_th):
    dev = DeviceParams(T, n_th=n_th)
    v = simon_criterion(propagate_covariance(tmsv_covariance(SqueezeSpec.from_zeta(zeta)), dev, dev))
    scale = max(abs(v.lhs), abs(v.rhs), 1.0)
    assert v.margin == pytest.approx(v.lhs - v.rhs, abs=1e-13 * scale)


def test_factored_margin_general_matrix():
    rng = np.random.default_rng(11)
    A = rng.normal(size=(4, 4))
    W = A @ A.T + 0.6 * np.eye(4)
    v = simon_criterion(CovarianceMatrix(0.5 * (W + W.T)))
    assert v.margin == pytest.approx(v.lhs - v.rhs, rel=1e-10, abs=1e-12)


def test_boundary_verdict():
    assert SeparabilityVerdict(1.0, 1.0).verdict() == "boundary"
    assert SeparabilityVerdict(1.0, 1.0).separable_consistent


def test_nth_threshold_limits():
    assert nth_threshold(SqueezeSpec.from_zeta(0.0), 0.6, 0.0) == 0.0
    assert nth_threshold(SqueezeSpec.from_zeta(0.5), 1.0, 0.0) == math.inf


def test_nth_threshold_scan_oracle():
    spec = SqueezeSpec.from_zeta(0.5)
    V = tmsv_covariance(spec)

    def margin(n):
        dev = DeviceParams(0.8, n_th=n)
        return simon_criterion(propagate_covariance(V, dev, dev)).margin

    grid = np.linspace(0.0, 2.0, 2001)
    signs = np.sign([margin(n) for n in grid])
    i = int(np.flatnonzero(np.diff(signs))[0])
    root = brentq(margin, grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15)
    assert nth_threshold(spec, 0.8, 0.0) == pytest.approx(root, rel=1e-9)


@pytest.mark.parametrize("zeta, T, R", [(0.3, 0.5, 0.2), (1.2, 0.9, 0.1), (2.0, 0.4, 0.6)])
def test_nth_threshold_with_reflection(zeta, T, R):
    spec = SqueezeSpec.from_zeta(zeta)
    n = nth_threshold(spec, T, R)
    dev = DeviceParams(T, R, n_th=n)
    m = simon_criterion(propagate_covariance(tmsv_covariance(spec), dev, dev)).margin
    assert abs(m) < 1e-12


def test_max_length_reference():
    spec = SqueezeSpec.from_zeta(1.0)
    value = max_length(spec, 0.1, 1.0)
    assert value == pytest.approx(0.5 * math.log(1 + (1 - math.exp(-2.0)) / 0.2), rel=1e-15)
    margin = _margin_along_length(spec, 0.1)
    root = brentq(margin, 1e-6, 5.0, xtol=1e-15, rtol=1e-15)
    assert value == pytest.approx(root, rel=1e-9)
    dev = fiber(value, 1.0, 0.1)
    assert abs(simon_criterion(propagate_covariance(tmsv_covariance(spec), dev, dev)).margin) <= 1e-9


@pytest.mark.parametrize(
    "zeta, n_th, l_A", list(itertools.product([0.25, 1.0, 3.0], [0.02, 0.5, 4.0], [0.5, 2.0]))
)
def test_max_length_matches_margin_root(zeta, n_th, l_A):
    spec = SqueezeSpec.from_zeta(zeta)
    margin = _margin_along_length(spec, n_th, l_A)
    hi = 50.0 * l_A
    root = brentq(margin, 1e-9, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps)
    assert max_length(spec, n_th, l_A) == pytest.approx(root, rel=1e-9)


def test_max_length_limits():
    assert max_length(SqueezeSpec.from_zeta(0.5), 0.0) == math.inf
    assert max_length(SqueezeSpec.from_zeta(15.0), 0.3, 2.0) == pytest.approx(math.log(1 + 1 / 0.6))
    assert max_length(SqueezeSpec.from_zeta(0.5), 1e12) < 1e-12
    with pytest.raises(ValueError):
        max_length(SqueezeSpec.from_zeta(0.5), -1.0)


def test_max_length_monotone():
    zetas = np.linspace(0.1, 4.0, 30)
    nths = np.geomspace(1e-3, 1e2, 30)
    by_zeta = [max_length(SqueezeSpec.from_zeta(z), 0.3) for z in zetas]
    by_nth = [max_length(SqueezeSpec.from_zeta(1.0), n) for n in nths]
    assert np.all(np.diff(by_zeta) > 0)
    assert np.all(np.diff(by_nth) < 0)


@pytest.mark.parametrize("zeta", [0.1, 0.5, 1.0, 2.0])
def test_gain_boundary(zeta):
    spec = SqueezeSpec.from_zeta(zeta)
    g = gain_boundary(spec)
    assert g == pytest.approx(1 + math.tanh(zeta), rel=1e-14)
    assert excess_gain(spec) == pytest.approx(math.tanh(zeta), rel=1e-15)
    assert abs(_margin_at_gain(spec, g)) <= 1e-10
    assert _margin_at_gain(spec, g - 1e-4) < 0 < _margin_at_gain(spec, g + 1e-4)


def test_gain_boundary_limits():
    assert gain_boundary(SqueezeSpec.from_zeta(0.0)) == 1.0
    assert excess_gain(SqueezeSpec.from_zeta(0.0)) == 0.0
    assert gain_boundary(SqueezeSpec.from_zeta(15.0)) == pytest.approx(2.0)


@pytest.mark.parametrize("theta1, theta2", [(0.4, 0.0), (1.1, -0.7), (math.pi / 2, 2.0)])
def test_local_rotation_invariance(theta1, theta2):
    spec = SqueezeSpec.from_zeta(0.8)
    dev = DeviceParams(0.5, n_th=0.3)
    V = propagate_covariance(tmsv_covariance(spec), dev, dev).entries

    def rot(t):
        return np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])

    S = np.zeros((4, 4))
    S[:2, :2], S[2:, 2:] = rot(theta1), rot(theta2)
    W = S @ V @ S.T
    a = simon_criterion(CovarianceMatrix(V))
    b = simon_criterion(CovarianceMatrix(0.5 * (W + W.T)))
    assert b.margin == pytest.approx(a.margin, rel=1e-12)
    assert b.verdict() == a.verdict()
