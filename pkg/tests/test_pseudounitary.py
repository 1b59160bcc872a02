import math

import numpy as np
import pytest

from hyperhs.domain.identities.pseudounitary import (
    NILPOTENT_A_PLUS,
    U11,
    DHCosetCheck,
    EpsScanCheck,
    HSEpsCheck,
    dh_rhs,
    hs_eps_rhs,
    pruisken_u11_point,
    u11_boost,
    u11_measure_density,
    verify_dh_coset_u11,
    verify_pseudounitary_hs_11,
)
from hyperhs.domain.linalg import is_pseudounitary
from hyperhs.exceptions import ConstraintViolation, DegenerateSpectrum


def _coordinates(z):
    p1, p2, theta, phi = z
    r = pruisken_u11_point((p1, p2), theta, phi)
    return np.array([r[0, 0].real, r[1, 1].real, r[0, 1].real, r[0, 1].imag])


def test_boost_is_pseudounitary():
    assert is_pseudounitary(u11_boost(0.7, 1.1), U11)


def test_pruisken_point_keeps_spectrum():
    r = pruisken_u11_point((1.3, -0.4), 0.6, 2.0)
    assert np.allclose(np.sort(np.linalg.eigvals(r).real), [-0.4, 1.3])
    assert np.allclose(r[1, 0], -np.conj(r[0, 1]))


def test_measure_density_matches_numeric_jacobian():
    z0 = np.array([1.3, -0.4, 0.6, 2.0])
    h = 1e-6
    jac = np.empty((4, 4))
    for j in range(4):
        step = np.zeros(4)
        step[j] = h
        jac[:, j] = (_coordinates(z0 + step) - _coordinates(z0 - step)) / (2 * h)
    assert abs(np.linalg.det(jac)) == pytest.approx(u11_measure_density(1.3, -0.4, 0.6), rel=1e-6)


def test_dh_coset_constant(settings, oracles):
    report = verify_dh_coset_u11([2.0, -0.5], [1.5, -0.8], settings)
    assert report.passed
    assert report.const_fit == pytest.approx(complex(*oracles["dh_u11_constant"]), rel=2e-3)


@pytest.mark.parametrize("p,lam", [
    ([1.2, 0.3], [0.9, -1.4]),
    ([-0.5, -2.0], [2.2, -0.6]),
    ([1.5, -1.0], [0.8, -0.6]),
    ([0.4, -0.9], [1.7, -0.3]),
    ([2.5, 0.5], [1.1, -1.1]),
    ([-0.3, -1.6], [0.5, -2.0]),
    ([1.0, -2.0], [2.0, -0.5]),
])
def test_dh_coset_other_points(settings, p, lam):
    assert verify_dh_coset_u11(p, lam, settings).passed


def test_dh_coset_constraints(settings):
    with pytest.raises(ConstraintViolation):
        verify_dh_coset_u11([2.0, -0.5], [1.0, 0.5], settings)
    with pytest.raises(DegenerateSpectrum):
        verify_dh_coset_u11([1.0, 1.0], [1.0, -1.0], settings)
    assert DHCosetCheck().identity_id == "dh_u11"


def test_dh_rhs_closed_form():
    p, lam = np.array([2.0, -0.5]), np.array([1.5, -0.8])
    expected = np.exp(-1j * (3.0 + 0.4)) / (2.5 * 2.3)
    assert dh_rhs(p, lam) == pytest.approx(expected)


def test_nilpotent_right_side():
    a = NILPOTENT_A_PLUS @ np.diag([1.0, -1.0])
    assert np.allclose(a @ a, 0.0)
    assert hs_eps_rhs(NILPOTENT_A_PLUS, 0.5) == pytest.approx(math.exp(-1.0))


@pytest.mark.slow
def test_hs_eps_generic(settings, oracles):
    report = verify_pseudounitary_hs_11([[2.0, 0.5], [0.5, 1.0]], 0.5, settings)
    assert report.passed
    assert abs(report.ratio - 1.0) < 0.02
    assert report.const_fit == pytest.approx(oracles["hs_eps_constant"], rel=0.02)


@pytest.mark.slow
def test_hs_eps_nilpotent(settings):
    report = HSEpsCheck().run({"nilpotent": True, "eps": 0.5}, settings)
    assert report.passed


@pytest.mark.slow
def test_eps_scan_slope(settings):
    report = EpsScanCheck().run({"a_plus": [[2.0, 0.5], [0.5, 1.0]]}, settings)
    assert report.passed
    assert report.rhs == pytest.approx(-3.0)


@pytest.mark.slow
@pytest.mark.parametrize("a_plus", [
    [[1.5, 0.3], [0.3, 0.8]],
    [[1.8, 0.4j], [-0.4j, 1.1]],
    [[1.0, 0.2 + 0.3j], [0.2 - 0.3j, 1.6]],
    [[2.0, -0.6], [-0.6, 0.9]],
    [[0.7, 0.1], [0.1, 1.3]],
])
def test_hs_eps_generic_family(settings, a_plus):
    report = verify_pseudounitary_hs_11(a_plus, 0.5, settings)
    assert report.passed, report.ratio
    assert abs(report.ratio - 1.0) < 0.02
