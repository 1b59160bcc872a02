import math

import numpy as np
import pytest
from scipy import special

from hyperhs.domain.quadrature import adaptive_1d
from hyperhs.domain.specfun import (
    bessel_i0,
    bessel_j0,
    bessel_y0,
    gauss_fourier_moment,
    hermite_e,
    k0_imaginary,
    k0_imaginary_quadrature,
    macdonald_k0,
    weber_integral,
)
from hyperhs.exceptions import DomainError


@pytest.mark.parametrize("name,func", [
    ("bessel_j0", bessel_j0),
    ("bessel_y0", bessel_y0),
    ("macdonald_k0", macdonald_k0),
    ("bessel_i0", bessel_i0),
])
def test_tabulated_values(oracles, name, func):
    for x, expected in oracles[name]:
        assert func(x) == pytest.approx(expected, rel=1e-9)


def test_j0_and_y0_match_scipy_across_the_switch():
    x = np.linspace(0.1, 40.0, 400)
    assert np.allclose(bessel_j0(x), special.j0(x), rtol=0, atol=1e-11)
    assert np.allclose(bessel_y0(x), special.y0(x), rtol=0, atol=1e-11)


def test_j0_is_even():
    x = np.array([0.3, 4.0, 12.5])
    assert np.allclose(bessel_j0(-x), bessel_j0(x))


def test_k0_matches_scipy():
    x = np.geomspace(0.02, 30.0, 200)
    assert np.allclose(macdonald_k0(x), special.k0(x), rtol=1e-10, atol=0)


def test_i0_matches_scipy():
    x = np.linspace(0.0, 5.0, 51)
    assert np.allclose(bessel_i0(x), special.i0(x), rtol=1e-12)


def test_k0_on_imaginary_axis_matches_scipy():
    u = np.array([-7.5, -1.2, 0.4, 1.0, 3.3, 15.0])
    expected = special.kv(0, 1j * u)
    assert np.allclose(k0_imaginary(u), expected, rtol=1e-9)


def test_k0_imaginary_quadrature_cross_check():
    est = k0_imaginary_quadrature(1.5)
    assert abs(est.value - k0_imaginary(1.5)) < 1e-4


def test_scalar_in_scalar_out():
    assert isinstance(bessel_j0(1.0), float)
    assert isinstance(k0_imaginary(1.0), complex)
    assert bessel_j0(np.ones((2, 3))).shape == (2, 3)


@pytest.mark.parametrize("func,arg", [
    (bessel_y0, 0.0),
    (bessel_y0, -1.0),
    (macdonald_k0, 0.0),
    (k0_imaginary, 0.0),
])
def test_singular_arguments_raise(func, arg):
    with pytest.raises(DomainError):
        func(arg)


def test_weber_integral_against_quadrature():
    b, c = 0.7, 1.9
    est = adaptive_1d(lambda p: p * np.exp(-b * p * p) * special.j0(c * p), 0.0, 20.0, abs_tol=1e-13)
    assert weber_integral(b, c) == pytest.approx(est.value.real, abs=1e-11)
    with pytest.raises(DomainError):
        weber_integral(0.0, 1.0)


def test_hermite_e_matches_numpy():
    x = np.linspace(-3.0, 3.0, 13)
    for k in range(7):
        coeffs = np.zeros(k + 1)
        coeffs[-1] = 1.0
        assert np.allclose(hermite_e(k, x), np.polynomial.hermite_e.hermeval(x, coeffs))


@pytest.mark.parametrize("k", [0, 1, 2, 3, 4])
def test_gauss_fourier_moment_against_quadrature(k):
    lam = 0.7
    est = adaptive_1d(lambda p: p ** k * np.exp(-p * p / 2.0 - 1j * p * lam), -20.0, 20.0, abs_tol=1e-13)
    assert abs(gauss_fourier_moment(k, lam) - est.value) < 1e-10


def test_gauss_fourier_moment_order_bounds():
    assert gauss_fourier_moment(0, 0.0) == pytest.approx(math.sqrt(2.0 * math.pi))
    with pytest.raises(DomainError):
        gauss_fourier_moment(17, 0.0)


def central_derivative(func, x, h):
    return (func(x + h) - func(x - h)) / (2.0 * h)


@pytest.mark.parametrize("x", [0.5, 1.0, 2.0, 5.0, 10.0])
def test_j0_y0_wronskian(x):
    h = 1e-5
    wronskian = bessel_j0(x) * central_derivative(bessel_y0, x, h) - central_derivative(bessel_j0, x, h) * bessel_y0(x)
    assert abs(wronskian - 2.0 / (math.pi * x)) < 1e-8


def ode_residual(func, x, sign, h=1e-3):
    f = func(x)
    d1 = central_derivative(func, x, h)
    d2 = (func(x + h) - 2.0 * f + func(x - h)) / (h * h)
    residual = d2 + d1 / x + sign * f
    return np.abs(residual) / (np.abs(d2) + np.abs(d1 / x) + np.abs(f))


def test_j0_solves_bessel_equation():
    x = np.array([0.5, 1.2, 2.4, 3.9, 5.5, 7.0, 9.5, 13.0, 21.0])
    assert np.all(ode_residual(bessel_j0, x, +1.0) < 1e-6)
    assert np.all(ode_residual(bessel_y0, x, +1.0) < 1e-6)


def test_k0_solves_modified_bessel_equation():
    x = np.array([0.3, 0.8, 1.5, 3.0, 5.0, 9.0])
    assert np.all(ode_residual(macdonald_k0, x, -1.0) < 1e-6)
