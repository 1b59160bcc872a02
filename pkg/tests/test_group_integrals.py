import math

import numpy as np
import pytest
from scipy import special

from hyperhs.domain.identities.group_integrals import (
    MacdonaldCheck,
    bessel_determinant_rhs,
    macdonald_1d,
    verify_guhr_wettig,
    verify_matrix_macdonald,
)
from hyperhs.domain.report import RunSettings
from hyperhs.exceptions import DegenerateSpectrum, DimensionMismatch, DomainError


@pytest.mark.parametrize("xy", [0.1, 0.5, 1.0, 4.0])
def test_macdonald_1d_reduction(xy):
    assert macdonald_1d(xy).value.real == pytest.approx(2.0 * math.pi * special.k0(xy), rel=1e-10)


def test_macdonald_n1_grid(settings):
    for x in (0.5, 1.0, 2.0, 3.0):
        for y in (0.25, 0.5, 1.5, 2.0):
            report = verify_matrix_macdonald([x], [y], settings)
            assert report.passed, (x, y, report.ratio)
            assert report.const_fit.real == pytest.approx(2.0 * math.pi, rel=1e-8)


def test_bessel_determinant_is_symmetric():
    p, a = np.array([1.2, 0.5]), np.array([1.0, 0.4])
    assert bessel_determinant_rhs(p, a) == pytest.approx(bessel_determinant_rhs(a, p), rel=1e-12)


def test_input_validation(settings):
    with pytest.raises(DimensionMismatch):
        verify_guhr_wettig([1.0, 0.5], [1.0, 0.5, 0.2], settings)
    with pytest.raises(DomainError):
        verify_guhr_wettig([1.0, -0.5], [1.0, 0.4], settings)
    with pytest.raises(DegenerateSpectrum):
        verify_matrix_macdonald([1.0, 1.0], [0.5, 0.2], settings)


@pytest.mark.slow
def test_guhr_wettig_monte_carlo():
    report = verify_guhr_wettig([1.2, 0.5], [1.0, 0.4], RunSettings(seed=7, samples=1_000_000))
    assert report.passed, report.ratio
    assert report.stderr > 0


@pytest.mark.slow
def test_macdonald_n2_weighted_monte_carlo():
    report = MacdonaldCheck().run({"x": [1.5, 0.6], "y": [0.9, 0.3]}, RunSettings(seed=11, samples=1_000_000))
    assert report.passed, report.ratio
    assert report.details["ess_fraction"] >= 0.05


@pytest.mark.slow
def test_guhr_wettig_small_argument_limit():
    report = verify_guhr_wettig([1.2, 0.5], [1e-3, 2e-3], RunSettings(seed=5, samples=1_000_000))
    assert abs(report.lhs - 1.0) < 1e-4
    assert report.passed, report.ratio
