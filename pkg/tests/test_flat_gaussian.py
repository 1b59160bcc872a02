import math

import numpy as np
import pytest

from hyperhs.domain.identities.flat_gaussian import (
    ChiralFlatCheck,
    HermitianHSCheck,
    verify_chiral_flat,
    verify_hermitian_hs,
)
from hyperhs.exceptions import DimensionMismatch


@pytest.mark.parametrize("a", [[["1+1j"]], [["0.5-0.2j", "0.3"], ["-0.3j", "0.2+0.4j"]]])
def test_chiral_flat(settings, a):
    report = ChiralFlatCheck().run({"a": a}, settings)
    assert report.passed
    n = len(a)
    assert report.const_fit == pytest.approx(math.pi ** (n * n), rel=1e-10)


def test_hermitian_hs_n1(settings):
    report = verify_hermitian_hs(np.array([[0.8]]), settings)
    assert report.passed
    assert report.const_fit == pytest.approx(math.sqrt(2.0 * math.pi), rel=1e-10)


def test_hermitian_hs_n2(settings, oracles):
    report = HermitianHSCheck().run({}, settings)
    assert report.passed
    assert report.const_fit == pytest.approx(oracles["hermitian_hs_constant_n2"], rel=1e-10)


def test_size_limits(settings):
    with pytest.raises(DimensionMismatch):
        verify_chiral_flat(np.zeros((3, 3)), settings)
