import math

import numpy as np
import pytest
from scipy import special

from hyperhs.domain.identities.pseudoorthogonal import (
    EXACT_CONSTANT,
    ModulusControlCheck,
    negative_control_modulus_measure,
    ortho_reduction,
    p_plus_integral,
    pseudoorthogonal_integral,
    tr_a_squared,
    verify_pseudoorthogonal_2x2,
)
from hyperhs.domain.quadrature import adaptive_1d
from hyperhs.domain.sampling import random_ortho_triple
from hyperhs.exceptions import ConstraintViolation


def test_exact_constant(oracles):
    assert EXACT_CONSTANT == pytest.approx(complex(*oracles["po5_constant"]))


def test_random_triples_reproduce_exact_constant(rng, settings):
    for _ in range(8):
        a1, a2, a = random_ortho_triple(rng)
        report = verify_pseudoorthogonal_2x2(a1, a2, a, settings)
        assert report.passed, (a1, a2, a, report.ratio)
        assert abs(report.ratio - 1.0) < 1e-6


@pytest.mark.slow
def test_twenty_triples(settings):
    from hyperhs.domain.sampling import RngStream, rng_generator

    rng = rng_generator(RngStream(99))
    for _ in range(20):
        assert verify_pseudoorthogonal_2x2(*random_ortho_triple(rng), settings).passed


def test_y0_part_cancels_with_signed_measure():
    parts = pseudoorthogonal_integral(2.0, 1.0, 0.5)
    assert abs(parts["y0_component"]) < 1e-8 * abs(parts["value"])


def test_reduction_amplitude():
    red = ortho_reduction(2.0, 1.0, 0.5, 1.3)
    t = 0.37
    lhs = red.alpha * math.cosh(2 * t) + red.beta * math.sinh(2 * t)
    assert lhs == pytest.approx(red.u * math.cosh(2 * t + red.psi))


def test_p_plus_integral_against_quadrature():
    est = adaptive_1d(lambda p: np.exp(-p * p / 4.0 - 0.5j * p), -30.0, 30.0, abs_tol=1e-13)
    assert p_plus_integral(2.0, 1.0) == pytest.approx(est.value, abs=1e-10)


def test_constraints():
    with pytest.raises(ConstraintViolation):
        verify_pseudoorthogonal_2x2(1.0, 1.0, 1.0)


def test_modulus_measure_closed_form():
    parts = pseudoorthogonal_integral(2.0, 1.0, 0.5, modulus=True)
    s2 = parts["s_a"] ** 2
    expected = -4.0 * math.sqrt(math.pi) * math.exp(-0.5 * tr_a_squared(2.0, 1.0, 0.5)) * special.expi(s2)
    assert parts["value"] == pytest.approx(expected, rel=1e-6)


def test_modulus_control_fails_the_identity(settings, oracles):
    report = negative_control_modulus_measure(2.0, 1.0, 0.5, settings)
    assert report.passed
    assert report.details["real_valued"]
    assert report.details["expected_failure"]
    assert report.ratio.real == pytest.approx(oracles["expi"]["2.0"] / oracles["expi"]["1.0"], rel=1e-6)


def test_modulus_ratios_vary_across_triples(settings):
    triples = [(2.0, 1.0, 0.5), (1.5, 1.5, 0.2), (3.0, 0.8, -0.4), (0.6, 2.2, 0.9), (1.8, 1.2, 0.0)]
    ratios = [ModulusControlCheck().run(dict(zip(("a1", "a2", "a"), t)), settings).ratio.real for t in triples]
    assert max(ratios) / min(ratios) > 1.1
