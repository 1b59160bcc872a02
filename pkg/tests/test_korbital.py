import math

import numpy as np
import pytest
from scipy import special

from hyperhs.domain.identities.korbital_checks import (
    InghamSiegelCheck,
    KOrbitalCrossvalCheck,
    SaddlePointCheck,
    ingham_siegel_check,
    verify_saddle_point,
)
from hyperhs.domain.korbital import (
    ModelParams,
    _log_site_weight,
    calibrate_constant,
    exact_site_constant,
    neighbour_trace,
    radial_s_integral,
    saddle_point,
    site_action,
    stationarity_residual,
    tail_share,
    z_integral_rep,
    z_moment_mc,
)
from hyperhs.domain.quadrature import McConfig
from hyperhs.domain.report import RunSettings
from hyperhs.domain.sampling import VarianceProfile
from hyperhs.exceptions import DomainError, OutsideBand

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]])
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


def q_matrix(u, v, t, phi):
    s = math.sqrt(1.0 - t * t)
    n_sigma = s * math.cos(phi) * SIGMA_X + s * math.sin(phi) * SIGMA_Y + t * SIGMA_Z
    return math.sqrt(u) * (math.cosh(v) * np.eye(2) + math.sinh(v) * n_sigma)


@pytest.mark.parametrize("J,E", [(1.0, 1.0), (1.0, 0.0), (2.0, -1.5), (0.5, 1.2)])
def test_saddle_point_is_stationary(J, E):
    p0 = saddle_point(J, E)
    assert stationarity_residual(p0, J, E) < 1e-12
    assert p0[0, 0].real > 0 > p0[1, 1].real


def test_saddle_outside_band():
    with pytest.raises(OutsideBand):
        saddle_point(1.0, 2.5)
    with pytest.raises(DomainError):
        saddle_point(-1.0, 0.0)


def test_saddle_grid_report(settings):
    report = SaddlePointCheck().run({}, settings)
    assert report.passed
    assert report.details["grid_max_residual"] < 1e-12
    assert verify_saddle_point(1.5, -0.4, settings).passed


def test_site_action_at_identity():
    assert site_action(np.eye(2), 1.0, 0.0) == pytest.approx(1.0)


def test_radial_s_integral_closed_form():
    c = np.array([1.0 + 2.0j, -0.5 - 1.0j, 2.0 - 0.3j, -1.0 + 0.1j])
    for k in (3, 4):
        expected = -(c ** (1 - k)) / (k - 1)
        np.testing.assert_allclose(radial_s_integral(c, k), expected, rtol=1e-8)


def test_neighbour_trace_against_matrices():
    rng = np.random.default_rng(3)
    draw = {
        "u": rng.uniform(0.2, 2.0, size=(5, 2)),
        "v": rng.normal(0.0, 1.0, size=(5, 2)),
        "t": rng.uniform(-1.0, 1.0, size=(5, 2)),
        "phi": rng.uniform(0.0, 2.0 * math.pi, size=(5, 2)),
    }
    got = neighbour_trace(draw, 0, 1)
    for s in range(5):
        qi = q_matrix(*(draw[key][s, 0] for key in ("u", "v", "t", "phi")))
        qj = q_matrix(*(draw[key][s, 1] for key in ("u", "v", "t", "phi")))
        assert got[s] == pytest.approx(np.trace(qi @ SIGMA_Z @ qj @ SIGMA_Z).real, rel=1e-10)


def test_site_weight_against_matrices():
    u, v, t, phi = 0.8, 0.6, -0.3, 1.1
    k, J, E, eta = 4, 1.2, 0.5, 2.0
    q = q_matrix(u, v, t, phi)
    tr_qlql = np.trace(q @ SIGMA_Z @ q @ SIGMA_Z).real
    tr_ql = np.trace(q @ SIGMA_Z).real
    det_q = np.linalg.det(q).real
    measure = 4.0 * u * math.sinh(v) ** 2
    expected = ((k - 2) * math.log(det_q) + math.log(measure) - 0.5 * k * J * tr_qlql - eta * np.trace(q).real)
    log_mod, phase = _log_site_weight(u, v, t, k, J, E, eta)
    assert det_q == pytest.approx(u)
    assert log_mod == pytest.approx(expected, rel=1e-12)
    assert phase == pytest.approx(k * E * tr_ql, rel=1e-12)


def test_tail_share():
    assert tail_share(np.ones(1000)) == pytest.approx(1e-3)
    values = np.concatenate([np.ones(999), [1001.0]])
    assert tail_share(values) == pytest.approx(1001.0 / 2000.0)


def test_model_validation():
    with pytest.raises(DomainError):
        ModelParams(eta=0.0)
    with pytest.raises(DomainError):
        z_moment_mc(ModelParams(n=2), VarianceProfile(J=1.0, V=0.0, k=3, r=1), McConfig(samples=10))
    with pytest.raises(DomainError):
        z_integral_rep(ModelParams(n=1), VarianceProfile(J=1.0, V=0.0, k=4, r=3), McConfig(samples=10))


def test_representation_is_real_and_positive():
    est = z_integral_rep(ModelParams(E=0.5, eta=1.0), VarianceProfile(J=1.0, V=0.0, k=4, r=1), McConfig())
    assert est.value.real > 0
    assert abs(est.value.imag) < 1e-8 * est.value.real


def test_large_eta_limit():
    params = ModelParams(eta=100.0)
    profile = VarianceProfile(J=1.0, V=0.0, k=4, r=1)
    est = z_moment_mc(params, profile, McConfig(samples=20_000, seed=5))
    ratio = est.value.real * (params.eta / profile.k) ** (2 * profile.size)
    # 1 - (k/eta)^2 E Tr H^2 with E Tr H^2 = N^2 J / k
    assert ratio == pytest.approx(1.0 - 0.0064, abs=1.5e-3)


@pytest.mark.slow
def test_uncoupled_sites_factorize():
    params = ModelParams(eta=2.0)
    single = z_moment_mc(params, VarianceProfile(J=1.0, V=0.0, k=4, r=1), McConfig(samples=400_000, seed=1))
    pair = z_moment_mc(params, VarianceProfile(J=1.0, V=0.0, k=4, r=2), McConfig(samples=400_000, seed=2))
    assert pair.value.real == pytest.approx(single.value.real ** 2, rel=0.02)


@pytest.mark.slow
@pytest.mark.parametrize("point", [{"eta": 2.0}, {"E": 0.5}])
def test_crossvalidation(point):
    report = KOrbitalCrossvalCheck().run(point, RunSettings(seed=17, samples=400_000))
    assert report.passed, (report.ratio, report.stderr)


@pytest.mark.slow
def test_ingham_siegel_cone():
    settings = RunSettings()
    inside = InghamSiegelCheck().run({"q": [2.0, 0.5]}, settings)
    assert inside.passed, inside.ratio
    outside = InghamSiegelCheck().run({"q": [1.0, -0.5]}, settings)
    assert outside.details["branch"] == "theta_zero"
    assert outside.passed, outside.ratio


def test_ingham_siegel_input_validation(settings):
    with pytest.raises(DomainError):
        ingham_siegel_check([[1.0, 0.2], [0.2, 1.0]], settings=settings)
    with pytest.raises(DomainError):
        ingham_siegel_check([1.0, 0.0], settings=settings)
    with pytest.raises(DomainError):
        ingham_siegel_check([1.0, 2.0], k=2, settings=settings)


def reference_case(oracles):
    ref = oracles["korbital_reference"]
    p = ref["params"]
    params = ModelParams(E=p["E"], eta=p["eta"])
    profile = VarianceProfile(J=p["J"], V=p["V"], k=p["k"], r=p["r"])
    return params, profile, ref["z"]


def test_reference_value_closed_form(oracles):
    m0 = math.exp(0.125) * math.sqrt(2.0 * math.pi) * special.erfc(1.0 / math.sqrt(8.0))
    z = (512.0 * m0 - 4.0 * (5.0 * m0 - 4.0) ** 2 - 32.0 * (4.0 - m0) ** 2 - 128.0 * m0 ** 2) / 12.0
    assert z == pytest.approx(oracles["korbital_reference"]["z"], rel=1e-8)


def test_exact_site_constant():
    assert exact_site_constant(4) == pytest.approx(4.0 ** 8 / (8.0 * math.pi * 6.0 * 2.0), rel=1e-12)
    with pytest.raises(DomainError):
        exact_site_constant(1)


def test_representation_reproduces_reference(oracles):
    params, profile, z = reference_case(oracles)
    rep = z_integral_rep(params, profile, McConfig())
    assert np.isfinite(rep.value)
    assert exact_site_constant(profile.k) * rep.value.real == pytest.approx(z, rel=5e-3)


@pytest.mark.slow
def test_reference_moment_monte_carlo(oracles):
    params, profile, z = reference_case(oracles)
    est = z_moment_mc(params, profile, McConfig(samples=1_000_000, seed=29))
    assert abs(est.value.real - z) < 4.0 * est.stderr + 2e-3 * z


def test_moment_decreases_with_eta():
    profile = VarianceProfile(J=1.0, V=0.0, k=4, r=1)
    cfg = McConfig(samples=20_000, seed=8)
    values = [z_moment_mc(ModelParams(eta=eta), profile, cfg).value.real for eta in (0.5, 1.0, 2.0, 4.0)]
    assert all(a > b for a, b in zip(values, values[1:])), values


def test_representation_decreases_with_eta():
    profile = VarianceProfile(J=1.0, V=0.0, k=4, r=1)
    values = [z_integral_rep(ModelParams(eta=eta), profile, McConfig()).value.real for eta in (0.5, 1.0, 2.0)]
    assert all(a > b > 0 for a, b in zip(values, values[1:])), values


@pytest.mark.slow
def test_calibrated_constant_matches_exact():
    profile = VarianceProfile(J=1.0, V=0.0, k=4, r=1)
    c, c_err = calibrate_constant(profile, McConfig(samples=1_000_000, seed=31))
    exact = exact_site_constant(4)
    assert abs(c - exact) < 4.0 * c_err + 5e-3 * exact


@pytest.mark.slow
def test_constant_refit_is_point_independent():
    profile = VarianceProfile(J=1.0, V=0.0, k=4, r=1)
    c, c_err = calibrate_constant(profile, McConfig(samples=400_000, seed=41))
    for i, (E, eta) in enumerate([(0.0, 2.0), (0.5, 1.0), (0.0, 1.5)]):
        params = ModelParams(E=E, eta=eta)
        mc = z_moment_mc(params, profile, McConfig(samples=400_000, seed=42 + i))
        rep = z_integral_rep(params, profile, McConfig())
        refit = mc.value.real / rep.value.real
        refit_err = abs(refit) * mc.stderr / abs(mc.value)
        assert abs(refit - c) < 3.0 * math.hypot(refit_err, c_err) + 2e-3 * c, (E, eta, refit, c)


@pytest.mark.slow
def test_crossvalidation_coupled_pair():
    point = {"r": 2, "V": 0.5, "eta": 1.0}
    report = KOrbitalCrossvalCheck().run(point, RunSettings(seed=17, samples=1_000_000))
    assert report.passed, (report.ratio, report.stderr)
    assert report.details["site_constant"] == pytest.approx(report.details["exact_site_constant"], rel=0.05)
