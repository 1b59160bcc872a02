"""Suite checks for the k-orbital pipeline: integral representation, Ingham-Siegel factor, saddle point."""

from typing import Any, Dict, Optional

import numpy as np
from loguru import logger

from hyperhs.adapters import IdentityCheck
from hyperhs.domain.korbital import (
    ModelParams,
    calibrate_constant,
    exact_site_constant,
    ingham_siegel_integral,
    ingham_siegel_rhs,
    saddle_point,
    site_action,
    stationarity_residual,
    z_integral_rep,
    z_moment_mc,
)
from hyperhs.domain.report import IdentityReport, RunSettings, Stopwatch, build_report
from hyperhs.domain.sampling import VarianceProfile
from hyperhs.exceptions import DimensionMismatch, DomainError

CROSSVAL_ID = "intrep"
INGHAM_SIEGEL_ID = "ingham_siegel"
SADDLE_ID = "saddle"
CROSSVAL_TOLERANCE = 1e-3
INGHAM_SIEGEL_TOLERANCE = 1e-2
SADDLE_TOLERANCE = 1e-12
DEFAULT_SAMPLES = 200_000


def verify_korbital_crossval(params: ModelParams, profile: VarianceProfile,
                             settings: Optional[RunSettings] = None) -> IdentityReport:
    """
    Calibrate the per-site constant at (J, V=0, E=0, eta=1, r=1), then compare
    c^r * z_integral_rep with z_moment_mc at the requested point within 3 sigma.
    """
    settings = settings or RunSettings()
    watch = Stopwatch()
    cfg = settings.mc_config(DEFAULT_SAMPLES)
    c, c_err = calibrate_constant(profile, settings.mc_config(DEFAULT_SAMPLES, seed_offset=1))
    mc = z_moment_mc(params, profile, cfg)
    rep = z_integral_rep(params, profile, settings.mc_config(DEFAULT_SAMPLES, seed_offset=2))
    const_fit = c ** profile.r
    rhs = rep.value
    # relative errors of the moment, the representation and the calibrated constant
    rel = np.sqrt((mc.stderr / abs(mc.value)) ** 2 + (rep.stderr / abs(rep.value)) ** 2
                  + (profile.r * c_err / abs(c)) ** 2)
    stderr = float(rel * abs(const_fit * rhs))
    logger.info(f"intrep {params} {profile}: mc={mc.value.real:.6g} rep={(const_fit * rhs).real:.6g}")
    return build_report(
        CROSSVAL_ID,
        {"n": params.n, "E": params.E, "eta": params.eta, "J": profile.J, "V": profile.V, "k": profile.k, "r": profile.r},
        mc.value, rhs, const_fit, settings.tol(CROSSVAL_TOLERANCE), settings, watch, stderr=stderr,
        anchor={"J": profile.J, "V": 0.0, "E": 0.0, "eta": 1.0, "k": profile.k, "r": 1},
        details={"site_constant": c, "site_constant_stderr": c_err,
                 "exact_site_constant": exact_site_constant(profile.k), "mc_stderr": mc.stderr,
                 "rep_stderr": rep.stderr, "tail_share": mc.diagnostics.get("tail_share", 0.0)},
    )


def _diagonal_q(q) -> tuple:
    arr = np.asarray(q, dtype=float)
    if arr.ndim == 2:
        if arr.shape != (2, 2):
            raise DimensionMismatch(f"q must be 2 x 2, got {arr.shape}")
        if abs(arr[0, 1]) > 0 or abs(arr[1, 0]) > 0:
            raise DomainError("the Ingham-Siegel check takes diagonal q")
        arr = np.diag(arr)
    if arr.shape != (2,):
        raise DimensionMismatch(f"q must hold two diagonal entries, got shape {arr.shape}")
    if np.any(arr == 0):
        raise DomainError("q must be non-singular")
    return float(arr[0]), float(arr[1])


def ingham_siegel_check(q, k: int = 3, params: ModelParams = ModelParams(),
                        settings: Optional[RunSettings] = None, anchor_q=(1.0, 1.0)) -> IdentityReport:
    """
    int dK det(K - E L - i eta/k)^{-k} e^{i Tr K q} against theta(q) (det q)^{k-2} e^{i Tr q (E L + i eta/k)}.

    A q with a negative eigenvalue passes when |I(q)| / |I(anchor)| < tol.
    """
    settings = settings or RunSettings()
    watch = Stopwatch()
    q = _diagonal_q(q)
    eps = params.eta / k
    tol = settings.tol(INGHAM_SIEGEL_TOLERANCE)

    anchor_lhs = ingham_siegel_integral(anchor_q, k, params.E, eps)
    const_fit = anchor_lhs / ingham_siegel_rhs(anchor_q, k, params.E, eps)
    lhs = ingham_siegel_integral(q, k, params.E, eps)
    rhs = ingham_siegel_rhs(q, k, params.E, eps)
    report_params = {"q": list(q), "k": k, "E": params.E, "eta": params.eta}
    anchor = {"q": list(anchor_q)}

    if rhs == 0:
        ratio = lhs / anchor_lhs
        logger.debug(f"ingham_siegel q={q} outside the cone: |I(q)/I(anchor)| = {abs(ratio):.3e}")
        return build_report(INGHAM_SIEGEL_ID, report_params, lhs, rhs, const_fit, tol, settings, watch,
                            anchor=anchor, ratio=ratio, passed=bool(abs(ratio) < tol),
                            details={"branch": "theta_zero", "anchor_lhs": anchor_lhs})
    return build_report(INGHAM_SIEGEL_ID, report_params, lhs, rhs, const_fit, tol, settings, watch,
                        anchor=anchor, details={"branch": "positive", "anchor_lhs": anchor_lhs})


def verify_saddle_point(J: float, E: float, settings: Optional[RunSettings] = None,
                        grid_size: int = 10) -> IdentityReport:
    """Stationarity of the site action at P0 for (J, E) and across a grid_size x grid_size band grid."""
    settings = settings or RunSettings()
    watch = Stopwatch()
    tol = settings.tol(SADDLE_TOLERANCE)
    p0 = saddle_point(J, E)
    residual = stationarity_residual(p0, J, E)

    worst = residual
    for j in np.linspace(0.5, 2.0, grid_size):
        for e in np.linspace(-0.95, 0.95, grid_size) * 2.0 * np.sqrt(j):
            worst = max(worst, stationarity_residual(saddle_point(j, e), j, e))
    derivative = complex(J * p0[0, 0] - 1j * E - 1.0 / p0[0, 0])
    return build_report(
        SADDLE_ID, {"J": J, "E": E}, derivative, 0.0, 1.0, tol, settings, watch,
        ratio=complex(1.0 + worst), passed=bool(worst < tol),
        details={"p0_diagonal": np.diag(p0), "residual": residual, "grid_max_residual": worst,
                 "action": site_action(p0, J, E)},
    )


class KOrbitalCrossvalCheck(IdentityCheck):
    identity_id = CROSSVAL_ID
    description = "k-orbital determinant moment against its integral representation"

    def run(self, params: Dict[str, Any], settings: RunSettings) -> IdentityReport:
        model = ModelParams(n=int(params.get("n", 1)), E=float(params.get("E", 0.0)), eta=float(params.get("eta", 2.0)))
        profile = VarianceProfile(J=float(params.get("J", 1.0)), V=float(params.get("V", 0.0)),
                                  k=int(params.get("k", 4)), r=int(params.get("r", 1)))
        return verify_korbital_crossval(model, profile, settings)


class InghamSiegelCheck(IdentityCheck):
    identity_id = INGHAM_SIEGEL_ID
    description = "Ingham-Siegel integral over Hermitian 2 x 2 K"

    def run(self, params: Dict[str, Any], settings: RunSettings) -> IdentityReport:
        model = ModelParams(E=float(params.get("E", 0.0)), eta=float(params.get("eta", 1.0)))
        return ingham_siegel_check(params.get("q", [2.0, 0.5]), int(params.get("k", 3)), model, settings)


class SaddlePointCheck(IdentityCheck):
    identity_id = SADDLE_ID
    description = "Stationarity of the single-site action at P0"

    def run(self, params: Dict[str, Any], settings: RunSettings) -> IdentityReport:
        return verify_saddle_point(float(params.get("J", 1.0)), float(params.get("E", 1.0)), settings)
