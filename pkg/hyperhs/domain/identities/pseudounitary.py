"""
Checks on the hyperbolic domain R = T^{-1} P T, T in U(1,1).

At n1 = n2 = 1 the boost T = [[cosh t, e^{i phi} sinh t], [e^{-i phi} sinh t, cosh t]]
gives Tr(Lambda R) = (p1+p2)(l1+l2)/2 + (p1-p2)(l1-l2) cosh(2t)/2, independent of phi,
so the coset integral reduces to one oscillatory integral in c = cosh 2t over [1, inf).
"""

import math
from typing import Any, Dict, Optional, Sequence

import numpy as np
from loguru import logger

from hyperhs.adapters import IdentityCheck
from hyperhs.domain.linalg import Signature, as_complex_matrix, signature_matrix, t_diagonalize
from hyperhs.domain.quadrature import DampingSchedule, IntegralEstimate, damped_oscillatory, gauss_hermite_rule
from hyperhs.domain.report import IdentityReport, RunSettings, Stopwatch, build_report
from hyperhs.exceptions import ConstraintViolation, DegenerateSpectrum, DimensionMismatch, DomainError

U11 = Signature(1, 1)
DH_ID = "dh_u11"
HS_EPS_ID = "hs_eps"
EPS_SCAN_ID = "eps_scan"

DH_TOLERANCE = 1e-3
HS_EPS_TOLERANCE = 2e-2
EPS_SLOPE_TOLERANCE = 0.05
DH_MIN_GAP = 1e-6

# finer than the generic schedule: node frequencies (p1-p2)(l1-l2)/2 get small near the diagonal
HS_EPS_DELTAS = (0.05, 0.025, 0.0125, 0.00625)
HERMITE_ORDER = 40
NILPOTENT_A_PLUS = np.array([[1.0, -1.0], [-1.0, 1.0]])


def u11_boost(theta: float, phi: float) -> np.ndarray:
    ch, sh = math.cosh(theta), math.sinh(theta)
    return np.array([[ch, np.exp(1j * phi) * sh], [np.exp(-1j * phi) * sh, ch]])


def pruisken_u11_point(p: Sequence[float], theta: float, phi: float) -> np.ndarray:
    """R = T^{-1} diag(p) T, with T^{-1} = L T^dagger L."""
    t = u11_boost(theta, phi)
    L = signature_matrix(U11)
    return L @ t.conj().T @ L @ np.diag(np.asarray(p, dtype=complex)) @ t


def u11_measure_density(p1: float, p2: float, theta: float) -> float:
    """Flat measure dR11 dR22 d^2R12 in (p1, p2, theta, phi): (p1-p2)^2 sinh(2 theta) / 2."""
    return 0.5 * (p1 - p2) ** 2 * math.sinh(2.0 * theta)


def _check_spectra(p: np.ndarray, lam: np.ndarray) -> None:
    if p.size != 2 or lam.size != 2:
        raise DimensionMismatch("U(1,1) checks need two-entry p and lambda")
    if not lam[0] > 0 > lam[1]:
        raise ConstraintViolation(f"lambda must satisfy l1 > 0 > l2, got {lam.tolist()}")


def dh_coset_integral(p: np.ndarray, lam: np.ndarray, schedule: DampingSchedule,
                      target_tol: float = 1e-4) -> IntegralEstimate:
    """
    int_0^inf sinh(2t) dt int_0^{2pi} dphi exp(-i Tr[T^{-1} P T Lambda]).

    The footnote shift P -> diag(p1 - i delta, p2 + i delta) supplies the
    damping exp(-delta (l1 - l2) c).
    """
    s = (p[0] + p[1]) * (lam[0] + lam[1]) / 2.0
    w = (p[0] - p[1]) * (lam[0] - lam[1]) / 2.0
    gap = lam[0] - lam[1]
    prefactor = math.pi * np.exp(-1j * s)

    return damped_oscillatory(
        lambda c: prefactor * np.exp(-1j * w * c),
        schedule,
        lambda delta, c: np.exp(-delta * gap * c),
        a=1.0,
        abs_tol=1e-10,
        target_tol=target_tol,
        scale=math.pi,
        relative=True,
    )


def dh_rhs(p: np.ndarray, lam: np.ndarray) -> complex:
    return complex(np.exp(-1j * (p[0] * lam[0] + p[1] * lam[1])) / ((p[0] - p[1]) * (lam[0] - lam[1])))


def verify_dh_coset_u11(p, lam, settings: Optional[RunSettings] = None,
                        anchor_p=(1.0, -1.0), anchor_lam=(1.0, -1.0)) -> IdentityReport:
    """Localization formula for the U(1,1) coset integral, constant fitted at the anchor spectra."""
    settings = settings or RunSettings()
    watch = Stopwatch()
    p = np.asarray(p, dtype=float)
    lam = np.asarray(lam, dtype=float)
    _check_spectra(p, lam)
    if abs(p[0] - p[1]) <= DH_MIN_GAP:
        raise DegenerateSpectrum(f"p1 - p2 = {p[0] - p[1]:.2e} makes Delta[P] vanish")
    tol = settings.tol(DH_TOLERANCE)
    schedule = settings.schedule()

    ap, al = np.asarray(anchor_p, dtype=float), np.asarray(anchor_lam, dtype=float)
    anchor_est = dh_coset_integral(ap, al, schedule, target_tol=tol)
    const_fit = anchor_est.value / dh_rhs(ap, al)

    est = dh_coset_integral(p, lam, schedule, target_tol=tol)
    rhs = dh_rhs(p, lam)
    logger.debug(f"dh_u11 p={p.tolist()} lambda={lam.tolist()} lhs={est.value} const={const_fit}")
    return build_report(
        DH_ID, {"p": p, "lambda": lam}, est.value, rhs, const_fit, tol, settings, watch,
        stderr=est.stderr,
        anchor={"p": ap, "lambda": al},
        details={"exact_constant": -2j * math.pi, "extrapolation_residual": est.stderr,
                 "damped_value": est.diagnostics.get("damped_last")},
    )


def hs_eps_integral(lam: np.ndarray, schedule: DampingSchedule, order: int = HERMITE_ORDER,
                    target_tol: float = 1e-3) -> IntegralEstimate:
    """
    int DR exp(-Tr R^2 / 2 - i Tr Lambda R) over the U(1,1) domain,
    DR = (p1-p2)^2 sinh(2t) / 2 dp1 dp2 dt dphi.

    (p1, p2) run over a Gauss-Hermite grid for exp(-p^2/2); the phi integral
    gives 2 pi and sinh(2t) dt = dc / 2, so the c-integrand sums pi W_n exp(-i S_n/2 - i w_n c)
    over the grid nodes. Diagonal nodes carry zero weight and are dropped.
    """
    t, w = gauss_hermite_rule(order)
    t, w = t * math.sqrt(2.0), w * math.sqrt(2.0)
    p1, p2 = np.meshgrid(t, t, indexing="ij")
    weights = np.outer(w, w) * 0.5 * (p1 - p2) ** 2
    keep = weights > 1e-18 * weights.max()
    p1, p2, weights = p1[keep], p2[keep], weights[keep]

    s = (p1 + p2) * (lam[0] + lam[1]) / 2.0
    freq = (p1 - p2) * (lam[0] - lam[1]) / 2.0
    amplitudes = math.pi * weights * np.exp(-1j * s)
    gap = lam[0] - lam[1]
    logger.debug(f"hs_eps grid nodes kept: {weights.size}")

    def integrand(c: np.ndarray) -> np.ndarray:
        return np.exp(-1j * np.outer(c, freq)) @ amplitudes

    return damped_oscillatory(
        integrand,
        schedule,
        lambda delta, c: np.exp(-delta * gap * c),
        a=1.0,
        abs_tol=1e-8,
        target_tol=target_tol,
        scale=float(np.sum(np.abs(amplitudes))),
        relative=True,
    )


def _hs_eps_terms(a_plus: np.ndarray, eps: float):
    if a_plus.shape != (2, 2):
        raise DimensionMismatch(f"hs_eps supports 2x2 A_+, got {a_plus.shape}")
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    L = signature_matrix(U11)
    a = a_plus @ L
    tr_la = complex(np.trace(L @ a))
    tr_a2 = complex(np.trace(a @ a))
    spectrum = t_diagonalize(a_plus + eps * np.eye(2), U11).spectrum
    return tr_la, tr_a2, spectrum


def hs_eps_lhs(a_plus: np.ndarray, eps: float, schedule: DampingSchedule, target_tol: float) -> IntegralEstimate:
    """e^{eps^2} times the U(1,1) integral at the pseudo-spectrum of (A_+ + eps) L."""
    _, _, spectrum = _hs_eps_terms(a_plus, eps)
    est = hs_eps_integral(spectrum, schedule, target_tol=target_tol)
    factor = math.exp(eps * eps)
    return IntegralEstimate(value=factor * est.value, stderr=factor * est.stderr, n_evals=est.n_evals,
                            diagnostics={"lambda_1": float(spectrum[0]), "lambda_2": float(spectrum[1])})


def hs_eps_rhs(a_plus: np.ndarray, eps: float) -> complex:
    tr_la, tr_a2, _ = _hs_eps_terms(a_plus, eps)
    return complex(np.exp(-eps * tr_la - 0.5 * tr_a2))


def verify_pseudounitary_hs_11(a_plus, eps: Optional[float] = None,
                               settings: Optional[RunSettings] = None) -> IdentityReport:
    """
    int DR exp(-Tr(R + i eps L)^2 / 2 - i Tr A R) = C exp(-eps Tr LA - Tr A^2 / 2), A = A_+ L,
    with C fixed once at A_+ = identity and the same eps.
    """
    settings = settings or RunSettings()
    watch = Stopwatch()
    eps = eps if eps is not None else (settings.eps if settings.eps is not None else 0.5)
    a_plus = as_complex_matrix(a_plus)
    tol = settings.tol(HS_EPS_TOLERANCE)
    schedule = settings.schedule(HS_EPS_DELTAS)

    anchor = np.eye(2, dtype=complex)
    anchor_est = hs_eps_lhs(anchor, eps, schedule, tol / 4)
    const_fit = anchor_est.value / hs_eps_rhs(anchor, eps)

    est = hs_eps_lhs(a_plus, eps, schedule, tol / 4)
    rhs = hs_eps_rhs(a_plus, eps)
    tr_la, tr_a2, _ = _hs_eps_terms(a_plus, eps)
    return build_report(
        HS_EPS_ID, {"a_plus": a_plus, "eps": eps}, est.value, rhs, const_fit, tol, settings, watch,
        stderr=est.stderr,
        anchor={"a_plus": anchor, "eps": eps},
        details={"tr_la": tr_la, "tr_a2": tr_a2, "exact_constant": -2.0 * math.pi ** 2, **est.diagnostics},
    )


def verify_eps_dependence(a_plus, eps_values: Sequence[float] = (0.25, 0.5, 1.0),
                          settings: Optional[RunSettings] = None) -> IdentityReport:
    """Regress log|lhs| on eps; the slope must equal -Tr LA within 5%."""
    settings = settings or RunSettings()
    watch = Stopwatch()
    a_plus = as_complex_matrix(a_plus)
    eps_values = np.asarray(eps_values, dtype=float)
    if eps_values.size < 2:
        raise DomainError("eps scan needs at least two eps values")
    schedule = settings.schedule(HS_EPS_DELTAS)
    tol = settings.tol(EPS_SLOPE_TOLERANCE)

    log_lhs = []
    for eps in eps_values:
        est = hs_eps_lhs(a_plus, float(eps), schedule, HS_EPS_TOLERANCE / 4)
        log_lhs.append(math.log(abs(est.value)))
        logger.debug(f"eps scan eps={eps:g} |lhs|={abs(est.value):.6g}")
    slope, intercept = np.polyfit(eps_values, log_lhs, 1)
    expected = -float(np.real(np.trace(signature_matrix(U11) @ a_plus @ signature_matrix(U11))))
    return build_report(
        EPS_SCAN_ID, {"a_plus": a_plus, "eps_values": eps_values}, slope, expected, 1.0, tol, settings, watch,
        details={"eps_values": eps_values, "log_abs_lhs": log_lhs, "intercept": intercept},
    )


class DHCosetCheck(IdentityCheck):
    identity_id = DH_ID
    description = "Localization formula for the U(1,1) coset integral"

    def run(self, params: Dict[str, Any], settings: RunSettings) -> IdentityReport:
        return verify_dh_coset_u11(params.get("p", [2.0, -0.5]), params.get("lambda", [1.5, -0.8]), settings)


class HSEpsCheck(IdentityCheck):
    identity_id = HS_EPS_ID
    description = "eps-modified pseudounitary Hubbard-Stratonovich identity at n1 = n2 = 1"

    def run(self, params: Dict[str, Any], settings: RunSettings) -> IdentityReport:
        a_plus = NILPOTENT_A_PLUS if params.get("nilpotent") else params.get("a_plus", [[2.0, 0.5], [0.5, 1.0]])
        return verify_pseudounitary_hs_11(a_plus, params.get("eps"), settings)


class EpsScanCheck(IdentityCheck):
    identity_id = EPS_SCAN_ID
    description = "eps-dependence exp(-eps Tr LA) of the pseudounitary identity"

    def run(self, params: Dict[str, Any], settings: RunSettings) -> IdentityReport:
        return verify_eps_dependence(params.get("a_plus", [[2.0, 0.5], [0.5, 1.0]]),
                                     params.get("eps_values", (0.25, 0.5, 1.0)), settings)
