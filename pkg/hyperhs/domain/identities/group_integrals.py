"""
Group integrals with Bessel-determinant closed forms: the two-sided unitary
integral behind det[J0(2 p_i a_j)] and the matrix Macdonald function over Gl(n, C).
"""

import math
from typing import Any, Dict, Optional

import numpy as np
from loguru import logger

from hyperhs.adapters import IdentityCheck
from hyperhs.domain.linalg import require_distinct, vandermonde
from hyperhs.domain.quadrature import (
    IntegralEstimate,
    McConfig,
    adaptive_1d,
    effective_sample_fraction,
    monte_carlo_values,
    summarize_samples,
)
from hyperhs.domain.report import IdentityReport, RunSettings, Stopwatch, build_report, ratio_stderr
from hyperhs.domain.sampling import GLInvariantSampler, HaarSampler, WeightedSample
from hyperhs.domain.specfun import bessel_j0, macdonald_k0
from hyperhs.exceptions import DimensionMismatch, DomainError, EffectiveSampleSizeTooLow

GUHR_WETTIG_ID = "guhr_wettig"
MACDONALD_ID = "macdonald"
MC_TOLERANCE = 0.05
MACDONALD_1D_TOLERANCE = 1e-8
MIN_GAP = 1e-6
MIN_ESS_FRACTION = 0.05
DEFAULT_SAMPLES = 200_000
PROPOSAL_SCALE = 0.7


def _positive_distinct(values, label: str, sizes) -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size not in sizes:
        raise DimensionMismatch(f"{label} must have size in {tuple(sizes)}, got {arr.size}")
    if np.any(arr <= 0):
        raise DomainError(f"{label} entries must be positive, got {arr.tolist()}")
    require_distinct(arr, MIN_GAP, label)
    return arr


def bessel_determinant_rhs(p: np.ndarray, a: np.ndarray) -> float:
    """det[J0(2 p_i a_j)] / (Delta(p^2) Delta(a^2))."""
    det = np.linalg.det(bessel_j0(2.0 * np.outer(p, a)))
    return float(det / (vandermonde(p * p) * vandermonde(a * a)))


def two_sided_unitary_mc(p: np.ndarray, a: np.ndarray, cfg: McConfig) -> IntegralEstimate:
    """E_{U,V} exp(-i Tr(P [U a V^dagger + V a U^dagger])) = E exp(-2 i Re Tr(P U a V^dagger))."""
    n = p.size

    def integrand(draw) -> np.ndarray:
        u, v = draw
        m = (u * a[None, None, :]) @ np.conj(np.swapaxes(v, -1, -2))
        trace = np.einsum("i,sii->s", p, m)
        return np.exp(-2j * trace.real)

    return summarize_samples(monte_carlo_values(integrand, HaarSampler(n, copies=2), cfg))


def verify_guhr_wettig(p, a, settings: Optional[RunSettings] = None,
                       anchor_p=(1.0, 0.3), anchor_a=(0.8, 0.2)) -> IdentityReport:
    """Monte Carlo over Haar(U) x Haar(V) against the Bessel determinant; pass within max(5%, 3 sigma)."""
    settings = settings or RunSettings()
    watch = Stopwatch()
    p = _positive_distinct(p, "p", (2, 3))
    a = _positive_distinct(a, "a", (2, 3))
    if p.size != a.size:
        raise DimensionMismatch(f"p and a differ in size: {p.size} vs {a.size}")
    tol = settings.tol(MC_TOLERANCE)

    ap = np.asarray(anchor_p, dtype=float)[: p.size] if p.size == len(anchor_p) else np.linspace(1.0, 0.3, p.size)
    aa = np.asarray(anchor_a, dtype=float)[: a.size] if a.size == len(anchor_a) else np.linspace(0.8, 0.2, a.size)
    anchor_est = two_sided_unitary_mc(ap, aa, settings.mc_config(DEFAULT_SAMPLES, seed_offset=1))
    const_fit = anchor_est.value / bessel_determinant_rhs(ap, aa)

    est = two_sided_unitary_mc(p, a, settings.mc_config(DEFAULT_SAMPLES))
    rhs = bessel_determinant_rhs(p, a)
    stderr = ratio_stderr(est.value, est.stderr, anchor_est.value, anchor_est.stderr, const_fit, rhs)
    logger.debug(f"guhr_wettig p={p.tolist()} a={a.tolist()} lhs={est.value} +- {est.stderr:.2e}")
    return build_report(
        GUHR_WETTIG_ID, {"p": p, "a": a}, est.value, rhs, const_fit, tol, settings, watch,
        stderr=stderr, anchor={"p": ap, "a": aa},
        details={"lhs_stderr": est.stderr, "anchor_lhs": anchor_est.value, "samples": est.n_evals},
    )


def macdonald_rhs(x: np.ndarray, y: np.ndarray) -> float:
    """det[K0(x_i y_j)] / (Delta(x^2) Delta(y^2))."""
    det = np.linalg.det(np.atleast_2d(macdonald_k0(np.outer(x, y))))
    return float(det / (vandermonde(x * x) * vandermonde(y * y)))


def macdonald_1d(xy: float) -> IntegralEstimate:
    """
    n = 1: T = t e^{i phi}, d mu = dt/t dphi, and t = e^s turn the integral into
    2 pi int ds exp(-xy cosh 2s) = 2 pi K0(xy).
    """
    half_width = 0.5 * math.acosh(max(40.0 / xy, 1.0)) + 1.0
    est = adaptive_1d(lambda s: 2.0 * math.pi * np.exp(-xy * np.cosh(2.0 * s)), -half_width, half_width,
                      abs_tol=1e-13, initial_panels=8)
    return est


def macdonald_weighted_mc(x: np.ndarray, y: np.ndarray, cfg: McConfig, scale: float = PROPOSAL_SCALE) -> IntegralEstimate:
    """
    Importance-sampled int d mu(T) exp(-Tr X [T Y T^dagger + (T^dagger)^{-1} Y T^{-1}] / 2)
    with T = U diag(t) V^dagger from GLInvariantSampler.

    Raises:
        EffectiveSampleSizeTooLow: If the weighted contributions have ESS below 5% of N
    """
    n = x.size

    def integrand(sample: WeightedSample) -> np.ndarray:
        u, v, t = sample.u, sample.v, sample.singular_values
        vyv = np.conj(np.swapaxes(v, -1, -2)) @ (y[None, :, None] * v)
        forward = (u * t[:, None, :]) @ (vyv * t[:, None, :]) @ np.conj(np.swapaxes(u, -1, -2))
        inverse = (u / t[:, None, :]) @ (vyv / t[:, None, :]) @ np.conj(np.swapaxes(u, -1, -2))
        exponent = -0.5 * np.einsum("i,sii->s", x, forward + inverse).real
        return np.exp(exponent + sample.log_weight)

    values = monte_carlo_values(integrand, GLInvariantSampler(n, scale), cfg)
    ess = effective_sample_fraction(values)
    logger.debug(f"macdonald n={n} ESS fraction={ess:.3f}")
    if ess < MIN_ESS_FRACTION:
        raise EffectiveSampleSizeTooLow(f"effective sample fraction {ess:.3f} below {MIN_ESS_FRACTION}", ess)
    est = summarize_samples(values)
    est.diagnostics["ess_fraction"] = ess
    return est


def verify_matrix_macdonald(x, y, settings: Optional[RunSettings] = None,
                            anchor_x=(1.0,), anchor_y=(1.0,), scale: float = PROPOSAL_SCALE) -> IdentityReport:
    """
    n = 1: exact 1-D reduction to K0(xy), tolerance 1e-8.
    n = 2: weighted Monte Carlo, tolerance max(5%, 3 sigma).
    """
    settings = settings or RunSettings()
    watch = Stopwatch()
    x = _positive_distinct(x, "x", (1, 2))
    y = _positive_distinct(y, "y", (1, 2))
    if x.size != y.size:
        raise DimensionMismatch(f"x and y differ in size: {x.size} vs {y.size}")

    if x.size == 1:
        ax, ay = np.asarray(anchor_x, dtype=float)[:1], np.asarray(anchor_y, dtype=float)[:1]
        anchor_est = macdonald_1d(float(ax[0] * ay[0]))
        const_fit = anchor_est.value / macdonald_rhs(ax, ay)
        est = macdonald_1d(float(x[0] * y[0]))
        rhs = macdonald_rhs(x, y)
        return build_report(
            MACDONALD_ID, {"x": x, "y": y}, est.value, rhs, const_fit, settings.tol(MACDONALD_1D_TOLERANCE),
            settings, watch, anchor={"x": ax, "y": ay}, details={"exact_constant": 2.0 * math.pi},
        )

    ax = np.array([1.2, 0.5]) if len(anchor_x) != 2 else np.asarray(anchor_x, dtype=float)
    ay = np.array([1.0, 0.4]) if len(anchor_y) != 2 else np.asarray(anchor_y, dtype=float)
    anchor_est = macdonald_weighted_mc(ax, ay, settings.mc_config(DEFAULT_SAMPLES, seed_offset=1), scale)
    const_fit = anchor_est.value / macdonald_rhs(ax, ay)
    est = macdonald_weighted_mc(x, y, settings.mc_config(DEFAULT_SAMPLES), scale)
    rhs = macdonald_rhs(x, y)
    stderr = ratio_stderr(est.value, est.stderr, anchor_est.value, anchor_est.stderr, const_fit, rhs)
    return build_report(
        MACDONALD_ID, {"x": x, "y": y}, est.value, rhs, const_fit, settings.tol(MC_TOLERANCE), settings, watch,
        stderr=stderr, anchor={"x": ax, "y": ay},
        details={"ess_fraction": est.diagnostics["ess_fraction"], "lhs_stderr": est.stderr,
                 "anchor_lhs": anchor_est.value},
    )


class GuhrWettigCheck(IdentityCheck):
    identity_id = GUHR_WETTIG_ID
    description = "Two-sided unitary group integral against det[J0(2 p_i a_j)]"

    def run(self, params: Dict[str, Any], settings: RunSettings) -> IdentityReport:
        return verify_guhr_wettig(params.get("p", [1.2, 0.5]), params.get("a", [1.0, 0.4]), settings)


class MacdonaldCheck(IdentityCheck):
    identity_id = MACDONALD_ID
    description = "Matrix Macdonald function over Gl(n, C)"

    def run(self, params: Dict[str, Any], settings: RunSettings) -> IdentityReport:
        return verify_matrix_macdonald(params.get("x", [2.0]), params.get("y", [0.5]), settings,
                                       scale=params.get("proposal_scale", PROPOSAL_SCALE))
