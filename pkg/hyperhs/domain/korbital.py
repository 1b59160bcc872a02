"""
k-orbital model pipeline: negative determinant moments of the ensemble,
their integral representation over positive 2 x 2 matrices q_i, the
Ingham-Siegel factor and the saddle point of the single-site action.

A positive 2 x 2 q is written as m 1 + rho n.sigma with eigenvalues
sqrt(u) e^{+-v}, so m = sqrt(u) cosh v, rho = sqrt(u) sinh v, det q = u and
n = (sqrt(1-t^2) cos phi, sqrt(1-t^2) sin phi, t). The flat measure is
4 u sinh^2 v du dv dt dphi.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
from loguru import logger
from scipy import stats

from hyperhs.adapters import MatrixSampler
from hyperhs.domain.quadrature import (
    IntegralEstimate,
    McConfig,
    adaptive_1d,
    gauss_laguerre_rule,
    gauss_legendre_rule,
    monte_carlo_values,
    summarize_samples,
)
from hyperhs.domain.sampling import KOrbitalSampler, VarianceProfile
from hyperhs.exceptions import DomainError, HeavyTailWarning, OutsideBand

TAIL_FRACTION = 0.001
TAIL_SHARE_LIMIT = 0.5
V_HALF_WIDTH = 8.0
V_PROPOSAL_SIGMA = 1.2


@dataclass(frozen=True)
class ModelParams:
    n: int = 1
    E: float = 0.0
    eta: float = 1.0

    def __post_init__(self):
        if self.eta <= 0:
            raise DomainError(f"eta must be positive, got {self.eta}")
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")


@dataclass(frozen=True)
class QuadratureGrid:
    laguerre_order: int = 48
    legendre_order: int = 96


def tail_share(values: np.ndarray, fraction: float = TAIL_FRACTION) -> float:
    """Share of the total carried by the largest `fraction` of the samples."""
    mags = np.sort(np.abs(values))[::-1]
    top = max(1, int(math.ceil(fraction * mags.size)))
    total = float(np.sum(mags))
    return float(np.sum(mags[:top])) / total if total > 0 else 0.0


def z_moment_mc(params: ModelParams, profile: VarianceProfile, cfg: McConfig) -> IntegralEstimate:
    """
    <|det(E + i eta/k - H)|^{-2n}> over the k-orbital ensemble.

    Warns with HeavyTailWarning when the top 0.1% of samples carry more than half the mean.
    """
    if profile.k < 2 * params.n:
        raise DomainError(f"representation needs k >= 2n, got k={profile.k}, n={params.n}")
    if profile.size > 64:
        raise DomainError(f"ensemble size r*k = {profile.size} exceeds 64")
    z = params.E + 1j * params.eta / profile.k
    eye = np.eye(profile.size)

    def integrand(h: np.ndarray) -> np.ndarray:
        _, logabsdet = np.linalg.slogdet(z * eye - h)
        return np.exp(-2.0 * params.n * logabsdet)

    values = monte_carlo_values(integrand, KOrbitalSampler(profile), cfg)
    est = summarize_samples(values)
    share = tail_share(values)
    est.diagnostics["tail_share"] = share
    if share > TAIL_SHARE_LIMIT:
        message = f"top {TAIL_FRACTION:.1%} of samples carry {share:.1%} of the determinant moment"
        logger.warning(message)
        warnings.warn(message, HeavyTailWarning, stacklevel=2)
    logger.debug(f"z_moment_mc {params} {profile} -> {est.value.real:.6g} +- {est.stderr:.2g}")
    return est


def _log_site_weight(u, v, t, k: int, J: float, E: float, eta: float):
    """log of 4 u^{k-1} sinh^2 v exp(-k L(q) - eta Tr q) in (u, v, t); the phase is returned separately."""
    sinh_v = np.sinh(v)
    sqrt_u = np.sqrt(u)
    log_mod = (math.log(4.0) + (k - 1) * np.log(u) + 2.0 * np.log(np.abs(sinh_v))
               - k * J * u - 2.0 * k * J * u * sinh_v ** 2 * t ** 2 - 2.0 * eta * sqrt_u * np.cosh(v))
    phase = 2.0 * k * E * sqrt_u * sinh_v * t
    return log_mod, phase


def _single_site_integral(params: ModelParams, J: float, k: int, grid: QuadratureGrid) -> complex:
    """
    int 4 u^{k-1} sinh^2 v exp(-kJu - 2kJu sinh^2 v t^2 + 2ikE sqrt(u) sinh v t - 2 eta sqrt(u) cosh v) du dv dt dphi.

    Gauss-Laguerre in kJu, Gauss-Legendre in v on [-8, 8], array-valued adaptive in t, 2 pi from phi.
    """
    x, wx = gauss_laguerre_rule(grid.laguerre_order)
    u = x / (k * J)
    vv, wv = gauss_legendre_rule(grid.legendre_order)
    v = V_HALF_WIDTH * vv
    wv = V_HALF_WIDTH * wv
    U, Vg = np.meshgrid(u, v, indexing="ij")
    sinh_v = np.sinh(Vg)
    b = 2.0 * k * J * U * sinh_v ** 2
    c = 2.0 * k * params.E * np.sqrt(U) * sinh_v
    outer = 4.0 * U ** (k - 1) * sinh_v ** 2 * np.exp(-2.0 * params.eta * np.sqrt(U) * np.cosh(Vg))
    weights = np.outer(wx, wv) / (k * J) * outer
    keep = weights > 1e-18 * weights.max()
    b, c, weights = b[keep], c[keep], weights[keep]

    t_integral = adaptive_1d(lambda t: np.exp(-np.outer(t * t, b) + 1j * np.outer(t, c)), -1.0, 1.0,
                             abs_tol=1e-10 * b.size, initial_panels=4).value
    return 2.0 * math.pi * complex(np.sum(weights * t_integral))


class SiteProposal(MatrixSampler):
    """Per-site proposal u ~ Gamma(k, 1/(kJ)), v ~ N(0, 1.2^2), t ~ U(-1, 1), phi ~ U(0, 2 pi)."""

    def __init__(self, r: int, k: int, J: float):
        self.r, self.k, self.J = r, k, J

    def draw(self, rng: np.random.Generator, size: int) -> Dict[str, np.ndarray]:
        shape = (size, self.r)
        return {
            "u": rng.gamma(self.k, 1.0 / (self.k * self.J), size=shape),
            "v": rng.normal(0.0, V_PROPOSAL_SIGMA, size=shape),
            "t": rng.uniform(-1.0, 1.0, size=shape),
            "phi": rng.uniform(0.0, 2.0 * math.pi, size=shape),
        }

    def log_density(self, draw: Dict[str, np.ndarray]) -> np.ndarray:
        log_q = (stats.gamma.logpdf(draw["u"], self.k, scale=1.0 / (self.k * self.J))
                 + stats.norm.logpdf(draw["v"], scale=V_PROPOSAL_SIGMA)
                 - math.log(2.0) - math.log(2.0 * math.pi))
        return np.sum(log_q, axis=1)


def neighbour_trace(draw: Dict[str, np.ndarray], i: int, j: int) -> np.ndarray:
    """Tr(q_i L q_j L) = 2 (m_i m_j + rho_i rho_j (t_i t_j - sin_i sin_j cos(phi_i - phi_j)))."""
    u, v, t, phi = draw["u"], draw["v"], draw["t"], draw["phi"]
    m = np.sqrt(u) * np.cosh(v)
    rho = np.sqrt(u) * np.sinh(v)
    sin_theta = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    angular = t[:, i] * t[:, j] - sin_theta[:, i] * sin_theta[:, j] * np.cos(phi[:, i] - phi[:, j])
    return 2.0 * (m[:, i] * m[:, j] + rho[:, i] * rho[:, j] * angular)


def _chain_importance(params: ModelParams, profile: VarianceProfile, cfg: McConfig) -> IntegralEstimate:
    proposal = SiteProposal(profile.r, profile.k, profile.J)

    def integrand(draw: Dict[str, np.ndarray]) -> np.ndarray:
        log_mod, phase = _log_site_weight(draw["u"], draw["v"], draw["t"], profile.k, profile.J, params.E, params.eta)
        log_total = np.sum(log_mod, axis=1)
        for i in range(profile.r - 1):
            log_total = log_total - profile.V * neighbour_trace(draw, i, i + 1)
        return np.exp(log_total - proposal.log_density(draw) + 1j * np.sum(phase, axis=1))

    return summarize_samples(monte_carlo_values(integrand, proposal, cfg))


def z_integral_rep(params: ModelParams, profile: VarianceProfile, cfg: McConfig,
                   grid: QuadratureGrid = QuadratureGrid()) -> IntegralEstimate:
    """
    Integral representation of Z up to its constant: prod_i dq_i det(q_i)^{k-2}
    exp(-(kJ/2) Tr(q_i L)^2 + ikE Tr(q_i L) - eta Tr q_i) exp(-V sum Tr(q_i L q_{i+1} L)).

    r = 1 by deterministic quadrature; r = 2 by importance sampling (cfg).
    Multiply by calibrate_constant(...)**r to compare with z_moment_mc.
    """
    if params.n != 1:
        raise DomainError("the integral representation is implemented for n = 1")
    if profile.r == 1:
        value = _single_site_integral(params, profile.J, profile.k, grid)
        return IntegralEstimate(value=value, stderr=0.0, n_evals=grid.laguerre_order * grid.legendre_order)
    if profile.r == 2:
        return _chain_importance(params, profile, cfg)
    raise DomainError(f"the integral representation supports r <= 2, got {profile.r}")


def reference_point(profile: VarianceProfile) -> Tuple[ModelParams, VarianceProfile]:
    return ModelParams(n=1, E=0.0, eta=1.0), VarianceProfile(J=profile.J, V=0.0, k=profile.k, r=1)


def calibrate_constant(profile: VarianceProfile, cfg: McConfig) -> Tuple[float, float]:
    """Per-site constant c with Z = c^r * z_integral_rep, fitted at (J, V=0, E=0, eta=1, r=1)."""
    params, ref_profile = reference_point(profile)
    mc = z_moment_mc(params, ref_profile, cfg)
    rep = z_integral_rep(params, ref_profile, cfg)
    c = mc.value.real / rep.value.real
    logger.info(f"k-orbital constant c={c:.6g} (k={profile.k}, J={profile.J})")
    return c, abs(c) * mc.stderr / abs(mc.value)


def exact_site_constant(k: int) -> float:
    """
    k^{2k} / (8 pi Gamma(k) Gamma(k-1)), the constant calibrate_constant estimates for n = 1.

    Follows from the complex Wishart density of the 2 x 2 Gram matrix of the two
    auxiliary vectors; the 8 is the measure's 4 times the double cover of v in R.
    """
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    return math.exp(2 * k * math.log(k) - math.log(8.0 * math.pi) - math.lgamma(k) - math.lgamma(k - 1))


def site_action(p_matrix, J: float, E: float) -> complex:
    """L(P) = (J/2) Tr P^2 - i E Tr P - Tr ln P."""
    p = np.asarray(p_matrix, dtype=complex)
    return complex(0.5 * J * np.trace(p @ p) - 1j * E * np.trace(p) - np.sum(np.log(np.linalg.eigvals(p))))


def saddle_point(J: float, E: float, n: int = 1) -> np.ndarray:
    """
    P0 = (i E 1 + L sqrt(4J - E^2)) / (2J), L = diag(1_n, -1_n).

    Raises:
        OutsideBand: If E^2 >= 4J
    """
    if J <= 0:
        raise DomainError(f"J must be positive, got {J}")
    if E * E >= 4.0 * J:
        raise OutsideBand(f"E^2 = {E * E:g} is not inside the band 4J = {4 * J:g}")
    L = np.diag(np.concatenate([np.ones(n), -np.ones(n)]))
    return (1j * E * np.eye(2 * n) + L * math.sqrt(4.0 * J - E * E)) / (2.0 * J)


def stationarity_residual(p0: np.ndarray, J: float, E: float) -> float:
    """max_i |J p_i - i E - 1/p_i| over the diagonal of P0."""
    p = np.diag(p0)
    return float(np.max(np.abs(J * p - 1j * E - 1.0 / p)))


def _graded_nodes(pole: float, cutoff: float, order: int = 16, coarse: float = 4.0, fine: float = 0.25,
                  fine_halfwidth: float = 2.0) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre on [-cutoff, cutoff], panels of width <= fine within fine_halfwidth of the pole."""
    lo, hi = max(-cutoff, pole - fine_halfwidth), min(cutoff, pole + fine_halfwidth)
    edges = []
    for a, b, width in ((-cutoff, lo, coarse), (lo, hi, fine), (hi, cutoff, coarse)):
        if b > a:
            pieces = int(math.ceil((b - a) / width))
            edges.append(np.linspace(a, b, pieces + 1)[:-1])
    edges = np.concatenate(edges + [np.array([cutoff])])
    x, w = gauss_legendre_rule(order)
    left, right = edges[:-1], edges[1:]
    half = (right - left) / 2.0
    nodes = ((left + right) / 2.0)[:, None] + half[:, None] * x[None, :]
    weights = half[:, None] * w[None, :]
    return nodes.ravel(), weights.ravel()


def radial_s_integral(c: np.ndarray, k: int, order: int = 48) -> np.ndarray:
    """
    int_0^inf (c - S)^{-k} dS on a ray rotated into the half-plane away from c,
    S = i sigma s, sigma = -sgn(Im c), mapped by s = |c| x / (1 - x).
    """
    x, w = gauss_legendre_rule(order)
    x = (x + 1.0) / 2.0
    w = w / 2.0
    sigma = np.where(c.imag > 0, -1.0, 1.0)
    scale = np.abs(c)
    s = scale[:, None] * (x / (1.0 - x))[None, :]
    jac = scale[:, None] / (1.0 - x)[None, :] ** 2
    ray = 1j * sigma[:, None]
    values = (c[:, None] - ray * s) ** (-k) * jac * ray
    return values @ w


def ingham_siegel_integral(q: Tuple[float, float], k: int, E: float, eps: float, cutoff: float = 64.0) -> complex:
    """
    int dK det(K - E L - i eps)^{-k} exp(i Tr K q) over Hermitian 2 x 2 K, q = diag(q1, q2).

    K = [[k1, z], [z*, k2]]: the angle of z gives pi, |z|^2 = S is integrated on a
    rotated ray, and (k1, k2) on graded composite Gauss-Legendre panels around the
    poles k1 = E + i eps, k2 = -E + i eps, truncated at |k| = cutoff.
    """
    if k < 3:
        raise DomainError(f"the K-integral converges absolutely for k >= 3, got {k}")
    q1, q2 = q
    k1, w1 = _graded_nodes(E, cutoff)
    k2, w2 = _graded_nodes(-E, cutoff)
    b = k2 + E - 1j * eps
    row_phase = w2 * np.exp(1j * k2 * q2)
    total = 0.0 + 0.0j
    for node, weight in zip(k1, w1):
        a = node - E - 1j * eps
        total += weight * np.exp(1j * node * q1) * np.sum(row_phase * radial_s_integral(a * b, k))
    return math.pi * total


def ingham_siegel_rhs(q: Tuple[float, float], k: int, E: float, eps: float) -> complex:
    """theta(q) (det q)^{k-2} exp(i Tr q (E L + i eps))."""
    q1, q2 = q
    if q1 <= 0 or q2 <= 0:
        return 0.0 + 0.0j
    return complex((q1 * q2) ** (k - 2) * np.exp(1j * E * (q1 - q2) - eps * (q1 + q2)))
