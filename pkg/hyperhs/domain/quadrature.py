"""
Integration engines: adaptive Gauss-Kronrod, fixed Gauss rules, tensor
Gauss-Hermite, damped oscillatory integration with extrapolation in the
damping, and chunked Monte Carlo.
"""

import heapq
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import count
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from tqdm import tqdm

from hyperhs.adapters import MatrixSampler
from hyperhs.domain.sampling import RngStream, rng_generator
from hyperhs.exceptions import DomainError, NonConvergentExtrapolation, ToleranceNotReached

MAX_PANELS = 2 ** 16
MAX_TENSOR_DIM = 4
MAX_HERMITE_ORDER = 64

# Kronrod 15-point abscissae (positive half) and weights; Gauss 7-point weights on the odd Kronrod nodes
_XGK = np.array([
    0.991455371120812639, 0.949107912342758525, 0.864864423359769073, 0.741531185599394440,
    0.586087235467691130, 0.405845151377397167, 0.207784955007898468, 0.0,
])
_WGK = np.array([
    0.022935322010529225, 0.063092092629978553, 0.104790010322250184, 0.140653259715525919,
    0.169004726639267903, 0.190350578064785410, 0.204432940075298892, 0.209482141084727828,
])
_WG = np.array([0.129484966168869693, 0.279705391489276668, 0.381830050505118945, 0.417959183673469388])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(15)
_GAUSS_W[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass
class IntegralEstimate:
    value: complex
    stderr: float = 0.0
    n_evals: int = 0
    abs_tol: float = 0.0
    diagnostics: Dict[str, float] = field(default_factory=dict)


@dataclass
class McConfig:
    samples: int = 100_000
    seed: int = 20240101
    chunk: int = 10_000
    workers: int = 1
    progress: bool = False

    def __post_init__(self):
        if self.samples < 1 or self.chunk < 1 or self.workers < 1:
            raise DomainError(f"invalid Monte Carlo configuration {self}")

    @property
    def n_chunks(self) -> int:
        return -(-self.samples // self.chunk)


@dataclass(frozen=True)
class DampingSchedule:
    deltas: Tuple[float, ...] = (0.2, 0.1, 0.05, 0.025)

    def __post_init__(self):
        d = np.asarray(self.deltas, dtype=float)
        if d.size < 3 or np.any(d <= 0) or np.any(np.diff(d) >= 0):
            raise DomainError(f"damping schedule needs >= 3 strictly descending positive entries, got {self.deltas}")


def _map_domain(f: Integrand, a: float, b: float) -> Tuple[Integrand, float, float]:
    """Map infinite limits onto (0, 1) or (-1, 1)."""
    if math.isfinite(a) and math.isfinite(b):
        return f, a, b
    if math.isfinite(a) and b == math.inf:
        def g(s):
            return _scale(f(a + s / (1.0 - s)), 1.0 / (1.0 - s) ** 2)
        return g, 0.0, 1.0
    if a == -math.inf and math.isfinite(b):
        def g(s):
            return _scale(f(b - s / (1.0 - s)), 1.0 / (1.0 - s) ** 2)
        return g, 0.0, 1.0
    if a == -math.inf and b == math.inf:
        def g(s):
            return _scale(f(s / (1.0 - s * s)), (1.0 + s * s) / (1.0 - s * s) ** 2)
        return g, -1.0, 1.0
    raise DomainError(f"unsupported integration limits ({a}, {b})")


def _scale(values: np.ndarray, jac: np.ndarray) -> np.ndarray:
    values = np.asarray(values)
    return values * jac.reshape(jac.shape + (1,) * (values.ndim - 1))


def _kronrod_panel(f: Integrand, a: float, b: float):
    center, half = (a + b) / 2.0, (b - a) / 2.0
    fx = np.asarray(f(center + half * _NODES))
    shape = (15,) + (1,) * (fx.ndim - 1)
    kronrod = half * np.sum(_KRONROD_W.reshape(shape) * fx, axis=0)
    gauss = half * np.sum(_GAUSS_W.reshape(shape) * fx, axis=0)
    return kronrod, float(np.sum(np.abs(kronrod - gauss)))


def adaptive_1d(f: Integrand, a: float, b: float, abs_tol: float = 1e-10, rel_tol: float = 0.0,
                max_panels: int = MAX_PANELS, initial_panels: int = 1) -> IntegralEstimate:
    """
    Globally adaptive G7-K15 integration of a vectorized integrand.

    The integrand receives a 1-D array of abscissae and returns values of shape
    (m,) or (m, ...) for array-valued integrands; the error of an array-valued
    panel is the sum of its componentwise errors. Infinite limits are mapped to
    a finite interval.

    Raises:
        ToleranceNotReached: If the panel budget runs out before the error target
    """
    if not a < b:
        raise DomainError(f"adaptive_1d requires a < b, got ({a}, {b})")
    g, lo, hi = _map_domain(f, a, b)
    edges = np.linspace(lo, hi, initial_panels + 1)
    tie = count()
    heap: List = []
    total = 0.0
    total_err = 0.0
    for left, right in zip(edges[:-1], edges[1:]):
        val, err = _kronrod_panel(g, left, right)
        heapq.heappush(heap, (-err, next(tie), left, right, val))
        total = total + val
        total_err += err
    n_panels = len(heap)

    while total_err > max(abs_tol, rel_tol * float(np.sum(np.abs(total)))):
        if n_panels >= max_panels:
            raise ToleranceNotReached(
                f"adaptive_1d exhausted {max_panels} panels on [{a}, {b}], error {total_err:.3e}",
                estimate=total, achieved_error=total_err,
            )
        neg_err, _, left, right, val = heapq.heappop(heap)
        mid = (left + right) / 2.0
        if not left < mid < right:
            raise ToleranceNotReached(f"panel width underflow near {mid}", estimate=total, achieved_error=total_err)
        v1, e1 = _kronrod_panel(g, left, mid)
        v2, e2 = _kronrod_panel(g, mid, right)
        total = total - val + v1 + v2
        total_err += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, next(tie), left, mid, v1))
        heapq.heappush(heap, (-e2, next(tie), mid, right, v2))
        n_panels += 1

    # re-sum in panel order so the result does not depend on refinement history
    panels = sorted(heap, key=lambda item: item[2])
    total = sum((item[4] for item in panels[1:]), panels[0][4])
    total_err = sum(-item[0] for item in panels)
    value = total if np.ndim(total) else complex(total)
    return IntegralEstimate(value=value, stderr=0.0, n_evals=15 * n_panels, abs_tol=total_err)


@lru_cache(maxsize=None)
def gauss_legendre_rule(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def gauss_legendre(f: Integrand, a: float, b: float, order: int = 32) -> IntegralEstimate:
    x, w = gauss_legendre_rule(order)
    center, half = (a + b) / 2.0, (b - a) / 2.0
    fx = np.asarray(f(center + half * x))
    value = half * np.tensordot(w, fx, axes=(0, 0))
    return IntegralEstimate(value=complex(value) if np.ndim(value) == 0 else value, n_evals=order)


@lru_cache(maxsize=None)
def gauss_laguerre_rule(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for int_0^inf e^{-x} g(x) dx."""
    return np.polynomial.laguerre.laggauss(order)


@lru_cache(maxsize=None)
def gauss_hermite_rule(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.polynomial.hermite.hermgauss(order)


def gauss_hermite_tensor(f: Integrand, dim: int, order: int, half_weight: bool = False) -> IntegralEstimate:
    """
    Tensor-product Gauss-Hermite for int f(p) w(p) dp over R^dim.

    The weight is exp(-sum p^2); with half_weight=True it is exp(-sum p^2 / 2),
    handled by rescaling p = sqrt(2) t. The integrand receives an (m, dim) array.
    """
    if not 1 <= dim <= MAX_TENSOR_DIM:
        raise DomainError(f"tensor dimension must be in [1, {MAX_TENSOR_DIM}], got {dim}")
    if not 1 <= order <= MAX_HERMITE_ORDER:
        raise DomainError(f"Hermite order must be in [1, {MAX_HERMITE_ORDER}], got {order}")
    t, w = gauss_hermite_rule(order)
    if half_weight:
        t, w = t * math.sqrt(2.0), w * math.sqrt(2.0)
    grids = np.meshgrid(*([t] * dim), indexing="ij")
    points = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.prod(np.stack(np.meshgrid(*([w] * dim), indexing="ij")).reshape(dim, -1), axis=0)
    values = np.asarray(f(points))
    total = np.tensordot(weights, values, axes=(0, 0))
    return IntegralEstimate(value=complex(total) if np.ndim(total) == 0 else total, n_evals=weights.size)


def richardson_extrapolate(steps: Sequence[float], values: Sequence[complex],
                           order: Optional[int] = None) -> Tuple[complex, np.ndarray]:
    """
    Polynomial (Neville) extrapolation of values(step) to step = 0.

    Returns the extrapolant and the Neville table, whose row j holds the
    extrapolants that use j + 1 consecutive points. `order` caps the polynomial degree.
    """
    h = np.asarray(steps, dtype=float)
    v = np.asarray(values, dtype=complex)
    n = h.size
    depth = n if order is None else min(n, order + 1)
    table = np.full((depth, n), np.nan + 0j)
    table[0] = v
    for j in range(1, depth):
        for i in range(j, n):
            table[j, i] = (h[i - j] * table[j - 1, i] - h[i] * table[j - 1, i - 1]) / (h[i - j] - h[i])
    return complex(table[depth - 1, n - 1]), table


def _truncation_point(damper: Callable[[float, np.ndarray], np.ndarray], delta: float, a: float,
                      scale: float, cutoff: float, start: float = 1.0, limit: float = 1e7) -> float:
    span = start
    while scale * float(damper(delta, np.array([a + span]))[0]) >= cutoff:
        span *= 2.0
        if span > limit:
            raise NonConvergentExtrapolation(f"damped envelope did not decay by x = {a + span:g} at delta = {delta}")
    return a + span


def damped_oscillatory(f: Integrand, schedule: DampingSchedule,
                       damper: Callable[[float, np.ndarray], np.ndarray],
                       a: float = 0.0, abs_tol: float = 1e-8, target_tol: float = 1e-5,
                       scale: float = 1.0, relative: bool = False) -> IntegralEstimate:
    """
    int_a^inf f(x) dx for an oscillatory, conditionally convergent f.

    Each delta of the schedule multiplies f by damper(delta, x); the domain is
    cut where scale * damper falls below abs_tol / 100, the damped integral is
    computed by adaptive_1d, and the sequence is extrapolated to delta = 0.
    stderr carries the difference between the last two extrapolants. With
    relative=True the convergence target is target_tol * |value|.

    Raises:
        NonConvergentExtrapolation: If those extrapolants differ by more than 10 * target_tol
    """
    values = []
    n_evals = 0
    for delta in schedule.deltas:
        b = _truncation_point(damper, delta, a, scale, abs_tol / 100.0)
        est = adaptive_1d(lambda x, d=delta: f(x) * damper(d, x), a, b, abs_tol=abs_tol, initial_panels=16)
        values.append(est.value)
        n_evals += est.n_evals
        logger.debug(f"damped integral delta={delta:g} upper={b:.1f} value={est.value}")

    value, table = richardson_extrapolate(schedule.deltas, values)
    depth = table.shape[0]
    residual = float(abs(table[depth - 1, -1] - table[depth - 2, -1]))
    limit = 10.0 * target_tol * (abs(value) if relative else 1.0)
    if not residual <= limit:
        raise NonConvergentExtrapolation(
            f"extrapolants differ by {residual:.3e} (> {limit:.1e})", table=table,
        )
    return IntegralEstimate(value=value, stderr=residual, n_evals=n_evals, abs_tol=abs_tol,
                            diagnostics={"damped_last": complex(values[-1])})


def summarize_samples(values: np.ndarray) -> IntegralEstimate:
    """Mean and stderr = std / sqrt(N); complex stderr is the larger component stderr."""
    vals = np.asarray(values, dtype=complex)
    n = vals.size
    if n > 1:
        stderr = max(np.std(vals.real, ddof=1), np.std(vals.imag, ddof=1)) / math.sqrt(n)
    else:
        stderr = 0.0
    return IntegralEstimate(value=complex(np.mean(vals)), stderr=float(stderr), n_evals=n)


def monte_carlo_values(f: Callable, sampler: MatrixSampler, cfg: McConfig) -> np.ndarray:
    """
    Per-sample integrand values, chunk c drawn from stream (cfg.seed, c).

    Chunks may run on a thread pool; results are concatenated in chunk order.
    """
    def run_chunk(index: int) -> np.ndarray:
        size = min(cfg.chunk, cfg.samples - index * cfg.chunk)
        rng = rng_generator(RngStream(cfg.seed, index))
        return np.asarray(f(sampler.draw(rng, size)), dtype=complex).reshape(size)

    indices = range(cfg.n_chunks)
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(tqdm(pool.map(run_chunk, indices), total=cfg.n_chunks, disable=not cfg.progress,
                               desc="monte carlo"))
    else:
        chunks = [run_chunk(i) for i in tqdm(indices, disable=not cfg.progress, desc="monte carlo")]
    return np.concatenate(chunks)


def monte_carlo(f: Callable, sampler: MatrixSampler, cfg: McConfig) -> IntegralEstimate:
    return summarize_samples(monte_carlo_values(f, sampler, cfg))


def effective_sample_fraction(values: np.ndarray) -> float:
    """(sum |g|)^2 / (N sum |g|^2) for importance-weighted contributions g."""
    mag = np.abs(np.asarray(values))
    denom = mag.size * float(np.sum(mag * mag))
    return float(np.sum(mag)) ** 2 / denom if denom > 0 else 0.0
