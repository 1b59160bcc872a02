"""
Zero-order Bessel, Neumann and Macdonald functions and the closed-form
Gaussian integrals used as kernels by the identity checkers.

All functions accept a scalar or a numpy array and return a value of the
same shape. Small arguments use the defining power series; large arguments
sum the Hankel asymptotic expansion through its Laplace-integral generating
function, evaluated by Gauss-Hermite quadrature.
"""

import math
from functools import lru_cache
from typing import Tuple, Union

import numpy as np
from numpy.typing import ArrayLike

from hyperhs.exceptions import DomainError

EULER_GAMMA = 0.57721566490153286061
SERIES_SWITCH = 8.0       # J0 / Y0
K0_SERIES_SWITCH = 2.0    # K0 series loses digits to cancellation against I0 beyond this
MAX_MOMENT_ORDER = 16

_SERIES_TERMS = 48
_HANKEL_NODES = 96

Real = Union[float, np.ndarray]
Complex = Union[complex, np.ndarray]


@lru_cache(maxsize=None)
def _hermite_rule(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.polynomial.hermite.hermgauss(order)


def _prepare(x: ArrayLike) -> Tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    return np.atleast_1d(arr), arr.ndim == 0


def _finish(values: np.ndarray, scalar: bool):
    if scalar:
        value = values[0]
        return complex(value) if np.iscomplexobj(values) else float(value)
    return values


def _series_terms(x: np.ndarray) -> np.ndarray:
    """Terms (x^2/4)^k / (k!)^2, k = 0.._SERIES_TERMS-1, along a trailing axis."""
    y = (x / 2.0) ** 2
    k = np.arange(1, _SERIES_TERMS, dtype=float)
    ratios = y[:, None] / (k * k)[None, :]
    head = np.ones((x.size, 1))
    return np.concatenate([head, np.cumprod(ratios, axis=1)], axis=1)


def _harmonic_numbers() -> np.ndarray:
    k = np.arange(1, _SERIES_TERMS, dtype=float)
    return np.concatenate([[0.0], np.cumsum(1.0 / k)])


def _hankel_first_kind(x: np.ndarray) -> np.ndarray:
    """H0^(1)(x) for x > 0 from the Laplace representation of its asymptotic expansion."""
    t, w = _hermite_rule(_HANKEL_NODES)
    s = t * t
    g = (1.0 + 1j * s[None, :] / (2.0 * x[:, None])) ** -0.5
    amplitude = (g @ w) / math.sqrt(math.pi)
    return np.sqrt(2.0 / (math.pi * x)) * np.exp(1j * (x - math.pi / 4.0)) * amplitude


def _macdonald_large(x: np.ndarray) -> np.ndarray:
    t, w = _hermite_rule(_HANKEL_NODES)
    s = t * t
    g = (1.0 + s[None, :] / (2.0 * x[:, None])) ** -0.5
    amplitude = (g @ w) / math.sqrt(math.pi)
    return np.sqrt(math.pi / (2.0 * x)) * np.exp(-x) * amplitude


def bessel_j0(x: ArrayLike) -> Real:
    """
    Bessel function of the first kind of order zero.

    Args:
        x: Real argument (any sign; J0 is even)

    Returns:
        J0(x), accurate to about 1e-13 relative away from the zeros for |x| <= 50
    """
    arr, scalar = _prepare(x)
    ax = np.abs(arr)
    out = np.empty_like(ax)
    small = ax <= SERIES_SWITCH
    if np.any(small):
        terms = _series_terms(ax[small])
        signs = (-1.0) ** np.arange(_SERIES_TERMS)
        out[small] = terms @ signs
    if np.any(~small):
        out[~small] = _hankel_first_kind(ax[~small]).real
    return _finish(out, scalar)


def bessel_y0(x: ArrayLike) -> Real:
    """
    Neumann (Bessel second kind) function of order zero.

    Args:
        x: Strictly positive argument

    Returns:
        Y0(x)

    Raises:
        DomainError: If any x <= 0
    """
    arr, scalar = _prepare(x)
    if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
        raise DomainError(f"bessel_y0 requires x > 0, got {x}")
    out = np.empty_like(arr)
    small = arr <= SERIES_SWITCH
    if np.any(small):
        xs = arr[small]
        terms = _series_terms(xs)
        alternating = (-1.0) ** np.arange(_SERIES_TERMS)
        j0 = terms @ alternating
        harmonic = _harmonic_numbers() * -alternating
        out[small] = (2.0 / math.pi) * ((np.log(xs / 2.0) + EULER_GAMMA) * j0 + terms @ harmonic)
    if np.any(~small):
        out[~small] = _hankel_first_kind(arr[~small]).imag
    return _finish(out, scalar)


def bessel_i0(x: ArrayLike) -> Real:
    """Modified Bessel function I0 by its power series (used for moderate |x| only)."""
    arr, scalar = _prepare(x)
    out = _series_terms(np.abs(arr)).sum(axis=1)
    return _finish(out, scalar)


def macdonald_k0(x: ArrayLike) -> Real:
    """
    Macdonald (modified Bessel second kind) function of order zero.

    Args:
        x: Strictly positive argument

    Returns:
        K0(x)

    Raises:
        DomainError: If any x <= 0
    """
    arr, scalar = _prepare(x)
    if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
        raise DomainError(f"macdonald_k0 requires x > 0, got {x}")
    out = np.empty_like(arr)
    small = arr <= K0_SERIES_SWITCH
    if np.any(small):
        xs = arr[small]
        terms = _series_terms(xs)
        i0 = terms.sum(axis=1)
        out[small] = -(np.log(xs / 2.0) + EULER_GAMMA) * i0 + terms @ _harmonic_numbers()
    if np.any(~small):
        out[~small] = _macdonald_large(arr[~small])
    return _finish(out, scalar)


def k0_imaginary(u: ArrayLike) -> Complex:
    """
    K0 on the imaginary axis, composed from J0 and Y0:
    K0(iu) = -(pi/2) [Y0(|u|) + i sgn(u) J0(|u|)].

    Raises:
        DomainError: If u == 0 (logarithmic singularity)
    """
    arr, scalar = _prepare(u)
    if np.any(arr == 0.0):
        raise DomainError("k0_imaginary is singular at u = 0")
    au = np.abs(arr)
    out = -(math.pi / 2.0) * (bessel_y0(au) + 1j * np.sign(arr) * bessel_j0(au))
    return _finish(np.asarray(out, dtype=complex), scalar)


def weber_integral(b: float, c: float) -> float:
    """
    Closed form of int_0^inf p exp(-b p^2) J0(c p) dp = exp(-c^2 / 4b) / (2b).

    Raises:
        DomainError: If b <= 0 or c < 0
    """
    if b <= 0.0:
        raise DomainError(f"weber_integral requires b > 0, got {b}")
    if c < 0.0:
        raise DomainError(f"weber_integral requires c >= 0, got {c}")
    return math.exp(-c * c / (4.0 * b)) / (2.0 * b)


def hermite_e(k: int, x: ArrayLike) -> Real:
    """Probabilists' Hermite polynomial He_k by He_{j+1} = x He_j - j He_{j-1}."""
    arr, scalar = _prepare(x)
    previous = np.zeros_like(arr)
    current = np.ones_like(arr)
    for j in range(k):
        previous, current = current, arr * current - j * previous
    return _finish(current, scalar)


def gauss_fourier_moment(k: int, lam: ArrayLike) -> Complex:
    """
    Closed form of int p^k exp(-p^2/2 - i p lam) dp over the real line.

    Args:
        k: Power of p, 0 <= k <= MAX_MOMENT_ORDER
        lam: Fourier variable

    Returns:
        sqrt(2 pi) (-i)^k He_k(lam) exp(-lam^2/2)

    Raises:
        DomainError: If k is negative or above MAX_MOMENT_ORDER
    """
    if k < 0 or k > MAX_MOMENT_ORDER:
        raise DomainError(f"moment order must lie in [0, {MAX_MOMENT_ORDER}], got {k}")
    arr, scalar = _prepare(lam)
    phase = (-1j) ** k
    out = math.sqrt(2.0 * math.pi) * phase * hermite_e(k, arr) * np.exp(-arr * arr / 2.0)
    return _finish(np.asarray(out, dtype=complex), scalar)


def k0_imaginary_quadrature(u: float, schedule=None, abs_tol: float = 1e-9, target_tol: float = 1e-5):
    """
    Cross-check of k0_imaginary: int_0^inf exp(-i u cosh mu) dmu, regularized by
    exp(-delta cosh mu) and extrapolated to delta = 0.

    Returns:
        IntegralEstimate whose stderr is the extrapolation residual
    """
    from hyperhs.domain.quadrature import DampingSchedule, damped_oscillatory

    schedule = schedule or DampingSchedule()
    return damped_oscillatory(
        lambda mu: np.exp(-1j * u * np.cosh(mu)),
        schedule,
        lambda delta, mu: np.exp(-delta * np.cosh(mu)),
        a=0.0,
        abs_tol=abs_tol,
        target_tol=target_tol,
    )
