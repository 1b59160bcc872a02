"""
Radial eigen-equation of the matrix Macdonald function.

Phi(x) = det[K0(x_i y_j)] / (Delta(x^2) Delta(y^2)) must satisfy
(1/J) sum_i d_i J d_i Phi = Tr(y^2) Phi with J(x) = Delta^2(x^2) prod x_i.
The operator is applied in flux form with central differences.
"""

from typing import Any, Dict, Optional

import numpy as np

from hyperhs.adapters import IdentityCheck
from hyperhs.domain.linalg import require_distinct, vandermonde
from hyperhs.domain.report import IdentityReport, RunSettings, Stopwatch, build_report
from hyperhs.domain.specfun import macdonald_k0
from hyperhs.exceptions import DimensionMismatch, DomainError, StencilDegeneracy

IDENTITY_ID = "radial_pde"
RESIDUAL_LIMIT = 1e-3
RATIO_BAND = (3.5, 4.5)
ROUNDOFF_FLOOR = 1e-9
H_RANGE = (1e-4, 1e-2)


def bessel_det(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.linalg.det(np.atleast_2d(macdonald_k0(np.outer(x, y)))))


def radial_phi(x: np.ndarray, y: np.ndarray) -> float:
    return bessel_det(x, y) / (vandermonde(x * x) * vandermonde(y * y))


def radial_jacobian(x: np.ndarray) -> float:
    return vandermonde(x * x) ** 2 * float(np.prod(x))


def radial_operator(phi, x: np.ndarray, h: float) -> float:
    """(1/J) sum_i [J(x + h/2 e_i)(phi(x + h e_i) - phi(x)) - J(x - h/2 e_i)(phi(x) - phi(x - h e_i))] / h^2."""
    centre = phi(x)
    total = 0.0
    for i in range(x.size):
        step = np.zeros_like(x)
        step[i] = h
        forward = radial_jacobian(x + step / 2) * (phi(x + step) - centre)
        backward = radial_jacobian(x - step / 2) * (centre - phi(x - step))
        total += (forward - backward) / (h * h)
    return total / radial_jacobian(x)


def separable_operator(f, x: np.ndarray, h: float) -> float:
    """sum_k (d_k^2 + (1/x_k) d_k) f by central differences."""
    centre = f(x)
    total = 0.0
    for k in range(x.size):
        step = np.zeros_like(x)
        step[k] = h
        up, down = f(x + step), f(x - step)
        total += (up - 2.0 * centre + down) / (h * h) + (up - down) / (2.0 * h * x[k])
    return total


def radial_terms(x: np.ndarray, y: np.ndarray, h: float):
    """(D Phi, Tr(y^2) Phi) at x."""
    applied = radial_operator(lambda z: radial_phi(z, y), x, h)
    return applied, float(np.sum(y * y)) * radial_phi(x, y)


def radial_residual(x: np.ndarray, y: np.ndarray, h: float) -> float:
    applied, target = radial_terms(x, y, h)
    return abs(applied - target) / abs(target)


def separable_residual(x: np.ndarray, y: np.ndarray, h: float) -> float:
    eigenvalue = float(np.sum(y * y))
    f = bessel_det(x, y)
    applied = separable_operator(lambda z: bessel_det(z, y), x, h)
    return abs(applied - eigenvalue * f) / abs(eigenvalue * f)


def verify_radial_pde(x, y, h: float = 1e-3, settings: Optional[RunSettings] = None) -> IdentityReport:
    """
    Residual of the radial equation at h and h/2.

    Passes when the residual at h is below 1e-3 and, above the roundoff floor,
    halving h shrinks it by a factor in [3.5, 4.5].

    Raises:
        StencilDegeneracy: If two x entries are closer than 10 h
    """
    settings = settings or RunSettings()
    watch = Stopwatch()
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size or not 1 <= x.size <= 3:
        raise DimensionMismatch(f"x and y must share a size in [1, 3], got {x.size} and {y.size}")
    if not H_RANGE[0] <= h <= H_RANGE[1]:
        raise DomainError(f"step h must lie in {H_RANGE}, got {h}")
    if np.any(x <= 10 * h) or np.any(y <= 0):
        raise DomainError("x must stay clear of 0 by 10 h and y must be positive")
    if x.size > 1 and np.min(np.diff(np.sort(x))) < 10 * h:
        raise StencilDegeneracy(f"x gaps below 10 h = {10 * h:g}: {x.tolist()}")
    require_distinct(y, 1e-6, "y")

    tol = settings.tol(RESIDUAL_LIMIT)
    applied, target = radial_terms(x, y, h)
    r_h = abs(applied - target) / abs(target)
    r_half = radial_residual(x, y, h / 2)
    convergence = r_h / r_half if r_half > 0 else float("inf")
    converging = r_h < ROUNDOFF_FLOOR or RATIO_BAND[0] <= convergence <= RATIO_BAND[1]
    sep = separable_residual(x, y, h)
    passed = r_h < tol and converging
    return build_report(
        IDENTITY_ID, {"x": x, "y": y, "h": h}, applied, target, 1.0, tol, settings, watch,
        passed=passed,
        details={"residual_h": r_h, "residual_half_h": r_half, "convergence_ratio": convergence,
                 "separable_residual": sep, "eigenvalue": float(np.sum(y * y))},
    )


class RadialPDECheck(IdentityCheck):
    identity_id = IDENTITY_ID
    description = "Radial differential equation of the matrix Macdonald function"

    def run(self, params: Dict[str, Any], settings: RunSettings) -> IdentityReport:
        return verify_radial_pde(params.get("x", [1.0, 1.6]), params.get("y", [0.8, 0.3]),
                                 params.get("h", 1e-3), settings)
