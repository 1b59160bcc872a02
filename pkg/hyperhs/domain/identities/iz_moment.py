from typing import Any, Dict, Optional

import numpy as np
from loguru import logger

from hyperhs.adapters import IdentityCheck
from hyperhs.domain.linalg import permutation_expansion, require_distinct, vandermonde
from hyperhs.domain.report import IdentityReport, RunSettings, Stopwatch, build_report
from hyperhs.domain.specfun import gauss_fourier_moment
from hyperhs.exceptions import DimensionMismatch

IDENTITY_ID = "izmoment"
TOLERANCE = 1e-10
MAX_N = 4
MIN_GAP = 1e-6


def moment_matrix(lam: np.ndarray) -> np.ndarray:
    """M_ij = int p^{n-j} exp(-p^2/2 - i p lambda_i) dp, j = 1..n."""
    n = lam.size
    return np.array([[gauss_fourier_moment(n - 1 - j, lam[i]) for j in range(n)] for i in range(n)])


def iz_moment_lhs(lam: np.ndarray) -> complex:
    """int dP Delta[P] exp(-Tr P^2 / 2 - i Tr P Lambda), by expanding Delta[P] into monomials."""
    return complex(permutation_expansion(moment_matrix(lam)))


def iz_moment_rhs(lam: np.ndarray) -> float:
    return vandermonde(lam) * float(np.exp(-0.5 * np.sum(lam * lam)))


def exact_constant(n: int) -> complex:
    return (2.0 * np.pi) ** (n / 2.0) * (-1j) ** (n * (n - 1) // 2)


def reference_spectrum(n: int) -> np.ndarray:
    return (n + 1) / 2.0 - np.arange(1, n + 1, dtype=float)


def verify_iz_moment_identity(lam, settings: Optional[RunSettings] = None) -> IdentityReport:
    """
    Exact check of int dP Delta[P] e^{-Tr P^2/2 - i Tr P Lambda} = C Delta[Lambda] e^{-Tr Lambda^2/2}.

    The constant is fitted at the equally spaced reference spectrum of the same size.
    """
    settings = settings or RunSettings()
    watch = Stopwatch()
    lam = np.asarray(lam, dtype=float).ravel()
    if not 1 <= lam.size <= MAX_N:
        raise DimensionMismatch(f"izmoment supports 1 <= n <= {MAX_N}, got {lam.size}")
    require_distinct(lam, MIN_GAP, "lambda")

    anchor = reference_spectrum(lam.size)
    const_fit = iz_moment_lhs(anchor) / iz_moment_rhs(anchor)
    lhs = iz_moment_lhs(lam)
    rhs = iz_moment_rhs(lam)
    logger.debug(f"izmoment n={lam.size} lhs={lhs} rhs={rhs}")
    return build_report(
        IDENTITY_ID, {"lambda": lam}, lhs, rhs, const_fit, settings.tol(TOLERANCE), settings, watch,
        anchor={"lambda": anchor},
        details={"exact_constant": exact_constant(lam.size)},
    )


class IzMomentCheck(IdentityCheck):
    identity_id = IDENTITY_ID
    description = "Gaussian moment identity with a Vandermonde insertion (exact)"

    def run(self, params: Dict[str, Any], settings: RunSettings) -> IdentityReport:
        return verify_iz_moment_identity(params.get("lambda", [1.0, -1.0]), settings)
