import math
from typing import Any, Dict, Optional

import numpy as np
from loguru import logger

from hyperhs.adapters import IdentityCheck
from hyperhs.domain.linalg import chiral_pair_decompose, permutation_expansion, require_distinct, vandermonde
from hyperhs.domain.quadrature import adaptive_1d
from hyperhs.domain.report import IdentityReport, RunSettings, Stopwatch, build_report
from hyperhs.domain.specfun import bessel_j0
from hyperhs.exceptions import DimensionMismatch, DomainError

IDENTITY_ID = "chiral_hs"
TOLERANCE = 1e-6
MAX_N = 3
UPPER_LIMIT = 8.0  # p^7 exp(-p^2) < 1e-21 beyond
MIN_GAP = 1e-6


def chiral_moment(s: int, a: float) -> float:
    """m_s(a) = int_0^inf p^{2s+1} exp(-p^2) J0(2 p a) dp."""
    est = adaptive_1d(lambda p: p ** (2 * s + 1) * np.exp(-p * p) * bessel_j0(2.0 * p * a), 0.0, UPPER_LIMIT,
                      abs_tol=1e-12)
    return float(est.value.real)


def chiral_lhs(a: np.ndarray) -> float:
    """int prod dp_l p_l Delta[P^2] exp(-sum p^2) prod J0(2 p_l a_l) = det[m_{n-j}(a_i)]."""
    n = a.size
    matrix = np.array([[chiral_moment(n - 1 - j, a[i]) for j in range(n)] for i in range(n)])
    return float(np.real(permutation_expansion(matrix)))


def exact_constant(n: int) -> float:
    return (-1) ** (n * (n - 1) // 2) * 2.0 ** (-n)


def reference_spectrum(n: int) -> np.ndarray:
    return 0.5 ** np.arange(n, dtype=float)


def verify_chiral_hs(a_spectrum, vandermonde_power: int = 1, settings: Optional[RunSettings] = None) -> IdentityReport:
    """
    lhs / Delta[a^2]^power against exp(-sum a^2), constant anchored at a = (1, 1/2, 1/4)[:n].

    Power 1 is the identity; power 2 leaves a residual Delta[a^2] dependence and
    serves as a negative control.
    """
    settings = settings or RunSettings()
    watch = Stopwatch()
    a = np.asarray(a_spectrum, dtype=float).ravel()
    if not 1 <= a.size <= MAX_N:
        raise DimensionMismatch(f"chiral_hs supports 1 <= n <= {MAX_N}, got {a.size}")
    if np.any(a <= 0):
        raise DomainError(f"chiral spectrum must be positive, got {a.tolist()}")
    require_distinct(a, MIN_GAP, "a")

    def normalized(spec: np.ndarray) -> float:
        return chiral_lhs(spec) / vandermonde(spec * spec) ** vandermonde_power

    anchor = reference_spectrum(a.size)
    const_fit = normalized(anchor) / math.exp(-np.sum(anchor * anchor))
    lhs = normalized(a)
    rhs = math.exp(-np.sum(a * a))
    logger.debug(f"chiral_hs a={a.tolist()} power={vandermonde_power} lhs={lhs}")
    return build_report(
        IDENTITY_ID, {"a": a, "vandermonde_power": vandermonde_power}, lhs, rhs, const_fit,
        settings.tol(TOLERANCE), settings, watch,
        anchor={"a": anchor}, details={"exact_constant": exact_constant(a.size)},
    )


def chiral_trace_residual(a_matrix, b_matrix) -> float:
    """|exp(-sum a_l^2) - exp(-Tr AB)| for the chiral pair decomposition of (A, B)."""
    decomp = chiral_pair_decompose(a_matrix, b_matrix)
    tr_ab = np.real(np.trace(np.asarray(a_matrix) @ np.asarray(b_matrix)))
    return float(abs(math.exp(-np.sum(decomp.a_spectrum ** 2)) - math.exp(-tr_ab)))


class ChiralHSCheck(IdentityCheck):
    identity_id = IDENTITY_ID
    description = "Chiral two-matrix Hubbard-Stratonovich identity in Bessel form"

    def run(self, params: Dict[str, Any], settings: RunSettings) -> IdentityReport:
        return verify_chiral_hs(params.get("a", [1.3, 0.4]), params.get("vandermonde_power", 1), settings)
