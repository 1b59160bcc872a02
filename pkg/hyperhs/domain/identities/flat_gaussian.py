from typing import Any, Dict, Optional

import numpy as np

from hyperhs.adapters import IdentityCheck
from hyperhs.domain.linalg import as_complex_matrix
from hyperhs.domain.quadrature import gauss_hermite_tensor
from hyperhs.domain.report import IdentityReport, RunSettings, Stopwatch, build_report
from hyperhs.exceptions import DimensionMismatch

CHIRAL_FLAT_ID = "chiral_flat"
HERMITIAN_HS_ID = "hermitian_hs"
TOLERANCE = 1e-8
ORDER = 32


def _square_input(a, max_n: int = 2) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    if a.shape[0] != a.shape[1] or not 1 <= a.shape[0] <= max_n:
        raise DimensionMismatch(f"expected a square matrix of size <= {max_n}, got {a.shape}")
    return a


def chiral_flat_integral(a: np.ndarray, order: int = ORDER) -> complex:
    """
    int dR exp(-Tr R^dagger R - i Tr(R^dagger A + A^dagger R)) over complex n x n R.

    The exponent is a sum over entries, -x^2 - y^2 - 2i(x Re A_ij + y Im A_ij),
    so the 2 n^2-dimensional rule is the product of one 2-D rule per entry.
    """
    total = 1.0 + 0.0j
    for entry in a.ravel():
        ar, ai = entry.real, entry.imag
        est = gauss_hermite_tensor(lambda pts: np.exp(-2j * (pts[:, 0] * ar + pts[:, 1] * ai)), dim=2, order=order)
        total *= est.value
    return total


def verify_chiral_flat(a, settings: Optional[RunSettings] = None) -> IdentityReport:
    settings = settings or RunSettings()
    watch = Stopwatch()
    a = _square_input(a)
    anchor = np.zeros_like(a)
    const_fit = chiral_flat_integral(anchor)
    lhs = chiral_flat_integral(a)
    rhs = float(np.exp(-np.real(np.trace(a @ a.conj().T))))
    return build_report(
        CHIRAL_FLAT_ID, {"a": a}, lhs, rhs, const_fit, settings.tol(TOLERANCE), settings, watch,
        anchor={"a": anchor}, details={"exact_constant": np.pi ** a.size},
    )


def hermitian_hs_integral(a: np.ndarray, order: int = ORDER) -> complex:
    """
    int dR exp(-Tr R^2 / 2 - i Tr A R) over Hermitian R, coordinates
    (R_11, R_22, Re R_12, Im R_12) for n = 2.

    Diagonal coordinates carry exp(-r^2 / 2), off-diagonal ones exp(-(x^2 + y^2));
    both are brought to the exp(-sum p^2) rule.
    """
    n = a.shape[0]
    if n == 1:
        est = gauss_hermite_tensor(lambda pts: np.exp(-1j * a[0, 0].real * pts[:, 0]), dim=1, order=order,
                                   half_weight=True)
        return est.value

    a11, a22 = a[0, 0].real, a[1, 1].real
    b, c = a[0, 1].real, a[0, 1].imag
    root2 = np.sqrt(2.0)

    def integrand(pts: np.ndarray) -> np.ndarray:
        r11, r22 = root2 * pts[:, 0], root2 * pts[:, 1]
        x, y = pts[:, 2], pts[:, 3]
        # Tr A R = a11 r11 + a22 r22 + A12 R21 + A21 R12 = ... + 2 (b x + c y)
        return np.exp(-1j * (a11 * r11 + a22 * r22 + 2.0 * (b * x + c * y)))

    est = gauss_hermite_tensor(integrand, dim=4, order=order)
    return 2.0 * est.value


def verify_hermitian_hs(a, settings: Optional[RunSettings] = None) -> IdentityReport:
    """Compact Hubbard-Stratonovich identity for Hermitian A: lhs = C exp(-Tr A^2 / 2)."""
    settings = settings or RunSettings()
    watch = Stopwatch()
    a = _square_input(a)
    a = (a + a.conj().T) / 2.0
    anchor = np.zeros_like(a)
    const_fit = hermitian_hs_integral(anchor)
    lhs = hermitian_hs_integral(a)
    rhs = float(np.exp(-0.5 * np.real(np.trace(a @ a))))
    return build_report(
        HERMITIAN_HS_ID, {"a": a}, lhs, rhs, const_fit, settings.tol(TOLERANCE), settings, watch,
        anchor={"a": anchor},
    )


class ChiralFlatCheck(IdentityCheck):
    identity_id = CHIRAL_FLAT_ID
    description = "Flat Gaussian over complex R against exp(-Tr A A^dagger)"

    def run(self, params: Dict[str, Any], settings: RunSettings) -> IdentityReport:
        return verify_chiral_flat(as_complex_matrix(params.get("a", [["1+1j"]])), settings)


class HermitianHSCheck(IdentityCheck):
    identity_id = HERMITIAN_HS_ID
    description = "Compact Hubbard-Stratonovich identity over Hermitian R"

    def run(self, params: Dict[str, Any], settings: RunSettings) -> IdentityReport:
        return verify_hermitian_hs(as_complex_matrix(params.get("a", [[1.0, "0.3+0.2j"], ["0.3-0.2j", -0.5]])), settings)

