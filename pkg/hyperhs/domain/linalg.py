"""
Small dense complex matrix algebra: Hermitian and indefinite-metric
decompositions, Vandermonde machinery and permutation expansions.
"""

from dataclasses import dataclass
from itertools import permutations
from typing import Iterator, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike
from loguru import logger

from hyperhs.exceptions import DegenerateSpectrum, DimensionMismatch, DomainError, NotTDiagonalizable

DEGENERACY_THRESHOLD = 1e-10
HERMITIAN_TOL = 1e-12
MAX_SIZE = 8


@dataclass(frozen=True)
class Signature:
    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise DomainError(f"signature blocks must be >= 1, got ({self.n1}, {self.n2})")

    @property
    def size(self) -> int:
        return self.n1 + self.n2


@dataclass(frozen=True)
class PseudoDiag:
    t_matrix: np.ndarray
    spectrum: np.ndarray
    signature: Signature


@dataclass(frozen=True)
class ChiralPairDecomp:
    t_matrix: np.ndarray
    a_spectrum: np.ndarray


@dataclass(frozen=True)
class SingularDecomp:
    u_matrix: np.ndarray
    v_matrix: np.ndarray
    singular_values: np.ndarray


def _square(m: ArrayLike, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {arr.shape}")
    if arr.shape[0] > MAX_SIZE:
        raise DimensionMismatch(f"{name} size {arr.shape[0]} exceeds {MAX_SIZE}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite entries")
    return arr


def signature_matrix(sig: Signature) -> np.ndarray:
    """L = diag(1_{n1}, -1_{n2})."""
    return np.diag(np.concatenate([np.ones(sig.n1), -np.ones(sig.n2)])).astype(complex)


def vandermonde(spectrum: ArrayLike) -> float:
    """prod_{i<j} (b_i - b_j); 1 for fewer than two entries."""
    b = np.asarray(spectrum)
    if b.size < 2:
        return 1.0
    diffs = b[:, None] - b[None, :]
    upper = diffs[np.triu_indices(b.size, k=1)]
    value = np.prod(upper)
    return complex(value) if np.iscomplexobj(value) else float(value)


def permutation_parity(perm: Sequence[int]) -> int:
    inversions = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


def signed_permutations(n: int) -> Iterator[Tuple[int, Tuple[int, ...]]]:
    for perm in permutations(range(n)):
        yield permutation_parity(perm), perm


def permutation_expansion(matrix: ArrayLike) -> complex:
    """Determinant as the explicit signed sum over permutations."""
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"permutation_expansion needs a square matrix, got {m.shape}")
    n = m.shape[0]
    rows = np.arange(n)
    total = 0.0
    for sign, perm in signed_permutations(n):
        total = total + sign * np.prod(m[rows, list(perm)])
    return total


def is_hermitian(m: ArrayLike, tol: float = HERMITIAN_TOL) -> bool:
    arr = _square(m)
    return bool(np.max(np.abs(arr - arr.conj().T)) < tol * max(1.0, np.max(np.abs(arr))))


def is_pseudounitary(t: ArrayLike, sig: Signature, tol: float = 1e-9) -> bool:
    arr = _square(t, "t")
    if arr.shape[0] != sig.size:
        raise DimensionMismatch(f"t has size {arr.shape[0]}, signature needs {sig.size}")
    L = signature_matrix(sig)
    return bool(np.max(np.abs(arr @ L @ arr.conj().T @ L - np.eye(sig.size))) < tol)


def is_positive_definite(m: ArrayLike, tol: float = 0.0) -> bool:
    arr = _square(m)
    if not is_hermitian(arr, max(tol, HERMITIAN_TOL)):
        raise DomainError("is_positive_definite requires a Hermitian matrix")
    return bool(np.linalg.eigvalsh(arr).min() > tol)


def hermitian_sqrt(m: ArrayLike) -> np.ndarray:
    """Principal square root of a Hermitian positive definite matrix."""
    arr = _square(m)
    w, v = np.linalg.eigh((arr + arr.conj().T) / 2)
    if w.min() <= 0.0:
        raise DomainError(f"hermitian_sqrt needs a positive definite matrix, min eigenvalue {w.min():.3e}")
    return (v * np.sqrt(w)) @ v.conj().T


def _fix_diagonal_phase(t: np.ndarray) -> np.ndarray:
    diag = np.diag(t)
    phases = np.where(np.abs(diag) > DEGENERACY_THRESHOLD, np.abs(diag) / np.where(diag == 0, 1, diag), 1.0)
    return t * phases[None, :]


def t_diagonalize(a_plus: ArrayLike, sig: Signature) -> PseudoDiag:
    """
    Diagonalize A = A_+ L as T Lambda T^{-1} with T pseudounitary.

    The product A_+ L is similar to the Hermitian matrix S L S, S = A_+^{1/2},
    whose eigenvectors y give v = S y / sqrt(|lambda|) with <v, L v> = sgn(lambda).

    Args:
        a_plus: Hermitian strictly positive definite matrix of size n1 + n2
        sig: Block signature of L

    Returns:
        PseudoDiag with eigenvalues sorted descending (positive block first)

    Raises:
        NotTDiagonalizable: If A_+ is (near) semidefinite
    """
    arr = _square(a_plus, "a_plus")
    if arr.shape[0] != sig.size:
        raise DimensionMismatch(f"a_plus has size {arr.shape[0]}, signature needs {sig.size}")
    if not is_hermitian(arr, 1e-12):
        raise DomainError("a_plus must be Hermitian")
    smallest = np.linalg.eigvalsh(arr).min()
    if smallest < DEGENERACY_THRESHOLD:
        raise NotTDiagonalizable(f"A_+ is not strictly positive (min eigenvalue {smallest:.3e})")

    S = hermitian_sqrt(arr)
    L = signature_matrix(sig)
    H = S @ L @ S
    w, y = np.linalg.eigh((H + H.conj().T) / 2)
    order = np.argsort(w)[::-1]
    w, y = w[order], y[:, order]
    if np.sum(w > 0) != sig.n1 or np.min(np.abs(w)) < DEGENERACY_THRESHOLD:
        raise NotTDiagonalizable(f"indefinite normalization degenerates for spectrum {w}")

    t = _fix_diagonal_phase((S @ y) / np.sqrt(np.abs(w))[None, :])
    logger.debug(f"t_diagonalize spectrum={w}")
    return PseudoDiag(t_matrix=t, spectrum=w, signature=sig)


def reconstruct(pd: PseudoDiag) -> np.ndarray:
    """T Lambda T^{-1} with T^{-1} = L T^dagger L."""
    L = signature_matrix(pd.signature)
    t_inv = L @ pd.t_matrix.conj().T @ L
    return pd.t_matrix @ np.diag(pd.spectrum) @ t_inv


def chiral_pair_decompose(a: ArrayLike, b: ArrayLike) -> ChiralPairDecomp:
    """
    Write a pair of Hermitian positive definite matrices as
    A = T a T^dagger, B = (T^dagger)^{-1} a T^{-1}.

    a^2 is the spectrum of AB, obtained from C = B^{1/2} A B^{1/2}; the columns of T
    are B^{-1/2} w_l scaled by sqrt(a_l), with the diagonal of T made real positive.

    Raises:
        DegenerateSpectrum: If two eigenvalues of AB are closer than 1e-10
    """
    A = _square(a, "a")
    B = _square(b, "b")
    if A.shape != B.shape:
        raise DimensionMismatch(f"a and b differ in shape: {A.shape} vs {B.shape}")
    if not (is_positive_definite(A) and is_positive_definite(B)):
        raise DomainError("chiral_pair_decompose requires positive definite A and B")

    b_half = hermitian_sqrt(B)
    C = b_half @ A @ b_half
    w, W = np.linalg.eigh((C + C.conj().T) / 2)
    order = np.argsort(w)[::-1]
    w, W = w[order], W[:, order]
    if w.size > 1 and np.min(np.abs(np.diff(w))) < DEGENERACY_THRESHOLD:
        raise DegenerateSpectrum(f"AB has near-coincident eigenvalues {w}")

    a_spec = np.sqrt(w)
    t = np.linalg.solve(b_half, W) * np.sqrt(a_spec)[None, :]
    return ChiralPairDecomp(t_matrix=_fix_diagonal_phase(t), a_spectrum=a_spec)


def svd_complex(m: ArrayLike) -> SingularDecomp:
    arr = _square(m)
    u, s, vh = np.linalg.svd(arr)
    return SingularDecomp(u_matrix=u, v_matrix=vh.conj().T, singular_values=s)


def require_distinct(values: ArrayLike, gap: float, label: str) -> None:
    """Raise DegenerateSpectrum when two entries are within `gap` of each other."""
    v = np.sort(np.asarray(values, dtype=float))
    if v.size > 1 and np.min(np.diff(v)) <= gap:
        raise DegenerateSpectrum(f"{label} entries are closer than {gap:g}: {np.asarray(values).tolist()}")


def as_complex_matrix(value) -> np.ndarray:
    """Nested lists of numbers or strings such as "1+2j" (the form used in YAML configs)."""
    def convert(x):
        if isinstance(x, (list, tuple)):
            return [convert(v) for v in x]
        if isinstance(x, str):
            return complex(x.replace(" ", ""))
        return complex(x)

    if isinstance(value, np.ndarray):
        return np.atleast_2d(value.astype(complex))
    return np.atleast_2d(np.asarray(convert(value), dtype=complex))
