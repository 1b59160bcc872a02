import numpy as np
import pytest

from hyperhs.domain.linalg import (
    Signature,
    as_complex_matrix,
    chiral_pair_decompose,
    hermitian_sqrt,
    is_hermitian,
    is_positive_definite,
    is_pseudounitary,
    permutation_expansion,
    permutation_parity,
    reconstruct,
    require_distinct,
    signature_matrix,
    svd_complex,
    t_diagonalize,
    vandermonde,
)
from hyperhs.domain.sampling import ginibre, haar_unitary, random_hermitian_pd
from hyperhs.exceptions import DegenerateSpectrum, DimensionMismatch, DomainError, NotTDiagonalizable


def test_signature_matrix():
    L = signature_matrix(Signature(2, 1))
    assert np.allclose(np.diag(L), [1, 1, -1])
    with pytest.raises(DomainError):
        Signature(0, 1)


def test_vandermonde():
    assert vandermonde([1.0, 2.0, 4.0]) == pytest.approx(-6.0)
    assert vandermonde([3.0]) == 1.0


def test_permutation_expansion_matches_det(rng):
    m = ginibre(4, rng)
    assert permutation_expansion(m) == pytest.approx(np.linalg.det(m), rel=1e-12)
    assert permutation_parity((1, 0, 2)) == -1
    assert permutation_parity((1, 2, 0)) == 1


@pytest.mark.parametrize("sig", [Signature(1, 1), Signature(2, 1), Signature(2, 2)])
def test_t_diagonalize_round_trip(rng, sig):
    a_plus = random_hermitian_pd(sig.size, rng)
    pd = t_diagonalize(a_plus, sig)
    L = signature_matrix(sig)
    assert is_pseudounitary(pd.t_matrix, sig)
    assert np.allclose(reconstruct(pd), a_plus @ L, atol=1e-10)
    assert np.all(pd.spectrum[: sig.n1] > 0) and np.all(pd.spectrum[sig.n1:] < 0)
    assert np.all(np.diff(pd.spectrum) < 0)


def test_t_diagonalize_rejects_semidefinite():
    with pytest.raises(NotTDiagonalizable):
        t_diagonalize(np.array([[1.0, -1.0], [-1.0, 1.0]]), Signature(1, 1))


def test_chiral_pair_decompose_reconstructs(rng):
    a = random_hermitian_pd(3, rng)
    b = random_hermitian_pd(3, rng)
    decomp = chiral_pair_decompose(a, b)
    t = decomp.t_matrix
    t_inv = np.linalg.inv(t)
    spec = np.diag(decomp.a_spectrum)
    assert np.allclose(t @ spec @ t.conj().T, a, atol=1e-10)
    assert np.allclose(t_inv.conj().T @ spec @ t_inv, b, atol=1e-10)
    assert np.allclose(np.sort(decomp.a_spectrum ** 2), np.sort(np.linalg.eigvals(a @ b).real), atol=1e-10)


def test_chiral_pair_decompose_degenerate():
    with pytest.raises(DegenerateSpectrum):
        chiral_pair_decompose(np.eye(2), np.eye(2))


def test_hermitian_sqrt_and_predicates(rng):
    m = random_hermitian_pd(3, rng)
    s = hermitian_sqrt(m)
    assert np.allclose(s @ s, m)
    assert is_hermitian(s)
    assert is_positive_definite(m)
    with pytest.raises(DomainError):
        is_positive_definite(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_svd_complex(rng):
    m = ginibre(3, rng)
    dec = svd_complex(m)
    assert np.allclose(dec.u_matrix @ np.diag(dec.singular_values) @ dec.v_matrix.conj().T, m)
    with pytest.raises(DimensionMismatch):
        svd_complex(np.zeros((9, 9)))


def test_as_complex_matrix_parses_strings():
    m = as_complex_matrix([["1+2j", 3], ["-0.5j", "2 - 1j"]])
    assert m[0, 0] == 1 + 2j
    assert m[1, 1] == 2 - 1j
    assert m.shape == (2, 2)


def test_require_distinct():
    require_distinct([1.0, 2.0], 1e-6, "x")
    with pytest.raises(DegenerateSpectrum):
        require_distinct([1.0, 1.0 + 1e-9], 1e-6, "x")


@pytest.mark.parametrize("i,j", [(0, 1), (1, 3), (0, 3)])
def test_vandermonde_changes_sign_under_swap(i, j):
    b = np.array([0.3, -1.1, 2.4, 0.9])
    swapped = b.copy()
    swapped[[i, j]] = swapped[[j, i]]
    assert vandermonde(swapped) == pytest.approx(-vandermonde(b), rel=1e-12)


def test_singular_values_invariant_under_unitary_conjugation(rng):
    m = ginibre(4, rng)
    u = haar_unitary(4, rng)
    conjugated = u @ m @ u.conj().T
    assert np.allclose(svd_complex(conjugated).singular_values, svd_complex(m).singular_values, rtol=1e-12, atol=1e-12)


def test_shear_is_not_pseudounitary():
    assert not is_pseudounitary([[1.0, 0.1], [0.0, 1.0]], Signature(1, 1), tol=1e-9)
