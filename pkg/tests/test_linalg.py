import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcnet.linalg import TakagiError, takagi


def _random_symmetric(n, seed, rank=None):
    rng = np.random.default_rng(seed)
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    if rank is not None:
        Z = Z[:, :rank] @ Z[:, :rank].T
    return (Z + Z.T) / 2


@given(n=st.integers(1, 12), seed=st.integers(0, 10_000))
def test_reconstruction_and_unitarity(n, seed):
    Z = _random_symmetric(n, seed)
    lam, U = takagi(Z)
    assert np.all(np.diff(lam) <= 1e-12) and np.all(lam >= 0)
    assert np.allclose(U.conj().T @ U, np.eye(n), atol=1e-10)
    assert np.linalg.norm(U @ np.diag(lam) @ U.T - Z) / np.linalg.norm(Z) < 1e-10


@given(n=st.integers(3, 10), rank=st.integers(1, 2), seed=st.integers(0, 1000))
def test_rank_deficient(n, rank, seed):
    Z = _random_symmetric(n, seed, rank)
    lam, U = takagi(Z)
    assert np.sum(lam > 1e-9) == rank
    assert np.linalg.norm(U @ np.diag(lam) @ U.T - Z) < 1e-9 * max(1, np.linalg.norm(Z))
    assert np.allclose(U.conj().T @ U, np.eye(n), atol=1e-9)


def test_values_match_hermitian_doubling_oracle():
    Z = _random_symmetric(7, 3)
    lam, _ = takagi(Z)
    H = np.block([[np.zeros((7, 7)), Z], [Z.conj(), np.zeros((7, 7))]])
    w = np.sort(np.linalg.eigvalsh(H))[::-1][:7]
    assert np.allclose(lam, w, atol=1e-12)


def test_zero_matrix():
    lam, U = takagi(np.zeros((4, 4)))
    assert np.all(lam == 0)
    assert np.allclose(U.conj().T @ U, np.eye(4))


def test_rejects_bad_input():
    with pytest.raises(TakagiError):
        takagi(np.array([[0, 1], [2, 0]], dtype=complex))
    with pytest.raises(TakagiError):
        takagi(np.ones((2, 3)))
    with pytest.raises(TakagiError):
        takagi(np.array([[np.nan, 0], [0, 1]]))
