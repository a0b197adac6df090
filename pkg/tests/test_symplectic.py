import numpy as np
import pytest

from qcnet.symplectic import (
    beamsplitter,
    embed,
    passive_from_unitary,
    random_passive,
    random_unitary,
    rotation,
    squeezer,
    symplectic_defect,
    symplectic_eigenvalues,
    sympmat,
    unitary_from_passive,
)


def test_defect_examples():
    assert symplectic_defect(np.eye(6)) == 0.0
    assert symplectic_defect(np.diag([2.0, 2.0])) == pytest.approx(3.0)
    with pytest.raises(ValueError):
        symplectic_defect(np.eye(3))


@pytest.mark.parametrize("M", [squeezer([0.3, -1.2]), rotation([0.4, 2.0]), beamsplitter(0.7)])
def test_building_blocks_are_symplectic(M):
    assert symplectic_defect(M) < 1e-14


def test_passive_round_trip(rng):
    U = random_unitary(4, rng)
    R = passive_from_unitary(U)
    assert symplectic_defect(R) < 1e-13
    assert np.allclose(R @ R.T, np.eye(8))
    assert np.allclose(unitary_from_passive(R), U)


def test_embed_acts_on_selected_modes():
    S = embed(squeezer(0.5), [2], 3)
    assert symplectic_defect(S) < 1e-14
    assert S[2, 2] == pytest.approx(np.exp(0.5)) and S[5, 5] == pytest.approx(np.exp(-0.5))
    assert S[0, 0] == 1.0


def test_symplectic_eigenvalues_invariant(rng):
    cov = np.diag([1.5, 0.5, 1.5, 0.5])
    R = random_passive(2, rng) @ embed(squeezer(0.8), [1], 2)
    nu = symplectic_eigenvalues(R @ cov @ R.T)
    assert np.allclose(np.sort(nu), [0.5, 1.5])


def test_sympmat_shape():
    J = sympmat(2)
    assert np.array_equal(J @ J, -np.eye(4))
