"""Phase-space helpers in block ordering ``x = (q_1..q_m, p_1..p_m)``."""
from __future__ import annotations

import numpy as np

__all__ = [
    "sympmat",
    "symplectic_defect",
    "squeezer",
    "rotation",
    "beamsplitter",
    "passive_from_unitary",
    "unitary_from_passive",
    "embed",
    "direct_sum",
    "symplectic_eigenvalues",
    "random_unitary",
    "random_passive",
]


def sympmat(m):
    """The symplectic form ``[[0, I], [-I, 0]]`` on ``m`` modes."""
    I = np.eye(m)
    Z = np.zeros((m, m))
    return np.block([[Z, I], [-I, Z]])


def symplectic_defect(M):
    """Max-norm of ``M J M^T - J``."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("symplectic_defect needs a square matrix")
    if M.shape[0] % 2:
        raise ValueError(f"odd dimension {M.shape[0]}: not a phase-space matrix")
    J = sympmat(M.shape[0] // 2)
    return float(np.max(np.abs(M @ J @ M.T - J)))


def squeezer(r):
    """Single- or multi-mode squeezer ``diag(e^r, e^-r)``.

    ``r`` may be a scalar or one value per mode; positive ``r`` stretches q.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    return np.diag(np.concatenate([np.exp(r), np.exp(-r)]))


def rotation(phi):
    """Phase-space rotation, one angle per mode (q -> q cos + p sin)."""
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    c, s = np.diag(np.cos(phi)), np.diag(np.sin(phi))
    return np.block([[c, s], [-s, c]])


def beamsplitter(theta=np.pi / 4):
    """Two-mode real beamsplitter (a rotation in the 2x2 mode subspace)."""
    c, s = np.cos(theta), np.sin(theta)
    return passive_from_unitary(np.array([[c, -s], [s, c]]))


def passive_from_unitary(U):
    """Orthogonal symplectic matrix acting as ``a -> U a`` on ``a = (q + ip)/sqrt2``."""
    U = np.asarray(U, dtype=complex)
    X, Y = U.real, U.imag
    return np.block([[X, -Y], [Y, X]])


def unitary_from_passive(R):
    m = R.shape[0] // 2
    return R[:m, :m] + 1j * R[m:, :m]


def _index(modes, m):
    modes = np.asarray(modes, dtype=int)
    return np.concatenate([modes, modes + m])


def embed(S, modes, m):
    """Lift a symplectic acting on ``modes`` to ``m`` modes (identity elsewhere)."""
    out = np.eye(2 * m)
    idx = _index(modes, m)
    out[np.ix_(idx, idx)] = S
    return out


def direct_sum(*mats):
    """Direct sum of phase-space matrices, keeping the qq..pp ordering."""
    sizes = [M.shape[0] // 2 for M in mats]
    m = sum(sizes)
    out = np.zeros((2 * m, 2 * m))
    start = 0
    for M, k in zip(mats, sizes):
        out[np.ix_(_index(range(start, start + k), m), _index(range(start, start + k), m))] = M
        start += k
    return out


def symplectic_eigenvalues(cov):
    """Williamson invariants of a covariance matrix, ascending.

    Computed as the moduli of the eigenvalues of ``i J cov``, which come in
    +/- pairs; each pair is reported once.
    """
    cov = np.asarray(cov, dtype=float)
    m = cov.shape[0] // 2
    ev = np.linalg.eigvals(1j * sympmat(m) @ cov)
    return np.sort(np.abs(ev))[::2]


def random_unitary(m, rng):
    """Haar-random unitary via QR with phase correction."""
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_passive(m, rng):
    return passive_from_unitary(random_unitary(m, rng))
