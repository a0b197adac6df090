"""Bloch-Messiah (Euler) decomposition of symplectic matrices.

A symplectic ``S`` is written as ``S = R1^T Dsq R2`` with ``R1``, ``R2``
orthogonal symplectic (passive interferometers) and
``Dsq = diag(d_1..d_m, 1/d_1..1/d_m)``, ``d_1 >= d_2 >= ... >= 1``.

Method: polar split ``S = U P`` with ``U`` orthogonal and ``P`` positive
symplectic. ``log P`` is a symmetric Hamiltonian matrix
``[[A, B], [B, -A]]`` whose complex form ``A + iB`` is Takagi-factored;
the Takagi unitary is the passive factor that diagonalizes ``P``.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .linalg import takagi
from .symplectic import passive_from_unitary, symplectic_defect

__all__ = [
    "BlochMessiah",
    "NotSymplectic",
    "DecompositionFailure",
    "bloch_messiah",
    "effective_evolution",
    "symplectic_defect",
    "to_db",
    "from_db",
]


class NotSymplectic(ValueError):
    def __init__(self, defect):
        super().__init__(f"matrix is not symplectic (defect {defect:.3e})")
        self.defect = defect


class DecompositionFailure(RuntimeError):
    pass


def to_db(d):
    """Squeezing factor(s) to decibels, ``20 log10 d``."""
    return 20.0 * np.log10(np.asarray(d, dtype=float))


def from_db(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 20.0)


@dataclass(frozen=True, eq=False)
class BlochMessiah:
    """``S = R1.T @ Dsq @ R2``.

    ``r2_droppable`` marks decompositions of effective evolutions acting on
    vacuum, where ``R2`` has no observable effect.
    """

    R1: np.ndarray
    Dsq: np.ndarray
    R2: np.ndarray
    residual: float
    r2_droppable: bool = False

    @property
    def m(self):
        return self.Dsq.shape[0] // 2

    @property
    def d(self):
        """Squeezing factors ``d_j >= 1``, descending."""
        return np.diag(self.Dsq)[: self.m].copy()

    @property
    def db(self):
        return to_db(self.d)

    def matrix(self, d=None):
        """Reassemble ``R1^T Dsq R2``, optionally with substituted factors ``d``."""
        D = self.Dsq if d is None else np.diag(np.concatenate([d, 1.0 / np.asarray(d)]))
        return self.R1.T @ D @ self.R2

    def to_json(self):
        return json.dumps({
            "layout": "qqpp",
            "R1": self.R1.tolist(),
            "Dsq_diagonal": np.diag(self.Dsq).tolist(),
            "R2": self.R2.tolist(),
            "residual": self.residual,
            "r2_droppable": self.r2_droppable,
        }, indent=1)

    def db_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "d", "dB"])
        for j, (d, db) in enumerate(zip(self.d, self.db)):
            w.writerow([j, repr(float(d)), repr(float(db))])
        return buf.getvalue()


def _positive_part(S):
    # polar decomposition via SVD: S = W s Vh, U = W Vh, P = Vh^T s Vh
    W, s, Vh = np.linalg.svd(S)
    return W @ Vh, (Vh.T * s) @ Vh, s, Vh


def bloch_messiah(S, tol=1e-8, pair_tol=1e-6) -> BlochMessiah:
    """Decompose a symplectic matrix.

    Args:
        S: ``2m x 2m`` symplectic matrix in qq..pp ordering.
        tol: gate on ``max|S J S^T - J|``.
        pair_tol: gate on the reciprocal pairing of singular values.

    Raises:
        NotSymplectic: ``S`` fails the symplectic gate.
        DecompositionFailure: singular values do not pair as ``(d, 1/d)``.
    """
    S = np.asarray(S, dtype=float)
    defect = symplectic_defect(S)
    scale = max(1.0, float(np.max(np.abs(S))) ** 2)
    if defect > tol * scale:
        raise NotSymplectic(defect)
    m = S.shape[0] // 2

    U, P, s, Vh = _positive_part(S)
    pairing = np.max(np.abs(np.log(s) + np.log(s[::-1])))
    if pairing > pair_tol:
        raise DecompositionFailure(f"singular values do not pair reciprocally (log defect {pairing:.3e})")

    # log P = V diag(log s) V^T is symmetric and Hamiltonian
    H = (Vh.T * np.log(s)) @ Vh
    H = (H + H.T) / 2
    A = (H[:m, :m] - H[m:, m:]) / 2
    B = (H[:m, m:] + H[m:, :m]) / 2
    lam, T = takagi(A + 1j * B, tol=1e-6)
    W = passive_from_unitary(T)

    R2 = W.T
    R1 = (U @ W).T
    Dsq = np.diag(np.concatenate([np.exp(lam), np.exp(-lam)]))
    recon = R1.T @ Dsq @ R2
    residual = float(np.linalg.norm(recon - S) / np.linalg.norm(S))
    return BlochMessiah(R1=R1, Dsq=Dsq, R2=R2, residual=residual)


def effective_evolution(S_V, S_0, tol=1e-8, pair_tol=1e-6) -> BlochMessiah:
    """Decompose ``S_ef = S_V S_0`` for state preparation ``S_0`` on vacuum.

    The returned record has ``r2_droppable=True``: on vacuum inputs only
    ``R1`` and ``Dsq`` need to be realized.
    """
    S_V, S_0 = np.asarray(S_V, dtype=float), np.asarray(S_0, dtype=float)
    if S_V.shape != S_0.shape:
        raise ValueError(f"shape mismatch {S_V.shape} vs {S_0.shape}")
    for name, M in (("S_V", S_V), ("S_0", S_0)):
        d = symplectic_defect(M)
        if d > tol * max(1.0, float(np.max(np.abs(M))) ** 2):
            raise NotSymplectic(d)
    bm = bloch_messiah(S_V @ S_0, tol=tol, pair_tol=pair_tol)
    return BlochMessiah(bm.R1, bm.Dsq, bm.R2, bm.residual, r2_droppable=True)
