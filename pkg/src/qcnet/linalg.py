"""Autonne-Takagi factorization of complex symmetric matrices."""
from __future__ import annotations

import numpy as np

__all__ = ["takagi", "TakagiError"]


class TakagiError(ValueError):
    pass


def _canonical_phase(U):
    # fix the +/-1 ambiguity: real part of each column's largest entry positive
    idx = np.argmax(np.abs(U), axis=0)
    lead = U[idx, np.arange(U.shape[1])]
    signs = np.where(lead.real < 0, -1.0, 1.0)
    return U * signs


def _unitarize(U):
    u, _, vh = np.linalg.svd(U)
    return u @ vh


def takagi(Z, tol=1e-12, zero_tol=None):
    r"""Factor ``Z = U diag(lam) U^T`` with ``U`` unitary and ``lam`` descending.

    Works on the real symmetric doubling ``[[Re Z, Im Z], [Im Z, -Re Z]]``,
    whose eigenvalues come in pairs :math:`\pm\lambda_j`. Each eigenvector
    ``(x, y)`` with positive eigenvalue gives a Takagi vector ``x + i y``.
    The null space is spanned by a complex orthonormal basis drawn from the
    near-zero eigenvectors, then the whole of ``U`` is re-unitarized.

    Args:
        Z: square complex symmetric matrix.
        tol: relative symmetry tolerance ``|Z - Z^T| / max(1, |Z|)``.
        zero_tol: eigenvalues below this are treated as exactly zero;
            defaults to ``1e-12 * max(1, |Z|)``.

    Returns:
        ``(lam, U)``.
    """
    Z = np.asarray(Z, dtype=complex)
    n = Z.shape[0]
    if Z.ndim != 2 or Z.shape[1] != n:
        raise TakagiError("input must be a square matrix")
    if not np.all(np.isfinite(Z)):
        raise TakagiError("input has non-finite entries")
    scale = max(1.0, float(np.linalg.norm(Z, 2)) if n else 1.0)
    if np.linalg.norm(Z - Z.T) > tol * scale:
        raise TakagiError(f"input is not symmetric (defect {np.linalg.norm(Z - Z.T):.3e})")
    Z = (Z + Z.T) / 2
    if zero_tol is None:
        zero_tol = 1e-12 * scale

    H = np.block([[Z.real, Z.imag], [Z.imag, -Z.real]])
    w, W = np.linalg.eigh(H)
    order = np.argsort(-w, kind="stable")
    w, W = w[order], W[:, order]

    n_pos = min(int(np.sum(w > zero_tol)), n)
    lam = np.zeros(n)
    lam[:n_pos] = w[:n_pos]
    cols = [W[:n, :n_pos] + 1j * W[n:, :n_pos]]

    n_zero = n - n_pos
    if n_zero:
        near = np.abs(w) <= zero_tol
        cand = W[:n, near] + 1j * W[n:, near]
        if cand.shape[1] < n_zero:
            # pairing broke down numerically; fall back to the smallest |w|
            pick = np.argsort(np.abs(w))[: 2 * n_zero]
            cand = W[:n, pick] + 1j * W[n:, pick]
        # project out the non-null directions before extracting a basis
        Up = cols[0]
        cand = cand - Up @ (Up.conj().T @ cand)
        u, _, _ = np.linalg.svd(cand, full_matrices=False)
        cols.append(u[:, :n_zero])
    U = _unitarize(np.concatenate(cols, axis=1))
    return lam, _canonical_phase(U)
