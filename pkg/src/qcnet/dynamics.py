"""Normal modes, exact symplectic propagators and Gaussian-state evolution.

Quadratures are renormalized by the bare frequencies,
``q = sqrt(omega) q'`` and ``p = p' / sqrt(omega)``, so that an uncoupled
oscillator evolves by a plain phase-space rotation. The network Hamiltonian
``p'^T p'/2 + q'^T A q'`` is diagonalized as ``A = K diag(Omega^2 / 2) K^T``;
``T1`` and ``T2`` map normal-mode quadratures back to bare ones,
``q = T1 Q`` and ``p = T2 P``.

Units are natural (hbar = k_B = 1); the vacuum covariance is ``I/2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .netgraph import OscillatorNetwork
from .symplectic import symplectic_eigenvalues

__all__ = [
    "UnstableNetwork",
    "DimensionMismatch",
    "NegativeTemperature",
    "NetworkModes",
    "Probe",
    "ExtendedModes",
    "GaussianState",
    "build_modes",
    "propagator",
    "extend_with_probes",
    "extended_propagator",
    "evolve",
    "ground_state",
    "thermal_state",
    "mean_photon",
    "total_energy",
    "thermal_variance",
]


class UnstableNetwork(ValueError):
    """The potential matrix is not positive definite (imaginary normal frequency)."""


class DimensionMismatch(ValueError):
    pass


class NegativeTemperature(ValueError):
    pass


def _canonical_eigh(M):
    """Ascending eigenpairs with each eigenvector's largest entry made positive."""
    w, U = np.linalg.eigh(M)
    idx = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[idx, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return w, U * signs


def _normal_frame(M, frame_freqs):
    """Diagonalize a potential matrix ``M = O diag(f^2/2) O^T``.

    Returns ``(O, f, O1, O2)`` with ``O1 = sqrt(F) O f^-1/2`` and
    ``O2 = F^-1/2 O f^1/2`` where ``F = diag(frame_freqs)`` is the frequency
    used to renormalize the quadratures of the frame.
    """
    lam, O = _canonical_eigh(M)
    scale = max(1.0, float(np.max(np.abs(lam))))
    if lam[0] <= 1e-14 * scale:
        raise UnstableNetwork(f"potential matrix has non-positive eigenvalue {lam[0]:.3e}")
    f = np.sqrt(2.0 * lam)
    sF = np.sqrt(frame_freqs)[:, None]
    sf = np.sqrt(f)[None, :]
    O1 = sF * O / sf
    O2 = O * sf / sF
    return O, f, O1, O2


@dataclass(frozen=True, eq=False)
class NetworkModes:
    """Normal-mode data of a network.

    Attributes:
        A: potential matrix, ``A_ii = omega_i^2/2 + sum_j v_ij/2``, ``A_ij = -v_ij/2``.
        K: orthogonal diagonalizer of ``A`` (columns = normal modes).
        Omega: normal-mode frequencies, ascending.
        T1, T2: ``q = T1 Q`` and ``p = T2 P``; ``T1 T2^T = I``.
        omega: bare frequencies.
    """

    A: np.ndarray
    K: np.ndarray
    Omega: np.ndarray
    T1: np.ndarray
    T2: np.ndarray
    omega: np.ndarray

    @property
    def n(self):
        return self.Omega.size

    def normal_to_bare(self):
        """``x = M X``: normal quadratures at a common time to bare ones."""
        Z = np.zeros_like(self.T1)
        return np.block([[self.T1, Z], [Z, self.T2]])

    def bare_to_normal(self):
        Z = np.zeros_like(self.T1)
        return np.block([[self.T2.T, Z], [Z, self.T1.T]])


def build_modes(net: OscillatorNetwork) -> NetworkModes:
    """Assemble ``A`` and its normal-mode decomposition.

    Raises:
        UnstableNetwork: if ``A`` has a non-positive eigenvalue.
    """
    V = net.V
    A = np.diag(net.omega**2 / 2 + V.sum(axis=1) / 2) - V / 2
    K, Omega, T1, T2 = _normal_frame(A, net.omega)
    return NetworkModes(A=A, K=K, Omega=Omega, T1=T1, T2=T2, omega=net.omega.copy())


def _check_time(t):
    t = float(t)
    if not np.isfinite(t):
        raise ValueError(f"evolution time must be finite, got {t}")
    return t


def _rotating_blocks(f, t):
    return np.diag(np.cos(f * t)), np.diag(np.sin(f * t))


def propagator(modes: NetworkModes, t: float, picture: str = "bare") -> np.ndarray:
    """Symplectic evolution of the network quadratures over time ``t``.

    ``picture="bare"`` maps ``x(0)`` to ``x(t)``; ``picture="normal"`` maps the
    normal-mode quadratures ``X(0)`` to the bare ``x(t)``.
    """
    t = _check_time(t)
    C, S = _rotating_blocks(modes.Omega, t)
    T1, T2 = modes.T1, modes.T2
    if picture == "normal":
        return np.block([[T1 @ C, T1 @ S], [-T2 @ S, T2 @ C]])
    if picture != "bare":
        raise ValueError(f"unknown picture {picture!r}; use 'bare' or 'normal'")
    # T1^-1 = T2^T and T2^-1 = T1^T
    return np.block([[T1 @ C @ T2.T, T1 @ S @ T1.T], [-T2 @ S @ T2.T, T2 @ C @ T1.T]])


@dataclass(frozen=True)
class Probe:
    """An extra oscillator of frequency ``omega_s`` linked with strength ``k``
    to one or more network ``nodes``."""

    omega_s: float
    k: float
    nodes: tuple[int, ...]

    @classmethod
    def coerce(cls, p):
        if isinstance(p, Probe):
            return p
        omega_s, k, nodes = p
        nodes = (int(nodes),) if np.isscalar(nodes) else tuple(int(i) for i in nodes)
        return cls(float(omega_s), float(k), nodes)


@dataclass(frozen=True, eq=False)
class ExtendedModes:
    """Network plus attached probe oscillators.

    ``B`` is the potential matrix in bare primed coordinates
    ``(q'_1..q'_N, q'_S1..q'_SM)``; ``O`` diagonalizes it with frequencies
    ``f``. ``O1``/``O2`` act in the mixed frame
    ``X = (Q_1..Q_N, q_S1..q_SM, P_1..P_N, p_S1..p_SM)`` of network normal
    modes plus bare probe quadratures.
    """

    B: np.ndarray
    O: np.ndarray
    f: np.ndarray
    O1: np.ndarray
    O2: np.ndarray
    frame: np.ndarray
    probes: tuple[Probe, ...]
    modes: NetworkModes

    @property
    def n_network(self):
        return self.modes.n

    @property
    def dim(self):
        return self.f.size

    def probe_index(self, r=0):
        """Mode index of probe ``r`` in the mixed frame."""
        return self.n_network + r

    def frame_to_bare(self):
        """Map mixed-frame quadratures to bare renormalized ones ``(q, q_S, p, p_S)``."""
        N, M = self.n_network, len(self.probes)
        T1 = np.eye(N + M)
        T2 = np.eye(N + M)
        T1[:N, :N] = self.modes.T1
        T2[:N, :N] = self.modes.T2
        Z = np.zeros_like(T1)
        return np.block([[T1, Z], [Z, T2]])


def extend_with_probes(net: OscillatorNetwork, probes: Sequence, modes: NetworkModes | None = None) -> ExtendedModes:
    """Attach probe oscillators with coupling ``-k q_S q_i / sqrt(omega_S omega_i)``.

    The coupling enters the potential like a network link: ``-k/2`` off the
    diagonal and ``+k/2`` on the diagonal of both ends.

    Args:
        probes: sequence of :class:`Probe` or ``(omega_s, k, node_or_nodes)``.
    """
    modes = build_modes(net) if modes is None else modes
    probes = tuple(Probe.coerce(p) for p in probes)
    N, M = net.n, len(probes)
    B = np.zeros((N + M, N + M))
    B[:N, :N] = modes.A
    for r, pr in enumerate(probes):
        s = N + r
        if not pr.omega_s > 0:
            raise ValueError(f"probe {r}: frequency must be positive")
        if pr.k < 0:
            raise ValueError(f"probe {r}: coupling must be non-negative")
        B[s, s] += pr.omega_s**2 / 2
        for i in pr.nodes:
            if not 0 <= i < N:
                raise IndexError(f"probe {r}: node {i} outside network of size {N}")
            B[i, i] += pr.k / 2
            B[s, s] += pr.k / 2
            B[i, s] -= pr.k / 2
            B[s, i] -= pr.k / 2
    O, f, _, _ = _normal_frame(B, np.ones(N + M))
    Kext = np.eye(N + M)
    Kext[:N, :N] = modes.K
    frame = np.concatenate([modes.Omega, [p.omega_s for p in probes]])
    OX = Kext.T @ O
    sF = np.sqrt(frame)[:, None]
    sf = np.sqrt(f)[None, :]
    return ExtendedModes(B=B, O=O, f=f, O1=sF * OX / sf, O2=OX * sf / sF,
                         frame=frame, probes=probes, modes=modes)


def extended_propagator(ext: ExtendedModes, t: float) -> np.ndarray:
    """Symplectic evolution of the mixed-frame quadratures ``X`` over time ``t``."""
    t = _check_time(t)
    C, S = _rotating_blocks(ext.f, t)
    O1, O2 = ext.O1, ext.O2
    return np.block([[O1 @ C @ O2.T, O1 @ S @ O1.T], [-O2 @ S @ O2.T, O2 @ C @ O1.T]])


@dataclass(frozen=True, eq=False)
class GaussianState:
    """First and second moments of ``m`` bosonic modes (vacuum cov = I/2)."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        cov = np.array(self.cov, dtype=float)
        mean = np.array(self.mean, dtype=float).reshape(-1)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise DimensionMismatch(f"covariance must be 2m x 2m, got {cov.shape}")
        if mean.size != cov.shape[0]:
            raise DimensionMismatch(f"mean has {mean.size} entries, covariance is {cov.shape}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", (cov + cov.T) / 2)

    @property
    def m(self):
        return self.cov.shape[0] // 2

    @classmethod
    def vacuum(cls, m):
        return cls(np.zeros(2 * m), np.eye(2 * m) / 2)

    def symplectic_eigenvalues(self):
        return symplectic_eigenvalues(self.cov)

    def is_physical(self, tol=1e-9):
        return bool(np.min(self.symplectic_eigenvalues()) >= 0.5 - tol)

    def is_pure(self, tol=1e-9):
        return bool(np.max(np.abs(self.symplectic_eigenvalues() - 0.5)) < tol)

    def reduced(self, modes):
        modes = np.atleast_1d(np.asarray(modes, dtype=int))
        idx = np.concatenate([modes, modes + self.m])
        return GaussianState(self.mean[idx], self.cov[np.ix_(idx, idx)])


def evolve(state: GaussianState, S: np.ndarray) -> GaussianState:
    """Push a Gaussian state through the linear map ``x -> S x``."""
    S = np.asarray(S)
    if S.shape != state.cov.shape:
        raise DimensionMismatch(f"symplectic {S.shape} does not act on state of dimension {state.cov.shape}")
    return GaussianState(S @ state.mean, S @ state.cov @ S.T)


def thermal_variance(freqs, T):
    """Quadrature variance ``coth(f / 2T) / 2`` of thermal modes (1/2 at T=0)."""
    freqs = np.asarray(freqs, dtype=float)
    if T < 0:
        raise NegativeTemperature(f"temperature must be >= 0, got {T}")
    if T == 0:
        return np.full(freqs.shape, 0.5)
    return 0.5 / np.tanh(freqs / (2.0 * T))


def _normal_mode_state(T1, T2, freqs, T):
    nu = thermal_variance(freqs, T)
    Z = np.zeros_like(T1)
    cov = np.block([[(T1 * nu) @ T1.T, Z], [Z, (T2 * nu) @ T2.T]])
    return GaussianState(np.zeros(cov.shape[0]), cov)


def ground_state(modes: NetworkModes | ExtendedModes) -> GaussianState:
    """Ground state of the network (or of network plus probes, in the mixed frame)."""
    return thermal_state(modes, 0.0)


def thermal_state(modes: NetworkModes | ExtendedModes, T: float) -> GaussianState:
    """Gibbs state at temperature ``T``: each normal mode has variance ``coth(f/2T)/2``."""
    if isinstance(modes, ExtendedModes):
        return _normal_mode_state(modes.O1, modes.O2, modes.f, T)
    return _normal_mode_state(modes.T1, modes.T2, modes.Omega, T)


def mean_photon(state: GaussianState, mode: int) -> float:
    """``<n> = (<q^2> + <p^2>)/2 - 1/2`` for one mode."""
    m = state.m
    if not -m <= mode < m:
        raise IndexError(f"mode {mode} outside state of {m} modes")
    mode %= m
    q, p = mode, mode + m
    second = state.cov[q, q] + state.mean[q] ** 2 + state.cov[p, p] + state.mean[p] ** 2
    return float(second / 2 - 0.5)


def total_energy(state: GaussianState, modes: NetworkModes) -> float:
    """Expectation of ``sum_j Omega_j (P_j^2 + Q_j^2)/2`` in ``state`` (bare quadratures)."""
    if state.m != modes.n:
        raise DimensionMismatch(f"state has {state.m} modes, network has {modes.n}")
    M = modes.bare_to_normal()
    second = M @ (state.cov + np.outer(state.mean, state.mean)) @ M.T
    d = np.diag(second)
    n = modes.n
    return float(np.sum(modes.Omega * (d[:n] + d[n:])) / 2)
