"""Probing a network through attached oscillators.

Two protocols are implemented:

* spectral density: a weakly coupled, initially squeezed probe exchanges
  energy with the network; the decay of its photon number at probe
  frequency ``w_S`` estimates ``J(w_S) = (w_S / t) ln[(N - n(0)) / (N - n(t))]``
  with ``N`` the thermal occupation at ``w_S``.
* entropy: the von Neumann entropy of single nodes, or of a probe attached
  to a growing set of nodes, separates network classes.

Finite temperature is prepared by purification: every normal mode is
two-mode squeezed with a copy so that tracing out the copies leaves the
Gibbs state.
"""
from __future__ import annotations

import csv
import io
import logging
import warnings
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.special import xlogy

from .blochmessiah import effective_evolution, from_db
from .dynamics import (
    GaussianState,
    NegativeTemperature,
    build_modes,
    evolve,
    extend_with_probes,
    extended_propagator,
    ground_state,
    mean_photon,
    thermal_state,
    thermal_variance,
)
from .netgraph import OscillatorNetwork, degrees
from .optics import (
    CrystalModel,
    FrequencyGrid,
    OptimizerConfig,
    calibrated_db,
    gaussian_pump,
    optimize_pump,
    squeezing_spectrum,
)
from .symplectic import beamsplitter, direct_sum, embed, squeezer

log = logging.getLogger(__name__)

__all__ = [
    "UnphysicalCovariance",
    "ProbeSpec",
    "SpectralDensitySample",
    "ExperimentalMode",
    "thermal_average_boson_number",
    "two_mode_squeezer",
    "thermal_purification",
    "purify_thermal",
    "probe_spectral_density",
    "convergence_check",
    "reference_spectral_density",
    "node_entropy",
    "entropy_by_connectivity",
    "connectivity_table",
    "probe_entropy_protocol",
    "nested_subsets",
    "curve_distance",
    "sweep_csv",
    "entropy_csv",
]

WEAK_COUPLING = 0.01


class UnphysicalCovariance(ValueError):
    pass


def thermal_average_boson_number(omega, T):
    """Bose-Einstein occupation ``1 / (e^{w/T} - 1)``; zero at ``T = 0``."""
    if T < 0:
        raise NegativeTemperature(f"temperature must be >= 0, got {T}")
    if T == 0:
        return 0.0 * np.asarray(omega, dtype=float) if np.ndim(omega) else 0.0
    return 1.0 / np.expm1(np.asarray(omega, dtype=float) / T)


@dataclass(frozen=True)
class ProbeSpec:
    """Probe settings for the spectral-density protocol.

    ``node`` is an index or a tuple of indices; ``r0`` the initial probe
    squeezing that gives it ``<n(0)> = sinh^2 r0`` photons.
    """

    omega_s: float = 0.25
    k: float = 0.005
    node: int | tuple[int, ...] = 0
    t: float = 200.0
    T: float = 0.0
    r0: float = 1.0

    def validate(self):
        if not self.k > 0:
            raise ValueError("probe coupling k must be positive")
        if not self.omega_s > 0:
            raise ValueError("probe frequency must be positive")
        if not self.t > 0:
            raise ValueError("interaction time must be positive")
        if self.T < 0:
            raise NegativeTemperature(f"temperature must be >= 0, got {self.T}")
        if self.k > WEAK_COUPLING:
            warnings.warn(f"k={self.k} is outside the weak-coupling regime k < {WEAK_COUPLING}", stacklevel=3)
        return self


@dataclass(frozen=True)
class SpectralDensitySample:
    omega_s: float
    J: float
    n0: float
    nt: float
    N_thermal: float
    valid: bool = True


@dataclass
class ExperimentalMode:
    """Replace the exact squeezing by what the optical setup can produce.

    With ``optimizer=None`` the pump is the unshaped Gaussian; otherwise the
    pump is optimized once, against the target of the first frequency in the
    sweep, and reused (the target barely moves with ``w_S`` at weak coupling).
    Either way the gain is recalibrated so the top value matches each target.
    """

    crystal: CrystalModel = field(default_factory=CrystalModel)
    grid: FrequencyGrid = field(default_factory=FrequencyGrid)
    optimizer: OptimizerConfig | None = None
    seed: int = 0
    shape: np.ndarray | None = None

    def achievable_db(self, target_db):
        if self.shape is None:
            if self.optimizer is None:
                lam = squeezing_spectrum(gaussian_pump(self.grid, OptimizerConfig().pump_sigma), self.crystal, self.grid)
            else:
                res = optimize_pump(target_db, self.crystal, self.grid, self.optimizer, self.seed)
                lam = res.achieved_db
            self.shape = np.asarray(lam) / lam[0]
        return calibrated_db(self.shape, target_db)


def two_mode_squeezer(r):
    """Two-mode squeezer built as rotation, opposite single-mode squeezings, rotation back."""
    bs = beamsplitter(np.pi / 4)
    return bs @ squeezer([r, -r]) @ bs.T


def thermal_purification(freqs, T):
    """Symplectic that maps vacuum on ``2n`` modes to a purified thermal state.

    Mode ``j`` is paired with copy ``n + j``; each pair is two-mode squeezed
    with ``cosh 2r_j = coth(f_j / 2T)``. The first ``n`` modes are in the
    frame where the thermal state is diagonal (normal modes).

    Returns ``(S, r)``.
    """
    freqs = np.asarray(freqs, dtype=float)
    n = freqs.size
    r = np.arccosh(2 * thermal_variance(freqs, T)) / 2
    S = np.eye(4 * n)
    for j in range(n):
        S = embed(two_mode_squeezer(r[j]), [j, n + j], 2 * n) @ S
    return S, r


def purify_thermal(net: OscillatorNetwork, T: float, modes=None) -> GaussianState:
    """Pure ``2N``-mode state whose first ``N`` modes are the network Gibbs state.

    The first ``N`` modes are the network's bare quadratures, the last ``N``
    the ancillary copies (one per normal mode).
    """
    modes = build_modes(net) if modes is None else modes
    S, _ = thermal_purification(modes.Omega, T)
    to_bare = direct_sum(modes.normal_to_bare(), np.eye(2 * modes.n))
    return evolve(GaussianState.vacuum(2 * modes.n), to_bare @ S)


def _initial_probe_state(ext, T, r0):
    # network thermal in its normal modes, probe squeezed vacuum
    N = ext.n_network
    nu = np.concatenate([thermal_variance(ext.modes.Omega, T), [0.5]])
    cov = np.diag(np.concatenate([nu, nu]))
    state = GaussianState(np.zeros(2 * (N + 1)), cov)
    return evolve(state, embed(squeezer(r0), [N], N + 1))


def _exact_sample(net, modes, spec, omega_s):
    ext = extend_with_probes(net, [(omega_s, spec.k, spec.node)], modes=modes)
    S = extended_propagator(ext, spec.t)
    state0 = _initial_probe_state(ext, spec.T, spec.r0)
    p = ext.probe_index()
    return mean_photon(state0, p), mean_photon(evolve(state0, S), p)


def _experimental_sample(net, modes, spec, omega_s, exp: ExperimentalMode):
    ext = extend_with_probes(net, [(omega_s, spec.k, spec.node)], modes=modes)
    N = ext.n_network
    S = extended_propagator(ext, spec.t)
    S0 = embed(squeezer(spec.r0), [N], N + 1)
    if spec.T > 0:
        # purify the network thermal state with N ancillary copies
        P, _ = thermal_purification(modes.Omega, spec.T)
        order = list(range(N)) + list(range(N + 1, 2 * N + 1))
        lift = np.eye(2 * (2 * N + 1))
        idx = np.concatenate([order, np.array(order) + 2 * N + 1])
        lift[np.ix_(idx, idx)] = P
        S = direct_sum(S, np.eye(2 * N))
        S0 = direct_sum(S0, np.eye(2 * N)) @ lift
    bm = effective_evolution(S, S0)
    d_ex = from_db(exp.achievable_db(bm.db)[: bm.m])
    cov = bm.R1.T @ np.diag(np.concatenate([d_ex, 1 / d_ex]) ** 2) @ bm.R1 / 2
    nt = mean_photon(GaussianState(np.zeros(cov.shape[0]), cov), N)
    n0 = float(np.sinh(spec.r0) ** 2)
    return n0, nt


def _estimate(omega_s, t, n0, nt, N_th):
    num, den = N_th - n0, N_th - nt
    if abs(den) < 1e-12 or num / den <= 0:
        return float("nan"), False
    return float(omega_s / t * np.log(num / den)), True


def probe_spectral_density(net: OscillatorNetwork, spec: ProbeSpec, omega_list,
                           mode="exact") -> list[SpectralDensitySample]:
    """Sweep the probe frequency and estimate ``J(w_S)`` at each point.

    Args:
        mode: ``"exact"`` evolves the full covariance; an
            :class:`ExperimentalMode` reassembles the evolution from the
            Bloch-Messiah interferometer with achievable squeezing.

    Samples where the logarithm is undefined are returned with
    ``valid=False`` and ``J = nan``; the sweep continues.
    """
    spec.validate()
    modes = build_modes(net)
    out = []
    for w in np.asarray(omega_list, dtype=float):
        if mode == "exact":
            n0, nt = _exact_sample(net, modes, spec, w)
        elif isinstance(mode, ExperimentalMode):
            n0, nt = _experimental_sample(net, modes, spec, w, mode)
        else:
            raise ValueError(f"unknown mode {mode!r}")
        N_th = float(thermal_average_boson_number(w, spec.T))
        J, ok = _estimate(w, spec.t, n0, nt, N_th)
        if not ok:
            log.warning("J undefined at omega_s=%g (n(t)=%g, N=%g)", w, nt, N_th)
        out.append(SpectralDensitySample(float(w), J, n0, nt, N_th, ok))
    return out


def convergence_check(net: OscillatorNetwork, spec: ProbeSpec, omega_list, factor=1.5, tol=0.05):
    """Compare a sweep at ``spec.t`` with one at ``factor * spec.t``.

    Returns ``(change, converged)`` where ``change`` is the relative L2
    change of the valid part of the curve. For a finite network the curve
    keeps sharpening around the normal frequencies, so long sweeps need not
    pass; the check flags interaction times that are too short.
    """
    a = np.array([s.J for s in probe_spectral_density(net, spec, omega_list)])
    b = np.array([s.J for s in probe_spectral_density(net, replace(spec, t=spec.t * factor), omega_list)])
    ok = np.isfinite(a) & np.isfinite(b)
    norm = np.linalg.norm(a[ok])
    change = float(np.linalg.norm(b[ok] - a[ok]) / norm) if norm > 0 else float("inf")
    return change, change <= tol


def reference_spectral_density(net: OscillatorNetwork, node, k, broadening, omega_list, modes=None):
    """Lorentzian-broadened discrete spectral density seen from ``node``.

    ``J(w) = sum_j (pi k^2 / 2) c_j^2 / Omega_j * Lor(w - Omega_j)`` with
    ``c_j`` the normal-mode amplitude on the probed node(s) and ``Lor`` a
    unit-area Lorentzian of half-width ``broadening``. This is the
    golden-rule rate that the probe estimate converges to at weak coupling
    and long times.
    """
    if not broadening > 0:
        raise ValueError("broadening must be positive")
    modes = build_modes(net) if modes is None else modes
    nodes = np.atleast_1d(np.asarray(node, dtype=int))
    c = modes.K[nodes].sum(axis=0)
    weights = np.pi * k**2 / 2 * c**2 / modes.Omega
    w = np.asarray(omega_list, dtype=float)[:, None]
    lor = broadening / np.pi / ((w - modes.Omega[None, :]) ** 2 + broadening**2)
    return lor @ weights


def node_entropy(state: GaussianState, node: int) -> float:
    """Von Neumann entropy (nats) of one mode from its 2x2 covariance.

    Raises:
        UnphysicalCovariance: ``sqrt(det sigma) < 1/2`` beyond tolerance.
    """
    red = state.reduced([node]).cov
    alpha, beta, gamma = red[0, 0], red[1, 1], red[0, 1]
    mu2 = alpha * beta - gamma**2
    mu = np.sqrt(max(mu2, 0.0))
    if mu < 0.5 - 1e-9:
        raise UnphysicalCovariance(f"symplectic eigenvalue {mu:.12f} below 1/2 on node {node}")
    mu = max(mu, 0.5)
    return float(xlogy(mu + 0.5, mu + 0.5) - xlogy(mu - 0.5, mu - 0.5))


def _state(net, T, modes=None):
    modes = build_modes(net) if modes is None else modes
    return thermal_state(modes, T)


def connectivity_table(net: OscillatorNetwork, T: float = 0.0, weighted: bool = False):
    """Rows ``(h, mean S, std S, count)`` grouping nodes by degree ``h``."""
    state = _state(net, T)
    keys = net.V.sum(axis=1).round(12) if weighted else degrees(net)
    groups = defaultdict(list)
    for i, h in enumerate(keys):
        groups[float(h) if weighted else int(h)].append(node_entropy(state, i))
    return [(h, float(np.mean(s)), float(np.std(s)), len(s)) for h, s in sorted(groups.items())]


def entropy_by_connectivity(net: OscillatorNetwork, T: float = 0.0, weighted: bool = False) -> dict:
    """Average single-node entropy ``<S_h>`` over nodes of equal degree ``h``."""
    return {h: s for h, s, _, _ in connectivity_table(net, T, weighted)}


def probe_entropy_protocol(net: OscillatorNetwork, omega_s: float, k: float, h_list):
    """Entropy of a probe coupled to each node subset, in the joint ground state.

    Returns ``[(h, S_probe), ...]`` with ``h`` the subset size.
    """
    modes = build_modes(net)
    out = []
    for subset in h_list:
        subset = tuple(int(i) for i in subset)
        if not subset:
            out.append((0, 0.0))
            continue
        ext = extend_with_probes(net, [(omega_s, k, subset)], modes=modes)
        out.append((len(subset), node_entropy(ground_state(ext), ext.probe_index())))
    return out


def nested_subsets(order: Sequence[int], h_max: int):
    """``[order[:0], order[:1], ..., order[:h_max]]``."""
    return [tuple(order[:h]) for h in range(h_max + 1)]


def curve_distance(a, b):
    """Root-mean-square difference of two curves sampled on the same grid."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.sqrt(np.mean((a - b) ** 2)))


def sweep_csv(samples: Sequence[SpectralDensitySample], header_lines=()):
    """Sweep table ``omega_s, J, J_normalized, n0, nt, N_thermal, valid_flag``."""
    J = np.array([s.J for s in samples], dtype=float)
    finite = J[np.isfinite(J)]
    peak = np.max(np.abs(finite)) if finite.size and np.max(np.abs(finite)) > 0 else 1.0
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["omega_s", "J", "J_normalized", "n0", "nt", "N_thermal", "valid_flag"])
    for s in samples:
        w.writerow([*(repr(float(x)) for x in (s.omega_s, s.J, s.J / peak, s.n0, s.nt, s.N_thermal)),
                    "true" if s.valid else "false"])
    return buf.getvalue()


def entropy_csv(rows, header_lines=()):
    """Entropy table ``h, S_mean, S_std, count``."""
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["h", "S_mean", "S_std", "count"])
    for row in rows:
        h, m = row[0], row[1]
        std = row[2] if len(row) > 2 else 0.0
        count = row[3] if len(row) > 3 else 1
        w.writerow([h, repr(float(m)), repr(float(std)), count])
    return buf.getvalue()
