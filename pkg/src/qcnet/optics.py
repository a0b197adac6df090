"""Frequency-comb parametric down-conversion: supermodes, pump shaping, LO shapes.

The comb is coarse-grained into a uniform angular-frequency grid of signal
bins around a center wavelength. Down-conversion couples signal bins
``m`` and ``n`` through the joint spectrum

    L[m, n] = f(w_m - w_n) * alpha_p(w_m + w_n),

with a Gaussian phase-matching function of width ``c_pm / length`` and the
pump amplitude ``alpha_p`` sampled on the sum-frequency grid. The Takagi
factorization of ``L`` gives the supermodes and their squeezing.
"""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, asdict

import numpy as np

from .linalg import takagi

log = logging.getLogger(__name__)

__all__ = [
    "C_NM_PER_FS",
    "FrequencyGrid",
    "CrystalModel",
    "PumpShape",
    "JointSpectrum",
    "Supermodes",
    "OptimizerConfig",
    "OptimizationResult",
    "GridMismatch",
    "InfeasibleTarget",
    "gaussian_pump",
    "pump_from_pixels",
    "joint_spectrum",
    "takagi_supermodes",
    "squeezing_spectrum",
    "calibrated_db",
    "relative_distance",
    "optimize_pump",
    "lo_shape",
    "rms_width",
    "spectral_csv",
]

C_NM_PER_FS = 299.792458

# phase-matching width times crystal length, rad/fs * mm; see README for calibration
DEFAULT_C_PM = 0.002
DEFAULT_PUMP_SIGMA = 0.055


class GridMismatch(ValueError):
    pass


class InfeasibleTarget(ValueError):
    pass


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform angular-frequency grid of signal bins.

    ``span_nm`` of wavelength around ``center_nm`` is converted to an
    angular-frequency interval sampled at ``bins`` points. The comb
    repetition rate is metadata only.
    """

    center_nm: float = 795.0
    span_nm: float = 60.0
    bins: int = 256
    rep_rate_mhz: float = 76.0

    def __post_init__(self):
        if self.bins < 2:
            raise ValueError("a frequency grid needs at least 2 bins")
        if not self.span_nm > 0 or not self.center_nm > self.span_nm / 2:
            raise ValueError("span must be positive and smaller than twice the center wavelength")

    @property
    def omega_center(self):
        return 2 * np.pi * C_NM_PER_FS / self.center_nm

    @property
    def offsets(self):
        """Signal angular-frequency offsets from the center, rad/fs."""
        lo = 2 * np.pi * C_NM_PER_FS / (self.center_nm + self.span_nm / 2)
        hi = 2 * np.pi * C_NM_PER_FS / (self.center_nm - self.span_nm / 2)
        half = (hi - lo) / 2
        return np.linspace(-half, half, self.bins)

    @property
    def d_omega(self):
        o = self.offsets
        return o[1] - o[0]

    @property
    def omega(self):
        return self.omega_center + self.offsets

    @property
    def pump_offsets(self):
        """Sum-frequency offsets ``(w_m + w_n) - 2 w_c`` indexed by ``m + n``."""
        return self.d_omega * (np.arange(2 * self.bins - 1) - (self.bins - 1))

    @property
    def wavelength_offsets_nm(self):
        return 2 * np.pi * C_NM_PER_FS / self.omega - self.center_nm


@dataclass(frozen=True)
class CrystalModel:
    """Nonlinear crystal of length ``length_mm`` with Gaussian phase matching."""

    length_mm: float = 1.5
    c_pm: float = DEFAULT_C_PM
    gain: float = 1.0

    def __post_init__(self):
        if not self.length_mm > 0:
            raise ValueError("crystal length must be positive")
        if not self.c_pm > 0:
            raise ValueError("phase-matching constant must be positive")

    @property
    def sigma_pm(self):
        return self.c_pm / self.length_mm

    def phase_matching(self, grid: FrequencyGrid):
        o = grid.offsets
        diff = o[:, None] - o[None, :]
        return np.exp(-diff**2 / (2 * self.sigma_pm**2))


@dataclass(frozen=True, eq=False)
class PumpShape:
    """Complex pump amplitude on the sum-frequency grid.

    ``pixels`` optionally holds the ``(amplitudes, phases)`` of the
    spectral mask that produced ``amplitude``.
    """

    amplitude: np.ndarray
    pixels: tuple | None = None

    def __post_init__(self):
        a = np.asarray(self.amplitude, dtype=complex)
        if not np.all(np.isfinite(a)):
            raise ValueError("pump amplitude must be finite")
        object.__setattr__(self, "amplitude", a)
        if self.pixels is not None:
            amps, phases = (np.asarray(x, dtype=float) for x in self.pixels)
            if np.any(amps < 0) or np.any(amps > 1):
                raise ValueError("pixel amplitudes must lie in [0, 1]")
            object.__setattr__(self, "pixels", (amps, phases))


def gaussian_pump(grid: FrequencyGrid, sigma=DEFAULT_PUMP_SIGMA, center=0.0) -> PumpShape:
    """Unshaped transform-limited pump of standard deviation ``sigma`` (rad/fs)."""
    x = grid.pump_offsets
    return PumpShape(np.exp(-((x - center) ** 2) / (2 * sigma**2)).astype(complex))


def _pixel_index(grid, sigma, n_pixels, window):
    x = grid.pump_offsets
    edges = np.linspace(-window * sigma, window * sigma, n_pixels + 1)
    idx = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, n_pixels - 1)
    return idx


def pump_from_pixels(grid: FrequencyGrid, amps, phases, sigma=DEFAULT_PUMP_SIGMA, window=2.5) -> PumpShape:
    """Gaussian pump passed through a piecewise-constant amplitude/phase mask.

    The ``len(amps)`` pixels tile ``[-window * sigma, window * sigma]``; the
    outermost pixels extend to the grid edges.
    """
    amps = np.asarray(amps, dtype=float)
    phases = np.asarray(phases, dtype=float)
    idx = _pixel_index(grid, sigma, amps.size, window)
    env = gaussian_pump(grid, sigma).amplitude
    return PumpShape(env * amps[idx] * np.exp(1j * phases[idx]), pixels=(amps, phases))


@dataclass(frozen=True, eq=False)
class JointSpectrum:
    L: np.ndarray
    grid: FrequencyGrid


def _hankel_index(bins):
    i = np.arange(bins)
    return i[:, None] + i[None, :]


def joint_spectrum(pump: PumpShape, crystal: CrystalModel, grid: FrequencyGrid) -> JointSpectrum:
    """``L[m, n] = f_mn * alpha_p(w_m + w_n)``; symmetric by construction."""
    if pump.amplitude.shape != (2 * grid.bins - 1,):
        raise GridMismatch(f"pump has {pump.amplitude.size} samples; grid needs {2 * grid.bins - 1}")
    L = crystal.phase_matching(grid) * pump.amplitude[_hankel_index(grid.bins)]
    return JointSpectrum(L, grid)


@dataclass(frozen=True, eq=False)
class Supermodes:
    """Takagi modes of a joint spectrum.

    ``modes[:, j]`` is supermode ``j`` sampled on the grid (unit discrete
    L2 norm); ``r`` the squeezing parameters ``gain * lambda_j``; ``db``
    the same in decibels (``20 log10 e^r``).
    """

    modes: np.ndarray
    lam: np.ndarray
    r: np.ndarray
    db: np.ndarray
    grid: FrequencyGrid | None = None

    @property
    def count(self):
        return self.lam.size


def takagi_supermodes(L, gain=1.0) -> Supermodes:
    """Supermodes and squeezing of a joint spectrum."""
    if not gain > 0:
        raise ValueError("gain must be positive")
    grid = L.grid if isinstance(L, JointSpectrum) else None
    M = L.L if isinstance(L, JointSpectrum) else np.asarray(L, dtype=complex)
    lam, U = takagi(M)
    r = gain * lam
    return Supermodes(modes=U, lam=lam, r=r, db=20 * np.log10(np.e) * r, grid=grid)


def squeezing_spectrum(pump: PumpShape, crystal: CrystalModel, grid: FrequencyGrid):
    """Takagi values (singular values) of ``L``, descending, without the modes."""
    return np.linalg.svd(joint_spectrum(pump, crystal, grid).L, compute_uv=False)


def calibrated_db(lam, target_db):
    """Scale a Takagi spectrum so its top value equals ``target_db[0]``."""
    lam = np.asarray(lam, dtype=float)
    if lam[0] <= 0:
        return np.zeros_like(lam)
    return float(target_db[0]) * lam / lam[0]


def relative_distance(achieved_db, target_db):
    """``|achieved - target| / |target|`` over the first ``len(target)`` entries."""
    t = np.asarray(target_db, dtype=float)
    a = np.asarray(achieved_db, dtype=float)[: t.size]
    nt = np.linalg.norm(t)
    if nt == 0:
        return float(np.linalg.norm(a))
    return float(np.linalg.norm(a - t) / nt)


@dataclass(frozen=True)
class OptimizerConfig:
    """(mu + lambda) evolution strategy over SLM pixel amplitudes and phases."""

    mu: int = 16
    lam: int = 64
    generations: int = 300
    n_pixels: int = 48
    sigma0: float = 0.1
    pump_sigma: float = DEFAULT_PUMP_SIGMA
    window: float = 2.5
    optimize_phase: bool = False
    # amplitude genes are log-amplitudes in [log_floor, 0]; None searches linear [0, 1]
    log_floor: float | None = -6.0
    # add super-Gaussian masks of several widths and orders to the first population
    structured_init: bool = True

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    pump: PumpShape
    achieved_db: np.ndarray
    objective: float
    baseline: float
    history: list
    gain: float

    def history_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["generation", "best_objective"])
        for g, v in enumerate(self.history):
            w.writerow([g, repr(float(v))])
        return buf.getvalue()


class _Objective:
    def __init__(self, target_db, crystal, grid, cfg):
        self.target = np.asarray(target_db, dtype=float)
        self.f = crystal.phase_matching(grid)
        self.idx = _hankel_index(grid.bins)
        self.pix = _pixel_index(grid, cfg.pump_sigma, cfg.n_pixels, cfg.window)
        self.env = gaussian_pump(grid, cfg.pump_sigma).amplitude.real
        self.n = cfg.n_pixels
        self.optimize_phase = cfg.optimize_phase
        self.log_amps = cfg.log_floor is not None

    def pump(self, x):
        amps, phases = x[: self.n], x[self.n:]
        if self.log_amps:
            amps = np.exp(amps)
        if not self.optimize_phase:
            return (self.env * amps[self.pix]).astype(complex)
        return self.env * amps[self.pix] * np.exp(1j * phases[self.pix])

    def spectra(self, X):
        pumps = np.stack([self.pump(x) for x in X])
        if not self.optimize_phase:
            # real joint spectrum: the real SVD is several times cheaper
            pumps = pumps.real
        L = self.f[None] * pumps[:, self.idx]
        return np.linalg.svd(L, compute_uv=False)

    def __call__(self, X):
        out = np.empty(len(X))
        for i, lam in enumerate(self.spectra(X)):
            out[i] = np.inf if lam[0] <= 0 else relative_distance(calibrated_db(lam, self.target), self.target)
        return out


def _super_gaussian_genes(opt: OptimizerConfig):
    """Masks turning the Gaussian envelope into ``exp(-|x / w|^p)`` pumps."""
    x = np.linspace(-opt.window, opt.window, 2 * opt.n_pixels + 1)[1::2]  # pixel centres, in pump sigmas
    floor = -6.0 if opt.log_floor is None else opt.log_floor
    out = []
    for p in (2.0, 4.0, 8.0, 20.0):
        for w in np.linspace(0.5, opt.window, 9):
            logm = np.maximum(x**2 / 2 - np.abs(x / w) ** p, floor)
            logm -= logm.max()
            amps = logm if opt.log_floor is not None else np.exp(logm)
            out.append(np.concatenate([amps, np.zeros(opt.n_pixels)]))
    return out


def optimize_pump(target_db, crystal: CrystalModel, grid: FrequencyGrid,
                  opt: OptimizerConfig | None = None, seed: int = 0) -> OptimizationResult:
    """Shape the pump so the calibrated squeezing spectrum approaches ``target_db``.

    A (mu + lambda) evolution strategy with self-adapted Gaussian step
    sizes searches pixel amplitudes (as log-amplitudes in
    ``[log_floor, 0]`` by default, else linearly in [0, 1]) and, optionally,
    phases in [0, 2 pi). The unshaped Gaussian pump is the first parent, so
    generation 0 already scores the baseline; with ``structured_init`` a
    family of super-Gaussian masks competes for the remaining parent slots.
    The gain is then fixed so the top achieved value equals the top target
    value.

    Returns an :class:`OptimizationResult`; ``history[g]`` is the best
    objective after generation ``g`` (non-increasing). Running out of
    generations is not an error.

    Raises:
        InfeasibleTarget: more target values than grid supermodes.
    """
    opt = OptimizerConfig() if opt is None else opt
    target = np.asarray(target_db, dtype=float)
    if target.ndim != 1 or target.size == 0:
        raise ValueError("target must be a non-empty 1-D list of dB values")
    if target.size > grid.bins:
        raise InfeasibleTarget(f"{target.size} target values but the grid only supports {grid.bins} supermodes")
    if opt.mu < 1 or opt.lam < 1 or opt.generations < 0:
        raise ValueError("optimizer needs mu >= 1, lam >= 1, generations >= 0")

    rng = np.random.default_rng(seed)
    objective = _Objective(target, crystal, grid, opt)
    n = opt.n_pixels
    dim = 2 * n
    tau = 1.0 / np.sqrt(2.0 * dim)
    scale = np.concatenate([np.ones(n), np.full(n, 2 * np.pi if opt.optimize_phase else 0.0)])

    def repair(x):
        if opt.log_floor is None:
            x[:n] = np.clip(x[:n], 0.0, 1.0)
        else:
            # the objective is scale-free, so pin the brightest pixel at full transmission
            x[:n] = np.clip(x[:n] - x[:n].max(), opt.log_floor, 0.0)
        x[n:] = np.mod(x[n:], 2 * np.pi)
        return x

    base = np.concatenate([np.zeros(n) if opt.log_floor is not None else np.ones(n), np.zeros(n)])
    parents = [base.copy()]
    steps = [opt.sigma0]
    while len(parents) < opt.mu:
        s = opt.sigma0 * np.exp(tau * rng.standard_normal())
        parents.append(repair(base + s * scale * rng.standard_normal(dim)))
        steps.append(s)
    if opt.structured_init:
        parents.extend(repair(x) for x in _super_gaussian_genes(opt))
        steps.extend([opt.sigma0] * (len(parents) - len(steps)))
    parents = np.array(parents)
    steps = np.array(steps)
    fit = objective(parents)
    baseline = float(fit[0])
    order = np.argsort(fit, kind="stable")
    parents, steps, fit = parents[order], steps[order], fit[order]
    parents, steps, fit = parents[: opt.mu], steps[: opt.mu], fit[: opt.mu]
    history = [float(fit[0])]

    for gen in range(opt.generations):
        pick = rng.integers(opt.mu, size=opt.lam)
        child_steps = steps[pick] * np.exp(tau * rng.standard_normal(opt.lam))
        children = parents[pick] + child_steps[:, None] * scale * rng.standard_normal((opt.lam, dim))
        children = np.array([repair(c) for c in children])
        child_fit = objective(children)
        pool = np.concatenate([parents, children])
        pool_steps = np.concatenate([steps, child_steps])
        pool_fit = np.concatenate([fit, child_fit])
        order = np.argsort(pool_fit, kind="stable")[: opt.mu]
        parents, steps, fit = pool[order], pool_steps[order], pool_fit[order]
        history.append(float(fit[0]))
        log.debug("generation %d best %.5f", gen, fit[0])

    best = parents[0]
    amps = np.exp(best[:n]) if opt.log_floor is not None else best[:n].copy()
    pump = PumpShape(objective.pump(best), pixels=(amps, best[n:].copy()))
    lam = objective.spectra([best])[0]
    achieved = calibrated_db(lam, target)
    gain = float(target[0] / (20 * np.log10(np.e) * lam[0])) if lam[0] > 0 else 0.0
    return OptimizationResult(pump=pump, achieved_db=achieved, objective=float(fit[0]),
                              baseline=baseline, history=history, gain=gain)


def lo_shape(R1, m, sp: Supermodes):
    """Local-oscillator spectrum addressing network node ``m``.

    Row ``m`` of ``R1^T`` weights supermode ``j`` with its q coefficient and
    ``i`` times its p coefficient.
    """
    R1 = np.asarray(R1, dtype=float)
    N = R1.shape[0] // 2
    if R1.shape != (2 * N, 2 * N):
        raise ValueError("R1 must be a square phase-space matrix")
    if not 0 <= m < N:
        raise IndexError(f"node {m} outside 0..{N - 1}")
    if sp.modes.shape[1] < N:
        raise ValueError(f"need {N} supermodes, have {sp.modes.shape[1]}")
    row = R1.T[m]
    SP = sp.modes[:, :N]
    return SP @ row[:N] + 1j * (SP @ row[N:])


def rms_width(u, x):
    """RMS width of ``|u|^2`` over the abscissa ``x``."""
    p = np.abs(u) ** 2
    p = p / p.sum()
    mu = np.sum(p * x)
    return float(np.sqrt(np.sum(p * (x - mu) ** 2)))


def spectral_csv(grid: FrequencyGrid, u):
    """CSV ``omega_offset_nm, real, imag`` for a pump mask or LO shape on ``grid``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["omega_offset_nm", "real", "imag"])
    u = np.asarray(u)
    if u.size == grid.bins:
        x = grid.wavelength_offsets_nm
    else:
        # pump grid: express as wavelength offset around half the signal center
        w_p = 2 * grid.omega_center + grid.pump_offsets
        x = 2 * np.pi * C_NM_PER_FS / w_p - grid.center_nm / 2
    for xi, ui in zip(x, u):
        w.writerow([repr(float(xi)), repr(float(ui.real)), repr(float(ui.imag))])
    return buf.getvalue()
