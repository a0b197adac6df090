"""End-to-end pipelines: network evolution mapped onto the optical setup.

Each ``figN`` function computes the data behind one reproduction target and
writes plot-ready files through an :class:`~qcnet.export.OutputDir`. The
heavy part is pump optimization, whose budget is set by the
:class:`~qcnet.optics.OptimizerConfig` passed in.
"""
from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass

import numpy as np

from .blochmessiah import bloch_messiah, effective_evolution, from_db
from .dynamics import GaussianState, build_modes, extend_with_probes, extended_propagator, mean_photon, propagator
from .export import OutputDir, matrix_record
from .fixtures import fixture
from .optics import (
    CrystalModel,
    FrequencyGrid,
    OptimizerConfig,
    gaussian_pump,
    joint_spectrum,
    lo_shape,
    optimize_pump,
    spectral_csv,
    takagi_supermodes,
)
from .probing import (
    ExperimentalMode,
    ProbeSpec,
    probe_spectral_density,
    reference_spectral_density,
    sweep_csv,
)
from .symplectic import embed, squeezer

__all__ = [
    "FIGURES",
    "PhotonReplay",
    "photon_number_replay",
    "vacuum_photon_numbers",
    "achieved_supermodes",
    "db_table_csv",
    "reproduce",
]

TIMES = (50.0, 150.0, 500.0, 999.0)
FIGURES = ("fig2", "fig3", "fig4", "fig5", "fig7", "fig9-like")
LO_NODE = 25  # the 26th oscillator


def vacuum_photon_numbers(R1, d):
    """Mean photon number of every output mode for ``R1^T Dsq`` acting on vacuum."""
    d = np.asarray(d, dtype=float)
    cov = R1.T @ np.diag(np.concatenate([d, 1 / d]) ** 2) @ R1 / 2
    state = GaussianState(np.zeros(cov.shape[0]), cov)
    return np.array([mean_photon(state, i) for i in range(d.size)])


@dataclass(frozen=True, eq=False)
class PhotonReplay:
    target_db: np.ndarray
    achieved_db: np.ndarray
    n_exact: np.ndarray
    n_sim: np.ndarray
    objective: float
    baseline: float

    @property
    def relative_errors(self):
        return np.abs(self.n_sim - self.n_exact) / self.n_exact

    @property
    def mean_relative_error(self):
        return float(np.mean(self.relative_errors))


def photon_number_replay(net, t=50.0, crystal=None, grid=None, opt=None, seed=0, picture="normal", result=None):
    """Compare node photon numbers from exact and achievable squeezing.

    The network starts in vacuum of the chosen picture's input modes; the
    evolution is decomposed, the squeezing is replaced by what the optimized
    pump achieves, and per-node mean photon numbers are compared.
    """
    crystal = CrystalModel(1.5) if crystal is None else crystal
    grid = FrequencyGrid() if grid is None else grid
    bm = bloch_messiah(propagator(build_modes(net), t, picture))
    res = optimize_pump(bm.db, crystal, grid, opt, seed) if result is None else result
    d_ex = from_db(res.achieved_db[: bm.m])
    return PhotonReplay(
        target_db=bm.db,
        achieved_db=np.asarray(res.achieved_db[: bm.m]),
        n_exact=vacuum_photon_numbers(bm.R1, bm.d),
        n_sim=vacuum_photon_numbers(bm.R1, d_ex),
        objective=res.objective,
        baseline=res.baseline,
    )


def achieved_supermodes(result, crystal, grid):
    return takagi_supermodes(joint_spectrum(result.pump, crystal, grid), result.gain)


def db_table_csv(columns: dict):
    """Index plus one column per named dB list (padded with blanks)."""
    names = list(columns)
    length = max(len(v) for v in columns.values())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", *names])
    for i in range(length):
        w.writerow([i, *[repr(float(columns[k][i])) if i < len(columns[k]) else "" for k in names]])
    return buf.getvalue()


def _photon_csv(rep: PhotonReplay):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["node", "n_exact", "n_simulated", "relative_error"])
    for i, (a, b, e) in enumerate(zip(rep.n_exact, rep.n_sim, rep.relative_errors)):
        w.writerow([i, repr(float(a)), repr(float(b)), repr(float(e))])
    return buf.getvalue()


def _fig2(out: OutputDir, cfg):
    for fid in ("A", "B", "C"):
        modes = build_modes(fixture(fid))
        for t in TIMES:
            out.json(f"S_V_{fid}_t{int(t)}.json", matrix_record(propagator(modes, t), network=fid, t=t))


def _fig3(out: OutputDir, cfg):
    cols = {}
    for fid in ("A", "B", "C"):
        bm = bloch_messiah(propagator(build_modes(fixture(fid)), 50.0))
        cols[f"dB_{fid}"] = bm.db
        out.json(f"bm_{fid}_t50.json", {"layout": "qqpp", "network": fid, "t": 50.0, "R1": bm.R1,
                                        "Dsq_diagonal": np.diag(bm.Dsq), "R2": bm.R2, "residual": bm.residual})
    out.csv("bm_dB_t50.csv", db_table_csv(cols))


def _optimized_map(out, tag, net, t, picture, crystal, grid, opt, seed, with_photons=False):
    bm = bloch_messiah(propagator(build_modes(net), t, picture))
    res = optimize_pump(bm.db, crystal, grid, opt, seed)
    out.csv(f"dB_{tag}.csv", db_table_csv({"target": bm.db, "achieved": res.achieved_db[: bm.m]}))
    out.csv(f"optimizer_history_{tag}.csv", res.history_csv())
    sp = achieved_supermodes(res, crystal, grid)
    out.csv(f"lo_node26_{tag}.csv", spectral_csv(grid, lo_shape(bm.R1, LO_NODE, sp)))
    if with_photons:
        rep = photon_number_replay(net, t, crystal, grid, picture=picture, result=res)
        out.csv(f"photons_{tag}.csv", _photon_csv(rep))
        return rep
    return res


def _fig4(out: OutputDir, cfg):
    grid, opt, seed = cfg["grid"], cfg["optimizer"], cfg["seed"]
    for fid, length in (("A", 2.5), ("C", 1.5)):
        for t in TIMES:
            _optimized_map(out, f"{fid}_t{int(t)}", fixture(fid), t, "bare", CrystalModel(length), grid, opt, seed)


def _fig5(out: OutputDir, cfg):
    grid, opt, seed = cfg["grid"], cfg["optimizer"], cfg["seed"]
    for fid in ("A", "C"):
        _optimized_map(out, f"{fid}_normal_t50", fixture(fid), 50.0, "normal", CrystalModel(1.5), grid, opt, seed,
                       with_photons=True)


def _sweep_grid(net, pad=0.05, steps=60):
    Om = build_modes(net).Omega
    return np.linspace(max(Om.min() - pad, 1e-3), Om.max() + pad, steps)


def _fig7(out: OutputDir, cfg):
    spec = cfg["probe"]
    for fid in ("A", "B", "C"):
        net = fixture(fid)
        ws = _sweep_grid(net, steps=cfg["steps"])
        samples = probe_spectral_density(net, spec, ws)
        out.csv(f"jw_exact_{fid}.csv", sweep_csv(samples))
        ref = reference_spectral_density(net, spec.node, spec.k, cfg["broadening"], ws)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["omega_s", "J_reference", "J_reference_normalized"])
        for x, j in zip(ws, ref):
            w.writerow([repr(float(x)), repr(float(j)), repr(float(j / ref.max()))])
        out.csv(f"jw_reference_{fid}.csv", "# broadened discrete-mode reference curve\n" + buf.getvalue())
        if cfg.get("experimental"):
            exp = ExperimentalMode(CrystalModel(1.5), cfg["grid"], None)
            out.csv(f"jw_gaussian_pump_{fid}.csv", sweep_csv(probe_spectral_density(net, spec, ws, exp)))


def _fig9(out: OutputDir, cfg):
    """Probe-measurement targets on the periodic chain.

    Target squeezing of ``S(t) Delta'`` for ten probe frequencies, the
    squeezing achievable with an unshaped and an optimized pump, and the LO
    spectrum addressing the probe at three frequencies.
    """
    spec, grid, opt, seed = cfg["probe"], cfg["grid"], cfg["optimizer"], cfg["seed"]
    net = fixture("A")
    modes = build_modes(net)
    Om = modes.Omega
    ws = np.linspace(Om.min(), Om.max(), 10)
    cols, decomps = {}, {}
    for w in ws:
        ext = extend_with_probes(net, [(w, spec.k, spec.node)], modes=modes)
        S0 = embed(squeezer(spec.r0), [ext.n_network], ext.n_network + 1)
        bm = effective_evolution(extended_propagator(ext, spec.t), S0)
        cols[f"target_ws{w:.4f}"] = bm.db
        decomps[w] = bm
    target = cols[f"target_ws{ws[0]:.4f}"]
    crystal = CrystalModel(1.5)
    gauss = ExperimentalMode(crystal, grid, None).achievable_db(target)
    cols["gaussian_pump_1.5mm"] = gauss[: target.size]
    res = {}
    for length in (0.5, 1.5):
        res[length] = optimize_pump(target, CrystalModel(length), grid, opt, seed)
        cols[f"optimized_{length}mm"] = res[length].achieved_db[: target.size]
    out.csv("probe_target_and_achievable_dB.csv", db_table_csv(cols))
    sp_gauss = takagi_supermodes(joint_spectrum(gaussian_pump(grid, opt.pump_sigma), crystal, grid))
    for w in ws[[0, 4, 9]]:
        bm = decomps[w]
        out.csv(f"lo_probe_gaussian_ws{w:.4f}.csv", spectral_csv(grid, lo_shape(bm.R1, bm.m - 1, sp_gauss)))
        sp = achieved_supermodes(res[1.5], CrystalModel(1.5), grid)
        out.csv(f"lo_probe_optimized1.5mm_ws{w:.4f}.csv", spectral_csv(grid, lo_shape(bm.R1, bm.m - 1, sp)))


_RUNNERS = {"fig2": _fig2, "fig3": _fig3, "fig4": _fig4, "fig5": _fig5, "fig7": _fig7, "fig9-like": _fig9}


def reproduce(figure_id: str, outdir, optimizer: OptimizerConfig | None = None, seed: int = 0,
              probe: ProbeSpec | None = None, steps: int = 60, broadening: float | None = None,
              experimental: bool = False):
    """Write the data files for one reproduction target plus a manifest.

    Targets: ``fig2`` propagators of A/B/C at four times; ``fig3`` their
    Bloch-Messiah dB lists at ``t = 50``; ``fig4`` optimized squeezing and
    node-26 LO spectra for A (2.5 mm) and C (1.5 mm); ``fig5`` the normal-mode
    picture at ``t = 50`` with photon numbers; ``fig7`` exact and reference
    spectral densities for A/B/C; ``fig9-like`` probe squeezing targets and
    probe LO spectra.
    """
    if figure_id not in _RUNNERS:
        raise KeyError(f"unknown figure {figure_id!r}; expected one of {FIGURES}")
    optimizer = OptimizerConfig() if optimizer is None else optimizer
    probe = ProbeSpec(k=0.003, node=0, t=300.0) if probe is None else probe
    broadening = 2.0 / probe.t if broadening is None else broadening
    grid = FrequencyGrid()
    config = {"figure": figure_id, "optimizer": optimizer.to_dict(), "seed": seed, "grid": asdict(grid),
              "probe": asdict(probe), "steps": steps, "broadening": broadening, "experimental": experimental}
    out = OutputDir(outdir, config)
    _RUNNERS[figure_id](out, {"grid": grid, "optimizer": optimizer, "seed": seed, "probe": probe,
                              "steps": steps, "broadening": broadening, "experimental": experimental})
    return out.write_manifest()
