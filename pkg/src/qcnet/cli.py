"""Command-line front end.

Usage::

    qcnet net gen --kind periodic-chain --n 51 --v 0.1 --v-weak 0.06 --period 3 -o net.json
    qcnet net evolve --net net.json --t 50 -o S.json
    qcnet net bm --net net.json --t 50 -o bm.json
    qcnet optics optimize --net net.json --t 50 --crystal-mm 2.5 -o opt/
    qcnet probe jw --net net.json --k 0.005 --t 200 --omega-from 0.1 --omega-to 0.9 --steps 80 -o jw.csv
    qcnet probe entropy --net net.json -o entropy.csv
    qcnet state thermal --net net.json --T 0.5 -o cov.json
    qcnet reproduce fig3 --outdir out/

Exit codes: 0 success, 1 user error, 2 internal error. Failures print one
JSON error record on stderr. Outputs without an explicit directory go to
``$QCNET_OUTPUT_DIR`` (default: the working directory).
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import blochmessiah, dynamics, netgraph, optics, probing
from .blochmessiah import bloch_messiah
from .dynamics import build_modes, propagator, thermal_state
from .export import VERSION, OutputDir, config_hash, covariance_record, dumps, matrix_record
from .netgraph import TopologySpec, generate, load_edge_list, network_from_json, network_to_json
from .optics import CrystalModel, FrequencyGrid, OptimizerConfig, optimize_pump, spectral_csv
from .pipelines import FIGURES, reproduce
from .probing import (
    ExperimentalMode,
    ProbeSpec,
    connectivity_table,
    entropy_csv,
    nested_subsets,
    probe_entropy_protocol,
    convergence_check,
    probe_spectral_density,
    purify_thermal,
    sweep_csv,
)

log = logging.getLogger("qcnet")

OUTPUT_ENV = "QCNET_OUTPUT_DIR"

EXIT_OK, EXIT_USER, EXIT_INTERNAL = 0, 1, 2

# exception type -> (module-qualified code, exit status)
_ERROR_CODES = [
    (netgraph.InvalidParameter, "netgraph.invalid-parameter", EXIT_USER),
    (netgraph.EdgeListParseError, "netgraph.parse-error", EXIT_USER),
    (dynamics.UnstableNetwork, "dynamics.unstable-network", EXIT_USER),
    (dynamics.NegativeTemperature, "dynamics.negative-temperature", EXIT_USER),
    (dynamics.DimensionMismatch, "dynamics.dimension-mismatch", EXIT_USER),
    (blochmessiah.NotSymplectic, "blochmessiah.not-symplectic", EXIT_USER),
    (blochmessiah.DecompositionFailure, "blochmessiah.decomposition-failure", EXIT_INTERNAL),
    (optics.InfeasibleTarget, "optics.infeasible-target", EXIT_USER),
    (optics.GridMismatch, "optics.grid-mismatch", EXIT_USER),
    (probing.UnphysicalCovariance, "probing.unphysical-covariance", EXIT_USER),
]


class UsageError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        code = "cli.unknown-flag" if "unrecognized arguments" in message else "cli.usage"
        raise UsageError(code, f"{self.prog}: {message}")


@dataclass
class ExperimentConfig:
    """Declarative record of one CLI run: the command path and its parameters.

    Output locations are not part of the config, so the hash identifies the
    computation rather than where it was written.
    """

    command: str
    params: dict = field(default_factory=dict)

    def to_json(self):
        return dumps({"command": self.command, "params": self.params})

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        if "provenance" in doc:  # any JSON output written by the CLI
            doc = doc["provenance"]["config"]
        return cls(doc["command"], doc["params"])

    @property
    def hash(self):
        return config_hash({"command": self.command, "params": self.params})


def _out_path(arg, default_name):
    if arg:
        return Path(arg)
    return Path(os.environ.get(OUTPUT_ENV, ".")) / default_name


def _read(path):
    p = Path(path)
    if not p.is_file():
        raise UsageError("cli.missing-input", f"input file not found: {path}")
    return p.read_text()


def _load_net(args):
    return network_from_json(_read(args.net))


def _provenance(cfg: ExperimentConfig):
    return {"tool": "qcnet", "version": VERSION, "config_hash": cfg.hash, "config": {"command": cfg.command, "params": cfg.params}}


def _write_json(path, record, cfg):
    path.parent.mkdir(parents=True, exist_ok=True)
    rec = dict(record)
    rec["provenance"] = _provenance(cfg)
    path.write_text(dumps(rec))
    return path


def _write_csv(path, text, cfg):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(f"# tool=qcnet version={VERSION} config_hash={cfg.hash}\n" + text)
    return path


def _params(args, skip=("func", "out", "outdir", "verbose", "threads")):
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# ----------------------------------------------------------------- commands

def _parse_shortcuts(text):
    if not text:
        return None
    pairs = []
    for item in text.split(","):
        i, j = item.split("-")
        pairs.append((int(i), int(j)))
    return tuple(pairs)


def cmd_net_gen(args, cfg):
    if args.edge_list:
        net = load_edge_list(_read(args.edge_list), default_v=args.v, omega0=args.omega, name=Path(args.edge_list).stem)
    else:
        if not args.kind:
            raise UsageError("cli.usage", "net gen needs --kind or --edge-list")
        spec = TopologySpec(
            kind=args.kind, n=args.n, v=args.v, omega0=args.omega, v_weak=args.v_weak, period=args.period,
            shortcut_ratio=args.shortcut_ratio, shortcuts=_parse_shortcuts(args.shortcuts),
            n_shortcuts=args.n_shortcuts, p=args.p, m=args.m, ring_degree=args.ring_degree, rewire_p=args.rewire,
        )
        net = generate(spec, args.seed)
    path = _out_path(args.out, "net.json")
    doc = json.loads(network_to_json(net))
    return [_write_json(path, doc, cfg)], f"{net.n} nodes, {len(doc['edges'])} edges"


def cmd_net_evolve(args, cfg):
    S = propagator(build_modes(_load_net(args)), args.t, args.picture)
    path = _out_path(args.out, "S.json")
    return [_write_json(path, matrix_record(S, t=args.t, picture=args.picture), cfg)], f"{S.shape[0]}x{S.shape[1]} propagator"


def _matrix_from_file(path):
    doc = json.loads(_read(path))
    return np.asarray(doc["data"] if "data" in doc else doc, dtype=float)


def cmd_net_bm(args, cfg):
    if args.matrix:
        S = _matrix_from_file(args.matrix)
    elif args.net:
        S = propagator(build_modes(_load_net(args)), args.t, args.picture)
    else:
        raise UsageError("cli.usage", "net bm needs --net or --matrix")
    bm = bloch_messiah(S)
    path = _out_path(args.out, "bm.json")
    rec = json.loads(bm.to_json())
    files = [_write_json(path, rec, cfg), _write_csv(path.with_suffix(".dB.csv"), bm.db_csv(), cfg)]
    return files, f"max squeezing {bm.db[0]:.3f} dB, residual {bm.residual:.2e}"


def _target_db(args):
    if args.target:
        text = _read(args.target)
        vals = [float(x) for line in text.splitlines() if line and not line.startswith("#") for x in line.split(",")]
        return np.asarray(vals)
    if args.net:
        return bloch_messiah(propagator(build_modes(_load_net(args)), args.t, args.picture)).db
    raise UsageError("cli.usage", "optics optimize needs --net or --target")


def _optimizer_config(args):
    return OptimizerConfig(mu=args.mu, lam=args.lam, generations=args.generations, n_pixels=args.pixels,
                           sigma0=args.sigma0, optimize_phase=args.phase)


def cmd_optics_optimize(args, cfg):
    target = _target_db(args)
    grid = FrequencyGrid(bins=args.bins)
    res = optimize_pump(target, CrystalModel(args.crystal_mm), grid, _optimizer_config(args), args.seed)
    outdir = _out_path(args.out, "optimize")
    out = OutputDir(outdir, {"command": cfg.command, "params": cfg.params})
    from .pipelines import db_table_csv
    out.csv("dB.csv", db_table_csv({"target": target, "achieved": res.achieved_db[: target.size]}))
    out.csv("history.csv", res.history_csv())
    out.csv("pump.csv", spectral_csv(grid, res.pump.amplitude))
    out.json("result.json", {"objective": res.objective, "baseline": res.baseline, "gain": res.gain,
                             "pixel_amplitudes": res.pump.pixels[0], "pixel_phases": res.pump.pixels[1]})
    manifest = out.write_manifest()
    return [manifest], f"objective {res.objective:.4f} (baseline {res.baseline:.4f})"


def cmd_probe_jw(args, cfg):
    net = _load_net(args)
    spec = ProbeSpec(omega_s=args.omega_from, k=args.k, node=args.node, t=args.t, T=args.T, r0=args.r0)
    ws = np.linspace(args.omega_from, args.omega_to, args.steps)
    if args.experimental == "none":
        mode = "exact"
    else:
        opt = None if args.experimental == "gaussian" else _optimizer_config(args)
        mode = ExperimentalMode(CrystalModel(args.crystal_mm), FrequencyGrid(bins=args.bins), opt, args.seed)
    if args.threads > 1 and mode == "exact":
        chunks = np.array_split(ws, args.threads)
        with ThreadPoolExecutor(args.threads) as pool:
            parts = pool.map(lambda c: probe_spectral_density(net, spec, c, mode), chunks)
        samples = [s for part in parts for s in part]
    else:
        samples = probe_spectral_density(net, spec, ws, mode)
    path = _out_path(args.out, "jw.csv")
    n_valid = sum(s.valid for s in samples)
    summary = f"{len(samples)} samples, {n_valid} valid"
    if args.check_convergence:
        change, ok = convergence_check(net, spec, ws)
        if not ok:
            log.warning("J changes by %.1f%% under t -> 1.5 t; consider a longer interaction time", 100 * change)
        summary += f", t -> 1.5t change {change:.1%}"
    return [_write_csv(path, sweep_csv(samples), cfg)], summary


def cmd_probe_entropy(args, cfg):
    net = _load_net(args)
    path = _out_path(args.out, "entropy.csv")
    if args.probe:
        order = np.argsort(-np.asarray(netgraph.degrees(net)), kind="stable") if args.order == "degree" else np.arange(net.n)
        rows = probe_entropy_protocol(net, args.omega_s, args.k, nested_subsets(list(order), min(args.h_max, net.n)))
        text = entropy_csv(rows)
        summary = f"probe entropy for h=0..{len(rows) - 1}"
    else:
        rows = connectivity_table(net, args.T, weighted=args.weighted)
        text = entropy_csv(rows)
        summary = f"{len(rows)} connectivity classes"
    return [_write_csv(path, text, cfg)], summary


def cmd_state_thermal(args, cfg):
    net = _load_net(args)
    state = purify_thermal(net, args.T) if args.purify else thermal_state(build_modes(net), args.T)
    path = _out_path(args.out, "cov.json")
    rec = covariance_record(state, T=args.T, purified=args.purify)
    return [_write_json(path, rec, cfg)], f"{state.m}-mode state"


def cmd_reproduce(args, cfg):
    outdir = _out_path(args.outdir, args.figure)
    manifest = reproduce(args.figure, outdir, optimizer=_optimizer_config(args), seed=args.seed, steps=args.steps,
                         experimental=args.experimental_sweep)
    return [manifest], f"{args.figure} data written"


# ----------------------------------------------------------------- parser

def _add_optimizer_flags(p):
    p.add_argument("--generations", type=int, default=OptimizerConfig.generations)
    p.add_argument("--mu", type=int, default=OptimizerConfig.mu)
    p.add_argument("--lam", type=int, default=OptimizerConfig.lam)
    p.add_argument("--pixels", type=int, default=OptimizerConfig.n_pixels)
    p.add_argument("--sigma0", type=float, default=OptimizerConfig.sigma0)
    p.add_argument("--phase", action="store_true", help="also optimize pixel phases")
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = _Parser(prog="qcnet", description="Quantum complex networks on a multimode optical platform.")
    parser.add_argument("--version", action="version", version=f"qcnet {VERSION}")
    parser.add_argument("-v", "--verbose", action="store_true")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    net = groups.add_parser("net").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = net.add_parser("gen", help="generate a network or load an edge list")
    p.add_argument("--kind", choices=netgraph.KINDS)
    p.add_argument("--edge-list")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--v", type=float, default=0.1)
    p.add_argument("--v-weak", type=float)
    p.add_argument("--period", type=int, default=3)
    p.add_argument("--omega", type=float, default=0.25)
    p.add_argument("--shortcut-ratio", type=float, default=50.0)
    p.add_argument("--shortcuts", help="explicit pairs, e.g. 0-24,6-31")
    p.add_argument("--n-shortcuts", type=int, default=0)
    p.add_argument("--p", type=float, default=0.1)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--ring-degree", type=int, default=4)
    p.add_argument("--rewire", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_net_gen)

    p = net.add_parser("evolve", help="symplectic propagator at time t")
    p.add_argument("--net", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--picture", choices=("bare", "normal"), default="bare")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_net_evolve)

    p = net.add_parser("bm", help="Bloch-Messiah decomposition")
    p.add_argument("--net")
    p.add_argument("--matrix", help="JSON matrix file instead of a network")
    p.add_argument("--t", type=float, default=50.0)
    p.add_argument("--picture", choices=("bare", "normal"), default="bare")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_net_bm)

    opt = groups.add_parser("optics").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = opt.add_parser("optimize", help="shape the pump toward a target squeezing list")
    p.add_argument("--net")
    p.add_argument("--target", help="CSV of target dB values")
    p.add_argument("--t", type=float, default=50.0)
    p.add_argument("--picture", choices=("bare", "normal"), default="bare")
    p.add_argument("--crystal-mm", type=float, default=1.5)
    p.add_argument("--bins", type=int, default=FrequencyGrid.bins)
    _add_optimizer_flags(p)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_optics_optimize)

    probe = groups.add_parser("probe").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = probe.add_parser("jw", help="spectral density sweep")
    p.add_argument("--net", required=True)
    p.add_argument("--k", type=float, default=0.005)
    p.add_argument("--t", type=float, default=200.0)
    p.add_argument("--node", type=int, default=0)
    p.add_argument("--T", type=float, default=0.0)
    p.add_argument("--r0", type=float, default=1.0)
    p.add_argument("--omega-from", type=float, default=0.1)
    p.add_argument("--omega-to", type=float, default=0.9)
    p.add_argument("--steps", type=int, default=80)
    p.add_argument("--experimental", choices=("none", "gaussian", "optimized"), default="none")
    p.add_argument("--crystal-mm", type=float, default=1.5)
    p.add_argument("--bins", type=int, default=FrequencyGrid.bins)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--check-convergence", action="store_true", help="rerun at 1.5 t and report the change")
    _add_optimizer_flags(p)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_probe_jw)

    p = probe.add_parser("entropy", help="entropy by connectivity, or probe entropy vs h")
    p.add_argument("--net", required=True)
    p.add_argument("--T", type=float, default=0.0)
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--probe", action="store_true", help="run the probe attachment protocol")
    p.add_argument("--omega-s", type=float, default=0.25)
    p.add_argument("--k", type=float, default=0.005)
    p.add_argument("--h-max", type=int, default=10)
    p.add_argument("--order", choices=("degree", "index"), default="degree")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_probe_entropy)

    state = groups.add_parser("state").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = state.add_parser("thermal", help="thermal covariance (or its purification)")
    p.add_argument("--net", required=True)
    p.add_argument("--T", type=float, default=0.0)
    p.add_argument("--purify", action="store_true")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_state_thermal)

    p = groups.add_parser("reproduce", help="emit data behind one figure")
    p.add_argument("figure", choices=FIGURES)
    p.add_argument("--outdir")
    p.add_argument("--steps", type=int, default=60)
    p.add_argument("--experimental-sweep", action="store_true")
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_reproduce, group="reproduce", action=None)

    p = groups.add_parser("replay", help="rerun a command from an ExperimentConfig JSON")
    p.add_argument("config")
    p.add_argument("-o", "--out")
    p.add_argument("--outdir")
    p.set_defaults(func=None, group="replay", action=None)
    return parser


def _error(code, message, status):
    sys.stderr.write(json.dumps({"error": {"code": code, "message": message, "exit": status}}) + "\n")
    return status


def _dispatch(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.group == "replay":
        cfg = ExperimentConfig.from_json(_read(args.config))
        argv2 = cfg.command.split() + _argv_from_params(cfg.params)
        if args.out:
            argv2 += ["-o", args.out]
        if args.outdir:
            argv2 += ["--outdir", args.outdir]
        return _dispatch(argv2)
    command = " ".join(x for x in (args.group, args.action, getattr(args, "figure", None)) if x)
    cfg = ExperimentConfig(command, _params(args, skip=("func", "out", "outdir", "verbose", "threads", "group", "action", "figure")))
    files, summary = args.func(args, cfg)
    print(f"{command}: {summary} -> {', '.join(str(f) for f in files)}")
    return EXIT_OK


def _argv_from_params(params):
    out = []
    for k, v in params.items():
        flag = "--" + k.replace("_", "-")
        if isinstance(v, bool):
            if v:
                out.append(flag)
        elif v is not None:
            out += [flag, str(v)]
    return out


def run(argv=None) -> int:
    """Entry point; returns the process exit status."""
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        return _dispatch(argv)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except UsageError as exc:
        return _error(exc.code, str(exc), EXIT_USER)
    except Exception as exc:  # noqa: BLE001
        for etype, code, status in _ERROR_CODES:
            if isinstance(exc, etype):
                return _error(code, str(exc), status)
        if isinstance(exc, (ValueError, KeyError)):
            return _error("cli.invalid-value", str(exc), EXIT_USER)
        log.debug("internal error", exc_info=True)
        return _error("internal", f"{type(exc).__name__}: {exc}", EXIT_INTERNAL)


def main():
    sys.exit(run())
