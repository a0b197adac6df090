"""Reference networks used by tests, demos and the reproduction commands.

Seven fixtures, labeled A-G:

* A: periodic ring of 51 nodes, ``v = 0.1`` weakened to 0.06 on every third link.
* B: linear chain of 50 nodes, ``v = 0.1``, with weak shortcuts ``v / 50``.
* C: Erdos-Renyi, 50 nodes, ``v = 0.01``, ``p = 0.1``.
* D: Barabasi-Albert, 50 nodes, ``m = 3``, ``v = 0.05``.
* E: Watts-Strogatz, 50 nodes, ring degree 4, rewiring 0.2, ``v = 0.05``.
* F: cat cortico-thalamic connectome (52 nodes), ``v = 0.05``.
* G: Lusseau dolphin social network (62 nodes, 159 edges), ``v = 0.05``.

F and G are real-world graphs. When their edge lists are available (set
``QCNET_DATA_DIR`` to a directory holding ``cat.txt`` / ``dolphins.txt`` in the
edge-list format) they are loaded from disk. Otherwise a random surrogate
of the same size is generated and marked ``surrogate`` in its name: a
uniform G(n, M) graph with the published node and edge counts for G, and
for F the node count with a declared density of 0.3 (398 links).
"""
from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .netgraph import OscillatorNetwork, TopologySpec, generate, load_edge_list

__all__ = ["FIXTURE_IDS", "PROFILE_THRESHOLD", "fixture", "all_fixtures", "fixture_spec", "single_node", "chain", "DATA_DIR_ENV"]

FIXTURE_IDS = ("A", "B", "C", "D", "E", "F", "G")
# relative RMS distance above which two entropy or J profiles count as distinct
PROFILE_THRESHOLD = 0.1
DATA_DIR_ENV = "QCNET_DATA_DIR"
OMEGA0 = 0.25

# declared shortcut placement for B (the drawing does not pin it down)
SHORTCUTS_B = ((0, 24), (6, 31), (12, 45), (19, 38), (27, 49))

_SPECS = {
    "A": (TopologySpec("periodic-chain", 51, v=0.1, v_weak=0.06, period=3, omega0=OMEGA0), 0),
    "B": (TopologySpec("shortcut-chain", 50, v=0.1, shortcut_ratio=50.0, shortcuts=SHORTCUTS_B, omega0=OMEGA0), 0),
    "C": (TopologySpec("erdos-renyi", 50, v=0.01, p=0.1, omega0=OMEGA0), 0),
    "D": (TopologySpec("barabasi-albert", 50, v=0.05, m=3, omega0=OMEGA0), 7),
    "E": (TopologySpec("watts-strogatz", 50, v=0.05, ring_degree=4, rewire_p=0.2, omega0=OMEGA0), 0),
}

# real-world graph sizes; the F edge count is a declared stand-in
_REAL = {
    "F": ("cat.txt", 52, 398, 11),
    "G": ("dolphins.txt", 62, 159, 12),
}
REAL_V = 0.05


def fixture_spec(fid):
    """``(TopologySpec, seed)`` for generated fixtures A-E."""
    return _SPECS[fid]


def _surrogate(n, n_edges, seed, name):
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, 1)
    pick = rng.choice(iu[0].size, size=n_edges, replace=False)
    V = np.zeros((n, n))
    V[iu[0][pick], iu[1][pick]] = REAL_V
    V = V + V.T
    return OscillatorNetwork(np.full(n, OMEGA0), V, name=name)


def fixture(fid: str) -> OscillatorNetwork:
    """Build fixture ``fid`` (one of ``A``-``G``)."""
    fid = fid.upper()
    if fid in _SPECS:
        spec, seed = _SPECS[fid]
        net = generate(spec, seed)
        return OscillatorNetwork(net.omega, net.V, name=f"{fid}:{spec.kind}")
    if fid in _REAL:
        fname, n, n_edges, seed = _REAL[fid]
        data_dir = os.environ.get(DATA_DIR_ENV)
        if data_dir and (Path(data_dir) / fname).is_file():
            text = (Path(data_dir) / fname).read_text()
            net = load_edge_list(text, default_v=REAL_V, omega0=OMEGA0, name=f"{fid}:{fname}")
            return net
        return _surrogate(n, n_edges, seed, f"{fid}:surrogate-{n}x{n_edges}")
    raise KeyError(f"unknown fixture {fid!r}; expected one of {FIXTURE_IDS}")


def all_fixtures():
    return {fid: fixture(fid) for fid in FIXTURE_IDS}


def single_node(omega=0.25):
    """One isolated oscillator."""
    return OscillatorNetwork(np.array([omega]), np.zeros((1, 1)), name="single-node")


def chain(n=5, v=0.1, omega=0.25):
    """Open linear chain with uniform coupling."""
    V = np.zeros((n, n))
    i = np.arange(n - 1)
    V[i, i + 1] = V[i + 1, i] = v
    return OscillatorNetwork(np.full(n, omega), V, name=f"chain-{n}")
