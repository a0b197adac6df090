import csv
import json

import numpy as np
import pytest

from qcnet.blochmessiah import bloch_messiah
from qcnet.dynamics import build_modes, propagator
from qcnet.fixtures import fixture
from qcnet.optics import OptimizerConfig
from qcnet.pipelines import (
    FIGURES,
    db_table_csv,
    photon_number_replay,
    reproduce,
    vacuum_photon_numbers,
)
from qcnet.probing import ProbeSpec

TINY = OptimizerConfig(mu=4, lam=8, generations=3, n_pixels=12)


def _rows(path):
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    return list(csv.reader(lines))


def test_fig2_writes_twelve_symplectic_matrices(tmp_path):
    manifest = json.loads(reproduce("fig2", tmp_path).read_text())
    files = [f["file"] for f in manifest["files"]]
    assert len(files) == 12
    rec = json.loads((tmp_path / "S_V_A_t50.json").read_text())
    assert rec["shape"] == [102, 102]
    assert rec["provenance"]["config_hash"] == manifest["provenance"]["config_hash"]


def test_fig3_db_lists(tmp_path):
    reproduce("fig3", tmp_path)
    rows = _rows(tmp_path / "bm_dB_t50.csv")
    assert rows[0] == ["index", "dB_A", "dB_B", "dB_C"]
    dbA = [float(r[1]) for r in rows[1:] if r[1]]
    assert np.allclose(dbA, bloch_messiah(propagator(build_modes(fixture("A")), 50.0)).db)


def test_reproduce_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    reproduce("fig3", a)
    reproduce("fig3", b)
    for f in sorted(p.name for p in a.iterdir()):
        assert (a / f).read_bytes() == (b / f).read_bytes()


def test_fig7_files(tmp_path):
    reproduce("fig7", tmp_path, probe=ProbeSpec(k=0.003, t=100.0), steps=8)
    rows = _rows(tmp_path / "jw_exact_B.csv")
    assert len(rows) == 9
    ref = _rows(tmp_path / "jw_reference_C.csv")
    assert max(float(r[2]) for r in ref[1:]) == pytest.approx(1.0)


def test_unknown_figure(tmp_path):
    with pytest.raises(KeyError):
        reproduce("fig1", tmp_path)
    assert "fig9-like" in FIGURES


def test_optimizing_figures_run_with_small_budget(tmp_path):
    reproduce("fig5", tmp_path, optimizer=TINY)
    rows = _rows(tmp_path / "photons_A_normal_t50.csv")
    assert len(rows) == 52
    assert all(float(r[1]) > 0 for r in rows[1:])
    reproduce("fig9-like", tmp_path / "nine", optimizer=TINY, probe=ProbeSpec(k=0.003, t=100.0))
    tab = _rows(tmp_path / "nine" / "probe_target_and_achievable_dB.csv")
    assert "optimized_1.5mm" in tab[0] and "gaussian_pump_1.5mm" in tab[0]


def test_vacuum_photon_numbers_without_squeezing():
    n = vacuum_photon_numbers(np.eye(6), np.ones(3))
    assert np.allclose(n, 0.0)
    r = 0.5
    n = vacuum_photon_numbers(np.eye(2), [np.exp(r)])
    assert n[0] == pytest.approx(np.sinh(r) ** 2)


def test_photon_replay_with_exact_squeezing_has_no_error():
    class Exact:
        pass

    net = fixture("C")
    bm = bloch_messiah(propagator(build_modes(net), 50.0, "normal"))
    res = Exact()
    res.achieved_db, res.objective, res.baseline = bm.db, 0.0, 0.0
    rep = photon_number_replay(net, 50.0, result=res)
    assert rep.mean_relative_error < 1e-9


def test_db_table_pads_columns():
    rows = list(csv.reader(db_table_csv({"a": [1.0, 2.0], "b": [3.0]}).splitlines()))
    assert rows == [["index", "a", "b"], ["0", "1.0", "3.0"], ["1", "2.0", ""]]
