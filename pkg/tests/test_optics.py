import numpy as np
import pytest
from numpy.polynomial.hermite import hermval

from qcnet.optics import (
    CrystalModel,
    FrequencyGrid,
    GridMismatch,
    InfeasibleTarget,
    OptimizerConfig,
    PumpShape,
    calibrated_db,
    gaussian_pump,
    joint_spectrum,
    lo_shape,
    optimize_pump,
    relative_distance,
    rms_width,
    spectral_csv,
    squeezing_spectrum,
    takagi_supermodes,
)
from qcnet.symplectic import passive_from_unitary

SMALL = FrequencyGrid(bins=48)


def test_grid_invariants():
    g = FrequencyGrid()
    assert g.offsets.size == 256
    assert np.allclose(np.diff(g.offsets), g.d_omega)
    assert g.pump_offsets.size == 2 * 256 - 1
    with pytest.raises(ValueError):
        FrequencyGrid(bins=1)
    with pytest.raises(ValueError):
        FrequencyGrid(span_nm=0)


def test_crystal_bandwidth_scaling():
    assert CrystalModel(0.5).sigma_pm == pytest.approx(3 * CrystalModel(1.5).sigma_pm)
    with pytest.raises(ValueError):
        CrystalModel(0.0)


def test_joint_spectrum_symmetric_and_limits():
    L = joint_spectrum(gaussian_pump(SMALL), CrystalModel(1.5), SMALL).L
    assert np.array_equal(L, L.T)
    zero = joint_spectrum(PumpShape(np.zeros(SMALL.pump_offsets.size)), CrystalModel(1.5), SMALL).L
    assert not zero.any()
    flat = joint_spectrum(PumpShape(np.ones(SMALL.pump_offsets.size)), CrystalModel(1e-9), SMALL).L
    assert np.allclose(flat, 1.0)
    assert np.linalg.matrix_rank(flat) == 1
    with pytest.raises(GridMismatch):
        joint_spectrum(PumpShape(np.ones(10)), CrystalModel(1.5), SMALL)


def test_gaussian_supermodes_are_hermite_gauss():
    g = FrequencyGrid()
    cr = CrystalModel(0.5)
    sp = takagi_supermodes(joint_spectrum(gaussian_pump(g, 0.055), cr, g))
    # Mehler kernel: modes scale as c^2 = 2/(sigma_p sigma_pm), values decay by (sp - spm)/(sp + spm)
    c = np.sqrt(2 / (0.055 * cr.sigma_pm))
    ratio = (0.055 - cr.sigma_pm) / (0.055 + cr.sigma_pm)
    assert np.allclose(sp.lam[1:6] / sp.lam[:5], ratio, rtol=1e-6)
    for n in range(5):
        h = hermval(c * g.offsets, [0] * n + [1]) * np.exp(-(c * g.offsets) ** 2 / 2)
        h /= np.linalg.norm(h)
        u = sp.modes[:, n]
        assert min(np.max(np.abs(u - h)), np.max(np.abs(u + h))) < 1e-3


def test_supermode_orthonormal_and_reconstruction():
    L = joint_spectrum(gaussian_pump(SMALL), CrystalModel(1.5), SMALL).L
    sp = takagi_supermodes(L, gain=2.0)
    assert np.allclose(sp.modes.conj().T @ sp.modes, np.eye(48), atol=1e-9)
    assert np.linalg.norm(sp.modes @ np.diag(sp.lam) @ sp.modes.T - L) / np.linalg.norm(L) < 1e-9
    assert np.allclose(sp.r, 2 * sp.lam)
    assert np.allclose(sp.db, 20 * np.log10(np.e) * sp.r)


def test_takagi_doubling_oracle():
    g = FrequencyGrid()
    L = joint_spectrum(gaussian_pump(g), CrystalModel(0.5), g).L
    lam = takagi_supermodes(L).lam
    H = np.block([[np.zeros((256, 256)), L], [L.conj(), np.zeros((256, 256))]])
    assert np.allclose(lam, np.sort(np.linalg.eigvalsh(H))[::-1][:256], atol=1e-11 * lam[0])
    # Gaussian x Gaussian decays geometrically
    ratios = lam[1:6] / lam[:5]
    assert np.allclose(ratios, ratios[0], rtol=1e-3)


def test_zero_and_rank_one():
    sp = takagi_supermodes(np.zeros((6, 6)))
    assert np.all(sp.db == 0)
    v = np.array([1.0, 2.0, 0.5, -1.0])
    sp = takagi_supermodes(np.outer(v, v))
    assert np.sum(sp.lam > 1e-12) == 1
    assert abs(abs(sp.modes[:, 0] @ v) - np.linalg.norm(v)) < 1e-12
    with pytest.raises(ValueError):
        takagi_supermodes(np.eye(3), gain=0)


def test_shorter_crystal_broader_first_mode():
    g = FrequencyGrid()
    pump = gaussian_pump(g)
    w = [rms_width(takagi_supermodes(joint_spectrum(pump, CrystalModel(L), g)).modes[:, 0], g.offsets) for L in (0.5, 1.5)]
    assert w[0] > w[1]


def test_default_calibration_gives_about_fifty_modes():
    g = FrequencyGrid()
    lam = squeezing_spectrum(gaussian_pump(g), CrystalModel(1.5), g)
    assert 35 <= np.sum(lam > 0.1 * lam[0]) <= 65


def test_calibration_and_distance():
    assert np.allclose(calibrated_db([2.0, 1.0, 0.5], [6.0, 1.0]), [6.0, 3.0, 1.5])
    assert relative_distance([3.0, 4.0, 99.0], [3.0, 4.0]) == 0.0
    assert relative_distance([0.0, 0.0], [3.0, 4.0]) == pytest.approx(1.0)


def test_optimizer_fixed_point_gaussian_target():
    cr = CrystalModel(1.5)
    target = calibrated_db(squeezing_spectrum(gaussian_pump(SMALL), cr, SMALL), [5.0])[:20]
    res = optimize_pump(target, cr, SMALL, OptimizerConfig(mu=4, lam=8, generations=3), seed=0)
    assert res.baseline < 1e-10
    assert res.objective < 1e-10


def test_optimizer_monotone_deterministic_and_calibrated():
    cr = CrystalModel(1.5)
    target = np.linspace(4.0, 0.5, 20)
    cfg = OptimizerConfig(mu=4, lam=12, generations=15, n_pixels=12)
    a = optimize_pump(target, cr, SMALL, cfg, seed=3)
    b = optimize_pump(target, cr, SMALL, cfg, seed=3)
    assert np.all(np.diff(a.history) <= 0)
    assert a.history == b.history and np.array_equal(a.pump.amplitude, b.pump.amplitude)
    assert a.objective <= a.baseline
    assert a.achieved_db[0] == pytest.approx(target[0], abs=1e-12)
    assert a.history_csv().splitlines()[0] == "generation,best_objective"
    amps, _ = a.pump.pixels
    assert np.all((amps >= 0) & (amps <= 1))


def test_optimizer_linear_amplitude_and_phase_modes():
    cr = CrystalModel(1.5)
    target = np.linspace(4.0, 0.5, 10)
    for cfg in (OptimizerConfig(mu=3, lam=6, generations=4, n_pixels=8, log_floor=None),
                OptimizerConfig(mu=3, lam=6, generations=4, n_pixels=8, optimize_phase=True)):
        res = optimize_pump(target, cr, SMALL, cfg, seed=1)
        assert res.objective <= res.baseline


def test_optimizer_infeasible_target():
    with pytest.raises(InfeasibleTarget):
        optimize_pump(np.ones(49), CrystalModel(1.5), SMALL, OptimizerConfig(generations=1))


def test_lo_shape_examples():
    sp = takagi_supermodes(joint_spectrum(gaussian_pump(SMALL), CrystalModel(1.5), SMALL))
    N = 5
    u = lo_shape(np.eye(2 * N), 0, sp)
    assert np.allclose(u, sp.modes[:, 0])
    # mode 0 quadratures swapped q -> p
    R = passive_from_unitary(np.diag([1j, 1, 1, 1, 1]))
    u = lo_shape(R, 0, sp)
    assert np.allclose(np.abs(u), np.abs(sp.modes[:, 0]))
    assert np.allclose(u, 1j * sp.modes[:, 0]) or np.allclose(u, -1j * sp.modes[:, 0])
    rng = np.random.default_rng(0)
    from qcnet.symplectic import random_passive
    u = lo_shape(random_passive(N, rng), 2, sp)
    assert np.linalg.norm(u) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(IndexError):
        lo_shape(np.eye(2 * N), N, sp)


def test_spectral_csv():
    lines = spectral_csv(SMALL, np.ones(48, dtype=complex)).splitlines()
    assert lines[0] == "omega_offset_nm,real,imag" and len(lines) == 49
