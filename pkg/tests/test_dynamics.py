import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import solve_ivp
from scipy.linalg import sqrtm

from qcnet.dynamics import (
    DimensionMismatch,
    GaussianState,
    NegativeTemperature,
    UnstableNetwork,
    build_modes,
    evolve,
    extend_with_probes,
    extended_propagator,
    ground_state,
    mean_photon,
    propagator,
    thermal_state,
    thermal_variance,
    total_energy,
)
from qcnet.netgraph import OscillatorNetwork, TopologySpec, generate
from qcnet.symplectic import embed, random_passive, squeezer, symplectic_defect


def two_node(v=0.1, omega=0.25):
    return OscillatorNetwork(np.full(2, omega), np.array([[0, v], [v, 0.0]]))


def single(omega=0.25):
    return OscillatorNetwork(np.array([omega]), np.zeros((1, 1)))


def test_two_node_potential_and_frequencies():
    m = build_modes(two_node())
    assert np.allclose(m.A, [[0.08125, -0.05], [-0.05, 0.08125]], atol=1e-15)
    assert np.allclose(m.Omega, [0.25, np.sqrt(0.2625)], atol=1e-12)


def test_single_node_modes():
    m = build_modes(single())
    assert np.allclose(m.A, [[0.03125]])
    assert np.allclose(m.Omega, [0.25]) and np.allclose(m.T1, 1) and np.allclose(m.T2, 1)


@pytest.mark.parametrize("kind", ["periodic-chain", "erdos-renyi", "barabasi-albert"])
def test_mode_invariants(kind):
    m = build_modes(generate(TopologySpec(kind, 30, v=0.05, p=0.2), 2))
    assert np.allclose(m.K @ np.diag(m.Omega**2 / 2) @ m.K.T, m.A, atol=1e-10)
    assert np.allclose(m.K.T @ m.K, np.eye(30), atol=1e-10)
    assert np.allclose(m.T1 @ m.T2.T, np.eye(30), atol=1e-10)
    assert np.all(np.diff(m.Omega) >= 0)
    assert np.all(m.K[np.argmax(np.abs(m.K), axis=0), np.arange(30)] > 0)


def test_unstable_potential_rejected():
    # links with v >= 0 keep A positive definite, so feed the diagonalizer directly
    from qcnet.dynamics import _normal_frame

    with pytest.raises(UnstableNetwork):
        _normal_frame(np.array([[1.0, 2.0], [2.0, 1.0]]), np.ones(2))


def test_identity_at_t0():
    m = build_modes(generate(TopologySpec("erdos-renyi", 10, v=0.02, p=0.3), 0))
    assert np.allclose(propagator(m, 0.0), np.eye(20), atol=1e-14)


def test_single_node_rotation():
    m = build_modes(single())
    t = 3.7
    c, s = np.cos(0.25 * t), np.sin(0.25 * t)
    assert np.allclose(propagator(m, t), [[c, s], [-s, c]], atol=1e-14)


def test_non_finite_time():
    with pytest.raises(ValueError):
        propagator(build_modes(single()), np.inf)


def test_periodic_chain_group_property():
    m = build_modes(generate(TopologySpec("periodic-chain", 51, v=0.1, v_weak=0.06), 0))
    S25, S50 = propagator(m, 25), propagator(m, 50)
    assert np.max(np.abs(S25 @ S25 - S50)) < 1e-9
    for t in (50, 150, 500, 999):
        assert symplectic_defect(propagator(m, t)) < 1e-10


def test_bare_normal_consistency():
    m = build_modes(generate(TopologySpec("barabasi-albert", 20, v=0.05, m=2), 1))
    for t in (0.0, 13.0, 999.0):
        assert np.allclose(propagator(m, t, "bare"), propagator(m, t, "normal") @ m.bare_to_normal(), atol=1e-10)
        assert symplectic_defect(propagator(m, t, "normal")) < 1e-10


def test_normal_picture_at_t0_is_basis_change():
    m = build_modes(two_node())
    assert np.allclose(propagator(m, 0, "normal"), m.normal_to_bare())


def _ode_oracle(ext, t):
    """Integrate dq'/dt = p', dp'/dt = -2 B q' and map to the mixed frame."""
    n = ext.B.shape[0]
    w = np.concatenate([ext.modes.omega, [p.omega_s for p in ext.probes]])
    H = np.block([[np.zeros((n, n)), np.eye(n)], [-2 * ext.B, np.zeros((n, n))]])
    P = np.diag(np.concatenate([1 / np.sqrt(w), np.sqrt(w)]))  # renormalized -> primed
    F = ext.frame_to_bare()
    cols = []
    for x0 in np.eye(2 * n):
        y0 = P @ F @ x0
        sol = solve_ivp(lambda _, y: H @ y, (0, t), y0, rtol=1e-12, atol=1e-13, method="DOP853")
        cols.append(sol.y[:, -1])
    Y = np.array(cols).T
    return np.linalg.solve(P @ F, Y)


def test_extended_propagator_matches_ode_oracle():
    ext = extend_with_probes(two_node(), [(0.3, 0.005, 0)])
    S = extended_propagator(ext, 100.0)
    assert np.max(np.abs(S - _ode_oracle(ext, 100.0))) < 1e-6
    assert symplectic_defect(S) < 1e-10


def test_extended_two_probes_multi_node_ode_oracle():
    net = generate(TopologySpec("erdos-renyi", 5, v=0.05, p=0.5), 4)
    ext = extend_with_probes(net, [(0.35, 0.01, (0, 2)), (0.2, 0.004, 4)])
    assert np.max(np.abs(extended_propagator(ext, 40.0) - _ode_oracle(ext, 40.0))) < 1e-6


def test_extend_empty_probe_list():
    net = two_node()
    m = build_modes(net)
    ext = extend_with_probes(net, [])
    assert np.allclose(ext.B, m.A) and np.allclose(ext.f, m.Omega)
    # with no probes the mixed frame is the normal-mode frame
    S = extended_propagator(ext, 12.0)
    assert np.allclose(ext.frame_to_bare() @ S, propagator(m, 12.0, "normal"), atol=1e-12)


def test_extend_invariants_and_brute_force_eigensolve():
    ext = extend_with_probes(single(), [(0.3, 0.005, 0)])
    B = np.array([[0.25**2 / 2 + 0.0025, -0.0025], [-0.0025, 0.3**2 / 2 + 0.0025]])
    assert np.allclose(ext.B, B)
    assert np.allclose(ext.f, np.sqrt(2 * np.linalg.eigvalsh(B)))
    assert np.allclose(ext.O @ np.diag(ext.f**2 / 2) @ ext.O.T, ext.B, atol=1e-10)
    assert np.allclose(ext.O.T @ ext.O, np.eye(2), atol=1e-10)


def test_extended_zero_coupling_decouples():
    net = two_node()
    m = build_modes(net)
    ext = extend_with_probes(net, [(0.4, 0.0, 1)])
    S = extended_propagator(ext, 30.0)
    idx_net = [0, 1, 3, 4]
    # network block equals the normal-mode rotation, probe block is a free rotation at omega_S
    C, Sn = np.cos(m.Omega * 30), np.sin(m.Omega * 30)
    rot = np.block([[np.diag(C), np.diag(Sn)], [-np.diag(Sn), np.diag(C)]])
    assert np.allclose(S[np.ix_(idx_net, idx_net)], rot, atol=1e-12)
    c, s = np.cos(0.4 * 30), np.sin(0.4 * 30)
    assert np.allclose(S[np.ix_([2, 5], [2, 5])], [[c, s], [-s, c]], atol=1e-12)


def test_extended_near_degenerate_split():
    ext = extend_with_probes(single(), [(0.25, 1e-6, 0)])
    assert np.allclose(ext.f, [0.25, 0.25], atol=1e-5)


def test_evolve_examples(rng):
    vac = GaussianState.vacuum(2)
    R = random_passive(2, rng)
    assert np.allclose(evolve(vac, R).cov, np.eye(4) / 2)
    sq = evolve(GaussianState.vacuum(1), squeezer(0.7))
    assert np.allclose(sq.cov, np.diag([np.exp(1.4), np.exp(-1.4)]) / 2)
    with pytest.raises(DimensionMismatch):
        evolve(vac, np.eye(2))


def test_evolution_preserves_symplectic_spectrum():
    m = build_modes(generate(TopologySpec("watts-strogatz", 12, v=0.05), 1))
    st = thermal_state(m, 0.4)
    nu0 = np.sort(st.symplectic_eigenvalues())
    nu1 = np.sort(evolve(st, propagator(m, 77.0)).symplectic_eigenvalues())
    assert np.allclose(nu0, nu1, atol=1e-9)


def test_ground_state_pure_and_stationary():
    m = build_modes(generate(TopologySpec("barabasi-albert", 15, v=0.05, m=2), 3))
    g = ground_state(m)
    assert g.is_pure()
    assert np.allclose(g.cov[:15, :15], m.T1 @ m.T1.T / 2) and np.allclose(g.cov[15:, 15:], m.T2 @ m.T2.T / 2)
    assert np.allclose(g.cov[:15, 15:], 0)
    assert np.allclose(evolve(g, propagator(m, 123.0)).cov, g.cov, atol=1e-10)


def test_ground_state_sqrtm_oracle():
    # H = p^2/2 + q'^T A q' in renormalized quadratures; ground state <q'q'^T> = (2A)^(-1/2)/2
    net = two_node()
    m = build_modes(net)
    g = ground_state(m)
    W = np.real(sqrtm(2 * m.A))
    s = np.sqrt(net.omega)
    cov_qprime = np.linalg.inv(W) / 2
    cov_pprime = W / 2
    assert np.allclose(g.cov[:2, :2], np.outer(s, s) * cov_qprime, atol=1e-12)
    assert np.allclose(g.cov[2:, 2:], cov_pprime / np.outer(s, s), atol=1e-12)


def test_single_node_ground_is_vacuum():
    assert np.allclose(ground_state(build_modes(single())).cov, np.eye(2) / 2)


def test_thermal_state_examples():
    m = build_modes(single())
    assert np.allclose(thermal_state(m, 0.0).cov, ground_state(m).cov)
    st = thermal_state(m, 0.25 / np.log(2))
    assert mean_photon(st, 0) == pytest.approx(1.0, abs=1e-12)
    assert thermal_variance(np.array([1.0]), 20.0)[0] == pytest.approx(1 / np.tanh(1 / 40) / 2, rel=1e-12)
    assert thermal_variance(np.array([1.0]), 20.0)[0] == pytest.approx(20.004, abs=1e-3)
    with pytest.raises(NegativeTemperature):
        thermal_state(m, -1.0)


def test_mean_photon_examples():
    assert mean_photon(GaussianState.vacuum(1), 0) == 0.0
    sq = evolve(GaussianState.vacuum(1), squeezer(0.9))
    assert mean_photon(sq, 0) == pytest.approx(np.sinh(0.9) ** 2, rel=1e-12)


def test_total_energy_examples():
    assert total_energy(GaussianState.vacuum(1), build_modes(single())) == pytest.approx(0.125)
    m = build_modes(generate(TopologySpec("erdos-renyi", 20, v=0.01, p=0.2), 0))
    assert total_energy(ground_state(m), m) == pytest.approx(m.Omega.sum() / 2, rel=1e-12)


@given(t=st.floats(0, 999), r=st.floats(0.05, 1.0), node=st.integers(0, 9))
def test_energy_conservation(t, r, node):
    m = build_modes(generate(TopologySpec("watts-strogatz", 10, v=0.05), 0))
    st0 = evolve(ground_state(m), embed(squeezer(r), [node], 10))
    e0 = total_energy(st0, m)
    assert abs(total_energy(evolve(st0, propagator(m, t)), m) - e0) / e0 < 1e-8
