import math

import numpy as np
import pytest

from dissipative_ssh import dynamics
from dissipative_ssh.model import ChainParams, couplings

from _oracles import inverse_2x2, lindblad_block_evolution


@pytest.mark.parametrize("n", [1, 2, 5])
def test_conditional_hamiltonian_matches_open_chain(n):
    m = dynamics.build_liouvillian(ChainParams(n, phi=0.3, tau=0.8, omega=1.5))
    assert m.consistency_residual < 1e-14
    assert len(m.jump_ops) == 2 * n - 1
    assert m.M.shape == (2 * n - 2, 2 * n - 2)


def test_two_cell_elimination_closed_form():
    # middle block [b1, a2]: after removing the -i tau shift, M_s = [[0, tB'], [tB', 0]]
    p = ChainParams(2, phi=0.35 * math.pi, tau=0.6)
    c = couplings(p)
    ta = c.t_A_real - 0.3j
    tb = c.t_B_real - 0.3j
    m_s = np.array([[0, tb], [tb, 0]])
    kappa = -np.array([ta, 0]) @ inverse_2x2(m_s) @ np.array([0, ta])
    ec = dynamics.adiabatic_edge_coupling(dynamics.build_liouvillian(p))
    assert ec.E_prime_plus == pytest.approx(kappa, rel=1e-12)
    assert ec.delta_g == pytest.approx(kappa.real) and ec.delta_gamma == pytest.approx(-kappa.imag)
    assert ec.E_prime_minus == -ec.E_prime_plus


def test_elimination_needs_middle_qubits():
    with pytest.raises(ValueError):
        dynamics.adiabatic_edge_coupling(dynamics.build_liouvillian(ChainParams(1, tau=1)))


def test_renormalized_coupling_tracks_edge_pair():
    from dissipative_ssh.edge import analyze_edges
    p = ChainParams(20, phi=0.2 * math.pi, gamma1=1, gamma2=1, tau=2)
    ec = dynamics.adiabatic_edge_coupling(dynamics.build_liouvillian(p), renormalize=True)
    e = analyze_edges(p).E_plus
    assert abs(ec.E_prime_plus - e) <= 1e-3 * abs(e)


def test_single_excitation_against_lindblad_oracle():
    p = ChainParams(2, phi=0.3 * math.pi, tau=0.4)
    model = dynamics.build_liouvillian(p)
    psi0 = np.array([1, 0, 0, 0], dtype=complex)
    t = np.linspace(0, 5, 11)
    traj = dynamics.evolve_single_excitation(model, psi0, t)
    rho = lindblad_block_evolution(2, p.phi, p.tau, psi0, t)
    for k in range(len(t)):
        block = np.outer(traj.amplitudes[k], traj.amplitudes[k].conj())
        np.testing.assert_allclose(rho[k, 1:, 1:], block, atol=1e-8)
        assert rho[k, 0, 0].real == pytest.approx(traj.ground[k], abs=1e-8)
    assert np.all(np.diff(traj.excited) <= 1e-12)


def test_unnormalized_initial_state_rejected():
    model = dynamics.build_liouvillian(ChainParams(2))
    with pytest.raises(ValueError):
        dynamics.evolve_single_excitation(model, np.ones(4), [0.0, 1.0])


def test_beat_period_of_pure_tone():
    t = np.linspace(0, 100, 2001)
    assert dynamics.beat_period(t, np.cos(2 * math.pi * t / 7.3) ** 2) == pytest.approx(7.3 / 2, rel=1e-3)


def test_edge_to_edge_transfer_beats_at_adiabatic_period():
    p = ChainParams(2, phi=0.2 * math.pi)
    model = dynamics.build_liouvillian(p)
    ec = dynamics.adiabatic_edge_coupling(model)
    t = np.linspace(0, 800, 4001)
    traj = dynamics.evolve_single_excitation(model, np.array([1, 0, 0, 0], dtype=complex), t)
    fitted = dynamics.beat_period(t, traj.populations[:, -1])
    assert fitted == pytest.approx(math.pi / abs(ec.delta_g), rel=0.03)
