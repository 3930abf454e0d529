import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dissipative_ssh import edge, linalg
from dissipative_ssh.errors import DegenerateCoupling, NoEdgePair
from dissipative_ssh.model import ChainParams, OnSitePotential, build_open_chain

P04 = ChainParams(20, phi=0.4 * math.pi, gamma1=1.0, gamma2=1.0)


def test_pair_is_chiral_and_parity_labeled():
    a = edge.analyze_edges(P04)
    assert a.E_minus == pytest.approx(-a.E_plus, abs=1e-10)
    _, dec = edge.decompose_chain(P04)
    assert edge.mirror_parity(dec.right[:, a.index_plus]) > 0.5
    assert edge.mirror_parity(dec.right[:, a.index_minus]) < -0.5


def test_analytic_splitting_matches_numerics_at_n20():
    a = edge.analyze_edges(P04)
    an = edge.analytic_splitting(P04)
    assert abs(an.E_plus - a.E_plus) <= 1e-3 * abs(a.E_plus)
    assert an.E_minus == -an.E_plus and an.delta_E == 2 * an.E_plus


def test_zeta_relation():
    a_t, theta, xi = edge.analytic_edge_constants(P04)
    an = edge.analytic_splitting(P04)
    n = P04.n_cells
    assert an.E_plus == pytest.approx(an.zeta * np.exp(-(n - 1) / xi), rel=1e-10)
    assert a_t > 1 and -math.pi < theta <= math.pi


def test_norm_product_geometric_sum():
    q = 0.3 + 0.2j
    assert edge.biorthogonal_norm_product(q, 4) == pytest.approx(1 / (q + q**2 + q**3 + q**4))


def test_degenerate_couplings():
    with pytest.raises(DegenerateCoupling):
        edge.analytic_edge_constants(ChainParams(5, phi=0.0))
    with pytest.raises(DegenerateCoupling):
        edge.analytic_splitting(ChainParams(5, phi=math.pi))


def test_trivial_phase_has_no_edge_pair():
    with pytest.raises(NoEdgePair):
        edge.analyze_edges(ChainParams(20, phi=0.8 * math.pi))


@settings(max_examples=25, deadline=None)
@given(n=st.integers(4, 30), phi=st.floats(0.05 * math.pi, 0.4 * math.pi),
       g=st.floats(0, 1.5))
def test_profile_normalization(n, phi, g):
    p = ChainParams(n, phi=phi, gamma1=g, gamma2=g)
    a = edge.analyze_edges(p)
    assert abs(np.sum(a.profile_plus) - 1) <= 1e-8
    assert a.profile_plus.shape == (n,)


def test_dehybridized_profiles_sit_at_opposite_ends():
    h, dec = edge.decompose_chain(P04)
    pair = edge.find_edge_pair(h, dec)
    left, right = edge.edge_profiles(dec, pair, P04.n_cells)
    assert abs(left[:3].sum()) > 0.9 * abs(left.sum())
    assert abs(right[-3:].sum()) > 0.9 * abs(right.sum())


def test_uniform_loss_shift_is_removed_from_reported_energies():
    base = edge.analyze_edges(P04)
    lossy = edge.analyze_edges(P04.replace(onsite=OnSitePotential("uniform_loss", 0.7)))
    assert lossy.E_plus == pytest.approx(base.E_plus, abs=1e-9)


def test_hermitian_limit_is_real():
    a = edge.analyze_edges(ChainParams(12, phi=0.3 * math.pi))
    assert abs(a.delta_E.imag) < 1e-12
    assert a.delta_E_by_energy.real > 0


def test_oscillation_sweep_flags_instead_of_dropping():
    rows = edge.oscillation_sweep(P04, phis=[0.2 * math.pi, 0.8 * math.pi])
    assert len(rows) == 2
    assert rows[0].flag == "" and math.isfinite(rows[0].E_plus.real)
    assert rows[1].flag == "NoEdgePair" and math.isnan(rows[1].E_plus.real)
    by_n = edge.oscillation_sweep(P04, n_values=[10, 11], workers=2)
    assert [r.n_cells for r in by_n] == [10, 11]
    with pytest.raises(ValueError):
        edge.oscillation_sweep(P04)


def test_find_edge_pair_requires_even_dimension():
    h = build_open_chain(ChainParams(1))
    with pytest.raises(ValueError):
        edge.find_edge_pair(h, linalg.eig(h))
