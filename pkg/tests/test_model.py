import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dissipative_ssh.errors import UnsupportedOnsite
from dissipative_ssh.model import (
    ChainParams, OnSitePotential, bloch_hamiltonian, build_open_chain, couplings,
    mirror_permutation,
)

params = st.builds(
    ChainParams,
    n_cells=st.integers(1, 12),
    phi=st.floats(0, math.pi),
    gamma1=st.floats(0, 2),
    gamma2=st.floats(0, 2),
)


def test_couplings_follow_phi():
    c = couplings(ChainParams(3, t0=2.0, phi=math.pi / 3, gamma1=0.1, gamma2=0.2))
    assert c.t_A == pytest.approx(complex(1.0, -0.1))
    assert c.t_B == pytest.approx(complex(3.0, -0.2))


def test_site_ordering_and_bonds():
    p = ChainParams(3, phi=0.3 * math.pi, gamma1=0.5, gamma2=0.25)
    h = build_open_chain(p)
    c = couplings(p)
    assert h.shape == (6, 6)
    assert h[0, 1] == c.t_A and h[1, 2] == c.t_B and h[2, 3] == c.t_A
    assert h[4, 5] == c.t_A
    assert np.count_nonzero(h) == 10


@settings(max_examples=50, deadline=None)
@given(params)
def test_open_chain_is_complex_symmetric_and_mirror_invariant(p):
    h = build_open_chain(p)
    np.testing.assert_array_equal(h, h.T)
    perm = mirror_permutation(p.n_cells)
    np.testing.assert_array_equal(h[np.ix_(perm, perm)], h)


def test_onsite_variants():
    n = 3
    assert np.all(OnSitePotential("uniform_loss", 0.3).diagonal(n) == -0.3j)
    stag = OnSitePotential("staggered_gain_loss", 0.2).diagonal(n)
    np.testing.assert_array_equal(stag[0::2], 0.2j)
    np.testing.assert_array_equal(stag[1::2], -0.2j)
    ends = OnSitePotential("endpoints_only", 0.1).diagonal(n)
    assert ends[0] == -0.1j and ends[-1] == 0.1j and not ends[1:-1].any()
    h = build_open_chain(ChainParams(n, omega=2.0, onsite=OnSitePotential("uniform_loss", 0.3)))
    np.testing.assert_allclose(np.diag(h), 2.0 - 0.3j)


@settings(max_examples=50, deadline=None)
@given(params, st.floats(-math.pi, math.pi))
def test_bloch_eigenvalues_match_dispersion(p, k):
    c = couplings(p)
    hk = bloch_hamiltonian(p, k)
    e2 = (c.t_A + c.t_B * np.exp(1j * k)) * (c.t_A + c.t_B * np.exp(-1j * k))
    vals = np.linalg.eigvals(hk)
    np.testing.assert_allclose(np.sort_complex(vals ** 2), [e2, e2], atol=1e-10)
    # chiral symmetry sigma_z H sigma_z = -H
    sz = np.diag([1, -1])
    np.testing.assert_allclose(sz @ hk @ sz, -hk)


def test_bloch_rejects_onsite():
    with pytest.raises(UnsupportedOnsite):
        bloch_hamiltonian(ChainParams(2, onsite=OnSitePotential("uniform_loss", 1.0)), 0.0)


@pytest.mark.parametrize("kwargs", [
    {"n_cells": 0}, {"n_cells": 2.5}, {"n_cells": 2, "t0": 0.0}, {"n_cells": 2, "gamma1": -1},
    {"n_cells": 2, "phi": 4.0}, {"n_cells": 2, "omega": math.inf},
])
def test_parameter_validation(kwargs):
    with pytest.raises(ValueError):
        ChainParams(**kwargs)
    with pytest.raises(ValueError):
        OnSitePotential("bogus")


def test_replace_keeps_other_fields():
    p = ChainParams(4, phi=0.2, gamma1=0.3)
    q = p.replace(n_cells=7)
    assert (q.n_cells, q.phi, q.gamma1) == (7, 0.2, 0.3)
    assert p.as_dict()["onsite"] == {"kind": "none", "strength": 0.0}
