import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from giantqed import dynamics as dyn
from giantqed.model import EVEN, ODD, SINGLE, SystemParams, channel_density, channel_series
from giantqed.spectrum import (
    BIC, BOC, PRODUCT, TYPE_I, TYPE_II, _inside, edge_limit, find_bics, find_bocs,
    full_spectrum, level_shift_Y, principal_value, residue, weight_integral,
)

P = SystemParams


def _y_quad(energy, p, channel):
    f = lambda w: channel_density(w, p, channel) / (energy - w)
    return p.delta + quad(f, -2, 2, limit=500)[0]


@pytest.mark.parametrize("energy", [-2.7, -2.05, 2.001, 3.4])
def test_level_shift_closed_form_vs_adaptive(energy):
    p = P(delta=0.2, d=3, z=2, g0=0.8, n_atoms=2)
    for ch in (EVEN, ODD):
        assert level_shift_Y(energy, ch, p) == pytest.approx(_y_quad(energy, p, ch), rel=1e-8)


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
@pytest.mark.parametrize("energy", [-1.3, 0.1, 1.7])
def test_principal_value_routes_agree(energy):
    p = P(d=3, z=1, g0=0.6, n_atoms=2)
    for ch in (EVEN, ODD):
        series = channel_series(p, ch)
        f = lambda w: channel_density(w, p, ch) if abs(w) < 2 else 0.0
        ref = -quad(f, -2, 2, weight="cauchy", wvar=energy, limit=400)[0]
        assert _inside(series, energy, p) == pytest.approx(ref, abs=1e-7)
        assert principal_value(series, energy, p) == pytest.approx(_inside(series, energy, p), abs=1e-12)


def test_edge_limits_table():
    p = P(delta=0.0, d=3, z=1, g0=1.0, n_atoms=2)
    assert edge_limit(p, EVEN, 1) == pytest.approx(3.0)
    assert edge_limit(p, ODD, 1) == pytest.approx(3.0)
    assert edge_limit(p, ODD, -1) == pytest.approx(-5.0)
    assert math.isinf(edge_limit(p, EVEN, -1))
    assert math.isinf(edge_limit(P(d=1), SINGLE, -1))


def test_type_i_always_present():
    for g0 in (0.05, 0.3, 1.0):
        sp = full_spectrum(P(delta=-0.6, d=1, g0=g0))
        assert sp.count(BOC, TYPE_I, side=-1) == 1


def test_unresolved_flag_logged(caplog):
    with caplog.at_level(logging.INFO, logger="giantqed.spectrum"):
        sp = full_spectrum(P(delta=-0.6, d=1, g0=0.01))
    b = sp.bocs[0]
    assert not b.resolved and b.boc_type == TYPE_I
    assert sp.count(BOC, resolved_only=True) == 0
    assert "unresolved" in caplog.text


def test_type_ii_threshold_single_atom():
    # upper edge limit is Delta + g0^2 / h for d=1; onset at g0^2 = (2h - Delta) h
    below = full_spectrum(P(delta=-0.6, d=1, g0=math.sqrt(2.6) - 1e-3))
    above = full_spectrum(P(delta=-0.6, d=1, g0=math.sqrt(2.6) + 1e-3))
    assert below.count(BOC, TYPE_II) == 0
    assert above.count(BOC, TYPE_II) == 1


@given(delta=st.floats(-3, 3), g0=st.floats(0.1, 2.5), d=st.integers(1, 6))
@settings(max_examples=40, deadline=None)
def test_boc_roots_satisfy_equation(delta, g0, d):
    p = P(delta=delta, d=d, g0=g0)
    for b in find_bocs(p):
        if b.resolved:
            assert abs(level_shift_Y(b.energy, b.channel, p) - b.energy) < 1e-9 * max(1, abs(b.energy))
            assert 0 < residue(b, p).real < 1


@given(delta=st.floats(-2, 2), g0=st.floats(0.3, 1.5), d=st.integers(1, 4), z=st.integers(1, 4))
@settings(max_examples=20, deadline=None)
def test_residue_weight_bounded(delta, g0, d, z):
    p = P(delta=delta, d=d, z=z, g0=g0, n_atoms=2)
    sp = full_spectrum(p)
    weight = sum((b.residue.real if b.channel == PRODUCT else 0.5 * b.residue.real)
                 for b in sp.bound_states)
    assert weight <= 1 + 1e-12


def test_boc_residue_quadrature_route():
    p = P(delta=-0.6, d=1, g0=1.2)
    for b in full_spectrum(p).bocs:
        if b.gap > 0.05:
            a = weight_integral(b, p, method="analytic")
            q = weight_integral(b, p, method="quadrature", n_nodes=20000)
            assert a == pytest.approx(q, rel=1e-6)


def test_bic_residue_routes_agree():
    p = P(delta=0.0, d=2, g0=0.8)
    b = full_spectrum(p).bics[0]
    a = weight_integral(b, p, method="analytic")
    q = weight_integral(b, p, method="quadrature")
    assert a == pytest.approx(q, rel=1e-9)
    # independent: integral of J / w^2 with J(w) ~ w^2 near 0
    ref = quad(lambda w: channel_density(w, p, SINGLE) / w ** 2, -2, 2, points=[0.0], limit=400)[0]
    assert q == pytest.approx(ref, rel=1e-7)


def test_bic_energies():
    assert [round(b.energy, 12) for b in find_bics(P(d=3, delta=-1.0))] == [-1.0]
    assert find_bics(P(d=3, delta=-0.99)) == []
    assert find_bics(P(d=1, delta=0.0)) == []   # 1 + T_1 has no in-band zero


def test_two_atom_bics():
    p = P(d=3, z=3, g0=0.6, n_atoms=2)
    prod = find_bics(p.with_(delta=-1.0))
    assert len(prod) == 1 and prod[0].channel == PRODUCT and prod[0].multiplicity == 2
    b = find_bics(p.with_(delta=0.36))
    assert len(b) == 1 and b[0].channel == EVEN and abs(b[0].energy) < 1e-12
    b = find_bics(p.with_(delta=1.0))
    assert len(b) == 1 and b[0].channel == ODD and b[0].energy == pytest.approx(1.0)


def test_near_miss_is_logged(caplog):
    with caplog.at_level(logging.INFO, logger="giantqed.spectrum"):
        assert find_bics(P(d=3, delta=-1.0 + 5e-6)) == []
    assert "near-miss" in caplog.text


def test_bocs_match_lattice_eigenvalues():
    p = P(delta=0.16, d=3, z=1, g0=1.0, n_atoms=2, lattice_length=600)
    E, V = dyn.lattice_eigensystem(p)
    for b in full_spectrum(p).bocs:
        i = int(np.argmin(np.abs(E - b.energy)))
        assert abs(E[i] - b.energy) < 1e-8
        # atomic weight on the matching channel equals the residue
        amp = V[:2, i]
        w = abs(amp[0] + (1 if b.channel == EVEN else -1) * amp[1]) ** 2 / 2
        assert w == pytest.approx(b.residue.real, abs=1e-8)


def test_count_sums_multiplicity():
    sp = full_spectrum(P(d=3, z=3, g0=0.6, delta=-1.0, n_atoms=2))
    assert sp.count(BIC) == 2
    assert len(sp.bics) == 1
