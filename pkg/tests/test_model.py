import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from giantqed.model import (
    EVEN, ODD, SINGLE, SystemParams, channel_density, channel_kernel, channel_series,
    chebyshev, memory_kernel, spectral_density_j0, spectral_density_j1, spectral_matrix,
)

P = SystemParams


def test_params_validation():
    with pytest.raises(ValueError):
        P(d=0)
    with pytest.raises(ValueError):
        P(n_atoms=3)
    with pytest.raises(ValueError):
        P(hopping=0.0)
    with pytest.raises(ValueError):
        P(d=400, lattice_length=800)
    assert P(d=2, z=3, n_atoms=2).coupling_offsets == ((0, 2), (5, 7))


def test_chebyshev_matches_cosine():
    x = np.linspace(-1, 1, 101)
    for n in range(8):
        assert np.allclose(chebyshev(n, x), np.cos(n * np.arccos(x)), atol=1e-13)
    with pytest.raises(ValueError):
        chebyshev(2, 1.5)


def test_j0_at_band_centre():
    # d=1, g0=h: (2 g0^2/pi)(1 + T_1(0)) / (2h) = 1/pi
    assert spectral_density_j0(0.0, P(d=1, g0=1.0)) == pytest.approx(1 / math.pi, rel=1e-14)


def test_j0_zero_at_bic_frequency():
    # d=2: 1 + T_2(0) = 0
    assert abs(spectral_density_j0(0.0, P(d=2, g0=1.0))) < 1e-15


def test_j1_example_value():
    p = P(d=1, z=1, g0=1.0, n_atoms=2)
    # J_1 series {1: 1/2, 2: 1, 3: 1/2} at x=0 gives -1 over 2h, times 2/pi
    assert spectral_density_j1(0.0, p) == pytest.approx(-1 / math.pi, rel=1e-14)


def test_outside_band_rejected():
    with pytest.raises(ValueError):
        spectral_density_j0(2.0, P())


def test_direct_matches_lattice_form():
    """J_0 equals the mode sum |g(k)|^2 over a dense k grid, computed independently."""
    p = P(d=3, g0=0.7)
    w = 0.37
    k = math.acos(-w / 2)
    gk2 = 2 * p.g0 ** 2 * (1 + math.cos(k * p.d))   # |g0 (1 + e^{ikd})|^2
    expected = 2 * gk2 / (2 * math.pi) / (2 * math.sin(k))  # two k branches, dk/dw
    assert spectral_density_j0(w, p) == pytest.approx(expected, rel=1e-12)


@given(d=st.integers(1, 8), z=st.integers(1, 8), w=st.floats(-1.99, 1.99))
@settings(max_examples=60, deadline=None)
def test_channels_nonnegative_and_factorized(d, z, w):
    p = P(d=d, z=z, g0=1.0, n_atoms=2)
    j0, j1 = spectral_density_j0(w, p), spectral_density_j1(w, p)
    assert j0 - abs(j1) >= -1e-12
    assert channel_density(w, p, EVEN) == pytest.approx(j0 + j1, abs=1e-12)
    assert channel_density(w, p, ODD) == pytest.approx(j0 - j1, abs=1e-12)
    assert np.all(np.linalg.eigvalsh(spectral_matrix(w, p)) >= -1e-12)
    # (1 + T_d)(1 +/- T_{d+z}) factorization
    x = -w / 2
    pref = 2 / math.pi / math.sqrt(4 - w * w)
    fe = pref * (1 + chebyshev(d, x)) * (1 + chebyshev(d + z, x))
    assert channel_density(w, p, EVEN) == pytest.approx(fe, abs=1e-12)


def test_channel_series_for_single_atom():
    assert channel_series(P(d=4), SINGLE) == {0: 1.0, 4: 1.0}


def test_kernel_at_zero():
    p = P(d=3, g0=0.7)
    assert memory_kernel(0.0, p)[0, 0] == pytest.approx(2 * p.g0 ** 2, rel=1e-14)


def test_kernel_bessel_vs_adaptive_quadrature():
    p = P(d=2, g0=0.9)
    for t in (0.3, 5.0, 17.0):
        re = quad(lambda w: spectral_density_j0(w, p) * math.cos(w * t), -2, 2, limit=400,
                  weight=None, points=[0.0])[0]
        assert channel_kernel(t, p, SINGLE).real == pytest.approx(re, abs=1e-7)


@given(d=st.integers(1, 10), z=st.integers(1, 10))
@settings(max_examples=15, deadline=None)
def test_kernel_bessel_vs_chebyshev(d, z):
    p = P(d=d, z=z, g0=1.0, n_atoms=2)
    t = np.linspace(0, 60, 301)
    for ch in (EVEN, ODD):
        a = channel_kernel(t, p, ch)
        b = channel_kernel(t, p, ch, method="quadrature")
        assert np.max(np.abs(a - b)) < 1e-10


def test_memory_kernel_structure():
    p = P(d=2, z=1, g0=0.5, n_atoms=2)
    t = np.linspace(0, 10, 11)
    G = memory_kernel(t, p)
    assert G.shape == (11, 2, 2)
    assert np.allclose(G[:, 0, 0], G[:, 1, 1])
    assert np.allclose(G[:, 0, 1], G[:, 1, 0])
    even = channel_kernel(t, p, EVEN)
    assert np.allclose(G[:, 0, 0] + G[:, 0, 1], even, atol=1e-14)
    with pytest.raises(ValueError):
        memory_kernel(-1.0, p)
