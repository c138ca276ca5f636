import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from giantqed.observables import (
    GG, TwoQubitState, concurrence, concurrence_series, reduced_density_matrix,
)

amp = st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False)


def test_bell_state():
    r = 1 / math.sqrt(2)
    assert concurrence(reduced_density_matrix(r, r)) == pytest.approx(1.0, abs=1e-14)


def test_product_state():
    assert concurrence(reduced_density_matrix(1.0, 0.0)) == 0.0


def test_mixture_ground_weight():
    st_ = reduced_density_matrix(0.5, 0.5)
    assert st_.rho[GG, GG].real == pytest.approx(0.5)
    assert concurrence(st_) == pytest.approx(0.5, abs=1e-14)


def test_invalid_states():
    with pytest.raises(ValueError):
        reduced_density_matrix(1.0, 0.5)
    with pytest.raises(ValueError):
        TwoQubitState(np.eye(4))
    bad = np.diag([1.2, -0.2, 0, 0])
    with pytest.raises(ValueError):
        TwoQubitState(bad)


@given(c1=amp, c2=amp)
def test_closed_form(c1, c2):
    assume(abs(c1) ** 2 + abs(c2) ** 2 <= 1.0)
    c = concurrence(reduced_density_matrix(c1, c2))
    assert abs(c - 2 * abs(c1) * abs(c2)) < 1e-10
    assert c <= abs(c1) ** 2 + abs(c2) ** 2 + 1e-12


@given(c1=amp, c2=amp)
def test_eigen_route_agrees(c1, c2):
    assume(abs(c1) ** 2 + abs(c2) ** 2 <= 1.0)
    s = reduced_density_matrix(c1, c2)
    # square roots of round-off eigenvalues limit this route to ~1e-7
    assert abs(concurrence(s, method="eig") - concurrence(s)) < 1e-6


@given(c1=amp, c2=amp, a=st.floats(0, 2 * math.pi), b=st.floats(0, 2 * math.pi))
def test_phase_invariance(c1, c2, a, b):
    assume(abs(c1) ** 2 + abs(c2) ** 2 <= 1.0)
    base = concurrence(reduced_density_matrix(c1, c2))
    rot = concurrence(reduced_density_matrix(c1 * cmath.exp(1j * a), c2 * cmath.exp(1j * b)))
    assert abs(base - rot) < 1e-10


def test_series_shape():
    a = np.array([[0.6, 0.8j], [1.0, 0.0]])
    assert np.allclose(concurrence_series(a), [0.96, 0.0])
    with pytest.raises(ValueError):
        concurrence_series(np.ones((3, 3)))
