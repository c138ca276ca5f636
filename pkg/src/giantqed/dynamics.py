"""Excited-state amplitude dynamics.

Four routes are provided: the exact integro-differential equation
(``solve_volterra``), exact diagonalization of a finite chain
(``evolve_lattice``), and the Wigner-Weisskopf and Born-Markov
approximations.  For two atoms the spectral matrix is symmetric Toeplitz,
so the even/odd combinations ``c1 +/- c2`` evolve independently; every
continuum route solves the scalar channel problems and recombines them.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.signal import find_peaks

from .model import (
    DEFAULT_QUAD_NODES, EVEN, ODD, SINGLE, SystemParams, chebyshev_angles,
    channel_density, channel_kernel, channel_series, prefactor, series_numerator,
)
from .spectrum import PRODUCT, SpectrumResult, principal_value

VOLTERRA = "volterra"
LATTICE = "lattice"
WW = "ww"
MARKOV = "markov"
SOLVERS = (VOLTERRA, LATTICE, WW, MARKOV)

DEFAULT_DT = 0.005
DEFAULT_T_MAX = 200.0


class SolverInstability(RuntimeError):
    pass


@dataclass
class Trajectory:
    t: np.ndarray
    amplitudes: np.ndarray  # (n_times, n_atoms)
    method: str

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def n_atoms(self) -> int:
        return self.amplitudes.shape[1]

    def window(self, t_start: float, t_stop: float = math.inf) -> "Trajectory":
        m = (self.t >= t_start - 1e-12) & (self.t <= t_stop + 1e-12)
        return Trajectory(self.t[m], self.amplitudes[m], self.method)


def default_c0(params: SystemParams) -> np.ndarray:
    c0 = np.zeros(params.n_atoms, dtype=complex)
    c0[0] = 1.0
    return c0


def _prepare_c0(params: SystemParams, c0) -> np.ndarray:
    c0 = default_c0(params) if c0 is None else np.asarray(c0, dtype=complex).ravel()
    if c0.shape != (params.n_atoms,):
        raise ValueError(f"c0 must have {params.n_atoms} entries")
    if abs(np.vdot(c0, c0).real - 1.0) > 1e-9:
        raise ValueError("initial atomic amplitudes must be normalized")
    return c0


def time_grid(t_max: float, dt: float) -> np.ndarray:
    if not dt > 0 or t_max < dt:
        raise ValueError("need dt > 0 and t_max >= dt")
    n = int(round(t_max / dt))
    return dt * np.arange(n + 1)


def _combine(params: SystemParams, props: Dict[str, np.ndarray], c0: np.ndarray) -> np.ndarray:
    """Map channel propagators (each with unit initial value) to atomic amplitudes."""
    if params.n_atoms == 1:
        return props[SINGLE][:, None] * c0[None, :]
    a_e = props[EVEN] * (c0[0] + c0[1])
    a_o = props[ODD] * (c0[0] - c0[1])
    return 0.5 * np.stack([a_e + a_o, a_e - a_o], axis=1)


# -- exact: integro-differential equation -----------------------------------

def volterra_scalar(kernel: np.ndarray, delta: float, dt: float) -> np.ndarray:
    """Solve ``u' = -i delta u - int_0^t K(t - s) u(s) ds``, ``u(0) = 1``.

    Trapezoidal rule for the derivative and trapezoidal product weights for
    the convolution; the step is implicit in the newest value only, which
    enters linearly.  ``kernel[j] = K(j dt)``.
    """
    n = kernel.size - 1
    u = np.zeros(n + 1, dtype=complex)
    u[0] = 1.0
    krev = np.ascontiguousarray(kernel[::-1])
    f_prev = -1j * delta
    denom = 1.0 + 0.5 * dt * (1j * delta + 0.5 * dt * kernel[0])
    for i in range(1, n + 1):
        hist = 0.5 * kernel[i] * u[0]
        if i > 1:
            hist += np.dot(krev[n - i + 1:n], u[1:i])
        hist *= dt
        u[i] = (u[i - 1] + 0.5 * dt * (f_prev - hist)) / denom
        f_prev = -(1j * delta + 0.5 * dt * kernel[0]) * u[i] - hist
        if abs(u[i]) > 1.0 + 1e-6:
            raise SolverInstability(f"|u| = {abs(u[i]):.6f} > 1 at t = {i * dt:.4g}")
    return u


def solve_volterra(params: SystemParams, c0=None, t_max: float = DEFAULT_T_MAX,
                   dt: float = DEFAULT_DT, kernel_method: str = "bessel",
                   n_nodes: int = DEFAULT_QUAD_NODES, richardson: bool = True) -> Trajectory:
    """Exact non-Markovian amplitudes from the memory-kernel equation.

    With ``richardson`` (default) the step is also run at ``dt/2`` and the two
    second-order solutions are combined as ``(4 u_{dt/2} - u_dt) / 3``; this
    removes the ``E^3 dt^2 t`` phase drift of fast-rotating bound states.
    """
    c0 = _prepare_c0(params, c0)
    t = time_grid(t_max, dt)
    props = {}
    for ch in params.channels:
        if richardson:
            k = channel_kernel(time_grid(t[-1], 0.5 * dt), params, ch, kernel_method, n_nodes)
            fine = volterra_scalar(k, params.delta, 0.5 * dt)[::2]
            coarse = volterra_scalar(k[::2], params.delta, dt)
            props[ch] = (4.0 * fine - coarse) / 3.0
        else:
            k = channel_kernel(t, params, ch, kernel_method, n_nodes)
            props[ch] = volterra_scalar(k, params.delta, dt)
    return Trajectory(t, _combine(params, props, c0), VOLTERRA)


# -- exact: finite-lattice diagonalization ----------------------------------

def lattice_sites(params: SystemParams) -> List[Tuple[int, int]]:
    """Resonator indices of every coupling site, centred in the chain."""
    start = (params.lattice_length - 1 - params.span) // 2
    return [tuple(start + o for o in offs) for offs in params.coupling_offsets]


def lattice_hamiltonian(params: SystemParams) -> np.ndarray:
    """Single-excitation Hamiltonian; atoms first, then resonators."""
    na, L = params.n_atoms, params.lattice_length
    H = np.zeros((na + L, na + L))
    H[np.arange(na), np.arange(na)] = params.delta
    idx = np.arange(na, na + L - 1)
    H[idx, idx + 1] = H[idx + 1, idx] = -params.hopping
    for n, sites in enumerate(lattice_sites(params)):
        for s in sites:
            H[n, na + s] = H[na + s, n] = params.g0
    return H


@lru_cache(maxsize=8)
def lattice_eigensystem(params: SystemParams) -> Tuple[np.ndarray, np.ndarray]:
    return np.linalg.eigh(lattice_hamiltonian(params))


def reflection_time(params: SystemParams) -> float:
    """Time for a wavefront at group velocity 2h to return from the chain ends."""
    return (params.lattice_length / 2 - params.span) / (2.0 * params.hopping)


def lattice_state(params: SystemParams, c0, t: float) -> np.ndarray:
    """Full single-excitation state vector (atoms + resonators) at time ``t``."""
    c0 = _prepare_c0(params, c0)
    E, V = lattice_eigensystem(params)
    psi0 = np.zeros(V.shape[0], dtype=complex)
    psi0[:params.n_atoms] = c0
    return V @ (np.exp(-1j * E * t) * (V.conj().T @ psi0))


def evolve_lattice(params: SystemParams, c0=None, t_max: float = DEFAULT_T_MAX,
                   dt: float = DEFAULT_DT, chunk: int = 1024) -> Trajectory:
    """Atomic amplitudes from exact evolution on an open chain of ``lattice_length`` sites.

    Only a continuum oracle while ``t`` stays below :func:`reflection_time`.
    """
    c0 = _prepare_c0(params, c0)
    if t_max > reflection_time(params):
        warnings.warn(f"t_max={t_max} exceeds the boundary-reflection time "
                      f"{reflection_time(params):.1f}; lattice results include reflections")
    t = time_grid(t_max, dt)
    E, V = lattice_eigensystem(params)
    na = params.n_atoms
    overlap = V[:na, :].T @ c0          # <m|psi0>
    atomic = V[:na, :]                  # <n|m>
    amps = np.empty((t.size, na), dtype=complex)
    for i in range(0, t.size, chunk):
        phase = np.exp(-1j * np.outer(t[i:i + chunk], E))
        amps[i:i + chunk] = (phase * overlap) @ atomic.T
    return Trajectory(t, amps, LATTICE)


# -- approximations ---------------------------------------------------------

def solve_ww(params: SystemParams, c0=None, t_max: float = DEFAULT_T_MAX,
             dt: float = DEFAULT_DT) -> Trajectory:
    """Wigner-Weisskopf amplitudes ``exp(-i Delta t - int_0^t int_0^tau G) c(0)``.

    The exponent matrices at different times commute (two-atom kernels are
    combinations of identity and swap), so each channel is a scalar exponential.
    """
    c0 = _prepare_c0(params, c0)
    t = time_grid(t_max, dt)
    props = {}
    for ch in params.channels:
        g = channel_kernel(t, params, ch)
        inner = cumulative_trapezoid(g, t, initial=0.0)
        outer = cumulative_trapezoid(inner, t, initial=0.0)
        props[ch] = np.exp(-1j * params.delta * t - outer)
    return Trajectory(t, _combine(params, props, c0), WW)


def ww_long_time_population(params: SystemParams, n_nodes: int = DEFAULT_QUAD_NODES) -> float:
    """``lim |c_WW(t)|^2`` for one atom.

    The real part of the double kernel integral grows like
    ``pi J_0(0) t + int J_0(w) / w^2 dw``; the limit is nonzero only when
    ``J_0`` vanishes at zero frequency.
    """
    if params.n_atoms != 1:
        raise ValueError("defined for a single atom")
    series = channel_series(params, SINGLE)
    if float(series_numerator(series, math.pi / 2)) > 1e-12:
        return 0.0
    theta, weight = chebyshev_angles(n_nodes)
    vals = series_numerator(series, theta) / np.cos(theta) ** 2
    integral = prefactor(params) * weight * float(np.sum(vals)) / (4.0 * params.hopping ** 2)
    return math.exp(-2.0 * integral)


def markov_rates(params: SystemParams, n_nodes: int = DEFAULT_QUAD_NODES) -> Dict[str, complex]:
    """Per-channel Born-Markov exponent ``pi J(Delta) + i Delta_bar``."""
    h2 = params.band_edge
    if abs(params.delta) > h2 - 1e-3 * params.hopping:
        raise ValueError("Born-Markov rates need Delta inside the band, 1e-3 h from its edges")
    out = {}
    for ch in params.channels:
        rate = math.pi * channel_density(params.delta, params, ch)
        shift = params.delta + principal_value(channel_series(params, ch), params.delta,
                                               params, n_nodes)
        out[ch] = rate + 1j * shift
    return out


def solve_markov(params: SystemParams, c0=None, t_max: float = DEFAULT_T_MAX,
                 dt: float = DEFAULT_DT, n_nodes: int = DEFAULT_QUAD_NODES) -> Trajectory:
    c0 = _prepare_c0(params, c0)
    t = time_grid(t_max, dt)
    props = {ch: np.exp(-r * t) for ch, r in markov_rates(params, n_nodes).items()}
    return Trajectory(t, _combine(params, props, c0), MARKOV)


def run_solver(name: str, params: SystemParams, c0=None, t_max: float = DEFAULT_T_MAX,
               dt: float = DEFAULT_DT, n_nodes: int = DEFAULT_QUAD_NODES) -> Trajectory:
    if name == VOLTERRA:
        return solve_volterra(params, c0, t_max, dt, n_nodes=n_nodes)
    if name == LATTICE:
        return evolve_lattice(params, c0, t_max, dt)
    if name == WW:
        return solve_ww(params, c0, t_max, dt)
    if name == MARKOV:
        return solve_markov(params, c0, t_max, dt, n_nodes)
    raise ValueError(f"unknown solver {name!r}")


# -- long-time limit from the bound states ----------------------------------

@dataclass
class SteadyState:
    """Residue superposition ``c_n(t) -> sum_j w_nj exp(-i E_j t)``."""

    terms: List[List[Tuple[float, complex]]] = field(default_factory=list)

    @property
    def n_atoms(self) -> int:
        return len(self.terms)

    def amplitudes(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros((t.size, self.n_atoms), dtype=complex)
        for n, terms in enumerate(self.terms):
            for e, w in terms:
                out[:, n] += w * np.exp(-1j * e * t)
        return out

    def populations(self, t) -> np.ndarray:
        return np.abs(self.amplitudes(t)) ** 2

    def merged(self, atom: int, tol: float = 1e-9) -> List[Tuple[float, complex]]:
        out: List[Tuple[float, complex]] = []
        for e, w in sorted(self.terms[atom], key=lambda x: x[0]):
            if out and abs(out[-1][0] - e) < tol:
                out[-1] = (out[-1][0], out[-1][1] + w)
            else:
                out.append((e, w))
        return [(e, w) for e, w in out if abs(w) > 0]

    def frequencies(self, atom: int, min_amplitude: float = 0.0) -> List[Tuple[float, float]]:
        """``(|E_i - E_j|, population oscillation amplitude 2|w_i w_j|)`` pairs."""
        terms = self.merged(atom)
        out = []
        for i in range(len(terms)):
            for j in range(i + 1, len(terms)):
                amp = 2.0 * abs(terms[i][1]) * abs(terms[j][1])
                if amp > min_amplitude:
                    out.append((abs(terms[i][0] - terms[j][0]), amp))
        return sorted(out)

    def envelope(self, atom: int, n_samples: int = 200_000) -> Tuple[float, float, float]:
        """Min, mean and max of the long-time population of one atom."""
        terms = self.merged(atom)
        mean = float(sum(abs(w) ** 2 for _, w in terms))
        freqs = [f for f, _ in self.frequencies(atom) if f > 1e-9]
        if not freqs:
            return mean, mean, mean
        span = min(50.0 * 2 * math.pi / min(freqs), 1e5)
        pop = self.populations(np.linspace(0.0, span, n_samples))[:, atom]
        return float(pop.min()), mean, float(pop.max())


def steady_state(spectrum: SpectrumResult, c0=None, params: Optional[SystemParams] = None
                 ) -> SteadyState:
    """Long-time amplitudes assembled from bound-state energies and residues.

    Two atoms: even/odd residues enter as ``(Z/2)(c1 + c2)`` and
    ``+/-(Z/2)(c1 - c2)``; each of the degenerate product-state BICs is
    localized on one atom and carries that atom's single-atom residue.
    """
    params = params or spectrum.params
    c0 = _prepare_c0(params, c0)
    terms: List[List[Tuple[float, complex]]] = [[] for _ in range(params.n_atoms)]
    for b in spectrum.bound_states:
        z = complex(b.residue)
        if params.n_atoms == 1:
            terms[0].append((b.energy, z * c0[0]))
        elif b.channel == PRODUCT:
            terms[0].append((b.energy, z * c0[0]))
            terms[1].append((b.energy, z * c0[1]))
        elif b.channel == EVEN:
            w = 0.5 * z * (c0[0] + c0[1])
            terms[0].append((b.energy, w))
            terms[1].append((b.energy, w))
        elif b.channel == ODD:
            w = 0.5 * z * (c0[0] - c0[1])
            terms[0].append((b.energy, w))
            terms[1].append((b.energy, -w))
    return SteadyState(terms)


def fft_frequencies(traj: Trajectory, atom: int = 0, fraction: float = 0.25,
                    rel_height: float = 0.05, pad: int = 16) -> Tuple[np.ndarray, np.ndarray, float]:
    """Angular frequencies of the population oscillation over the final ``fraction``.

    Hann-windowed, zero-padded FFT of the mean-subtracted population.
    Returns ``(peak_frequencies, peak_amplitudes, bin_width)``; amplitudes are
    normalized so a pure ``a cos(w t)`` gives ``a``.
    """
    n = traj.t.size
    start = int(round(n * (1.0 - fraction)))
    t = traj.t[start:]
    pop = traj.populations[start:, atom]
    dt = t[1] - t[0]
    win = np.hanning(t.size)
    sig = (pop - pop.mean()) * win
    spec = np.abs(np.fft.rfft(sig, n=pad * t.size)) * 2.0 / win.sum()
    omega = 2 * np.pi * np.fft.rfftfreq(pad * t.size, dt)
    bin_width = 2 * np.pi / (t[-1] - t[0])
    if spec.max() <= 0:
        return np.array([]), np.array([]), bin_width
    idx, _ = find_peaks(spec, height=rel_height * spec.max())
    return omega[idx], spec[idx], bin_width
