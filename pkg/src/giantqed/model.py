"""Physical parameters, coupling geometry, spectral densities and memory kernel.

Energies are measured in units of the resonator hopping ``h`` and times in
units of ``1/h``.  Every spectral density used here has the form

    J(w) = (2 g0^2 / pi) * sum_m c_m T_m(-w / 2h) / sqrt(4h^2 - w^2)

on the open band ``(-2h, 2h)``.  A density is therefore fully described by
its cosine-series coefficients ``{m: c_m}``; band integrals are done in the
angle variable ``w = -2h cos(theta)`` where the inverse-square-root weight
cancels against ``dw``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, Tuple

import numpy as np
from scipy.special import jv

SINGLE = "single"
EVEN = "even"
ODD = "odd"
CHANNELS = (SINGLE, EVEN, ODD)

DEFAULT_QUAD_NODES = 2000


@dataclass(frozen=True)
class SystemParams:
    """One or two giant atoms, each coupled to two sites of a resonator chain.

    Attributes
    ----------
    delta : float
        Atom-resonator detuning.
    hopping : float
        Nearest-neighbour resonator coupling ``h`` (energy unit).
    g0 : float
        Atom-resonator coupling at each coupling site.
    d : int
        Distance between the two coupling sites of one atom.
    z : int
        Gap between the inner coupling sites of atom 1 and atom 2.
    n_atoms : int
        1 or 2.
    lattice_length : int
        Resonator count used by the finite-lattice oracle.
    """

    delta: float = 0.0
    hopping: float = 1.0
    g0: float = 0.8
    d: int = 1
    z: int = 1
    n_atoms: int = 1
    n_sites_per_atom: int = 2
    lattice_length: int = 800

    def __post_init__(self):
        if not self.hopping > 0:
            raise ValueError(f"hopping must be > 0, got {self.hopping}")
        if self.g0 < 0:
            raise ValueError(f"g0 must be >= 0, got {self.g0}")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d}")
        if int(self.z) != self.z or self.z < 1:
            raise ValueError(f"z must be a positive integer, got {self.z}")
        if self.n_atoms not in (1, 2):
            raise ValueError(f"n_atoms must be 1 or 2, got {self.n_atoms}")
        if self.n_sites_per_atom != 2:
            raise ValueError("only two coupling sites per atom are supported")
        if self.lattice_length < 2 * (self.d + self.z) + 4:
            raise ValueError(
                f"lattice_length={self.lattice_length} too short for d={self.d}, z={self.z}"
            )

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    @property
    def band_edge(self) -> float:
        return 2.0 * self.hopping

    @property
    def coupling_offsets(self) -> Tuple[Tuple[int, int], ...]:
        """Coupling-site offsets per atom (non-braided layout)."""
        d, z = int(self.d), int(self.z)
        if self.n_atoms == 1:
            return ((0, d),)
        return ((0, d), (d + z, 2 * d + z))

    @property
    def span(self) -> int:
        return self.coupling_offsets[-1][-1]

    @property
    def channels(self) -> Tuple[str, ...]:
        """Decoupled eigen-channels of the spectral matrix."""
        return (SINGLE,) if self.n_atoms == 1 else (EVEN, ODD)


def dispersion(k, params: SystemParams):
    """Resonator band ``w_k = -2h cos k``."""
    return -2.0 * params.hopping * np.cos(k)


def chebyshev(n: int, x):
    """Chebyshev polynomial of the first kind ``T_n(x)`` for ``|x| <= 1``.

    Evaluated by the three-term recurrence, which stays accurate as
    ``|x| -> 1`` where ``cos(n arccos x)`` loses digits.
    """
    if n < 0 or int(n) != n:
        raise ValueError(f"order must be a nonnegative integer, got {n}")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0):
        raise ValueError("Chebyshev argument outside [-1, 1]")
    t_prev, t_cur = np.ones_like(x), x.copy()
    if n == 0:
        return t_prev if t_prev.ndim else float(t_prev)
    for _ in range(int(n) - 1):
        t_prev, t_cur = t_cur, 2.0 * x * t_cur - t_prev
    return t_cur if t_cur.ndim else float(t_cur)


# -- cosine-series description of the spectral densities ---------------------

def _add(series: Dict[int, float], m: int, c: float) -> None:
    series[m] = series.get(m, 0.0) + c


def direct_series(params: SystemParams) -> Dict[int, float]:
    """Coefficients of ``J_0`` (one atom's self term): ``1 + T_d``."""
    return {0: 1.0, int(params.d): 1.0}


def cross_series(params: SystemParams) -> Dict[int, float]:
    """Coefficients of ``J_1``: ``(T_z + 2 T_{z+d} + T_{z+2d}) / 2``."""
    d, z = int(params.d), int(params.z)
    out: Dict[int, float] = {}
    _add(out, z, 0.5)
    _add(out, z + d, 1.0)
    _add(out, z + 2 * d, 0.5)
    return out


def channel_series(params: SystemParams, channel: str) -> Dict[int, float]:
    """Cosine-series coefficients of the density driving ``channel``.

    ``single`` is ``J_0``; ``even``/``odd`` are ``J_0 +/- J_1``, the
    eigenvalues of the symmetric two-atom spectral matrix.
    """
    if channel == SINGLE:
        return direct_series(params)
    if channel not in (EVEN, ODD):
        raise ValueError(f"unknown channel {channel!r}")
    if params.n_atoms != 2:
        raise ValueError("even/odd channels need n_atoms = 2")
    sign = 1.0 if channel == EVEN else -1.0
    out = dict(direct_series(params))
    for m, c in cross_series(params).items():
        _add(out, m, sign * c)
    return {m: c for m, c in out.items() if c != 0.0}


def prefactor(params: SystemParams) -> float:
    return 2.0 * params.g0 ** 2 / np.pi


def _check_band(omega, params: SystemParams) -> np.ndarray:
    omega = np.asarray(omega, dtype=float)
    if np.any(np.abs(omega) >= params.band_edge):
        raise ValueError("spectral density is defined on the open band |w| < 2h only")
    return omega


def series_density(series: Dict[int, float], omega, params: SystemParams):
    """Evaluate a cosine-series spectral density at in-band frequencies."""
    omega = _check_band(omega, params)
    h = params.hopping
    x = -omega / (2.0 * h)
    num = sum(c * chebyshev(m, x) for m, c in series.items())
    out = prefactor(params) * num / np.sqrt(4.0 * h * h - omega * omega)
    return out if np.ndim(out) else float(out)


def spectral_density_j0(omega, params: SystemParams):
    """Self spectral density ``J_0(w)`` of one giant atom."""
    return series_density(direct_series(params), omega, params)


def spectral_density_j1(omega, params: SystemParams):
    """Cross spectral density ``J_1(w)`` between the two atoms (may be negative)."""
    if params.n_atoms != 2:
        raise ValueError("J_1 needs n_atoms = 2")
    return series_density(cross_series(params), omega, params)


def channel_density(omega, params: SystemParams, channel: str):
    return series_density(channel_series(params, channel), omega, params)


def spectral_matrix(omega, params: SystemParams) -> np.ndarray:
    """``n_atoms x n_atoms`` spectral matrix at one frequency."""
    j0 = spectral_density_j0(omega, params)
    if params.n_atoms == 1:
        return np.array([[j0]])
    j1 = spectral_density_j1(omega, params)
    return np.array([[j0, j1], [j1, j0]])


# -- quadrature -------------------------------------------------------------

def chebyshev_angles(n: int = DEFAULT_QUAD_NODES) -> Tuple[np.ndarray, float]:
    """Gauss-Chebyshev (first kind) nodes in angle form and their common weight.

    ``int_{-2h}^{2h} f(w) dw / sqrt(4h^2 - w^2) = int_0^pi f(-2h cos t) dt``
    is approximated by ``(pi/n) * sum f(-2h cos t_k)``, ``t_k = (k + 1/2) pi / n``.
    """
    if n < 1:
        raise ValueError("need at least one node")
    theta = (np.arange(n) + 0.5) * np.pi / n
    return theta, np.pi / n


def series_numerator(series: Dict[int, float], theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    return sum(c * np.cos(m * theta) for m, c in series.items())


def band_integral(series: Dict[int, float], g, params: SystemParams,
                  n_nodes: int = DEFAULT_QUAD_NODES):
    """``int J(w) g(w) dw`` for a smooth ``g`` by Gauss-Chebyshev quadrature."""
    theta, weight = chebyshev_angles(n_nodes)
    omega = -2.0 * params.hopping * np.cos(theta)
    vals = series_numerator(series, theta) * g(omega)
    return prefactor(params) * weight * np.sum(vals, axis=-1)


# -- memory kernel ----------------------------------------------------------

def _series_kernel(series: Dict[int, float], t, params: SystemParams) -> np.ndarray:
    x = 2.0 * params.hopping * np.asarray(t, dtype=float)
    out = np.zeros(np.shape(x), dtype=complex)
    for m, c in series.items():
        out += c * (1j ** m) * jv(m, x)
    return 2.0 * params.g0 ** 2 * out


def _series_kernel_quad(series: Dict[int, float], t, params: SystemParams,
                        n_nodes: int) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(t.shape, dtype=complex)
    # chunk over time to bound memory
    for i in range(0, t.size, 256):
        tt = t[i:i + 256, None]
        out[i:i + 256] = band_integral(series, lambda w: np.exp(-1j * w * tt), params, n_nodes)
    return out


def channel_kernel(t, params: SystemParams, channel: str, method: str = "bessel",
                   n_nodes: int = DEFAULT_QUAD_NODES) -> np.ndarray:
    """Scalar memory kernel ``int J_channel(w) exp(-i w t) dw``."""
    series = channel_series(params, channel)
    if method == "bessel":
        return _series_kernel(series, t, params)
    if method == "quadrature":
        return _series_kernel_quad(series, t, params, n_nodes).reshape(np.shape(t))
    raise ValueError(f"unknown kernel method {method!r}")


def memory_kernel(t, params: SystemParams, method: str = "bessel",
                  n_nodes: int = DEFAULT_QUAD_NODES) -> np.ndarray:
    """Environmental correlation matrix ``G(t)``.

    Returns an array of shape ``t.shape + (n_atoms, n_atoms)``.  The default
    closed form uses ``int_0^pi cos(m t) exp(i x cos t) dt = pi i^m J_m(x)``;
    ``method="quadrature"`` integrates the defining band integral directly.
    """
    if np.any(np.asarray(t) < 0):
        raise ValueError("memory kernel is evaluated for t >= 0")
    if method == "bessel":
        g0_t = _series_kernel(direct_series(params), t, params)
    else:
        g0_t = channel_kernel(t, params, SINGLE, method, n_nodes)
    shape = np.shape(t) + (params.n_atoms, params.n_atoms)
    out = np.empty(shape, dtype=complex)
    if params.n_atoms == 1:
        out[..., 0, 0] = g0_t
        return out
    if method == "bessel":
        g1_t = _series_kernel(cross_series(params), t, params)
    else:
        g1_t = _series_kernel_quad(cross_series(params), t, params, n_nodes).reshape(np.shape(t))
    out[..., 0, 0] = out[..., 1, 1] = g0_t
    out[..., 0, 1] = out[..., 1, 0] = g1_t
    return out
