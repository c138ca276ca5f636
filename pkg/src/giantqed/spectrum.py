"""Single-excitation bound states: BOCs outside the band, BICs inside it.

Outside the band the level-shift integral of a cosine-series density has
the closed form

    int J(w) / (E - w) dw = 2 g0^2 sgn(E) / sqrt(E^2 - 4h^2) * sum_m c_m (-u)^m,

with ``u = x - sgn(x) sqrt(x^2 - 1)``, ``x = E / 2h``.  Inside the band the
principal value follows from the Glauert integral
``PV int_0^pi cos(m t) / (cos t - cos t0) dt = pi sin(m t0) / sin t0``.
All out-of-band evaluations are parametrized by the gap ``|E| - 2h`` so
that states pinned close to a band edge keep full relative precision.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from .model import (
    DEFAULT_QUAD_NODES, EVEN, ODD, SINGLE, SystemParams, chebyshev_angles,
    channel_series, prefactor, series_numerator,
)

log = logging.getLogger(__name__)

BOC = "BOC"
BIC = "BIC"
TYPE_I = "I"
TYPE_II = "II"
PRODUCT = "product"

EPS_EDGE = 1e-8
EPS_RESOLVE = 1e-6
EPS_BIC = 1e-6


@dataclass(frozen=True)
class BoundState:
    """One discrete eigen-solution.

    ``gap`` is ``|E| - 2h`` for BOCs (kept separately because it is known to
    far better relative precision than ``energy``).  ``resolved`` is False for
    BOCs pinned within ``EPS_RESOLVE`` of a band edge.
    """

    energy: float
    kind: str
    channel: str
    boc_type: Optional[str] = None
    residue: complex = 0.0
    gap: Optional[float] = None
    resolved: bool = True
    multiplicity: int = 1

    @property
    def side(self) -> int:
        return 1 if self.energy > 0 else -1


@dataclass
class SpectrumResult:
    params: SystemParams
    bound_states: List[BoundState] = field(default_factory=list)

    @property
    def band(self) -> Tuple[float, float]:
        return (-self.params.band_edge, self.params.band_edge)

    @property
    def bocs(self) -> List[BoundState]:
        return [b for b in self.bound_states if b.kind == BOC]

    @property
    def bics(self) -> List[BoundState]:
        return [b for b in self.bound_states if b.kind == BIC]

    def count(self, kind: Optional[str] = None, boc_type: Optional[str] = None,
              side: Optional[int] = None, channel: Optional[str] = None,
              resolved_only: bool = False) -> int:
        n = 0
        for b in self.bound_states:
            if kind is not None and b.kind != kind:
                continue
            if boc_type is not None and b.boc_type != boc_type:
                continue
            if side is not None and b.side != side:
                continue
            if channel is not None and b.channel != channel:
                continue
            if resolved_only and not b.resolved:
                continue
            n += b.multiplicity
        return n


# -- closed-form level shifts -------------------------------------------------

def _edge_sums(series: Dict[int, float], side: int) -> Tuple[float, float]:
    """``sum c_m s^m`` and ``sum m c_m s^m`` with ``s = -side``."""
    sgn = -side
    a = sum(c * sgn ** m for m, c in series.items())
    b = sum(m * c * sgn ** m for m, c in series.items())
    return a, b


def _outside(series: Dict[int, float], side: int, gap: float, params: SystemParams,
             derivative: bool = False):
    """Level-shift integral and optionally its E-derivative at ``E = side*(2h+gap)``."""
    if not gap > 0:
        raise ValueError("gap to the band edge must be positive")
    h = params.hopping
    a = gap / (2.0 * h)
    r = math.sqrt(a * (a + 2.0))          # sqrt(x^2 - 1)
    log_u = -math.log1p(a + r)            # log|u|, |u| = exp(-arccosh|x|)
    sgn = -side
    s0 = sum(c * sgn ** m for m, c in series.items())
    s_rest = sum(c * sgn ** m * math.expm1(m * log_u) for m, c in series.items())
    s = s0 + s_rest
    g2 = params.g0 ** 2
    shift = g2 * side * s / (h * r)
    if not derivative:
        return shift
    s1 = sum(m * c * sgn ** m * math.exp(m * log_u) for m, c in series.items())
    x = 1.0 + a
    dshift_dx = -(g2 / h) * (s1 / r ** 2 + s * x / r ** 3)
    return shift, dshift_dx / (2.0 * h)


def _inside(series: Dict[int, float], energy: float, params: SystemParams,
            derivative: bool = False):
    """Principal-value shift (and derivative) at an in-band energy."""
    h = params.hopping
    if abs(energy) >= 2.0 * h:
        raise ValueError("energy must lie strictly inside the band")
    t0 = math.acos(-energy / (2.0 * h))
    st = math.sin(t0)
    g2 = params.g0 ** 2
    num = sum(c * math.sin(m * t0) for m, c in series.items())
    shift = g2 * num / (h * st)
    if not derivative:
        return shift
    dnum = sum(c * m * math.cos(m * t0) for m, c in series.items())
    dshift_dt = g2 / h * (dnum * st - num * math.cos(t0)) / st ** 2
    return shift, dshift_dt / (2.0 * h * st)


def edge_limit(params: SystemParams, channel: str, side: int) -> float:
    """``lim Y(E) - Delta`` as ``E -> side * 2h`` from outside the band."""
    series = channel_series(params, channel)
    a, b = _edge_sums(series, side)
    if abs(a) > 1e-12:
        return side * math.inf
    return -side * (params.g0 ** 2 / params.hopping) * b


def level_shift_Y(energy: float, channel: str, params: SystemParams) -> float:
    """``Y(E) = Delta + int J_channel(w) / (E - w) dw`` for ``|E| > 2h``."""
    gap = abs(energy) - params.band_edge
    if not gap > 0:
        raise ValueError("level shift Y(E) is defined for |E| > 2h only")
    series = channel_series(params, channel)
    return params.delta + _outside(series, 1 if energy > 0 else -1, gap, params)


def level_shift_in_band(energy: float, channel: str, params: SystemParams) -> float:
    """``Delta + PV int J_channel(w) / (E - w) dw`` for ``|E| < 2h``."""
    return params.delta + _inside(channel_series(params, channel), energy, params)


def principal_value(series: Dict[int, float], energy: float, params: SystemParams,
                    n_nodes: int = DEFAULT_QUAD_NODES) -> float:
    """Singularity-subtracted Gauss-Chebyshev ``PV int J(w) / (E - w) dw``.

    In the angle variable the integrand is ``f(t) / (2h (cos t - cos t0))``;
    subtracting ``f(t0)`` leaves a smooth function because
    ``PV int_0^pi dt / (cos t - cos t0) = 0``.
    """
    h = params.hopping
    t0 = math.acos(-energy / (2.0 * h))
    theta, weight = chebyshev_angles(n_nodes)
    f0 = float(series_numerator(series, t0))
    df0 = -sum(c * m * math.sin(m * t0) for m, c in series.items())
    den = np.cos(theta) - math.cos(t0)
    near = np.abs(theta - t0) < 1e-7
    vals = np.empty_like(theta)
    vals[~near] = (series_numerator(series, theta[~near]) - f0) / den[~near]
    vals[near] = df0 / -math.sin(t0)
    return prefactor(params) * weight * float(np.sum(vals)) / (2.0 * h)


# -- bound states out of the continuum --------------------------------------

def _bracket_bound(params: SystemParams) -> float:
    h = params.hopping
    return abs(params.delta) + (2 * params.z + params.d) * params.g0 ** 2 / h + h


def find_bocs(params: SystemParams, eps_edge: float = EPS_EDGE,
              eps_resolve: float = EPS_RESOLVE) -> List[BoundState]:
    """Roots of ``Y(E) = E`` outside the band, for every channel and side.

    ``Y(E) - E`` is strictly decreasing on each side, so each (channel, side)
    holds at most one root.  It exists unconditionally when the level shift
    diverges at the adjacent edge (type I) and otherwise only when the finite
    edge limit overshoots the edge (type II).
    """
    out: List[BoundState] = []
    two_h = params.band_edge
    for channel in params.channels:
        series = channel_series(params, channel)
        for side in (1, -1):
            lim = edge_limit(params, channel, side)
            if math.isinf(lim):
                btype = TYPE_I
            elif side * (params.delta + lim) > two_h:
                btype = TYPE_II
            else:
                continue

            def excess(gap, _s=series, _side=side):
                # (Y - E) * side, decreasing in gap
                y = params.delta + _outside(_s, _side, gap, params)
                return _side * y - (two_h + gap)

            if excess(eps_edge) <= 0:
                gap = 0.5 * eps_edge
                log.info("%s %s-BOC on side %+d sits within %.1e of the band edge",
                         channel, btype, side, eps_edge)
            else:
                far = _bracket_bound(params)
                while excess(far) >= 0:
                    far *= 2.0
                gap = brentq(excess, eps_edge, far, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                             maxiter=1000)
            resolved = gap >= eps_resolve
            if not resolved:
                log.info("%s BOC (type %s, side %+d) unresolved: gap %.2e", channel, btype, side, gap)
            out.append(BoundState(energy=side * (two_h + gap), kind=BOC, channel=channel,
                                  boc_type=btype, gap=gap, resolved=resolved))
    return out


# -- bound states in the continuum ------------------------------------------

def _single_bic_energies(params: SystemParams) -> List[float]:
    """In-band zeros of ``1 + T_d(-E/2h)``: ``E = -2h cos((2l+1) pi / d)``."""
    d = int(params.d)
    return [-params.band_edge * math.cos((2 * l + 1) * math.pi / d)
            for l in range((d + 1) // 2) if 2 * l + 1 < d]


def find_bics(params: SystemParams, eps_bic: float = EPS_BIC) -> List[BoundState]:
    """BICs allowed by the removable-singularity conditions.

    One atom: ``Delta`` equal to a zero of ``J_0``.  Two atoms: zeros of
    ``J_0 +/- J_1`` (odd ``l`` even channel, even ``l`` odd channel) that
    satisfy the in-band eigen-equation, plus the degenerate pair of product
    BICs at the zeros of ``J_0`` when ``E = Delta``.
    """
    out: List[BoundState] = []
    h, delta = params.hopping, params.delta

    def accept(residual, energy, label):
        if residual < eps_bic:
            return True
        if residual < 10 * eps_bic:
            log.info("rejected near-miss %s BIC at E=%.6g (residual %.2e)", label, energy, residual)
        return False

    single_zeros = _single_bic_energies(params)
    if params.n_atoms == 1:
        for e in single_zeros:
            if accept(abs(delta - e), e, SINGLE):
                out.append(BoundState(energy=e, kind=BIC, channel=SINGLE))
        return out

    n = int(params.d + params.z)
    direct = channel_series(params, SINGLE)
    for l in range(1, n):
        e = -2.0 * h * math.cos(l * math.pi / n)
        if abs(float(series_numerator(direct, l * math.pi / n))) < 1e-12:
            continue  # also a zero of J_0: product-state case below
        channel = EVEN if l % 2 else ODD
        y = level_shift_in_band(e, channel, params)
        if accept(abs(y - e), e, channel):
            out.append(BoundState(energy=e, kind=BIC, channel=channel))
    for e in single_zeros:
        if accept(abs(delta - e), e, PRODUCT):
            out.append(BoundState(energy=e, kind=BIC, channel=PRODUCT, multiplicity=2))
    return out


# -- residues -----------------------------------------------------------------

def _bic_weight_integral(series: Dict[int, float], energy: float, params: SystemParams,
                         n_nodes: int) -> float:
    """``int J(w) / (E - w)^2 dw`` at a zero of ``J`` by subtracted quadrature."""
    h = params.hopping
    t0 = math.acos(-energy / (2.0 * h))
    f0 = float(series_numerator(series, t0))
    df0 = -sum(c * m * math.sin(m * t0) for m, c in series.items())
    ddf0 = -sum(c * m * m * math.cos(m * t0) for m, c in series.items())
    scale = sum(abs(c) for c in series.values())
    if abs(f0) > 1e-9 * scale or abs(df0) > 1e-7 * scale * max(series):
        raise ValueError(f"J does not vanish quadratically at E={energy:.6g}: not a BIC")
    theta, weight = chebyshev_angles(n_nodes)
    den = (np.cos(theta) - math.cos(t0)) ** 2
    near = np.abs(theta - t0) < 1e-5
    vals = np.empty_like(theta)
    vals[~near] = (series_numerator(series, theta[~near]) - f0
                   - df0 * (theta[~near] - t0)) / den[~near]
    vals[near] = 0.5 * ddf0 / math.sin(t0) ** 2
    if not np.all(np.isfinite(vals)):
        raise ValueError(f"non-finite subtracted integrand at E={energy:.6g}")
    return prefactor(params) * weight * float(np.sum(vals)) / (4.0 * h * h)


def weight_integral(bs: BoundState, params: SystemParams, channel: Optional[str] = None,
                    method: str = "analytic", n_nodes: int = DEFAULT_QUAD_NODES) -> float:
    """``int J_channel(w) / (E - w)^2 dw``, the photonic weight of a bound state."""
    channel = channel or bs.channel
    series = channel_series(params, SINGLE if channel == PRODUCT else channel)
    if bs.kind == BOC:
        gap = bs.gap if bs.gap is not None else abs(bs.energy) - params.band_edge
        if method == "analytic":
            _, dshift = _outside(series, bs.side, gap, params, derivative=True)
            return -dshift
        e = bs.side * (params.band_edge + gap)
        theta, weight = chebyshev_angles(n_nodes)
        w = -2.0 * params.hopping * np.cos(theta)
        return prefactor(params) * weight * float(
            np.sum(series_numerator(series, theta) / (e - w) ** 2))
    if method == "analytic":
        _, dshift = _inside(series, bs.energy, params, derivative=True)
        return -dshift
    return _bic_weight_integral(series, bs.energy, params, n_nodes)


def residue(bs: BoundState, params: SystemParams, channel: Optional[str] = None,
            method: Optional[str] = None, n_nodes: int = DEFAULT_QUAD_NODES) -> complex:
    """Pole residue ``Z = [1 + int J / (E - w)^2 dw]^-1`` of a bound state.

    By default BOCs use the closed form (their integrand is sharply peaked
    near a band edge) and BICs use subtracted quadrature.
    """
    if method is None:
        method = "analytic" if bs.kind == BOC else "quadrature"
    w = weight_integral(bs, params, channel, method, n_nodes)
    return complex(1.0 / (1.0 + w))


def full_spectrum(params: SystemParams, n_nodes: int = DEFAULT_QUAD_NODES,
                  eps_edge: float = EPS_EDGE, eps_resolve: float = EPS_RESOLVE,
                  eps_bic: float = EPS_BIC) -> SpectrumResult:
    states = find_bocs(params, eps_edge, eps_resolve) + find_bics(params, eps_bic)
    states = [replace(b, residue=residue(b, params, n_nodes=n_nodes)) for b in states]
    states.sort(key=lambda b: (b.energy, b.channel))
    return SpectrumResult(params=params, bound_states=states)


def locate_onset(params: SystemParams, name: str, lo: float, hi: float, present,
                 tol: float = 1e-7) -> float:
    """Bisect a parameter for the point where ``present(full_spectrum(...))`` switches.

    ``present`` is a predicate on a SpectrumResult that must differ between
    ``lo`` and ``hi``; the returned value is the midpoint of the final bracket.
    """
    def at(v):
        p = params.with_(**{name: v})
        return bool(present(SpectrumResult(p, find_bocs(p) + find_bics(p))))

    f_lo = at(lo)
    if f_lo == at(hi):
        raise ValueError(f"no onset in {name} in [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if at(mid) == f_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
