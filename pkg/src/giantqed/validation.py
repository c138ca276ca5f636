"""Invariant suites with measured deviations, shared by ``giantqed validate``."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from . import dynamics as dyn
from .model import (
    SystemParams, channel_kernel, channel_series, spectral_density_j0, spectral_density_j1,
)
from .observables import concurrence, reduced_density_matrix
from .spectrum import BOC, PRODUCT, _outside, full_spectrum


@dataclass
class Check:
    suite: str
    name: str
    measured: float
    tolerance: float
    passed: bool


def _check(suite: str, name: str, measured: float, tolerance: float, upper: bool = True) -> Check:
    ok = measured <= tolerance if upper else measured >= tolerance
    return Check(suite, name, float(measured), float(tolerance), bool(ok))


def kernel_identity() -> List[Check]:
    t = np.linspace(0.0, 100.0, 2001)
    out = []
    for d, z in [(1, 1), (3, 3), (10, 10)]:
        p = SystemParams(g0=1.0, d=d, z=z, n_atoms=2)
        dev = max(np.max(np.abs(channel_kernel(t, p, ch) - channel_kernel(t, p, ch, "quadrature")))
                  for ch in ("even", "odd"))
        out.append(_check("kernel", f"bessel_vs_quadrature_d{d}_z{z}", dev, 1e-10))
    return out


def spectral_psd() -> List[Check]:
    w = np.linspace(-2.0, 2.0, 10_002)[1:-1]
    worst = 0.0
    for d in range(1, 6):
        for z in range(1, 6):
            p = SystemParams(g0=1.0, d=d, z=z, n_atoms=2)
            j0, j1 = spectral_density_j0(w, p), spectral_density_j1(w, p)
            worst = min(worst, float(np.min(j0 - np.abs(j1))))
    return [_check("spectral", "min(J0 - |J1|)", max(0.0, -worst), 1e-12)]


def residues() -> List[Check]:
    points = [
        SystemParams(delta=-0.6, d=1, g0=2.7),
        SystemParams(delta=0.0, d=2, g0=0.8),
        SystemParams(delta=-1.0, d=3, g0=0.8),
        SystemParams(delta=-1.0, d=3, z=3, g0=0.6, n_atoms=2),
        SystemParams(delta=1.04, d=2, z=1, g0=1.0, n_atoms=2),
    ]
    out = []
    for p in points:
        sp = full_spectrum(p)
        weight = 0.0
        for b in sp.bound_states:
            z = b.residue.real
            weight += z if (p.n_atoms == 1 or b.channel == PRODUCT) else 0.5 * z
        out.append(_check("residue", f"atom1_weight_{_tag(p)}", weight, 1.0))
        residual = max([abs(_root_residual(p, b)) for b in sp.bound_states if b.kind == BOC] or [0])
        out.append(_check("residue", f"root_residual_{_tag(p)}", residual, 1e-9))
    return out


def _root_residual(p: SystemParams, b) -> float:
    y = p.delta + _outside(channel_series(p, b.channel), b.side, b.gap, p)
    return y - b.side * (p.band_edge + b.gap)


def concurrence_closed_form(n: int = 1000, seed: int = 7) -> List[Check]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        v = rng.normal(size=4)
        c1, c2 = complex(v[0], v[1]), complex(v[2], v[3])
        scale = math.sqrt(abs(c1) ** 2 + abs(c2) ** 2) / rng.uniform(0.0, 1.0)
        c1, c2 = c1 / scale, c2 / scale
        worst = max(worst, abs(concurrence(reduced_density_matrix(c1, c2)) - 2 * abs(c1) * abs(c2)))
    return [_check("observables", "concurrence_vs_2|c1||c2|", worst, 1e-10)]


def convergence_order() -> List[Check]:
    p = SystemParams(delta=0.3, d=2, g0=0.8)
    sol = {dt: dyn.solve_volterra(p, t_max=20.0, dt=dt, richardson=False).amplitudes[:, 0]
           for dt in (0.04, 0.02, 0.01)}
    e1 = np.max(np.abs(sol[0.04] - sol[0.02][::2]))
    e2 = np.max(np.abs(sol[0.02][::2] - sol[0.01][::4]))
    ratio = e1 / e2
    return [Check("dynamics", "richardson_ratio", float(ratio), 4.0, bool(3.5 <= ratio <= 4.5))]


def oracle_equivalence() -> List[Check]:
    out = []
    for p in [SystemParams(delta=-0.6, d=1, g0=1.2),
              SystemParams(delta=-1.0, d=3, z=3, g0=0.6, n_atoms=2)]:
        v = dyn.solve_volterra(p, t_max=60.0)
        lat = dyn.evolve_lattice(p, t_max=60.0)
        dev = float(np.max(np.abs(v.populations - lat.populations)))
        out.append(_check("dynamics", f"volterra_vs_lattice_{_tag(p)}", dev, 1e-3))
        E, V = dyn.lattice_eigensystem(p)
        outside = E[np.abs(E) > p.band_edge + 1e-3]
        for b in full_spectrum(p).bocs:
            if b.resolved and b.gap > 1e-3:
                dev = float(np.min(np.abs(outside - b.energy)))
                out.append(_check("spectrum", f"boc_vs_lattice_{_tag(p)}_E{b.energy:.4f}", dev, 1e-4))
    return out


def ww_limit() -> List[Check]:
    p = SystemParams(delta=0.0, d=2, g0=0.8)
    dev = abs(dyn.ww_long_time_population(p) - math.exp(-1.28))
    return [_check("dynamics", "ww_limit_d2", dev, 1e-6)]


def _tag(p: SystemParams) -> str:
    s = f"N{p.n_atoms}_D{p.delta:g}_g{p.g0:g}_d{p.d}"
    return s + (f"_z{p.z}" if p.n_atoms == 2 else "")


SUITES: Dict[str, Callable[[], List[Check]]] = {
    "kernel": kernel_identity,
    "spectral": spectral_psd,
    "residue": residues,
    "observables": concurrence_closed_form,
    "convergence": convergence_order,
    "oracle": oracle_equivalence,
    "ww": ww_limit,
}


def run_all() -> List[Check]:
    checks: List[Check] = []
    for suite in SUITES.values():
        checks.extend(suite())
    return checks
