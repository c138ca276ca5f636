"""Print bound-state formation thresholds located by bisection on the spectrum.

Each line gives the located value next to the closed-form or quoted target.
"""
import math

from giantqed.model import EVEN, ODD, SystemParams as P
from giantqed.spectrum import BOC, TYPE_II, full_spectrum, locate_onset

CASES = [
    ("1 atom, d=1, Delta=-0.6: upper type-II in g0", P(delta=-0.6, d=1),
     "g0", 1.0, 2.5, lambda s: s.count(BOC, TYPE_II, side=1) > 0, math.sqrt(2.6)),
    ("1 atom, d=1, Delta=-0.6: resolved lower BOC in g0", P(delta=-0.6, d=1),
     "g0", 1e-3, 1.0, lambda s: s.count(BOC, side=-1, resolved_only=True) > 0, None),
    ("1 atom, d=3, g0=0.8: type-II in Delta", P(d=3, g0=0.8),
     "delta", -0.5, 1.0, lambda s: s.count(BOC, TYPE_II) > 0, 0.08),
    ("2 atoms, d=2, z=1, Delta=1.04: even upper in g0", P(delta=1.04, d=2, z=1, n_atoms=2),
     "g0", 0.01, 1.5, lambda s: s.count(BOC, channel=EVEN, side=1) > 0, math.sqrt(0.24)),
    ("2 atoms, d=2, z=1, Delta=1.04: odd lower in g0", P(delta=1.04, d=2, z=1, n_atoms=2),
     "g0", 0.01, 1.5, lambda s: s.count(BOC, channel=ODD, side=-1) > 0, math.sqrt(0.76)),
    ("2 atoms, d=3, z=1, Delta=0.16: any upper BOC in g0", P(delta=0.16, d=3, z=1, n_atoms=2),
     "g0", 0.01, 1.5, lambda s: s.count(BOC, side=1) > 0, None),
    ("2 atoms, d=z=3, g0=0.6: upper BOCs in Delta", P(d=3, z=3, g0=0.6, n_atoms=2),
     "delta", 0.5, 1.1, lambda s: s.count(BOC, side=1) > 0, 0.92),
    ("2 atoms, d=z=3, g0=0.6: odd lower BOC in Delta", P(d=3, z=3, g0=0.6, n_atoms=2),
     "delta", 1.0, 1.5, lambda s: s.count(BOC, channel=ODD, side=-1) > 0, 1.24),
]

if __name__ == "__main__":
    for label, base, name, lo, hi, pred, target in CASES:
        v = locate_onset(base, name, lo, hi, pred, tol=1e-8)
        ref = f"  (target {target:.6f})" if target is not None else ""
        print(f"{label}: {name} = {v:.6f}{ref}")
    print("2 atoms, d=3, Delta=0.36, g0=0.6: lower type-II BOC present per z:")
    base = P(delta=0.36, d=3, g0=0.6, n_atoms=2)
    for z in range(1, 7):
        sp = full_spectrum(base.with_(z=z))
        print(f"  z={z}: {sp.count(BOC, TYPE_II, side=-1)}")
