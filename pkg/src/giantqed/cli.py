"""Command-line driver: spectra, dynamics, steady states, sweeps, validation, figure data.

Usage::

    giantqed spectrum --config run.cfg --sweep g0:0:3:0.01 --out spec.csv
    giantqed dynamics --g0 1.2 --delta -0.6 --d 1 --solvers volterra,lattice --out dyn.csv
    giantqed figure fig2a --out figures/
    giantqed validate --out report.csv

Config files are flat ``key = value`` text; command-line flags override them.
Exit status: 0 success, 1 invariant failure, 2 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from . import dynamics as dyn
from .model import DEFAULT_QUAD_NODES, SystemParams
from .observables import concurrence_series
from .spectrum import full_spectrum

log = logging.getLogger("giantqed")

SCHEMA_VERSION = 1
MODES = ("spectrum", "dynamics", "steady", "sweep", "validate", "figure")
SWEEPABLE = ("g0", "delta", "d", "z")
INTEGER_PARAMS = ("d", "z", "n_atoms", "lattice_length")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Sweep:
    name: str
    start: float
    stop: float
    step: float

    def __post_init__(self):
        if self.name not in SWEEPABLE:
            raise ConfigError(f"cannot sweep {self.name!r}; choose from {SWEEPABLE}")
        if not self.step > 0:
            raise ConfigError("sweep step must be > 0")
        if self.stop < self.start:
            raise ConfigError("sweep range is empty")

    def values(self) -> List[float]:
        if self.name in ("d", "z"):
            return [int(v) for v in range(int(self.start), int(self.stop) + 1)]
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        # rounding keeps grid points such as 0.36 or -1.0 exact
        return [round(self.start + i * self.step, 12) for i in range(n)]

    def apply(self, params: SystemParams, value) -> SystemParams:
        return params.with_(**{self.name: value})


@dataclass(frozen=True)
class RunConfig:
    mode: str
    params: SystemParams = field(default_factory=SystemParams)
    sweep: Optional[Sweep] = None
    solvers: Tuple[str, ...] = (dyn.VOLTERRA,)
    dt: float = dyn.DEFAULT_DT
    t_max: float = dyn.DEFAULT_T_MAX
    quad_nodes: int = DEFAULT_QUAD_NODES
    stride: int = 10
    c0: Tuple[complex, ...] = ()
    out: Optional[str] = None
    jobs: int = 0
    preset: Optional[str] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        bad = [s for s in self.solvers if s not in dyn.SOLVERS]
        if bad or not self.solvers:
            raise ConfigError(f"unknown solvers {bad}; choose from {dyn.SOLVERS}")
        if not self.dt > 0 or self.t_max < self.dt:
            raise ConfigError("need dt > 0 and t_max >= dt")
        if self.quad_nodes < 16 or self.stride < 1:
            raise ConfigError("quad_nodes must be >= 16 and stride >= 1")
        if self.mode == "figure" and self.preset not in PRESETS:
            raise ConfigError(f"figure mode needs a preset from {sorted(PRESETS)}")
        if self.mode == "sweep" and self.sweep is None:
            raise ConfigError("sweep mode needs a sweep range")
        if self.c0 and len(self.c0) != self.params.n_atoms:
            raise ConfigError("c0 needs one amplitude per atom")

    def initial(self) -> Optional[np.ndarray]:
        return np.array(self.c0, dtype=complex) if self.c0 else None

    def echo(self) -> List[str]:
        """``key=value`` lines describing this run, sorted for byte-stable headers."""
        items = {f"params.{k}": v for k, v in asdict(self.params).items()}
        items.update(mode=self.mode, solvers=",".join(self.solvers), dt=self.dt,
                     t_max=self.t_max, quad_nodes=self.quad_nodes, stride=self.stride,
                     c0=",".join(_fmt(c) for c in self.c0), preset=self.preset or "")
        if self.sweep:
            items["sweep"] = f"{self.sweep.name}:{self.sweep.start}:{self.sweep.stop}:{self.sweep.step}"
        return [f"{k}={_fmt(v)}" for k, v in sorted(items.items())]


# -- config parsing ---------------------------------------------------------

def read_config_file(path: str) -> Dict[str, str]:
    out: Dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def parse_sweep(text: str) -> Sweep:
    parts = text.split(":")
    if len(parts) != 4:
        raise ConfigError(f"sweep must be name:start:stop:step, got {text!r}")
    try:
        return Sweep(parts[0], float(parts[1]), float(parts[2]), float(parts[3]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_config(mode: str, values: Dict[str, str], preset: Optional[str] = None) -> RunConfig:
    """Turn merged ``key -> string`` settings into a validated RunConfig."""
    values = dict(values)
    pkeys = {f.name for f in fields(SystemParams)}
    pvals = {}
    try:
        for key in list(values):
            if key in pkeys:
                raw = values.pop(key)
                pvals[key] = int(raw) if key in INTEGER_PARAMS else float(raw)
        params = SystemParams(**pvals)
        kw = {}
        if values.get("sweep"):
            kw["sweep"] = parse_sweep(values.pop("sweep"))
        else:
            values.pop("sweep", None)
        if "solvers" in values:
            kw["solvers"] = tuple(s.strip() for s in values.pop("solvers").split(",") if s.strip())
        for key, conv in (("dt", float), ("t_max", float), ("quad_nodes", int),
                          ("stride", int), ("jobs", int)):
            if key in values:
                kw[key] = conv(values.pop(key))
        if values.get("c0"):
            kw["c0"] = tuple(complex(s.strip().replace(" ", "")) for s in values.pop("c0").split(","))
        else:
            values.pop("c0", None)
        if "out" in values:
            kw["out"] = values.pop("out")
        values.pop("mode", None)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if values:
        raise ConfigError(f"unknown config keys: {sorted(values)}")
    if kw.get("c0"):
        c0 = np.array(kw["c0"])
        kw["c0"] = tuple(c0 / np.linalg.norm(c0))
    return RunConfig(mode=mode, params=params, preset=preset, **kw)


# -- CSV output ---------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (complex, np.complexfloating)):
        return repr(complex(x)).strip("()")
    if x is None:
        return ""
    return str(x)


def write_csv(path: Optional[str], config: RunConfig, header: Sequence[str],
              rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(f"# giantqed-csv schema={SCHEMA_VERSION} mode={config.mode} version={__version__}\n")
    for line in config.echo():
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)
    return text


def read_csv(path: str) -> Tuple[Dict[str, str], List[Dict[str, str]]]:
    """Parse a giantqed CSV into (metadata, rows); raises ConfigError on schema mismatch."""
    meta: Dict[str, str] = {}
    body = []
    with open(path) as fh:
        first = fh.readline()
        if not first.startswith("# giantqed-csv"):
            raise ConfigError(f"{path}: not a giantqed CSV")
        for tok in first[2:].split()[1:]:
            k, _, v = tok.partition("=")
            meta[k] = v
        for line in fh:
            if line.startswith("#"):
                k, _, v = line[2:].rstrip("\n").partition("=")
                meta[k] = v
            else:
                body.append(line)
    if int(meta.get("schema", -1)) != SCHEMA_VERSION:
        raise ConfigError(f"{path}: unsupported schema {meta.get('schema')}")
    return meta, list(csv.DictReader(body))


# -- mode implementations ---------------------------------------------------

def _points(config: RunConfig) -> List[Tuple[object, SystemParams]]:
    if config.sweep is None:
        return [(None, config.params)]
    return [(v, config.sweep.apply(config.params, v)) for v in config.sweep.values()]


def _map(func, items: list, jobs: int) -> list:
    jobs = jobs or os.cpu_count() or 1
    if jobs <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


def _spectrum_rows(args) -> List[list]:
    (value, params), nodes = args
    rows = []
    for b in full_spectrum(params, n_nodes=nodes).bound_states:
        rows.append([value, b.energy, b.kind, b.boc_type or "", b.channel,
                     b.residue.real, b.residue.imag, b.resolved, b.multiplicity])
    return rows


def run_spectrum(config: RunConfig) -> int:
    pts = [(pt, config.quad_nodes) for pt in _points(config)]
    rows = [r for chunk in _map(_spectrum_rows, pts, config.jobs) for r in chunk]
    header = ["sweep_value", "energy", "class", "type", "channel", "residue_re",
              "residue_im", "resolved", "multiplicity"]
    write_csv(config.out, config, header, rows)
    return 0


def _steady_row(args) -> list:
    (value, params), c0, nodes = args
    ss = dyn.steady_state(full_spectrum(params, n_nodes=nodes), c0, params)
    row = [value]
    for n in range(params.n_atoms):
        row += list(ss.envelope(n))
        row.append(";".join(_fmt(f) for f, _ in ss.frequencies(n, 1e-12)))
    return row


def run_steady(config: RunConfig) -> int:
    pts = [(pt, config.initial(), config.quad_nodes) for pt in _points(config)]
    rows = _map(_steady_row, pts, config.jobs)
    header = ["sweep_value"]
    for n in range(1, config.params.n_atoms + 1):
        header += [f"c{n}_population_min", f"c{n}_population_mean", f"c{n}_population_max",
                   f"c{n}_frequencies"]
    write_csv(config.out, config, header, rows)
    return 0


def _trajectories(config: RunConfig, params: SystemParams) -> List[dyn.Trajectory]:
    return [dyn.run_solver(s, params, config.initial(), config.t_max, config.dt,
                           config.quad_nodes) for s in config.solvers]


def run_dynamics(config: RunConfig) -> int:
    params = config.params
    trajs = _trajectories(config, params)
    header = ["t"]
    cols = []
    for tr in trajs:
        for n in range(params.n_atoms):
            a = tr.amplitudes[:, n]
            header += [f"{tr.method}_c{n + 1}_re", f"{tr.method}_c{n + 1}_im",
                       f"{tr.method}_c{n + 1}_population"]
            cols += [a.real, a.imag, np.abs(a) ** 2]
        if params.n_atoms == 2:
            header.append(f"{tr.method}_concurrence")
            cols.append(concurrence_series(tr.amplitudes))
    t = trajs[0].t
    idx = range(0, t.size, config.stride)
    rows = ([t[i]] + [c[i] for c in cols] for i in idx)
    write_csv(config.out, config, header, rows)
    return 0


def _sweep_row(args) -> list:
    config, (value, params) = args
    row = [value]
    for tr in _trajectories(config, params):
        late = tr.window(0.75 * tr.t[-1])
        for n in range(params.n_atoms):
            pop = late.populations[:, n]
            row += [pop.min(), pop.mean(), pop.max()]
    return row


def run_sweep(config: RunConfig) -> int:
    rows = _map(_sweep_row, [(config, pt) for pt in _points(config)], config.jobs)
    header = ["sweep_value"]
    for s in config.solvers:
        for n in range(1, config.params.n_atoms + 1):
            header += [f"{s}_c{n}_late_min", f"{s}_c{n}_late_mean", f"{s}_c{n}_late_max"]
    write_csv(config.out, config, header, rows)
    return 0


def run_validate(config: RunConfig, inputs: Sequence[str] = ()) -> int:
    from .validation import Check, run_all

    checks = run_all()
    for path in inputs:
        try:
            read_csv(path)
            checks.append(Check("csv", f"reparse:{path}", 0.0, 0.0, True))
        except (ConfigError, OSError, ValueError) as exc:
            log.error("%s", exc)
            checks.append(Check("csv", f"reparse:{path}", 1.0, 0.0, False))
    rows = [[c.suite, c.name, c.passed, c.measured, c.tolerance] for c in checks]
    write_csv(config.out, config, ["suite", "check", "passed", "measured", "tolerance"], rows)
    failed = [c for c in checks if not c.passed]
    for c in failed:
        log.error("invariant failed: %s/%s measured %.3g tolerance %.3g",
                  c.suite, c.name, c.measured, c.tolerance)
    return 1 if failed else 0


# -- figure presets -----------------------------------------------------------

def _p(**kw) -> SystemParams:
    return SystemParams(**kw)


def _dyn_jobs(tag, base: SystemParams, name: str, values, solvers=(dyn.VOLTERRA,)):
    return [(f"{tag}_{name}={v:g}", "dynamics", base.with_(**{name: v}), None, solvers)
            for v in values]


# each job: (file stem, mode, params, sweep, solvers)
PRESETS: Dict[str, List[tuple]] = {}

_F2A = _p(delta=-0.6, d=1, g0=1.0)
_F2D = _p(delta=0.0, d=3, g0=0.8)
_F2G = _p(delta=0.0, d=2, g0=0.8)
_F3 = _p(delta=0.0, d=2, g0=0.8)
_F4A = _p(delta=0.16, d=3, z=1, g0=0.4, n_atoms=2)
_F4B = _p(delta=1.04, d=2, z=1, g0=0.2, n_atoms=2)
_F4C = _p(delta=0.36, d=3, z=1, g0=0.6, n_atoms=2)
_F5 = _p(delta=0.0, d=3, z=3, g0=0.6, n_atoms=2)
_BOTH = (dyn.VOLTERRA, dyn.WW)

PRESETS.update({
    "fig2a": _dyn_jobs("fig2a", _F2A, "g0", (0.4, 1.2, 2.7)),
    "fig2b": [("fig2b_spectrum", "spectrum", _F2A, Sweep("g0", 0.0, 3.0, 0.01), None)],
    "fig2c": [("fig2c_steady", "steady", _F2A, Sweep("g0", 0.0, 3.0, 0.01), None),
              ("fig2c_numeric", "sweep", _F2A, Sweep("g0", 0.1, 3.0, 0.1), (dyn.VOLTERRA,))],
    "fig2d": [("fig2d_spectrum", "spectrum", _F2D, Sweep("delta", -3.0, 3.0, 0.01), None)],
    "fig2e": [("fig2e_steady", "steady", _F2D, Sweep("delta", -3.0, 3.0, 0.01), None),
              ("fig2e_numeric", "sweep", _F2D, Sweep("delta", -3.0, 3.0, 0.2), (dyn.VOLTERRA,))],
    "fig2f": _dyn_jobs("fig2f", _F2D, "delta", (-1.0, 0.0, 0.5), _BOTH),
    "fig2g": [("fig2g_spectrum", "spectrum", _F2G, Sweep("delta", -3.0, 3.0, 0.01), None)],
    "fig2h": [("fig2h_steady", "steady", _F2G, Sweep("delta", -3.0, 3.0, 0.01), None),
              ("fig2h_numeric", "sweep", _F2G, Sweep("delta", -3.0, 3.0, 0.2), (dyn.VOLTERRA,))],
    "fig2i": _dyn_jobs("fig2i", _F2G, "delta", (-0.5, 0.0, 0.5), _BOTH),
    "fig3a": [("fig3a_spectrum", "spectrum", _F3, Sweep("d", 2, 10, 1), None)]
             + _dyn_jobs("fig3a", _F3, "d", (2, 4, 6, 8, 10)),
    "fig3b": [("fig3b_spectrum", "spectrum", _F3.with_(d=1), Sweep("d", 1, 9, 1), None)]
             + _dyn_jobs("fig3b", _F3, "d", (1, 3, 5, 7, 9)),
    "fig4a": [("fig4a_spectrum", "spectrum", _F4A, Sweep("g0", 0.0, 1.5, 0.01), None)]
             + _dyn_jobs("fig4a", _F4A, "g0", (0.4, 0.7, 1.0)),
    "fig4b": [("fig4b_spectrum", "spectrum", _F4B, Sweep("g0", 0.0, 1.5, 0.01), None)]
             + _dyn_jobs("fig4b", _F4B, "g0", (0.2, 0.6, 1.0)),
    "fig4c": [("fig4c_spectrum", "spectrum", _F4C, Sweep("z", 1, 8, 1), None)]
             + _dyn_jobs("fig4c", _F4C, "z", (1, 3, 5)),
    "fig5a": [("fig5a_spectrum", "spectrum", _F5, Sweep("delta", -3.0, 3.0, 0.01), None)],
})
for _k, _v in (("fig5b", 0.36), ("fig5c", 1.0), ("fig5d", -1.0)):
    PRESETS[_k] = _dyn_jobs(_k, _F5, "delta", (_v,))
PRESETS["fig5"] = PRESETS["fig5a"] + _dyn_jobs("fig5", _F5, "delta", (0.36, 1.0, -1.0))


def run_figure(config: RunConfig) -> int:
    outdir = Path(config.out or ".")
    for stem, mode, params, sweep, solvers in PRESETS[config.preset]:
        sub = replace(config, mode=mode, params=params, sweep=sweep,
                      solvers=solvers or config.solvers, out=str(outdir / f"{stem}.csv"))
        log.info("writing %s", sub.out)
        RUNNERS[mode](sub)
    return 0


RUNNERS = {
    "spectrum": run_spectrum,
    "steady": run_steady,
    "dynamics": run_dynamics,
    "sweep": run_sweep,
    "figure": run_figure,
}


def run(config: RunConfig, inputs: Sequence[str] = ()) -> int:
    if config.mode == "validate":
        return run_validate(config, inputs)
    return RUNNERS[config.mode](config)


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="giantqed", description=__doc__.split("\n")[0])
    ap.add_argument("mode", choices=MODES)
    ap.add_argument("preset", nargs="?", help="figure preset name (figure mode)")
    ap.add_argument("--config", help="key = value config file")
    ap.add_argument("--out", help="output CSV (or directory in figure mode)")
    ap.add_argument("--jobs", type=int, help="parallel sweep workers (default: all CPUs)")
    ap.add_argument("--dt", help="time step in 1/h")
    ap.add_argument("--t-max", help="final time in 1/h")
    ap.add_argument("--solvers", help="comma list from: " + ",".join(dyn.SOLVERS))
    ap.add_argument("--quad-nodes", help="Gauss-Chebyshev nodes for band integrals")
    ap.add_argument("--sweep", help="name:start:stop:step with name in g0, delta, d, z")
    ap.add_argument("--stride", help="write every n-th time point (dynamics)")
    ap.add_argument("--c0", help="initial atomic amplitudes, e.g. 1,0")
    for name in ("delta", "hopping", "g0", "d", "z", "n-atoms", "lattice-length"):
        ap.add_argument(f"--{name}")
    ap.add_argument("--inputs", nargs="*", default=(), help="CSVs to re-parse (validate mode)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        values = read_config_file(args.config) if args.config else {}
        for key in ("out", "jobs", "dt", "t_max", "solvers", "quad_nodes", "sweep", "stride",
                    "c0", "delta", "hopping", "g0", "d", "z", "n_atoms", "lattice_length"):
            v = getattr(args, key)
            if v is not None:
                values[key] = str(v)
        if args.mode == "figure" and not args.preset:
            raise ConfigError(f"figure mode needs a preset: {', '.join(sorted(PRESETS))}")
        config = build_config(args.mode, values, preset=args.preset)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(config, args.inputs)
    except dyn.SolverInstability as exc:
        print(f"solver instability: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
