"""Command-line front end: parameter scans, figure datasets and diagnostics.

Subcommands
-----------
``scan``
    Evaluate one registered observable on a one-dimensional grid.
``reproduce``
    Write the curves of a figure as CSV files into a directory.
``diagnose``
    Report Hilbert-Schmidt sums and exact-engine identity residuals.

CSV is the default output; ``--json`` switches to JSON.  The exit code is 0
on success, 2 when some rows carry guard flags and 1 on errors.
"""

import argparse
import csv
import io
import json
import math
import os
import string
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import fock_boson, fock_fermion, gaussian, gme
from .bogo import regime_warnings
from .exact import composed_series, exact_bogo
from .scenario import building_block, compose, parse_scenario, repeated_blocks
from .spectra import DIRAC, SCALAR, CavityConfig

THREADS_ENV = "CAVITYRQI_THREADS"
GRID_PARAMS = ("u", "h", "N", "r", "s", "M")


class CliError(Exception):
    """Hard error reported with exit code 1."""


# --------------------------------------------------------------------------
# evaluation context

_SECOND_CACHE = {}


def _second_series(kind, scenario, n, n_int):
    """Numeric second order shared by every curve of the same scenario."""
    key = (kind, repr(scenario), n, n_int)
    if key not in _SECOND_CACHE:
        if len(_SECOND_CACHE) > 4096:
            _SECOND_CACHE.clear()
        _SECOND_CACHE[key] = composed_series(kind, scenario, n, h=0.02, n_int=n_int)
    return _SECOND_CACHE[key]

@dataclass
class Context:
    """Parameters of one grid point and lazily built transformations."""

    field_kind: str
    modes: tuple
    params: dict
    n_max: int
    scenario_text: Optional[str] = None
    second_window: int = 6
    _cache: dict = field(default_factory=dict)

    @property
    def h(self):
        return float(self.params.get("h", 0.01))

    def scenario(self):
        if "scenario" not in self._cache:
            p = self.params
            if self.scenario_text is not None:
                text = string.Template(self.scenario_text).substitute(
                    {k: repr(float(v)) for k, v in p.items()})
                self._cache["scenario"] = parse_scenario(text)
            elif int(p.get("N", 1)) > 1:
                self._cache["scenario"] = repeated_blocks(int(p["N"]), float(p.get("u", 0.5)), self.h)
            else:
                self._cache["scenario"] = building_block(u=float(p.get("u", 0.5)), h=self.h)
        return self._cache["scenario"]

    def cfg(self, n_max=None):
        return CavityConfig(self.field_kind, float(self.params.get("M", 0.0)), 1.0,
                            self.n_max if n_max is None else n_max)

    def composed(self):
        if "composed" not in self._cache:
            self._cache["composed"] = compose(self.scenario(), self.cfg())
        return self._cache["composed"]

    def second_order(self, n_int=80):
        """First-order data on a small window plus numeric second order.

        ``n_int`` is the internal window of the exact engine; its truncation
        sets the numeric floor of second-order quantities.
        """
        key = ("second", n_int)
        if key not in self._cache:
            if float(self.params.get("M", 0.0)) != 0.0:
                raise CliError("second-order observables need a massless field")
            n = self.second_window
            c = compose(self.scenario(), self.cfg(n))
            self._cache[key] = (c, _second_series(self.field_kind, self.scenario(), n, n_int))
        return self._cache[key]

    def flags(self):
        return self.scenario().guard_messages(self.cfg())


# --------------------------------------------------------------------------
# observables

@dataclass(frozen=True)
class Observable:
    field_kind: str
    n_modes: int
    func: Callable
    description: str


def _coef_value(ctx, sv):
    """Columns for a series value: leading coefficient and value at ``h``."""
    order, coef = sv.leading()
    return {"coefficient": coef, "order": order, "value": sv.value(ctx.h)}


def _beta1(ctx, k, kp):
    c = ctx.composed()
    return {"value": abs(c.beta1[c.index(k), c.index(kp)])}


def _alpha1(ctx, k, kp):
    c = ctx.composed()
    return {"value": abs(c.alpha1[c.index(k), c.index(kp)])}


def _A1(ctx, k, kp):
    c = ctx.composed()
    return {"value": abs(c.A1[c.index(k), c.index(kp)])}


def _vac_n1(ctx, k, kp):
    return _coef_value(ctx, fock_boson.negativity_vacuum(ctx.composed(), k, kp))


def _vac_n2(ctx, k, kp):
    c, est = ctx.second_order()
    return _coef_value(ctx, fock_boson.negativity_vacuum(c, k, kp, est))


def _part_n1(ctx, k, kp):
    return _coef_value(ctx, fock_boson.negativity_one_particle(ctx.composed(), k, kp))


def _part_n2(ctx, k, kp):
    c, est = ctx.second_order()
    return _coef_value(ctx, fock_boson.negativity_one_particle(c, k, kp, est))


def _squeezed(ctx, k, kp):
    s = float(ctx.params.get("s", 1.0))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", gaussian.GaussianValidityWarning)
        val = gaussian.squeezed_generation_negativity(ctx.composed(), k, kp, s, s)
    return {"coefficient": float(val), "value": ctx.h * float(val)}


def _f_alpha(ctx, kp):
    c = ctx.composed()
    j = c.index(kp)
    return {"value": 0.5 * float(np.sum(np.abs(c.alpha1[j]) ** 2))}


def _f_beta(ctx, kp):
    c = ctx.composed()
    j = c.index(kp)
    return {"value": 0.5 * float(np.sum(np.abs(c.beta1[j]) ** 2))}


def _ferm(case, second):
    def run(ctx, k, kp):
        if second:
            c, est = ctx.second_order()
            sv = fock_fermion.fermion_negativity(c, case, k, kp, est)
        else:
            sv = fock_fermion.fermion_negativity(ctx.composed(), case, k, kp)
        return _coef_value(ctx, sv)
    return run


def _pair_lambda(ctx, k, kp):
    """Second-order coefficient of the only possibly negative eigenvalue.

    ``floor`` is the change of the coefficient when the internal window of
    the exact engine is halved, a measure of its truncation error.
    """
    lams = []
    for n_int in (80, 40):
        c, est = ctx.second_order(n_int)
        s = fock_fermion.FermionSeries.from_composed(c, est)
        fs = fock_fermion.FermionFSums(s)
        V2 = fock_fermion.fermion_v_matrix(s).V2
        a, b = fs.f(k), fs.fbar(kp)
        lams.append((a + b) - math.hypot(a - b, abs(V2[s.index(k), s.index(kp)])))
    return {"coefficient": lams[0], "value": ctx.h ** 2 * lams[0],
            "floor": abs(lams[0] - lams[1])}


def _ferm_f(ctx, kp):
    return {"value": fock_fermion.FermionFSums(fock_fermion.FermionSeries.from_composed(
        ctx.composed())).f(kp)}


def _ferm_fbar(ctx, kp):
    return {"value": fock_fermion.FermionFSums(fock_fermion.FermionSeries.from_composed(
        ctx.composed())).fbar(kp)}


def _tms(which):
    def run(ctx, kp):
        r = float(ctx.params.get("r", 0.5))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", gaussian.GaussianValidityWarning)
            d = gaussian.tms_degradation(ctx.composed(), kp, r, h=ctx.h)
        series = getattr(d, which)
        out = {"c0": series[0], "c2": series[1], "value": series[0] + ctx.h ** 2 * series[1]}
        if d.warnings:
            out["_flags"] = list(d.warnings)
        return out
    return run


def _gme_boson(ctx, k, kp, kpp):
    rep = gme.bosonic_gme_witness(ctx.composed(), k, kp, kpp, ctx.h)
    return {"value": rep.value, "leading": rep.leading}


def _gme_fermion(ctx, k, kp, kpp):
    rep = gme.fermionic_gme_witness(ctx.composed(), k, kp, kpp, ctx.h)
    return {"value": rep.value, "leading": rep.leading}


REGISTRY = {
    "beta1": Observable(SCALAR, 2, _beta1, "|beta1_kk'|"),
    "alpha1": Observable(SCALAR, 2, _alpha1, "|alpha1_kk'|"),
    "A1": Observable(DIRAC, 2, _A1, "|A1_kk'|"),
    "negativity-vacuum-N1": Observable(SCALAR, 2, _vac_n1, "vacuum negativity, first order"),
    "negativity-vacuum-N2": Observable(SCALAR, 2, _vac_n2, "vacuum negativity, second order"),
    "negativity-particle-N1": Observable(SCALAR, 2, _part_n1, "|1_k> negativity, first order"),
    "negativity-particle-N2": Observable(SCALAR, 2, _part_n2, "|1_k> negativity, second order"),
    "negativity-squeezed-N1": Observable(SCALAR, 2, _squeezed, "squeezed-state negativity, first order"),
    "f-alpha": Observable(SCALAR, 1, _f_alpha, "mode-mixing noise sum of k'"),
    "f-beta": Observable(SCALAR, 1, _f_beta, "pair-creation noise sum of k'"),
    "fermion-vacuum-N1": Observable(DIRAC, 2, _ferm("vacuum", False), "fermionic vacuum, first order"),
    "fermion-vacuum-N2": Observable(DIRAC, 2, _ferm("vacuum", True), "fermionic vacuum, second order"),
    "fermion-particle-N1": Observable(DIRAC, 2, _ferm("particle", False), "particle state, first order"),
    "fermion-particle-N2": Observable(DIRAC, 2, _ferm("particle", True), "particle state, second order"),
    "fermion-pair-lambda": Observable(DIRAC, 2, _pair_lambda, "pair state, eigenvalue correction"),
    "fermion-f": Observable(DIRAC, 1, _ferm_f, "particle noise sum of k'"),
    "fermion-fbar": Observable(DIRAC, 1, _ferm_fbar, "antiparticle noise sum of k'"),
    "tms-negativity": Observable(SCALAR, 1, _tms("negativity"), "degraded TMS negativity"),
    "tms-fidelity": Observable(SCALAR, 1, _tms("fidelity_opt"), "degraded TMS optimal fidelity"),
    "gme-boson": Observable(SCALAR, 3, _gme_boson, "bosonic GME witness"),
    "gme-fermion": Observable(DIRAC, 3, _gme_fermion, "fermionic GME witness"),
}


# --------------------------------------------------------------------------
# scans

@dataclass
class ScanSpec:
    """One observable on a grid ``parameter = start:stop:step``."""

    observable: str
    modes: tuple
    parameter: str
    start: float
    stop: float
    step: float
    field_kind: Optional[str] = None
    fixed: dict = field(default_factory=dict)
    scenario_path: Optional[str] = None
    n_max: int = 40
    out: Optional[str] = None
    fmt: str = "csv"

    def __post_init__(self):
        if self.observable not in REGISTRY:
            raise CliError(f"unknown observable {self.observable!r}")
        obs = REGISTRY[self.observable]
        if self.field_kind is None:
            self.field_kind = obs.field_kind
        if self.field_kind != obs.field_kind:
            raise CliError(f"{self.observable} needs the {obs.field_kind} field")
        if len(self.modes) != obs.n_modes:
            raise CliError(f"{self.observable} needs {obs.n_modes} mode label(s)")
        if self.parameter not in GRID_PARAMS:
            raise CliError(f"grid parameter must be one of {', '.join(GRID_PARAMS)}")
        if len(self.grid()) == 0:
            raise CliError("empty grid")

    def grid(self):
        if self.step <= 0 or self.stop < self.start:
            return np.array([])
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return self.start + self.step * np.arange(n)


def parse_grid(text):
    """``"P=lo:hi:step"`` to ``(P, lo, hi, step)``."""
    try:
        name, rng = text.split("=")
        lo, hi, step = (float(x) for x in rng.split(":"))
    except ValueError:
        raise CliError(f"grid must look like P=lo:hi:step, got {text!r}") from None
    return name.strip(), lo, hi, step


def _evaluate(spec, scenario_text, x):
    params = dict(spec.fixed)
    params[spec.parameter] = float(x)
    ctx = Context(spec.field_kind, spec.modes, params, spec.n_max, scenario_text)
    row = {spec.parameter: float(x)}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        vals = REGISTRY[spec.observable].func(ctx, *spec.modes)
        flags = ctx.flags() + vals.pop("_flags", [])
    row.update(vals)
    row["flags"] = "; ".join(flags)
    return row


def run_scan(spec, threads=None):
    """Evaluate ``spec`` on every grid point.

    Returns
    -------
    list of dict
        One row per grid point in grid order.  Guard violations are
        reported in the ``flags`` column.
    """
    text = None
    if spec.scenario_path is not None:
        with open(spec.scenario_path) as fh:
            text = fh.read()
    grid = spec.grid()
    threads = threads or int(os.environ.get(THREADS_ENV, "1"))
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(lambda x: _evaluate(spec, text, x), grid))
    return [_evaluate(spec, text, x) for x in grid]


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.15g}"
    return str(v)


def write_rows(rows, stream, fmt="csv", meta=None):
    """Serialise rows as CSV (15 significant digits) or JSON."""
    if fmt == "json":
        json.dump({"meta": meta or {}, "rows": [{k: (float(v) if isinstance(v, np.floating) else v)
                                                 for k, v in r.items()} for r in rows]},
                  stream, indent=1)
        stream.write("\n")
        return
    cols = []
    for r in rows:
        cols += [k for k in r if k not in cols]
    if "flags" in cols:
        cols.remove("flags")
        cols.append("flags")
    w = csv.writer(stream, lineterminator="\n")
    if meta:
        for k, v in meta.items():
            stream.write(f"# {k}: {v}\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_fmt(r.get(c, "")) for c in cols])


def rows_to_text(rows, fmt="csv", meta=None):
    buf = io.StringIO()
    write_rows(rows, buf, fmt, meta)
    return buf.getvalue()


# --------------------------------------------------------------------------
# figures

@dataclass(frozen=True)
class Figure:
    observable: str
    curves: tuple
    caption: str
    fixed: dict = field(default_factory=dict)
    grid: tuple = ("u", 0.0, 2.0, 0.01)


_BB = "basic building block, massless field, periodic in u"
FIGURES = {
    "6.1a": Figure("negativity-vacuum-N1", ((1, 2), (2, 3), (3, 4), (1, 4)),
                   "vacuum negativity, first order; " + _BB),
    "6.1b": Figure("negativity-vacuum-N2", ((1, 3), (2, 4), (3, 5), (1, 5)),
                   "vacuum negativity, second order; " + _BB),
    "6.2a": Figure("negativity-particle-N1", ((1, 2), (2, 3), (3, 4), (1, 4)),
                   "single particle |1_k>, first order; " + _BB),
    "6.2b": Figure("negativity-particle-N2", ((1, 3), (2, 4), (3, 5), (1, 5)),
                   "single particle |1_k>, second order; " + _BB),
    "6.3": Figure("negativity-squeezed-N1", ((1, 2), (2, 3), (3, 4), (1, 4)),
                  "symmetric single-mode squeezing s_k = s_k' = 1; " + _BB, {"s": 1.0}),
    "6.4": Figure("beta1", ((1, 2), (2, 3)),
                  "N = 15 repeated blocks; vertical dashed lines indicate the potential "
                  "resonance times u = n/(k+k')", {"N": 15}, ("u", 0.0, 1.0, 0.002)),
    "6.5a": Figure("alpha1", ((1, 2), (2, 3)),
                   "N = 15 repeated blocks, mode mixing", {"N": 15}, ("u", 0.0, 1.0, 0.002)),
    "6.6a": Figure("fermion-vacuum-N1", ((0, -3), (2, -1), (0, -5), (4, -1), (3, -2), (1, -4)),
                   "fermionic vacuum, first order; " + _BB),
    "6.6b": Figure("fermion-vacuum-N2", ((1, -1), (0, -2), (1, -3), (2, -2), (0, -4), (3, -1)),
                   "fermionic vacuum, second order; " + _BB),
    "6.7a": Figure("fermion-particle-N1", ((0, 1), (1, 2), (2, 3), (0, 3)),
                   "fermionic particle state, first order; " + _BB),
    "6.7b": Figure("fermion-particle-N2", ((0, 2), (1, 3), (2, 4), (0, 4)),
                   "fermionic particle state, second order; " + _BB),
    "6.8": Figure("fermion-pair-lambda", ((1, -1), (0, -2), (0, -4), (3, -1), (1, -3), (2, -2)),
                  "particle-antiparticle pair: the correction is positive throughout, "
                  "no entanglement is generated; " + _BB),
    "7.2": Figure("f-alpha", ((1,), (2,), (3,), (4,)), "degradation sum f^alpha_k'; " + _BB),
    "7.3": Figure("f-beta", ((1,), (2,), (3,), (4,)), "degradation sum f^beta_k'; " + _BB),
    "7.6a": Figure("fermion-f", ((0,), (1,), (2,), (3,)), "fermionic sum f_k'; " + _BB),
    "7.6b": Figure("fermion-fbar", ((0,), (1,), (2,), (3,)), "fermionic sum fbar_k'; " + _BB),
}


def reproduce(figure_id, step=None, n_max=40):
    """Curves of a figure as ``{curve name: rows}`` plus a caption summary."""
    if figure_id not in FIGURES:
        raise CliError(f"unknown figure {figure_id!r}; choose from {', '.join(FIGURES)}")
    fig = FIGURES[figure_id]
    p, lo, hi, st = fig.grid
    out = {}
    for modes in fig.curves:
        spec = ScanSpec(fig.observable, modes, p, lo, hi, step or st, fixed=dict(fig.fixed),
                        n_max=n_max)
        out["modes_" + "_".join(str(m) for m in modes)] = run_scan(spec)
    summary = {"figure": figure_id, "observable": fig.observable, "caption": fig.caption,
               "curves": list(out)}
    return out, summary


# --------------------------------------------------------------------------
# diagnostics

def _probe_residual(kind, h, n, probe=4):
    ex = exact_bogo(kind, h, n)
    if kind == SCALAR:
        a, b = ex.alpha[:probe], ex.beta[:probe]
        r1 = a @ a.conj().T - b @ b.conj().T - np.eye(probe)
        r2 = a @ b.T - b @ a.T
        return float(max(np.max(np.abs(r1)), np.max(np.abs(r2)))), ex.quad_error
    mid = ex.A.shape[1] // 2
    cols = ex.A[:, mid - probe // 2: mid + probe // 2]
    return float(np.max(np.abs(cols.conj().T @ cols - np.eye(cols.shape[1])))), ex.quad_error


def diagnose(field_kind, M, h_list, n_max, s_max=None):
    """Rows of unitarity and convergence diagnostics.

    The first row compares the Hilbert-Schmidt sum with its closed form
    (massless) or its large-mass limit.  Each ``h`` then gets the identity
    residual on the lowest modes at windows ``n_max`` and ``2 n_max``.
    """
    cfg = CavityConfig(field_kind, M, 1.0, max(2, n_max))
    hs = fock_boson.hs_diagnostics(cfg, s_max)
    ref = hs["closed_form"] if hs["closed_form"] is not None else hs["large_mass_limit"]
    got = hs["value"] if hs["closed_form"] is not None else hs["M2_times_value"]
    rows = [{"check": "hs_sum" if M == 0 else "hs_sum_M2", "h": "", "n_max": hs["s_max"],
             "value": got, "reference": ref, "residual": abs(got - ref), "flags": ""}]
    for h in h_list:
        flags = regime_warnings(h, M, emit=False)
        if M != 0:
            rows.append({"check": "identity", "h": h, "n_max": n_max, "value": "",
                         "reference": "", "residual": "",
                         "flags": "; ".join(flags + ["exact engine is massless only"])})
            continue
        for n in (n_max, 2 * n_max):
            res, qerr = _probe_residual(field_kind, h, n)
            rows.append({"check": "identity", "h": h, "n_max": n, "value": qerr,
                         "reference": 0.0, "residual": res, "flags": "; ".join(flags)})
    return rows


# --------------------------------------------------------------------------
# entry point

def _parser():
    p = argparse.ArgumentParser(prog="cavityrqi", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="cmd", required=True)
    s = sub.add_parser("scan", help="evaluate an observable on a grid")
    s.add_argument("--observable", required=True, choices=sorted(REGISTRY))
    s.add_argument("--modes", required=True, help="comma-separated mode labels")
    s.add_argument("--grid", required=True, help="P=lo:hi:step with P in " + ",".join(GRID_PARAMS))
    s.add_argument("--scenario", help="TOML scenario; $P placeholders take grid and --set values")
    s.add_argument("--set", action="append", default=[], metavar="P=V",
                   help="fixed parameter (repeatable)")
    s.add_argument("--nmax", type=int, default=40)
    s.add_argument("--out")
    s.add_argument("--json", action="store_true")
    r = sub.add_parser("reproduce", help="write the curves of a figure")
    r.add_argument("figure", choices=sorted(FIGURES))
    r.add_argument("--out", required=True, help="output directory")
    r.add_argument("--step", type=float)
    r.add_argument("--json", action="store_true")
    d = sub.add_parser("diagnose", help="unitarity and convergence report")
    d.add_argument("--field", choices=(SCALAR, DIRAC), default=SCALAR)
    d.add_argument("--mass", type=float, default=0.0)
    d.add_argument("--h", default="0.01,0.1")
    d.add_argument("--nmax", type=int, default=20)
    d.add_argument("--out")
    d.add_argument("--json", action="store_true")
    return p


def _emit(rows, path, fmt, meta=None):
    if path:
        with open(path, "w", newline="") as fh:
            write_rows(rows, fh, fmt, meta)
    else:
        write_rows(rows, sys.stdout, fmt, meta)


def _flagged(rows):
    return any(r.get("flags") for r in rows)


def main(argv=None):
    args = _parser().parse_args(argv)
    fmt = "json" if args.json else "csv"
    try:
        if args.cmd == "scan":
            name, lo, hi, step = parse_grid(args.grid)
            fixed = {}
            for item in args.set:
                k, _, v = item.partition("=")
                fixed[k.strip()] = float(v)
            modes = tuple(int(m) for m in args.modes.split(","))
            spec = ScanSpec(args.observable, modes, name, lo, hi, step, fixed=fixed,
                            scenario_path=args.scenario, n_max=args.nmax)
            rows = run_scan(spec)
            _emit(rows, args.out, fmt, {"observable": args.observable, "modes": args.modes})
        elif args.cmd == "reproduce":
            curves, summary = reproduce(args.figure, args.step)
            os.makedirs(args.out, exist_ok=True)
            rows = []
            ext = "json" if args.json else "csv"
            for name, crow in curves.items():
                path = os.path.join(args.out, f"fig{args.figure}_{name}.{ext}")
                _emit(crow, path, fmt, {"figure": args.figure, "caption": summary["caption"]})
                rows += crow
            with open(os.path.join(args.out, f"fig{args.figure}_summary.json"), "w") as fh:
                json.dump(summary, fh, indent=1)
        else:
            hs = [float(x) for x in args.h.split(",") if x.strip()]
            rows = diagnose(args.field, args.mass, hs, args.nmax)
            _emit(rows, args.out, fmt)
    except (CliError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2 if _flagged(rows) else 0


if __name__ == "__main__":
    sys.exit(main())
