"""Command-line interface: ``borelcalc <command> [options]``.

Exit codes: 0 on success, 1 on numerical or domain errors (a JSON error
object goes to stderr), 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from typing import List, Optional

import numpy as np

from . import __version__, contours, operator, solver, symbols, zerofinder, zetasolver
from .errors import BorelCalcError, IncompleteCatalog
from .exptype import EntireFn, borel_exact, borel_series

CATALOG_ENV = "BORELCALC_CATALOG"


class UsageError(Exception):
    pass


# --- parsing helpers ----------------------------------------------------------

def parse_grid(text) -> np.ndarray:
    """'start:stop:step' (stop included), a comma list, or a single value."""
    if isinstance(text, (list, tuple)):
        return np.asarray([symbols.parse_complex(str(x)) for x in text], dtype=complex)
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"grid must be start:stop:step, got {text!r}")
        a, b, h = (float(p) for p in parts)
        if h <= 0:
            raise UsageError("grid step must be positive")
        n = int(math.floor((b - a) / h + 1e-9)) + 1
        return (a + h * np.arange(max(n, 0))).astype(complex)
    if not text:
        return np.zeros(0, dtype=complex)
    return np.asarray([symbols.parse_complex(x) for x in text.split(",") if x], dtype=complex)


_ANGLE = re.compile(r"^(?:([\d.]+)(?:/([\d.]+))?\*?)?pi(?:/([\d.]+))?$")


def parse_angle(text) -> float:
    """Radians, or multiples of pi such as '0.875pi', '7pi/8' or '3/4pi'."""
    t = str(text).strip().lower().replace(" ", "")
    m = _ANGLE.match(t)
    if m is None:
        try:
            return float(t)
        except ValueError:
            raise UsageError(f"cannot read angle {text!r}") from None
    num, den1, den2 = m.groups()
    val = float(num) if num else 1.0
    for d in (den1, den2):
        if d:
            val /= float(d)
    return val * math.pi


def parse_schedule(text) -> List[float]:
    vals = [float(x) for x in (text if isinstance(text, (list, tuple)) else str(text).split(","))
            if str(x).strip()]
    if len(vals) < 2 or any(b <= a for a, b in zip(vals, vals[1:])):
        raise UsageError("r-schedule must be strictly increasing with at least two radii")
    return vals


def parse_function(text: str) -> EntireFn:
    """'exp:l', 'polyexp:c0,c1@l', 'sin:w', 'cos:w', 'poly:c0,c1', joined with ';',
    or a JSON file with the EntireFn layout."""
    text = text.strip()
    if text.endswith(".json") and os.path.exists(text):
        with open(text) as fh:
            return EntireFn.from_json(json.load(fh))
    terms = []
    for part in text.split(";"):
        key, _, arg = part.strip().partition(":")
        key = key.lower()
        if key == "exp":
            terms.append(((1,), symbols.parse_complex(arg)))
        elif key == "polyexp":
            coeffs, _, lam = arg.partition("@")
            terms.append(([symbols.parse_complex(c) for c in coeffs.split(",")],
                          symbols.parse_complex(lam or "0")))
        elif key == "poly":
            terms.append(([symbols.parse_complex(c) for c in arg.split(",")], 0j))
        elif key in ("sin", "cos"):
            w = symbols.parse_complex(arg or "1")
            if key == "sin":
                terms += [((1 / 2j,), 1j * w), ((-1 / 2j,), -1j * w)]
            else:
                terms += [((0.5,), 1j * w), ((0.5,), -1j * w)]
        else:
            raise UsageError(f"unknown function term {part!r}")
    return EntireFn.from_terms(terms, label=text)


def _symbol(text):
    try:
        return symbols.parse_symbol(text)
    except (ValueError, KeyError) as exc:
        raise UsageError(f"bad symbol {text!r}: {exc}") from exc


def _cx(z):
    z = complex(z)
    return [z.real, z.imag]


def _catalog_for(h, tau, path):
    need = zerofinder.required_height(h, tau)
    if need <= 0:
        return None
    if path and os.path.exists(path):
        cat = zerofinder.ZetaZeroCatalog.load(path)
        if cat.height >= need:
            return cat
    for n in (30, 60, 100):
        cat = zerofinder.build_zeta_catalog(n)
        if cat.height >= need:
            if path:
                cat.save(path)
            return cat
    raise IncompleteCatalog("radius needs more than 100 catalogued zeta zeros", needed=need)


# --- commands ---------------------------------------------------------------

def _quad(cfg):
    return contours.QuadratureConfig(int(cfg.get("nodes", 32)), cfg.get("rule", "gauss-legendre"),
                                     float(cfg.get("rtol", 1e-10)), int(cfg.get("max_refinements", 6)))


def cmd_borel(cfg):
    f = parse_function(_need(cfg, "fn"))
    z = parse_grid(_need(cfg, "z"))
    b = borel_exact(f)
    n_terms = int(cfg.get("series_terms", 64))
    coeffs = f.taylor_coeffs(n_terms)
    rows = []
    for x in z:
        exact = b(x)
        try:
            ser, err = borel_series(coeffs, x, full_output=True)
        except BorelCalcError:
            ser, err = complex("nan"), float("nan")
        rows.append({"z_re": x.real, "z_im": x.imag, "value_re": exact.real, "value_im": exact.imag,
                     "series_re": ser.real, "series_im": ser.imag, "error": err})
    diag = {"poles": [{"location": _cx(s.location), "order": s.order} for s in b.singularities],
            "conjugate_diagram_radius": b.conjugate_diagram_radius}
    return rows, diag


def cmd_apply(cfg):
    f = _symbol(_need(cfg, "symbol"))
    phi = parse_function(_need(cfg, "fn"))
    t = parse_grid(_need(cfg, "t"))
    rows, diag = [], {}
    if t.size:
        res = operator.apply(f, phi, t, cfg=_quad(cfg), full_output=True)
        vals = np.atleast_1d(res.value)
        rows = [{"t_re": x.real, "t_im": x.imag, "value_re": v.real, "value_im": v.imag,
                 "error": res.error} for x, v in zip(t, vals)]
        diag = {"contour": res.contour_kind, "contour_label": res.contour.label}
    return rows, diag


def _load_coeffs(path):
    with open(path) as fh:
        data = json.load(fh)
    data = data.get("coefficients", data) if isinstance(data, dict) else data
    return [[complex(*c) if isinstance(c, list) else complex(c) for c in p] for p in data]


def cmd_solve(cfg):
    f = _symbol(_need(cfg, "symbol"))
    g = parse_function(_need(cfg, "rhs"))
    tau = float(_need(cfg, "radius"))
    grid = parse_grid(cfg.get("grid", "0:2:0.1"))
    coeffs = _load_coeffs(cfg["homog_coeffs"]) if cfg.get("homog_coeffs") else None
    catalog = None
    if f.params.get("family") == "zeta-shifted":
        catalog = _catalog_for(f.params["h"], tau, cfg.get("catalog"))
    bundle = solver.assemble(f, g, coeffs, tau, catalog=catalog, grid=grid, cfg=_quad(cfg))
    vals = np.atleast_1d(bundle(grid)) if grid.size else []
    res = bundle.residual_report["values"]
    rows = [{"t_re": x.real, "t_im": x.imag, "value_re": v.real, "value_im": v.imag,
             "error": float(e)} for x, v, e in zip(grid, vals, res)]
    diag = bundle.to_json()
    return rows, diag


def cmd_zeros(cfg):
    f = _symbol(_need(cfg, "symbol"))
    tau = float(_need(cfg, "radius"))
    catalog = None
    if f.params.get("family") == "zeta-shifted":
        catalog = _catalog_for(f.params["h"], tau, cfg.get("catalog"))
    recs = zerofinder.find_zeros(f, tau, catalog)
    rows = [{"re": r.location.real, "im": r.location.imag, "multiplicity": r.multiplicity,
             "error": r.residual, "method": r.method} for r in recs]
    return rows, {"count": sum(r.multiplicity for r in recs),
                  "records": [r.to_json() for r in recs]}


def cmd_zeta_solve(cfg):
    h = float(_need(cfg, "h"))
    src = zetasolver.make_source(cfg.get("source", "one"))
    psi = parse_angle(cfg.get("psi", "0.875pi"))
    delta = float(cfg["delta"]) if cfg.get("delta") is not None else None
    schedule = parse_schedule(cfg.get("r_schedule", "10,20,40,80"))
    t = parse_grid(cfg.get("t", "0.5,1,2"))
    q = _quad(cfg)
    zetasolver._check_h(h)
    delta = zetasolver.resolve_delta(h, delta)
    rows, per_r = [], []
    for r in schedule:
        phi = np.atleast_1d(zetasolver.phi_r_particular(src, h, psi, delta, r, t, q)) if t.size else []
        g_r = np.atleast_1d(zetasolver.g_r_eval(src, psi, delta, r, t, q)) if t.size else []
        resid = np.atleast_1d(zetasolver.truncated_residual(src, h, psi, delta, r, t, q)) \
            if (t.size and cfg.get("residuals", True)) else [float("nan")] * len(t)
        per_r.append({"r": r, "max_residual": float(np.max(resid)) if len(resid) else None})
        for x, p, g, e in zip(t, phi, g_r, resid):
            rows.append({"r": r, "t_re": x.real, "t_im": x.imag, "phi_re": p.real, "phi_im": p.imag,
                         "g_r_re": g.real, "g_r_im": g.imag, "error": float(e)})
    diag = {"delta": delta, "psi": psi, "per_r": per_r, "limits": []}
    for x in t:
        if zetasolver.in_sector(x, psi):
            try:
                val, rep = zetasolver.f_infinity(src, h, psi, delta, x, schedule,
                                                 float(cfg.get("tol", 1e-8)), q)
                diag["limits"].append({"t": _cx(x), "value": _cx(val), "report": rep.to_json()})
            except BorelCalcError as exc:
                diag["limits"].append({"t": _cx(x), "error": exc.as_dict()})
    if cfg.get("with_residues"):
        r0 = schedule[0]
        catalog = _catalog_for(h, r0, cfg.get("catalog"))
        zeros = zerofinder.zeros_of_zeta_shifted(h, r0, catalog)
        terms = zetasolver.residue_terms(src, h, psi, delta, r0, zeros, q)
        diag["zeros"] = [z.to_json() for z in zeros]
        diag["residue_terms"] = [{"tau": _cx(c.tau), "c": _cx(c.coefficient)} for c in terms]
    return rows, diag


def cmd_recover(cfg):
    src = zetasolver.make_source(cfg.get("source", "one"))
    psi = parse_angle(cfg.get("psi", "0.875pi"))
    delta = float(cfg.get("delta") or zetasolver.DEFAULT_DELTA)
    schedule = parse_schedule(cfg.get("r_schedule", "10,20,40,80"))
    t = np.real(parse_grid(cfg.get("t", "0.5,1,2")))
    rep = zetasolver.check_source_recovery(src, psi, delta, tuple(t), schedule, _quad(cfg))
    rows = [{"r": r, "error": e} for r, e in zip(rep["radii"], rep["errors"])]
    return rows, {"monotone": rep["monotone"], "final": rep["final"]}


def cmd_catalog(cfg):
    n = int(cfg.get("n", 30))
    path = cfg.get("persist") or os.environ.get(CATALOG_ENV)
    cat = zerofinder.build_zeta_catalog(n, path)
    rows = [{"index": k + 1, "re": z.real, "ordinate": z.imag, "error": r}
            for k, (z, r) in enumerate(zip(cat.zeros, cat.residuals))]
    return rows, {"height": cat.height, "path": path}


COMMANDS = {"borel": cmd_borel, "apply": cmd_apply, "solve": cmd_solve, "zeros": cmd_zeros,
            "zeta-solve": cmd_zeta_solve, "recover": cmd_recover, "catalog": cmd_catalog}


def _need(cfg, key):
    if cfg.get(key) in (None, ""):
        raise UsageError(f"missing required option --{key.replace('_', '-')}")
    return cfg[key]


# --- output -----------------------------------------------------------------

def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(np.real(x)), float(np.imag(x))]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        x = float(x)
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def render(results, fmt, config=None, diagnostics=None) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        cols = list(results[0].keys()) if results else ["t_re", "t_im", "value_re", "value_im", "error"]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for row in results:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                        for v in (row[c] for c in cols)])
        return buf.getvalue()
    env = {"version": __version__, "config": _plain(config or {}),
           "results": _plain(results), "diagnostics": _plain(diagnostics or {})}
    return json.dumps(env, sort_keys=True, indent=1) + "\n"


def emit_report(results, fmt, path, config=None, diagnostics=None):
    text = render(results, fmt, config, diagnostics)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)
    return text


# --- argument handling --------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="borelcalc", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    p.subcommands = sub.choices

    def common(sp):
        sp.add_argument("--config", help="JSON file with option values; flags override it")
        sp.add_argument("--out", help="output path, '-' for stdout, or 'csv'/'json' for stdout")
        sp.add_argument("--format", choices=["json", "csv"])
        sp.add_argument("--nodes", type=int, help="quadrature nodes per segment")
        sp.add_argument("--rtol", type=float, help="quadrature refinement tolerance")
        sp.add_argument("--max-refinements", type=int, dest="max_refinements")
        sp.add_argument("-v", "--verbose", action="store_true")
        return sp

    sp = common(sub.add_parser("borel", help="Borel transform of an exp-polynomial"))
    sp.add_argument("--fn")
    sp.add_argument("--z", help="evaluation points")
    sp.add_argument("--series-terms", type=int, dest="series_terms")

    sp = common(sub.add_parser("apply", help="apply f(d/dt) by the contour definition"))
    sp.add_argument("--symbol")
    sp.add_argument("--fn")
    sp.add_argument("--t")

    sp = common(sub.add_parser("solve", help="solve f(d/dt) phi = g"))
    sp.add_argument("--symbol")
    sp.add_argument("--rhs")
    sp.add_argument("--radius", type=float)
    sp.add_argument("--homog-coeffs", dest="homog_coeffs")
    sp.add_argument("--grid")
    sp.add_argument("--catalog")

    sp = common(sub.add_parser("zeros", help="zeros of a symbol in a disc"))
    sp.add_argument("--symbol")
    sp.add_argument("--radius", type=float)
    sp.add_argument("--catalog")

    sp = common(sub.add_parser("zeta-solve", help="truncated zeta(d^2+h) equation and its limit"))
    sp.add_argument("--source")
    sp.add_argument("--h", type=float)
    sp.add_argument("--psi")
    sp.add_argument("--delta", type=float)
    sp.add_argument("--r-schedule", dest="r_schedule")
    sp.add_argument("--t")
    sp.add_argument("--tol", type=float)
    sp.add_argument("--no-residuals", dest="residuals", action="store_false", default=None)
    sp.add_argument("--with-residues", dest="with_residues", action="store_true", default=None)
    sp.add_argument("--catalog")

    sp = common(sub.add_parser("recover", help="source recovery g_r -> g"))
    sp.add_argument("--source")
    sp.add_argument("--psi")
    sp.add_argument("--delta", type=float)
    sp.add_argument("--r-schedule", dest="r_schedule")
    sp.add_argument("--t")

    sp = common(sub.add_parser("catalog", help="build and persist the zeta zero catalog"))
    sp.add_argument("--n", type=int)
    sp.add_argument("--persist")
    return p


def _merge(args):
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg.update(json.load(fh))
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    for k, v in vars(args).items():
        if v is not None and k not in ("config", "verbose"):
            cfg[k] = v
    if "catalog" in cfg or args.command in ("zeros", "solve", "zeta-solve"):
        cfg.setdefault("catalog", os.environ.get(CATALOG_ENV))
    return cfg


def _output_target(cfg):
    out = cfg.get("out", "-")
    fmt = cfg.get("format")
    if out in ("csv", "json"):
        return "-", fmt or out
    if fmt is None:
        fmt = "csv" if str(out).endswith(".csv") else "json"
    return out, fmt


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        import logging
        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _merge(args)
        path, fmt = _output_target(cfg)
        rows, diag = COMMANDS[args.command](cfg)
        shown = {k: v for k, v in cfg.items() if k not in ("out", "format")}
        emit_report(rows, fmt, path, shown, diag)
    except (UsageError, ValueError) as exc:
        parser.subcommands[args.command].print_usage(sys.stderr)
        print(f"borelcalc: error: {exc}", file=sys.stderr)
        return 2
    except BorelCalcError as exc:
        print(json.dumps({"error": _plain(exc.as_dict())}, sort_keys=True, ensure_ascii=False), file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": {"type": "io", "message": str(exc)}}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
