"""Command-line entry point: plot-ready tables for spectra, integral errors and Z(s).

Exit status is 0 on success, 2 for invalid flags and 3 when a numerical
procedure fails to reach its tolerance.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import oracle, quadrature, wkb, zeta
from .delta import InterpolationConfig, build_expansion
from .errors import (AccuracyError, ConvergenceError, DomainError, FormulaRangeError, PMSFailure,
                     SolverError, UnsupportedMapError)
from .model import Family, PotentialSpec

NUMERICAL_ERRORS = (AccuracyError, ConvergenceError, SolverError, FormulaRangeError, PMSFailure)


class FlagError(Exception):
    pass


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % x
    if isinstance(x, dict):
        return json.dumps(x)
    return str(x)


def threads():
    raw = os.environ.get("WKBDELTA_THREADS")
    if raw is None:
        return min(8, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise FlagError(f"WKBDELTA_THREADS must be an integer, got {raw!r}")
    if n < 1:
        raise FlagError("WKBDELTA_THREADS must be >= 1")
    return n


def parallel_map(fn, items):
    items = list(items)
    n = threads()
    if n == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------

def add_potential_flags(p):
    p.add_argument("--family", choices=[f.value for f in Family], required=True)
    p.add_argument("--hbar", type=float)
    p.add_argument("--m", type=float)
    p.add_argument("--omega", type=float)
    p.add_argument("--mu", type=float, help="quartic coupling")
    p.add_argument("--rho", type=float, help="sextic coupling")
    p.add_argument("--unit-params", action="store_true", help="set hbar = m = omega = coupling = 1")


def add_output_flags(p):
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--output", help="output file (default: standard output)")


def build_parser():
    parser = argparse.ArgumentParser(prog="wkbdelta", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="energy levels from one method, optionally against a reference")
    add_potential_flags(sp)
    sp.add_argument("--n-max", type=int, default=10)
    sp.add_argument("--method", choices=["closed-form", "wkb", "oracle"], default="closed-form")
    sp.add_argument("--compare", choices=["oracle", "none"], default="none")
    sp.add_argument("--hbar-order", choices=["h0", "h2", "h4"], default="h4")
    sp.add_argument("--delta-order", type=int, default=10)
    sp.add_argument("--source", choices=["series", "quadrature"], default="series")
    sp.add_argument("--tol", type=float, default=1e-9, help="oracle tolerance")
    add_output_flags(sp)

    ie = sub.add_parser("integral-error", help="approximant vs quadrature on an energy grid")
    add_potential_flags(ie)
    ie.add_argument("--kinds", default="J1,J2,J3")
    ie.add_argument("--e-grid", default="log:0.1:1000:50", help="log:a:b:n or lin:a:b:n")
    ie.add_argument("--delta-order", type=int, default=10)
    add_output_flags(ie)

    cp = sub.add_parser("compare", help="every method level by level against the oracle")
    add_potential_flags(cp)
    cp.add_argument("--n-max", type=int, default=10)
    cp.add_argument("--delta-order", type=int, default=10)
    cp.add_argument("--tol", type=float, default=1e-9)
    add_output_flags(cp)

    co = sub.add_parser("coeffs", help="closed-form spectrum coefficients, or series as JSON")
    add_potential_flags(co)
    co.add_argument("--delta-order", type=int, default=10)
    co.add_argument("--series", action="store_true", help="emit the J1/J2/J3 approximants instead")
    add_output_flags(co)

    ze = sub.add_parser("zeta", help="hybrid spectral zeta function")
    add_potential_flags(ze)
    ze.add_argument("--s", type=float, default=1.0)
    ze.add_argument("--k-numeric", type=int, default=4)
    ze.add_argument("--tol", type=float, default=1e-6)
    add_output_flags(ze)
    return parser


def spec_from_args(args):
    family = Family(args.family)
    explicit = {"hbar": args.hbar, "mass": args.m, "omega": args.omega}
    coupling_flag = {"quartic": "mu", "sextic": "rho"}.get(family.value)
    for name in ("mu", "rho"):
        if getattr(args, name) is not None and name != coupling_flag:
            raise FlagError(f"--{name} does not apply to the {family.value} family")
    coupling = getattr(args, coupling_flag) if coupling_flag else None
    if args.unit_params:
        given = [k for k, v in explicit.items() if v is not None]
        if given or coupling is not None:
            raise FlagError("--unit-params cannot be combined with explicit parameters")
    values = {k: (1.0 if v is None else v) for k, v in explicit.items()}
    if family is Family.HARMONIC:
        return PotentialSpec(family, values["hbar"], values["mass"], values["omega"], 0.0)
    return PotentialSpec(family, values["hbar"], values["mass"], values["omega"],
                         1.0 if coupling is None else coupling)


def parse_grid(text):
    try:
        kind, a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise FlagError(f"bad --e-grid {text!r}; expected log:a:b:n or lin:a:b:n")
    if n < 1 or not 0 < a <= b:
        raise FlagError("--e-grid needs 0 < a <= b and n >= 1")
    if kind == "log":
        return np.geomspace(a, b, n)
    if kind == "lin":
        return np.linspace(a, b, n)
    raise FlagError(f"unknown grid kind {kind!r}")


def sigma_percent(approx, exact):
    return abs((approx - exact) / exact * 100)


# ---------------------------------------------------------------------------

def closed_form_energies(spec, n_values, delta_order):
    if spec.family is Family.QUARTIC:
        cf = wkb.quartic_closed_form(spec, delta_order)
        return [wkb.quartic_energy_closed_form(cf, n) for n in n_values]
    if spec.family is Family.SEXTIC:
        cf = wkb.sextic_closed_form(spec, delta_order)
        return [wkb.sextic_energy_closed_form(cf, n) for n in n_values]
    return [spec.hbar * spec.omega * (n + 0.5) for n in n_values]


def wkb_energies(spec, n_values, config):
    # build the cached series once before fanning out
    if spec.family is not Family.HARMONIC and config.integral_source is wkb.IntegralSource.SERIES:
        wkb.lambda_series_terms(spec, config)
    return parallel_map(lambda n: wkb.solve_level(spec, n, config).energy, n_values)


def cmd_spectrum(args, spec):
    n_values = range(args.n_max + 1)
    reference = None
    if args.method == "oracle" or args.compare == "oracle":
        reference = oracle.exact_spectrum(spec, args.n_max, args.tol).energies
    if args.method == "closed-form":
        energies = closed_form_energies(spec, n_values, args.delta_order)
    elif args.method == "wkb":
        cfg = wkb.QuantizationConfig(args.hbar_order, args.delta_order, args.source)
        energies = wkb_energies(spec, n_values, cfg)
    else:
        energies = list(reference)
    rows = []
    for n, e in zip(n_values, energies):
        ref = reference[n] if args.compare == "oracle" else None
        rows.append({"n": n, "E_method": e, "E_reference": ref,
                     "sigma_percent": None if ref is None else sigma_percent(e, ref)})
    return ["n", "E_method", "E_reference", "sigma_percent"], rows


def cmd_integral_error(args, spec):
    if spec.family is Family.HARMONIC:
        raise FlagError("integral-error needs an anharmonic family")
    kinds = [k.strip() for k in args.kinds.split(",") if k.strip()]
    try:
        kinds = [quadrature.IntegralKind(k) for k in kinds]
    except ValueError:
        raise FlagError(f"--kinds must be drawn from J1,J2,J3, got {args.kinds!r}")
    grid = parse_grid(args.e_grid)
    cfg = InterpolationConfig(args.delta_order)
    series = {k: build_expansion(k, spec, cfg).series for k in kinds}

    def row(item):
        E, kind = item
        z = wkb.anharmonic_zeta(spec, E)
        approx = series[kind].evaluate(spec, z)
        exact = quadrature.integral_exact(kind, spec, E)
        return {"E": float(E), "zeta": z, "kind": kind.value, "J_delta": approx, "J_exact": exact,
                "xi_percent": abs((approx - exact) / exact) * 100}

    rows = parallel_map(row, [(E, k) for E in grid for k in kinds])
    return ["E", "zeta", "kind", "J_delta", "J_exact", "xi_percent"], rows


def cmd_compare(args, spec):
    n_values = list(range(args.n_max + 1))
    reference = oracle.exact_spectrum(spec, args.n_max, args.tol).energies
    methods = {"closed-form": closed_form_energies(spec, n_values, args.delta_order)}
    for order in ("h0", "h2", "h4"):
        cfg = wkb.QuantizationConfig(order, args.delta_order)
        methods[f"wkb-{order}"] = wkb_energies(spec, n_values, cfg)
    rows = []
    for n in n_values:
        for name, energies in methods.items():
            rows.append({"n": n, "method": name, "E_method": energies[n], "E_reference": reference[n],
                         "sigma_percent": sigma_percent(energies[n], reference[n])})
    return ["n", "method", "E_method", "E_reference", "sigma_percent"], rows


def cmd_coeffs(args, spec):
    if args.series:
        if spec.family is Family.HARMONIC:
            raise FlagError("--series needs an anharmonic family")
        cfg = InterpolationConfig(args.delta_order)
        rows = [{"kind": k.value, "series": build_expansion(k, spec, cfg).series.to_json()}
                for k in quadrature.IntegralKind]
        return ["kind", "series"], rows
    if spec.family is Family.QUARTIC:
        cf = wkb.quartic_closed_form(spec, args.delta_order)
        values = {"e1": cf.e1, "e2": cf.e2, "e3": cf.e3, "e4": cf.e4,
                  "e4_quantum": cf.e4_terms[0], "e4_classical": cf.e4_terms[1]}
        exact = dict(cf.exact, e4=cf.exact["e4_quantum"] + cf.exact["e4_classical"])
    elif spec.family is Family.SEXTIC:
        cf = wkb.sextic_closed_form(spec, args.delta_order)
        values = {k: getattr(cf, k) for k in ("alpha1", "alpha2", "beta1", "beta2", "beta3")}
        exact = cf.exact
    else:
        raise FlagError("closed-form coefficients exist for the quartic and sextic families")
    rows = [{"name": k, "value": v, "exact": str(exact[k])} for k, v in values.items()]
    return ["name", "value", "exact"], rows


def cmd_zeta(args, spec):
    est = zeta.zeta_hybrid(spec, args.s, args.k_numeric, args.tol)
    target = None
    if spec.family is Family.QUARTIC and spec.omega == 0 and args.s == 1:
        target = zeta.exact_quartic_z1(spec)
    elif spec.family is Family.HARMONIC and args.s > 1:
        from scipy.special import zeta as riemann

        target = (2**args.s - 1) * riemann(args.s) / (spec.hbar * spec.omega) ** args.s
    row = {"s": args.s, "k_numeric": args.k_numeric, "value": est.value, "tail_bound": est.tail_bound,
           "head": est.head, "tail": est.tail, "exact_target": target}
    return list(row), [row]


COMMANDS = {
    "spectrum": cmd_spectrum,
    "integral-error": cmd_integral_error,
    "compare": cmd_compare,
    "coeffs": cmd_coeffs,
    "zeta": cmd_zeta,
}


def render(columns, rows, form):
    if form == "json":
        clean = [{k: (None if isinstance(v, float) and math.isnan(v) else
                      float(v) if isinstance(v, (float, np.floating)) else v) for k, v in r.items()}
                 for r in rows]
        return json.dumps(clean, indent=2) + "\n"
    lines = [",".join(columns)]
    for r in rows:
        cells = []
        for c in columns:
            cell = fmt(r[c])
            if "," in cell or '"' in cell:
                cell = '"' + cell.replace('"', '""') + '"'
            cells.append(cell)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse reports malformed flags with status 2 and --help with 0
        return exc.code
    try:
        threads()
        for flag in ("n_max", "k_numeric"):
            if getattr(args, flag, 0) is not None and getattr(args, flag, 0) < 0:
                raise FlagError(f"--{flag.replace('_', '-')} must be nonnegative")
        if getattr(args, "delta_order", 1) < 1:
            raise FlagError("--delta-order must be >= 1")
        spec = spec_from_args(args)
        columns, rows = COMMANDS[args.command](args, spec)
    except (FlagError, DomainError, UnsupportedMapError) as exc:
        print(f"wkbdelta: error: {exc}", file=sys.stderr)
        return 2
    except NUMERICAL_ERRORS as exc:
        print(f"wkbdelta: numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        for attr in ("estimate", "error", "diagnostics", "n", "converged"):
            if getattr(exc, attr, None) not in (None, [], {}):
                print(f"  {attr}: {getattr(exc, attr)}", file=sys.stderr)
        return 3
    text = render(columns, rows, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main():
    sys.exit(run())
