"""Command-line front end: ``brlab <group> <command> [options]``.

Single numbers go to stdout; tables and reports go to ``--outdir`` together
with a ``manifest.json`` describing the run.

Exit codes: 0 success, 1 experiment failed a criterion, 2 invalid input,
3 precision loss, 4 internal consistency failure.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from . import brf, contfrac, experiments, flow, geometry, io
from .errors import (BrlabError, InternalConsistencyError, InvalidInputError, PrecisionError,
                     ResourceError, UnsupportedModeError)

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_PRECISION, EXIT_CONSISTENCY = 0, 1, 2, 3, 4


# -- argument helpers ----------------------------------------------------------

def _alpha_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--alpha", choices=sorted(contfrac.PRESETS), help="named quadratic irrational")
    g.add_argument("--quotients", help="comma-separated partial quotients a_1,a_2,...")
    g.add_argument("--decimal", help="decimal digits of alpha in (0, 1)")
    p.add_argument("--depth", type=int, default=40, help="continued fraction depth")
    p.add_argument("--golden-tail", action="store_true",
                   help="give --quotients an exact value by appending 1, 1, 1, ...")


def _parse_alpha(ns) -> contfrac.ContinuedFraction:
    if ns.alpha:
        return contfrac.PRESETS[ns.alpha](ns.depth)
    if ns.quotients:
        try:
            qs = [int(v) for v in ns.quotients.split(",") if v.strip()]
        except ValueError:
            raise InvalidInputError("--quotients must be integers") from None
        if ns.golden_tail:
            return contfrac.complete_with_golden_tail(qs, extra=max(0, ns.depth - len(qs)))
        return contfrac.from_quotients(qs)
    return contfrac.expand_value(ns.decimal, ns.depth)


def _pair(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise InvalidInputError(f"expected two comma-separated numbers, got {text!r}")
    return tuple(io.parse_number(v) for v in parts)


def _hat(text: str) -> brf.HatFunction:
    parts = text.split(",")
    if len(parts) != 3:
        raise InvalidInputError("--hat expects a,b,H")
    return brf.HatFunction(*(io.parse_number(v) for v in parts))


def _real(text: str):
    try:
        return io.parse_number(text)
    except InvalidInputError:
        return float(text)


def _count(text: str) -> int:
    v = float(text) if any(c in text for c in ".eE") else int(text)
    if v != int(v):
        raise argparse.ArgumentTypeError(f"{text} is not an integer")
    return int(v)


# -- commands ------------------------------------------------------------------

class Run:
    """Per-invocation context: output directory, parameters and artifacts."""

    def __init__(self, ns, argv):
        self.ns = ns
        self.argv = list(argv)
        self.outdir = Path(ns.outdir)
        self.outputs: list[str] = []
        self.mode = getattr(ns, "mode", None) or "auto"

    def path(self, name: str) -> Path:
        self.outdir.mkdir(parents=True, exist_ok=True)
        p = self.outdir / name
        self.outputs.append(str(p))
        return p

    def emit(self, value) -> None:
        print(io.format_number(value, self.ns.digits))


def cmd_cf(run: Run) -> int:
    ns = run.ns
    cf = _parse_alpha(ns)
    if ns.cmd == "expand":
        print(",".join(str(a) for a in cf.quotients))
        io.write_json(io.cf_to_dict(cf, ns.digits), run.path("cf.json"))
    elif ns.cmd == "convergents":
        rows = [(n, cf.quotients[n], cf.p[n + 1], cf.q[n + 1]) for n in range(cf.depth)]
        io.write_csv(run.path("convergents.csv"), ["n", "a_n", "p_n", "q_n"],
                     [(n + 1, a, p, q) for n, a, p, q in rows], ns.digits)
        print(f"{cf.p[-1]}/{cf.q[-1]}")
    elif ns.cmd == "ostrowski":
        exp = contfrac.ostrowski_expand(ns.n, cf)
        print(",".join(str(b) for b in exp.digits))
    elif ns.cmd == "stat":
        run.emit(contfrac.cfsum_statistic(cf, ns.s, ns.m))
    return EXIT_OK


def cmd_geom(run: Run) -> int:
    ns = run.ns
    s = io.load_set(ns.set)
    if ns.cmd == "measure":
        run.emit(geometry.measure(s))
        return EXIT_OK
    if ns.cmd == "triangulate":
        alpha = _parse_alpha(ns).value if (ns.alpha or ns.quotients or ns.decimal) else None
        tris = geometry.triangulate(s, alpha)
        io.write_json([io.set_to_dict(t) for t in tris], run.path("triangles.json"))
        print(len(tris))
        return EXIT_OK
    cf = _parse_alpha(ns)
    prof = geometry.tau_profile(s, cf.require_value())
    xs = [Fraction(k, ns.points) for k in range(ns.points)]
    rows = [(x, prof(x) if prof.is_exact else prof(float(x))) for x in xs]
    io.write_csv(run.path("profile.csv"), io.PROFILE_HEADER, rows, ns.digits)
    run.emit(prof.integral())
    return EXIT_OK


def _tau_from(ns, alpha):
    if getattr(ns, "hat", None):
        return brf.PeriodizedFunction.single(_hat(ns.hat))
    if getattr(ns, "set", None):
        return geometry.tau_profile(io.load_set(ns.set), alpha)
    raise InvalidInputError("give --hat a,b,H or --set FILE")


def cmd_brf(run: Run) -> int:
    ns = run.ns
    if ns.cmd == "gridsum":
        run.emit(brf.grid_sum_closed_form(_hat(ns.hat), ns.q))
        return EXIT_OK
    cf = _parse_alpha(ns)
    alpha = cf.require_value()
    if ns.cmd == "cohom":
        tri = geometry.tau_profile(geometry.special_triangle(), alpha).to_periodized()
        g = brf.special_triangle_transfer(alpha)
        run.emit(brf.cohomology_residual(tri, alpha, g, ns.grid))
        return EXIT_OK
    tau = _tau_from(ns, alpha)
    if ns.cmd == "sum":
        x0 = _real(ns.x0)
        mode = None if ns.mode in (None, "auto") else ns.mode
        if ns.trace:
            tr = brf.remainder_trace(tau, cf, x0, ns.n)
            io.write_csv(run.path("remainder.csv"), io.REMAINDER_HEADER,
                         [(i + 1, float(v)) for i, v in enumerate(tr)], ns.digits)
        run.emit(brf.birkhoff_remainder(tau, cf, x0, ns.n, mode))
    elif ns.cmd == "decompose":
        mode = None if ns.mode in (None, "auto") else ns.mode
        value, terms = brf.decompose_sum(tau, cf, ns.n, mode)
        io.write_csv(run.path("decomposition.csv"), io.DECOMPOSITION_HEADER,
                     io.decomposition_rows(terms), ns.digits)
        run.emit(value)
    return EXIT_OK


def cmd_flow(run: Run) -> int:
    ns = run.ns
    cf = _parse_alpha(ns)
    alpha = cf.require_value()
    s = io.load_set(ns.set)
    x = _pair(ns.x)
    mode = None if ns.mode in (None, "auto") else ns.mode
    if ns.cmd == "delta":
        run.emit(flow.delta_T(s, alpha, x, _real(ns.t), mode))
    elif ns.cmd == "gap":
        run.emit(flow.equivalence_gap(s, alpha, x, _real(ns.t), mode))
    elif ns.cmd == "trace":
        tmax = _real(ns.tmax)
        cps = [_real(v) for v in ns.checkpoints.split(",")] if ns.checkpoints else experiments.decades(float(tmax), 0)
        tr = flow.sup_trace(s, alpha, x, tmax, cps, mode)
        io.write_csv(run.path("trace.csv"), io.TRACE_HEADER, tr.rows(), ns.digits)
        run.emit(tr.running_sup)
    return EXIT_OK


def cmd_exp(run: Run) -> int:
    ns = run.ns
    name = ns.recipe
    if name == "special-triangle":
        rep = experiments.special_triangle_experiment(_parse_alpha(ns), ns.tmax, ns.starts, ns.seed)
    elif name == "parallelogram":
        rep = experiments.parallelogram_counterexample(_parse_alpha(ns), _real(ns.p), ns.tmax)
    elif name == "triangle-7a":
        rep = experiments.triangle_7a_experiment(ns.levels, ns.k_search, int(ns.nmax))
    elif name == "disc-7b":
        rep = experiments.disc_7b_structure(range(1, ns.m_max + 1))
    elif name == "class-sweep":
        rep = experiments.class_discrepancy_sweep(ns.set_class, _parse_alpha(ns), _pair(ns.x), ns.tmax,
                                                  ns.samples, ns.seed)
    elif name == "boundedness":
        rep = experiments.boundedness_evidence(_parse_alpha(ns), ns.samples, ns.seed)
    else:  # argparse restricts choices
        raise InvalidInputError(f"unknown recipe {name!r}")
    path = run.path(f"{name}.json")
    rep.artifacts.append(path.name)  # relative to --outdir
    io.write_json(rep.to_dict(), path)
    print("pass" if rep.passed else "fail")
    return EXIT_OK if rep.passed else EXIT_FAIL


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="brlab", description="Bounded remainder sets for linear flows on the torus.")
    parser.add_argument("--version", action="version", version=f"brlab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--outdir", default="brlab-out", help="directory for tables, reports and manifest")
    common.add_argument("--seed", type=int, default=experiments.DEFAULT_SEED)
    common.add_argument("--digits", type=int, default=io.DEFAULT_DIGITS, help="decimal digits in CSV output")
    groups = parser.add_subparsers(dest="group", required=True)

    cf = groups.add_parser("cf", help="continued fractions").add_subparsers(dest="cmd", required=True)
    for name in ("expand", "convergents", "ostrowski", "stat"):
        p = cf.add_parser(name, parents=[common])
        _alpha_args(p)
        if name == "ostrowski":
            p.add_argument("--n", type=_count, required=True)
        if name == "stat":
            p.add_argument("--s", type=int, required=True)
            p.add_argument("--m", type=float, default=2.0)

    geom = groups.add_parser("geom", help="target sets and profiles").add_subparsers(dest="cmd", required=True)
    for name in ("tau", "measure", "triangulate"):
        p = geom.add_parser(name, parents=[common])
        p.add_argument("--set", required=True, help="set JSON file")
        if name != "measure":
            _alpha_args(p, required=(name == "tau"))
        if name == "tau":
            p.add_argument("--points", type=int, default=1000)

    b = groups.add_parser("brf", help="Birkhoff sums").add_subparsers(dest="cmd", required=True)
    for name in ("sum", "decompose", "gridsum", "cohom"):
        p = b.add_parser(name, parents=[common])
        if name != "gridsum":
            _alpha_args(p)
        if name in ("sum", "decompose"):
            p.add_argument("--hat", help="hat parameters a,b,H")
            p.add_argument("--set", help="set JSON file (uses its profile)")
            p.add_argument("--n", type=_count, required=True)
            p.add_argument("--mode", choices=["auto", "quadratic", "decimal", "float"], default="auto")
        if name == "sum":
            p.add_argument("--x0", default="0")
            p.add_argument("--trace", action="store_true", help="also write remainder.csv (float)")
        if name == "gridsum":
            p.add_argument("--hat", required=True)
            p.add_argument("--q", type=_count, required=True)
        if name == "cohom":
            p.add_argument("--grid", type=_count, default=10_000)

    fl = groups.add_parser("flow", help="continuous flow").add_subparsers(dest="cmd", required=True)
    for name in ("delta", "trace", "gap"):
        p = fl.add_parser(name, parents=[common])
        _alpha_args(p)
        p.add_argument("--set", required=True)
        p.add_argument("--x", default="0,0", help="start point x1,x2")
        p.add_argument("--mode", choices=["auto", "exact", "float"], default="auto")
        if name == "trace":
            p.add_argument("--tmax", required=True)
            p.add_argument("--checkpoints", help="comma-separated times (default: decades)")
        else:
            p.add_argument("--t", required=True)

    ex = groups.add_parser("exp", help="experiment recipes", parents=[common])
    ex.add_argument("recipe", choices=sorted(experiments.RECIPES))
    _alpha_args(ex, required=False)
    ex.add_argument("--tmax", type=float, default=1e5)
    ex.add_argument("--starts", type=int, default=1)
    ex.add_argument("--p", default=None, help="parallelogram height (default (sqrt3-1)/2)")
    ex.add_argument("--levels", type=int, default=2)
    ex.add_argument("--k-search", type=int, default=1000)
    ex.add_argument("--nmax", type=float, default=1e6)
    ex.add_argument("--m-max", type=int, default=100)
    ex.add_argument("--class", dest="set_class", choices=["axis_rectangles", "discs", "polygons"],
                    default="axis_rectangles")
    ex.add_argument("--samples", type=int, default=20)
    ex.add_argument("--x", default="0,0")
    return parser


HANDLERS = {"cf": cmd_cf, "geom": cmd_geom, "brf": cmd_brf, "flow": cmd_flow, "exp": cmd_exp}


def _defaults(ns) -> None:
    if ns.group == "exp":
        if not (ns.alpha or ns.quotients or ns.decimal):
            ns.alpha = "sqrt2m1"
        if ns.p is None:
            ns.p = str((np.sqrt(3) - 1) / 2)


def dispatch(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code not in (0, None) else EXIT_OK
    _defaults(ns)
    run = Run(ns, argv)
    started = io.now()
    code = EXIT_OK
    try:
        code = HANDLERS[ns.group](run)
    except PrecisionError as exc:
        print(f"precision error: {exc}", file=sys.stderr)
        code = EXIT_PRECISION
    except InternalConsistencyError as exc:
        print(f"internal consistency error: {exc}", file=sys.stderr)
        code = EXIT_CONSISTENCY
    except (InvalidInputError, UnsupportedModeError, ResourceError, FileNotFoundError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        code = EXIT_INVALID
    except BrlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_FAIL
    params = {k: v for k, v in vars(ns).items() if k not in ("outdir",)}
    manifest = io.RunManifest(
        command=["brlab"] + argv, parameters=params, mode=run.mode, seed=ns.seed,
        version=__version__, digits=ns.digits, started=started, finished=io.now(),
        outputs=sorted(run.outputs), precision_bits=_safe_precision(),
    )
    try:
        manifest.write(run.outdir)
    except OSError as exc:
        print(f"could not write manifest: {exc}", file=sys.stderr)
    return code


def _safe_precision():
    try:
        return contfrac.precision_bits()
    except InvalidInputError:
        return None


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
