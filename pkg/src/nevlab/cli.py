"""Command line front door: scenario runs, acceptance suites and one-off verdicts.

Exit codes: 0 on success, 2 when a verdict precondition (or classification)
fails, 1 on I/O, schema or usage errors.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import time

import numpy as np

from . import acceptance
from .errors import (ClassificationError, DomainError, NevlabError, PreconditionError, SingularityError,
                     UnsupportedError, is_divergent)
from .foliation import classify_point, enigma_member, horocyclic_profile
from .measures import layer_cake_sides
from .quotients import augur_bounds, fit_augur_constants, quotient_series
from .regularity import fortunate_verdict, gamma_regular_verdict, sub_density_verdict
from .scenario import Scenario, ScenarioError, load, parse

EXIT_OK, EXIT_IO, EXIT_PRECONDITION = 0, 1, 2
VERDICT_ERRORS = (PreconditionError, ClassificationError, UnsupportedError, SingularityError, DomainError)
CSV_COLUMNS = ("epsilon", "value", "lower", "upper_density", "upper_tail", "method")
DEFAULT_BETAS = tuple(2.0 ** k for k in range(1, 11))


def _num(x):
    return "%.16e" % float(x)


def _plain(obj):
    """JSON-safe copy: non-finite and divergent numbers become null."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, float, np.integer, np.floating)):
        v = float(obj)
        return None if is_divergent(v) or not math.isfinite(v) else v
    return obj


def _dumps(obj):
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


class Context:
    """Scenario plus the command-line overrides that apply to every task."""

    def __init__(self, scen: Scenario, jobs=None, seed=None, tolerance=None):
        self.scen = scen
        self.jobs = jobs if jobs is not None else scen.jobs
        self.seed = scen.seed if seed is None else int(seed)
        self.rtol = scen.tolerance if tolerance is None else float(tolerance)

    def grid(self, task):
        if "grid" not in task:
            return self.scen.grid
        from .scenario import _grid
        return _grid(task["grid"])

    def gauge(self, task, key, default=None):
        if key not in task:
            if default is None:
                raise ScenarioError(key, f"task needs {key!r}")
            return self.scen.gauge(default, key)
        return self.scen.gauge(task[key], key)


# -- task handlers: each returns (text, extension, note) --------------------------------------

def _sweep(ctx, task, bounds=None):
    f = ctx.scen.function(task["function"])
    kappa, lam = ctx.gauge(task, "kappa", "one"), ctx.gauge(task, "lam", "id")
    tau = float(task.get("tau", 0.0))
    grid = ctx.grid(task)
    series = quotient_series(f, kappa, lam, tau, grid, task.get("method", "auto"), ctx.jobs, ctx.rtol)
    want = task.get("bounds", False) if bounds is None else bounds
    rows = []
    if want:
        trip = f.triple()
        if trip is None:
            raise UnsupportedError("augur bounds need an explicit Nevanlinna triple")
        consts = fit_augur_constants(trip.mu, trip.b, lam, tau, grid[:1])
        for e, v in zip(series.grid, series.values):
            ab = augur_bounds(trip.mu, trip.b, kappa, lam, tau, e, consts)
            rows.append((e, v, ab.lower, ab.upper_density_term, ab.upper_tail_term))
    else:
        rows = [(e, v, math.nan, math.nan, math.nan) for e, v in zip(series.grid, series.values)]
    out = io.StringIO()
    out.write(",".join(CSV_COLUMNS) + "\n")
    for row in rows:
        out.write(",".join(_num(x) for x in row) + f",{series.method}\n")
    return out.getvalue(), "csv", f"{len(rows)} points ({series.method})"


def _augur(ctx, task):
    return _sweep(ctx, task, bounds=True)


def _taus(task):
    taus = task.get("taus", [task.get("tau", 0.0)])
    return [float(t) for t in taus]


def _classify(ctx, task):
    f = ctx.scen.function(task["function"])
    verdicts = [classify_point(f, tau).to_json() for tau in _taus(task)]
    return _dumps(verdicts), "json", ", ".join(v["class"] for v in verdicts)


def _foliate(ctx, task):
    f = ctx.scen.function(task["function"])
    kappa, lam = ctx.gauge(task, "kappa", "one"), ctx.gauge(task, "lam", "id")
    grid = ctx.grid(task) if "grid" in task else None
    out = []
    for tau in _taus(task):
        entry = classify_point(f, tau).to_json()
        entry["enigma"] = enigma_member(f, kappa, lam, tau, grid, ctx.jobs).to_json()
        out.append(entry)
    note = ", ".join(f"{e['class']}{'*' if e['enigma']['member'] else ''}" for e in out)
    return _dumps(out), "json", note


def _horocycle(ctx, task):
    f = ctx.scen.function(task["function"])
    gamma = ctx.gauge(task, "gamma", "id")
    betas = [float(b) for b in task.get("betas", DEFAULT_BETAS)]
    if any(b <= 0 for b in betas) or any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
        raise ScenarioError("betas", "betas must be positive and increasing")
    prof = horocyclic_profile(f, gamma, float(task.get("alpha", 1.0)), float(task.get("tau", 0.0)), betas,
                              int(task.get("size", 2000)), ctx.seed)
    text = "beta,sup\n" + "".join(f"{_num(b)},{_num(s)}\n" for b, s in prof)
    return text, "csv", f"final sup {prof[-1][1]:.3g}"


def _verdict(kind):
    def run(ctx, task):
        tau = float(task.get("tau", 0.0))
        if kind == "sub_density":
            v = sub_density_verdict(ctx.scen.measure(task["measure"]), ctx.gauge(task, "F"), tau)
        elif kind == "fortunate":
            v = fortunate_verdict(ctx.scen.function(task["function"]), ctx.gauge(task, "F"), tau, jobs=ctx.jobs)
        else:
            v = gamma_regular_verdict(ctx.scen.measure(task["measure"]), ctx.gauge(task, "gamma"), tau)
        return _dumps(v.to_json()), "json", f"holds={v.holds}"
    return run


def _layer_cake(ctx, task):
    mu = ctx.scen.measure(task["measure"])
    sides = layer_cake_sides(mu, ctx.gauge(task, "gamma"), float(task.get("tau", 0.0)))
    body = {"left": float(sides.left), "right": float(sides.right),
            "left_divergent": is_divergent(sides.left), "right_divergent": is_divergent(sides.right)}
    return _dumps(body), "json", f"left={sides.left:.6g} right={sides.right:.6g}"


HANDLERS = {
    "sweep": _sweep,
    "augur": _augur,
    "classify": _classify,
    "foliate": _foliate,
    "horocycle": _horocycle,
    "sub_density": _verdict("sub_density"),
    "fortunate": _verdict("fortunate"),
    "gamma_regular": _verdict("gamma_regular"),
    "layer_cake": _layer_cake,
}


def execute(ctx, task, index, out_dir=None, stream=None):
    """Run one task; returns (status, exit code, output path, note)."""
    op = task["op"]
    if op not in HANDLERS:
        return "error", EXIT_IO, None, f"unknown op {op!r}"
    try:
        text, ext, note = HANDLERS[op](ctx, task)
    except VERDICT_ERRORS as exc:
        hyp = getattr(exc, "hypothesis", None)
        msg = f"{type(exc).__name__}: {exc}" + (f" [hypothesis: {hyp}]" if hyp else "")
        return "precondition", EXIT_PRECONDITION, None, msg
    except (ScenarioError, KeyError, ValueError, TypeError) as exc:
        msg = f"missing key {exc}" if isinstance(exc, KeyError) else str(exc)
        return "error", EXIT_IO, None, f"tasks[{index}]: {msg}"
    except NevlabError as exc:
        return "error", EXIT_PRECONDITION, None, f"{type(exc).__name__}: {exc}"
    if out_dir is None and "output" not in task:
        (stream or sys.stdout).write(text)
        return "ok", EXIT_OK, "-", note
    path = os.path.join(out_dir or ".", task.get("output") or f"task{index:02d}_{op}.{ext}")
    try:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        return "error", EXIT_IO, None, f"cannot write {path}: {exc}"
    return "ok", EXIT_OK, path, note


def _summary(rows, stream):
    header = ("#", "op", "status", "output", "seconds", "note")
    table = [header] + [tuple(str(c) for c in r) for r in rows]
    widths = [max(len(r[i]) for r in table) for i in range(len(header) - 1)]
    for r in table:
        stream.write("  ".join(c.ljust(w) for c, w in zip(r, widths)) + "  " + r[-1] + "\n")


def _load(path):
    try:
        return load(path), None
    except OSError as exc:
        return None, f"cannot read scenario: {exc}"
    except json.JSONDecodeError as exc:
        return None, f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
    except ScenarioError as exc:
        return None, f"{path}: {exc}"


def cmd_run(args):
    scen, err = _load(args.scenario)
    if err:
        print(err, file=sys.stderr)
        return EXIT_IO
    ctx = Context(scen, args.jobs, args.seed, args.tolerance)
    out_dir = args.out_dir or "."
    rows, worst = [], EXIT_OK
    for i, task in enumerate(scen.tasks):
        t0 = time.perf_counter()
        status, code, path, note = execute(ctx, task, i, out_dir)
        rows.append((i, task["op"], status, path or "-", f"{time.perf_counter() - t0:.2f}", note))
        if code != EXIT_OK:
            # schema/I/O problems dominate precondition failures
            worst = code if worst == EXIT_OK or code == EXIT_IO else worst
    _summary(rows, sys.stdout)
    return worst


def cmd_verify(args):
    try:
        results = acceptance.run_suite(args.suite)
    except KeyError as exc:
        print(exc.args[0], file=sys.stderr)
        return EXIT_IO
    for r in results:
        print(r.line())
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else EXIT_IO


def _gauge_arg(text):
    """Gauge on the command line: JSON (``'{"power": 2}'``, ``0.5``) or a name."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _single(args, op, extra):
    """Run one task built from command-line arguments, printing its artifact."""
    if args.scenario:
        scen, err = _load(args.scenario)
        if err:
            print(err, file=sys.stderr)
            return EXIT_IO
    else:
        scen = parse({"tasks": [{"op": op}]})
    task = {"op": op, "function": args.function, **{k: v for k, v in extra.items() if v is not None}}
    if args.output:
        task["output"] = args.output
    ctx = Context(scen, args.jobs, args.seed, args.tolerance)
    status, code, path, note = execute(ctx, task, 0, args.out_dir)
    if code != EXIT_OK:
        print(note, file=sys.stderr)
    elif path != "-":
        print(f"wrote {path}: {note}", file=sys.stderr)
    return code


def cmd_classify(args):
    return _single(args, "classify", {"taus": args.tau or [0.0]})


def cmd_foliate(args):
    return _single(args, "foliate", {"taus": args.tau or [0.0], "kappa": args.kappa, "lam": args.lam})


def cmd_horocycle(args):
    return _single(args, "horocycle", {"tau": (args.tau or [0.0])[0], "gamma": args.gamma, "alpha": args.alpha,
                                       "betas": args.beta})


def cmd_sweep(args):
    grid = None if args.eps0 is None else {"eps0": args.eps0, "count": args.count}
    return _single(args, "sweep", {"tau": (args.tau or [0.0])[0], "kappa": args.kappa, "lam": args.lam,
                                   "method": args.method, "bounds": args.bounds or None, "grid": grid})


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors share the I/O exit code; 2 is reserved for verdict preconditions
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--scenario", help="scenario JSON file")
    common.add_argument("--out-dir", help="directory for output artifacts")
    common.add_argument("--seed", type=int, help="seed for quasi-random nets (default: scenario seed)")
    common.add_argument("--jobs", type=int, help="worker processes (default: $NEVLAB_JOBS or 1)")
    common.add_argument("--tolerance", type=float, help="relative tolerance of direct quadrature")

    p = _Parser(prog="nevlab", description="Boundary diagnostics for Pick functions.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", parents=[common], help="execute every task of a scenario")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="run acceptance suites")
    ver.add_argument("suite", nargs="?", default="all", help="suite name or 'all'")
    ver.set_defaults(func=cmd_verify)

    def single(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("--function", required=True, help="function name (scenario or built-in corpus)")
        sp.add_argument("--tau", type=float, action="append", help="boundary point (repeatable)")
        sp.add_argument("--output", help="output file (default: stdout)")
        sp.set_defaults(func=func)
        return sp

    single("classify", cmd_classify, "spectral class of boundary points (JSON)")
    fol = single("foliate", cmd_foliate, "class and enigma membership (JSON)")
    fol.add_argument("--kappa", type=_gauge_arg)
    fol.add_argument("--lam", type=_gauge_arg)
    hor = single("horocycle", cmd_horocycle, "horocyclic profile (CSV beta,sup)")
    hor.add_argument("--gamma", type=_gauge_arg)
    hor.add_argument("--alpha", type=float)
    hor.add_argument("--beta", type=float, action="append")
    sw = single("sweep", cmd_sweep, "averaged-quotient sweep (CSV)")
    sw.add_argument("--kappa", type=_gauge_arg)
    sw.add_argument("--lam", type=_gauge_arg)
    sw.add_argument("--method", choices=("kernel", "direct", "auto"))
    sw.add_argument("--bounds", action="store_true", help="add fitted augur bounds")
    sw.add_argument("--eps0", type=float)
    sw.add_argument("--count", type=int, default=18)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
