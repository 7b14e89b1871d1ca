"""JSON scenario files: named measures, functions and gauges plus a task list.

Schema (all top-level keys optional except ``tasks``)::

    {
      "seed": 0, "jobs": 1, "tolerance": 1e-9,
      "grid": {"eps0": 0.125, "count": 18} | {"values": [...]},
      "measures": {"name": {"components": [component, ...]}},
      "functions": {"name": function},
      "gauges": {"name": gauge},
      "tasks": [{"op": ..., "output": "file", ...}, ...]
    }

Components::

    {"kind": "atoms", "atoms": [[x, m], ...]}
    {"kind": "density", "breakpoints": [...], "pieces": [[c0, c1, ...], ...]}
    {"kind": "power", "center": 0, "radius": 1, "exponent": p, "coeff": 1}
    {"kind": "self_similar", "maps": [[ratio, offset], ...], "weights": [...],
     "support": [lo, hi], "total_mass": 1}
    {"kind": "cantor", "support": [lo, hi], "total_mass": 1}
    {"kind": "lebesgue_line", "density": 1}

Functions::

    {"form": "triple", "a": 0, "b": 0, "measure": "name" | null}
    {"form": "resolvent", "matrix": [[...]] | "diagonal": [...], "off_diagonal": [...], "phi": [...]}
    {"form": "mobius", "map": [a, b, c, d], "inner": "name"}
    {"form": "neg_reciprocal", "inner": "name"}
    {"form": "aronszajn_krein", "inner": "name", "alpha": a}

Gauges are ``{"power": p, "log": q, "coeff": c}``, ``{"table": [[t, v], ...]}``,
a number (constant) or one of the names ``"id"`` / ``"one"``; a string that is
not a builtin name refers to an entry of ``gauges``.  Undeclared measure and
function names fall back to the built-in corpus (``"cantor"``, ``"z"``, ...).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

import numpy as np

from . import corpus
from . import gauges as G
from . import measures as M
from .pick import (MatrixResolvent, MobiusMap, MobiusOf, NegativeReciprocal, NevanlinnaTriple,
                   aronszajn_krein, check_self_map, jacobi_matrix)
from .quotients import DIRECT_RTOL, dyadic_grid


class ScenarioError(ValueError):
    """Schema or invariant violation, located by JSON path and (when found) line."""

    def __init__(self, path, message, line=None):
        where = f"{path}" + (f" (line {line})" if line else "")
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line


@dataclass
class Scenario:
    measures: dict = field(default_factory=dict)
    functions: dict = field(default_factory=dict)
    gauges: dict = field(default_factory=dict)
    tasks: list = field(default_factory=list)
    grid: np.ndarray = field(default_factory=dyadic_grid)
    seed: int = 0
    jobs: int | None = None
    tolerance: float = DIRECT_RTOL

    def gauge(self, spec, path="gauge"):
        if isinstance(spec, str) and spec in self.gauges:
            return self.gauges[spec]
        try:
            return G.from_json(spec)
        except (ValueError, TypeError, KeyError) as exc:
            raise ScenarioError(path, str(exc)) from None

    def function(self, name, path="function"):
        if name in self.functions:
            return self.functions[name]
        builtin = builtin_functions()
        if name in builtin:
            return builtin[name]
        raise ScenarioError(path, f"unknown function {name!r}")

    def measure(self, name, path="measure"):
        if name in self.measures:
            return self.measures[name]
        builtin = corpus.measures()
        if name in builtin:
            return builtin[name]
        raise ScenarioError(path, f"unknown measure {name!r}")


def builtin_functions():
    """Corpus functions addressable by name without declaring them."""
    out = {"z": corpus.identity_plus(0.0), "-1/z": corpus.inverse_z(), "inverse": corpus.inverse_z(),
           "quadratic": corpus.quadratic_density(), "jacobi": corpus.jacobi_resolvent()}
    out.update({name: corpus.triple(mu) for name, mu in corpus.measures().items()})
    return out


def _line_of(text, name):
    """Line of the first occurrence of a quoted key, to make errors easy to find."""
    if text is None or name is None:
        return None
    match = re.search(r'"%s"' % re.escape(str(name)), text)
    return text.count("\n", 0, match.start()) + 1 if match else None


def _component(spec, path):
    kind = spec.get("kind")
    if kind == "atoms":
        return M.AtomicComponent(tuple((float(x), float(w)) for x, w in spec["atoms"]))
    if kind == "density":
        return M.DensityComponent(tuple(spec["breakpoints"]), tuple(tuple(p) for p in spec["pieces"]))
    if kind == "power":
        return M.PowerDensityComponent(float(spec.get("center", 0.0)), float(spec.get("radius", 1.0)),
                                       float(spec["exponent"]), float(spec.get("coeff", 1.0)))
    if kind == "self_similar":
        return M.SelfSimilarComponent(tuple(tuple(mp) for mp in spec["maps"]), tuple(spec["weights"]),
                                      tuple(spec.get("support", (0.0, 1.0))), float(spec.get("total_mass", 1.0)))
    if kind == "cantor":
        lo, hi = spec.get("support", (0.0, 1.0))
        return M.cantor(lo, hi, float(spec.get("total_mass", 1.0))).components[0]
    if kind == "lebesgue_line":
        return M.LebesgueLine(float(spec.get("density", 1.0)))
    raise ScenarioError(path, f"unknown component kind {kind!r}")


def _function(spec, scen, path):
    form = spec.get("form")
    if form == "triple":
        mu = spec.get("measure")
        return NevanlinnaTriple(float(spec.get("a", 0.0)), float(spec.get("b", 0.0)),
                                None if mu is None else scen.measure(mu, path + ".measure"))
    if form == "resolvent":
        A = np.asarray(spec["matrix"], dtype=float) if "matrix" in spec else \
            jacobi_matrix(spec["diagonal"], spec["off_diagonal"])
        phi = spec.get("phi")
        if phi is None:
            phi = np.zeros(A.shape[0])
            phi[0] = 1.0
        return MatrixResolvent(A, np.asarray(phi, dtype=float))
    if form == "mobius":
        return MobiusOf(MobiusMap(*spec["map"]), scen.function(spec["inner"], path + ".inner"))
    if form == "neg_reciprocal":
        return NegativeReciprocal(scen.function(spec["inner"], path + ".inner"))
    if form == "aronszajn_krein":
        return aronszajn_krein(scen.function(spec["inner"], path + ".inner"), float(spec["alpha"]))
    raise ScenarioError(path, f"unknown function form {form!r}")


def _grid(spec):
    if spec is None:
        return dyadic_grid()
    if "values" in spec:
        g = np.asarray(spec["values"], dtype=float)
    else:
        g = dyadic_grid(float(spec.get("eps0", 0.125)), int(spec.get("count", 18)))
    if g.size == 0 or np.any(g <= 0) or np.any(np.diff(g) >= 0):
        raise ScenarioError("grid", "grid must be positive and strictly decreasing")
    return g


def _guard(path, text, key, fn):
    try:
        return fn()
    except ScenarioError:
        raise
    except (ValueError, TypeError, KeyError, IndexError, NotImplementedError) as exc:
        msg = f"missing key {exc}" if isinstance(exc, KeyError) else str(exc)
        raise ScenarioError(path, msg, _line_of(text, key)) from None


def parse(data, text=None) -> Scenario:
    """Build a :class:`Scenario` from decoded JSON, validating every invariant."""
    if not isinstance(data, dict):
        raise ScenarioError("$", "scenario must be a JSON object")
    unknown = set(data) - {"seed", "jobs", "tolerance", "grid", "measures", "functions", "gauges", "tasks"}
    if unknown:
        raise ScenarioError("$", f"unknown keys {sorted(unknown)}")
    scen = Scenario()
    scen.seed = int(data.get("seed", 0))
    scen.jobs = data.get("jobs")
    scen.tolerance = float(data.get("tolerance", DIRECT_RTOL))
    scen.grid = _guard("grid", text, "grid", lambda: _grid(data.get("grid")))
    for name, spec in data.get("measures", {}).items():
        path = f"measures.{name}"
        comps = _guard(path, text, name, lambda: tuple(
            _guard(f"{path}.components[{i}]", text, name, lambda c=c, i=i: _component(c, f"{path}.components[{i}]"))
            for i, c in enumerate(spec["components"])))
        scen.measures[name] = M.Measure(comps, name)
    for name, spec in data.get("gauges", {}).items():
        scen.gauges[name] = _guard(f"gauges.{name}", text, name, lambda s=spec: G.from_json(s))
    for name, spec in data.get("functions", {}).items():
        path = f"functions.{name}"
        f = _guard(path, text, name, lambda s=spec, p=path: _function(s, scen, p))
        _guard(path, text, name, lambda f=f: check_self_map(f, seed=scen.seed))
        scen.functions[name] = f
    tasks = data.get("tasks")
    if not isinstance(tasks, list) or not tasks:
        raise ScenarioError("tasks", "scenario needs a nonempty task list")
    outputs = set()
    for i, task in enumerate(tasks):
        if not isinstance(task, dict) or "op" not in task:
            raise ScenarioError(f"tasks[{i}]", "each task needs an 'op'")
        out = task.get("output")
        if out is not None:
            if out in outputs:
                raise ScenarioError(f"tasks[{i}].output", f"duplicate output path {out!r}", _line_of(text, out))
            outputs.add(out)
    scen.tasks = tasks
    return scen


def load(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    data = json.loads(text)
    return parse(data, text)
