"""Scenario runner: ``mlweights run|suite|schema``.

Scenarios are JSON objects validated against :data:`SCENARIO_SCHEMA` (unknown
fields are rejected). Each scenario produces one JSON report and, for kinds
that compute curves, one CSV table. Reports contain no timestamps or paths
from the environment, so identical (scenario, seed) pairs give identical bytes.
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
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from . import compactness as cp
from . import interpolation as ip
from . import numerics as nm
from . import operators as op
from . import power_weights as pw
from .exponents import DimensionError, DomainError, Exp, ExpVector, RVector, as_fraction

OUT_ENV = "MLWEIGHTS_OUT_DIR"
DEFAULT_OUT = "mlweights-out"

EXIT_OK, EXIT_FAILED, EXIT_SCHEMA, EXIT_NUMERIC = 0, 1, 2, 3

PROFILES: dict[str, dict[str, float]] = {
    "default": {"char_rel": 0.02, "oracle_rel": 0.02, "zero_abs": 1e-12, "logconv_rtol": 1e-12, "rh_tol": 1e-6},
    "strict": {"char_rel": 0.01, "oracle_rel": 0.005, "zero_abs": 1e-13, "logconv_rtol": 1e-13, "rh_tol": 1e-9},
}

# Source labels for each operation, embedded in reports for coverage audits.
REFS: dict[str, list[str]] = {
    "Ap": ["sec2:A_p"],
    "A1": ["sec2:A_1"],
    "RH": ["sec2:RH_s", "eq:JN"],
    "Apr": ["def:Apr", "lem:Apr"],
    "Apq": ["def:Apq", "lem:Apqw", "eq:Apqw-1", "eq:Apqw-2"],
    "limited": ["thm:limited", "lem:int-lim"],
    "estimate": ["sec2:A_p", "sec2:RH_s"],
    "sharp-RH": ["lem:RH"],
    "int-Lp": ["lem:AAA", "eq:gaga", "lem:int-Lp", "eq:pw", "eq:drp", "eq:titi", "eq:risi", "eq:dm"],
    "int-lim": ["lem:AAA", "eq:gaga", "lem:int-lim", "eq:gap", "eq:gaq", "eq:srp", "eq:con-1", "eq:con-2", "eq:con-3"],
    "stein-weiss": ["lem:SW"],
    "fractional": ["sec5.2:I_alpha"],
    "calderon-truncated": ["sec5.1:omega-CZ", "sec5.5:calderon"],
    "calderon-maximal": ["sec5.1:T_star", "sec5.5:calderon"],
    "maximal": ["eq:def-M"],
    "identity": [],
    "zero": [],
    "commutator": ["sec1:commutator"],
    "fk-scan": ["lem:FK-1", "lem:FK-2"],
    "fk3": ["lem:FK-3", "eq:fafa"],
    "series": ["lem:bTTj"],
    "fk-a3": ["lem:FK-1"],
    "fk-power": ["lem:FK-1"],
    "translation-dominated": ["lem:FK-1"],
    "apw": ["lem:Apw"],
    "log-convexity": ["thm:WMIP"],
}

# schema -------------------------------------------------------------------------

_NUM = {"$ref": "#/$defs/num"}
_NUMS = {"type": "array", "items": _NUM}


def _obj(props: dict, required: list[str] | None = None) -> dict:
    out: dict[str, Any] = {"type": "object", "properties": props, "additionalProperties": False}
    if required:
        out["required"] = required
    return out


_GRID = _obj({"n": {"type": "integer", "minimum": 1, "maximum": 3}, "L": {"type": "number", "exclusiveMinimum": 0},
              "cells": {"type": "integer", "minimum": 2}}, ["L", "cells"])
_FUNC = _obj({
    "type": {"enum": ["indicator", "bump", "cosine-bump", "constant", "random"]},
    "lo": {"type": "number"}, "hi": {"type": "number"},
    "center": {"type": "number"}, "radius": {"type": "number", "exclusiveMinimum": 0},
    "frequency": {"type": "number"}, "value": {"type": "number"},
}, ["type"])
_OPERATOR = _obj({
    "type": {"enum": ["fractional", "calderon-truncated", "calderon-maximal", "maximal", "identity", "zero"]},
    "alpha": {"type": "number"}, "m": {"type": "integer", "minimum": 1, "maximum": 3},
    "delta": {"type": "number"}, "deltas": {"type": "array", "items": {"type": "number"}, "minItems": 1},
    "depth": {"type": "integer", "minimum": 0}, "shifts": {"type": "integer", "minimum": 1},
}, ["type"])
_COMMUTATOR = _obj({"symbol": _FUNC, "slot": {"type": "integer", "minimum": 1}}, ["symbol"])

PARAMS: dict[str, dict] = {
    "weight-check": _obj({
        "n": {"type": "integer", "minimum": 1},
        "weights": {"type": "array", "items": _NUM, "minItems": 1},
        "class": _obj({
            "type": {"enum": ["Ap", "RH", "Apr", "Apq", "limited"]},
            "p": {"anyOf": [_NUM, _NUMS]}, "s": _NUM, "q": _NUM, "r": _NUMS,
            "pminus": _NUM, "pplus": _NUM,
        }, ["type"]),
    }, ["weights", "class"]),
    "char-estimate": _obj({
        "weight": _obj({"power": _NUM, "step": _obj({"low": {"type": "number"}, "high": {"type": "number"},
                                                     "split": {"type": "number"}}, ["low", "high"])}),
        "class": _obj({"type": {"enum": ["Ap", "RH", "sharp-RH"]}, "p": _NUM, "s": _NUM}, ["type"]),
        "grid": _GRID,
        "cubes": _obj({"depth": {"type": "integer", "minimum": 0}, "shifts": {"type": "integer", "minimum": 1}}),
    }, ["weight", "class", "grid"]),
    "interp-solve": _obj({
        "solver": {"enum": ["int-Lp", "int-lim", "stein-weiss"]},
        "n": {"type": "integer", "minimum": 1},
        "p": _NUMS, "w": _NUMS, "q": _NUMS, "v": _NUMS, "r": _NUMS,
        "pminus": _NUMS, "pplus": _NUMS, "theta": _NUM,
        "tau_mode": {"enum": ["sharp", "analytic"]},
    }, ["solver", "p", "w", "q", "v"]),
    "op-apply": _obj({
        "operator": _OPERATOR, "grid": _GRID,
        "inputs": {"type": "array", "items": _FUNC, "minItems": 1},
        "commutator": _COMMUTATOR,
        "oracle": _obj({"type": {"enum": ["fractional-indicator"]},
                        "range": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}}, ["type"]),
        "zero_law": {"type": "boolean"},
    }, ["operator", "grid", "inputs"]),
    "fk-scan": _obj({
        "operator": _OPERATOR, "grid": _GRID,
        "family": _obj({"kind": {"enum": ["single", "translated", "dilated", "oscillating", "random"]},
                        "count": {"type": "integer", "minimum": 1}}, ["kind"]),
        "commutator": _COMMUTATOR,
        "weight": _NUM, "p": _NUM, "p0": _NUM,
        "A_grid": {"type": "array", "items": {"type": "number"}},
        "h_cells": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "r_cells": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "series": _obj({"terms": {"type": "integer", "minimum": 2}, "ratio": {"type": "number"}}, ["terms"]),
    }, ["operator", "grid", "family", "p"]),
    "counterexample": _obj({
        "which": {"enum": ["fk-a3", "fk-power", "apw", "translation-dominated"]},
        "levels": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 2},
        "h": {"type": "number"}, "p0": {"type": "number"}, "p": {"anyOf": [_NUM, _NUMS]},
        "alpha": {"type": "number"}, "r": _NUMS, "s": _NUMS, "n": {"type": "integer", "minimum": 1},
        "weight": _NUM, "delta": {"type": "number"},
    }, ["which"]),
    "log-convexity": _obj({
        "instances": {"type": "integer", "minimum": 0}, "thetas": {"type": "integer", "minimum": 1},
        "max_m": {"type": "integer", "minimum": 1}, "max_K": {"type": "integer", "minimum": 1},
    }),
}

SCENARIO_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "mlweights scenario",
    "description": (
        "A scenario file holds one scenario object, a list of them, or {\"scenarios\": [...]}. "
        "Numbers marked num accept JSON numbers or strings such as \"3/2\" and \"inf\". "
        "Each kind has its own parameters object; unknown fields are rejected everywhere."
    ),
    "$defs": {
        # relative paths that stay inside the output directory
        "relpath": {"type": "string", "pattern": r"^(?!/)(?!(.*/)?\.\.(/|$))[A-Za-z0-9_./-]+$"},
        "num": {"anyOf": [{"type": "number"}, {"type": "string", "pattern": r"^(inf|-?\d+(\.\d+)?(/\d+)?)$"}]},
    },
    "type": "object",
    "properties": {
        "name": {"type": "string", "pattern": r"^[A-Za-z0-9_.-]+$"},
        "kind": {"enum": list(PARAMS)},
        "seed": {"type": "integer", "minimum": 0},
        "parameters": {"type": "object"},
        "expect": {"type": "object", "additionalProperties": {"type": ["boolean", "number"]}},
        "outputs": _obj({"report": {"$ref": "#/$defs/relpath"}, "curves": {"$ref": "#/$defs/relpath"}}),
    },
    "required": ["kind", "parameters"],
    "additionalProperties": False,
    "allOf": [
        {"if": {"properties": {"kind": {"const": k}}, "required": ["kind"]},
         "then": {"properties": {"parameters": s}}}
        for k, s in PARAMS.items()
    ],
}

FORMATS = {
    "report": (
        "JSON object with keys name, kind, seed, tolerance_profile, paper_refs (list of source labels exercised), "
        "passed, assertions (name -> bool), summary (flat scalars), detail (kind-specific), error (present on failure). "
        "Keys are sorted; floats use the shortest round-trip representation; non-finite floats become null."
    ),
    "curves": "CSV with a header row; columns depend on the kind (curve,parameter,value for fk-scan).",
    "summary": "suite writes summary.csv with columns file,name,kind,status,detail.",
    "expect": "booleans must match the summary value exactly; numbers are upper bounds on the summary value.",
    "exit_codes": {"0": "all passed", "1": "an assertion failed", "2": "schema violation", "3": "numeric failure"},
    "env": f"{OUT_ENV} sets the default output directory (otherwise ./{DEFAULT_OUT}).",
}


class ScenarioError(Exception):
    """Schema violation with a located diagnostic."""


# parsing helpers -----------------------------------------------------------------


def _line_of(text: str, path: list) -> int | None:
    pos, line = 0, None
    for key in path:
        if isinstance(key, str):
            i = text.find(json.dumps(key), pos)
            if i < 0:
                break
            pos = i
            line = text.count("\n", 0, i) + 1
    return line


def load_scenarios(path: Path) -> list[dict]:
    """Parse and validate a scenario file; raises :class:`ScenarioError` with line information."""
    text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path}:{e.lineno}:{e.colno}: invalid JSON: {e.msg}") from None
    if isinstance(data, dict) and "scenarios" in data:
        if set(data) != {"scenarios"} or not isinstance(data["scenarios"], list):
            raise ScenarioError(f"{path}:1: a scenario list object takes only the key 'scenarios' holding a list")
        items, prefix = data["scenarios"], ["scenarios"]
    elif isinstance(data, list):
        items, prefix = data, []
    else:
        items, prefix = [data], None
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    out = []
    for i, item in enumerate(items):
        errors = sorted(validator.iter_errors(item), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
        if errors:
            e = errors[-1]
            loc = ([] if prefix is None else prefix + [i]) + list(e.absolute_path)
            extra = re.findall(r"'([^']+)' was unexpected", e.message)
            line = _line_of(text, loc + extra[:1]) or 1
            where = "/".join(str(x) for x in loc) or "<root>"
            raise ScenarioError(f"{path}:{line}: scenario {i} at {where}: {e.message}")
        sc = dict(item)
        sc.setdefault("name", f"{path.stem}" if prefix is None else f"{path.stem}-{i}")
        sc.setdefault("seed", 0)
        out.append(sc)
    return out


def _f(x: Any) -> Fraction:
    if isinstance(x, str) and x.strip().lower() == "inf":
        raise DomainError("an infinite value is not allowed here")
    return as_fraction(x)


def _exp(x: Any) -> Exp:
    return Exp.of("inf" if isinstance(x, str) and x.strip().lower() == "inf" else as_fraction(x))


def _grid(spec: dict) -> nm.Grid:
    return nm.Grid(spec.get("n", 1), float(spec["L"]), spec["cells"])


def _function(grid: nm.Grid, spec: dict, rng: np.random.Generator) -> op.SampledFunction:
    kind = spec["type"]
    x = grid.mesh()[0]
    if kind == "indicator":
        vals = ((x >= spec.get("lo", 0.0)) & (x <= spec.get("hi", 1.0))).astype(float)
    elif kind == "bump":
        vals = cp.bump_nd(grid, [spec.get("center", 0.0)] + [0.0] * (grid.n - 1), spec.get("radius", 1.0))
    elif kind == "cosine-bump":
        vals = cp.bump_nd(grid, [spec.get("center", 0.0)] + [0.0] * (grid.n - 1), spec.get("radius", 1.0))
        vals = vals * np.cos(spec.get("frequency", 1.0) * x)
    elif kind == "constant":
        vals = np.full(grid.shape, spec.get("value", 1.0))
    else:
        vals = rng.normal(size=grid.shape)
    return op.SampledFunction(grid, vals)


def _operator(grid: nm.Grid, spec: dict) -> op.Operator:
    kind = spec["type"]
    m = spec.get("m", 1)
    if kind == "fractional":
        return op.fractional_operator(grid, spec.get("alpha", 0.5), m)
    if kind == "calderon-truncated":
        return op.truncated_operator(op.calderon1(), grid, spec.get("delta", 4 * grid.h))
    if kind == "calderon-maximal":
        return op.MaximalTruncated(op.calderon1(), grid, spec.get("deltas", [2 * grid.h, 4 * grid.h, 8 * grid.h]))
    if kind == "maximal":
        depth = spec.get("depth", int(math.log2(grid.cells)) - 1)
        return op.MaximalOperator(nm.CubeFamily.dyadic(grid, depth, spec.get("shifts", 3)), m)
    if kind == "identity":
        return op.IdentityOperator(grid)
    return op.ZeroOperator(grid, m)


def _jsonable(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        return v if math.isfinite(v) else None
    if isinstance(x, (Exp, pw.PowerWeight)):
        return str(x)
    return x


# kind runners: each returns (refs, summary, assertions, detail, curve rows) -------


def _weight_check(P: dict, tol: dict, rng) -> tuple:
    n = P.get("n", 1)
    ws = [pw.PowerWeight(_f(a), n) for a in P["weights"]]
    c = P["class"]
    t = c["type"]
    refs = list(REFS[t])
    asserts: dict[str, bool] = {}
    if t == "Ap":
        v = pw.in_Ap(ws[0], _exp(c["p"]))
        if _exp(c["p"]).recip == 1:
            refs = REFS["A1"] + refs
    elif t == "RH":
        v = pw.in_RHs(ws[0], _exp(c["s"]))
    elif t == "Apr":
        v = pw.in_Apr(ws, ExpVector.of([_exp(x) for x in c["p"]]), RVector.of([_exp(x) for x in c["r"]]))
    elif t == "Apq":
        pvec = ExpVector.of([_exp(x) for x in c["p"]])
        v = pw.in_Apq(ws, pvec, _exp(c["q"]))
        asserts["characterizations_agree"] = (
            pw.apq_conditions_1(ws, pvec, _exp(c["q"])).in_class == pw.apq_conditions_2(ws, pvec, _exp(c["q"])).in_class
            == pw.apr_via_apq(ws, pvec, _exp(c["q"])).in_class
        )
    else:
        v = pw.limited_range_member(ws[0], _exp(c["p"]), _exp(c["pminus"]), _exp(c["pplus"]))
    summary = {"in_class": v.in_class, "boundary": v.boundary}
    return refs, summary, asserts, v.as_dict(), []


def _char_estimate(P: dict, tol: dict, rng) -> tuple:
    grid = _grid(P["grid"])
    wspec, c = P["weight"], P["class"]
    cubes_spec = P.get("cubes", {})
    depth = cubes_spec.get("depth", min(10, int(math.log2(grid.cells)) - 1))
    cubes = nm.CubeFamily.dyadic(grid, depth, cubes_spec.get("shifts", 16))
    if "power" in wspec:
        a = _f(wspec["power"])
        w = nm.SampledWeight.from_power(grid, pw.PowerWeight(a, grid.n))
    elif "step" in wspec:
        st = wspec["step"]
        a = None
        w = nm.step_weight(grid, st["low"], st["high"], st.get("split", 0.0))
    else:
        raise DomainError("weight needs 'power' or 'step'")
    t = c["type"]
    asserts: dict[str, bool] = {}
    summary: dict[str, Any] = {}
    if t == "sharp-RH":
        p = _f(c.get("p", 2))
        if a is not None:
            if grid.n != 1:
                raise DomainError("power-weight characteristics are available on the line only")
            char = float(nm.characteristic_upper_bound(a, p))
        else:
            char = nm.step_char_Ap(st["low"], st["high"], p) * 1.01
        kind = "a1" if p == 1 else "ap"
        rep = nm.verify_sharp_RH(w, kind, char, cubes, None if p == 1 else p, tol["rh_tol"])
        summary.update({"ok": rep.ok, "worst_ratio": rep.worst_ratio, "r_w": rep.r_w, "characteristic": char})
        asserts["sharp_reverse_holder"] = rep.ok
        return REFS["sharp-RH"], summary, asserts, rep.as_dict(), []
    if t == "Ap":
        est = nm.estimate_Ap(w, _exp(c["p"]), cubes)
        if a is not None and grid.n == 1:
            oracle = nm.oracle_Ap_power_1d(a, _f(c["p"]))[0] if _f(c["p"]) > 1 else nm.oracle_A1_power_1d(a)[0]
        elif a is None:
            oracle = nm.step_char_Ap(st["low"], st["high"], _f(c["p"]))
        else:
            oracle = None
    else:
        est = nm.estimate_RH(w, _f(c["s"]), cubes)
        oracle = nm.oracle_RH_power_1d(a, _f(c["s"]))[0] if a is not None and grid.n == 1 else None
    summary["estimate"] = est.value
    if oracle is not None:
        rel = abs(est.value - oracle) / oracle
        summary.update({"oracle": oracle, "rel_error": rel})
        asserts["within_tolerance"] = rel <= tol["char_rel"]
    return REFS["estimate"], summary, asserts, est.as_dict(), est.level_rows()


def _interp_solve(P: dict, tol: dict, rng) -> tuple:
    n = P.get("n", 1)
    solver = P["solver"]
    ws = [pw.PowerWeight(_f(a), n) for a in P["w"]]
    vs = [pw.PowerWeight(_f(a), n) for a in P["v"]]
    if solver == "stein-weiss":
        theta = _f(P.get("theta", Fraction(1, 2)))
        pe, we = ip.stein_weiss(_exp(P["p"][0]), ws[0], _exp(P["q"][0]), vs[0], theta)
        e0, e1 = _exp(P["p"][0]), _exp(P["q"][0])
        ok = pe.recip * we.a == (1 - theta) * e0.recip * ws[0].a + theta * e1.recip * vs[0].a
        detail = {"p": str(pe), "w": str(we.a), "theta": str(theta)}
        return REFS[solver], {"ok": ok, "p": str(pe), "w": str(we.a)}, {"identities": ok}, detail, []
    p = ExpVector.of([_exp(x) for x in P["p"]])
    q = ExpVector.of([_exp(x) for x in P["q"]])
    mode = P.get("tau_mode", "sharp")
    if solver == "int-Lp":
        r = RVector.of([_exp(x) for x in P.get("r", [1] * (p.m + 1))])
        sol = ip.solve_int_Lp(p, ws, q, vs, r, mode)
    else:
        sol = ip.solve_int_lim(p, ws, q, vs, [_exp(x) for x in P["pminus"]], [_exp(x) for x in P["pplus"]], mode)
    summary = {"ok": sol.ok, "theta": str(sol.theta), "k": sol.diagnostics.k,
               "s": ",".join(str(e) for e in sol.s.entries), "u": ",".join(str(u.a) for u in sol.u)}
    return REFS[solver], summary, dict(sol.checks), sol.as_dict(), []


def _curve_rows(grid: nm.Grid, values: np.ndarray, extra: dict[str, np.ndarray] | None = None) -> list[dict]:
    mesh = grid.mesh()
    cols = {f"x{i + 1}": mesh[i].ravel() for i in range(grid.n)}
    cols["value"] = values.ravel()
    for k, v in (extra or {}).items():
        cols[k] = v.ravel()
    keys = list(cols)
    return [{k: float(cols[k][j]) for k in keys} for j in range(values.size)]


def _op_apply(P: dict, tol: dict, rng) -> tuple:
    grid = _grid(P["grid"])
    T = _operator(grid, P["operator"])
    refs = list(REFS[P["operator"]["type"]])
    fs = [_function(grid, s, rng) for s in P["inputs"]]
    if len(fs) != T.m:
        raise DimensionError(f"operator takes {T.m} inputs, scenario gives {len(fs)}")
    summary: dict[str, Any] = {}
    asserts: dict[str, bool] = {}
    if "commutator" in P:
        b = _function(grid, P["commutator"]["symbol"], rng)
        T = op.Commutator(T, b, P["commutator"].get("slot", 1))
        refs += REFS["commutator"]
    g = T(*fs).values
    summary.update({"max_abs": float(np.max(np.abs(g))), "l2_norm": float(np.sqrt(np.sum(g**2) * grid.cell_volume))})
    extra = {}
    if "oracle" in P:
        lo, hi = P["oracle"].get("range", [1.25, 2.0])
        x = grid.mesh()[0]
        exact = op.fractional_oracle_indicator(x, P["operator"].get("alpha", 0.5))
        mask = (np.abs(x) >= lo) & (np.abs(x) <= hi)
        rel = float(np.max(np.abs(g[mask] - exact[mask]) / np.abs(exact[mask]))) if mask.any() else 0.0
        summary["max_rel_error"] = rel
        asserts["oracle_match"] = rel <= tol["oracle_rel"]
        extra["oracle"] = exact
    if P.get("zero_law"):
        base = P["commutator"]["symbol"] if "commutator" in P else {"type": "bump"}
        slot = P["commutator"].get("slot", 1) if "commutator" in P else 1
        T0 = _operator(grid, P["operator"])
        const = op.SampledFunction.constant(grid, 1.7)
        zero = float(np.max(np.abs(op.Commutator(T0, const, slot)(*fs).values)))
        b = _function(grid, base, rng)
        c1 = op.Commutator(T0, b, slot)(*fs).values
        c2 = op.Commutator(T0, b + const, slot)(*fs).values
        shift = float(np.max(np.abs(c1 - c2)))
        summary.update({"zero_law_max": zero, "shift_invariance_max": shift})
        asserts["zero_law"] = zero <= tol["zero_abs"]
        if T0.linear:
            asserts["shift_invariance"] = shift <= tol["zero_abs"]
        refs += REFS["commutator"] if "commutator" not in P else []
    return refs, summary, asserts, {"operator": P["operator"]["type"], "m": T.m}, _curve_rows(grid, g, extra)


def _fk_scan(P: dict, tol: dict, rng, jobs: int = 1) -> tuple:
    grid = _grid(P["grid"])
    T = _operator(grid, P["operator"])
    refs = list(REFS["fk-scan"]) + REFS[P["operator"]["type"]]
    p = float(_f(P["p"]))
    fam_spec = P["family"]
    seed = int(rng.integers(0, 2**31))
    family = cp.stress_family(grid, fam_spec["kind"], fam_spec.get("count", 64), p, T.m, seed,
                              [pw.PowerWeight(_f(P["weight"]), grid.n)] * T.m if "weight" in P else None)
    w = pw.PowerWeight(_f(P["weight"]), grid.n) if "weight" in P else None
    hs = [k * grid.h for k in P.get("h_cells", [1, 2, 4, 8])]
    rs = [k * grid.h for k in P.get("r_cells", [])]
    A = P.get("A_grid", [grid.L * k / 8 for k in range(8)])
    p0 = float(_f(P["p0"])) if "p0" in P else None
    if p0:
        refs += REFS["fk3"]
    summary: dict[str, Any] = {}
    asserts: dict[str, bool] = {}
    detail: dict[str, Any] = {}
    if "series" in P:
        refs += REFS["series"]
        if "commutator" not in P:
            raise DomainError("the series demonstration needs a commutator symbol")
        b = _function(grid, P["commutator"]["symbol"], rng)
        ratio = P["series"].get("ratio", 0.5)
        ops = [op.ScaledOperator(T, ratio**j) for j in range(1, P["series"]["terms"] + 1)]
        srep = cp.series_compactness_demo(ops, b, family, w, p, A, hs, P["commutator"].get("slot", 1))
        rep = srep.reports[-1]
        summary["series_max_ratio"] = srep.max_ratio
        detail["series"] = srep.as_dict()
    else:
        if "commutator" in P:
            T = op.Commutator(T, _function(grid, P["commutator"]["symbol"], rng), P["commutator"].get("slot", 1))
            refs += REFS["commutator"]
        rep = cp.fk_scan(T, family, w, p, A, hs, rs, p0, jobs)
    tail_ok = cp.is_nonincreasing(rep.tail_curve)
    nonneg = all(v >= 0 for c in (rep.tail_curve, rep.translation_curve, rep.averaging_curve, rep.fk3_curve) for _, v in c)
    summary.update({
        "uniform_bound": rep.uniform_bound,
        "tail_nonincreasing": tail_ok,
        "translation_monotone": cp.is_nondecreasing(rep.translation_curve),
        "tail_last": rep.tail_curve[-1][1] if rep.tail_curve else 0.0,
        "translation_first": rep.translation_curve[0][1] if rep.translation_curve else 0.0,
    })
    asserts.update({"tail_nonincreasing": tail_ok, "nonnegative": nonneg})
    detail["report"] = rep.as_dict()
    return refs, summary, asserts, detail, rep.curve_rows()


def _counterexample(P: dict, tol: dict, rng) -> tuple:
    which = P["which"]
    refs = list(REFS[which])
    asserts: dict[str, bool] = {}
    if which in ("fk-a3", "fk-power"):
        kw = {"levels": tuple(P.get("levels", range(6, 13))), "h": P.get("h", 0.1)}
        if which == "fk-a3":
            rep = cp.counterexample_a3(**kw)
        else:
            rep = cp.counterexample_a3_power(P.get("p0", 2.0), float(_f(P.get("p", 3.0))), P.get("alpha", 0.5), **kw)
        summary = {"criterion_met": rep.criterion_met, "consecutive_doublings": rep.consecutive_doublings,
                   "fitted_rate": rep.fitted_rate, "theory_rate": rep.theory_rate,
                   "control_bounded": rep.control_bounded, "control_spread": rep.control_spread,
                   "growing": all(f > 1 for f in rep.factors)}
        asserts["control_bounded"] = rep.control_bounded
        rows = [{"level": lv, "cells": 2**lv, "value": v, "control": c}
                for lv, v, c in zip(rep.levels, rep.values, rep.control_values)]
        return refs, summary, asserts, rep.as_dict(), rows
    if which == "translation-dominated":
        n = P.get("n", 1)
        rep = cp.translation_dominated_check(pw.PowerWeight(_f(P.get("weight", "1/2")), n), P.get("delta", 0.2),
                                             tuple(P.get("levels", range(6, 13))))
        rows = [{"index": i, "ratio": r} for i, r in enumerate(rep.sequence)]
        return refs, {"ratio": rep.ratio, "bounded": rep.bounded}, asserts, rep.as_dict(), rows
    p = ExpVector.of([_exp(x) for x in P["p"]])
    r, s = RVector.of([_exp(x) for x in P["r"]]), RVector.of([_exp(x) for x in P["s"]])
    n = P.get("n", 1)
    ws = pw.apw_counterexample(p, r, s, n)
    in_r, in_s = pw.in_Apr(ws, p, r).in_class, pw.in_Apr(ws, p, s).in_class
    asserts["witness_verified"] = in_r and not in_s
    detail = {"weights": [str(w.a) for w in ws], "case": pw.apw_case(p, r)}
    return refs, {"in_r_class": in_r, "in_s_class": in_s}, asserts, detail, []


def _log_convexity(P: dict, tol: dict, rng) -> tuple:
    N, K = P.get("instances", 100), P.get("thetas", 99)
    thetas = [k / (K + 1) for k in range(1, K + 1)]
    worst, bad = 0.0, 0
    for _ in range(N):
        c, e1, e2 = ip.random_diagonal_instance(rng, P.get("max_m", 3), P.get("max_K", 12))
        rep = ip.verify_log_convexity(c, e1, e2, thetas, tol["logconv_rtol"])
        worst = max(worst, rep.worst_ratio)
        bad += not rep.ok
    summary = {"instances": N, "violations": bad, "worst_ratio": worst}
    return REFS["log-convexity"], summary, {"no_violations": bad == 0}, {"thetas": K}, []


RUNNERS = {
    "weight-check": _weight_check, "char-estimate": _char_estimate, "interp-solve": _interp_solve,
    "op-apply": _op_apply, "fk-scan": _fk_scan, "counterexample": _counterexample, "log-convexity": _log_convexity,
}


def _check_expect(expect: dict, summary: dict) -> dict[str, bool]:
    out = {}
    for k, want in expect.items():
        got = summary.get(k)
        if isinstance(want, bool):
            out[f"expect:{k}"] = got is not None and bool(got) == want
        else:
            out[f"expect:{k}"] = isinstance(got, (int, float)) and not isinstance(got, bool) and got <= want
    return out


def execute(scenario: dict, seed: int | None, profile: str) -> tuple[dict, list[dict]]:
    """Run one validated scenario; never raises for numeric failures, which land in the report."""
    use_seed = scenario.get("seed", 0) if seed is None else seed
    rng = np.random.default_rng(use_seed)
    report: dict[str, Any] = {"name": scenario["name"], "kind": scenario["kind"], "seed": use_seed,
                              "tolerance_profile": profile}
    try:
        refs, summary, asserts, detail, rows = RUNNERS[scenario["kind"]](scenario["parameters"], PROFILES[profile], rng)
    except (DomainError, DimensionError, nm.GridMismatch, ValueError, ArithmeticError, ip.AAAFailure) as e:
        report.update({"passed": False, "numeric_failure": True, "paper_refs": [],
                       "error": {"type": type(e).__name__, "message": str(e)}})
        return _jsonable(report), []
    asserts = {**asserts, **_check_expect(scenario.get("expect", {}), summary)}
    report.update({"paper_refs": sorted(set(refs)), "summary": summary, "assertions": asserts,
                   "passed": all(asserts.values()), "numeric_failure": False, "detail": detail})
    return _jsonable(report), rows


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        wr = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        wr.writeheader()
        for row in rows:
            wr.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def _write(out_dir: Path, scenario: dict, report: dict, rows: list[dict]) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    outs = scenario.get("outputs", {})
    rp = out_dir / outs.get("report", f"{scenario['name']}.json")
    rp.parent.mkdir(parents=True, exist_ok=True)
    rp.write_text(dumps(report))
    written = [rp]
    if rows:
        cpth = out_dir / outs.get("curves", f"{scenario['name']}.csv")
        cpth.parent.mkdir(parents=True, exist_ok=True)
        cpth.write_text(to_csv(rows))
        written.append(cpth)
    return written


def _run_all(scenarios: list[dict], seed: int | None, profile: str, jobs: int) -> list[tuple[dict, list[dict]]]:
    if jobs > 1 and len(scenarios) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            futs = [ex.submit(execute, s, seed, profile) for s in scenarios]
            return [f.result() for f in futs]
    return [execute(s, seed, profile) for s in scenarios]


def _status(report: dict) -> str:
    if report.get("numeric_failure"):
        return "error"
    return "pass" if report["passed"] else "fail"


def cmd_run(args: argparse.Namespace) -> int:
    try:
        scenarios = load_scenarios(Path(args.file))
    except ScenarioError as e:
        print(f"schema error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except OSError as e:
        print(f"cannot read scenario file: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    out_dir = Path(args.out_dir)
    results = _run_all(scenarios, args.seed, args.tolerance_profile, args.jobs)
    code = EXIT_OK
    for sc, (report, rows) in zip(scenarios, results):
        _write(out_dir, sc, report, rows)
        status = _status(report)
        print(f"{sc['name']}: {status}")
        if status == "error":
            print(json.dumps(report["error"], sort_keys=True), file=sys.stderr)
            code = max(code, EXIT_NUMERIC)
        elif status == "fail":
            code = max(code, EXIT_FAILED)
    return code


def cmd_suite(args: argparse.Namespace) -> int:
    directory = Path(args.dir)
    if not directory.is_dir():
        print(f"not a directory: {directory}", file=sys.stderr)
        return EXIT_SCHEMA
    out_dir = Path(args.out_dir)
    rows: list[dict] = []
    todo: list[tuple[str, dict]] = []
    for path in sorted(directory.glob("*.json")):
        try:
            for sc in load_scenarios(path):
                todo.append((path.name, sc))
        except (ScenarioError, OSError) as e:
            rows.append({"file": path.name, "name": path.stem, "kind": "", "status": "invalid", "detail": str(e)})
    results = _run_all([sc for _, sc in todo], args.seed, args.tolerance_profile, args.jobs)
    for (fname, sc), (report, crv) in zip(todo, results):
        _write(out_dir, sc, report, crv)
        status = _status(report)
        detail = report["error"]["message"] if status == "error" else ",".join(
            k for k, v in sorted(report.get("assertions", {}).items()) if not v)
        rows.append({"file": fname, "name": sc["name"], "kind": sc["kind"], "status": status, "detail": detail})
    rows.sort(key=lambda r: (r["file"], r["name"]))
    out_dir.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    wr = csv.DictWriter(buf, fieldnames=["file", "name", "kind", "status", "detail"], lineterminator="\n")
    wr.writeheader()
    wr.writerows(rows)
    (out_dir / "summary.csv").write_text(buf.getvalue())
    for r in rows:
        print(f"{r['file']}:{r['name']}: {r['status']}" + (f" ({r['detail']})" if r["detail"] else ""))
    passed = sum(r["status"] == "pass" for r in rows)
    print(f"{passed}/{len(rows)} scenarios passed")
    return EXIT_OK if passed == len(rows) else EXIT_FAILED


def cmd_schema(args: argparse.Namespace) -> int:
    print(json.dumps({"scenario": SCENARIO_SCHEMA, "formats": FORMATS}, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override every scenario seed")
    common.add_argument("--out-dir", default=os.environ.get(OUT_ENV, DEFAULT_OUT),
                        help=f"output directory (default: ${OUT_ENV} or ./{DEFAULT_OUT})")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for independent scenarios")
    common.add_argument("--tolerance-profile", choices=sorted(PROFILES), default="default")
    parser = argparse.ArgumentParser(prog="mlweights", description="Multilinear weight calculus scenario runner.")
    sub = parser.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="run the scenarios of one file")
    r.add_argument("file")
    r.set_defaults(func=cmd_run)
    s = sub.add_parser("suite", parents=[common], help="run every *.json scenario file of a directory")
    s.add_argument("dir")
    s.set_defaults(func=cmd_suite)
    sc = sub.add_parser("schema", help="print the scenario schema and output formats")
    sc.set_defaults(func=cmd_schema)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        print("--jobs must be at least 1", file=sys.stderr)
        return EXIT_SCHEMA
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
