"""JSON instance files and CSV trace files.

Instance file
-------------
::

    {
      "space": {"n1": 1},
      "mappings": {
        "b": [{"kind": "box", "lo": [0], "hi": [1]}],
        "f": [{"kind": "box", "lo": [2], "hi": [3], "odd": false}]
      },
      "operators": {"a": [{"rows": 1, "cols": 1, "data": [2]}]},
      "certified_solution": [1],
      "certified_empty": false
    }

Mapping kinds and their parameters:

===================  ========================================================
``zero``             ``dim`` (optional, inferred from position)
``box``              ``lo``, ``hi`` (finite)
``ball``             ``center``, ``radius``
``halfspace``        ``a``, ``b``  (set ``<a, v> <= b``)
``affine``           ``E`` (matrix object), ``d``  (set ``E v = d``)
``l1``               ``weight``, ``dim`` (optional)
``affine_monotone``  ``G`` (matrix object), ``c``
``affine_vi``        ``G``, ``c``, ``set`` (a box/ball/halfspace/affine object)
===================  ========================================================

Each mapping may carry ``"odd": true`` where the catalog permits it. Matrix
objects are ``{"rows": m, "cols": n, "data": [row-major entries]}``.
Resolvent parameters are global solver settings; a per-mapping ``lambda``
is rejected. All tolerances are absolute in the units of the instance data.

Trace file
----------
CSV with header ``k,primal_residual,image_residual,step_norm[,x_0,...]``,
one row per recorded iterate, then a blank line and a summary block::

    # summary
    status,Converged
    reason,
    iterations_used,1
    final_point,1
"""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from .linops import LinearOp
from .mappings import (
    Affine,
    AffineMonotone,
    AffineVI,
    Ball,
    Box,
    Halfspace,
    NormalCone,
    SubdiffL1,
    Zero,
)
from .problems import ScnppInstance, ValidationError, validate

_KIND_ALIASES = {
    "zero": "zero",
    "box": "box",
    "normalconebox": "box",
    "ball": "ball",
    "normalconeball": "ball",
    "halfspace": "halfspace",
    "normalconehalfspace": "halfspace",
    "affine": "affine",
    "normalconeaffine": "affine",
    "l1": "l1",
    "subdiffl1": "l1",
    "affine_monotone": "affine_monotone",
    "affinemonotone": "affine_monotone",
    "affine_vi": "affine_vi",
    "affinevi": "affine_vi",
}

_SET_KINDS = ("box", "ball", "halfspace", "affine")


class InstanceFormatError(ValidationError):
    """Raised for unreadable or structurally wrong instance documents."""


def fmt(v):
    """Format a float with 17 significant digits (round-trip exact)."""
    return format(float(v), ".17g")


# ---------------------------------------------------------------------------
# parsing


class _Parser:
    def __init__(self):
        self.errors = []

    def err(self, where, msg):
        self.errors.append(f"{where}: {msg}")

    def vector(self, obj, where, dim=None):
        if obj is None:
            self.err(where, "missing")
            return None
        try:
            v = np.asarray(obj, dtype=float)
        except (TypeError, ValueError):
            self.err(where, "expected an array of numbers")
            return None
        if v.ndim == 0:
            v = v.reshape(1)
        if v.ndim != 1 or v.size == 0:
            self.err(where, "expected a non-empty flat array of numbers")
            return None
        if not np.all(np.isfinite(v)):
            self.err(where, "entries must be finite")
            return None
        if dim is not None and v.size != dim:
            self.err(where, f"expected {dim} entries, got {v.size}")
            return None
        return v

    def number(self, obj, where):
        if isinstance(obj, bool) or not isinstance(obj, (int, float)):
            self.err(where, f"expected a number, got {obj!r}")
            return None
        return float(obj)

    def matrix(self, obj, where):
        if isinstance(obj, list) and obj and all(isinstance(r, list) for r in obj):
            # nested row lists are accepted as a shorthand
            lens = {len(r) for r in obj}
            if len(lens) != 1:
                self.err(where, "rows of a nested matrix must have equal length")
                return None
            obj = {"rows": len(obj), "cols": lens.pop(), "data": [v for r in obj for v in r]}
        if not isinstance(obj, dict):
            self.err(where, "expected {rows, cols, data} or a list of rows")
            return None
        rows, cols = obj.get("rows"), obj.get("cols")
        if not (isinstance(rows, int) and isinstance(cols, int) and rows > 0 and cols > 0):
            self.err(where, "rows and cols must be positive integers")
            return None
        data = self.vector(obj.get("data"), f"{where}.data", rows * cols)
        if data is None:
            return None
        try:
            return LinearOp(data.reshape(rows, cols))
        except ValueError as exc:
            self.err(where, str(exc))
            return None

    def set_descriptor(self, obj, where):
        if not isinstance(obj, dict):
            self.err(where, "expected a set object")
            return None
        kind = _KIND_ALIASES.get(str(obj.get("kind", "")).lower())
        if kind not in _SET_KINDS:
            self.err(where, f"unknown set kind {obj.get('kind')!r}; expected one of {_SET_KINDS}")
            return None
        n_before = len(self.errors)
        if kind == "box":
            lo = self.vector(obj.get("lo"), f"{where}.lo")
            hi = self.vector(obj.get("hi"), f"{where}.hi")
            if len(self.errors) == n_before:
                return Box(lo, hi)
        elif kind == "ball":
            c = self.vector(obj.get("center"), f"{where}.center")
            r = self.number(obj.get("radius"), f"{where}.radius")
            if len(self.errors) == n_before:
                return Ball(c, r)
        elif kind == "halfspace":
            a = self.vector(obj.get("a"), f"{where}.a")
            b = self.number(obj.get("b"), f"{where}.b")
            if len(self.errors) == n_before:
                return Halfspace(a, b)
        else:
            E = self.matrix(obj.get("E"), f"{where}.E")
            d = self.vector(obj.get("d"), f"{where}.d")
            if len(self.errors) == n_before:
                return Affine(E, d)
        return None

    def mapping(self, obj, where, default_dim):
        if not isinstance(obj, dict):
            self.err(where, "expected a mapping object")
            return None
        for key in ("lambda", "lam"):
            if key in obj:
                self.err(where, "per-mapping lambda is not supported; set it once for the run")
        kind = _KIND_ALIASES.get(str(obj.get("kind", "")).lower())
        if kind is None:
            self.err(where, f"unknown mapping kind {obj.get('kind')!r}")
            return None
        odd = obj.get("odd", False)
        if not isinstance(odd, bool):
            self.err(f"{where}.odd", "expected true or false")
            odd = False
        n_before = len(self.errors)
        if kind in _SET_KINDS:
            s = self.set_descriptor(obj, where)
            return NormalCone(s, odd=odd) if s is not None else None
        if kind in ("zero", "l1"):
            dim = obj.get("dim", default_dim)
            if not (isinstance(dim, int) and dim > 0):
                self.err(f"{where}.dim", "dimension must be a positive integer")
                return None
            if kind == "zero":
                return Zero(dim, odd=odd)
            w = self.number(obj.get("weight", 1.0), f"{where}.weight")
            return SubdiffL1(dim, w, odd=odd) if w is not None else None
        G = self.matrix(obj.get("G"), f"{where}.G")
        c = self.vector(obj.get("c"), f"{where}.c")
        if kind == "affine_monotone":
            if len(self.errors) == n_before:
                return AffineMonotone(G, c, odd=odd)
            return None
        s = self.set_descriptor(obj.get("set"), f"{where}.set")
        if len(self.errors) == n_before:
            return AffineVI(G, c, s, odd=odd)
        return None


def instance_from_dict(doc, name=""):
    """Build an unvalidated :class:`ScnppInstance` from a parsed document."""
    p = _Parser()
    if not isinstance(doc, dict):
        raise InstanceFormatError(["document root must be an object"])
    n1 = doc.get("space", {}).get("n1") if isinstance(doc.get("space"), dict) else None
    if not (isinstance(n1, int) and n1 > 0):
        p.err("space.n1", "must be a positive integer")
        n1 = None
    maps = doc.get("mappings", {})
    if not isinstance(maps, dict):
        p.err("mappings", "expected an object with lists b and f")
        maps = {}
    ops_doc = doc.get("operators", {})
    if not isinstance(ops_doc, dict):
        p.err("operators", "expected an object with list a")
        ops_doc = {}
    a_list = ops_doc.get("a", [])
    if not isinstance(a_list, list):
        p.err("operators.a", "expected a list")
        a_list = []
    a_ops = [p.matrix(o, f"operators.a[{j}]") for j, o in enumerate(a_list)]
    b_list = maps.get("b", [])
    f_list = maps.get("f", [])
    for key, lst in (("b", b_list), ("f", f_list)):
        if not isinstance(lst, list):
            p.err(f"mappings.{key}", "expected a list")
    b_list = b_list if isinstance(b_list, list) else []
    f_list = f_list if isinstance(f_list, list) else []
    b_maps = [p.mapping(o, f"mappings.b[{i}]", n1) for i, o in enumerate(b_list)]
    f_maps = []
    for j, o in enumerate(f_list):
        dim = a_ops[j].rows if j < len(a_ops) and a_ops[j] is not None else None
        f_maps.append(p.mapping(o, f"mappings.f[{j}]", dim))
    sol = doc.get("certified_solution")
    if sol is not None:
        sol = p.vector(sol, "certified_solution")
    empty = doc.get("certified_empty")
    if empty is not None and not isinstance(empty, bool):
        p.err("certified_empty", "expected true or false")
        empty = None
    if p.errors:
        raise InstanceFormatError(p.errors)
    return ScnppInstance(
        n1=n1,
        b_maps=b_maps,
        f_maps=f_maps,
        a_ops=a_ops,
        certified_solution=sol,
        certified_empty=empty,
        name=name,
    )


def loads_instance(text, name="", params=None):
    """Parse and validate an instance from JSON text."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError([f"line {exc.lineno}, column {exc.colno}: {exc.msg}"]) from None
    inst = instance_from_dict(doc, name=name)
    return validate(inst) if params is None else validate(inst, params)


def load_instance(path, params=None):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return loads_instance(text, name=str(path), params=params)
    except InstanceFormatError as exc:
        raise InstanceFormatError([f"{path}: {m}" for m in exc.issues]) from None


# ---------------------------------------------------------------------------
# serialization


def _matrix_dict(op):
    return {"rows": op.rows, "cols": op.cols, "data": op.matrix.ravel().tolist()}


def _set_dict(s):
    if isinstance(s, Box):
        return {"kind": "box", "lo": s.lo.tolist(), "hi": s.hi.tolist()}
    if isinstance(s, Ball):
        return {"kind": "ball", "center": s.center.tolist(), "radius": s.radius}
    if isinstance(s, Halfspace):
        return {"kind": "halfspace", "a": s.a.tolist(), "b": s.b}
    if isinstance(s, Affine):
        return {"kind": "affine", "E": _matrix_dict(s.E), "d": s.d.tolist()}
    raise TypeError(f"cannot serialize set {type(s).__name__}")


def _mapping_dict(m):
    if isinstance(m, Zero):
        out = {"kind": "zero", "dim": m.dim}
    elif isinstance(m, NormalCone):
        out = _set_dict(m.set)
    elif isinstance(m, SubdiffL1):
        out = {"kind": "l1", "dim": m.dim, "weight": m.weight}
    elif isinstance(m, AffineMonotone):
        out = {"kind": "affine_monotone", "G": _matrix_dict(m.G), "c": m.c.tolist()}
    elif isinstance(m, AffineVI):
        out = {"kind": "affine_vi", "G": _matrix_dict(m.G), "c": m.c.tolist(), "set": _set_dict(m.set)}
    else:
        raise TypeError(f"cannot serialize mapping {m.kind}")
    if m.odd:
        out["odd"] = True
    return out


def instance_to_dict(inst):
    doc = {
        "space": {"n1": inst.n1},
        "mappings": {
            "b": [_mapping_dict(m) for m in inst.b_maps],
            "f": [_mapping_dict(m) for m in inst.f_maps],
        },
        "operators": {"a": [_matrix_dict(op) for op in inst.a_ops]},
    }
    if inst.certified_solution is not None:
        doc["certified_solution"] = inst.certified_solution.tolist()
    if inst.certified_empty is not None:
        doc["certified_empty"] = inst.certified_empty
    return doc


def dump_instance(inst, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(inst), fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# traces


def format_trace(trace, iterates=True):
    """Render a :class:`~scnpp.schemes.RunTrace` as trace-file text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    n = trace.final_point.size
    header = ["k", "primal_residual", "image_residual", "step_norm"]
    if iterates:
        header += [f"x_{i}" for i in range(n)]
    w.writerow(header)
    for (k, pr, ir, step), (k2, x) in zip(trace.history, trace.iterates):
        assert k == k2
        row = [str(k), fmt(pr), fmt(ir), fmt(step)]
        if iterates:
            row += [fmt(v) for v in x]
        w.writerow(row)
    buf.write("\n# summary\n")
    w.writerow(["status", trace.status])
    w.writerow(["reason", trace.reason])
    w.writerow(["iterations_used", str(trace.iterations_used)])
    w.writerow(["final_point"] + [fmt(v) for v in trace.final_point])
    return buf.getvalue()


def write_trace(trace, path, iterates=True):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_trace(trace, iterates=iterates))


def read_trace(path):
    """Parse a trace file into ``(header, rows, summary)``.

    ``rows`` is a float array with one row per recorded iterate; ``summary``
    maps ``status``, ``reason``, ``iterations_used`` and ``final_point``.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    body, _, tail = text.partition("\n# summary\n")
    reader = csv.reader(io.StringIO(body.strip("\n")))
    header = next(reader)
    rows = np.array([[float(v) for v in r] for r in reader if r], dtype=float).reshape(-1, len(header))
    summary = {}
    for r in csv.reader(io.StringIO(tail)):
        if not r:
            continue
        key, vals = r[0], r[1:]
        if key == "final_point":
            summary[key] = np.array([float(v) for v in vals])
        elif key == "iterations_used":
            summary[key] = int(vals[0])
        else:
            summary[key] = vals[0] if vals else ""
    return header, rows, summary


__all__ = [
    "InstanceFormatError",
    "instance_from_dict",
    "instance_to_dict",
    "loads_instance",
    "load_instance",
    "dump_instance",
    "format_trace",
    "write_trace",
    "read_trace",
    "fmt",
]
