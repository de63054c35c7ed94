"""JSON formats for every exchangeable value, plus canonical output.

Formats (``inf`` is encoded as ``null``):

* FiniteSpace: ``{"points": [...], "metric": {"kind": "explicit", "rows":
  [[...]]} | {"kind": "graph", "edges": [[a, b, w]]}, "basepoint": id,
  "window_radius": number}``.  Graph metrics are closed by all-pairs
  shortest paths, with ``inf`` between components.
* Family: ``{"members": [[ids]]}``.
* Action: ``{"generators": {"s": [image list aligned with points]},
  "inverses": {"s": "s_inv"}}``.
* PartitionOfUnity: ``{"vertices": [ids], "rows": {"<point>": [[vertex,
  weight]]}}`` with row keys the JSON rendering of the point id.
* BandOperator: ``{"entries": [[x, y, re, im]]}``.

Canonical dumps sort keys and render floats with ``%.9g`` so identical
values always serialize to identical bytes.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from ._shortest import closure
from .action import GroupAction
from .errors import ParameterError
from .lscore import INF, FiniteSpace, Family
from .propa import PartitionOfUnity
from .roeops import BandOperator


def _num(x):
    return None if math.isinf(x) else (int(x) if float(x).is_integer() else float(x))


def _undo(x):
    return INF if x is None else float(x)


# -- spaces -----------------------------------------------------------------


def space_to_json(s: FiniteSpace) -> dict:
    rows = [[_num(v) for v in row] for row in np.asarray(s.dmat)]
    return {
        "points": list(s.points),
        "metric": {"kind": "explicit", "rows": rows},
        "basepoint": s.basepoint,
        "window_radius": _num(s.window_radius),
    }


def space_from_json(obj: dict, validate: bool = False) -> FiniteSpace:
    obj = _unwrap(obj)
    try:
        points = [_id(p) for p in obj["points"]]
        metric = obj["metric"]
        basepoint = _id(obj["basepoint"])
        wr = obj["window_radius"]
    except KeyError as exc:
        raise ParameterError(f"space JSON missing field {exc.args[0]!r}") from None
    if metric.get("kind") == "explicit":
        rows = np.array([[_undo(v) for v in row] for row in metric["rows"]])
    elif metric.get("kind") == "graph":
        n = len(points)
        index = {p: i for i, p in enumerate(points)}
        w = np.full((n, n), INF)
        np.fill_diagonal(w, 0.0)
        for a, b, weight in metric["edges"]:
            i, j = index[_id(a)], index[_id(b)]
            w[i, j] = w[j, i] = min(w[i, j], float(weight))
        rows = closure(w)
    else:
        raise ParameterError(f"unknown metric kind {metric.get('kind')!r}")
    return FiniteSpace(points, rows, basepoint, float(wr), validate=validate)


def _id(p):
    # JSON has no int/str union key trouble for plain values; accept both
    return p


# -- families ----------------------------------------------------------------


def family_to_json(f: Family) -> dict:
    return {"members": [sorted(m, key=lambda p: (type(p).__name__, p)) for m in f.members]}


def family_from_json(obj: dict) -> Family:
    obj = _unwrap(obj)
    return Family.of([[_id(p) for p in m] for m in obj["members"]])


# -- actions -----------------------------------------------------------------


def action_to_json(a: GroupAction) -> dict:
    gens = {}
    for sym, perm in a.perms.items():
        gens[sym] = [a.space.points[i] for i in perm]
    return {"generators": gens, "inverses": dict(a.inverses)}


def action_from_json(obj: dict, space: FiniteSpace) -> GroupAction:
    obj = _unwrap(obj)
    try:
        gens = obj["generators"]
    except KeyError:
        raise ParameterError("action JSON missing field 'generators'") from None
    tables = {sym: [_id(p) for p in images] for sym, images in gens.items()}
    return GroupAction(space, tables, obj.get("inverses"))


# -- partitions ----------------------------------------------------------------


def partition_to_json(phi: PartitionOfUnity) -> dict:
    rows = {}
    for i, p in enumerate(phi.space.points):
        nz = np.flatnonzero(phi.weights[i])
        rows[json.dumps(p)] = [[phi.vertices[j], float(phi.weights[i, j])] for j in nz]
    return {"vertices": list(phi.vertices), "rows": rows}


def partition_from_json(obj: dict, space: FiniteSpace) -> PartitionOfUnity:
    obj = _unwrap(obj)
    vertices = [_id(v) for v in obj["vertices"]]
    vindex = {v: j for j, v in enumerate(vertices)}
    w = np.zeros((len(space.points), len(vertices)))
    for key, entries in obj["rows"].items():
        p = json.loads(key)
        i = space.index[p]
        for v, weight in entries:
            w[i, vindex[_id(v)]] = float(weight)
    return PartitionOfUnity(space, vertices, w)


# -- operators ----------------------------------------------------------------


def operator_to_json(t: BandOperator) -> dict:
    rows, cols = t.mat.nonzero()
    vals = np.asarray(t.mat[rows, cols]).ravel()
    pts = t.space.points
    entries = [
        [pts[i], pts[j], float(v.real), float(v.imag)]
        for i, j, v in zip(rows, cols, vals)
    ]
    entries.sort(key=lambda e: (repr(e[0]), repr(e[1])))
    return {"entries": entries}


def operator_from_json(obj: dict, space: FiniteSpace) -> BandOperator:
    obj = _unwrap(obj)
    entries = [(_id(x), _id(y), complex(re, im)) for x, y, re, im in obj["entries"]]
    return BandOperator.from_entries(space, entries)


def _unwrap(obj: dict) -> dict:
    # reports wrap their payload under "value"; accept both forms
    if isinstance(obj, dict) and "value" in obj and "manifest" in obj:
        return obj["value"]
    return obj


# -- canonical output ----------------------------------------------------------


def canonical_dumps(obj: Any) -> str:
    """Deterministic JSON: sorted keys, floats rendered with %.9g, inf as
    null.  Byte-identical output for equal values."""
    out = []
    _emit(obj, out)
    return "".join(out)


def _emit(obj, out):
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isinf(f) or math.isnan(f):
            out.append("null")
        elif f == int(f) and abs(f) < 1e15:
            out.append(str(int(f)))
        else:
            out.append("%.9g" % f)
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for k, item in enumerate(obj):
            if k:
                out.append(",")
            _emit(item, out)
        out.append("]")
    elif isinstance(obj, dict):
        out.append("{")
        keys = sorted(obj, key=lambda k: (isinstance(k, str), repr(k)))
        for k, key in enumerate(keys):
            if k:
                out.append(",")
            out.append(json.dumps(key if isinstance(key, str) else str(key)))
            out.append(":")
            _emit(obj[key], out)
        out.append("}")
    elif isinstance(obj, (frozenset, set)):
        _emit(sorted(obj, key=repr), out)
    else:
        raise ParameterError(f"cannot serialize {type(obj).__name__}")
