"""JSON encodings for spaces, measures, functions, maps, presentations and liftings.

Numbers are JSON numbers or exact strings such as ``"3/4"``.
"""
from __future__ import annotations

import json
from pathlib import Path

from ._num import dump_number, parse_number
from .errors import FiberlibError
from .lifting import MeasureLifting, make_lifting
from .measure import AtomSpace, FunctionClass, Measure, PointMap, TotalFunction
from .modules import ModuleElement, ModulePresentation
from .norms import from_json as norm_from_json


class InputError(FiberlibError):
    """Malformed or inconsistent input document."""


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def write_json(obj, path=None):
    text = json.dumps(obj, indent=2)
    if path is None or str(path) == "-":
        print(text)
    else:
        Path(path).write_text(text + "\n")


def _require(obj, key, what):
    if not isinstance(obj, dict) or key not in obj:
        raise InputError(f"{what} needs a {key!r} field")
    return obj[key]


def space_from_json(obj) -> AtomSpace:
    return AtomSpace(tuple(_require(obj, "atoms", "space")))


def space_to_json(space: AtomSpace):
    return {"atoms": list(space.atoms)}


def measure_from_json(obj) -> Measure:
    mass = _require(obj, "mass", "measure")
    if not isinstance(mass, dict):
        raise InputError("measure mass must be an object")
    atoms = tuple(obj.get("atoms", mass.keys()))
    try:
        values = {a: parse_number(mass.get(a, 0)) for a in atoms}
        extra = set(mass) - set(atoms)
        if extra:
            raise InputError(f"mass given for unknown atoms {sorted(extra)}")
        return Measure(AtomSpace(atoms), values)
    except (ValueError, TypeError) as exc:
        raise InputError(f"bad measure: {exc}") from exc


def measure_to_json(m: Measure):
    return {"atoms": list(m.space.atoms), "mass": {a: dump_number(m.mass[a]) for a in m.space.atoms}}


def _values(obj):
    vals = _require(obj, "values", "function")
    try:
        return {a: parse_number(v) for a, v in vals.items()}
    except (ValueError, TypeError, AttributeError) as exc:
        raise InputError(f"bad function values: {exc}") from exc


def function_from_json(obj, m: Measure) -> FunctionClass:
    """Class of a function; values at null atoms are ignored."""
    vals = _values(obj)
    missing = [a for a in m.positive if a not in vals]
    if missing:
        raise InputError(f"function has no value at positive atoms {missing}")
    return FunctionClass({a: vals[a] for a in m.positive})


def function_to_json(f):
    return {"values": {a: dump_number(v) for a, v in f.values.items()}}


def total_function_from_json(obj, space: AtomSpace) -> TotalFunction:
    vals = _values(obj)
    missing = [a for a in space if a not in vals]
    if missing:
        raise InputError(f"total function has no value at {missing}")
    return TotalFunction({a: vals[a] for a in space})


def map_from_json(obj, source: AtomSpace, target: AtomSpace | None = None) -> PointMap:
    assign = _require(obj, "assign", "map")
    if target is None:
        atoms = obj.get("target")
        target = AtomSpace(tuple(atoms) if atoms else tuple(dict.fromkeys(assign.values())))
    try:
        return PointMap(source, target, dict(assign))
    except ValueError as exc:
        raise InputError(f"bad map: {exc}") from exc


def map_to_json(phi: PointMap):
    return {"assign": {a: phi(a) for a in phi.source}, "target": list(phi.target.atoms)}


def presentation_from_json(obj) -> ModulePresentation:
    m = measure_from_json(_require(obj, "measure", "presentation"))
    gens = _require(obj, "gens", "presentation")
    fibers = _require(obj, "fibers", "presentation")
    try:
        return ModulePresentation(m, int(gens), {a: norm_from_json(f) for a, f in fibers.items() if a in m.positive})
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError(f"bad presentation: {exc}") from exc


def presentation_to_json(M: ModulePresentation):
    return {"measure": measure_to_json(M.measure), "gens": M.gens,
            "fibers": {a: f.to_json() for a, f in M.fibers.items()}}


def element_from_json(obj, M: ModulePresentation) -> ModuleElement:
    coeffs = _require(obj, "coeffs", "element")
    if len(coeffs) != M.gens:
        raise InputError(f"element has {len(coeffs)} coefficients, module has {M.gens} generators")
    return ModuleElement(tuple(function_from_json(c, M.measure) for c in coeffs))


def element_to_json(v: ModuleElement):
    return {"coeffs": [function_to_json(c) for c in v.coeffs]}


def lifting_from_json(obj, m: Measure) -> MeasureLifting:
    try:
        return make_lifting(m, obj.get("reroute") if obj else None)
    except ValueError as exc:
        raise InputError(f"bad lifting: {exc}") from exc


def lifting_to_json(L: MeasureLifting):
    return {"reroute": dict(L.reroute)}


def lifted_to_json(values):
    return {"values": {a: [dump_number(t) for t in v] for a, v in values.items()}}


def params_from_json(obj):
    out = {"depth": 10, "resolution": 64, "tol": None}
    out.update({k: obj[k] for k in ("depth", "resolution", "tol") if k in obj})
    return out
