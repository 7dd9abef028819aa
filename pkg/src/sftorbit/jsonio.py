"""JSON formats for matrices, points, functions, maps and certificates.

Words are written as label arrays; table keys concatenate labels when every
label is a single character and join them with spaces otherwise.
"""
from __future__ import annotations

import json
from pathlib import Path

from .cocycle import LocFun
from .orbitmap import OrbitMapData, PrefixRuleMap, Rule, SlidingBlockCode
from .sft import EpPoint, Sft, TransitionMatrix, validate_sft


class InputError(ValueError):
    """Malformed or inconsistent JSON input."""


def _expect(obj, keys, where, optional=()):
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected an object")
    unknown = set(obj) - set(keys) - set(optional)
    if unknown:
        raise InputError(f"{where}: unknown fields {sorted(unknown)}")
    missing = [k for k in keys if k not in obj]
    if missing:
        raise InputError(f"{where}: missing fields {missing}")


def load_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2)


# matrices ------------------------------------------------------------------

def matrix_to_json(s) -> dict:
    if isinstance(s, Sft):
        return {"labels": list(s.labels), "rows": s.matrix.tolist()}
    return {"rows": s.tolist()}


def matrix_from_json(obj) -> TransitionMatrix:
    _expect(obj, ["rows"], "matrix", optional=["labels", "name"])
    try:
        return TransitionMatrix(tuple(tuple(r) for r in obj["rows"]))
    except (TypeError, ValueError) as exc:
        raise InputError(f"matrix: {exc}") from exc


def sft_from_json(obj) -> Sft:
    """Validated shift space; validation errors propagate as :class:`~sftorbit.sft.SftError`."""
    m = matrix_from_json(obj)
    return validate_sft(m, obj.get("labels"))


# words and points -----------------------------------------------------------

def word_to_json(s: Sft, w) -> list:
    return s.decode(w)


def word_from_json(s: Sft, obj) -> tuple:
    if not isinstance(obj, list):
        raise InputError("word: expected an array of labels")
    w = s.encode(obj)
    if not s.is_admissible(w):
        raise InputError(f"word {obj} is not admissible")
    return w


def point_to_json(s: Sft, x: EpPoint) -> dict:
    return {"transient": s.decode(x.transient), "cycle": s.decode(x.cycle)}


def point_from_json(s: Sft, obj) -> EpPoint:
    _expect(obj, ["transient", "cycle"], "point")
    return s.point(obj["transient"], obj["cycle"])


# functions ------------------------------------------------------------------

def locfun_to_json(f: LocFun) -> dict:
    return {"depth": f.depth, "table": {f.sft.spell(w): v for w, v in f.table.items()}}


def locfun_from_json(s: Sft, obj) -> LocFun:
    _expect(obj, ["depth", "table"], "function")
    depth = obj["depth"]
    if not isinstance(depth, int) or depth < 0:
        raise InputError("function: depth must be a nonnegative integer")
    table = {}
    for key, v in obj["table"].items():
        w = s.parse_word(key)
        if len(w) != depth:
            raise InputError(f"function: key {key!r} has length {len(w)}, expected {depth}")
        if not isinstance(v, int):
            raise InputError(f"function: value for {key!r} is not an integer")
        table[w] = v
    try:
        return LocFun(s, depth, table)
    except ValueError as exc:
        raise InputError(f"function: {exc}") from exc


# codes and maps -------------------------------------------------------------

def code_to_json(c: SlidingBlockCode) -> dict:
    return {
        "window": c.window,
        "map": {c.source.spell(w): c.target.labels[v] for w, v in c.table.items()},
    }


def code_from_json(source: Sft, target: Sft, obj) -> SlidingBlockCode:
    _expect(obj, ["window", "map"], "code")
    table = {}
    for key, v in obj["map"].items():
        w = source.parse_word(key)
        if len(w) != obj["window"]:
            raise InputError(f"code: key {key!r} does not have window length {obj['window']}")
        table[w] = target.index(v)
    return SlidingBlockCode(source, target, obj["window"], table)


def map_to_json(h: PrefixRuleMap, with_spaces: bool = True) -> dict:
    out = {}
    if with_spaces:
        out["source"] = matrix_to_json(h.source)
        out["target"] = matrix_to_json(h.target)
    out["rules"] = [
        {"match": h.source.decode(r.match), "output": h.target.decode(r.output), "offset": r.offset}
        for r in h.rules
    ]
    out["code"] = code_to_json(h.code)
    return out


def map_from_json(obj, source: Sft | None = None, target: Sft | None = None) -> PrefixRuleMap:
    _expect(obj, ["rules", "code"], "map", optional=["source", "target", "name"])
    if source is None:
        if "source" not in obj:
            raise InputError("map: source space missing")
        source = sft_from_json(obj["source"])
    if target is None:
        if "target" not in obj:
            raise InputError("map: target space missing")
        target = sft_from_json(obj["target"])
    rules = []
    for i, r in enumerate(obj["rules"]):
        _expect(r, ["match", "output", "offset"], f"rule {i}")
        rules.append(Rule(source.encode(r["match"]), target.encode(r["output"]), int(r["offset"])))
    code = code_from_json(source, target, obj["code"])
    return PrefixRuleMap(source, target, tuple(rules), code).validate()


def orbit_data_to_json(d: OrbitMapData, b: LocFun | None = None) -> dict:
    out = {"map": map_to_json(d.map), "k": locfun_to_json(d.k), "l": locfun_to_json(d.l)}
    if b is not None:
        out["b"] = locfun_to_json(b)
    return out


def orbit_data_from_json(obj):
    """Return ``(data, b)`` where ``b`` is ``None`` unless the bundle carries one."""
    _expect(obj, ["map", "k", "l"], "bundle", optional=["b", "name"])
    h = map_from_json(obj["map"])
    k = locfun_from_json(h.source, obj["k"])
    l = locfun_from_json(h.source, obj["l"])
    b = locfun_from_json(h.source, obj["b"]) if "b" in obj else None
    try:
        return OrbitMapData(h, k, l), b
    except ValueError as exc:
        raise InputError(f"bundle: {exc}") from exc


def certificate_to_json(cert, two_sided=None, failures=()) -> dict:
    out = {
        "forward": orbit_data_to_json(cert.forward, cert.b1),
        "backward": orbit_data_to_json(cert.backward, cert.b2),
        "verdict": {
            "scoe": True,
            "N_h": cert.n_h,
            "N_h_normalized": cert.n_h_normalized,
            "lag": two_sided.lag if two_sided is not None else None,
            "failures": list(failures),
        },
    }
    if two_sided is not None:
        out["two_sided"] = {
            "forward_code": code_to_json(two_sided.forward),
            "backward_code": code_to_json(two_sided.backward),
            "lag": two_sided.lag,
        }
    return out
