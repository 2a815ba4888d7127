"""JSON encoding of hosts, profiles, edge sets, reports and bundles.

Rationals are written as integers when integral and as ``{"num": p, "den": q}``
otherwise; infinity is the string ``"inf"``.  Output is deterministic (sorted
keys, fixed separators).
"""

from __future__ import annotations

import dataclasses
import json
import math
from fractions import Fraction
from typing import Any

import numpy as np

from gncg.errors import GNCGError, InvalidHostError, ParseError
from gncg.game import StrategyProfile
from gncg.hostgraph import KINDS, HostGraph, as_weight, build_general, build_one_two, from_points, from_tree
from gncg.optima import EdgeSet


def weight_to_json(x) -> Any:
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else {"num": x.numerator, "den": x.denominator}
    if isinstance(x, (float, np.floating)):
        if math.isinf(x):
            return "inf"
        return float(x)
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return int(x)
    raise TypeError(f"not a weight: {x!r}")


def weight_from_json(x, field: str = "weight"):
    try:
        return as_weight(x)
    except (TypeError, ValueError, KeyError, ZeroDivisionError) as exc:
        raise ParseError(f"bad weight {x!r}: {exc}", field) from None


def to_jsonable(obj) -> Any:
    """Recursively convert library objects into JSON-compatible values."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (Fraction, float, int, np.integer, np.floating)):
        return weight_to_json(obj)
    if isinstance(obj, HostGraph):
        return host_to_json(obj)
    if isinstance(obj, StrategyProfile):
        return obj.to_lists()
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {_key(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (frozenset, set)):
        return [to_jsonable(x) for x in sorted(obj)]
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_jsonable(x) for x in obj]
    raise TypeError(f"cannot encode {type(obj).__name__}")


def _key(k) -> str:
    if isinstance(k, tuple):
        return ",".join(str(x) for x in k)
    return str(k)


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2)


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None


# -- hosts --------------------------------------------------------------------

_KIND_OUT = {"one-two": "one_two"}
_KIND_IN = {"one_two": "one-two"}


def host_to_json(host: HostGraph) -> dict:
    doc: dict[str, Any] = {"n": host.n, "kind": _KIND_OUT.get(host.kind, host.kind)}
    if host.kind == "tree" and host.tree_edges is not None:
        doc["tree"] = {"edges": [[u, v, weight_to_json(w)] for u, v, w in host.tree_edges]}
    elif host.kind == "points" and host.points is not None:
        doc["points"] = {
            "p": weight_to_json(host.points.p),
            "coords": [[weight_to_json(x) for x in pt] for pt in host.points.coords],
        }
    else:
        doc["weights"] = [[weight_to_json(w) for w in row] for row in host.weights]
    if not host.exact:
        doc["eps"] = host.eps
    return doc


def host_from_json(doc: dict) -> HostGraph:
    """Rebuild (and revalidate) a host from its JSON form."""
    if not isinstance(doc, dict):
        raise ParseError("instance must be a JSON object", "instance")
    kind = doc.get("kind", "general")
    kind = _KIND_IN.get(kind, kind)
    if kind not in KINDS:
        raise ParseError(f"unknown host kind {kind!r}", "kind")
    try:
        if kind == "tree":
            tree = doc.get("tree")
            if not isinstance(tree, dict) or "edges" not in tree or "n" not in doc:
                raise ParseError("tree host needs n and tree.edges", "tree")
            edges = [(int(e[0]), int(e[1]), weight_from_json(e[2], f"tree.edges[{i}]")) for i, e in enumerate(tree["edges"])]
            return from_tree(int(doc["n"]), edges)
        if kind == "points":
            pts = doc.get("points")
            if not isinstance(pts, dict) or "coords" not in pts:
                raise ParseError("points host needs points.coords", "points")
            coords = [[weight_from_json(x, f"points.coords[{i}]") for x in pt] for i, pt in enumerate(pts["coords"])]
            p = weight_from_json(pts.get("p", 1), "points.p")
            return from_points(coords, p=p, eps=float(doc.get("eps", 1e-9)))
        if "weights" not in doc:
            raise ParseError("host needs a weights matrix", "weights")
        rows = doc["weights"]
        n = doc.get("n")
        weights = [[weight_from_json(x, f"weights[{i}][{j}]") for j, x in enumerate(row)] for i, row in enumerate(rows)]
        if kind == "one-two":
            return build_one_two(weights, n)
        host = build_general(weights, n)
        if kind == "metric":
            return dataclasses.replace(host, kind="metric")
        return host
    except InvalidHostError:
        raise
    except (TypeError, KeyError, IndexError) as exc:
        raise ParseError(f"malformed instance: {exc}", "instance") from None


# -- profiles and edge sets ---------------------------------------------------


def profile_to_json(profile: StrategyProfile) -> list[list[int]]:
    return profile.to_lists()


def profile_from_json(doc, n: int | None = None) -> StrategyProfile:
    """Accepts a list of target lists, or ``{"owned": [[owner, target], ...]}``."""
    try:
        if isinstance(doc, dict):
            if "strategies" in doc:
                doc = doc["strategies"]
            else:
                if n is None:
                    n = int(doc["n"])
                return StrategyProfile.from_owned(n, [(int(a), int(b)) for a, b in doc["owned"]])
        return StrategyProfile.from_lists(doc)
    except (TypeError, KeyError, ValueError) as exc:
        raise ParseError(f"malformed profile: {exc}", "profile") from None


def edge_set_to_json(es: EdgeSet) -> dict:
    return to_jsonable(es.to_dict())


def edge_set_from_json(doc: dict) -> EdgeSet:
    try:
        return EdgeSet(
            tuple(tuple(int(x) for x in e) for e in doc["edges"]),
            weight_from_json(doc["total_weight"], "total_weight"),
            weight_from_json(doc["social_cost"], "social_cost"),
            weight_from_json(doc["alpha"], "alpha"),
        )
    except (TypeError, KeyError) as exc:
        raise ParseError(f"malformed edge set: {exc}", "edge_set") from None


def bundle_to_json(bundle) -> dict:
    return {
        "name": bundle.name,
        "params": to_jsonable(bundle.params),
        "instance": host_to_json(bundle.host),
        "profiles": {k: v.to_lists() for k, v in bundle.profiles.items()},
        "predictions": {k: {"value": weight_to_json(p.value), "formula": p.formula} for k, p in bundle.predictions.items()},
        "agent": bundle.agent,
        "extra": to_jsonable(bundle.extra),
    }


def error_to_json(exc: BaseException) -> dict:
    doc: dict[str, Any] = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("field", "line", "pair", "size", "cap"):
        if isinstance(exc, GNCGError) and getattr(exc, attr, None) is not None:
            doc[attr] = to_jsonable(getattr(exc, attr))
    return doc
