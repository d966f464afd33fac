"""JSON readers for the file formats (writers live on the types as ``to_record``)."""

from __future__ import annotations

import json
from typing import Any

from looproot.errors import InvalidPair, MalformedInput, RootNotInAmbient
from looproot.loop_classifier import AffineRoot, ClassifiedPair, CosetFamily
from looproot.root_core import GeneralizedCartanMatrix, Root, RootSystem, validate_gcm
from looproot.subsystems import Subsystem


def _reject_float(text: str) -> float:
    raise MalformedInput(f"floating-point literal {text!r} where an integer is required")


def _reject_constant(text: str) -> float:
    raise MalformedInput(f"non-finite literal {text!r}")


def loads(text: str) -> Any:
    """json.loads that refuses floating-point and non-finite literals."""
    try:
        return json.loads(text, parse_float=_reject_float, parse_constant=_reject_constant)
    except json.JSONDecodeError as err:
        raise MalformedInput(f"invalid JSON: {err}") from None


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _int(x: Any, what: str) -> int:
    if not isinstance(x, int) or isinstance(x, bool):
        raise MalformedInput(f"{what} must be an integer, got {x!r}")
    return x


def gcm_from_json(obj: Any) -> GeneralizedCartanMatrix:
    if not isinstance(obj, dict) or "matrix" not in obj:
        raise MalformedInput('GCM file must be an object with "labels" and "matrix"')
    matrix = obj["matrix"]
    if not isinstance(matrix, list) or not all(isinstance(r, list) for r in matrix):
        raise MalformedInput('"matrix" must be a list of rows')
    labels = obj.get("labels")
    if labels is not None and (
        not isinstance(labels, list) or not all(isinstance(x, str) for x in labels)
    ):
        raise MalformedInput('"labels" must be a list of strings')
    return validate_gcm(matrix, labels)


def root_from_coords(coords: Any, ambient: RootSystem) -> Root:
    if not isinstance(coords, list):
        raise MalformedInput(f"root must be a coordinate list, got {coords!r}")
    root = ambient.lookup(_int(c, "root coordinate") for c in coords)
    if root is None:
        raise RootNotInAmbient(f"{coords} is not a root of the ambient system")
    return root


def family_from_record(obj: Any, ambient: RootSystem) -> CosetFamily:
    if not isinstance(obj, dict) or not isinstance(obj.get("entries"), list):
        raise MalformedInput('family record must have an "entries" list')
    mapping: dict[Root, tuple[int, int]] = {}
    for e in obj["entries"]:
        if not isinstance(e, dict):
            raise MalformedInput(f"family entry must be an object, got {e!r}")
        root = root_from_coords(e.get("root"), ambient)
        if root in mapping:
            raise MalformedInput(f"duplicate entry for {e['root']}")
        modulus = _int(e.get("modulus"), "modulus")
        if modulus < 0:
            raise MalformedInput(f"modulus must be nonnegative, got {modulus}")
        mapping[root] = (_int(e.get("offset"), "offset"), modulus)
    return CosetFamily.from_mapping(mapping)


def pair_from_record(obj: Any, ambient: RootSystem) -> ClassifiedPair:
    if not isinstance(obj, dict) or not isinstance(obj.get("support"), list):
        raise MalformedInput('pair record must have a "support" list')
    sub = Subsystem.of((root_from_coords(c, ambient) for c in obj["support"]), ambient)
    if "gamma" in obj:
        given = [root_from_coords(c, ambient) for c in obj["gamma"]]
        if given != list(sub.gamma):
            raise InvalidPair("gamma does not match the canonical simple system of the support")
    values = []
    for key in ("m", "xbar"):
        table = obj.get(key, {})
        if not isinstance(table, dict) or set(table) != set(sub.labels):
            raise InvalidPair(f'"{key}" must map exactly the labels {list(sub.labels)}')
        values.append(tuple(_int(table[lab], key) for lab in sub.labels))
    return ClassifiedPair(sub, values[0], values[1])


def affine_from_record(obj: Any, ambient: RootSystem) -> AffineRoot:
    if not isinstance(obj, dict):
        raise MalformedInput(f"affine root must be an object, got {obj!r}")
    return AffineRoot(root_from_coords(obj.get("base"), ambient), _int(obj.get("level"), "level"))


__all__ = [
    "affine_from_record",
    "dumps",
    "family_from_record",
    "gcm_from_json",
    "loads",
    "pair_from_record",
    "root_from_coords",
]
