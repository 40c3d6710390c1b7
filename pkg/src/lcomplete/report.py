"""JSON encoding of modules, morphisms and reports, with schema validation."""

from __future__ import annotations

import json
import os
import tempfile
from typing import Any

import jsonschema

from .errors import MalformedInput
from .fpmod import INTEGERS, MOD_PRIME_POWER, FpModule, FpMorphism, Ring
from .linalg import IntMatrix

SCHEMA_VERSION = 1

_int_matrix = {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}}

RING_SCHEMA = {
    "oneOf": [
        {"type": "object", "properties": {"base": {"const": "Z"}},
         "required": ["base"], "additionalProperties": False},
        {"type": "object",
         "properties": {"base": {"const": "Z/p^N"}, "p": {"type": "integer", "minimum": 2},
                        "N": {"type": "integer", "minimum": 1}},
         "required": ["base", "p", "N"], "additionalProperties": False},
        {"type": "object",
         "properties": {"base": {"const": "Zp"}, "p": {"type": "integer", "minimum": 2}},
         "required": ["base", "p"], "additionalProperties": False},
    ]
}

MODULE_SCHEMA = {
    "type": "object",
    "properties": {
        "ring": RING_SCHEMA,
        "generators": {"type": "integer", "minimum": 0},
        "relations": _int_matrix,
    },
    "required": ["generators"],
    "additionalProperties": False,
}

MORPHISM_SCHEMA = {
    "type": "object",
    "properties": {"source": MODULE_SCHEMA, "target": MODULE_SCHEMA, "matrix": _int_matrix},
    "required": ["source", "target", "matrix"],
    "additionalProperties": False,
}

_rational = {"oneOf": [{"type": "integer"}, {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}]}

GRADED_SCHEMA = {
    "type": "object",
    "properties": {
        "p": {"type": "integer", "minimum": 2},
        "components": {
            "type": "array", "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "from": {"type": "integer", "minimum": 1},
                    "kind": {"enum": ["cyclic", "free"]},
                    "exp": {
                        "type": "object",
                        "properties": {"a": _rational, "b": _rational,
                                       "cap": {"type": ["integer", "null"], "minimum": 0}},
                        "additionalProperties": False,
                    },
                },
                "required": ["from", "kind"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["p", "components"],
    "additionalProperties": False,
}

INPUT_SCHEMA = {
    "type": "object",
    "properties": {
        "module": MODULE_SCHEMA,
        "modules": {"type": "array", "items": MODULE_SCHEMA},
        "morphism": MORPHISM_SCHEMA,
        "morphisms": {"type": "array", "items": MORPHISM_SCHEMA},
        "pairs": {"type": "array", "items": {"type": "array", "items": MODULE_SCHEMA,
                                             "minItems": 2, "maxItems": 2}},
        "graded": GRADED_SCHEMA,
    },
    "additionalProperties": False,
}

REPORT_SCHEMA = {
    "type": "object",
    "properties": {
        "tool": {"const": "lcomplete"},
        "version": {"type": "string"},
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"type": "string"},
        "seed": {"type": "integer"},
        "options": {"type": "object"},
        "input": {"type": ["object", "null"]},
        "verdict": {"type": "boolean"},
        "result": {"type": "object"},
        "certificates": {"type": "array"},
        "verifier": {"type": "object"},
    },
    "required": ["tool", "version", "schema_version", "command", "seed", "verdict", "result", "verifier"],
    "additionalProperties": False,
}


def validate(doc: Any, schema: dict, what: str = "input") -> None:
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(x) for x in exc.absolute_path) or "<root>"
        raise MalformedInput(f"{what} at {where}: {exc.message}") from None


# -- encoders -------------------------------------------------------------------


def ring_to_json(R: Ring) -> dict:
    if R.kind == INTEGERS:
        return {"base": "Z"}
    if R.kind == MOD_PRIME_POWER:
        return {"base": "Z/p^N", "p": R.p, "N": R.N}
    return {"base": "Zp", "p": R.p}


def ring_from_json(d: dict) -> Ring:
    base = d["base"]
    if base == "Z":
        return Ring.integers()
    if base == "Z/p^N":
        return Ring.mod_prime_power(d["p"], d["N"])
    return Ring.padic(d["p"])


def module_to_json(M: FpModule) -> dict:
    """Relations are listed column by column: one list per relation."""
    return {"ring": ring_to_json(M.ring), "generators": M.generators,
            "relations": M.relations.to_columns()}


def module_from_json(d: dict) -> FpModule:
    validate(d, MODULE_SCHEMA, "module")
    g = d["generators"]
    ring = ring_from_json(d.get("ring", {"base": "Z"}))
    rels = d.get("relations", [])
    for i, c in enumerate(rels):
        if len(c) != g:
            raise MalformedInput(f"module at relations/{i}: relation has {len(c)} entries, expected {g}")
    return FpModule(ring, g, IntMatrix.from_columns(rels, g))


def morphism_to_json(f: FpMorphism) -> dict:
    """The matrix is row-major: one row per target generator."""
    return {"source": module_to_json(f.source), "target": module_to_json(f.target),
            "matrix": f.matrix.to_rows()}


def morphism_from_json(d: dict) -> FpMorphism:
    validate(d, MORPHISM_SCHEMA, "morphism")
    M, N = module_from_json(d["source"]), module_from_json(d["target"])
    rows = d["matrix"]
    if N.generators == 0:
        matrix = IntMatrix.zeros(0, M.generators)
    else:
        if len(rows) != N.generators:
            raise MalformedInput(f"morphism at matrix: {len(rows)} rows, expected {N.generators}")
        for i, r in enumerate(rows):
            if len(r) != M.generators:
                raise MalformedInput(f"morphism at matrix/{i}: {len(r)} entries, expected {M.generators}")
        matrix = IntMatrix.from_rows(rows, M.generators)
    return FpMorphism(M, N, matrix)


def normal_form_to_json(M: FpModule) -> dict:
    nf = M.normal_form
    return {"free_rank": nf.free_rank, "invariant_factors": list(nf.invariant_factors),
            "text": str(nf)}


# -- output -----------------------------------------------------------------------


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".report-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
