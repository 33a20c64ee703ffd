"""Problem-spec files: schema validation, loading, and resolution to verifiers.

A problem spec names a verifier source (builtin catalog entry, DSL text, or
truth-table files), how the dual pair is obtained (given directly or derived
through the half-gap lemma transform), the input-size range, the branching
length as an affine function or per-size table, and an optional half-gap
witness.
"""
from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass

import jsonschema

from quasiq.harness.dsl import dsl_verifier
from quasiq.verifierkit import (
    BuiltinProblem,
    DualVerifierPair,
    HalfGapFunction,
    Verifier,
    builtin_problems,
    load_table_verifier,
    make_dual_lwpp,
)


class SpecError(ValueError):
    """The problem spec is malformed or inconsistent."""


_AFFINE = {
    "type": "object",
    "required": ["a", "b"],
    "properties": {"a": {"type": "integer"}, "b": {"type": "integer"}},
    "additionalProperties": False,
}

SCHEMA = {
    "type": "object",
    "required": ["name", "n", "verifier", "dual"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "n": {
            "type": "object",
            "required": ["min", "max"],
            "properties": {
                "min": {"type": "integer", "minimum": 1},
                "max": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "m": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["affine"],
                    "properties": {"affine": _AFFINE},
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "required": ["table"],
                    "properties": {
                        "table": {
                            "type": "object",
                            "patternProperties": {r"^\d+$": {"type": "integer", "minimum": 1}},
                            "additionalProperties": False,
                        }
                    },
                    "additionalProperties": False,
                },
            ]
        },
        "verifier": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["kind", "name"],
                    "properties": {"kind": {"const": "builtin"}, "name": {"type": "string"}},
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "required": ["kind", "v0", "v1"],
                    "properties": {
                        "kind": {"const": "dsl"},
                        "v0": {"type": "string"},
                        "v1": {"type": "string"},
                    },
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "required": ["kind", "base"],
                    "properties": {"kind": {"const": "dsl"}, "base": {"type": "string"}},
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "required": ["kind", "v0", "v1"],
                    "properties": {
                        "kind": {"const": "table-file"},
                        "v0": {"type": "string"},
                        "v1": {"type": "string"},
                    },
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "required": ["kind", "base"],
                    "properties": {"kind": {"const": "table-file"}, "base": {"type": "string"}},
                    "additionalProperties": False,
                },
            ]
        },
        "h": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["kind", "M", "t"],
                    "properties": {
                        "kind": {"const": "power"},
                        "M": {"type": "integer", "minimum": 1},
                        "t": _AFFINE,
                    },
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "required": ["kind", "values"],
                    "properties": {
                        "kind": {"const": "tabulated"},
                        "values": {
                            "type": "object",
                            "patternProperties": {r"^\d+$": {"type": "integer", "minimum": 1}},
                            "additionalProperties": False,
                        },
                    },
                    "additionalProperties": False,
                },
            ]
        },
        "dual": {"enum": ["given-pair", "derive-via-lemma"]},
    },
}


@dataclass
class ProblemSpec:
    """Validated problem description plus the directory for relative paths."""

    name: str
    n_min: int
    n_max: int
    m_spec: dict | None
    verifier: dict
    h: HalfGapFunction | None
    dual: str
    base_dir: str = "."

    @classmethod
    def from_json(cls, obj: dict, base_dir: str = ".") -> ProblemSpec:
        try:
            jsonschema.validate(obj, SCHEMA)
        except jsonschema.ValidationError as exc:
            raise SpecError(f"problem spec rejected by schema: {exc.message}") from exc
        verifier = obj["verifier"]
        dual = obj["dual"]
        has_base = "base" in verifier
        if verifier["kind"] != "builtin":
            if dual == "derive-via-lemma" and not has_base:
                raise SpecError("derive-via-lemma needs a single 'base' verifier")
            if dual == "given-pair" and has_base:
                raise SpecError("given-pair needs 'v0' and 'v1' verifiers")
            if dual == "derive-via-lemma" and "h" not in obj:
                raise SpecError("derive-via-lemma needs a half-gap witness 'h'")
            if verifier["kind"] == "dsl" and "m" not in obj:
                raise SpecError("dsl verifiers need an explicit 'm'")
        h = HalfGapFunction.from_json(obj["h"]) if "h" in obj else None
        return cls(
            name=obj["name"],
            n_min=obj["n"]["min"],
            n_max=obj["n"]["max"],
            m_spec=obj.get("m"),
            verifier=verifier,
            h=h,
            dual=dual,
            base_dir=base_dir,
        )

    def to_json(self) -> dict:
        obj: dict = {
            "name": self.name,
            "n": {"min": self.n_min, "max": self.n_max},
            "verifier": self.verifier,
            "dual": self.dual,
        }
        if self.m_spec is not None:
            obj["m"] = self.m_spec
        if self.h is not None:
            obj["h"] = self.h.to_json()
        return obj

    def m_of(self, n: int) -> int | None:
        if self.m_spec is None:
            return None
        if "affine" in self.m_spec:
            return self.m_spec["affine"]["a"] * n + self.m_spec["affine"]["b"]
        table = self.m_spec["table"]
        if str(n) not in table:
            raise SpecError(f"m table has no entry for n = {n}")
        return table[str(n)]


@dataclass
class ResolvedProblem:
    """Concrete verifiers for one input size."""

    name: str
    n: int
    m: int
    verifiers: list[Verifier]
    pair: DualVerifierPair | None
    h: HalfGapFunction | None
    base: Verifier | None
    language: object = None  # intended language bit function, when known

    def require_pair(self) -> DualVerifierPair:
        if self.pair is None:
            raise SpecError(f"problem {self.name!r} does not define a dual pair")
        return self.pair

    def require_h(self) -> HalfGapFunction:
        if self.h is None:
            raise SpecError(f"problem {self.name!r} carries no half-gap witness")
        return self.h


def load_problem_file(path: str) -> ProblemSpec:
    try:
        with open(path, "rt", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise SpecError(
            f"{path!r} is neither a builtin problem "
            f"({', '.join(sorted(builtin_problems()))}) nor a readable spec file: {exc}"
        ) from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"problem file {path} is not valid JSON: {exc}") from exc
    return ProblemSpec.from_json(obj, base_dir=os.path.dirname(path) or ".")


def _resolve_builtin(entry: BuiltinProblem, n: int, seed: int | None) -> ResolvedProblem:
    rng = random.Random(seed) if seed is not None else None
    if entry.kind == "single":
        verifier = entry.make_single(n)
        return ResolvedProblem(entry.name, n, verifier.m, [verifier], None, entry.h, None)
    pair = entry.pair(n, rng)
    base = entry.make_base(n) if entry.make_base else None
    return ResolvedProblem(
        entry.name, n, pair.m, [pair.v0, pair.v1], pair, entry.h, base,
        language=entry.language,
    )


def resolve_problem(spec_or_name: ProblemSpec | str, n: int, seed: int | None = None) -> ResolvedProblem:
    """Instantiate a problem (builtin name or loaded spec) at input size n."""
    catalog = builtin_problems()
    if isinstance(spec_or_name, str):
        if spec_or_name not in catalog:
            raise SpecError(
                f"unknown builtin problem {spec_or_name!r}; "
                f"choices: {', '.join(sorted(catalog))}")
        return _resolve_builtin(catalog[spec_or_name], n, seed)

    spec = spec_or_name
    if not spec.n_min <= n <= spec.n_max:
        raise SpecError(f"n = {n} outside declared range [{spec.n_min}, {spec.n_max}]")
    source = spec.verifier
    if source["kind"] == "builtin":
        if source["name"] not in catalog:
            raise SpecError(f"unknown builtin problem {source['name']!r}")
        resolved = _resolve_builtin(catalog[source["name"]], n, seed)
        if spec.h is not None:
            resolved.h = spec.h
        resolved.name = spec.name
        return resolved

    def build(key: str) -> Verifier:
        ref = source[key]
        if source["kind"] == "dsl":
            m = spec.m_of(n)
            return dsl_verifier(ref, n, m, name=f"{spec.name}-{key}")
        path = ref if os.path.isabs(ref) else os.path.join(spec.base_dir, ref)
        verifier = load_table_verifier(path, name=f"{spec.name}-{key}")
        if verifier.n != n:
            raise SpecError(f"table file {path} is for n = {verifier.n}, not {n}")
        declared = spec.m_of(n)
        if declared is not None and declared != verifier.m:
            raise SpecError(f"table file {path} has m = {verifier.m}, spec says {declared}")
        return verifier

    if spec.dual == "derive-via-lemma":
        base = build("base")
        pair = make_dual_lwpp(base, spec.h)
        return ResolvedProblem(spec.name, n, pair.m, [pair.v0, pair.v1], pair, spec.h, base)
    v0, v1 = build("v0"), build("v1")
    pair = DualVerifierPair(v0, v1, name=spec.name, h_witness=spec.h)
    return ResolvedProblem(spec.name, n, pair.m, [v0, v1], pair, spec.h, None)
