"""Scenario files (JSON or TOML): schema, validation and loading."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import jsonschema
import tomli


class ScenarioError(ValueError):
    """Schema violation; ``path`` locates the offending entry."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


_num = {"type": "number"}
_int = {"type": "integer"}
_pos_int = {"type": "integer", "minimum": 1}
_bool = {"type": "boolean"}
_str = {"type": "string"}


def _section(props: dict, required: tuple = ()) -> dict:
    return {"type": "object", "properties": props, "additionalProperties": False, "required": list(required)}


HAMILTONIAN = _section({"preset": _str, "params": {"type": "object"}}, ("preset",))

ORBITS = _section({
    "k": _pos_int, "grid": _pos_int, "step": {"type": "number", "exclusiveMinimum": 0},
    "coarse_step": {"type": ["number", "null"]}, "tol_orbit": _num, "merge_radius": _num,
    "tol_eig": _num, "epsilon": {"type": ["number", "null"]},
})

BRAID = _section({
    "samples_per_period": _pos_int, "projection_angle": _num,
    "orbit_indices": {"type": "array", "items": {"type": "integer", "minimum": 0}},
    "invariance_angles": {"type": "array", "items": _num}, "conjugacy_budget": _pos_int,
})

ENTROPY = _section({
    "words": {"type": "array", "items": _section({"n": {"type": "integer", "minimum": 2}, "word": _str},
                                                  ("n", "word"))},
    "N": {"type": "integer", "minimum": 4},
    "cap": _pos_int,
})

STABILITY = _section({
    "hamiltonian": _str, "hamiltonian_params": {"type": "object"},
    "k": _pos_int, "grid": _pos_int, "step": _num, "coarse_step": {"type": ["number", "null"]},
    "target_period": _pos_int, "target_kind": {"enum": ["elliptic", "hyperbolic"]},
    "bump_center": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
    "bump_radius": _num, "bump_profile": {"enum": ["const", "pulse", "sine"]},
    "amplitudes": {"type": "array", "items": {"type": "number", "minimum": 0}},
    "isolation_factor": _num, "epsilon": {"type": ["number", "null"]},
    "require_nonzero_action": _bool, "perturbed_grid": {"type": "integer", "minimum": 0},
    "entropy_iterations": {"type": "integer", "minimum": 4}, "conjugacy_budget": _pos_int,
    "samples_per_period": _pos_int, "projection_angle": _num,
})

GF2 = _section({"instances": _pos_int, "max_dim": {"type": "integer", "minimum": 1, "maximum": 8},
                "oracle": _bool})

SYMBOLIC = _section({
    "m_values": {"type": "array", "items": {"type": "integer", "minimum": 3}},
    "demo": {"type": "array", "items": {"type": "integer", "minimum": 3, "maximum": 6}},
    "N": {"type": "integer", "minimum": 4},
})

SCHEMA = _section({
    "name": _str,
    "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
    "hamiltonian": HAMILTONIAN,
    "orbits": ORBITS,
    "braid": BRAID,
    "entropy": ENTROPY,
    "stability": STABILITY,
    "gf2": GF2,
    "symbolic": SYMBOLIC,
})


@dataclass
class Scenario:
    data: dict
    source: str = ""
    raw: dict = field(default_factory=dict)

    @property
    def seed(self) -> int:
        return int(self.data.get("seed", 0))

    def section(self, name: str) -> dict:
        return dict(self.data.get(name, {}))

    def require(self, name: str) -> dict:
        if name not in self.data:
            raise ScenarioError(f"scenario.{name}", "section is required for this command")
        return self.section(name)

    def config_hash(self) -> str:
        canon = json.dumps(self.data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()


def _format_path(parts) -> str:
    out = "scenario"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def validate(data: Any) -> Scenario:
    validator = jsonschema.Draft7Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = errors[0]
        if err.validator == "additionalProperties":
            extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
            raise ScenarioError(_format_path(list(err.absolute_path) + extra[:1]), "unknown key")
        raise ScenarioError(_format_path(err.absolute_path), err.message)
    return Scenario(data)


def load_scenario(path) -> Scenario:
    path = Path(path)
    text = path.read_text()
    try:
        if path.suffix.lower() == ".toml":
            data = tomli.loads(text)
        else:
            data = json.loads(text)
    except (json.JSONDecodeError, tomli.TOMLDecodeError) as err:
        raise ScenarioError("scenario", f"cannot parse {path.name}: {err}") from None
    sc = validate(data)
    sc.source = str(path)
    return sc
