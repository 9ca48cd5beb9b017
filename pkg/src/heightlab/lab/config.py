"""Experiment configuration: TOML in, validated frozen dataclass out.

The same dictionary that validation saw is kept verbatim on the config and
hashed (sha256 over canonical JSON) into two fingerprints:

* ``config_hash`` — the whole effective configuration; stamped on every
  report so runs can be told apart.
* ``family_hash`` — just the field + Weierstrass data + section; calibration
  fixtures carry it, and consumers refuse fixtures whose family does not
  match the config they are about to check.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field as dc_field
from typing import Optional

import tomli

from ..elliptic import WeierstrassFamily
from ..errors import ConfigError, HeightLabError, ResourceLimitError
from ..exact_arith import (BaseField, Rationals, base_field_label,
                           parse_base_field)
from ..neron_tate import MAX_DOUBLING_DEPTH
from .expressions import parse_expression

_DEFAULTS = {
    "experiment": {"field": "Q", "seed": 20260822},
    "family": {"a": "s", "b": "1", "section_x": "0", "section_y": "1"},
    "scan": {"height_bound": 25, "fiber_count": 40, "multiplier_max": 3},
    "neron_tate": {"depth": 5, "telescope_depth": 6, "point_count": 12},
    "section5": {"samples": 200, "coord_bound": 25},
}

# Heights over F_p(u) are degrees, and doubling multiplies degrees by ~4
# per level, so the Q-sized defaults above would push coordinate degrees
# into the tens of thousands.  Keys the user did not set explicitly are
# therefore shrunk when the field is a function field.
_FQ_DEFAULTS = {
    ("scan", "height_bound"): 5,
    ("scan", "fiber_count"): 40,
    ("neron_tate", "depth"): 4,
    ("neron_tate", "telescope_depth"): 5,
    ("neron_tate", "point_count"): 10,
    ("section5", "coord_bound"): 6,
}


def default_config_dict() -> dict:
    """A small self-contained demo setup (y^2 = x^3 + s x + 1 over Q)."""
    return json.loads(json.dumps(_DEFAULTS))


def _require_int(table: dict, section: str, key: str, lo: int, hi: int) -> int:
    value = table.get(key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(f"[{section}] {key} must be an integer")
    if not lo <= value <= hi:
        raise ConfigError(f"[{section}] {key}={value} outside [{lo}, {hi}]")
    return value


def _require_str(table: dict, section: str, key: str) -> str:
    value = table.get(key)
    if not isinstance(value, str) or not value.strip():
        raise ConfigError(f"[{section}] {key} must be a nonempty string")
    return value


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    field: BaseField
    field_label: str
    seed: int
    out_dir: Optional[str]
    a_text: str
    b_text: str
    section_x_text: str
    section_y_text: str
    height_bound: int
    fiber_count: int
    multiplier_max: int
    nt_depth: int
    telescope_depth: int
    nt_point_count: int
    s5_samples: int
    s5_coord_bound: int
    divisor_spec: Optional[dict]
    raw: dict = dc_field(repr=False)

    def config_hash(self) -> str:
        return _digest(self.raw)

    def family_hash(self) -> str:
        return _digest({
            "field": self.field_label,
            "a": self.a_text,
            "b": self.b_text,
            "section_x": self.section_x_text,
            "section_y": self.section_y_text,
        })

    def build_family(self) -> WeierstrassFamily:
        """Parse the family expressions and construct the curve with its
        marked section; configuration-level failures become ConfigError."""
        try:
            a = parse_expression(self.a_text, self.field)
            b = parse_expression(self.b_text, self.field)
            sx = parse_expression(self.section_x_text, self.field)
            sy = parse_expression(self.section_y_text, self.field)
            return WeierstrassFamily(self.field, a, b, section=(sx, sy))
        except ResourceLimitError:
            raise
        except ConfigError:
            raise
        except HeightLabError as exc:
            raise ConfigError(f"bad family: {exc}") from exc


def _digest(data: dict) -> str:
    canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def _merged(data: dict) -> tuple[dict, set]:
    merged = default_config_dict()
    provided = set()
    for section, table in data.items():
        if section == "divisor":
            merged["divisor"] = table
            continue
        if section not in merged:
            raise ConfigError(f"unknown config section [{section}]")
        if not isinstance(table, dict):
            raise ConfigError(f"[{section}] must be a table")
        for key, value in table.items():
            if key not in merged[section] and key != "out_dir":
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            merged[section][key] = value
            provided.add((section, key))
    return merged, provided


def config_from_dict(data: dict, overrides: Optional[dict] = None
                     ) -> ExperimentConfig:
    """Validate a raw config dictionary (TOML shape) into an
    ExperimentConfig.  ``overrides`` land in [experiment] before anything is
    hashed, so command-line --seed/--field change the fingerprints too."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be a table")
    merged, provided = _merged(data)
    if overrides:
        for key, value in overrides.items():
            if value is not None:
                merged["experiment"][key] = value

    exp = merged["experiment"]
    label = _require_str(exp, "experiment", "field")
    try:
        base = parse_base_field(label)
    except (HeightLabError, ValueError) as exc:
        raise ConfigError(f"bad field label {label!r}: {exc}") from exc
    if not isinstance(base, Rationals):
        for (section, key), value in _FQ_DEFAULTS.items():
            if (section, key) not in provided:
                merged[section][key] = value
    seed = _require_int(exp, "experiment", "seed", 0, (1 << 64) - 1)
    out_dir = exp.get("out_dir")
    if out_dir is not None and not isinstance(out_dir, str):
        raise ConfigError("[experiment] out_dir must be a string")

    fam = merged["family"]
    scan = merged["scan"]
    nt = merged["neron_tate"]
    s5 = merged["section5"]
    depth = _require_int(nt, "neron_tate", "depth", 1, MAX_DOUBLING_DEPTH)
    telescope = _require_int(nt, "neron_tate", "telescope_depth", 1,
                             MAX_DOUBLING_DEPTH)
    if telescope < depth:
        raise ConfigError("[neron_tate] telescope_depth must be >= depth")

    divisor_spec = merged.get("divisor")
    if divisor_spec is not None and not isinstance(divisor_spec, dict):
        raise ConfigError("[divisor] must be a table")

    config = ExperimentConfig(
        field=base,
        field_label=base_field_label(base),
        seed=seed,
        out_dir=out_dir,
        a_text=_require_str(fam, "family", "a"),
        b_text=_require_str(fam, "family", "b"),
        section_x_text=_require_str(fam, "family", "section_x"),
        section_y_text=_require_str(fam, "family", "section_y"),
        height_bound=_require_int(scan, "scan", "height_bound", 1, 10 ** 6),
        fiber_count=_require_int(scan, "scan", "fiber_count", 1, 10 ** 6),
        multiplier_max=_require_int(scan, "scan", "multiplier_max", 1, 64),
        nt_depth=depth,
        telescope_depth=telescope,
        nt_point_count=_require_int(nt, "neron_tate", "point_count", 1,
                                    10 ** 6),
        s5_samples=_require_int(s5, "section5", "samples", 1, 10 ** 6),
        s5_coord_bound=_require_int(s5, "section5", "coord_bound", 1, 10 ** 6),
        divisor_spec=divisor_spec,
        raw=merged,
    )
    config.build_family()  # fail fast on a family the field rejects
    return config


def load_config(path: str, overrides: Optional[dict] = None
                ) -> ExperimentConfig:
    """Read a TOML file and validate it; parse errors become ConfigError."""
    try:
        with open(path, "rb") as fh:
            data = tomli.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    return config_from_dict(data, overrides)
