"""Experiment configuration: a strict, versioned JSON schema.

Unknown keys are rejected everywhere so that a typo in a rule name cannot
silently change an experiment.  A shared measure is declared once under
"shared_measure" and referenced as "shared" from both rule blocks; this is
what makes the shared-measure (STIT) pairing a pointer identity.
"""

from __future__ import annotations

import json
import math
from typing import Any, Optional, Sequence

from .errors import ConfigError, InvalidPolygon
from .geometry import Polygon
from .measures import Atoms, HyperplaneMeasure, Isotropic
from .rules import (
    HittingMeasure,
    IntrinsicVolume,
    PointDriven,
    RestrictedMeasure,
    RulePair,
    VertexCount,
)

SCHEMA_VERSION = 1


def _require_keys(obj: dict, path: str, required: Sequence[str], optional: Sequence[str] = ()):
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object, got {type(obj).__name__}")
    for k in required:
        if k not in obj:
            raise ConfigError(f"{path}: missing required key '{k}'")
    allowed = set(required) | set(optional)
    for k in obj:
        if k not in allowed:
            raise ConfigError(f"{path}: unknown key '{k}' (allowed: {sorted(allowed)})")


def parse_directions(spec: Any, path: str):
    if spec == "isotropic":
        return Isotropic()
    if isinstance(spec, list):
        try:
            thetas = tuple(float(t) for t, _ in spec)
            weights = tuple(float(w) for _, w in spec)
            return Atoms(thetas, weights)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}: bad direction atoms: {exc}") from exc
    raise ConfigError(f"{path}: directions must be 'isotropic' or [[theta, weight], ...]")


def parse_measure(spec: Any, path: str) -> HyperplaneMeasure:
    _require_keys(spec, path, ["intensity", "directions"])
    try:
        return HyperplaneMeasure(float(spec["intensity"]), parse_directions(spec["directions"], path))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def measure_to_dict(m: HyperplaneMeasure) -> dict:
    if isinstance(m.directions, Isotropic):
        dirs: Any = "isotropic"
    else:
        dirs = [[t, w] for t, w in zip(m.directions.thetas, m.directions.weights)]
    return {"intensity": m.intensity, "directions": dirs}


def parse_rules(spec: Any, path: str = "rules") -> RulePair:
    if not isinstance(spec, dict):
        raise ConfigError(f"{path}: expected an object")
    if "stit" in spec:
        _require_keys(spec, path, ["stit"])
        block = spec["stit"]
        _require_keys(block, f"{path}.stit", ["measure"])
        measure = parse_measure(block["measure"], f"{path}.stit.measure")
        return RulePair(HittingMeasure(measure), RestrictedMeasure(measure))

    _require_keys(spec, path, ["selection", "division"], ["shared_measure"])
    shared: Optional[HyperplaneMeasure] = None
    if "shared_measure" in spec:
        shared = parse_measure(spec["shared_measure"], f"{path}.shared_measure")

    def resolve_measure(block: dict, sub: str) -> HyperplaneMeasure:
        m = block.get("measure")
        if m == "shared":
            if shared is None:
                raise ConfigError(f"{path}.{sub}: 'shared' used without shared_measure")
            return shared
        return parse_measure(m, f"{path}.{sub}.measure")

    sel_spec = spec["selection"]
    _require_keys(sel_spec, f"{path}.selection", ["kind"], ["index", "measure"])
    kind = sel_spec["kind"]
    if kind == "intrinsic_volume":
        if "index" not in sel_spec:
            raise ConfigError(f"{path}.selection: intrinsic_volume needs 'index'")
        selection: Any = IntrinsicVolume(int(sel_spec["index"]))
    elif kind == "vertex_count":
        selection = VertexCount()
    elif kind == "hitting_measure":
        selection = HittingMeasure(resolve_measure(sel_spec, "selection"))
    else:
        raise ConfigError(f"{path}.selection: unknown kind '{kind}'")

    div_spec = spec["division"]
    _require_keys(div_spec, f"{path}.division", ["kind"], ["measure", "directions"])
    kind = div_spec["kind"]
    if kind == "restricted_measure":
        division: Any = RestrictedMeasure(resolve_measure(div_spec, "division"))
    elif kind == "point_driven":
        dirs = div_spec.get("directions", "isotropic")
        division = PointDriven(parse_directions(dirs, f"{path}.division.directions"))
    else:
        raise ConfigError(f"{path}.division: unknown kind '{kind}'")
    return RulePair(selection, division)


def rules_to_dict(rules: RulePair) -> dict:
    if rules.stit_flag:
        return {"stit": {"measure": measure_to_dict(rules.division.measure)}}
    sel = rules.selection
    if isinstance(sel, IntrinsicVolume):
        sel_d: dict = {"kind": "intrinsic_volume", "index": sel.index}
    elif isinstance(sel, VertexCount):
        sel_d = {"kind": "vertex_count"}
    else:
        sel_d = {"kind": "hitting_measure", "measure": measure_to_dict(sel.measure)}
    div = rules.division
    if isinstance(div, RestrictedMeasure):
        div_d: dict = {"kind": "restricted_measure", "measure": measure_to_dict(div.measure)}
    else:
        div_d = {"kind": "point_driven", "directions": measure_to_dict(
            HyperplaneMeasure(1.0, div.directions)
        )["directions"]}
    return {"selection": sel_d, "division": div_d}


def parse_window(spec: Any, path: str) -> Polygon:
    if not isinstance(spec, list) or len(spec) < 3:
        raise ConfigError(f"{path}: window must be a list of at least 3 [x, y] vertices")
    try:
        return Polygon(spec)
    except (InvalidPolygon, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: invalid window: {exc}") from exc


def parse_times(spec: Any, path: str) -> list[float]:
    if not isinstance(spec, list) or not spec:
        raise ConfigError(f"{path}: expected a non-empty list of times")
    times = [float(t) for t in spec]
    if any(t <= 0 or not math.isfinite(t) for t in times):
        raise ConfigError(f"{path}: times must be positive and finite")
    if any(b < a for a, b in zip(times, times[1:])):
        raise ConfigError(f"{path}: times must be ascending")
    return times


def _check_version_and_seed(cfg: dict, path: str = "config"):
    if cfg.get("version") != SCHEMA_VERSION:
        raise ConfigError(f"{path}: 'version' must be {SCHEMA_VERSION}")
    seed = cfg.get("seed")
    if not isinstance(seed, int):
        raise ConfigError(f"{path}: integer 'seed' is mandatory (no wall-clock seeding)")


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def parse_simulate(cfg: dict) -> dict:
    _require_keys(cfg, "config", ["version", "seed", "window", "rules", "time"], ["out_prefix"])
    _check_version_and_seed(cfg)
    t = float(cfg["time"])
    if t <= 0 or not math.isfinite(t):
        raise ConfigError("config.time: must be positive and finite")
    return {
        "seed": cfg["seed"],
        "window": parse_window(cfg["window"], "config.window"),
        "rules": parse_rules(cfg["rules"]),
        "time": t,
        "out_prefix": cfg.get("out_prefix", "tessellation"),
    }


def parse_consistency(cfg: dict) -> dict:
    _require_keys(
        cfg,
        "config",
        ["version", "seed", "window_inner", "window_outer", "rules", "times", "n_reps"],
        ["alpha", "probes"],
    )
    _check_version_and_seed(cfg)
    V = parse_window(cfg["window_inner"], "config.window_inner")
    W = parse_window(cfg["window_outer"], "config.window_outer")
    if not W.contains_polygon(V):
        raise ConfigError("config: window_inner must be contained in window_outer")
    probes = None
    if "probes" in cfg and cfg["probes"] != "default":
        probes = [parse_window(p, f"config.probes[{i}]") for i, p in enumerate(cfg["probes"])]
    return {
        "seed": cfg["seed"],
        "V": V,
        "W": W,
        "rules": parse_rules(cfg["rules"]),
        "times": parse_times(cfg["times"], "config.times"),
        "n_reps": int(cfg["n_reps"]),
        "alpha": float(cfg.get("alpha", 0.001)),
        "probes": probes,
    }


KNOWN_IDENTITIES = ("fundamental", "nu_limit", "corollary", "rate_matches_nu", "division_bound")


def parse_verify(cfg: dict) -> dict:
    _require_keys(
        cfg, "config", ["version", "seed", "rules", "identities"], ["n_cases"]
    )
    _check_version_and_seed(cfg)
    idents = cfg["identities"]
    if not isinstance(idents, list):
        raise ConfigError("config.identities: expected a list")
    for name in idents:
        if name not in KNOWN_IDENTITIES:
            raise ConfigError(
                f"config.identities: unknown identity '{name}' (known: {KNOWN_IDENTITIES})"
            )
    return {
        "seed": cfg["seed"],
        "rules": parse_rules(cfg["rules"]),
        "identities": list(idents),
        "n_cases": int(cfg.get("n_cases", 100)),
    }


def parse_rate(cfg: dict) -> dict:
    _require_keys(
        cfg, "config", ["version", "seed", "window", "probe", "rules", "dts", "n_reps"], []
    )
    _check_version_and_seed(cfg)
    window = parse_window(cfg["window"], "config.window")
    probe = parse_window(cfg["probe"], "config.probe")
    if not window.contains_polygon(probe):
        raise ConfigError("config: probe must be contained in window")
    dts = [float(d) for d in cfg["dts"]]
    if not dts or any(d <= 0 for d in dts):
        raise ConfigError("config.dts: need positive time steps")
    return {
        "seed": cfg["seed"],
        "window": window,
        "probe": probe,
        "rules": parse_rules(cfg["rules"]),
        "dts": dts,
        "n_reps": int(cfg["n_reps"]),
    }
