"""JSON configuration parsing for experiments.

The schema is deliberately small and documented in the repository README;
validation happens through the same constructors the library uses, so a
bad config fails with the constructor's message (for example the
``alpha > -1`` requirement) plus the JSON path that produced it.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .boundary import AngularWeight, BoundaryDensity, DirectionalIntensity, SphericalDensity
from .experiments import ExperimentConfig
from .geometry import Ball, Box, ComplementBody, HPolytope, Hull, SetModel, box


class ConfigError(ValueError):
    """Configuration file failed to parse or validate."""


def _ctx(path: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def parse_component(d: dict, path: str):
    kind = d.get("type")
    if kind == "box":
        return _ctx(path, box, d["low"], d["high"])
    if kind == "ball":
        return _ctx(path, Ball, d["center"], d["radius"])
    if kind == "polytope":
        return _ctx(path, HPolytope, np.asarray(d["normals"], dtype=float), np.asarray(d["offsets"], dtype=float))
    if kind == "complement":
        inner = parse_component(d["inner"], path + ".inner")
        return _ctx(path, ComplementBody, inner)
    raise ConfigError(f"{path}: unknown body type {kind!r}")


def parse_model(d: dict, path: str) -> SetModel:
    if d.get("type") == "union":
        comps = [parse_component(c, f"{path}.components[{i}]") for i, c in enumerate(d["components"])]
        return _ctx(path, SetModel, comps, d["separation"])
    return _ctx(path, SetModel, [parse_component(d, path)])


def parse_probe(d: dict, path: str):
    kind = d.get("type")
    if kind == "ball":
        return _ctx(path, Ball, d["center"], d["radius"])
    if kind == "hull":
        return _ctx(path, Hull, d["vertices"])
    if kind == "point":
        return _ctx(path, Hull, [d["at"]])
    raise ConfigError(f"{path}: unknown probe type {kind!r}")


def parse_angular(d: dict | None, path: str) -> AngularWeight | None:
    if d is None:
        return None
    kind = d.get("kind", "constant")
    if kind == "constant":
        return _ctx(path, AngularWeight, "constant", d.get("value", 1.0))
    if kind == "arc":
        return _ctx(
            path, AngularWeight, "arc", d.get("value", 1.0), d["thetaFrom"], d["thetaTo"]
        )
    raise ConfigError(f"{path}: unknown angular weight kind {kind!r}")


def parse_density(d: dict, model: SetModel, path: str) -> BoundaryDensity:
    kind = d.get("kind")
    support = tuple(d["support"]) if "support" in d else None
    mass = d.get("mass", 1.0)
    if kind == "uniform":
        return _ctx(path, BoundaryDensity.uniform, model, support, mass)
    if kind == "radialPowerBall":
        return _ctx(
            path,
            BoundaryDensity.radial_power,
            model,
            d["alpha"],
            (support or (0,))[0],
            parse_angular(d.get("angular"), path + ".angular"),
            mass,
        )
    if kind == "distPowerPolytope":
        return _ctx(
            path,
            BoundaryDensity.dist_power,
            model,
            d["alpha"],
            (support or (0,))[0],
            d.get("normalize", True),
            mass,
        )
    raise ConfigError(f"{path}: unknown density kind {kind!r}")


def parse_intensity(d: dict, path: str) -> DirectionalIntensity:
    atoms = d.get("atoms", [])
    dirs = [a["direction"] for a in atoms]
    weights = [a["weight"] for a in atoms]
    dim = d.get("dimension") or (len(dirs[0]) if dirs else None)
    if dim is None:
        raise ConfigError(f"{path}: dimension is required when there are no atoms")
    spherical = None
    if "spherical" in d:
        s = d["spherical"]
        spherical = _ctx(
            path + ".spherical",
            SphericalDensity,
            s["baseValue"],
            dim,
            parse_angular(s.get("angular"), path + ".spherical.angular"),
        )
    dirs_arr = np.asarray(dirs, dtype=float).reshape(len(dirs), dim) if dirs else np.zeros((0, dim))
    return _ctx(path, DirectionalIntensity, dim, dirs_arr, np.asarray(weights, dtype=float), spherical)


def parse_window(d: dict, path: str) -> Box:
    return _ctx(path, Box, d["low"], d["high"])


def config_from_dict(doc: dict[str, Any]) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("top level must be a JSON object")
    for key in ("kind", "sweep"):
        if key not in doc:
            raise ConfigError(f"missing required key {key!r}")
    model = None
    density = None
    probe = None
    intensity = None
    alpha = None
    m = doc.get("model", {})
    if "body" in m:
        model = parse_model(m["body"], "model.body")
    if "density" in m:
        if model is None:
            raise ConfigError("model.density needs model.body")
        density = parse_density(m["density"], model, "model.density")
    if "probe" in m:
        probe = parse_probe(m["probe"], "model.probe")
    if "intensity" in m:
        intensity = parse_intensity(m["intensity"], "model.intensity")
    if "alpha" in m:
        alpha = float(m["alpha"])
    th = doc.get("thresholds", {})
    window = parse_window(doc["window"], "window") if "window" in doc else None
    try:
        return ExperimentConfig(
            kind=doc["kind"],
            sweep=tuple(doc["sweep"]),
            trials=int(doc.get("trials", 1)),
            n=int(doc["n"]) if "n" in doc else None,
            mc_points=int(doc.get("mcPoints", 100_000)),
            window=window,
            model=model,
            density=density,
            probe=probe,
            intensity=intensity,
            alpha=alpha,
            z_max=float(th.get("zMax", 4.0)),
            abs_tol=float(th.get("absTol", 1e-9)),
            root_seed=int(doc["rootSeed"]) if "rootSeed" in doc else None,
            single_window=bool(doc.get("singleWindow", False)),
        )
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str) -> tuple[ExperimentConfig, dict]:
    """Parse a config file; returns the config and the raw document."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    cfg = config_from_dict(doc)
    return cfg, doc
