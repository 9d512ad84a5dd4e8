"""
Scenario files for the command-line front end.

A scenario is one JSON document.  Every number may be an integer, a
"num/den" string or a decimal string such as "0.125"; all of them are read as
exact fractions.  JSON floats are accepted too and go through their shortest
decimal representation, so 0.1 means 1/10.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import jsonschema

from . import minplus as mp
from .bounds import AffineArrival
from .composition import POLICIES, Edge, Merge, NetworkError, RoadNetwork
from .curve import CurveError
from .road import RingRoad, fundamental_flow


class ConfigError(Exception):
    """The scenario file is missing, malformed or inconsistent."""


_NUM = {
    "anyOf": [
        {"type": "integer"},
        {"type": "number"},
        {"type": "string", "pattern": r"^\s*-?\d+(\.\d+)?(\s*/\s*\d+)?\s*$"},
    ]
}
_ARRIVAL = {
    "type": "object",
    "properties": {"sigma": _NUM, "r": _NUM, "fraction": _NUM},
    "required": ["sigma"],
    "additionalProperties": False,
}

SCHEMA = {
    "type": "object",
    "properties": {
        "roads": {
            "type": "object",
            "minProperties": 1,
            "additionalProperties": {
                "type": "object",
                "properties": {"m": {"type": "integer"}, "dx": _NUM, "v": _NUM, "w": _NUM, "rho_j": _NUM},
                "required": ["m", "dx", "v", "w", "rho_j"],
                "additionalProperties": False,
            },
        },
        "arrivals": {"type": "object", "additionalProperties": _ARRIVAL},
        "sweep": {
            "type": "object",
            "properties": {
                "road": {"type": "string"},
                "rho": {"type": "array", "items": _NUM},
                "grid": {"type": "integer", "minimum": 1},
                "arrival": {"type": "string"},
                "horizon": _NUM,
                "step": _NUM,
            },
            "required": ["road"],
            "additionalProperties": False,
        },
        "sim": {
            "type": "object",
            "properties": {
                "road": {"type": "string"},
                "dt": _NUM,
                "horizon": _NUM,
                "seed": {"type": "integer", "minimum": 0},
                "runs": {"type": "integer", "minimum": 0},
                "densities": {"type": "array", "items": _NUM},
                "couples": {"type": "array", "items": {"enum": ["theorem1", "relaxed"]}},
                "arrival": _ARRIVAL,
            },
            "required": ["road"],
            "additionalProperties": False,
        },
        "network": {
            "type": "object",
            "properties": {
                "edges": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {
                            "name": {"type": "string"},
                            "src": {"type": "string"},
                            "dst": {"type": "string"},
                            "road": {"type": "string"},
                            "rho": _NUM,
                            "model": {"enum": ["theorem1", "relaxed"]},
                        },
                        "required": ["name", "src", "dst", "road", "rho"],
                        "additionalProperties": False,
                    },
                },
                "merges": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {
                            "node": {"type": "string"},
                            "cross": _ARRIVAL,
                            "policy": {"type": "string"},
                        },
                        "required": ["node", "cross"],
                        "additionalProperties": False,
                    },
                },
                "paths": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {
                            "name": {"type": "string"},
                            "edges": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                            "arrival": {"type": "string"},
                        },
                        "required": ["edges", "arrival"],
                        "additionalProperties": False,
                    },
                },
            },
            "required": ["edges"],
            "additionalProperties": False,
        },
        "output": {
            "type": "object",
            "properties": {
                "dir": {"type": "string"},
                "formats": {"type": "array", "items": {"enum": ["csv", "json", "svg"]}},
            },
            "additionalProperties": False,
        },
    },
    "required": ["roads"],
    "additionalProperties": False,
}


def number(x) -> Fraction:
    if isinstance(x, bool):
        raise ConfigError(f"expected a number, got {x!r}")
    if isinstance(x, float):
        return Fraction(repr(x))
    try:
        return Fraction(x.replace(" ", "") if isinstance(x, str) else x)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ConfigError(f"not an exact number: {x!r}") from exc


@dataclass(frozen=True)
class ArrivalSpec:
    """A token bucket, either with an absolute rate or as a fraction of q(rho)."""

    sigma: Fraction
    r: Optional[Fraction] = None
    fraction: Optional[Fraction] = None

    def resolve(self, road: RingRoad, rho) -> AffineArrival:
        if self.r is not None:
            return AffineArrival(self.sigma, self.r)
        return AffineArrival(self.sigma, fundamental_flow(road, rho) * self.fraction)

    def to_dict(self) -> dict:
        out = {"sigma": str(self.sigma)}
        if self.r is not None:
            out["r"] = str(self.r)
        if self.fraction is not None:
            out["fraction"] = str(self.fraction)
        return out


@dataclass
class Sweep:
    road: str
    rho: List[Fraction]
    arrival: Optional[str] = None
    horizon: Fraction = Fraction(30)
    step: Fraction = Fraction(1, 2)


@dataclass
class SimSpec:
    road: str
    dt: Fraction = Fraction(1, 2)
    horizon: Fraction = Fraction(120)
    seed: int = 0
    runs: int = 200
    densities: List[Fraction] = field(default_factory=list)
    couples: Tuple[str, ...] = ("theorem1", "relaxed")
    arrival: ArrivalSpec = ArrivalSpec(Fraction(1), fraction=Fraction(3, 4))


@dataclass
class PathSpec:
    name: str
    edges: List[str]
    arrival: str


@dataclass
class ScenarioConfig:
    roads: Dict[str, RingRoad]
    arrivals: Dict[str, ArrivalSpec] = field(default_factory=dict)
    sweep: Optional[Sweep] = None
    sim: Optional[SimSpec] = None
    network: Optional[RoadNetwork] = None
    paths: List[PathSpec] = field(default_factory=list)
    out_dir: Optional[str] = None
    formats: Tuple[str, ...] = ("csv", "json", "svg")

    def road(self, name: str) -> RingRoad:
        if name not in self.roads:
            raise ConfigError(f"unknown road {name!r}")
        return self.roads[name]


def _arrival(d: dict) -> ArrivalSpec:
    if ("r" in d) == ("fraction" in d):
        raise ConfigError("an arrival needs exactly one of 'r' and 'fraction'")
    r = number(d["r"]) if "r" in d else None
    frac = number(d["fraction"]) if "fraction" in d else None
    sigma = number(d["sigma"])
    if sigma < 0 or (r is not None and r < 0) or (frac is not None and frac < 0):
        raise ConfigError("arrival parameters must be nonnegative")
    return ArrivalSpec(sigma, r, frac)


def parse(doc: dict) -> ScenarioConfig:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {exc.message}") from None
    try:
        return _build(doc)
    except (CurveError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _build(doc: dict) -> ScenarioConfig:
    roads = {
        k: RingRoad(v["m"], number(v["dx"]), number(v["v"]), number(v["w"]), number(v["rho_j"]))
        for k, v in doc["roads"].items()
    }
    cfg = ScenarioConfig(roads, {k: _arrival(v) for k, v in doc.get("arrivals", {}).items()})

    if "sweep" in doc:
        s = doc["sweep"]
        road = cfg.road(s["road"])
        if "rho" in s and "grid" in s:
            raise ConfigError("sweep: give either 'rho' or 'grid', not both")
        if "grid" in s:
            n = s["grid"]
            rho = [road.rho_j * Fraction(k, n) for k in range(1, n)]
        else:
            rho = [number(x) for x in s.get("rho", [])]
        for x in rho:
            road.check_density(x)
        if s.get("arrival") is not None and s["arrival"] not in cfg.arrivals:
            raise ConfigError(f"sweep: unknown arrival {s['arrival']!r}")
        cfg.sweep = Sweep(
            s["road"],
            rho,
            s.get("arrival"),
            number(s.get("horizon", 30)),
            number(s.get("step", Fraction(1, 2))),
        )
        if cfg.sweep.step <= 0 or cfg.sweep.horizon < 0:
            raise ConfigError("sweep: step must be positive and horizon nonnegative")

    if "sim" in doc:
        s = doc["sim"]
        road = cfg.road(s["road"])
        spec = SimSpec(s["road"])
        spec.dt = number(s.get("dt", spec.dt))
        spec.horizon = number(s.get("horizon", spec.horizon))
        spec.seed = s.get("seed", spec.seed)
        spec.runs = s.get("runs", spec.runs)
        spec.densities = [number(x) for x in s.get("densities", [])]
        spec.couples = tuple(s.get("couples", spec.couples))
        if "arrival" in s:
            spec.arrival = _arrival(s["arrival"])
        if spec.dt <= 0 or spec.horizon < 0:
            raise ConfigError("sim: dt must be positive and horizon nonnegative")
        if (road.tv / spec.dt).denominator != 1 or (road.tw / spec.dt).denominator != 1:
            raise ConfigError(f"sim: dt = {spec.dt} must divide dx/v and dx/w")
        for x in spec.densities:
            road.check_density(x)
        cfg.sim = spec

    if "network" in doc:
        n = doc["network"]
        edges = {}
        for e in n["edges"]:
            if e["name"] in edges:
                raise ConfigError(f"network: duplicate edge {e['name']!r}")
            edges[e["name"]] = Edge(
                e["name"], e["src"], e["dst"], cfg.road(e["road"]), number(e["rho"]), e.get("model", "theorem1")
            )
            edges[e["name"]].road.check_density(edges[e["name"]].rho)
        merges = {}
        for mg in n.get("merges", []):
            policy = mg.get("policy", "blind")
            if policy not in POLICIES:
                raise ConfigError(f"network: unknown merge policy {policy!r}")
            cross = _arrival(mg["cross"])
            if cross.r is None:
                raise ConfigError("network: cross traffic needs an absolute rate 'r'")
            merges[mg["node"]] = Merge(mg["node"], mp.token_bucket(cross.sigma, cross.r), policy)
        try:
            cfg.network = RoadNetwork(edges, merges)
            for i, p in enumerate(n.get("paths", [])):
                cfg.network.check_path(p["edges"])
                if p["arrival"] not in cfg.arrivals:
                    raise ConfigError(f"network: unknown arrival {p['arrival']!r}")
                if cfg.arrivals[p["arrival"]].r is None:
                    raise ConfigError("network: path arrivals need an absolute rate 'r'")
                cfg.paths.append(PathSpec(p.get("name", f"path{i + 1}"), list(p["edges"]), p["arrival"]))
        except NetworkError as exc:
            raise ConfigError(f"network: {exc}") from None

    out = doc.get("output", {})
    cfg.out_dir = out.get("dir")
    if "formats" in out:
        cfg.formats = tuple(out["formats"])
    return cfg


def load(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return parse(doc)


def example1() -> dict:
    """The six-section demonstration ring as a scenario document."""
    return {
        "roads": {"ring": {"m": 6, "dx": "1", "v": "1", "w": "1/2", "rho_j": "1"}},
        "arrivals": {"A": {"sigma": "0", "fraction": "1/2"}},
        "sweep": {"road": "ring", "rho": ["1/6", "1/3", "1/2"], "arrival": "A", "horizon": "30", "step": "1/2"},
        "sim": {
            "road": "ring",
            "dt": "1/2",
            "horizon": "120",
            "seed": 0,
            "runs": 200,
            "densities": ["1/6", "1/3", "1/2"],
            "couples": ["theorem1", "relaxed"],
            "arrival": {"sigma": "1", "fraction": "3/4"},
        },
    }
