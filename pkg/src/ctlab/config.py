"""Experiment configuration (TOML with nested tables).

The key schema is fixed: [ball] holds radius/margin/tolerance/cache,
[[stack]] entries describe blocks, [suites.<name>] tables carry sample
counts, seeds and threshold overrides, [output] the artifact directory.
"""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from dataclasses import dataclass, field

from .ball import DEFAULT_TOLERANCE, DEFAULT_VERTEX_CAP, HARD_RADIUS_CAP
from .blocks import GLUE_MENU, ThickBlockSpec, ThinBlockSpec

KNOWN_SUITES = ("ball", "electro", "projections", "twist", "blocks",
                "ladder", "ct", "audit")


class ConfigError(Exception):
    pass


@dataclass
class BallConfig:
    radius: int = 6
    margin: int = 2
    tolerance: float = DEFAULT_TOLERANCE
    cache: str | None = None
    vertex_cap: int = DEFAULT_VERTEX_CAP


@dataclass
class SuiteConfig:
    name: str
    samples: int = 200
    seed: int = 7
    thresholds: dict = field(default_factory=dict)


@dataclass
class ExperimentConfig:
    ball: BallConfig
    stack: list
    suites: list          # ordered SuiteConfig entries
    out_dir: str = "out"
    svg_timestamp: bool = False
    jobs: int = 1


def _parse_stack(entries) -> list:
    out = []
    for i, e in enumerate(entries):
        kind = e.get("kind")
        if kind == "thick":
            glue = e.get("glue", "id")
            if glue not in GLUE_MENU:
                raise ConfigError(f"stack[{i}]: unknown glue {glue!r}")
            out.append(ThickBlockSpec(glue=glue))
        elif kind == "thin":
            try:
                out.append(ThinBlockSpec(curve=e["curve"], n=int(e["n"])))
            except (KeyError, ValueError) as err:
                raise ConfigError(f"stack[{i}]: {err}") from None
        else:
            raise ConfigError(f"stack[{i}]: kind must be 'thick' or 'thin'")
    return out


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "rb") as f:
            raw = tomllib.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from None
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"config is not valid TOML: {e}") from None

    b = raw.get("ball", {})
    ball = BallConfig(
        radius=int(b.get("radius", 6)),
        margin=int(b.get("margin", 2)),
        tolerance=float(b.get("tolerance", DEFAULT_TOLERANCE)),
        cache=b.get("cache"),
        vertex_cap=int(b.get("vertex_cap", DEFAULT_VERTEX_CAP)),
    )
    if ball.radius < 1 or ball.radius > HARD_RADIUS_CAP:
        raise ConfigError(f"ball.radius must be in 1..{HARD_RADIUS_CAP}")
    if not (0 <= ball.margin < ball.radius):
        raise ConfigError("ball.margin must satisfy 0 <= margin < radius")

    stack = _parse_stack(raw.get("stack", []))

    suites = []
    for name, entry in raw.get("suites", {}).items():
        if name not in KNOWN_SUITES:
            raise ConfigError(f"unknown suite {name!r}")
        suites.append(SuiteConfig(
            name=name,
            samples=int(entry.get("samples", 200)),
            seed=int(entry.get("seed", 7)),
            thresholds=dict(entry.get("thresholds", {})),
        ))
    order = {n: i for i, n in enumerate(KNOWN_SUITES)}
    suites.sort(key=lambda s: order[s.name])

    out = raw.get("output", {})
    return ExperimentConfig(
        ball=ball,
        stack=stack,
        suites=suites,
        out_dir=out.get("dir", "out"),
        svg_timestamp=bool(out.get("svg_timestamp", False)),
        jobs=int(raw.get("jobs", 1)),
    )
