"""Run configuration: JSON in, validated dataclass out, and back."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .domain_grid import Domain, GridFunction, domain_from_spec, read_function_csv
from .errors import ConfigError
from .exponent_field import ExponentField, exponent_from_spec, parse_exponent_arg
from .generators import Bump, Box, Profile, random_profile
from .maximal_ops import CubeFamily
from .variable_norm import DEFAULT_TOL

__all__ = ["RunConfig", "load_config", "build_function"]

DEFAULT_DOMAIN = {"n": 1, "box": [[0.0, 1.0]], "resolution": [256], "mask": "all"}
DEFAULT_EXPONENT = {"family": "log_decay", "p_inf": 1.4, "a": 0.4}


@dataclass
class RunConfig:
    domain: dict = field(default_factory=lambda: dict(DEFAULT_DOMAIN))
    exponent: dict = field(default_factory=lambda: dict(DEFAULT_EXPONENT))
    alpha: float = 0.5
    max_side: int | None = None
    function: dict | None = None
    tol: float = DEFAULT_TOL
    lemma_tol: float = 1e-9
    seed: int = 0
    cases: int = 100
    max_c: float | None = None
    out: str | None = None
    csv: str | None = None
    base_dir: str | None = field(default=None, compare=False, repr=False)

    _FIELDS = ("domain", "exponent", "alpha", "max_side", "function", "tol", "lemma_tol",
               "seed", "cases", "max_c", "out", "csv")

    @classmethod
    def from_dict(cls, data: dict, base_dir: str | None = None) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config: top level must be a JSON object")
        unknown = sorted(set(data) - set(cls._FIELDS))
        if unknown:
            raise ConfigError(f"config.{unknown[0]}: unknown field")
        cfg = cls(**data, base_dir=base_dir)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("base_dir")
        return d

    def validate(self) -> None:
        if not isinstance(self.domain, dict):
            raise ConfigError("config.domain: must be an object")
        for key in ("box", "resolution"):
            if key not in self.domain:
                raise ConfigError(f"config.domain.{key}: missing")
        if isinstance(self.exponent, str):
            self.exponent = parse_exponent_arg(self.exponent)
        if not isinstance(self.exponent, dict) or "family" not in self.exponent:
            raise ConfigError("config.exponent: must be an object with a 'family' field")
        _number(self, "alpha", lo=0.0)
        _number(self, "tol", lo=0.0, hi=1e-4, lo_open=True)
        _number(self, "lemma_tol", lo=0.0)
        if self.max_side is not None and (not isinstance(self.max_side, int) or self.max_side < 1):
            raise ConfigError("config.max_side: must be a positive integer or null")
        for key in ("seed", "cases"):
            v = getattr(self, key)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ConfigError(f"config.{key}: must be a nonnegative integer")
        if self.max_c is not None:
            _number(self, "max_c", lo=0.0)
        if self.function is not None and (not isinstance(self.function, dict) or "kind" not in self.function):
            raise ConfigError("config.function: must be an object with a 'kind' field")

    # -- builders --

    def build_domain(self) -> Domain:
        try:
            return domain_from_spec(self.domain, self.base_dir)
        except ConfigError:
            raise
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"config.domain: {exc}") from None

    def build_exponent(self, domain: Domain) -> ExponentField:
        return exponent_from_spec(self.exponent, domain, self.base_dir)

    def build_family(self, domain: Domain) -> CubeFamily:
        return CubeFamily(self.max_side) if self.max_side else CubeFamily.default(domain)

    def build_function(self, domain: Domain) -> GridFunction:
        if self.function is None:
            raise ConfigError("config.function: required for this command")
        return build_function(self.function, domain, self.base_dir)


def _number(cfg, name, lo=None, hi=None, lo_open=False):
    v = getattr(cfg, name)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"config.{name}: must be a finite number")
    if lo is not None and (v < lo or (lo_open and v == lo)):
        raise ConfigError(f"config.{name}: out of range ({v!r})")
    if hi is not None and v > hi:
        raise ConfigError(f"config.{name}: out of range ({v!r})")
    setattr(cfg, name, float(v))


def build_function(spec: dict, domain: Domain, base_dir=None) -> GridFunction:
    """``{"kind": "csv"|"constant"|"profile"|"random", ...}`` sampled on ``domain``."""
    kind = spec.get("kind")
    try:
        if kind == "csv":
            path = Path(spec["path"])
            if not path.is_absolute() and base_dir is not None:
                path = Path(base_dir) / path
            return read_function_csv(path, domain)
        if kind == "constant":
            return GridFunction.constant(domain, float(spec["value"]))
        if kind == "profile":
            parts = []
            for c in spec["components"]:
                if c["kind"] == "box":
                    parts.append(Box(tuple(c["lo"]), tuple(c["hi"]), float(c["level"])))
                elif c["kind"] == "bump":
                    parts.append(Bump(tuple(c["center"]), float(c["radius"]), float(c["height"])))
                else:
                    raise ConfigError(f"config.function.components: unknown kind {c['kind']!r}")
            return Profile(tuple(parts)).sample(domain)
        if kind == "random":
            rng = np.random.default_rng(int(spec.get("seed", 0)))
            return random_profile(rng, domain).sample(domain)
    except KeyError as exc:
        raise ConfigError(f"config.function.{exc.args[0]}: missing") from None
    raise ConfigError(f"config.function.kind: unknown kind {kind!r}")


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None
    return RunConfig.from_dict(data, base_dir=str(path.parent))
