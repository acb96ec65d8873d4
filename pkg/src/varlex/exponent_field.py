"""Variable exponents p(.), the derived exponent q(.), tail suprema, and
log-Hölder constants."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _parallel
from .domain_grid import Domain, GridFunction, read_function_csv
from .errors import ConfigError, ExponentRangeError, VarlexError

__all__ = [
    "ExponentField",
    "ExponentPair",
    "derive_q",
    "local_log_holder_constant",
    "decay_log_holder_constant",
    "tail_sup",
    "constant_exponent",
    "affine_exponent",
    "log_decay_exponent",
    "exponent_from_spec",
    "parse_exponent_arg",
]

EXHAUSTIVE_PAIR_LIMIT = 10**7
_PAIR_BLOCK = 1 << 21
_LOCAL_RADIUS = 0.5


class ExponentField:
    """An exponent function with ``1 < inf p <= sup p < inf`` on the active cells."""

    __slots__ = ("function", "p_min", "p_max", "family")

    def __init__(self, function: GridFunction, family: dict | None = None):
        vals = function.active_values()
        i = int(np.argmin(vals))
        if not vals[i] > 1.0:
            cell = np.unravel_index(function.domain.active_flat[i], function.domain.shape)
            raise ExponentRangeError(
                f"exponent must exceed 1 everywhere; p = {vals[i]!r} at {function.domain.cell_label(cell)}"
            )
        self.function = function
        self.p_min = float(vals[i])
        self.p_max = float(np.max(vals))
        self.family = family or {"family": "grid"}

    @property
    def domain(self) -> Domain:
        return self.function.domain

    @property
    def values(self) -> np.ndarray:
        return self.function.values

    def active_values(self) -> np.ndarray:
        return self.function.active_values()

    def __repr__(self):
        return f"ExponentField(p_min={self.p_min:.6g}, p_max={self.p_max:.6g}, {self.family})"


@dataclass(frozen=True)
class ExponentPair:
    """``p``, ``alpha`` and ``q`` with ``1/q = 1/p - alpha/n`` cellwise."""

    p: ExponentField
    alpha: float
    q: ExponentField

    @property
    def domain(self) -> Domain:
        return self.p.domain

    @property
    def n(self) -> int:
        return self.p.domain.n

    def holder_identity_residual(self) -> float:
        """max |p/q + alpha p/n - 1| over active cells."""
        p = self.p.active_values()
        q = self.q.active_values()
        return float(np.max(np.abs(p / q + self.alpha * p / self.n - 1.0)))

    def reciprocal_identity_residual(self) -> float:
        """max |1/q - (1/p - alpha/n)| over active cells."""
        p = self.p.active_values()
        q = self.q.active_values()
        return float(np.max(np.abs(1.0 / q - (1.0 / p - self.alpha / self.n))))


def derive_q(p: ExponentField, alpha: float) -> ExponentPair:
    """Pair ``p`` with ``alpha`` and compute ``q = n p / (n - alpha p)``."""
    n = p.domain.n
    alpha = float(alpha)
    if not 0.0 < alpha < n:
        raise ExponentRangeError(f"alpha must lie in (0, {n}), got {alpha!r}")
    vals = p.active_values()
    i = int(np.argmax(vals))
    if not vals[i] * alpha < n:
        cell = np.unravel_index(p.domain.active_flat[i], p.domain.shape)
        raise ExponentRangeError(
            f"sup p must be < n/alpha = {n / alpha!r}; p = {vals[i]!r} at {p.domain.cell_label(cell)}"
        )
    mask = p.domain.mask
    pv = p.values
    q = np.zeros_like(pv)
    q[mask] = n * pv[mask] / (n - alpha * pv[mask])
    qfam = {"family": "derived_q", "alpha": alpha}
    return ExponentPair(p, alpha, ExponentField(GridFunction(p.domain, q), qfam))


def tail_sup(q: ExponentField) -> GridFunction:
    """``I_q(x) = max{q(y) : |y| >= |x|}`` over active cells.

    Cells at equal radius are all part of each other's tail.
    """
    d = q.domain
    flat = d.active_flat
    r = d.radius.ravel()[flat]
    v = q.values.ravel()[flat]
    order = np.argsort(r, kind="stable")
    rs = r[order]
    suffix = np.maximum.accumulate(v[order][::-1])[::-1]
    first = np.searchsorted(rs, rs, side="left")
    out = np.zeros(d.size)
    out[flat[order]] = suffix[first]
    return GridFunction(d, out.reshape(d.shape))


def decay_log_holder_constant(p: ExponentField) -> float:
    """Smallest C with ``|p(x)-p(y)| log(e+|x|) <= C`` for all active pairs, ``|y| >= |x|``.

    For fixed x the largest oscillation over the tail is reached at the tail
    maximum or the tail minimum, so one radius sort replaces the pair scan.
    """
    d = p.domain
    if d.active_count < 2:
        raise VarlexError("log-Hölder constants need at least 2 active cells")
    flat = d.active_flat
    r = d.radius.ravel()[flat]
    v = p.values.ravel()[flat]
    order = np.argsort(r, kind="stable")
    rs, vs = r[order], v[order]
    first = np.searchsorted(rs, rs, side="left")
    tail_max = np.maximum.accumulate(vs[::-1])[::-1][first]
    tail_min = np.minimum.accumulate(vs[::-1])[::-1][first]
    osc = np.maximum(tail_max - vs, vs - tail_min)
    return float(np.max(osc * np.log(math.e + rs)))


def local_log_holder_constant(
    p: ExponentField,
    *,
    pair_limit: int = EXHAUSTIVE_PAIR_LIMIT,
    seed: int = 0,
) -> float:
    """Smallest C with ``|p(x)-p(y)| (-log|x-y|) <= C`` over active pairs, ``0 < |x-y| < 1/2``.

    Exhaustive while the number of unordered pairs is at most ``pair_limit``;
    beyond that a seeded stratified sample (every cell, a fixed number of
    random partners plus its grid neighbours) is scanned.  Returns 0 when
    no pair qualifies.
    """
    d = p.domain
    N = d.active_count
    if N < 2:
        raise VarlexError("log-Hölder constants need at least 2 active cells")
    flat = d.active_flat
    centers = d.centers.reshape(-1, d.n)[flat]
    v = p.values.ravel()[flat]
    if N * (N - 1) // 2 <= pair_limit:
        return _exhaustive_local(centers, v)
    return _sampled_local(p, centers, v, pair_limit, seed)


def _pair_terms(ci: np.ndarray, cj: np.ndarray, vi: np.ndarray, vj: np.ndarray) -> float:
    diff = ci - cj
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    ok = (dist > 0) & (dist < _LOCAL_RADIUS)
    if not ok.any():
        return 0.0
    return float(np.max(np.abs(vi - vj)[ok] * -np.log(dist[ok])))


def _exhaustive_local(centers: np.ndarray, v: np.ndarray) -> float:
    N = len(v)
    rows = max(1, _PAIR_BLOCK // N)
    blocks = [(i0, min(N, i0 + rows)) for i0 in range(0, N, rows)]

    def scan(block):
        i0, i1 = block
        ci = centers[i0:i1, None, :]
        cj = centers[None, i0:, :]
        return _pair_terms(ci, cj, v[i0:i1, None], v[None, i0:])

    return max(_parallel.ordered_map(scan, blocks))


def _sampled_local(p: ExponentField, centers, v, pair_limit, seed) -> float:
    N = len(v)
    per_cell = max(1, pair_limit // N)
    rng = np.random.default_rng(seed)
    best = 0.0
    rows = max(1, _PAIR_BLOCK // per_cell)
    for i0 in range(0, N, rows):
        i1 = min(N, i0 + rows)
        partners = rng.integers(0, N, size=(i1 - i0, per_cell))
        best = max(best, _pair_terms(centers[i0:i1, None, :], centers[partners], v[i0:i1, None], v[partners]))
    return max(best, _neighbour_local(p, reach=2))


def _neighbour_local(p: ExponentField, reach: int) -> float:
    d = p.domain
    vals, mask, cen = p.values, d.mask, d.centers
    best = 0.0
    offsets = [(o,) for o in range(1, reach + 1)] if d.n == 1 else [
        (a, b) for a in range(0, reach + 1) for b in range(-reach, reach + 1) if (a, b) > (0, 0)
    ]
    for off in offsets:
        src, dst = [], []
        for o, m in zip(off, d.shape):
            if o >= 0:
                src.append(slice(0, m - o))
                dst.append(slice(o, m))
            else:
                src.append(slice(-o, m))
                dst.append(slice(0, m + o))
        src, dst = tuple(src), tuple(dst)
        both = mask[src] & mask[dst]
        if both.any():
            best = max(best, _pair_terms(cen[src][both], cen[dst][both], vals[src][both], vals[dst][both]))
    return best


# -- exponent families ------------------------------------------------------


def constant_exponent(domain: Domain, p0: float) -> ExponentField:
    return ExponentField(GridFunction.constant(domain, p0), {"family": "constant", "p0": float(p0)})


def affine_exponent(domain: Domain, p0: float, slope, clamp_lo=None, clamp_hi=None) -> ExponentField:
    """``p(x) = clip(p0 + slope . x, clamp_lo, clamp_hi)``; a scalar slope applies to every axis."""
    slope_v = np.broadcast_to(np.asarray(slope, dtype=float), (domain.n,))
    vals = p0 + domain.centers @ slope_v
    if clamp_lo is not None or clamp_hi is not None:
        vals = np.clip(vals, clamp_lo, clamp_hi)
    fam = {"family": "affine", "p0": float(p0), "slope": slope_v.tolist() if np.ndim(slope) else float(slope),
           "clamp_lo": clamp_lo, "clamp_hi": clamp_hi}
    return ExponentField(GridFunction(domain, vals), fam)


def log_decay_exponent(domain: Domain, p_inf: float, a: float) -> ExponentField:
    """``p(x) = p_inf + a / log(e + |x|)``."""
    vals = p_inf + a / np.log(math.e + domain.radius)
    return ExponentField(GridFunction(domain, vals), {"family": "log_decay", "p_inf": float(p_inf), "a": float(a)})


def exponent_from_spec(spec, domain: Domain, base_dir=None) -> ExponentField:
    """Build an exponent from a config dict or a short string form."""
    if isinstance(spec, str):
        spec = parse_exponent_arg(spec)
    if not isinstance(spec, dict) or "family" not in spec:
        raise ConfigError(f"exponent: expected an object with a 'family' field, got {spec!r}")
    fam = spec["family"]
    try:
        if fam == "constant":
            return constant_exponent(domain, float(spec["p0"]))
        if fam == "affine":
            return affine_exponent(domain, float(spec["p0"]), spec["slope"], spec.get("clamp_lo"), spec.get("clamp_hi"))
        if fam == "log_decay":
            return log_decay_exponent(domain, float(spec["p_inf"]), float(spec["a"]))
        if fam == "csv":
            path = Path(spec["path"])
            if not path.is_absolute() and base_dir is not None:
                path = Path(base_dir) / path
            return ExponentField(read_function_csv(path, domain), {"family": "csv", "path": str(spec["path"])})
    except KeyError as exc:
        raise ConfigError(f"exponent: family {fam!r} is missing parameter {exc.args[0]!r}") from None
    raise ConfigError(f"exponent.family: unknown family {fam!r}")


def parse_exponent_arg(text: str) -> dict:
    """``const:2``, ``affine:p0,slope,lo,hi``, ``log_decay:p_inf,a``, ``csv:path`` or a JSON file path."""
    kind, sep, arg = text.partition(":")
    if not sep:
        path = Path(text)
        try:
            spec = json.loads(path.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read exponent file {text}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{text}: malformed JSON ({exc.msg})") from None
        spec = spec.get("exponent", spec)
        if isinstance(spec, dict) and spec.get("family") == "csv":
            spec = dict(spec, path=str(path.parent / spec["path"]))
        return spec
    if kind == "csv":
        return {"family": "csv", "path": arg}
    try:
        nums = [float(t) for t in arg.split(",")] if arg else []
    except ValueError:
        raise ConfigError(f"exponent: cannot parse {text!r}") from None
    if kind in ("const", "constant") and len(nums) == 1:
        return {"family": "constant", "p0": nums[0]}
    if kind == "affine" and len(nums) in (2, 4):
        lo, hi = (nums[2], nums[3]) if len(nums) == 4 else (None, None)
        return {"family": "affine", "p0": nums[0], "slope": nums[1], "clamp_lo": lo, "clamp_hi": hi}
    if kind == "log_decay" and len(nums) == 2:
        return {"family": "log_decay", "p_inf": nums[0], "a": nums[1]}
    raise ConfigError(f"exponent: cannot parse {text!r}")
