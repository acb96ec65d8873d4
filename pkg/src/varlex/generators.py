"""Seeded test data: continuum function profiles, exponents and whole cases.

Profiles are defined on the continuum (boxes with corners on the grid
lines of the grid they were drawn for, and radial bumps), so one profile
can be sampled on a grid and on its refinements; this is what the
resolution-doubling studies use.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domain_grid import Domain, GridFunction, build_domain
from .exponent_field import (
    ExponentField,
    ExponentPair,
    affine_exponent,
    constant_exponent,
    derive_q,
    exponent_from_spec,
    log_decay_exponent,
)
from .variable_norm import modular, normalize


@dataclass(frozen=True)
class Box:
    lo: tuple[float, ...]
    hi: tuple[float, ...]
    level: float

    def __call__(self, c: np.ndarray) -> np.ndarray:
        inside = np.ones(c.shape[:-1], dtype=bool)
        for i, (a, b) in enumerate(zip(self.lo, self.hi)):
            inside &= (c[..., i] >= a) & (c[..., i] < b)
        return np.where(inside, self.level, 0.0)

    def to_dict(self):
        return {"kind": "box", "lo": list(self.lo), "hi": list(self.hi), "level": self.level}


@dataclass(frozen=True)
class Bump:
    center: tuple[float, ...]
    radius: float
    height: float

    def __call__(self, c: np.ndarray) -> np.ndarray:
        r2 = np.sum((c - np.asarray(self.center)) ** 2, axis=-1) / self.radius**2
        return self.height * np.clip(1.0 - r2, 0.0, None) ** 2

    def to_dict(self):
        return {"kind": "bump", "center": list(self.center), "radius": self.radius, "height": self.height}


@dataclass(frozen=True)
class Profile:
    components: tuple = ()

    def __call__(self, c: np.ndarray) -> np.ndarray:
        out = np.zeros(c.shape[:-1])
        for comp in self.components:
            out = out + comp(c)
        return out

    def sample(self, domain: Domain) -> GridFunction:
        return GridFunction.from_callable(domain, self)

    def to_dict(self):
        return {"components": [c.to_dict() for c in self.components]}


def _cell_box(rng, domain: Domain, max_cells: int, level: float) -> Box:
    # grid-aligned box around a random active cell, so it always meets the domain
    flat = domain.active_flat
    anchor = np.unravel_index(flat[int(rng.integers(0, flat.size))], domain.shape)
    lo, hi = [], []
    for axis in range(domain.n):
        m = domain.resolution[axis]
        width = int(rng.integers(1, max(1, min(max_cells, m)) + 1))
        first = max(0, int(anchor[axis]) - width + 1)
        last = min(int(anchor[axis]), m - width)
        start = int(rng.integers(first, last + 1))
        a = domain.box[axis][0]
        lo.append(a + start * domain.h)
        hi.append(a + (start + width) * domain.h)
    return Box(tuple(lo), tuple(hi), float(level))


def random_profile(rng: np.random.Generator, domain: Domain, *, components: tuple[int, int] = (1, 5),
                   min_radius: float = 0.0) -> Profile:
    """Nonnegative mixture of single-cell indicators, grid-aligned boxes and radial bumps.

    Every component is positive on at least one active cell.  Bump radii
    are drawn from ``[0.05, 0.5]`` times the box width, raised to at least
    ``min_radius``.
    """
    count = int(rng.integers(components[0], components[1] + 1))
    parts = []
    width = max(b - a for a, b in domain.box)
    for _ in range(count):
        kind = rng.integers(0, 3)
        level = float(rng.uniform(0.1, 3.0))
        if kind == 0:
            parts.append(_cell_box(rng, domain, 1, level))
        elif kind == 1:
            parts.append(_cell_box(rng, domain, max(1, max(domain.resolution) // 3), level))
        else:
            # near an active cell centre, close enough that the bump is positive there
            radius = max(float(rng.uniform(0.05, 0.5) * width), min_radius)
            cell = domain.active_flat[int(rng.integers(0, domain.active_count))]
            base = domain.centers.reshape(-1, domain.n)[cell]
            shift = rng.uniform(-1.0, 1.0, domain.n) * min(domain.h / 2, radius / (2 * np.sqrt(domain.n)))
            parts.append(Bump(tuple(float(x) for x in base + shift), radius, level))
    return Profile(tuple(parts))


def random_exponent(rng: np.random.Generator, domain: Domain, lo: float, hi: float, kind: str | None = None) -> ExponentField:
    """Exponent of the given family with values inside ``[lo, hi]``."""
    kind = kind or ("constant", "affine", "log_decay")[int(rng.integers(0, 3))]
    if kind == "constant":
        return constant_exponent(domain, float(rng.uniform(lo, hi)))
    if kind == "affine":
        span = max(b - a for a, b in domain.box)
        slope = [float(rng.uniform(-1, 1)) * (hi - lo) / span for _ in range(domain.n)]
        p0 = 0.5 * (lo + hi) - float(np.dot(slope, [0.5 * (a + b) for a, b in domain.box]))
        return affine_exponent(domain, p0, slope, lo, hi)
    if kind == "log_decay":
        return log_decay_exponent(domain, lo, float(rng.uniform(0.2, 1.0)) * (hi - lo))
    raise ValueError(f"unknown exponent family {kind!r}")


# -- whole cases ------------------------------------------------------------

LEMMA_SIZES = {1: (16, 64, 256, 1024, 4096), 2: (8, 16, 32, 64)}
_BOXES = {1: ([0.0, 1.0], [-1.0, 1.0], [0.0, 3.0]), 2: ([0.0, 1.0], [-1.0, 1.0], [-2.0, 2.0])}


@dataclass
class Case:
    case_id: str
    f: GridFunction
    pair: ExponentPair
    meta: dict = field(default_factory=dict)
    profile: Profile | None = None


def _domain(rng, n: int, m: int, masked: bool) -> Domain:
    box = _BOXES[n][int(rng.integers(0, len(_BOXES[n])))]
    box = [box] * n
    if not masked:
        return build_domain(box, m)
    center = np.array([0.5 * (a + b) for a, b in box])
    r = 0.5 * (box[0][1] - box[0][0]) * float(rng.uniform(0.6, 1.0))
    return build_domain(box, m, lambda c: np.sqrt(np.sum((c - center) ** 2, axis=-1)) < r)


def _alpha_and_exponent(rng, domain: Domain, slot: int) -> ExponentPair:
    n = domain.n
    if slot == 0:
        alpha, cap = n / 4, 4.0
    elif slot == 1:
        alpha, cap = n / 2, 2.0
    else:
        alpha, cap = None, 5.0
    hi = 1.0 + (cap - 1.0) * float(rng.uniform(0.3, 0.95))
    lo = 1.0 + (hi - 1.0) * float(rng.uniform(0.05, 0.9))
    p = random_exponent(rng, domain, lo, hi)
    if alpha is None:
        alpha = 0.9 * n / p.p_max
    return derive_q(p, alpha)


def lemma_case(index: int, seed: int = 0) -> Case:
    """Case ``index`` of the seeded lemma suite.

    Cycles through n in {1, 2}, the alpha slots {n/4, n/2, 0.9 n / sup p} and
    grid sizes; masks, boxes, exponent families and f are drawn at random.
    """
    rng = np.random.default_rng([seed, index])
    n = 1 + index % 2
    slot = (index // 2) % 3
    sizes = LEMMA_SIZES[n]
    m = sizes[(index // 6) % len(sizes)]
    domain = _domain(rng, n, m, masked=rng.random() < 0.3)
    pair = _alpha_and_exponent(rng, domain, slot)
    profile = random_profile(rng, domain)
    f = profile.sample(domain)
    if not f.values.any():
        f = GridFunction(domain, domain.mask * 1.0)
    meta = {"n": n, "grid": m, "alpha_slot": slot, "exponent": pair.p.family}
    return Case(f"lemma-{seed}-{index}", f, pair, meta, profile)


def _shrink_to_modular(profile: Profile, domain: Domain, p: ExponentField, limit: float) -> Profile:
    # peel one coarse cell off the largest box (or drop a 1-cell box) until modular <= limit
    parts = list(profile.components)
    h = domain.h
    while modular(Profile(tuple(parts)).sample(domain), p) > limit:
        sizes = [np.prod(np.subtract(b.hi, b.lo)) for b in parts]
        i = int(np.argmax(sizes))
        box = parts[i]
        widths = np.subtract(box.hi, box.lo)
        axis = int(np.argmax(widths))
        if widths[axis] > 1.5 * h:
            hi = list(box.hi)
            hi[axis] -= h
            parts[i] = Box(box.lo, tuple(hi), box.level)
        elif len(parts) > 1:
            parts.pop(i)
        else:
            raise ValueError("cannot satisfy the norm hypothesis with a single cell")
    return Profile(tuple(parts))


def prop_case(index: int, kind: str, seed: int = 0, m: int | None = None) -> Case:
    """Continuum data for the proposition checks; ``kind`` is ``"prop1"`` or ``"prop2"``.

    The data (exponent family, alpha, profile) depends only on
    ``(seed, index, m)``; realize it with :func:`realize_prop_case` at ``m``
    and at ``2m`` for a resolution-doubling study.
    """
    rng = np.random.default_rng([seed, index, 1 if kind == "prop1" else 2])
    n = 1 + index % 2
    base = m or (64 if n == 1 else 16)
    coarse = build_domain([[0.0, 1.0]] * n, base)
    probe = _alpha_and_exponent(rng, coarse, int(rng.integers(0, 3)))
    count = int(rng.integers(1, 4))
    if kind == "prop1":
        parts = [_cell_box(rng, coarse, max(1, base // 16), float(rng.uniform(1.2, 2.0))) for _ in range(count)]
        profile = _shrink_to_modular(Profile(tuple(parts)), coarse, probe.p, 0.5)
    elif kind == "prop2":
        # bumps span at least 3 base cells so both grids resolve them
        profile = random_profile(rng, coarse, components=(1, 4), min_radius=3 * coarse.h)
    else:
        raise ValueError(f"unknown proposition {kind!r}")
    meta = {"kind": kind, "n": n, "alpha": probe.alpha, "exponent": dict(probe.p.family)}
    return Case(f"{kind}-{seed}-{index}", None, None, meta, profile)


def realize_prop_case(case: Case, m: int) -> Case:
    """Sample proposition data at ``m`` cells per axis and apply the hypothesis filter.

    prop1: f = f0 / ||f0||; the profile has modular <= 1/2 and levels >= 1.2,
    so every nonzero value stays >= 1.  prop2: f = min(f0 / ||f0||, 0.99).
    """
    n = case.meta["n"]
    domain = build_domain([[0.0, 1.0]] * n, m)
    p = exponent_from_spec(case.meta["exponent"], domain)
    pair = derive_q(p, case.meta["alpha"])
    f0 = case.profile.sample(domain)
    f = normalize(f0, p)
    if case.meta["kind"] == "prop2":
        f = GridFunction(domain, np.minimum(f.values, 0.99))
    return Case(case.case_id, f, pair, dict(case.meta, grid=m), case.profile)


def sweep_family(domain: Domain, seed: int, cases: int):
    """Seeded bump/indicator mixtures on ``domain``, as ``(case_id, profile)`` pairs."""
    out = []
    for i in range(cases):
        rng = np.random.default_rng([seed, i, 7])
        out.append((f"sweep-{seed}-{i}", random_profile(rng, domain)))
    return out
