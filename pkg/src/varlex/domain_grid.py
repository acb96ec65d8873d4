"""Cell grids approximating an open set, grid functions and quadrature.

A :class:`Domain` is an axis-aligned box in R^n (n = 1 or 2) split into
cells of a common side ``h``.  A boolean mask selects the cells that belong
to the open set; the set is approximated from inside, so a cell is active
exactly when its centre is.  Functions are piecewise constant per cell and
vanish identically on inactive cells.
"""
from __future__ import annotations

import csv
import io
import math
import os
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Sequence, Union

import numpy as np

from .errors import ConfigError, DomainEmptyError, DomainMismatchError, SpacingError, VarlexError

__all__ = [
    "Domain",
    "GridFunction",
    "build_domain",
    "integrate",
    "domain_from_spec",
    "read_function_csv",
    "write_function_csv",
]

MaskRule = Union[Callable[[np.ndarray], np.ndarray], np.ndarray, None]

_SPACING_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class Domain:
    """Uniform cell grid on a box with an activity mask.

    ``mask`` has shape ``resolution``; axis ``i`` of the array runs along
    coordinate ``x_{i+1}``.  Cell ``j`` on axis ``i`` has centre
    ``a_i + (j + 1/2) h``.
    """

    box: tuple[tuple[float, float], ...]
    resolution: tuple[int, ...]
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        if len(self.box) not in (1, 2) or len(self.box) != len(self.resolution):
            raise VarlexError(f"dimension must be 1 or 2, got box={self.box} resolution={self.resolution}")
        for (a, b), m in zip(self.box, self.resolution):
            if int(m) != m or m < 1:
                raise VarlexError(f"resolution must be a positive integer per axis, got {self.resolution}")
            if not (math.isfinite(a) and math.isfinite(b)) or b <= a:
                raise VarlexError(f"box interval must satisfy a < b, got [{a}, {b}]")
        spacings = [(b - a) / m for (a, b), m in zip(self.box, self.resolution)]
        if not all(math.isclose(s, spacings[0], rel_tol=_SPACING_RTOL, abs_tol=0.0) for s in spacings):
            raise SpacingError(f"non-uniform spacing across axes: {spacings}")
        mask = np.asarray(self.mask, dtype=bool)
        if mask.shape != tuple(self.resolution):
            raise VarlexError(f"mask shape {mask.shape} does not match resolution {self.resolution}")
        if not mask.any():
            raise DomainEmptyError("domain is empty: no active cell")
        mask = mask.copy()
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    @property
    def n(self) -> int:
        return len(self.resolution)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.resolution)

    @property
    def h(self) -> float:
        a, b = self.box[0]
        return (b - a) / self.resolution[0]

    @property
    def cell_measure(self) -> float:
        return self.h**self.n

    @cached_property
    def active_count(self) -> int:
        return int(self.mask.sum())

    @property
    def active_measure(self) -> float:
        return self.cell_measure * self.active_count

    @property
    def size(self) -> int:
        return int(np.prod(self.resolution))

    def axis_centers(self, axis: int) -> np.ndarray:
        a, _ = self.box[axis]
        return a + (np.arange(self.resolution[axis]) + 0.5) * self.h

    @cached_property
    def centers(self) -> np.ndarray:
        """Cell centres, shape ``(*resolution, n)``."""
        grids = np.meshgrid(*(self.axis_centers(i) for i in range(self.n)), indexing="ij")
        out = np.stack(grids, axis=-1)
        out.setflags(write=False)
        return out

    @cached_property
    def radius(self) -> np.ndarray:
        """Euclidean norm of every cell centre."""
        c = self.centers
        out = np.sqrt(np.sum(c * c, axis=-1))
        out.setflags(write=False)
        return out

    @cached_property
    def active_flat(self) -> np.ndarray:
        """Flat (C order) indices of the active cells, lexicographic."""
        out = np.flatnonzero(self.mask.ravel())
        out.setflags(write=False)
        return out

    def same_as(self, other: "Domain") -> bool:
        return (
            self is other
            or (
                self.box == other.box
                and self.resolution == other.resolution
                and np.array_equal(self.mask, other.mask)
            )
        )

    def check_same(self, other: "Domain") -> None:
        if not self.same_as(other):
            raise DomainMismatchError("grid functions live on different domains")

    def refined(self, factor: int = 2) -> "Domain":
        """The same box with ``factor`` times more cells per axis.

        Each fine cell inherits the activity of its parent coarse cell.
        """
        mask = self.mask
        for axis in range(self.n):
            mask = np.repeat(mask, factor, axis=axis)
        return Domain(self.box, tuple(m * factor for m in self.resolution), mask)

    def to_spec(self) -> dict:
        spec = {"n": self.n, "box": [list(iv) for iv in self.box], "resolution": list(self.resolution)}
        spec["mask"] = "all" if self.mask.all() else "explicit"
        return spec

    def cell_label(self, index: tuple[int, ...]) -> str:
        center = tuple(round(float(c), 12) for c in self.centers[index])
        return f"cell {tuple(int(i) for i in index)} (centre {center})"


class GridFunction:
    """A real value per cell of a :class:`Domain`; zero off the mask.

    Values are copied at construction and stored read-only.
    """

    __slots__ = ("domain", "values")

    def __init__(self, domain: Domain, values):
        arr = np.array(values, dtype=np.float64)
        if arr.ndim == 1 and domain.n == 2 and arr.size == domain.size:
            arr = arr.reshape(domain.shape)
        if arr.shape != domain.shape:
            raise VarlexError(f"value shape {arr.shape} does not match grid {domain.shape}")
        if not np.all(np.isfinite(arr[domain.mask])):
            raise VarlexError("grid function values must be finite")
        arr[~domain.mask] = 0.0
        arr.setflags(write=False)
        self.domain = domain
        self.values = arr

    @classmethod
    def constant(cls, domain: Domain, value: float) -> "GridFunction":
        return cls(domain, np.full(domain.shape, float(value)))

    @classmethod
    def from_callable(cls, domain: Domain, fn: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        """Sample ``fn`` (vectorized over centres of shape (..., n)) at every cell centre."""
        return cls(domain, np.broadcast_to(fn(domain.centers), domain.shape))

    def active_values(self) -> np.ndarray:
        return self.values.ravel()[self.domain.active_flat]

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.domain, values)

    def abs(self) -> "GridFunction":
        return GridFunction(self.domain, np.abs(self.values))

    def scale(self, c: float) -> "GridFunction":
        return GridFunction(self.domain, self.values * c)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self.domain.check_same(other.domain)
        return GridFunction(self.domain, self.values + other.values)

    def __repr__(self):
        return f"GridFunction(shape={self.domain.shape}, active={self.domain.active_count})"


def build_domain(
    box: Sequence[Sequence[float]],
    resolution: Sequence[int] | int,
    mask_rule: MaskRule = None,
) -> Domain:
    """Grid the box and keep the cells whose centre satisfies ``mask_rule``.

    ``mask_rule`` is either ``None`` (every cell active), a boolean array of
    shape ``resolution``, or a predicate on cell centres.  Predicates are
    tried vectorized first (called with an array of shape ``(..., n)``) and
    fall back to one call per centre.
    """
    box_t = tuple((float(a), float(b)) for a, b in box)
    if isinstance(resolution, (int, np.integer)):
        resolution = (int(resolution),) * len(box_t)
    res_t = tuple(int(m) for m in resolution)
    if any(m < 1 for m in res_t):
        raise VarlexError(f"resolution must be >= 1 per axis, got {res_t}")
    if mask_rule is None:
        mask = np.ones(res_t, dtype=bool)
    elif callable(mask_rule):
        probe = Domain(box_t, res_t, np.ones(res_t, dtype=bool))
        mask = _evaluate_rule(mask_rule, probe.centers, res_t)
    else:
        mask = np.asarray(mask_rule, dtype=bool)
    return Domain(box_t, res_t, mask)


def _evaluate_rule(rule, centers: np.ndarray, shape) -> np.ndarray:
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out = np.asarray(rule(centers), dtype=bool)
        if out.shape == tuple(shape):
            return out
    except Exception:
        pass
    flat = centers.reshape(-1, centers.shape[-1])
    return np.array([bool(rule(c)) for c in flat]).reshape(shape)


def integrate(f: GridFunction) -> float:
    """Midpoint quadrature over the active cells."""
    d = f.domain
    return float(np.sum(f.active_values())) * d.cell_measure


# -- external formats -------------------------------------------------------


def domain_from_spec(spec: dict, base_dir: str | os.PathLike | None = None) -> Domain:
    """Build a domain from ``{n, box, resolution, mask}``.

    ``mask`` is ``"all"``, ``"disk"`` (inscribed disk), ``"disk:r"``
    (origin-centred), ``"disk:c1[,c2],r"`` or ``"csv:<path>"``.
    """
    try:
        n = int(spec.get("n", len(spec["box"])))
        box = spec["box"]
        if n == 1 and len(box) == 2 and not isinstance(box[0], (list, tuple)):
            box = [box]
        resolution = spec["resolution"]
        if isinstance(resolution, int):
            resolution = [resolution] * n
        mask_spec = spec.get("mask", "all")
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"domain: malformed object ({exc!r})") from None
    if len(box) != n or len(resolution) != n:
        raise ConfigError(f"domain: box/resolution must have n={n} entries")
    rule = _mask_rule(mask_spec, box, resolution, base_dir)
    return build_domain(box, resolution, rule)


def _mask_rule(mask_spec, box, resolution, base_dir):
    if mask_spec in (None, "all"):
        return None
    if not isinstance(mask_spec, str):
        raise ConfigError(f"domain.mask: unsupported value {mask_spec!r}")
    kind, _, arg = mask_spec.partition(":")
    if kind == "disk":
        if not arg:
            center = np.array([(a + b) / 2 for a, b in box])
            r = min((b - a) for a, b in box) / 2
        else:
            nums = [float(t) for t in arg.split(",")]
            if len(nums) == 1:
                center, r = np.zeros(len(box)), nums[0]
            elif len(nums) == len(box) + 1:
                center, r = np.array(nums[:-1]), nums[-1]
            else:
                raise ConfigError(f"domain.mask: cannot parse {mask_spec!r}")
        return lambda c: np.sqrt(np.sum((c - center) ** 2, axis=-1)) < r
    if kind == "csv":
        path = _resolve(arg, base_dir)
        probe = build_domain(box, resolution)
        g = read_function_csv(path, probe, strict_mask=False)
        return g.values != 0
    raise ConfigError(f"domain.mask: unknown mask kind {kind!r}")


def _resolve(path: str, base_dir) -> Path:
    p = Path(path)
    if not p.is_absolute() and base_dir is not None:
        p = Path(base_dir) / p
    return p


def write_function_csv(f: GridFunction, dest=None) -> str:
    """Write ``x1[,x2],value`` rows for the active cells, lexicographic order.

    Returns the CSV text; also writes it to ``dest`` (path or file) if given.
    """
    d = f.domain
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"x{i + 1}" for i in range(d.n)] + ["value"])
    centers = d.centers.reshape(-1, d.n)[d.active_flat]
    for c, v in zip(centers, f.active_values()):
        writer.writerow([repr(float(x)) for x in c] + [repr(float(v))])
    text = buf.getvalue()
    if dest is not None:
        if hasattr(dest, "write"):
            dest.write(text)
        else:
            Path(dest).write_text(text)
    return text


def _parse_csv(path) -> tuple[np.ndarray, np.ndarray]:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    if not rows:
        raise ConfigError(f"{path}: empty CSV")
    header = [h.strip() for h in rows[0]]
    if header not in (["x1", "value"], ["x1", "x2", "value"]):
        raise ConfigError(f"{path}: header must be 'x1,value' or 'x1,x2,value', got {','.join(header)}")
    data = [r for r in rows[1:] if r]
    if not data:
        raise ConfigError(f"{path}: no data rows")
    try:
        arr = np.array([[float(t) for t in r] for r in data])
    except ValueError as exc:
        raise ConfigError(f"{path}: malformed number ({exc})") from None
    if arr.ndim != 2 or arr.shape[1] != len(header):
        raise ConfigError(f"{path}: every row needs {len(header)} fields")
    return arr[:, :-1], arr[:, -1]


def _infer_domain(coords: np.ndarray) -> Domain:
    n = coords.shape[1]
    gaps = []
    for i in range(n):
        u = np.unique(coords[:, i])
        if u.size > 1:
            gaps.append(np.min(np.diff(u)))
    h = float(min(gaps)) if gaps else 1.0
    lo = coords.min(axis=0)
    hi = coords.max(axis=0)
    resolution = [int(round((hi[i] - lo[i]) / h)) + 1 for i in range(n)]
    box = [(float(lo[i] - h / 2), float(lo[i] - h / 2 + resolution[i] * h)) for i in range(n)]
    probe = Domain(tuple(box), tuple(resolution), np.ones(resolution, dtype=bool))
    idx = _locate(probe, coords)
    mask = np.zeros(resolution, dtype=bool)
    mask[idx] = True
    return Domain(probe.box, probe.resolution, mask)


def _locate(domain: Domain, coords: np.ndarray) -> tuple[np.ndarray, ...]:
    idx = []
    for i in range(domain.n):
        a, _ = domain.box[i]
        t = (coords[:, i] - a) / domain.h - 0.5
        j = np.rint(t)
        if np.any(np.abs(t - j) > 1e-6) or np.any(j < 0) or np.any(j >= domain.resolution[i]):
            raise ConfigError("CSV coordinates do not match cell centres of the domain")
        idx.append(j.astype(np.int64))
    return tuple(idx)


def read_function_csv(path, domain: Domain | None = None, strict_mask: bool = True) -> GridFunction:
    """Read a grid function written by :func:`write_function_csv`.

    Without ``domain`` the grid is inferred from the listed centres and the
    listed cells become the active set.  With ``strict_mask`` a row on an
    inactive cell is an error; omitted active cells read as 0.
    """
    coords, values = _parse_csv(path)
    if domain is None:
        domain = _infer_domain(coords)
    elif coords.shape[1] != domain.n:
        raise ConfigError(f"{path}: CSV has {coords.shape[1]} coordinates, domain has n={domain.n}")
    idx = _locate(domain, coords)
    if strict_mask and not np.all(domain.mask[idx]):
        raise ConfigError(f"{path}: row on an inactive cell")
    arr = np.zeros(domain.shape)
    arr[idx] = values
    return GridFunction(domain, arr)
