"""Hardy-Littlewood and fractional maximal operators over cell-aligned cubes.

For a side of ``k`` cells the cube placements containing cell ``x`` are the
windows starting anywhere in ``[x-k+1, x]`` along each axis; windows may
leave the box, in which case the outside contributes no mass but the cube
keeps its full measure ``(k h)^n``.

The fast path (compiled kernels in ``_kernels``) computes, per side
length, every window sum from double-double prefix sums (row prefixes,
then column prefixes of the row-window sums in 2D) and takes the maximum
over the placements containing each cell with a separable sliding-window
maximum.  :func:`naive_maximal` sums every window directly
and is the test oracle.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import _kernels, _parallel
from .domain_grid import Domain, GridFunction
from .errors import VarlexError

__all__ = [
    "CubeFamily",
    "fractional_maximal",
    "hl_maximal",
    "naive_maximal",
    "forward_window_max",
    "benchmark",
]


@dataclass(frozen=True)
class CubeFamily:
    """Cubes of side ``k h`` for ``k = 1..max_side``, at every integer offset."""

    max_side: int

    def __post_init__(self):
        if int(self.max_side) != self.max_side or self.max_side < 1:
            raise VarlexError(f"max_side must be a positive integer, got {self.max_side!r}")

    @classmethod
    def default(cls, domain: Domain) -> "CubeFamily":
        return cls(max(domain.resolution))

    @property
    def sides(self) -> range:
        return range(1, self.max_side + 1)

    def coefficients(self, h: float, n: int, alpha: float) -> np.ndarray:
        """``|Q|^(alpha/n - 1) h^n = k^(alpha-n) h^alpha`` per side length; index 0 is side 1.

        Written so that side 1 at alpha = 0 gives exactly 1.
        """
        k = np.arange(1, self.max_side + 1, dtype=np.float64)
        return k ** (alpha - n) * h**alpha


def _check_alpha(alpha: float, n: int) -> float:
    alpha = float(alpha)
    if not 0.0 <= alpha < n:
        raise VarlexError(f"alpha must lie in [0, {n}), got {alpha!r}")
    return alpha


def forward_window_max(values, width: int) -> np.ndarray:
    """``out[i] = max(values[i : i + width])`` for every full window."""
    a = np.ascontiguousarray(values, dtype=np.float64)
    if not 1 <= width <= a.size:
        raise VarlexError(f"window width must lie in [1, {a.size}], got {width}")
    out = np.empty(a.size - width + 1)
    _kernels.forward_max(a, width, out, np.empty(2 * a.size))
    return out


def fractional_maximal(f: GridFunction, alpha: float, family: CubeFamily | None = None) -> GridFunction:
    """``M_alpha f(x) = max over cubes Q containing x of |Q|^(alpha/n-1) * integral of |f| over Q``.

    ``alpha = 0`` gives the Hardy-Littlewood operator.  Work is split over
    side lengths across ``VARLEX_THREADS`` threads; the result does not
    depend on the split.
    """
    d = f.domain
    alpha = _check_alpha(alpha, d.n)
    family = family or CubeFamily.default(d)
    g = np.ascontiguousarray(np.abs(f.values))
    coef = family.coefficients(d.h, d.n, alpha)
    kernel = _kernels.maximal_1d if d.n == 1 else _kernels.maximal_2d

    def run(sides) -> np.ndarray:
        best = np.zeros(d.shape)
        kernel(g, sides[0], sides[-1] + 1, coef, best)
        return best

    chunks = _parallel.split(list(family.sides), _parallel.thread_count())
    parts = _parallel.ordered_map(run, chunks)
    out = parts[0]
    for part in parts[1:]:
        np.maximum(out, part, out=out)
    return GridFunction(d, out)


def hl_maximal(f: GridFunction, family: CubeFamily | None = None) -> GridFunction:
    """Hardy-Littlewood maximal function (uncentred, cubes)."""
    return fractional_maximal(f, 0.0, family)


def naive_maximal(f: GridFunction, alpha: float, family: CubeFamily | None = None) -> GridFunction:
    """Reference implementation: sum every cube directly, then scan every
    placement containing every cell.  O(cells * cubes); tests only."""
    d = f.domain
    alpha = _check_alpha(alpha, d.n)
    family = family or CubeFamily.default(d)
    n, h = d.n, d.h
    g = np.abs(f.values)
    best = np.zeros(d.shape)
    for k in family.sides:
        measure = (k * h) ** n
        weight = measure ** (alpha / n - 1.0)
        padded = np.pad(g, k - 1)
        sums = sliding_window_view(padded, (k,) * n).sum(axis=tuple(range(n, 2 * n))) * h**n
        containing = sliding_window_view(sums, (k,) * n).max(axis=tuple(range(n, 2 * n)))
        best = np.maximum(best, weight * containing)
    return GridFunction(d, best)


def benchmark(f: GridFunction, alpha: float, family: CubeFamily | None = None,
              repeats: int = 3, include_naive: bool = True) -> dict:
    """Cells per second for the fast path and (optionally) the naive oracle."""
    family = family or CubeFamily.default(f.domain)
    cells = f.domain.size

    def rate(fn) -> float:
        best = float("inf")
        for _ in range(repeats):
            t0 = time.perf_counter()
            fn(f, alpha, family)
            best = min(best, time.perf_counter() - t0)
        return cells / best if best > 0 else float("inf")

    out = {"cells": cells, "max_side": family.max_side, "alpha": float(alpha),
           "threads": _parallel.thread_count(), "fast_cells_per_second": rate(fractional_maximal)}
    if include_naive:
        out["naive_cells_per_second"] = rate(naive_maximal)
    return out
