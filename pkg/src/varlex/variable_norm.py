"""Modular and Luxemburg norm of the variable exponent Lebesgue space."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain_grid import GridFunction
from .errors import ConvergenceError, VarlexError
from .exponent_field import ExponentField

__all__ = ["LuxemburgResult", "modular", "luxemburg_norm", "normalize", "DEFAULT_TOL"]

DEFAULT_TOL = 1e-10
MAX_ITERATIONS = 200
_MAX_BRACKET_STEPS = 2100


@dataclass(frozen=True)
class LuxemburgResult:
    norm: float
    bracket: tuple[float, float]
    iterations: int
    residual: float

    def to_dict(self) -> dict:
        return {"norm": self.norm, "bracket": list(self.bracket), "iterations": self.iterations,
                "residual": self.residual}


def _active_pair(f: GridFunction, p: ExponentField) -> tuple[np.ndarray, np.ndarray]:
    f.domain.check_same(p.domain)
    return np.abs(f.active_values()), p.active_values()


def _modular_values(a: np.ndarray, e: np.ndarray, scale: float, cell: float) -> float:
    with np.errstate(over="ignore"):
        return float(np.sum((a / scale) ** e)) * cell


def modular(f: GridFunction, p: ExponentField) -> float:
    """Sum over active cells of ``|f|^p h^n``."""
    a, e = _active_pair(f, p)
    return _modular_values(a, e, 1.0, f.domain.cell_measure)


def luxemburg_norm(f: GridFunction, p: ExponentField, tol: float = DEFAULT_TOL) -> LuxemburgResult:
    """``inf{lam > 0 : modular(f/lam) <= 1}`` by bracketing and bisection.

    The bracket starts at ``max|f|`` times the active measure and is
    doubled or halved until it straddles the root, then bisected until its
    relative width is at most ``tol``.  The zero function has norm 0.
    """
    if not 0.0 < tol <= 1e-4:
        raise VarlexError(f"tol must lie in (0, 1e-4], got {tol!r}")
    a, e = _active_pair(f, p)
    if not np.all(np.isfinite(a)):
        raise VarlexError("function values must be finite")
    top = float(a.max())
    if top == 0.0:
        return LuxemburgResult(0.0, (0.0, 0.0), 0, 0.0)
    cell = f.domain.cell_measure

    def g(lam):
        return _modular_values(a, e, lam, cell)

    lam0 = top * f.domain.active_measure
    lo = hi = lam0
    if g(hi) > 1.0:
        for _ in range(_MAX_BRACKET_STEPS):
            lo, hi = hi, hi * 2.0
            if g(hi) <= 1.0:
                break
        else:
            raise ConvergenceError("could not bracket the Luxemburg norm from above")
    else:
        for _ in range(_MAX_BRACKET_STEPS):
            hi, lo = lo, lo / 2.0
            if g(lo) > 1.0:
                break
        else:
            raise ConvergenceError("could not bracket the Luxemburg norm from below")

    iterations = 0
    while (hi - lo) > tol * lo:
        if iterations >= MAX_ITERATIONS:
            raise ConvergenceError(f"bisection did not reach tol={tol} in {MAX_ITERATIONS} steps")
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) > 1.0:
            lo = mid
        else:
            hi = mid
        iterations += 1
    norm = 0.5 * (lo + hi)
    return LuxemburgResult(norm, (lo, hi), iterations, g(norm) - 1.0)


def normalize(f: GridFunction, p: ExponentField, tol: float = DEFAULT_TOL) -> GridFunction:
    """``f`` divided by its Luxemburg norm."""
    res = luxemburg_norm(f, p, tol)
    if res.norm == 0.0:
        raise VarlexError("cannot normalize the zero function")
    return f.scale(1.0 / res.norm)
