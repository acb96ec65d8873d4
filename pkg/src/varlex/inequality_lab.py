"""Pointwise inequalities between the fractional and the Hardy-Littlewood
maximal operators, checked on grid functions.

* :func:`verify_lemma` checks

      M_a f(x) <= M(|f|^{(p/q) n/(n-a)})(x)^{1-a/n} * (int |f|^p)^{a/n}

  which holds exactly in the discrete model (Hölder on each cube, using
  p/q + a p/n = 1), so the tolerance only absorbs rounding.
* :func:`verify_prop1` / :func:`verify_prop2` measure the smallest
  constant C that fits ``M_a f <= C (M f)^{p/q}`` (values 0 or >= 1), resp.
  ``M_a f <= C (M f)^{p/I_q}`` (values in [0, 1)), on the given data.  The
  measured value is only a lower bound for any admissible C.
* :func:`bound_sweep` records ``||M_a f||_q / ||f||_p`` over a family of f.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import _parallel
from .domain_grid import GridFunction
from .errors import FamilyMismatchError, HypothesisViolation
from .exponent_field import (
    ExponentField,
    ExponentPair,
    decay_log_holder_constant,
    local_log_holder_constant,
    tail_sup,
)
from .maximal_ops import CubeFamily, fractional_maximal, hl_maximal
from .variable_norm import DEFAULT_TOL, luxemburg_norm, modular

__all__ = [
    "LEMMA_TOL",
    "NORM_SLACK",
    "VerificationReport",
    "SweepReport",
    "composite_power",
    "composite_modular_identity",
    "verify_lemma",
    "verify_prop1",
    "verify_prop2",
    "bound_sweep",
    "pointwise_ratio",
]

LEMMA_TOL = 1e-9
NORM_SLACK = 1e-9


@dataclass
class VerificationReport:
    case_id: str
    mode: str
    worst_ratio: float
    empirical_constant: float | None
    passed: bool
    metadata: dict = field(default_factory=dict)
    lhs: np.ndarray | None = field(default=None, repr=False)
    rhs: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self, dump_fields: bool = False) -> dict:
        out = {
            "case_id": self.case_id,
            "mode": self.mode,
            "worst_ratio": _json_float(self.worst_ratio),
            "observed_C": _json_float(self.empirical_constant),
            "pass": bool(self.passed),
            "metadata": self.metadata,
        }
        if dump_fields and self.lhs is not None:
            out["lhs"] = [float(v) for v in self.lhs]
            out["rhs"] = [float(v) for v in self.rhs]
        return out


def _json_float(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else str(v)


def pointwise_ratio(lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """lhs / rhs with 0/0 -> 0 and x/0 -> inf for x > 0."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    out = np.zeros(np.broadcast(lhs, rhs).shape)
    pos = rhs > 0
    out[pos] = lhs[pos] / rhs[pos]
    out[~pos & (lhs > 0)] = np.inf
    return out


def _check_pair(f: GridFunction, pair: ExponentPair) -> None:
    f.domain.check_same(pair.domain)


def _meta(pair: ExponentPair, family: CubeFamily, **extra) -> dict:
    d = pair.domain
    meta = {
        "alpha": pair.alpha,
        "n": d.n,
        "grid": list(d.resolution),
        "box": [list(iv) for iv in d.box],
        "active_cells": d.active_count,
        "max_side": family.max_side,
        "exponent": pair.p.family,
        "p_min": pair.p.p_min,
        "p_max": pair.p.p_max,
    }
    meta.update(extra)
    return meta


def composite_power(f: GridFunction, pair: ExponentPair) -> GridFunction:
    """``|f|^{(p/q) * n/(n-a)}`` cellwise."""
    _check_pair(f, pair)
    n, a = pair.n, pair.alpha
    mask = pair.domain.mask
    expo = np.ones(pair.domain.shape)
    expo[mask] = (pair.p.values[mask] / pair.q.values[mask]) * (n / (n - a))
    return GridFunction(f.domain, np.abs(f.values) ** expo)


def composite_modular_identity(f: GridFunction, pair: ExponentPair) -> float:
    """``|modular(composite_power(f), q(1-a/n)) - modular(f, p)|``.

    The exponents multiply back to p, so the two modulars agree up to
    rounding.
    """
    g = composite_power(f, pair)
    n, a = pair.n, pair.alpha
    r = ExponentField(pair.q.function.scale(1.0 - a / n), {"family": "q*(1-alpha/n)"})
    return abs(modular(g, r) - modular(f, pair.p))


def verify_lemma(
    f: GridFunction,
    pair: ExponentPair,
    family: CubeFamily | None = None,
    *,
    rhs_family: CubeFamily | None = None,
    case_id: str = "lemma",
    tol: float = LEMMA_TOL,
    keep_fields: bool = False,
) -> VerificationReport:
    """Check the Hölder-type bound of M_a f by M of the composite power."""
    _check_pair(f, pair)
    family = family or CubeFamily.default(f.domain)
    rhs_family = rhs_family or family
    if rhs_family != family:
        raise FamilyMismatchError(
            f"both operators must range over the same cubes (max_side {family.max_side} vs {rhs_family.max_side})"
        )
    n, a = pair.n, pair.alpha
    mask = f.domain.mask
    lhs = fractional_maximal(f, a, family).values[mask]
    mg = hl_maximal(composite_power(f, pair), family).values[mask]
    mod = modular(f, pair.p)
    rhs = mg ** (1.0 - a / n) * mod ** (a / n)
    ratio = pointwise_ratio(lhs, rhs)
    worst = float(ratio.max())
    return VerificationReport(
        case_id=case_id,
        mode="lemma",
        worst_ratio=worst,
        empirical_constant=None,
        passed=worst <= 1.0 + tol,
        metadata=_meta(pair, family, tolerance=tol, modular=mod),
        lhs=lhs if keep_fields else None,
        rhs=rhs if keep_fields else None,
    )


def _first_bad(f: GridFunction, bad: np.ndarray) -> str:
    idx = tuple(int(i[0]) for i in np.nonzero(bad))
    return f"{f.domain.cell_label(idx)}, f = {float(f.values[idx])!r}"


def _check_norm(f: GridFunction, p: ExponentField, tol: float) -> float:
    norm = luxemburg_norm(f, p, tol).norm
    if norm > 1.0 + NORM_SLACK:
        raise HypothesisViolation(f"hypothesis ‖f‖_p(.)≤1 violated: norm = {norm!r}")
    return norm


def _proposition(f, pair, family, exponent, mode, case_id, keep_fields, extra) -> VerificationReport:
    mask = f.domain.mask
    lhs = fractional_maximal(f, pair.alpha, family).values[mask]
    mf = hl_maximal(f, family).values[mask]
    rhs = mf ** exponent
    ratio = pointwise_ratio(lhs, rhs)
    observed = float(ratio.max())
    return VerificationReport(
        case_id=case_id,
        mode=mode,
        worst_ratio=observed,
        empirical_constant=observed,
        passed=math.isfinite(observed),
        metadata=_meta(pair, family, **extra),
        lhs=lhs if keep_fields else None,
        rhs=rhs if keep_fields else None,
    )


def verify_prop1(
    f: GridFunction,
    pair: ExponentPair,
    family: CubeFamily | None = None,
    *,
    case_id: str = "prop1",
    tol: float = DEFAULT_TOL,
    keep_fields: bool = False,
    log_holder: bool = True,
) -> VerificationReport:
    """Observed C in ``M_a f <= C (M f)^{p/q}`` for f with values 0 or >= 1 and norm <= 1."""
    _check_pair(f, pair)
    family = family or CubeFamily.default(f.domain)
    mask = f.domain.mask
    v = f.values
    bad = mask & ~((v == 0.0) | (v >= 1.0))
    if bad.any():
        raise HypothesisViolation(f"hypothesis f(x)≥1 or f(x)=0 violated at {_first_bad(f, bad)}")
    norm = _check_norm(f, pair.p, tol)
    p, q = pair.p.values[mask], pair.q.values[mask]
    extra = {"norm": norm}
    if log_holder and f.domain.active_count > 1:
        extra["local_log_holder_C"] = local_log_holder_constant(pair.p)
    return _proposition(f, pair, family, p / q, "prop1", case_id, keep_fields, extra)


def verify_prop2(
    f: GridFunction,
    pair: ExponentPair,
    family: CubeFamily | None = None,
    *,
    case_id: str = "prop2",
    tol: float = DEFAULT_TOL,
    keep_fields: bool = False,
    log_holder: bool = True,
) -> VerificationReport:
    """Observed C in ``M_a f <= C (M f)^{p/I_q}``, ``I_q(x) = sup_{|y|>=|x|} q(y)``,
    for f with values in [0, 1) and norm <= 1."""
    _check_pair(f, pair)
    family = family or CubeFamily.default(f.domain)
    mask = f.domain.mask
    v = f.values
    bad = mask & ~((v >= 0.0) & (v < 1.0))
    if bad.any():
        raise HypothesisViolation(f"hypothesis 0≤f(x)<1 violated at {_first_bad(f, bad)}")
    norm = _check_norm(f, pair.p, tol)
    iq = tail_sup(pair.q).values[mask]
    extra = {"norm": norm}
    if log_holder and f.domain.active_count > 1:
        extra["decay_log_holder_C"] = decay_log_holder_constant(pair.p)
    return _proposition(f, pair, family, pair.p.values[mask] / iq, "prop2", case_id, keep_fields, extra)


@dataclass
class SweepReport:
    ratios: list[tuple[str, float]]
    max_ratio: float
    median_ratio: float
    argmax_id: str
    skipped: list[str]
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "max_ratio": self.max_ratio,
            "median_ratio": self.median_ratio,
            "argmax_id": self.argmax_id,
            "cases": len(self.ratios),
            "skipped": self.skipped,
            "metadata": self.metadata,
        }

    def to_csv(self) -> str:
        lines = ["case_id,ratio"] + [f"{cid},{r!r}" for cid, r in self.ratios]
        return "\n".join(lines) + "\n"


def bound_sweep(
    generator: Iterable[tuple[str, GridFunction]] | Callable[[int], tuple[str, GridFunction]],
    pair: ExponentPair,
    family: CubeFamily | None = None,
    *,
    cases: int | None = None,
    tol: float = DEFAULT_TOL,
) -> SweepReport:
    """``||M_a f||_q / ||f||_p`` for every ``(case_id, f)`` produced by ``generator``.

    ``generator`` is an iterable of pairs, or a callable taking the case
    index (then ``cases`` is required).  Zero functions are skipped.
    Cases run on ``VARLEX_THREADS`` threads; results are kept in input order.
    """
    family = family or CubeFamily.default(pair.domain)
    items = [generator(i) for i in range(cases)] if callable(generator) else list(generator)

    def one(item):
        cid, f = item
        _check_pair(f, pair)
        denom = luxemburg_norm(f, pair.p, tol).norm
        if denom == 0.0:
            return cid, None
        num = luxemburg_norm(fractional_maximal(f, pair.alpha, family), pair.q, tol).norm
        return cid, num / denom

    results = _parallel.ordered_map(one, items)
    ratios = [(cid, r) for cid, r in results if r is not None]
    skipped = [cid for cid, r in results if r is None]
    if not ratios:
        raise HypothesisViolation("bound_sweep: every generated function is zero")
    values = np.array([r for _, r in ratios])
    imax = int(np.argmax(values))
    return SweepReport(
        ratios=ratios,
        max_ratio=float(values[imax]),
        median_ratio=float(np.median(values)),
        argmax_id=ratios[imax][0],
        skipped=skipped,
        metadata=_meta(pair, family, tolerance=tol),
    )
