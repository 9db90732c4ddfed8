"""Observation adding: convex interpolation of enhanced and observed signals.

Decomposition is linear, and the observed signal is an in-plane mixture, so
the interpolated signal's components are exact convex combinations of the two
endpoint decompositions with the artifact part scaled by (1 - weight).  The
sweep evaluates each grid point through that identity rather than re-solving
per point: endpoints are then exact (weight 0 reproduces the enhanced
signal's metrics bit for bit, weight 1 has a zero artifact part) and nothing
drifts with grid length.  Whatever part of the observation actually falls
outside the plane is measured and reported, never silently dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .decomp import Decomposition, ReferencePair, Signal, check_compatible, decompose
from .errors import ValidationError
from .metrics import MetricsReport, sar, sdr, si_snr, snr

# Eleven-point default weight grid.
DEFAULT_GRID: tuple[float, ...] = tuple(k / 10.0 for k in range(11))


def check_weight(weight: float) -> float:
    w = float(weight)
    if not 0.0 <= w <= 1.0:
        raise ValidationError(f"observation-adding weight must lie in [0, 1], got {w}")
    return w


def observation_add(shat: Signal, y: Signal, weight: float) -> Signal:
    """Interpolate enhanced and observed signals: (1-w)*shat + w*y.

    The endpoints are exact: weight 0 returns the enhanced signal unchanged
    and weight 1 the observed signal unchanged.
    """
    w = check_weight(weight)
    check_compatible(shat, y, "observation adding")
    if w == 0.0:
        return shat
    if w == 1.0:
        return y
    return Signal((1.0 - w) * shat.samples + w * y.samples, shat.sample_rate)


@dataclass(frozen=True)
class SweepPoint:
    """Metrics for one grid weight, plus an optional external score."""

    weight: float
    report: MetricsReport
    score: float | None = None


@dataclass(frozen=True)
class SweepResult:
    """Per-weight metrics over a grid, diagnostics, and an optional selection."""

    grid: tuple[float, ...]
    points: tuple[SweepPoint, ...]
    # Inner product of the plane projection of the enhanced signal with the
    # observation; SAR is guaranteed nondecreasing along the grid when >= 0.
    alignment: float
    sar_monotone_expected: bool
    # Relative norm of the observation's component outside the plane
    # (zero for a true additive mixture).
    observation_residual: float
    selected: float | None = None
    selection_rule: str = "none"


class _OAContext:
    """Cached endpoint decompositions for evaluating arbitrary weights."""

    def __init__(self, shat: Signal, y: Signal, pair: ReferencePair):
        check_compatible(shat, y, "observation adding")
        check_compatible(shat, pair.speech, "observation adding")
        self.shat = shat
        self.y = y
        self.pair = pair
        self.base = decompose(shat, pair)
        alpha, beta = pair.plane_coefficients(y.samples)
        self.y_target = alpha * pair.speech.samples
        self.y_noise = beta * pair._noise_resid
        y_resid = y.samples - self.y_target - self.y_noise
        y_norm = float(np.linalg.norm(y.samples))
        self.observation_residual = (
            float(np.linalg.norm(y_resid)) / y_norm if y_norm > 0.0 else 0.0
        )
        plane = self.base.s_target.samples + self.base.e_noise.samples
        self.alignment = float(plane @ y.samples)

    def components(self, weight: float) -> Decomposition:
        w = check_weight(weight)
        rate = self.shat.sample_rate
        if w == 0.0:
            return self.base
        if w == 1.0:
            target = self.y_target
            noise = self.y_noise
            artifact = np.zeros_like(self.y_target)
        else:
            keep = 1.0 - w
            target = keep * self.base.s_target.samples + w * self.y_target
            noise = keep * self.base.e_noise.samples + w * self.y_noise
            artifact = keep * self.base.e_artif.samples
        return Decomposition(
            Signal(target, rate), Signal(noise, rate), Signal(artifact, rate)
        )

    def report(self, weight: float, with_si_snr: bool = True) -> MetricsReport:
        d = self.components(weight)
        si = None
        if with_si_snr:
            si = si_snr(observation_add(self.shat, self.y, weight), self.pair.speech)
        return MetricsReport(sdr_db=sdr(d), snr_db=snr(d), sar_db=sar(d), si_snr_db=si)


def evaluate_weight(
    shat: Signal,
    y: Signal,
    pair: ReferencePair,
    weight: float,
    *,
    with_si_snr: bool = True,
) -> tuple[Decomposition, MetricsReport]:
    """Decomposition and metrics of the interpolated signal at one weight."""
    ctx = _OAContext(shat, y, pair)
    return ctx.components(weight), ctx.report(weight, with_si_snr)


def _check_grid(grid: Sequence[float]) -> tuple[float, ...]:
    values = tuple(check_weight(w) for w in grid)
    if not values:
        raise ValidationError("weight grid must not be empty")
    for prev, cur in zip(values, values[1:]):
        if cur <= prev:
            raise ValidationError("weight grid must be strictly increasing")
    return values


def sweep(
    shat: Signal,
    y: Signal,
    pair: ReferencePair,
    grid: Sequence[float] | None = None,
    *,
    with_si_snr: bool = True,
) -> SweepResult:
    """Evaluate decomposition metrics of the interpolation over a weight grid."""
    values = _check_grid(DEFAULT_GRID if grid is None else grid)
    ctx = _OAContext(shat, y, pair)
    points = tuple(
        SweepPoint(weight=w, report=ctx.report(w, with_si_snr)) for w in values
    )
    return SweepResult(
        grid=values,
        points=points,
        alignment=ctx.alignment,
        sar_monotone_expected=ctx.alignment >= 0.0,
        observation_residual=ctx.observation_residual,
    )


def select_weight(
    scores: Sequence[tuple[float, float]], lower_is_better: bool = True
) -> float:
    """Pick the best-scoring weight; ties go to the smallest weight."""
    entries = [(check_weight(w), float(s)) for w, s in scores]
    if not entries:
        raise ValidationError("weight selection needs at least one score")
    weights = [w for w, _ in entries]
    if len(set(weights)) != len(weights):
        raise ValidationError("weight selection requires distinct weights")
    if lower_is_better:
        best = min(entries, key=lambda e: (e[1], e[0]))
    else:
        best = min(entries, key=lambda e: (-e[1], e[0]))
    return best[0]


def attach_scores(
    result: SweepResult,
    scores: Sequence[tuple[float, float]],
    lower_is_better: bool = True,
) -> SweepResult:
    """Join external scores onto a sweep and select the winning weight.

    Every scored weight must be a grid point; the returned result carries the
    per-point scores and the selection.
    """
    by_weight = {}
    for w, s in scores:
        w = check_weight(w)
        matches = [g for g in result.grid if math.isclose(g, w, abs_tol=1e-9)]
        if not matches:
            raise ValidationError(f"scored weight {w} is not on the sweep grid")
        if matches[0] in by_weight:
            raise ValidationError(f"weight {matches[0]} is scored more than once")
        by_weight[matches[0]] = float(s)
    points = tuple(
        replace(p, score=by_weight.get(p.weight)) for p in result.points
    )
    selected = select_weight(list(by_weight.items()), lower_is_better)
    rule = "lowest-score-smallest-weight" if lower_is_better else "highest-score-smallest-weight"
    return replace(result, points=points, selected=selected, selection_rule=rule)
