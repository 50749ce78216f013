"""Convergence diagnostics: finite-time walk versus the limit law.

The headline metric is the Kolmogorov-Smirnov distance between the
empirical CDF of the rescaled position and the limit CDF (the limit
statement is about CDFs, and total variation against a continuous density
is ill-defined for a lattice distribution).  Also provided: mass inside
the forbidden gap, mirror asymmetry, and moment-error sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NoGap
from .kspace import DEFAULT_CELLS, kspace_moment, limit_cdf
from .limit import LimitModel, support_intervals
from .walk import (
    PositionDistribution,
    canonical_protocol,
    distribution,
    empirical_moment,
    evolve,
    step,
)

__all__ = [
    "EmpiricalCdf",
    "ComparisonReport",
    "MomentErrors",
    "empirical_cdf",
    "ks_statistic",
    "ks_distance",
    "gap_mass",
    "mirror_asymmetry",
    "moment_report",
    "compare_distribution",
    "compare_walk",
    "offphase_compare",
    "GAP_MARGIN",
]

# Rescaled margin kept between the gap edge and the mass window, so finite-time
# leakage across the sharp analytic boundary is not counted.
GAP_MARGIN = 0.01


@dataclass(frozen=True, eq=False)
class EmpiricalCdf:
    """Right-continuous step CDF of a rescaled lattice distribution."""

    values: np.ndarray
    cumulative: np.ndarray
    scale: float

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        cum = np.asarray(self.cumulative, dtype=np.float64)
        if vals.shape != cum.shape or vals.ndim != 1:
            raise ValueError("values and cumulative must be matching 1-d arrays")
        if np.any(np.diff(cum) < 0):
            raise ValueError("cumulative must be nondecreasing")
        if cum.size and abs(cum[-1] - 1.0) > 1e-10:
            raise ValueError(f"cumulative must end at 1, got {cum[-1]!r}")
        vals.setflags(write=False)
        cum.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "cumulative", cum)

    def at(self, x: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.values, x, side="right")
        padded = np.concatenate(([0.0], self.cumulative))
        return padded[idx]


def empirical_cdf(dist: PositionDistribution, scale: float) -> EmpiricalCdf:
    if scale <= 0:
        raise ValueError("scale must be positive")
    return EmpiricalCdf(
        values=dist.positions / float(scale),
        cumulative=np.cumsum(dist.probabilities),
        scale=float(scale),
    )


def ks_statistic(
    ecdf: EmpiricalCdf,
    cdf: Callable[[np.ndarray], np.ndarray],
    extra_points: Sequence[float] = (),
) -> float:
    """Sup-distance between a step CDF and a continuous CDF.

    Both one-sided limits at every jump are checked; between jumps the
    continuous CDF is monotone, so the supremum over each flat piece is
    attained at its ends.  Extra evaluation points may be supplied (kinks
    of the continuous CDF, typically support endpoints).
    """
    reference = np.asarray(cdf(ecdf.values), dtype=np.float64)
    upper = ecdf.cumulative
    lower = np.concatenate(([0.0], ecdf.cumulative[:-1]))
    worst = float(
        max(np.max(np.abs(upper - reference)), np.max(np.abs(lower - reference)))
    )
    if len(extra_points):
        pts = np.asarray(extra_points, dtype=np.float64)
        gap = np.abs(ecdf.at(pts) - np.asarray(cdf(pts), dtype=np.float64))
        worst = max(worst, float(np.max(gap)))
    return worst


def ks_distance(
    dist: PositionDistribution,
    scale: float,
    model: LimitModel,
    *,
    cells: int = DEFAULT_CELLS,
) -> float:
    """KS distance between the rescaled position ``X/scale`` and the limit law."""
    ecdf = empirical_cdf(dist, scale)
    endpoints = support_intervals(model).endpoint_values()
    return ks_statistic(
        ecdf,
        lambda xs: limit_cdf(model, xs, cells=cells, refine=False),
        extra_points=endpoints,
    )


def gap_mass(
    dist: PositionDistribution,
    scale: float,
    model: LimitModel,
    *,
    margin: float = GAP_MARGIN,
) -> float:
    """Probability the rescaled walker sits inside the forbidden gap.

    Counts mass at ``|x/scale| <= gap_edge - margin``.  Raises
    :class:`NoGap` when the support has no gap around the origin.
    """
    lo = support_intervals(model).positive[0]
    if lo <= 0.0:
        raise NoGap("support branches overlap at the origin; there is no gap")
    cut = lo - margin
    y = np.abs(dist.positions / float(scale))
    return float(np.sum(dist.probabilities[y <= cut]))


def mirror_asymmetry(dist: PositionDistribution) -> float:
    """KS distance between a lattice distribution and its mirror image."""
    pos = dist.positions
    prob = dist.probabilities
    points = np.union1d(pos, -pos)
    cum = np.concatenate(([0.0], np.cumsum(prob)))
    forward = cum[np.searchsorted(pos, points, side="right")]
    # P(-X <= y) = 1 - P(X < -y)
    mirrored = 1.0 - cum[np.searchsorted(pos, -points, side="left")]
    return float(np.max(np.abs(forward - mirrored)))


@dataclass(frozen=True)
class MomentErrors:
    """Absolute moment errors |empirical - limit| at one walk time."""

    time: int
    errors: tuple[tuple[int, float], ...]


def moment_report(
    model: LimitModel,
    times: Sequence[int],
    r_max: int = 4,
    *,
    cells: int = DEFAULT_CELLS,
) -> list[MomentErrors]:
    """Moment-error sweep over walk times (headline check uses multiples of 3)."""
    if r_max > 8:
        raise ValueError("moment order must be at most 8")
    reference = {r: kspace_moment(model, r, cells=cells) for r in range(r_max + 1)}
    protocol = canonical_protocol(model.coin)
    out = []
    for t in times:
        dist = distribution(evolve(model.spin, protocol, t))
        errors = tuple(
            (r, abs(empirical_moment(dist, r, t) - reference[r]))
            for r in range(r_max + 1)
        )
        out.append(MomentErrors(time=t, errors=errors))
    return out


@dataclass(frozen=True)
class ComparisonReport:
    """Distances between one finite-time distribution and the limit law."""

    time: int
    coin_label: str
    spin: tuple[complex, complex]
    ks_distance: float
    moment_errors: tuple[tuple[int, float], ...]
    gap_mass: float | None
    mirror_asymmetry: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.ks_distance <= 1.0:
            raise ValueError("KS distance must lie in [0, 1]")
        if any(err < 0.0 for _, err in self.moment_errors):
            raise ValueError("moment errors must be nonnegative")
        if self.gap_mass is not None and self.gap_mass < 0.0:
            raise ValueError("gap mass must be nonnegative")
        if self.mirror_asymmetry < 0.0:
            raise ValueError("mirror asymmetry must be nonnegative")


def compare_distribution(
    model: LimitModel,
    dist: PositionDistribution,
    scale: float,
    *,
    r_max: int = 4,
    cells: int = DEFAULT_CELLS,
) -> ComparisonReport:
    """Full comparison of one distribution against the limit law of ``model``."""
    ks = ks_distance(dist, scale, model, cells=cells)
    moments = tuple(
        (r, abs(empirical_moment(dist, r, scale) - kspace_moment(model, r, cells=cells)))
        for r in range(r_max + 1)
    )
    try:
        gap = gap_mass(dist, scale, model)
    except NoGap:
        gap = None
    return ComparisonReport(
        time=dist.t,
        coin_label=model.coin.label(),
        spin=(model.spin.alpha, model.spin.beta),
        ks_distance=ks,
        moment_errors=moments,
        gap_mass=gap,
        mirror_asymmetry=mirror_asymmetry(dist),
    )


def compare_walk(
    model: LimitModel,
    time: int,
    *,
    r_max: int = 4,
    cells: int = DEFAULT_CELLS,
) -> ComparisonReport:
    """Evolve the canonical cycle to ``time`` and compare against the limit law."""
    protocol = canonical_protocol(model.coin)
    dist = distribution(evolve(model.spin, protocol, time))
    return compare_distribution(model, dist, time, r_max=r_max, cells=cells)


def offphase_compare(
    model: LimitModel,
    t: int,
    *,
    r_max: int = 4,
    cells: int = DEFAULT_CELLS,
) -> tuple[ComparisonReport, ComparisonReport]:
    """Compare the walk at times ``3t+1`` and ``3t+2`` against the same limit law.

    The limit law is derived at times that are multiples of three, but the
    intermediate times behave indistinguishably at this resolution; both
    reports use the unmodified law.
    """
    if t < 1:
        raise ValueError("t must be at least 1")
    protocol = canonical_protocol(model.coin)
    state = evolve(model.spin, protocol, 3 * t + 1)
    first = compare_distribution(
        model, distribution(state), 3 * t + 1, r_max=r_max, cells=cells
    )
    state = step(state, protocol.coins[(3 * t + 1) % 3])
    second = compare_distribution(
        model, distribution(state), 3 * t + 2, r_max=r_max, cells=cells
    )
    return first, second
