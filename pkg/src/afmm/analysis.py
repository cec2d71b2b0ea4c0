"""Cost prediction, sample statistics and empirical-O estimation."""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .matrix import DomainError

Z_95 = 1.96


class EmptySampleError(ValueError):
    pass


class InsufficientDataError(ValueError):
    pass


class DegenerateFitError(ValueError):
    pass


@dataclass(frozen=True)
class CostParams:
    n: int
    d1: float
    d2: float
    mu_prime: float

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be positive, got {self.n}")
        for name in ("d1", "d2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")
        if not self.mu_prime > 0:
            raise DomainError(f"mu_prime must be positive, got {self.mu_prime}")


@dataclass(frozen=True)
class SampleStats:
    count: int
    mean: float
    std_dev: float
    ci95_half_width: float


@dataclass(frozen=True)
class FitResult:
    """``value ~ coefficient * size ** exponent``."""

    coefficient: float
    exponent: float
    r_squared: float

    def predict(self, size: float) -> float:
        return self.coefficient * size**self.exponent


def predict_additions(p: CostParams) -> float:
    """Expected AFMM additions: ``mu' * d1 * d2 * n**3``.

    Each of the ``d1 * n**2`` nonzero bases meets a row of ``n`` rep-factors
    whose mean over zeros and nonzeros is ``mu' * d2``.
    """
    return p.n * (p.n**2 * p.d1) * effective_mean(p.mu_prime, p.d2)


def effective_mean(mu_prime: float, d2: float) -> float:
    """Mean over all entries, zeros included, of a matrix with nonzero mean ``mu_prime``."""
    return mu_prime * d2


def summarize(samples: Iterable[float]) -> SampleStats:
    xs = [float(s) for s in samples]
    if not xs:
        raise EmptySampleError("cannot summarize an empty sample")
    mean = statistics.fmean(xs)
    sd = statistics.stdev(xs, mean) if len(xs) > 1 else 0.0
    return SampleStats(len(xs), mean, sd, Z_95 * sd / math.sqrt(len(xs)))


def fit_power_law(points: Sequence[tuple[float, float]]) -> FitResult:
    """Ordinary least squares of ``ln value`` on ``ln size``."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if np.any(pts <= 0):
        raise DomainError("power-law fit needs strictly positive sizes and values")
    if len(np.unique(pts[:, 0])) < 3:
        raise InsufficientDataError("power-law fit needs at least 3 distinct sizes")
    lx, ly = np.log(pts[:, 0]), np.log(pts[:, 1])
    dx = lx - lx.mean()
    dy = ly - ly.mean()
    slope = float(dx @ dy / (dx @ dx))
    intercept = float(ly.mean() - slope * lx.mean())
    ss_tot = float(dy @ dy)
    resid = ly - (intercept + slope * lx)
    ss_res = float(resid @ resid)
    # residuals at rounding level mean an exact fit, even when ss_tot is itself ~0
    noise = len(ly) * (16 * np.finfo(np.float64).eps * max(1.0, float(np.abs(ly).max()))) ** 2
    r2 = 1.0 if ss_res <= noise else max(0.0, 1.0 - ss_res / ss_tot)
    return FitResult(math.exp(intercept), slope, r2)


def cost_per_addition(records: Iterable[tuple[int, float]]) -> float:
    """Seconds per addition: least-squares slope of elapsed on additions through the origin."""
    recs = [(float(a), float(t)) for a, t in records]
    saa = sum(a * a for a, _ in recs)
    if saa == 0.0:
        raise DegenerateFitError("no record has a positive addition count")
    return sum(a * t for a, t in recs) / saa


def percent_reduction(baseline_mean: float, candidate_mean: float) -> float:
    if not baseline_mean > 0:
        raise DomainError(f"baseline mean must be positive, got {baseline_mean}")
    return 100.0 * (baseline_mean - candidate_mean) / baseline_mean
