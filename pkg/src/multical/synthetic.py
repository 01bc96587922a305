"""Seeded random instances for experiments and tests."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._seeding import make_rng
from .model import (
    FiniteDistribution,
    IntervalPartition,
    PredictionSpace,
    Predictor,
    PredictorClass,
    SubpopulationCollection,
)


def point_names(n: int) -> list[str]:
    width = len(str(max(n - 1, 0)))
    return [f"x{i:0{width}d}" for i in range(n)]


def random_distribution(points, rng: np.random.Generator, *, resolution: int | None = None) -> FiniteDistribution:
    """Dirichlet(1) weights over ``points x {0, 1}``.

    With ``resolution`` the masses are exact multiples of ``1/resolution``
    (so a sample with proportional multiplicities exists).
    """
    n = 2 * len(points)
    w = rng.dirichlet(np.ones(n))
    if resolution is None:
        w = w / w.sum()
        probs = list(w[:-1]) + [1.0 - float(np.sum(w[:-1]))]
        probs = [max(p, 0.0) for p in probs]
    else:
        counts = np.floor(w * resolution).astype(int)
        counts[int(np.argmax(w))] += resolution - counts.sum()
        probs = [Fraction(int(c), resolution) for c in counts]
    outcomes = [(x, y) for x in points for y in (0, 1)]
    return FiniteDistribution(tuple((x, y, p) for (x, y), p in zip(outcomes, probs)))


def random_predictor_class(points, values, n: int, rng: np.random.Generator) -> PredictorClass:
    values = list(values)
    return PredictorClass(
        tuple(
            Predictor(f"h{i}", {x: values[int(k)] for x, k in zip(points, rng.integers(len(values), size=len(points)))})
            for i in range(n)
        )
    )


def random_groups(points, n: int, rng: np.random.Generator, p_member: float = 0.5) -> SubpopulationCollection:
    groups = []
    for i in range(n):
        mask = rng.random(len(points)) < p_member
        if not mask.any():
            mask[int(rng.integers(len(points)))] = True
        groups.append((f"U{i}", {x for x, b in zip(points, mask) if b}))
    return SubpopulationCollection(tuple(groups))


@dataclass(frozen=True)
class RandomSetup:
    D: FiniteDistribution
    H: PredictorClass
    groups: SubpopulationCollection
    space: PredictionSpace

    @property
    def partition(self) -> IntervalPartition:
        return self.space.partition()


def random_setup(seed: int, n_points: int = 50, n_predictors: int = 20, n_groups: int = 5,
                 values=(0.2, 0.4, 0.6, 0.8), resolution: int | None = None) -> RandomSetup:
    """A random finite universe with a finite prediction space ``values``."""
    rng = make_rng(seed)
    points = point_names(n_points)
    D = random_distribution(points, rng, resolution=resolution)
    H = random_predictor_class(points, values, n_predictors, rng)
    groups = random_groups(points, n_groups, rng)
    return RandomSetup(D, H, groups, PredictionSpace.finite(values))
