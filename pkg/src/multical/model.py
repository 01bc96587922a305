"""Domain objects: prediction spaces, interval partitions, predictors,
subpopulations, finite distributions and labeled samples.

Domain points are opaque hashable ids (strings or ints).  Probabilities and
prediction values may be plain floats or ``fractions.Fraction``; every "true"
quantity derived from a :class:`FiniteDistribution` is computed in exact
rational arithmetic over the stored values, so boundary cases such as
``Pr[h(x) in I | x in U] == psi`` are decided without rounding noise.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Callable, Hashable, Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from ._seeding import make_rng

NORMALIZATION_TOL = 1e-12


class ValueNotCovered(ValueError):
    """A prediction value has no interval in the partition."""


def exact(x) -> Fraction:
    """Exact rational value of a float, int or Fraction."""
    return x if isinstance(x, Fraction) else Fraction(x)


# --------------------------------------------------------------------------
# prediction space and partition


@dataclass(frozen=True)
class Interval:
    """``[lo, hi)``, or ``[lo, hi]`` when ``closed_hi``; a singleton when lo == hi."""

    lo: Real
    hi: Real
    closed_hi: bool = False

    def __post_init__(self):
        if not (0 <= self.lo <= self.hi <= 1):
            raise ValueError(f"interval bounds out of order or outside [0,1]: {self.lo}, {self.hi}")
        if self.lo == self.hi and not self.closed_hi:
            raise ValueError("a singleton interval must be closed")

    @property
    def is_singleton(self) -> bool:
        return self.lo == self.hi

    def __contains__(self, v) -> bool:
        if self.closed_hi:
            return self.lo <= v <= self.hi
        return self.lo <= v < self.hi

    def __str__(self) -> str:
        if self.is_singleton:
            return f"{{{float(self.lo)!r}}}"
        close = "]" if self.closed_hi else ")"
        return f"[{float(self.lo)!r}, {float(self.hi)!r}{close}"


@dataclass(frozen=True)
class IntervalPartition:
    intervals: tuple[Interval, ...]

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(self.intervals))
        if not self.intervals:
            raise ValueError("empty partition")
        singles = [iv.is_singleton for iv in self.intervals]
        if any(singles) and not all(singles):
            raise ValueError("partition mixes singletons and ranges")
        if all(singles):
            los = [iv.lo for iv in self.intervals]
            if any(a >= b for a, b in zip(los, los[1:])):
                raise ValueError("singleton values must be strictly increasing")
        else:
            ivs = self.intervals
            if ivs[0].lo != 0 or ivs[-1].hi != 1 or not ivs[-1].closed_hi:
                raise ValueError("range partition must cover [0, 1] with the last interval closed")
            for a, b in zip(ivs, ivs[1:]):
                if a.hi != b.lo or a.closed_hi:
                    raise ValueError("range partition intervals must tile [0, 1]")
        # lookup structures
        object.__setattr__(self, "_los", [iv.lo for iv in self.intervals])
        object.__setattr__(self, "_index", {iv.lo: j for j, iv in enumerate(self.intervals)})

    @property
    def singletons(self) -> bool:
        return self.intervals[0].is_singleton

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def __getitem__(self, j: int) -> Interval:
        return self.intervals[j]

    def index_of(self, v) -> int:
        if self.singletons:
            try:
                return self._index[v]
            except (KeyError, TypeError):
                raise ValueNotCovered(f"value {v!r} is not one of the listed prediction values") from None
        if not (0 <= v <= 1):
            raise ValueNotCovered(f"value {v!r} is outside [0, 1]")
        return min(bisect.bisect_right(self._los, v) - 1, len(self.intervals) - 1)


def interval_of(partition: IntervalPartition, v) -> Interval:
    """The unique interval of ``partition`` containing ``v``."""
    return partition.intervals[partition.index_of(v)]


@dataclass(frozen=True)
class PredictionSpace:
    """Either a finite set of values in [0, 1] or [0, 1] cut into a lambda-grid.

    Use :meth:`finite` or :meth:`continuous` to build one.
    """

    values: tuple | None = None
    lam: float | None = None

    def __post_init__(self):
        if (self.values is None) == (self.lam is None):
            raise ValueError("give exactly one of values (finite) or lam (continuous)")
        if self.values is not None:
            vals = tuple(self.values)
            object.__setattr__(self, "values", vals)
            if not vals:
                raise ValueError("finite prediction space must be nonempty")
            if any(not (0 <= v <= 1) for v in vals):
                raise ValueError("prediction values must lie in [0, 1]")
            if any(a >= b for a, b in zip(vals, vals[1:])):
                raise ValueError("prediction values must be strictly increasing")
        else:
            lam = self.lam
            if not (0 < lam <= 1):
                raise ValueError(f"lambda must be in (0, 1], got {lam}")
            n = round(1 / lam)
            if n < 1 or abs(n * lam - 1) > 1e-12:
                raise ValueError(f"1/lambda must be a positive integer, got lambda={lam}")

    @classmethod
    def finite(cls, values: Iterable) -> "PredictionSpace":
        return cls(values=tuple(sorted(set(values))))

    @classmethod
    def continuous(cls, lam: float) -> "PredictionSpace":
        return cls(lam=lam)

    @property
    def is_finite(self) -> bool:
        return self.values is not None

    @property
    def n_cells(self) -> int:
        return len(self.values) if self.is_finite else round(1 / self.lam)

    def contains(self, v) -> bool:
        if self.is_finite:
            return v in self.values
        return 0 <= v <= 1

    def partition(self) -> IntervalPartition:
        return partition_of(self)


def partition_of(space: PredictionSpace) -> IntervalPartition:
    """Singletons for a finite space; ``1/lambda`` half-open cells otherwise.

    Grid edges are ``j / n`` rounded to the nearest float, so a user-typed 0.3
    falls in ``[0.3, 0.4)`` when ``lambda = 0.1``.  The last cell is closed at 1.
    """
    if space.is_finite:
        return IntervalPartition(tuple(Interval(v, v, True) for v in space.values))
    n = space.n_cells
    edges = [j / n for j in range(n)] + [1.0]
    return IntervalPartition(
        tuple(Interval(edges[j], edges[j + 1], j == n - 1) for j in range(n))
    )


# --------------------------------------------------------------------------
# predictors and subpopulations


@dataclass(frozen=True)
class Predictor:
    """A total map from domain points to prediction values."""

    name: str
    table: Mapping[Hashable, Real]

    def __post_init__(self):
        object.__setattr__(self, "table", dict(self.table))
        for x, v in self.table.items():
            if not (0 <= v <= 1):
                raise ValueError(f"predictor {self.name!r}: h({x!r}) = {v} outside [0, 1]")

    def __call__(self, x):
        return self.table[x]

    def __hash__(self):
        return hash((self.name, tuple(sorted(self.table.items(), key=lambda kv: repr(kv[0])))))

    def values_on(self, points: Sequence) -> np.ndarray:
        return np.array([float(self.table[x]) for x in points])

    def check_space(self, space: PredictionSpace) -> None:
        bad = [v for v in self.table.values() if not space.contains(v)]
        if bad:
            raise ValueError(f"predictor {self.name!r} outputs {bad[0]!r}, not in the prediction space")


@dataclass(frozen=True)
class PredictorClass:
    members: tuple[Predictor, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ValueError("predictor class must be nonempty")
        names = [h.name for h in self.members]
        if len(set(names)) != len(names):
            raise ValueError("predictor names must be unique")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[Predictor]:
        return iter(self.members)

    def __getitem__(self, key) -> Predictor:
        if isinstance(key, str):
            for h in self.members:
                if h.name == key:
                    return h
            raise KeyError(key)
        return self.members[key]

    def matrix(self, points: Sequence) -> np.ndarray:
        """Float array of shape ``(len(self), len(points))``."""
        return np.array([h.values_on(points) for h in self.members])


class Group(NamedTuple):
    name: str
    members: frozenset


@dataclass(frozen=True)
class SubpopulationCollection:
    """Named, possibly overlapping, nonempty subsets of the domain."""

    groups: tuple[Group, ...]

    def __post_init__(self):
        if isinstance(self.groups, Mapping):
            groups = tuple(Group(name, frozenset(m)) for name, m in self.groups.items())
        else:
            groups = tuple(Group(name, frozenset(m)) for name, m in self.groups)
        object.__setattr__(self, "groups", groups)
        names = [g.name for g in groups]
        if len(set(names)) != len(names):
            raise ValueError("subpopulation names must be unique")
        for g in groups:
            if not g.members:
                raise ValueError(f"subpopulation {g.name!r} is empty")

    def __len__(self) -> int:
        return len(self.groups)

    def __iter__(self) -> Iterator[Group]:
        return iter(self.groups)

    def __getitem__(self, key) -> Group:
        if isinstance(key, str):
            for g in self.groups:
                if g.name == key:
                    return g
            raise KeyError(key)
        return self.groups[key]

    def masks(self, points: Sequence) -> np.ndarray:
        """Boolean array of shape ``(len(self), len(points))``."""
        return np.array([[x in g.members for x in points] for g in self.groups], dtype=bool)


# --------------------------------------------------------------------------
# distributions and samples


class Outcome(NamedTuple):
    point: Hashable
    label: int
    prob: Real


@dataclass(frozen=True)
class FiniteDistribution:
    """An explicit probability table over (domain point, label) pairs."""

    support: tuple[Outcome, ...]

    def __post_init__(self):
        support = tuple(Outcome(x, int(y), p) for x, y, p in self.support)
        object.__setattr__(self, "support", support)
        if not support:
            raise ValueError("distribution needs at least one outcome")
        seen = set()
        for x, y, p in support:
            if y not in (0, 1):
                raise ValueError(f"label must be 0 or 1, got {y}")
            if p < 0:
                raise ValueError(f"negative probability {p} at ({x!r}, {y})")
            if (x, y) in seen:
                raise ValueError(f"duplicate outcome ({x!r}, {y})")
            seen.add((x, y))
        total = sum(exact(p) for _, _, p in support)
        if abs(total - 1) > NORMALIZATION_TOL:
            raise ValueError(f"probabilities sum to {float(total)!r}, not 1")

    @classmethod
    def from_table(cls, table: Mapping) -> "FiniteDistribution":
        """Build from ``{(point, label): prob}``."""
        return cls(tuple((x, y, p) for (x, y), p in table.items()))

    @property
    def points(self) -> tuple:
        """Distinct domain points in order of first appearance."""
        return tuple(dict.fromkeys(o.point for o in self.support))

    def probabilities(self) -> np.ndarray:
        return np.array([float(o.prob) for o in self.support])

    def prob(self, event: Callable[[Hashable, int], bool]) -> Fraction:
        """Exact probability of ``{(x, y): event(x, y)}``."""
        return sum((exact(p) for x, y, p in self.support if event(x, y)), Fraction(0))

    def table(self, points: Sequence) -> np.ndarray:
        """Float array ``P[i, y] = Pr[x = points[i], label = y]``."""
        where = {x: i for i, x in enumerate(points)}
        out = np.zeros((len(points), 2))
        for x, y, p in self.support:
            out[where[x], y] += float(p)
        return out


@dataclass(frozen=True)
class LabeledSample:
    """Ordered i.i.d. draws; duplicates are expected."""

    items: tuple[tuple[Hashable, int], ...] = field(default_factory=tuple)

    def __post_init__(self):
        items = tuple((x, int(y)) for x, y in self.items)
        if any(y not in (0, 1) for _, y in items):
            raise ValueError("labels must be 0 or 1")
        object.__setattr__(self, "items", items)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def counts(self, points: Sequence) -> np.ndarray:
        """Integer array ``C[i, y]`` of occurrences of ``(points[i], y)``."""
        where = {x: i for i, x in enumerate(points)}
        out = np.zeros((len(points), 2), dtype=np.int64)
        for x, y in self.items:
            out[where[x], y] += 1
        return out


def _draw_indices(probs: np.ndarray, m: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF draws of support indices; zero-mass entries are never hit."""
    cdf = np.cumsum(probs)
    u = rng.random(m) * cdf[-1]
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(probs) - 1)


def draw_sample(D: FiniteDistribution, m: int, seed: int) -> LabeledSample:
    """``m`` i.i.d. draws from ``D``, bit-for-bit reproducible from ``seed``."""
    if m < 0:
        raise ValueError("sample size must be nonnegative")
    if m == 0:
        return LabeledSample(())
    idx = _draw_indices(D.probabilities(), m, make_rng(seed))
    sup = D.support
    return LabeledSample(tuple((sup[i].point, sup[i].label) for i in idx))
