"""Monte Carlo checks of multicalibration uniform convergence.

True calibration errors and interestingness come from the exact oracle in
:mod:`multical.metrics`.  Each trial draws a sample with the same generator
path as :func:`multical.model.draw_sample` (so any trial can be replayed as a
:class:`LabeledSample`), reduces it to counts per (point, label), and computes
all empirical calibration errors at once in floating point.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from ._seeding import make_rng, trial_seed
from .metrics import _profile, _check_thresholds
from .model import (
    FiniteDistribution,
    IntervalPartition,
    LabeledSample,
    Predictor,
    PredictorClass,
    PredictionSpace,
    SubpopulationCollection,
    _draw_indices,
    exact,
)


class WorstCategory(NamedTuple):
    predictor: str
    group: str
    interval: str


@dataclass(frozen=True)
class TrialOutcome:
    """Largest ``|empirical - true|`` calibration error over interesting categories.

    ``sup_deviation`` is ``inf`` exactly when some interesting category got no
    sample points.
    """

    sup_deviation: float
    worst_category: WorstCategory | None
    empty_interesting_count: int
    m: int
    seed: int
    min_occupancy: int | None = None


class ConvergenceSetup:
    """A distribution, class, groups and partition compiled to arrays.

    Interesting categories are fixed by the true distribution.
    """

    def __init__(
        self,
        D: FiniteDistribution,
        H: PredictorClass,
        groups: SubpopulationCollection,
        partition: IntervalPartition,
        gamma: float,
        psi: float,
    ):
        _check_thresholds(gamma, psi)
        self.D, self.H, self.groups, self.partition = D, H, groups, partition
        self.gamma, self.psi = gamma, psi

        points = D.points
        where = {x: i for i, x in enumerate(points)}
        self.points = points
        self.probs = D.probabilities()
        self.sup_point = np.array([where[o.point] for o in D.support], dtype=np.intp)
        self.sup_label = np.array([o.label for o in D.support], dtype=np.intp)

        n_h, n_g, n_c, n_x = len(H), len(groups), len(partition), len(points)
        hv = H.matrix(points)
        # cells from the raw values: float copies can miss exact singletons
        cells = np.array([[partition.index_of(h(x)) for x in points] for h in H], dtype=np.intp)
        onehot = np.zeros((n_h, n_x, n_c))
        np.put_along_axis(onehot, cells[:, :, None], 1.0, axis=2)
        masks = groups.masks(points).astype(float)
        # (h, g, x, c) membership of point x in category (g, c) under h
        self._member = masks[None, :, :, None] * onehot[:, None, :, :]
        self._hvals = hv

        true_err = np.full((n_h, n_g, n_c), np.nan)
        interesting = np.zeros((n_h, n_g, n_c), dtype=bool)
        for i, h in enumerate(H):
            for j, g in enumerate(groups):
                gmass, cs = _profile(h, g, partition, D)
                for k, cell in enumerate(cs):
                    err = cell.error()
                    if err is not None:
                        true_err[i, j, k] = float(err)
                    interesting[i, j, k] = gmass > 0 and gmass >= gamma and cell.mass / gmass >= psi
        self.true_error = true_err
        self.interesting = interesting

    @property
    def n_interesting(self) -> int:
        return int(self.interesting.sum())

    def _counts(self, idx: np.ndarray) -> np.ndarray:
        n_x = len(self.points)
        flat = self.sup_point[idx] * 2 + self.sup_label[idx]
        return np.bincount(flat, minlength=2 * n_x).reshape(n_x, 2).astype(float)

    def empirical_errors(self, counts: np.ndarray):
        """Empirical errors ``(h, g, c)`` and occupancies from a count table."""
        tot = counts.sum(axis=1)
        n_hat = np.einsum("hgxc,x->hgc", self._member, tot)
        pos = np.einsum("hgxc,x->hgc", self._member, counts[:, 1])
        hsum = np.einsum("hgxc,hx,x->hgc", self._member, self._hvals, tot)
        with np.errstate(invalid="ignore", divide="ignore"):
            err = (pos - hsum) / n_hat
        return err, n_hat

    def outcome_for_counts(self, counts: np.ndarray, m: int, seed: int = 0) -> TrialOutcome:
        err, n_hat = self.empirical_errors(counts)
        mask = self.interesting
        if not mask.any():
            return TrialOutcome(0.0, None, 0, m, seed, None)
        occ = n_hat[mask]
        empty = int((occ == 0).sum())
        dev = np.where(mask, np.abs(err - self.true_error), -1.0)
        dev[mask & (n_hat == 0)] = np.inf
        flat = int(np.argmax(dev))
        i, j, k = np.unravel_index(flat, dev.shape)
        worst = WorstCategory(self.H[int(i)].name, self.groups[int(j)].name, str(self.partition[int(k)]))
        return TrialOutcome(float(dev[i, j, k]), worst, empty, m, seed, int(occ.min()))

    def outcome_for_sample(self, S: LabeledSample, seed: int = 0) -> TrialOutcome:
        return self.outcome_for_counts(S.counts(self.points).astype(float), len(S), seed)

    def trial(self, m: int, seed: int) -> TrialOutcome:
        if m < 1:
            raise ValueError("m must be at least 1")
        idx = _draw_indices(self.probs, m, make_rng(seed))
        return self.outcome_for_counts(self._counts(idx), m, seed)

    def run(self, m: int, trials: int, master_seed: int, workers: int = 1) -> list[TrialOutcome]:
        if trials < 1:
            raise ValueError("trials must be at least 1")
        seeds = [trial_seed(master_seed, i) for i in range(trials)]
        if workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                return list(pool.map(lambda s: self.trial(m, s), seeds))
        return [self.trial(m, s) for s in seeds]


def deviation_trial(D, H, groups, partition, gamma, psi, m, seed) -> TrialOutcome:
    """One seeded trial: draw ``S ~ D^m`` and return the sup deviation."""
    return ConvergenceSetup(D, H, groups, partition, gamma, psi).trial(m, seed)


def failure_rate(D, H, groups, partition, gamma, psi, m, epsilon, trials, master_seed, workers=1) -> float:
    """Fraction of seeded trials whose sup deviation exceeds ``epsilon``."""
    outcomes = ConvergenceSetup(D, H, groups, partition, gamma, psi).run(m, trials, master_seed, workers)
    return sum(o.sup_deviation > epsilon for o in outcomes) / trials


# --------------------------------------------------------------------------
# lower-bound construction


@dataclass(frozen=True)
class LowerBoundFixture:
    """Two distributions that differ only in the label bias at ``x0``.

    ``h`` predicts ``1/2 + epsilon`` on ``x0`` and 0 elsewhere; ``U = {x0, x1}``
    has mass ``gamma`` and ``h`` hits ``1/2 + epsilon`` on a ``psi`` fraction
    of it.  Under ``D1`` that category is calibrated, under ``D2`` its error is
    ``-2 epsilon``.  Masses are exact rationals of the float parameters.
    """

    D1: FiniteDistribution
    D2: FiniteDistribution
    H: PredictorClass
    groups: SubpopulationCollection
    epsilon: float
    gamma: float
    psi: float

    @property
    def h(self) -> Predictor:
        return self.H[0]

    @property
    def value(self) -> Fraction:
        return Fraction(1, 2) + exact(self.epsilon)

    @property
    def space(self) -> PredictionSpace:
        return PredictionSpace.finite([Fraction(0), self.value])

    @property
    def partition(self) -> IntervalPartition:
        return self.space.partition()

    @property
    def target_interval(self):
        return self.partition[self.partition.index_of(self.value)]


def build_lower_bound_fixture(epsilon: float, gamma: float, psi: float) -> LowerBoundFixture:
    if not (0 < epsilon < 0.5):
        raise ValueError(f"epsilon must lie in (0, 1/2), got {epsilon}")
    if not (0 < gamma <= 1 and 0 < psi <= 1):
        raise ValueError(f"gamma and psi must lie in (0, 1], got {gamma}, {psi}")
    e, g, p = exact(epsilon), exact(gamma), exact(psi)
    v = Fraction(1, 2) + e
    hi, lo = v * p * g, (1 - v) * p * g
    rest = [("x1", 0, (1 - p) * g), ("x2", 0, 1 - g)]

    def dist(p1, p0):
        table = [("x0", 1, p1), ("x0", 0, p0)] + rest
        return FiniteDistribution(tuple(t for t in table if t[2] > 0))

    h = Predictor("h", {"x0": v, "x1": Fraction(0), "x2": Fraction(0)})
    groups = SubpopulationCollection((("U", {"x0", "x1"}), ("X2", {"x2"})))
    return LowerBoundFixture(dist(hi, lo), dist(lo, hi), PredictorClass((h,)), groups, epsilon, gamma, psi)


class DistinguishingResult(NamedTuple):
    accuracy: float
    trials: int
    coin_flips: int


def distinguishing_experiment(fixture: LowerBoundFixture, m: int, trials: int, master_seed: int) -> float:
    """Accuracy of telling ``D1`` from ``D2`` with ``m`` samples.

    See :func:`run_distinguishing` for the decision rule.
    """
    return run_distinguishing(fixture, m, trials, master_seed).accuracy


def run_distinguishing(fixture: LowerBoundFixture, m: int, trials: int, master_seed: int) -> DistinguishingResult:
    """Per trial (generator seeded from ``trial_seed(master_seed, i)``): a fair
    coin picks ``D1`` or ``D2``; ``S ~ D^m`` is drawn; the guess is ``D1`` iff
    the label mean on points where ``h = 1/2 + epsilon`` exceeds 1/2.  A mean
    of exactly 1/2, or no such points, is settled by another fair coin.
    """
    if m < 1 or trials < 1:
        raise ValueError("m and trials must be at least 1")
    v = fixture.value
    dists = (fixture.D1, fixture.D2)
    probs = [d.probabilities() for d in dists]
    hit = [np.array([fixture.h(o.point) == v for o in d.support]) for d in dists]
    label = [np.array([o.label for o in d.support]) for d in dists]

    correct = flips = 0
    for i in range(trials):
        rng = make_rng(trial_seed(master_seed, i))
        truth = int(rng.integers(2))
        idx = _draw_indices(probs[truth], m, rng)
        in_cat = hit[truth][idx]
        n = int(in_cat.sum())
        k = int(label[truth][idx][in_cat].sum())
        if n == 0 or 2 * k == n:
            guess = int(rng.integers(2))
            flips += 1
        else:
            guess = 0 if 2 * k > n else 1
        correct += guess == truth
    return DistinguishingResult(correct / trials, trials, flips)


# --------------------------------------------------------------------------
# the fraction and numerator/denominator lemmas


class FractionCheck(NamedTuple):
    premises_met: bool
    conclusion: bool
    difference: float | None

    @property
    def holds(self) -> bool:
        return not self.premises_met or self.conclusion


def fraction_error_check(p1, p2, p1_hat, p2_hat, psi, epsilon) -> FractionCheck:
    """If ``p1, psi <= p2`` and both estimates are within ``psi*epsilon/3``,
    then ``|p1/p2 - p1_hat/p2_hat| <= epsilon``.

    Evaluated in exact rational arithmetic on the given floats.  When the
    premises fail the check is vacuous (``premises_met=False``).
    """
    vals = [exact(t) for t in (p1, p2, p1_hat, p2_hat, psi, epsilon)]
    if any(not (0 <= t <= 1) for t in vals):
        raise ValueError("all inputs must lie in [0, 1]")
    a, b, a_hat, b_hat, s, e = vals
    slack = s * e / 3
    premises = a <= b and s <= b and abs(a - a_hat) <= slack and abs(b - b_hat) <= slack
    if not premises or b_hat == 0:
        return FractionCheck(False, True, None)
    diff = abs(a / b - a_hat / b_hat)
    return FractionCheck(True, diff <= e, float(diff))


class EmptySubpopulation(ValueError):
    pass


@dataclass(frozen=True)
class NumDenReport:
    failure_fraction: float
    max_denominator_deviation: float
    max_numerator_deviation: float
    trials: int
    m: int


def numerator_denominator_check(
    H: Sequence[Predictor], U, v, D: FiniteDistribution, m: int, epsilon: float, trials: int, master_seed: int
) -> NumDenReport:
    """Uniform deviation of ``Pr[h = v]`` and ``Pr[h = v, y = 1]`` estimates.

    Samples come from ``D`` conditioned on ``x in U``.  A trial fails when
    either frequency misses its true value by more than ``epsilon`` for some
    member of ``H``.
    """
    if m < 1 or trials < 1:
        raise ValueError("m and trials must be at least 1")
    members = getattr(U, "members", U)
    sub = [(x, y, exact(p)) for x, y, p in D.support if x in members]
    mass = sum((p for _, _, p in sub), Fraction(0))
    if mass == 0:
        raise EmptySubpopulation("Pr[x in U] = 0")
    probs = np.array([float(p / mass) for _, _, p in sub])
    hits = np.array([[h(x) == v for x, _, _ in sub] for h in H], dtype=float)
    hits_pos = hits * np.array([y for _, y, _ in sub], dtype=float)
    true_den = np.array([float(sum((p for (x, _, p), b in zip(sub, row) if b), Fraction(0)) / mass) for row in hits])
    true_num = np.array(
        [float(sum((p for (x, y, p), b in zip(sub, row) if b and y), Fraction(0)) / mass) for row in hits]
    )

    failures, max_den, max_num = 0, 0.0, 0.0
    for i in range(trials):
        idx = _draw_indices(probs, m, make_rng(trial_seed(master_seed, i)))
        counts = np.bincount(idx, minlength=len(sub)).astype(float)
        den = np.abs(hits @ counts / m - true_den).max()
        num = np.abs(hits_pos @ counts / m - true_num).max()
        max_den, max_num = max(max_den, den), max(max_num, num)
        failures += den > epsilon or num > epsilon
    return NumDenReport(failures / trials, float(max_den), float(max_num), trials, m)
