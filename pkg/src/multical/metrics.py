"""Calibration errors, category statistics and multicalibration audits.

A *source* is either a :class:`FiniteDistribution` (exact quantities) or a
:class:`LabeledSample` (empirical quantities).  Both are aggregated in exact
rational arithmetic; results are reported as floats, and ``None`` marks an
undefined conditional quantity (empty conditioning event).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Container, NamedTuple, Union

from .model import (
    FiniteDistribution,
    Group,
    Interval,
    IntervalPartition,
    LabeledSample,
    Predictor,
    PredictorClass,
    SubpopulationCollection,
    exact,
)

Source = Union[FiniteDistribution, LabeledSample]

EXACT = "exact"
EMPIRICAL = "empirical"
NO_OCCUPANCY = "no occupancy"


class Category(NamedTuple):
    group: str
    interval: Interval

    def __str__(self) -> str:
        return f"({self.group}, {self.interval})"


@dataclass(frozen=True)
class CategoryStats:
    p_joint: float
    p_group: float
    p_cond: float | None
    mu_y: float | None
    mu_h: float | None
    n_hat: int | None
    source: str


def _members(U) -> Container:
    return U.members if isinstance(U, Group) else U


def _source_kind(source: Source) -> str:
    if isinstance(source, FiniteDistribution):
        return EXACT
    if isinstance(source, LabeledSample):
        return EMPIRICAL
    raise TypeError(f"source must be a FiniteDistribution or LabeledSample, not {type(source).__name__}")


class _Cell:
    """Running exact sums over one (group, interval) cell."""

    __slots__ = ("mass", "pos", "hsum", "count")

    def __init__(self):
        self.mass = Fraction(0)
        self.pos = Fraction(0)
        self.hsum = Fraction(0)
        self.count = 0

    def add(self, w: Fraction, y: int, v) -> None:
        self.mass += w
        self.hsum += w * exact(v)
        self.count += 1
        if y:
            self.pos += w

    def error(self) -> Fraction | None:
        if self.mass == 0:
            return None
        return (self.pos - self.hsum) / self.mass


def _profile(h: Predictor, U, partition: IntervalPartition, source: Source):
    """Exact mass of ``U`` plus one :class:`_Cell` per interval of ``partition``.

    Masses are probabilities for a distribution and proportions of the sample
    size for a sample; ``count`` on each cell is the raw sample occupancy.
    """
    members = _members(U)
    cells = [_Cell() for _ in partition]
    group_mass = Fraction(0)
    if isinstance(source, FiniteDistribution):
        for x, y, p in source.support:
            if x in members:
                w = exact(p)
                group_mass += w
                v = h(x)
                cells[partition.index_of(v)].add(w, y, v)
    else:
        # integer weights, rescaled to proportions once at the end
        m = len(source)
        n_group = 0
        for x, y in source:
            if x in members:
                n_group += 1
                v = h(x)
                cells[partition.index_of(v)].add(1, y, v)
        if m:
            group_mass = Fraction(n_group, m)
            for c in cells:
                c.mass, c.pos, c.hsum = Fraction(c.mass, m), Fraction(c.pos, m), c.hsum / m
    return group_mass, cells


def _stats(group_mass: Fraction, cell: _Cell, kind: str) -> CategoryStats:
    defined = cell.mass > 0
    return CategoryStats(
        p_joint=float(cell.mass),
        p_group=float(group_mass),
        p_cond=float(cell.mass / group_mass) if group_mass > 0 else None,
        mu_y=float(cell.pos / cell.mass) if defined else None,
        mu_h=float(cell.hsum / cell.mass) if defined else None,
        n_hat=cell.count if kind == EMPIRICAL else None,
        source=kind,
    )


def _is_interesting(group_mass: Fraction, cell_mass: Fraction, gamma, psi) -> bool:
    if group_mass == 0 or group_mass < gamma:
        return False
    return cell_mass / group_mass >= psi


def _check_thresholds(gamma, psi) -> None:
    if not (0 < gamma <= 1 and 0 < psi <= 1):
        raise ValueError(f"gamma and psi must lie in (0, 1], got gamma={gamma}, psi={psi}")


# --------------------------------------------------------------------------
# calibration errors


def true_calibration_error(h: Predictor, U, I: Interval, D: FiniteDistribution) -> float | None:
    """``E[y | x in U, h(x) in I] - E[h(x) | x in U, h(x) in I]`` under ``D``.

    Returns ``None`` when the conditioning event has probability zero.
    """
    members = _members(U)
    mass = pos = hsum = Fraction(0)
    for x, y, p in D.support:
        if x in members and h(x) in I:
            w = exact(p)
            mass += w
            pos += w * y
            hsum += w * exact(h(x))
    if mass == 0:
        return None
    return float(pos / mass - hsum / mass)


def empirical_calibration_error(h: Predictor, U, I: Interval, S: LabeledSample) -> float | None:
    """Occupancy-weighted label mean minus prediction mean on the category."""
    members = _members(U)
    hits = [(y, h(x)) for x, y in S if x in members and h(x) in I]
    n_hat = len(hits)
    if n_hat == 0:
        return None
    ys = sum(y for y, _ in hits)
    hs = sum((exact(v) for _, v in hits), Fraction(0))
    return float(Fraction(ys, n_hat) - hs / n_hat)


def category_stats(h: Predictor, U, I: Interval, source: Source) -> CategoryStats:
    """All per-category quantities for one (group, interval) pair."""
    kind = _source_kind(source)
    members = _members(U)
    cell = _Cell()
    group_mass = Fraction(0)
    if kind == EXACT:
        items = ((x, y, exact(p)) for x, y, p in source.support)
    else:
        m = len(source)
        items = ((x, y, Fraction(1, m)) for x, y in source) if m else ()
    for x, y, w in items:
        if x in members:
            group_mass += w
            v = h(x)
            if v in I:
                cell.add(w, y, v)
    return _stats(group_mass, cell, kind)


def interesting_categories(
    h: Predictor,
    groups: SubpopulationCollection,
    partition: IntervalPartition,
    gamma: float,
    psi: float,
    source: Source,
) -> list[Category]:
    """Categories with ``Pr[U] >= gamma`` and ``Pr[h in I | U] >= psi``.

    Probabilities are exact under a distribution and proportions under a
    sample.  Ordered by group, then by interval.
    """
    _check_thresholds(gamma, psi)
    out = []
    for g in groups:
        group_mass, cells = _profile(h, g, partition, source)
        for I, cell in zip(partition, cells):
            if _is_interesting(group_mass, cell.mass, gamma, psi):
                out.append(Category(g.name, I))
    return out


# --------------------------------------------------------------------------
# audits


@dataclass(frozen=True)
class AuditEntry:
    category: Category
    stats: CategoryStats
    calibration_error: float | None
    interesting: bool
    violation: bool
    reason: str = ""


@dataclass(frozen=True)
class AuditReport:
    predictor: str
    parameters: dict
    entries: tuple[AuditEntry, ...] = field(default_factory=tuple)

    @property
    def verdict(self) -> bool:
        """True iff the predictor is (alpha, gamma, psi)-multicalibrated."""
        return not any(e.violation for e in self.entries)

    @property
    def violations(self) -> list[AuditEntry]:
        return [e for e in self.entries if e.violation]

    @property
    def interesting(self) -> list[AuditEntry]:
        return [e for e in self.entries if e.interesting]


def audit(
    h: Predictor,
    groups: SubpopulationCollection,
    partition: IntervalPartition,
    alpha: float,
    gamma: float,
    psi: float,
    source: Source,
    *,
    interest: FiniteDistribution | None = None,
    empty_policy: str = "violation",
    lam: float | None = None,
) -> AuditReport:
    """Audit ``h`` for (alpha, gamma, psi)-multicalibration on ``source``.

    Every (group, interval) pair gets an entry.  Interestingness is judged on
    ``source`` unless ``interest`` supplies a distribution to judge it on
    instead (errors are still measured on ``source``).

    An interesting category with no sample occupancy counts as a violation
    (reason ``"no occupancy"``); pass ``empty_policy="exclude"`` to report it
    as undefined without failing the verdict.
    """
    if not (0 <= alpha <= 1):
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    _check_thresholds(gamma, psi)
    if empty_policy not in ("violation", "exclude"):
        raise ValueError("empty_policy must be 'violation' or 'exclude'")
    kind = _source_kind(source)
    interest_kind = kind if interest is None else _source_kind(interest)

    entries = []
    for g in groups:
        group_mass, cells = _profile(h, g, partition, source)
        if interest is None:
            judge_mass, judge_cells = group_mass, cells
        else:
            judge_mass, judge_cells = _profile(h, g, partition, interest)
        for I, cell, judge in zip(partition, cells, judge_cells):
            interesting = _is_interesting(judge_mass, judge.mass, gamma, psi)
            err = cell.error()
            violation, reason = False, ""
            if interesting:
                if err is None:
                    reason = NO_OCCUPANCY
                    violation = empty_policy == "violation"
                    if not violation:
                        reason = "undefined, excluded"
                elif abs(err) > alpha:
                    violation, reason = True, "calibration error exceeds alpha"
            entries.append(
                AuditEntry(
                    category=Category(g.name, I),
                    stats=_stats(group_mass, cell, kind),
                    calibration_error=None if err is None else float(err),
                    interesting=interesting,
                    violation=violation,
                    reason=reason,
                )
            )
    params = {
        "alpha": alpha,
        "gamma": gamma,
        "psi": psi,
        "lambda": lam,
        "source": kind,
        "interest": interest_kind,
        "empty_policy": empty_policy,
    }
    return AuditReport(h.name, params, tuple(entries))


def audit_class(
    H: PredictorClass,
    groups: SubpopulationCollection,
    partition: IntervalPartition,
    alpha: float,
    gamma: float,
    psi: float,
    source: Source,
    **kwargs,
) -> list[AuditReport]:
    """:func:`audit` for every member of ``H``, in class order."""
    return [audit(h, groups, partition, alpha, gamma, psi, source, **kwargs) for h in H]
