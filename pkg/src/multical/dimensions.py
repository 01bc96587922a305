"""Binarised predictor classes and brute-force VC / graph dimension.

Everything here is exhaustive search with hard size limits; it exists to
check dimension relations on small classes, not to scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

from .model import Predictor, PredictorClass

VC_DOMAIN_LIMIT = 20
GRAPH_DOMAIN_LIMIT = 12
GRAPH_VALUES_LIMIT = 8


class LimitExceeded(ValueError):
    """Input too large for exhaustive search."""


@dataclass(frozen=True)
class BinaryHypothesis:
    """A {0,1}-valued total function on a finite domain.

    ``provenance`` is ``(predictor name, value)`` for a binarised predictor and
    ``"raw"`` otherwise.
    """

    table: dict
    provenance: tuple | str = "raw"

    def __post_init__(self):
        object.__setattr__(self, "table", {x: int(b) for x, b in dict(self.table).items()})
        if any(b not in (0, 1) for b in self.table.values()):
            raise ValueError("binary hypothesis outputs must be 0 or 1")

    def __call__(self, x) -> int:
        return self.table[x]

    def evaluate(self, point) -> int:
        return self.table[point]

    def key(self, domain: Sequence) -> tuple:
        return tuple(self.table[x] for x in domain)


@dataclass(frozen=True)
class PairFunction:
    """``phi(x, y) = 1`` iff ``source(x) == 1`` and ``y == 1``."""

    source: BinaryHypothesis

    def __call__(self, x, y: int) -> int:
        return int(self.source(x) == 1 and y == 1)

    def evaluate(self, point) -> int:
        x, y = point
        return self(x, y)


def binarize(h: Predictor, v) -> BinaryHypothesis:
    """Indicator of ``h(x) == v``."""
    return BinaryHypothesis({x: int(hx == v) for x, hx in h.table.items()}, (h.name, v))


def binarize_class(H: Iterable[Predictor], v) -> list[BinaryHypothesis]:
    """Binarise every member at ``v``; identical tables are kept once."""
    out, seen = [], set()
    for h in H:
        b = binarize(h, v)
        k = tuple(sorted(b.table.items(), key=lambda kv: repr(kv[0])))
        if k not in seen:
            seen.add(k)
            out.append(b)
    return out


def true_positive_class(H_v: Iterable[BinaryHypothesis]) -> list[PairFunction]:
    return [PairFunction(b) for b in H_v]


def pair_domain(domain: Sequence) -> list[tuple]:
    return [(x, y) for x in domain for y in (0, 1)]


# --------------------------------------------------------------------------
# VC dimension


def behaviour_matrix(functions: Sequence, domain: Sequence) -> np.ndarray:
    """0/1 matrix ``M[i, j] = functions[i].evaluate(domain[j])``."""
    return np.array([[f.evaluate(p) for p in domain] for f in functions], dtype=np.uint8).reshape(
        len(functions), len(domain)
    )


def _vc_of_matrix(M: np.ndarray) -> int:
    rows = np.unique(M, axis=0) if M.size else M
    n_rows = max(len(rows), 1)
    # a point on which every function agrees is never in a shattered set
    live = [j for j in range(M.shape[1]) if rows[:, j].min() != rows[:, j].max()]
    cap = min(len(live), int(np.floor(np.log2(n_rows))))
    best = 0
    for k in range(1, cap + 1):
        weights = 1 << np.arange(k, dtype=np.int64)
        found = False
        for S in itertools.combinations(live, k):
            patterns = rows[:, S].astype(np.int64) @ weights
            if len(np.unique(patterns)) == 1 << k:
                found = True
                break
        if not found:
            break
        best = k
    return best


def vc_dimension(functions: Sequence, domain: Sequence, limit: int = VC_DOMAIN_LIMIT) -> int:
    """Exact VC dimension of a binary class restricted to ``domain``.

    ``functions`` are :class:`BinaryHypothesis` (points are domain ids) or
    :class:`PairFunction` (points are ``(x, y)`` pairs).  Subsets are tried in
    increasing size and the search stops at the first size with no shattered
    subset.
    """
    if not functions:
        raise ValueError("class must be nonempty")
    if len(domain) > limit:
        raise LimitExceeded(f"domain of {len(domain)} points exceeds the limit of {limit}")
    return _vc_of_matrix(behaviour_matrix(functions, domain))


# --------------------------------------------------------------------------
# graph dimension


def _value_matrix(H: Sequence[Predictor], domain: Sequence, Y: Sequence) -> np.ndarray:
    code = {v: i for i, v in enumerate(Y)}
    try:
        return np.array([[code[h(x)] for x in domain] for h in H], dtype=np.int64).reshape(len(H), len(domain))
    except KeyError as e:
        raise ValueError(f"prediction {e.args[0]!r} is not in Y") from None


def _graph_dim_of_matrix(V: np.ndarray) -> int:
    rows = np.unique(V, axis=0) if V.size else V
    n_rows = max(len(rows), 1)
    live = [j for j in range(V.shape[1]) if rows[:, j].min() != rows[:, j].max()]
    cap = min(len(live), int(np.floor(np.log2(n_rows))))
    best = 0
    for k in range(1, cap + 1):
        weights = 1 << np.arange(k, dtype=np.int64)
        found = False
        for S in itertools.combinations(live, k):
            sub = rows[:, S]
            # T = S needs some h equal to f on all of S, so f ranges over the
            # restrictions realised by the class
            for f in np.unique(sub, axis=0):
                patterns = (sub == f).astype(np.int64) @ weights
                if len(np.unique(patterns)) == 1 << k:
                    found = True
                    break
            if found:
                break
        if not found:
            break
        best = k
    return best


def graph_dimension(
    H: PredictorClass | Sequence[Predictor],
    domain: Sequence,
    Y: Sequence,
    limit: int = GRAPH_DOMAIN_LIMIT,
    values_limit: int = GRAPH_VALUES_LIMIT,
) -> int:
    """Exact graph dimension of ``H`` restricted to ``domain``.

    ``S`` is G-shattered when some witness ``f: S -> Y`` has, for every
    ``T`` in ``S``, a member agreeing with ``f`` exactly on ``T``.
    """
    if len(domain) > limit:
        raise LimitExceeded(f"domain of {len(domain)} points exceeds the limit of {limit}")
    if len(Y) > values_limit:
        raise LimitExceeded(f"{len(Y)} prediction values exceed the limit of {values_limit}")
    return _graph_dim_of_matrix(_value_matrix(list(H), domain, Y))


# --------------------------------------------------------------------------
# lemma checks


@dataclass(frozen=True)
class GraphLemmaReport:
    graph_dimension: int
    vc_by_value: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return all(d <= self.graph_dimension for d in self.vc_by_value.values())


@dataclass(frozen=True)
class PhiLemmaReport:
    vc_binary: int
    vc_true_positive: int

    @property
    def holds(self) -> bool:
        return self.vc_true_positive <= self.vc_binary


def check_lemma_graph(H, domain: Sequence, Y: Sequence) -> GraphLemmaReport:
    """VC dimension of each binarised class ``H_v`` against ``d_G(H)``."""
    dg = graph_dimension(H, domain, Y)
    vcs = {v: vc_dimension(binarize_class(H, v), domain) for v in Y}
    return GraphLemmaReport(dg, vcs)


def check_lemma_phi(H_v: Sequence[BinaryHypothesis], domain: Sequence) -> PhiLemmaReport:
    """VC dimension of the true-positive class against that of ``H_v``.

    The pair domain is ``domain x {0, 1}``; pairs with label 0 are constant
    zero and drop out of the search automatically.
    """
    pairs = pair_domain(domain)
    return PhiLemmaReport(
        vc_binary=vc_dimension(H_v, domain),
        vc_true_positive=vc_dimension(true_positive_class(H_v), pairs, limit=max(VC_DOMAIN_LIMIT, len(pairs))),
    )
