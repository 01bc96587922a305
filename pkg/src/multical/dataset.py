"""CSV datasets and run configuration.

Dataset layout (UTF-8, comma separated, header row)::

    id,y,pred:<name>,...,group:<name>,...

``y`` is 0/1, each ``pred:`` column holds one predictor's score in [0, 1] and
each ``group:`` column is a 0/1 membership flag.  Rows are reported by file
line, so the first data row is row 2.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from pathlib import Path

from .model import (
    FiniteDistribution,
    LabeledSample,
    PredictionSpace,
    Predictor,
    PredictorClass,
    SubpopulationCollection,
)

PRED_PREFIX = "pred:"
GROUP_PREFIX = "group:"


class DatasetError(ValueError):
    """Malformed dataset; carries the offending row and column when known."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.row, self.column = row, column


class DomainViolation(DatasetError):
    """A well-formed cell holding a value outside its allowed range."""


@dataclass(frozen=True)
class Dataset:
    ids: tuple
    labels: tuple
    predictors: PredictorClass
    groups: SubpopulationCollection

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def domain(self) -> tuple:
        return self.ids

    def sample(self) -> LabeledSample:
        """Rows as i.i.d. draws."""
        return LabeledSample(tuple(zip(self.ids, self.labels)))

    def distribution(self) -> FiniteDistribution:
        """Uniform distribution over rows ("exact" mode)."""
        w = Fraction(1, len(self.ids))
        return FiniteDistribution(tuple((x, y, w) for x, y in zip(self.ids, self.labels)))

    def prediction_values(self) -> list:
        return sorted({v for h in self.predictors for v in h.table.values()})

    def space(self, mode: str, lam: float) -> PredictionSpace:
        if mode == "finite-Y":
            return PredictionSpace.finite(self.prediction_values())
        return PredictionSpace.continuous(lam)


def _parse_unit(text: str, row: int, column: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise DatasetError(f"not a number: {text!r}", row, column) from None
    if not (0.0 <= v <= 1.0) or math.isnan(v):
        raise DomainViolation(f"value {text!r} outside [0, 1]", row, column)
    return v


def _parse_flag(text: str, row: int, column: str, what: str) -> int:
    t = text.strip()
    if t not in ("0", "1"):
        raise DomainViolation(f"{what} must be 0 or 1, got {text!r}", row, column)
    return int(t)


def load_dataset(path) -> Dataset:
    """Read a dataset CSV.

    Raises:
        DatasetError: unreadable layout, bad numbers, duplicate ids.
        DomainViolation: label not 0/1, score outside [0, 1], bad membership flag.
    """
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as e:
        raise DatasetError(f"cannot open {path}: {e.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DatasetError("empty file", 1) from None
        if "id" not in header or "y" not in header:
            raise DatasetError("header needs 'id' and 'y' columns", 1)
        if len(set(header)) != len(header):
            raise DatasetError("duplicate column names", 1)
        pred_cols = [c for c in header if c.startswith(PRED_PREFIX)]
        group_cols = [c for c in header if c.startswith(GROUP_PREFIX)]
        for c in header:
            if c not in ("id", "y") and c not in pred_cols and c not in group_cols:
                raise DatasetError(f"unknown column {c!r}; use the 'pred:' or 'group:' prefix", 1, c)
        if not pred_cols:
            raise DatasetError("no 'pred:' columns", 1)
        col = {c: i for i, c in enumerate(header)}

        ids, labels = [], []
        preds = {c: {} for c in pred_cols}
        members = {c: set() for c in group_cols}
        seen = set()
        for row, cells in enumerate(reader, start=2):
            if not cells or all(not c.strip() for c in cells):
                continue
            if len(cells) != len(header):
                raise DatasetError(f"expected {len(header)} fields, got {len(cells)}", row)
            x = cells[col["id"]].strip()
            if not x:
                raise DatasetError("empty id", row, "id")
            if x in seen:
                raise DatasetError(f"duplicate id {x!r}", row, "id")
            seen.add(x)
            ids.append(x)
            labels.append(_parse_flag(cells[col["y"]], row, "y", "label"))
            for c in pred_cols:
                preds[c][x] = _parse_unit(cells[col[c]], row, c)
            for c in group_cols:
                if _parse_flag(cells[col[c]], row, c, "membership"):
                    members[c].add(x)

    if not ids:
        raise DatasetError("no data rows")
    for c, m in members.items():
        if not m:
            raise DatasetError(f"subpopulation {c[len(GROUP_PREFIX):]!r} has no members", None, c)
    H = PredictorClass(tuple(Predictor(c[len(PRED_PREFIX):], preds[c]) for c in pred_cols))
    if group_cols:
        groups = SubpopulationCollection(tuple((c[len(GROUP_PREFIX):], members[c]) for c in group_cols))
    else:
        groups = SubpopulationCollection((("all", set(ids)),))
    return Dataset(tuple(ids), tuple(labels), H, groups)


def export_distribution(D: FiniteDistribution, H: PredictorClass, groups: SubpopulationCollection,
                        path, resolution: int = 1000) -> int:
    """Write ``D`` as a dataset with ``round(p * resolution)`` rows per outcome.

    The reloaded dataset's uniform distribution equals ``D`` exactly when every
    probability is a multiple of ``1/resolution``.  Returns the row count.
    """
    rows = []
    for x, y, p in D.support:
        k = round(float(p) * resolution)
        for r in range(k):
            rows.append((f"{x}#{y}#{r}", y, x))
    if not rows:
        raise ValueError("resolution too coarse: no rows written")
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "y"] + [PRED_PREFIX + h.name for h in H] + [GROUP_PREFIX + g.name for g in groups])
        for rid, y, x in rows:
            w.writerow([rid, y] + [repr(float(h(x))) for h in H] + [int(x in g.members) for g in groups])
    return len(rows)


# --------------------------------------------------------------------------
# run configuration


@dataclass(frozen=True)
class RunConfig:
    alpha: float = 0.05
    gamma: float = 0.1
    psi: float = 0.1
    epsilon: float = 0.05
    delta: float = 0.05
    lam: float = 0.1
    mode: str = "continuous-Y"
    trials: int = 200
    seed: int = 0
    c_graph: float = 64.0
    c_fund: float = 8.0
    c_lower: float = 1.0
    max_domain_for_dims: int = 12
    max_y_for_dims: int = 8

    def __post_init__(self):
        if not (0 <= self.alpha <= 1):
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        for name in ("gamma", "psi", "lam"):
            v = getattr(self, name)
            if not (0 < v <= 1):
                raise ValueError(f"{name} must lie in (0, 1], got {v}")
        for name in ("epsilon", "delta"):
            v = getattr(self, name)
            if not (0 < v < 1):
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        PredictionSpace.continuous(self.lam)  # 1/lambda must be an integer
        if self.mode not in ("finite-Y", "continuous-Y"):
            raise ValueError(f"mode must be finite-Y or continuous-Y, got {self.mode!r}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be a u64")
        for name in ("c_graph", "c_fund", "c_lower"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    def as_dict(self) -> dict:
        return {("lambda" if k == "lam" else k): v for k, v in asdict(self).items()}


_CONFIG_ALIASES = {"lambda": "lam"}


def _coerce(name: str, text: str):
    kind = {f.name: f.type for f in fields(RunConfig)}[name]
    if kind == "int":
        return int(text)
    if kind == "float":
        return float(text)
    return text


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    known = {f.name for f in fields(RunConfig)}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{source}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = _CONFIG_ALIASES.get(key.replace("-", "_"), key.replace("-", "_"))
        if key not in known:
            raise ValueError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _coerce(key, value)
        except ValueError:
            raise ValueError(f"{source}:{lineno}: bad value {value!r} for {key}") from None
    return out


def load_config(path) -> dict:
    return parse_config_text(Path(path).read_text(encoding="utf-8"), str(path))
