"""Human-likeness scoring of difficulty-stratified benchmark results.

Given test performance of a model trained on the easy, medium and hard
slices of a task, a logical score rewards orderings that match human
learning (easy-trained best) and penalizes the reverse:

    +0.75   easy >= medium >= hard
    +0.375  easy >= hard   >= medium
     0      medium-first orderings
    -0.375  hard >= easy   >= medium
    -0.75   hard >= medium >= easy

Cases are checked top to bottom and the first match wins; an exact
three-way tie scores 0 because it carries no ordering evidence. On top of
the logical score, a dispersion bonus of 0.25 * sign * sigmoid(STD) rewards
decisive performance gaps, where STD is the standard deviation of the raw
triplet (population divisor by default). Averaging these cell values along
one axis of a (task, criterion, model) cube yields the per-model, per-task
and per-criterion indices.

Values lie in the open interval (-1, 1) mathematically; the sigmoid only
reaches 1 as STD grows without bound, although float rounding can pin a
cell to exactly +/-1.0 once STD exceeds roughly 37 (e.g. for perplexity
triplets spanning hundreds of points).
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from statistics import fmean, pstdev, stdev
from typing import Iterable, Mapping

from .errors import IncompleteDataWarning, MissingKey, ParseError, ValidationError

LEVELS = ("easy", "medium", "hard")
AXES = ("model", "task", "criterion")

CUBE_COLUMNS = (
    "task", "criterion", "model", "train_level", "eval_level",
    "metric", "value", "higher_is_better",
)


@dataclass(frozen=True)
class PerformanceTriplet:
    """Metric values for easy/medium/hard-trained runs of one cell."""

    easy: float
    medium: float
    hard: float
    higher_is_better: bool = True

    def __post_init__(self):
        for v in (self.easy, self.medium, self.hard):
            if not math.isfinite(v):
                raise ValidationError(f"triplet values must be finite, got {v!r}")


def logical_score(t: PerformanceTriplet) -> float:
    """Ordering score in {0.75, 0.375, 0, -0.375, -0.75}.

    Direction is normalized first, so a perplexity triplet whose hard value
    is lowest scores the same as an accuracy triplet whose hard value is
    highest. Only rankings matter; the function is invariant under any
    strictly increasing transform of all three values.
    """
    e, m, h = t.easy, t.medium, t.hard
    if not t.higher_is_better:
        e, m, h = -e, -m, -h
    if e == m == h:
        return 0.0
    cases = (
        (0.75, e, m, h),
        (0.375, e, h, m),
        (0.0, m, h, e),
        (0.0, m, e, h),
        (-0.375, h, e, m),
        (-0.75, h, m, e),
    )
    for score, a, b, c in cases:
        if a >= b >= c:
            return score
    raise AssertionError("unreachable: some ordering always holds")


def triplet_std(t: PerformanceTriplet, ddof: int = 0) -> float:
    """Standard deviation of the raw triplet values (population by default)."""
    values = [t.easy, t.medium, t.hard]
    return pstdev(values) if ddof == 0 else stdev(values)


def sigmoid(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))


def cell_value(t: PerformanceTriplet, ddof: int = 0) -> float:
    """Logical score plus the sign-gated dispersion bonus.

    Returns s + 0.25 * sgn(s) * sigmoid(STD). Exactly 0 whenever the logical
    score is 0: with no ordering evidence the dispersion term is silenced.
    """
    s = logical_score(t)
    if s == 0.0:
        return 0.0
    bonus = 0.25 * math.copysign(1.0, s) * sigmoid(triplet_std(t, ddof))
    return s + bonus


@dataclass(frozen=True)
class CubeCell:
    task: str
    criterion: str
    model: str
    triplet: PerformanceTriplet


class PerformanceCube:
    """Benchmark metric values indexed by (task, criterion, model).

    Each index key owns one triplet of full-test-set performances (one per
    train level). Rows evaluated on individual difficulty slices of the test
    set (eval level easy/medium/hard) are kept separately for transfer
    analysis; see :mod:`hlmkit.experiment`.
    """

    def __init__(self, cells: Iterable[CubeCell],
                 eval_rows: Mapping[tuple, float] | None = None,
                 eval_directions: Mapping[tuple, bool] | None = None):
        self.cells: dict[tuple[str, str, str], PerformanceTriplet] = {}
        for c in cells:
            key = (c.task, c.criterion, c.model)
            if key in self.cells:
                raise ValidationError(f"duplicate cube cell {key}")
            self.cells[key] = c.triplet
        # (task, criterion, model, train_level, eval_level) -> metric value
        self.eval_rows = dict(eval_rows or {})
        self.eval_directions = dict(eval_directions or {})
        if not self.cells and not self.eval_rows:
            raise ValidationError("performance cube is empty")

    @property
    def tasks(self) -> tuple[str, ...]:
        return tuple(sorted({k[0] for k in self.cells}))

    @property
    def criteria(self) -> tuple[str, ...]:
        return tuple(sorted({k[1] for k in self.cells}))

    @property
    def models(self) -> tuple[str, ...]:
        return tuple(sorted({k[2] for k in self.cells}))

    def triplet(self, task: str, criterion: str, model: str) -> PerformanceTriplet:
        try:
            return self.cells[(task, criterion, model)]
        except KeyError:
            raise MissingKey(f"no cell for ({task!r}, {criterion!r}, {model!r})") from None


def _axis_selector(axis: str):
    if axis not in AXES:
        raise ValidationError(f"axis must be one of {AXES}, got {axis!r}")
    return {"task": 0, "criterion": 1, "model": 2}[axis]


def index(cube: PerformanceCube, axis: str, key: str, ddof: int = 0) -> float:
    """Mean cell value over all cube cells sharing ``key`` on ``axis``."""
    pos = _axis_selector(axis)
    values = [cell_value(t, ddof) for k, t in sorted(cube.cells.items()) if k[pos] == key]
    if not values:
        raise MissingKey(f"no cells for {axis}={key!r}")
    return fmean(values)


@dataclass(frozen=True)
class CellBreakdown:
    task: str
    criterion: str
    model: str
    s: float
    std: float
    sigmoid: float
    value: float


@dataclass(frozen=True)
class HlmReport:
    """Per-axis index values plus the per-cell breakdown they average."""

    i_model: dict[str, float]
    i_task: dict[str, float]
    i_criteria: dict[str, float]
    cells: tuple[CellBreakdown, ...]
    std_ddof: int = 0


def compute_report(cube: PerformanceCube, ddof: int = 0) -> HlmReport:
    """Compute all three index families over a cube.

    Cells absent from the full task x criterion x model cross product are
    skipped with a warning and the per-key divisor shrinks accordingly, so
    partial cubes still produce a report.
    """
    expected = {
        (t, c, m)
        for t in cube.tasks for c in cube.criteria for m in cube.models
    }
    missing = sorted(expected - cube.cells.keys())
    if missing:
        warnings.warn(
            f"cube is sparse; skipping {len(missing)} missing cells: {missing}",
            IncompleteDataWarning,
            stacklevel=2,
        )
    breakdown = []
    for (task, criterion, model), t in sorted(cube.cells.items()):
        s = logical_score(t)
        std = triplet_std(t, ddof)
        sig = sigmoid(std)
        breakdown.append(CellBreakdown(
            task=task, criterion=criterion, model=model,
            s=s, std=std, sigmoid=sig, value=cell_value(t, ddof),
        ))
    by_axis = {"model": {}, "task": {}, "criterion": {}}
    for axis, keys in (("model", cube.models), ("task", cube.tasks), ("criterion", cube.criteria)):
        for key in keys:
            by_axis[axis][key] = index(cube, axis, key, ddof)
    return HlmReport(
        i_model=by_axis["model"],
        i_task=by_axis["task"],
        i_criteria=by_axis["criterion"],
        cells=tuple(breakdown),
        std_ddof=ddof,
    )


def report_to_dict(report: HlmReport) -> dict:
    return {
        "i_model": dict(sorted(report.i_model.items())),
        "i_task": dict(sorted(report.i_task.items())),
        "i_criteria": dict(sorted(report.i_criteria.items())),
        "std_ddof": report.std_ddof,
        "cells": [
            {"task": c.task, "criterion": c.criterion, "model": c.model,
             "s": c.s, "std": c.std, "sigmoid": c.sigmoid, "value": c.value}
            for c in report.cells
        ],
    }


# ---------------------------------------------------------------------------
# CSV cube format

def _parse_bool(raw: str, lineno: int) -> bool:
    v = raw.strip().lower()
    if v in ("true", "1", "yes"):
        return True
    if v in ("false", "0", "no"):
        return False
    raise ParseError(f"invalid boolean {raw!r}", line=lineno)


def load_cube_csv(path: str | Path) -> PerformanceCube:
    """Load a performance cube from CSV.

    Required header: task,criterion,model,train_level,eval_level,metric,
    value,higher_is_better. Rows with eval_level "full" form the per-key
    triplets used by the indices; rows with eval_level easy/medium/hard are
    kept for transfer analysis. Metric direction must be consistent within
    a (task, criterion, model) group.
    """
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty cube file", line=1) from None
        if tuple(h.strip() for h in header) != CUBE_COLUMNS:
            raise ParseError(
                f"expected header {','.join(CUBE_COLUMNS)}, got {','.join(header)}", line=1
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not f.strip() for f in row):
                continue
            if len(row) != len(CUBE_COLUMNS):
                raise ParseError(f"expected {len(CUBE_COLUMNS)} fields, got {len(row)}", line=lineno)
            task, criterion, model, train_level, eval_level, metric, value, hib = (
                f.strip() for f in row
            )
            if train_level not in LEVELS:
                raise ParseError(f"invalid train_level {train_level!r}", line=lineno)
            if eval_level not in LEVELS + ("full",):
                raise ParseError(f"invalid eval_level {eval_level!r}", line=lineno)
            try:
                val = float(value)
            except ValueError:
                raise ParseError(f"invalid value {value!r}", line=lineno) from None
            if not math.isfinite(val):
                raise ParseError(f"non-finite value {value!r}", line=lineno)
            rows.append((task, criterion, model, train_level, eval_level,
                         metric, val, _parse_bool(hib, lineno), lineno))

    directions: dict[tuple[str, str, str], bool] = {}
    full: dict[tuple[str, str, str], dict[str, float]] = {}
    eval_rows: dict[tuple, float] = {}
    eval_directions: dict[tuple, bool] = {}
    for task, criterion, model, train_level, eval_level, metric, val, hib, lineno in rows:
        key = (task, criterion, model)
        if key in directions and directions[key] != hib:
            raise ValidationError(
                f"line {lineno}: inconsistent higher_is_better within group {key}"
            )
        directions[key] = hib
        if eval_level == "full":
            group = full.setdefault(key, {})
            if train_level in group:
                raise ValidationError(f"line {lineno}: duplicate row for {key} train={train_level}")
            group[train_level] = val
        else:
            ekey = key + (train_level, eval_level)
            if ekey in eval_rows:
                raise ValidationError(f"line {lineno}: duplicate row for {ekey}")
            eval_rows[ekey] = val
            eval_directions[ekey] = hib

    cells = []
    incomplete = []
    for key, group in sorted(full.items()):
        if set(group) != set(LEVELS):
            incomplete.append(key)
            continue
        cells.append(CubeCell(
            task=key[0], criterion=key[1], model=key[2],
            triplet=PerformanceTriplet(
                easy=group["easy"], medium=group["medium"], hard=group["hard"],
                higher_is_better=directions[key],
            ),
        ))
    if incomplete:
        warnings.warn(
            f"skipping {len(incomplete)} incomplete triplet groups: {incomplete}",
            IncompleteDataWarning,
            stacklevel=2,
        )
    return PerformanceCube(cells, eval_rows=eval_rows, eval_directions=eval_directions)
