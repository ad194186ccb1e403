"""Curriculum schedules, convergence measurement and difficulty transfer.

Schedules order a split corpus for training: easy-to-hard mimics human
learning, hard-to-easy reverses the phase order, and random applies a seeded
Fisher-Yates shuffle driven by splitmix64 so the same seed reproduces the
same permutation on any platform.

The convergence ratio of a training log is the first step whose dev metric
comes within a relative tolerance of the log's best value, divided by the
last step. Lower means faster convergence.

Transfer scoring ranks the three train levels (3 = best, ties share the
average rank) within every evaluation level of every complete run group and
averages the ranks into a 3x3 matrix whose columns each sum to 6 on
complete data.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from statistics import fmean
from typing import Sequence

from .errors import IncompleteDataWarning, ParseError, ValidationError
from .hlm import LEVELS, PerformanceCube
from .splitkit import DifficultySplit

ORDERS = ("easy_to_hard", "hard_to_easy", "random")

_MASK64 = (1 << 64) - 1


def _splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns (next_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def seeded_shuffle(items: Sequence, seed: int) -> list:
    """Fisher-Yates shuffle with splitmix64 as the randomness source.

    The seed is the entire PRNG state, so results are reproducible
    bit-exactly across platforms and Python versions.
    """
    out = list(items)
    state = seed & _MASK64
    for i in range(len(out) - 1, 0, -1):
        state, z = _splitmix64(state)
        j = z % (i + 1)
        out[i], out[j] = out[j], out[i]
    return out


@dataclass(frozen=True)
class Schedule:
    """A training order over a split corpus with its two phase boundaries."""

    order: str
    seed: int | None
    sequence: tuple[str, ...]
    phase_boundaries: tuple[int, int]


def make_schedule(split: DifficultySplit, order: str, seed: int | None = None) -> Schedule:
    """Build a training schedule from a difficulty split.

    easy_to_hard concatenates easy, medium, hard with within-phase order
    preserved; hard_to_easy reverses the phase order only. random shuffles
    the whole corpus with the given seed; its phase boundaries mark the same
    block sizes but carry no difficulty meaning.
    """
    if order not in ORDERS:
        raise ValidationError(f"order must be one of {ORDERS}, got {order!r}")
    easy, medium, hard = list(split.easy), list(split.medium), list(split.hard)
    if order == "easy_to_hard":
        seq = easy + medium + hard
        bounds = (len(easy), len(easy) + len(medium))
        seed = None
    elif order == "hard_to_easy":
        seq = hard + medium + easy
        bounds = (len(hard), len(hard) + len(medium))
        seed = None
    else:
        if seed is None:
            raise ValidationError("random schedules require a seed")
        seq = seeded_shuffle(easy + medium + hard, seed)
        bounds = (len(easy), len(easy) + len(medium))
    return Schedule(order=order, seed=seed, sequence=tuple(seq), phase_boundaries=bounds)


def schedule_to_dict(s: Schedule) -> dict:
    return {
        "order": s.order,
        "seed": s.seed,
        "sequence": list(s.sequence),
        "phase_boundaries": list(s.phase_boundaries),
    }


def schedule_from_dict(data: dict) -> Schedule:
    required = {"order", "seed", "sequence", "phase_boundaries"}
    if not isinstance(data, dict) or not required <= data.keys():
        raise ValidationError(f"schedule object must contain {sorted(required)}")
    return Schedule(
        order=data["order"],
        seed=data["seed"],
        sequence=tuple(data["sequence"]),
        phase_boundaries=(int(data["phase_boundaries"][0]), int(data["phase_boundaries"][1])),
    )


@dataclass(frozen=True)
class TrainingLog:
    """Dev-set metric measurements over strictly increasing step numbers."""

    steps: tuple[tuple[int, float], ...]
    higher_is_better: bool = True

    def __post_init__(self):
        if len(self.steps) < 2:
            raise ValidationError("training log needs at least 2 entries")
        prev = 0
        for step, value in self.steps:
            if step <= prev:
                raise ValidationError(f"steps must be strictly increasing and >= 1, got {step}")
            if not math.isfinite(value):
                raise ValidationError(f"non-finite metric at step {step}")
            prev = step


def convergence_ratio(log: TrainingLog, epsilon_rel: float = 0.001) -> float:
    """Convergent step divided by total steps, in (0, 1]. Lower is better.

    The convergent step is the first whose metric lies within
    ``epsilon_rel * |best|`` of the best metric in the log, direction-aware.
    """
    if not 0 < epsilon_rel < 1:
        raise ValidationError(f"epsilon_rel must be in (0, 1), got {epsilon_rel}")
    values = [v for _, v in log.steps]
    best = max(values) if log.higher_is_better else min(values)
    slack = epsilon_rel * abs(best)
    for step, value in log.steps:
        if log.higher_is_better:
            if value >= best - slack:
                return step / log.steps[-1][0]
        else:
            if value <= best + slack:
                return step / log.steps[-1][0]
    raise AssertionError("unreachable: the best entry always qualifies")


def load_training_log(path: str | Path, higher_is_better: bool) -> TrainingLog:
    """Training log CSV with header ``step,value``."""
    entries = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty training log", line=1) from None
        if [h.strip() for h in header] != ["step", "value"]:
            raise ParseError(f"expected header step,value, got {','.join(header)}", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not f.strip() for f in row):
                continue
            if len(row) != 2:
                raise ParseError(f"expected 2 fields, got {len(row)}", line=lineno)
            try:
                entries.append((int(row[0]), float(row[1])))
            except ValueError:
                raise ParseError(f"invalid row {row!r}", line=lineno) from None
    return TrainingLog(steps=tuple(entries), higher_is_better=higher_is_better)


@dataclass(frozen=True)
class TransferMatrix:
    """Average 3/2/1 rank of each train level on each evaluation level."""

    values: dict[tuple[str, str], float]  # (train_level, eval_level) -> mean rank
    groups: tuple[tuple[str, str, str], ...]  # contributing (task, criterion, model)

    def column_sum(self, eval_level: str) -> float:
        return sum(self.values[(tr, eval_level)] for tr in LEVELS)


def _rank_scores(level_values: dict[str, float], higher_is_better: bool) -> dict[str, float]:
    # best performance gets rank 3; tied values share the average of their ranks
    ordered = sorted(level_values.values(), reverse=higher_is_better)
    out = {}
    for level, v in level_values.items():
        positions = [i for i, sv in enumerate(ordered) if sv == v]
        out[level] = fmean(3 - i for i in positions)
    return out


def transfer_scores(cube: PerformanceCube) -> TransferMatrix:
    """Average train-level ranks per eval level over all complete run groups.

    A group is one (task, criterion, model) with metric values for all nine
    train x eval level combinations; incomplete groups are skipped with a
    warning. Columns of the result sum to 6 exactly (up to float error).
    """
    groups: dict[tuple[str, str, str], dict[tuple[str, str], float]] = {}
    for (task, criterion, model, train_level, eval_level), value in cube.eval_rows.items():
        groups.setdefault((task, criterion, model), {})[(train_level, eval_level)] = value

    complete = []
    skipped = []
    needed = {(tr, ev) for tr in LEVELS for ev in LEVELS}
    for key in sorted(groups):
        if set(groups[key]) >= needed:
            complete.append(key)
        else:
            skipped.append(key)
    if skipped:
        warnings.warn(
            f"skipping {len(skipped)} incomplete transfer groups: {skipped}",
            IncompleteDataWarning,
            stacklevel=2,
        )
    if not complete:
        raise ValidationError("no complete (train x eval) groups in cube")

    sums = {(tr, ev): 0.0 for tr in LEVELS for ev in LEVELS}
    for key in complete:
        direction = cube.eval_directions[key + (LEVELS[0], LEVELS[0])]
        for ev in LEVELS:
            ranks = _rank_scores(
                {tr: groups[key][(tr, ev)] for tr in LEVELS}, direction
            )
            for tr in LEVELS:
                sums[(tr, ev)] += ranks[tr]
    n = len(complete)
    return TransferMatrix(
        values={k: v / n for k, v in sums.items()},
        groups=tuple(complete),
    )


def transfer_to_dict(matrix: TransferMatrix) -> dict:
    return {
        "train_levels": list(LEVELS),
        "eval_levels": list(LEVELS),
        "matrix": {tr: {ev: matrix.values[(tr, ev)] for ev in LEVELS} for tr in LEVELS},
        "group_count": len(matrix.groups),
        "groups": [list(g) for g in matrix.groups],
    }


def converge_result_to_dict(log: TrainingLog, epsilon_rel: float) -> dict:
    ratio = convergence_ratio(log, epsilon_rel)
    best = (max if log.higher_is_better else min)(v for _, v in log.steps)
    slack = epsilon_rel * abs(best)
    for step, value in log.steps:
        ok = value >= best - slack if log.higher_is_better else value <= best + slack
        if ok:
            convergent = step
            break
    return {
        "ratio": ratio,
        "convergent_step": convergent,
        "total_steps": log.steps[-1][0],
        "epsilon_rel": epsilon_rel,
        "higher_is_better": log.higher_is_better,
        "best_metric": best,
    }
