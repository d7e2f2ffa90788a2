"""Greedy source-category ordering and stopping-point selection.

Each step scores every unselected category joined to the already-selected
prefix and keeps the one with the smallest projection error. The resulting
error curve typically falls while target categories are being added and
rises once only foreign categories remain, so its minimum marks a good
training subset.
"""

from __future__ import annotations

import csv
import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .dataio import Dataset
from .exceptions import DegenerateEvolutionError
from .scoring import ErrorKind, SubsetScorer


class StopRule(enum.Enum):
    FIRST_LOCAL_MIN = "local"
    GLOBAL_MIN = "global"


@dataclass(frozen=True)
class EvolutionTrace:
    """Greedy category ordering with the per-step projection errors.

    ``errors[i]`` is the score of the prefix ``ordering[: i + 1]``.
    """

    ordering: tuple[int, ...]
    errors: tuple[float, ...]
    error_kind: ErrorKind
    d: int

    def __post_init__(self):
        if len(self.ordering) != len(self.errors):
            raise ValueError("ordering and errors must have equal length")
        if len(set(self.ordering)) != len(self.ordering):
            raise ValueError("ordering contains duplicate categories")

    @property
    def num_categories(self) -> int:
        return len(self.ordering)


def evolve(
    source: Dataset,
    target: Dataset,
    kind: ErrorKind,
    d: int,
    *,
    threads: int = 1,
) -> EvolutionTrace:
    """Order all source categories by greedy projection-error descent.

    Candidate prefixes too small for a d-dimensional PCA score +inf and are
    skipped; if every remaining candidate is unscorable at some step the
    evolution is degenerate. Candidate scoring is fanned out over ``threads``
    workers; ties go to the smaller category identifier, so the trace does
    not depend on evaluation order.
    """
    scorer = SubsetScorer(source, target, d, kind)
    remaining = list(source.label_set())
    selected: list[int] = []
    errors: list[float] = []
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while remaining:
            candidates = [selected + [c] for c in remaining]
            if pool is not None and len(candidates) > 1:
                scores = list(pool.map(scorer.score_or_inf, candidates))
            else:
                scores = [scorer.score_or_inf(c) for c in candidates]
            best = min(range(len(remaining)), key=lambda i: (scores[i], remaining[i]))
            if math.isinf(scores[best]):
                raise DegenerateEvolutionError(
                    f"no scorable candidate at step {len(selected) + 1}; "
                    f"d={d} likely exceeds every candidate's sample count"
                )
            selected.append(remaining.pop(best))
            errors.append(scores[best])
    finally:
        if pool is not None:
            pool.shutdown()
    return EvolutionTrace(
        ordering=tuple(selected), errors=tuple(errors), error_kind=kind, d=d
    )


def select_k(trace: EvolutionTrace | Sequence[float], rule: StopRule) -> int:
    """Pick the prefix length K (1-based) from the error curve.

    GLOBAL_MIN returns the smallest index attaining the minimum error.
    FIRST_LOCAL_MIN returns the earliest index that is no worse than its
    predecessor and strictly below the next distinct value to its right;
    the first index of a plateau qualifies, and a curve that never rises
    again (monotone nonincreasing) yields K = m.
    """
    errors = list(trace.errors if isinstance(trace, EvolutionTrace) else trace)
    if not errors:
        raise ValueError("empty error list")
    if rule is StopRule.GLOBAL_MIN:
        return min(range(len(errors)), key=lambda i: (errors[i], i)) + 1
    for k, value in enumerate(errors):
        if k > 0 and value > errors[k - 1]:
            continue
        following = next((e for e in errors[k + 1 :] if e != value), None)
        if following is not None and following > value:
            return k + 1
    return len(errors)


def selected_categories(trace: EvolutionTrace, k: int) -> tuple[int, ...]:
    """First ``k`` categories of the ordering, the training label set."""
    if not 1 <= k <= trace.num_categories:
        raise IndexError(f"k={k} out of range 1..{trace.num_categories}")
    return trace.ordering[:k]


def write_trace_csv(
    trace: EvolutionTrace, category_names: Mapping[int, str], path
) -> None:
    """Serialize a trace as CSV with columns step, category_id, category_name, error."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["step", "category_id", "category_name", "error"])
        for step, (ident, error) in enumerate(zip(trace.ordering, trace.errors), start=1):
            writer.writerow([step, ident, category_names.get(ident, str(ident)), repr(error)])
