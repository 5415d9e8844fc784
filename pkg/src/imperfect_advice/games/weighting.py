"""Berlekamp-weight questioners.

The discrete questioner keeps candidates as run-length encoded rank ranges
``(start, end_exclusive, lies)`` so a balanced threshold is found in time
linear in the number of runs. The continuous questioner keeps rational
half-open segments ``(lo, hi]`` of (0, 1] and halves the weight exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Any

from ..bounds import QueryBudget, berlekamp_weight
from ..errors import DomainError
from .core import ComparisonQuery

Run = tuple[int, int, int]
Segment = tuple[Fraction, Fraction, int]


@dataclass(frozen=True)
class Candidate:
    """A rank range or a segment, with the number of responses it contradicts."""

    id: Any
    lies: int


def _slope(q: int, slack: int) -> int:
    # weight gained on the 'yes' side when one unit moves below the threshold
    if slack < 0:
        return 0
    return comb(q - 1, slack) if slack <= q - 1 else 0


def _merge_append(out: list, lo: Any, hi: Any, lies: int) -> None:
    if out and out[-1][2] == lies and out[-1][1] == lo:
        out[-1] = (out[-1][0], hi, lies)
    else:
        out.append((lo, hi, lies))


def split_runs(runs: list[Run], a: int, answer: bool, H: int) -> list[Run]:
    """Charge a lie to every rank on the side of ``a`` that ``answer`` rules out."""
    out: list[Run] = []
    for s, e, l in runs:
        if e - 1 <= a:
            parts = [(s, e, True)]
        elif s > a:
            parts = [(s, e, False)]
        else:
            parts = [(s, a + 1, True), (a + 1, e, False)]
        for ps, pe, yes in parts:
            nl = l + (0 if yes == answer else 1)
            if nl <= H:
                _merge_append(out, ps, pe, nl)
    return out


def runs_weight(runs: list[Run], q: int, H: int) -> int:
    return sum((e - s) * berlekamp_weight(q, H - l) for s, e, l in runs)


def balanced_threshold(runs: list[Run], q: int, H: int) -> int | None:
    """Threshold minimizing |W_yes - W_no|, ties to the smaller one; None if < 2 live."""
    if not runs or (len(runs) == 1 and runs[0][1] - runs[0][0] <= 1):
        return None
    lo, hi = runs[0][0], runs[-1][1] - 1
    total = runs_weight(runs, q, H)
    w = sum((e - s) * berlekamp_weight(q - 1, H - l - 1) for s, e, l in runs)
    best: tuple[int, int] | None = None
    for s, e, l in runs:
        d = _slope(q, H - l)
        a0, a1 = s, min(e - 1, hi - 1)
        if a0 <= a1:
            cands = {a0, a1}
            if d > 0:
                t = (total - 2 * w) // (2 * d) + s - 1
                cands.update(a for a in (t - 1, t, t + 1, t + 2) if a0 <= a <= a1)
            for a in sorted(cands):
                gap = abs(2 * (w + (a - s + 1) * d) - total)
                if best is None or gap < best[0] or (gap == best[0] and a < best[1]):
                    best = (gap, a)
        w += (e - s) * d
    assert best is not None and lo <= best[1] < hi
    return best[1]


class WeightingQuestioner:
    """Balanced discrete weighting over the labels ``offset .. offset + m - 1``.

    With ``m >= 2`` it always asks exactly ``k`` comparison queries; once a
    single candidate is left the remaining queries are asked at that candidate.
    """

    def __init__(self, m: int, budget: QueryBudget, offset: int = 0):
        if m < 1:
            raise DomainError(f"need at least one candidate, got m={m}")
        self.m = m
        self.budget = budget
        self.offset = offset
        self.H = budget.H
        self.remaining = budget.k if m >= 2 else 0
        self.runs: list[Run] = [(0, m, 0)]
        self._all_dead_min: int | None = None

    # -- protocol ---------------------------------------------------------

    @property
    def finished(self) -> bool:
        return self.remaining == 0

    def next_query(self) -> ComparisonQuery:
        a = balanced_threshold(self.runs, self.remaining, self.H)
        if a is None:
            a = self.runs[0][0] if self.runs else 0
        return ComparisonQuery(self.offset + a)

    def observe(self, query: ComparisonQuery, answer: bool) -> None:
        if self.remaining <= 0:
            raise DomainError("questioner has no queries left")
        a = query.threshold - self.offset
        runs = split_runs(self.runs, a, answer, self.H)
        if not runs and self._all_dead_min is None:
            # every candidate is now inconsistent; remember the best guess
            self._all_dead_min = self._least_lies_label(self.runs, a, answer)
        self.runs = runs
        self.remaining -= 1

    def output(self) -> int:
        if not self.runs:
            return self.offset + (self._all_dead_min if self._all_dead_min is not None else 0)
        best = min(self.runs, key=lambda r: (r[2], r[0]))
        return self.offset + best[0]

    def copy(self) -> "WeightingQuestioner":
        other = object.__new__(WeightingQuestioner)
        other.__dict__.update(self.__dict__)
        other.runs = list(self.runs)
        return other

    # -- weights ----------------------------------------------------------

    @property
    def live_count(self) -> int:
        return sum(e - s for s, e, _ in self.runs)

    def weight(self) -> int:
        return runs_weight(self.runs, self.remaining, self.H)

    def weight_after(self, query: ComparisonQuery, answer: bool) -> int:
        runs = split_runs(self.runs, query.threshold - self.offset, answer, self.H)
        return runs_weight(runs, self.remaining - 1, self.H)

    def candidates(self) -> list[Candidate]:
        return [
            Candidate(self.offset + i, l) for s, e, l in self.runs for i in range(s, e)
        ]

    def loss(self, truth: int) -> int:
        return int(self.output() != truth)

    @staticmethod
    def _least_lies_label(runs: list[Run], a: int, answer: bool) -> int:
        return min(runs, key=lambda r: (r[2] + (0 if (r[0] <= a) == answer else 1), r[0]))[0]


@lru_cache(maxsize=None)
def weighting_worst_live(m: int, k: int, H: int) -> int:
    """Largest number of candidates still live after ``k`` queries, over all answer strings."""

    def rec(runs: tuple[Run, ...], q: int) -> int:
        live = sum(e - s for s, e, _ in runs)
        if q == 0 or live <= 1:
            return live
        a = balanced_threshold(list(runs), q, H)
        assert a is not None
        return max(
            rec(tuple(split_runs(list(runs), a, ans, H)), q - 1) for ans in (True, False)
        )

    return rec(((0, m, 0),), k)


def weighting_identifies(m: int, budget: QueryBudget) -> bool:
    """Exhaustively certify that balanced weighting isolates every ``x`` in ``range(m)``."""
    return weighting_worst_live(m, budget.k, budget.H) <= 1


# ---------------------------------------------------------------------------
# continuous
# ---------------------------------------------------------------------------


def split_segments(segs: list[Segment], a: Fraction, answer: bool, H: int) -> list[Segment]:
    out: list[Segment] = []
    for lo, hi, l in segs:
        parts = []
        if a > lo:
            parts.append((lo, min(hi, a), True))
        if hi > a:
            parts.append((max(lo, a), hi, False))
        for plo, phi, yes in parts:
            nl = l + (0 if yes == answer else 1)
            if nl <= H:
                _merge_append(out, plo, phi, nl)
    return out


def segments_weight(segs: list[Segment], q: int, H: int) -> Fraction:
    return sum(((hi - lo) * berlekamp_weight(q, H - l) for lo, hi, l in segs), Fraction(0))


def halving_threshold(segs: list[Segment], q: int, H: int) -> Fraction:
    """Smallest threshold whose 'yes' weight is exactly half the total, clamped to the hull."""
    total = segments_weight(segs, q, H)
    target = total / 2
    w = sum(((hi - lo) * berlekamp_weight(q - 1, H - l - 1) for lo, hi, l in segs), Fraction(0))
    hull_lo = segs[0][0]
    if w >= target:
        return hull_lo
    for lo, hi, l in segs:
        d = _slope(q, H - l)
        gain = (hi - lo) * d
        if d > 0 and w + gain >= target:
            return lo + (target - w) / d
        w += gain
    raise AssertionError("weight function never reaches half the total")


class CWeightingQuestioner:
    """Exact-halving comparison questioner for a hidden point of (0, 1]."""

    def __init__(self, budget: QueryBudget):
        self.budget = budget
        self.H = budget.H
        self.remaining = budget.k
        self.segments: list[Segment] = [(Fraction(0), Fraction(1), 0)]

    @property
    def finished(self) -> bool:
        return self.remaining == 0

    def next_query(self) -> ComparisonQuery:
        if not self.segments:
            return ComparisonQuery(Fraction(1))
        return ComparisonQuery(halving_threshold(self.segments, self.remaining, self.H))

    def observe(self, query: ComparisonQuery, answer: bool) -> None:
        if self.remaining <= 0:
            raise DomainError("questioner has no queries left")
        self.segments = split_segments(self.segments, Fraction(query.threshold), answer, self.H)
        self.remaining -= 1

    def weight(self) -> Fraction:
        return segments_weight(self.segments, self.remaining, self.H)

    def weight_after(self, query: ComparisonQuery, answer: bool) -> Fraction:
        segs = split_segments(self.segments, Fraction(query.threshold), answer, self.H)
        return segments_weight(segs, self.remaining - 1, self.H)

    def measure(self) -> Fraction:
        """Total length of points contradicting at most H responses."""
        return sum((hi - lo for lo, hi, _ in self.segments), Fraction(0))

    def hull(self) -> tuple[Fraction, Fraction] | None:
        if not self.segments:
            return None
        return self.segments[0][0], self.segments[-1][1]

    def output(self) -> tuple[tuple[Fraction, Fraction] | None, Fraction]:
        return self.hull(), self.measure()

    def candidates(self) -> list[Candidate]:
        return [Candidate((lo, hi), l) for lo, hi, l in self.segments]

    def copy(self) -> "CWeightingQuestioner":
        other = object.__new__(CWeightingQuestioner)
        other.__dict__.update(self.__dict__)
        other.segments = list(self.segments)
        return other

    def loss(self, truth: Fraction) -> Fraction:
        return self.measure()
