"""Adaptive lying responders that keep the heavier Berlekamp half."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..bounds import QueryBudget, berlekamp_weight, partial_binomial_sum
from ..errors import DomainError
from .core import ComparisonQuery, Query, Responder
from .weighting import Segment, segments_weight, split_segments


class ContinuousAdversary(Responder):
    """Answers comparison queries on (0, 1] to keep the larger weight (ties: 'no')."""

    def __init__(self, budget: QueryBudget):
        super().__init__(budget)
        self.remaining = budget.k
        self.segments: list[Segment] = [(Fraction(0), Fraction(1), 0)]

    def respond(self, query: Query, questioner: object = None) -> bool:
        if not isinstance(query, ComparisonQuery):
            raise DomainError("the continuous game uses comparison queries only")
        if self.remaining <= 0:
            raise DomainError(f"more than k={self.budget.k} queries asked")
        a, H = Fraction(query.threshold), self.budget.H
        yes = split_segments(self.segments, a, True, H)
        no = split_segments(self.segments, a, False, H)
        q = self.remaining - 1
        answer = segments_weight(yes, q, H) > segments_weight(no, q, H)
        self.segments = yes if answer else no
        self.remaining -= 1
        self.transcript.record(query, answer, lied=False)
        return answer

    def consistent_measure(self) -> Fraction:
        return sum((hi - lo for lo, hi, _ in self.segments), Fraction(0))

    def witness(self) -> Fraction:
        """A point contradicting at most H responses (right end of the first live segment)."""
        return self.segments[0][1]

    def finalize(self) -> Fraction:
        """Fix the hidden point and record which responses were lies against it."""
        x = self.witness()
        self.transcript.lie_positions = self.transcript.lies_against(x)
        return x


def adversary_continuous(budget: QueryBudget) -> ContinuousAdversary:
    return ContinuousAdversary(budget)


@dataclass(frozen=True)
class SearchWitness:
    """A permutation consistent with all but ``len(lie_positions)`` responses."""

    ranks: tuple[int, ...]  # ranks[i] = A[i]
    argmin: int
    output: int
    lie_positions: tuple[int, ...]

    @property
    def output_rank(self) -> int:
        return self.ranks[self.output]


def search_rank_floor(n: int, budget: QueryBudget) -> int:
    """min(floor(n <<k,H>> / 2^k), n - 1)."""
    return min(n * partial_binomial_sum(budget.k, budget.H) >> budget.k, n - 1)


class SearchAdversary(Responder):
    """Responder for the hidden-permutation Search game.

    Queries ask whether the rank-0 index lies in a set; each index carries the
    number of responses it contradicts, and every answer keeps the heavier half.
    """

    def __init__(self, n: int, budget: QueryBudget):
        if n < 1:
            raise DomainError(f"n must be positive, got {n}")
        super().__init__(budget)
        self.n = n
        self.remaining = budget.k
        self.lies = [0] * n

    def _weight(self, lies: list[int], q: int) -> int:
        H = self.budget.H
        return sum(berlekamp_weight(q, H - l) for l in lies)

    def respond(self, query: Query, questioner: object = None) -> bool:
        if self.remaining <= 0:
            raise DomainError(f"more than k={self.budget.k} queries asked")
        inside = [query.holds(i) for i in range(self.n)]
        yes = [l + (0 if s else 1) for l, s in zip(self.lies, inside)]
        no = [l + (1 if s else 0) for l, s in zip(self.lies, inside)]
        q = self.remaining - 1
        answer = self._weight(yes, q) > self._weight(no, q)
        self.lies = yes if answer else no
        self.remaining -= 1
        self.transcript.record(query, answer, lied=False)
        return answer

    def live(self) -> list[int]:
        return [i for i, l in enumerate(self.lies) if l <= self.budget.H]

    def witness(self, output: int) -> SearchWitness:
        """A consistent permutation ranking ``output`` as badly as possible."""
        if not 0 <= output < self.n:
            raise DomainError(f"output {output} outside 0..{self.n - 1}")
        others = [i for i in self.live() if i != output]
        zero = others[0] if others else output
        ranks = [0] * self.n
        if zero != output:
            ranks[output] = self.n - 1
        rest = [i for i in range(self.n) if i not in (zero, output)]
        for r, i in enumerate(rest, start=1):
            ranks[i] = r
        lies = tuple(self.transcript.lies_against(zero))
        return SearchWitness(tuple(ranks), zero, output, lies)

    def guarantee(self) -> int:
        return search_rank_floor(self.n, self.budget)


def adversary_search(n: int, budget: QueryBudget) -> SearchAdversary:
    return SearchAdversary(n, budget)
