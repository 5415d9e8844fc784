"""Questioners for the hidden-permutation Search game, used to exercise the adversary."""

from __future__ import annotations

import itertools
import random
from typing import Iterator

from ..bounds import QueryBudget
from .core import ComparisonQuery, Query, SubsetQuery
from .weighting import WeightingQuestioner


class MinLiesSearch:
    """Base: outputs the index contradicting the fewest responses (ties: smallest)."""

    name = "min-lies"

    def __init__(self, n: int, budget: QueryBudget):
        self.n = n
        self.budget = budget
        self.remaining = budget.k
        self.lies = [0] * n

    @property
    def finished(self) -> bool:
        return self.remaining == 0

    def query_at(self, step: int) -> Query:
        raise NotImplementedError

    def next_query(self) -> Query:
        return self.query_at(self.budget.k - self.remaining)

    def observe(self, query: Query, answer: bool) -> None:
        for i in range(self.n):
            if query.holds(i) != answer:
                self.lies[i] += 1
        self.remaining -= 1

    def output(self) -> int:
        return min(range(self.n), key=lambda i: (self.lies[i], i))

    def copy(self):
        other = object.__new__(type(self))
        other.__dict__.update(self.__dict__)
        other.lies = list(self.lies)
        return other


def _bit_count(n: int) -> int:
    return max(1, (n - 1).bit_length())


class BitSearch(MinLiesSearch):
    """Asks the binary digits of the index, cycling when k exceeds the digit count."""

    name = "bits"

    def query_at(self, step: int) -> Query:
        bit = step % _bit_count(self.n)
        return SubsetQuery(i for i in range(self.n) if (i >> bit) & 1)


class RepetitionSearch(MinLiesSearch):
    """Asks every binary digit 2H+1 times in a row."""

    name = "repetition"

    def query_at(self, step: int) -> Query:
        bit = (step // (2 * self.budget.H + 1)) % _bit_count(self.n)
        return SubsetQuery(i for i in range(self.n) if (i >> bit) & 1)


class RandomSearch(MinLiesSearch):
    """Seeded random subsets, fixed in advance."""

    name = "random"

    def __init__(self, n: int, budget: QueryBudget, seed: int = 0):
        super().__init__(n, budget)
        self.seed = seed
        rng = random.Random(f"search:{n}:{budget.k}:{budget.H}:{seed}")
        self._sets = [frozenset(i for i in range(n) if rng.random() < 0.5) for _ in range(budget.k)]

    def query_at(self, step: int) -> Query:
        return SubsetQuery(self._sets[step])


class FixedSearch(MinLiesSearch):
    """Non-adaptive questioner with an explicit list of subsets."""

    name = "fixed"

    def __init__(self, n: int, budget: QueryBudget, sets: tuple[frozenset, ...]):
        super().__init__(n, budget)
        self._sets = sets

    def query_at(self, step: int) -> Query:
        return SubsetQuery(self._sets[step])


class WeightingSearch:
    """Balanced weighting over indices with comparison-shaped subset queries."""

    name = "weighting"

    def __init__(self, n: int, budget: QueryBudget):
        self.n = n
        self.inner = WeightingQuestioner(n, budget)

    @property
    def finished(self) -> bool:
        return self.inner.finished

    def next_query(self) -> Query:
        t = self.inner.next_query().threshold
        return SubsetQuery(range(0, t + 1))

    def observe(self, query: Query, answer: bool) -> None:
        t = max(query.members) if query.members else -1
        self.inner.observe(ComparisonQuery(t), answer)

    def output(self) -> int:
        return self.inner.output()

    def copy(self) -> "WeightingSearch":
        other = object.__new__(WeightingSearch)
        other.n = self.n
        other.inner = self.inner.copy()
        return other


_NONADAPTIVE_LIMIT = 5000


def search_questioners(n: int, budget: QueryBudget, random_seeds: int = 4) -> Iterator:
    """Factories for a family of Search questioners, including every non-adaptive
    strategy when the family is small enough to enumerate."""
    yield lambda: WeightingSearch(n, budget)
    yield lambda: BitSearch(n, budget)
    yield lambda: RepetitionSearch(n, budget)
    for seed in range(random_seeds):
        yield lambda seed=seed: RandomSearch(n, budget, seed)
    subsets = [frozenset(c) for r in range(n + 1) for c in itertools.combinations(range(n), r)]
    if len(subsets) ** budget.k <= _NONADAPTIVE_LIMIT:
        for sets in itertools.product(subsets, repeat=budget.k):
            yield lambda sets=sets: FixedSearch(n, budget, sets)
