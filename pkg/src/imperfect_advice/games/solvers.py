"""Game entry points: Identify, Find, ContinuousSearch and MinCyclic."""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

from ..bounds import QueryBudget, find_capacity, mu_bounds, partial_binomial_sum
from ..errors import BudgetInsufficient, DomainError
from .core import ComparisonQuery, Responder, play
from .weighting import CWeightingQuestioner, WeightingQuestioner, weighting_identifies


def identify_feasible(m: int, budget: QueryBudget) -> bool:
    k, H = budget.k, budget.H
    return (1 << (k - H)) >= m * partial_binomial_sum(k - H, H)


def identify(m: int, budget: QueryBudget, oracle: Responder) -> int:
    """Identify ``x`` in ``0 .. m-1`` with ``k`` comparison queries, tolerating ``H`` lies."""
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    if not identify_feasible(m, budget):
        raise BudgetInsufficient(
            f"budget insufficient: 2^(k-H) < m <<k-H, H>> for m={m}, k={budget.k}, H={budget.H}"
        )
    return play(WeightingQuestioner(m, budget), oracle)


def find(m: int, budget: QueryBudget, oracle: Responder) -> int:
    """Find ``x`` in ``1 .. m``; ``m = 1`` needs no queries."""
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    lower, _ = mu_bounds(budget)
    if m > lower:
        raise BudgetInsufficient(
            f"budget insufficient: m={m} exceeds floor(2^(k-H)/<<k-H, H>>)={lower}"
        )
    return play(WeightingQuestioner(m, budget, offset=1), oracle)


class ContinuousResult(NamedTuple):
    interval: tuple[Fraction, Fraction] | None
    consistent_measure: Fraction


def continuous_search(budget: QueryBudget, oracle: Responder) -> ContinuousResult:
    """Locate a point of (0, 1]; the consistent measure ends at exactly <<k,H>>/2^k."""
    questioner = CWeightingQuestioner(budget)
    hull, measure = play(questioner, oracle)
    return ContinuousResult(hull, measure)


# ---------------------------------------------------------------------------
# MinCyclic
# ---------------------------------------------------------------------------


def cyclic_rank_bound(n: int, budget: QueryBudget) -> int:
    """ceil(n <<k-H, H>> / 2^(k-H)), the guaranteed rank of the returned index."""
    k, H = budget.k, budget.H
    return -(-n * partial_binomial_sum(k - H, H) // (1 << (k - H)))


_CERTIFY_MAX_K = 10


def cyclic_block_count(n: int, budget: QueryBudget) -> int:
    """Number of blocks the cyclic search identifies among.

    The default is floor(2^(k-H)/<<k-H, H>>). When that many balanced blocks
    are too coarse for the rank guarantee, the smallest larger count for which
    weighting is certified by exhaustive search is used instead.
    """
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    base = find_capacity(budget)
    bound = cyclic_rank_bound(n, budget)
    needed = -(-n // (bound + 1))
    if needed <= base or budget.k > _CERTIFY_MAX_K:
        return max(1, min(base, n))
    _, ceiling = mu_bounds(budget)
    for m in range(needed, min(n, ceiling) + 1):
        if weighting_identifies(m, budget):
            return m
    return max(1, min(base, n))


def cyclic_blocks(n: int, m: int) -> list[tuple[int, int]]:
    """Balanced contiguous blocks ``[start, end]`` (inclusive) covering ``0 .. n-1``."""
    return [(b * n // m, (b + 1) * n // m - 1) for b in range(m)]


class BlockQuestioner:
    """Runs weighting over block labels and translates to index thresholds."""

    def __init__(self, n: int, budget: QueryBudget, m: int | None = None):
        self.n = n
        m = cyclic_block_count(n, budget) if m is None else m
        self.blocks = cyclic_blocks(n, m)
        self._block_of_end = {end: b for b, (_, end) in enumerate(self.blocks)}
        self.inner = WeightingQuestioner(m, budget)

    @property
    def finished(self) -> bool:
        return self.inner.finished

    def _to_inner(self, query: ComparisonQuery) -> ComparisonQuery:
        return ComparisonQuery(self._block_of_end[query.threshold])

    def next_query(self) -> ComparisonQuery:
        return ComparisonQuery(self.blocks[self.inner.next_query().threshold][1])

    def observe(self, query: ComparisonQuery, answer: bool) -> None:
        self.inner.observe(self._to_inner(query), answer)

    def weight_after(self, query: ComparisonQuery, answer: bool) -> int:
        return self.inner.weight_after(self._to_inner(query), answer)

    def output(self) -> int:
        return self.blocks[self.inner.output()][1]

    def copy(self) -> "BlockQuestioner":
        other = object.__new__(BlockQuestioner)
        other.__dict__.update(self.__dict__)
        other.inner = self.inner.copy()
        return other

    def loss(self, truth: int) -> int:
        return (self.output() - truth) % self.n


def cyclic_rank(j: int, zero_index: int, n: int) -> int:
    """A[j] for the rotation with A[zero_index] = 0."""
    return (j - zero_index) % n


def min_cyclic(n: int, budget: QueryBudget, oracle: Responder) -> int:
    """Return an index of small rank in a hidden rotation of ``0 .. n-1``.

    The oracle answers 'is x <= t?' about the index ``x`` holding rank 0.
    """
    return play(BlockQuestioner(n, budget), oracle)


def min_cyclic_questioner(n: int, budget: QueryBudget) -> BlockQuestioner:
    return BlockQuestioner(n, budget)

