"""Online bidding with the cyclic geometric family and fault-tolerant parallel bidding."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, NamedTuple, Sequence

from ..advice import AdviceOracle, Policy, parse_policy
from ..bounds import QueryBudget, Real, bidding_optimal_base, mp, robust_bidding_base
from ..errors import DomainError
from ..games.solvers import min_cyclic


def _mpf(x: Any) -> Real:
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


@dataclass(frozen=True)
class BidSequence:
    """Bids ``b^(offset + j*modulus)`` for ``j = 0, 1, ...``."""

    b: Any
    offset: int = 0
    modulus: int = 1
    faulty: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "b", _mpf(self.b))
        if not self.b > 1:
            raise DomainError(f"bid base must exceed 1, got {self.b}")
        if self.modulus < 1:
            raise DomainError(f"modulus must be positive, got {self.modulus}")

    def exponent(self, j: int) -> int:
        return self.offset + j * self.modulus

    def bid(self, j: int) -> Real:
        return self.b ** self.exponent(j)

    def bids(self):
        for j in itertools.count():
            yield self.bid(j)

    def discovery_index(self, u: Real) -> int:
        """Smallest ``j`` with ``bid(j) >= u``."""
        u = _mpf(u)
        if self.bid(0) >= u:
            return 0
        j = max(0, int(mp.ceil((mp.log(u) / mp.log(self.b) - self.offset) / self.modulus)))
        while j > 0 and self.bid(j - 1) >= u:
            j -= 1
        while self.bid(j) < u:
            j += 1
        return j

    def prefix_sum(self, j: int) -> Real:
        """Sum of bids ``0 .. j``."""
        if j < 0:
            return mp.mpf(0)
        step = self.b**self.modulus
        return self.bid(0) * (step ** (j + 1) - 1) / (step - 1)

    def to_dict(self) -> dict[str, Any]:
        return {"b": mp.nstr(self.b, 20), "offset": self.offset, "l": self.modulus}


def doubling() -> BidSequence:
    """Bids 2, 4, 8, ..."""
    return BidSequence(2, 1, 1)


def cyclic_family(b: Any, l: int) -> list[BidSequence]:
    """X_i = (b^(i + j l))_j for i = 0..l-1."""
    if l < 1:
        raise DomainError(f"family size must be positive, got {l}")
    return [BidSequence(b, i, l) for i in range(l)]


def bidding_cost(X: BidSequence, u: Any) -> Real:
    """Total bid until the first bid reaching ``u``; infinite for a faulty sequence."""
    u = _mpf(u)
    if u < 1:
        raise DomainError(f"targets are at least 1, got {u}")
    if X.faulty:
        return mp.inf
    return X.prefix_sum(X.discovery_index(u))


def family_target(b: Any, l: int, u: Any) -> int:
    """Index of the cheapest member of X_{b,l} for target ``u``."""
    u = _mpf(u)
    e = BidSequence(b, 0, 1).discovery_index(u)
    return e % l


def family_ranks(b: Any, l: int, u: Any) -> list[int]:
    """Cyclic rank of every member: rank(j) = (j - best) mod l."""
    best = family_target(b, l, u)
    return [(j - best) % l for j in range(l)]


class BidOutcome(NamedTuple):
    chosen_index: int
    ratio: Real


def _choose(l: int, budget: QueryBudget, oracle: AdviceOracle) -> int:
    return min_cyclic(l, budget, oracle)


def bidding_with_advice(
    budget: QueryBudget, b: Any, oracle: AdviceOracle, u: Any
) -> BidOutcome:
    """Pick a member of X_{b, 2^k} by cyclic search; the oracle's truth is the best member."""
    l = 1 << budget.k
    b = bidding_optimal_base(budget) if b is None else _mpf(b)
    j = _choose(l, budget, oracle)
    u = _mpf(u)
    return BidOutcome(j, bidding_cost(BidSequence(b, j, l), u) / u)


def bidding_oracle(budget: QueryBudget, b: Any, u: Any, policy: Policy | str = "none") -> AdviceOracle:
    b = bidding_optimal_base(budget) if b is None else b
    return AdviceOracle(family_target(b, 1 << budget.k, u), budget, policy)


@lru_cache(maxsize=4096)
def _choices(budget: QueryBudget, policy_spec: str) -> tuple[int, ...]:
    l = 1 << budget.k
    return tuple(
        _choose(l, budget, AdviceOracle(x, budget, parse_policy(policy_spec))) for x in range(l)
    )


def advice_choices(budget: QueryBudget, policy: Policy | str) -> tuple[int, ...]:
    """Chosen member for every possible best member.

    Oracles here are deterministic functions of their truth, so sweeping
    many targets only needs one session per truth value.
    """
    spec = policy if isinstance(policy, str) else policy.spec()
    return _choices(budget, parse_policy(spec).spec())


def bidding_robust_with_advice(
    budget: QueryBudget, r: Any, oracle: AdviceOracle, u: Any
) -> BidOutcome:
    """As bidding_with_advice with the base constrained so every member is r-robust."""
    return bidding_with_advice(budget, robust_bidding_base(budget, r), oracle, u)


def geometric_robustness(B: Any) -> Real:
    """Worst ratio B^2/(B-1) of the geometric strategy with base B."""
    B = _mpf(B)
    return B * B / (B - 1)


# ---------------------------------------------------------------------------
# target grids
# ---------------------------------------------------------------------------


def bid_value_grid(b: Any, max_exponent: int, nudge: Any = mp.mpf("1e-9")) -> list[Real]:
    """Targets just above every bid value b^e, e = 0..max_exponent."""
    b = _mpf(b)
    return [b**e * (1 + nudge) for e in range(max_exponent + 1)]


def log_target_grid(
    b: Any, points: int, max_exponent: int, nudge: Any = mp.mpf("1e-9")
) -> list[Real]:
    """``points`` targets: every bid value nudged upward, padded with log-spaced fill."""
    near = bid_value_grid(b, max_exponent, nudge)
    fill = max(0, points - len(near))
    top = mp.log(_mpf(b)) * max_exponent
    spaced = [mp.exp(top * i / max(1, fill - 1)) for i in range(fill)] if fill else []
    grid = sorted(set([mp.mpf(1)] + near + spaced))
    return grid[:points] if len(grid) > points else grid


# ---------------------------------------------------------------------------
# fault-tolerant parallel bidding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParallelBidStrategy:
    sequences: tuple[BidSequence, ...]
    fault_set: frozenset = frozenset()

    def __init__(self, sequences: Sequence[BidSequence], fault_set: Any = ()):
        seqs = tuple(sequences)
        faults = frozenset(fault_set)
        if not seqs:
            raise DomainError("a parallel strategy needs at least one sequence")
        if any(not 0 <= f < len(seqs) for f in faults):
            raise DomainError("fault indices must refer to sequences")
        object.__setattr__(self, "sequences", seqs)
        object.__setattr__(self, "fault_set", faults)

    @property
    def p(self) -> int:
        return len(self.sequences)

    @property
    def phi(self) -> int:
        return len(self.fault_set)


def _bids_before(seq: BidSequence, value: Real, seq_index: int, stop_index: int) -> Real:
    """Sum of ``seq``'s bids ordered before the event (value, stop_index)."""
    total = mp.mpf(0)
    j = 0
    while True:
        x = seq.bid(j)
        if x > value or (x == value and seq_index > stop_index):
            return total
        total += x
        j += 1


def fpb_simulate(strategy: ParallelBidStrategy, u: Any) -> Real:
    """Cost when bids of all sequences are interleaved by value (ties by sequence index)
    and the first non-faulty discovery ends the search."""
    u = _mpf(u)
    live = [i for i in range(strategy.p) if i not in strategy.fault_set]
    if not live:
        return mp.inf
    events = []
    for i in live:
        seq = strategy.sequences[i]
        events.append((seq.bid(seq.discovery_index(u)), i))
    value, idx = min(events)
    return sum(
        (_bids_before(seq, value, i, idx) for i, seq in enumerate(strategy.sequences)),
        mp.mpf(0),
    )


def fpb_adversarial_cost(sequences: Sequence[BidSequence], phi: int, u: Any) -> tuple[Real, frozenset]:
    """Largest cost over all fault sets of size ``phi`` and the maximizing set."""
    if not 0 <= phi < len(sequences):
        raise DomainError(f"need 0 <= phi < p, got phi={phi}, p={len(sequences)}")
    best: tuple[Real, frozenset] | None = None
    for faults in itertools.combinations(range(len(sequences)), phi):
        cost = fpb_simulate(ParallelBidStrategy(sequences, faults), u)
        if best is None or cost > best[0]:
            best = (cost, frozenset(faults))
    assert best is not None
    return best
