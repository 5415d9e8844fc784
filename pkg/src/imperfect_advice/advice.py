"""Truth oracles for hidden problem parameters and pluggable error injection."""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from typing import Any, Union

from .bounds import QueryBudget
from .errors import DomainError
from .games.core import Query, Responder

_MINIMAX_MAX_K = 16


@dataclass(frozen=True)
class NoErrors:
    def spec(self) -> str:
        return "none"


@dataclass(frozen=True)
class FixedPositions:
    positions: tuple[int, ...]

    def spec(self) -> str:
        return "fixed:" + json.dumps(list(self.positions), separators=(",", ":"))


@dataclass(frozen=True)
class RandomErrors:
    eta: int
    seed: int

    def spec(self) -> str:
        return f"random:eta={self.eta},seed={self.seed}"


@dataclass(frozen=True)
class Greedy:
    """Lie whenever the lie leaves the questioner more weight. ``eta`` caps lies (default H)."""

    eta: int | None = None

    def spec(self) -> str:
        return "greedy" if self.eta is None else f"greedy:eta={self.eta}"


@dataclass(frozen=True)
class Minimax:
    """Game-tree search over lie placements maximizing the questioner's final loss."""

    eta: int | None = None

    def spec(self) -> str:
        return "minimax" if self.eta is None else f"minimax:eta={self.eta}"


Policy = Union[NoErrors, FixedPositions, RandomErrors, Greedy, Minimax]

_ETA_SUFFIX = re.compile(r"^eta=(\d+)$")
_RANDOM = re.compile(r"^eta=(\d+),seed=(-?\d+)$")


def parse_policy(text: str) -> Policy:
    """Parse 'none', 'fixed:[i,...]', 'random:eta=E,seed=S', 'greedy[:eta=E]', 'minimax[:eta=E]'."""
    if not isinstance(text, str):
        raise DomainError(f"error policy must be a string, got {text!r}")
    name, _, rest = text.strip().partition(":")
    if name == "none" and not rest:
        return NoErrors()
    if name == "fixed":
        try:
            positions = json.loads(rest)
        except json.JSONDecodeError as exc:
            raise DomainError(f"bad fixed positions {rest!r}") from exc
        if not isinstance(positions, list) or not all(
            isinstance(p, int) and not isinstance(p, bool) and p >= 0 for p in positions
        ):
            raise DomainError(f"fixed positions must be a list of nonnegative ints, got {rest!r}")
        if len(set(positions)) != len(positions):
            raise DomainError(f"fixed positions repeat an index: {rest!r}")
        return FixedPositions(tuple(sorted(positions)))
    if name == "random":
        m = _RANDOM.match(rest)
        if not m:
            raise DomainError(f"random policy needs 'eta=E,seed=S', got {rest!r}")
        return RandomErrors(int(m.group(1)), int(m.group(2)))
    if name in ("greedy", "minimax"):
        eta = None
        if rest:
            m = _ETA_SUFFIX.match(rest)
            if not m:
                raise DomainError(f"{name} accepts only an 'eta=E' suffix, got {rest!r}")
            eta = int(m.group(1))
        return Greedy(eta) if name == "greedy" else Minimax(eta)
    raise DomainError(f"unknown error policy {text!r}")


def _as_policy(policy: Policy | str) -> Policy:
    return parse_policy(policy) if isinstance(policy, str) else policy


@dataclass(frozen=True)
class ErrorReport:
    eta: int
    positions: tuple[int, ...]
    exceeded_tolerance: bool
    seed: int | None = None

    def as_dict(self) -> dict[str, Any]:
        return {
            "eta": self.eta,
            "positions": list(self.positions),
            "exceeded_tolerance": self.exceeded_tolerance,
            "seed": self.seed,
        }


class AdviceOracle(Responder):
    """Answers queries about a hidden ``truth`` and lies according to ``policy``."""

    def __init__(self, truth: Any, budget: QueryBudget, policy: Policy | str = NoErrors()):
        super().__init__(budget)
        self.truth = truth
        self.policy = _as_policy(policy)
        self._planned: frozenset[int] | None = None
        self._lie_cap = budget.H
        p = self.policy
        if isinstance(p, FixedPositions):
            bad = [i for i in p.positions if i >= budget.k]
            if bad:
                raise DomainError(f"fixed lie positions {bad} are not below k={budget.k}")
            self._planned = frozenset(p.positions)
        elif isinstance(p, RandomErrors):
            if p.eta > budget.k:
                raise DomainError(f"cannot place eta={p.eta} lies in k={budget.k} queries")
            rng = random.Random(p.seed)
            self._planned = frozenset(rng.sample(range(budget.k), p.eta))
        elif isinstance(p, (Greedy, Minimax)) and p.eta is not None:
            self._lie_cap = p.eta
        if isinstance(p, Minimax) and budget.k > _MINIMAX_MAX_K:
            raise DomainError(f"minimax error search is limited to k <= {_MINIMAX_MAX_K}")

    def truthful(self, query: Query) -> bool:
        return bool(query.holds(self.truth))

    def fresh(self) -> "AdviceOracle":
        return AdviceOracle(self.truth, self.budget, self.policy)

    @property
    def lies_used(self) -> int:
        return self.transcript.eta

    def _should_lie(self, index: int, query: Query, truthful: bool, questioner: Any) -> bool:
        p = self.policy
        if self._planned is not None:
            return index in self._planned
        if isinstance(p, NoErrors) or questioner is None or self.lies_used >= self._lie_cap:
            return False
        if isinstance(p, Greedy):
            after = getattr(questioner, "weight_after", None)
            if after is None:
                return False
            return after(query, not truthful) > after(query, truthful)
        if isinstance(p, Minimax):
            left = self._lie_cap - self.lies_used
            honest = self._value_after(questioner, query, truthful, left)
            lying = self._value_after(questioner, query, not truthful, left - 1)
            return lying > honest
        return False

    def _value_after(self, questioner: Any, query: Query, answer: bool, lies_left: int) -> Any:
        child = questioner.copy()
        child.observe(query, answer)
        return self._value(child, lies_left)

    def _value(self, questioner: Any, lies_left: int) -> Any:
        if questioner.finished:
            return questioner.loss(self.truth)
        query = questioner.next_query()
        t = self.truthful(query)
        best = self._value_after(questioner, query, t, lies_left)
        if lies_left > 0:
            best = max(best, self._value_after(questioner, query, not t, lies_left - 1))
        return best

    def respond(self, query: Query, questioner: Any = None) -> bool:
        index = len(self.transcript.entries)
        if index >= self.budget.k:
            raise DomainError(f"more than k={self.budget.k} queries asked")
        t = self.truthful(query)
        lie = self._should_lie(index, query, t, questioner)
        answer = (not t) if lie else t
        self.transcript.record(query, answer, lied=lie)
        return answer

    def report(self) -> ErrorReport:
        seed = self.policy.seed if isinstance(self.policy, RandomErrors) else None
        positions = tuple(self.transcript.lie_positions)
        return ErrorReport(len(positions), positions, len(positions) > self.budget.H, seed)


def make_truth_oracle(parameter: Any, budget: QueryBudget) -> AdviceOracle:
    """A truthful oracle about ``parameter``; every query is answered correctly."""
    return AdviceOracle(parameter, budget, NoErrors())


def inject_errors(oracle: AdviceOracle, policy: Policy | str) -> AdviceOracle:
    """A fresh oracle with the same truth and budget, lying according to ``policy``."""
    return AdviceOracle(oracle.truth, oracle.budget, policy)
