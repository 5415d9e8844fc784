"""Queries, transcripts and the questioner/responder protocol shared by all games."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Hashable, Iterable, Protocol

from ..bounds import QueryBudget


@dataclass(frozen=True)
class ComparisonQuery:
    """'Is x <= threshold?'"""

    threshold: Any

    kind = "cmp"

    def holds(self, x: Any) -> bool:
        return x <= self.threshold

    def arg(self) -> Any:
        return _jsonable(self.threshold)


@dataclass(frozen=True)
class SubsetQuery:
    """'Is x in members?'"""

    members: frozenset

    kind = "subset"

    def __init__(self, members: Iterable[Hashable]):
        object.__setattr__(self, "members", frozenset(members))

    def holds(self, x: Any) -> bool:
        return x in self.members

    def arg(self) -> Any:
        return sorted(_jsonable(v) for v in self.members)


Query = ComparisonQuery | SubsetQuery


def _jsonable(v: Any) -> Any:
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    return v


@dataclass
class TranscriptEntry:
    query: Query
    response: bool


@dataclass
class Transcript:
    """Ordered (query, response) record plus the positions the truth holder knows were lies."""

    budget: QueryBudget
    entries: list[TranscriptEntry] = field(default_factory=list)
    lie_positions: list[int] = field(default_factory=list)

    def record(self, query: Query, response: bool, lied: bool) -> None:
        if lied:
            self.lie_positions.append(len(self.entries))
        self.entries.append(TranscriptEntry(query, response))

    @property
    def eta(self) -> int:
        return len(self.lie_positions)

    @property
    def exceeded_tolerance(self) -> bool:
        return self.eta > self.budget.H

    def responses(self) -> list[bool]:
        return [e.response for e in self.entries]

    def lies_against(self, truth: Any) -> list[int]:
        """Positions whose response is wrong if the hidden value is ``truth``."""
        return [i for i, e in enumerate(self.entries) if e.query.holds(truth) != e.response]

    def to_dict(self) -> dict[str, Any]:
        return {
            "budget": self.budget.as_dict(),
            "entries": [
                {"type": e.query.kind, "arg": e.query.arg(), "response": e.response}
                for e in self.entries
            ],
            "lie_positions": sorted(self.lie_positions),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


class Questioner(Protocol):
    """Adaptive query strategy. ``copy`` must return an independent session."""

    finished: bool

    def next_query(self) -> Query: ...

    def observe(self, query: Query, answer: bool) -> None: ...

    def output(self) -> Any: ...

    def copy(self) -> "Questioner": ...


class Responder:
    """Answers queries online; records everything in ``transcript``."""

    def __init__(self, budget: QueryBudget):
        self.budget = budget
        self.transcript = Transcript(budget)

    def respond(self, query: Query, questioner: Any = None) -> bool:
        raise NotImplementedError


def play(questioner: Any, responder: Responder) -> Any:
    """Run one session to completion and return the questioner's output."""
    while not questioner.finished:
        query = questioner.next_query()
        answer = responder.respond(query, questioner)
        questioner.observe(query, answer)
    return questioner.output()
