"""Renyi-Ulam games: weighting questioners, lying responders and game entry points."""

from .adversaries import (
    ContinuousAdversary,
    SearchAdversary,
    SearchWitness,
    adversary_continuous,
    adversary_search,
    search_rank_floor,
)
from .core import ComparisonQuery, Responder, SubsetQuery, Transcript, TranscriptEntry, play
from .solvers import (
    BlockQuestioner,
    ContinuousResult,
    continuous_search,
    cyclic_block_count,
    cyclic_blocks,
    cyclic_rank,
    cyclic_rank_bound,
    find,
    identify,
    identify_feasible,
    min_cyclic,
)
from .weighting import Candidate, CWeightingQuestioner, WeightingQuestioner, weighting_identifies

__all__ = [
    "BlockQuestioner",
    "CWeightingQuestioner",
    "Candidate",
    "ComparisonQuery",
    "ContinuousAdversary",
    "ContinuousResult",
    "Responder",
    "SearchAdversary",
    "SearchWitness",
    "SubsetQuery",
    "Transcript",
    "TranscriptEntry",
    "WeightingQuestioner",
    "adversary_continuous",
    "adversary_search",
    "continuous_search",
    "cyclic_block_count",
    "cyclic_blocks",
    "cyclic_rank",
    "cyclic_rank_bound",
    "find",
    "identify",
    "identify_feasible",
    "min_cyclic",
    "play",
    "search_rank_floor",
    "weighting_identifies",
]
