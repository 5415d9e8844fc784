"""Online problems driven by imperfect advice: time-series search, bidding, fractional knapsack."""

from .bidding import (
    BidOutcome,
    BidSequence,
    ParallelBidStrategy,
    bidding_cost,
    bidding_robust_with_advice,
    bidding_with_advice,
    cyclic_family,
    doubling,
    fpb_adversarial_cost,
    fpb_simulate,
)
from .knapsack import (
    KnapsackInstance,
    KnapsackPartition,
    knapsack_adversarial_instances,
    knapsack_opt,
    knapsack_run,
)
from .timeseries import (
    PriceInstance,
    TsOutcome,
    ts_adversarial_instances,
    ts_robust_run,
    ts_run,
)

__all__ = [
    "BidOutcome",
    "BidSequence",
    "KnapsackInstance",
    "KnapsackPartition",
    "ParallelBidStrategy",
    "PriceInstance",
    "TsOutcome",
    "bidding_cost",
    "bidding_robust_with_advice",
    "bidding_with_advice",
    "cyclic_family",
    "doubling",
    "fpb_adversarial_cost",
    "fpb_simulate",
    "knapsack_adversarial_instances",
    "knapsack_opt",
    "knapsack_run",
    "ts_adversarial_instances",
    "ts_robust_run",
    "ts_run",
]
