"""Acceptance checks, one test class per criterion.

Tolerances are pinned below; none of them is loosened to make a check pass.
"""

from __future__ import annotations

import time
from fractions import Fraction
from math import comb
from pathlib import Path

import pytest

from imperfect_advice import bounds as B
from imperfect_advice import harness
from imperfect_advice.advice import AdviceOracle
from imperfect_advice.bounds import QueryBudget, mp
from imperfect_advice.games import adversaries, solvers
from imperfect_advice.problems import bidding as bid
from imperfect_advice.problems import knapsack as ks
from imperfect_advice.problems import timeseries as ts

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

ABS_TOL = mp.mpf("1e-9")
KNAPSACK_TOL = mp.mpf("1e-6")
PASCAL_SECONDS = 10
TREE_SECONDS = 300


def _real(x):
    return mp.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mp.mpf(x)


@pytest.mark.criterion(1)
class TestExactCombinatorics:
    def test_pascal_and_bracket(self):
        start = time.perf_counter()
        for N in range(0, 65):
            for m in range(0, N + 1):
                value = B.partial_binomial_sum(N, m)
                assert value == sum(comb(N, i) for i in range(0, m + 1))
                if m == N:
                    assert value == 1 << N
                elif m >= 1:
                    assert value == B.partial_binomial_sum(N - 1, m) + B.partial_binomial_sum(N - 1, m - 1)
                else:
                    assert value == 1
                if 0 < m and 2 * m < N:
                    lo, hi = B.partial_sum_entropy_bracket(N, m)
                    assert lo <= value <= hi, (N, m)
        assert time.perf_counter() - start < PASCAL_SECONDS


@pytest.mark.criterion(2)
class TestIdentifyFind:
    def test_exhaustive_identify(self):
        start = time.perf_counter()
        limits = harness.VerifyLimits(tuple(range(0, 11)), (0, 1, 2), None, (1,), 50_000_000)
        report = harness.verify_exhaustive("identify", limits)
        assert report.complete
        assert report.checked > 0
        assert report.counterexamples == []
        assert time.perf_counter() - start < TREE_SECONDS

    @pytest.mark.parametrize("policy", ["none", "greedy", "minimax"])
    def test_find_against_adaptive_liars(self, policy):
        for k in range(0, 7):
            for H in range(0, min(1, k // 2) + 1):
                budget = QueryBudget(k, H)
                for m in range(1, B.find_capacity(budget) + 1):
                    for x in range(1, m + 1):
                        oracle = AdviceOracle(x, budget, policy)
                        assert solvers.find(m, budget, oracle) == x


@pytest.mark.criterion(3)
class TestContinuousMeasure:
    def test_exhaustive_continuous(self):
        start = time.perf_counter()
        limits = harness.VerifyLimits(tuple(range(0, 13)), (0, 1, 2), None, (1,), 50_000_000)
        report = harness.verify_exhaustive("continuous", limits)
        assert report.complete
        assert report.counterexamples == []
        assert time.perf_counter() - start < TREE_SECONDS

    def test_adversary_forces_measure(self):
        for k in range(0, 13):
            for H in range(0, min(2, k // 2) + 1):
                budget = QueryBudget(k, H)
                res = solvers.continuous_search(budget, adversaries.adversary_continuous(budget))
                assert res.consistent_measure == Fraction(B.partial_binomial_sum(k, H), 1 << k)


@pytest.mark.criterion(4)
class TestCyclicMinimum:
    def test_exhaustive_min_cyclic(self):
        limits = harness.VerifyLimits(tuple(range(0, 9)), (0, 1, 2), None, tuple(range(1, 33)),
                                      50_000_000)
        report = harness.verify_exhaustive("min_cyclic", limits)
        assert report.complete
        assert report.counterexamples == []


@pytest.mark.criterion(5)
class TestSearchAdversary:
    def test_witness_floor(self):
        limits = harness.VerifyLimits(tuple(range(0, 7)), (0, 1), None, tuple(range(1, 17)),
                                      50_000_000)
        report = harness.verify_exhaustive("search_adversary", limits)
        assert report.complete
        failing = sorted({(c["n"], c["k"], c["H"]) for c in report.counterexamples})
        assert failing == [], f"witness below floor at (n, k, H) = {failing}"


@pytest.mark.criterion(6)
class TestTimeSeriesDeskScale:
    def test_sup_ratio_with_one_lie(self):
        budget = QueryBudget(4, 1)
        assert B.ts_grid_size(budget) == 2
        policies = ["none", "greedy", "minimax"] + [f"fixed:[{i}]" for i in range(4)]
        sup = mp.mpf(0)
        for inst in ts.ts_adversarial_instances(budget, 1, 100):
            for policy in policies:
                oracle = AdviceOracle(ts.ts_target(inst, budget), budget, policy)
                out = ts.ts_run(inst, budget, oracle)
                assert oracle.report().eta <= budget.H
                sup = max(sup, out.ratio)
        assert sup <= mp.cbrt(100) + ABS_TOL

    def test_no_advice_baseline(self):
        budget = QueryBudget(0, 0)
        sup = mp.mpf(0)
        for inst in ts.ts_adversarial_instances(budget, 1, 100):
            out = ts.ts_run(inst, budget, AdviceOracle(ts.ts_target(inst, budget), budget, "none"))
            sup = max(sup, out.ratio)
        assert abs(sup - 10) <= ABS_TOL


@pytest.mark.criterion(7)
class TestDoubling:
    def test_sup_ratio(self):
        X = bid.doubling()
        grid = bid.log_target_grid(2, 2000, 48)
        sup = max(bid.bidding_cost(X, u) / u for u in grid)
        assert mp.mpf("3.99") <= sup <= 4


def _bidding_sup(budget: QueryBudget, points: int = 10_000) -> mp.mpf:
    l = 1 << budget.k
    base = B.bidding_optimal_base(budget)
    chosen = []
    for x in range(l):
        oracle = AdviceOracle(x, budget, "greedy")
        chosen.append(solvers.min_cyclic(l, budget, oracle))
        assert oracle.report().eta <= budget.H
    sup = mp.mpf(0)
    for u in bid.log_target_grid(base, points, 3 * l):
        j = chosen[bid.family_target(base, l, u)]
        sup = max(sup, bid.bidding_cost(bid.BidSequence(base, j, l), u) / u)
    return sup


BIDDING_SWEEP = [QueryBudget(k, H) for k in (2, 4, 6) for H in (0, 1)]
_sup_cache: dict[QueryBudget, mp.mpf] = {}


def bidding_sup(budget: QueryBudget) -> mp.mpf:
    if budget not in _sup_cache:
        _sup_cache[budget] = _bidding_sup(budget)
    return _sup_cache[budget]


@pytest.mark.criterion(8)
class TestBiddingUpper:
    @pytest.mark.parametrize("budget", BIDDING_SWEEP, ids=str)
    def test_below_upper(self, budget):
        assert bidding_sup(budget) <= B.bidding_upper_bound(budget) + ABS_TOL


@pytest.mark.criterion(9)
class TestBiddingBracket:
    @pytest.mark.parametrize("budget", BIDDING_SWEEP, ids=str)
    def test_bracket(self, budget):
        sup = bidding_sup(budget)
        assert B.bidding_lower_bound(budget) <= sup <= B.bidding_upper_bound(budget) + ABS_TOL

    def test_f_at_one(self):
        assert B.geometric_family_ratio(1) == 4


@pytest.mark.criterion(10)
class TestKnapsack:
    @pytest.mark.parametrize("ratio", [16, 1024])
    @pytest.mark.parametrize("H", [0, 1])
    def test_sigma_families(self, ratio, H):
        budget = QueryBudget(8, H)
        part = ks.knapsack_partition(budget, 1, ratio)
        assert part is not None
        bound = part.ratio_bound()
        eps = Fraction(1, 1000)
        policies = ["none", "greedy"] + ([f"random:eta=1,seed={s}" for s in range(3)] if H else [])
        for _, inst in ks.knapsack_adversarial_instances(part.s, part.m, 1, ratio, eps):
            for policy in policies:
                oracle = ks.knapsack_oracle(inst, budget, policy)
                out = ks.knapsack_run(inst, budget, oracle)
                assert oracle.report().eta <= H
                assert isinstance(out.used, Fraction) and out.used <= 1
                assert out.ratio <= bound + KNAPSACK_TOL


TS_RHOS = [Fraction(3, 4), Fraction(9, 10), Fraction(1)]


def _ts_robust_instances(budget: QueryBudget, count: int = 150):
    import random

    rng = random.Random(20240601)
    out = list(ts.ts_adversarial_instances(budget, 1, 100))
    for _ in range(count):
        n = rng.randint(1, 8)
        out.append(ts.PriceInstance([mp.power(100, mp.mpf(rng.random())) for _ in range(n)], 1, 100))
    return out


@pytest.mark.criterion(11)
class TestRobustness:
    @pytest.mark.parametrize("rho", TS_RHOS, ids=str)
    def test_ts_robust_full_error(self, rho):
        budget = QueryBudget(4, 1)
        cap = mp.power(100, _real(rho))
        policies = ["greedy:eta=4", "minimax:eta=4", "fixed:[0,1,2,3]", "random:eta=4,seed=5"]
        for inst in _ts_robust_instances(budget):
            target = ts.ts_robust_target(inst, budget, rho)
            for policy in policies:
                out = ts.ts_robust_run(inst, budget, AdviceOracle(target, budget, policy), rho)
                assert out.ratio <= cap * (1 + ABS_TOL)

    @pytest.mark.parametrize("r", [5, 8])
    def test_bidding_robust_full_error(self, r):
        budget = QueryBudget(3, 1)
        l = 1 << budget.k
        base = B.robust_bidding_base(budget, r)
        for policy in ["greedy:eta=3", "minimax:eta=3", "fixed:[0,1,2]"]:
            chosen = [solvers.min_cyclic(l, budget, AdviceOracle(x, budget, policy)) for x in range(l)]
            for u in bid.log_target_grid(base, 2000, 3 * l):
                j = chosen[bid.family_target(base, l, u)]
                assert bid.bidding_cost(bid.BidSequence(base, j, l), u) / u <= r + ABS_TOL

    @pytest.mark.parametrize("rho", TS_RHOS, ids=str)
    def test_ts_robust_consistency(self, rho):
        budget = QueryBudget(4, 1)
        upper, _ = B.robust_ts_bounds(budget, 100, rho)
        worst = mp.mpf(0)
        for inst in _ts_robust_instances(budget):
            target = ts.ts_robust_target(inst, budget, rho)
            for policy in ["none", "greedy"]:
                oracle = AdviceOracle(target, budget, policy)
                worst = max(worst, ts.ts_robust_run(inst, budget, oracle, rho).ratio)
        assert worst <= upper * (1 + ABS_TOL), f"worst {mp.nstr(worst, 8)} vs bound {mp.nstr(upper, 8)}"

    @pytest.mark.parametrize("r", [5, 8])
    def test_bidding_robust_consistency(self, r):
        budget = QueryBudget(3, 1)
        l = 1 << budget.k
        base = B.robust_bidding_base(budget, r)
        upper, lower = B.robust_bidding_bounds(budget, r)
        assert lower <= upper
        chosen = [solvers.min_cyclic(l, budget, AdviceOracle(x, budget, "greedy")) for x in range(l)]
        for u in bid.log_target_grid(base, 2000, 3 * l):
            j = chosen[bid.family_target(base, l, u)]
            assert bid.bidding_cost(bid.BidSequence(base, j, l), u) / u <= upper + ABS_TOL


@pytest.mark.criterion(12)
class TestResourceAugmentation:
    @pytest.mark.parametrize("c", [Fraction(1, 20), Fraction(1, 10), Fraction(1, 5)], ids=str)
    def test_augmented_not_worse(self, c):
        for k in range(1, 65):
            aug, perfect = B.augmented_budget(k, c), QueryBudget(k, 0)
            assert aug.H == int(mp.floor((mp.mpf(1) / 3 - _real(c)) * aug.k))
            assert B.ts_bounds(aug, 100)[0] <= B.ts_bounds(perfect, 100)[0]
            assert B.bidding_upper_bound(aug) <= B.bidding_upper_bound(perfect)


@pytest.mark.criterion(13)
class TestDeterminism:
    @pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.stem)
    def test_rerun_identical(self, path):
        first = harness.rows_to_csv(harness.run_experiment(harness.ExperimentConfig.load(path)))
        again = harness.rows_to_csv(harness.run_experiment(harness.ExperimentConfig.load(path)))
        pooled = harness.rows_to_csv(
            harness.run_experiment(harness.ExperimentConfig.load(path, {"workers": 2})))
        assert first.encode() == again.encode() == pooled.encode()
