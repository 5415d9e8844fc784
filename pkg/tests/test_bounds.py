from __future__ import annotations

import math
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imperfect_advice import bounds as B
from imperfect_advice.bounds import QueryBudget, mp
from imperfect_advice.errors import DomainError

TOL = mp.mpf("1e-20")


def budgets(max_k: int = 24):
    return st.integers(0, max_k).flatmap(
        lambda k: st.integers(0, k // 2).map(lambda H: QueryBudget(k, H))
    )


class TestQueryBudget:
    def test_rejects_large_tolerance(self):
        with pytest.raises(DomainError, match="H <= k/2"):
            QueryBudget(3, 2)

    @pytest.mark.parametrize("k,H", [(-1, 0), (2, -1)])
    def test_rejects_negative(self, k, H):
        with pytest.raises(DomainError):
            QueryBudget(k, H)

    def test_as_dict(self):
        assert QueryBudget(6, 1).as_dict() == {"k": 6, "H": 1}


class TestPartialBinomialSum:
    @pytest.mark.parametrize("N,m,expected", [(4, 0, 1), (4, 1, 5), (4, 4, 16), (10, 2, 56), (20, 4, 6196)])
    def test_values(self, N, m, expected):
        assert B.partial_binomial_sum(N, m) == expected

    @pytest.mark.parametrize("N,m", [(3, 4), (-1, 0), (3, -1)])
    def test_domain(self, N, m):
        with pytest.raises(DomainError):
            B.partial_binomial_sum(N, m)

    @given(st.integers(0, 300).flatmap(lambda N: st.tuples(st.just(N), st.integers(0, N))))
    def test_matches_direct_sum(self, Nm):
        N, m = Nm
        assert B.partial_binomial_sum(N, m) == sum(comb(N, j) for j in range(m + 1))

    @given(st.integers(1, 200).flatmap(lambda N: st.tuples(st.just(N), st.integers(0, N - 1))))
    def test_monotone_in_m(self, Nm):
        N, m = Nm
        assert B.partial_binomial_sum(N, m) <= B.partial_binomial_sum(N, m + 1)

    def test_berlekamp_weight_edges(self):
        assert B.berlekamp_weight(5, -1) == 0
        assert B.berlekamp_weight(3, 7) == 8
        assert B.berlekamp_weight(4, 1) == 5


class TestCapacities:
    @pytest.mark.parametrize("k,H,expected", [(4, 1, (2, 3)), (6, 1, (5, 9)), (5, 0, (32, 32))])
    def test_mu_bounds(self, k, H, expected):
        assert B.mu_bounds(QueryBudget(k, H)) == expected

    @given(budgets())
    def test_mu_ordered(self, budget):
        lo, hi = B.mu_bounds(budget)
        assert 1 <= lo <= hi

    def test_bidding_rank_bound(self):
        assert B.bidding_rank_bound(QueryBudget(4, 1)) == 2 * 4
        assert B.bidding_rank_bound(QueryBudget(0, 0)) == 1


class TestEntropy:
    def test_quarter(self):
        assert abs(B.entropy(Fraction(1, 4)) - mp.mpf("0.8112781244591328")) < 1e-15

    def test_half(self):
        assert B.entropy(Fraction(1, 2)) == 1

    @pytest.mark.parametrize("p", [0, 1, Fraction(3, 2)])
    def test_domain(self, p):
        with pytest.raises(DomainError):
            B.entropy(p)

    @given(st.fractions(min_value=Fraction(1, 10**6), max_value=1 - Fraction(1, 10**6)))
    def test_polynomial_sandwich(self, p):
        lo, hi = B.entropy_bracket(p)
        h = B.entropy(p)
        assert lo <= h + TOL and h <= hi + TOL

    @pytest.mark.parametrize("N,m", [(10, 2), (20, 4), (64, 31)])
    def test_partial_sum_bracket(self, N, m):
        lo, hi = B.partial_sum_entropy_bracket(N, m)
        assert lo <= B.partial_binomial_sum(N, m) <= hi

    def test_bracket_needs_strict_half(self):
        with pytest.raises(DomainError):
            B.partial_sum_entropy_bracket(4, 2)


class TestTimeSeriesBounds:
    def test_no_tolerance(self):
        up, low = B.ts_bounds(QueryBudget(4, 0), 16)
        assert up == low
        assert abs(up - mp.power(16, mp.mpf(1) / 17)) < TOL

    def test_one_lie(self):
        up, _ = B.ts_bounds(QueryBudget(6, 1), 100)
        assert abs(up - mp.power(100, mp.mpf(1) / 6)) < TOL

    def test_no_advice(self):
        up, low = B.ts_bounds(QueryBudget(0, 0), 100)
        assert abs(up - 10) < TOL and abs(low - 10) < TOL

    def test_ratio_must_exceed_one(self):
        with pytest.raises(DomainError):
            B.ts_bounds(QueryBudget(2, 0), 1)

    @given(budgets(40), st.integers(2, 10**6))
    def test_upper_not_below_lower(self, budget, ratio):
        up, low = B.ts_bounds(budget, ratio)
        assert up >= low

    @pytest.mark.parametrize("tau", ["0.1", "0.25", "0.4"])
    def test_gap_shrinks(self, tau):
        gaps = [row["log_gap"] for row in _gaps("ts", tau)]
        assert all(a > b for a, b in zip(gaps, gaps[1:])), [mp.nstr(g, 6) for g in gaps]

    def test_robust_rho_one_matches_plain_exponent_shape(self):
        up, low = B.robust_ts_bounds(QueryBudget(4, 1), 100, 1)
        assert abs(up - B.ts_bounds(QueryBudget(4, 1), 100)[0]) < TOL
        assert low >= 1

    def test_robust_rho_domain(self):
        with pytest.raises(DomainError):
            B.robust_ts_bounds(QueryBudget(4, 1), 100, Fraction(1, 2))


def _gaps(problem: str, tau: str):
    from imperfect_advice.harness import gap_table

    return gap_table(problem, [Fraction(tau)], [8, 16, 32, 64])


class TestBiddingBounds:
    def test_f_values(self):
        assert B.geometric_family_ratio(1) == 4
        assert B.geometric_family_ratio(Fraction(1, 2)) == mp.mpf("6.75")

    @given(st.fractions(min_value=Fraction(1, 100), max_value=100),
           st.fractions(min_value=Fraction(1, 100), max_value=100))
    def test_f_decreasing(self, x, y):
        if x < y:
            assert B.geometric_family_ratio(x) > B.geometric_family_ratio(y)

    def test_no_advice(self):
        budget = QueryBudget(0, 0)
        assert B.bidding_upper_bound(budget) == mp.mpf("6.75")
        assert B.bidding_lower_bound(budget) == 4

    @pytest.mark.parametrize("k,H", [(2, 0), (3, 1), (4, 1), (6, 2)])
    def test_upper_is_minimum_over_base(self, k, H):
        budget = QueryBudget(k, H)
        l, U = 1 << k, B.bidding_rank_bound(budget)
        # independent scan of b^(l+1+U)/(b^l - 1) over a fine log grid
        scan = min(
            math.exp((l + 1 + U) * t) / math.expm1(l * t)
            for t in (i * 1e-5 for i in range(1, 200_000))
        )
        assert abs(float(B.bidding_upper_bound(budget)) - scan) < 1e-6 * scan
        b = B.bidding_optimal_base(budget)
        assert abs(B.family_ratio_at(b, l, U) - B.bidding_upper_bound(budget)) < 1e-25

    @given(budgets(14))
    def test_upper_not_below_lower(self, budget):
        assert B.bidding_upper_bound(budget) >= B.bidding_lower_bound(budget)

    def test_gap_sixteen_vs_thirtytwo(self):
        rows = {row["k"]: row["log_gap"] for row in _gaps("bidding", "0.25")}
        assert rows[32] < rows[16]

    def test_gap_column_monotone(self):
        from imperfect_advice.harness import gap_table

        gaps = [row["log_gap"] for row in gap_table("bidding", [Fraction(1, 4)], [8, 16, 32])]
        assert all(a > b for a, b in zip(gaps, gaps[1:])), [mp.nstr(g, 6) for g in gaps]

    def test_analytic_estimate_dominates(self):
        from imperfect_advice.harness import gap_table

        for row in gap_table("bidding", [Fraction(1, 10), Fraction(1, 4)], [8, 16, 32, 64]):
            assert row["log_gap"] <= row["analytic"]


class TestParallelBidding:
    def test_values(self):
        assert B.fpb_lower_bound(1, 0, 2) == 4
        assert abs(B.fpb_lower_bound(2, 1, 2) - mp.mpf(16) / 3) < TOL

    def test_alpha_at_most_one(self):
        assert B.fpb_lower_bound(2, 0, 1) == mp.inf

    @pytest.mark.parametrize("p,phi", [(0, 0), (2, 2)])
    def test_domain(self, p, phi):
        with pytest.raises(DomainError):
            B.fpb_lower_bound(p, phi, 2)


class TestRobustBidding:
    def test_no_advice(self):
        up, low = B.robust_bidding_bounds(QueryBudget(0, 0), 4)
        assert abs(up - 8) < 1e-12
        assert low <= up

    @pytest.mark.parametrize("r", [4, 5, 8, 20])
    def test_base_is_robust(self, r):
        budget = QueryBudget(3, 1)
        b = B.robust_bidding_base(budget, r)
        B_ = b ** (1 << budget.k)
        assert B_ * B_ / (B_ - 1) <= r * (1 + mp.mpf("1e-12"))

    def test_large_r_recovers_unconstrained(self):
        budget = QueryBudget(3, 1)
        up, _ = B.robust_bidding_bounds(budget, 10**6)
        assert abs(up - B.bidding_upper_bound(budget)) < 1e-12

    def test_r_below_four(self):
        with pytest.raises(DomainError):
            B.robust_bidding_bounds(QueryBudget(2, 0), 3)


def _brute_knapsack(cap: int, R: float):
    best = None
    for s in range(1, cap + 1):
        for m in range(2, cap // s + 1):
            beta = mp.power(R, mp.mpf(1) / s)
            v = (beta**m - 1) / (beta ** (m - 1) - 1)
            if best is None or v < best[0]:
                best = (v, s, m)
    return best


class TestKnapsackBounds:
    @pytest.mark.parametrize("k,H,R,sm,value", [
        (8, 0, 16, (23, 11), "1.18290"),
        (8, 1, 16, (5, 3), "2.10592"),
        (10, 0, 1024, (73, 14), "1.14049"),
    ])
    def test_values(self, k, H, R, sm, value):
        kb = B.knapsack_bounds(QueryBudget(k, H), R)
        assert kb.upper_sm == sm
        assert abs(kb.upper_cr - mp.mpf(value)) < 5e-6

    @pytest.mark.parametrize("k,H,R", [(8, 0, 16), (8, 1, 16), (10, 0, 1024), (7, 2, 100)])
    def test_brute_force_minimizer(self, k, H, R):
        budget = QueryBudget(k, H)
        v, s, m = _brute_knapsack(B.find_capacity(budget), R)
        kb = B.knapsack_bounds(budget, R)
        assert abs(kb.upper_cr - v) < 1e-20
        assert kb.upper_sm == (s, m)

    def test_no_advice(self):
        kb = B.knapsack_bounds(QueryBudget(0, 0), 16)
        assert kb.no_advice and kb.upper_cr == mp.inf

    @given(budgets(12), st.sampled_from([3, 16, 100, 1024]))
    @settings(max_examples=40)
    def test_ordered(self, budget, R):
        kb = B.knapsack_bounds(budget, R)
        assert 1 <= kb.lower_cr <= kb.upper_cr

    def test_f_m_domain(self):
        with pytest.raises(DomainError):
            B.knapsack_upper_ratio(2, 1)


class TestResourceAugmentation:
    def test_value(self):
        assert abs(B.resource_augmentation_size(30, Fraction(1, 10)) - mp.mpf("345.886")) < 1e-3

    @pytest.mark.parametrize("k,c", [(0, Fraction(1, 10)), (4, Fraction(1, 3)), (4, 0)])
    def test_domain(self, k, c):
        with pytest.raises(DomainError):
            B.resource_augmentation_size(k, c)

    @given(st.integers(1, 64), st.sampled_from([Fraction(1, 20), Fraction(1, 10), Fraction(1, 5)]))
    def test_budget_is_valid(self, k, c):
        aug = B.augmented_budget(k, c)
        assert aug.k >= k and 2 * aug.H <= aug.k


class TestBoundReport:
    def test_render(self):
        rep = B.BoundReport("x", mp.mpf(2), {"r": Fraction(1, 3), "k": 2}).as_dict()
        assert rep["name"] == "x"
        assert rep["formula_inputs"] == {"r": "1/3", "k": 2}
