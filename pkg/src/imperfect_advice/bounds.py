"""Exact and closed-form evaluation of the competitive-ratio bounds.

Integer quantities (partial binomial sums, grid sizes, ranks) are Python
ints; ratios that are not floored stay :class:`fractions.Fraction`; every
real-valued bound is an ``mpf`` from a private 32-digit mpmath context, so
callers never depend on the global mpmath precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, NamedTuple

import mpmath

from .errors import DomainError

mp = mpmath.MPContext()
mp.dps = 32

Real = Any  # an mpf of ``mp``


@dataclass(frozen=True)
class QueryBudget:
    """Advice size ``k`` (number of binary queries) and error tolerance ``H``."""

    k: int
    H: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or not isinstance(self.H, int):
            raise DomainError("k and H must be integers")
        if self.k < 0 or self.H < 0:
            raise DomainError(f"k and H must be nonnegative, got k={self.k}, H={self.H}")
        if 2 * self.H > self.k:
            raise DomainError(
                f"tolerance H={self.H} exceeds k/2 for k={self.k}; the bounds require H <= k/2"
            )

    def as_dict(self) -> dict[str, int]:
        return {"k": self.k, "H": self.H}


@dataclass(frozen=True)
class BoundReport:
    name: str
    value: Any
    formula_inputs: dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "value": _render(self.value),
            "formula_inputs": {k: _render(v) for k, v in self.formula_inputs.items()},
        }


def _render(v: Any) -> Any:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, mpmath.ctx_mp_python.mpf):
        return mp.nstr(v, 17) if mp.isfinite(v) else "inf"
    if isinstance(v, tuple):
        return [_render(x) for x in v]
    return v


def _real(x: Any) -> Real:
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


# ---------------------------------------------------------------------------
# combinatorics
# ---------------------------------------------------------------------------


@lru_cache(maxsize=65536)
def partial_binomial_sum(N: int, m: int) -> int:
    """Return sum_{j=0..m} C(N, j) exactly."""
    if N < 0 or m < 0:
        raise DomainError(f"partial_binomial_sum needs nonnegative inputs, got N={N}, m={m}")
    if m > N:
        raise DomainError(f"partial_binomial_sum needs m <= N, got N={N}, m={m}")
    if 2 * m > N:
        return (1 << N) - partial_binomial_sum(N, N - m - 1) if m < N else 1 << N
    total, term = 0, 1
    for j in range(m + 1):
        total += term
        term = term * (N - j) // (j + 1)
    return total


def berlekamp_weight(remaining: int, slack: int) -> int:
    """Weight of a candidate with ``slack`` lies left and ``remaining`` queries.

    Zero for dead candidates (negative slack); saturates at ``2**remaining``.
    """
    if slack < 0:
        return 0
    return partial_binomial_sum(remaining, min(slack, remaining))


def find_capacity(budget: QueryBudget) -> int:
    """floor(2^(k-H) / <<k-H, H>>): domain size the weighting questioner handles."""
    k, H = budget.k, budget.H
    return (1 << (k - H)) // partial_binomial_sum(k - H, H)


def mu_bounds(budget: QueryBudget) -> tuple[int, int]:
    k, H = budget.k, budget.H
    lower = find_capacity(budget)
    upper = (1 << k) // partial_binomial_sum(k, H)
    return lower, upper


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def ts_grid_size(budget: QueryBudget) -> int:
    """U of the time-series upper bound."""
    return find_capacity(budget)


def ts_lower_count(budget: QueryBudget) -> int:
    """L = ceil(2^k / <<k, H>>) of the time-series lower bound."""
    return _ceil_div(1 << budget.k, partial_binomial_sum(budget.k, budget.H))


def bidding_rank_bound(budget: QueryBudget) -> int:
    """U = ceil(2^H <<k-H, H>>): worst rank of the sequence picked with advice."""
    return (1 << budget.H) * partial_binomial_sum(budget.k - budget.H, budget.H)


# ---------------------------------------------------------------------------
# entropy
# ---------------------------------------------------------------------------


def entropy(p: Any) -> Real:
    """Binary entropy in bits."""
    if not 0 < p < 1:
        raise DomainError(f"entropy needs p in (0, 1), got {p}")
    x = _real(p)
    return -x * mp.log(x, 2) - (1 - x) * mp.log(1 - x, 2)


def _entropy_closed(p: Any) -> Real:
    # extends entropy to [0, 1] with H(0) = H(1) = 0
    if p <= 0 or p >= 1:
        return mp.mpf(0)
    return entropy(p)


def entropy_bracket(p: Any) -> tuple[Real, Real]:
    """(4p(1-p), (4p(1-p))^(1/ln 4)), the polynomial sandwich around entropy(p)."""
    if not 0 < p < 1:
        raise DomainError(f"entropy_bracket needs p in (0, 1), got {p}")
    x = _real(p)
    q = 4 * x * (1 - x)
    return q, q ** (1 / mp.log(4))


def partial_sum_entropy_bracket(N: int, m: int) -> tuple[Real, Real]:
    if not (0 < m and 2 * m < N):
        raise DomainError(f"entropy bracket needs 0 < m < N/2, got N={N}, m={m}")
    ratio = Fraction(m, N)
    upper = mp.power(2, N * entropy(ratio))
    lower = upper / mp.sqrt(8 * m * (1 - _real(ratio)))
    return lower, upper


# ---------------------------------------------------------------------------
# time-series search
# ---------------------------------------------------------------------------


def _check_ratio(ratio: Any, name: str = "M_over_m") -> Real:
    r = _real(ratio)
    if not r > 1:
        raise DomainError(f"{name} must exceed 1, got {ratio}")
    return r


def ts_bounds(budget: QueryBudget, M_over_m: Any) -> tuple[Real, Real]:
    """(upper, lower) competitive ratios for time-series search with k-bit advice."""
    r = _check_ratio(M_over_m)
    U = ts_grid_size(budget)
    L = ts_lower_count(budget)
    return r ** (mp.mpf(1) / (U + 1)), r ** (mp.mpf(1) / (L + 1))


def robust_ts_bounds(budget: QueryBudget, M_over_m: Any, rho: Any) -> tuple[Real, Real]:
    r = _check_ratio(M_over_m)
    rh = _real(rho)
    if not (mp.mpf(1) / 2 < rh <= 1):
        raise DomainError(f"rho must lie in (1/2, 1], got {rho}")
    k, H = budget.k, budget.H
    U = ts_grid_size(budget)
    # the lower count uses <<k-H, H>>, not <<k, H>>
    L = _ceil_div(1 << k, partial_binomial_sum(k - H, H))
    e = 2 * rh - 1
    return r ** (e / (U + 1)), r ** (e / (L + 1))


# ---------------------------------------------------------------------------
# online bidding
# ---------------------------------------------------------------------------


def geometric_family_ratio(x: Any) -> Real:
    """f(x) = (1/x) (1 + x)^(1 + 1/x); decreasing, f(1) = 4, f -> 1."""
    v = _real(x)
    if not v > 0:
        raise DomainError(f"f(x) needs x > 0, got {x}")
    return (1 + v) ** (1 + 1 / v) / v


def bidding_optimal_base(budget: QueryBudget) -> Real:
    l = 1 << budget.k
    U = bidding_rank_bound(budget)
    return (mp.mpf(l + U + 1) / (U + 1)) ** (mp.mpf(1) / l)


def bidding_upper_bound(budget: QueryBudget) -> Real:
    U = bidding_rank_bound(budget)
    return geometric_family_ratio(Fraction(1 << budget.k, U + 1))


def bidding_lower_bound(budget: QueryBudget) -> Real:
    L = Fraction(1 << budget.k, partial_binomial_sum(budget.k, budget.H))
    return geometric_family_ratio(L)


def family_ratio_at(b: Any, l: int, rank: int) -> Real:
    """b^(l+1+rank) / (b^l - 1): sup ratio of the rank-``rank`` member of X_{b,l}."""
    bb = _real(b)
    if not bb > 1:
        return mp.inf
    return bb ** (l + 1 + rank) / (bb**l - 1)


def fpb_lower_bound(p: int, phi: int, alpha: Any) -> Real:
    """alpha^(p+1+phi) / (alpha^p - 1); infinite when alpha <= 1."""
    if p < 1 or not (0 <= phi < p):
        raise DomainError(f"need p >= 1 and 0 <= phi < p, got p={p}, phi={phi}")
    a = _real(alpha)
    if a <= 1:
        return mp.inf
    return a ** (p + 1 + phi) / (a**p - 1)


def _robust_interval(r: Real, power: int) -> tuple[Real, Real]:
    # B^2/(B-1) <= r  <=>  B in [B-, B+]; returned as bounds on B^(1/power)
    disc = mp.sqrt(r * r - 4 * r) if r > 4 else mp.mpf(0)
    lo, hi = (r - disc) / 2, (r + disc) / 2
    return lo ** (mp.mpf(1) / power), hi ** (mp.mpf(1) / power)


def golden_section_min(
    func: Callable[[Real], Real], lo: Real, hi: Real, tol: float = 1e-12
) -> tuple[Real, Real]:
    """Minimize a unimodal ``func`` on [lo, hi]; returns (argmin, min)."""
    invphi = (mp.sqrt(5) - 1) / 2
    a, b = mp.mpf(lo), mp.mpf(hi)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = func(c), func(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = func(d)
    x = (a + b) / 2
    candidates = [(func(x), x), (func(a), a), (func(b), b)]
    fx, x = min(candidates, key=lambda t: t[0])
    return x, fx


_BASE_BRACKET = (mp.mpf(1) + mp.mpf("1e-9"), mp.mpf(8))


def _constrained_family_min(l: int, rank: int, feasible: tuple[Real, Real]) -> tuple[Real, Real]:
    lo = max(feasible[0], _BASE_BRACKET[0])
    hi = min(feasible[1], _BASE_BRACKET[1])
    if lo > hi:
        raise DomainError("robustness constraint leaves no feasible base in (1, 8]")

    def objective(logb: Real) -> Real:
        b = mp.exp(logb)
        return (l + 1 + rank) * logb - mp.log(b**l - 1)

    logb, val = golden_section_min(objective, mp.log(lo), mp.log(hi))
    return mp.exp(logb), mp.exp(val)


def _check_robustness(r: Any) -> Real:
    rr = _real(r)
    if rr < 4:
        raise DomainError(f"robustness r must be at least 4, got {r}")
    return rr


def robust_bidding_base(budget: QueryBudget, r: Any) -> Real:
    """Base b minimizing the advice-driven ratio while keeping every member r-robust."""
    rr = _check_robustness(r)
    l = 1 << budget.k
    b, _ = _constrained_family_min(l, bidding_rank_bound(budget), _robust_interval(rr, l))
    return b


def robust_bidding_bounds(budget: QueryBudget, r: Any) -> tuple[Real, Real]:
    rr = _check_robustness(r)
    k = budget.k
    l = 1 << k
    _, upper = _constrained_family_min(l, bidding_rank_bound(budget), _robust_interval(rr, l))
    L = partial_binomial_sum(k, budget.H)
    # the lower constraint is alpha^(2k)/(alpha^k - 1) <= r; at k = 0 it degenerates
    # and the plain alpha^2/(alpha - 1) <= r robustness condition is used
    _, lower = _constrained_family_min(l, L, _robust_interval(rr, max(k, 1)))
    return upper, lower


# ---------------------------------------------------------------------------
# fractional knapsack
# ---------------------------------------------------------------------------


def knapsack_upper_ratio(beta: Any, m: int) -> Real:
    """f_m(beta) = (beta^m - 1) / (beta^(m-1) - 1), defined for m >= 2."""
    if m < 2:
        raise DomainError("f_m is undefined for m < 2")
    b = _real(beta)
    return (b**m - 1) / (b ** (m - 1) - 1)


def knapsack_lower_ratio(beta: Any, m: int) -> Real:
    """g_m(beta) = ((beta^2 - beta + 1) / (2 beta + 1))^(1/(m+1))."""
    b = _real(beta)
    return ((b * b - b + 1) / (2 * b + 1)) ** (mp.mpf(1) / (m + 1))


def _f_float(t: float, m: int) -> float:
    # f_m at beta = e^t, stable for large m t
    return math.exp(t) * (-math.expm1(-m * t)) / (-math.expm1(-(m - 1) * t))


def _g_log_float(beta: float, m: int) -> float:
    return math.log((beta * beta - beta + 1) / (2 * beta + 1)) / (m + 1)


class KnapsackBounds(NamedTuple):
    upper_cr: Real
    lower_cr: Real
    upper_sm: tuple[int, int] | None
    lower_sm: tuple[int, int]

    @property
    def no_advice(self) -> bool:
        """True when the budget admits no (s, m) with m >= 2."""
        return self.upper_sm is None


_MAX_S_SCAN = 1_000_000


def knapsack_upper_minimizer(cap: int, U_over_L: Any) -> tuple[int, int] | None:
    if cap < 2:
        return None
    lnR = math.log(float(_real(U_over_L)))
    best: tuple[float, int, int] | None = None
    for s in range(1, min(cap // 2, _MAX_S_SCAN) + 1):
        m = cap // s  # f_m decreases in m
        v = _f_float(lnR / s, m)
        if best is None or v < best[0]:
            best = (v, s, m)
    assert best is not None
    return best[1], best[2]


def knapsack_lower_minimizer(cap: int, U_over_L: Any) -> tuple[int, int]:
    R = float(_real(U_over_L))
    best: tuple[float, int, int] | None = None
    for s in range(1, min(cap, _MAX_S_SCAN) + 1):
        beta = R ** (1.0 / s)
        base_log = math.log((beta * beta - beta + 1) / (2 * beta + 1))
        m = cap // s if base_log > 0 else 1
        v = base_log / (m + 1)
        if best is None or v < best[0]:
            best = (v, s, m)
    assert best is not None
    return best[1], best[2]


def knapsack_bounds(budget: QueryBudget, U_over_L: Any) -> KnapsackBounds:
    R = _check_ratio(U_over_L, "U_over_L")
    _k, _H = budget.k, budget.H
    upper_sm = knapsack_upper_minimizer(find_capacity(budget), R)
    if upper_sm is None:
        upper = mp.inf
    else:
        s, m = upper_sm
        upper = knapsack_upper_ratio(R ** (mp.mpf(1) / s), m)
    lower_cap = ts_lower_count(budget) + 1
    lower_sm = knapsack_lower_minimizer(lower_cap, R)
    s, m = lower_sm
    # g_m drops below 1 once beta < 3; a competitive ratio is never below 1
    lower = max(mp.mpf(1), knapsack_lower_ratio(R ** (mp.mpf(1) / s), m))
    return KnapsackBounds(upper, lower, upper_sm, lower_sm)


# ---------------------------------------------------------------------------
# resource augmentation and gaps
# ---------------------------------------------------------------------------


def resource_augmentation_size(k: int, c: Any) -> Real:
    if k < 1:
        raise DomainError(f"k must be at least 1, got {k}")
    cc = _real(c)
    if not (0 < cc < mp.mpf(1) / 3):
        raise DomainError(f"c must lie in (0, 1/3), got {c}")
    third = mp.mpf(1) / 3
    kept = 2 * third + cc
    return k / (kept * (1 - entropy((third - cc) / kept))) + 1


def augmented_budget(k: int, c: Any) -> QueryBudget:
    """Integer advice size l and the tolerance floor((1/3 - c) l) it must absorb."""
    l = int(mp.ceil(resource_augmentation_size(k, c)))
    H = int(mp.floor((mp.mpf(1) / 3 - _real(c)) * l))
    return QueryBudget(l, H)


def bidding_log_gap_estimate(k: int, tau: Any) -> Real:
    """Entropy-based estimate of log(UB/LB) for bidding at tolerance fraction tau."""
    t = _real(tau)
    if not (0 <= t < mp.mpf(1) / 2):
        raise DomainError(f"tau must lie in [0, 1/2), got {tau}")
    a = k * (1 - t) * (1 - _entropy_closed(t / (1 - t)))
    b = k * (1 - _entropy_closed(t))
    return mp.sqrt(8 * k * t * (1 - t)) * a / mp.power(2, a) - b / mp.power(2, b)
