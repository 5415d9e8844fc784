"""One-way time-series search with a reservation price located by weighting."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, NamedTuple, Sequence

from ..advice import AdviceOracle, Policy
from ..bounds import QueryBudget, Real, mp, ts_grid_size, ts_lower_count
from ..errors import DomainError
from ..games.solvers import find


def _mpf(x: Any) -> Real:
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


@dataclass(frozen=True)
class PriceInstance:
    prices: tuple
    m: Any
    M: Any

    def __init__(self, prices: Sequence[Any], m: Any, M: Any):
        ps = tuple(_mpf(p) for p in prices)
        lo, hi = _mpf(m), _mpf(M)
        if not lo > 0 or hi < lo:
            raise DomainError(f"need 0 < m <= M, got m={m}, M={M}")
        if not ps:
            raise DomainError("a price sequence needs at least one price")
        for p in ps:
            if p < lo or p > hi:
                raise DomainError(f"price {mp.nstr(p, 12)} outside [m, M]")
        object.__setattr__(self, "prices", ps)
        object.__setattr__(self, "m", lo)
        object.__setattr__(self, "M", hi)

    @property
    def best(self) -> Real:
        return max(self.prices)

    def to_dict(self) -> dict[str, Any]:
        return {
            "prices": [mp.nstr(p, 20) for p in self.prices],
            "m": mp.nstr(self.m, 20),
            "M": mp.nstr(self.M, 20),
        }


class TsOutcome(NamedTuple):
    accepted_price: Real
    ratio: Real
    reservation_index: int


def geometric_grid(lo: Real, hi: Real, count: int) -> list[Real]:
    """a_1..a_count with a_1/lo = a_2/a_1 = ... = hi/a_count."""
    r = (hi / lo) ** (mp.mpf(1) / (count + 1))
    return [lo * r**i for i in range(1, count + 1)]


def reservation_grid(budget: QueryBudget, m: Any, M: Any) -> list[Real]:
    return geometric_grid(_mpf(m), _mpf(M), ts_grid_size(budget))


def accept_with_reservation(prices: Sequence[Real], p: Real) -> Real:
    """First price at least ``p``; the last price if none qualifies."""
    for price in prices:
        if price >= p:
            return price
    return prices[-1]


def best_reservation_index(prices: Sequence[Real], grid: Sequence[Real]) -> int:
    """1-based grid index with the smallest ratio; ties go to the higher reservation."""
    best = max(prices)
    ratios = [best / accept_with_reservation(prices, a) for a in grid]
    low = min(ratios)
    return max(i for i, r in enumerate(ratios, start=1) if r == low)


def ts_target(instance: PriceInstance, budget: QueryBudget) -> int:
    return best_reservation_index(instance.prices, reservation_grid(budget, instance.m, instance.M))


def ts_oracle(instance: PriceInstance, budget: QueryBudget, policy: Policy | str = "none") -> AdviceOracle:
    return AdviceOracle(ts_target(instance, budget), budget, policy)


def _run_on_grid(
    instance: PriceInstance, grid: list[Real], budget: QueryBudget, oracle: AdviceOracle
) -> TsOutcome:
    i = find(len(grid), budget, oracle)
    accepted = accept_with_reservation(instance.prices, grid[i - 1])
    return TsOutcome(accepted, instance.best / accepted, i)


def ts_run(instance: PriceInstance, budget: QueryBudget, oracle: AdviceOracle) -> TsOutcome:
    """Reservation-price search; ratio <= (M/m)^(1/(U+1)) whenever the oracle lies at most H times."""
    return _run_on_grid(instance, reservation_grid(budget, instance.m, instance.M), budget, oracle)


def ts_adversarial_instances(budget: QueryBudget, m: Any, M: Any) -> list[PriceInstance]:
    """sigma_i = (m, a_1, ..., a_i, m) for i = 1..L+1 with a_{L+1} = M."""
    lo, hi = _mpf(m), _mpf(M)
    L = ts_lower_count(budget)
    a = geometric_grid(lo, hi, L) + [hi]
    return [PriceInstance([lo, *a[:i], lo], lo, hi) for i in range(1, L + 2)]


def robust_window(m: Any, M: Any, rho: Any) -> tuple[Real, Real]:
    """(p1, p2) with M/p1 = (M/m)^rho and p2/m = (M/m)^rho."""
    lo, hi, rh = _mpf(m), _mpf(M), _mpf(rho)
    if not (mp.mpf(1) / 2 < rh <= 1):
        raise DomainError(f"rho must lie in (1/2, 1], got {rho}")
    spread = (hi / lo) ** rh
    return hi / spread, lo * spread


def robust_reservation_grid(budget: QueryBudget, m: Any, M: Any, rho: Any) -> list[Real]:
    p1, p2 = robust_window(m, M, rho)
    if _mpf(rho) == 1:
        return reservation_grid(budget, m, M)
    return geometric_grid(p1, p2, ts_grid_size(budget))


def ts_robust_target(instance: PriceInstance, budget: QueryBudget, rho: Any) -> int:
    grid = robust_reservation_grid(budget, instance.m, instance.M, rho)
    return best_reservation_index(instance.prices, grid)


def ts_robust_run(
    instance: PriceInstance, budget: QueryBudget, oracle: AdviceOracle, rho: Any
) -> TsOutcome:
    """Reservation search restricted to [p1, p2]; ratio <= (M/m)^rho under any advice."""
    grid = robust_reservation_grid(budget, instance.m, instance.M, rho)
    return _run_on_grid(instance, grid, budget, oracle)
