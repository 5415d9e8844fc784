"""Online fractional knapsack with a reserved region for critical-density items.

Sizes are exact :class:`Fraction` values so capacity accounting is exact;
densities (and therefore values) are reals. Items are stored as runs of
identical items, which the algorithm can process in one step without
changing its behaviour.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, NamedTuple, Sequence

from ..advice import AdviceOracle, Policy
from ..bounds import QueryBudget, Real, knapsack_bounds, knapsack_upper_ratio, mp
from ..errors import DomainError
from ..games.solvers import find

_CAPACITY_BITS = 64


def _mpf(x: Any) -> Real:
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def _floor_fraction(x: Real) -> Fraction:
    """Largest multiple of 2^-64 not above ``x`` (clamped to [0, 1])."""
    scaled = int(mp.floor(x * (1 << _CAPACITY_BITS)))
    return min(max(Fraction(scaled, 1 << _CAPACITY_BITS), Fraction(0)), Fraction(1))


class ItemRun(NamedTuple):
    density: Real
    size: Fraction
    count: int

    @property
    def total_size(self) -> Fraction:
        return self.size * self.count


@dataclass(frozen=True)
class KnapsackInstance:
    runs: tuple[ItemRun, ...]
    L: Real
    U: Real

    def __init__(self, runs: Sequence[tuple[Any, Any, int]], L: Any, U: Any):
        lo, hi = _mpf(L), _mpf(U)
        if not (0 < lo <= hi):
            raise DomainError(f"need 0 < L <= U, got L={L}, U={U}")
        out = []
        for density, size, count in runs:
            d, s = _mpf(density), Fraction(size)
            if not (0 < s <= 1) or count < 0:
                raise DomainError(f"item size must lie in (0, 1], got {size}")
            if d < lo or d > hi:
                raise DomainError(f"density {mp.nstr(d, 12)} outside [L, U]")
            if count:
                out.append(ItemRun(d, s, int(count)))
        object.__setattr__(self, "runs", tuple(out))
        object.__setattr__(self, "L", lo)
        object.__setattr__(self, "U", hi)

    @classmethod
    def from_items(cls, items: Sequence[tuple[Any, Any]], L: Any, U: Any) -> "KnapsackInstance":
        """Build from (value, size) pairs."""
        runs = []
        for v, s in items:
            s = Fraction(s)
            runs.append((_mpf(v) / _mpf(s), s, 1))
        return cls(runs, L, U)

    @property
    def total_size(self) -> Fraction:
        return sum((r.total_size for r in self.runs), Fraction(0))

    def to_dict(self) -> dict[str, Any]:
        return {
            "items": [
                {"v": mp.nstr(r.density * _mpf(r.size), 20), "s": str(r.size), "count": r.count}
                for r in self.runs
            ],
            "L": mp.nstr(self.L, 20),
            "U": mp.nstr(self.U, 20),
        }


@dataclass(frozen=True)
class KnapsackPartition:
    """Density grid d_0..d_s and capacity grid c_0..c_m for ratio U/L."""

    s: int
    m: int
    L: Real
    U: Real

    @property
    def beta(self) -> Real:
        return (self.U / self.L) ** (mp.mpf(1) / self.s)

    def d(self, i: int) -> Real:
        if i == self.s:
            return self.U
        return self.L * self.beta**i

    def c(self, i: int) -> Real:
        """c_i = (beta^m - beta^(m-i)) / (beta^m - 1); c_0 = 0, c_m = 1."""
        if i <= 0:
            return mp.mpf(0)
        if i >= self.m:
            return mp.mpf(1)
        b = self.beta
        return (b**self.m - b ** (self.m - i)) / (b**self.m - 1)

    def density_class(self, density: Real) -> int:
        """x with density in [d_{x-1}, d_x); the last class is closed at U."""
        for x in range(1, self.s):
            if density < self.d(x):
                return x
        return self.s

    def capacity_class(self, c: Any) -> int:
        """y with c in [c_{y-1}, c_y), clamped to m."""
        cc = _mpf(c)
        for y in range(1, self.m):
            if cc < self.c(y):
                return y
        return self.m

    def encode(self, x: int, y: int) -> int:
        """Row-major label in 1..s*m."""
        return (x - 1) * self.m + y

    def decode(self, z: int) -> tuple[int, int]:
        return (z - 1) // self.m + 1, (z - 1) % self.m + 1

    def ratio_bound(self) -> Real:
        return knapsack_upper_ratio(self.beta, self.m)


def _by_density(instance: KnapsackInstance) -> list[ItemRun]:
    return sorted(instance.runs, key=lambda r: r.density, reverse=True)


def knapsack_opt(instance: KnapsackInstance) -> Real:
    """Optimal fractional profit: fill by decreasing density."""
    room = Fraction(1)
    profit = mp.mpf(0)
    for r in _by_density(instance):
        if room <= 0:
            break
        take = min(room, r.total_size)
        profit += r.density * _mpf(take)
        room -= take
    return profit


def critical_density(instance: KnapsackInstance) -> Real:
    """Lowest density the greedy optimum takes any of."""
    room = Fraction(1)
    last = instance.L
    for r in _by_density(instance):
        if room <= 0:
            break
        last = r.density
        room -= min(room, r.total_size)
    return last


def heavy_size_in_opt(instance: KnapsackInstance, threshold: Real | None) -> Fraction:
    """Capacity the optimum gives to items of density at least ``threshold``."""
    if threshold is None:
        return Fraction(0)
    heavy = sum((r.total_size for r in instance.runs if r.density >= threshold), Fraction(0))
    return min(heavy, Fraction(1))


def _heavy_threshold(part: KnapsackPartition, x: int) -> Real | None:
    return part.d(x) if x < part.s else None


def knapsack_target(instance: KnapsackInstance, part: KnapsackPartition) -> tuple[int, int]:
    """The (x, y) pair correct advice points to."""
    x = part.density_class(critical_density(instance))
    c_star = 1 - heavy_size_in_opt(instance, _heavy_threshold(part, x))
    return x, part.capacity_class(c_star)


class KnapsackOutcome(NamedTuple):
    profit: Real
    ratio: Real
    used: Fraction
    advice: tuple[int, int] | None


def knapsack_partition(budget: QueryBudget, L: Any, U: Any) -> KnapsackPartition | None:
    bounds = knapsack_bounds(budget, _mpf(U) / _mpf(L))
    if bounds.upper_sm is None:
        return None
    s, m = bounds.upper_sm
    return KnapsackPartition(s, m, _mpf(L), _mpf(U))


def knapsack_oracle(
    instance: KnapsackInstance, budget: QueryBudget, policy: Policy | str = "none"
) -> AdviceOracle:
    part = knapsack_partition(budget, instance.L, instance.U)
    truth = part.encode(*knapsack_target(instance, part)) if part else 1
    return AdviceOracle(truth, budget, policy)


def _accept_all(instance: KnapsackInstance) -> tuple[Real, Fraction]:
    room = Fraction(1)
    profit = mp.mpf(0)
    for r in instance.runs:
        take = min(room, r.total_size)
        profit += r.density * _mpf(take)
        room -= take
    return profit, 1 - room


def run_with_advice(
    instance: KnapsackInstance, part: KnapsackPartition, x: int, y: int
) -> tuple[Real, Fraction]:
    """Online pass given (x, y): returns (profit, capacity used)."""
    reserve = _floor_fraction(part.c(y - 1))
    low = part.d(x - 1)
    high = _heavy_threshold(part, x)
    room_critical, room_heavy = reserve, 1 - reserve
    profit = mp.mpf(0)
    for r in instance.runs:
        if r.density < low:
            continue
        if high is not None and r.density >= high:
            take = min(room_heavy, r.total_size)
            room_heavy -= take
        else:
            take = min(room_critical, r.total_size)
            room_critical -= take
        profit += r.density * _mpf(take)
    return profit, 1 - room_critical - room_heavy


def _ratio(opt: Real, profit: Real) -> Real:
    if profit == 0:
        return mp.mpf(1) if opt == 0 else mp.inf
    return opt / profit


def knapsack_run(
    instance: KnapsackInstance, budget: QueryBudget, oracle: AdviceOracle
) -> KnapsackOutcome:
    """Reserve c_{y-1} for critical items and the rest for heavy items.

    With correct advice the ratio is at most f_m(beta) for the (s, m) that
    minimizes it under the budget. Budgets too small for any m >= 2 accept
    every item greedily.
    """
    part = knapsack_partition(budget, instance.L, instance.U)
    opt = knapsack_opt(instance)
    if part is None:
        profit, used = _accept_all(instance)
        return KnapsackOutcome(profit, _ratio(opt, profit), used, None)
    x, y = part.decode(find(part.s * part.m, budget, oracle))
    profit, used = run_with_advice(instance, part, x, y)
    return KnapsackOutcome(profit, _ratio(opt, profit), used, (x, y))


# ---------------------------------------------------------------------------
# adversarial sequences
# ---------------------------------------------------------------------------


def sigma_capacity_grid(beta: Real, m: int) -> list[Real]:
    """c_0..c_m between min/max{1/beta, 1 - 1/beta}, spaced so that
    g(c) = c + beta (1 - c) falls geometrically from c_0 to c_m."""
    inv = 1 / beta
    c0, cm = min(inv, 1 - inv), max(inv, 1 - inv)

    def g(c: Real) -> Real:
        return c + beta * (1 - c)

    ratio = (g(cm) / g(c0)) ** (mp.mpf(1) / m)
    out = []
    for j in range(m + 1):
        gj = g(c0) * ratio**j
        out.append((beta - gj) / (beta - 1))
    out[0], out[m] = c0, cm
    return out


def knapsack_adversarial_instances(
    s: int, m: int, L: Any, U: Any, epsilon: Fraction = Fraction(1, 1000)
) -> list[tuple[tuple[int, int], KnapsackInstance]]:
    """sigma_{x,y}: unit blocks at densities d_0..d_{x-1}, then c_y at d_x.

    Blocks are made of items of size ``epsilon``; c_y is rounded to the
    nearest multiple of ``epsilon``.
    """
    eps = Fraction(epsilon)
    if not 0 < eps <= 1 or (1 / eps).denominator != 1:
        raise DomainError(f"epsilon must be 1/n for a positive integer n, got {epsilon}")
    if s < 1 or m < 1:
        raise DomainError(f"need s, m >= 1, got s={s}, m={m}")
    lo, hi = _mpf(L), _mpf(U)
    part = KnapsackPartition(s, m, lo, hi)
    cgrid = sigma_capacity_grid(part.beta, m)
    per_unit = int(1 / eps)
    out = []
    for x in range(1, s + 1):
        prefix = [(part.d(i), eps, per_unit) for i in range(x)]
        for y in range(1, m + 1):
            count = int(mp.nint(cgrid[y] / _mpf(eps)))
            inst = KnapsackInstance(prefix + [(part.d(x), eps, count)], lo, hi)
            out.append(((x, y), inst))
    return out


def sigma_opt(instance: KnapsackInstance) -> Real:
    """(1 - c) d_{x-1} + c d_x for a sigma sequence whose last block has size c."""
    last, prev = instance.runs[-1], instance.runs[-2] if len(instance.runs) > 1 else None
    c = last.total_size
    base = prev.density * _mpf(1 - c) if prev is not None else mp.mpf(0)
    return base + last.density * _mpf(c)
