"""Experiment orchestration: sweeps, empirical ratios against bounds, exports and
exhaustive game-tree verification."""

from __future__ import annotations

import csv
import io
import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator, Sequence

from . import bounds as B
from .advice import AdviceOracle, parse_policy
from .bounds import QueryBudget, Real, mp
from .errors import DomainError
from .games.adversaries import adversary_search, search_rank_floor
from .games.core import ComparisonQuery, play
from .games.search import search_questioners
from .games.solvers import BlockQuestioner, cyclic_rank_bound, identify_feasible
from .games.weighting import CWeightingQuestioner, WeightingQuestioner
from .problems import bidding as bid
from .problems import knapsack as ks
from .problems import timeseries as ts

PROBLEMS = ("ts", "bidding", "fpb", "knapsack", "ts_robust", "bidding_robust")
REL_TOL = mp.mpf("1e-9")


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    problem: str
    k: tuple[int, ...] = (0,)
    H: tuple[int, ...] = (0,)
    error_policy: str = "none"
    seed: int = 0
    m: str = "1"
    M: str = "100"
    L: str = "1"
    U: str = "16"
    rho: str = "1"
    r: str = "8"
    p: int = 2
    phi: int = 1
    b: str = "2"
    grid_points: int = 1000
    random_instances: int = 0
    epsilon: str = "1/1000"
    workers: int = 1
    csv: str | None = None
    jsonl: str | None = None

    def __post_init__(self) -> None:
        if self.problem not in PROBLEMS:
            raise DomainError(f"problem must be one of {', '.join(PROBLEMS)}, got {self.problem!r}")
        for name in ("k", "H"):
            vals = getattr(self, name)
            if not all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in vals):
                raise DomainError(f"{name} must be a list of nonnegative integers")
        for k in self.k:
            for H in self.H:
                if 2 * H > k:
                    raise DomainError(f"budget k={k}, H={H} violates H <= k/2")
        parse_policy(self.error_policy)
        for name in ("grid_points", "random_instances", "workers", "p"):
            if getattr(self, name) < (1 if name in ("workers", "p") else 0):
                raise DomainError(f"{name} out of range: {getattr(self, name)}")
        if self.problem == "fpb" and not 0 <= self.phi < self.p:
            raise DomainError(f"fpb needs 0 <= phi < p, got p={self.p}, phi={self.phi}")
        if _num(self.m) <= 0 or _num(self.M) <= _num(self.m):
            raise DomainError("need 0 < m < M")
        if _num(self.L) <= 0 or _num(self.U) <= _num(self.L):
            raise DomainError("need 0 < L < U")
        if _num(self.b) <= 1:
            raise DomainError("fpb base b must exceed 1")
        if self.problem == "ts_robust" and not (Fraction(1, 2) < Fraction(self.rho) <= 1):
            raise DomainError("rho must lie in (1/2, 1]")
        if self.problem == "bidding_robust" and _num(self.r) < 4:
            raise DomainError("r must be at least 4")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise DomainError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise DomainError(f"unknown config keys: {', '.join(unknown)}")
        if "problem" not in data:
            raise DomainError("config is missing 'problem'")
        kw = dict(data)
        for name in ("k", "H"):
            if name in kw:
                kw[name] = _int_list(kw[name], name)
        for name in ("m", "M", "L", "U", "rho", "r", "b", "epsilon"):
            if name in kw:
                if isinstance(kw[name], bool) or not isinstance(kw[name], (int, float, str)):
                    raise DomainError(f"{name} must be a number or numeric string")
                kw[name] = str(kw[name])
                _num(kw[name], name)
        for name in ("seed", "p", "phi", "grid_points", "random_instances", "workers"):
            if name in kw and (isinstance(kw[name], bool) or not isinstance(kw[name], int)):
                raise DomainError(f"{name} must be an integer")
        return cls(**kw)

    @classmethod
    def load(cls, path: str | Path, overrides: dict[str, Any] | None = None) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise DomainError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        data.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.from_dict(data)


def _num(text: str, name: str = "value") -> Real:
    try:
        return B._real(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"{name}: not a number: {text!r}") from exc


def _int_list(v: Any, name: str) -> tuple[int, ...]:
    if isinstance(v, int) and not isinstance(v, bool):
        return (v,)
    if isinstance(v, dict) and set(v) <= {"min", "max"}:
        return tuple(range(int(v.get("min", 0)), int(v["max"]) + 1))
    if isinstance(v, list):
        return tuple(v)
    raise DomainError(f"{name} must be an int, a list, or {{min, max}}")


# ---------------------------------------------------------------------------
# rows
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResultRow:
    problem: str
    k: int
    H: int
    eta_realized: int
    empirical_cr: Real
    bound_upper: Real
    bound_lower: Real
    within_bound: bool
    instance_id: str
    seed: int

    def as_record(self) -> dict[str, Any]:
        return {
            "problem": self.problem,
            "k": self.k,
            "H": self.H,
            "eta_realized": self.eta_realized,
            "empirical_cr": _fmt(self.empirical_cr),
            "bound_upper": _fmt(self.bound_upper),
            "bound_lower": _fmt(self.bound_lower),
            "within_bound": self.within_bound,
            "instance_id": self.instance_id,
            "seed": self.seed,
        }

    @property
    def violation(self) -> bool:
        return self.eta_realized <= self.H and not self.within_bound


COLUMNS = tuple(f.name for f in fields(ResultRow))


def _fmt(x: Real) -> str:
    return mp.nstr(x, 17) if mp.isfinite(x) else "inf"


def _within(value: Real, bound: Real) -> bool:
    return bool(value <= bound * (1 + REL_TOL))


def _row(cfg: ExperimentConfig, budget: QueryBudget, eta: int, cr: Real, upper: Real,
         lower: Real, iid: str) -> ResultRow:
    return ResultRow(cfg.problem, budget.k, budget.H, eta, cr, upper, lower,
                     _within(cr, upper), iid, cfg.seed)


# ---------------------------------------------------------------------------
# instance generation
# ---------------------------------------------------------------------------


Job = tuple[str, Callable[[], ResultRow]]


def _rng(cfg: ExperimentConfig, budget: QueryBudget, tag: str) -> random.Random:
    return random.Random(f"{cfg.seed}:{budget.k}:{budget.H}:{cfg.problem}:{tag}")


def _random_prices(rng: random.Random, m: Real, M: Real) -> list[Real]:
    n = rng.randint(1, 12)
    return [m * (M / m) ** mp.mpf(rng.random()) for _ in range(n)]


def _ts_jobs(cfg: ExperimentConfig, budget: QueryBudget) -> Iterator[Job]:
    m, M = _num(cfg.m), _num(cfg.M)
    robust = cfg.problem == "ts_robust"
    rho = Fraction(cfg.rho)
    if robust:
        cons, low = B.robust_ts_bounds(budget, M / m, rho)
        robustness = (M / m) ** B._real(rho)
    else:
        cons, low = B.ts_bounds(budget, M / m)
    instances = [(f"sigma{i}", inst)
                 for i, inst in enumerate(ts.ts_adversarial_instances(budget, m, M), start=1)]
    rng = _rng(cfg, budget, "prices")
    instances += [(f"random{j}", ts.PriceInstance(_random_prices(rng, m, M), m, M))
                  for j in range(cfg.random_instances)]
    for iid, inst in instances:
        def run(inst=inst, iid=iid) -> ResultRow:
            if robust:
                oracle = AdviceOracle(ts.ts_robust_target(inst, budget, rho), budget, cfg.error_policy)
                out = ts.ts_robust_run(inst, budget, oracle, rho)
            else:
                oracle = AdviceOracle(ts.ts_target(inst, budget), budget, cfg.error_policy)
                out = ts.ts_run(inst, budget, oracle)
            eta = oracle.report().eta
            upper = robustness if robust and eta > budget.H else cons
            return _row(cfg, budget, eta, out.ratio, upper, low, iid)

        yield iid, run


def _bidding_jobs(cfg: ExperimentConfig, budget: QueryBudget) -> Iterator[Job]:
    l = 1 << budget.k
    robust = cfg.problem == "bidding_robust"
    if robust:
        r = _num(cfg.r)
        base = B.robust_bidding_base(budget, r)
        cons, low = B.robust_bidding_bounds(budget, r)
    else:
        base = B.bidding_optimal_base(budget)
        cons, low = B.bidding_upper_bound(budget), B.bidding_lower_bound(budget)
    grid = bid.log_target_grid(base, cfg.grid_points, 3 * l)
    sessions = _bidding_sessions(budget, cfg.error_policy)
    for i, u in enumerate(grid):
        iid = f"u{i}"

        def run(u=u, iid=iid) -> ResultRow:
            chosen, eta = sessions[bid.family_target(base, l, u)]
            cr = bid.bidding_cost(bid.BidSequence(base, chosen, l), u) / u
            upper = r if robust and eta > budget.H else cons
            return _row(cfg, budget, eta, cr, upper, low, iid)

        yield iid, run


def _bidding_sessions(budget: QueryBudget, policy: str) -> list[tuple[int, int]]:
    # one advice session per possible best member; sessions are deterministic
    l = 1 << budget.k
    out = []
    for x in range(l):
        oracle = AdviceOracle(x, budget, policy)
        out.append((play(BlockQuestioner(l, budget), oracle), oracle.report().eta))
    return out


def _fpb_jobs(cfg: ExperimentConfig, budget: QueryBudget) -> Iterator[Job]:
    b = _num(cfg.b)
    family = bid.cyclic_family(b, cfg.p)
    upper = b ** (cfg.phi + 2) / (b - 1)
    low = B.fpb_lower_bound(cfg.p, cfg.phi, b)
    for i, u in enumerate(bid.log_target_grid(b, cfg.grid_points, 3 * cfg.p + 8)):
        iid = f"p{cfg.p}:phi{cfg.phi}:u{i}"

        def run(u=u, iid=iid) -> ResultRow:
            cost, _ = bid.fpb_adversarial_cost(family, cfg.phi, u)
            return _row(cfg, budget, 0, cost / u, upper, low, iid)

        yield iid, run


def _random_knapsack(rng: random.Random, L: Real, U: Real) -> ks.KnapsackInstance:
    runs = []
    for _ in range(rng.randint(1, 8)):
        density = L * (U / L) ** mp.mpf(rng.random())
        runs.append((density, Fraction(rng.randint(1, 1000), 1000), 1))
    return ks.KnapsackInstance(runs, L, U)


def _knapsack_jobs(cfg: ExperimentConfig, budget: QueryBudget) -> Iterator[Job]:
    L, U = _num(cfg.L), _num(cfg.U)
    kb = B.knapsack_bounds(budget, U / L)
    instances: list[tuple[str, ks.KnapsackInstance]] = []
    pairs = [kb.upper_sm] if kb.upper_sm else []
    for s, m in pairs:
        for (x, y), inst in ks.knapsack_adversarial_instances(s, m, L, U, Fraction(cfg.epsilon)):
            instances.append((f"sigma:s{s}:m{m}:x{x}:y{y}", inst))
    rng = _rng(cfg, budget, "items")
    instances += [(f"random{j}", _random_knapsack(rng, L, U)) for j in range(cfg.random_instances)]
    for iid, inst in instances:
        def run(inst=inst, iid=iid) -> ResultRow:
            oracle = ks.knapsack_oracle(inst, budget, cfg.error_policy)
            out = ks.knapsack_run(inst, budget, oracle)
            if out.used > 1:
                raise AssertionError(f"capacity exceeded on {iid}")
            return _row(cfg, budget, oracle.report().eta, out.ratio, kb.upper_cr, kb.lower_cr, iid)

        yield iid, run


_GENERATORS = {
    "ts": _ts_jobs,
    "ts_robust": _ts_jobs,
    "bidding": _bidding_jobs,
    "bidding_robust": _bidding_jobs,
    "fpb": _fpb_jobs,
    "knapsack": _knapsack_jobs,
}


def _budgets(cfg: ExperimentConfig) -> list[QueryBudget]:
    return [QueryBudget(k, H) for k in cfg.k for H in cfg.H]


def _run_budget(args: tuple[ExperimentConfig, int, int]) -> list[ResultRow]:
    cfg, k, H = args
    return [job() for _, job in _GENERATORS[cfg.problem](cfg, QueryBudget(k, H))]


_REAL_FIELDS = ("empirical_cr", "bound_upper", "bound_lower")


def _run_budget_packed(args: tuple[ExperimentConfig, int, int]) -> list[tuple]:
    # mpf values of a private context do not pickle; ship the raw (sign, man, exp, bc) tuples
    return [tuple(getattr(r, f.name)._mpf_ if f.name in _REAL_FIELDS else getattr(r, f.name)
                  for f in fields(ResultRow)) for r in _run_budget(args)]


def _unpack(values: tuple) -> ResultRow:
    kw = {f.name: (mp.make_mpf(v) if f.name in _REAL_FIELDS else v)
          for f, v in zip(fields(ResultRow), values)}
    return ResultRow(**kw)


def run_experiment(config: ExperimentConfig) -> list[ResultRow]:
    """All rows of a sweep, in (k, H, instance) order regardless of ``workers``."""
    tasks = [(config, b.k, b.H) for b in _budgets(config)]
    if config.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            chunks = [[_unpack(v) for v in chunk] for chunk in pool.map(_run_budget_packed, tasks)]
    else:
        chunks = [_run_budget(t) for t in tasks]
    return [row for chunk in chunks for row in chunk]


def replay_row(config: ExperimentConfig, k: int, H: int, instance_id: str) -> ResultRow:
    for iid, job in _GENERATORS[config.problem](config, QueryBudget(k, H)):
        if iid == instance_id:
            return job()
    raise DomainError(f"no instance {instance_id!r} for k={k}, H={H}")


@dataclass(frozen=True)
class Summary:
    count: int
    sup_ratio: Real
    violations: int

    def as_dict(self) -> dict[str, Any]:
        return {"count": self.count, "sup_ratio": _fmt(self.sup_ratio) if self.count else None,
                "violations": self.violations}


def summarize(rows: Sequence[ResultRow]) -> Summary:
    sup = max((r.empirical_cr for r in rows), default=mp.mpf(0))
    return Summary(len(rows), sup, sum(r.violation for r in rows))


def rows_to_csv(rows: Iterable[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(COLUMNS)
    for row in rows:
        rec = row.as_record()
        rec["within_bound"] = "true" if rec["within_bound"] else "false"
        writer.writerow([rec[c] for c in COLUMNS])
    return buf.getvalue()


def rows_to_jsonl(rows: Iterable[ResultRow]) -> str:
    return "".join(json.dumps(r.as_record(), separators=(",", ":")) + "\n" for r in rows)


def write_outputs(config: ExperimentConfig, rows: Sequence[ResultRow]) -> None:
    if config.csv:
        Path(config.csv).write_bytes(rows_to_csv(rows).encode())
    if config.jsonl:
        Path(config.jsonl).write_bytes(rows_to_jsonl(rows).encode())


# ---------------------------------------------------------------------------
# bound gaps
# ---------------------------------------------------------------------------


def tolerance_for(k: int, tau: Any) -> int:
    """H = round(tau k), halves rounded up."""
    return int(mp.floor(B._real(tau) * k + mp.mpf(1) / 2))


def gap_table(problem: str, tau_values: Sequence[Any], k_values: Sequence[int],
              ratio: Any = 100) -> list[dict[str, Any]]:
    """UB, LB and log(UB/LB) per (k, tau); bidding rows also carry the analytic estimate."""
    if problem not in ("ts", "bidding", "knapsack"):
        raise DomainError(f"gap tables exist for ts, bidding and knapsack, not {problem!r}")
    out = []
    for tau in tau_values:
        t = B._real(tau)
        if not 0 <= t < mp.mpf(1) / 2:
            raise DomainError(f"tau must lie in [0, 1/2), got {tau}")
        for k in k_values:
            budget = QueryBudget(k, tolerance_for(k, tau))
            if problem == "ts":
                ub, lb = B.ts_bounds(budget, ratio)
            elif problem == "bidding":
                ub, lb = B.bidding_upper_bound(budget), B.bidding_lower_bound(budget)
            else:
                kb = B.knapsack_bounds(budget, ratio)
                ub, lb = kb.upper_cr, kb.lower_cr
            row = {"problem": problem, "k": k, "tau": str(tau), "H": budget.H,
                   "UB": ub, "LB": lb, "log_gap": mp.log(ub / lb) if mp.isfinite(ub) else mp.inf}
            if problem == "bidding":
                row["analytic"] = B.bidding_log_gap_estimate(k, tau)
            out.append(row)
    return out


# ---------------------------------------------------------------------------
# exhaustive verification
# ---------------------------------------------------------------------------


@dataclass
class VerifyLimits:
    k_values: tuple[int, ...] = tuple(range(0, 9))
    H_values: tuple[int, ...] = (0, 1)
    m_values: tuple[int, ...] | None = None
    n_values: tuple[int, ...] = tuple(range(1, 17))
    node_cap: int = 10_000_000

    def __post_init__(self) -> None:
        if self.node_cap <= 0:
            raise DomainError("node cap must be positive")


@dataclass
class VerificationReport:
    scope: str
    checked: int = 0
    nodes: int = 0
    complete: bool = True
    counterexamples: list[dict[str, Any]] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


class _NodeCapExceeded(Exception):
    pass


class _Counter:
    def __init__(self, cap: int):
        self.n = 0
        self.cap = cap

    def tick(self) -> None:
        self.n += 1
        if self.n > self.cap:
            raise _NodeCapExceeded


def _intervals_split(ivs: list[tuple[int, int, int]], t: int, answer: bool, H: int):
    """Independent consistency tracking for comparison answers on integer ranges."""
    out = []
    for lo, hi, l in ivs:  # inclusive ranges
        for plo, phi, inside in ((lo, min(hi, t), True), (max(lo, t + 1), hi, False)):
            if plo <= phi:
                nl = l + (0 if inside == answer else 1)
                if nl <= H:
                    out.append((plo, phi, nl))
    return out


def _leaf_consistent(ivs) -> list[int]:
    return [x for lo, hi, _ in ivs for x in range(lo, hi + 1)]


def _walk_comparisons(questioner, ivs, H, counter, path, on_leaf) -> None:
    counter.tick()
    if not ivs:
        return
    if questioner.finished:
        on_leaf(questioner, ivs, path)
        return
    q = questioner.next_query()
    for ans in (True, False):
        child = questioner.copy()
        child.observe(q, ans)
        _walk_comparisons(child, _intervals_split(ivs, q.threshold, ans, H), H,
                          counter, path + [(q.arg(), ans)], on_leaf)


def _verify_identify(limits: VerifyLimits, factory, report: VerificationReport, counter) -> None:
    for k in limits.k_values:
        for H in limits.H_values:
            if 2 * H > k:
                continue
            budget = QueryBudget(k, H)
            ms = limits.m_values or range(1, (1 << k) + 1)
            for m in ms:
                if not identify_feasible(m, budget):
                    continue
                report.checked += 1
                questioner = (factory or WeightingQuestioner)(m, budget)

                def leaf(qn, ivs, path, m=m, k=k, H=H):
                    out = qn.output()
                    wrong = [x for x in _leaf_consistent(ivs) if x != out]
                    if wrong:
                        report.counterexamples.append(
                            {"m": m, "k": k, "H": H, "output": out, "truths": wrong[:4],
                             "transcript": path})

                _walk_comparisons(questioner, [(0, m - 1, 0)], H, counter, [], leaf)


def _verify_min_cyclic(limits: VerifyLimits, factory, report: VerificationReport, counter) -> None:
    worst_gap = None
    for n in limits.n_values:
        for k in limits.k_values:
            for H in limits.H_values:
                if 2 * H > k:
                    continue
                budget = QueryBudget(k, H)
                bound = cyclic_rank_bound(n, budget)
                report.checked += 1
                questioner = (factory or BlockQuestioner)(n, budget)

                def leaf(qn, ivs, path, n=n, k=k, H=H, bound=bound):
                    nonlocal worst_gap
                    j = qn.output()
                    rank = max((j - x) % n for x in _leaf_consistent(ivs))
                    worst_gap = rank - bound if worst_gap is None else max(worst_gap, rank - bound)
                    if rank > bound:
                        report.counterexamples.append(
                            {"n": n, "k": k, "H": H, "output": j, "rank": rank, "bound": bound,
                             "transcript": path})

                _walk_comparisons(questioner, [(0, n - 1, 0)], H, counter, [], leaf)
    report.details["max_rank_minus_bound"] = worst_gap


def _segments_split(segs, a: Fraction, answer: bool, H: int):
    out = []
    for lo, hi, l in segs:
        for plo, phi, inside in ((lo, min(hi, a), True), (max(lo, a), hi, False)):
            if phi > plo:
                nl = l + (0 if inside == answer else 1)
                if nl <= H:
                    out.append((plo, phi, nl))
    return out


def _verify_continuous(limits: VerifyLimits, factory, report: VerificationReport, counter) -> None:
    hull_over = 0
    leaves = 0
    for k in limits.k_values:
        for H in limits.H_values:
            if 2 * H > k:
                continue
            budget = QueryBudget(k, H)
            target = Fraction(B.partial_binomial_sum(k, H), 1 << k)
            hull_cap = Fraction(B.partial_binomial_sum(k - H, H), 1 << (k - H))
            report.checked += 1

            def walk(qn, segs, depth, path, k=k, H=H, target=target, hull_cap=hull_cap):
                nonlocal hull_over, leaves
                counter.tick()
                expected = Fraction(B.partial_binomial_sum(k, H), 1 << depth)
                weight = sum(((hi - lo) * B.berlekamp_weight(k - depth, H - l)
                              for lo, hi, l in segs), Fraction(0))
                if weight != expected:
                    report.counterexamples.append(
                        {"k": k, "H": H, "depth": depth, "weight": str(weight),
                         "expected": str(expected), "transcript": path})
                    return
                if qn.finished:
                    leaves += 1
                    measure = sum((hi - lo for lo, hi, _ in segs), Fraction(0))
                    if measure != target or qn.measure() != measure:
                        report.counterexamples.append(
                            {"k": k, "H": H, "measure": str(measure), "expected": str(target),
                             "transcript": path})
                    if segs and segs[-1][1] - segs[0][0] > hull_cap:
                        hull_over += 1
                    return
                q = qn.next_query()
                a = Fraction(q.threshold)
                for ans in (True, False):
                    child = qn.copy()
                    child.observe(q, ans)
                    walk(child, _segments_split(segs, a, ans, H), depth + 1,
                         path + [(q.arg(), ans)])

            walk((factory or CWeightingQuestioner)(budget), [(Fraction(0), Fraction(1), 0)], 0, [])
    report.details["leaves"] = leaves
    report.details["leaves_with_hull_above_interval_bound"] = hull_over


def _verify_search(limits: VerifyLimits, factory, report: VerificationReport, counter) -> None:
    min_rank = None
    for n in limits.n_values:
        for k in limits.k_values:
            for H in limits.H_values:
                if 2 * H > k:
                    continue
                budget = QueryBudget(k, H)
                floor = search_rank_floor(n, budget)
                makers = [lambda: factory(n, budget)] if factory else search_questioners(n, budget)
                for make in makers:
                    counter.tick()
                    report.checked += 1
                    questioner = make()
                    adversary = adversary_search(n, budget)
                    e = play(questioner, adversary)
                    w = adversary.witness(e)
                    problems = []
                    if sorted(w.ranks) != list(range(n)) or w.ranks[w.argmin] != 0:
                        problems.append("witness is not a permutation with rank 0 at argmin")
                    if len(w.lie_positions) > H:
                        problems.append("witness contradicts more than H responses")
                    if w.output_rank < floor:
                        problems.append("output rank below floor")
                    min_rank = w.output_rank if min_rank is None else min(min_rank, w.output_rank)
                    if problems:
                        report.counterexamples.append(
                            {"n": n, "k": k, "H": H, "questioner": getattr(questioner, "name", "?"),
                             "output": e, "rank": w.output_rank, "floor": floor,
                             "issues": problems,
                             "transcript": adversary.transcript.to_dict()["entries"]})
    report.details["min_witnessed_rank"] = min_rank


_SCOPES = {
    "identify": _verify_identify,
    "continuous": _verify_continuous,
    "min_cyclic": _verify_min_cyclic,
    "search_adversary": _verify_search,
}


def verify_exhaustive(scope: str, limits: VerifyLimits | None = None,
                      questioner_factory: Callable[..., Any] | None = None) -> VerificationReport:
    """Traverse every response string (every responder strategy) for the scope's games
    and report each counterexample transcript."""
    if scope not in _SCOPES:
        raise DomainError(f"scope must be one of {', '.join(_SCOPES)}, got {scope!r}")
    limits = limits or VerifyLimits()
    report = VerificationReport(scope)
    counter = _Counter(limits.node_cap)
    try:
        _SCOPES[scope](limits, questioner_factory, report, counter)
    except _NodeCapExceeded:
        report.complete = False
    report.nodes = counter.n
    return report


class FixedThresholdQuestioner:
    """Always asks 'x <= 0?' and then guesses 0. Useful to check the verifier."""

    def __init__(self, m: int, budget: QueryBudget):
        self.remaining = budget.k
        self.m = m

    @property
    def finished(self) -> bool:
        return self.remaining == 0

    def next_query(self) -> ComparisonQuery:
        return ComparisonQuery(0)

    def observe(self, query: ComparisonQuery, answer: bool) -> None:
        self.remaining -= 1

    def output(self) -> int:
        return 0

    def copy(self) -> "FixedThresholdQuestioner":
        other = FixedThresholdQuestioner(self.m, QueryBudget(0))
        other.remaining = self.remaining
        return other
