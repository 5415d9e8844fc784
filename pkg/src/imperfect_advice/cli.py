"""Command-line interface: bounds, play, simulate, verify, gaps."""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from fractions import Fraction
from typing import Any, Sequence

from . import bounds as B
from . import harness
from .advice import AdviceOracle
from .bounds import QueryBudget, mp
from .errors import DomainError
from .games import adversaries, solvers
from .games.core import play
from .games.search import WeightingSearch

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # keep argparse's exit code, route through main
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _plain(v: Any) -> Any:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, mp.mpf):
        return mp.nstr(v, 17) if mp.isfinite(v) else "inf"
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    return v


def emit(records: list[dict[str, Any]], fmt: str, out=None) -> None:
    out = out or sys.stdout
    records = [_plain(r) for r in records]
    if fmt == "json":
        out.write(json.dumps(records if len(records) != 1 else records[0], indent=2) + "\n")
        return
    cols: list[str] = []
    for r in records:
        cols += [c for c in r if c not in cols]
    cell = lambda v: json.dumps(v) if isinstance(v, (list, dict)) else ("" if v is None else str(v))
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(cols)
        for r in records:
            w.writerow([cell(r.get(c)) for c in cols])
        out.write(buf.getvalue())
        return
    rows = [[cell(r.get(c)) for c in cols] for r in records]
    widths = [max([len(c)] + [len(row[i]) for row in rows]) for i, c in enumerate(cols)]
    out.write("  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip() + "\n")
    for row in rows:
        out.write("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() + "\n")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _budget(args) -> QueryBudget:
    return QueryBudget(args.k, args.H)


def _report(name: str, value: Any, **inputs: Any) -> dict[str, Any]:
    return B.BoundReport(name, value, inputs).as_dict()


def cmd_bounds(args) -> list[dict[str, Any]]:
    p = args.problem
    if p == "fpb":
        return [_report("fpb_lower", B.fpb_lower_bound(args.p, args.phi, Fraction(args.alpha)),
                        p=args.p, phi=args.phi, alpha=args.alpha)]
    if p == "augmentation":
        l = B.resource_augmentation_size(args.k, Fraction(args.c))
        return [_report("advice_size", l, k=args.k, c=args.c)]
    budget = _budget(args)
    k, H = budget.k, budget.H
    if p == "mu":
        lo, hi = B.mu_bounds(budget)
        return [_report("mu_lower", lo, k=k, H=H), _report("mu_upper", hi, k=k, H=H)]
    if p == "ts":
        U, L = B.ts_grid_size(budget), B.ts_lower_count(budget)
        up, low = B.ts_bounds(budget, Fraction(args.ratio))
        return [_report("upper_cr", up, k=k, H=H, U=U, M_over_m=args.ratio),
                _report("lower_cr", low, k=k, H=H, L=L, M_over_m=args.ratio)]
    if p == "ts_robust":
        up, low = B.robust_ts_bounds(budget, Fraction(args.ratio), Fraction(args.rho))
        return [_report("upper_cr", up, k=k, H=H, M_over_m=args.ratio, rho=args.rho),
                _report("lower_cr", low, k=k, H=H, M_over_m=args.ratio, rho=args.rho)]
    if p == "bidding":
        U = B.bidding_rank_bound(budget)
        return [_report("upper_cr", B.bidding_upper_bound(budget), k=k, H=H, U=U,
                        b=B.bidding_optimal_base(budget)),
                _report("lower_cr", B.bidding_lower_bound(budget), k=k, H=H,
                        L=Fraction(1 << k, B.partial_binomial_sum(k, H)))]
    if p == "bidding_robust":
        up, low = B.robust_bidding_bounds(budget, Fraction(args.r))
        return [_report("upper_cr", up, k=k, H=H, r=args.r,
                        b=B.robust_bidding_base(budget, Fraction(args.r))),
                _report("lower_cr", low, k=k, H=H, r=args.r)]
    if p == "knapsack":
        kb = B.knapsack_bounds(budget, Fraction(args.ratio))
        return [_report("upper_cr", kb.upper_cr, k=k, H=H, U_over_L=args.ratio,
                        sm=kb.upper_sm, no_advice=kb.no_advice),
                _report("lower_cr", kb.lower_cr, k=k, H=H, U_over_L=args.ratio, sm=kb.lower_sm)]
    raise DomainError(f"unknown problem {p!r}")


def cmd_play(args) -> list[dict[str, Any]]:
    budget = _budget(args)
    rng = random.Random(args.seed)
    game = args.game
    if game == "search":
        adv = adversaries.adversary_search(args.n, budget)
        e = play(WeightingSearch(args.n, budget), adv)
        w = adv.witness(e)
        return [{"game": game, "output": e, "witness_ranks": list(w.ranks),
                 "witness_rank_of_output": w.output_rank, "rank_floor": adv.guarantee(),
                 "transcript": adv.transcript.to_dict()}]
    if game == "continuous":
        if args.oracle == "adversary":
            oracle = adversaries.adversary_continuous(budget)
            res = solvers.continuous_search(budget, oracle)
            truth = oracle.finalize()
        else:
            truth = Fraction(args.x) if args.x is not None else Fraction(rng.randint(1, 10**6), 10**6)
            if not 0 < truth <= 1:
                raise DomainError("the hidden point must lie in (0, 1]")
            oracle = AdviceOracle(truth, budget, args.oracle)
            res = solvers.continuous_search(budget, oracle)
        return [{"game": game, "truth": truth, "interval": list(res.interval or ()),
                 "consistent_measure": res.consistent_measure,
                 "transcript": oracle.transcript.to_dict()}]
    if args.oracle == "adversary":
        raise DomainError("the 'adversary' responder is available for continuous play only")
    if game in ("identify", "find"):
        lo = 0 if game == "identify" else 1
        if game == "identify" and not solvers.identify_feasible(args.m, budget):
            raise DomainError(f"budget insufficient: 2^(k-H) < m <<k-H, H>> for m={args.m}")
        x = args.x if args.x is not None else rng.randint(lo, lo + args.m - 1)
        oracle = AdviceOracle(int(x), budget, args.oracle)
        out = (solvers.identify if game == "identify" else solvers.find)(args.m, budget, oracle)
        extra = {"m": args.m}
    elif game == "min_cyclic":
        x = args.x if args.x is not None else rng.randrange(args.n)
        oracle = AdviceOracle(int(x), budget, args.oracle)
        out = solvers.min_cyclic(args.n, budget, oracle)
        extra = {"n": args.n, "rank": solvers.cyclic_rank(out, int(x), args.n),
                 "rank_bound": solvers.cyclic_rank_bound(args.n, budget)}
    else:
        raise DomainError(f"unknown game {game!r}")
    rep = oracle.report()
    return [{"game": game, "truth": int(x), "output": out, "success": out == int(x), **extra,
             "eta": rep.eta, "exceeded_tolerance": rep.exceeded_tolerance,
             "transcript": oracle.transcript.to_dict()}]


def cmd_simulate(args) -> list[dict[str, Any]]:
    overrides = {"seed": args.seed, "csv": args.csv, "jsonl": args.jsonl, "workers": args.workers}
    cfg = harness.ExperimentConfig.load(args.config, overrides)
    rows = harness.run_experiment(cfg)
    harness.write_outputs(cfg, rows)
    s = harness.summarize(rows)
    return [{"problem": cfg.problem, **s.as_dict()}]


def _int_csv(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise DomainError(f"expected comma-separated integers, got {text!r}") from exc


def cmd_verify(args) -> list[dict[str, Any]]:
    if args.node_cap <= 0:
        raise DomainError("--node-cap must be positive")
    ks = (args.k,) if args.k is not None else tuple(range(0, args.max_k + 1))
    Hs = (args.H,) if args.H is not None else tuple(range(0, args.max_H + 1))
    ns = (args.n,) if args.n is not None else tuple(range(1, args.max_n + 1))
    ms = tuple(range(1, args.max_m + 1)) if args.max_m else None
    limits = harness.VerifyLimits(ks, Hs, ms, ns, args.node_cap)
    r = harness.verify_exhaustive(args.scope, limits)
    status = f"{len(r.counterexamples)} counterexamples"
    rec = {"scope": r.scope, "status": status, "checked": r.checked, "nodes": r.nodes,
           "complete": r.complete, **r.details}
    if args.show_counterexamples:
        rec["counterexamples"] = r.counterexamples
    return [rec]


def cmd_gaps(args) -> list[dict[str, Any]]:
    taus = [Fraction(t) for t in args.tau.split(",")]
    return harness.gap_table(args.problem, taus, _int_csv(args.k), Fraction(args.ratio))


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("json", "csv", "table"), default="json")

    parser = _Parser(prog="imperfect-advice", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    pb = sub.add_parser("bounds", parents=[fmt], help="evaluate bound formulas")
    pb.add_argument("problem", choices=("mu", "ts", "ts_robust", "bidding", "bidding_robust",
                                        "fpb", "knapsack", "augmentation"))
    pb.add_argument("--k", type=int, default=0)
    pb.add_argument("--H", type=int, default=0)
    pb.add_argument("--ratio", default="100", help="M/m for ts, U/L for knapsack")
    pb.add_argument("--rho", default="1")
    pb.add_argument("--r", default="8")
    pb.add_argument("--p", type=int, default=1)
    pb.add_argument("--phi", type=int, default=0)
    pb.add_argument("--alpha", default="2")
    pb.add_argument("--c", default="1/10")
    pb.set_defaults(func=cmd_bounds)

    pp = sub.add_parser("play", parents=[fmt], help="run one scripted game session")
    pp.add_argument("game", choices=("identify", "find", "continuous", "min_cyclic", "search"))
    pp.add_argument("--m", type=int, default=2)
    pp.add_argument("--n", type=int, default=16)
    pp.add_argument("--k", type=int, default=0)
    pp.add_argument("--H", type=int, default=0)
    pp.add_argument("--x", default=None, help="hidden value (random from --seed if omitted)")
    pp.add_argument("--oracle", default="none",
                    help="none | fixed:[i,...] | random:eta=E,seed=S | greedy | minimax | adversary")
    pp.add_argument("--seed", type=int, default=0)
    pp.set_defaults(func=cmd_play)

    ps = sub.add_parser("simulate", parents=[fmt], help="run an experiment config")
    ps.add_argument("config")
    ps.add_argument("--seed", type=int, default=None)
    ps.add_argument("--csv", default=None)
    ps.add_argument("--jsonl", default=None)
    ps.add_argument("--workers", type=int, default=None)
    ps.set_defaults(func=cmd_simulate)

    pv = sub.add_parser("verify", parents=[fmt], help="exhaustive game-tree verification")
    pv.add_argument("scope", choices=("identify", "continuous", "min_cyclic", "search_adversary"))
    pv.add_argument("--max-k", type=int, default=6)
    pv.add_argument("--max-H", type=int, default=1)
    pv.add_argument("--max-n", type=int, default=16)
    pv.add_argument("--max-m", type=int, default=0)
    pv.add_argument("--k", type=int, default=None)
    pv.add_argument("--H", type=int, default=None)
    pv.add_argument("--n", type=int, default=None)
    pv.add_argument("--node-cap", type=int, default=10_000_000)
    pv.add_argument("--show-counterexamples", action="store_true")
    pv.set_defaults(func=cmd_verify)

    pg = sub.add_parser("gaps", parents=[fmt], help="upper/lower bound gap table")
    pg.add_argument("problem", choices=("ts", "bidding", "knapsack"))
    pg.add_argument("--tau", default="1/4")
    pg.add_argument("--k", default="8,16,32,64")
    pg.add_argument("--ratio", default="100")
    pg.set_defaults(func=cmd_gaps)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        records = args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ValueError, ZeroDivisionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    emit(records, args.format)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
