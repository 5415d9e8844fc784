from __future__ import annotations

import json
from fractions import Fraction

import pytest

from imperfect_advice import harness
from imperfect_advice.errors import DomainError


def config(**kw):
    base = {"problem": "ts", "k": [2], "H": [0]}
    base.update(kw)
    return harness.ExperimentConfig.from_dict(base)


class TestConfig:
    def test_defaults(self):
        cfg = config()
        assert cfg.k == (2,) and cfg.error_policy == "none" and cfg.workers == 1

    @pytest.mark.parametrize("bad", [
        {"problem": "chess"},
        {"k": [3], "H": [2]},
        {"k": [-1]},
        {"k": "two"},
        {"colour": "red"},
        {"error_policy": "sometimes"},
        {"M": "0.5"},
        {"problem": "fpb", "p": 2, "phi": 2},
        {"problem": "ts_robust", "rho": "0.4"},
        {"problem": "bidding_robust", "r": "3"},
        {"grid_points": True},
        {"workers": 0},
    ])
    def test_rejects(self, bad):
        with pytest.raises(DomainError):
            config(**bad)

    def test_missing_problem(self):
        with pytest.raises(DomainError, match="problem"):
            harness.ExperimentConfig.from_dict({"k": [2]})

    def test_load_reports_position(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"problem": "ts",\n "k": [2,]}')
        with pytest.raises(DomainError, match="line 2"):
            harness.ExperimentConfig.load(path)

    def test_load_overrides(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"problem": "ts", "k": [2], "H": [0]}))
        cfg = harness.ExperimentConfig.load(path, {"seed": 5, "csv": None})
        assert cfg.seed == 5 and cfg.csv is None


class TestRun:
    def test_ts_rows(self):
        rows = harness.run_experiment(config(k=[4], H=[1], error_policy="greedy", random_instances=5))
        assert len(rows) == 5 + 5
        assert all(r.within_bound for r in rows)
        assert harness.summarize(rows).violations == 0

    def test_bidding_rows(self):
        rows = harness.run_experiment(config(problem="bidding", k=[2], H=[0, 1], grid_points=50))
        assert len(rows) == 100
        assert all(r.within_bound and r.bound_lower <= r.bound_upper for r in rows)

    def test_fpb_rows(self):
        rows = harness.run_experiment(config(problem="fpb", k=[0], p=2, phi=1, grid_points=40))
        assert all(r.within_bound for r in rows)

    def test_knapsack_rows(self):
        rows = harness.run_experiment(
            config(problem="knapsack", k=[6], H=[1], epsilon="1/100", random_instances=5))
        assert rows and all(r.within_bound for r in rows)

    def test_robust_rows_switch_bound_when_error_exceeds_tolerance(self):
        rows = harness.run_experiment(
            config(problem="bidding_robust", k=[3], H=[1], r="5", grid_points=60,
                   error_policy="fixed:[0,1,2]"))
        assert all(r.eta_realized == 3 and r.bound_upper == 5 for r in rows)
        assert harness.summarize(rows).violations == 0

    def test_replay(self):
        cfg = config(k=[4], H=[1], random_instances=3, seed=4)
        rows = harness.run_experiment(cfg)
        again = harness.replay_row(cfg, 4, 1, rows[-1].instance_id)
        assert again == rows[-1]
        with pytest.raises(DomainError):
            harness.replay_row(cfg, 4, 1, "nope")

    def test_seed_changes_random_instances(self):
        a = harness.rows_to_csv(harness.run_experiment(config(random_instances=5, seed=1)))
        b = harness.rows_to_csv(harness.run_experiment(config(random_instances=5, seed=2)))
        assert a != b


class TestOutputs:
    def test_csv_shape(self):
        rows = harness.run_experiment(config())
        text = harness.rows_to_csv(rows)
        lines = text.split("\r\n")
        assert lines[0] == ",".join(harness.COLUMNS)
        assert lines[1].split(",")[7] in ("true", "false")

    def test_jsonl(self, tmp_path):
        cfg = config(csv=str(tmp_path / "a.csv"), jsonl=str(tmp_path / "a.jsonl"))
        rows = harness.run_experiment(cfg)
        harness.write_outputs(cfg, rows)
        records = [json.loads(l) for l in (tmp_path / "a.jsonl").read_text().splitlines()]
        assert [r["instance_id"] for r in records] == [r.instance_id for r in rows]
        assert (tmp_path / "a.csv").read_bytes() == harness.rows_to_csv(rows).encode()

    def test_summary(self):
        assert harness.summarize([]).as_dict() == {"count": 0, "sup_ratio": None, "violations": 0}


class TestGaps:
    def test_tolerance_rounding(self):
        assert harness.tolerance_for(8, Fraction(1, 4)) == 2
        assert harness.tolerance_for(10, Fraction(1, 4)) == 3
        assert harness.tolerance_for(16, Fraction(2, 5)) == 6

    def test_tau_zero(self):
        for row in harness.gap_table("ts", [0], [4, 8]):
            assert row["UB"] == row["LB"] and row["log_gap"] == 0

    def test_rejects(self):
        with pytest.raises(DomainError):
            harness.gap_table("fpb", [Fraction(1, 4)], [8])
        with pytest.raises(DomainError):
            harness.gap_table("ts", [Fraction(1, 2)], [8])


class TestVerify:
    def test_scope_domain(self):
        with pytest.raises(DomainError):
            harness.verify_exhaustive("everything")

    def test_node_cap_domain(self):
        with pytest.raises(DomainError):
            harness.VerifyLimits(node_cap=0)

    def test_node_cap_truncates(self):
        rep = harness.verify_exhaustive("identify", harness.VerifyLimits((6,), (1,), None, (1,), 50))
        assert not rep.complete and rep.nodes <= 51

    def test_broken_questioner_is_caught(self):
        limits = harness.VerifyLimits((3, 4), (0, 1), None, (1,), 10**6)
        rep = harness.verify_exhaustive("identify", limits, harness.FixedThresholdQuestioner)
        assert rep.counterexamples
        assert {"m", "k", "H", "output", "transcript"} <= set(rep.counterexamples[0])

    def test_small_scopes_clean(self):
        limits = harness.VerifyLimits(tuple(range(0, 7)), (0, 1), None, tuple(range(1, 9)), 10**7)
        for scope in ("identify", "continuous", "min_cyclic"):
            rep = harness.verify_exhaustive(scope, limits)
            assert rep.complete and rep.counterexamples == [], scope

    def test_report_dict(self):
        rep = harness.verify_exhaustive("min_cyclic", harness.VerifyLimits((2,), (0,), None, (4,), 100))
        d = rep.as_dict()
        assert d["scope"] == "min_cyclic" and d["counterexamples"] == []
