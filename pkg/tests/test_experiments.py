import json

import numpy as np
import pytest

from sstraffic.errors import DomainError
from sstraffic.experiments import (
    DEFAULT_RATIO_GRID,
    ExperimentConfig,
    ExperimentTable,
    Scenario,
    StreamSpec,
    export_table,
    import_table,
    realize_ratio,
    run_experiment,
    run_multi_stream,
    run_pairwise,
    run_streams,
)
from sstraffic.hurst import Method


def small(scenario, **kw):
    kw.setdefault("replications", 6)
    kw.setdefault("length", 512)
    kw.setdefault("base_seed", 11)
    return ExperimentConfig(scenario, **kw)


class TestRealizeRatio:
    def test_examples(self):
        assert realize_ratio(1.2, 1.0) == (1.2, 1.2)
        assert realize_ratio(1.2, 0.5) == (1.2, 2.4)
        assert realize_ratio(1.2, 0.35)[1] == pytest.approx(3.4285714285714284, rel=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            realize_ratio(1.2, 0.0)


class TestConfig:
    def test_defaults(self):
        c = ExperimentConfig("self_plus_white")
        assert c.h_values == (0.8, 0.5)
        assert c.ratio_grid == DEFAULT_RATIO_GRID
        assert (c.base_cv, c.length, c.replications, c.estimator) == (1.2, 1000, 100, Method.DFA)
        assert ExperimentConfig("SELF_PLUS_SELF").h_values == (0.8, 0.6)
        assert ExperimentConfig(Scenario.MULTI_STREAM).h_values == (0.8, 0.6, 0.6, 0.6)

    @pytest.mark.parametrize("kw", [
        dict(scenario="multi_stream", h_values=(0.8, 0.6)),
        dict(scenario="self_plus_self", h_values=(0.8, 0.6, 0.6)),
        dict(scenario="self_plus_white", h_values=(0.8, 0.6)),
        dict(scenario="self_plus_white", ratio_grid=(2.5,)),
        dict(scenario="self_plus_white", ratio_grid=(0.0,)),
        dict(scenario="self_plus_white", replications=0),
        dict(scenario="self_plus_ar1", ar_phi=1.0),
        dict(scenario="bogus"),
    ])
    def test_invalid(self, kw):
        with pytest.raises((DomainError, ValueError)):
            ExperimentConfig(**kw)

    def test_dict_round_trip(self):
        c = small("multi_stream", h_values=(0.9, 0.6, 0.7), estimator="rs")
        assert ExperimentConfig.from_dict(json.loads(json.dumps(c.to_dict()))) == c

    def test_unknown_key(self):
        with pytest.raises(DomainError):
            ExperimentConfig.from_dict({"scenario": "self_plus_white", "nope": 1})


class TestRuns:
    def test_rows_sorted_and_counted(self):
        t = run_pairwise(small("self_plus_white", ratio_grid=(0.5, 1.0, 0.85)))
        assert [r.ratio for r in t.rows] == [1.0, 0.85, 0.5]
        assert all(r.reps == 6 and r.failed == 0 and not r.flagged for r in t.rows)
        assert all(len(r.mean_h) == 2 and len(r.mean_cv) == 2 for r in t.rows)

    def test_deterministic(self):
        cfg = small("self_plus_ar1")
        assert export_table(run_pairwise(cfg), "json") == export_table(run_pairwise(cfg), "json")

    def test_seed_changes_output(self):
        a = run_pairwise(small("self_plus_white", base_seed=1))
        b = run_pairwise(small("self_plus_white", base_seed=2))
        assert a.rows != b.rows

    def test_parallel_matches_serial(self):
        cfg = small("self_plus_self", ratio_grid=(1.0, 0.5), replications=4)
        assert run_pairwise(cfg, workers=2) == run_pairwise(cfg, workers=1)

    def test_two_stream_multi_reduces_to_pairwise(self):
        cfg = small("self_plus_self", h_values=(0.8, 0.6))
        multi = run_streams([StreamSpec("fgn", 0.8), StreamSpec("fgn", 0.6)], cfg)
        assert multi == run_pairwise(cfg)

    def test_multi_stream_shape(self):
        t = run_multi_stream(small("multi_stream", ratio_grid=(1.0,)))
        assert len(t.rows[0].mean_h) == 4
        assert run_experiment(small("multi_stream", ratio_grid=(1.0,))) == t

    def test_dispatch_guards(self):
        with pytest.raises(DomainError):
            run_pairwise(small("multi_stream"))
        with pytest.raises(DomainError):
            run_multi_stream(small("self_plus_white"))

    def test_tied_maximum_rejected(self):
        with pytest.raises(DomainError):
            run_streams([StreamSpec("fgn", 0.7), StreamSpec("fgn", 0.7)], small("self_plus_self"))

    def test_failed_replications_flag_row(self):
        # 20 samples cannot carry 4 scales >= 8: every replication fails
        t = run_pairwise(small("self_plus_white", length=20, ratio_grid=(1.0,)))
        row = t.rows[0]
        assert (row.reps, row.failed, row.flagged) == (0, 6, True)

    def test_max_h_stream_keeps_base_cv(self):
        cfg = small("self_plus_self", h_values=(0.6, 0.8), ratio_grid=(0.5,), length=2**14, replications=4)
        row = run_pairwise(cfg).rows[0]
        # stream 2 has the larger H so it keeps cv 1.2; stream 1 gets 2.4
        assert row.mean_cv[1] < row.mean_cv[0]
        assert row.mean_achieved_ratio == pytest.approx(0.5, rel=0.25)


class TestExport:
    def test_csv_header_only_for_empty_grid(self):
        t = ExperimentTable(small("self_plus_white", ratio_grid=()), ())
        assert export_table(t, "csv") == b"ratio,mean_h_1,mean_h_2,mean_h_total,sd_h_total,reps\n"

    def test_csv_rows(self):
        t = run_pairwise(small("self_plus_white", replications=3))
        lines = export_table(t).decode().splitlines()
        assert len(lines) == 6
        assert [float(l.split(",")[0]) for l in lines[1:]] == list(DEFAULT_RATIO_GRID)
        for line in lines[1:]:
            cells = line.split(",")
            assert len(cells) == 6 and cells[-1] == "3"
            for c in cells[1:-1]:
                assert len(c.replace("-", "").replace(".", "").lstrip("0")) <= 6

    def test_multi_header(self):
        t = ExperimentTable(small("multi_stream", ratio_grid=()), ())
        assert export_table(t).decode().startswith("ratio,mean_h_1,mean_h_2,mean_h_3,mean_h_4,mean_h_total,")

    def test_json_round_trip(self):
        t = run_pairwise(small("self_plus_ar1", replications=3))
        assert import_table(export_table(t, "json")) == t

    def test_unknown_format(self):
        with pytest.raises(DomainError):
            export_table(ExperimentTable(small("self_plus_white"), ()), "xml")


@pytest.fixture(scope="module")
def white():
    return run_pairwise(ExperimentConfig("self_plus_white", base_seed=0))


@pytest.fixture(scope="module")
def selfsim():
    return run_pairwise(ExperimentConfig("self_plus_self", base_seed=0))


@pytest.mark.slow
class TestCampaignInvariants:
    def test_monotone_white(self, white):
        h = [r.mean_h_total for r in white.rows]
        assert all(a >= b for a, b in zip(h, h[1:]))

    def test_monotone_self(self, selfsim):
        h = [r.mean_h_total for r in selfsim.rows]
        assert all(a >= b for a, b in zip(h, h[1:]))

    def test_floor_self(self, selfsim):
        assert all(r.mean_h_total >= 0.6 - 0.05 for r in selfsim.rows)

    def test_component_estimates_track_targets(self, selfsim):
        for r in selfsim.rows:
            assert r.mean_h[0] > r.mean_h[1]


_SMALL_SAMPLE_CV = pytest.mark.xfail(
    strict=True,
    reason="sample CV of a lognormal with cv ~3.4 is biased low at finite N, inflating achieved R1",
)


@pytest.fixture(scope="module")
def white_long():
    return run_pairwise(ExperimentConfig("self_plus_white", length=2**14, base_seed=0))


@pytest.mark.slow
@pytest.mark.parametrize(
    "which,tol,ratio",
    [("white", 0.10, r) for r in DEFAULT_RATIO_GRID[:-1]]
    + [pytest.param("white", 0.10, 0.35, marks=_SMALL_SAMPLE_CV)]
    + [("white_long", 0.03, r) for r in DEFAULT_RATIO_GRID[:-1]]
    + [pytest.param("white_long", 0.03, 0.35, marks=_SMALL_SAMPLE_CV)],
)
def test_achieved_ratio_fidelity(request, which, tol, ratio):
    table = request.getfixturevalue(which)
    row = next(r for r in table.rows if r.ratio == ratio)
    assert row.mean_achieved_ratio == pytest.approx(ratio, rel=tol)
