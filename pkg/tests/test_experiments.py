import math

import numpy as np
import pytest

from specbm.errors import MissingCell
from specbm.experiments import (
    CSV_HEADER,
    ExperimentConfig,
    ExperimentRecord,
    load_model_file,
    read_records,
    run_experiment,
    run_replication,
    summarize_records,
    table_rows,
    with_tau_mode,
    write_records,
)


def make_record(**kw):
    base = dict(
        rep=0, dgp="1", n=40, K=2, variant="tau", algo="modified",
        tau=1.5, ccp=0.9, nmi=0.8, excluded=0, runtime_ms=0.0, tau_mode="fixed",
    )
    base.update(kw)
    return ExperimentRecord(**base)


def small_config(**kw):
    base = dict(
        dgp=1, n_per_community=20, reps=2, seed=7,
        variants=("tau",), algo="modified", tau_mode="fixed", tau_value=1.0,
        restarts=3,
    )
    base.update(kw)
    return ExperimentConfig(**base)


class TestConfigValidation:
    def test_valid(self):
        small_config()

    @pytest.mark.parametrize("kw", [
        dict(reps=0),
        dict(dgp=5),
        dict(variants=("tau", "bogus")),
        dict(algo="bogus"),
        dict(tau_mode="bogus"),
        dict(tau_mode="fixed", tau_value=None),
        dict(tau_mode="fixed", tau_value=0.0),
        dict(workers=0),
    ])
    def test_rejected(self, kw):
        with pytest.raises(ValueError):
            small_config(**kw)


class TestModelFile:
    def test_parse(self, tmp_path):
        path = tmp_path / "model.txt"
        path.write_text(
            "# custom design\n"
            "\n"
            "K=2\n"
            "sizes=2,2\n"
            "B=0.5,0.1;0.1,0.4\n"
            "theta=0.5,1.5,1.0,1.0\n"
        )
        model, mem = load_model_file(str(path))
        assert model.K == 2
        assert list(model.sizes) == [2, 2]
        assert np.allclose(model.B, [[0.5, 0.1], [0.1, 0.4]])
        assert np.allclose(model.theta, [0.5, 1.5, 1.0, 1.0])
        assert np.array_equal(mem.labels, [1, 1, 2, 2])

    def test_no_theta(self, tmp_path):
        path = tmp_path / "model.txt"
        path.write_text("K=1\nsizes=3\nB=0.9\n")
        model, _ = load_model_file(str(path))
        assert model.theta is None

    def test_missing_key(self, tmp_path):
        path = tmp_path / "model.txt"
        path.write_text("K=2\nB=0.5,0.1;0.1,0.4\n")
        with pytest.raises(ValueError, match="sizes"):
            load_model_file(str(path))

    def test_bad_line(self, tmp_path):
        path = tmp_path / "model.txt"
        path.write_text("K=2\nsizes=2,2\nB=0.5,0.1;0.1,0.4\nnot a pair\n")
        with pytest.raises(ValueError, match="key=value"):
            load_model_file(str(path))


class TestRunReplication:
    def test_fixed_tau_record_fields(self):
        records = run_replication(small_config(), 0)
        assert len(records) == 1
        r = records[0]
        assert r.rep == 0
        assert r.dgp == "1"
        assert r.n == 40
        assert r.K == 2
        assert r.variant == "tau"
        assert r.tau == 1.0
        assert 0.0 <= r.ccp <= 1.0
        assert 0.0 <= r.nmi <= 1.0
        assert r.excluded == 0
        assert r.runtime_ms == 0.0
        assert r.tau_mode == "fixed"

    def test_grid_scan_emits_full_grid(self):
        records = run_replication(small_config(tau_mode="grid_scan",
                                                tau_value=None), 0)
        assert len(records) == 20
        taus = [r.tau for r in records]
        assert taus[0] == pytest.approx(1e-4)
        assert taus[1] == pytest.approx(1.0)
        assert all(t2 > t1 for t1, t2 in zip(taus[1:], taus[2:]))

    def test_jy_select_tau_in_grid(self):
        records = run_replication(small_config(tau_mode="jy_select",
                                               tau_value=None), 0)
        assert len(records) == 1
        assert records[0].tau > 0

    def test_dbar_modes(self):
        r_full = run_replication(small_config(tau_mode="dbar", tau_value=None), 0)[0]
        r_quarter = run_replication(small_config(tau_mode="dbar_over_4",
                                                 tau_value=None), 0)[0]
        assert r_quarter.tau == pytest.approx(r_full.tau / 4.0)

    def test_multi_variant_order(self):
        records = run_replication(
            small_config(variants=("tau", "tau_prime", "adaptive"),
                         tau_mode="jy_select", tau_value=None), 0)
        assert [r.variant for r in records] == ["tau", "tau_prime", "adaptive"]

    def test_timing_flag(self):
        r = run_replication(small_config(timing=True), 0)[0]
        assert r.runtime_ms > 0.0

    def test_custom_model_file(self, tmp_path):
        path = tmp_path / "model.txt"
        path.write_text("K=2\nsizes=10,10\nB=0.9,0.05;0.05,0.9\n")
        records = run_replication(small_config(dgp=str(path)), 0)
        assert records[0].n == 20
        assert records[0].ccp == 1.0

    def test_excluded_plain_on_isolated_nodes(self, tmp_path):
        # community 2 has no incident edge probabilities at all, so the
        # plain Laplacian is undefined and the record is excluded
        path = tmp_path / "model.txt"
        path.write_text("K=2\nsizes=4,3\nB=1.0,0.0;0.0,0.0\n")
        records = run_replication(
            small_config(dgp=str(path), variants=("plain",)), 0)
        r = records[0]
        assert r.excluded == 1
        assert r.tau == 0.0
        assert math.isnan(r.ccp)
        assert math.isnan(r.nmi)


class TestRunExperiment:
    def test_rep_order(self):
        records = run_experiment(small_config(reps=3))
        assert [r.rep for r in records] == [0, 1, 2]

    def test_deterministic(self):
        a = run_experiment(small_config(reps=3))
        b = run_experiment(small_config(reps=3))
        assert a == b

    def test_workers_do_not_change_results(self, tmp_path):
        cfg1 = small_config(reps=4, tau_mode="jy_select", tau_value=None)
        cfg2 = small_config(reps=4, tau_mode="jy_select", tau_value=None,
                            workers=2)
        p1 = tmp_path / "w1.csv"
        p2 = tmp_path / "w2.csv"
        write_records(run_experiment(cfg1), str(p1))
        write_records(run_experiment(cfg2), str(p2))
        assert p1.read_bytes() == p2.read_bytes()


class TestCsv:
    def test_round_trip(self, tmp_path):
        records = [
            make_record(rep=0),
            make_record(rep=1, tau=float("nan"), ccp=float("nan"),
                        nmi=float("nan"), excluded=1),
        ]
        path = tmp_path / "out.csv"
        write_records(records, str(path))
        text = path.read_text()
        lines = text.strip().splitlines()
        assert lines[0] == CSV_HEADER
        assert lines[2] == "1,1,40,2,tau,modified,,,,1,0.0"
        back = read_records(str(path))
        assert len(back) == 2
        assert back[0].ccp == 0.9
        assert math.isnan(back[1].ccp)
        assert back[1].excluded == 1
        assert back[0].tau_mode == ""

    def test_write_is_stable(self, tmp_path):
        records = run_experiment(small_config(reps=2))
        p1 = tmp_path / "a.csv"
        p2 = tmp_path / "b.csv"
        write_records(records, str(p1))
        write_records(records, str(p2))
        assert p1.read_bytes() == p2.read_bytes()

    def test_full_precision(self, tmp_path):
        r = make_record(ccp=1.0 / 3.0, nmi=2.0 / 7.0, tau=math.pi)
        path = tmp_path / "out.csv"
        write_records([r], str(path))
        back = read_records(str(path))[0]
        assert back.ccp == r.ccp
        assert back.nmi == r.nmi
        assert back.tau == r.tau

    def test_rejects_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("rep,dgp\n")
        with pytest.raises(ValueError, match="header"):
            read_records(str(path))

    def test_rejects_bad_field_count(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(CSV_HEADER + "\n0,1,40\n")
        with pytest.raises(ValueError, match="fields"):
            read_records(str(path))


class TestSummaries:
    def test_means_over_included(self):
        records = [
            make_record(rep=0, ccp=0.8, nmi=0.6, tau=1.0),
            make_record(rep=1, ccp=1.0, nmi=0.8, tau=3.0),
            make_record(rep=2, ccp=float("nan"), nmi=float("nan"),
                        tau=float("nan"), excluded=1),
        ]
        rows = summarize_records(records)
        assert len(rows) == 1
        row = rows[0]
        assert row["records"] == 3
        assert row["included"] == 2
        assert row["ratio_included"] == pytest.approx(2.0 / 3.0)
        assert row["mean_ccp"] == pytest.approx(0.9)
        assert row["mean_nmi"] == pytest.approx(0.7)
        assert row["mean_tau"] == pytest.approx(2.0)

    def test_all_excluded_cell(self):
        records = [make_record(ccp=float("nan"), nmi=float("nan"),
                               excluded=1)]
        row = summarize_records(records)[0]
        assert row["included"] == 0
        assert math.isnan(row["mean_ccp"])

    def test_groups_by_variant(self):
        records = [make_record(variant="tau"), make_record(variant="tau_prime")]
        rows = summarize_records(records)
        assert sorted(r["variant"] for r in rows) == ["tau", "tau_prime"]

    def test_table_rows(self):
        by_mode = {
            "dbar": [make_record(ccp=0.9, nmi=0.8)],
            "jy": [make_record(ccp=0.95, nmi=0.85)],
        }
        rows = table_rows(by_mode)
        assert len(rows) == 1
        assert rows[0]["dgp"] == "1"
        assert rows[0]["n"] == 40
        assert rows[0]["dbar_ccp"] == pytest.approx(0.9)
        assert rows[0]["jy_ccp"] == pytest.approx(0.95)
        assert rows[0]["jy_nmi"] == pytest.approx(0.85)

    def test_table_rows_missing_cell(self):
        by_mode = {
            "dbar": [make_record(dgp="1", n=40)],
            "jy": [make_record(dgp="2", n=40)],
        }
        with pytest.raises(MissingCell):
            table_rows(by_mode)

    def test_with_tau_mode(self):
        records = [make_record(tau_mode="")]
        out = with_tau_mode(records, "jy_select")
        assert out[0].tau_mode == "jy_select"
        assert records[0].tau_mode == ""
