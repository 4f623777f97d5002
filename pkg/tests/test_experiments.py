import numpy as np
import pytest

from hmmreduce import (
    InputError,
    ReductionConfig,
    ShapeError,
    Step1Config,
    Step2Config,
    compare_step2_versions,
    run_batch,
    variability_index,
    write_divergence_decay_csv,
    write_final_divergence_csv,
    write_table_csv,
    write_variability_csv,
)
import hmmreduce.experiments as experiments


def small_config(**kw):
    defaults = dict(target_size=2, half_length=5,
                    step1=Step1Config(max_iterations=200),
                    step2=Step2Config(max_iterations=200))
    defaults.update(kw)
    return ReductionConfig(**defaults)


class TestVariabilityIndex:
    def test_identical_matrices(self, rng):
        M = rng.random((2, 4))
        assert variability_index([M, M.copy(), M.copy()]) == \
            pytest.approx(0.0, abs=1e-30)

    def test_two_scalars(self):
        # (0-1)^2 + (2-1)^2 over T-1 = 1
        assert variability_index([np.array([[0.0]]), np.array([[2.0]])]) == \
            pytest.approx(2.0, abs=1e-15)

    def test_sums_entry_variances(self, rng):
        ms = [rng.random((3, 3)) for _ in range(5)]
        expected = sum(
            np.var([M[i, j] for M in ms], ddof=1)
            for i in range(3) for j in range(3))
        assert variability_index(ms) == pytest.approx(expected, rel=1e-12)

    def test_too_few(self):
        with pytest.raises(InputError):
            variability_index([np.eye(2)])

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            variability_index([np.eye(2), np.eye(3)])


class TestRunBatch:
    def test_single_run_omits_r(self, model1):
        report = run_batch(model1, small_config(), runs=1, base_seed=0)
        assert len(report.rows) == 1
        assert report.R is None
        assert report.best_run == 0

    def test_rows_in_run_order_with_seeds(self, model1):
        report = run_batch(model1, small_config(), runs=3, base_seed=10)
        assert [r.run for r in report.rows] == [0, 1, 2]
        assert [r.seed for r in report.rows] == [10, 11, 12]
        assert report.R >= 0.0

    def test_best_run_minimizes_div_final(self, model1):
        report = run_batch(model1, small_config(), runs=4, base_seed=0)
        finals = [r.div_final for r in report.rows]
        assert report.best_run == int(np.argmin(finals))

    def test_deterministic_rerun(self, model1):
        a = run_batch(model1, small_config(), runs=3, base_seed=5)
        b = run_batch(model1, small_config(), runs=3, base_seed=5)
        for ra, rb in zip(a.rows, b.rows):
            assert ra.div_final == rb.div_final
            assert ra.div1 == rb.div1
        for res_a, res_b in zip(a.results, b.results):
            assert np.array_equal(res_a.m_concat, res_b.m_concat)

    def test_parallel_matches_serial(self, model1):
        serial = run_batch(model1, small_config(), runs=4, base_seed=0)
        threaded = run_batch(model1, small_config(), runs=4, base_seed=0,
                             workers=4)
        for res_s, res_t in zip(serial.results, threaded.results):
            assert np.array_equal(res_s.m_concat, res_t.m_concat)
        assert [r.div_final for r in serial.rows] == \
            [r.div_final for r in threaded.rows]

    def test_failed_run_recorded_batch_continues(self, model1, monkeypatch):
        real = experiments.reduce_model

        def flaky(model, cfg):
            if cfg.step1.seed == 1:
                raise InputError("injected")
            return real(model, cfg)

        monkeypatch.setattr(experiments, "reduce_model", flaky)
        report = run_batch(model1, small_config(), runs=3, base_seed=0)
        assert [r.failed for r in report.rows] == [False, True, False]
        assert "injected" in report.rows[1].error
        assert report.results[1] is None
        assert report.R is not None

    def test_zero_runs_rejected(self, model1):
        with pytest.raises(InputError):
            run_batch(model1, small_config(), runs=0, base_seed=0)

    def test_mean_traces_present(self, model1):
        report = run_batch(model1, small_config(), runs=2, base_seed=0)
        assert len(report.mean_step1_trace) > 0
        assert len(report.mean_step2_trace) > 0


class TestCompareStep2:
    def test_versions_agree_after_convergence(self, model1):
        cfg = small_config(step1=Step1Config(max_iterations=3000),
                           step2=Step2Config(max_iterations=3000))
        cmp = compare_step2_versions(model1, cfg, runs=4, base_seed=0,
                                     snapshot_every=500)
        assert cmp.mean_gap < 5e-3
        assert cmp.r_gamma < 1e-6
        assert cmp.r_pi < 1e-5

    def test_variability_decreases_with_iterations(self, model1):
        cfg = small_config(step2=Step2Config(max_iterations=2000))
        cmp = compare_step2_versions(model1, cfg, runs=4, base_seed=0,
                                     snapshot_every=200)
        assert cmp.checkpoints[0] == 200
        assert cmp.r_curve_gamma[-1] < cmp.r_curve_gamma[0]
        assert cmp.r_curve_pi[-1] < cmp.r_curve_pi[0]

    def test_div2b_deterministic(self, model1):
        cfg = small_config()
        a = compare_step2_versions(model1, cfg, runs=3, base_seed=2)
        b = compare_step2_versions(model1, cfg, runs=3, base_seed=2)
        assert a.div2b_gamma == b.div2b_gamma
        assert a.div2b_pi == b.div2b_pi

    def test_too_few_runs(self, model1):
        with pytest.raises(InputError):
            compare_step2_versions(model1, small_config(), runs=1, base_seed=0)


class TestCsvWriters:
    def test_table_layout_and_determinism(self, model1, tmp_path):
        report = run_batch(model1, small_config(), runs=2, base_seed=0)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_table_csv(p1, report)
        write_table_csv(p2, run_batch(model1, small_config(), runs=2,
                                      base_seed=0))
        assert p1.read_bytes() == p2.read_bytes()
        lines = p1.read_text().splitlines()
        assert lines[0] == "RUN,DIV1b,DIV1,DIV2b,DIV2,DIV"
        assert len(lines) == 3
        assert lines[1].startswith("1,")

    def test_table_roundtrips_floats(self, model1, tmp_path):
        report = run_batch(model1, small_config(), runs=1, base_seed=0)
        path = tmp_path / "t.csv"
        write_table_csv(path, report)
        cells = path.read_text().splitlines()[1].split(",")
        assert float(cells[5]) == report.rows[0].div_final

    def test_final_divergence_marks_best(self, model1, tmp_path):
        report = run_batch(model1, small_config(), runs=3, base_seed=0)
        path = tmp_path / "fig.csv"
        write_final_divergence_csv(path, report)
        lines = path.read_text().splitlines()
        assert lines[0] == "RUN,DIV,BEST"
        flags = [int(line.split(",")[2]) for line in lines[1:]]
        assert sum(flags) == 1
        assert flags[report.best_run] == 1

    def test_comparison_csvs(self, model1, tmp_path):
        cmp = compare_step2_versions(model1, small_config(), runs=2,
                                     base_seed=0, snapshot_every=100)
        vp, dp = tmp_path / "var.csv", tmp_path / "decay.csv"
        write_variability_csv(vp, cmp)
        write_divergence_decay_csv(dp, cmp)
        vlines = vp.read_text().splitlines()
        assert vlines[0] == "ITERATION,R_GAMMA,R_PI"
        assert len(vlines) == 1 + len(cmp.checkpoints)
        dlines = dp.read_text().splitlines()
        assert dlines[0] == "ITERATION,DIV_GAMMA,DIV_PI"
        assert len(dlines) == 1 + len(cmp.mean_trace_gamma)
