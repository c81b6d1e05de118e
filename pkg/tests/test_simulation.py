# -*- coding: utf-8 -*-
"""시뮬레이션 하니스 테스트."""
import numpy as np
import pytest
from scipy.special import expit
from core.simulation import (
    COVARIATE_NAMES, PHI_FUNCTIONS, Method, Scenario, counterfactual_profit, derive_seed, expected_profit,
    oracle_assignments, phi, register_phi, run_experiment, sgn, simulate_dataset, summarize,
)
from core.tree import GrowthConfig

SMALL_GROWTH = GrowthConfig(min_split=20, min_bucket=7, max_depth=3)


class TestResponseFunctions:
    """반응 함수와 부호 함수."""

    def test_sgn(self):
        assert sgn(-0.1) == -1.0
        assert sgn(0.0) == 1.0
        assert sgn(3.0) == 1.0
        assert sgn(np.array([-1.0, 0.0, 2.0])).tolist() == [-1.0, 1.0, 1.0]

    def test_phi1_example(self):
        x = np.array([0.5, 0.0, 0.0, 0.0, 0.0])
        assert phi(1, x, 1) == pytest.approx(2.0)

    def test_phi1_control_ignores_treatment_term(self):
        x = np.array([0.1, 0.9, 0.3, 0.4, 0.7])
        assert phi(1, x, 0) == pytest.approx(0.7)

    def test_phi4_example(self):
        x = np.array([0.5, 0.5, 0.25, 0.0, 0.0])
        assert phi(4, x, 1) == pytest.approx(4.25)

    def test_vectorised_matches_scalar(self):
        rng = np.random.default_rng(0)
        x = rng.uniform(-1, 1, size=(20, 5))
        t = rng.integers(0, 2, 20)
        for k in (1, 2, 3, 4):
            vector = phi(k, x, t)
            assert vector.shape == (20,)
            assert vector.tolist() == pytest.approx([phi(k, x[i], t[i]) for i in range(20)])

    def test_unknown_index(self):
        with pytest.raises(ValueError):
            phi(99, np.zeros(5), 0)

    def test_register_phi(self):
        with pytest.raises(ValueError):
            register_phi(1, lambda x, t: t)
        try:
            register_phi(9, lambda x, t: 5.0 * t - 2.5)
            assert phi(9, np.zeros(5), 1) == pytest.approx(2.5)
            assert Scenario(9, n_rows=10, n_reps=1).name == "phi9-verbatim"
        finally:
            PHI_FUNCTIONS.pop(9, None)


class TestScenario:
    """시나리오 검증."""

    def test_defaults(self):
        scenario = Scenario(1)
        assert (scenario.n_rows, scenario.n_reps) == (5000, 50)
        assert scenario.name == "phi1-verbatim"
        assert scenario.to_dict()["fractions"] == [0.5, 0.25, 0.25]

    @pytest.mark.parametrize("kwargs", [
        {"phi_index": 7},
        {"phi_index": 1, "n_rows": 0},
        {"phi_index": 1, "n_reps": 0},
        {"phi_index": 1, "covariate_mode": "gaussian"},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            Scenario(**kwargs)

    def test_seed_purposes_are_independent(self):
        seeds = {derive_seed(42, 0, purpose) for purpose in ("data", "split", "random_policy", "counterfactual")}
        assert len(seeds) == 4
        assert derive_seed(42, 3, "data") == derive_seed(42, 3, "data")
        assert derive_seed(42, 3, "data") != derive_seed(42, 4, "data")


class TestSimulateDataset:
    """데이터 생성."""

    def test_shape_and_columns(self):
        d = simulate_dataset(Scenario(1, n_rows=500, n_reps=2), 0)
        assert d.n_rows == 500
        assert d.covariate_names == COVARIATE_NAMES
        assert set(np.unique(d.outcome).tolist()) <= {0, 1}
        assert set(np.unique(d.treatment).tolist()) <= {0, 1}

    def test_deterministic_per_rep(self):
        scenario = Scenario(2, n_rows=300, n_reps=3)
        first = simulate_dataset(scenario, 1)
        again = simulate_dataset(scenario, 1)
        other = simulate_dataset(scenario, 2)
        assert np.array_equal(first.covariate_matrix(), again.covariate_matrix())
        assert np.array_equal(first.outcome, again.outcome)
        assert not np.array_equal(first.covariate_matrix(), other.covariate_matrix())

    def test_arms_are_balanced(self):
        n = 4000
        d = simulate_dataset(Scenario(3, n_rows=n, n_reps=1), 0)
        assert abs(int(d.treatment.sum()) - n / 2) <= 3 * np.sqrt(n / 4)

    @pytest.mark.parametrize("mode,low,high", [("verbatim", 0.0, 1.0), ("centered", -1.0, 1.0)])
    def test_covariate_range(self, mode, low, high):
        x = simulate_dataset(Scenario(1, n_rows=2000, n_reps=1, covariate_mode=mode), 0).covariate_matrix()
        assert x.min() >= low and x.max() < high
        if mode == "centered":
            assert (x[:, 0] < 0).any()

    def test_rep_out_of_range(self):
        with pytest.raises(ValueError):
            simulate_dataset(Scenario(1, n_rows=10, n_reps=2), 2)


class TestCounterfactualScoring:
    """반사실 이익과 오라클."""

    @pytest.fixture
    def test_block(self):
        return np.random.default_rng(7).uniform(0, 1, size=(20000, 5))

    def test_errors(self, test_block):
        scenario = Scenario(1, n_rows=10, n_reps=1)
        with pytest.raises(ValueError, match="empty"):
            counterfactual_profit(scenario, np.zeros((0, 5)), np.zeros(0), seed=1)
        with pytest.raises(ValueError):
            counterfactual_profit(scenario, test_block[:5], np.zeros(4), seed=1)

    def test_common_random_numbers(self, test_block):
        scenario = Scenario(1, n_rows=10, n_reps=1)
        a = np.zeros(len(test_block), dtype=np.int8)
        assert counterfactual_profit(scenario, test_block, a, 5) == counterfactual_profit(scenario, test_block, a, 5)

    def test_all_a_matches_expectation(self, test_block):
        scenario = Scenario(1, n_rows=10, n_reps=1)
        a = np.zeros(len(test_block), dtype=np.int8)
        mean, se = expected_profit(scenario, test_block, a)
        assert mean == pytest.approx(float(expit(test_block[:, 2] + test_block[:, 3]).mean()))
        assert abs(counterfactual_profit(scenario, test_block, a, 11) - mean) <= 3 * se

    def test_oracle_phi1(self, test_block):
        best = oracle_assignments(Scenario(1, n_rows=10, n_reps=1), test_block)
        assert np.array_equal(best, (test_block[:, 0] >= 0.2).astype(np.int8))

    def test_oracle_tie_goes_to_a(self):
        try:
            register_phi(9, lambda x, t: x[..., 0])
            best = oracle_assignments(Scenario(9, n_rows=10, n_reps=1), np.ones((3, 5)))
            assert best.tolist() == [0, 0, 0]
        finally:
            PHI_FUNCTIONS.pop(9, None)

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_oracle_dominates(self, test_block, k):
        scenario = Scenario(k, n_rows=10, n_reps=1)
        best = oracle_assignments(scenario, test_block)
        oracle_mean, _ = expected_profit(scenario, test_block, best)
        n = len(test_block)
        for assignments in (np.zeros(n), np.ones(n), np.random.default_rng(k).integers(0, 2, n)):
            assert expected_profit(scenario, test_block, assignments)[0] <= oracle_mean
            # 같은 난수를 쓰면 행마다 오라클 결과가 더 크거나 같음
            assert counterfactual_profit(scenario, test_block, assignments, 3) <= \
                counterfactual_profit(scenario, test_block, best, 3)


class TestRunExperiment:
    """반복 실행과 요약."""

    @pytest.fixture
    def scenario(self):
        return Scenario(1, n_rows=400, n_reps=3, master_seed=9)

    def test_records(self, scenario):
        result = run_experiment(scenario, SMALL_GROWTH)
        frame = result.to_frame()
        assert list(frame.columns) == ["scenario", "rep", "method", "mean_profit"]
        assert len(frame) == 12
        assert frame["method"].tolist()[:4] == [m.value for m in Method]
        assert frame["rep"].tolist() == [0] * 4 + [1] * 4 + [2] * 4
        assert frame["mean_profit"].between(0.0, 1.0).all()
        assert len(result.oracle) == 3
        for reference in result.oracle:
            rep_profits = frame.loc[frame["rep"] == reference.rep, "mean_profit"]
            assert (rep_profits <= reference.counterfactual_profit).all()

    def test_reproducible(self, scenario):
        first = run_experiment(scenario, SMALL_GROWTH).to_frame()
        second = run_experiment(scenario, SMALL_GROWTH).to_frame()
        assert first.equals(second)

    def test_thread_count_does_not_change_results(self, scenario):
        single = run_experiment(scenario, SMALL_GROWTH, threads=1)
        pooled = run_experiment(scenario, SMALL_GROWTH, threads=2)
        assert single.to_frame().equals(pooled.to_frame())
        assert single.oracle_frame().equals(pooled.oracle_frame())

    def test_invalid_threads(self, scenario):
        with pytest.raises(ValueError):
            run_experiment(scenario, SMALL_GROWTH, threads=0)

    def test_summarize(self, scenario):
        result = run_experiment(scenario, SMALL_GROWTH)
        summary = summarize(result)
        assert list(summary.columns) == ["scenario", "method", "mean", "sd", "min", "max", "reps"]
        assert summary["method"].tolist() == [m.value for m in Method]
        assert (summary["reps"] == 3).all()
        assert (summary["min"] <= summary["mean"]).all() and (summary["mean"] <= summary["max"]).all()
        means = result.method_means()
        assert summary["mean"].tolist() == pytest.approx([means[m.value] for m in Method])
