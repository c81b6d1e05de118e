# -*- coding: utf-8 -*-
"""
전체 규모 시뮬레이션 검증 (n=5000, 50회 반복).

실행이 길기 때문에 slow 마커가 붙어 있습니다: pytest -m slow
"""
import numpy as np
import pytest
import config
from core.simulation import Method, Scenario, run_experiment
from utils.logger import LoggerManager
from utils.result_writer import ResultWriter

pytestmark = pytest.mark.slow

SCENARIOS = {
    "phi1-verbatim": Scenario(1),
    "phi2-verbatim": Scenario(2),
    "phi3-verbatim": Scenario(3),
    "phi4-verbatim": Scenario(4),
    "phi4-centered": Scenario(4, covariate_mode="centered"),
}


@pytest.fixture(scope="module")
def results(tmp_path_factory):
    """시나리오별 실험 결과 (모듈에서 한 번만 실행)."""
    with pytest.MonkeyPatch.context() as patch:
        patch.setitem(config.LOG_SETTINGS, "log_dir", str(tmp_path_factory.mktemp("acceptance-logs")))
        LoggerManager.reset()
        computed = {name: run_experiment(scenario) for name, scenario in SCENARIOS.items()}
        LoggerManager.reset()
    return computed


def _means(result):
    return result.method_means()


@pytest.mark.parametrize("name", ["phi1-verbatim", "phi2-verbatim"])
def test_tree_beats_random_and_global_test(results, name):
    means = _means(results[name])
    assert means[Method.ABTREE_PRUNED.value] >= means[Method.RANDOM.value] + 0.02
    assert means[Method.ABTREE_PRUNED.value] >= means[Method.AB_TEST.value]


@pytest.mark.parametrize("name", ["phi3-verbatim", "phi4-verbatim"])
def test_homogeneous_effect_matches_global_test(results, name):
    means = _means(results[name])
    assert abs(means[Method.ABTREE_PRUNED.value] - means[Method.AB_TEST.value]) <= 0.01


def test_centered_subgroups_favour_tree(results):
    means = _means(results["phi4-centered"])
    assert means[Method.ABTREE_PRUNED.value] >= means[Method.AB_TEST.value] + 0.02


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_pruning_effect_is_minor(results, name):
    means = _means(results[name])
    assert abs(means[Method.ABTREE_PRUNED.value] - means[Method.ABTREE_NOPRUNE.value]) <= 0.02


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_oracle_bounds_every_method(results, name):
    result = results[name]
    frame = result.to_frame()
    oracle = result.oracle_frame().set_index("rep")

    # 같은 난수로 뽑으면 오라클 결과가 행마다 더 크거나 같으므로 반복마다 성립
    bound = frame["rep"].map(oracle["counterfactual_profit"])
    assert (frame["mean_profit"] <= bound).all()

    # 반복 평균은 오라클 기대 이익 + 3 표준오차를 넘지 않음
    n_reps = len(oracle)
    ceiling = oracle["expected_profit"].mean() + 3 * np.sqrt((oracle["standard_error"] ** 2).sum()) / n_reps
    for method, value in result.method_means().items():
        assert value <= ceiling, method


def test_results_identical_across_thread_counts(results, tmp_path):
    writer = ResultWriter()
    single, pooled = tmp_path / "single.csv", tmp_path / "pooled.csv"
    writer.write_results([results["phi1-verbatim"]], str(single))
    writer.write_results([run_experiment(SCENARIOS["phi1-verbatim"], threads=4)], str(pooled))
    assert single.read_bytes() == pooled.read_bytes()

    again = tmp_path / "again.csv"
    writer.write_results([run_experiment(SCENARIOS["phi1-verbatim"], threads=1)], str(again))
    assert single.read_bytes() == again.read_bytes()
