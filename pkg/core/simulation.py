# -*- coding: utf-8 -*-
"""
시뮬레이션 모듈 (Simulation Harness)

로지스틱 생성 모델로 무작위 실험 데이터를 만들고, 네 가지 배정 방법
(무작위, 전체 A/B 검정, 가지치기 없는 트리, 가지치기한 트리)을
테스트 행의 반사실(counterfactual) 평균 이익으로 비교합니다.

모든 난수는 (master_seed, rep, 용도)에서 파생한 독립 스트림을 사용하므로
반복을 몇 개의 스레드로 나누어 돌려도 결과가 같습니다.
"""
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union
import numpy as np
import pandas as pd
from scipy.special import expit
import config
from core.data import Dataset, RowSubset, split_dataset
from core.policy import Policy, assign, global_ab_decision, predict_subset
from core.prune import SelectionMetric, prune_sequence, select_subtree
from core.tree import GrowthConfig, fit_tree
from utils.logger import get_experiment_logger, get_logger, measure_performance

COVARIATE_NAMES = tuple(f"X{j + 1}" for j in range(config.SIMULATION_SETTINGS["n_covariates"]))

# 난수 스트림 용도 코드
SEED_PURPOSES = {
    "data": 0,
    "split": 1,
    "random_policy": 2,
    "counterfactual": 3,
}

PhiFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


class Method(str, Enum):
    """비교하는 배정 방법 (결과 CSV의 method 값)."""

    RANDOM = "random"
    AB_TEST = "ab_test"
    ABTREE_NOPRUNE = "abtree_noprune"
    ABTREE_PRUNED = "abtree_pruned"


def sgn(x):
    """부호 함수. 0의 부호는 +1로 정합니다."""
    result = np.where(np.asarray(x, dtype=np.float64) >= 0.0, 1.0, -1.0)
    return result if result.ndim else float(result)


def _phi1(x: np.ndarray, t: np.ndarray) -> np.ndarray:
    return 2.0 * t * sgn(x[..., 0] - 0.2) + x[..., 2] + x[..., 3]


def _phi2(x: np.ndarray, t: np.ndarray) -> np.ndarray:
    return 2.0 * t * sgn(x[..., 0]) * sgn(x[..., 1] - 0.3) + x[..., 1] + 0.2 * x[..., 2] + 0.5 * x[..., 3]


def _phi3(x: np.ndarray, t: np.ndarray) -> np.ndarray:
    return 3.0 * t * sgn(x[..., 0]) + 2.0 * x[..., 1] + x[..., 2] + 0.5 * x[..., 4]


def _phi4(x: np.ndarray, t: np.ndarray) -> np.ndarray:
    return 3.0 * t * sgn(x[..., 0]) + t * sgn(x[..., 1]) + x[..., 2]


# 반응 함수 레지스트리 (register_phi로 확장)
PHI_FUNCTIONS: Dict[int, PhiFunction] = {1: _phi1, 2: _phi2, 3: _phi3, 4: _phi4}


def register_phi(k: int, fn: PhiFunction, replace: bool = False):
    """
    반응 함수를 추가합니다.

    fn(x, t)는 (..., 5) 공변량 배열과 0/1 처리 배열을 받아 로짓 값을 돌려줘야 합니다.

    Raises:
        ValueError: 이미 등록된 번호 (replace=False)
    """
    if k in PHI_FUNCTIONS and not replace:
        raise ValueError(f"response function {k} is already registered")
    PHI_FUNCTIONS[int(k)] = fn


def phi(k: int, x: np.ndarray, t) -> Union[float, np.ndarray]:
    """
    k번째 반응 함수의 로짓 값. t는 0(A) 또는 1(B)입니다.

    x가 길이 5 벡터면 실수를, (n, 5) 행렬이면 길이 n 벡터를 돌려줍니다.
    """
    if k not in PHI_FUNCTIONS:
        raise ValueError(f"unknown response function {k} (registered: {sorted(PHI_FUNCTIONS)})")
    x = np.asarray(x, dtype=np.float64)
    value = PHI_FUNCTIONS[k](x, np.asarray(t, dtype=np.float64))
    value = np.asarray(value, dtype=np.float64)
    return float(value) if value.ndim == 0 else value


def derive_seed(master_seed: int, rep: int, purpose: str) -> int:
    """(master_seed, rep, 용도)에서 32비트 시드를 파생합니다."""
    sequence = np.random.SeedSequence([int(master_seed), int(rep), SEED_PURPOSES[purpose]])
    return int(sequence.generate_state(1)[0])


def derive_rng(master_seed: int, rep: int, purpose: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), int(rep), SEED_PURPOSES[purpose]]))


@dataclass(frozen=True)
class Scenario:
    """
    시뮬레이션 시나리오.

    covariate_mode:
        verbatim: X_j ~ Uniform(0, 1)
        centered: X_j ~ Uniform(-1, 1) (sgn(X1), sgn(X2) 항이 실제로 부호를 바꾸는 경우)
    """

    phi_index: int
    n_rows: int = config.SIMULATION_SETTINGS["n_rows"]
    n_reps: int = config.SIMULATION_SETTINGS["n_reps"]
    master_seed: int = config.SIMULATION_SETTINGS["master_seed"]
    covariate_mode: str = config.SIMULATION_SETTINGS["covariate_mode"]
    fractions: Tuple[float, float, float] = config.SIMULATION_SETTINGS["fractions"]

    def __post_init__(self):
        if self.phi_index not in PHI_FUNCTIONS:
            raise ValueError(f"unknown response function {self.phi_index} (registered: {sorted(PHI_FUNCTIONS)})")
        if self.n_rows < 1:
            raise ValueError(f"n_rows must be positive, got {self.n_rows}")
        if self.n_reps < 1:
            raise ValueError(f"n_reps must be positive, got {self.n_reps}")
        config.get_covariate_range(self.covariate_mode)
        object.__setattr__(self, "fractions", tuple(float(f) for f in self.fractions))

    @property
    def name(self) -> str:
        return f"phi{self.phi_index}-{self.covariate_mode}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "phi_index": self.phi_index,
            "n_rows": self.n_rows,
            "n_reps": self.n_reps,
            "master_seed": self.master_seed,
            "covariate_mode": self.covariate_mode,
            "fractions": list(self.fractions),
        }


@dataclass(frozen=True)
class MethodRecord:
    scenario: str
    rep: int
    method: str
    mean_profit: float


@dataclass(frozen=True)
class OracleReference:
    """
    반복 하나의 테스트 행에서 오라클 정책의 기준값.

    expected_profit과 standard_error는 정확한 기대 이익과 몬테카를로 표준오차이고,
    counterfactual_profit은 다른 방법들과 같은 난수로 뽑은 오라클의 반사실 이익입니다.
    """

    scenario: str
    rep: int
    expected_profit: float
    standard_error: float
    counterfactual_profit: float


@dataclass(frozen=True)
class ExperimentResult:
    """
    실험 결과: (rep, method)마다 기록 하나, rep마다 오라클 기준값 하나.

    records는 rep 순서, 같은 rep 안에서는 Method 선언 순서입니다.
    """

    scenario: Scenario
    growth: GrowthConfig
    records: Tuple[MethodRecord, ...]
    oracle: Tuple[OracleReference, ...]
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_frame(self) -> pd.DataFrame:
        """결과 CSV 형태의 DataFrame (scenario, rep, method, mean_profit)."""
        return pd.DataFrame(
            [(r.scenario, r.rep, r.method, r.mean_profit) for r in self.records],
            columns=["scenario", "rep", "method", "mean_profit"],
        )

    def oracle_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(o.scenario, o.rep, o.expected_profit, o.standard_error, o.counterfactual_profit) for o in self.oracle],
            columns=["scenario", "rep", "expected_profit", "standard_error", "counterfactual_profit"],
        )

    def method_means(self) -> Dict[str, float]:
        """방법별 반복 평균 이익."""
        frame = self.to_frame()
        means = frame.groupby("method", sort=False)["mean_profit"].mean()
        return {method: float(value) for method, value in means.items()}


def _covariate_block(rows: Union[np.ndarray, Dataset, RowSubset]) -> np.ndarray:
    """X1..X5 공변량 행렬. 행렬이 주어지면 그대로 사용합니다."""
    if isinstance(rows, RowSubset):
        return rows.parent.covariate_matrix(COVARIATE_NAMES)[rows.indices]
    if isinstance(rows, Dataset):
        return rows.covariate_matrix(COVARIATE_NAMES)
    return np.asarray(rows, dtype=np.float64)


def simulate_dataset(scenario: Scenario, rep: int) -> Dataset:
    """
    반복 rep의 데이터셋을 생성합니다.

    T ~ Bernoulli(0.5), X_j ~ 모드별 균등분포, Y ~ Bernoulli(σ(φ_k(X, T))).
    열은 y, T, X1..X5입니다.

    Args:
        scenario (Scenario): 시나리오
        rep (int): 반복 번호 (0 <= rep < n_reps)

    Returns:
        Dataset: 생성된 데이터셋
    """
    if not 0 <= rep < scenario.n_reps:
        raise ValueError(f"rep {rep} out of range [0, {scenario.n_reps})")
    rng = derive_rng(scenario.master_seed, rep, "data")
    low, high = config.get_covariate_range(scenario.covariate_mode)
    n = scenario.n_rows

    x = rng.uniform(low, high, size=(n, len(COVARIATE_NAMES)))
    t = rng.integers(0, 2, size=n).astype(np.int8)
    probability = expit(phi(scenario.phi_index, x, t))
    y = (rng.random(n) < probability).astype(np.int8)

    return Dataset.from_arrays(y, t, {name: x[:, j] for j, name in enumerate(COVARIATE_NAMES)})


def counterfactual_profit(scenario: Scenario, test_rows: Union[np.ndarray, Dataset, RowSubset],
                          assignments: np.ndarray, seed: int) -> float:
    """
    배정된 처리 아래에서 결과를 다시 뽑아 평균 이익을 계산합니다.

    같은 seed를 쓰는 정책들은 같은 균등 난수를 공유하므로 (공통 난수),
    한 반복 안의 방법 간 비교에서 잡음이 줄어듭니다.

    Raises:
        ValueError: 빈 테스트 세트 또는 길이 불일치
    """
    x = _covariate_block(test_rows)
    assignments = np.asarray(assignments)
    if x.shape[0] == 0:
        raise ValueError("empty test set")
    if assignments.shape[0] != x.shape[0]:
        raise ValueError(f"{assignments.shape[0]} assignments for {x.shape[0]} test rows")
    probability = expit(phi(scenario.phi_index, x, assignments))
    draws = np.random.default_rng(seed).random(x.shape[0]) < probability
    return float(np.count_nonzero(draws)) / x.shape[0]


def oracle_assignments(scenario: Scenario, rows: Union[np.ndarray, Dataset, RowSubset]) -> np.ndarray:
    """행마다 φ_k(x, t)를 최대화하는 처리 (동률이면 A)."""
    x = _covariate_block(rows)
    better_b = phi(scenario.phi_index, x, np.ones(x.shape[0])) > phi(scenario.phi_index, x, np.zeros(x.shape[0]))
    return better_b.astype(np.int8)


def expected_profit(scenario: Scenario, rows: Union[np.ndarray, Dataset, RowSubset],
                    assignments: np.ndarray) -> Tuple[float, float]:
    """
    배정의 정확한 기대 평균 이익과 반사실 추정치의 몬테카를로 표준오차.

    Returns:
        Tuple[float, float]: (mean σ(φ), sqrt(Σ p(1-p)) / n)
    """
    x = _covariate_block(rows)
    if x.shape[0] == 0:
        raise ValueError("empty test set")
    probability = expit(phi(scenario.phi_index, x, np.asarray(assignments)))
    n = x.shape[0]
    return float(probability.mean()), float(np.sqrt(np.sum(probability * (1.0 - probability))) / n)


def _run_rep(scenario: Scenario, rep: int, growth: GrowthConfig, metric: SelectionMetric,
             alpha: float) -> Tuple[List[MethodRecord], OracleReference]:
    data = simulate_dataset(scenario, rep)
    model_data = data.select_covariates(config.SIMULATION_SETTINGS["model_covariates"])
    train, val, test = split_dataset(model_data, scenario.fractions,
                                     seed=derive_seed(scenario.master_seed, rep, "split"))
    train_val = train.union(val)

    assignments = {}
    assignments[Method.RANDOM] = assign(Policy.random(), test,
                                        seed=derive_seed(scenario.master_seed, rep, "random_policy"))

    decision = global_ab_decision(train_val, alpha)
    assignments[Method.AB_TEST] = assign(Policy.constant(decision.chosen), test)

    noprune = fit_tree(train_val, growth)
    assignments[Method.ABTREE_NOPRUNE] = predict_subset(noprune, test)

    sequence = prune_sequence(fit_tree(train, growth))
    pruned = select_subtree(sequence, val, metric)
    assignments[Method.ABTREE_PRUNED] = predict_subset(pruned, test)

    # 점수는 모델에서 제외한 X5까지 포함한 전체 공변량으로 계산
    test_rows = test.with_parent(data)
    counterfactual_seed = derive_seed(scenario.master_seed, rep, "counterfactual")
    records = [
        MethodRecord(scenario.name, rep, method.value,
                     counterfactual_profit(scenario, test_rows, assignments[method], counterfactual_seed))
        for method in Method
    ]
    best = oracle_assignments(scenario, test_rows)
    oracle_mean, oracle_se = expected_profit(scenario, test_rows, best)
    oracle_draw = counterfactual_profit(scenario, test_rows, best, counterfactual_seed)

    get_experiment_logger().log_rep_finished(scenario.name, rep, {r.method: r.mean_profit for r in records})
    return records, OracleReference(scenario.name, rep, oracle_mean, oracle_se, oracle_draw)


@measure_performance("simulation.run_experiment", log_level="info")
def run_experiment(scenario: Scenario, growth: Optional[GrowthConfig] = None,
                   metric: SelectionMetric = SelectionMetric(config.SELECTION_SETTINGS["default_metric"]),
                   alpha: float = config.SIMULATION_SETTINGS["alpha"],
                   threads: int = 1) -> ExperimentResult:
    """
    시나리오의 모든 반복에서 네 방법을 비교합니다.

    반복마다: 데이터 생성, 50/25/25 분할, X1..X4만 사용해 방법별 정책 학습,
    테스트 행에 배정, 반사실 평균 이익 계산.

    - random: Bernoulli(0.5) 배정
    - ab_test: 학습+검증 데이터의 단측 A/B 검정 결과 하나를 전원에게 배정
    - abtree_noprune: 학습+검증 데이터로 성장시킨 트리
    - abtree_pruned: 학습 데이터로 성장, 검증 데이터로 부분트리 선택

    Args:
        scenario (Scenario): 시나리오
        growth (Optional[GrowthConfig]): 성장 설정 (None이면 기본값)
        metric (SelectionMetric): abtree_pruned의 부분트리 선택 기준
        alpha (float): A/B 검정 유의수준
        threads (int): 반복을 나누어 돌릴 스레드 수 (결과는 스레드 수와 무관)

    Returns:
        ExperimentResult: n_reps * 4개의 기록
    """
    growth = growth or GrowthConfig()
    metric = SelectionMetric(metric)
    if threads < 1:
        raise ValueError(f"threads must be positive, got {threads}")

    started_at = datetime.now().isoformat(timespec="seconds")
    start = time.perf_counter()
    get_logger().info(f"[{scenario.name}] 실험 시작: {scenario.n_reps}회 반복, n={scenario.n_rows}, 스레드 {threads}")

    def run(rep: int):
        return _run_rep(scenario, rep, growth, metric, alpha)

    if threads == 1:
        outcomes = [run(rep) for rep in range(scenario.n_reps)]
    else:
        with ThreadPoolExecutor(max_workers=threads, thread_name_prefix="rep") as pool:
            # map은 입력 순서대로 결과를 돌려줌
            outcomes = list(pool.map(run, range(scenario.n_reps)))

    records = tuple(record for rep_records, _ in outcomes for record in rep_records)
    oracle = tuple(reference for _, reference in outcomes)
    result = ExperimentResult(
        scenario=scenario,
        growth=growth,
        records=records,
        oracle=oracle,
        metadata={
            "scenario": scenario.to_dict(),
            "growth": growth.to_dict(),
            "metric": metric.value,
            "alpha": alpha,
            "threads": threads,
            "started_at": started_at,
            "finished_at": datetime.now().isoformat(timespec="seconds"),
        },
    )
    get_experiment_logger().log_experiment_finished(scenario.name, scenario.n_reps, result.method_means(),
                                                    time.perf_counter() - start)
    return result


def summarize(results: Union[ExperimentResult, Sequence[ExperimentResult]]) -> pd.DataFrame:
    """
    시나리오별, 방법별 평균 이익의 mean / sd / min / max.

    Returns:
        pd.DataFrame: scenario, method, mean, sd, min, max, reps 열
    """
    if isinstance(results, ExperimentResult):
        results = [results]
    frame = pd.concat([r.to_frame() for r in results], ignore_index=True)
    summary = (
        frame.groupby(["scenario", "method"], sort=False)["mean_profit"]
        .agg(["mean", "std", "min", "max", "count"])
        .reset_index()
        .rename(columns={"std": "sd", "count": "reps"})
    )
    return summary
