# -*- coding: utf-8 -*-
"""
처리 배정 정책 모듈 (Treatment Policies)

학습된 트리로 처리를 예측하고, 비교 기준이 되는 두 정책
(무작위 배정, 전체 A/B 검정 결과에 따른 단일 처리)을 제공합니다.
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping, Optional, Union
import numpy as np
from scipy.stats import norm
import config
from core.data import Dataset, RowSubset, Treatment
from core.errors import InsufficientTreatmentError, MissingCovariateError
from core.tree import SplitKind, Tree, TreeNode, node_stats
from utils.logger import get_logger


class PolicyKind(str, Enum):
    TREE = "tree"
    CONSTANT = "constant"
    RANDOM = "random"


@dataclass(frozen=True)
class Policy:
    """공변량 -> 처리 규칙. 생성 후 변경되지 않습니다."""

    kind: PolicyKind
    tree: Optional[Tree] = None
    treatment: Optional[Treatment] = None
    p_b: Optional[float] = None

    def __post_init__(self):
        if self.kind is PolicyKind.TREE and self.tree is None:
            raise ValueError("tree policy needs a tree")
        if self.kind is PolicyKind.CONSTANT and self.treatment is None:
            raise ValueError("constant policy needs a treatment")
        if self.kind is PolicyKind.RANDOM and (self.p_b is None or not 0.0 <= self.p_b <= 1.0):
            raise ValueError(f"p_B must lie in [0, 1], got {self.p_b}")

    @classmethod
    def from_tree(cls, tree: Tree) -> "Policy":
        return cls(PolicyKind.TREE, tree=tree)

    @classmethod
    def constant(cls, treatment: Treatment) -> "Policy":
        return cls(PolicyKind.CONSTANT, treatment=Treatment(treatment))

    @classmethod
    def random(cls, p_b: float = config.SIMULATION_SETTINGS["random_policy_p_b"]) -> "Policy":
        return cls(PolicyKind.RANDOM, p_b=float(p_b))


@dataclass(frozen=True)
class ABTestDecision:
    """
    전체 A/B 검정 결과.

    H1: p_B > p_A 단측 검정에서 z가 임계값을 넘으면 B, 아니면 A입니다.
    """

    chosen: Treatment
    z_statistic: float
    p_value: float
    p_a_hat: float
    p_b_hat: float
    n_a: int
    n_b: int
    alpha: float
    critical_value: float

    def report(self) -> str:
        """한 줄 요약."""
        return (f"z={self.z_statistic:.3f} (critical {self.critical_value:.4f}, p={self.p_value:.4g}), "
                f"p_A={self.p_a_hat:.4f} (n={self.n_a}), p_B={self.p_b_hat:.4f} (n={self.n_b}), "
                f"decision={self.chosen.value}")


def _goes_left(tree: Tree, node: TreeNode, row: Mapping[str, Any]) -> bool:
    split = node.split
    name = tree.feature_names[split.feature]
    if name not in row or row[name] is None:
        raise MissingCovariateError(f"missing covariate value '{name}'", column=name)
    value = row[name]
    if split.kind is SplitKind.THRESHOLD:
        number = float(value)
        if math.isnan(number):
            raise MissingCovariateError(f"missing covariate value '{name}'", column=name)
        return number <= split.threshold
    levels = tree.category_levels[name]
    label = str(value)
    return label in levels and levels.index(label) == split.level


def predict(tree: Tree, row: Mapping[str, Any]) -> Treatment:
    """
    공변량 레코드 하나의 처리를 예측합니다.

    범주형 값은 라벨로 주며, 학습 때 없던 라벨은 오른쪽으로 갑니다.

    Args:
        tree (Tree): 학습된 트리
        row (Mapping[str, Any]): 공변량 이름 -> 값

    Returns:
        Treatment: 도달한 잎의 처리

    Raises:
        MissingCovariateError: 경로상의 분할이 쓰는 공변량 값이 없음
    """
    node = tree.root
    while not node.is_leaf:
        node = node.left if _goes_left(tree, node, row) else node.right
    return node.treatment


def predict_subset(tree: Tree, rows: Union[Dataset, RowSubset]) -> np.ndarray:
    """
    여러 행을 한 번에 예측합니다.

    Returns:
        np.ndarray: 0=A, 1=B의 int8 벡터 (입력 행 순서)
    """
    encoded = tree.encode(rows)
    n = len(rows) if isinstance(rows, RowSubset) else rows.n_rows
    assigned = np.empty(n, dtype=np.int8)

    def route(node: TreeNode, positions: np.ndarray):
        if node.is_leaf:
            assigned[positions] = node.treatment.code
            return
        mask = node.split.goes_left(encoded[node.split.feature][positions])
        route(node.left, positions[mask])
        route(node.right, positions[~mask])

    route(tree.root, np.arange(n, dtype=np.int64))
    return assigned


def global_ab_decision(d: RowSubset, alpha: float = config.SIMULATION_SETTINGS["alpha"]) -> ABTestDecision:
    """
    합동 비율 z 검정으로 전체 집단에 하나의 처리를 고릅니다.

    z = (p̂_B - p̂_A) / sqrt(p̂(1-p̂)(1/n_A + 1/n_B)) 이며 p̂는 합동 성공 비율입니다.
    p̂가 0 또는 1이면 z = 0 (근거 없음)으로 보고 A를 고릅니다.

    Args:
        d (RowSubset): 결과와 처리가 있는 행
        alpha (float): 유의수준

    Returns:
        ABTestDecision: 검정 결과

    Raises:
        InsufficientTreatmentError: 어느 한 처리군이 비어 있음
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    stats = node_stats(d)
    if stats.n_a == 0 or stats.n_b == 0:
        raise InsufficientTreatmentError(
            f"A/B test needs both treatments (n_A={stats.n_a}, n_B={stats.n_b})")

    p_a = stats.y_a / stats.n_a
    p_b = stats.y_b / stats.n_b
    pooled = (stats.y_a + stats.y_b) / stats.n
    if pooled <= 0.0 or pooled >= 1.0:
        z = 0.0
    else:
        se = math.sqrt(pooled * (1.0 - pooled) * (1.0 / stats.n_a + 1.0 / stats.n_b))
        z = (p_b - p_a) / se

    critical = float(norm.ppf(1.0 - alpha))
    decision = ABTestDecision(
        chosen=Treatment.B if z > critical else Treatment.A,
        z_statistic=z,
        p_value=float(norm.sf(z)),
        p_a_hat=p_a,
        p_b_hat=p_b,
        n_a=stats.n_a,
        n_b=stats.n_b,
        alpha=alpha,
        critical_value=critical,
    )
    get_logger().debug(f"A/B 검정: {decision.report()}")
    return decision


def assign(policy: Policy, rows: Union[Dataset, RowSubset], seed: Optional[int] = None) -> np.ndarray:
    """
    정책으로 행마다 처리를 배정합니다.

    무작위 정책은 seed로 만든 난수 생성기에서 독립 Bernoulli(p_B)를 뽑습니다.

    Returns:
        np.ndarray: 0=A, 1=B의 int8 벡터
    """
    n = len(rows) if isinstance(rows, RowSubset) else rows.n_rows
    if policy.kind is PolicyKind.TREE:
        return predict_subset(policy.tree, rows)
    if policy.kind is PolicyKind.CONSTANT:
        return np.full(n, policy.treatment.code, dtype=np.int8)
    rng = np.random.default_rng(seed)
    return (rng.random(n) < policy.p_b).astype(np.int8)
