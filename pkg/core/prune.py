# -*- coding: utf-8 -*-
"""
가지치기 모듈 (Weakest-link Pruning)

완전 트리에서 가장 약한 연결(Q 증가가 가장 작은 잎 쌍)을 하나씩 접어
루트 하나만 남을 때까지 중첩된 부분트리 열을 만들고,
보류(hold-out) 데이터로 그 중 하나를 선택합니다.
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple
import numpy as np
import config
from core.data import RowSubset
from core.errors import DataError
from core.policy import predict_subset
from core.tree import Tree, TreeNode, node_value, tolerance_for
from utils.logger import get_logger, measure_performance


class SelectionMetric(str, Enum):
    """부분트리 선택 기준."""

    ASSIGNMENT_MATCH = "assignment-match"
    HOLDOUT_PROFIT = "holdout-profit"


@dataclass(frozen=True)
class PruneStep:
    collapsed_node: int
    delta: float
    resulting_objective: float
    n_leaves: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "collapsed_node": self.collapsed_node,
            "delta": self.delta,
            "resulting_objective": self.resulting_objective,
            "n_leaves": self.n_leaves,
        }


@dataclass(frozen=True)
class PruneSequence:
    """
    완전 트리부터 루트 잎까지의 부분트리 열.

    trees[0]은 완전 트리, trees[-1]은 루트 잎이며 trees[i+1]은 steps[i]의 접기 결과입니다.
    """

    trees: Tuple[Tree, ...]
    steps: Tuple[PruneStep, ...]
    initial_objective: float

    def __post_init__(self):
        if len(self.trees) != len(self.steps) + 1:
            raise ValueError("a prune sequence has exactly one more tree than steps")

    def __len__(self) -> int:
        return len(self.trees)

    def to_dict(self) -> Dict[str, Any]:
        """감사용 JSON 문서."""
        return {
            "initial_objective": self.initial_objective,
            "initial_leaves": self.trees[0].n_leaves,
            "steps": [step.to_dict() for step in self.steps],
        }


def _defined_value(node: TreeNode) -> float:
    value = node_value(node.stats)
    if value is None:
        raise ValueError(f"node {node.node_id} has an empty treatment arm")
    return value


def collapse_delta(parent: TreeNode) -> float:
    """
    두 잎 자식을 가진 노드를 접을 때의 목적함수 감소량 Q(L) + Q(R) - Q(parent).

    음수일 수도 있습니다 (분할이 목적함수를 낮춘 경우).

    Raises:
        ValueError: 자식이 둘 다 잎이 아님
    """
    if parent.is_leaf or not (parent.left.is_leaf and parent.right.is_leaf):
        raise ValueError(f"node {parent.node_id} does not have two leaf children")
    return _defined_value(parent.left) + _defined_value(parent.right) - _defined_value(parent)


def _collapse(node: TreeNode, target: int) -> TreeNode:
    """target 노드를 잎으로 접은 새 트리. 경로 밖의 노드는 공유합니다."""
    if node.node_id == target:
        return node.as_leaf()
    if node.is_leaf:
        return node
    left = _collapse(node.left, target)
    right = _collapse(node.right, target)
    if left is node.left and right is node.right:
        return node
    return TreeNode(node.node_id, node.depth, node.stats, node.treatment, node.split, left, right)


def _weakest_link(root: TreeNode, deltas: Dict[int, float]) -> Tuple[TreeNode, float]:
    """
    접을 노드를 고릅니다: delta 최소, 동률이면 더 깊은 노드, 그다음 전위 순서상 앞선 노드.

    deltas는 node_id별 캐시이며 새로 접을 수 있게 된 노드만 계산합니다.
    """
    collapsible = []
    for node in root.iter_nodes():
        if not node.is_leaf and node.left.is_leaf and node.right.is_leaf:
            if node.node_id not in deltas:
                deltas[node.node_id] = collapse_delta(node)
            collapsible.append(node)

    smallest = min(deltas[n.node_id] for n in collapsible)
    tied = [n for n in collapsible if deltas[n.node_id] <= smallest + tolerance_for(smallest)]
    # iter_nodes는 전위 순회이므로 안정 정렬로 전위 순서가 보존됨
    chosen = sorted(tied, key=lambda n: -n.depth)[0]
    return chosen, deltas[chosen.node_id]


@measure_performance("prune.prune_sequence")
def prune_sequence(tree: Tree) -> PruneSequence:
    """
    루트가 잎이 될 때까지 가장 약한 연결을 반복해서 접습니다.

    접힌 노드는 자신의 통계로 처리를 다시 정합니다 (동률이면 A).
    각 단계의 resulting_objective는 직전 값에서 delta를 뺀 값입니다.

    Args:
        tree (Tree): 성장시킨 트리

    Returns:
        PruneSequence: 잎이 L개면 L-1 단계
    """
    initial = tree.objective()
    trees = [tree]
    steps = []
    deltas: Dict[int, float] = {}
    objective = initial
    root = tree.root

    while not root.is_leaf:
        chosen, delta = _weakest_link(root, deltas)
        root = _collapse(root, chosen.node_id)
        del deltas[chosen.node_id]
        objective = objective - delta
        steps.append(PruneStep(chosen.node_id, delta, objective, root.n_leaves))
        trees.append(tree.with_root(root))
        get_logger().debug(f"가지치기: 노드 {chosen.node_id} 접음 (delta={delta:.6g}, 잎 {root.n_leaves}개)")

    return PruneSequence(tuple(trees), tuple(steps), initial)


def score_subtree(tree: Tree, holdout: RowSubset,
                  metric: SelectionMetric = SelectionMetric.ASSIGNMENT_MATCH) -> Optional[Fraction]:
    """
    보류 데이터에서 부분트리 하나의 점수를 정확한 분수로 계산합니다.

    assignment-match: 예측 처리와 실제 배정 처리가 일치하는 행의 비율
    holdout-profit: 일치하는 행들의 평균 결과 (일치하는 행이 없으면 None)
    """
    predicted = predict_subset(tree, holdout)
    matched = predicted == holdout.treatment
    n_matched = int(np.count_nonzero(matched))
    if SelectionMetric(metric) is SelectionMetric.ASSIGNMENT_MATCH:
        return Fraction(n_matched, len(holdout))
    if n_matched == 0:
        return None
    return Fraction(int(np.count_nonzero(holdout.outcome[matched])), n_matched)


def select_subtree(seq: PruneSequence, holdout: RowSubset,
                   metric: SelectionMetric = SelectionMetric(config.SELECTION_SETTINGS["default_metric"])) -> Tree:
    """
    보류 데이터 점수가 가장 높은 부분트리를 고릅니다. 동률이면 잎이 적은 트리.

    holdout-profit에서 점수가 정의되지 않은 트리는 모든 정의된 점수보다 낮게 취급합니다.

    Args:
        seq (PruneSequence): 가지치기 열
        holdout (RowSubset): 보류 행 (결과와 처리 포함)
        metric (SelectionMetric): 선택 기준

    Returns:
        Tree: 선택된 부분트리

    Raises:
        DataError: 보류 데이터가 비어 있음
    """
    if len(holdout) == 0:
        raise DataError("empty holdout set")
    metric = SelectionMetric(metric)

    best, best_key = None, None
    scores: List[str] = []
    for tree in seq.trees:
        score = score_subtree(tree, holdout, metric)
        key = (score is not None, score if score is not None else Fraction(0), -tree.n_leaves)
        scores.append("NA" if score is None else f"{float(score):.4f}")
        if best_key is None or key > best_key:
            best, best_key = tree, key

    get_logger().debug(f"부분트리 점수({metric.value}): {', '.join(scores)} -> 잎 {best.n_leaves}개 선택")
    return best
