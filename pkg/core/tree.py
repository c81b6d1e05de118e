# -*- coding: utf-8 -*-
"""
트리 성장 모듈 (Tree Growth)

노드 통계(n_A, y_A, n_B, y_B), 분할 탐색, 정지 규칙에 따른 재귀적 트리 성장을 제공합니다.

노드 값 Q(S) = |S| * max(y_A/n_A, y_B/n_B) 이며, 분할은 Q(L) + Q(R)을 최대화하도록 선택합니다.
모든 값이 단순 개수에만 의존하므로 정렬 한 번과 누적합으로 후보 전체를 평가합니다.
"""
import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Optional, Tuple, Union
import numpy as np
import config
from core.data import ColumnKind, Dataset, RowSubset, Treatment
from core.errors import InsufficientTreatmentError, MissingCovariateError, SchemaError
from utils.logger import get_logger, measure_performance

TIE_TOLERANCE = config.NUMERIC_SETTINGS["tie_tolerance"]


def tolerance_for(value: float) -> float:
    """비교 허용 오차 (값의 크기에 비례, 최소 TIE_TOLERANCE)."""
    return TIE_TOLERANCE * max(1.0, abs(value))


@dataclass(frozen=True)
class NodeStats:
    """공변량 부분공간 하나의 충분통계량."""

    n_a: int = 0
    y_a: int = 0
    n_b: int = 0
    y_b: int = 0

    def __post_init__(self):
        if not (0 <= self.y_a <= self.n_a and 0 <= self.y_b <= self.n_b):
            raise ValueError(f"invalid node statistics {self}")

    def __add__(self, other: "NodeStats") -> "NodeStats":
        return NodeStats(self.n_a + other.n_a, self.y_a + other.y_a,
                         self.n_b + other.n_b, self.y_b + other.y_b)

    def __sub__(self, other: "NodeStats") -> "NodeStats":
        return NodeStats(self.n_a - other.n_a, self.y_a - other.y_a,
                         self.n_b - other.n_b, self.y_b - other.y_b)

    @property
    def n(self) -> int:
        return self.n_a + self.n_b

    def count(self, t: Treatment) -> Tuple[int, int]:
        """처리 t의 (관측 수, 성공 수)."""
        return (self.n_a, self.y_a) if t is Treatment.A else (self.n_b, self.y_b)

    def to_dict(self) -> Dict[str, int]:
        return {"n_a": self.n_a, "y_a": self.y_a, "n_b": self.n_b, "y_b": self.y_b}

    @classmethod
    def from_dict(cls, data: Dict[str, int]) -> "NodeStats":
        return cls(int(data["n_a"]), int(data["y_a"]), int(data["n_b"]), int(data["y_b"]))


def node_stats(subset: RowSubset) -> NodeStats:
    """
    부분집합의 처리군별 관측 수와 성공 수를 셉니다.

    Args:
        subset (RowSubset): 행 부분집합

    Returns:
        NodeStats: (n_A, y_A, n_B, y_B)
    """
    t = subset.treatment
    y = subset.outcome
    n_b = int(np.count_nonzero(t))
    y_b = int(np.count_nonzero(y[t == 1]))
    return NodeStats(n_a=len(t) - n_b, y_a=int(np.count_nonzero(y)) - y_b, n_b=n_b, y_b=y_b)


def empirical_profit(stats: NodeStats, t: Treatment) -> Optional[float]:
    """
    처리 t를 받은 관측의 경험적 평균 이익 y_t / n_t.

    Returns:
        Optional[float]: n_t = 0이면 None (정의되지 않음)
    """
    n, y = stats.count(Treatment(t))
    if n == 0:
        return None
    return y / n


def node_value(stats: NodeStats) -> Optional[float]:
    """
    Q(S) = (n_A + n_B) * max(y_A/n_A, y_B/n_B).

    한쪽 처리군이 비어 있으면 None입니다. 성장 제약 하에서는 발생하지 않습니다.
    """
    if stats.n_a == 0 or stats.n_b == 0:
        return None
    n = stats.n
    return max(n * stats.y_a / stats.n_a, n * stats.y_b / stats.n_b)


def best_treatment(stats: NodeStats) -> Treatment:
    """
    경험적 이익이 큰 처리를 고릅니다. 동률이면 A (대조군).

    비율은 교차 곱셈으로 정확히 비교합니다. 한쪽만 정의되면 그 처리를 고릅니다.
    """
    if stats.n_b == 0:
        return Treatment.A
    if stats.n_a == 0:
        return Treatment.B
    return Treatment.B if stats.y_b * stats.n_a > stats.y_a * stats.n_b else Treatment.A


class SplitKind(str, Enum):
    THRESHOLD = "threshold"
    EQUALITY = "equality"


@dataclass(frozen=True)
class SplitPredicate:
    """
    분할 조건.

    threshold: X_k <= threshold 이면 왼쪽.
    equality: X_k == level 이면 왼쪽 (level은 학습 데이터의 범주 코드).
    """

    feature: int
    kind: SplitKind
    threshold: Optional[float] = None
    level: Optional[int] = None

    def __post_init__(self):
        if self.kind is SplitKind.THRESHOLD and (self.threshold is None or self.level is not None):
            raise ValueError("threshold split needs a threshold and no level")
        if self.kind is SplitKind.EQUALITY and (self.level is None or self.threshold is not None):
            raise ValueError("equality split needs a level and no threshold")

    @classmethod
    def at_threshold(cls, feature: int, threshold: float) -> "SplitPredicate":
        return cls(feature, SplitKind.THRESHOLD, threshold=float(threshold))

    @classmethod
    def at_level(cls, feature: int, level: int) -> "SplitPredicate":
        return cls(feature, SplitKind.EQUALITY, level=int(level))

    def goes_left(self, values: np.ndarray) -> np.ndarray:
        """값 벡터에 대해 왼쪽으로 가는 행의 마스크를 반환합니다."""
        if self.kind is SplitKind.THRESHOLD:
            return values <= self.threshold
        return values == self.level

    def to_dict(self) -> Dict[str, Union[int, float, str]]:
        data = {"feature": self.feature, "kind": self.kind.value}
        if self.kind is SplitKind.THRESHOLD:
            data["threshold"] = self.threshold
        else:
            data["level"] = self.level
        return data


@dataclass(frozen=True)
class SplitCandidate:
    """분할 탐색 결과: 조건, Q(L)+Q(R), 양쪽 통계."""

    predicate: SplitPredicate
    objective: float
    left_stats: NodeStats
    right_stats: NodeStats


@dataclass(frozen=True)
class GrowthConfig:
    """
    성장 정지 규칙. min_split과 min_bucket은 처리군별 개수입니다.

    min_split: 두 처리군 모두 이 수 이상이어야 분할을 고려
    min_bucket: 모든 잎에서 두 처리군 모두 이 수 이상
    max_depth: 루트 깊이 0 기준 최대 깊이
    """

    min_split: int = config.GROWTH_DEFAULTS["min_split"]
    min_bucket: int = config.GROWTH_DEFAULTS["min_bucket"]
    max_depth: int = config.GROWTH_DEFAULTS["max_depth"]

    def __post_init__(self):
        if self.min_bucket < 1:
            raise ValueError(f"min_bucket must be >= 1, got {self.min_bucket}")
        if self.max_depth < 0:
            raise ValueError(f"max_depth must be >= 0, got {self.max_depth}")
        if self.min_split < 0:
            raise ValueError(f"min_split must be >= 0, got {self.min_split}")
        if self.min_split < 2 * self.min_bucket:
            get_logger().warning(
                f"min_split({self.min_split}) < 2 * min_bucket({self.min_bucket}): "
                "분할 가능한 노드에서도 허용 가능한 분할이 없을 수 있습니다"
            )

    @classmethod
    def from_settings(cls, **overrides) -> "GrowthConfig":
        values = dict(config.GROWTH_DEFAULTS)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def to_dict(self) -> Dict[str, int]:
        return {"min_split": self.min_split, "min_bucket": self.min_bucket, "max_depth": self.max_depth}


@dataclass(frozen=True, eq=False)
class TreeNode:
    """
    이진 트리 노드. 잎이면 split이 None입니다.

    treatment는 노드 자체 통계의 argmax 처리입니다 (잎에서는 배정 처리).
    node_id는 성장 시 전위 순회 순서로 부여되며 가지치기 후에도 유지됩니다.
    """

    node_id: int
    depth: int
    stats: NodeStats
    treatment: Treatment
    split: Optional[SplitPredicate] = None
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None

    def __post_init__(self):
        if self.split is None and (self.left is not None or self.right is not None):
            raise ValueError(f"leaf {self.node_id} cannot have children")
        if self.split is not None and (self.left is None or self.right is None):
            raise ValueError(f"internal node {self.node_id} needs two children")
        if self.split is not None and self.left.stats + self.right.stats != self.stats:
            raise ValueError(f"children statistics do not sum to node {self.node_id}")

    @property
    def is_leaf(self) -> bool:
        return self.split is None

    def iter_nodes(self) -> Iterator["TreeNode"]:
        """전위 순회."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            if not node.is_leaf:
                stack.append(node.right)
                stack.append(node.left)

    def leaves(self) -> List["TreeNode"]:
        return [n for n in self.iter_nodes() if n.is_leaf]

    @property
    def n_leaves(self) -> int:
        return len(self.leaves())

    def objective(self) -> float:
        """학습 목적함수: 잎들의 Q 합."""
        return float(sum(node_value(leaf.stats) or 0.0 for leaf in self.leaves()))

    def find(self, node_id: int) -> Optional["TreeNode"]:
        for node in self.iter_nodes():
            if node.node_id == node_id:
                return node
        return None

    def as_leaf(self) -> "TreeNode":
        """같은 통계와 id를 갖는 잎으로 접은 노드. 처리는 자체 통계로 다시 계산합니다."""
        return TreeNode(self.node_id, self.depth, self.stats, best_treatment(self.stats))


# ---------------------------------------------------------------------------
# 분할 탐색 (Split Search)
# ---------------------------------------------------------------------------

def _q_vector(n_a: np.ndarray, y_a: np.ndarray, n_b: np.ndarray, y_b: np.ndarray) -> np.ndarray:
    """허용 가능한 후보(양 처리군 > 0)에 대한 Q 벡터. 그 외 위치는 무의미한 값입니다."""
    n = n_a + n_b
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.maximum(n * y_a / n_a, n * y_b / n_b)


def _pick_first_max(objective: np.ndarray, admissible: np.ndarray) -> Optional[int]:
    """허용 후보 중 최댓값(허용 오차 내 동률이면 가장 앞)을 가진 위치."""
    if not admissible.any():
        return None
    best = objective[admissible].max()
    hits = np.flatnonzero(admissible & (objective >= best - tolerance_for(best)))
    return int(hits[0])


def _admissible(left: Tuple[np.ndarray, ...], right: Tuple[np.ndarray, ...], min_bucket: int) -> np.ndarray:
    return ((left[0] >= min_bucket) & (left[2] >= min_bucket) &
            (right[0] >= min_bucket) & (right[2] >= min_bucket))


def _threshold_sweep(values: np.ndarray, t: np.ndarray, y: np.ndarray, k: int,
                     cfg: GrowthConfig) -> Optional[SplitCandidate]:
    order = np.argsort(values, kind="stable")
    xs = values[order]
    if xs.size < 2:
        return None
    # 서로 다른 연속 값 사이만 후보 (i 다음에서 자름)
    cuts = np.flatnonzero(xs[:-1] < xs[1:])
    if cuts.size == 0:
        return None

    is_b = t[order].astype(np.int64)
    is_a = 1 - is_b
    ys = y[order].astype(np.int64)
    prefix = (np.cumsum(is_a), np.cumsum(is_a * ys), np.cumsum(is_b), np.cumsum(is_b * ys))
    totals = tuple(p[-1] for p in prefix)
    left = tuple(p[cuts] for p in prefix)
    right = tuple(total - part for total, part in zip(totals, left))

    admissible = _admissible(left, right, cfg.min_bucket)
    objective = _q_vector(*left) + _q_vector(*right)
    pick = _pick_first_max(objective, admissible)
    if pick is None:
        return None

    i = cuts[pick]
    lower, upper = float(xs[i]), float(xs[i + 1])
    tau = (lower + upper) / 2.0
    if not tau < upper:
        # 인접한 부동소수 사이에서는 중점이 위 값으로 반올림될 수 있음
        tau = lower
    return SplitCandidate(
        predicate=SplitPredicate.at_threshold(k, tau),
        objective=float(objective[pick]),
        left_stats=NodeStats(*(int(v[pick]) for v in left)),
        right_stats=NodeStats(*(int(v[pick]) for v in right)),
    )


def _equality_sweep(codes: np.ndarray, t: np.ndarray, y: np.ndarray, k: int, n_levels: int,
                    cfg: GrowthConfig) -> Optional[SplitCandidate]:
    if codes.size == 0:
        return None
    arm_a = t == 0
    arm_b = ~arm_a
    left = (
        np.bincount(codes[arm_a], minlength=n_levels),
        np.bincount(codes[arm_a & (y == 1)], minlength=n_levels),
        np.bincount(codes[arm_b], minlength=n_levels),
        np.bincount(codes[arm_b & (y == 1)], minlength=n_levels),
    )
    totals = tuple(int(v.sum()) for v in left)
    right = tuple(total - part for total, part in zip(totals, left))

    admissible = _admissible(left, right, cfg.min_bucket)
    objective = _q_vector(*left) + _q_vector(*right)
    pick = _pick_first_max(objective, admissible)
    if pick is None:
        return None
    return SplitCandidate(
        predicate=SplitPredicate.at_level(k, pick),
        objective=float(objective[pick]),
        left_stats=NodeStats(*(int(v[pick]) for v in left)),
        right_stats=NodeStats(*(int(v[pick]) for v in right)),
    )


def best_split_for_feature(subset: RowSubset, k: int, cfg: GrowthConfig) -> Optional[SplitCandidate]:
    """
    공변량 k 하나에 대해 Q(L)+Q(R)을 최대화하는 허용 분할을 찾습니다.

    연속형은 한 번 정렬한 뒤 서로 다른 연속 값의 중점을 임계값 후보로 하여
    누적 통계로 훑고, 범주형은 수준마다 X_k == level 분할 하나씩을 평가합니다.
    양쪽 모두 각 처리군에 min_bucket 이상이 있어야 허용됩니다.
    동률이면 가장 작은 임계값 / 가장 낮은 수준 코드를 고릅니다.

    Args:
        subset (RowSubset): 현재 노드의 행
        k (int): 공변량 인덱스
        cfg (GrowthConfig): 성장 설정

    Returns:
        Optional[SplitCandidate]: 허용 분할이 없으면 None
    """
    dataset = subset.parent
    t = subset.treatment
    y = subset.outcome
    values = subset.covariate(k)
    if dataset.is_categorical(k):
        n_levels = len(dataset.categories[dataset.covariate_names[k]])
        return _equality_sweep(values, t, y, k, n_levels, cfg)
    return _threshold_sweep(values, t, y, k, cfg)


def best_split(subset: RowSubset, cfg: GrowthConfig) -> Optional[SplitCandidate]:
    """
    모든 공변량 중 가장 좋은 분할을 고릅니다. 동률이면 낮은 공변량 인덱스가 이깁니다.
    """
    best = None
    for k in range(subset.parent.n_covariates):
        candidate = best_split_for_feature(subset, k, cfg)
        if candidate is None:
            continue
        if best is None or candidate.objective > best.objective + tolerance_for(best.objective):
            best = candidate
    return best


# ---------------------------------------------------------------------------
# 성장 (Growth)
# ---------------------------------------------------------------------------

def _grow_node(subset: RowSubset, stats: NodeStats, depth: int, cfg: GrowthConfig,
               ids: Iterator[int]) -> TreeNode:
    node_id = next(ids)
    treatment = best_treatment(stats)

    if depth >= cfg.max_depth or stats.n_a < cfg.min_split or stats.n_b < cfg.min_split:
        return TreeNode(node_id, depth, stats, treatment)

    candidate = best_split(subset, cfg)
    if candidate is None:
        return TreeNode(node_id, depth, stats, treatment)

    parent_value = node_value(stats)
    if candidate.objective - parent_value <= tolerance_for(parent_value):
        # 개선이 없는 분할은 거절
        return TreeNode(node_id, depth, stats, treatment)

    mask = candidate.predicate.goes_left(subset.covariate(candidate.predicate.feature))
    left = _grow_node(subset.take(mask), candidate.left_stats, depth + 1, cfg, ids)
    right = _grow_node(subset.take(~mask), candidate.right_stats, depth + 1, cfg, ids)
    return TreeNode(node_id, depth, stats, treatment, candidate.predicate, left, right)


@measure_performance("tree.grow")
def grow(subset: RowSubset, cfg: Optional[GrowthConfig] = None) -> TreeNode:
    """
    정지 규칙에 따라 트리를 재귀적으로 성장시킵니다.

    다음 중 하나면 잎이 됩니다: 깊이가 max_depth에 도달, 어느 한 처리군의
    개수가 min_split 미만, 허용 분할 없음, 최선 분할의 이득 Q(L)+Q(R)-Q(S) <= 0.

    Args:
        subset (RowSubset): 학습 행
        cfg (Optional[GrowthConfig]): 성장 설정 (None이면 기본값)

    Returns:
        TreeNode: 루트 노드

    Raises:
        InsufficientTreatmentError: 루트에서 어느 처리군이든 min_bucket 미만
    """
    cfg = cfg or GrowthConfig()
    stats = node_stats(subset)
    if stats.n_a < cfg.min_bucket or stats.n_b < cfg.min_bucket:
        raise InsufficientTreatmentError(
            f"insufficient representation of both treatments "
            f"(n_A={stats.n_a}, n_B={stats.n_b}, min_bucket={cfg.min_bucket})"
        )
    root = _grow_node(subset, stats, 0, cfg, itertools.count())
    get_logger().debug(f"트리 성장 완료: 잎 {root.n_leaves}개, 목적함수 {root.objective():.4f}")
    return root


@dataclass(frozen=True, eq=False)
class Tree:
    """
    학습된 트리: 루트 노드와 공변량 메타데이터.

    분할의 feature 인덱스는 feature_names 순서를 따르고, 범주형 수준 코드는
    category_levels의 학습 시점 라벨 순서를 따릅니다.
    """

    root: TreeNode
    feature_names: Tuple[str, ...]
    feature_kinds: Tuple[ColumnKind, ...]
    category_levels: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    treatment_labels: Tuple[str, str] = ("A", "B")
    growth: Optional[GrowthConfig] = None

    def with_root(self, root: TreeNode) -> "Tree":
        return Tree(root, self.feature_names, self.feature_kinds, self.category_levels,
                    self.treatment_labels, self.growth)

    @property
    def n_leaves(self) -> int:
        return self.root.n_leaves

    def objective(self) -> float:
        return self.root.objective()

    def encode(self, rows: Union[Dataset, RowSubset]) -> List[np.ndarray]:
        """
        입력 행의 공변량을 학습 시점의 표현으로 변환합니다.

        범주형 값은 라벨로 학습 코드에 대응시키며, 학습 때 없던 라벨은 -1이 되어
        모든 같음(equality) 분할에서 오른쪽으로 갑니다.
        """
        dataset, indices = (rows.parent, rows.indices) if isinstance(rows, RowSubset) else (rows, None)
        encoded = []
        for name, kind in zip(self.feature_names, self.feature_kinds):
            try:
                k = dataset.covariate_index(name)
            except SchemaError:
                raise MissingCovariateError(f"input has no covariate column '{name}' used by the tree") from None
            if dataset.covariate_kinds[k] is not kind:
                raise SchemaError(f"covariate '{name}' is {dataset.covariate_kinds[k].value} "
                                  f"in the input but {kind.value} in the tree")
            vector = dataset.covariates[k] if indices is None else dataset.covariates[k][indices]
            if kind is ColumnKind.CATEGORICAL:
                training = {label: code for code, label in enumerate(self.category_levels[name])}
                remap = np.array([training.get(label, -1) for label in dataset.categories[name]], dtype=np.int64)
                vector = remap[vector] if remap.size else np.asarray(vector, dtype=np.int64)
            encoded.append(vector)
        return encoded

    def describe(self, predicate: SplitPredicate, left: bool = True) -> str:
        """분할 조건을 사람이 읽을 수 있는 문자열로 만듭니다."""
        name = self.feature_names[predicate.feature]
        if predicate.kind is SplitKind.THRESHOLD:
            return f"{name} {'<=' if left else '>'} {predicate.threshold:.6g}"
        label = self.category_levels[name][predicate.level]
        return f"{name} {'=' if left else '!='} {label}"

    def rules(self) -> List[str]:
        """잎마다 한 줄씩 결정 규칙을 반환합니다."""
        lines = []

        def walk(node: TreeNode, conditions: List[str]):
            if node.is_leaf:
                condition = " AND ".join(conditions) if conditions else "(all)"
                label = self.treatment_labels[node.treatment.code]
                lines.append(f"IF {condition} THEN {label}  [{leaf_summary(node.stats)}]")
                return
            walk(node.left, conditions + [self.describe(node.split, left=True)])
            walk(node.right, conditions + [self.describe(node.split, left=False)])

        walk(self.root, [])
        return lines


def leaf_summary(stats: NodeStats) -> str:
    """잎 요약: 처리별 성공 비율과 표본 크기."""
    def fmt(value: Optional[float]) -> str:
        return "NA" if value is None else f"{value:.3f}"

    return (f"P̃_A={fmt(empirical_profit(stats, Treatment.A))}, n_A={stats.n_a}; "
            f"P̃_B={fmt(empirical_profit(stats, Treatment.B))}, n_B={stats.n_b}")


def fit_tree(subset: RowSubset, cfg: Optional[GrowthConfig] = None) -> Tree:
    """grow 결과를 데이터셋의 공변량 메타데이터와 함께 Tree로 감쌉니다."""
    cfg = cfg or GrowthConfig()
    dataset = subset.parent
    root = grow(subset, cfg)
    return Tree(
        root=root,
        feature_names=dataset.covariate_names,
        feature_kinds=dataset.covariate_kinds,
        category_levels=dict(dataset.categories),
        treatment_labels=dataset.treatment_labels,
        growth=cfg,
    )
