# -*- coding: utf-8 -*-
"""
트리 내보내기 모듈 (Tree Exporter)

학습된 트리를 버전 태그가 붙은 JSON 모델 파일과 DOT 그래프로 저장하고,
모델 파일을 다시 읽어 Tree로 복원합니다. 가지치기 과정도 JSON으로 남길 수 있습니다.
"""
import json
import os
from typing import Any, Dict
import config
from core.data import ColumnKind, Treatment
from core.errors import ModelFormatError, UsageError
from core.prune import PruneSequence
from core.tree import GrowthConfig, NodeStats, SplitKind, SplitPredicate, Tree, TreeNode, leaf_summary
from utils.logger import get_file_logger


class TreeExporter:
    """
    트리 직렬화를 담당하는 클래스입니다.

    주요 기능:
    - 모델 JSON 저장 / 읽기 (형식 태그와 버전 검사)
    - DOT 그래프 생성
    - 가지치기 기록 JSON 저장
    """

    def __init__(self):
        self.model_format = config.APP_SETTINGS["model_format"]
        self.model_version = config.APP_SETTINGS["model_format_version"]
        self.file_logger = get_file_logger()

    # ------------------------------------------------------------------
    # JSON 모델
    # ------------------------------------------------------------------

    def node_to_dict(self, node: TreeNode) -> Dict[str, Any]:
        data = {
            "id": node.node_id,
            "depth": node.depth,
            "stats": node.stats.to_dict(),
            "treatment": node.treatment.value,
        }
        if not node.is_leaf:
            data["split"] = node.split.to_dict()
            data["left"] = self.node_to_dict(node.left)
            data["right"] = self.node_to_dict(node.right)
        return data

    def node_from_dict(self, data: Dict[str, Any]) -> TreeNode:
        split = None
        left = right = None
        if "split" in data:
            spec = data["split"]
            kind = SplitKind(spec["kind"])
            if kind is SplitKind.THRESHOLD:
                split = SplitPredicate.at_threshold(int(spec["feature"]), float(spec["threshold"]))
            else:
                split = SplitPredicate.at_level(int(spec["feature"]), int(spec["level"]))
            left = self.node_from_dict(data["left"])
            right = self.node_from_dict(data["right"])
        return TreeNode(
            node_id=int(data["id"]),
            depth=int(data["depth"]),
            stats=NodeStats.from_dict(data["stats"]),
            treatment=Treatment(data["treatment"]),
            split=split,
            left=left,
            right=right,
        )

    def tree_to_dict(self, tree: Tree) -> Dict[str, Any]:
        """
        Tree를 모델 JSON 문서로 변환합니다.

        Args:
            tree (Tree): 학습된 트리

        Returns:
            Dict[str, Any]: format/version 태그가 붙은 문서
        """
        features = []
        for name, kind in zip(tree.feature_names, tree.feature_kinds):
            feature = {"name": name, "kind": kind.value}
            if kind is ColumnKind.CATEGORICAL:
                feature["levels"] = list(tree.category_levels[name])
            features.append(feature)
        return {
            "format": self.model_format,
            "version": self.model_version,
            "features": features,
            "treatment_labels": list(tree.treatment_labels),
            "growth": tree.growth.to_dict() if tree.growth else None,
            "root": self.node_to_dict(tree.root),
        }

    def tree_from_dict(self, document: Dict[str, Any]) -> Tree:
        """
        모델 JSON 문서에서 Tree를 복원합니다.

        Raises:
            ModelFormatError: 형식 태그나 버전이 다르거나 문서 구조가 잘못됨
        """
        if not isinstance(document, dict) or document.get("format") != self.model_format:
            raise ModelFormatError(f"not an {self.model_format} document")
        if document.get("version") != self.model_version:
            raise ModelFormatError(
                f"unsupported model version {document.get('version')!r} (expected {self.model_version})")
        try:
            features = document["features"]
            names = tuple(f["name"] for f in features)
            kinds = tuple(ColumnKind(f["kind"]) for f in features)
            levels = {f["name"]: tuple(f["levels"]) for f in features if ColumnKind(f["kind"]) is ColumnKind.CATEGORICAL}
            growth = GrowthConfig(**document["growth"]) if document.get("growth") else None
            root = self.node_from_dict(document["root"])
            labels = tuple(document["treatment_labels"])
        except (KeyError, TypeError, ValueError) as e:
            raise ModelFormatError(f"malformed model document: {e}") from e

        if len(labels) != 2:
            raise ModelFormatError("model must name exactly two treatment labels")
        for node in root.iter_nodes():
            if node.is_leaf:
                continue
            split = node.split
            if not 0 <= split.feature < len(names):
                raise ModelFormatError(f"node {node.node_id} splits on unknown feature {split.feature}")
            categorical = kinds[split.feature] is ColumnKind.CATEGORICAL
            if categorical != (split.kind is SplitKind.EQUALITY):
                raise ModelFormatError(
                    f"node {node.node_id}: {split.kind.value} split on {kinds[split.feature].value} "
                    f"feature '{names[split.feature]}'")
            if categorical and not 0 <= split.level < len(levels[names[split.feature]]):
                raise ModelFormatError(
                    f"node {node.node_id}: level {split.level} out of range for feature '{names[split.feature]}'")
        return Tree(root, names, kinds, levels, labels, growth)

    def model_text(self, tree: Tree) -> str:
        """모델 파일에 기록되는 JSON 텍스트."""
        return _dump(self.tree_to_dict(tree))

    def save_model(self, tree: Tree, file_path: str):
        """모델 JSON 파일을 저장합니다."""
        self.save_text(self.model_text(tree), file_path, "모델 저장")

    def load_model(self, file_path: str) -> Tree:
        """
        모델 JSON 파일을 읽습니다.

        Raises:
            UsageError: 파일 없음
            ModelFormatError: JSON이 아니거나 형식이 다름
        """
        if not os.path.exists(file_path):
            raise UsageError(f"file not found: {file_path}")
        try:
            with open(file_path, "r", encoding="utf-8") as f:
                document = json.load(f)
            tree = self.tree_from_dict(document)
        except json.JSONDecodeError as e:
            self.file_logger.log_file_access(file_path, "모델 읽기", success=False, error=e)
            raise ModelFormatError(f"model file '{file_path}' is not valid JSON: {e.msg}") from e
        except ModelFormatError as e:
            self.file_logger.log_file_access(file_path, "모델 읽기", success=False, error=e)
            raise
        self.file_logger.log_file_access(file_path, "모델 읽기", detail=f"잎 {tree.n_leaves}개")
        return tree

    # ------------------------------------------------------------------
    # DOT
    # ------------------------------------------------------------------

    def to_dot(self, tree: Tree) -> str:
        """
        DOT 그래프 텍스트를 만듭니다. 노드마다 DOT 노드 하나입니다.

        잎 라벨은 배정 처리와 처리별 성공 비율, 표본 크기를 보여줍니다.
        """
        lines = [
            "digraph ABtree {",
            '  node [shape=box, fontname="Helvetica"];',
        ]
        for node in tree.root.iter_nodes():
            if node.is_leaf:
                label = _dot_label(tree.treatment_labels[node.treatment.code], leaf_summary(node.stats))
                fill = "#dbe9f6" if node.treatment is Treatment.A else "#fbe3d6"
                lines.append(f'  n{node.node_id} [label="{label}", style=filled, fillcolor="{fill}"];')
            else:
                label = _dot_label(tree.describe(node.split), f"n_A={node.stats.n_a}, n_B={node.stats.n_b}")
                lines.append(f'  n{node.node_id} [label="{label}"];')
        for node in tree.root.iter_nodes():
            if not node.is_leaf:
                lines.append(f'  n{node.node_id} -> n{node.left.node_id} [label="yes"];')
                lines.append(f'  n{node.node_id} -> n{node.right.node_id} [label="no"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    # ------------------------------------------------------------------
    # 가지치기 기록
    # ------------------------------------------------------------------

    def save_prune_log(self, sequence: PruneSequence, file_path: str):
        """가지치기 단계(node id, delta, 목적함수)를 JSON으로 저장합니다."""
        document = {"format": "abtree-prune-log", "version": self.model_version}
        document.update(sequence.to_dict())
        self.save_text(_dump(document), file_path, "가지치기 기록 저장")

    def save_text(self, text: str, file_path: str, operation: str):
        """텍스트 결과를 파일에 씁니다. 출력 디렉토리는 이미 있어야 합니다."""
        directory = os.path.dirname(os.path.abspath(file_path))
        if not os.path.isdir(directory):
            raise UsageError(f"output directory does not exist: {directory}")
        try:
            with open(file_path, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
        except OSError as e:
            self.file_logger.log_file_access(file_path, operation, success=False, error=e)
            raise UsageError(f"cannot write '{file_path}': {e.strerror}") from e
        self.file_logger.log_file_access(file_path, operation)


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _dot_label(*lines: str) -> str:
    # 줄마다 이스케이프한 뒤 DOT 줄바꿈 시퀀스로 연결
    return "\\n".join(_escape(line) for line in lines)


def _dump(document: Dict[str, Any]) -> str:
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"
