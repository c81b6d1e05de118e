# -*- coding: utf-8 -*-
"""
데이터 모델 모듈 (Dataset Model)

열 스키마, 열 단위 데이터셋, 행 부분집합, CSV/Excel 입력과
학습/검증/테스트 분할을 제공합니다.
"""
import math
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union
import numpy as np
import pandas as pd
import config
from core.errors import DataError, SchemaError, UsageError
from utils.logger import get_file_logger, measure_performance
from utils.table_handler import TableHandler


class Treatment(str, Enum):
    """두 처리(arm). A가 대조군입니다."""

    A = "A"
    B = "B"

    @property
    def code(self) -> int:
        return 0 if self is Treatment.A else 1

    @classmethod
    def from_code(cls, code: int) -> "Treatment":
        return cls.B if int(code) == 1 else cls.A


class ColumnKind(str, Enum):
    """열의 역할."""

    OUTCOME = "outcome"
    TREATMENT = "treatment"
    QUANTITATIVE = "covariate-quantitative"
    CATEGORICAL = "covariate-categorical"
    IGNORE = "ignore"

    @property
    def is_covariate(self) -> bool:
        return self in (ColumnKind.QUANTITATIVE, ColumnKind.CATEGORICAL)


# 스키마 파일에서 허용하는 짧은 이름
KIND_ALIASES = {
    "quantitative": ColumnKind.QUANTITATIVE,
    "categorical": ColumnKind.CATEGORICAL,
}


@dataclass(frozen=True)
class ColumnSchema:
    """열 하나의 이름과 역할."""

    name: str
    kind: ColumnKind


@dataclass(frozen=True)
class CsvOptions:
    """
    표 입력 옵션입니다.

    Attributes:
        delimiter: CSV 구분자
        header: 첫 행이 헤더인지 여부
        treatment_labels: 파일에 기록된 (A, B) 처리 라벨
        covariates_only: 결과/처리 열 없이 공변량만 읽기 (예측 입력용)
        allow_extra_columns: 스키마에 없는 헤더 열을 무시
        sheet_name: Excel 시트 이름
    """

    delimiter: str = config.CSV_SETTINGS["delimiter"]
    header: bool = config.CSV_SETTINGS["header"]
    treatment_labels: Tuple[str, str] = config.CSV_SETTINGS["treatment_labels"]
    covariates_only: bool = False
    allow_extra_columns: bool = False
    sheet_name: Optional[str] = None


def parse_kind(text: str) -> ColumnKind:
    """문자열을 ColumnKind로 변환합니다. 짧은 별칭도 허용합니다."""
    key = text.strip().lower()
    if key in KIND_ALIASES:
        return KIND_ALIASES[key]
    try:
        return ColumnKind(key)
    except ValueError:
        allowed = [k.value for k in ColumnKind] + list(KIND_ALIASES)
        raise SchemaError(f"unknown column kind '{text}' (expected one of {', '.join(allowed)})") from None


def validate_schema(schema: Sequence[ColumnSchema], covariates_only: bool = False) -> None:
    """
    스키마 불변식을 검사합니다.

    결과 열과 처리 열이 정확히 하나씩, 공변량 열이 하나 이상 있어야 합니다.
    covariates_only이면 공변량 조건만 검사합니다.
    """
    names = [c.name for c in schema]
    duplicates = sorted({n for n in names if names.count(n) > 1})
    if duplicates:
        raise SchemaError(f"duplicate column name(s) in schema: {', '.join(duplicates)}")

    kinds = [c.kind for c in schema]
    if not covariates_only:
        for kind in (ColumnKind.OUTCOME, ColumnKind.TREATMENT):
            count = kinds.count(kind)
            if count != 1:
                raise SchemaError(f"schema must declare exactly one {kind.value} column (found {count})")
    if not any(k.is_covariate for k in kinds):
        raise SchemaError("schema must declare at least one covariate column")


def parse_schema_spec(text: str) -> List[ColumnSchema]:
    """
    `name:kind` 형식의 스키마 텍스트를 파싱합니다.

    줄바꿈 또는 쉼표로 항목을 구분하며, '#' 이후는 주석입니다.

    Args:
        text (str): 스키마 텍스트

    Returns:
        List[ColumnSchema]: 열 스키마 목록 (파일 순서)
    """
    schema = []
    entries = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        entries.extend(line.split(","))
    for entry in entries:
        entry = entry.strip()
        if not entry:
            continue
        if ":" not in entry:
            raise SchemaError(f"schema entry '{entry}' is not of the form name:kind")
        name, kind = entry.rsplit(":", 1)
        name = name.strip()
        if not name:
            raise SchemaError(f"schema entry '{entry}' has an empty column name")
        schema.append(ColumnSchema(name, parse_kind(kind)))
    if not schema:
        raise SchemaError("schema is empty")
    return schema


def load_schema_file(path: str) -> List[ColumnSchema]:
    """
    스키마 사이드카 파일을 읽습니다.

    Args:
        path (str): 스키마 파일 경로

    Returns:
        List[ColumnSchema]: 열 스키마 목록
    """
    if not os.path.exists(path):
        raise UsageError(f"schema file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except UnicodeDecodeError as e:
        raise SchemaError(f"schema file '{path}' is not valid UTF-8") from e
    schema = parse_schema_spec(text)
    get_file_logger().log_file_access(path, "read", detail=f"{len(schema)}개 열")
    return schema


def _freeze(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    열 단위 데이터셋입니다. 생성 후에는 변경되지 않습니다.

    outcome은 {0,1}의 int8, treatment는 0=A, 1=B의 int8 벡터입니다.
    공변량은 연속형이면 float64, 범주형이면 등장 순서대로 부여된 int64 코드입니다.
    공변량만 읽은 데이터셋(예측 입력)은 outcome과 treatment가 None입니다.
    """

    schema: Tuple[ColumnSchema, ...]
    outcome: Optional[np.ndarray]
    treatment: Optional[np.ndarray]
    covariate_names: Tuple[str, ...]
    covariate_kinds: Tuple[ColumnKind, ...]
    covariates: Tuple[np.ndarray, ...]
    categories: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    treatment_labels: Tuple[str, str] = ("A", "B")
    passthrough: Dict[str, Tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.covariate_names) != len(self.covariates) or len(self.covariate_kinds) != len(self.covariates):
            raise SchemaError("covariate names, kinds and vectors must align")
        lengths = {len(v) for v in self.covariates}
        for vector in (self.outcome, self.treatment):
            if vector is not None:
                lengths.add(len(vector))
        lengths.update(len(v) for v in self.passthrough.values())
        if len(lengths) > 1:
            raise DataError(f"columns have unequal lengths {sorted(lengths)}")

        if self.outcome is not None:
            object.__setattr__(self, "outcome", _freeze(np.asarray(self.outcome, dtype=np.int8)))
            if np.any((self.outcome != 0) & (self.outcome != 1)):
                raise DataError("outcome out of domain")
        if self.treatment is not None:
            object.__setattr__(self, "treatment", _freeze(np.asarray(self.treatment, dtype=np.int8)))
            if np.any((self.treatment != 0) & (self.treatment != 1)):
                raise DataError("treatment codes must be 0 (A) or 1 (B)")

        frozen = []
        for name, kind, vector in zip(self.covariate_names, self.covariate_kinds, self.covariates):
            if kind is ColumnKind.CATEGORICAL:
                vector = np.asarray(vector, dtype=np.int64)
                levels = self.categories.get(name)
                if levels is None:
                    raise SchemaError(f"categorical column '{name}' has no level dictionary")
                if len(vector) and (vector.min() < 0 or vector.max() >= len(levels)):
                    raise DataError(f"category codes out of range in column '{name}'")
            else:
                vector = np.asarray(vector, dtype=np.float64)
            frozen.append(_freeze(vector))
        object.__setattr__(self, "covariates", tuple(frozen))

    @property
    def n_rows(self) -> int:
        if self.covariates:
            return len(self.covariates[0])
        return 0 if self.outcome is None else len(self.outcome)

    @property
    def n_covariates(self) -> int:
        return len(self.covariates)

    @property
    def has_outcomes(self) -> bool:
        return self.outcome is not None and self.treatment is not None

    def covariate_index(self, name: str) -> int:
        """공변량 이름의 열 인덱스를 반환합니다."""
        try:
            return self.covariate_names.index(name)
        except ValueError:
            raise SchemaError(f"no covariate column named '{name}'") from None

    def is_categorical(self, k: int) -> bool:
        return self.covariate_kinds[k] is ColumnKind.CATEGORICAL

    def all_rows(self) -> "RowSubset":
        """전체 행을 가리키는 부분집합을 반환합니다."""
        return RowSubset(self, np.arange(self.n_rows, dtype=np.int64))

    def select_covariates(self, names: Iterable[str]) -> "Dataset":
        """
        지정한 공변량만 남긴 새 데이터셋을 반환합니다. 행 순서와 개수는 같습니다.

        Args:
            names (Iterable[str]): 남길 공변량 이름 (이 순서가 새 열 순서)

        Returns:
            Dataset: 투영된 데이터셋
        """
        names = list(names)
        indices = [self.covariate_index(n) for n in names]
        # 스키마 순서가 아니라 요청 순서를 열 순서로 사용
        covariate_schema = tuple(ColumnSchema(n, self.covariate_kinds[i]) for n, i in zip(names, indices))
        schema = tuple(c for c in self.schema if not c.kind.is_covariate) + covariate_schema
        return Dataset(
            schema=schema,
            outcome=self.outcome,
            treatment=self.treatment,
            covariate_names=tuple(names),
            covariate_kinds=tuple(self.covariate_kinds[i] for i in indices),
            covariates=tuple(self.covariates[i] for i in indices),
            categories={n: self.categories[n] for n in names if n in self.categories},
            treatment_labels=self.treatment_labels,
            passthrough=dict(self.passthrough),
        )

    def covariate_matrix(self, names: Optional[Sequence[str]] = None) -> np.ndarray:
        """공변량을 (n_rows, p) float 행렬로 반환합니다. 범주형은 코드 값입니다."""
        if names is None:
            columns = self.covariates
        else:
            columns = [self.covariates[self.covariate_index(n)] for n in names]
        if not columns:
            return np.empty((self.n_rows, 0))
        return np.column_stack([np.asarray(c, dtype=np.float64) for c in columns])

    def row(self, i: int) -> Dict[str, Any]:
        """i번째 행의 공변량 레코드 (연속형은 float, 범주형은 라벨)."""
        record = {}
        for name, kind, vector in zip(self.covariate_names, self.covariate_kinds, self.covariates):
            if kind is ColumnKind.CATEGORICAL:
                record[name] = self.categories[name][int(vector[i])]
            else:
                record[name] = float(vector[i])
        return record

    def treatment_label(self, code: int) -> str:
        return self.treatment_labels[int(code)]

    @classmethod
    def from_arrays(cls, outcome: np.ndarray, treatment: np.ndarray,
                    quantitative: Mapping[str, np.ndarray],
                    outcome_name: str = "y", treatment_name: str = "T",
                    treatment_labels: Tuple[str, str] = ("A", "B")) -> "Dataset":
        """
        연속형 공변량 배열로부터 데이터셋을 만듭니다. (시뮬레이션용)

        Args:
            outcome (np.ndarray): 0/1 결과
            treatment (np.ndarray): 0=A, 1=B
            quantitative (Mapping[str, np.ndarray]): 공변량 이름 -> 값
            outcome_name (str): 결과 열 이름
            treatment_name (str): 처리 열 이름
            treatment_labels (Tuple[str, str]): 처리 라벨

        Returns:
            Dataset: 새 데이터셋
        """
        names = tuple(quantitative)
        schema = (ColumnSchema(outcome_name, ColumnKind.OUTCOME),
                  ColumnSchema(treatment_name, ColumnKind.TREATMENT)) + tuple(
            ColumnSchema(n, ColumnKind.QUANTITATIVE) for n in names)
        return cls(
            schema=schema,
            outcome=outcome,
            treatment=treatment,
            covariate_names=names,
            covariate_kinds=tuple(ColumnKind.QUANTITATIVE for _ in names),
            covariates=tuple(quantitative[n] for n in names),
            treatment_labels=treatment_labels,
        )


@dataclass(frozen=True, eq=False)
class RowSubset:
    """
    데이터셋의 행 부분집합 (공변량 공간의 한 셀 S에 해당).

    indices는 정렬되고 중복이 없는 행 번호 배열입니다.
    외부 입력은 from_indices로 만들어 검증합니다.
    """

    parent: Dataset
    indices: np.ndarray

    @classmethod
    def from_indices(cls, parent: Dataset, indices: Iterable[int]) -> "RowSubset":
        array = np.asarray(list(indices) if not isinstance(indices, np.ndarray) else indices, dtype=np.int64)
        if array.size and (array.min() < 0 or array.max() >= parent.n_rows):
            raise DataError(f"row index out of range [0, {parent.n_rows})")
        unique = np.unique(array)
        if unique.size != array.size:
            raise DataError("row indices must be unique")
        return cls(parent, unique)

    def __len__(self) -> int:
        return int(self.indices.size)

    @property
    def size(self) -> int:
        return len(self)

    @property
    def outcome(self) -> np.ndarray:
        if self.parent.outcome is None:
            raise DataError("dataset has no outcome column")
        return self.parent.outcome[self.indices]

    @property
    def treatment(self) -> np.ndarray:
        if self.parent.treatment is None:
            raise DataError("dataset has no treatment column")
        return self.parent.treatment[self.indices]

    def covariate(self, k: int) -> np.ndarray:
        return self.parent.covariates[k][self.indices]

    def take(self, mask: np.ndarray) -> "RowSubset":
        """현재 행 순서에 대한 불리언 마스크로 부분집합을 만듭니다."""
        return RowSubset(self.parent, self.indices[mask])

    def union(self, other: "RowSubset") -> "RowSubset":
        if other.parent is not self.parent:
            raise DataError("cannot combine row subsets of different datasets")
        return RowSubset(self.parent, np.union1d(self.indices, other.indices))

    def with_parent(self, parent: Dataset) -> "RowSubset":
        """같은 행 번호를 다른(같은 행 수의) 데이터셋 위에서 가리킵니다."""
        if parent.n_rows != self.parent.n_rows:
            raise DataError("parent datasets differ in row count")
        return RowSubset(parent, self.indices)


# ---------------------------------------------------------------------------
# 입력 (Ingestion)
# ---------------------------------------------------------------------------

def _first_bad(mask: np.ndarray) -> Optional[int]:
    hits = np.flatnonzero(mask)
    return int(hits[0]) if hits.size else None


def _frame_to_dataset(frame: pd.DataFrame, schema: Sequence[ColumnSchema], options: CsvOptions) -> Dataset:
    """문자열 DataFrame을 스키마에 따라 형 변환하여 Dataset으로 만듭니다."""
    validate_schema(schema, options.covariates_only)
    names = [c.name for c in schema]

    if options.header:
        header = [str(c) for c in frame.columns]
        frame.columns = header
        missing = [n for n in names if n not in header]
        if missing:
            raise SchemaError(f"schema column(s) missing from header: {', '.join(missing)}")
        extra = [h for h in header if h not in names]
        if extra and not options.allow_extra_columns:
            raise SchemaError(f"header column(s) not declared in schema: {', '.join(extra)}")
    else:
        if frame.shape[1] != len(schema):
            raise SchemaError(f"file has {frame.shape[1]} columns but schema declares {len(schema)}")
        frame.columns = names

    label_a, label_b = options.treatment_labels
    if label_a == label_b:
        raise SchemaError("treatment labels for A and B must differ")

    outcome = treatment = None
    covariate_names, covariate_kinds, covariates = [], [], []
    categories: Dict[str, Tuple[str, ...]] = {}
    passthrough: Dict[str, Tuple[str, ...]] = {}
    kept_schema = []

    for column in schema:
        kind = column.kind
        if options.covariates_only and kind in (ColumnKind.OUTCOME, ColumnKind.TREATMENT):
            continue
        raw = frame[column.name].to_numpy(dtype=object)
        if kind is ColumnKind.IGNORE:
            passthrough[column.name] = tuple(str(v) for v in raw)
            kept_schema.append(column)
            continue

        values = np.array([str(v).strip() for v in raw], dtype=object)
        empty = _first_bad(values == "")
        if empty is not None:
            raise DataError("missing value (missing data is not supported)", row=empty + 1, column=column.name)

        if kind is ColumnKind.OUTCOME:
            numeric = pd.to_numeric(pd.Series(values), errors="coerce").to_numpy(dtype=np.float64)
            bad = _first_bad(~np.isin(numeric, (0.0, 1.0)))
            if bad is not None:
                raise DataError("outcome out of domain", row=bad + 1, column=column.name)
            outcome = numeric.astype(np.int8)
        elif kind is ColumnKind.TREATMENT:
            is_a = values == label_a
            is_b = values == label_b
            bad = _first_bad(~(is_a | is_b))
            if bad is not None:
                raise DataError(f"treatment '{values[bad]}' not in declared labels {label_a}/{label_b}",
                                row=bad + 1, column=column.name)
            treatment = is_b.astype(np.int8)
        elif kind is ColumnKind.QUANTITATIVE:
            numeric = pd.to_numeric(pd.Series(values), errors="coerce").to_numpy(dtype=np.float64)
            bad = _first_bad(~np.isfinite(numeric))
            if bad is not None:
                raise DataError(f"unparseable numeric value '{values[bad]}'", row=bad + 1, column=column.name)
            covariate_names.append(column.name)
            covariate_kinds.append(kind)
            covariates.append(numeric)
        else:
            # 등장 순서대로 코드 부여
            codes, uniques = pd.factorize(values, sort=False)
            covariate_names.append(column.name)
            covariate_kinds.append(kind)
            covariates.append(codes.astype(np.int64))
            categories[column.name] = tuple(str(u) for u in uniques)
        kept_schema.append(column)

    return Dataset(
        schema=tuple(kept_schema),
        outcome=outcome,
        treatment=treatment,
        covariate_names=tuple(covariate_names),
        covariate_kinds=tuple(covariate_kinds),
        covariates=tuple(covariates),
        categories=categories,
        treatment_labels=(label_a, label_b),
        passthrough=passthrough,
    )


def parse_csv(path: str, schema: Sequence[ColumnSchema], options: Optional[CsvOptions] = None) -> Dataset:
    """
    CSV 파일을 스키마에 따라 Dataset으로 읽습니다.

    Args:
        path (str): CSV 파일 경로
        schema (Sequence[ColumnSchema]): 열 스키마
        options (Optional[CsvOptions]): 구분자 / 헤더 / 처리 라벨 옵션

    Returns:
        Dataset: 형 변환된 데이터셋

    Raises:
        DataError: 결측값, 범위 밖 결과값, 선언되지 않은 처리 라벨, 숫자 변환 실패
    """
    options = options or CsvOptions()
    frame = TableHandler().read_csv_frame(path, delimiter=options.delimiter, header=options.header)
    return _load_frame(path, frame, schema, options)


def parse_excel(path: str, schema: Sequence[ColumnSchema], options: Optional[CsvOptions] = None) -> Dataset:
    """Excel 시트를 스키마에 따라 Dataset으로 읽습니다. 규칙은 parse_csv와 같습니다."""
    options = options or CsvOptions()
    frame = TableHandler().read_excel_frame(path, header=options.header, sheet_name=options.sheet_name)
    return _load_frame(path, frame, schema, options)


@measure_performance("data.parse_table")
def parse_table(path: str, schema: Sequence[ColumnSchema], options: Optional[CsvOptions] = None) -> Dataset:
    """
    확장자에 따라 CSV 또는 Excel 입력을 선택합니다.

    Raises:
        UsageError: 지원하지 않는 확장자
    """
    handler = TableHandler()
    if not handler.can_handle(path):
        supported = ", ".join(config.get_all_supported_extensions())
        raise UsageError(f"unsupported file type: {path} (expected one of {supported})")
    if handler.is_excel(path):
        return parse_excel(path, schema, options)
    return parse_csv(path, schema, options)


def _load_frame(path: str, frame: pd.DataFrame, schema: Sequence[ColumnSchema], options: CsvOptions) -> Dataset:
    try:
        dataset = _frame_to_dataset(frame, schema, options)
    except DataError as e:
        get_file_logger().log_file_access(path, "read", success=False, error=e)
        raise
    get_file_logger().log_file_access(path, "read", detail=f"{dataset.n_rows}행, 공변량 {dataset.n_covariates}개")
    return dataset


def write_csv(dataset: Dataset, path: str, delimiter: str = ",", header: bool = True) -> None:
    """
    데이터셋을 스키마 순서대로 CSV로 씁니다.

    같은 스키마로 다시 parse_csv 하면 동일한 열 벡터를 얻습니다.
    연속형 값은 repr로 기록하여 float 값이 정확히 복원됩니다.
    """
    columns = {}
    for column in dataset.schema:
        if column.kind is ColumnKind.OUTCOME:
            columns[column.name] = [str(int(v)) for v in dataset.outcome]
        elif column.kind is ColumnKind.TREATMENT:
            columns[column.name] = [dataset.treatment_labels[int(v)] for v in dataset.treatment]
        elif column.kind is ColumnKind.IGNORE:
            columns[column.name] = list(dataset.passthrough[column.name])
        else:
            vector = dataset.covariates[dataset.covariate_index(column.name)]
            if column.kind is ColumnKind.CATEGORICAL:
                levels = dataset.categories[column.name]
                columns[column.name] = [levels[int(v)] for v in vector]
            else:
                columns[column.name] = [repr(float(v)) for v in vector]
    frame = pd.DataFrame(columns, dtype=object)
    TableHandler().write_csv_frame(frame, path, delimiter=delimiter, header=header)
    get_file_logger().log_file_access(path, "write", detail=f"{dataset.n_rows}행")


def concat_datasets(first: Dataset, second: Dataset) -> Dataset:
    """
    같은 스키마의 두 데이터셋을 행 방향으로 합칩니다.

    범주형 수준은 라벨 기준으로 맞추며, 두 번째 데이터셋에만 있는 수준은
    첫 번째 데이터셋의 수준 뒤에 등장 순서대로 추가됩니다.
    """
    if [(c.name, c.kind) for c in first.schema] != [(c.name, c.kind) for c in second.schema]:
        raise SchemaError("cannot combine datasets with different schemas")
    if first.treatment_labels != second.treatment_labels:
        raise SchemaError("cannot combine datasets with different treatment labels")

    covariates = []
    categories = {}
    for k, name in enumerate(first.covariate_names):
        a, b = first.covariates[k], second.covariates[k]
        if first.is_categorical(k):
            levels = list(first.categories[name])
            lookup = {label: code for code, label in enumerate(levels)}
            remap = np.empty(len(second.categories[name]), dtype=np.int64)
            for code, label in enumerate(second.categories[name]):
                if label not in lookup:
                    lookup[label] = len(levels)
                    levels.append(label)
                remap[code] = lookup[label]
            covariates.append(np.concatenate([a, remap[b]]))
            categories[name] = tuple(levels)
        else:
            covariates.append(np.concatenate([a, b]))

    def _join(x, y):
        return None if x is None or y is None else np.concatenate([x, y])

    return Dataset(
        schema=first.schema,
        outcome=_join(first.outcome, second.outcome),
        treatment=_join(first.treatment, second.treatment),
        covariate_names=first.covariate_names,
        covariate_kinds=first.covariate_kinds,
        covariates=tuple(covariates),
        categories=categories,
        treatment_labels=first.treatment_labels,
        passthrough={n: first.passthrough[n] + second.passthrough[n] for n in first.passthrough},
    )


# ---------------------------------------------------------------------------
# 분할 (Partitioning)
# ---------------------------------------------------------------------------

def split_dataset(d: Union[Dataset, RowSubset],
                  fractions: Sequence[float] = config.SIMULATION_SETTINGS["fractions"],
                  seed: int = 0) -> Tuple[RowSubset, RowSubset, RowSubset]:
    """
    행을 학습 / 검증 / 테스트로 결정적으로 나눕니다.

    각 크기는 floor(f * n)이고, 나머지 행은 학습 세트에 배정됩니다.
    같은 (d, fractions, seed)이면 항상 같은 결과를 돌려줍니다.

    Args:
        d (Dataset | RowSubset): 나눌 데이터
        fractions (Sequence[float]): (train, val, test) 비율, 합이 1
        seed (int): 순열 생성 시드

    Returns:
        Tuple[RowSubset, RowSubset, RowSubset]: 서로소이고 합집합이 전체인 세 부분집합
    """
    if len(fractions) != 3:
        raise ValueError("fractions must be a (train, val, test) triple")
    if any(f <= 0 for f in fractions):
        raise ValueError(f"every split fraction must be positive, got {tuple(fractions)}")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError(f"split fractions must sum to 1, got {sum(fractions)!r}")

    base = d if isinstance(d, RowSubset) else d.all_rows()
    n = len(base)
    # 부동소수 오차로 floor가 한 칸 내려가지 않도록 작은 여유를 둔다
    n_val = math.floor(fractions[1] * n + 1e-9)
    n_test = math.floor(fractions[2] * n + 1e-9)
    n_train = n - n_val - n_test

    permutation = np.random.default_rng(seed).permutation(n)
    positions = (permutation[:n_train], permutation[n_train:n_train + n_val], permutation[n_train + n_val:])
    return tuple(RowSubset(base.parent, np.sort(base.indices[p])) for p in positions)
