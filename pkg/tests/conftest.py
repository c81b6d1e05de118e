# -*- coding: utf-8 -*-
"""공용 픽스처."""
from typing import Dict, Sequence
import numpy as np
import pandas as pd
import pytest
import config
from core.data import ColumnKind, ColumnSchema, Dataset
from utils.logger import LoggerManager


@pytest.fixture(autouse=True)
def isolated_logs(tmp_path, monkeypatch):
    """로그 파일을 테스트별 임시 디렉토리로 보냅니다."""
    monkeypatch.setitem(config.LOG_SETTINGS, "log_dir", str(tmp_path / "logs"))
    LoggerManager.reset()
    yield
    LoggerManager.reset()


def build_dataset(y: Sequence[int], t: Sequence[int], columns: Dict[str, Sequence]) -> Dataset:
    """
    값 목록으로 데이터셋을 만듭니다. 문자열 열은 범주형, 나머지는 연속형입니다.
    """
    schema = [ColumnSchema("y", ColumnKind.OUTCOME), ColumnSchema("T", ColumnKind.TREATMENT)]
    names, kinds, vectors, categories = [], [], [], {}
    for name, values in columns.items():
        values = list(values)
        if values and isinstance(values[0], str):
            codes, uniques = pd.factorize(np.asarray(values, dtype=object), sort=False)
            kind = ColumnKind.CATEGORICAL
            vectors.append(codes.astype(np.int64))
            categories[name] = tuple(str(u) for u in uniques)
        else:
            kind = ColumnKind.QUANTITATIVE
            vectors.append(np.asarray(values, dtype=np.float64))
        schema.append(ColumnSchema(name, kind))
        names.append(name)
        kinds.append(kind)
    return Dataset(
        schema=tuple(schema),
        outcome=np.asarray(y),
        treatment=np.asarray(t),
        covariate_names=tuple(names),
        covariate_kinds=tuple(kinds),
        covariates=tuple(vectors),
        categories=categories,
    )


@pytest.fixture
def make_dataset():
    return build_dataset


@pytest.fixture
def eight_rows() -> Dataset:
    """x=1..4 각 값마다 A, B 한 행씩. x<=2에서는 A가, x>2에서는 B가 성공."""
    return build_dataset(
        y=[1, 0, 1, 0, 0, 1, 0, 1],
        t=[0, 1, 0, 1, 0, 1, 0, 1],
        columns={"x": [1, 1, 2, 2, 3, 3, 4, 4]},
    )


@pytest.fixture
def schema_text() -> str:
    return "y:outcome\nT:treatment\nx:covariate-quantitative\n"
