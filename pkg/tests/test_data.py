# -*- coding: utf-8 -*-
"""데이터 입력과 분할 테스트."""
import numpy as np
import pandas as pd
import pytest
from core.data import (
    ColumnKind, ColumnSchema, CsvOptions, Dataset, RowSubset, concat_datasets, load_schema_file,
    parse_csv, parse_schema_spec, parse_table, split_dataset, write_csv,
)
from core.errors import DataError, SchemaError, UsageError

SCHEMA = [
    ColumnSchema("y", ColumnKind.OUTCOME),
    ColumnSchema("T", ColumnKind.TREATMENT),
    ColumnSchema("x", ColumnKind.QUANTITATIVE),
    ColumnSchema("c", ColumnKind.CATEGORICAL),
]


def _write(tmp_path, text: str, name: str = "data.csv") -> str:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestSchema:
    """스키마 텍스트 파싱."""

    def test_parse_lines_and_aliases(self):
        schema = parse_schema_spec("y:outcome\nT:treatment\n# comment\n\nx:quantitative\nc:categorical\n")
        assert schema == SCHEMA

    def test_parse_inline_commas(self):
        schema = parse_schema_spec("y:outcome,T:treatment,x:covariate-quantitative,c:covariate-categorical")
        assert schema == SCHEMA

    def test_unknown_kind(self):
        with pytest.raises(SchemaError, match="unknown column kind"):
            parse_schema_spec("y:outcome\nT:treatment\nx:number\n")

    def test_missing_schema_file(self, tmp_path):
        with pytest.raises(UsageError):
            load_schema_file(str(tmp_path / "missing.txt"))

    def test_schema_file_not_utf8(self, tmp_path):
        path = tmp_path / "schema.txt"
        path.write_bytes(b"y:outcome\n\xff\xfe:treatment\n")
        with pytest.raises(SchemaError, match="not valid UTF-8"):
            load_schema_file(str(path))

    def test_two_outcomes_rejected(self, tmp_path):
        path = _write(tmp_path, "y,z,T,x\n1,0,A,0.5\n")
        schema = parse_schema_spec("y:outcome,z:outcome,T:treatment,x:quantitative")
        with pytest.raises(SchemaError, match="exactly one outcome"):
            parse_csv(path, schema)


class TestParseCsv:
    """CSV 입력과 형 변환."""

    def test_typed_columns(self, tmp_path):
        path = _write(tmp_path, "y,T,x,c\n1,A,0.5,red\n0,B,1.5,blue\n1,B,-2,red\n")
        d = parse_csv(path, SCHEMA)
        assert d.n_rows == 3
        assert d.outcome.tolist() == [1, 0, 1]
        assert d.treatment.tolist() == [0, 1, 1]
        assert d.covariates[0].tolist() == [0.5, 1.5, -2.0]
        assert d.categories["c"] == ("red", "blue")
        assert d.covariates[1].tolist() == [0, 1, 0]

    def test_columns_are_read_only(self, tmp_path):
        d = parse_csv(_write(tmp_path, "y,T,x,c\n1,A,0.5,red\n"), SCHEMA)
        with pytest.raises(ValueError):
            d.outcome[0] = 0

    def test_outcome_out_of_domain_names_row(self, tmp_path):
        path = _write(tmp_path, "y,T,x,c\n1,A,0.5,red\n2,B,1.5,blue\n")
        with pytest.raises(DataError, match="outcome out of domain, row 2") as info:
            parse_csv(path, SCHEMA)
        assert info.value.row == 2

    def test_missing_value(self, tmp_path):
        path = _write(tmp_path, "y,T,x,c\n1,A,,red\n")
        with pytest.raises(DataError, match="missing data is not supported"):
            parse_csv(path, SCHEMA)

    def test_unknown_treatment_label(self, tmp_path):
        path = _write(tmp_path, "y,T,x,c\n1,C,0.5,red\n")
        with pytest.raises(DataError, match="not in declared labels"):
            parse_csv(path, SCHEMA)

    def test_custom_treatment_labels(self, tmp_path):
        path = _write(tmp_path, "y,T,x,c\n1,control,0.5,red\n0,promo,1.0,red\n")
        d = parse_csv(path, SCHEMA, CsvOptions(treatment_labels=("control", "promo")))
        assert d.treatment.tolist() == [0, 1]
        assert d.treatment_labels == ("control", "promo")

    def test_unparseable_number(self, tmp_path):
        path = _write(tmp_path, "y,T,x,c\n1,A,abc,red\n")
        with pytest.raises(DataError, match="unparseable numeric value"):
            parse_csv(path, SCHEMA)

    def test_header_mismatch(self, tmp_path):
        path = _write(tmp_path, "y,T,x\n1,A,0.5\n")
        with pytest.raises(SchemaError, match="missing from header"):
            parse_csv(path, SCHEMA)

    def test_extra_header_column(self, tmp_path):
        path = _write(tmp_path, "y,T,x,c,extra\n1,A,0.5,red,z\n")
        with pytest.raises(SchemaError, match="not declared"):
            parse_csv(path, SCHEMA)
        d = parse_csv(path, SCHEMA, CsvOptions(allow_extra_columns=True))
        assert d.n_rows == 1

    def test_no_header(self, tmp_path):
        path = _write(tmp_path, "1,A,0.5,red\n0,B,0.7,blue\n")
        d = parse_csv(path, SCHEMA, CsvOptions(header=False))
        assert d.outcome.tolist() == [1, 0]

    def test_ignore_column_passthrough(self, tmp_path):
        schema = parse_schema_spec("id:ignore,y:outcome,T:treatment,x:quantitative")
        d = parse_csv(_write(tmp_path, "id,y,T,x\nr1,1,A,0.5\nr2,0,B,0.1\n"), schema)
        assert d.passthrough["id"] == ("r1", "r2")
        assert d.covariate_names == ("x",)

    def test_covariates_only(self, tmp_path):
        path = _write(tmp_path, "x,c\n0.5,red\n")
        schema = [ColumnSchema("x", ColumnKind.QUANTITATIVE), ColumnSchema("c", ColumnKind.CATEGORICAL)]
        d = parse_csv(path, schema, CsvOptions(covariates_only=True))
        assert not d.has_outcomes
        assert d.row(0) == {"x": 0.5, "c": "red"}

    def test_missing_file(self, tmp_path):
        with pytest.raises(UsageError, match="file not found"):
            parse_csv(str(tmp_path / "nope.csv"), SCHEMA)

    def test_write_csv_round_trip(self, tmp_path):
        path = _write(tmp_path, "y,T,x,c\n1,A,0.1,red\n0,B,0.30000000000000004,blue\n")
        d = parse_csv(path, SCHEMA)
        out = str(tmp_path / "copy.csv")
        write_csv(d, out)
        again = parse_csv(out, SCHEMA)
        assert again.covariates[0].tolist() == d.covariates[0].tolist()
        assert again.categories == d.categories
        assert again.treatment.tolist() == d.treatment.tolist()


class TestTableFormats:
    """확장자별 입력 선택과 Excel 입력."""

    def test_unsupported_extension(self, tmp_path):
        path = _write(tmp_path, "y,T,x,c\n1,A,0.5,red\n", name="data.json")
        with pytest.raises(UsageError, match="unsupported file type"):
            parse_table(path, SCHEMA)

    def test_parse_xlsx(self, tmp_path):
        path = str(tmp_path / "data.xlsx")
        pd.DataFrame({"y": [1, 0], "T": ["A", "B"], "x": [0.25, 0.75], "c": ["red", "blue"]}).to_excel(
            path, index=False, engine="openpyxl")
        d = parse_table(path, SCHEMA)
        assert d.outcome.tolist() == [1, 0]
        assert d.covariates[0].tolist() == [0.25, 0.75]
        assert d.categories["c"] == ("red", "blue")


class TestSubsets:
    """행 부분집합과 데이터셋 변환."""

    def test_from_indices_validation(self, eight_rows):
        with pytest.raises(DataError):
            RowSubset.from_indices(eight_rows, [0, 8])
        with pytest.raises(DataError):
            RowSubset.from_indices(eight_rows, [1, 1])
        assert RowSubset.from_indices(eight_rows, [3, 1]).indices.tolist() == [1, 3]

    def test_union(self, eight_rows):
        a = RowSubset.from_indices(eight_rows, [0, 2])
        b = RowSubset.from_indices(eight_rows, [2, 5])
        assert a.union(b).indices.tolist() == [0, 2, 5]

    def test_select_covariates(self, make_dataset):
        d = make_dataset(y=[1, 0], t=[0, 1], columns={"a": [1, 2], "b": [3, 4], "c": [5, 6]})
        projected = d.select_covariates(["c", "a"])
        assert projected.covariate_names == ("c", "a")
        assert projected.covariates[0].tolist() == [5.0, 6.0]
        assert projected.n_rows == 2

    def test_concat_remaps_levels(self, make_dataset):
        first = make_dataset(y=[1, 0], t=[0, 1], columns={"c": ["red", "blue"]})
        second = make_dataset(y=[0, 1], t=[1, 0], columns={"c": ["green", "red"]})
        merged = concat_datasets(first, second)
        assert merged.categories["c"] == ("red", "blue", "green")
        assert [merged.row(i)["c"] for i in range(4)] == ["red", "blue", "green", "red"]

    def test_unequal_lengths_rejected(self):
        with pytest.raises(DataError):
            Dataset.from_arrays(np.array([1, 0]), np.array([0, 1, 1]), {"x": np.array([0.1, 0.2])})


class TestSplitDataset:
    """학습 / 검증 / 테스트 분할."""

    def test_sizes_and_partition(self, make_dataset):
        n = 5000
        d = make_dataset(y=[0] * n, t=[0, 1] * (n // 2), columns={"x": np.arange(n)})
        train, val, test = split_dataset(d, (0.5, 0.25, 0.25), seed=3)
        assert (len(train), len(val), len(test)) == (2500, 1250, 1250)
        combined = np.concatenate([train.indices, val.indices, test.indices])
        assert sorted(combined.tolist()) == list(range(n))

    def test_remainder_goes_to_train(self, make_dataset):
        d = make_dataset(y=[0] * 7, t=[0, 1, 0, 1, 0, 1, 0], columns={"x": range(7)})
        train, val, test = split_dataset(d, (0.5, 0.25, 0.25), seed=0)
        assert (len(train), len(val), len(test)) == (5, 1, 1)

    def test_deterministic(self, eight_rows):
        first = split_dataset(eight_rows, seed=11)
        second = split_dataset(eight_rows, seed=11)
        for a, b in zip(first, second):
            assert a.indices.tolist() == b.indices.tolist()

    def test_bad_fractions(self, eight_rows):
        with pytest.raises(ValueError):
            split_dataset(eight_rows, (0.5, 0.5, 0.5))
