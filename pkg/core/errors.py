# -*- coding: utf-8 -*-
"""
오류 정의 모듈 (Error Definitions)

라이브러리 전반에서 사용하는 예외 계층입니다.
CLI는 UsageError를 종료 코드 1로, DataError를 종료 코드 2로 변환합니다.
"""
from typing import Optional


class ABTreeError(Exception):
    """ABtree 라이브러리의 최상위 예외입니다."""


class UsageError(ABTreeError):
    """잘못된 명령행 인자 또는 존재하지 않는 입력 파일."""


class DataError(ABTreeError, ValueError):
    """
    입력 데이터가 계약을 위반했을 때 발생합니다.

    행 번호는 헤더를 제외한 1부터 시작하는 데이터 행 번호입니다.
    """

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        self.row = row
        self.column = column
        parts = [message]
        if row is not None:
            parts.append(f"row {row}")
        if column is not None:
            parts.append(f"column '{column}'")
        super().__init__(", ".join(parts))


class SchemaError(DataError):
    """스키마 정의가 잘못되었거나 파일 헤더와 일치하지 않음."""


class InsufficientTreatmentError(DataError):
    """루트 노드에 두 처리군이 min_bucket 이상 존재하지 않음."""


class ModelFormatError(DataError):
    """모델 JSON 형식 태그 또는 버전이 지원되지 않음."""


class MissingCovariateError(DataError):
    """예측 대상 행에 트리가 사용하는 공변량이 없음."""
