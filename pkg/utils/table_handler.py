# -*- coding: utf-8 -*-
"""
표 파일 처리 모듈 (Table File Handler)

pandas와 openpyxl을 사용하여 CSV / Excel 파일을 문자열 표로 읽고 씁니다.
값의 형 변환은 core.data에서 스키마에 따라 수행합니다.
"""
import os
from typing import Optional
import pandas as pd
import config
from core.errors import DataError, UsageError


class TableHandler:
    """
    CSV와 Excel 데이터 파일을 읽고 쓰는 클래스입니다.

    주요 기능:
    - 파일 형식 판별
    - 모든 셀을 문자열로 읽기 (결측값 자동 변환 없음)
    - 문자열 표를 CSV로 쓰기
    """

    def __init__(self):
        """TableHandler 인스턴스를 초기화합니다."""
        self.csv_extensions = config.SUPPORTED_FILE_EXTENSIONS["csv"]
        self.excel_extensions = config.SUPPORTED_FILE_EXTENSIONS["excel"]

    def can_handle(self, file_path: str) -> bool:
        """
        파일이 이 핸들러가 처리할 수 있는 형식인지 확인합니다.

        Args:
            file_path (str): 파일 경로

        Returns:
            bool: 처리 가능 여부
        """
        return any(file_path.lower().endswith(ext) for ext in config.get_all_supported_extensions())

    def is_excel(self, file_path: str) -> bool:
        """Excel 형식 여부를 반환합니다."""
        return any(file_path.lower().endswith(ext) for ext in self.excel_extensions)

    def read_csv_frame(self, file_path: str, delimiter: str = ",", header: bool = True) -> pd.DataFrame:
        """
        CSV 파일을 문자열 DataFrame으로 읽습니다.

        헤더가 없으면 열 이름은 0부터 시작하는 정수입니다.

        Args:
            file_path (str): CSV 파일 경로
            delimiter (str): 구분자
            header (bool): 첫 행이 헤더인지 여부

        Returns:
            pd.DataFrame: 모든 값이 str인 DataFrame
        """
        self._check_exists(file_path)
        try:
            frame = pd.read_csv(
                file_path,
                sep=delimiter,
                header=0 if header else None,
                dtype=str,
                keep_default_na=False,
                na_filter=False,
                encoding=config.CSV_SETTINGS["encoding"],
                skip_blank_lines=True,
            )
        except pd.errors.EmptyDataError as e:
            raise DataError(f"empty data file '{file_path}'") from e
        except pd.errors.ParserError as e:
            raise DataError(f"malformed CSV '{file_path}': {e}") from e
        except UnicodeDecodeError as e:
            raise DataError(f"file '{file_path}' is not valid UTF-8") from e
        return frame

    def read_excel_frame(self, file_path: str, header: bool = True,
                         sheet_name: Optional[str] = None) -> pd.DataFrame:
        """
        Excel 시트를 문자열 DataFrame으로 읽습니다.

        Args:
            file_path (str): Excel 파일 경로
            header (bool): 첫 행이 헤더인지 여부
            sheet_name (Optional[str]): 시트 이름 (None이면 첫 번째 시트)

        Returns:
            pd.DataFrame: 모든 값이 str인 DataFrame
        """
        self._check_exists(file_path)
        try:
            frame = pd.read_excel(
                file_path,
                sheet_name=sheet_name if sheet_name is not None else 0,
                header=0 if header else None,
                dtype=str,
                engine="openpyxl",
                keep_default_na=False,
                na_filter=False,
            )
        except ValueError as e:
            raise DataError(f"cannot read sheet from '{file_path}': {e}") from e
        # 빈 셀은 빈 문자열로 통일 (결측 검사는 core.data에서 수행)
        return frame.fillna("")

    def write_csv_frame(self, frame: pd.DataFrame, file_path: str, delimiter: str = ",",
                        header: bool = True):
        """
        DataFrame을 CSV로 씁니다.

        Args:
            frame (pd.DataFrame): 저장할 표
            file_path (str): 출력 경로
            delimiter (str): 구분자
            header (bool): 헤더 출력 여부
        """
        directory = os.path.dirname(os.path.abspath(file_path))
        if not os.path.isdir(directory):
            raise UsageError(f"output directory does not exist: {directory}")
        try:
            frame.to_csv(file_path, sep=delimiter, header=header, index=False,
                         encoding=config.CSV_SETTINGS["encoding"], lineterminator="\n")
        except OSError as e:
            raise UsageError(f"cannot write '{file_path}': {e.strerror}") from e

    def _check_exists(self, file_path: str):
        if not os.path.exists(file_path):
            raise UsageError(f"file not found: {file_path}")
