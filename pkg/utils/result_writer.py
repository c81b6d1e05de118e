# -*- coding: utf-8 -*-
"""
결과 출력 모듈 (Result Writer)

시뮬레이션 결과 CSV, 예측 배정 CSV, 요약표를 씁니다.
"""
from typing import Optional, Sequence, Tuple
import numpy as np
import pandas as pd
from core.simulation import ExperimentResult, summarize
from utils.logger import get_file_logger
from utils.table_handler import TableHandler


class ResultWriter:
    """
    표 형태의 명령 결과를 파일로 쓰는 클래스입니다.
    """

    def __init__(self):
        self.table_handler = TableHandler()
        self.file_logger = get_file_logger()

    def results_frame(self, results: Sequence[ExperimentResult]) -> pd.DataFrame:
        """여러 시나리오의 기록을 하나의 표로 합칩니다."""
        return pd.concat([r.to_frame() for r in results], ignore_index=True)

    def write_results(self, results: Sequence[ExperimentResult], file_path: str):
        """
        결과 CSV (scenario, rep, method, mean_profit)를 씁니다.

        Args:
            results (Sequence[ExperimentResult]): 시나리오별 실험 결과
            file_path (str): 출력 경로
        """
        frame = self.results_frame(results)
        self._write(frame, file_path, "결과 저장")

    def write_oracle(self, results: Sequence[ExperimentResult], file_path: str):
        """반복별 오라클 기대 이익과 표준오차를 씁니다."""
        frame = pd.concat([r.oracle_frame() for r in results], ignore_index=True)
        self._write(frame, file_path, "오라클 기준값 저장")

    def assignment_frame(self, assignments: np.ndarray, treatment_labels: Tuple[str, str],
                         row_index: Optional[np.ndarray] = None) -> pd.DataFrame:
        """
        배정 표 (row_index, predicted_treatment). 처리 값은 모델의 원래 라벨입니다.
        """
        codes = np.asarray(assignments, dtype=np.int64)
        if row_index is None:
            row_index = np.arange(codes.size)
        labels = np.asarray(treatment_labels, dtype=object)[codes]
        return pd.DataFrame({"row_index": np.asarray(row_index, dtype=np.int64), "predicted_treatment": labels})

    def write_assignments(self, assignments: np.ndarray, treatment_labels: Tuple[str, str], file_path: str,
                          row_index: Optional[np.ndarray] = None):
        frame = self.assignment_frame(assignments, treatment_labels, row_index)
        self._write(frame, file_path, "배정 저장")

    def format_summary(self, results: Sequence[ExperimentResult]) -> str:
        """시나리오별 방법별 mean ± sd 요약표 텍스트."""
        summary = summarize(list(results))
        lines = [f"{'scenario':<16} {'method':<16} {'mean':>8} {'sd':>8} {'min':>8} {'max':>8} {'reps':>5}"]
        for row in summary.itertuples(index=False):
            sd = 0.0 if pd.isna(row.sd) else row.sd
            lines.append(f"{row.scenario:<16} {row.method:<16} {row.mean:>8.4f} {sd:>8.4f} "
                         f"{row.min:>8.4f} {row.max:>8.4f} {row.reps:>5d}")
        return "\n".join(lines) + "\n"

    def _write(self, frame: pd.DataFrame, file_path: str, operation: str):
        try:
            self.table_handler.write_csv_frame(frame, file_path)
        except Exception as e:
            self.file_logger.log_file_access(file_path, operation, success=False, error=e)
            raise
        self.file_logger.log_file_access(file_path, operation, detail=f"{len(frame)}행")
