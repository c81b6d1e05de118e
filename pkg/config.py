# -*- coding: utf-8 -*-
"""
ABtree 설정 파일 (ABtree Configuration)

트리 성장, 데이터 입력, 시뮬레이션, 로깅 등 애플리케이션 전반의 기본값을 관리합니다.
"""
from typing import List, Tuple

# 애플리케이션 설정 (Application Settings)
APP_SETTINGS = {
    "app_name": "ABtree",
    "app_version": "1.0.0",
    "model_format": "abtree-model",  # 모델 JSON 스키마 태그
    "model_format_version": 1,
}

# 트리 성장 기본값 (Growth Defaults) - 모든 값은 처리군(arm)별 개수
GROWTH_DEFAULTS = {
    "min_split": 20,
    "min_bucket": 7,
    "max_depth": 5,
}

# CSV / 표 입력 설정 (Table Input Settings)
CSV_SETTINGS = {
    "delimiter": ",",
    "header": True,
    "encoding": "utf-8",
    "treatment_labels": ("A", "B"),  # (대조군, 처리군)
}

# 지원 파일 형식 (Supported File Formats)
SUPPORTED_FILE_EXTENSIONS = {
    "csv": [".csv", ".tsv", ".txt"],
    "excel": [".xlsx", ".xlsm"],
}

# 시뮬레이션 설정 (Simulation Settings)
SIMULATION_SETTINGS = {
    "n_rows": 5000,
    "n_reps": 50,
    "master_seed": 42,
    "fractions": (0.5, 0.25, 0.25),  # 학습 / 검증 / 테스트
    "alpha": 0.05,
    "n_covariates": 5,
    "model_covariates": ("X1", "X2", "X3", "X4"),  # X5는 모델링에서 제외
    "covariate_mode": "verbatim",
    "random_policy_p_b": 0.5,
}

# 공변량 분포 범위 (Covariate Ranges per Mode)
COVARIATE_RANGES = {
    "verbatim": (0.0, 1.0),
    "centered": (-1.0, 1.0),
}

# 부분 트리 선택 설정 (Subtree Selection Settings)
SELECTION_SETTINGS = {
    "default_metric": "assignment-match",
    "metrics": ("assignment-match", "holdout-profit"),
}

# 수치 비교 설정 (Numeric Settings)
NUMERIC_SETTINGS = {
    "tie_tolerance": 1e-12,
}

# 로깅 설정 (Logging Settings)
LOG_SETTINGS = {
    "logger_name": "ABTree",
    "log_dir": "logs",
    "file_logging": True,
    "console_level": "WARNING",
    "max_log_bytes": 10 * 1024 * 1024,  # 10MB
    "max_error_log_bytes": 5 * 1024 * 1024,  # 5MB
}


def get_all_supported_extensions() -> List[str]:
    """
    모든 지원되는 데이터 파일 확장자 목록을 반환합니다.

    Returns:
        list: 지원되는 모든 파일 확장자 리스트
    """
    extensions = []
    for ext_list in SUPPORTED_FILE_EXTENSIONS.values():
        extensions.extend(ext_list)
    return extensions


def get_covariate_range(mode: str) -> Tuple[float, float]:
    """
    공변량 생성 모드에 해당하는 균등분포 범위를 반환합니다.

    Args:
        mode (str): 'verbatim' 또는 'centered'

    Returns:
        Tuple[float, float]: (하한, 상한)
    """
    if mode not in COVARIATE_RANGES:
        raise ValueError(f"unknown covariate mode '{mode}' (expected one of {sorted(COVARIATE_RANGES)})")
    return COVARIATE_RANGES[mode]
