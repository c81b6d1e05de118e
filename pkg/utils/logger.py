# -*- coding: utf-8 -*-
"""
로깅 시스템 (Logging System)

애플리케이션 전체의 로깅을 관리합니다.
"""
import functools
import logging
import os
import sys
import time
from logging.handlers import RotatingFileHandler
from typing import Dict, Optional
import config


class ConsoleFilter(logging.Filter):
    """file_only로 표시된 기록은 콘솔에 내보내지 않습니다."""

    def filter(self, record: logging.LogRecord) -> bool:
        return not getattr(record, "file_only", False)


class ApplicationLogger:
    """
    애플리케이션 로거 클래스입니다.

    파일과 콘솔 출력을 지원하며, 로그 파일 로테이션 기능을 제공합니다.
    콘솔 출력은 표준 오류로 보냅니다. 표준 출력은 DOT 텍스트나 요약표 같은 명령 결과용입니다.
    """

    def __init__(self, name: Optional[str] = None, log_dir: Optional[str] = None):
        """
        ApplicationLogger 인스턴스를 초기화합니다.

        Args:
            name (str): 로거 이름
            log_dir (str): 로그 파일 디렉토리
        """
        self.name = name or config.LOG_SETTINGS["logger_name"]
        self.log_dir = log_dir or config.LOG_SETTINGS["log_dir"]
        self.logger = None
        self.console_handler = None
        self.setup_logger()

    def setup_logger(self):
        """로거를 설정합니다."""
        self.logger = logging.getLogger(self.name)
        self.logger.setLevel(logging.DEBUG)
        self.logger.propagate = False

        # 기존 핸들러 제거 (중복 방지)
        if self.logger.handlers:
            for handler in list(self.logger.handlers):
                handler.close()
            self.logger.handlers.clear()

        formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(threadName)s - %(funcName)s:%(lineno)d - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )

        if config.LOG_SETTINGS.get("file_logging", True):
            if not os.path.exists(self.log_dir):
                os.makedirs(self.log_dir, exist_ok=True)

            # 파일 핸들러 설정 (로테이션)
            log_file = os.path.join(self.log_dir, f"{self.name.lower()}.log")
            file_handler = RotatingFileHandler(
                log_file,
                maxBytes=config.LOG_SETTINGS["max_log_bytes"],
                backupCount=5,
                encoding="utf-8",
            )
            file_handler.setLevel(logging.DEBUG)
            file_handler.setFormatter(formatter)
            self.logger.addHandler(file_handler)

            # 에러 로그 별도 파일
            error_file = os.path.join(self.log_dir, f"{self.name.lower()}_errors.log")
            error_handler = RotatingFileHandler(
                error_file,
                maxBytes=config.LOG_SETTINGS["max_error_log_bytes"],
                backupCount=3,
                encoding="utf-8",
            )
            error_handler.setLevel(logging.ERROR)
            error_handler.setFormatter(formatter)
            self.logger.addHandler(error_handler)

        # 콘솔 핸들러 설정
        self.console_handler = logging.StreamHandler(sys.stderr)
        self.console_handler.setLevel(config.LOG_SETTINGS.get("console_level", "WARNING"))
        self.console_handler.setFormatter(logging.Formatter('%(levelname)s - %(message)s'))
        self.console_handler.addFilter(ConsoleFilter())
        self.logger.addHandler(self.console_handler)

    def set_console_level(self, level: str):
        """콘솔 출력 레벨을 변경합니다. (예: --verbose 옵션)"""
        self.console_handler.setLevel(level)

    def debug(self, message: str, **kwargs):
        """디버그 로그를 기록합니다."""
        self.logger.debug(message, **kwargs)

    def info(self, message: str, **kwargs):
        """정보 로그를 기록합니다."""
        self.logger.info(message, **kwargs)

    def warning(self, message: str, **kwargs):
        """경고 로그를 기록합니다."""
        self.logger.warning(message, **kwargs)

    def error(self, message: str, exception: Optional[Exception] = None, file_only: bool = False, **kwargs):
        """
        오류 로그를 기록합니다.

        file_only가 True이면 로그 파일에만 남깁니다. 호출한 쪽에서 예외를 다시 던져
        명령행이 한 줄 메시지로 보고하는 경우에 사용합니다.
        """
        kwargs.setdefault("extra", {})["file_only"] = file_only
        if exception:
            self.logger.error(f"{message}: {str(exception)}", exc_info=exception, **kwargs)
        else:
            self.logger.error(message, **kwargs)


class PerformanceLogger:
    """
    성능 측정을 위한 로거 클래스입니다.

    반복(rep)을 여러 스레드에서 동시에 측정할 수 있도록 타이머 상태를 공유하지 않습니다.
    """

    def __init__(self, logger: ApplicationLogger):
        """
        PerformanceLogger 인스턴스를 초기화합니다.

        Args:
            logger (ApplicationLogger): 기본 로거
        """
        self.logger = logger

    def log_elapsed(self, operation_name: str, elapsed_time: float, log_level: str = "debug"):
        """
        측정된 실행 시간을 로깅합니다.

        Args:
            operation_name (str): 작업 이름
            elapsed_time (float): 경과 시간 (초)
            log_level (str): 로그 레벨
        """
        message = f"성능 측정 완료: {operation_name} - {elapsed_time:.3f}초"
        if log_level == "info":
            self.logger.info(message)
        else:
            self.logger.debug(message)

    def measure_function(self, func_name: Optional[str] = None, log_level: str = "debug"):
        """
        함수 실행 시간을 측정하는 데코레이터입니다.

        Args:
            func_name (str): 함수 이름 (지정하지 않으면 실제 함수명 사용)
            log_level (str): 로그 레벨
        """
        def decorator(func):
            @functools.wraps(func)
            def wrapper(*args, **kwargs):
                operation_name = func_name or f"{func.__module__}.{func.__name__}"
                start = time.perf_counter()
                try:
                    return func(*args, **kwargs)
                except Exception as e:
                    self.logger.debug(f"함수 실행 중 예외 발생: {operation_name} ({type(e).__name__})")
                    raise
                finally:
                    self.log_elapsed(operation_name, time.perf_counter() - start, log_level)

            return wrapper
        return decorator


class FileOperationLogger:
    """
    파일 작업 전용 로거 클래스입니다.
    """

    def __init__(self, logger: ApplicationLogger):
        self.logger = logger

    def log_file_access(self, file_path: str, operation: str, success: bool = True,
                        error: Optional[Exception] = None, detail: str = ""):
        """
        파일 접근 로그를 기록합니다.

        Args:
            file_path (str): 파일 경로
            operation (str): 작업 종류 (read, write 등)
            success (bool): 성공 여부
            error (Optional[Exception]): 오류 정보
            detail (str): 추가 정보 (행 수 등)
        """
        filename = os.path.basename(file_path)
        suffix = f" ({detail})" if detail else ""

        if success:
            self.logger.info(f"파일 {operation} 성공: {filename}{suffix}")
        else:
            self.logger.error(f"파일 {operation} 실패: {filename}", exception=error, file_only=True)


class ExperimentLogger:
    """
    시뮬레이션 실험 로거 클래스입니다.
    """

    def __init__(self, logger: ApplicationLogger):
        self.logger = logger

    def log_rep_finished(self, scenario: str, rep: int, profits: Dict[str, float]):
        """
        반복 하나의 방법별 평균 반사실 이익을 기록합니다.

        Args:
            scenario (str): 시나리오 이름
            rep (int): 반복 번호
            profits (Dict[str, float]): 방법 이름 -> 평균 이익
        """
        summary = ", ".join(f"{method}={profit:.4f}" for method, profit in profits.items())
        self.logger.debug(f"[{scenario}] rep {rep} 완료: {summary}")

    def log_experiment_finished(self, scenario: str, n_reps: int, means: Dict[str, float],
                                elapsed_time: float):
        """
        실험 전체의 방법별 평균을 기록합니다.

        Args:
            scenario (str): 시나리오 이름
            n_reps (int): 반복 수
            means (Dict[str, float]): 방법 이름 -> 반복 평균 이익
            elapsed_time (float): 경과 시간 (초)
        """
        summary = ", ".join(f"{method}={mean:.4f}" for method, mean in means.items())
        self.logger.info(f"[{scenario}] 실험 완료: {n_reps}회 반복, {elapsed_time:.2f}초 - {summary}")


class LoggerManager:
    """
    전체 로깅 시스템을 관리하는 클래스입니다.
    """

    _instance = None
    _initialized = False

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if not self._initialized:
            self.app_logger = ApplicationLogger()
            self.performance_logger = PerformanceLogger(self.app_logger)
            self.file_logger = FileOperationLogger(self.app_logger)
            self.experiment_logger = ExperimentLogger(self.app_logger)

            self._initialized = True
            self.app_logger.debug("로깅 시스템 초기화 완료")

    @classmethod
    def get_instance(cls):
        """싱글톤 인스턴스를 반환합니다."""
        if cls._instance is None:
            cls._instance = cls()
        return cls._instance

    @classmethod
    def reset(cls):
        """싱글톤을 해제합니다. 로그 디렉토리를 바꾼 뒤 다시 초기화할 때 사용합니다."""
        if cls._instance is not None and cls._initialized:
            cls._instance.shutdown()
        cls._instance = None
        cls._initialized = False

    def get_app_logger(self) -> ApplicationLogger:
        """애플리케이션 로거를 반환합니다."""
        return self.app_logger

    def get_performance_logger(self) -> PerformanceLogger:
        """성능 로거를 반환합니다."""
        return self.performance_logger

    def get_file_logger(self) -> FileOperationLogger:
        """파일 작업 로거를 반환합니다."""
        return self.file_logger

    def get_experiment_logger(self) -> ExperimentLogger:
        """실험 로거를 반환합니다."""
        return self.experiment_logger

    def shutdown(self):
        """로깅 시스템의 핸들러를 닫습니다."""
        for handler in list(self.app_logger.logger.handlers):
            handler.close()
        self.app_logger.logger.handlers.clear()


# 편의 함수들
def get_logger() -> ApplicationLogger:
    """전역 애플리케이션 로거를 반환합니다."""
    return LoggerManager.get_instance().get_app_logger()


def get_performance_logger() -> PerformanceLogger:
    """전역 성능 로거를 반환합니다."""
    return LoggerManager.get_instance().get_performance_logger()


def get_file_logger() -> FileOperationLogger:
    """전역 파일 로거를 반환합니다."""
    return LoggerManager.get_instance().get_file_logger()


def get_experiment_logger() -> ExperimentLogger:
    """전역 실험 로거를 반환합니다."""
    return LoggerManager.get_instance().get_experiment_logger()


def measure_performance(operation_name: Optional[str] = None, log_level: str = "debug"):
    """
    성능 측정 데코레이터입니다.

    로거는 데코레이트 시점이 아니라 호출 시점에 가져오므로
    모듈 임포트만으로 로그 디렉토리가 만들어지지 않습니다.
    """
    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            measured = get_performance_logger().measure_function(
                operation_name or f"{func.__module__}.{func.__name__}", log_level
            )(func)
            return measured(*args, **kwargs)
        return wrapper
    return decorator
