#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
ABtree (A/B 실험 기반 처리 배정 트리)

명령행 진입점입니다.

무작위 A/B 실험 데이터로 개인별 처리 배정 트리를 학습(fit)하고,
새 데이터에 처리를 예측(predict)하며, 시뮬레이션(simulate)으로 배정 방법을 비교하고,
학습된 모델을 DOT / JSON으로 내보냅니다(export).

종료 코드: 0 성공, 1 사용법 오류 또는 파일 없음, 2 데이터 / 스키마 / 모델 오류.
"""
import argparse
import sys
from typing import List, Optional, Sequence
import config
from core.data import (
    ColumnSchema, CsvOptions, concat_datasets, load_schema_file, parse_schema_spec, parse_table,
)
from core.errors import ABTreeError, DataError, UsageError
from core.policy import predict_subset
from core.prune import SelectionMetric, prune_sequence, select_subtree
from core.simulation import PHI_FUNCTIONS, Scenario, run_experiment
from core.tree import GrowthConfig, fit_tree
from utils.logger import LoggerManager, get_logger
from utils.result_writer import ResultWriter
from utils.tree_exporter import TreeExporter


class ArgumentParser(argparse.ArgumentParser):
    """인자 오류를 종료 대신 UsageError로 알리는 파서."""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _positive_int(text: str) -> int:
    value = _non_negative_int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got '{text}'")
    return value


def _non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{text}'") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got '{text}'")
    return value


def _probability(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got '{text}'") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"expected a value in (0, 1), got '{text}'")
    return value


def _label_pair(text: str):
    labels = tuple(part.strip() for part in text.split(","))
    if len(labels) != 2 or not all(labels) or labels[0] == labels[1]:
        raise argparse.ArgumentTypeError(f"expected two distinct labels 'A,B', got '{text}'")
    return labels


def _add_growth_arguments(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("growth (per-arm counts)")
    group.add_argument("--min-split", type=_non_negative_int, default=config.GROWTH_DEFAULTS["min_split"],
                       help="minimum rows per arm for a node to be split (default: %(default)s)")
    group.add_argument("--min-bucket", type=_positive_int, default=config.GROWTH_DEFAULTS["min_bucket"],
                       help="minimum rows per arm in every leaf (default: %(default)s)")
    group.add_argument("--max-depth", type=_non_negative_int, default=config.GROWTH_DEFAULTS["max_depth"],
                       help="maximum tree depth, root = 0 (default: %(default)s)")


def _add_table_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--delimiter", default=config.CSV_SETTINGS["delimiter"], help="CSV delimiter")
    parser.add_argument("--no-header", action="store_true", help="input files have no header row")
    parser.add_argument("--sheet", default=None, help="Excel sheet name (default: first sheet)")


def build_parser() -> ArgumentParser:
    """명령행 파서를 만듭니다."""
    parser = ArgumentParser(prog="abtree", description="Treatment-assignment trees learned from A/B test data.")
    parser.add_argument("--version", action="version",
                        version=f"{config.APP_SETTINGS['app_name']} {config.APP_SETTINGS['app_version']}")
    parser.add_argument("--verbose", action="store_true", help="log progress to standard error")
    commands = parser.add_subparsers(dest="command", metavar="command", parser_class=ArgumentParser)
    commands.required = True

    fit = commands.add_parser("fit", help="grow (and optionally prune) a tree")
    fit.add_argument("--train", required=True, help="training data file (.csv or .xlsx)")
    fit.add_argument("--val", help="validation data file")
    schema = fit.add_mutually_exclusive_group(required=True)
    schema.add_argument("--schema", help="schema sidecar file with one name:kind per line")
    schema.add_argument("--columns", help="inline schema, e.g. 'y:outcome,T:treatment,x:quantitative'")
    fit.add_argument("--treatment-labels", type=_label_pair, default=config.CSV_SETTINGS["treatment_labels"],
                     help="labels of the control and treatment arms in the file (default: A,B)")
    _add_table_arguments(fit)
    _add_growth_arguments(fit)
    fit.add_argument("--prune", action="store_true", help="prune on --train and select the subtree on --val")
    fit.add_argument("--metric", choices=config.SELECTION_SETTINGS["metrics"],
                     default=config.SELECTION_SETTINGS["default_metric"], help="subtree selection metric")
    fit.add_argument("--model-out", required=True, help="output model JSON file")
    fit.add_argument("--prune-log", help="write the pruning steps as JSON")
    fit.set_defaults(handler=run_fit)

    predict = commands.add_parser("predict", help="assign treatments with a saved model")
    predict.add_argument("--model", required=True, help="model JSON file")
    predict.add_argument("--input", required=True, help="rows to assign (.csv or .xlsx)")
    predict.add_argument("--schema", help="schema sidecar for the input (default: model covariates)")
    _add_table_arguments(predict)
    predict.add_argument("--out", help="output CSV (default: standard output)")
    predict.set_defaults(handler=run_predict)

    simulate = commands.add_parser("simulate", help="compare assignment methods on simulated experiments")
    simulate.add_argument("--phi", type=int, nargs="+", required=True, choices=sorted(PHI_FUNCTIONS),
                          help="response function index (several allowed)")
    simulate.add_argument("--n", type=_positive_int, default=config.SIMULATION_SETTINGS["n_rows"],
                          help="rows per simulated dataset (default: %(default)s)")
    simulate.add_argument("--reps", type=_positive_int, default=config.SIMULATION_SETTINGS["n_reps"],
                          help="repetitions per scenario (default: %(default)s)")
    simulate.add_argument("--seed", type=int, default=config.SIMULATION_SETTINGS["master_seed"],
                          help="master seed (default: %(default)s)")
    simulate.add_argument("--mode", choices=sorted(config.COVARIATE_RANGES),
                          default=config.SIMULATION_SETTINGS["covariate_mode"], help="covariate distribution")
    _add_growth_arguments(simulate)
    simulate.add_argument("--metric", choices=config.SELECTION_SETTINGS["metrics"],
                          default=config.SELECTION_SETTINGS["default_metric"], help="subtree selection metric")
    simulate.add_argument("--alpha", type=_probability, default=config.SIMULATION_SETTINGS["alpha"],
                          help="A/B test significance level (default: %(default)s)")
    simulate.add_argument("--threads", type=_positive_int, default=1, help="worker threads for repetitions")
    simulate.add_argument("--out", help="results CSV (default: standard output)")
    simulate.add_argument("--oracle-out", help="per-rep oracle expected profit CSV")
    simulate.add_argument("--summary", action="store_true", help="print per-method mean and sd per scenario")
    simulate.set_defaults(handler=run_simulate)

    export = commands.add_parser("export", help="export a saved model")
    export.add_argument("--model", required=True, help="model JSON file")
    export.add_argument("--format", choices=("dot", "json", "rules"), default="dot", help="output format")
    export.add_argument("--out", help="output file (default: standard output)")
    export.set_defaults(handler=run_export)

    return parser


def _load_schema(args) -> List[ColumnSchema]:
    if args.schema:
        return load_schema_file(args.schema)
    return parse_schema_spec(args.columns)


def run_fit(args) -> int:
    """fit 명령: 학습 데이터로 트리를 성장시키고 모델을 저장합니다."""
    logger = get_logger()
    if args.prune and not args.val:
        raise UsageError("--prune requires --val (the subtree is selected on validation rows)")
    if args.prune_log and not args.prune:
        raise UsageError("--prune-log requires --prune")

    schema = _load_schema(args)
    options = CsvOptions(delimiter=args.delimiter, header=not args.no_header,
                         treatment_labels=args.treatment_labels, sheet_name=args.sheet)
    growth = GrowthConfig.from_settings(min_split=args.min_split, min_bucket=args.min_bucket, max_depth=args.max_depth)
    exporter = TreeExporter()

    train = parse_table(args.train, schema, options)
    validation = parse_table(args.val, schema, options) if args.val else None

    if args.prune:
        sequence = prune_sequence(fit_tree(train.all_rows(), growth))
        tree = select_subtree(sequence, validation.all_rows(), SelectionMetric(args.metric))
        logger.info(f"가지치기: 잎 {sequence.trees[0].n_leaves}개 -> {tree.n_leaves}개 선택 ({args.metric})")
        if args.prune_log:
            exporter.save_prune_log(sequence, args.prune_log)
    else:
        data = concat_datasets(train, validation) if validation is not None else train
        tree = fit_tree(data.all_rows(), growth)

    exporter.save_model(tree, args.model_out)
    print(f"[완료] 모델 저장: {args.model_out} (잎 {tree.n_leaves}개, 목적함수 {tree.objective():.4f})")
    return 0


def run_predict(args) -> int:
    """predict 명령: 저장된 모델로 입력 행의 처리를 배정합니다."""
    tree = TreeExporter().load_model(args.model)
    if args.schema:
        schema = load_schema_file(args.schema)
    else:
        schema = [ColumnSchema(name, kind) for name, kind in zip(tree.feature_names, tree.feature_kinds)]
    options = CsvOptions(delimiter=args.delimiter, header=not args.no_header, covariates_only=True,
                         allow_extra_columns=True, sheet_name=args.sheet)
    rows = parse_table(args.input, schema, options)
    assignments = predict_subset(tree, rows)

    writer = ResultWriter()
    if args.out:
        writer.write_assignments(assignments, tree.treatment_labels, args.out)
    else:
        frame = writer.assignment_frame(assignments, tree.treatment_labels)
        sys.stdout.write(frame.to_csv(index=False, lineterminator="\n"))
    return 0


def run_simulate(args) -> int:
    """simulate 명령: 시나리오마다 네 방법을 비교하고 결과 CSV를 씁니다."""
    growth = GrowthConfig.from_settings(min_split=args.min_split, min_bucket=args.min_bucket, max_depth=args.max_depth)
    results = []
    for k in args.phi:
        scenario = Scenario(phi_index=k, n_rows=args.n, n_reps=args.reps, master_seed=args.seed,
                            covariate_mode=args.mode)
        results.append(run_experiment(scenario, growth, SelectionMetric(args.metric), args.alpha, args.threads))

    writer = ResultWriter()
    if args.out:
        writer.write_results(results, args.out)
    elif not args.summary:
        sys.stdout.write(writer.results_frame(results).to_csv(index=False, lineterminator="\n"))
    if args.oracle_out:
        writer.write_oracle(results, args.oracle_out)
    if args.summary:
        sys.stdout.write(writer.format_summary(results))
    return 0


def run_export(args) -> int:
    """export 명령: 모델을 DOT, JSON 또는 규칙 목록으로 출력합니다."""
    exporter = TreeExporter()
    tree = exporter.load_model(args.model)
    if args.format == "dot":
        text = exporter.to_dot(tree)
    elif args.format == "json":
        text = exporter.model_text(tree)
    else:
        text = "\n".join(tree.rules()) + "\n"

    if args.out:
        exporter.save_text(text, args.out, f"{args.format} 내보내기")
    else:
        sys.stdout.write(text)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    메인 함수 - 애플리케이션의 진입점입니다.

    Args:
        argv (Optional[Sequence[str]]): 명령행 인자 (None이면 sys.argv[1:])

    Returns:
        int: 종료 코드
    """
    logger = LoggerManager.get_instance().get_app_logger()
    try:
        args = build_parser().parse_args(argv)
        if args.verbose:
            logger.set_console_level("INFO")
        logger.info(f"명령 시작: {args.command}")
        return args.handler(args)
    except SystemExit as e:
        # --help / --version
        return e.code if isinstance(e.code, int) else 0
    except UsageError as e:
        logger.debug(f"사용법 오류: {e}")
        print(f"[error] {e}", file=sys.stderr)
        return 1
    except DataError as e:
        logger.error("데이터 오류", exception=e, file_only=True)
        print(f"[error] {e}", file=sys.stderr)
        return 2
    except ABTreeError as e:
        logger.error("처리 오류", exception=e, file_only=True)
        print(f"[error] {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        # 설정 값 검증 실패 (예: 잘못된 분할 비율)
        logger.debug(f"잘못된 설정: {e}")
        print(f"[error] {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
