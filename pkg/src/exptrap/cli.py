from __future__ import annotations

import argparse
import csv
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

from .harness import (
    CATALOG_NAMES,
    CatalogError,
    EmitError,
    LemmaCheckService,
    RateFitError,
    RateModel,
    StudyMode,
    StudyRecord,
)
from .log import logger
from .main import QuadratureApp
from .model import DecayModelError, DecayProfile
from .numerics import DEFAULT_DECIMAL_DIGITS, NumericsDomainError, PrecisionContext
from .planner import Balance, PlanningError
from .quadrature import QuadratureError
from .version import __version__

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PLANNING = 2
EXIT_BAD_ARGS = 3
EXIT_IO = 4


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_BAD_ARGS, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        values = [int(item) for item in str(text).split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers: {text}"
        ) from exc
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _param(text: str) -> tuple[str, Any]:
    key, sep, value = str(text).partition("=")
    if not sep or not key.strip():
        raise argparse.ArgumentTypeError(f"expected key=value, got {text}")
    value = value.strip()
    return key.strip(), value.split(",") if "," in value else value


# accepted before or after the subcommand; unset options fall back to these
_COMMON_DEFAULTS: dict[str, Any] = {
    "precision": DEFAULT_DECIMAL_DIGITS,
    "lam": 1.0,
    "out": None,
    "format": None,
    "verbose": False,
}


def _common_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(add_help=False)
    parser.add_argument(
        "--precision",
        type=int,
        default=argparse.SUPPRESS,
        help=(
            "Working precision in decimal digits "
            f"(default: {DEFAULT_DECIMAL_DIGITS})."
        ),
    )
    parser.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        default=argparse.SUPPRESS,
        help="Floor-estimate factor lambda in (0, 1] (default: 1.0).",
    )
    parser.add_argument(
        "--out", default=argparse.SUPPRESS, help="Output file (default: stdout)."
    )
    parser.add_argument(
        "--format",
        choices=("csv", "json"),
        default=argparse.SUPPRESS,
        help="Output format (default: csv for study, json otherwise).",
    )
    parser.add_argument(
        "--verbose",
        action="store_true",
        default=argparse.SUPPRESS,
        help="Enable debug logging.",
    )
    return parser


def _add_integrand(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--integrand",
        default="gaussian",
        help=f"Catalog entry: {', '.join(CATALOG_NAMES)} (default: gaussian).",
    )
    parser.add_argument("--dims", type=int, default=1, help="Dimension s (default: 1).")
    parser.add_argument(
        "--param",
        dest="params",
        action="append",
        type=_param,
        default=[],
        help="Entry parameter key=value, e.g. sigma=1,2 (repeatable).",
    )
    parser.add_argument(
        "--balance",
        choices=[item.value for item in Balance],
        default=Balance.APPROX_LOG.value,
        help="Double-exponential balance (default: approx_log).",
    )


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = _ArgumentParser(
        prog="exptrap",
        description="Extended-precision trapezoidal cubature with balanced plans.",
        parents=[common],
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    plan = sub.add_parser(
        "plan", parents=[common], help="Plan h, h_j, n_j for a budget."
    )
    _add_integrand(plan)
    plan.add_argument("--budget", type=int, required=True, help="Point budget N.")
    plan.add_argument("--profile", default=None, help="DecayProfile JSON file.")

    integrate = sub.add_parser(
        "integrate", parents=[common], help="Plan and evaluate one rule."
    )
    _add_integrand(integrate)
    integrate.add_argument("--budget", type=int, default=None, help="Point budget N.")
    integrate.add_argument("--profile", default=None, help="DecayProfile JSON file.")
    integrate.add_argument(
        "--adaptive", action="store_true", help="Adaptive truncation."
    )
    integrate.add_argument(
        "--a", type=float, default=None, help="Threshold exponent a."
    )
    integrate.add_argument("--M", dest="m", type=int, default=None, help="M = pi/h.")

    study = sub.add_parser(
        "study", parents=[common], help="Run a convergence study."
    )
    _add_integrand(study)
    study.add_argument("--budgets", type=_int_list, default=None, help="e.g. 10,20,40")
    study.add_argument("--adaptive", action="store_true", help="Adaptive truncation.")
    study.add_argument(
        "--a",
        type=float,
        default=None,
        help="Threshold exponent a (default: 5 for s <= 3, 6 otherwise).",
    )
    study.add_argument("--M-list", dest="m_list", type=_int_list, default=None)
    study.add_argument(
        "--workers", type=int, default=1, help="Worker processes (default: 1)."
    )
    study.add_argument(
        "--self-convergence",
        action="store_true",
        help="Use the largest-budget estimate as reference.",
    )

    fit = sub.add_parser(
        "fit", parents=[common], help="Fit a convergence rate to study output."
    )
    fit.add_argument("--input", required=True, help="Study CSV file.")
    fit.add_argument(
        "--model",
        choices=[item.value for item in RateModel],
        default=RateModel.EXP_RATE.value,
    )
    fit.add_argument("--dims", type=int, default=1, help="Dimension s (default: 1).")

    sub.add_parser(
        "lemma-check",
        parents=[common],
        help="Check tail bounds against brute force.",
    )
    return parser


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    args = build_parser().parse_args(argv)
    for key, value in _COMMON_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    return args


def _make_app(args: argparse.Namespace) -> QuadratureApp:
    app = QuadratureApp(
        precision=PrecisionContext(args.precision),
        log_level=logging.DEBUG if args.verbose else logging.INFO,
    )
    app.cfg.plan.lam = args.lam
    if getattr(args, "balance", None):
        app.cfg.plan.balance = args.balance
    if getattr(args, "a", None) is not None:
        app.cfg.adaptive.a = args.a
    if getattr(args, "workers", None) is not None:
        app.cfg.study.workers = max(1, args.workers)
    app.cfg.study.self_convergence = bool(getattr(args, "self_convergence", False))
    return app


def _write(
    app: QuadratureApp, args: argparse.Namespace, payload: Any, default: str
) -> None:
    fmt = args.format or default
    app.emit(payload, fmt, Path(args.out) if args.out else None)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise EmitError("failed to read input", path=path, cause=str(exc)) from exc


def _load_profile(app: QuadratureApp, path: str | None) -> DecayProfile | None:
    if path is None:
        return None
    text = _read_text(path)
    with app.cfg.precision.activate():
        return DecayProfile.from_json(text)


def _cmd_plan(app: QuadratureApp, args: argparse.Namespace) -> int:
    profile = _load_profile(app, args.profile)
    if profile is None:
        profile = app.entry(args.integrand, args.dims, dict(args.params)).profile
    _write(app, args, app.plan(profile, args.budget), "json")
    return EXIT_OK


def _cmd_integrate(app: QuadratureApp, args: argparse.Namespace) -> int:
    entry = app.entry(args.integrand, args.dims, dict(args.params))
    if args.adaptive:
        if args.m is None:
            raise CatalogError("--adaptive requires --M")
        result = app.integrate_adaptive(entry, args.m)
        payload = app.describe_result(entry, result)
    else:
        if args.budget is None:
            raise CatalogError("--budget is required without --adaptive")
        plan, report, result = app.integrate(
            entry, args.budget, profile=_load_profile(app, args.profile)
        )
        payload = app.describe_result(entry, result)
        with app.cfg.precision.activate():
            payload["plan"] = plan.to_dict()
            payload["report"] = report.to_dict()
    _write(app, args, payload, "json")
    return EXIT_OK


def _cmd_study(app: QuadratureApp, args: argparse.Namespace) -> int:
    entry = app.entry(args.integrand, args.dims, dict(args.params))
    if args.adaptive:
        if not args.m_list:
            raise CatalogError("--adaptive requires --M-list")
        records = app.study(entry, args.m_list, mode=StudyMode.ADAPTIVE)
    else:
        if not args.budgets:
            raise CatalogError("--budgets is required without --adaptive")
        records = app.study(entry, args.budgets, mode=StudyMode.PLANNED)
    _write(app, args, records, "csv")
    return EXIT_OK


def _cmd_fit(app: QuadratureApp, args: argparse.Namespace) -> int:
    rows = list(csv.DictReader(_read_text(args.input).splitlines()))
    with app.cfg.precision.activate():
        records = [StudyRecord.from_csv_row(row) for row in rows]
    _write(app, args, app.fit(records, args.model, args.dims), "json")
    return EXIT_OK


def _cmd_lemma(app: QuadratureApp, args: argparse.Namespace) -> int:
    rows = app.lemma_check()
    _write(app, args, rows, "json")
    return EXIT_OK if LemmaCheckService.all_hold(rows) else EXIT_CHECK_FAILED


_COMMANDS: dict[str, Callable[[QuadratureApp, argparse.Namespace], int]] = {
    "plan": _cmd_plan,
    "integrate": _cmd_integrate,
    "study": _cmd_study,
    "fit": _cmd_fit,
    "lemma-check": _cmd_lemma,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        app = _make_app(args)
        return _COMMANDS[args.command](app, args)
    except PlanningError as exc:
        logger.error("[app] planning failed: %s", exc)
        print(f"exptrap: {exc}", file=sys.stderr)
        return exc.exit_code
    except EmitError as exc:
        logger.error("[emit] %s", exc)
        print(f"exptrap: {exc}", file=sys.stderr)
        return exc.exit_code
    except (
        CatalogError,
        DecayModelError,
        NumericsDomainError,
        QuadratureError,
        RateFitError,
        ValueError,
    ) as exc:
        logger.error("[app] invalid request: %s", exc)
        print(f"exptrap: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS


if __name__ == "__main__":
    sys.exit(main())
