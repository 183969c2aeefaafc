"""``schema``: JSON Schemas of the run configuration, reports and error bodies."""

from typing import Any, Dict, Tuple

from cli import common
from core.error_handlers import EXIT_OK
from schemas.config_schema import RunConfig
from schemas.report_schema import ErrorReport, RunReport


def register(subparsers) -> None:
    p = subparsers.add_parser("schema", help="Print the JSON Schemas of configs and reports")
    common.add_run_arguments(p)
    p.set_defaults(handler=run)


def run(cfg: RunConfig) -> Tuple[Dict[str, Any], int]:
    return {
        "config": RunConfig.model_json_schema(),
        "report": RunReport.model_json_schema(),
        "error": ErrorReport.model_json_schema(),
    }, EXIT_OK
