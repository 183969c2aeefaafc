"""``golden``: list the reference two-argument oracles with their known P and Q."""

from typing import Any, Dict, Tuple

from core.error_handlers import EXIT_OK
from data.golden_oracles import GOLDEN_ORACLES
from schemas.config_schema import RunConfig


def register(subparsers) -> None:
    p = subparsers.add_parser("golden", help="List the reference oracles used by the test-suite")
    p.add_argument("--output", choices=["json", "text"])
    p.set_defaults(handler=run)


def run(cfg: RunConfig) -> Tuple[Dict[str, Any], int]:
    return {"golden": GOLDEN_ORACLES}, EXIT_OK
