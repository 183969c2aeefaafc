"""Pydantic schema package for run configurations and reports."""

from .config_schema import ReconstructConfig, RunConfig, SearchConfig
from .report_schema import ErrorReport, ResultBlock, RunReport

__all__ = [
    "SearchConfig",
    "ReconstructConfig",
    "RunConfig",
    "RunReport",
    "ResultBlock",
    "ErrorReport",
]
