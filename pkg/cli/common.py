"""Shared argument groups, config merging and report output for the subcommands."""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO, Union

import yaml
from pydantic import BaseModel

from core.config import get_settings
from core.exceptions import ConfigurationError
from data.sample_tables import load_points, load_table_oracle
from schemas.config_schema import RunConfig
from schemas.report_schema import OrderingModel, VerificationBlock
from services.annihilator import VerificationReport
from services.oracle import ExpressionOracle, FunctionOracle, Sampler
from services.poly import BasisOrdering, Poly
from services.scalar import FieldDesc, Raw

# argparse destinations that map one-to-one onto RunConfig fields
_CONFIG_KEYS = tuple(RunConfig.model_fields)


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser that raises instead of exiting, so usage errors map to exit code 1."""

    def error(self, message):
        raise ConfigurationError(message, config_key="arguments")


def add_source_arguments(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("--expr", help="Oracle expression, e.g. 'x1*y1/(1+x1^2)'")
    group.add_argument("--table", help="CSV table with columns x1..,y1..,value")
    p.add_argument("--field", help="q, fp (default prime) or fp:<p>")
    p.add_argument("--x-vars", dest="x_vars", type=int)
    p.add_argument("--y-vars", dest="y_vars", type=int)


def add_search_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--samples", type=int, help="Initial sample size")
    p.add_argument("--grow", help="Sample growth factor, e.g. 2 or 3/2")
    p.add_argument("--window", type=int, help="Rounds c must stay fixed")
    p.add_argument("--verify-trials", dest="verify_trials", type=int)
    p.add_argument("--range", type=int, help="Uniform sampling draws integers in [-N, N]")
    p.add_argument("--seed", type=int)
    p.add_argument("--max-samples", dest="max_samples", type=int)


def add_run_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML file with run settings; flags override it")
    p.add_argument("--output", choices=["json", "text"])
    p.add_argument("--log-level", dest="log_level", help="stderr log level, e.g. DEBUG")


def add_sampler_argument(p: argparse.ArgumentParser, name: str, help_text: str) -> None:
    p.add_argument(
        f"--{name}-sampler",
        dest=f"{name}_sampler",
        help=f"{help_text}: uniform, integers, pythagorean, grid:<lo>:<hi> or file:<csv>",
    )


def _parse_t_cap(value: str) -> Union[int, str]:
    if value.lower() == "none":
        return "none"
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"t-cap must be a non-negative integer or 'none', got '{value}'")


def add_t_cap_argument(p: argparse.ArgumentParser) -> None:
    p.add_argument("--t-cap", dest="t_cap", type=_parse_t_cap, help="Largest power of t, or 'none'")


def _read_yaml(path: str) -> Dict[str, Any]:
    file = Path(path)
    if not file.is_file():
        raise ConfigurationError(f"config file not found: {file}", config_key="config")
    data = yaml.safe_load(file.read_text(encoding="utf-8")) or {}
    if not isinstance(data, dict):
        raise ConfigurationError("config file must hold a mapping", config_key="config")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge the YAML config (if any) with the flags given on the command line."""
    data: Dict[str, Any] = _read_yaml(args.config) if getattr(args, "config", None) else {}
    unknown = sorted(set(data) - set(_CONFIG_KEYS))
    if unknown:
        raise ConfigurationError(f"unknown config keys {unknown}", config_key=unknown[0])
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    if data.get("t_cap") == "none":
        data["t_cap"] = None
    if args.command in ("reconstruct", "slice-scan"):
        data.setdefault("y_vars", 1)
    data["command"] = args.command
    return RunConfig(**data)


def build_field(cfg: RunConfig) -> FieldDesc:
    return FieldDesc.parse(cfg.field, default_prime=get_settings().default_prime)


def build_oracle(cfg: RunConfig, field: FieldDesc) -> FunctionOracle:
    if cfg.expr is not None:
        return ExpressionOracle.from_text(cfg.expr, cfg.x_vars, cfg.y_vars, field)
    return load_table_oracle(cfg.table, field, cfg.x_vars, cfg.y_vars)


def parse_sampler(spec: str, dim: int, field: FieldDesc, bound: int) -> Optional[Sampler]:
    """Sampler for a spec string; None for 'uniform' so the oracle's default applies."""
    kind, _, rest = spec.partition(":")
    if kind == "uniform":
        return None
    if kind == "integers":
        return Sampler.naturals(dim, bound)
    if kind == "pythagorean":
        return Sampler.pythagorean(dim, bound)
    if kind == "grid":
        try:
            low, high = (int(v) for v in rest.split(":"))
        except ValueError:
            raise ConfigurationError(f"grid sampler needs grid:<lo>:<hi>, got '{spec}'", config_key="sampler")
        return Sampler.grid(dim, low, high)
    if kind == "file":
        return Sampler.from_points(load_points(rest, field, dim))
    raise ConfigurationError(f"unknown sampler '{spec}'", config_key="sampler")


# report helpers

def format_point(point: Optional[Sequence[Raw]], field: FieldDesc) -> Optional[List[str]]:
    return None if point is None else [field.format_value(c) for c in point]


def verification_block(report: VerificationReport, field: FieldDesc) -> VerificationBlock:
    return VerificationBlock(
        trials=report.trials,
        failures=report.failures,
        degree_bound=report.degree_bound,
        nonvanishing=report.nonvanishing,
        first_failure=format_point(report.first_failure, field),
    )


def ordering_block(ordering: BasisOrdering, field: FieldDesc, count: int) -> OrderingModel:
    basis = [Poly.monomial(m, ordering, field).serialize() for m in ordering.enumerate(count)]
    return OrderingModel(variables=list(ordering.variable_names), t_cap=ordering.t_cap, basis=basis)


def config_dict(cfg: RunConfig, field: FieldDesc) -> Dict[str, Any]:
    data = cfg.model_dump(mode="json", exclude_none=True)
    data["field"] = str(field)
    return data


def emit(payload: Union[BaseModel, Dict[str, Any]], output: str, stream: Optional[TextIO] = None) -> None:
    """Print a report: sorted-key JSON, or one ``key: value`` line per result field.

    Result fields that do not apply to the command are dropped; nulls inside
    them (an unbounded slice's c) are kept.
    """
    stream = stream or sys.stdout
    data = payload.model_dump(mode="json") if isinstance(payload, BaseModel) else payload
    if isinstance(data.get("result"), dict):
        data["result"] = {k: v for k, v in data["result"].items() if v is not None}
    if output == "json" or "result" not in data:
        stream.write(json.dumps(data, sort_keys=True, indent=2) + "\n")
        return
    for key, value in data["result"].items():
        text = value if isinstance(value, str) else json.dumps(value, sort_keys=True)
        stream.write(f"{key}: {text}\n")
