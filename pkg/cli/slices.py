"""``slice-scan``: annihilator index of each sampled y-slice."""

from typing import Tuple

from cli import common
from cli.reconstruct import histogram, profile_entries
from core.error_handlers import EXIT_OK
from core.exceptions import AllUnboundedError
from schemas.config_schema import RunConfig
from schemas.report_schema import ResultBlock, RunReport
from services.reconstruct import select_mode, slice_scan


def register(subparsers) -> None:
    p = subparsers.add_parser("slice-scan", help="Report c of each sampled y-slice of f(x, y)")
    common.add_source_arguments(p)
    common.add_search_arguments(p)
    common.add_sampler_argument(p, "x", "x-points for slice searches")
    common.add_sampler_argument(p, "y", "y-points of the scanned slices")
    p.add_argument("--slices", type=int)
    p.add_argument("--workers", type=int)
    common.add_run_arguments(p)
    p.set_defaults(handler=run)


def run(cfg: RunConfig) -> Tuple[RunReport, int]:
    field = common.build_field(cfg)
    oracle = common.build_oracle(cfg, field)
    profile = slice_scan(
        oracle,
        cfg.reconstruct_config(),
        y_sampler=common.parse_sampler(cfg.y_sampler, oracle.num_y, field, cfg.range),
        x_sampler=common.parse_sampler(cfg.x_sampler, oracle.num_x, field, cfg.range),
    )
    try:
        n, attaining = select_mode(profile)
    except AllUnboundedError:
        n, attaining = None, []
    block = ResultBlock(
        kind="profile",
        n=n,
        b_size=len(attaining) if n is not None else None,
        slice_profile=profile_entries(profile, field),
        histogram=histogram(profile),
    )
    return RunReport(config=common.config_dict(cfg, field), result=block), EXIT_OK
