"""``reconstruct``: rational P / Q for a separately-regular f(x, y)."""

from typing import List, Optional, Tuple

from cli import common
from core.error_handlers import EXIT_OK
from schemas.config_schema import RunConfig
from schemas.report_schema import ResultBlock, RunReport, SliceEntryModel
from services.reconstruct import SliceProfile, direct_reconstruct, reconstruct_separately_regular
from services.scalar import FieldDesc


def register(subparsers) -> None:
    p = subparsers.add_parser("reconstruct", help="Reconstruct f = P/Q from slice annihilators")
    common.add_source_arguments(p)
    common.add_search_arguments(p)
    common.add_sampler_argument(p, "x", "x-points for slice searches")
    common.add_sampler_argument(p, "y", "y-points of the scanned slices")
    common.add_sampler_argument(p, "a", "Dense set the probe points come from")
    p.add_argument("--slices", type=int, help="Number of y-slices to scan")
    p.add_argument("--probe-retries", dest="probe_retries", type=int)
    p.add_argument("--workers", type=int, help="Threads for the slice scan")
    p.add_argument("--direct", action="store_true", default=None, help="Search the joint annihilator instead")
    common.add_run_arguments(p)
    p.set_defaults(handler=run)


def profile_entries(profile: Optional[SliceProfile], field: FieldDesc) -> Optional[List[SliceEntryModel]]:
    if profile is None:
        return None
    return [SliceEntryModel(y=common.format_point(e.y, field), c=e.c, oracle_failure=e.failed) for e in profile.entries]


def histogram(profile: SliceProfile):
    return {str(c): count for c, count in sorted(profile.histogram().items())}


def run(cfg: RunConfig) -> Tuple[RunReport, int]:
    field = common.build_field(cfg)
    oracle = common.build_oracle(cfg, field)
    rcfg = cfg.reconstruct_config()
    if cfg.direct:
        sampler = common.parse_sampler(cfg.x_sampler, oracle.arity, field, cfg.range)
        rep = direct_reconstruct(oracle, rcfg, sampler=sampler)
    else:
        rep = reconstruct_separately_regular(
            oracle,
            rcfg,
            a_sampler=common.parse_sampler(cfg.a_sampler, oracle.num_x, field, cfg.range),
            y_sampler=common.parse_sampler(cfg.y_sampler, oracle.num_y, field, cfg.range),
            x_sampler=common.parse_sampler(cfg.x_sampler, oracle.num_x, field, cfg.range),
        )
    block = ResultBlock(
        kind="rational_rep",
        numerator=rep.numerator.serialize(),
        denominator=rep.denominator.serialize(),
        method=rep.method,
        c=rep.c,
        n=rep.n,
        b_size=rep.b_size,
        y0=common.format_point(rep.y0, field),
        probes=None if rep.probes is None else [common.format_point(x, field) for x in rep.probes.points],
        slice_profile=profile_entries(rep.profile, field),
        histogram=None if rep.profile is None else histogram(rep.profile),
        verification=common.verification_block(rep.verification, field),
    )
    return RunReport(config=common.config_dict(cfg, field), result=block), EXIT_OK
