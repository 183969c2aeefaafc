"""``annihilate``: minimal graph annihilator of an oracle."""

from typing import Tuple

from cli import common
from core.error_handlers import EXIT_OK
from schemas.config_schema import RunConfig
from schemas.report_schema import ResultBlock, RunReport
from services.annihilator import find_annihilator
from services.poly import BasisOrdering


def register(subparsers) -> None:
    p = subparsers.add_parser("annihilate", help="Find the minimal annihilator q with q(x, f(x)) = 0")
    common.add_source_arguments(p)
    common.add_search_arguments(p)
    common.add_t_cap_argument(p)
    common.add_sampler_argument(p, "x", "Points the search samples")
    common.add_run_arguments(p)
    p.set_defaults(handler=run)


def run(cfg: RunConfig) -> Tuple[RunReport, int]:
    field = common.build_field(cfg)
    oracle = common.build_oracle(cfg, field)
    ordering = BasisOrdering(cfg.x_vars, cfg.y_vars, True, t_cap=cfg.t_cap)
    sampler = common.parse_sampler(cfg.x_sampler, oracle.arity, field, cfg.range)
    result = find_annihilator(oracle, ordering, cfg.search_config(), sampler=sampler)
    block = ResultBlock(
        kind="annihilator",
        c=result.c,
        poly=result.annihilator.serialize(),
        ordering=common.ordering_block(ordering, field, result.c),
        sample_size=result.sample_size_used,
        rounds=result.rounds,
        verification=common.verification_block(result.verification, field),
    )
    return RunReport(config=common.config_dict(cfg, field), result=block), EXIT_OK
