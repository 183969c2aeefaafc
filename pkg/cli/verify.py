"""``verify``: check a given relation q(x, f(x)) = 0 or a pair f = P/Q at fresh points."""

from typing import Tuple

import numpy as np

from cli import common
from core.error_handlers import EXIT_OK, EXIT_VERIFICATION_FAILED
from core.exceptions import ConfigurationError
from schemas.config_schema import RunConfig
from schemas.report_schema import ResultBlock, RunReport
from services.annihilator import verify_identity
from services.poly import BasisOrdering, parse_poly
from services.reconstruct import RationalRep, verify_rational_rep


def register(subparsers) -> None:
    p = subparsers.add_parser("verify", help="Evaluate a relation or P/Q pair at fresh points")
    common.add_source_arguments(p)
    common.add_search_arguments(p)
    common.add_t_cap_argument(p)
    common.add_sampler_argument(p, "x", "Verification points")
    p.add_argument("--relation", help="Polynomial in x.., y.. and t")
    p.add_argument("--numerator", help="P in x.., y..")
    p.add_argument("--denominator", help="Q in x.., y..")
    common.add_run_arguments(p)
    p.set_defaults(handler=run)


def run(cfg: RunConfig) -> Tuple[RunReport, int]:
    field = common.build_field(cfg)
    oracle = common.build_oracle(cfg, field)
    sampler = common.parse_sampler(cfg.x_sampler, oracle.arity, field, cfg.range)
    rng = np.random.default_rng(cfg.seed)
    ordering = BasisOrdering(cfg.x_vars, cfg.y_vars, True, t_cap=cfg.t_cap)
    if cfg.relation is not None:
        q = parse_poly(cfg.relation, ordering, field)
        report = verify_identity(q, oracle, cfg.verify_trials, cfg.range, rng, sampler=sampler)
        block = ResultBlock(kind="verify", poly=q.serialize())
    elif cfg.numerator is not None and cfg.denominator is not None:
        plain = ordering.without_t()
        rep = RationalRep(parse_poly(cfg.numerator, plain, field), parse_poly(cfg.denominator, plain, field))
        if rep.denominator.is_zero():
            raise ConfigurationError("denominator is the zero polynomial", config_key="denominator")
        report = verify_rational_rep(rep, oracle, cfg.verify_trials, cfg.range, rng, sampler=sampler)
        block = ResultBlock(kind="verify", numerator=rep.numerator.serialize(), denominator=rep.denominator.serialize())
    else:
        raise ConfigurationError("verify needs --relation or both --numerator and --denominator", config_key="relation")
    block = block.model_copy(update={"passed": report.passed, "verification": common.verification_block(report, field)})
    code = EXIT_OK if report.passed else EXIT_VERIFICATION_FAILED
    return RunReport(config=common.config_dict(cfg, field), result=block), code
