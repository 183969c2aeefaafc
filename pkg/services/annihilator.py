"""Growing-sample search for the minimal graph annihilator.

For a finite sample S of the graph, c(S) is computed by column-incremental
elimination. As S grows through nested samples c(S) is non-decreasing and
bounded by c(F), so the search grows the sample geometrically until c and
its witness stay fixed for a window of rounds, then accepts the witness
only after it vanishes on fresh points of the graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import ceil
from typing import List, Optional, Set

import numpy as np

from core.exceptions import AnnihilatorNotFoundError, ArityMismatchError, OracleFailureError, ZeroPolynomialError
from core.logger import get_logger
from schemas.config_schema import SearchConfig
from services.kernel import GraphPair, GraphSample, c_of_sample
from services.oracle import FunctionOracle, Sampler, draw
from services.poly import BasisOrdering, Poly

logger = get_logger("services.annihilator")


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of evaluating a candidate identity at fresh points.

    Attributes:
        trials: Points at which the identity was checked.
        failures: Points where it did not vanish.
        degree_bound: Total degree of the checked polynomial; with uniform
            sampling from 2N+1 values a false pass per trial has probability
            at most degree_bound / (2N+1).
        first_failure: The first failing point, if any.
        nonvanishing: For rational representations, points where Q != 0.
    """

    trials: int
    failures: int
    degree_bound: int
    first_failure: Optional[tuple] = None
    nonvanishing: Optional[int] = None

    @property
    def passed(self) -> bool:
        return self.failures == 0


@dataclass(frozen=True)
class AnnihilatorResult:
    """An accepted annihilator: q(x, f(x)) = 0 on the graph, q monic, index c."""

    c: int
    annihilator: Poly
    sample_size_used: int
    rounds: int
    verification: VerificationReport
    sample: GraphSample


class _SampleCollector:
    """Accumulates distinct defined graph pairs from an oracle, keeping earlier ones."""

    def __init__(self, oracle: FunctionOracle, sampler: Sampler, rng: np.random.Generator, cfg: SearchConfig):
        self.oracle = oracle
        self.sampler = sampler
        self.rng = rng
        self.cfg = cfg
        self.pairs: List[GraphPair] = []
        self.seen: Set[tuple] = set()
        self.cursor = 0
        self.exhausted = False

    def grow_to(self, target: int) -> None:
        """Grow to `target` pairs; sets `exhausted` when the sampler stops yielding new points."""
        needed = target - len(self.pairs)
        if needed <= 0:
            return
        budget = self.cfg.undefined_budget * needed
        undefined = repeats = 0
        while len(self.pairs) < target:
            for point in draw(self.sampler, self.rng, target - len(self.pairs), self.oracle.field, start=self.cursor):
                self.cursor += 1
                if point in self.seen:
                    repeats += 1
                    continue
                self.seen.add(point)
                value = self.oracle.evaluate(point)
                if value is None:
                    undefined += 1
                    continue
                self.pairs.append((point, value))
            if undefined > budget:
                raise OracleFailureError(
                    f"oracle undefined at {undefined} of the points drawn for {needed} samples",
                    undefined,
                    budget,
                )
            if repeats > budget or (self.sampler.finite and self.cursor >= self.sampler.cycle_length):
                if len(self.pairs) < target:
                    self.exhausted = True
                    logger.debug("sampler %s exhausted at %s pairs", self.sampler.describe(), len(self.pairs))
                return

    def sample(self) -> GraphSample:
        """The pairs collected so far, in collection order."""
        return GraphSample(tuple(self.pairs), self.oracle.field)


def _check_ordering(oracle: FunctionOracle, ordering: BasisOrdering) -> None:
    expected = ordering.num_vars - 1 if ordering.has_t else ordering.num_vars
    if oracle.arity != expected:
        raise ArityMismatchError(expected, oracle.arity, what="oracle arity")


def draw_defined(
    oracle: FunctionOracle,
    sampler: Sampler,
    rng: np.random.Generator,
    count: int,
    budget_factor: int = 10,
) -> List[GraphPair]:
    """`count` defined graph pairs (not necessarily distinct) within an undefined budget.

    Args:
        oracle: The function being sampled.
        sampler: Point source.
        rng: Generator passed to `draw`.
        count: Number of defined pairs wanted.
        budget_factor: Undefined draws tolerated per requested pair.

    Returns:
        (point, value) pairs where the oracle was defined.

    Raises:
        OracleFailureError: The oracle was undefined too often.
    """
    out: List[GraphPair] = []
    undefined = 0
    budget = budget_factor * count
    cursor = 0
    while len(out) < count:
        for point in draw(sampler, rng, count - len(out), oracle.field, start=cursor):
            cursor += 1
            value = oracle.evaluate(point)
            if value is None:
                undefined += 1
            else:
                out.append((point, value))
        if undefined > budget:
            raise OracleFailureError(f"oracle undefined at {undefined} verification points", undefined, budget)
    return out


def verify_identity(
    q: Poly,
    oracle: FunctionOracle,
    trials: int,
    sample_range: int,
    rng: np.random.Generator,
    sampler: Optional[Sampler] = None,
) -> VerificationReport:
    """Check q(x, f(x)) = 0 at `trials` points where f is defined.

    Args:
        q: Candidate relation in a graph ordering.
        oracle: The function.
        trials: Number of fresh points.
        sample_range: Bound N of the default uniform sampler.
        rng: Generator for the fresh points.
        sampler: Overrides the oracle's default sampler.

    Returns:
        The verification report; `passed` is true when no point failed.

    Raises:
        ZeroPolynomialError: q is the zero polynomial (it vanishes everywhere).
        OracleFailureError: Too many undefined draws.
    """
    if q.is_zero():
        raise ZeroPolynomialError("verify_identity")
    _check_ordering(oracle, q.ordering)
    sampler = sampler or oracle.default_sampler(sample_range)
    failures = 0
    first = None
    for point, value in draw_defined(oracle, sampler, rng, trials):
        if q.evaluate(point + (value,)):
            failures += 1
            if first is None:
                first = point
    report = VerificationReport(trials, failures, q.total_degree(), first)
    logger.debug("verify_identity: %s trials, %s failures", trials, failures)
    return report


def find_annihilator(
    oracle: FunctionOracle,
    ordering: BasisOrdering,
    cfg: SearchConfig,
    sampler: Optional[Sampler] = None,
    rng: Optional[np.random.Generator] = None,
) -> AnnihilatorResult:
    """Minimal annihilator of the oracle's graph in `ordering`.

    Args:
        oracle: The function f.
        ordering: Graph ordering (x-variables, then t standing for f(x)).
        cfg: Search limits and seed.
        sampler: Point source; defaults to the oracle's own.
        rng: Generator; defaults to one seeded from `cfg.seed`.

    Returns:
        The accepted annihilator with its index c and verification report.

    Raises:
        AnnihilatorNotFoundError: c exceeds n_max on some sample, the sample
            budget runs out, or a finite sampler is exhausted before a
            verified candidate appears.
        OracleFailureError: The oracle is undefined too often.
    """
    _check_ordering(oracle, ordering)
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    sampler = sampler or oracle.default_sampler(cfg.sample_range)
    collector = _SampleCollector(oracle, sampler, rng, cfg)
    history: deque = deque(maxlen=cfg.stabilize_window)
    target = min(cfg.initial_samples, cfg.max_samples)
    rounds = 0

    while True:
        rounds += 1
        collector.grow_to(target)
        sample = collector.sample()
        cv = c_of_sample(sample, ordering, cfg.n_max)
        if not cv.bounded:
            raise AnnihilatorNotFoundError(
                f"no annihilator among the first {cfg.n_max} basis monomials on {len(sample)} points",
                cfg.n_max,
                len(sample),
            )
        logger.info("round %s: %s points, c=%s", rounds, len(sample), cv.n)
        history.append((cv.n, cv.witness))

        stable = len(history) == history.maxlen and all(h == history[0] for h in history)
        if stable or collector.exhausted:
            report = verify_identity(cv.witness, oracle, cfg.verify_trials, cfg.sample_range, rng, sampler)
            if report.passed:
                return AnnihilatorResult(cv.n, cv.witness, len(sample), rounds, report, sample)
            logger.warning("candidate with c=%s failed %s of %s verification points", cv.n, report.failures, report.trials)
            history.clear()

        if collector.exhausted:
            raise AnnihilatorNotFoundError(
                f"sampler exhausted at {len(sample)} points before c stabilized",
                cfg.n_max,
                len(sample),
            )
        if len(sample) >= cfg.max_samples:
            raise AnnihilatorNotFoundError(
                f"c did not stabilize within {cfg.max_samples} points",
                cfg.n_max,
                len(sample),
            )
        target = min(cfg.max_samples, max(target + 1, ceil(target * cfg.growth)))
