"""Rational reconstruction of separately-regular functions of (x, y).

A function f(x, y) whose x-slices and y-slices are all rational functions
is itself rational. The pipeline turns that into an algorithm:

1. scan y-slices and record each slice's annihilator index c;
2. take the most frequent value n and one y0 attaining it;
3. pick n - 1 probe points x_j, reconstruct each y-slice f(x_j, .) as
   p_j(y) / q_j(y), and clear denominators in the evaluation matrix rows;
4. the signed maximal minors delta_i(y) of that polynomial matrix give
   Q(x, y, t) = sum(delta_i(y) * e_i(x, t)), linear in t, so
   f = -A0 / A1 where Q = A0 + A1 * t;
5. verify the pair on fresh points.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field, replace
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.exceptions import (
    AllUnboundedError,
    AnnihilatorNotFoundError,
    ArityMismatchError,
    DegenerateProbeError,
    OracleFailureError,
    OrderingMismatchError,
    ValidationError,
    VerificationFailedError,
)
from core.logger import get_logger
from schemas.config_schema import ReconstructConfig, SearchConfig
from services.annihilator import VerificationReport, draw_defined, find_annihilator
from services.kernel import Point, bareiss_determinant, relation_from_points
from services.oracle import FunctionOracle, Sampler, SliceOracle, TableOracle, distinct_y_points, draw
from services.poly import BasisOrdering, Monomial, Poly, monomial_value
from services.scalar import FieldDesc, Raw

logger = get_logger("services.reconstruct")


@dataclass(frozen=True)
class SliceEntry:
    """One scanned y-slice: c is None when unbounded, `failed` when the oracle gave up."""

    y: Point
    c: Optional[int]
    witness: Optional[Poly] = None
    failed: bool = False


@dataclass(frozen=True)
class SliceProfile:
    entries: Tuple[SliceEntry, ...]

    def bounded(self) -> List[int]:
        """Bounded c values in scan order."""
        return [e.c for e in self.entries if e.c is not None]

    def histogram(self) -> Counter:
        """Count of slices per bounded c."""
        return Counter(self.bounded())


@dataclass(frozen=True)
class ProbeTuple:
    """The n - 1 probe x-points and their y-slice representations p_j / q_j."""

    points: Tuple[Point, ...]
    numerators: Tuple[Poly, ...]
    denominators: Tuple[Poly, ...]


@dataclass(frozen=True)
class RationalRep:
    """f = P / Q with P, Q in F[x, y] (not necessarily coprime).

    Attributes:
        numerator: P.
        denominator: Q, never the zero polynomial.
        method: "pipeline" or "direct".
        n: Modal slice index (pipeline only).
        b_size: Number of slices attaining n (pipeline only).
        y0: The slice point used for the probe check (pipeline only).
        probes: Probe tuple used (pipeline only).
        profile: Slice scan (pipeline only).
        verification: Fresh-point check of Q * f - P = 0.
        c: Index of the joint annihilator (direct only).
    """

    numerator: Poly
    denominator: Poly
    method: str = "pipeline"
    n: Optional[int] = None
    b_size: Optional[int] = None
    y0: Optional[Point] = None
    probes: Optional[ProbeTuple] = None
    profile: Optional[SliceProfile] = None
    verification: Optional[VerificationReport] = None
    c: Optional[int] = None
    attempts: int = dc_field(default=1)

    def evaluate(self, point: Sequence[Raw]) -> Optional[Raw]:
        """P(point) / Q(point), or None where Q vanishes."""
        den = self.denominator.evaluate(point)
        if not den:
            return None
        field = self.denominator.field
        return field.div(self.numerator.evaluate(point), den)


# slice scan

def _distinct_points(sampler: Sampler, rng: np.random.Generator, count: int, field: FieldDesc) -> List[Point]:
    out: List[Point] = []
    cursor = 0
    attempts = 0
    while len(out) < count and attempts < 10 * count:
        for p in draw(sampler, rng, count - len(out), field, start=cursor):
            cursor += 1
            attempts += 1
            if p not in out:
                out.append(p)
        if sampler.finite and cursor >= sampler.cycle_length:
            break
    return out


def _scan_one(
    oracle: FunctionOracle,
    y: Point,
    ordering: BasisOrdering,
    cfg: SearchConfig,
    seed: np.random.SeedSequence,
    x_sampler: Optional[Sampler],
) -> SliceEntry:
    slice_oracle = SliceOracle(oracle, fixed_y=y)
    rng = np.random.default_rng(seed)
    try:
        result = find_annihilator(slice_oracle, ordering, cfg, sampler=x_sampler, rng=rng)
    except AnnihilatorNotFoundError:
        return SliceEntry(y, None)
    except OracleFailureError as exc:
        logger.warning("slice %s: %s", slice_oracle.describe(), exc.message)
        return SliceEntry(y, None, failed=True)
    return SliceEntry(y, result.c, result.annihilator)


def slice_scan(
    oracle: FunctionOracle,
    cfg: ReconstructConfig,
    y_sampler: Optional[Sampler] = None,
    x_sampler: Optional[Sampler] = None,
) -> SliceProfile:
    """c of the x-slice f(., y) for `cfg.slices` distinct sampled y.

    Every slice gets its own generator spawned from the run seed, so the
    profile does not depend on `cfg.workers`.

    Args:
        oracle: A function of (x, y) with at least one variable on each side.
        cfg: Slice count, worker count and the per-slice search settings.
        y_sampler: Source of slice points; a table's own y-points by default.
        x_sampler: Point source for each slice search.

    Returns:
        One entry per distinct sampled y, in sampling order.

    Raises:
        ArityMismatchError: The oracle lacks an x or a y argument.
    """
    if oracle.num_x < 1 or oracle.num_y < 1:
        raise ArityMismatchError(2, oracle.arity, what="two-sided oracle arguments")
    search = cfg.search
    rng = np.random.default_rng(search.seed)
    if y_sampler is None:
        if isinstance(oracle, TableOracle):
            y_sampler = Sampler.from_points(distinct_y_points(oracle))
        else:
            y_sampler = Sampler.uniform(oracle.num_y, search.sample_range)
    ys = _distinct_points(y_sampler, rng, cfg.slices, oracle.field)
    ordering = BasisOrdering(oracle.num_x, 0, True, t_cap=1)
    seeds = np.random.SeedSequence(search.seed).spawn(len(ys))

    def scan(i: int) -> SliceEntry:
        return _scan_one(oracle, ys[i], ordering, search, seeds[i], x_sampler)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            entries = list(pool.map(scan, range(len(ys))))
    else:
        entries = [scan(i) for i in range(len(ys))]
    profile = SliceProfile(tuple(entries))
    logger.info("slice scan: %s slices, histogram %s", len(entries), dict(sorted(profile.histogram().items())))
    return profile


def select_mode(profile: SliceProfile) -> Tuple[int, List[int]]:
    """Most frequent bounded c (ties go to the smaller value) and the slice indices attaining it.

    Args:
        profile: A finished slice scan.

    Returns:
        The modal value n and the positions of the entries with c == n.

    Raises:
        AllUnboundedError: No slice has a bounded c.
    """
    hist = profile.histogram()
    if not hist:
        raise AllUnboundedError(len(profile.entries))
    n = min(hist, key=lambda c: (-hist[c], c))
    return n, [i for i, e in enumerate(profile.entries) if e.c == n]


# normalization

def _scale_pair(num: Poly, den: Poly, factor: Raw) -> Tuple[Poly, Poly]:
    return num.scale(factor), den.scale(factor)


def normalize_pair(num: Poly, den: Poly) -> Tuple[Poly, Poly]:
    """Remove the common monomial factor and the integer content; fix the sign or scale of Q.

    Over the rationals Q's leading coefficient is made positive and the
    combined coefficients coprime integers; over F_p Q becomes monic.

    Args:
        num: P.
        den: Q, nonzero.

    Returns:
        The normalized (P, Q).

    Raises:
        ValidationError: If den is zero.
    """
    if den.is_zero():
        raise ValidationError("denominator is the zero polynomial", field="denominator")
    terms = list(num.terms) + list(den.terms)
    common: Monomial = tuple(min(col) for col in zip(*terms))
    num, den = num.divide_monomial(common), den.divide_monomial(common)
    field = den.field
    if field.is_prime:
        return _scale_pair(num, den, field.inv(den.leading_coefficient()))
    coeffs = list(num.terms.values()) + list(den.terms.values())
    d = lcm(*(c.denominator for c in coeffs))
    g = reduce(gcd, (abs(c.numerator) * (d // c.denominator) for c in coeffs))
    factor = Fraction(d, g)
    if den.leading_coefficient() < 0:
        factor = -factor
    return _scale_pair(num, den, factor)


# verification

def verify_rational_rep(
    rep: RationalRep,
    oracle: FunctionOracle,
    trials: int,
    sample_range: int,
    rng: np.random.Generator,
    sampler: Optional[Sampler] = None,
) -> VerificationReport:
    """Check Q(p) * f(p) - P(p) = 0 at `trials` defined points; also counts Q(p) != 0.

    Args:
        rep: The candidate P / Q.
        oracle: The function it should equal.
        trials: Number of fresh defined points.
        sample_range: Bound N of the default uniform sampler.
        rng: Generator for the fresh points.
        sampler: Overrides the oracle's default sampler.

    Returns:
        A report whose `nonvanishing` counts points with Q(p) != 0.

    Raises:
        ArityMismatchError: The representation's variables do not match the oracle.
    """
    if rep.denominator.ordering.num_vars != oracle.arity:
        raise ArityMismatchError(oracle.arity, rep.denominator.ordering.num_vars, what="representation variables")
    field = oracle.field
    sampler = sampler or oracle.default_sampler(sample_range)
    failures = nonvanishing = 0
    first = None
    for point, value in draw_defined(oracle, sampler, rng, trials):
        q = rep.denominator.evaluate(point)
        if q:
            nonvanishing += 1
        if field.sub(field.mul(q, value), rep.numerator.evaluate(point)):
            failures += 1
            if first is None:
                first = point
    degree = max(rep.numerator.total_degree(), rep.denominator.total_degree() + 1)
    return VerificationReport(trials, failures, degree, first, nonvanishing)


def cross_residual(a: RationalRep, b: RationalRep, points: Sequence[Point]) -> int:
    """Number of points where P_a * Q_b - P_b * Q_a does not vanish."""
    if a.numerator.ordering != b.numerator.ordering or a.numerator.field != b.numerator.field:
        raise OrderingMismatchError("representations use different orderings or fields")
    field = a.numerator.field
    bad = 0
    for p in points:
        lhs = field.mul(a.numerator.evaluate(p), b.denominator.evaluate(p))
        rhs = field.mul(b.numerator.evaluate(p), a.denominator.evaluate(p))
        if field.sub(lhs, rhs):
            bad += 1
    return bad


def _check_verification(report: VerificationReport, cfg: ReconstructConfig, field: FieldDesc) -> None:
    fmt = lambda point: [field.format_value(c) for c in point]  # noqa: E731
    if not report.passed:
        raise VerificationFailedError(
            f"Q*f - P does not vanish at {report.failures} of {report.trials} points",
            point=fmt(report.first_failure),
            failures=report.failures,
        )
    if report.nonvanishing < cfg.nonvanishing_ratio * report.trials:
        raise VerificationFailedError(
            f"denominator vanishes at {report.trials - report.nonvanishing} of {report.trials} points",
            failures=report.trials - report.nonvanishing,
        )


def _split_t(q: Poly, target: BasisOrdering) -> Optional[Tuple[Poly, Poly]]:
    """(P, Q) = (-A0, A1) for q = A0 + A1 * t; None when A1 vanishes."""
    parts = q.t_coefficients(target)
    if len(parts) < 2 or parts[1].is_zero():
        return None
    return -parts[0], parts[1]


# the pipeline

def _y_slice_rep(
    oracle: FunctionOracle,
    x: Point,
    cfg: SearchConfig,
    rng: np.random.Generator,
    ring_y: BasisOrdering,
    y_sampler: Optional[Sampler],
) -> Optional[Tuple[Poly, Poly]]:
    """p(y), q(y) with f(x, y) = p(y) / q(y), from the y-slice's annihilator a0 + a1 * t."""
    slice_oracle = SliceOracle(oracle, fixed_x=x)
    ordering_y = BasisOrdering(oracle.num_y, 0, True, t_cap=1)
    try:
        result = find_annihilator(slice_oracle, ordering_y, cfg, sampler=y_sampler, rng=rng)
    except (AnnihilatorNotFoundError, OracleFailureError) as exc:
        logger.debug("y-slice %s rejected: %s", slice_oracle.describe(), exc.message)
        return None
    split = _split_t(result.annihilator, ordering_y.without_t())
    if split is None:
        return None
    slots = list(range(oracle.num_y))
    return split[0].embed(ring_y, slots), split[1].embed(ring_y, slots)


def _symbolic_cofactors(rows: List[List[Poly]], ring_y: BasisOrdering, field: FieldDesc) -> List[Poly]:
    one = Poly.constant(1, ring_y, field)
    out = []
    for i in range(1, len(rows) + 2):
        minor = [row[: i - 1] + row[i:] for row in rows]
        det = bareiss_determinant(minor, one, Poly.exact_div, Poly.is_zero)
        out.append(det if i % 2 == 0 else -det)
    return out


def _draw_probes(
    oracle: FunctionOracle,
    a_sampler: Sampler,
    rng: np.random.Generator,
    count: int,
    y0: Point,
) -> Optional[List[Tuple[Point, Raw]]]:
    """`count` distinct x-points from A where f(x, y0) is defined, as graph pairs of the y0-slice."""
    if count == 0:
        return []
    x_slice = SliceOracle(oracle, fixed_y=y0)
    out: List[Tuple[Point, Raw]] = []
    seen = set()
    cursor = 0
    for _ in range(10):
        for x in draw(a_sampler, rng, max(count - len(out), 1), oracle.field, start=cursor):
            cursor += 1
            if x in seen:
                continue
            seen.add(x)
            value = x_slice.evaluate(x)
            if value is not None:
                out.append((x, value))
            if len(out) == count:
                return out
    return None


def reconstruct_separately_regular(
    oracle: FunctionOracle,
    cfg: ReconstructConfig,
    a_sampler: Optional[Sampler] = None,
    y_sampler: Optional[Sampler] = None,
    x_sampler: Optional[Sampler] = None,
) -> RationalRep:
    """Reconstruct f = P / Q from slice information only.

    Args:
        oracle: A separately-regular function of (x, y).
        cfg: Slice, probe and verification settings.
        a_sampler: Source of probe x-points; the y0-slice's default sampler if omitted.
        y_sampler: Source of the scanned slice points.
        x_sampler: Point source inside each x-slice search.

    Returns:
        The verified representation with its slice profile and probes.

    Raises:
        AllUnboundedError: Every y-slice exceeded n_max.
        DegenerateProbeError: No probe tuple produced a usable Q within the retry budget.
        VerificationFailedError: The assembled pair fails the fresh-point check.
    """
    field = oracle.field
    search = cfg.search
    profile = slice_scan(oracle, cfg, y_sampler=y_sampler, x_sampler=x_sampler)
    n, attaining = select_mode(profile)
    y0 = profile.entries[attaining[0]].y
    logger.info("modal slice index n=%s attained by %s of %s slices", n, len(attaining), len(profile.entries))

    m, k = oracle.num_x, oracle.num_y
    ordering_x = BasisOrdering(m, 0, True, t_cap=1)
    ring_y = BasisOrdering(0, k, has_t=False)
    joint = BasisOrdering(m, k, True, t_cap=1)
    basis = ordering_x.enumerate(n)
    a_sampler = a_sampler or SliceOracle(oracle, fixed_y=y0).default_sampler(search.sample_range)
    seeds = np.random.SeedSequence(search.seed).spawn(len(profile.entries) + cfg.probe_retries)[len(profile.entries):]
    y_slice_sampler = None if isinstance(oracle, TableOracle) else Sampler.uniform(k, search.sample_range)

    for attempt, seed in enumerate(seeds, start=1):
        rng = np.random.default_rng(seed)
        pairs = _draw_probes(oracle, a_sampler, rng, n - 1, y0)
        if pairs is None:
            logger.debug("attempt %s: could not draw %s defined probe points", attempt, n - 1)
            continue
        if relation_from_points(pairs, ordering_x, n, field).is_zero():
            logger.debug("attempt %s: probe matrix at y0 is rank deficient", attempt)
            continue
        reps = [_y_slice_rep(oracle, x, search, rng, ring_y, y_slice_sampler) for x, _ in pairs]
        if any(r is None for r in reps):
            continue

        rows = []
        for (x, _), (p_j, q_j) in zip(pairs, reps):
            row = []
            for mono in basis:
                x_part = monomial_value(mono[:m], x, field)
                row.append((p_j if mono[m] else q_j).scale(x_part))
            rows.append(row)
        deltas = _symbolic_cofactors(rows, ring_y, field)

        y_slots = [m + i for i in range(k)]
        total = Poly.zero(joint, field)
        for delta, mono in zip(deltas, basis):
            e_i = Poly.monomial(mono[:m] + (0,) * k + (mono[m],), joint, field)
            total = total + delta.embed(joint, y_slots) * e_i
        if total.is_zero():
            logger.debug("attempt %s: assembled relation is zero", attempt)
            continue
        split = _split_t(total, joint.without_t())
        if split is None:
            logger.debug("attempt %s: assembled relation has no t term", attempt)
            continue

        num, den = normalize_pair(*split)
        rep = RationalRep(
            num,
            den,
            method="pipeline",
            n=n,
            b_size=len(attaining),
            y0=y0,
            probes=ProbeTuple(tuple(x for x, _ in pairs), tuple(r[0] for r in reps), tuple(r[1] for r in reps)),
            profile=profile,
            attempts=attempt,
        )
        report = verify_rational_rep(rep, oracle, search.verify_trials, search.sample_range, rng)
        _check_verification(report, cfg, field)
        logger.info("reconstructed after %s probe attempt(s): P=%s, Q=%s", attempt, num, den)
        return replace(rep, verification=report)

    raise DegenerateProbeError(cfg.probe_retries, n)


def direct_reconstruct(oracle: FunctionOracle, cfg: ReconstructConfig, sampler: Optional[Sampler] = None) -> RationalRep:
    """Find the joint annihilator in F[x, y, t] directly and split it by t.

    Args:
        oracle: A function of (x, y).
        cfg: Search and verification settings.
        sampler: Joint point source; the oracle's default if omitted.

    Returns:
        The verified representation with the joint index c.

    Raises:
        AnnihilatorNotFoundError: The joint search failed.
        VerificationFailedError: The annihilator has no t term or fails the fresh-point check.
    """
    joint = BasisOrdering(oracle.num_x, oracle.num_y, True, t_cap=1)
    rng = np.random.default_rng(cfg.search.seed)
    result = find_annihilator(oracle, joint, cfg.search, sampler=sampler, rng=rng)
    split = _split_t(result.annihilator, joint.without_t())
    if split is None:
        raise VerificationFailedError("joint annihilator does not involve t")
    num, den = normalize_pair(*split)
    rep = RationalRep(num, den, method="direct", c=result.c)
    report = verify_rational_rep(rep, oracle, cfg.search.verify_trials, cfg.search.sample_range, rng, sampler)
    _check_verification(report, cfg, oracle.field)
    return RationalRep(num, den, method="direct", c=result.c, verification=report)
