"""Evaluation matrices on graph samples and their exact linear algebra.

The columns of an evaluation matrix are the first n basis monomials, the
rows are graph points (x, f(x)). A kernel vector is the coefficient vector
of a polynomial vanishing on every sampled graph point; the smallest n with
a nontrivial kernel is c of the sample. Signed maximal minors of an
(n-1) x n matrix give the cofactor vector, which spans the kernel exactly
when the rank is n-1.

Rationals are handled fraction-free (rows scaled to integers, Bareiss
elimination); prime fields use plain elimination modulo p.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd, lcm
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from core.exceptions import ArityMismatchError, ShapeMismatchError, ValidationError
from core.logger import get_logger
from services.poly import BasisOrdering, Poly, monomial_value
from services.scalar import FieldDesc, Raw

logger = get_logger("services.kernel")

T = TypeVar("T")
Point = Tuple[Raw, ...]
GraphPair = Tuple[Point, Raw]


@dataclass(frozen=True)
class GraphSample:
    """A finite set of graph pairs (point, value) standing in for the graph of f.

    Attributes:
        pairs: (point, value) pairs with raw field values.
        field: The field all coordinates live in.
        distinct: Whether the pairs were checked to be pairwise distinct.
    """

    pairs: Tuple[GraphPair, ...]
    field: FieldDesc
    distinct: bool = True

    def __post_init__(self):
        arities = {len(p) for p, _ in self.pairs}
        if len(arities) > 1:
            raise ValidationError(f"sample points have mixed arities {sorted(arities)}", field="points")
        if self.distinct and len(set(self.pairs)) != len(self.pairs):
            raise ValidationError("sample pairs are not distinct", field="points")

    @classmethod
    def from_pairs(cls, pairs, field: FieldDesc, dedupe: bool = True) -> "GraphSample":
        """Normalize coordinates and, with `dedupe`, drop repeated pairs keeping first occurrences."""
        seen = set()
        out = []
        for point, value in pairs:
            pair = (tuple(field.convert(c) for c in point), field.convert(value))
            if dedupe:
                if pair in seen:
                    continue
                seen.add(pair)
            out.append(pair)
        return cls(tuple(out), field, distinct=dedupe)

    @property
    def arity(self) -> Optional[int]:
        return len(self.pairs[0][0]) if self.pairs else None

    def __len__(self) -> int:
        return len(self.pairs)

    def graph_points(self) -> List[Point]:
        """The sample as points of the graph space (coordinates followed by the value)."""
        return [point + (value,) for point, value in self.pairs]

    def subset(self, count: int) -> "GraphSample":
        """The first `count` pairs as a sample."""
        return GraphSample(self.pairs[:count], self.field, self.distinct)


@dataclass(frozen=True)
class EvalMatrix:
    """Entry (i, j) is basis monomial e_{j+1} evaluated at the i-th graph point."""

    entries: np.ndarray
    field: FieldDesc

    @property
    def shape(self) -> Tuple[int, int]:
        return self.entries.shape

    def tolist(self) -> List[List[Raw]]:
        return self.entries.tolist()

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Raw]], field: FieldDesc, cols: Optional[int] = None) -> "EvalMatrix":
        """Matrix from nested rows, converting every entry into `field`."""
        if not rows:
            return cls(np.empty((0, cols or 0), dtype=object), field)
        arr = np.empty((len(rows), len(rows[0])), dtype=object)
        for i, row in enumerate(rows):
            arr[i, :] = [field.convert(v) for v in row]
        return cls(arr, field)


@dataclass(frozen=True)
class CValue:
    """c of a sample: None means unbounded within the searched prefix."""

    n: Optional[int]
    witness: Optional[Poly] = None

    @property
    def bounded(self) -> bool:
        return self.n is not None


def _check_arity(sample: GraphSample, ordering: BasisOrdering) -> None:
    if not ordering.has_t:
        raise ValidationError("graph orderings need the t variable", field="ordering")
    expected = ordering.num_vars - 1
    if sample.arity is not None and sample.arity != expected:
        raise ArityMismatchError(expected, sample.arity)


def _basis(ordering: BasisOrdering, n: int):
    monos = ordering.enumerate(n)
    if len(monos) < n:
        raise ValidationError(f"ordering has only {len(monos)} admissible monomials, {n} requested", field="n")
    return monos


def build_matrix(sample: GraphSample, ordering: BasisOrdering, n: int) -> EvalMatrix:
    """|sample| x n matrix of exact basis evaluations at the sampled graph points.

    Args:
        sample: Graph pairs (x, f(x)).
        ordering: Graph ordering; its t slot receives f(x).
        n: Number of leading basis monomials used as columns.

    Returns:
        The evaluation matrix over the sample's field.

    Raises:
        ValidationError: If n < 1 or the ordering has fewer than n monomials.
        ArityMismatchError: If the sample points do not match the ordering.
    """
    if n < 1:
        raise ValidationError("n must be at least 1", field="n")
    _check_arity(sample, ordering)
    monos = _basis(ordering, n)
    field = sample.field
    arr = np.empty((len(sample), n), dtype=object)
    for i, gp in enumerate(sample.graph_points()):
        arr[i, :] = [monomial_value(m, gp, field) for m in monos]
    return EvalMatrix(arr, field)


# integer helpers (rational path)

def _integer_rows(entries: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """Scale every row by the lcm of its denominators; returns the int matrix and the scales."""
    out = np.empty(entries.shape, dtype=object)
    scales = []
    for i, row in enumerate(entries):
        s = lcm(*(Fraction(v).denominator for v in row)) if len(row) else 1
        out[i, :] = [int(Fraction(v) * s) for v in row]
        scales.append(s)
    return out, scales


def _bareiss_echelon(M: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """Fraction-free row echelon form of an integer matrix (object dtype)."""
    M = M.copy()
    rows, cols = M.shape
    r, prev = 0, 1
    pivots: List[int] = []
    for c in range(cols):
        if r == rows:
            break
        nz = next((i for i in range(r, rows) if M[i, c] != 0), None)
        if nz is None:
            continue
        if nz != r:
            M[[r, nz], :] = M[[nz, r], :]
        piv = M[r, c]
        for i in range(r + 1, rows):
            if c + 1 < cols:
                M[i, c + 1:] = (piv * M[i, c + 1:] - M[i, c] * M[r, c + 1:]) // prev
            M[i, c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return M, pivots


def _primitive(vec: List[Fraction]) -> List[Fraction]:
    den = lcm(*(v.denominator for v in vec))
    ints = [int(v * den) for v in vec]
    g = reduce(gcd, (abs(v) for v in ints)) or 1
    return [Fraction(v // g) for v in ints]


def _rank_kernel_rational(entries: np.ndarray) -> Tuple[int, List[List[Raw]]]:
    rows, cols = entries.shape
    if rows == 0:
        return 0, [[Fraction(int(i == j)) for i in range(cols)] for j in range(cols)]
    M, pivots = _bareiss_echelon(_integer_rows(entries)[0])
    rank = len(pivots)
    free = [c for c in range(cols) if c not in pivots]
    kernel = []
    for fcol in free:
        v = [Fraction(0)] * cols
        v[fcol] = Fraction(1)
        for k in range(rank - 1, -1, -1):
            pc = pivots[k]
            s = sum((M[k, j] * v[j] for j in range(pc + 1, cols)), Fraction(0))
            v[pc] = -s / M[k, pc]
        kernel.append(_primitive(v))
    return rank, kernel


def _rank_kernel_prime(entries: np.ndarray, p: int) -> Tuple[int, List[List[Raw]]]:
    M = entries.copy()
    rows, cols = M.shape
    r = 0
    pivots: List[int] = []
    for c in range(cols):
        if r == rows:
            break
        nz = next((i for i in range(r, rows) if M[i, c] % p), None)
        if nz is None:
            continue
        if nz != r:
            M[[r, nz], :] = M[[nz, r], :]
        M[r, :] = M[r, :] * pow(int(M[r, c]), -1, p) % p
        for i in range(rows):
            if i != r and M[i, c]:
                M[i, :] = (M[i, :] - M[i, c] * M[r, :]) % p
        pivots.append(c)
        r += 1
    kernel = []
    for fcol in (c for c in range(cols) if c not in pivots):
        v = [0] * cols
        v[fcol] = 1
        for k, pc in enumerate(pivots):
            v[pc] = -M[k, fcol] % p
        kernel.append(v)
    return len(pivots), kernel


def rank_kernel(mat: EvalMatrix) -> Tuple[int, List[List[Raw]]]:
    """Exact rank and a kernel basis (M v = 0 exactly for every returned v).

    Args:
        mat: Any evaluation matrix.

    Returns:
        A (rank, kernel) pair. The kernel has one vector per non-pivot column.
        Over the rationals the vectors are primitive integer vectors.
    """
    if mat.field.is_prime:
        return _rank_kernel_prime(mat.entries, mat.field.modulus)
    return _rank_kernel_rational(mat.entries)


# determinants

def bareiss_determinant(
    rows: Sequence[Sequence[T]],
    one: T,
    exquo: Callable[[T, T], T],
    is_zero: Callable[[T], bool],
) -> T:
    """Fraction-free determinant over an integral domain with exact division.

    Works for Python ints (``exquo=operator.floordiv``), residues (with a
    modular exquo) and polynomials (``Poly.exact_div``).

    Args:
        rows: Square matrix of ring elements.
        one: The ring's unit, returned for the empty matrix.
        exquo: Exact quotient a / b, with b known to divide a.
        is_zero: Zero test for pivot search.

    Returns:
        The determinant as a ring element.
    """
    n = len(rows)
    if n == 0:
        return one
    M = [list(r) for r in rows]
    negate = False
    prev = one
    for k in range(n - 1):
        if is_zero(M[k][k]):
            swap = next((i for i in range(k + 1, n) if not is_zero(M[i][k])), None)
            if swap is None:
                return M[k][k]
            M[k], M[swap] = M[swap], M[k]
            negate = not negate
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = exquo(M[k][k] * M[i][j] - M[i][k] * M[k][j], prev)
        prev = M[k][k]
    det = M[n - 1][n - 1]
    return -det if negate else det


def laplace_determinant(rows: Sequence[Sequence[Raw]], field: FieldDesc) -> Raw:
    """Determinant by cofactor expansion, used as an independent check of `determinant`.

    Minors are memoized on (row, remaining columns), which keeps the
    expansion at O(n * 2^n) field operations.

    Args:
        rows: A square matrix of raw field values.
        field: The field the entries live in.

    Returns:
        The determinant as a raw field value.
    """
    n = len(rows)
    if n == 0:
        return field.one

    @lru_cache(maxsize=None)
    def expand(row: int, columns: int) -> Raw:
        if row == n:
            return field.one
        total = field.zero
        position = 0
        for j in range(n):
            if not columns >> j & 1:
                continue
            if rows[row][j]:
                term = field.mul(rows[row][j], expand(row + 1, columns & ~(1 << j)))
                total = field.sub(total, term) if position % 2 else field.add(total, term)
            position += 1
        return total

    return expand(0, (1 << n) - 1)


def determinant(rows: Sequence[Sequence[Raw]], field: FieldDesc) -> Raw:
    """Exact determinant; rationals go through integer rows and Bareiss."""
    if field.is_prime:
        p = field.modulus
        det = bareiss_determinant(
            [[int(v) for v in row] for row in rows],
            1,
            lambda a, b: a * pow(b, -1, p) % p,
            lambda a: a % p == 0,
        )
        return det % p
    arr = np.empty((len(rows), len(rows)), dtype=object)
    for i, row in enumerate(rows):
        arr[i, :] = list(row)
    ints, scales = _integer_rows(arr) if len(rows) else (arr, [])
    det = bareiss_determinant(ints.tolist(), 1, lambda a, b: a // b, lambda a: a == 0)
    return Fraction(det, reduce(lambda a, b: a * b, scales, 1))


def cofactor_vector(mat: EvalMatrix) -> List[Raw]:
    """Signed maximal minors: delta_i = (-1)^i det(M without column i), i = 1..n.

    The vector lies in the kernel of `mat` and is nonzero iff rank = n - 1.

    Args:
        mat: An (n - 1) x n evaluation matrix.

    Returns:
        The n cofactors as raw field values.

    Raises:
        ShapeMismatchError: Unless the matrix has one more column than rows.
    """
    rows, cols = mat.shape
    if cols != rows + 1:
        raise ShapeMismatchError("(n-1) x n", rows, cols)
    field = mat.field
    data = mat.tolist()
    out = []
    for i in range(1, cols + 1):
        minor = [row[:i - 1] + row[i:] for row in data]
        det = determinant(minor, field)
        out.append(det if i % 2 == 0 else field.neg(det))
    return out


# point selection and the cofactor relation

class _RowBasis:
    """Incrementally reduced row space over the field (insertion-ordered pivots)."""

    def __init__(self, field: FieldDesc):
        self.field = field
        self.rows: List[Tuple[int, List[Raw]]] = []

    def try_add(self, row: Sequence[Raw]) -> bool:
        """Reduce `row` against the basis and keep it if something nonzero is left."""
        f = self.field
        r = list(row)
        for pc, brow in self.rows:
            if r[pc]:
                factor = r[pc]
                r = [f.sub(a, f.mul(factor, b)) for a, b in zip(r, brow)]
        pc = next((j for j, v in enumerate(r) if v), None)
        if pc is None:
            return False
        inv = f.inv(r[pc])
        self.rows.append((pc, [f.mul(v, inv) for v in r]))
        return True


def select_points(sample: GraphSample, ordering: BasisOrdering, n: int) -> Optional[List[GraphPair]]:
    """Greedy choice of n - 1 sample pairs on which the first n basis columns have rank n - 1.

    A pair is kept iff it strictly increases the rank of the accumulated
    evaluation matrix; the scan follows sample order. Returns None
    (degenerate) when the whole sample has rank below n - 1.

    Args:
        sample: Candidate graph pairs, scanned in order.
        ordering: Graph ordering of the columns.
        n: Number of columns; n - 1 pairs are chosen.

    Returns:
        The chosen pairs, or None.
    """
    if n < 1:
        raise ValidationError("n must be at least 1", field="n")
    if n == 1:
        return []
    _check_arity(sample, ordering)
    monos = _basis(ordering, n)
    basis = _RowBasis(sample.field)
    chosen: List[GraphPair] = []
    for pair in sample.pairs:
        gp = pair[0] + (pair[1],)
        if basis.try_add([monomial_value(m, gp, sample.field) for m in monos]):
            chosen.append(pair)
            if len(chosen) == n - 1:
                return chosen
    logger.debug("select_points: sample of %s pairs has rank %s < %s", len(sample), len(chosen), n - 1)
    return None


def relation_from_points(pairs: Sequence[GraphPair], ordering: BasisOrdering, n: int, field: FieldDesc) -> Poly:
    """P = sum(delta_i * e_i) for an explicit tuple of n - 1 graph pairs (zero when rank-deficient)."""
    if len(pairs) != n - 1:
        raise ShapeMismatchError(f"{n - 1}-point", len(pairs), n)
    mat = build_matrix(GraphSample.from_pairs(pairs, field, dedupe=False), ordering, n)
    return Poly.from_coefficients(cofactor_vector(mat), ordering, field)


def cofactor_relation(sample: GraphSample, ordering: BasisOrdering, n: int) -> Poly:
    """P = sum(delta_i * e_i) over greedily selected sample points; it vanishes on the sample.

    If the sample cannot reach rank n - 1 the first n - 1 pairs are used and
    the resulting polynomial is the zero polynomial.
    """
    chosen = select_points(sample, ordering, n)
    if chosen is None:
        chosen = list(sample.pairs[: n - 1])
        if len(chosen) < n - 1:
            return Poly.zero(ordering, sample.field)
    return relation_from_points(chosen, ordering, n, sample.field)


# c of a sample

class _ModularPrefix:
    """Column-incremental elimination of an evaluation matrix over F_p.

    Each added column is reduced by replaying the recorded pivot steps, so
    extending the prefix from n - 1 to n columns costs one column's worth
    of work.
    """

    def __init__(self, num_rows: int, field: FieldDesc):
        self.field = field
        self.free_rows = list(range(num_rows))
        self.steps: List[Tuple[int, Dict[int, Raw]]] = []
        self.pivot_entries: List[List[Raw]] = []

    def add_column(self, column: Sequence[Raw]) -> Optional[List[Raw]]:
        """Add a column; returns a kernel vector over all columns if it is dependent."""
        f = self.field
        v = list(column)
        for row, multipliers in self.steps:
            pv = v[row]
            if pv:
                for i, m in multipliers.items():
                    v[i] = f.sub(v[i], f.mul(m, pv))
        pivot_row = next((i for i in self.free_rows if v[i]), None)
        if pivot_row is None:
            return self._dependency(v)
        self.free_rows.remove(pivot_row)
        inv = f.inv(v[pivot_row])
        multipliers = {i: f.mul(v[i], inv) for i in self.free_rows if v[i]}
        self.steps.append((pivot_row, multipliers))
        self.pivot_entries.append([v[row] for row, _ in self.steps])
        return None

    def _dependency(self, v: List[Raw]) -> List[Raw]:
        f = self.field
        k_total = len(self.steps)
        coeffs = [f.zero] * k_total
        for k in range(k_total - 1, -1, -1):
            row = self.steps[k][0]
            s = v[row]
            for j in range(k + 1, k_total):
                s = f.add(s, f.mul(coeffs[j], self.pivot_entries[j][k]))
            coeffs[k] = f.neg(f.div(s, self.pivot_entries[k][k]))
        return coeffs + [f.one]


class _FractionFreePrefix:
    """Column-incremental Bareiss elimination for rational evaluation matrices.

    Every column is scaled to integers by the lcm of its denominators before
    it is reduced, and the elimination state stays integral. After k pivot
    steps a free-row entry is a (k+1)-minor of the scaled matrix, so each
    division by the previous pivot is exact. Pivot columns are always the
    leading columns, because the search stops at the first dependent one.
    """

    def __init__(self, num_rows: int):
        self.free_rows = list(range(num_rows))
        # (pivot row, pivot, previous pivot, pivot-column entries of the rows below)
        self.steps: List[Tuple[int, int, int, Dict[int, int]]] = []
        self.pivot_entries: List[List[int]] = []
        self.scales: List[int] = []

    def add_column(self, column: Sequence[Raw]) -> Optional[List[Raw]]:
        """Add a column; returns a kernel vector over all columns if it is dependent.

        Args:
            column: The rational entries of the next basis column.

        Returns:
            None while the columns stay independent, otherwise a kernel vector
            of the original columns whose last entry is 1.
        """
        values = [Fraction(c) for c in column]
        scale = lcm(*(c.denominator for c in values)) if values else 1
        v = [c.numerator * (scale // c.denominator) for c in values]
        self.scales.append(scale)
        for row, pivot, prev, below in self.steps:
            pv = v[row]
            for i, m in below.items():
                v[i] = (pivot * v[i] - m * pv) // prev
        pivot_row = next((i for i in self.free_rows if v[i]), None)
        if pivot_row is None:
            return self._dependency(v)
        self.free_rows.remove(pivot_row)
        prev = self.steps[-1][1] if self.steps else 1
        self.steps.append((pivot_row, v[pivot_row], prev, {i: v[i] for i in self.free_rows}))
        self.pivot_entries.append([v[row] for row, *_ in self.steps])
        return None

    def _dependency(self, v: List[int]) -> List[Raw]:
        k_total = len(self.steps)
        coeffs = [Fraction(0)] * k_total
        for k in range(k_total - 1, -1, -1):
            s = Fraction(v[self.steps[k][0]])
            for j in range(k + 1, k_total):
                s += coeffs[j] * self.pivot_entries[j][k]
            coeffs[k] = -s / self.pivot_entries[k][k]
        scaled = coeffs + [Fraction(1)]
        last = self.scales[-1]
        return [w * s / last for w, s in zip(scaled, self.scales)]


def c_of_sample(sample: GraphSample, ordering: BasisOrdering, n_max: int) -> CValue:
    """Smallest n <= n_max whose prefix matrix has a nontrivial kernel, with a monic witness.

    At the returned n the kernel is one-dimensional, so the witness is unique
    up to scale.

    Args:
        sample: Graph pairs of the function.
        ordering: Graph ordering supplying the columns e_1, e_2, ...
        n_max: Largest prefix length tried.

    Returns:
        A bounded `CValue` with its witness, or an unbounded one when every
        prefix up to n_max has trivial kernel.

    Raises:
        ValidationError: If n_max < 1.
    """
    if n_max < 1:
        raise ValidationError("n_max must be at least 1", field="n_max")
    _check_arity(sample, ordering)
    field = sample.field
    points = sample.graph_points()
    elim = _ModularPrefix(len(points), field) if field.is_prime else _FractionFreePrefix(len(points))
    for n, mono in enumerate(ordering.monomials(), start=1):
        if n > n_max:
            break
        column = [monomial_value(mono, gp, field) for gp in points]
        kernel = elim.add_column(column)
        if kernel is not None:
            witness = Poly.from_coefficients(kernel, ordering, field).monic()
            logger.debug("c_of_sample: %s points -> c=%s", len(points), n)
            return CValue(n, witness)
    return CValue(None)
