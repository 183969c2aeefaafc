"""Function oracles and point samplers.

An oracle is a black-box function f(x1..xm, y1..yk) over one field that
returns an exact value or None (undefined: a pole, a non-square under
sqrt, a table miss). Samplers produce the points searches evaluate at;
they stand in for the dense sets the reconstruction theory quantifies
over.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field as dc_field
from enum import Enum
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.exceptions import ArityMismatchError, ValidationError
from services import expression
from services.expression import BinOp, Const, ExprAST, Neg, Pow, Sqrt, Var
from services.scalar import FieldDesc, Raw, Scalar

Point = Tuple[Raw, ...]


def parse_expression(text: str, num_x: int, num_y: int, field: FieldDesc) -> ExprAST:
    """Parse an oracle expression (``+ - * / ^``, sqrt) over x1..x{num_x}, y1..y{num_y}.

    Args:
        text: Expression text.
        num_x: Number of x arguments.
        num_y: Number of y arguments.
        field: Field the oracle will be evaluated in.

    Returns:
        The expression tree.

    Raises:
        ExpressionSyntaxError: Malformed text.
        UnknownVariableError: A variable outside the declared arity.
    """
    return expression.parse(text, num_x, num_y, allow_t=False, allow_sqrt=True)


def _evaluate(node: ExprAST, point: Point, num_x: int, field: FieldDesc) -> Optional[Raw]:
    if isinstance(node, Const):
        return field.convert(node.value)
    if isinstance(node, Var):
        return point[node.index - 1] if node.group == "x" else point[num_x + node.index - 1]
    if isinstance(node, Neg):
        v = _evaluate(node.operand, point, num_x, field)
        return None if v is None else field.neg(v)
    if isinstance(node, Pow):
        v = _evaluate(node.base, point, num_x, field)
        return None if v is None else field.power(v, node.exponent)
    if isinstance(node, Sqrt):
        v = _evaluate(node.operand, point, num_x, field)
        return None if v is None else field.sqrt(v)
    left = _evaluate(node.left, point, num_x, field)
    if left is None:
        return None
    right = _evaluate(node.right, point, num_x, field)
    if right is None:
        return None
    if node.op == "+":
        return field.add(left, right)
    if node.op == "-":
        return field.sub(left, right)
    if node.op == "*":
        return field.mul(left, right)
    if not right:
        return None
    return field.div(left, right)


class SamplerKind(str, Enum):
    UNIFORM = "uniform"
    GRID = "grid"
    LIST = "list"
    PYTHAGOREAN = "pythagorean"


@dataclass(frozen=True)
class Sampler:
    """A deterministic point source.

    Attributes:
        kind: uniform integers, integer grid, explicit list, or Pythagorean x-values.
        dim: Coordinates per point.
        bound: Range parameter N (uniform: [-N, N]; pythagorean: m in [1, N]).
        low: Optional lower end overriding -N (uniform) or grid start.
        high: Optional upper end overriding N (uniform) or grid end.
        points: Explicit points for list samplers.
    """

    kind: SamplerKind
    dim: int
    bound: int = 10**6
    low: Optional[int] = None
    high: Optional[int] = None
    points: Tuple[Point, ...] = dc_field(default_factory=tuple)

    def __post_init__(self):
        if self.dim < 0:
            raise ValidationError("sampler dimension must be non-negative", field="dim")
        if self.kind is SamplerKind.LIST:
            if not self.points:
                raise ValidationError("list sampler needs at least one point", field="points")
            if any(len(p) != self.dim for p in self.points):
                raise ValidationError("list sampler points do not match its dimension", field="points")
        if self.kind is SamplerKind.GRID and (self.low is None or self.high is None or self.low > self.high):
            raise ValidationError("grid sampler needs low <= high", field="low")
        if self.kind is SamplerKind.PYTHAGOREAN and self.bound < 1:
            raise ValidationError("pythagorean sampler needs bound >= 1", field="bound")

    @classmethod
    def uniform(cls, dim: int, bound: int) -> "Sampler":
        """Uniform integers in [-bound, bound] (rationals) or uniform residues (F_p)."""
        return cls(SamplerKind.UNIFORM, dim, bound)

    @classmethod
    def naturals(cls, dim: int, bound: int) -> "Sampler":
        """Uniform integers in [1, N]: a proper Zariski-dense subset of affine space."""
        return cls(SamplerKind.UNIFORM, dim, bound, low=1, high=max(bound, 1))

    @classmethod
    def grid(cls, dim: int, low: int, high: int) -> "Sampler":
        """Every integer point of [low, high]^dim in lexicographic order."""
        return cls(SamplerKind.GRID, dim, low=low, high=high)

    @classmethod
    def from_points(cls, points: Sequence[Sequence[Raw]]) -> "Sampler":
        """Cycle through an explicit point list."""
        pts = tuple(tuple(p) for p in points)
        return cls(SamplerKind.LIST, len(pts[0]) if pts else 0, points=pts)

    @classmethod
    def pythagorean(cls, dim: int, bound: int) -> "Sampler":
        """x = (m^2 - 1) / (2m) for uniform m in [1, bound], so x^2 + 1 is a rational square."""
        return cls(SamplerKind.PYTHAGOREAN, dim, bound)

    @property
    def finite(self) -> bool:
        """Whether the sampler enumerates a fixed, finite point set."""
        return self.kind in (SamplerKind.GRID, SamplerKind.LIST)

    @property
    def cycle_length(self) -> Optional[int]:
        """Points before a finite sampler repeats itself; None for random samplers."""
        if self.kind is SamplerKind.LIST:
            return len(self.points)
        if self.kind is SamplerKind.GRID:
            return (self.high - self.low + 1) ** self.dim
        return None

    def describe(self) -> str:
        if self.kind is SamplerKind.UNIFORM:
            low = -self.bound if self.low is None else self.low
            high = self.bound if self.high is None else self.high
            return f"uniform[{low},{high}]^{self.dim}"
        if self.kind is SamplerKind.GRID:
            return f"grid[{self.low},{self.high}]^{self.dim}"
        if self.kind is SamplerKind.PYTHAGOREAN:
            return f"pythagorean[1,{self.bound}]^{self.dim}"
        return f"list({len(self.points)})"


def _pythagorean_value(m: int) -> Fraction:
    return Fraction(m * m - 1, 2 * m)


def draw(sampler: Sampler, rng: np.random.Generator, count: int, field: FieldDesc, start: int = 0) -> List[Point]:
    """Draw `count` points; finite samplers enumerate in fixed order from `start`, cycling.

    Duplicates are permitted; callers that need distinct points filter them.

    Args:
        sampler: The point source.
        rng: Generator for the random kinds. Finite samplers do not touch it.
        count: Number of points.
        field: Field the coordinates are converted into.
        start: Cursor into a finite sampler's fixed order.

    Returns:
        The points, as tuples of raw field values.

    Raises:
        ValidationError: If count is negative.
    """
    if count < 0:
        raise ValidationError("count must be non-negative", field="count")
    if count == 0:
        return []
    if sampler.kind is SamplerKind.LIST:
        pts = sampler.points
        return [tuple(field.convert(c) for c in pts[(start + i) % len(pts)]) for i in range(count)]
    if sampler.kind is SamplerKind.GRID:
        cells = list(product(range(sampler.low, sampler.high + 1), repeat=sampler.dim))
        return [tuple(field.convert(c) for c in cells[(start + i) % len(cells)]) for i in range(count)]
    out = []
    for _ in range(count):
        if sampler.kind is SamplerKind.PYTHAGOREAN:
            ms = rng.integers(1, sampler.bound + 1, size=sampler.dim)
            out.append(tuple(field.convert(_pythagorean_value(int(m))) for m in ms))
        elif sampler.low is None and sampler.high is None:
            out.append(tuple(field.random(rng, sampler.bound) for _ in range(sampler.dim)))
        else:
            low = -sampler.bound if sampler.low is None else sampler.low
            high = sampler.bound if sampler.high is None else sampler.high
            vals = rng.integers(low, high + 1, size=sampler.dim)
            out.append(tuple(field.convert(int(v)) for v in vals))
    return out


def pythagorean_points(count: int, field: FieldDesc) -> List[Point]:
    """x = (m^2 - 1) / (2m) for m = 1..count, where x^2 + 1 is a rational square."""
    return [(field.convert(_pythagorean_value(m)),) for m in range(1, count + 1)]


class FunctionOracle(ABC):
    """A black-box function of (x1..xm, y1..yk) over one field.

    Attributes:
        num_x: Number of x arguments.
        num_y: Number of y arguments.
        field: Field of arguments and values.
    """

    def __init__(self, num_x: int, num_y: int, field: FieldDesc):
        self.num_x = num_x
        self.num_y = num_y
        self.field = field

    @property
    def arity(self) -> int:
        return self.num_x + self.num_y

    def _check_point(self, point: Sequence[Raw]) -> Point:
        if len(point) != self.arity:
            raise ArityMismatchError(self.arity, len(point), what="oracle point")
        return tuple(p.value if isinstance(p, Scalar) else self.field.convert(p) for p in point)

    @abstractmethod
    def evaluate(self, point: Sequence[Raw]) -> Optional[Raw]:
        """Exact value at `point`, or None where f is undefined."""

    def __call__(self, point: Sequence[Raw]) -> Optional[Raw]:
        return self.evaluate(point)

    def default_sampler(self, bound: int) -> Sampler:
        """Sampler used when a search is not given one."""
        return Sampler.uniform(self.arity, bound)

    @abstractmethod
    def describe(self) -> str:
        """Short text identifying the oracle in reports."""


class ExpressionOracle(FunctionOracle):
    """An oracle defined by an expression AST."""

    def __init__(self, ast: ExprAST, num_x: int, num_y: int, field: FieldDesc, text: str = ""):
        super().__init__(num_x, num_y, field)
        self.ast = ast
        self.text = text

    @classmethod
    def from_text(cls, text: str, num_x: int, num_y: int, field: FieldDesc) -> "ExpressionOracle":
        """Parse `text` and wrap it as an oracle."""
        return cls(parse_expression(text, num_x, num_y, field), num_x, num_y, field, text)

    def evaluate(self, point: Sequence[Raw]) -> Optional[Raw]:
        return _evaluate(self.ast, self._check_point(point), self.num_x, self.field)

    def describe(self) -> str:
        return self.text


@dataclass(frozen=True)
class SampleTable:
    """Tabulated graph points: exact-match lookup, no interpolation."""

    num_x: int
    num_y: int
    field: FieldDesc
    rows: Tuple[Tuple[Point, Raw], ...]

    def __post_init__(self):
        arity = self.num_x + self.num_y
        if any(len(p) != arity for p, _ in self.rows):
            raise ValidationError(f"table rows must have {arity} coordinates", field="rows")
        if len({p for p, _ in self.rows}) != len(self.rows):
            raise ValidationError("table points are not distinct", field="rows")

    def lookup(self) -> Dict[Point, Raw]:
        """Point-to-value map of the table."""
        return dict(self.rows)

    def points(self) -> List[Point]:
        return [p for p, _ in self.rows]


class TableOracle(FunctionOracle):
    """An oracle backed by a `SampleTable`; points outside the table are undefined."""

    def __init__(self, table: SampleTable, source: str = "table"):
        super().__init__(table.num_x, table.num_y, table.field)
        self.table = table
        self.source = source
        self._index = table.lookup()

    def evaluate(self, point: Sequence[Raw]) -> Optional[Raw]:
        return self._index.get(self._check_point(point))

    def default_sampler(self, bound: int) -> Sampler:
        return Sampler.from_points(self.table.points())

    def matching_points(self, fixed: Dict[int, Raw]) -> List[Point]:
        """Table points whose coordinates at the given slots equal the fixed values."""
        return [p for p in self.table.points() if all(p[i] == v for i, v in fixed.items())]

    def describe(self) -> str:
        return self.source


class SliceOracle(FunctionOracle):
    """One-sided slice of a two-argument oracle.

    With `fixed_y` the slice is x -> f(x, fixed_y); with `fixed_x` it is
    y -> f(fixed_x, y). Either way the free variables are presented as the
    slice's x arguments.
    """

    def __init__(self, base: FunctionOracle, fixed_x: Optional[Point] = None, fixed_y: Optional[Point] = None):
        if (fixed_x is None) == (fixed_y is None):
            raise ValidationError("fix exactly one side of the oracle", field="fixed")
        fixed = fixed_x if fixed_x is not None else fixed_y
        expected = base.num_x if fixed_x is not None else base.num_y
        if len(fixed) != expected:
            raise ArityMismatchError(expected, len(fixed), what="fixed coordinates")
        free = base.num_y if fixed_x is not None else base.num_x
        super().__init__(free, 0, base.field)
        self.base = base
        self.fixed_x = None if fixed_x is None else tuple(base.field.convert(c) for c in fixed_x)
        self.fixed_y = None if fixed_y is None else tuple(base.field.convert(c) for c in fixed_y)

    def _full_point(self, point: Point) -> Point:
        return self.fixed_x + point if self.fixed_x is not None else point + self.fixed_y

    def evaluate(self, point: Sequence[Raw]) -> Optional[Raw]:
        return self.base.evaluate(self._full_point(self._check_point(point)))

    def default_sampler(self, bound: int) -> Sampler:
        if isinstance(self.base, TableOracle):
            if self.fixed_x is not None:
                fixed = dict(enumerate(self.fixed_x))
                pts = [p[self.base.num_x:] for p in self.base.matching_points(fixed)]
            else:
                fixed = {self.base.num_x + i: v for i, v in enumerate(self.fixed_y)}
                pts = [p[: self.base.num_x] for p in self.base.matching_points(fixed)]
            if pts:
                return Sampler.from_points(pts)
        return super().default_sampler(bound)

    def describe(self) -> str:
        f = self.field
        if self.fixed_x is not None:
            return f"{self.base.describe()} at x=({', '.join(f.format_value(c) for c in self.fixed_x)})"
        return f"{self.base.describe()} at y=({', '.join(f.format_value(c) for c in self.fixed_y)})"


def distinct_y_points(oracle: TableOracle) -> List[Point]:
    """Distinct y-parts of a table's points in table order."""
    seen: List[Point] = []
    for p in oracle.table.points():
        y = p[oracle.num_x:]
        if y not in seen:
            seen.append(y)
    return seen


def eval_oracle(oracle: FunctionOracle, point: Sequence[Raw]) -> Optional[Scalar]:
    """Exact value as a Scalar, or None (undefined).

    Args:
        oracle: The function.
        point: One coordinate per oracle argument, x first.

    Returns:
        f(point), or None where f is undefined.
    """
    value = oracle.evaluate(point)
    return None if value is None else Scalar(value, oracle.field)


__all__ = [
    "ExprAST",
    "ExpressionOracle",
    "FunctionOracle",
    "SampleTable",
    "Sampler",
    "SamplerKind",
    "SliceOracle",
    "TableOracle",
    "distinct_y_points",
    "draw",
    "eval_oracle",
    "parse_expression",
    "pythagorean_points",
]
