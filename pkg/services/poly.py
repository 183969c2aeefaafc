"""Sparse exact multivariate polynomials over an enumerated monomial basis.

Variables are ordered x1..xm, y1..yk, t (t last). The basis enumeration is
graded: ascending total degree, and inside one degree block lexicographic
with the larger exponent on an earlier variable first. Monomials whose
t-exponent exceeds the ordering's t-cap are skipped and the indices are
re-compacted, so index 1 is always the constant monomial.

Enumeration for m=1 with t and an unbounded cap::

    1, x1, t, x1^2, x1*t, t^2, x1^3, x1^2*t, x1*t^2, t^3, ...
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd, lcm
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from core.exceptions import (
    ArityMismatchError,
    FieldMismatchError,
    OrderingMismatchError,
    ValidationError,
    ZeroDenominatorError,
    ZeroPolynomialError,
)
from services import expression
from services.scalar import FieldDesc, Raw, Scalar

Monomial = Tuple[int, ...]


def _compositions(total: int, parts: int) -> Iterator[Monomial]:
    """Exponent vectors of a fixed total degree, earlier-variable-heavy first."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def order_key(mono: Monomial) -> Tuple[int, Tuple[int, ...]]:
    """Sort key that is ascending in enumeration index (independent of the t-cap)."""
    return sum(mono), tuple(-e for e in mono)


@dataclass(frozen=True)
class BasisOrdering:
    """A deterministic enumeration of admissible monomials.

    Attributes:
        num_x_vars: Number of x variables.
        num_y_vars: Number of y variables (joint mode only).
        has_t: Whether the graph variable t is present (always last).
        t_cap: Maximum exponent of t, or None for unbounded.
    """

    num_x_vars: int
    num_y_vars: int = 0
    has_t: bool = True
    t_cap: Optional[int] = None

    def __post_init__(self):
        if self.num_x_vars < 0 or self.num_y_vars < 0:
            raise ValidationError("variable counts must be non-negative", field="num_x_vars")
        if self.t_cap is not None and self.t_cap < 0:
            raise ValidationError("t_cap must be non-negative", field="t_cap")
        if not self.has_t and self.t_cap is not None:
            object.__setattr__(self, "t_cap", None)

    @property
    def num_vars(self) -> int:
        return self.num_x_vars + self.num_y_vars + (1 if self.has_t else 0)

    @property
    def t_slot(self) -> Optional[int]:
        return self.num_vars - 1 if self.has_t else None

    @property
    def variable_names(self) -> Tuple[str, ...]:
        names = [f"x{i}" for i in range(1, self.num_x_vars + 1)]
        names += [f"y{i}" for i in range(1, self.num_y_vars + 1)]
        if self.has_t:
            names.append("t")
        return tuple(names)

    @property
    def max_degree(self) -> Optional[int]:
        """Largest total degree of an admissible monomial, None if unbounded."""
        if self.num_x_vars + self.num_y_vars > 0:
            return None
        if not self.has_t:
            return 0
        return self.t_cap

    def without_t(self) -> "BasisOrdering":
        """The same x and y variables with no t slot."""
        return BasisOrdering(self.num_x_vars, self.num_y_vars, has_t=False)

    def is_admissible(self, mono: Monomial) -> bool:
        """Whether `mono` has the right length, non-negative exponents and respects the t-cap."""
        if len(mono) != self.num_vars or any(e < 0 for e in mono):
            return False
        if self.has_t and self.t_cap is not None and mono[-1] > self.t_cap:
            return False
        return True

    def degree_block(self, degree: int) -> Tuple[Monomial, ...]:
        """Admissible monomials of one total degree, in enumeration order."""
        return _degree_block(self, degree)

    def monomials(self) -> Iterator[Monomial]:
        """All admissible monomials in enumeration order (possibly infinite)."""
        degree = 0
        top = self.max_degree
        while top is None or degree <= top:
            yield from self.degree_block(degree)
            degree += 1

    def enumerate(self, count: int) -> List[Monomial]:
        """The first `count` admissible monomials.

        Args:
            count: How many monomials to return; non-positive counts give none.

        Returns:
            Exponent vectors in enumeration order. Fewer than `count` come
            back when the ordering is finite.
        """
        out: List[Monomial] = []
        if count <= 0:
            return out
        for mono in self.monomials():
            out.append(mono)
            if len(out) == count:
                break
        return out

    def index_of(self, mono: Monomial) -> int:
        """1-based enumeration index of an admissible monomial.

        Args:
            mono: Exponent vector over `variable_names`.

        Returns:
            The index i with e_i == mono.

        Raises:
            ValidationError: If the monomial is not admissible here.
        """
        if not self.is_admissible(mono):
            raise ValidationError(f"monomial {mono} is not admissible", field="monomial")
        degree = sum(mono)
        return _offset(self, degree) + _block_positions(self, degree)[mono] + 1

    def monomial_at(self, index: int) -> Monomial:
        """e_index, the basis monomial with 1-based index `index`."""
        if index < 1:
            raise ValidationError("basis indices start at 1", field="index")
        return self.enumerate(index)[index - 1]

    def describe(self) -> Dict[str, object]:
        """Ordering metadata for reports."""
        return {
            "variables": list(self.variable_names),
            "t_cap": self.t_cap,
            "order": "graded, lex within degree, earlier variable heavier",
        }


@lru_cache(maxsize=None)
def _degree_block(ordering: BasisOrdering, degree: int) -> Tuple[Monomial, ...]:
    return tuple(m for m in _compositions(degree, ordering.num_vars) if ordering.is_admissible(m))


@lru_cache(maxsize=None)
def _block_positions(ordering: BasisOrdering, degree: int) -> Dict[Monomial, int]:
    return {m: i for i, m in enumerate(_degree_block(ordering, degree))}


@lru_cache(maxsize=None)
def _offset(ordering: BasisOrdering, degree: int) -> int:
    if degree == 0:
        return 0
    return _offset(ordering, degree - 1) + len(_degree_block(ordering, degree - 1))


def enumerate_basis(ordering: BasisOrdering, count: int) -> List[Monomial]:
    """The first `count` admissible monomials in canonical order.

    Args:
        ordering: Variables, t-cap and enumeration rule.
        count: Number of basis elements e_1..e_count wanted.

    Returns:
        Exponent vectors; shorter than `count` only for finite orderings.
    """
    return ordering.enumerate(count)


def _raw(value: Union[Raw, Scalar], field: FieldDesc) -> Raw:
    if isinstance(value, Scalar):
        if value.field != field:
            raise FieldMismatchError(str(value.field), str(field))
        return value.value
    return field.convert(value)


def monomial_value(mono: Monomial, point: Sequence[Raw], field: FieldDesc) -> Raw:
    """Value of one monomial at a point of raw field values."""
    value = field.one
    for x, e in zip(point, mono):
        if e:
            value = field.mul(value, field.power(x, e))
    return value


class Poly:
    """An immutable sparse polynomial: monomial -> nonzero raw coefficient."""

    __slots__ = ("terms", "ordering", "field")

    def __init__(self, terms: Mapping[Monomial, Union[Raw, Scalar]], ordering: BasisOrdering, field: FieldDesc):
        clean: Dict[Monomial, Raw] = {}
        for mono, coeff in terms.items():
            mono = tuple(mono)
            if not ordering.is_admissible(mono):
                raise OrderingMismatchError(f"monomial {mono} is not admissible in {ordering.variable_names}")
            c = _raw(coeff, field)
            if c:
                clean[mono] = c
        self.terms = clean
        self.ordering = ordering
        self.field = field

    @classmethod
    def _make(cls, terms: Dict[Monomial, Raw], ordering: BasisOrdering, field: FieldDesc) -> "Poly":
        poly = cls.__new__(cls)
        poly.terms = {m: c for m, c in terms.items() if c}
        poly.ordering = ordering
        poly.field = field
        return poly

    @classmethod
    def zero(cls, ordering: BasisOrdering, field: FieldDesc) -> "Poly":
        return cls._make({}, ordering, field)

    @classmethod
    def constant(cls, value: Union[Raw, Scalar], ordering: BasisOrdering, field: FieldDesc) -> "Poly":
        """The constant polynomial `value`."""
        return cls({(0,) * ordering.num_vars: value}, ordering, field)

    @classmethod
    def monomial(cls, mono: Monomial, ordering: BasisOrdering, field: FieldDesc, coeff: Union[Raw, Scalar] = 1) -> "Poly":
        return cls({mono: coeff}, ordering, field)

    @classmethod
    def variable(cls, name: str, ordering: BasisOrdering, field: FieldDesc) -> "Poly":
        """The polynomial consisting of one variable, looked up by name."""
        try:
            slot = ordering.variable_names.index(name)
        except ValueError:
            raise ValidationError(f"'{name}' is not a variable of this ordering", field="variable")
        mono = tuple(1 if i == slot else 0 for i in range(ordering.num_vars))
        return cls.monomial(mono, ordering, field)

    @classmethod
    def from_coefficients(cls, coeffs: Sequence[Raw], ordering: BasisOrdering, field: FieldDesc) -> "Poly":
        """Build sum(coeffs[i] * e_{i+1}) from a coefficient vector over the basis.

        Args:
            coeffs: Raw coefficients of e_1, e_2, ...
            ordering: The basis the coefficients refer to.
            field: Field of the coefficients.

        Returns:
            The polynomial with zero coefficients dropped.
        """
        monos = ordering.enumerate(len(coeffs))
        return cls._make({m: field.convert(c) for m, c in zip(monos, coeffs)}, ordering, field)

    # structure

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, mono: Monomial) -> Raw:
        """Coefficient of `mono`, zero when absent."""
        return self.terms.get(tuple(mono), self.field.zero)

    def sorted_terms(self) -> List[Tuple[Monomial, Raw]]:
        """Terms in canonical order: descending enumeration index."""
        return sorted(self.terms.items(), key=lambda item: order_key(item[0]), reverse=True)

    def leading_monomial(self) -> Monomial:
        """Exponent vector of the term with the largest basis index."""
        if not self.terms:
            raise ZeroPolynomialError("leading_monomial")
        return max(self.terms, key=order_key)

    def leading_coefficient(self) -> Raw:
        return self.terms[self.leading_monomial()]

    def leading_index(self) -> int:
        """d(q): the largest enumeration index with a nonzero coefficient."""
        if not self.terms:
            raise ZeroPolynomialError("leading_index")
        return self.ordering.index_of(self.leading_monomial())

    def total_degree(self) -> int:
        """Largest total degree of a term; 0 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=0)

    def t_degree(self) -> int:
        """Largest exponent of t; 0 without a t slot."""
        if not self.ordering.has_t:
            return 0
        return max((m[-1] for m in self.terms), default=0)

    # arithmetic

    def _check(self, other: "Poly") -> None:
        if not isinstance(other, Poly):
            raise OrderingMismatchError("operand is not a polynomial")
        if other.ordering != self.ordering:
            raise OrderingMismatchError()
        if other.field != self.field:
            raise FieldMismatchError(str(self.field), str(other.field))

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        f = self.field
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = f.add(out[m], c) if m in out else c
        return Poly._make(out, self.ordering, f)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __neg__(self) -> "Poly":
        f = self.field
        return Poly._make({m: f.neg(c) for m, c in self.terms.items()}, self.ordering, f)

    def scale(self, factor: Union[Raw, Scalar]) -> "Poly":
        """Multiply every coefficient by a field constant."""
        f = self.field
        c0 = _raw(factor, f)
        return Poly._make({m: f.mul(c, c0) for m, c in self.terms.items()}, self.ordering, f)

    def __mul__(self, other: Union["Poly", Raw, Scalar]) -> "Poly":
        if not isinstance(other, Poly):
            return self.scale(other)
        self._check(other)
        f = self.field
        out: Dict[Monomial, Raw] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                prod = f.mul(c1, c2)
                out[m] = f.add(out[m], prod) if m in out else prod
        if any(not self.ordering.is_admissible(m) for m in out):
            raise OrderingMismatchError("product leaves the admissible monomials of the ordering")
        return Poly._make(out, self.ordering, f)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Poly":
        result = Poly.constant(1, self.ordering, self.field)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ordering == other.ordering and self.field == other.field and self.terms == other.terms

    def __hash__(self):
        return hash((self.ordering, self.field, frozenset(self.terms.items())))

    def exact_div(self, divisor: "Poly") -> "Poly":
        """Quotient of an exact division in the graded monomial order.

        Raises:
            ZeroPolynomialError: If `divisor` is zero.
            ValidationError: If the division leaves a remainder.
        """
        self._check(divisor)
        if divisor.is_zero():
            raise ZeroPolynomialError("exact_div")
        f = self.field
        lm_d = divisor.leading_monomial()
        inv_lc = f.inv(divisor.terms[lm_d])
        rem = dict(self.terms)
        quot: Dict[Monomial, Raw] = {}
        while rem:
            lm = max(rem, key=order_key)
            qm = tuple(a - b for a, b in zip(lm, lm_d))
            if any(e < 0 for e in qm):
                raise ValidationError("polynomial division is not exact", field="divisor")
            qc = f.mul(rem[lm], inv_lc)
            quot[qm] = qc
            for m, c in divisor.terms.items():
                mm = tuple(a + b for a, b in zip(m, qm))
                v = f.sub(rem.get(mm, f.zero), f.mul(qc, c))
                if v:
                    rem[mm] = v
                else:
                    rem.pop(mm, None)
        return Poly._make(quot, self.ordering, f)

    # evaluation and substitution

    def evaluate(self, point: Sequence[Union[Raw, Scalar]]) -> Raw:
        """Exact value at `point`, one coordinate per variable of the ordering.

        Raises:
            ArityMismatchError: If the point has the wrong number of coordinates.
        """
        if len(point) != self.ordering.num_vars:
            raise ArityMismatchError(self.ordering.num_vars, len(point))
        f = self.field
        pt = [_raw(p, f) for p in point]
        total = f.zero
        for mono, c in self.terms.items():
            total = f.add(total, f.mul(c, monomial_value(mono, pt, f)))
        return total

    def t_coefficients(self, target: Optional[BasisOrdering] = None) -> List["Poly"]:
        """Split by powers of t: self = sum(coeffs[j] * t^j).

        The coefficients live in `target` (default: this ordering with the
        t-exponent set to zero). When `target` has no t slot the t coordinate
        is dropped.
        """
        if not self.ordering.has_t:
            raise OrderingMismatchError("ordering has no t variable")
        target = target or self.ordering
        drop = not target.has_t
        if target.num_x_vars != self.ordering.num_x_vars or target.num_y_vars != self.ordering.num_y_vars:
            raise OrderingMismatchError("target ordering has different x/y variables")
        buckets: Dict[int, Dict[Monomial, Raw]] = {}
        for mono, c in self.terms.items():
            base = mono[:-1] if drop else mono[:-1] + (0,)
            buckets.setdefault(mono[-1], {})[base] = c
        top = max(buckets, default=0)
        return [Poly._make(buckets.get(j, {}), target, self.field) for j in range(top + 1)]

    def substitute_t(self, num: "Poly", den: "Poly") -> "Poly":
        """den * a0 + a1 * num for self = a0 + a1 * t (t replaced by num/den, denominator cleared).

        Raises:
            ZeroDenominatorError: If `den` is zero.
            OrderingMismatchError: If self has t-degree above one or orderings differ.
        """
        self._check(num)
        self._check(den)
        if den.is_zero():
            raise ZeroDenominatorError()
        if self.t_degree() > 1:
            raise OrderingMismatchError("substitute_t needs t-degree at most one")
        parts = self.t_coefficients()
        a0 = parts[0]
        a1 = parts[1] if len(parts) > 1 else Poly.zero(self.ordering, self.field)
        return den * a0 + a1 * num

    def embed(self, target: BasisOrdering, slots: Sequence[int]) -> "Poly":
        """Re-express in `target`, sending source variable i to target slot slots[i]."""
        if len(slots) != self.ordering.num_vars:
            raise ArityMismatchError(self.ordering.num_vars, len(slots), what="slot map")
        out: Dict[Monomial, Raw] = {}
        for mono, c in self.terms.items():
            vec = [0] * target.num_vars
            for i, e in enumerate(mono):
                vec[slots[i]] += e
            out[tuple(vec)] = c
        return Poly(out, target, self.field)

    # normalization

    def monic(self) -> "Poly":
        """Scale so that the coefficient of the leading monomial is 1."""
        return self.scale(self.field.inv(self.leading_coefficient()))

    def content(self) -> Raw:
        """Rational content (positive): self / content has coprime integer coefficients.

        Over a prime field the content is 1.
        """
        if self.field.is_prime or not self.terms:
            return self.field.one
        coeffs = list(self.terms.values())
        den = lcm(*(c.denominator for c in coeffs))
        num = reduce(gcd, (abs(c.numerator) * (den // c.denominator) for c in coeffs))
        return Fraction(num, den)

    def monomial_content(self) -> Monomial:
        """Exponent-wise minimum over all terms (the largest monomial dividing self)."""
        if not self.terms:
            return (0,) * self.ordering.num_vars
        return tuple(min(col) for col in zip(*self.terms))

    def divide_monomial(self, mono: Monomial) -> "Poly":
        """Divide every term by `mono`, which must divide all of them."""
        out = {tuple(a - b for a, b in zip(m, mono)): c for m, c in self.terms.items()}
        return Poly(out, self.ordering, self.field)

    # text

    def serialize(self) -> str:
        """Canonical text: terms in descending enumeration index."""
        if not self.terms:
            return "0"
        f = self.field
        names = self.ordering.variable_names
        parts: List[str] = []
        for mono, c in self.sorted_terms():
            c = f.signed(c)
            negative = c < 0
            mag = -c if negative else c
            factors = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, mono) if e]
            mag_text = str(mag)
            if not factors:
                body = mag_text
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([mag_text] + factors)
            if not parts:
                parts.append(f"-{body}" if negative else body)
            else:
                parts.append(f"- {body}" if negative else f"+ {body}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.serialize()

    def __repr__(self) -> str:
        return f"Poly({self.serialize()!r}, vars={','.join(self.ordering.variable_names)}, field={self.field})"


def leading_index(q: Poly) -> int:
    """d(q), the largest basis index with a nonzero coefficient.

    Args:
        q: A nonzero polynomial.

    Returns:
        The 1-based index of q's leading monomial.

    Raises:
        ZeroPolynomialError: If q is zero.
    """
    return q.leading_index()


def evaluate(q: Poly, point: Sequence[Union[Raw, Scalar]]) -> Scalar:
    """Exact value of q at a point given over (x-vars, y-vars, t).

    Args:
        q: The polynomial.
        point: Raw values or scalars, one per variable.

    Returns:
        The value as a `Scalar` of q's field.
    """
    return Scalar(q.evaluate(point), q.field)


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    """Add, subtract or multiply two polynomials of one ordering and field.

    Args:
        a: Left operand.
        b: Right operand.
        op: One of "add", "sub" or "mul".

    Returns:
        The exact result.

    Raises:
        OrderingMismatchError: Mixed orderings, or a product above the t-cap.
        FieldMismatchError: Mixed fields.
        ValidationError: Unknown operation name.
    """
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValidationError(f"unknown polynomial operation '{op}'", field="op")


def substitute_t(a: Poly, num: Poly, den: Poly) -> Poly:
    """den * a0 + a1 * num for a = a0 + a1 * t; see `Poly.substitute_t`."""
    return a.substitute_t(num, den)


def serialize(q: Poly) -> str:
    """Canonical text of q, terms in descending basis index."""
    return q.serialize()


def from_ast(node: expression.ExprAST, ordering: BasisOrdering, field: FieldDesc) -> Poly:
    """Expand an AST into a polynomial; division is allowed by nonzero constants only.

    Args:
        node: Parsed expression without sqrt.
        ordering: Target ordering; every variable in `node` must belong to it.
        field: Coefficient field.

    Returns:
        The expanded polynomial.

    Raises:
        ValidationError: Division by a non-constant, or a sqrt node.
    """
    if isinstance(node, expression.Const):
        return Poly.constant(node.value, ordering, field)
    if isinstance(node, expression.Var):
        return Poly.variable(node.name, ordering, field)
    if isinstance(node, expression.Neg):
        return -from_ast(node.operand, ordering, field)
    if isinstance(node, expression.Pow):
        return from_ast(node.base, ordering, field) ** node.exponent
    if isinstance(node, expression.BinOp):
        left = from_ast(node.left, ordering, field)
        right = from_ast(node.right, ordering, field)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if right.is_zero() or right.total_degree() > 0:
            raise ValidationError("polynomial text may only divide by nonzero constants", field="text")
        return left.scale(field.inv(right.coefficient((0,) * ordering.num_vars)))
    raise ValidationError("sqrt is not a polynomial operation", field="text")


def parse_poly(text: str, ordering: BasisOrdering, field: FieldDesc) -> Poly:
    """Parse polynomial text in the variables of `ordering`.

    Args:
        text: Sum of products of numbers and variables, with integer powers.
        ordering: Supplies the variable names and the admissible monomials.
        field: Field the coefficients are read into.

    Returns:
        The expanded polynomial.

    Raises:
        ExpressionSyntaxError: Malformed text (with position).
        UnknownVariableError: A variable the ordering does not have.
    """
    ast = expression.parse(
        text,
        ordering.num_x_vars,
        ordering.num_y_vars,
        allow_t=ordering.has_t,
        allow_sqrt=False,
    )
    return from_ast(ast, ordering, field)
