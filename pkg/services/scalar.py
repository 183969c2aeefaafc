"""Exact field arithmetic over the rationals and prime fields.

A `FieldDesc` names the ground field and doubles as the arithmetic domain
for raw values: rationals are `fractions.Fraction` in lowest terms, prime
field elements are canonical residues `0 <= r < p`. `Scalar` wraps a raw
value together with its field for the public, operator-based API; the
engines (`poly`, `kernel`) work on raw values through the field methods.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import isqrt
from typing import Optional, Union

import numpy as np
from sympy import isprime
from sympy.ntheory import sqrt_mod

from core.exceptions import (
    DivisionByZeroError,
    FieldMismatchError,
    ValidationError,
    WrongFieldError,
)

Raw = Union[int, Fraction]

DEFAULT_PRIME = 2147483647
_RATIONAL_TEXT = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")
_INTEGER_TEXT = re.compile(r"^\s*[+-]?\d+\s*$")


class FieldKind(str, Enum):
    RATIONALS = "q"
    PRIME = "fp"


@dataclass(frozen=True)
class FieldDesc:
    """The ground field of a computation.

    Attributes:
        kind: Rationals or a prime field.
        modulus: The prime p (prime fields only, 2 < p < 2**31).
    """

    kind: FieldKind
    modulus: Optional[int] = None

    def __post_init__(self):
        if self.kind is FieldKind.RATIONALS:
            if self.modulus is not None:
                raise ValidationError("the rational field takes no modulus", field="modulus")
            return
        p = self.modulus
        if p is None or not 2 < p < 2**31 or not isprime(p):
            raise ValidationError(f"modulus must be a prime with 2 < p < 2^31, got {p}", field="modulus")

    @classmethod
    def rationals(cls) -> "FieldDesc":
        return cls(FieldKind.RATIONALS)

    @classmethod
    def prime(cls, p: int = DEFAULT_PRIME) -> "FieldDesc":
        """F_p; the modulus is checked for primality."""
        return cls(FieldKind.PRIME, p)

    @classmethod
    def parse(cls, spec: str, default_prime: int = DEFAULT_PRIME) -> "FieldDesc":
        """Parse the CLI encoding: ``q``, ``fp`` or ``fp:<p>``.

        Args:
            spec: The field text, case-insensitive.
            default_prime: Modulus used for a bare ``fp``.

        Returns:
            The field description.

        Raises:
            ValidationError: Unknown encoding, or a modulus that is not a suitable prime.
        """
        text = spec.strip().lower()
        if text == "q":
            return cls.rationals()
        if text == "fp":
            return cls.prime(default_prime)
        if text.startswith("fp:") and _INTEGER_TEXT.match(text[3:]):
            return cls.prime(int(text[3:]))
        raise ValidationError(f"unknown field spec '{spec}' (expected q or fp:<p>)", field="field")

    @property
    def is_prime(self) -> bool:
        return self.kind is FieldKind.PRIME

    def __str__(self) -> str:
        return "q" if self.kind is FieldKind.RATIONALS else f"fp:{self.modulus}"

    # raw-value domain

    @property
    def zero(self) -> Raw:
        return 0 if self.is_prime else Fraction(0)

    @property
    def one(self) -> Raw:
        return 1 if self.is_prime else Fraction(1)

    def convert(self, value: Raw) -> Raw:
        """Bring an int or Fraction into canonical form for this field.

        Raises:
            DivisionByZeroError: A fraction whose denominator vanishes mod p.
        """
        if self.is_prime:
            if isinstance(value, Fraction):
                if value.denominator % self.modulus == 0:
                    raise DivisionByZeroError(f"denominator {value.denominator} vanishes mod {self.modulus}")
                return value.numerator * pow(value.denominator, -1, self.modulus) % self.modulus
            return int(value) % self.modulus
        return Fraction(value)

    def add(self, a: Raw, b: Raw) -> Raw:
        return (a + b) % self.modulus if self.is_prime else a + b

    def sub(self, a: Raw, b: Raw) -> Raw:
        return (a - b) % self.modulus if self.is_prime else a - b

    def mul(self, a: Raw, b: Raw) -> Raw:
        return a * b % self.modulus if self.is_prime else a * b

    def neg(self, a: Raw) -> Raw:
        return -a % self.modulus if self.is_prime else -a

    def inv(self, a: Raw) -> Raw:
        """Multiplicative inverse; raises DivisionByZeroError for zero."""
        if not a:
            raise DivisionByZeroError()
        return pow(a, -1, self.modulus) if self.is_prime else 1 / a

    def div(self, a: Raw, b: Raw) -> Raw:
        return self.mul(a, self.inv(b))

    def power(self, a: Raw, e: int) -> Raw:
        return pow(a, e, self.modulus) if self.is_prime else a**e

    def sqrt(self, a: Raw) -> Optional[Raw]:
        """Canonical square root, or None when `a` is not a square.

        Over a prime field the root is min(r, p - r); over the rationals only
        perfect squares of rationals have a root and the non-negative one is
        returned.
        """
        if self.is_prime:
            if a == 0:
                return 0
            r = sqrt_mod(a, self.modulus)
            if r is None:
                return None
            r = int(r)
            return min(r, self.modulus - r)
        if a < 0:
            return None
        num, den = a.numerator, a.denominator
        rn, rd = isqrt(num), isqrt(den)
        if rn * rn != num or rd * rd != den:
            return None
        return Fraction(rn, rd)

    def random(self, rng: np.random.Generator, bound: int) -> Raw:
        """Uniform integer in [-bound, bound] (rationals) or uniform residue."""
        if self.is_prime:
            return int(rng.integers(0, self.modulus))
        return Fraction(int(rng.integers(-bound, bound + 1)))

    def parse_value(self, text: str) -> Raw:
        """Decode the text encoding: ``p/q`` or ``p`` for rationals, residues for F_p."""
        pattern = _INTEGER_TEXT if self.is_prime else _RATIONAL_TEXT
        if not pattern.match(text):
            raise ValidationError(f"'{text}' is not a valid {self} element", field="value")
        if self.is_prime:
            return int(text) % self.modulus
        num, _, den = text.replace(" ", "").partition("/")
        if den and int(den) == 0:
            raise DivisionByZeroError(f"zero denominator in '{text}'")
        return Fraction(int(num), int(den) if den else 1)

    def format_value(self, a: Raw) -> str:
        """Text encoding of a raw value, the inverse of `parse_value`."""
        if self.is_prime:
            return str(a)
        return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"

    def signed(self, a: Raw) -> Raw:
        """Representative used for display: residues above p/2 shown negative."""
        if self.is_prime and a > self.modulus // 2:
            return a - self.modulus
        return a


class Scalar:
    """An immutable field element tagged with its field."""

    __slots__ = ("value", "field")

    def __init__(self, value: Raw, field: FieldDesc):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "value", field.convert(value))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    @classmethod
    def parse(cls, text: str, field: FieldDesc) -> "Scalar":
        """Decode `text` as an element of `field`."""
        return cls(field.parse_value(text), field)

    def _coerce(self, other) -> Raw:
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldMismatchError(str(self.field), str(other.field))
            return other.value
        if isinstance(other, (int, Fraction)):
            return self.field.convert(other)
        return NotImplemented

    def __add__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else Scalar(self.field.add(self.value, b), self.field)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else Scalar(self.field.sub(self.value, b), self.field)

    def __rsub__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else Scalar(self.field.sub(b, self.value), self.field)

    def __mul__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else Scalar(self.field.mul(self.value, b), self.field)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else Scalar(self.field.div(self.value, b), self.field)

    def __rtruediv__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else Scalar(self.field.div(b, self.value), self.field)

    def __neg__(self):
        return Scalar(self.field.neg(self.value), self.field)

    def __pow__(self, e: int):
        if e < 0:
            return Scalar(self.field.power(self.field.inv(self.value), -e), self.field)
        return Scalar(self.field.power(self.value, e), self.field)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == self.field.convert(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __bool__(self):
        return bool(self.value)

    def __str__(self):
        return self.field.format_value(self.value)

    def __repr__(self):
        return f"Scalar({self}, {self.field})"


class ArithOp(str, Enum):
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"


def arith(a: Scalar, b: Scalar, op: Union[ArithOp, str]) -> Scalar:
    """Apply one field operation to two scalars of the same field.

    Args:
        a: Left operand.
        b: Right operand.
        op: "add", "sub", "mul" or "div".

    Returns:
        The exact result in the operands' field.

    Raises:
        FieldMismatchError: If the operands live in different fields.
        DivisionByZeroError: On division by zero.
    """
    if a.field != b.field:
        raise FieldMismatchError(str(a.field), str(b.field))
    op = ArithOp(op)
    if op is ArithOp.ADD:
        return a + b
    if op is ArithOp.SUB:
        return a - b
    if op is ArithOp.MUL:
        return a * b
    return a / b


def sqrt_mod_p(a: Scalar) -> Optional[Scalar]:
    """Canonical modular square root min(r, p - r); None when `a` is a non-residue.

    Args:
        a: A prime-field element.

    Returns:
        The smaller of the two roots, or None.

    Raises:
        WrongFieldError: If `a` is not a prime-field element.
    """
    if not a.field.is_prime:
        raise WrongFieldError("sqrt_mod_p", str(a.field))
    r = a.field.sqrt(a.value)
    return None if r is None else Scalar(r, a.field)


def random_scalar(rng: np.random.Generator, field: FieldDesc, bound: int) -> Scalar:
    """Draw a sample-point coordinate; deterministic for a seeded generator.

    Args:
        rng: Source of randomness.
        field: Field of the result.
        bound: Rationals are drawn as integers in [-bound, bound]. Prime
            fields ignore it and draw uniform residues.

    Returns:
        The drawn scalar.
    """
    return Scalar(field.random(rng, bound), field)
