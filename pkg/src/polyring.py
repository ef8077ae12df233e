"""
Polynomial Ring Module for Multiple Laguerre Verification

This module provides exact sparse multivariate polynomial arithmetic over
arbitrary-precision integers in the variables x, b1, ..., br (b_i stands for
beta_i = alpha_i + 1). Every symbolic computation in the package runs on it.
"""

import logging
import operator
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]
Scalar = Union[int, Fraction]

_TERM_SPLIT = re.compile(r"\s+([+-])\s+")
_FACTOR = re.compile(r"^(x|b(\d+))(?:\^(\d+))?$")


class VariableCountError(ValueError):
    """Raised when operands live in rings with different numbers of variables"""


class DivisionError(ArithmeticError):
    """Raised when an exact division leaves a remainder"""


def monomial_order_key(exponents: Monomial) -> Tuple:
    """
    Sort key of the canonical monomial order.

    Terms are ordered by descending power of x, then by total degree in the
    betas, then lexicographically with b1 before b2 before ... The order is
    multiplicative, so it also selects leading terms for exact division.
    """
    betas = exponents[1:]
    return (exponents[0], sum(betas), betas)


class Polynomial:
    """
    Immutable sparse polynomial in Z[x, b1, ..., br].

    The term map never stores a zero coefficient; the zero polynomial is the
    empty map. ``num_vars`` is 1 + r.
    """

    __slots__ = ("_terms", "num_vars")

    def __init__(self, terms: Optional[Mapping[Monomial, int]] = None, num_vars: int = 1):
        if num_vars < 1:
            raise ValueError(f"num_vars must be at least 1, got {num_vars}")
        cleaned: Dict[Monomial, int] = {}
        for exponents, coeff in (terms or {}).items():
            exponents = tuple(exponents)
            if len(exponents) != num_vars:
                raise VariableCountError(
                    f"monomial {exponents} does not have {num_vars} exponents"
                )
            if any(e < 0 for e in exponents):
                raise ValueError(f"negative exponent in monomial {exponents}")
            if coeff:
                cleaned[exponents] = cleaned.get(exponents, 0) + int(coeff)
                if not cleaned[exponents]:
                    del cleaned[exponents]
        object.__setattr__(self, "_terms", cleaned)
        object.__setattr__(self, "num_vars", num_vars)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    def __reduce__(self):
        return (Polynomial, (self._terms, self.num_vars))

    # ------------------------------------------------------------------ #
    # Constructors
    # ------------------------------------------------------------------ #

    @classmethod
    def _from_clean(cls, terms: Dict[Monomial, int], num_vars: int) -> "Polynomial":
        # terms must already be canonical: right length, no zero coefficients
        poly = cls.__new__(cls)
        object.__setattr__(poly, "_terms", terms)
        object.__setattr__(poly, "num_vars", num_vars)
        return poly

    @classmethod
    def zero(cls, num_vars: int) -> "Polynomial":
        return cls._from_clean({}, num_vars)

    @classmethod
    def constant(cls, value: int, num_vars: int) -> "Polynomial":
        if not value:
            return cls.zero(num_vars)
        return cls._from_clean({(0,) * num_vars: int(value)}, num_vars)

    @classmethod
    def one(cls, num_vars: int) -> "Polynomial":
        return cls.constant(1, num_vars)

    @classmethod
    def monomial(cls, exponents: Sequence[int], coeff: int = 1) -> "Polynomial":
        return cls({tuple(exponents): coeff}, num_vars=len(exponents))

    @classmethod
    def variable(cls, index: int, num_vars: int) -> "Polynomial":
        """
        Generator of the ring.

        Args:
            index (int): 0 for x, i >= 1 for b_i
            num_vars (int): 1 + r

        Returns:
            Polynomial: the requested variable
        """
        if not 0 <= index < num_vars:
            raise IndexError(f"variable index {index} out of range for {num_vars} variables")
        exponents = [0] * num_vars
        exponents[index] = 1
        return cls._from_clean({tuple(exponents): 1}, num_vars)

    @classmethod
    def x(cls, num_vars: int) -> "Polynomial":
        return cls.variable(0, num_vars)

    @classmethod
    def beta(cls, i: int, num_vars: int) -> "Polynomial":
        """The variable b_i, 1-based like the layers it belongs to."""
        return cls.variable(i, num_vars)

    # ------------------------------------------------------------------ #
    # Introspection
    # ------------------------------------------------------------------ #

    @property
    def terms(self) -> Dict[Monomial, int]:
        return dict(self._terms)

    @property
    def r(self) -> int:
        return self.num_vars - 1

    def items(self) -> Iterator[Tuple[Monomial, int]]:
        """Terms in canonical order (leading term first)."""
        for exponents in sorted(self._terms, key=monomial_order_key, reverse=True):
            yield exponents, self._terms[exponents]

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def coefficient(self, exponents: Sequence[int]) -> int:
        return self._terms.get(tuple(exponents), 0)

    def leading_term(self) -> Tuple[Monomial, int]:
        if not self._terms:
            raise ValueError("the zero polynomial has no leading term")
        exponents = max(self._terms, key=monomial_order_key)
        return exponents, self._terms[exponents]

    def max_x_degree(self) -> int:
        """Degree in x; -1 for the zero polynomial."""
        return max((e[0] for e in self._terms), default=-1)

    def x_coefficient(self, power: int) -> "Polynomial":
        """Coefficient of x^power, as a polynomial in the betas (same ring)."""
        picked = {
            (0,) + e[1:]: c for e, c in self._terms.items() if e[0] == power
        }
        return Polynomial._from_clean(picked, self.num_vars)

    # ------------------------------------------------------------------ #
    # Arithmetic
    # ------------------------------------------------------------------ #

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.num_vars != self.num_vars:
                raise VariableCountError(
                    f"cannot combine polynomials in {self.num_vars} and {other.num_vars} variables"
                )
            return other
        if isinstance(other, int):
            return Polynomial.constant(other, self.num_vars)
        return NotImplemented

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        result = dict(self._terms)
        for exponents, coeff in other._terms.items():
            total = result.get(exponents, 0) + coeff
            if total:
                result[exponents] = total
            else:
                result.pop(exponents, None)
        return Polynomial._from_clean(result, self.num_vars)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._from_clean({e: -c for e, c in self._terms.items()}, self.num_vars)

    def __sub__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, int):
            if not other:
                return Polynomial.zero(self.num_vars)
            return Polynomial._from_clean(
                {e: c * other for e, c in self._terms.items()}, self.num_vars
            )
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        acc: Dict[Monomial, int] = {}
        add = operator.add
        for ea, ca in self._terms.items():
            for eb, cb in other._terms.items():
                key = tuple(map(add, ea, eb))
                acc[key] = acc.get(key, 0) + ca * cb
        return Polynomial._from_clean({e: c for e, c in acc.items() if c}, self.num_vars)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        if exponent < 0:
            raise ValueError("negative powers are not polynomials")
        result = Polynomial.one(self.num_vars)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Polynomial.constant(other, self.num_vars)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.num_vars == other.num_vars and self._terms == other._terms

    def __hash__(self) -> int:
        # constants hash like the int they equal
        if self.is_constant():
            return hash(self.coefficient((0,) * self.num_vars))
        return hash((self.num_vars, frozenset(self._terms.items())))

    def exact_divide(self, divisor: "Polynomial") -> "Polynomial":
        """
        Exact quotient self / divisor.

        Multivariate division by leading terms in the canonical order; the
        division must leave no remainder.

        Args:
            divisor (Polynomial): nonzero polynomial dividing self

        Returns:
            Polynomial: the quotient

        Raises:
            ZeroDivisionError: if divisor is zero
            DivisionError: if divisor does not divide self
        """
        divisor = self._coerce(divisor)
        if not divisor:
            raise ZeroDivisionError("division by the zero polynomial")
        lead_exp, lead_coeff = divisor.leading_term()
        remainder = self
        quotient: Dict[Monomial, int] = {}
        while remainder:
            rem_exp, rem_coeff = remainder.leading_term()
            shift = tuple(a - b for a, b in zip(rem_exp, lead_exp))
            if any(s < 0 for s in shift) or rem_coeff % lead_coeff:
                raise DivisionError(f"{divisor} does not divide {self}")
            step = Polynomial._from_clean({shift: rem_coeff // lead_coeff}, self.num_vars)
            quotient[shift] = rem_coeff // lead_coeff
            remainder = remainder - step * divisor
        return Polynomial._from_clean(quotient, self.num_vars)

    def rename_betas(self, permutation: Sequence[int]) -> "Polynomial":
        """
        Relabel b_{i+1} -> b_{permutation[i]+1} (0-based permutation of range(r)).
        """
        r = self.r
        if sorted(permutation) != list(range(r)):
            raise ValueError(f"{list(permutation)} is not a permutation of range({r})")
        renamed = {}
        for exponents, coeff in self._terms.items():
            new = [exponents[0]] + [0] * r
            for i, target in enumerate(permutation):
                new[1 + target] = exponents[1 + i]
            renamed[tuple(new)] = coeff
        return Polynomial._from_clean(renamed, self.num_vars)

    # ------------------------------------------------------------------ #
    # Serialization
    # ------------------------------------------------------------------ #

    @staticmethod
    def _monomial_text(exponents: Monomial) -> str:
        factors = []
        for index, power in enumerate(exponents):
            if not power:
                continue
            name = "x" if index == 0 else f"b{index}"
            factors.append(name if power == 1 else f"{name}^{power}")
        return "*".join(factors)

    def to_text(self) -> str:
        """Canonical text form, e.g. ``2*x + b1``."""
        if not self._terms:
            return "0"
        pieces = []
        for position, (exponents, coeff) in enumerate(self.items()):
            mono = self._monomial_text(exponents)
            magnitude = abs(coeff)
            if not mono:
                body = str(magnitude)
            elif magnitude == 1:
                body = mono
            else:
                body = f"{magnitude}*{mono}"
            if position == 0:
                pieces.append(f"-{body}" if coeff < 0 else body)
            else:
                pieces.append(f"{'-' if coeff < 0 else '+'} {body}")
        return " ".join(pieces)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"Polynomial({self.to_text()!r}, num_vars={self.num_vars})"

    @classmethod
    def from_text(cls, text: str, num_vars: int) -> "Polynomial":
        """
        Parse the canonical text form back into a Polynomial.

        Args:
            text (str): text produced by ``to_text`` (any term order accepted)
            num_vars (int): 1 + r

        Returns:
            Polynomial: parsed polynomial

        Raises:
            ValueError: on malformed input or a variable outside the ring
        """
        text = text.strip()
        if text == "0":
            return cls.zero(num_vars)
        signs_and_bodies = _TERM_SPLIT.split(text)
        first = signs_and_bodies[0]
        terms: List[Tuple[int, str]] = []
        if first.startswith("-"):
            terms.append((-1, first[1:]))
        else:
            terms.append((1, first))
        for sign, body in zip(signs_and_bodies[1::2], signs_and_bodies[2::2]):
            terms.append((-1 if sign == "-" else 1, body))

        result: Dict[Monomial, int] = {}
        for sign, body in terms:
            coeff = sign
            exponents = [0] * num_vars
            for factor in body.split("*"):
                factor = factor.strip()
                if factor.isdigit():
                    coeff *= int(factor)
                    continue
                match = _FACTOR.match(factor)
                if not match:
                    raise ValueError(f"cannot parse factor {factor!r} in {text!r}")
                index = 0 if match.group(1) == "x" else int(match.group(2))
                if not 0 <= index < num_vars:
                    raise VariableCountError(f"variable {factor!r} outside a ring of {num_vars} variables")
                exponents[index] += int(match.group(3) or 1)
            key = tuple(exponents)
            result[key] = result.get(key, 0) + coeff
        return cls(result, num_vars)

    def to_json(self) -> List[Dict[str, object]]:
        """JSON form: list of {exponents, coeff} with decimal-string coefficients."""
        return [
            {"exponents": list(exponents), "coeff": str(coeff)}
            for exponents, coeff in self.items()
        ]

    @classmethod
    def from_json(cls, payload: Iterable[Mapping[str, object]], num_vars: int) -> "Polynomial":
        terms: Dict[Monomial, int] = {}
        for entry in payload:
            key = tuple(int(e) for e in entry["exponents"])
            terms[key] = terms.get(key, 0) + int(entry["coeff"])
        return cls(terms, num_vars)


# ---------------------------------------------------------------------- #
# Operations
# ---------------------------------------------------------------------- #

def add(p: Polynomial, q: Polynomial) -> Polynomial:
    """Exact sum of two polynomials in the same ring."""
    if p.num_vars != q.num_vars:
        raise VariableCountError(f"variable-count mismatch: {p.num_vars} vs {q.num_vars}")
    return p + q


def mul(p: Polynomial, q: Polynomial) -> Polynomial:
    """Exact product of two polynomials in the same ring."""
    if p.num_vars != q.num_vars:
        raise VariableCountError(f"variable-count mismatch: {p.num_vars} vs {q.num_vars}")
    return p * q


def rising_factorial(p: Union[Polynomial, int], m: int) -> Union[Polynomial, int]:
    """
    Rising factorial p (p+1) ... (p+m-1); 1 when m = 0.

    Args:
        p (Polynomial | int): base
        m (int): number of factors, m >= 0

    Returns:
        Polynomial | int: same kind as p
    """
    if m < 0:
        raise ValueError(f"rising factorial needs m >= 0, got {m}")
    if isinstance(p, Polynomial):
        result = Polynomial.one(p.num_vars)
    else:
        result = 1
    for shift in range(m):
        result = result * (p + shift)
    return result


def eval_exact(p: Polynomial, assignment: Sequence[Scalar]) -> Fraction:
    """
    Exact value of p at a rational point (x, b1, ..., br).

    Raises:
        VariableCountError: if the assignment length differs from num_vars
    """
    if len(assignment) != p.num_vars:
        raise VariableCountError(
            f"assignment has {len(assignment)} values, polynomial has {p.num_vars} variables"
        )
    point = [Fraction(v) for v in assignment]
    total = Fraction(0)
    for exponents, coeff in p._terms.items():
        value = Fraction(coeff)
        for base, power in zip(point, exponents):
            if power:
                value *= base ** power
        total += value
    return total


@dataclass(frozen=True)
class NonnegativityResult:
    """Outcome of a coefficientwise sign check"""
    nonnegative: bool
    witness: Optional[Monomial] = None
    coefficient: Optional[int] = None

    def __bool__(self) -> bool:
        return self.nonnegative


def coefficients_nonnegative(p: Polynomial) -> NonnegativityResult:
    """
    Check that every stored coefficient of p is positive.

    On failure the first offending term in canonical order is returned as
    the witness.
    """
    for exponents, coeff in p.items():
        if coeff < 0:
            return NonnegativityResult(False, exponents, coeff)
    return NonnegativityResult(True)
