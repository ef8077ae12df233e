"""
Laguerre Module for Multiple Laguerre Verification

This module builds the monic unsigned multiple Laguerre polynomials
L_n(x; b) as exact polynomials in x and b = alpha + 1. Two independent
routes are provided: the explicit finite sum and coefficient extraction from
the truncated multivariate exponential generating function.
"""

import itertools
import logging
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, prod
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from cachetools import LRUCache

from .polyring import Polynomial, eval_exact, rising_factorial

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class MultiIndex:
    """Multi-index n = (n1, ..., nr) with r >= 1 and nonnegative parts"""
    parts: Tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        if not parts:
            raise ValueError("a multi-index needs at least one part (r >= 1)")
        if any(p < 0 for p in parts):
            raise ValueError(f"multi-index parts must be nonnegative, got {parts}")

    @classmethod
    def of(cls, *parts: int) -> "MultiIndex":
        return cls(tuple(parts))

    @classmethod
    def parse(cls, text: str) -> "MultiIndex":
        """Parse a comma-separated list such as ``"2,1"``."""
        try:
            return cls(tuple(int(piece) for piece in text.split(",") if piece.strip()))
        except ValueError as e:
            raise ValueError(f"invalid multi-index {text!r}: {e}") from e

    @classmethod
    def zeros(cls, r: int) -> "MultiIndex":
        return cls((0,) * r)

    @property
    def r(self) -> int:
        return len(self.parts)

    @property
    def num_vars(self) -> int:
        return 1 + len(self.parts)

    def total(self) -> int:
        return sum(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __getitem__(self, i: int) -> int:
        return self.parts[i]

    def __str__(self) -> str:
        return "(" + ",".join(str(p) for p in self.parts) + ")"

    def is_zero(self) -> bool:
        return not any(self.parts)

    def scaled(self, factor: int) -> "MultiIndex":
        return MultiIndex(tuple(factor * p for p in self.parts))

    def permuted(self, permutation: Sequence[int]) -> "MultiIndex":
        """sigma(n) with sigma(n)_i = n_{permutation[i]} (0-based)."""
        return MultiIndex(tuple(self.parts[j] for j in permutation))

    def dominates(self, other: "MultiIndex") -> bool:
        """True when other <= self componentwise."""
        return len(other) == len(self) and all(a <= b for a, b in zip(other, self))

    def iter_below(self) -> Iterator["MultiIndex"]:
        """Every k with 0 <= k <= self componentwise, in lexicographic order."""
        for parts in itertools.product(*(range(p + 1) for p in self.parts)):
            yield MultiIndex(parts)

    @staticmethod
    def iter_total(r: int, max_total: int) -> Iterator["MultiIndex"]:
        """Every n with r parts and |n| <= max_total, by total then lexicographically."""
        for total in range(max_total + 1):
            for parts in itertools.product(range(total + 1), repeat=r):
                if sum(parts) == total:
                    yield MultiIndex(parts)


class LaguerreCache:
    """
    Memo of explicit Laguerre polynomials keyed by (r, n).

    Passed explicitly to the functions that use it; lookups and inserts are
    guarded by a lock so one cache can be shared by worker threads.
    """

    def __init__(self, maxsize: int = 4096):
        self._store: LRUCache = LRUCache(maxsize=maxsize)
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get(self, n: MultiIndex) -> Optional[Polynomial]:
        with self._lock:
            value = self._store.get((n.r, n.parts))
            if value is None:
                self.misses += 1
            else:
                self.hits += 1
            return value

    def put(self, n: MultiIndex, value: Polynomial) -> None:
        with self._lock:
            self._store[(n.r, n.parts)] = value

    def __len__(self) -> int:
        with self._lock:
            return len(self._store)


def explicit_laguerre(n: MultiIndex, cache: Optional[LaguerreCache] = None) -> Polynomial:
    """
    Monic unsigned multiple Laguerre polynomial from the explicit sum.

    L_n = sum over k <= n of prod_i C(n_i, k_i) (b_i + k_1 + ... + k_i)^(n_i - k_i) x^|k|
    with rising factorials.

    Args:
        n (MultiIndex): degree multi-index
        cache (LaguerreCache): optional memo shared with other callers

    Returns:
        Polynomial: L_n in Z[x, b1, ..., br]
    """
    if cache is not None:
        hit = cache.get(n)
        if hit is not None:
            return hit

    num_vars = n.num_vars
    betas = [Polynomial.beta(i + 1, num_vars) for i in range(n.r)]
    # rising factorials (b_i + shift)^(m), reused across the k-sum
    rising: Dict[Tuple[int, int, int], Polynomial] = {}

    def rising_term(i: int, shift: int, m: int) -> Polynomial:
        key = (i, shift, m)
        if key not in rising:
            rising[key] = rising_factorial(betas[i] + shift, m)
        return rising[key]

    total = Polynomial.zero(num_vars)
    for k in n.iter_below():
        term = Polynomial.monomial((k.total(),) + (0,) * n.r)
        prefix = 0
        for i, (n_i, k_i) in enumerate(zip(n, k)):
            prefix += k_i
            term = term * (rising_term(i, prefix, n_i - k_i) * comb(n_i, k_i))
        total = total + term

    if cache is not None:
        cache.put(n, total)
    return total


@dataclass
class TruncatedSeries:
    """
    Truncated power series in t1, ..., tr with Polynomial coefficients.

    Coefficients are stored in exponential normalization: ``coefficients[m]``
    is the coefficient of t^m / m! (m! = prod m_i!), so products and
    exponentials stay inside the integer polynomial ring. The ordinary
    coefficient of t^m is ``coefficients[m] / m!``.
    """
    truncation_order: MultiIndex
    num_vars: int
    coefficients: Dict[Tuple[int, ...], Polynomial] = field(default_factory=dict)

    def __post_init__(self):
        for key in self.coefficients:
            self._check_key(key)

    def _check_key(self, key: Tuple[int, ...]) -> None:
        if len(key) != self.truncation_order.r or any(
            a > b for a, b in zip(key, self.truncation_order)
        ):
            raise ValueError(f"series key {key} exceeds truncation order {self.truncation_order}")

    def keys(self) -> List[Tuple[int, ...]]:
        """All in-range exponents, ordered so every index precedes those dominating it."""
        return sorted(
            itertools.product(*(range(p + 1) for p in self.truncation_order)),
            key=lambda m: (sum(m), m),
        )

    def coefficient(self, m: Sequence[int]) -> Polynomial:
        return self.coefficients.get(tuple(m), Polynomial.zero(self.num_vars))

    def ordinary_coefficient(self, m: Sequence[int]) -> Tuple[Polynomial, Fraction]:
        """Coefficient of t^m as (integer polynomial, rational scale 1/m!)."""
        return self.coefficient(m), Fraction(1, prod(factorial(p) for p in m))

    def set(self, m: Tuple[int, ...], value: Polynomial) -> None:
        self._check_key(m)
        if value:
            self.coefficients[m] = value
        else:
            self.coefficients.pop(m, None)

    def product(self, other: "TruncatedSeries") -> "TruncatedSeries":
        """Series product; in exponential normalization c_m = sum_k C(m,k) a_k b_(m-k)."""
        if other.truncation_order != self.truncation_order:
            raise ValueError("series truncation orders differ")
        result = TruncatedSeries(self.truncation_order, self.num_vars)
        for m in self.keys():
            acc = Polynomial.zero(self.num_vars)
            for k in itertools.product(*(range(p + 1) for p in m)):
                a = self.coefficients.get(k)
                if a is None:
                    continue
                rest = tuple(p - q for p, q in zip(m, k))
                b = other.coefficients.get(rest)
                if b is None:
                    continue
                acc = acc + a * b * prod(comb(p, q) for p, q in zip(m, k))
            result.set(m, acc)
        return result

    def exp(self) -> "TruncatedSeries":
        """
        exp of a series with zero constant term.

        Uses d_j exp(u) = (d_j u) exp(u) along the first nonzero direction j:
        h_(m + e_j) = sum_(k <= m) C(m, k) u_(k + e_j) h_(m - k).
        """
        zero_key = (0,) * self.truncation_order.r
        if self.coefficients.get(zero_key):
            raise ValueError("exp needs a series without constant term")
        result = TruncatedSeries(self.truncation_order, self.num_vars)
        result.set(zero_key, Polynomial.one(self.num_vars))
        for n in self.keys():
            if not any(n):
                continue
            j = next(i for i, p in enumerate(n) if p)
            m = tuple(p - (1 if i == j else 0) for i, p in enumerate(n))
            acc = Polynomial.zero(self.num_vars)
            for k in itertools.product(*(range(p + 1) for p in m)):
                shifted = tuple(p + (1 if i == j else 0) for i, p in enumerate(k))
                u = self.coefficients.get(shifted)
                if u is None:
                    continue
                h = result.coefficients.get(tuple(p - q for p, q in zip(m, k)))
                if h is None:
                    continue
                acc = acc + u * h * prod(comb(p, q) for p, q in zip(m, k))
            result.set(n, acc)
        return result


def beta_power_series(order: MultiIndex) -> TruncatedSeries:
    """prod_i (1 - t_i)^(-b_i): coefficient of t^m/m! is prod_i b_i^(rising m_i)."""
    num_vars = order.num_vars
    series = TruncatedSeries(order, num_vars)
    for m in series.keys():
        term = Polynomial.one(num_vars)
        for i, m_i in enumerate(m):
            term = term * rising_factorial(Polynomial.beta(i + 1, num_vars), m_i)
        series.set(m, term)
    return series


def path_series(order: MultiIndex) -> TruncatedSeries:
    """x (prod_i 1/(1 - t_i) - 1): coefficient of t^m/m! is x m! for m != 0."""
    num_vars = order.num_vars
    x = Polynomial.x(num_vars)
    series = TruncatedSeries(order, num_vars)
    for m in series.keys():
        if any(m):
            series.set(m, x * prod(factorial(p) for p in m))
    return series


def generating_series(order: MultiIndex) -> TruncatedSeries:
    """Truncation of F(t) = prod_i (1 - t_i)^(-b_i) exp[x (prod_i 1/(1 - t_i) - 1)]."""
    return beta_power_series(order).product(path_series(order).exp())


def egf_laguerre(n: MultiIndex) -> Polynomial:
    """
    L_n by coefficient extraction from the exponential generating function.

    Returns n! times the coefficient of t^n, which is the stored coefficient
    in exponential normalization.
    """
    return generating_series(n).coefficient(n.parts)


def egf_laguerre_table(order: MultiIndex) -> Dict[MultiIndex, Polynomial]:
    """Every L_m with m <= order from a single series expansion."""
    series = generating_series(order)
    return {MultiIndex(m): series.coefficient(m) for m in series.keys()}


def permute(n: MultiIndex, beta_permutation: Sequence[int],
            cache: Optional[LaguerreCache] = None) -> Polynomial:
    """
    L_(sigma(n)) with its betas renamed back through sigma.

    ``beta_permutation`` is 0-based: sigma(n)_i = n_(sigma[i]) and the
    variable b_(i+1) of the permuted polynomial is renamed b_(sigma[i]+1).
    Joint permutation invariance says the result equals explicit_laguerre(n).
    """
    if sorted(beta_permutation) != list(range(n.r)):
        raise ValueError(f"{list(beta_permutation)} is not a permutation of {n.r} layers")
    permuted = explicit_laguerre(n.permuted(beta_permutation), cache)
    return permuted.rename_betas(beta_permutation)


def check_permutation_symmetry(n: MultiIndex, cache: Optional[LaguerreCache] = None) -> Optional[Tuple[int, ...]]:
    """
    Check joint permutation invariance of L_n over every permutation.

    Returns:
        tuple: first permutation that breaks invariance, or None
    """
    reference = explicit_laguerre(n, cache)
    for sigma in itertools.permutations(range(n.r)):
        if permute(n, sigma, cache) != reference:
            logger.error(f"permutation symmetry fails for n={n}, sigma={sigma}")
            return sigma
    return None


def signed_value(n: MultiIndex, poly: Polynomial, alpha: Sequence[Fraction], y: Fraction) -> Fraction:
    """
    Signed monic polynomial L_n^(alpha)(y) = (-1)^|n| L_n(-y) at b = alpha + 1.

    Args:
        n (MultiIndex): degree index of ``poly``
        poly (Polynomial): unsigned polynomial L_n
        alpha (list): exact alpha values
        y (Fraction): evaluation point

    Returns:
        Fraction: exact signed value
    """
    point = [-Fraction(y)] + [Fraction(a) + 1 for a in alpha]
    sign = -1 if n.total() % 2 else 1
    return sign * eval_exact(poly, point)
