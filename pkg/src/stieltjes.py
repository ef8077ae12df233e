"""
Stieltjes Module for Multiple Laguerre Verification

This module checks the moment representation of the multiple Laguerre
polynomials and their multiple orthogonality in floating point. It provides
the 0F_r hypergeometric series, generalized Gauss-Laguerre quadrature
(Golub-Welsch) and tensor-product moment integrals.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg, special

from .laguerre import MultiIndex, explicit_laguerre, signed_value, LaguerreCache
from .polyring import eval_exact

logger = logging.getLogger(__name__)

Real = Union[float, Fraction]

DEFAULT_RTOL = 1e-14
MAX_SERIES_TERMS = 100_000
RELATIVE_FLOOR = 1e-300


class ConvergenceError(ArithmeticError):
    """Raised when a series does not converge within its term cap"""


class QuadratureError(ArithmeticError):
    """Raised when a quadrature rule cannot be constructed"""


class ParameterError(ValueError):
    """Raised when parameters violate a routine's preconditions"""


@dataclass(frozen=True)
class HyperParams:
    """Denominator parameters b_i > 0, argument z >= 0 and series tolerance"""
    denominators: Tuple[float, ...]
    z: float
    rtol: float = DEFAULT_RTOL

    def __post_init__(self):
        object.__setattr__(self, "denominators", tuple(float(b) for b in self.denominators))
        if not self.denominators:
            raise ParameterError("0F_r needs at least one denominator parameter")
        if any(b <= 0 for b in self.denominators):
            raise ParameterError(f"denominator parameters must be positive, got {self.denominators}")
        if self.z < 0:
            raise ParameterError(f"argument must be nonnegative, got {self.z}")


def hyper_0Fr_array(denominators: Sequence[float], z: np.ndarray,
                    rtol: float = DEFAULT_RTOL, max_terms: int = MAX_SERIES_TERMS) -> np.ndarray:
    """
    0F_r(; b; z) for an array of nonnegative arguments.

    Terms are all positive, so summation stops once every remaining term is
    below rtol times its partial sum and the terms are decreasing.

    Raises:
        ConvergenceError: if max_terms is reached first
    """
    z = np.asarray(z, dtype=float)
    term = np.ones_like(z)
    total = np.ones_like(z)
    for m in range(max_terms):
        scale = (m + 1.0) * math.prod(b + m for b in denominators)
        ratio = z / scale
        term = term * ratio
        total = total + term
        if np.all((term <= rtol * total) & (ratio < 1.0)):
            return total
    raise ConvergenceError(
        f"0F{len(denominators)} did not converge in {max_terms} terms (max z = {float(np.max(z)):g})"
    )


def hyper_0Fr(params: HyperParams) -> float:
    """
    sum_(m >= 0) z^m / (m! prod_i (b_i)_m).

    Args:
        params (HyperParams): denominators, argument and tolerance

    Returns:
        float: series value
    """
    return float(hyper_0Fr_array(params.denominators, np.array([params.z]), params.rtol)[0])


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule for the weight y^alpha e^(-y) on [0, inf)"""
    alpha: float
    order: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def integrate(self, values: np.ndarray) -> float:
        return math.fsum((self.weights * values).tolist())


def gauss_gen_laguerre(alpha: float, order: int) -> QuadratureRule:
    """
    Generalized Gauss-Laguerre rule by the Golub-Welsch construction.

    Nodes are eigenvalues of the Jacobi matrix of the recurrence
    (diagonal 2k + alpha + 1, off-diagonal sqrt(k (k + alpha))). Weights are
    the Christoffel numbers 1 / sum_k p_k(y_j)^2 of the orthonormal
    polynomials, which keeps tiny weights relatively accurate.

    Args:
        alpha (float): weight exponent, > -1
        order (int): number of nodes, >= 1

    Returns:
        QuadratureRule: exact for polynomials of degree <= 2 order - 1

    Raises:
        ParameterError: if alpha <= -1 or order < 1
        QuadratureError: if the eigen-decomposition fails
    """
    if alpha <= -1:
        raise ParameterError(f"alpha must exceed -1, got {alpha}")
    if order < 1:
        raise ParameterError(f"quadrature order must be at least 1, got {order}")

    k = np.arange(order, dtype=float)
    diagonal = 2.0 * k + alpha + 1.0
    off = np.sqrt(k[1:] * (k[1:] + alpha))
    try:
        if order == 1:
            nodes = diagonal.copy()
        else:
            nodes = linalg.eigh_tridiagonal(diagonal, off, eigvals_only=True)
    except (linalg.LinAlgError, ValueError) as e:
        logger.error(f"Jacobi eigenproblem failed for alpha={alpha}, order={order}: {e}")
        raise QuadratureError(str(e)) from e
    nodes = np.sort(nodes)

    # orthonormal recurrence: off_k p_k = (y - diag_(k-1)) p_(k-1) - off_(k-1) p_(k-2)
    p_prev = np.zeros_like(nodes)
    p_curr = np.full_like(nodes, 1.0 / math.sqrt(special.gamma(alpha + 1.0)))
    christoffel = p_curr ** 2
    for j in range(1, order):
        p_next = ((nodes - diagonal[j - 1]) * p_curr - (off[j - 2] if j > 1 else 0.0) * p_prev) / off[j - 1]
        p_prev, p_curr = p_curr, p_next
        christoffel = christoffel + p_curr ** 2
    weights = 1.0 / christoffel

    if not np.all(np.isfinite(nodes)) or np.any(nodes <= 0) or np.any(np.diff(nodes) <= 0):
        raise QuadratureError(f"degenerate nodes for alpha={alpha}, order={order}")
    if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
        raise QuadratureError(f"degenerate weights for alpha={alpha}, order={order}")
    return QuadratureRule(alpha=float(alpha), order=order, nodes=nodes, weights=weights)


def _as_float_tuple(values: Sequence[Real]) -> Tuple[float, ...]:
    return tuple(float(v) for v in values)


def moment_summands(n: MultiIndex, alpha: Sequence[Real], x: Real, order: int,
                    rtol: float = DEFAULT_RTOL) -> np.ndarray:
    """
    Tensor-product quadrature summands of the n-th moment of mu_(alpha, x).

    The summand at node tuple (j_1, ..., j_r) is
    e^(-x) prod_i [w_i / Gamma(alpha_i + 1)] y_i^(n_i) * 0F_r(alpha + 1; x prod_i y_i),
    every factor positive. Summands are returned flat in node-index order.
    """
    alpha = _as_float_tuple(alpha)
    x = float(x)
    if len(alpha) != n.r:
        raise ParameterError(f"need {n.r} alpha values, got {len(alpha)}")
    if any(a <= -1 for a in alpha):
        raise ParameterError(f"every alpha_i must exceed -1, got {alpha}")
    if x < 0:
        raise ParameterError(f"x must be nonnegative, got {x}")

    rules = [gauss_gen_laguerre(a, order) for a in alpha]
    grids = np.meshgrid(*(rule.nodes for rule in rules), indexing="ij")
    weight_grids = np.meshgrid(
        *(rule.weights / special.gamma(a + 1.0) for rule, a in zip(rules, alpha)),
        indexing="ij",
    )
    factor = np.full(grids[0].shape, math.exp(-x))
    argument = np.full(grids[0].shape, x)
    for y, w, n_i in zip(grids, weight_grids, n):
        factor = factor * w * y ** n_i
        argument = argument * y
    hyper = hyper_0Fr_array([a + 1.0 for a in alpha], argument.ravel(), rtol)
    return factor.ravel() * hyper


def moment_integral(n: MultiIndex, alpha: Sequence[Real], x: Real, order: int,
                    rtol: float = DEFAULT_RTOL) -> float:
    """
    Quadrature value of the n-th moment of mu_(alpha, x) on [0, inf)^r.

    Args:
        n (MultiIndex): moment index
        alpha (list): alpha_i > -1
        x (float): x >= 0
        order (int): nodes per dimension

    Returns:
        float: approximation of L_n(x) at b = alpha + 1
    """
    return math.fsum(moment_summands(n, alpha, x, order, rtol).tolist())


def moment_integral_boundary_r1(n: int, x: Real, order: int, include_atom: bool = True,
                                rtol: float = DEFAULT_RTOL) -> float:
    """
    n-th moment of the alpha = -1 measure for r = 1.

    The measure is e^(-x) delta_0 + x e^(-(x+y)) 0F1(2; xy) dy. The density
    part is integrated with the alpha = 0 rule; the atom only contributes to
    n = 0.

    Args:
        n (int): moment index
        x (float): x >= 0
        order (int): number of nodes
        include_atom (bool): add the point mass at the origin

    Returns:
        float: approximation of L_n(x) at b = 0
    """
    x = float(x)
    if x < 0:
        raise ParameterError(f"x must be nonnegative, got {x}")
    if n < 0:
        raise ParameterError(f"moment index must be nonnegative, got {n}")
    rule = gauss_gen_laguerre(0.0, order)
    hyper = hyper_0Fr_array([2.0], x * rule.nodes, rtol)
    density = x * math.exp(-x) * rule.integrate(rule.nodes ** n * hyper)
    atom = math.exp(-x) if include_atom and n == 0 else 0.0
    return density + atom


def bessel_moment_r1(n: int, alpha: Real, x: Real, order: int) -> float:
    """
    n-th moment through the modified Bessel function, r = 1, x > 0.

    Integrates e^(-x) x^(-alpha/2) y^(-alpha/2) I_alpha(2 sqrt(xy)) y^n against
    y^alpha e^(-y); I_alpha is evaluated exponentially scaled.
    """
    alpha, x = float(alpha), float(x)
    if x <= 0:
        raise ParameterError(f"the Bessel form needs x > 0, got {x}")
    rule = gauss_gen_laguerre(alpha, order)
    z = 2.0 * np.sqrt(x * rule.nodes)
    # I_a(z) = ive(a, z) e^z; fold e^(z - x) into one exponent
    values = (
        special.ive(alpha, z)
        * np.exp(z - x)
        * (x * rule.nodes) ** (-alpha / 2.0)
        * rule.nodes ** n
    )
    return rule.integrate(values)


def directional_moments(k: MultiIndex, alpha: Sequence[Real], x: Real, count: int,
                        order: int, rtol: float = DEFAULT_RTOL) -> List[float]:
    """
    Moments L_(jk)(x), j < count, of the push-forward of mu_(alpha, x) along y -> y^k.
    """
    return [moment_integral(k.scaled(j), alpha, x, order, rtol) for j in range(count)]


@dataclass
class MomentCheckResult:
    """Quadrature against exact evaluation for one (n, alpha, x)"""
    n: MultiIndex
    alpha: Tuple[float, ...]
    x: float
    exact_value: float
    quadrature_value: float
    rel_error: float
    order: int

    def to_dict(self) -> Dict[str, object]:
        return {
            "n": list(self.n.parts),
            "alpha": list(self.alpha),
            "x": self.x,
            "exact": self.exact_value,
            "quadrature": self.quadrature_value,
            "rel_error": self.rel_error,
            "order": self.order,
        }


def relative_error(approx: float, exact: float) -> float:
    return abs(approx - exact) / max(abs(exact), RELATIVE_FLOOR)


def check_moment(n: MultiIndex, alpha: Sequence[Real], x: Real, order: int,
                 rtol: float = DEFAULT_RTOL,
                 cache: Optional[LaguerreCache] = None) -> MomentCheckResult:
    """
    Compare moment_integral with the exact value of L_n(x) at b = alpha + 1.

    Exact alpha and x (Fractions, or floats converted exactly) are used for
    the polynomial side.
    """
    exact_alpha = [Fraction(a) for a in alpha]
    exact = float(eval_exact(explicit_laguerre(n, cache), [Fraction(x)] + [a + 1 for a in exact_alpha]))
    approx = moment_integral(n, alpha, x, order, rtol)
    return MomentCheckResult(
        n=n,
        alpha=_as_float_tuple(alpha),
        x=float(x),
        exact_value=exact,
        quadrature_value=approx,
        rel_error=relative_error(approx, exact),
        order=order,
    )


def _check_orthogonality_parameters(n: MultiIndex, alpha: Sequence[Fraction], layer: int,
                                    m_exponent: int) -> None:
    if len(alpha) != n.r:
        raise ParameterError(f"need {n.r} alpha values, got {len(alpha)}")
    if any(a <= -1 for a in alpha):
        raise ParameterError(f"every alpha_i must exceed -1, got {[float(a) for a in alpha]}")
    for a, b in itertools.combinations(alpha, 2):
        if (a - b).denominator == 1:
            raise ParameterError(
                f"alpha_i - alpha_j must not be an integer, got {float(a)} and {float(b)}"
            )
    if not 1 <= layer <= n.r:
        raise ParameterError(f"layer index must lie in [1, {n.r}], got {layer}")
    if not 0 <= m_exponent < n[layer - 1]:
        raise ParameterError(
            f"exponent must satisfy 0 <= m < n_{layer} = {n[layer - 1]}, got {m_exponent}"
        )


def check_orthogonality(n: MultiIndex, alpha: Sequence[Real], layer: int, m_exponent: int,
                        order: int, cache: Optional[LaguerreCache] = None) -> float:
    """
    Q = int_0^inf L_n^(alpha)(y) y^m y^(alpha_i) e^(-y) dy for the signed polynomial.

    The signed polynomial is evaluated exactly at each node; only the final
    weighted sum is in floating point.

    Args:
        n (MultiIndex): degree index
        alpha (list): alpha_i > -1, pairwise non-integer differences
        layer (int): weight index i, 1-based
        m_exponent (int): 0 <= m < n_i
        order (int): number of quadrature nodes

    Returns:
        float: the integral, zero up to rounding

    Raises:
        ParameterError: on violated preconditions
    """
    exact_alpha = [Fraction(a) for a in alpha]
    _check_orthogonality_parameters(n, exact_alpha, layer, m_exponent)
    poly = explicit_laguerre(n, cache)
    rule = gauss_gen_laguerre(float(alpha[layer - 1]), order)
    values = np.array([
        float(signed_value(n, poly, exact_alpha, Fraction(float(y)))) * float(y) ** m_exponent
        for y in rule.nodes
    ])
    return rule.integrate(values)


def orthogonality_scale(n: MultiIndex, alpha_i: Real) -> float:
    """int_0^inf y^(|n| + alpha_i) e^(-y) dy = Gamma(|n| + alpha_i + 1)."""
    return float(special.gamma(n.total() + float(alpha_i) + 1.0))
