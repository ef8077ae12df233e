"""
Hankel Module for Multiple Laguerre Verification

This module builds Hankel matrices (L_((i+j)k))_(i,j) of multiple Laguerre
polynomials along a direction k and checks, exactly, that every minor up to a
configured order is a polynomial with nonnegative coefficients.
"""

import itertools
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import psutil

from .laguerre import LaguerreCache, MultiIndex, explicit_laguerre
from .polyring import Monomial, Polynomial, coefficients_nonnegative, eval_exact

logger = logging.getLogger(__name__)

VERDICT_PASS = "PASS"
VERDICT_FAIL = "FAIL"
VERDICT_INCOMPLETE = "INCOMPLETE"

MINOR_READING = "all minors of the N x N leading Hankel block, up to max_minor_order"


@dataclass(frozen=True)
class HankelSpec:
    """Direction k, matrix size N and the largest minor order to check"""
    k: MultiIndex
    size: int
    max_minor_order: Optional[int] = None

    def __post_init__(self):
        if self.k.is_zero():
            raise ValueError("the Hankel direction k must be nonzero")
        if self.size < 1:
            raise ValueError(f"matrix size must be at least 1, got {self.size}")
        if self.max_minor_order is None:
            object.__setattr__(self, "max_minor_order", self.size)
        if not 1 <= self.max_minor_order <= self.size:
            raise ValueError(
                f"max_minor_order must lie in [1, {self.size}], got {self.max_minor_order}"
            )

    @property
    def r(self) -> int:
        return self.k.r

    def to_dict(self) -> Dict[str, Any]:
        return {
            "r": self.r,
            "k": list(self.k.parts),
            "N": self.size,
            "max_minor_order": self.max_minor_order,
        }


class PolyMatrix:
    """Square matrix with entries from an exact ring (Polynomial or Fraction)"""

    def __init__(self, entries: Sequence[Sequence[Any]]):
        rows = [tuple(row) for row in entries]
        if any(len(row) != len(rows) for row in rows):
            raise ValueError("PolyMatrix must be square")
        self.entries: Tuple[Tuple[Any, ...], ...] = tuple(rows)

    @property
    def size(self) -> int:
        return len(self.entries)

    def __getitem__(self, index):
        if isinstance(index, tuple):
            i, j = index
            return self.entries[i][j]
        return self.entries[index]

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyMatrix) and self.entries == other.entries

    def is_hankel(self) -> bool:
        return all(
            self.entries[i][j] == self.entries[i + 1][j - 1]
            for i in range(self.size - 1)
            for j in range(1, self.size)
        )

    def replace(self, i: int, j: int, value: Any) -> "PolyMatrix":
        rows = [list(row) for row in self.entries]
        rows[i][j] = value
        return PolyMatrix(rows)

    def evaluate(self, point: Sequence[Any]) -> "PolyMatrix":
        """Exact rational matrix of the polynomial entries at a point."""
        return PolyMatrix([[eval_exact(p, point) for p in row] for row in self.entries])


def build_hankel(spec: HankelSpec, cache: Optional[LaguerreCache] = None) -> PolyMatrix:
    """
    Hankel matrix with entry (i, j) = L_((i+j)k), 0 <= i, j < N.

    Args:
        spec (HankelSpec): direction and size
        cache (LaguerreCache): optional memo of Laguerre polynomials

    Returns:
        PolyMatrix: N x N matrix over Z[x, b1, ..., br]
    """
    sequence = [explicit_laguerre(spec.k.scaled(m), cache) for m in range(2 * spec.size - 1)]
    return PolyMatrix(
        [[sequence[i + j] for j in range(spec.size)] for i in range(spec.size)]
    )


def _mask(indices: Sequence[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def _bits(mask: int) -> List[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


class MinorEngine:
    """
    Memoized Laplace expansion over (row-subset, column-subset) bitmasks.

    Each minor is expanded along its largest row index; sub-minors are kept in
    ``memo`` so an all-minors sweep shares work between minors.
    """

    def __init__(self, matrix: PolyMatrix, memo: Optional[Dict[Tuple[int, int], Any]] = None):
        self.matrix = matrix
        self.memo = {} if memo is None else memo
        corner = matrix[0, 0]
        self.zero = corner - corner

    def determinant(self, rmask: int, cmask: int) -> Any:
        key = (rmask, cmask)
        cached = self.memo.get(key)
        if cached is not None:
            return cached
        rows = _bits(rmask)
        cols = _bits(cmask)
        if len(rows) != len(cols) or not rows:
            raise ValueError(f"minor needs equal nonempty row/column sets, got {rows} and {cols}")
        if len(rows) == 1:
            value = self.matrix[rows[0], cols[0]]
        else:
            last = rows[-1]
            sub_rows = rmask & ~(1 << last)
            row_sign = -1 if (len(rows) - 1) % 2 else 1
            value = self.zero
            for position, col in enumerate(cols):
                entry = self.matrix[last, col]
                if not entry:
                    continue
                sub = self.determinant(sub_rows, cmask & ~(1 << col))
                if not sub:
                    continue
                sign = row_sign if position % 2 == 0 else -row_sign
                term = entry * sub
                value = value + term if sign > 0 else value - term
        self.memo[key] = value
        return value


def minor_determinant(matrix: PolyMatrix, rows: Sequence[int], cols: Sequence[int],
                      memo: Optional[Dict[Tuple[int, int], Any]] = None) -> Any:
    """
    Exact determinant of the submatrix on the given rows and columns.

    Index sets are taken in ascending order, so the orientation is fixed.

    Args:
        matrix (PolyMatrix): source matrix
        rows (list): row indices
        cols (list): column indices, same count as rows
        memo (dict): optional memo shared between calls

    Returns:
        Polynomial | Fraction: the minor

    Raises:
        ValueError: if the shapes do not match or an index repeats
    """
    if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
        raise ValueError("minor index sets must not repeat indices")
    if len(rows) != len(cols) or not rows:
        raise ValueError(f"shape mismatch: {len(rows)} rows vs {len(cols)} columns")
    if max(max(rows), max(cols)) >= matrix.size or min(min(rows), min(cols)) < 0:
        raise ValueError("minor index out of range")
    return MinorEngine(matrix, memo).determinant(_mask(rows), _mask(cols))


def bareiss_determinant(matrix: PolyMatrix) -> Any:
    """
    Fraction-free (Bareiss) elimination determinant.

    Every division is exact; Polynomial entries use ``exact_divide``. Kept as
    an independent oracle for the memoized Laplace expansion.
    """
    n = matrix.size
    a = [list(row) for row in matrix.entries]
    corner = a[0][0]
    zero = corner - corner
    one = zero + 1
    sign = 1
    previous = one

    def divide(value, divisor):
        if isinstance(value, Polynomial):
            return value.exact_divide(divisor)
        return value / divisor

    for k in range(n - 1):
        if not a[k][k]:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return zero
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = divide(a[i][j] * a[k][k] - a[i][k] * a[k][j], previous)
        previous = a[k][k]
    det = a[n - 1][n - 1]
    return det if sign > 0 else -det


@dataclass(frozen=True, order=True)
class MinorFailure:
    """A minor with a negative coefficient"""
    rows: Tuple[int, ...]
    cols: Tuple[int, ...]
    monomial: Monomial
    coefficient: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rows": list(self.rows),
            "cols": list(self.cols),
            "monomial": list(self.monomial),
            "coefficient": str(self.coefficient),
        }


@dataclass
class SweepOptions:
    """Execution knobs for an all-minors sweep"""
    workers: int = 1
    budget_seconds: Optional[float] = None
    memory_limit_mb: Optional[float] = None
    cache: Optional[LaguerreCache] = None
    check_symmetry: bool = False


@dataclass
class MinorReport:
    """Result of an all-minors nonnegativity sweep"""
    spec: HankelSpec
    verdict: str = VERDICT_PASS
    minors_checked: Dict[int, int] = field(default_factory=dict)
    failures: List[MinorFailure] = field(default_factory=list)
    symmetry_breaks: List[Tuple[Tuple[int, ...], Tuple[int, ...]]] = field(default_factory=list)
    wall_time_ms: float = 0.0
    orders_completed: int = 0
    stop_reason: Optional[str] = None
    reading: str = MINOR_READING

    @property
    def passed(self) -> bool:
        return self.verdict == VERDICT_PASS

    def to_dict(self) -> Dict[str, Any]:
        return {
            "spec": self.spec.to_dict(),
            "verdict": self.verdict,
            "minors_checked": {str(order): count for order, count in sorted(self.minors_checked.items())},
            "failures": [f.to_dict() for f in self.failures],
            "symmetry_breaks": [{"rows": list(rows), "cols": list(cols)} for rows, cols in self.symmetry_breaks],
            "wall_time_ms": round(self.wall_time_ms, 3),
            "orders_completed": self.orders_completed,
            "stop_reason": self.stop_reason,
            "reading": self.reading,
        }


def _check_rows(engine: MinorEngine, order: int,
                row_sets: Sequence[Tuple[int, ...]]) -> Tuple[int, List[MinorFailure]]:
    checked = 0
    failures: List[MinorFailure] = []
    col_sets = list(itertools.combinations(range(engine.matrix.size), order))
    for rows in row_sets:
        rmask = _mask(rows)
        for cols in col_sets:
            minor = engine.determinant(rmask, _mask(cols))
            checked += 1
            result = coefficients_nonnegative(minor)
            if not result:
                failures.append(MinorFailure(rows, cols, result.witness, result.coefficient))
    return checked, failures


def _check_rows_in_worker(matrix: PolyMatrix, order: int,
                          row_sets: Sequence[Tuple[int, ...]]) -> Tuple[int, List[MinorFailure]]:
    # fresh memo per work unit; prefix-sharing row sets are kept in one chunk
    return _check_rows(MinorEngine(matrix), order, row_sets)


def _chunks(items: List[Any], count: int) -> List[List[Any]]:
    count = max(1, min(count, len(items)))
    size, extra = divmod(len(items), count)
    out, start = [], 0
    for c in range(count):
        end = start + size + (1 if c < extra else 0)
        out.append(items[start:end])
        start = end
    return [chunk for chunk in out if chunk]


def _over_budget(started: float, options: SweepOptions) -> Optional[str]:
    # RSS of this process only; pool workers are not counted
    if options.budget_seconds is not None and time.perf_counter() - started > options.budget_seconds:
        return f"time budget of {options.budget_seconds}s exceeded"
    if options.memory_limit_mb is not None:
        rss_mb = psutil.Process().memory_info().rss / (1024 * 1024)
        if rss_mb > options.memory_limit_mb:
            return f"memory limit of {options.memory_limit_mb} MB exceeded ({rss_mb:.0f} MB in use)"
    return None


def verify_all_minors(spec: HankelSpec, options: Optional[SweepOptions] = None) -> MinorReport:
    """
    Check coefficientwise nonnegativity of every minor up to max_minor_order.

    Orders are processed in ascending order; the time and memory budgets are
    checked at order boundaries and a truncated sweep is reported
    INCOMPLETE. The report does not depend on the worker count.

    Args:
        spec (HankelSpec): direction, size and maximum order
        options (SweepOptions): workers, budgets, cache

    Returns:
        MinorReport: counts per order, sorted failures and verdict
    """
    options = options or SweepOptions()
    started = time.perf_counter()
    report = MinorReport(spec=spec)
    try:
        matrix = build_hankel(spec, options.cache)
        logger.info(f"Built {spec.size}x{spec.size} Hankel matrix for k={spec.k}")
        serial_engine = MinorEngine(matrix)

        for order in range(1, spec.max_minor_order + 1):
            reason = _over_budget(started, options)
            if reason:
                report.stop_reason = reason
                logger.warning(f"Stopping sweep before order {order}: {reason}")
                break
            row_sets = list(itertools.combinations(range(spec.size), order))
            if options.workers > 1 and len(row_sets) > 1:
                with ProcessPoolExecutor(max_workers=options.workers) as pool:
                    futures = [
                        pool.submit(_check_rows_in_worker, matrix, order, chunk)
                        for chunk in _chunks(row_sets, options.workers)
                    ]
                    results = [f.result() for f in futures]
            else:
                results = [_check_rows(serial_engine, order, row_sets)]

            report.minors_checked[order] = sum(count for count, _ in results)
            for _, failures in results:
                report.failures.extend(failures)
            report.orders_completed = order
            logger.info(f"Order {order}: {report.minors_checked[order]} minors checked")

        if options.check_symmetry:
            _check_symmetry(serial_engine, report)

        report.failures.sort()
        if report.failures or report.symmetry_breaks:
            report.verdict = VERDICT_FAIL
        elif report.orders_completed < spec.max_minor_order:
            report.verdict = VERDICT_INCOMPLETE
        else:
            report.verdict = VERDICT_PASS
        return report

    except Exception as e:
        logger.error(f"Error verifying Hankel minors for k={spec.k}: {str(e)}")
        raise
    finally:
        report.wall_time_ms = (time.perf_counter() - started) * 1000.0


def _check_symmetry(engine: MinorEngine, report: MinorReport) -> None:
    size = engine.matrix.size
    for order in range(1, report.orders_completed + 1):
        for rows in itertools.combinations(range(size), order):
            for cols in itertools.combinations(range(size), order):
                if rows < cols:
                    continue
                a = engine.determinant(_mask(rows), _mask(cols))
                b = engine.determinant(_mask(cols), _mask(rows))
                if a != b:
                    logger.error(f"Minor symmetry broken for rows {rows}, cols {cols}")
                    report.symmetry_breaks.append((rows, cols))


@dataclass(frozen=True)
class CandidateViolation:
    """A minor that is negative at a nonnegative evaluation point"""
    rows: Tuple[int, ...]
    cols: Tuple[int, ...]
    point: Tuple[Fraction, ...]
    value: Fraction


def numeric_prescreen(matrix: PolyMatrix, points: Sequence[Sequence[Any]],
                      max_minor_order: Optional[int] = None) -> List[CandidateViolation]:
    """
    Evaluate every minor at nonnegative rational points.

    A negative value certifies that some minor has a negative coefficient;
    nonnegative values certify nothing.

    Args:
        matrix (PolyMatrix): polynomial matrix
        points (list): assignments (x, b1, ..., br), all coordinates >= 0
        max_minor_order (int): largest order to evaluate (default: all)

    Returns:
        list: CandidateViolation for every negative minor value
    """
    top = max_minor_order or matrix.size
    violations: List[CandidateViolation] = []
    for point in points:
        exact = tuple(Fraction(v) for v in point)
        if any(v < 0 for v in exact):
            raise ValueError(f"prescreen points must be nonnegative, got {point}")
        engine = MinorEngine(matrix.evaluate(exact))
        for order in range(1, top + 1):
            for rows in itertools.combinations(range(matrix.size), order):
                for cols in itertools.combinations(range(matrix.size), order):
                    value = engine.determinant(_mask(rows), _mask(cols))
                    if value < 0:
                        violations.append(CandidateViolation(rows, cols, exact, value))
    return violations


# Preset (k, N) cases swept by hankel-table
DESK_TABLE: Tuple[Tuple[Tuple[int, ...], int], ...] = (
    ((1,), 6),
    ((1, 1), 5),
    ((2, 1), 4),
    ((3, 1), 3),
    ((3, 2), 3),
    ((1, 1, 1), 4),
    ((2, 1, 1), 3),
    ((2, 2, 1), 3),
    ((1, 1, 1, 1), 3),
    ((2, 1, 1, 1), 2),
    ((1, 1, 1, 1, 1), 2),
)
