"""
Digraph Enumeration Module for Multiple Laguerre Verification

This module enumerates the Laguerre digraphs that are spanning subdigraphs of
the layered digraph G_n and sums their weights x^pa(G) prod_i b_i^cyc_i(G).
It is a brute-force oracle for the explicit and generating-function routes.
"""

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

from .laguerre import MultiIndex
from .polyring import Polynomial

logger = logging.getLogger(__name__)

Vertex = Tuple[int, int]

DEFAULT_VERTEX_CAP = 10
DEFAULT_DIGRAPH_CAP = 10_000_000


class EnumerationCapExceeded(RuntimeError):
    """Raised when brute-force enumeration would exceed its configured caps"""


@dataclass(frozen=True)
class LayerGraphSpec:
    """Layer sizes of G_n; vertex (i, j) has 1 <= i <= r and 1 <= j <= n_i"""
    layer_sizes: MultiIndex

    @property
    def r(self) -> int:
        return self.layer_sizes.r

    def vertices(self) -> List[Vertex]:
        """Vertices sorted layer-major, then by index."""
        return [
            (i + 1, j + 1)
            for i, size in enumerate(self.layer_sizes)
            for j in range(size)
        ]

    @staticmethod
    def admissible(source: Vertex, target: Vertex) -> bool:
        return source[0] <= target[0]


@dataclass(frozen=True)
class LaguerreDigraph:
    """Spanning subdigraph of G_n given by a partial injective successor map"""
    spec: LayerGraphSpec
    successor: Tuple[Tuple[Vertex, Vertex], ...]

    def successor_map(self) -> Dict[Vertex, Vertex]:
        return dict(self.successor)


@dataclass(frozen=True)
class DigraphStats:
    """Path count and per-layer cycle counts of a Laguerre digraph"""
    pa: int
    cyc: Tuple[int, ...]


def validate_digraph(graph: LaguerreDigraph) -> None:
    """
    Check out-degree, in-degree and layer-monotonicity.

    Raises:
        ValueError: if any invariant fails
    """
    vertices = set(graph.spec.vertices())
    seen_sources = set()
    seen_targets = set()
    for source, target in graph.successor:
        if source not in vertices or target not in vertices:
            raise ValueError(f"edge {source}->{target} leaves the vertex set")
        if source in seen_sources:
            raise ValueError(f"vertex {source} has out-degree above 1")
        if target in seen_targets:
            raise ValueError(f"vertex {target} has in-degree above 1")
        if not LayerGraphSpec.admissible(source, target):
            raise ValueError(f"edge {source}->{target} goes to a lower layer")
        seen_sources.add(source)
        seen_targets.add(target)


def _successor_choices(spec: LayerGraphSpec) -> Tuple[List[Vertex], List[List[Vertex]]]:
    vertices = spec.vertices()
    targets = [[t for t in vertices if spec.admissible(v, t)] for v in vertices]
    return vertices, targets


def _check_caps(spec: LayerGraphSpec, vertex_cap: int) -> None:
    size = spec.layer_sizes.total()
    if size > vertex_cap:
        raise EnumerationCapExceeded(
            f"|n| = {size} exceeds the enumeration cap of {vertex_cap} vertices"
        )


def enumerate_digraphs(spec: LayerGraphSpec,
                       vertex_cap: int = DEFAULT_VERTEX_CAP,
                       digraph_cap: int = DEFAULT_DIGRAPH_CAP,
                       first_choice: Optional[int] = None) -> Iterator[LaguerreDigraph]:
    """
    Yield every Laguerre digraph in LD_n exactly once.

    Vertices are visited layer-major; each chooses no successor or an
    admissible target not used yet. The order is deterministic.

    Args:
        spec (LayerGraphSpec): layer sizes
        vertex_cap (int): maximum |n|
        digraph_cap (int): maximum number of digraphs to yield
        first_choice (int): restrict the first vertex to one option
            (0 = no successor, j >= 1 = its j-th admissible target)

    Raises:
        EnumerationCapExceeded: if either cap is hit
    """
    _check_caps(spec, vertex_cap)
    vertices, targets = _successor_choices(spec)
    used = set()
    chosen: List[Tuple[Vertex, Vertex]] = []
    yielded = 0

    def options(position: int) -> List[Optional[Vertex]]:
        opts: List[Optional[Vertex]] = [None] + targets[position]
        if position == 0 and first_choice is not None:
            return [opts[first_choice]] if first_choice < len(opts) else []
        return opts

    def backtrack(position: int) -> Iterator[LaguerreDigraph]:
        nonlocal yielded
        if position == len(vertices):
            yielded += 1
            if yielded > digraph_cap:
                raise EnumerationCapExceeded(
                    f"more than {digraph_cap} digraphs for n={spec.layer_sizes}"
                )
            yield LaguerreDigraph(spec, tuple(chosen))
            return
        source = vertices[position]
        for target in options(position):
            if target is None:
                yield from backtrack(position + 1)
            elif target not in used:
                used.add(target)
                chosen.append((source, target))
                yield from backtrack(position + 1)
                chosen.pop()
                used.discard(target)

    yield from backtrack(0)


def stats(graph: LaguerreDigraph) -> DigraphStats:
    """
    Decompose a Laguerre digraph into paths and cycles.

    Paths are traced from their start vertices (in-degree 0); whatever is
    left lies on cycles, each inside one layer. Loops count as cycles.
    """
    successor = graph.successor_map()
    vertices = graph.spec.vertices()
    has_predecessor = set(successor.values())
    visited = set()
    pa = 0
    for v in vertices:
        if v in has_predecessor:
            continue
        pa += 1
        current = v
        while current is not None:
            visited.add(current)
            current = successor.get(current)

    cyc = [0] * graph.spec.r
    for v in vertices:
        if v in visited:
            continue
        cyc[v[0] - 1] += 1
        current = v
        while current not in visited:
            visited.add(current)
            current = successor[current]
    return DigraphStats(pa=pa, cyc=tuple(cyc))


def _weight_counts(spec: LayerGraphSpec, vertex_cap: int, digraph_cap: int,
                   first_choice: Optional[int]) -> Counter:
    counts: Counter = Counter()
    for graph in enumerate_digraphs(spec, vertex_cap, digraph_cap, first_choice):
        s = stats(graph)
        counts[(s.pa,) + s.cyc] += 1
    return counts


def _counts_to_polynomial(counts: Counter, num_vars: int) -> Polynomial:
    return Polynomial(dict(counts), num_vars)


def combinatorial_laguerre(spec: LayerGraphSpec,
                           vertex_cap: int = DEFAULT_VERTEX_CAP,
                           digraph_cap: int = DEFAULT_DIGRAPH_CAP,
                           workers: int = 1) -> Polynomial:
    """
    Sum x^pa(G) prod_i b_i^cyc_i(G) over every G in LD_n.

    With workers > 1 the enumeration is partitioned by the first vertex's
    successor choice; partial weight counts are added, so the result does not
    depend on the partition.

    Args:
        spec (LayerGraphSpec): layer sizes
        vertex_cap (int): maximum |n|
        digraph_cap (int): maximum number of digraphs over all partitions
        workers (int): process count

    Returns:
        Polynomial: the digraph weight polynomial

    Raises:
        EnumerationCapExceeded: if a cap is hit
    """
    _check_caps(spec, vertex_cap)
    num_vars = spec.layer_sizes.num_vars
    vertices, targets = _successor_choices(spec)
    if workers <= 1 or not vertices:
        counts = _weight_counts(spec, vertex_cap, digraph_cap, None)
        return _counts_to_polynomial(counts, num_vars)

    choices = range(len(targets[0]) + 1)
    logger.info(f"Enumerating LD_{spec.layer_sizes} over {len(choices)} partitions, {workers} workers")
    total: Counter = Counter()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_weight_counts, spec, vertex_cap, digraph_cap, choice)
            for choice in choices
        ]
        for future in futures:
            total.update(future.result())
    if sum(total.values()) > digraph_cap:
        raise EnumerationCapExceeded(
            f"more than {digraph_cap} digraphs for n={spec.layer_sizes}"
        )
    return _counts_to_polynomial(total, num_vars)


def count_digraphs(spec: LayerGraphSpec, vertex_cap: int = DEFAULT_VERTEX_CAP,
                   digraph_cap: int = DEFAULT_DIGRAPH_CAP) -> int:
    """|LD_n|."""
    return sum(1 for _ in enumerate_digraphs(spec, vertex_cap, digraph_cap))
