"""Exact orbit calculus for composition maps.

Order limits of Cesàro averages become finite computations once the
cycle structure of the coordinate map σ is known: beyond the longest
preperiod K every orbit repeats with a period dividing d, the lcm of the
cycle lengths, so each averaged sequence is eventually periodic and its
limit is the mean of one period block. Everything here is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence, Union

from .lattice import Element, Space, _check_same_space
from .operators import CEPS, RieszHomMap

MapLike = Union[CEPS, RieszHomMap]


def _resolve_map(system_or_map: MapLike) -> RieszHomMap:
    if isinstance(system_or_map, CEPS):
        return system_or_map.S
    return system_or_map


@dataclass(frozen=True)
class FunctionalGraph:
    """Cycle decomposition of a total map on 0..n-1.

    depth[i] is the number of steps from i to its eventual cycle (0 on
    cycle nodes); cycle_index[i] names the cycle the orbit of i reaches.
    σ^(k+period) = σ^k holds for all k >= preperiod.
    """

    sigma: tuple[int, ...]
    depth: tuple[int, ...]
    cycles: tuple[tuple[int, ...], ...]
    cycle_index: tuple[int, ...]
    preperiod: int
    period: int


@lru_cache(maxsize=None)
def functional_graph(sigma: tuple[int, ...]) -> FunctionalGraph:
    n = len(sigma)
    state = [0] * n  # 0 unvisited, 1 on current walk, 2 finished
    on_cycle = [False] * n
    cycles_raw: list[list[int]] = []
    for start in range(n):
        if state[start] != 0:
            continue
        path = []
        i = start
        while state[i] == 0:
            state[i] = 1
            path.append(i)
            i = sigma[i]
        if state[i] == 1:
            # closed a new cycle inside the current walk
            cut = path.index(i)
            cycle = path[cut:]
            cycles_raw.append(cycle)
            for node in cycle:
                on_cycle[node] = True
        for node in path:
            state[node] = 2

    # canonical cycle order: each rotated to start at its minimum,
    # cycles sorted by that minimum
    cycles = []
    for cycle in cycles_raw:
        m = cycle.index(min(cycle))
        cycles.append(tuple(cycle[m:] + cycle[:m]))
    cycles.sort(key=lambda c: c[0])

    cycle_index = [-1] * n
    for ci, cycle in enumerate(cycles):
        for node in cycle:
            cycle_index[node] = ci

    depth = [-1] * n
    for i in range(n):
        if on_cycle[i]:
            depth[i] = 0
    for start in range(n):
        if depth[start] >= 0:
            continue
        chain = []
        i = start
        while depth[i] < 0:
            chain.append(i)
            i = sigma[i]
        base_depth, base_cycle = depth[i], cycle_index[i]
        for offset, node in enumerate(reversed(chain), start=1):
            depth[node] = base_depth + offset
            cycle_index[node] = base_cycle

    period = math.lcm(*(len(c) for c in cycles))
    return FunctionalGraph(
        sigma=tuple(sigma),
        depth=tuple(depth),
        cycles=tuple(cycles),
        cycle_index=tuple(cycle_index),
        preperiod=max(depth),
        period=period,
    )


def sigma_iterates(sigma: tuple[int, ...], count: int) -> list[tuple[int, ...]]:
    """Tables of σ^0, σ^1, ..., σ^(count-1)."""
    tables = [tuple(range(len(sigma)))]
    for _ in range(count - 1):
        tables.append(tuple(sigma[i] for i in tables[-1]))
    return tables


def cesaro_prefix(system_or_map: MapLike, f: Element, n: int) -> Element:
    """Exact value of the n-term Cesàro average (1/n) Σ_{k<n} S^k f."""
    if n < 1:
        raise ValueError(f"prefix length must be >= 1, got {n}")
    S = _resolve_map(system_or_map)
    g = f
    total = f
    for _ in range(n - 1):
        g = S.apply(g)
        total = total + g
    return total / n


def ergodic_limit(system_or_map: MapLike, f: Element) -> Element:
    """Order limit of the Cesàro averages: the mean of f over the cycle
    reached from each coordinate."""
    S = _resolve_map(system_or_map)
    graph = functional_graph(S.sigma)
    means = [
        sum((f.coords[i] for i in cycle), Fraction(0)) / len(cycle)
        for cycle in graph.cycles
    ]
    return Element(f.space, tuple(means[graph.cycle_index[i]] for i in range(f.space.dim)))


def ergodic_projection_columns(system_or_map: MapLike) -> list[Element]:
    """Basis images of the limit operator f -> lim (1/n) Σ S^k f."""
    S = _resolve_map(system_or_map)
    graph = functional_graph(S.sigma)
    space = S.space
    n = space.dim
    columns = []
    for j in range(n):
        if graph.depth[j] > 0:
            # j is never visited by any cycle, so its basis vector
            # averages away entirely
            columns.append(space.zero())
            continue
        cj = graph.cycle_index[j]
        value = Fraction(1, len(graph.cycles[cj]))
        columns.append(
            Element(
                space,
                tuple(
                    value if graph.cycle_index[i] == cj else Fraction(0)
                    for i in range(n)
                ),
            )
        )
    return columns


def invariant_basis(system_or_map: MapLike) -> list[Element]:
    """Indicators of the basins (one per cycle); they span the fixed space
    of both S and the limit operator."""
    S = _resolve_map(system_or_map)
    graph = functional_graph(S.sigma)
    space = S.space
    return [
        space.component(
            [1 if graph.cycle_index[i] == ci else 0 for i in range(space.dim)]
        )
        for ci in range(len(graph.cycles))
    ]


def invariant_dimension(system_or_map: MapLike) -> int:
    """Dimension of the fixed space of S (= number of cycles)."""
    S = _resolve_map(system_or_map)
    return len(functional_graph(S.sigma).cycles)


@dataclass(frozen=True)
class EventuallyPeriodicSeq:
    """Exact representation of k -> value: preperiod then repeating period."""

    preperiod: tuple[Element, ...]
    period: tuple[Element, ...]

    def __post_init__(self) -> None:
        if not self.period:
            raise ValueError("period block must be nonempty")

    def value(self, k: int) -> Element:
        if k < len(self.preperiod):
            return self.preperiod[k]
        return self.period[(k - len(self.preperiod)) % len(self.period)]

    def prefix(self, count: int) -> list[Element]:
        return [self.value(k) for k in range(count)]

    def map(self, fn: Callable[[Element], Element]) -> "EventuallyPeriodicSeq":
        return EventuallyPeriodicSeq(
            tuple(fn(v) for v in self.preperiod),
            tuple(fn(v) for v in self.period),
        )

    def zip_with(
        self, other: "EventuallyPeriodicSeq", fn: Callable[[Element, Element], Element]
    ) -> "EventuallyPeriodicSeq":
        """Pointwise combination; preperiods align to the longer one and the
        period becomes the lcm of both periods."""
        k = max(len(self.preperiod), len(other.preperiod))
        d = math.lcm(len(self.period), len(other.period))
        return EventuallyPeriodicSeq(
            tuple(fn(self.value(i), other.value(i)) for i in range(k)),
            tuple(fn(self.value(k + r), other.value(k + r)) for r in range(d)),
        )


def constant_seq(value: Element) -> EventuallyPeriodicSeq:
    return EventuallyPeriodicSeq((), (value,))


def shifted_product_expectations(sys: CEPS, p: Element, q: Element) -> EventuallyPeriodicSeq:
    """The sequence k -> T((S^k p) · q), exactly.

    Preperiod length is the graph bound K and the period divides d, both
    taken from the cycle structure of σ (global bounds, not per-pair
    minima).
    """
    _check_same_space(p, q)
    if p.space.dim != sys.space.dim:
        raise ValueError(f"arguments of dim {p.space.dim} for system of dim {sys.space.dim}")
    graph = functional_graph(sys.S.sigma)
    k_pre, d = graph.preperiod, graph.period
    tables = sigma_iterates(sys.S.sigma, k_pre + d)
    values = []
    for table in tables:
        shifted = Element(p.space, tuple(p.coords[table[i]] for i in range(len(table))))
        product = Element(
            p.space, tuple(a * b for a, b in zip(shifted.coords, q.coords))
        )
        values.append(sys.T.apply(product))
    return EventuallyPeriodicSeq(tuple(values[:k_pre]), tuple(values[k_pre:]))


def cesaro_limit(seq: EventuallyPeriodicSeq) -> Element:
    """Order limit of the running averages: the mean of the period block.
    The preperiod never affects the limit."""
    total = seq.period[0]
    for v in seq.period[1:]:
        total = total + v
    return total / len(seq.period)


def cesaro_limit_abs_deviation(seq: EventuallyPeriodicSeq, target: Element) -> Element:
    """Limit of (1/n) Σ_{k<n} |value(k) - target|: the period mean of the
    absolute deviations."""
    total = abs(seq.period[0] - target)
    for v in seq.period[1:]:
        total = total + abs(v - target)
    return total / len(seq.period)


def prefix_mean(seq: EventuallyPeriodicSeq, n: int) -> Element:
    """Exact n-term running average of the sequence, in O(K + d) work."""
    if n < 1:
        raise ValueError(f"prefix length must be >= 1, got {n}")
    k_pre, d = len(seq.preperiod), len(seq.period)
    space = seq.period[0].space
    total = space.zero()
    if n <= k_pre:
        for v in seq.preperiod[:n]:
            total = total + v
        return total / n
    for v in seq.preperiod:
        total = total + v
    full, rest = divmod(n - k_pre, d)
    period_sum = space.zero()
    for v in seq.period:
        period_sum = period_sum + v
    total = total + period_sum * full
    for v in seq.period[:rest]:
        total = total + v
    return total / n
