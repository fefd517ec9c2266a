"""Interaction graphs, degrees of impact and the nested neighborhood sets.

The degree of impact between two cells is the least number of interactions
linking them: 0 for the cell itself, 1 for a direct contact, and the
shortest chain length otherwise. Degrees can also be assigned explicitly,
which is how household/workplace structures are described.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

UNREACHABLE = -1


@dataclass(frozen=True)
class InteractionGraph:
    """Undirected contact graph over ``cell_count`` cells.

    Self-loops are implicit and dropped from ``edges``; each edge is stored
    once as an ordered ``(low, high)`` pair.
    """

    cell_count: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.cell_count < 1:
            raise ValueError("cell_count must be positive")
        normalized = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if not (0 <= a < self.cell_count and 0 <= b < self.cell_count):
                raise ValueError(f"edge ({a}, {b}) references a cell outside 0..{self.cell_count - 1}")
            if a != b:
                normalized.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(normalized))

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.cell_count)]
        for a, b in sorted(self.edges):
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def has_edge(self, a: int, b: int) -> bool:
        return a == b or (min(a, b), max(a, b)) in self.edges


class ImpactDegreeMap:
    """Degree of impact for every ordered pair of cells.

    Stored as an ``n x n`` integer matrix where ``UNREACHABLE`` marks pairs
    with no finite degree. Instances are read-only.
    """

    def __init__(self, matrix):
        m = np.array(matrix, dtype=np.int64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("degree matrix must be square")
        if np.any(m < UNREACHABLE):
            raise ValueError("degrees must be nonnegative or UNREACHABLE")
        if np.any(np.diag(m) != 0):
            raise ValueError("self-degree must be 0")
        m.setflags(write=False)
        self._matrix = m

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def cell_count(self) -> int:
        return self._matrix.shape[0]

    @property
    def max_degree(self) -> int:
        return int(self._matrix.max())

    def degree(self, source: int, target: int) -> int | None:
        """Degree from ``source`` to ``target``, or None when unreachable."""
        g = int(self._matrix[source, target])
        return None if g == UNREACHABLE else g

    def degrees_present(self) -> set[int]:
        return {int(g) for g in np.unique(self._matrix) if g != UNREACHABLE}

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self._matrix, self._matrix.T))

    def __eq__(self, other):
        if not isinstance(other, ImpactDegreeMap):
            return NotImplemented
        return np.array_equal(self._matrix, other._matrix)

    def __hash__(self):
        return hash(self._matrix.tobytes())

    def __repr__(self):
        return f"ImpactDegreeMap(cells={self.cell_count}, max_degree={self.max_degree})"


@dataclass(frozen=True)
class ImpactProfile:
    """Impact rate P(g) for each degree g."""

    rates: Mapping[int, float]

    def __post_init__(self):
        object.__setattr__(self, "rates", {int(g): float(p) for g, p in dict(self.rates).items()})

    def __getitem__(self, degree: int) -> float:
        return self.rates[degree]

    def as_tuple(self, max_degree: int) -> tuple[float, ...]:
        """Rates for degrees 0..max_degree; uncovered degrees read as 0."""
        return tuple(self.rates.get(g, 0.0) for g in range(max_degree + 1))

    def violations(self, max_degree: int | None = None) -> list[str]:
        out = [f"impact rate P({g})={p} outside [0,1]"
               for g, p in sorted(self.rates.items()) if not 0.0 <= p <= 1.0]
        out += [f"negative degree {g} in impact profile" for g in sorted(self.rates) if g < 0]
        if max_degree is not None:
            out += [f"degree {g} uncovered" for g in range(max_degree + 1) if g not in self.rates]
        return out


def compute_impact_degrees(graph: InteractionGraph) -> ImpactDegreeMap:
    """All-pairs shortest-path degrees by breadth-first search from every cell."""
    n = graph.cell_count
    adj = graph.adjacency()
    m = np.full((n, n), UNREACHABLE, dtype=np.int64)
    for source in range(n):
        row = m[source]
        row[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if row[v] == UNREACHABLE:
                    row[v] = row[u] + 1
                    queue.append(v)
    return ImpactDegreeMap(m)


def set_explicit_degrees(cell_count: int, assignments: Iterable[tuple[int, int, int]]) -> ImpactDegreeMap:
    """Build a degree map from explicit ``(source, target, degree)`` triples.

    Pairs not mentioned are unreachable. Assignments may be asymmetric.
    Raises ValueError on conflicting duplicates or a nonzero self-degree.
    """
    m = np.full((cell_count, cell_count), UNREACHABLE, dtype=np.int64)
    for source, target, g in assignments:
        source, target, g = int(source), int(target), int(g)
        if not (0 <= source < cell_count and 0 <= target < cell_count):
            raise ValueError(f"assignment ({source}, {target}) references a cell outside 0..{cell_count - 1}")
        if g < 0:
            raise ValueError(f"negative degree {g} for ({source}, {target})")
        if source == target and g != 0:
            raise ValueError(f"self-degree of cell {source} must be 0, got {g}")
        prev = m[source, target]
        if prev != UNREACHABLE and prev != g:
            raise ValueError(f"pair ({source}, {target}) assigned both {prev} and {g}")
        m[source, target] = g
    np.fill_diagonal(m, 0)
    return ImpactDegreeMap(m)


def neighborhood_set(degrees: ImpactDegreeMap, x: int, k: int) -> frozenset[int]:
    """The set A_k(x) of cells whose degree from ``x`` is at most ``k``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    row = degrees.matrix[x]
    return frozenset(int(y) for y in np.flatnonzero((row != UNREACHABLE) & (row <= k)))
