"""Finite multigraphs used as combinatorial base spaces.

Edges are oriented pairs ``(u, v)``; loops and parallel edges are allowed.
Traversing an edge backwards is written as the pair ``(edge, -1)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

from .errors import InvariantError

Step = tuple[int, int]  # (edge index, +1 forward / -1 backward)


@dataclass(frozen=True)
class Graph:
    nvertices: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))
        if self.nvertices < 1:
            raise InvariantError("a graph needs at least one vertex")
        for k, (u, v) in enumerate(self.edges):
            if not (0 <= u < self.nvertices and 0 <= v < self.nvertices):
                raise InvariantError(f"edge {k} = ({u}, {v}) references a missing vertex")

    @classmethod
    def cycle(cls, n: int) -> Graph:
        if n == 1:
            return cls(1, ((0, 0),))
        return cls(n, tuple((i, (i + 1) % n) for i in range(n)))

    @classmethod
    def bouquet(cls, k: int) -> Graph:
        """One vertex with ``k`` loops."""
        return cls(1, tuple((0, 0) for _ in range(k)))

    @classmethod
    def theta(cls) -> Graph:
        return cls(2, ((0, 1), (0, 1), (0, 1)))

    @classmethod
    def path(cls, n: int) -> Graph:
        return cls(n, tuple((i, i + 1) for i in range(n - 1)))

    @property
    def nedges(self) -> int:
        return len(self.edges)

    def endpoints(self, step: Step) -> tuple[int, int]:
        u, v = self.edges[step[0]]
        return (u, v) if step[1] > 0 else (v, u)

    @cached_property
    def incidence(self) -> tuple[tuple[Step, ...], ...]:
        """Steps leaving each vertex, in edge order (forward before backward)."""
        out: list[list[Step]] = [[] for _ in range(self.nvertices)]
        for k, (u, v) in enumerate(self.edges):
            out[u].append((k, 1))
            out[v].append((k, -1))
        return tuple(tuple(s) for s in out)

    def components(self) -> list[list[int]]:
        seen = [False] * self.nvertices
        comps = []
        for start in range(self.nvertices):
            if seen[start]:
                continue
            seen[start] = True
            comp, queue = [], deque([start])
            while queue:
                x = queue.popleft()
                comp.append(x)
                for step in self.incidence[x]:
                    y = self.endpoints(step)[1]
                    if not seen[y]:
                        seen[y] = True
                        queue.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def spanning_tree(self, root: int = 0) -> SpanningTree:
        if not self.is_connected():
            raise InvariantError("graph is disconnected")
        parent: list[Step | None] = [None] * self.nvertices
        seen = [False] * self.nvertices
        seen[root] = True
        order = [root]
        queue = deque([root])
        tree = set()
        while queue:
            x = queue.popleft()
            for step in self.incidence[x]:
                y = self.endpoints(step)[1]
                if not seen[y]:
                    seen[y] = True
                    parent[y] = step
                    tree.add(step[0])
                    order.append(y)
                    queue.append(y)
        return SpanningTree(self, root, tuple(parent), frozenset(tree), tuple(order))


@dataclass(frozen=True)
class SpanningTree:
    graph: Graph
    root: int
    parent: tuple[Step | None, ...]  # step entering each vertex from its parent
    tree_edges: frozenset[int]
    bfs_order: tuple[int, ...]
    _paths: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def cotree_edges(self) -> tuple[int, ...]:
        return tuple(k for k in range(self.graph.nedges) if k not in self.tree_edges)

    def path_from_root(self, v: int) -> tuple[Step, ...]:
        """Tree steps from the root to ``v``."""
        if v in self._paths:
            return self._paths[v]
        steps = []
        x = v
        while x != self.root:
            step = self.parent[x]
            steps.append(step)
            x = self.graph.endpoints(step)[0]
        path = tuple(reversed(steps))
        self._paths[v] = path
        return path

    def path_to_root(self, v: int) -> tuple[Step, ...]:
        return tuple((k, -d) for k, d in reversed(self.path_from_root(v)))

    def loop(self, edge: int) -> tuple[Step, ...]:
        """The closed walk root -> u -> (edge) -> v -> root."""
        u, v = self.graph.edges[edge]
        return self.path_from_root(u) + ((edge, 1),) + self.path_to_root(v)
