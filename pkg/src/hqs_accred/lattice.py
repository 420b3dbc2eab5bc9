"""Interaction graphs, 2-colourings and checkerboard sets.

Vertices are 1-based. Square lattices are indexed row-major from the top-left
cell, so vertex ``j`` of an ``rows x cols`` grid sits at row ``(j-1)//cols``
and column ``(j-1) % cols``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import NotTwoColourable


@dataclass(frozen=True)
class InteractionGraph:
    vertex_count: int
    edges: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        if self.vertex_count < 1:
            raise ValueError("vertex_count must be positive")
        norm = set()
        for e in self.edges:
            u, v = e
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if not (1 <= u <= self.vertex_count and 1 <= v <= self.vertex_count):
                raise ValueError(f"edge {e} has endpoint outside 1..{self.vertex_count}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, vertex_count: int, edges) -> InteractionGraph:
        edges = list(edges)
        seen = set()
        for u, v in edges:
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
        return cls(vertex_count, frozenset(seen))

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def neighbours(self, v: int) -> list[int]:
        return sorted(b if a == v else a for a, b in self.edges if v in (a, b))

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in range(1, self.vertex_count + 1)}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for v in adj:
            adj[v].sort()
        return adj

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)


@dataclass(frozen=True)
class TwoColoring:
    """Vertex -> colour in {1, 2}."""

    color: dict[int, int]

    def subset(self, j: int = 1) -> ChromaticSubset:
        return ChromaticSubset(frozenset(v for v, c in self.color.items() if c == j))

    def is_valid_for(self, g: InteractionGraph) -> bool:
        return all(self.color[u] != self.color[v] for u, v in g.edges)


@dataclass(frozen=True)
class ChromaticSubset:
    vertices: frozenset[int]

    def __contains__(self, v):
        return v in self.vertices

    def __iter__(self):
        return iter(sorted(self.vertices))

    def __len__(self):
        return len(self.vertices)


def square_lattice(rows: int, cols: int) -> InteractionGraph:
    """Nearest-neighbour grid graph, row-major 1-based indexing."""
    if rows < 1 or cols < 1:
        raise ValueError("lattice dimensions must be positive")
    edges = set()
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c + 1
            if c + 1 < cols:
                edges.add((v, v + 1))
            if r + 1 < rows:
                edges.add((v, v + cols))
    return InteractionGraph(rows * cols, frozenset(edges))


def cycle_graph(n: int) -> InteractionGraph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return InteractionGraph(n, frozenset((i, i % n + 1) for i in range(1, n + 1)))


def path_graph(n: int) -> InteractionGraph:
    return InteractionGraph(n, frozenset((i, i + 1) for i in range(1, n)))


def two_color(g: InteractionGraph) -> TwoColoring:
    """Breadth-first 2-colouring.

    Each component's lowest-index vertex gets colour 1, which makes vertex 1
    colour 1. Raises :class:`NotTwoColourable` with an odd cycle otherwise.
    """
    adj = g.adjacency()
    color: dict[int, int] = {}
    parent: dict[int, int | None] = {}
    depth: dict[int, int] = {}
    for root in range(1, g.vertex_count + 1):
        if root in color:
            continue
        color[root] = 1
        parent[root] = None
        depth[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in color:
                    color[v] = 3 - color[u]
                    parent[v] = u
                    depth[v] = depth[u] + 1
                    queue.append(v)
                elif color[v] == color[u]:
                    raise NotTwoColourable(_odd_cycle(u, v, parent, depth))
    return TwoColoring(color)


def _odd_cycle(u, v, parent, depth):
    # Walk both endpoints up the BFS tree to their lowest common ancestor.
    left, right = [u], [v]
    a, b = u, v
    while depth[a] > depth[b]:
        a = parent[a]
        left.append(a)
    while depth[b] > depth[a]:
        b = parent[b]
        right.append(b)
    while a != b:
        a = parent[a]
        b = parent[b]
        left.append(a)
        right.append(b)
    # left ends at the ancestor; right repeats it, so drop it there
    return left + right[-2::-1]


def is_bipartite(g: InteractionGraph) -> bool:
    try:
        two_color(g)
    except NotTwoColourable:
        return False
    return True


def checkerboard_set(n_l: int) -> ChromaticSubset:
    """Checkerboard set of the ``n_l x n_l`` square lattice.

    Odd ``n_l``: the odd indices. Even ``n_l``: take the set for ``n_l + 1``,
    drop its rightmost column and bottom row, and re-index the surviving
    cells row-major on the smaller lattice.
    """
    if n_l < 1:
        raise ValueError("lattice side must be positive")
    if n_l % 2:
        return ChromaticSubset(frozenset(range(1, n_l * n_l + 1, 2)))
    big = n_l + 1
    keep = set()
    for v in checkerboard_set(big):
        r, c = divmod(v - 1, big)
        if r < n_l and c < n_l:
            keep.add(r * n_l + c + 1)
    return ChromaticSubset(frozenset(keep))


def validate_chromatic(g: InteractionGraph, s: ChromaticSubset) -> bool:
    """True iff every edge has exactly one endpoint in ``s``."""
    return all((u in s) != (v in s) for u, v in g.edges)


def parse_graph(text: str) -> InteractionGraph:
    """Parse ``<vertex_count>`` followed by ``u v`` edge lines; ``#`` comments."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line))
    if not lines:
        raise ValueError("empty graph fixture")
    lineno, first = lines[0]
    try:
        n = int(first)
    except ValueError:
        raise ValueError(f"line {lineno}: expected vertex count, got {first!r}") from None
    edges = []
    for lineno, line in lines[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer vertex in {line!r}") from None
    return InteractionGraph.from_edges(n, edges)


def format_graph(g: InteractionGraph) -> str:
    return f"{g.vertex_count}\n" + "".join(f"{u} {v}\n" for u, v in g.sorted_edges())
