"""Alignment graph, conflict graph, alignment sets and the reduced graph.

Messages are identified with user indices 1..K. Undirected edges are stored as
``(i, j)`` tuples with ``i < j``; alignment sets are sorted tuples, ordered by
their smallest message.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Iterable, Sequence

from .topology import NetworkTopology

Edge = tuple[int, int]


def _edge(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


def build_alignment_graph(t: NetworkTopology) -> frozenset[Edge]:
    edges = set()
    for k in t.users:
        for i, j in combinations(sorted(t.interferers(k)), 2):
            edges.add((i, j))
    return frozenset(edges)


def build_conflict_graph(t: NetworkTopology) -> frozenset[Edge]:
    return frozenset(conflict_sources(t))


def conflict_sources(t: NetworkTopology) -> dict[Edge, tuple[int, ...]]:
    """Conflict edges annotated with the receivers that produce them."""
    src: dict[Edge, set[int]] = {}
    for k in t.users:
        for j in t.interferers(k):
            src.setdefault(_edge(k, j), set()).add(k)
    return {e: tuple(sorted(r)) for e, r in sorted(src.items())}


def compute_alignment_sets(edges: Iterable[Edge], K: int) -> tuple[tuple[int, ...], ...]:
    parent = list(range(K + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for v in range(1, K + 1):
        groups.setdefault(find(v), []).append(v)
    return tuple(sorted((tuple(g) for g in groups.values()), key=lambda s: s[0]))


@dataclass(frozen=True)
class BipartiteResult:
    bipartite: bool
    coloring: dict | None = None
    odd_cycle: tuple | None = None

    def __bool__(self):
        return self.bipartite


def is_bipartite(vertices: Sequence[Hashable], edges: Iterable[tuple]) -> BipartiteResult:
    """BFS 2-coloring; on failure returns an odd cycle as a vertex sequence."""
    adj = {v: [] for v in vertices}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    for v in adj:
        adj[v].sort()
    color: dict = {}
    parent: dict = {}
    depth: dict = {}
    for root in vertices:
        if root in color:
            continue
        color[root], parent[root], depth[root] = 0, None, 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in color:
                    color[w], parent[w], depth[w] = 1 - color[u], u, depth[u] + 1
                    queue.append(w)
                elif color[w] == color[u]:
                    return BipartiteResult(False, odd_cycle=_tree_cycle(u, w, parent, depth))
    return BipartiteResult(True, coloring=color)


def _tree_cycle(u, w, parent, depth) -> tuple:
    # u and w share a BFS layer parity; joining their tree paths gives an odd cycle
    left, right = [u], [w]
    a, b = u, w
    while depth[a] > depth[b]:
        a = parent[a]
        left.append(a)
    while depth[b] > depth[a]:
        b = parent[b]
        right.append(b)
    while a != b:
        a, b = parent[a], parent[b]
        left.append(a)
        right.append(b)
    right.pop()
    return tuple(left + right[::-1])


@dataclass(frozen=True)
class GraphBundle:
    topology: NetworkTopology
    alignment_edges: frozenset[Edge]
    conflict_edges: frozenset[Edge]
    sets: tuple[tuple[int, ...], ...]
    internal_conflicts: frozenset[Edge]
    reduced_vertices: tuple[int, ...]  # indices into ``sets``
    reduced_edges: frozenset[tuple[int, int]]
    reduced_bipartite: BipartiteResult
    conflict_sources: dict = field(default_factory=dict, compare=False)

    @property
    def K(self) -> int:
        return self.topology.K

    def set_index(self, message: int) -> int:
        for idx, s in enumerate(self.sets):
            if message in s:
                return idx
        raise KeyError(message)

    def reduced_sets(self) -> list[tuple[int, ...]]:
        return [self.sets[i] for i in self.reduced_vertices]


def find_internal_conflicts(sets: Sequence[Sequence[int]], conflict_edges: Iterable[Edge]) -> frozenset[Edge]:
    owner = {v: idx for idx, s in enumerate(sets) for v in s}
    return frozenset(e for e in conflict_edges if owner[e[0]] == owner[e[1]])


def build_reduced_graph(sets: Sequence[Sequence[int]], conflict_edges: Iterable[Edge]):
    """Return ``(vertices, edges)`` with vertices as indices into ``sets``."""
    owner = {v: idx for idx, s in enumerate(sets) for v in s}
    vertices = tuple(idx for idx, s in enumerate(sets) if len(s) >= 2)
    keep = set(vertices)
    edges = set()
    for i, j in conflict_edges:
        a, b = owner[i], owner[j]
        if a != b and a in keep and b in keep:
            edges.add((min(a, b), max(a, b)))
    return vertices, frozenset(edges)


def build_bundle(t: NetworkTopology) -> GraphBundle:
    align = build_alignment_graph(t)
    sources = conflict_sources(t)
    conflict = frozenset(sources)
    sets = compute_alignment_sets(align, t.K)
    rv, re_ = build_reduced_graph(sets, conflict)
    return GraphBundle(
        topology=t,
        alignment_edges=align,
        conflict_edges=conflict,
        sets=sets,
        internal_conflicts=find_internal_conflicts(sets, conflict),
        reduced_vertices=rv,
        reduced_edges=re_,
        reduced_bipartite=is_bipartite(rv, re_),
        conflict_sources=sources,
    )


def set_conflict_graph(bundle: GraphBundle) -> frozenset[tuple[int, int]]:
    """Edges between alignment sets (singletons included) joined by a conflict."""
    owner = {v: idx for idx, s in enumerate(bundle.sets) for v in s}
    edges = set()
    for i, j in bundle.conflict_edges:
        a, b = owner[i], owner[j]
        if a != b:
            edges.add((min(a, b), max(a, b)))
    return frozenset(edges)
