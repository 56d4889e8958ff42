"""Odd cycles of the reduced graph and completed-cycle optimisation."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .graphs import GraphBundle, is_bipartite

DEFAULT_MAX_LEN = 9
DEFAULT_MAX_COUNT = 100_000
INF = float("inf")


class NotApplicable(ValueError):
    """Raised when odd cycles are requested from a bipartite graph."""


class InvalidCycle(ValueError):
    pass


@dataclass(frozen=True)
class CycleParams:
    m: int
    m2: int
    l_sigma: int

    @property
    def objective(self) -> int:
        return self.m + 2 * self.l_sigma


def l_sigma_from(m: int, m2: int, cycle_length: int) -> int:
    """lΣ = |C_c| - m + m2."""
    return cycle_length - m + m2


@dataclass(frozen=True)
class CompletedCycle:
    """A message-level cycle realising an odd cycle of alignment sets.

    ``conflict_edges[j]`` is ``(exit_j, entry_{j+1})``; ``internal_paths[j]``
    runs from ``entry_j`` to ``exit_j`` over alignment edges and is empty when
    the two coincide.
    """

    set_cycle: tuple[tuple[int, ...], ...]
    conflict_edges: tuple[tuple[int, int], ...]
    internal_paths: tuple[tuple[int, ...], ...]
    params: CycleParams

    def entries(self) -> list[int]:
        m = len(self.set_cycle)
        return [self.conflict_edges[(j - 1) % m][1] for j in range(m)]

    def exits(self) -> list[int]:
        return [e[0] for e in self.conflict_edges]

    def message_sequence(self) -> tuple[int, ...]:
        seq: list[int] = []
        for entry, exit_ in zip(self.entries(), self.exits()):
            seq += [entry, exit_]
        return tuple(seq)

    def length(self) -> int:
        """|C_c|: the number of edges of the completed cycle."""
        return len(self.conflict_edges) + sum(max(len(p) - 1, 0) for p in self.internal_paths)

    def to_json(self) -> dict:
        return {
            "sets": [list(s) for s in self.set_cycle],
            "conflict_edges": [list(e) for e in self.conflict_edges],
            "paths": [list(p) for p in self.internal_paths],
            "m": self.params.m,
            "m2": self.params.m2,
            "l_sigma": self.params.l_sigma,
        }


def cycle_params(c: CompletedCycle) -> CycleParams:
    m = len(c.set_cycle)
    if len(c.conflict_edges) != m or len(c.internal_paths) != m:
        raise InvalidCycle("set_cycle, conflict_edges and internal_paths differ in length")
    entries, exits = c.entries(), c.exits()
    m2 = 0
    for j, path in enumerate(c.internal_paths):
        if not path:
            if entries[j] != exits[j]:
                raise InvalidCycle(f"set {j}: empty path but entry {entries[j]} != exit {exits[j]}")
            m2 += 1
        elif path[0] != entries[j] or path[-1] != exits[j] or len(path) < 2:
            raise InvalidCycle(f"set {j}: path {path} does not join entry {entries[j]} to exit {exits[j]}")
    p = CycleParams(m, m2, l_sigma_from(m, m2, c.length()))
    if p != c.params:
        raise InvalidCycle(f"stored params {c.params} disagree with structure {p}")
    return p


def verify_completed_cycle(bundle: GraphBundle, c: CompletedCycle) -> tuple[bool, list[str]]:
    reasons = []
    m = len(c.set_cycle)
    if m < 3 or m % 2 == 0:
        reasons.append(f"m={m} is not an odd number >= 3")
    try:
        cycle_params(c)
    except InvalidCycle as exc:
        return False, reasons + [str(exc)]
    sets = set(bundle.sets)
    for j, s in enumerate(c.set_cycle):
        if s not in sets:
            reasons.append(f"{s} is not an alignment set")
        elif len(s) < 2:
            reasons.append(f"{s} is not a reduced-graph vertex")
    if len(set(c.set_cycle)) != m:
        reasons.append("alignment set visited twice")
    for j, (a, b) in enumerate(c.conflict_edges):
        if (min(a, b), max(a, b)) not in bundle.conflict_edges:
            reasons.append(f"({a}, {b}) is not a conflict edge")
        if a not in c.set_cycle[j] or b not in c.set_cycle[(j + 1) % m]:
            reasons.append(f"conflict edge {j} does not join consecutive sets")
    for j, path in enumerate(c.internal_paths):
        if len(set(path)) != len(path):
            reasons.append(f"path {j} repeats a message")
        for u, v in zip(path, path[1:]):
            if (min(u, v), max(u, v)) not in bundle.alignment_edges:
                reasons.append(f"path {j}: ({u}, {v}) is not an alignment edge")
            if v not in c.set_cycle[j]:
                reasons.append(f"path {j} leaves its alignment set")
    return not reasons, reasons


@dataclass(frozen=True)
class OddCycles:
    cycles: list[tuple[int, ...]]
    truncated: bool  # max_count was reached
    length_capped: bool  # the graph may hold simple cycles longer than max_len


def canonical_cycle(cycle: Sequence[int]) -> tuple[int, ...]:
    """Rotate to the smallest vertex first and orient so the second < last."""
    i = min(range(len(cycle)), key=lambda k: cycle[k])
    c = tuple(cycle[i:]) + tuple(cycle[:i])
    if len(c) > 2 and c[1] > c[-1]:
        c = (c[0],) + tuple(reversed(c[1:]))
    return c


def _adjacency(vertices: Iterable, edges: Iterable[tuple]) -> dict:
    adj = {v: set() for v in vertices}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    return {v: sorted(n) for v, n in adj.items()}


def shortest_odd_cycle_through(adj: dict, v) -> tuple | None:
    """BFS on the bipartite double cover from (v, 0) to (v, 1).

    The resulting odd closed walk is reduced to a simple odd cycle.
    """
    start, goal = (v, 0), (v, 1)
    prev = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if node == goal:
            break
        u, side = node
        for w in adj[u]:
            nxt = (w, 1 - side)
            if nxt not in prev:
                prev[nxt] = node
                queue.append(nxt)
    if goal not in prev:
        return None
    walk = []
    node = goal
    while node is not None:
        walk.append(node[0])
        node = prev[node]
    walk.reverse()  # v ... v, odd number of edges
    return canonical_cycle(_odd_cycle_in_walk(walk[:-1]))


def _odd_cycle_in_walk(walk: list) -> list:
    # walk is closed (last vertex adjacent to first) with an odd number of edges
    while True:
        seen = {}
        for pos, x in enumerate(walk):
            if x in seen:
                p = seen[x]
                inner = walk[p:pos]
                if len(inner) % 2 == 1:
                    walk = inner
                else:
                    walk = walk[:p] + walk[pos:]
                break
            seen[x] = pos
        else:
            return walk


def enumerate_odd_cycles(vertices, edges, max_len: int = DEFAULT_MAX_LEN,
                         max_count: int = DEFAULT_MAX_COUNT) -> OddCycles:
    vertices = sorted(vertices)
    edges = list(edges)
    if is_bipartite(vertices, edges):
        raise NotApplicable("graph has no odd cycle")
    adj = _adjacency(vertices, edges)
    found: dict[tuple, None] = {}
    for v in vertices:
        c = shortest_odd_cycle_through(adj, v)
        if c is not None:
            found[c] = None
    truncated = False

    for s in vertices:
        if truncated:
            break
        path = [s]
        on_path = {s}
        stack = [iter(w for w in adj[s] if w > s)]
        while stack:
            w = next(stack[-1], None)
            if w is None:
                stack.pop()
                on_path.discard(path.pop())
                continue
            path.append(w)
            on_path.add(w)
            if len(path) % 2 == 1 and len(path) >= 3 and s in adj[w] and path[1] < w:
                found.setdefault(tuple(path), None)
                if len(found) >= max_count:
                    truncated = True
                    break
            if len(path) < max_len:
                stack.append(iter(x for x in adj[w] if x > s and x not in on_path))
            else:
                on_path.discard(path.pop())
    return OddCycles(list(found), truncated, max_len < len(vertices))


def _alignment_adjacency(bundle: GraphBundle) -> dict[int, list[int]]:
    return _adjacency(bundle.topology.users, bundle.alignment_edges)


def _bfs_distances(adj: dict, src: int) -> dict[int, int]:
    dist = {src: 0}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def _lexmin_shortest_path(adj: dict, dist_to_target: dict, a: int) -> tuple[int, ...]:
    path = [a]
    while dist_to_target[path[-1]]:
        here = dist_to_target[path[-1]]
        path.append(min(w for w in adj[path[-1]] if dist_to_target.get(w) == here - 1))
    return tuple(path)


class _Optimizer:
    def __init__(self, bundle: GraphBundle):
        self.bundle = bundle
        self.adj = _alignment_adjacency(bundle)
        self.dist: dict[int, dict[int, int]] = {}
        conflicts: dict[int, set[int]] = {v: set() for v in bundle.topology.users}
        for i, j in bundle.conflict_edges:
            conflicts[i].add(j)
            conflicts[j].add(i)
        self.conflicts = conflicts

    def distances(self, target: int) -> dict[int, int]:
        if target not in self.dist:
            self.dist[target] = _bfs_distances(self.adj, target)
        return self.dist[target]

    def cost(self, entry: int, exit_: int) -> int:
        return 1 if entry == exit_ else self.distances(exit_)[entry]

    def solve(self, cycle: Sequence[int]) -> CompletedCycle:
        """DP over entry/exit messages for a canonical cycle of set indices."""
        sets = [self.bundle.sets[i] for i in cycle]
        m = len(sets)
        moves = []  # moves[j]: sorted (exit_j, entry_{j+1}) conflict pairs
        for j in range(m):
            nxt = set(sets[(j + 1) % m])
            moves.append(sorted((a, b) for a in sets[j] for b in self.conflicts[a] if b in nxt))

        best = None
        for e0 in sets[0]:
            togo = self._cost_to_go(sets, moves, e0)
            if togo[0].get(e0, INF) < INF and (best is None or togo[0][e0] < best[0]):
                best = (togo[0][e0], e0, togo)
        if best is None:
            raise InvalidCycle(f"no completed cycle realises {cycle}")
        total, e0, togo = best

        entry = e0
        conflict_edges, paths = [], []
        for j in range(m):
            target = togo[j][entry]
            for a, b in moves[j]:
                rest = togo[j + 1].get(b, INF)
                if self.cost(entry, a) + rest == target:
                    break
            conflict_edges.append((a, b))
            paths.append(() if entry == a else _lexmin_shortest_path(self.adj, self.distances(a), entry))
            entry = b
        m2 = sum(1 for p in paths if not p)
        return CompletedCycle(
            set_cycle=tuple(sets),
            conflict_edges=tuple(conflict_edges),
            internal_paths=tuple(paths),
            params=CycleParams(m, m2, total),
        )

    def _cost_to_go(self, sets, moves, e0) -> list[dict[int, float]]:
        m = len(sets)
        togo: list[dict[int, float]] = [dict() for _ in range(m + 1)]
        togo[m] = {e0: 0}
        for j in range(m - 1, -1, -1):
            entries = [e0] if j == 0 else sets[j]
            for entry in entries:
                val = INF
                for a, b in moves[j]:
                    rest = togo[j + 1].get(b, INF)
                    if rest < INF:
                        val = min(val, self.cost(entry, a) + rest)
                if val < INF:
                    togo[j][entry] = val
        return togo


def optimize_completed_cycle(bundle: GraphBundle, odd_cycles: Iterable[Sequence[int]]) -> CompletedCycle:
    """Minimise m + 2 lΣ over the given reduced-graph cycles.

    Ties go to the smaller m, then the lexicographically smallest
    entry/exit message sequence.
    """
    opt = _Optimizer(bundle)
    best = None
    best_key = None
    for cyc in {canonical_cycle(c): None for c in odd_cycles}:
        cc = opt.solve(cyc)
        key = (cc.params.objective, cc.params.m, cc.message_sequence())
        if best_key is None or key < best_key:
            best, best_key = cc, key
    if best is None:
        raise NotApplicable("no odd cycles supplied")
    return best


@dataclass(frozen=True)
class CycleSearch:
    cycle: CompletedCycle
    cycles_considered: int
    possibly_not_tightest: bool


def best_completed_cycle(bundle: GraphBundle, max_len: int | None = DEFAULT_MAX_LEN,
                         max_count: int | None = DEFAULT_MAX_COUNT) -> CycleSearch:
    """Enumerate odd reduced-graph cycles and optimise; ``None`` caps lift the limit."""
    n = len(bundle.reduced_vertices)
    found = enumerate_odd_cycles(
        bundle.reduced_vertices, bundle.reduced_edges,
        max_len=n if max_len is None else max_len,
        max_count=float("inf") if max_count is None else max_count,
    )
    cc = optimize_completed_cycle(bundle, found.cycles)
    # a cycle of length m has objective >= 3m, so a long cycle cannot win once
    # the best objective is at most 3 * (shortest excluded odd length)
    limit = (n if max_len is None else max_len)
    shortest_excluded = limit + 1 if limit % 2 == 0 else limit + 2
    loose = found.truncated or (found.length_capped and cc.params.objective > 3 * shortest_excluded)
    return CycleSearch(cc, len(found.cycles), loose)
