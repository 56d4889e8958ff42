"""Slot-coloring transmission schemes: two-slot 1/2 DoF and three-slot 4/9 DoF.

In the three-slot scheme every user splits its message into a private part,
sent in the slot colored for its alignment set, and a common part repeated in
all three slots. Each receiver hears at most two colored slots; the remaining
slot carries only commons, which it decodes jointly and then subtracts from its
own private slot.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .graphs import GraphBundle, set_conflict_graph
from .topology import NetworkTopology


class SchemeTopologyMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Infeasible:
    reason: str

    def __bool__(self):
        return False


@dataclass(frozen=True)
class TransmissionScheme:
    topology: NetworkTopology
    slots: int
    colors: dict[tuple[int, ...], int]  # alignment set -> 1-based slot
    common_active: bool
    powers: dict[str, float] = field(default_factory=lambda: {"private": 0.5, "common": 0.5})
    decode_order: tuple[str, ...] = ("commons", "private")

    @property
    def nominal_dof(self) -> Fraction:
        return Fraction(4, 9) if self.common_active else Fraction(1, 2)

    def private_slot(self, user: int) -> int:
        for s, c in self.colors.items():
            if user in s:
                return c
        raise KeyError(user)

    def slot_vector(self, user: int) -> tuple[int, ...]:
        """Standard-basis vector of the user's private slot."""
        c = self.private_slot(user)
        return tuple(int(t == c) for t in range(1, self.slots + 1))

    def common_vector(self) -> tuple[int, ...]:
        return (1,) * self.slots if self.common_active else (0,) * self.slots

    def free_slot(self, receiver: int) -> int | None:
        """First slot in which no transmitter heard by ``receiver`` sends a private symbol."""
        used = {self.private_slot(l) for l in self.topology.heard[receiver]}
        free = [t for t in range(1, self.slots + 1) if t not in used]
        return free[0] if free else None

    def to_json(self) -> dict:
        nd = self.nominal_dof
        return {
            "slots": self.slots,
            "colors": {",".join(map(str, s)): c for s, c in self.colors.items()},
            "common_active": self.common_active,
            "powers": dict(self.powers) if self.common_active else {"private": self.powers["private"]},
            "nominal_dof": {"num": nd.numerator, "den": nd.denominator},
            "decode_order": list(self.decode_order),
        }


def color_set_conflict_graph(bundle: GraphBundle, max_colors: int) -> dict[tuple[int, ...], int] | Infeasible:
    """Proper coloring of the alignment-set conflict graph with slots 1..max_colors."""
    if max_colors not in (2, 3):
        raise ValueError("max_colors must be 2 or 3")
    n = len(bundle.sets)
    adj = [[] for _ in range(n)]
    for a, b in sorted(set_conflict_graph(bundle)):
        adj[a].append(b)
        adj[b].append(a)
    if max_colors == 2:
        color = _two_color(adj)
    else:
        color = _backtrack_color(adj, max_colors)
    if color is None:
        return Infeasible(f"alignment-set conflict graph is not {max_colors}-colorable")
    return {bundle.sets[i]: color[i] for i in range(n)}


def _two_color(adj):
    color = [0] * len(adj)
    for root in range(len(adj)):
        if color[root]:
            continue
        color[root] = 1
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if not color[w]:
                    color[w] = 3 - color[u]
                    queue.append(w)
                elif color[w] == color[u]:
                    return None
    return color


def _backtrack_color(adj, k):
    n = len(adj)
    color = [0] * n

    def place(v):
        if v == n:
            return True
        taken = {color[w] for w in adj[v]}
        for c in range(1, k + 1):
            if c not in taken:
                color[v] = c
                if place(v + 1):
                    return True
        color[v] = 0
        return False

    return color if place(0) else None


def build_half_scheme(bundle: GraphBundle) -> TransmissionScheme | Infeasible:
    if bundle.internal_conflicts:
        return Infeasible("internal conflict: 1/2 DoF per user is not achievable")
    if not bundle.reduced_bipartite.bipartite:
        return Infeasible("odd cycle in the reduced graph: 1/2 DoF per user is not achievable")
    colors = color_set_conflict_graph(bundle, 2)
    if isinstance(colors, Infeasible):
        return Infeasible("1/2 DoF per user is achievable since C1 and C2 hold, but the two-slot "
                          "constructor cannot color the singleton sets; the general construction "
                          "is out of scope")
    return TransmissionScheme(bundle.topology, 2, colors, common_active=False)


def build_four_ninths_scheme(bundle: GraphBundle) -> TransmissionScheme | Infeasible:
    if bundle.internal_conflicts:
        return Infeasible("internal conflict: private slots cannot be kept interference free")
    t = bundle.topology
    crowded = [k for k in t.users if len(t.interferers(k)) > 2]
    if crowded:
        return Infeasible(f"receivers {crowded} hear more than two interferers; "
                          "the common slot would carry more than three commons")
    colors = color_set_conflict_graph(bundle, 3)
    if isinstance(colors, Infeasible):
        return colors
    return TransmissionScheme(t, 3, colors, common_active=True)


@dataclass(frozen=True)
class ReceiverCheck:
    private_slots_ok: bool  # (a) heard privates span at most two slots
    free_slot_ok: bool | None  # (b) a slot with only commons, at most three; None when no commons
    private_clean: bool  # (c) own private slot holds no foreign private
    free_slot: int | None = None

    @property
    def ok(self) -> bool:
        return self.private_slots_ok and self.free_slot_ok is not False and self.private_clean


@dataclass(frozen=True)
class SchemeValidation:
    receivers: dict[int, ReceiverCheck]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.receivers.values())

    def failures(self) -> list[str]:
        out = []
        for k, r in self.receivers.items():
            for name, val in (("a", r.private_slots_ok), ("b", r.free_slot_ok), ("c", r.private_clean)):
                if val is False:
                    out.append(f"receiver {k}: check ({name}) failed")
        return out


def slot_contents(scheme: TransmissionScheme, receiver: int, slot: int) -> list[tuple[int, str]]:
    """Symbols superposed at ``receiver`` in ``slot`` as (transmitter, 'private'|'common')."""
    out = []
    for l in sorted(scheme.topology.heard[receiver]):
        if scheme.private_slot(l) == slot:
            out.append((l, "private"))
        if scheme.common_active:
            out.append((l, "common"))
    return out


def validate_scheme_structure(scheme: TransmissionScheme, topology: NetworkTopology) -> SchemeValidation:
    if scheme.topology != topology:
        raise SchemeTopologyMismatch("scheme was built for a different topology")
    checks = {}
    for k in topology.users:
        heard = topology.heard[k]
        private_slots = {scheme.private_slot(l) for l in heard}
        a = len(private_slots) <= 2
        free = scheme.free_slot(k)
        if scheme.common_active:
            if free is None:
                b = False
            else:
                content = slot_contents(scheme, k, free)
                b = all(kind == "common" for _, kind in content) and len(content) <= 3
        else:
            b = None
        own = scheme.private_slot(k)
        privates = {l for l, kind in slot_contents(scheme, k, own) if kind == "private"}
        checks[k] = ReceiverCheck(a, b, privates == {k}, free)
    return SchemeValidation(checks)
