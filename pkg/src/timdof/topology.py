"""Network topologies: parsing, emission, validation and the fixture corpus.

Text format::

    # comment
    users 3
    rx 1: 1 2
    rx 2: 2
    rx 3: 3 1 2

Each ``rx k:`` line lists the transmitters heard by receiver ``k``; ``k`` itself
must be among them. Indices are 1-based.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Mapping

FIXTURE_NAMES = ("hexnet6", "paper7", "square8", "iconflict3")


class TopologyError(Exception):
    """Base class for topology parse and validation failures."""


class MalformedLine(TopologyError):
    def __init__(self, lineno: int, detail: str = ""):
        self.lineno = lineno
        msg = f"malformed line {lineno}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class TopologyInvalid(TopologyError):
    """Well-formed text describing a topology that violates an invariant."""


class MissingDirectLink(TopologyInvalid):
    def __init__(self, k: int):
        self.k = k
        super().__init__(f"receiver {k} does not hear its own transmitter")


class DuplicateReceiver(TopologyInvalid):
    def __init__(self, k: int):
        self.k = k
        super().__init__(f"receiver {k} listed more than once")


class MissingReceiver(TopologyInvalid):
    def __init__(self, k: int):
        self.k = k
        super().__init__(f"receiver {k} has no rx line")


class IndexOutOfRange(TopologyInvalid):
    def __init__(self, index: int, K: int):
        self.index = index
        super().__init__(f"index {index} outside 1..{K}")


class UnknownFixture(KeyError):
    pass


@dataclass(frozen=True)
class NetworkTopology:
    K: int
    heard: Mapping[int, frozenset[int]]

    def __post_init__(self):
        # normalise to an immutable, ordered mapping of frozensets
        heard = {int(k): frozenset(int(i) for i in v) for k, v in dict(self.heard).items()}
        object.__setattr__(self, "heard", dict(sorted(heard.items())))
        validate(self)

    @classmethod
    def from_interferers(cls, K: int, interferers: Mapping[int, Iterable[int]]) -> NetworkTopology:
        """Build from M_k sets; receivers absent from the mapping hear only themselves."""
        heard = {k: frozenset(interferers.get(k, ())) | {k} for k in range(1, K + 1)}
        return cls(K, heard)

    def interferers(self, k: int) -> frozenset[int]:
        """M_k: transmitters heard by receiver ``k`` other than its own."""
        return self.heard[k] - {k}

    @property
    def users(self) -> range:
        return range(1, self.K + 1)

    def __hash__(self):
        return hash((self.K, tuple(self.heard.items())))

    def __eq__(self, other):
        if not isinstance(other, NetworkTopology):
            return NotImplemented
        return self.K == other.K and self.heard == other.heard


def validate(t: NetworkTopology) -> None:
    if t.K < 1:
        raise TopologyInvalid(f"number of users must be positive, got {t.K}")
    for k in t.heard:
        if not 1 <= k <= t.K:
            raise IndexOutOfRange(k, t.K)
    for k in range(1, t.K + 1):
        if k not in t.heard:
            raise MissingReceiver(k)
        for i in t.heard[k]:
            if not 1 <= i <= t.K:
                raise IndexOutOfRange(i, t.K)
        if k not in t.heard[k]:
            raise MissingDirectLink(k)


_USERS_RE = re.compile(r"^users\s+(\d+)$")
_RX_RE = re.compile(r"^rx\s+(\d+)\s*:\s*(.*)$")


def parse_topology(text: str) -> NetworkTopology:
    K = None
    heard: dict[int, frozenset[int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if K is None:
            m = _USERS_RE.match(line)
            if not m:
                raise MalformedLine(lineno, "expected 'users <K>'")
            K = int(m.group(1))
            if K < 1:
                raise MalformedLine(lineno, "K must be positive")
            continue
        m = _RX_RE.match(line)
        if not m:
            raise MalformedLine(lineno, "expected 'rx <k>: <i1> <i2> ...'")
        k = int(m.group(1))
        fields = m.group(2).split()
        if not all(f.isdigit() for f in fields):
            raise MalformedLine(lineno, "transmitter indices must be positive integers")
        tx = [int(f) for f in fields]
        if len(set(tx)) != len(tx):
            raise MalformedLine(lineno, "duplicate transmitter index")
        if not 1 <= k <= K:
            raise IndexOutOfRange(k, K)
        if k in heard:
            raise DuplicateReceiver(k)
        for i in tx:
            if not 1 <= i <= K:
                raise IndexOutOfRange(i, K)
        if k not in tx:
            raise MissingDirectLink(k)
        heard[k] = frozenset(tx)
    if K is None:
        raise MalformedLine(0, "empty topology")
    for k in range(1, K + 1):
        if k not in heard:
            raise MissingReceiver(k)
    return NetworkTopology(K, heard)


def emit_topology(t: NetworkTopology) -> str:
    lines = [f"users {t.K}"]
    for k in t.users:
        lines.append("rx " + f"{k}: " + " ".join(str(i) for i in [k, *sorted(t.interferers(k))]))
    return "\n".join(lines) + "\n"


def fixture_text(name: str) -> str:
    if name not in FIXTURE_NAMES:
        raise UnknownFixture(name)
    return resources.files("timdof.fixtures").joinpath(f"{name}.tim").read_text(encoding="utf-8")


def load_fixture(name: str) -> NetworkTopology:
    return parse_topology(fixture_text(name))


def random_topology(K: int, rng: random.Random, p: float = 0.3, max_interferers: int | None = None) -> NetworkTopology:
    """Each receiver hears each foreign transmitter independently with probability ``p``."""
    interferers = {}
    for k in range(1, K + 1):
        others = [i for i in range(1, K + 1) if i != k and rng.random() < p]
        if max_interferers is not None and len(others) > max_interferers:
            others = rng.sample(others, max_interferers)
        interferers[k] = others
    return NetworkTopology.from_interferers(K, interferers)
