"""The certified family G_k of k-connected graphs.

A graph belongs to G_k when its vertex set splits into k-1 parts such that

  (i)   every part has at least 5 vertices,
  (ii)  the minimum degree is at least k,
  (iii) each part spans a Hamilton cycle C_i,
  (iv)  every two parts are joined by a matching of size 3,
  (v)   every vertex has no neighbour in at most one foreign part,
  (vi)  two vertices of the same part that both miss some foreign part lie
        at distance at least 2 along that part's cycle.

Any such graph is k-vertex-connected.  The checker here needs the cycles as
witnesses; strategies always know the cycles they built.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .board import mask_of
from .graphs import SimpleGraph, bipartite_matching, cycle_distance, is_cycle_of

PROPERTIES = ("i", "ii", "iii", "iv", "v", "vi")
MIN_PART = 5


class InvalidPartition(ValueError):
    pass


class MissingCycleWitness(ValueError):
    pass


class IndivisibleN(ValueError):
    pass


class PartTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class Partition:
    parts: tuple[tuple[int, ...], ...]

    @classmethod
    def round_robin(cls, n: int, count: int) -> "Partition":
        """Equipartition assigning vertex v to part v mod count."""
        return cls(tuple(tuple(range(i, n, count)) for i in range(count)))

    @classmethod
    def blocks(cls, n: int, count: int) -> "Partition":
        """Contiguous blocks of (nearly) equal size."""
        base, extra = divmod(n, count)
        parts, start = [], 0
        for i in range(count):
            size = base + (1 if i < extra else 0)
            parts.append(tuple(range(start, start + size)))
            start += size
        return cls(tuple(parts))

    def validate(self, n: int) -> None:
        seen: set[int] = set()
        for part in self.parts:
            for v in part:
                if not 0 <= v < n:
                    raise InvalidPartition(f"vertex {v} outside [0, {n})")
                if v in seen:
                    raise InvalidPartition(f"vertex {v} appears in two parts")
                seen.add(v)
        if len(seen) != n:
            missing = sorted(set(range(n)) - seen)
            raise InvalidPartition(f"vertices not covered: {missing[:10]}")

    def index_of(self) -> dict[int, int]:
        return {v: i for i, part in enumerate(self.parts) for v in part}

    def masks(self) -> list[int]:
        return [mask_of(p) for p in self.parts]

    def __len__(self) -> int:
        return len(self.parts)


@dataclass
class PropertyResult:
    passed: bool
    witnesses: list = field(default_factory=list)


@dataclass
class GkCertificate:
    partition: Partition
    cycles: Optional[list[list[int]]]
    results: dict[str, PropertyResult]

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.results.values())

    def failing(self) -> list[str]:
        return [name for name in PROPERTIES if not self.results[name].passed]

    def to_json(self) -> dict:
        return {
            "partition": [list(p) for p in self.partition.parts],
            "cycles": self.cycles,
            "properties": {
                name: {"pass": r.passed, "witnesses": r.witnesses[:20]}
                for name, r in self.results.items()
            },
            "all_pass": self.all_pass,
        }


def missing_parts(g: SimpleGraph, partition: Partition, v: int, masks=None, where=None) -> list[int]:
    """Indices of foreign parts into which v has no neighbour."""
    masks = masks or partition.masks()
    home = where[v] if where is not None else partition.index_of()[v]
    return [j for j, m in enumerate(masks) if j != home and not g.adj[v] & m]


def verify_membership(
    g: SimpleGraph,
    partition: Partition,
    k: int,
    cycles: Optional[Sequence[Sequence[int]]] = None,
) -> GkCertificate:
    """Check all six G_k properties, collecting witnesses for every failure."""
    if k < 3:
        raise ValueError("G_k is defined for k >= 3")
    partition.validate(g.n)
    if len(partition) != k - 1:
        raise InvalidPartition(f"expected {k - 1} parts, got {len(partition)}")
    if cycles is None:
        raise MissingCycleWitness("property (iii) needs one witness cycle per part")
    cycles = [list(c) for c in cycles]
    if len(cycles) != len(partition):
        raise MissingCycleWitness("one cycle per part is required")

    masks = partition.masks()
    where = partition.index_of()
    res: dict[str, PropertyResult] = {}

    small = [i for i, p in enumerate(partition.parts) if len(p) < MIN_PART]
    res["i"] = PropertyResult(not small, small)

    low = [v for v in range(g.n) if g.degree(v) < k]
    res["ii"] = PropertyResult(not low, low)

    bad_cycles = [
        i
        for i, (part, cyc) in enumerate(zip(partition.parts, cycles))
        if sorted(cyc) != sorted(part) or not is_cycle_of(g, cyc)
    ]
    res["iii"] = PropertyResult(not bad_cycles, bad_cycles)

    thin = []
    for i in range(len(partition)):
        for j in range(i + 1, len(partition)):
            m = bipartite_matching(g.adj, partition.parts[i], masks[j], limit=3)
            if len(m) < 3:
                thin.append((i, j))
    res["iv"] = PropertyResult(not thin, thin)

    missing = {v: missing_parts(g, partition, v, masks, where) for v in range(g.n)}
    over = [v for v, miss in missing.items() if len(miss) > 1]
    res["v"] = PropertyResult(not over, over)

    close = []
    for i, cyc in enumerate(cycles):
        if i in bad_cycles:
            continue
        deficient = [v for v in cyc if missing[v]]
        pos = {v: t for t, v in enumerate(cyc)}
        deficient.sort(key=pos.get)
        for a in range(len(deficient)):
            for b in range(a + 1, len(deficient)):
                u, w = deficient[a], deficient[b]
                if cycle_distance(cyc, u, w) < 2:
                    close.append((u, w))
    res["vi"] = PropertyResult(not close, close)
    return GkCertificate(partition, cycles, res)


def generate_sparse_member(n: int, k: int) -> tuple[SimpleGraph, GkCertificate]:
    """k-1 disjoint cycles of length n/(k-1), every two joined by a perfect matching."""
    if k < 3:
        raise ValueError("G_k is defined for k >= 3")
    parts = k - 1
    if n % parts:
        raise IndivisibleN(f"{parts} does not divide n={n}")
    L = n // parts
    if L < MIN_PART:
        raise PartTooSmall(f"parts of size {L} < {MIN_PART}")
    partition = Partition.blocks(n, parts)
    g = SimpleGraph(n)
    cycles = []
    for part in partition.parts:
        for t in range(L):
            g.add_edge(part[t], part[(t + 1) % L])
        cycles.append(list(part))
    for i in range(parts):
        for j in range(i + 1, parts):
            for t in range(L):
                g.add_edge(partition.parts[i][t], partition.parts[j][t])
    expected = L * (parts + parts * (parts - 1) // 2)
    assert g.edge_count() == expected, (g.edge_count(), expected)
    return g, verify_membership(g, partition, k, cycles)


def random_member(
    n: int, k: int, rng: random.Random, extra: int = 0, thin: int = 0
) -> tuple[SimpleGraph, Partition, list[list[int]]]:
    """Random G_k member on a random equipartition.

    Starts from a shuffled skeleton (random cycle per part, random near-perfect
    matchings between parts), adds ``extra`` random edges, then makes ``thin``
    attempts to delete a random cross edge, keeping a deletion only if all six
    properties still hold for the returned cycles.
    """
    parts = k - 1
    verts = list(range(n))
    rng.shuffle(verts)
    groups = [sorted(verts[i::parts]) for i in range(parts)]
    if min(len(p) for p in groups) < MIN_PART:
        raise PartTooSmall("parts too small for a G_k member")
    partition = Partition(tuple(tuple(p) for p in groups))
    g = SimpleGraph(n)
    cycles = []
    for part in groups:
        order = list(part)
        rng.shuffle(order)
        for t in range(len(order)):
            g.add_edge(order[t], order[(t + 1) % len(order)])
        cycles.append(order)
    for i in range(parts):
        for j in range(i + 1, parts):
            a, b = list(groups[i]), list(groups[j])
            rng.shuffle(a)
            rng.shuffle(b)
            if len(a) > len(b):
                a, b = b, a
            for t, u in enumerate(a):
                g.add_edge(u, b[t])
            # the leftover vertex of the larger part still needs a neighbour there
            for u in b[len(a):]:
                g.add_edge(u, rng.choice(a))
    free = [(u, v) for u in range(n) for v in range(u + 1, n) if not g.has_edge(u, v)]
    for u, v in rng.sample(free, min(extra, len(free))):
        g.add_edge(u, v)
    if thin:
        where = partition.index_of()
        cross = [e for e in g.edges if where[e[0]] != where[e[1]]]
        for _ in range(thin):
            if not cross:
                break
            u, v = cross.pop(rng.randrange(len(cross)))
            g.remove_edge(u, v)
            if not verify_membership(g, partition, k, cycles).all_pass:
                g.add_edge(u, v)
    return g, partition, cycles


__all__ = [
    "Partition",
    "PropertyResult",
    "GkCertificate",
    "verify_membership",
    "generate_sparse_member",
    "random_member",
    "missing_parts",
    "InvalidPartition",
    "MissingCycleWitness",
    "IndivisibleN",
    "PartTooSmall",
]
