"""Exact structural checks: vertex connectivity, cycle-plus-chord, distances.

Graphs here are small simple graphs on vertices 0..n-1 stored as adjacency
bitsets.  Vertex connectivity uses Even's scheme: unit-capacity max flow on
the vertex-split digraph between a handful of low-index sources (taken in
ascending-degree order) and all their non-neighbours.  An exhaustive
subset-enumeration routine is kept alongside as an independent oracle for
graphs with at most 16 vertices.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .board import Board, Edge, Owner, bits, edge, mask_of


class GraphTooSmall(ValueError):
    pass


class VertexNotOnCycle(ValueError):
    pass


class SimpleGraph:
    """Undirected simple graph on range(n) with bitset adjacency."""

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        self.n = n
        self.adj = [0] * n
        for u, v in edges:
            self.add_edge(u, v)

    @classmethod
    def from_board(cls, board: Board, player: Owner) -> "SimpleGraph":
        g = cls(board.n)
        g.adj = [board.nbr(player, v) for v in range(board.n)]
        return g

    @classmethod
    def complete(cls, n: int) -> "SimpleGraph":
        g = cls(n)
        full = (1 << n) - 1
        g.adj = [full & ~(1 << v) for v in range(n)]
        return g

    def add_edge(self, u: int, v: int) -> None:
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"edge {(u, v)} out of range for n={self.n}")
        u, v = edge(u, v)
        self.adj[u] |= 1 << v
        self.adj[v] |= 1 << u

    def remove_edge(self, u: int, v: int) -> None:
        self.adj[u] &= ~(1 << v)
        self.adj[v] &= ~(1 << u)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def copy(self) -> "SimpleGraph":
        g = SimpleGraph(self.n)
        g.adj = list(self.adj)
        return g

    @property
    def edges(self) -> list[Edge]:
        return [(u, w) for u in range(self.n) for w in bits(self.adj[u] >> (u + 1) << (u + 1))]

    def edge_count(self) -> int:
        return sum(a.bit_count() for a in self.adj) // 2

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def min_degree(self) -> int:
        return min((a.bit_count() for a in self.adj), default=0)

    def max_degree(self) -> int:
        return max((a.bit_count() for a in self.adj), default=0)

    def induced_edge_count(self, S) -> int:
        s = mask_of(S)
        return sum((self.adj[v] & s).bit_count() for v in bits(s)) // 2

    def __repr__(self) -> str:
        return f"SimpleGraph(n={self.n}, e={self.edge_count()})"


def is_connected(adj: Sequence[int], vertices: int) -> bool:
    """Whether the subgraph induced on the bitset ``vertices`` is connected."""
    if not vertices:
        return True
    seen = vertices & -vertices
    frontier = seen
    while frontier:
        nxt = 0
        for v in bits(frontier):
            nxt |= adj[v]
        nxt &= vertices & ~seen
        seen |= nxt
        frontier = nxt
    return seen == vertices


@dataclass
class CutReport:
    connectivity: int
    witness_cut: frozenset = field(default_factory=frozenset)


class _SplitNetwork:
    """Vertex-split digraph: v_in = 2v, v_out = 2v+1, unit arc v_in -> v_out."""

    def __init__(self, g: SimpleGraph):
        n = g.n
        big = n + 1
        self.to: list[int] = []
        cap: list[int] = []
        self.out: list[list[int]] = [[] for _ in range(2 * n)]

        def add(a: int, b: int, c: int) -> None:
            self.out[a].append(len(self.to))
            self.to.append(b)
            cap.append(c)
            self.out[b].append(len(self.to))
            self.to.append(a)
            cap.append(0)

        for v in range(n):
            add(2 * v, 2 * v + 1, 1)
        for u, v in g.edges:
            add(2 * u + 1, 2 * v, big)
            add(2 * v + 1, 2 * u, big)
        self.base = cap

    def local(self, s: int, t: int, limit: Optional[int] = None) -> tuple[int, set[int]]:
        """Max number of internally disjoint s-t paths (capped at ``limit``).

        Returns the flow value and, when the flow stopped below ``limit``,
        a minimum s-t vertex separator.
        """
        cap = list(self.base)
        to, out = self.to, self.out
        src, snk = 2 * s + 1, 2 * t
        flow = 0
        while limit is None or flow < limit:
            parent = {src: -1}
            dq = deque([src])
            found = False
            while dq and not found:
                a = dq.popleft()
                for arc in out[a]:
                    if cap[arc] > 0:
                        b = to[arc]
                        if b not in parent:
                            parent[b] = arc
                            if b == snk:
                                found = True
                                break
                            dq.append(b)
            if not found:
                cut = {a >> 1 for a in parent if not a & 1 and (a | 1) not in parent}
                return flow, cut
            b = snk
            while b != src:
                arc = parent[b]
                cap[arc] -= 1
                cap[arc ^ 1] += 1
                b = to[arc ^ 1]
            flow += 1
        return flow, set()


def _degree_order(g: SimpleGraph) -> list[int]:
    return sorted(range(g.n), key=lambda v: (g.degree(v), v))


def vertex_connectivity(g: SimpleGraph) -> CutReport:
    """Exact vertex connectivity with a minimum separating set."""
    n = g.n
    if n < 2:
        raise GraphTooSmall("connectivity needs at least two vertices")
    full = (1 << n) - 1
    if not is_connected(g.adj, full):
        return CutReport(0, frozenset())
    net = _SplitNetwork(g)
    order = _degree_order(g)
    best, witness = n - 1, frozenset()
    i = 0
    while i <= best and i < n:
        s = order[i]
        for t in order[i + 1:]:
            if g.adj[s] >> t & 1:
                continue
            val, cut = net.local(s, t, best)
            if val < best:
                best, witness = val, frozenset(cut)
        i += 1
    assert best <= g.min_degree(), "Whitney inequality violated"
    return CutReport(best, witness)


def is_k_connected(g: SimpleGraph, k: int) -> bool:
    """Predicate form of the connectivity check; stops at k disjoint paths."""
    if k <= 0:
        return True
    if g.n < k + 1 or g.min_degree() < k:
        return False
    if not is_connected(g.adj, (1 << g.n) - 1):
        return False
    if k == 1:
        return True
    net = _SplitNetwork(g)
    order = _degree_order(g)
    for i in range(k):
        s = order[i]
        for t in order[i + 1:]:
            if g.adj[s] >> t & 1:
                continue
            val, _ = net.local(s, t, k)
            if val < k:
                return False
    return True


def exhaustive_connectivity(g: SimpleGraph) -> CutReport:
    """Brute-force connectivity by enumerating vertex subsets (n <= 16)."""
    n = g.n
    if n < 2:
        raise GraphTooSmall("connectivity needs at least two vertices")
    if n > 16:
        raise ValueError("exhaustive enumeration is capped at 16 vertices")
    full = (1 << n) - 1
    for size in range(0, n - 1):
        for S in combinations(range(n), size):
            rest = full & ~mask_of(S)
            if not is_connected(g.adj, rest):
                return CutReport(size, frozenset(S))
    return CutReport(n - 1, frozenset())


def is_hamilton_cycle_with_chord(g: SimpleGraph, S) -> tuple[bool, Optional[Edge]]:
    """Is g[S] a spanning cycle of S plus exactly one chord?  Returns the chord."""
    s = mask_of(S)
    size = s.bit_count()
    if size < 4 or g.induced_edge_count(s) != size + 1:
        return False, None
    deg = {v: (g.adj[v] & s).bit_count() for v in bits(s)}
    heavy = [v for v, d in deg.items() if d == 3]
    if len(heavy) != 2 or any(d not in (2, 3) for d in deg.values()):
        return False, None
    a, b = heavy
    if not g.adj[a] >> b & 1:
        return False, None
    sub = [a & s for a in g.adj]
    sub[a] &= ~(1 << b)
    sub[b] &= ~(1 << a)
    if not is_connected(sub, s):
        return False, None
    return True, edge(a, b)


def cycle_distance(cycle: Sequence[int], u: int, v: int) -> int:
    pos = {w: i for i, w in enumerate(cycle)}
    if u not in pos or v not in pos:
        missing = u if u not in pos else v
        raise VertexNotOnCycle(f"vertex {missing} is not on the cycle")
    d = abs(pos[u] - pos[v])
    return min(d, len(cycle) - d)


def is_cycle_of(g: SimpleGraph, cycle: Sequence[int]) -> bool:
    """Whether consecutive entries (cyclically) of ``cycle`` are all edges of g."""
    if len(cycle) < 3 or len(set(cycle)) != len(cycle):
        return False
    return all(g.has_edge(cycle[i - 1], cycle[i]) for i in range(len(cycle)))


def bipartite_matching(
    adj: Sequence[int], left: Iterable[int], right: int, limit: Optional[int] = None
) -> list[Edge]:
    """Maximum matching between ``left`` and the bitset ``right`` (augmenting paths).

    Stops early once ``limit`` edges are matched.
    """
    match_r: dict[int, int] = {}

    def augment(u: int, seen: set[int]) -> bool:
        for w in bits(adj[u] & right):
            if w in seen:
                continue
            seen.add(w)
            if w not in match_r or augment(match_r[w], seen):
                match_r[w] = u
                return True
        return False

    size = 0
    for u in left:
        if limit is not None and size >= limit:
            break
        if augment(u, set()):
            size += 1
    return sorted(edge(u, w) for w, u in match_r.items())
