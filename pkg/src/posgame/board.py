"""Edge-ownership board on the complete graph K_n.

Every unordered pair {u, v} of vertices is an edge of the board and is
either free or owned by one of the two players.  Adjacency is cached as
one Python int bitset per (player, vertex), so degree and degree-into-set
queries are a single ``int.bit_count`` call.  The board knows nothing about
winning; referees and strategies layer game semantics on top.
"""

from __future__ import annotations

from enum import IntEnum
from typing import Iterable, Iterator, Union

Edge = tuple[int, int]
VertexSet = Union[int, Iterable[int]]


class Owner(IntEnum):
    FREE = 0
    ONE = 1
    TWO = 2

    @property
    def other(self) -> "Owner":
        if self is Owner.FREE:
            raise ValueError("FREE has no opponent")
        return Owner.TWO if self is Owner.ONE else Owner.ONE


class BoardError(Exception):
    pass


class EdgeAlreadyClaimed(BoardError):
    def __init__(self, e: Edge, owner: Owner):
        super().__init__(f"edge {e} already owned by {owner.name}")
        self.edge = e
        self.owner = owner


class VertexOutOfRange(BoardError):
    pass


class OverlappingSets(BoardError):
    pass


def edge(u: int, v: int) -> Edge:
    """Canonical (smaller, larger) form of the pair {u, v}."""
    if u == v:
        raise ValueError(f"self-loop at vertex {u}")
    return (u, v) if u < v else (v, u)


def mask_of(vertices: VertexSet) -> int:
    if isinstance(vertices, int):
        return vertices
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


class Board:
    """Ownership map of E(K_n) with per-player degree tables."""

    __slots__ = ("n", "full", "_own", "_adj", "_deg", "_count")

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("board needs at least one vertex")
        self.n = n
        self.full = (1 << n) - 1
        self._own = bytearray(n * n)
        self._adj = ([0] * n, [0] * n, [0] * n)
        self._deg = ([0] * n, [0] * n, [0] * n)
        self._count = [0, 0, 0]

    def _check(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise VertexOutOfRange(f"vertex {v} not in [0, {self.n})")

    # -- mutation -----------------------------------------------------------

    def claim(self, player: Owner, u: int, v: int) -> Edge:
        self._check(u)
        self._check(v)
        e = edge(u, v)
        player = Owner(player)
        if player is Owner.FREE:
            raise ValueError("cannot claim for FREE")
        cur = self._own[u * self.n + v]
        if cur:
            raise EdgeAlreadyClaimed(e, Owner(cur))
        self._own[u * self.n + v] = player
        self._own[v * self.n + u] = player
        adj = self._adj[player]
        adj[u] |= 1 << v
        adj[v] |= 1 << u
        deg = self._deg[player]
        deg[u] += 1
        deg[v] += 1
        self._count[player] += 1
        return e

    def copy(self) -> "Board":
        b = Board.__new__(Board)
        b.n = self.n
        b.full = self.full
        b._own = bytearray(self._own)
        b._adj = tuple(list(a) for a in self._adj)
        b._deg = tuple(list(d) for d in self._deg)
        b._count = list(self._count)
        return b

    # -- queries ------------------------------------------------------------

    def owner(self, u: int, v: int) -> Owner:
        self._check(u)
        self._check(v)
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        return Owner(self._own[u * self.n + v])

    def is_free(self, u: int, v: int) -> bool:
        return u != v and self._own[u * self.n + v] == 0

    def degree(self, player: Owner, v: int) -> int:
        return self._deg[player][v]

    def degrees(self, player: Owner) -> list[int]:
        return list(self._deg[player])

    def nbr(self, player: Owner, v: int) -> int:
        """Bitset of v's neighbours in ``player``'s graph."""
        return self._adj[player][v]

    def degree_into(self, player: Owner, v: int, S: VertexSet) -> int:
        return (self._adj[player][v] & mask_of(S) & ~(1 << v)).bit_count()

    def free_nbr(self, v: int) -> int:
        """Bitset of vertices w with {v, w} free."""
        return self.full & ~(1 << v) & ~(self._adj[1][v] | self._adj[2][v])

    def free_edges_between(self, S: VertexSet, T: VertexSet) -> list[Edge]:
        s, t = mask_of(S), mask_of(T)
        if s & t:
            raise OverlappingSets("S and T share vertices")
        out = []
        for u in bits(s):
            for w in bits(self.free_nbr(u) & t):
                out.append(edge(u, w))
        out.sort()
        return out

    def edges(self, player: Owner) -> list[Edge]:
        adj = self._adj[player]
        return [(u, w) for u in range(self.n) for w in bits(adj[u] >> (u + 1) << (u + 1))]

    def claimed(self, player: Owner | None = None) -> int:
        if player is None:
            return self._count[1] + self._count[2]
        return self._count[player]

    def free_count(self) -> int:
        return self.n * (self.n - 1) // 2 - self.claimed()

    def min_degree(self, player: Owner) -> int:
        return min(self._deg[player])

    def max_degree(self, player: Owner) -> int:
        return max(self._deg[player])

    def audit(self) -> list[str]:
        """Recount everything from the ownership map; return inconsistencies."""
        problems = []
        n = self.n
        own = bytes(self._own)
        count = [0, 0, 0]
        for p in (Owner.ONE, Owner.TWO):
            # byte p -> '1', anything else -> '0'; reversed so bit w is vertex w
            table = bytes(ord("1") if b == p else ord("0") for b in range(256))
            for v in range(n):
                line = own[v * n:(v + 1) * n].translate(table)
                row = int(line[::-1], 2) & ~(1 << v)
                if row != self._adj[p][v]:
                    problems.append(f"adjacency of {v} for {p.name} out of sync")
                if row.bit_count() != self._deg[p][v]:
                    problems.append(
                        f"degree of {v} for {p.name}: table {self._deg[p][v]}, recount {row.bit_count()}"
                    )
                count[p] += row.bit_count()
        for v in range(n):
            if own[v * n:(v + 1) * n] != own[v::n]:
                problems.append(f"asymmetric ownership in row {v}")
        for p in (Owner.ONE, Owner.TWO):
            if count[p] != 2 * self._count[p]:
                problems.append(f"{p.name}: degree sum {count[p]} vs 2*{self._count[p]} edges")
        return problems
