"""Positive minimum-degree games on a dense board graph G.

``WeakMinDeg`` is Maker's strategy for the Maker-Breaker game on E(G) where
delta(G) >= n - m: Maker builds a matching on the still-isolated vertices V0,
always covering a vertex of maximum degree in H = (B + non-edges of G)[V0].
For m >= 3 it first drives Delta(H) down to m - 2 and then continues as if
the deficiency were m - 1.  It wins within floor(n/2) + 1 moves.

``StrongMinDeg`` is Red's five-stage strategy for the strong version with Red
moving first; for odd n it is the weak strategy move for move.

Both strategies can run on a sub-board: a vertex set W, an allowed-edge
adjacency (the board graph G) and a degree target, so that "isolated" means
"Maker degree below target".  The k-connectivity strategies use this to
finish vertices of degree k - 1.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

from .board import Board, Edge, Owner, bits, edge, lowest, mask_of
from .errors import Forfeit


def _argmax(values: dict[int, int]) -> int:
    best = max(values.values())
    return min(v for v, d in values.items() if d == best)


class WeakMinDeg:
    """Maker's matching strategy for the weak positive minimum-degree game."""

    def __init__(
        self,
        n: int,
        vertices: Optional[Iterable[int]] = None,
        allowed: Optional[Sequence[int]] = None,
        target: int = 1,
        me: Owner = Owner.ONE,
        instrument: bool = False,
    ):
        self.n = n
        self.me = Owner(me)
        self.opp = self.me.other
        self.W = mask_of(vertices) if vertices is not None else (1 << n) - 1
        if allowed is None:
            self.G = [self.W & ~(1 << v) for v in range(n)]
        else:
            self.G = [allowed[v] & self.W & ~(1 << v) for v in range(n)]
        self.target = target
        size = self.W.bit_count()
        delta = min((self.G[v].bit_count() for v in bits(self.W)), default=0)
        self.m0 = max(1, size - delta)
        self.m = self.m0
        self.stage = self._stage_name()
        self.moves = 0
        self.instrument = instrument
        self.star_violations: list[str] = []
        self.potentials: list[int] = []

    def _stage_name(self) -> str:
        if self.m0 <= 2:
            return "match"
        return "I" if self.m == self.m0 else f"II(m={self.m})"

    # -- derived quantities ---------------------------------------------------

    def v0(self, board: Board) -> int:
        adj = board._deg[self.me]
        t = self.target
        return mask_of(v for v in bits(self.W) if adj[v] < t)

    def h_nbrs(self, board: Board, v: int, V0: int) -> int:
        """Neighbours of v in H: pairs inside V0 that are not free edges of G."""
        usable = self.G[v] & ~board.nbr(self.opp, v) & ~board.nbr(self.me, v)
        return V0 & ~(1 << v) & ~usable

    def h_degrees(self, board: Board, V0: int) -> dict[int, int]:
        return {v: self.h_nbrs(board, v, V0).bit_count() for v in bits(V0)}

    def potential(self, board: Board) -> int:
        V0 = self.v0(board)
        return sum(self.h_degrees(board, V0).values())

    def free_in_g(self, board: Board, v: int) -> int:
        return self.G[v] & board.free_nbr(v)

    def done(self, board: Board) -> bool:
        return not self.v0(board)

    # -- instrumentation --------------------------------------------------------

    def _check_star(self, board: Board, V0: int, hdeg: dict[int, int]) -> None:
        """Property (*): Delta(H) <= m, at most two vertices attain m, joined by B."""
        m = self.m
        if not hdeg:
            return
        top = [v for v, d in hdeg.items() if d >= m]
        if max(hdeg.values()) > m:
            self.star_violations.append(f"Delta(H)={max(hdeg.values())} > m={m}")
        elif len(top) > 2:
            self.star_violations.append(f"{len(top)} vertices with d_H = m")
        elif len(top) == 2 and not board.nbr(self.opp, top[0]) >> top[1] & 1:
            self.star_violations.append(f"d_H = m at {top} without a Breaker edge")

    # -- the move -----------------------------------------------------------------

    def move(self, board: Board, last: Optional[Edge] = None) -> Edge:
        V0 = self.v0(board)
        if not V0:
            raise Forfeit("no isolated vertex left", self.stage)
        hdeg = self.h_degrees(board, V0)
        if self.instrument:
            self.potentials.append(sum(hdeg.values()))
            if self.m >= 3 and last is not None:
                self._check_star(board, V0, hdeg)
        delta = max(hdeg.values())
        while self.m >= 3 and delta <= self.m - 2:
            self.m -= 1
        self.stage = self._stage_name()
        self.moves += 1
        size = V0.bit_count()
        if size <= 2 and self.m <= 2:
            return self._finish(board, V0)
        u = _argmax(hdeg)
        cand = self.free_in_g(board, u) & V0
        if not cand:
            raise Forfeit(f"vertex {u} of maximum H-degree has no free edge inside V0", self.stage)
        v = _argmax({w: hdeg[w] for w in bits(cand)})
        return edge(u, v)

    def _finish(self, board: Board, V0: int) -> Edge:
        verts = list(bits(V0))
        if len(verts) == 2:
            x, z = verts
            if self.free_in_g(board, x) >> z & 1:
                return edge(x, z)
        for x in verts:
            cand = self.free_in_g(board, x)
            if cand:
                return edge(x, lowest(cand))
        raise Forfeit("an uncovered vertex has no free edge left", self.stage)


class StrongMinDeg:
    """Red's strategy for the strong positive minimum-degree game (Red first)."""

    def __init__(
        self,
        n: int,
        vertices: Optional[Iterable[int]] = None,
        allowed: Optional[Sequence[int]] = None,
        target: int = 1,
        me: Owner = Owner.ONE,
        board: Optional[Board] = None,
    ):
        self.n = n
        self.me = Owner(me)
        self.opp = self.me.other
        self.W = mask_of(vertices) if vertices is not None else (1 << n) - 1
        if allowed is None:
            self.G = [self.W & ~(1 << v) for v in range(n)]
        else:
            self.G = [allowed[v] & self.W & ~(1 << v) for v in range(n)]
        self.target = target
        self.size = self.W.bit_count()
        # Blue's graph for the escape tests counts only edges claimed from now on
        self.blue0 = [board.nbr(self.opp, v) for v in range(n)] if board else [0] * n
        self.moves = 0
        self.x: Optional[int] = None
        self.y: Optional[int] = None
        self.e1: Optional[Edge] = None
        self.A = 0
        self.r = 0
        self.sub: Optional[WeakMinDeg] = None
        self.escaped_at: Optional[int] = None
        if self.size % 2:
            self.stage = "odd"
            self.sub = WeakMinDeg(n, bits(self.W), self.G, target, me)
        else:
            self.stage = "I"
        self.window_ii = (3 * self.size) // 8
        self.window_iii = self.size // 2 - 1

    def v0(self, board: Board) -> int:
        adj = board._deg[self.me]
        return mask_of(v for v in bits(self.W) if adj[v] < self.target)

    def blue_max_degree(self, board: Board) -> int:
        return max(
            ((board.nbr(self.opp, v) & ~self.blue0[v] & self.W).bit_count() for v in bits(self.W)),
            default=0,
        )

    def done(self, board: Board) -> bool:
        return not self.v0(board)

    def _free(self, board: Board, v: int) -> int:
        return self.G[v] & board.free_nbr(v)

    def _restart(self, board: Board, verts: int) -> WeakMinDeg:
        allowed = [self.G[v] & ~board.nbr(self.opp, v) for v in range(self.n)]
        return WeakMinDeg(self.n, bits(verts), allowed, self.target, self.me)

    def move(self, board: Board, last: Optional[Edge] = None) -> Edge:
        self.moves += 1
        i = self.moves
        if self.stage == "odd":
            return self.sub.move(board, last)
        V0 = self.v0(board)
        if not V0:
            raise Forfeit("no isolated vertex left", self.stage)

        if self.stage == "I" and i == 1:
            for u in bits(V0):
                cand = self._free(board, u) & V0
                if cand:
                    self.e1 = edge(u, lowest(cand))
                    self.r = 1
                    return self.e1
            raise Forfeit("no free edge for the opening move", "I")

        if self.stage == "I":
            if self.x is None:
                self._fix_x(board, last, V0)
            if self.blue_max_degree(board) >= 2:
                self._enter_v(board, V0)
            else:
                todo = self.A & V0 & ~(1 << self.x)
                if todo:
                    w = lowest(todo)
                    cand = self._free(board, w) & V0 & ~(1 << self.x)
                    if not cand:
                        raise Forfeit(f"cannot cover {w} in the clean-up", "I")
                    self.r = i
                    pref = cand & self.A
                    return edge(w, lowest(pref or cand))
                self.r = i - 1
                self.stage = "II"
                self.sub = self._restart(board, V0 & ~(1 << self.x))

        if self.stage == "II":
            if i > self.window_ii:
                self.stage = "III"
                self.sub = self._restart(board, V0 & ~(1 << self.x))
            elif self.blue_max_degree(board) >= 2:
                self._enter_v(board, V0)
            else:
                return self._sub_move(board, last)

        if self.stage == "III":
            if i > self.window_iii:
                self.stage = "IV"
            else:
                return self._sub_move(board, last)

        if self.stage == "IV":
            verts = list(bits(V0))
            if len(verts) == 2:
                a, b = verts
                if self._free(board, a) >> b & 1:
                    return edge(a, b)
            order = sorted(verts, key=lambda v: (v != self.x, v))
            for a in order:
                cand = self._free(board, a)
                if cand:
                    return edge(a, lowest(cand))
            raise Forfeit("no finishing edge available", "IV")

        if self.stage == "V":
            return self.sub.move(board, last)
        raise Forfeit(f"unknown stage {self.stage}")

    def _sub_move(self, board: Board, last: Optional[Edge]) -> Edge:
        if self.sub.done(board):
            raise Forfeit("sub-board finished before the endgame", self.stage)
        return self.sub.move(board, last)

    def _fix_x(self, board: Board, last: Optional[Edge], V0: int) -> None:
        e1 = set(self.e1)
        ends = [v for v in (last or ()) if self.W >> v & 1]
        outside = [v for v in ends if v not in e1]
        if outside:
            self.x = min(outside)
            others = [v for v in last if v != self.x]
            self.y = others[0]
        else:
            self.x = lowest(V0 & ~mask_of(e1))
            self.y = None
        non_edges = V0 & ~self.G[self.x] & ~(1 << self.x)
        self.A = non_edges | (1 << self.y if self.y is not None and self.W >> self.y & 1 else 0)

    def _enter_v(self, board: Board, V0: int) -> None:
        self.stage = "V"
        self.escaped_at = self.moves
        self.sub = self._restart(board, V0)
