"""Red's strategy for the strong k-vertex-connectivity game (Red moves first).

For odd kn Red plays the weak Maker strategy unchanged: it finishes within
floor(kn/2) + 1 moves, and no graph with minimum degree k has that few
edges, so Blue cannot have won earlier.

For even kn Red plays the weak Stages I-III, then snapshots
U0 = {v : d_R(v) = k - 1} and picks one of three endgames:

  case 1  Delta(B) > k: finish with the weak Stage IV;
  case 2  every vertex of U0 has d_B <= k - 1: strong min-degree game on U0;
  case 3  otherwise fix x in U0 with d_B(x) = k and play the strong
          min-degree game on U0 - x in timed substages, ending with xz.

Window boundaries kn/2 - |U0|/3 and kn/2 - 1 are rounded down.
"""

from __future__ import annotations

from typing import Optional

from .board import Board, Edge, Owner, bits, edge, lowest, mask_of
from .errors import Forfeit
from .kconn import GameConstants, KConnMaker
from .mindeg import StrongMinDeg


class KConnStrongRed(KConnMaker):
    """Red's strategy; same calling convention as ``KConnMaker``."""

    name = "kconn-strong"

    def __init__(self, n: int, k: int, constants: Optional[GameConstants] = None, me: Owner = Owner.ONE):
        super().__init__(n, k, constants, me)
        self.parity = (k * n) % 2
        self.case: Optional[str] = None  # "1", "2" or "3"
        self.substage: Optional[str] = None  # "i" .. "iv" in case 3
        self.x: Optional[int] = None
        self.z: Optional[int] = None
        self.r = 0
        self.window_i = 0
        self.window_ii = 0
        self.endgame: Optional[StrongMinDeg] = None
        self.escape_checks: dict[str, int] = {"i": 0, "ii": 0}
        self.pending: list[int] = []  # substage (iii): vertices still to cover one at a time

    @property
    def phase(self) -> str:
        if self.parity or self.case is None:
            return f"weak:{self.stage}"
        if self.case == "3":
            return f"case3({self.substage})"
        return f"case{self.case}"

    # -- Stage II entry ------------------------------------------------------------

    def blue_max_degree(self, board: Board) -> int:
        return max(board.degree(self.opp, v) for v in range(self.n))

    def _enter_stage4(self, board: Board) -> Edge:
        if self.parity:
            return super()._enter_stage4(board)
        U0 = self.U0
        half = self.k * self.n // 2
        if self.blue_max_degree(board) > self.k:
            self.case = "1"
            self.log.append(f"endgame case 1: Delta(B) = {self.blue_max_degree(board)}")
        elif all(board.degree(self.opp, v) <= self.k - 1 for v in bits(U0)):
            self.case = "2"
            self.endgame = self._min_degree_game(board, U0)
        else:
            self.case = "3"
            self.x = min(v for v in bits(U0) if board.degree(self.opp, v) == self.k)
            self.r = self.moves - 1  # moves before the one being chosen now
            self.window_i = (3 * half - U0.bit_count()) // 3
            self.window_ii = half - 1
            self.substage = "i"
            self.endgame = self._min_degree_game(board, U0 & ~(1 << self.x))
            self.log.append(
                f"endgame case 3: x={self.x}, r={self.r}, |U0|={U0.bit_count()}, "
                f"windows (i) <= {self.window_i}, (ii) <= {self.window_ii}"
            )
        return self._stage4(board, None)

    def _min_degree_game(self, board: Board, verts: int) -> StrongMinDeg:
        allowed = [0] * self.n
        for v in bits(verts):
            allowed[v] = board.free_nbr(v) & verts
        return StrongMinDeg(self.n, bits(verts), allowed, target=self.k, me=self.me, board=board)

    # -- endgame -------------------------------------------------------------------

    def _stage4(self, board: Board, last: Optional[Edge]) -> Edge:
        if self.parity or self.case == "1":
            return super()._stage4(board, last)
        self.annotation = self.phase
        if self.case == "2":
            return self._endgame_move(board, last)
        return self._case3(board, last)

    def _endgame_move(self, board: Board, last: Optional[Edge]) -> Edge:
        g = self.endgame
        if not g.done(board):
            try:
                return g.move(board, last)
            except Forfeit as f:
                self.log.append(f"move {self.moves}: min-degree endgame stuck ({f})")
        e = self._rescue(board)
        if e is None:
            raise Forfeit("no free edge at a vertex of degree k - 1", self.phase)
        self.rescues += 1
        self.log.append(f"move {self.moves}: rescue edge {e}")
        return e

    def _deficient(self, board: Board) -> int:
        return mask_of(v for v in range(self.n) if board.degree(self.me, v) < self.k)

    def _rescue(self, board: Board) -> Optional[Edge]:
        low = self._deficient(board)
        stuck = sorted(bits(low), key=lambda v: ((board.free_nbr(v) & low).bit_count(), v))
        for u in stuck:
            free = board.free_nbr(u) & ~(1 << u)
            if free:
                w = min(bits(free), key=lambda x: (not low >> x & 1, board.degree(self.me, x), x))
                return edge(u, w)
        return None

    def _case3(self, board: Board, last: Optional[Edge]) -> Edge:
        i = self.moves
        if self.substage == "i":
            if i > self.window_i:
                self.substage = "ii"
            else:
                self.escape_checks["i"] += 1
                if self.blue_max_degree(board) > self.k:
                    self._enter_iv(board)
                    return self._endgame_move(board, last)
        if self.substage == "ii":
            if i > self.window_ii or self.endgame.done(board):
                self.substage = "iii"
            else:
                self.annotation = self.phase
                return self._endgame_move(board, last)
        if self.substage == "iii":
            self.annotation = self.phase
            return self._substage_iii(board)
        self.annotation = self.phase
        return self._endgame_move(board, last)

    def _enter_iv(self, board: Board) -> None:
        self.substage = "iv"
        self.annotation = self.phase
        U = self._deficient(board)
        self.endgame = self._min_degree_game(board, U)
        self.log.append(f"move {self.moves}: Delta(B) > k, substage (iv) on |U| = {U.bit_count()}")

    def _substage_iii(self, board: Board) -> Edge:
        x = self.x
        low = self._deficient(board)
        if self.z is None:
            rest = low & ~(1 << x)
            if rest.bit_count() != 1 or not low >> x & 1:
                self.log.append(
                    f"move {self.moves}: substage (iii) entered with deficient set {list(bits(low))}"
                )
            self.z = lowest(rest) if rest else None
            if self.z is not None and board.is_free(x, self.z) and low >> x & 1:
                return edge(x, self.z)
            self.pending = [v for v in (x, self.z) if v is not None and low >> v & 1]
            self.pending += [v for v in bits(rest) if v != self.z]
        while self.pending:
            v = self.pending.pop(0)
            if board.degree(self.me, v) >= self.k:
                continue
            free = board.free_nbr(v) & ~(1 << v)
            if not free:
                raise Forfeit(f"vertex {v} has no free edge left", self.phase)
            w = min(bits(free), key=lambda y: (not low >> y & 1, board.degree(self.me, y), y))
            return edge(v, w)
        e = self._rescue(board)
        if e is None:
            raise Forfeit("no free edge at a vertex of degree k - 1", self.phase)
        return e
