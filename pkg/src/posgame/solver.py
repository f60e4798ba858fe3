"""Exhaustive solvers for tiny boards.

Edges of K_n are numbered 0..C(n,2)-1 and positions are pairs of bitmasks
(Maker's edges, Breaker's edges).  ``WeakSolver`` answers "can Maker force a
winning set within t more moves?" by memoised search with iterative
deepening; ``StrongSolver`` plays the strong game out with negamax.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from typing import Callable, Optional

from .errors import BoardTooLarge
from .graphs import SimpleGraph, exhaustive_connectivity

MAX_FULL_N = 5
CHORD_MAX_N = 6


def edge_list(n: int) -> list[tuple[int, int]]:
    return list(combinations(range(n), 2))


def _adj(n: int, edges, mask: int) -> list[int]:
    adj = [0] * n
    i = 0
    while mask:
        if mask & 1:
            u, v = edges[i]
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        mask >>= 1
        i += 1
    return adj


def connected_predicate(n: int) -> Callable[[int], bool]:
    edges = edge_list(n)
    full = (1 << n) - 1

    def win(mask: int) -> bool:
        adj = _adj(n, edges, mask)
        seen, frontier = 1, 1
        while frontier:
            nxt = 0
            v = 0
            f = frontier
            while f:
                if f & 1:
                    nxt |= adj[v]
                f >>= 1
                v += 1
            frontier = nxt & ~seen
            seen |= frontier
        return seen == full

    return win


def min_degree_predicate(n: int, k: int) -> Callable[[int], bool]:
    edges = edge_list(n)

    def win(mask: int) -> bool:
        return all(a.bit_count() >= k for a in _adj(n, edges, mask))

    return win


def k_connected_predicate(n: int, k: int) -> Callable[[int], bool]:
    if k == 1:
        return connected_predicate(n)
    edges = edge_list(n)

    def win(mask: int) -> bool:
        adj = _adj(n, edges, mask)
        if min(a.bit_count() for a in adj) < k:
            return False
        g = SimpleGraph(n)
        g.adj = adj
        return exhaustive_connectivity(g).connectivity >= k

    return win


def chord_predicate(n: int) -> Callable[[int], bool]:
    """Contains a Hamilton cycle plus a chord: any extra edge of a Hamiltonian graph is a chord."""
    edges = edge_list(n)

    def win(mask: int) -> bool:
        if mask.bit_count() < n + 1:
            return False
        adj = _adj(n, edges, mask)
        for rest in permutations(range(1, n)):
            if rest[0] > rest[-1]:
                continue
            cyc = (0,) + rest
            if all(adj[cyc[i]] >> cyc[(i + 1) % n] & 1 for i in range(n)):
                return True
        return False

    return win


class WeakSolver:
    """Maker-Breaker game on the edges of K_n with a monotone winning predicate."""

    def __init__(self, n: int, win: Callable[[int], bool], cap: int = MAX_FULL_N + 1):
        if n > cap:
            raise BoardTooLarge(f"exhaustive search is limited to n <= {cap}")
        self.n = n
        self.edges = edge_list(n)
        self.full = (1 << len(self.edges)) - 1
        self._win_raw = win
        self._win: dict[int, bool] = {}
        self._memo: dict[tuple[int, int, int], bool] = {}

    def win(self, mask: int) -> bool:
        r = self._win.get(mask)
        if r is None:
            r = self._win[mask] = self._win_raw(mask)
        return r

    def _free(self, mk: int, bk: int) -> list[int]:
        free = self.full & ~(mk | bk)
        return [1 << i for i in range(len(self.edges)) if free >> i & 1]

    def maker_can_win(self, mk: int, bk: int, t: int) -> bool:
        """Maker to move: can he complete a winning set within t of his moves?"""
        if t <= 0:
            return False
        key = (mk, bk, t)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        free = self._free(mk, bk)
        result = False
        if self.win(mk | (self.full & ~bk)):
            for e in free:
                if self.win(mk | e):
                    result = True
                    break
            if not result and t > 1:
                for e in free:
                    mk2 = mk | e
                    rest = [f for f in free if f != e]
                    if not rest:
                        continue
                    if not self.win(mk2 | (self.full & ~bk)):
                        continue
                    if all(self.maker_can_win(mk2, bk | f, t - 1) for f in rest):
                        result = True
                        break
        self._memo[key] = result
        return result

    def maker_value(self, mk: int = 0, bk: int = 0) -> Optional[int]:
        """Fewest Maker moves that force a win with Maker to move, or None."""
        free = (self.full & ~(mk | bk)).bit_count()
        for t in range(1, (free + 1) // 2 + 1):
            if self.maker_can_win(mk, bk, t):
                return t
        return None

    def breaker_first_value(self, mk: int = 0, bk: int = 0) -> Optional[int]:
        """Same, but Breaker moves first; the worst case over his replies."""
        free = self._free(mk, bk)
        if not free:
            return None
        for t in range(1, len(free) // 2 + 1):
            if all(self.maker_can_win(mk, bk | f, t) for f in free):
                return t
        return None

    def best_move(self, mk: int, bk: int) -> Optional[int]:
        """Index of a Maker edge that realises ``maker_value``; lowest index on ties."""
        value = self.maker_value(mk, bk)
        free = self._free(mk, bk)
        if not free:
            return None
        if value is None:
            return free[0].bit_length() - 1
        for e in free:
            mk2 = mk | e
            if self.win(mk2):
                return e.bit_length() - 1
            rest = [f for f in free if f != e]
            if rest and all(self.maker_can_win(mk2, bk | f, value - 1) for f in rest):
                return e.bit_length() - 1
        return free[0].bit_length() - 1

    def best_breaker_move(self, mk: int, bk: int) -> Optional[int]:
        """Breaker edge that delays Maker the longest (a loss for Maker counts as infinity)."""
        free = self._free(mk, bk)
        if not free:
            return None
        best, best_val = None, -1
        for f in free:
            val = self.maker_value(mk, bk | f)
            score = float("inf") if val is None else val
            if score > best_val:
                best, best_val = f, score
        return best.bit_length() - 1


@dataclass
class StrongResult:
    winner: int  # +1 first player, -1 second player, 0 draw
    plies: int


class StrongSolver:
    """Strong game on K_n: the first player to own a winning set wins."""

    def __init__(self, n: int, win: Callable[[int], bool]):
        if n > MAX_FULL_N:
            raise BoardTooLarge(f"strong solve is limited to n <= {MAX_FULL_N}")
        self.n = n
        self.edges = edge_list(n)
        self.full = (1 << len(self.edges)) - 1
        self.win = lru_cache(maxsize=None)(win)
        self._solve = lru_cache(maxsize=None)(self._solve_raw)

    def _solve_raw(self, me: int, other: int) -> tuple[int, int]:
        """Player owning ``me`` is to move.  Returns (outcome for the mover, plies to the end)."""
        free = self.full & ~(me | other)
        if not free:
            return 0, 0
        best = None
        f = free
        while f:
            e = f & -f
            f ^= e
            mine = me | e
            if self.win(mine):
                return 1, 1
            res, plies = self._solve(other, mine)
            cand = (-res, plies + 1)
            if best is None or self._better(cand, best):
                best = cand
        return best

    @staticmethod
    def _better(a: tuple[int, int], b: tuple[int, int]) -> bool:
        if a[0] != b[0]:
            return a[0] > b[0]
        if a[0] > 0:
            return a[1] < b[1]  # win fast
        return a[1] > b[1]  # lose or draw slowly

    def solve(self) -> StrongResult:
        res, plies = self._solve(0, 0)
        return StrongResult(res, plies)

    def best_move(self, me: int, other: int) -> Optional[int]:
        free = self.full & ~(me | other)
        if not free:
            return None
        best, best_key = None, None
        f = free
        while f:
            e = f & -f
            f ^= e
            mine = me | e
            key = (1, 1) if self.win(mine) else (lambda r: (-r[0], r[1] + 1))(self._solve(other, mine))
            if best_key is None or self._better(key, best_key):
                best, best_key = e, key
        return best.bit_length() - 1


def game_predicate(game: str, n: int, k: int = 1) -> Callable[[int], bool]:
    if game == "conn":
        return k_connected_predicate(n, k)
    if game == "mindeg":
        return min_degree_predicate(n, k)
    if game == "chord":
        return chord_predicate(n)
    raise ValueError(f"unknown game {game!r}")


@dataclass
class SolveReport:
    game: str
    n: int
    k: int
    strong: bool
    maker_wins: bool
    optimal_moves: Optional[int]
    detail: str = ""


def solve(game: str, n: int, k: int = 1, strong: bool = False) -> SolveReport:
    """Exhaustive value of a tiny game; weak games have Breaker moving first."""
    # the weak chord game has a smaller winning family, so one more vertex fits
    limit = CHORD_MAX_N if game == "chord" and not strong else MAX_FULL_N
    if n > limit:
        raise BoardTooLarge(f"full solve is limited to n <= {limit}")
    win = game_predicate(game, n, k)
    if strong:
        res = StrongSolver(n, win).solve()
        moves = (res.plies + 1) // 2 if res.winner == 1 else None
        detail = {1: "first player wins", 0: "draw", -1: "second player wins"}[res.winner]
        return SolveReport(game, n, k, True, res.winner == 1, moves, detail)
    solver = chord_game(n) if game == "chord" else WeakSolver(n, win)
    value = solver.breaker_first_value()
    return SolveReport(game, n, k, False, value is not None, value, "Breaker moves first")


class ChordGame(WeakSolver):
    """The cycle-plus-chord subgame on K_m with Maker to move."""

    def value(self, mk: int, bk: int, maker_to_move: bool = True) -> Optional[int]:
        if maker_to_move:
            return self.maker_value(mk, bk)
        return self.breaker_first_value(mk, bk)


_CHORD_GAMES: dict[int, ChordGame] = {}


def chord_game(m: int) -> ChordGame:
    if m > CHORD_MAX_N:
        raise BoardTooLarge(f"chord subgame search is limited to {CHORD_MAX_N} vertices")
    if m not in _CHORD_GAMES:
        _CHORD_GAMES[m] = ChordGame(m, chord_predicate(m), cap=CHORD_MAX_N)
    return _CHORD_GAMES[m]
