"""Breaker / Blue strategies used to exercise the Maker and Red strategies.

Every adversary is deterministic given its seed and the board history.  They
see the game through a ``GameContext``: which vertices matter, which edges
are worth claiming, the partition (if the opponent is building one) and the
danger thresholds the opponent reacts to.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .board import Board, Edge, Owner, bits, edge, lowest
from .errors import BoardTooLarge, ScriptExhausted


@dataclass
class GameContext:
    n: int
    me: Owner = Owner.TWO
    k: int = 1
    vertices: Optional[int] = None
    allowed: Optional[Sequence[int]] = None
    parts: Optional[list[int]] = None
    danger_fraction: float = 0.6
    threshold: Optional[int] = None
    focus: Optional[int] = None
    side: Optional[Callable[[int], int]] = None
    game: str = "conn"
    strong: bool = False

    def __post_init__(self):
        self.me = Owner(self.me)
        if self.vertices is None:
            self.vertices = (1 << self.n) - 1

    @property
    def opponent(self) -> Owner:
        return self.me.other

    def options(self, board: Board, v: int) -> int:
        """Free edges at v this adversary may claim."""
        mask = board.free_nbr(v) & self.vertices
        if self.allowed is not None:
            mask &= self.allowed[v]
        return mask

    def part_of(self, v: int) -> int:
        for i, p in enumerate(self.parts or ()):
            if p >> v & 1:
                return i
        return -1


class Adversary:
    name = "adversary"

    def move(self, board: Board, ctx: GameContext) -> Edge:
        raise NotImplementedError

    def describe(self) -> dict:
        return {"kind": self.name}

    def _any(self, board: Board, ctx: GameContext) -> Edge:
        for v in bits(ctx.vertices):
            opts = ctx.options(board, v)
            if opts:
                return edge(v, lowest(opts))
        # nothing useful left: fall back to any free edge of the board
        for v in range(board.n):
            f = board.free_nbr(v)
            if f:
                return edge(v, lowest(f))
        raise ValueError("no free edge")


class RandomAdversary(Adversary):
    """Uniformly random free edge among the edges the context allows."""

    name = "random"

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.rng = random.Random(seed)

    def describe(self) -> dict:
        return {"kind": self.name, "seed": self.seed}

    def move(self, board: Board, ctx: GameContext) -> Edge:
        verts = list(bits(ctx.vertices))
        for _ in range(64):
            u, v = self.rng.sample(verts, 2)
            if ctx.options(board, u) >> v & 1:
                return edge(u, v)
        pool = [(u, v) for u in verts for v in bits(ctx.options(board, u)) if u < v]
        if not pool:
            return self._any(board, ctx)
        return self.rng.choice(pool)


def _deficient(board: Board, ctx: GameContext) -> list[int]:
    opp = ctx.opponent
    return [v for v in bits(ctx.vertices) if board.degree(opp, v) < ctx.k]


class GreedyDegree(Adversary):
    """Builds a star at the deficient vertex with the largest Breaker degree."""

    name = "greedy"

    def move(self, board: Board, ctx: GameContext) -> Edge:
        me = ctx.me
        deficient = _deficient(board, ctx)
        deficient.sort(key=lambda v: (-board.degree(me, v), v))
        defmask = 0
        for v in deficient:
            defmask |= 1 << v
        for v in deficient:
            opts = ctx.options(board, v)
            if not opts:
                continue
            pref = opts & defmask or opts
            w = max(bits(pref), key=lambda x: (board.degree(me, x), -x))
            return edge(v, w)
        return self._any(board, ctx)


class CutAttacker(Adversary):
    """Cuts the lowest-degree vertex away from the part it is thinnest into."""

    name = "cut"

    def move(self, board: Board, ctx: GameContext) -> Edge:
        opp = ctx.opponent
        cands = [v for v in bits(ctx.vertices) if ctx.options(board, v)]
        if not cands:
            return self._any(board, ctx)
        cands.sort(key=lambda v: (board.degree(opp, v), ctx.options(board, v).bit_count(), v))
        for v in cands[:8]:
            opts = ctx.options(board, v)
            if ctx.parts:
                home = ctx.part_of(v)
                best = None
                for j, pm in enumerate(ctx.parts):
                    if j == home or board.nbr(opp, v) & pm:
                        continue
                    left = opts & pm
                    if left and (best is None or left.bit_count() < best.bit_count()):
                        best = left
                if best:
                    return edge(v, lowest(best))
            else:
                return edge(v, lowest(opts))
        v = cands[0]
        return edge(v, lowest(ctx.options(board, v)))


class DangerForger(Adversary):
    """Hammers one vertex (or one vertex-part pair) until it crosses a danger threshold."""

    name = "danger"

    def __init__(self):
        self.target: Optional[tuple[int, int]] = None  # (vertex, side mask)
        self.goal = 0

    def _pairs(self, board: Board, ctx: GameContext):
        opp, me = ctx.opponent, ctx.me
        for v in bits(ctx.vertices):
            if board.degree(opp, v) >= ctx.k:
                continue
            home = ctx.part_of(v)
            for j, pm in enumerate(ctx.parts):
                if j == home or board.nbr(opp, v) & pm:
                    continue
                goal = -(-int(ctx.danger_fraction * 100) * pm.bit_count() // 100)
                have = (board.nbr(me, v) & pm).bit_count()
                if have < goal and ctx.options(board, v) & pm:
                    yield have, v, pm, goal

    def _vertices(self, board: Board, ctx: GameContext):
        me = ctx.me
        focus = ctx.focus if ctx.focus is not None else ctx.vertices
        for v in bits(focus):
            side = ctx.side(v) if ctx.side else ctx.vertices
            goal = ctx.threshold if ctx.threshold is not None else side.bit_count()
            have = (board.nbr(me, v) & side).bit_count()
            if have < goal and ctx.options(board, v) & side and board.degree(ctx.opponent, v) < ctx.k:
                yield have, v, side, goal

    def move(self, board: Board, ctx: GameContext) -> Edge:
        me = ctx.me
        if self.target is not None:
            v, side = self.target
            opts = ctx.options(board, v) & side
            still_open = board.degree(ctx.opponent, v) < ctx.k
            if opts and still_open and (board.nbr(me, v) & side).bit_count() < self.goal:
                return edge(v, lowest(opts))
            self.target = None
        gen = self._pairs(board, ctx) if ctx.parts else self._vertices(board, ctx)
        best = max(gen, key=lambda t: (t[0], -t[1]), default=None)
        if best is None:
            return self._any(board, ctx)
        _, v, side, goal = best
        self.target, self.goal = (v, side), goal
        return edge(v, lowest(ctx.options(board, v) & side))


class Racer(Adversary):
    """Plays for its own minimum degree k: joins two of its lowest-degree vertices."""

    name = "racer"

    def move(self, board: Board, ctx: GameContext) -> Edge:
        me = ctx.me
        order = sorted(bits(ctx.vertices), key=lambda v: (board.degree(me, v), v))
        low = 0
        for v in order:
            if board.degree(me, v) < ctx.k:
                low |= 1 << v
        for v in order:
            opts = ctx.options(board, v)
            if not opts:
                continue
            pref = opts & low or opts
            w = min(bits(pref), key=lambda x: (board.degree(me, x), x))
            return edge(v, w)
        return self._any(board, ctx)


class MinimaxAdversary(Adversary):
    """Optimal play by exhaustive search; only for n <= 5."""

    name = "minimax"

    def __init__(self, cap: int = 5):
        self.cap = cap
        self._solver = None

    def _setup(self, ctx: GameContext):
        from .solver import StrongSolver, WeakSolver, game_predicate

        if ctx.n > self.cap:
            raise BoardTooLarge(f"minimax adversary is limited to n <= {self.cap}")
        if self._solver is None:
            win = game_predicate(ctx.game, ctx.n, ctx.k)
            self._solver = StrongSolver(ctx.n, win) if ctx.strong else WeakSolver(ctx.n, win)
        return self._solver

    def move(self, board: Board, ctx: GameContext) -> Edge:
        solver = self._setup(ctx)
        mine = theirs = 0
        for i, (u, v) in enumerate(solver.edges):
            own = board.owner(u, v)
            if own == ctx.me:
                mine |= 1 << i
            elif own == ctx.opponent:
                theirs |= 1 << i
        if ctx.strong:
            idx = solver.best_move(mine, theirs)
        else:
            idx = solver.best_breaker_move(theirs, mine)
        if idx is None:
            raise ValueError("no free edge")
        return solver.edges[idx]


class Scripted(Adversary):
    """Replays a fixed list of edges; the referee judges their legality."""

    name = "scripted"

    def __init__(self, moves: Iterable[Sequence[int]]):
        self.moves = [tuple(m) for m in moves]
        self.pos = 0

    def describe(self) -> dict:
        return {"kind": self.name, "moves": [list(m) for m in self.moves]}

    def move(self, board: Board, ctx: GameContext) -> Edge:
        if self.pos >= len(self.moves):
            raise ScriptExhausted(f"script of {len(self.moves)} moves exhausted")
        e = self.moves[self.pos]
        self.pos += 1
        return e


KINDS = {
    "random": RandomAdversary,
    "greedy": GreedyDegree,
    "cut": CutAttacker,
    "danger": DangerForger,
    "racer": Racer,
    "minimax": MinimaxAdversary,
}


def make_adversary(kind: str, seed: int = 0, script: Optional[Iterable] = None) -> Adversary:
    if kind == "random":
        return RandomAdversary(seed)
    if kind == "scripted":
        return Scripted(script or [])
    if kind not in KINDS:
        raise ValueError(f"unknown adversary {kind!r}; choose from {sorted(KINDS) + ['scripted']}")
    return KINDS[kind]()
