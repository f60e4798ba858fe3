"""Referee and turn loop for the weak and strong games.

Player ONE is always Maker (weak games) or Red (strong games); player TWO
is Breaker or Blue.  Weak games start with Breaker, strong games with Red.
The referee checks every claim for legality, tests the mover's winning
condition after each move, recounts the degree tables on a sample of moves
and writes a JSON transcript that can be replayed to the same hash.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Optional

from .adversaries import Adversary, GameContext, make_adversary
from .board import Board, Edge, Owner, bits, edge, mask_of
from .errors import Forfeit, ScriptExhausted
from .graphs import SimpleGraph, is_connected, is_hamilton_cycle_with_chord, is_k_connected, vertex_connectivity
from .hc_chord import ChordSubgame, MinimaxChord
from .kconn import GameConstants, KConnMaker
from .kconn_strong import KConnStrongRed
from .matching_game import MatchingGame, MatchingGameSpec
from .mindeg import StrongMinDeg, WeakMinDeg

WEAK_VARIANTS = ("weak-kconn", "weak-mindeg", "matching", "hc-chord", "weak-conn1")
STRONG_VARIANTS = ("strong-kconn", "strong-mindeg")
VARIANTS = WEAK_VARIANTS + STRONG_VARIANTS

LABELS = {True: {Owner.ONE: "R", Owner.TWO: "B"}, False: {Owner.ONE: "M", Owner.TWO: "B"}}


class IllegalMove(Exception):
    def __init__(self, player: str, reason: str):
        super().__init__(f"illegal move by {player}: {reason}")
        self.player = player
        self.reason = reason


@dataclass
class GameSpec:
    variant: str
    n: int
    k: int = 1
    m: int = 1
    seed: int = 0
    adversary: str = "random"
    script: Optional[list] = None
    maker: str = "default"  # or "minimax" on tiny boards
    profile: Optional[str] = None
    overrides: dict = field(default_factory=dict)
    d: int = 80  # matching subgame danger threshold
    eps: float = 0.1
    move_cap: Optional[int] = None
    allow_pass: bool = False
    audit_rate: float = 0.1

    @property
    def strong(self) -> bool:
        return self.variant in STRONG_VARIANTS

    @property
    def first_mover(self) -> Owner:
        return Owner.ONE if self.strong else Owner.TWO

    def validate(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; choose from {list(VARIANTS)}")
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.variant == "weak-kconn" and self.k < 2:
            raise ValueError("weak-kconn needs k >= 2")
        if self.variant == "strong-kconn" and self.k < 3:
            raise ValueError("strong-kconn needs k >= 3")
        if self.variant in ("weak-mindeg", "strong-mindeg") and not 1 <= self.m < self.n:
            raise ValueError("m must satisfy 1 <= m < n")
        if self.variant == "matching" and self.n % 2:
            raise ValueError("the matching subgame needs an even n (two sides of n/2)")
        if self.maker not in ("default", "minimax"):
            raise ValueError(f"unknown maker strategy {self.maker!r}")
        if not 0 <= self.audit_rate <= 1:
            raise ValueError("audit_rate must lie in [0, 1]")

    def constants(self) -> Optional[GameConstants]:
        if "kconn" not in self.variant:
            return None
        return GameConstants.for_game(self.n, self.k, self.profile, **self.overrides)

    def bound(self) -> Optional[int]:
        """The move bound the strategy is meant to meet."""
        v = self.variant
        if "kconn" in v:
            return self.k * self.n // 2 + 1
        if "mindeg" in v:
            return self.n // 2 + 1
        if v == "hc-chord":
            return self.n + 1
        if v == "weak-conn1":
            return self.n - 1
        if v == "matching":
            return self.n // 2
        return None

    def params(self) -> dict:
        return {
            "adversary": self.adversary,
            "script": self.script,
            "maker": self.maker,
            "overrides": dict(self.overrides),
            "d": self.d,
            "eps": self.eps,
            "move_cap": self.move_cap,
            "allow_pass": self.allow_pass,
            "audit_rate": self.audit_rate,
        }


@dataclass
class Transcript:
    header: dict
    moves: list = field(default_factory=list)
    result: dict = field(default_factory=dict)
    certificates: dict = field(default_factory=dict)
    audit: dict = field(default_factory=dict)
    log: list = field(default_factory=list)

    def to_json(self) -> dict:
        return asdict(self)

    def dumps(self, indent: Optional[int] = None) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=indent)

    @classmethod
    def from_json(cls, data: dict) -> "Transcript":
        return cls(**{k: data[k] for k in ("header", "moves", "result", "certificates", "audit", "log") if k in data})

    def result_hash(self) -> str:
        core = {"header": self.header, "moves": self.moves, "result": self.result}
        blob = json.dumps(core, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def spec(self) -> GameSpec:
        h = self.header
        p = dict(h.get("params", {}))
        return GameSpec(variant=h["variant"], n=h["n"], k=h["k"], m=h["m"], seed=h["seed"], profile=h["profile"], **p)

    @property
    def winner(self) -> Optional[str]:
        return self.result.get("winner")


# -- board graphs and small strategies ------------------------------------------------


def dense_graph(n: int, m: int, seed: int = 0) -> list[int]:
    """Adjacency masks of a graph with minimum degree >= n - m.

    The complement is a random graph of maximum degree m - 1 built from
    m - 1 rounds of random matchings.
    """
    full = (1 << n) - 1
    adj = [full & ~(1 << v) for v in range(n)]
    if m <= 1:
        return adj
    rng = random.Random(f"graph:{n}:{m}:{seed}")
    missing = [0] * n
    for _ in range(m - 1):
        order = list(range(n))
        rng.shuffle(order)
        for a, b in zip(order[::2], order[1::2]):
            if missing[a] < m - 1 and missing[b] < m - 1 and adj[a] >> b & 1:
                adj[a] &= ~(1 << b)
                adj[b] &= ~(1 << a)
                missing[a] += 1
                missing[b] += 1
    return adj


class TreeMaker:
    """Spanning-tree builder for the connectivity game on larger boards.

    Joins the Maker component with the fewest free edges leaving it to
    another component; never claims an edge inside a component.
    """

    name = "tree"

    def __init__(self, n: int, me: Owner = Owner.ONE):
        self.n = n
        self.me = me
        self.annotation = "tree"

    def _components(self, board: Board) -> list[int]:
        left = (1 << self.n) - 1
        comps = []
        while left:
            seen = frontier = left & -left
            while frontier:
                nxt = 0
                for v in bits(frontier):
                    nxt |= board.nbr(self.me, v)
                frontier = nxt & ~seen
                seen |= frontier
            comps.append(seen)
            left &= ~seen
        return comps

    def move(self, board: Board, last: Optional[Edge] = None) -> Edge:
        comps = self._components(board)
        if len(comps) == 1:
            raise Forfeit("already connected", "tree")
        best = None
        for c in comps:
            out = [(v, w) for v in bits(c) for w in bits(board.free_nbr(v) & ~c)]
            if not out:
                raise Forfeit("a component has no free edge leaving it", "tree")
            if best is None or len(out) < len(best):
                best = out
        return edge(*min(best))

    def done(self, board: Board) -> bool:
        return len(self._components(board)) == 1


class MinimaxPlayer:
    """Exact play on boards with at most five vertices."""

    name = "minimax"

    def __init__(self, game: str, n: int, k: int, strong: bool):
        from .solver import StrongSolver, WeakSolver, game_predicate

        win = game_predicate(game, n, k)
        self.strong = strong
        self.solver = StrongSolver(n, win) if strong else WeakSolver(n, win)
        self.annotation = "minimax"

    def _masks(self, board: Board) -> tuple[int, int]:
        mine = theirs = 0
        for i, (u, v) in enumerate(self.solver.edges):
            own = board.owner(u, v)
            if own == Owner.ONE:
                mine |= 1 << i
            elif own == Owner.TWO:
                theirs |= 1 << i
        return mine, theirs

    def move(self, board: Board, last: Optional[Edge] = None) -> Edge:
        mine, theirs = self._masks(board)
        idx = self.solver.best_move(mine, theirs)
        if idx is None:
            raise Forfeit("no free edge", "minimax")
        return self.solver.edges[idx]


# -- per-variant setup -----------------------------------------------------------------


@dataclass
class Setup:
    strategy: Any
    ctx: GameContext
    allowed: Optional[list[int]]
    wins: Callable[[Board, Owner], bool]
    certify: Callable[[Board], dict]
    cap: int
    describe: dict


def _graph(board: Board, who: Owner) -> SimpleGraph:
    return SimpleGraph.from_board(board, who)


def _kconn_win(k: int):
    def wins(board: Board, who: Owner) -> bool:
        if board.min_degree(who) < k:
            return False
        return is_k_connected(_graph(board, who), k)

    return wins


def _mindeg_win(board: Board, who: Owner) -> bool:
    return board.min_degree(who) >= 1


def _conn_win(board: Board, who: Owner) -> bool:
    return board.min_degree(who) >= 1 and is_connected(
        [board.nbr(who, v) for v in range(board.n)], (1 << board.n) - 1
    )


def _connectivity(board: Board, who: Owner) -> int:
    return vertex_connectivity(_graph(board, who)).connectivity


def build(spec: GameSpec) -> Setup:
    spec.validate()
    n, k, v = spec.n, spec.k, spec.variant
    tiny = spec.maker == "minimax"

    if v in ("weak-kconn", "strong-kconn"):
        const = spec.constants()
        if tiny:
            strat = MinimaxPlayer("conn", n, k, spec.strong)
            ctx = GameContext(n, Owner.TWO, k=k, game="conn", strong=spec.strong)
        else:
            strat = KConnStrongRed(n, k, const) if spec.strong else KConnMaker(n, k, const)
            ctx = GameContext(
                n, Owner.TWO, k=k, parts=strat.masks, danger_fraction=const.danger_fraction,
                threshold=const.degree_danger_threshold, game="conn", strong=spec.strong,
            )

        def certify(board: Board) -> dict:
            cert = strat.certificate(board) if hasattr(strat, "certificate") else None
            out = {
                "gk": cert.to_json() if cert is not None else None,
                "connectivity": _connectivity(board, Owner.ONE),
                "blue_min_degree": board.min_degree(Owner.TWO),
            }
            if hasattr(strat, "cap_violations"):
                out["cap_violations"] = strat.cap_violations
                out["stage_moves"] = dict(strat.stage_moves)
                out["stage_reports"] = [
                    {"stage": r.stage, "passed": r.passed, "checks": {c: list(t) for c, t in r.checks.items()}}
                    for r in strat.reports
                ]
                out["rescues"] = strat.rescues
            return out

        cap = spec.move_cap or (const.global_move_cap if const else k * n)
        desc = {"kind": getattr(strat, "name", "kconn"), "constants": const.to_json() if const else None}
        return Setup(strat, ctx, None, _kconn_win(k), certify, cap, desc)

    if v in ("weak-mindeg", "strong-mindeg"):
        G = dense_graph(n, spec.m, spec.seed)
        if tiny:
            if spec.m != 1:
                raise ValueError("the minimax maker plays on K_n only (m = 1)")
            strat = MinimaxPlayer("mindeg", n, 1, spec.strong)
        elif spec.strong:
            strat = StrongMinDeg(n, allowed=G, target=1, me=Owner.ONE, board=Board(n))
        else:
            strat = WeakMinDeg(n, allowed=G, target=1, me=Owner.ONE, instrument=True)
        ctx = GameContext(n, Owner.TWO, k=1, allowed=G, game="mindeg", strong=spec.strong)

        def certify(board: Board) -> dict:
            out = {
                "maker_min_degree": board.min_degree(Owner.ONE),
                "blue_min_degree": board.min_degree(Owner.TWO),
                "board_min_degree": min(g.bit_count() for g in G),
            }
            if isinstance(strat, WeakMinDeg):
                out["star_violations"] = strat.star_violations
                out["D0"] = strat.potentials[0] if strat.potentials else None
                out["D0_bound"] = (spec.m - 1) * n + 2
            if isinstance(strat, StrongMinDeg):
                out["escaped_at"] = strat.escaped_at
            return out

        desc = {"kind": getattr(strat, "name", type(strat).__name__)}
        return Setup(strat, ctx, G, _mindeg_win, certify, spec.move_cap or n, desc)

    if v == "matching":
        a = n // 2
        # optional sets at the low end of their window eps*a .. 2*eps*a
        u = math.ceil(spec.eps * a - 1e-9)
        V1, V2 = range(a), range(a, n)
        mspec = MatchingGameSpec.build(V1, range(a - u, a), V2, range(n - u, n), spec.d, 0, spec.eps)
        strat = MatchingGame(mspec, Owner.ONE)
        start = mspec.hypotheses(Board(n), Owner.TWO)  # P2, P3 are conditions on the opening board
        side1, side2 = strat.side1, strat.side2
        allowed = [side2 if side1 >> x & 1 else side1 for x in range(n)]
        ctx = GameContext(
            n, Owner.TWO, k=1, allowed=allowed, threshold=spec.d,
            side=lambda x: side2 if side1 >> x & 1 else side1,
            focus=mask_of(mspec.U1 | mspec.U2),  # optional vertices are only matched under rule (1)
        )

        def wins(board: Board, who: Owner) -> bool:
            return who == Owner.ONE and strat.over(board)

        def certify(board: Board) -> dict:
            return {
                "goals": strat.goals_status(board),
                "rule_counts": {str(r): c for r, c in strat.rule_counts.items()},
                "rule_bounds": strat.rule_bounds(),
                "hypotheses": start,
            }

        return Setup(strat, ctx, allowed, wins, certify, spec.move_cap or a, {"kind": "matching"})

    if v == "hc-chord":
        strat = MinimaxChord(range(n)) if tiny else ChordSubgame(range(n), Owner.ONE)
        ctx = GameContext(n, Owner.TWO, k=2, game="chord")
        full = (1 << n) - 1

        def wins(board: Board, who: Owner) -> bool:
            if board.claimed(who) < n + 1 or board.min_degree(who) < 2:
                return False
            return is_hamilton_cycle_with_chord(_graph(board, who), full)[0]

        def certify(board: Board) -> dict:
            ok, chord = is_hamilton_cycle_with_chord(_graph(board, Owner.ONE), full)
            return {"cycle_with_chord": ok, "chord": list(chord) if chord else None}

        return Setup(strat, ctx, None, wins, certify, spec.move_cap or 2 * n, {"kind": type(strat).__name__})

    # weak-conn1
    strat = MinimaxPlayer("conn", n, 1, False) if tiny else TreeMaker(n)
    ctx = GameContext(n, Owner.TWO, k=1, game="conn")

    def certify(board: Board) -> dict:
        return {"connected": _conn_win(board, Owner.ONE)}

    return Setup(strat, ctx, None, _conn_win, certify, spec.move_cap or n * (n - 1) // 2, {"kind": strat.name})


# -- the referee -------------------------------------------------------------------------


class Referee:
    def __init__(self, spec: GameSpec, setup: Setup, adversary: Adversary):
        self.spec = spec
        self.setup = setup
        self.adversary = adversary
        self.board = Board(spec.n)
        self.labels = LABELS[spec.strong]
        self.moves: list[dict] = []
        self.counts = {Owner.ONE: 0, Owner.TWO: 0}
        self.audit_rng = random.Random(f"audit:{spec.seed}")
        self.audit = {"sampled": 0, "problems": []}
        self.illegal: list[str] = []

    def legal(self, e: Any, who: Owner) -> Edge:
        label = self.labels[who]
        try:
            u, v = int(e[0]), int(e[1])
        except (TypeError, ValueError, IndexError):
            raise IllegalMove(label, f"not an edge: {e!r}")
        n = self.spec.n
        if not (0 <= u < n and 0 <= v < n):
            raise IllegalMove(label, f"vertex out of range in {(u, v)}")
        if u == v:
            raise IllegalMove(label, f"self-loop {(u, v)}")
        if not self.board.is_free(u, v):
            raise IllegalMove(label, f"edge {edge(u, v)} is already claimed")
        allowed = self.setup.allowed
        if allowed is not None and not allowed[u] >> v & 1:
            raise IllegalMove(label, f"edge {edge(u, v)} is not on the board")
        return edge(u, v)

    def free_legal(self) -> bool:
        allowed = self.setup.allowed
        for v in range(self.spec.n):
            f = self.board.free_nbr(v)
            if allowed is not None:
                f &= allowed[v]
            if f:
                return True
        return False

    def ask(self, who: Owner, last: Optional[Edge]) -> Optional[Edge]:
        if who == Owner.ONE:
            return self.setup.strategy.move(self.board, last)
        return self.adversary.move(self.board, self.setup.ctx)

    def stage_of(self, who: Owner) -> Optional[str]:
        if who != Owner.ONE:
            return None
        s = self.setup.strategy
        tag = getattr(s, "annotation", None) or getattr(s, "stage", None)
        return None if tag is None else str(tag)

    def play(self, who: Owner, e: Optional[Edge]) -> None:
        i = len(self.moves) + 1
        if e is not None:
            self.board.claim(who, *e)
            self.counts[who] += 1
        self.moves.append({"i": i, "player": self.labels[who], "edge": list(e) if e else None,
                           "stage": self.stage_of(who) if e else "pass"})
        if self.audit_rng.random() < self.spec.audit_rate:
            self.audit["sampled"] += 1
            for p in self.board.audit():
                self.audit["problems"].append(f"move {i}: {p}")

    def result(self, outcome: str, winner: Optional[str], win_move: Optional[int] = None,
               forfeit: Optional[dict] = None) -> dict:
        return {
            "outcome": outcome,
            "winner": winner,
            "win_move": win_move,
            "mover_moves": self.counts[Owner.ONE],
            "opponent_moves": self.counts[Owner.TWO],
            "forfeit": forfeit,
        }

    def run(self) -> dict:
        spec, setup = self.spec, self.setup
        who = spec.first_mover
        last: Optional[Edge] = None
        while True:
            if not self.free_legal():
                if spec.strong:
                    return self.result("draw", "draw")
                return self.result("win", "B", len(self.moves))
            if who == Owner.ONE and self.counts[Owner.ONE] >= setup.cap:
                return self.result("cap", "B", forfeit={"player": self.labels[who], "kind": "cap",
                                                                 "reason": f"move cap {setup.cap}"})
            label = self.labels[who]
            try:
                raw = self.ask(who, last)
                if raw is None:
                    if not (spec.allow_pass and not spec.strong):
                        raise IllegalMove(label, "passing is disabled")
                    e = None
                else:
                    e = self.legal(raw, who)
            except (Forfeit, ScriptExhausted, IllegalMove) as f:
                kind = "illegal" if isinstance(f, IllegalMove) else "strategy" if isinstance(f, Forfeit) else "script"
                if kind == "illegal":
                    self.illegal.append(str(f))
                forfeit = {"player": label, "kind": kind, "reason": str(f)}
                return self.result("forfeit", self.labels[who.other], forfeit=forfeit)
            self.play(who, e)
            if e is not None and (spec.strong or who == Owner.ONE) and setup.wins(self.board, who):
                return self.result("win", label, len(self.moves))
            last = e
            who = who.other


def make_header(spec: GameSpec, setup: Setup, adv: Adversary) -> dict:
    strong = spec.strong
    return {
        "variant": spec.variant,
        "n": spec.n,
        "k": spec.k,
        "m": spec.m,
        "profile": spec.constants().profile if "kconn" in spec.variant else spec.profile,
        "seed": spec.seed,
        "strategies": {("red" if strong else "maker"): setup.describe, ("blue" if strong else "breaker"): adv.describe()},
        "first_mover": "R" if strong else "B",
        "bound": spec.bound(),
        "params": spec.params(),
    }


def run_game(spec: GameSpec, adversary: Optional[Adversary] = None) -> Transcript:
    setup = build(spec)
    adv = adversary or make_adversary(spec.adversary, spec.seed, spec.script)
    ref = Referee(spec, setup, adv)
    result = ref.run()
    strong = spec.strong
    header = make_header(spec, setup, adv)
    certs = setup.certify(ref.board)
    if strong and "kconn" in spec.variant and result["winner"] == "R":
        k, n = spec.k, spec.n
        if (k * n) % 2 and result["mover_moves"] == k * n // 2 + 1:
            # no graph with minimum degree k has floor(kn/2) edges when kn is odd
            assert ref.board.min_degree(Owner.TWO) < k, "Blue reached minimum degree k with too few edges"
    log = list(getattr(setup.strategy, "log", []))
    return Transcript(header, ref.moves, result, certs, ref.audit, log)


def run_weak_game(spec: GameSpec, adversary: Optional[Adversary] = None) -> Transcript:
    if spec.strong:
        raise ValueError(f"{spec.variant} is a strong game")
    return run_game(spec, adversary)


def run_strong_game(spec: GameSpec, adversary: Optional[Adversary] = None) -> Transcript:
    if not spec.strong:
        raise ValueError(f"{spec.variant} is a weak game")
    return run_game(spec, adversary)


def replay(t: Transcript) -> Transcript:
    """Re-run a game from its header alone."""
    return run_game(t.spec())


def first_win(t: Transcript) -> Optional[int]:
    """Index of the first move after which its mover satisfies the win test, by rescanning."""
    spec = t.spec()
    setup = build(spec)
    board = Board(spec.n)
    owners = {"M": Owner.ONE, "R": Owner.ONE, "B": Owner.TWO}
    for mv in t.moves:
        if mv["edge"] is None:
            continue
        who = owners[mv["player"]]
        board.claim(who, *mv["edge"])
        if spec.variant == "matching":
            continue
        if (spec.strong or who == Owner.ONE) and setup.wins(board, who):
            return mv["i"]
    return t.result.get("win_move") if spec.variant == "matching" else None


def run_many(specs: list[GameSpec], jobs: int = 1) -> list[Transcript]:
    if jobs <= 1:
        return [run_game(s) for s in specs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_game, specs))
