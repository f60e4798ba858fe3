"""Maker's four-stage strategy for the weak k-vertex-connectivity game.

Maker builds a member of G_k (see ``gk``) within floor(kn/2) + 1 moves:

  I    a Hamilton cycle with a chord inside every part V_i, while answering
       Breaker's attempts to cut a vertex off from a foreign part;
  II   top up chord endpoints and high-Breaker-degree vertices to degree k
       with edges into distinct foreign parts;
  III  one bipartite matching game per pair of parts, which gives every
       degree-2 vertex an edge into each foreign part except for a sparse
       set of optional vertices B_ij;
  IV   the vertices still at degree k - 1 play a minimum-degree game among
       themselves.

Maker's degree never exceeds k before Stage IV, which is where the move
bound comes from.  ``GameConstants`` holds every numeric threshold, in a
"paper" profile (asymptotic values) and a "desk" profile that makes every
branch reachable at n in the hundreds.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, fields, replace
from typing import Optional

from .board import Board, Edge, Owner, bits, edge, mask_of
from .errors import Forfeit
from .gk import GkCertificate, Partition, PartTooSmall, verify_membership
from .graphs import SimpleGraph
from .hc_chord import ChordSubgame
from .matching_game import MatchingGame, MatchingGameSpec
from .mindeg import WeakMinDeg

PROFILES = ("paper", "desk")


@dataclass(frozen=True)
class GameConstants:
    """Concrete thresholds for one (n, k) game."""

    profile: str
    danger_fraction: float
    stage1_move_cap: int
    global_move_cap: int
    degree_danger_threshold: int
    b_set_lower: int
    b_set_upper: int
    matching_eps: float
    matching_d: int
    early_danger_service: bool = False

    @classmethod
    def for_game(cls, n: int, k: int, profile: Optional[str] = None, **overrides) -> "GameConstants":
        profile = profile or os.environ.get("POSGAME_PROFILE", "desk")
        if profile == "paper":
            base = cls(
                profile="paper",
                danger_fraction=0.9,
                stage1_move_cap=2 * n,
                global_move_cap=k * n,
                degree_danger_threshold=k**10,
                b_set_lower=math.ceil(n / k**6),
                b_set_upper=math.floor(2 * n / k**6),
                matching_eps=k**-4,
                matching_d=2 * k**10,
            )
        elif profile == "desk":
            threshold = max(8, 3 * k)
            sq = (k - 1) ** 2
            base = cls(
                profile="desk",
                danger_fraction=0.6,
                stage1_move_cap=2 * n,
                global_move_cap=k * n,
                degree_danger_threshold=threshold,
                b_set_lower=math.ceil(n / (8 * sq)),
                b_set_upper=math.ceil(n / (4 * sq)),
                matching_eps=0.1,
                matching_d=2 * threshold,
                early_danger_service=True,
            )
        else:
            raise ValueError(f"unknown constants profile {profile!r}; choose from {PROFILES}")
        if overrides:
            return base.override(**overrides)
        base.validate()
        return base

    def override(self, **changes) -> "GameConstants":
        types = {f.name: f.type for f in fields(self)}
        clean = {}
        for key, value in changes.items():
            if key not in types or key == "profile":
                raise KeyError(f"unknown constant {key!r}")
            kind = str(types[key])
            want = float if "float" in kind else bool if "bool" in kind else int
            if want is bool and not isinstance(value, bool):
                if str(value).lower() not in ("true", "false", "1", "0"):
                    raise TypeError(f"{key} must be a boolean, got {value!r}")
                value = str(value).lower() in ("true", "1")
            if want is int and isinstance(value, float) and not value.is_integer():
                raise TypeError(f"{key} must be an integer, got {value!r}")
            try:
                clean[key] = want(value)
            except ValueError:
                raise TypeError(f"{key} must be {want.__name__}, got {value!r}") from None
        out = replace(self, **clean)
        out.validate()
        return out

    def validate(self) -> None:
        if not 0 < self.danger_fraction < 1:
            raise ValueError("danger_fraction must lie in (0, 1)")
        if self.b_set_lower > self.b_set_upper:
            raise ValueError("b_set_lower exceeds b_set_upper")

    def to_json(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class StageReport:
    stage: str
    checks: dict = field(default_factory=dict)  # name -> (passed, measured, bound)

    @property
    def passed(self) -> bool:
        return all(ok for ok, _, _ in self.checks.values())


class KConnMaker:
    """Maker's strategy; call ``move`` once per turn with Breaker's last edge."""

    name = "kconn"

    def __init__(self, n: int, k: int, constants: Optional[GameConstants] = None, me: Owner = Owner.ONE):
        if k < 2:
            raise ValueError("the k-connectivity strategy needs k >= 2")
        self.n, self.k = n, k
        self.me = Owner(me)
        self.opp = self.me.other
        self.const = constants or GameConstants.for_game(n, k)
        self.partition = Partition.round_robin(n, k - 1)
        if min(len(p) for p in self.partition.parts) < 5:
            raise PartTooSmall(f"n={n} gives parts smaller than 5 for k={k}")
        self.masks = self.partition.masks()
        self.where = self.partition.index_of()
        self.sizes = [len(p) for p in self.partition.parts]
        self.subgames = [
            ChordSubgame(part, self.me, forbidden=self._forbidden_for(i))
            for i, part in enumerate(self.partition.parts)
        ]
        self.stage = "I"
        self.annotation = "I"
        self.moves = 0
        self.stage_moves = {"I": 0, "II": 0, "III": 0, "IV": 0}
        self.done_parts = [False] * (k - 1)
        self.pairs_created: set = set()
        self.reports: list[StageReport] = []
        self.cap_events: list[tuple[int, int, int]] = []  # (move, vertex, degree) above k
        self._board: Optional[Board] = None
        self.chord_endpoints: set = set()
        self.cycles: list = []
        self.block: list = []  # pending Stage II edges (v, part)
        self.block_vertex: Optional[int] = None
        self.A: dict = {}
        self.B: dict = {}
        self.games: dict = {}
        self.danger_served = 0
        self.rescues = 0
        self.U0: Optional[int] = None
        self.sub: Optional[WeakMinDeg] = None
        self.finished = False
        self.unserved: set = set()
        self.log: list[str] = []

    # -- board views -------------------------------------------------------------

    def _forbidden_for(self, i: int):
        part = self.masks[i]
        limit = max(self.k - 3, 0)

        def forbidden(board: Board) -> int:
            out = 0
            for v in bits(part):
                if (board.nbr(self.me, v) & ~part).bit_count() > limit:
                    out |= 1 << v
            return out

        return forbidden

    def dM(self, board: Board, v: int, part: Optional[int] = None) -> int:
        if part is None:
            return board.degree(self.me, v)
        return (board.nbr(self.me, v) & self.masks[part]).bit_count()

    def dB(self, board: Board, v: int, part: Optional[int] = None) -> int:
        if part is None:
            return board.degree(self.opp, v)
        return (board.nbr(self.opp, v) & self.masks[part]).bit_count()

    def cross_dB(self, board: Board, v: int) -> int:
        return (board.nbr(self.opp, v) & ~self.masks[self.where[v]]).bit_count()

    def danger_goal(self, i: int) -> int:
        return math.ceil(self.const.danger_fraction * self.sizes[i] - 1e-9)

    def dangerous_pairs(self, board: Board) -> list[tuple[int, int]]:
        """All pairs (v, i) with v outside V_i, Breaker nearly filling E(v, V_i) and Maker absent."""
        out = []
        k = self.k
        for i, pm in enumerate(self.masks):
            goal = self.danger_goal(i)
            for v in range(self.n):
                if pm >> v & 1:
                    continue
                if (
                    (board.nbr(self.opp, v) & pm).bit_count() >= goal
                    and not board.nbr(self.me, v) & pm
                    and board.degree(self.me, v) < k
                ):
                    out.append((v, i))
        return out

    def part_done(self, board: Board, i: int) -> bool:
        if not self.done_parts[i]:
            self.done_parts[i] = self.subgames[i].done(board)
        return self.done_parts[i]

    def done(self, board: Board) -> bool:
        if self.k == 2:
            # one part: the Hamilton cycle with a chord is the whole graph
            return self.part_done(board, 0)
        return self.stage in ("III", "IV") and board.min_degree(self.me) >= self.k

    # -- driver ----------------------------------------------------------------------

    def move(self, board: Board, last: Optional[Edge] = None) -> Edge:
        if self.moves >= self.const.global_move_cap:
            raise Forfeit(f"no k-connected graph after {self.moves} moves", self.stage)
        self.moves += 1
        # each stage falls through to the next one when it finishes
        if self.stage == "I":
            e = self._stage1(board, last)
        elif self.stage == "II":
            e = self._stage2(board)
        elif self.stage == "III":
            e = self._stage3(board, last)
        else:
            e = self._stage4(board, last)
        self.stage_moves[self.stage] += 1
        self._check_cap(board, e)
        return e

    def _check_cap(self, board: Board, e: Edge) -> None:
        self._board = board
        if self.stage == "IV":
            return
        for v in e:
            d = board.degree(self.me, v) + 1
            if d > self.k:
                self.cap_events.append((self.moves, v, d))

    @property
    def cap_violations(self) -> list[str]:
        """Degrees above k before Stage IV that are not k + 1 at a chord endpoint.

        Resolved lazily: a chord may be claimed before its cycle closes.
        """
        if not self.cap_events:
            return []
        ends = self._all_chord_endpoints(self._board)
        return [
            f"move {m}: d_M({v}) = {d}"
            for m, v, d in self.cap_events
            if d > self.k + 1 or v not in ends
        ]

    def _all_chord_endpoints(self, board: Board) -> set:
        if self.chord_endpoints:
            return self.chord_endpoints
        out = set()
        for i, s in enumerate(self.subgames):
            if self.part_done(board, i):
                out.update(s.cycle_and_chord(board)[1])
        return out

    # -- Stage I ---------------------------------------------------------------------

    def _sub(self, board: Board, i: int, tag: str) -> Edge:
        self.annotation = f"I{tag}:S{i}"
        e = self.subgames[i].next_move(board)
        if not (self.masks[i] >> e[0] & 1 and self.masks[i] >> e[1] & 1):
            raise Forfeit(f"subgame {i} left its board", "I")
        return e

    def _stage1(self, board: Board, last: Optional[Edge]) -> Edge:
        if self.stage_moves["I"] >= self.const.stage1_move_cap:
            raise Forfeit("Stage I not finished within its move cap", "I")
        k = self.k
        if last is not None:
            iu, iv = self.where[last[0]], self.where[last[1]]
            if iu == iv and not self.part_done(board, iu):
                return self._sub(board, iu, "(i)")

        D = self.dangerous_pairs(board)
        self.pairs_created.update(D)
        if D:
            D.sort(key=lambda p: (-self.dB(board, p[0], p[1]), p[0], p[1]))
            for z, i in D:
                iz = self.where[z]
                cand = board.free_nbr(z) & self.masks[i]
                best = None
                for w in bits(cand):
                    if board.nbr(self.me, w) & self.masks[iz] or board.degree(self.me, w) >= k:
                        continue
                    key = (-self.dB(board, w, iz), w)
                    if best is None or key < best[0]:
                        best = (key, w)
                if best is not None:
                    self.annotation = "I(ii)"
                    return edge(z, best[1])
            raise Forfeit("no free edge clears a dangerous pair", "I")

        if last is not None:
            u, v = last
            if not (self.part_done(board, self.where[u]) and self.part_done(board, self.where[v])):
                du, dv = self.cross_dB(board, u), self.cross_dB(board, v)
                y, z = (u, v) if (du > dv or (du == dv and u < v)) else (v, u)
                i = self.where[y] if not self.part_done(board, self.where[y]) else self.where[z]
                return self._sub(board, i, "(iii)")

        for i in range(k - 1):
            if not self.part_done(board, i):
                return self._sub(board, i, "(iv)")

        self._finish_stage1(board)
        return self._stage2(board)

    def _finish_stage1(self, board: Board) -> None:
        k = self.k
        self.cycles = []
        for i, s in enumerate(self.subgames):
            cyc, chord = s.cycle_and_chord(board)
            self.cycles.append(cyc)
            self.chord_endpoints.update(chord)
        cross_free = min(
            sum(1 for u in self.partition.parts[i] if not board.nbr(self.me, u) & self.masks[j]) / self.sizes[i]
            for i in range(k - 1)
            for j in range(k - 1)
            if i != j
        ) if k > 2 else 1.0
        budget = self.n + (k - 1) + 5 * k
        self.reports.append(
            StageReport(
                "I",
                {
                    "moves": (self.stage_moves["I"] <= budget, self.stage_moves["I"], budget),
                    "dangerous_pairs": (len(self.pairs_created) <= 5 * k, len(self.pairs_created), 5 * k),
                    "cross_free_fraction": (cross_free >= 0.99 or self.const.profile == "desk", round(cross_free, 4), 0.99),
                },
            )
        )
        self.stage = "II"

    # -- Stage II --------------------------------------------------------------------

    def Y(self, board: Board) -> tuple[list[int], list[int]]:
        k, thr = self.k, self.const.degree_danger_threshold
        yc = sorted(v for v in self.chord_endpoints if board.degree(self.me, v) < k)
        yd = [v for v in range(self.n) if board.degree(self.me, v) < k and board.degree(self.opp, v) >= thr]
        yd.sort(key=lambda v: (-board.degree(self.opp, v), v))
        return yc, yd

    def _a_size(self, board: Board, i: int, j: int) -> int:
        k = self.k
        return sum(
            1 for v in bits(self.masks[i]) if board.degree(self.me, v) < k and not board.nbr(self.me, v) & self.masks[j]
        )

    def _plan_block(self, board: Board, v: int) -> list[int]:
        iv = self.where[v]
        need = self.k - board.degree(self.me, v)
        missing = [j for j in range(self.k - 1) if j != iv and not board.nbr(self.me, v) & self.masks[j]]
        if len(missing) < need:
            raise Forfeit(f"vertex {v} misses only {len(missing)} parts but needs {need} edges", "II")
        # partners in V_j leave A_{j,iv}; send edges where A_{j,iv} is the larger side
        missing.sort(key=lambda j: (-(self._a_size(board, j, iv) - self._a_size(board, iv, j)), j))
        return missing[:need]

    def _stage2(self, board: Board) -> Edge:
        if not self.block:
            yc, yd = self.Y(board)
            order = yd + [v for v in yc if v not in yd]
            if not order:
                self._finish_stage2(board)
                return self._stage3(board, None)
            v = order[0]
            self.block_vertex = v
            self.block = [(v, j) for j in self._plan_block(board, v)]
        v, j = self.block.pop(0)
        yc, yd = self.Y(board)
        ymask = mask_of(yc) | mask_of(yd)
        iv = self.where[v]
        best = None
        for w in bits(board.free_nbr(v) & self.masks[j]):
            if board.nbr(self.me, w) & self.masks[iv] or board.degree(self.me, w) >= self.k:
                continue
            key = (not ymask >> w & 1, -board.degree(self.opp, w), w)
            if best is None or key < best[0]:
                best = (key, w)
        if best is None:
            raise Forfeit(f"no partner for {v} in part {j}", "II")
        self.annotation = "II"
        return edge(v, best[1])

    def _finish_stage2(self, board: Board) -> None:
        self.stage = "III"
        self.construct_b_sets(board)

    # -- Stage III -------------------------------------------------------------------

    def construct_b_sets(self, board: Board) -> None:
        k = self.k
        lo, hi = self.const.b_set_lower, self.const.b_set_upper
        self.A = {}
        for i in range(k - 1):
            for j in range(k - 1):
                if i != j:
                    self.A[i, j] = frozenset(
                        v for v in self.partition.parts[i]
                        if board.degree(self.me, v) < k and not board.nbr(self.me, v) & self.masks[j]
                    )
        self.B = {}
        a_sizes, b_sizes = [], []
        for i in range(k - 1):
            cyc = self.cycles[i]
            L = len(cyc)
            blocked = set()
            for t, v in enumerate(cyc):
                if v in self.chord_endpoints:
                    blocked.update((cyc[t - 1], cyc[(t + 1) % L]))
            Ai = [v for v in cyc if board.degree(self.me, v) == 2]
            a_sizes.append(len(Ai))
            pool = [v for v in Ai if v not in blocked]
            Bi = self.alternate(cyc, pool)
            b_sizes.append(len(Bi))
            others = [j for j in range(k - 1) if j != i]
            groups = {j: Bi[t :: len(others)] for t, j in enumerate(others)}
            for j in others:
                chosen = groups[j][:hi]
                if len(chosen) < lo:
                    raise Forfeit(
                        f"insufficient degree-2 vertices: |B_{i}{j}| = {len(chosen)} < {lo}", "III"
                    )
                self.B[i, j] = frozenset(chosen)
        self.games = {}
        for i in range(k - 1):
            for j in range(i + 1, k - 1):
                spec = MatchingGameSpec.build(
                    self.A[i, j], self.B[i, j], self.A[j, i], self.B[j, i],
                    d=self.const.matching_d, m=self._deficiency(board, i, j), eps=self.const.matching_eps,
                )
                self.games[i, j] = MatchingGame(spec, self.me)
        self.reports.append(self._report_b_sets(board, a_sizes))

    def _deficiency(self, board: Board, i: int, j: int) -> int:
        left, right = mask_of(self.A[i, j]), mask_of(self.A[j, i])
        worst = 0
        for v in self.A[i, j]:
            worst = max(worst, (board.nbr(self.opp, v) & right).bit_count())
        for v in self.A[j, i]:
            worst = max(worst, (board.nbr(self.opp, v) & left).bit_count())
        return worst

    @staticmethod
    def alternate(cycle: list[int], pool: list[int]) -> list[int]:
        """Every other vertex of ``pool`` in cycle order, at cycle distance >= 2 pairwise."""
        L = len(cycle)
        pos = {v: t for t, v in enumerate(cycle)}
        pool = sorted(pool, key=pos.get)

        def close(a: int, b: int) -> bool:
            d = abs(pos[a] - pos[b])
            return min(d, L - d) < 2

        best: list[int] = []
        for parity in (0, 1):
            pick: list[int] = []
            for v in pool[parity::2]:
                if not pick or not close(pick[-1], v):
                    pick.append(v)
            if len(pick) > 1 and close(pick[0], pick[-1]):
                pick.pop()
            if len(pick) > len(best):
                best = pick
        return best

    def _report_b_sets(self, board: Board, a_sizes: list[int]) -> StageReport:
        k, n = self.k, self.n
        lo, hi = self.const.b_set_lower, self.const.b_set_upper
        sizes = [len(b) for b in self.B.values()]
        p1 = all(
            not (self.B[i, j] & self.B[i, l])
            for (i, j) in self.B
            for (i2, l) in self.B
            if i2 == i and l != j
        )
        p3 = True
        for i in range(k - 1):
            cyc = self.cycles[i]
            pos = {v: t for t, v in enumerate(cyc)}
            L = len(cyc)
            members = sorted((v for (a, _), s in self.B.items() if a == i for v in s), key=pos.get)
            for x in range(len(members)):
                for y in range(x + 1, len(members)):
                    d = abs(pos[members[x]] - pos[members[y]])
                    if min(d, L - d) < 2:
                        p3 = False
        bound = 0.9 * n / k
        return StageReport(
            "III",
            {
                "A_i_size": (min(a_sizes) >= bound or self.const.profile == "desk", min(a_sizes), round(bound, 2)),
                "P1": (p1, p1, True),
                "P2": (all(lo <= s <= hi for s in sizes), (min(sizes), max(sizes)), (lo, hi)),
                "P3": (p3, p3, True),
            },
        )

    def dangerous_vertices(self, board: Board) -> list[tuple[int, tuple[int, int]]]:
        thr = self.const.degree_danger_threshold
        out = []
        for (i, j), bset in self.B.items():
            key = (min(i, j), max(i, j))
            g = self.games[key]
            if not (g.covers_mandatory() or self.const.early_danger_service):
                continue
            for v in bset:
                if (
                    v not in g.partner
                    and board.degree(self.me, v) < self.k
                    and board.degree(self.opp, v) >= thr
                ):
                    out.append((v, (i, j)))
        return out

    def _pending(self) -> int:
        """Vertices some unfinished matching game still has to cover."""
        pending = 0
        for g in self.games.values():
            if not g.covers_mandatory():
                pending |= g.unmatched(g.mand1 | g.mand2)
        return pending

    def _settled(self, v: int, board: Board) -> bool:
        """v sits at degree k - 1 and no matching game will add to it."""
        if board.degree(self.me, v) != self.k - 1 or self._pending() >> v & 1:
            return False
        return all(v in g.partner or g.covers_mandatory() for g in self.games.values()
                   if (g.side1 | g.side2) >> v & 1)

    def _settled_partner(self, board: Board, u: int) -> Optional[int]:
        """A settled vertex with a free edge to u."""
        best = None
        for w in bits(board.free_nbr(u) & ~(1 << u)):
            if not self._settled(w, board):
                continue
            key = (-board.degree(self.opp, w), w)
            if best is None or key < best[0]:
                best = (key, w)
        return None if best is None else best[1]

    def _serve_danger(self, board: Board) -> Optional[Edge]:
        D = self.dangerous_vertices(board)
        D.sort(key=lambda t: (-board.degree(self.opp, t[0]), t[0]))
        for u, (i, j) in D:
            g = self.games[min(i, j), max(i, j)]
            # any unmatched vertex across is a legal matching edge; a mandatory
            # partner keeps the optional B-vertices as slack for the game
            cand = [
                w for w in self.A[j, i]
                if w not in g.partner
                and board.is_free(u, w)
                and board.degree(self.me, w) < self.k
                and not board.nbr(self.me, w) & self.masks[i]
            ]
            if cand:
                w = min(cand, key=lambda x: (x in self.B[j, i], -board.degree(self.opp, x), x))
                g.add_edge(u, w)
                self.danger_served += 1
                self.annotation = "III(ii)"
                return edge(u, w)
            # Breaker has cut u off from the opposite B-set: pair it with a
            # settled degree-(k-1) vertex instead, or leave it to Stage IV
            w = self._settled_partner(board, u) if self._settled(u, board) else None
            if w is not None:
                self.danger_served += 1
                self.log.append(f"move {self.moves}: dangerous {u} paired with settled vertex {w}")
                self.annotation = "III(ii)*"
                return edge(u, w)
            if u not in self.unserved:
                self.unserved.add(u)
                self.log.append(f"move {self.moves}: dangerous {u} has no partner yet")
        return None

    def _stage3(self, board: Board, last: Optional[Edge]) -> Edge:
        # the desk profile answers danger first: at small n a Breaker star can
        # otherwise cut a B-vertex off from every partner before its game ends
        if self.const.early_danger_service:
            e = self._serve_danger(board)
            if e is not None:
                return e
        if last is not None:
            u, v = last
            for (i, j), g in self.games.items():
                a, b = g.side1, g.side2
                if ((a >> u & 1 and b >> v & 1) or (a >> v & 1 and b >> u & 1)) and not g.covers_mandatory():
                    self.annotation = f"III(i):M{i}{j}"
                    return g.maker_move(board)
        e = self._serve_danger(board)
        if e is not None:
            return e

        for (i, j), g in sorted(self.games.items()):
            if not g.covers_mandatory():
                self.annotation = f"III(iii):M{i}{j}"
                return g.maker_move(board)

        self._finish_stage3(board)
        return self._enter_stage4(board)

    def _finish_stage3(self, board: Board) -> None:
        k = self.k
        degs = board.degrees(self.me)
        bad = [v for v in range(self.n) if degs[v] not in (k - 1, k)]
        U = mask_of(v for v in range(self.n) if degs[v] == k - 1)
        bound = self.n / (3 * k**6)
        self.reports.append(
            StageReport(
                "IV",
                {
                    "degrees_k-1_or_k": (not bad, bad[:10], "none"),
                    "U_size": (U.bit_count() >= bound or self.const.profile == "desk", U.bit_count(), round(bound, 3)),
                },
            )
        )
        if bad:
            raise Forfeit(f"vertices outside degree {{k-1, k}} at Stage IV: {bad[:5]}", "IV")
        self.stage = "IV"
        self.U0 = U
        self.sub = self.make_stage4(board, U)

    # -- Stage IV --------------------------------------------------------------------

    def make_stage4(self, board: Board, U: int) -> WeakMinDeg:
        """S_H on H = (K_n minus B)[U]; pairs Maker already owns are not board edges."""
        allowed = [0] * self.n
        for v in bits(U):
            allowed[v] = board.free_nbr(v) & U
        return WeakMinDeg(self.n, bits(U), allowed, target=self.k, me=self.me)

    def _enter_stage4(self, board: Board) -> Edge:
        return self._stage4(board, None)

    def _stage4(self, board: Board, last: Optional[Edge]) -> Edge:
        self.annotation = "IV"
        if self.sub.done(board):
            raise Forfeit("minimum degree k already reached", "IV")
        try:
            return self.sub.move(board, last)
        except Forfeit as f:
            e = self._rescue(board)
            if e is None:
                raise
            self.rescues += 1
            self.log.append(f"move {self.moves}: Stage IV stuck ({f}); rescue edge {e}")
            self.annotation = "IV*"
            return e

    def _rescue(self, board: Board) -> Optional[Edge]:
        """Cover a stuck degree-(k-1) vertex with any free edge.

        At small n the set U can be so thin that Breaker isolates a vertex
        inside H; an edge leaving U still finishes it, at the price of one
        Maker vertex of degree k + 1.
        """
        V0 = self.sub.v0(board)
        stuck = sorted(bits(V0), key=lambda v: ((board.free_nbr(v) & V0).bit_count(), v))
        for u in stuck:
            free = board.free_nbr(u) & ~(1 << u)
            if not free:
                continue
            w = min(bits(free), key=lambda x: (not V0 >> x & 1, board.degree(self.me, x), x))
            return edge(u, w)
        return None

    # -- results -----------------------------------------------------------------------

    def certificate(self, board: Board) -> Optional[GkCertificate]:
        """G_k membership of Maker's graph; None for k = 2, where G_k is undefined."""
        if self.k == 2:
            return None
        cycles = self.cycles or [
            s.cycle_and_chord(board)[0] if s.done(board) else list(s.verts) for s in self.subgames
        ]
        g = SimpleGraph.from_board(board, self.me)
        return verify_membership(g, self.partition, self.k, cycles)

    def stage_certificate(self) -> list[StageReport]:
        return list(self.reports)
