"""The bipartite matching game G(V1, U1; V2, U2; d).

Maker must end with a matching that covers every vertex outside the
optional sets U1, U2, covers every vertex on which Breaker has piled at
least d edges, and leaves at least half of each U-set unmatched.  Maker's
three rules, in priority order:

  (1) some unmatched vertex is dangerous (Breaker degree >= d): match it;
  (2) match two unmatched mandatory vertices, one from each side;
  (3) match an unmatched mandatory vertex to any unmatched vertex.

Choices the rules leave open go to the most threatened vertex first
(largest Breaker degree into the other side), then to the lowest index,
so an untouched board yields the lexicographically least edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .board import Board, Edge, Owner, bits, edge, mask_of
from .errors import Forfeit


@dataclass(frozen=True)
class MatchingGameSpec:
    V1: frozenset
    U1: frozenset
    V2: frozenset
    U2: frozenset
    d: int
    m: int = 0
    eps: float = 0.1

    @classmethod
    def build(cls, V1: Iterable[int], U1: Iterable[int], V2: Iterable[int], U2: Iterable[int], d: int, m: int = 0, eps: float = 0.1):
        return cls(frozenset(V1), frozenset(U1), frozenset(V2), frozenset(U2), d, m, eps)

    def __post_init__(self):
        if self.V1 & self.V2:
            raise ValueError("V1 and V2 must be disjoint")
        if not (self.U1 <= self.V1 and self.U2 <= self.V2):
            raise ValueError("U-sets must lie inside their sides")
        if self.d < 1:
            raise ValueError("danger threshold d must be positive")

    def hypotheses(self, board: Optional[Board] = None, blocked: Optional[Owner] = None) -> dict[str, bool]:
        """Evaluate the size/degree hypotheses; degrees use edges not owned by ``blocked``."""
        a, b = len(self.V1), len(self.V2)
        eps = self.eps
        out = {
            "eps_window": 8 / self.d <= eps <= 0.1,
            "P1": a <= b <= (1 + eps) * a,
            "U1_window": eps * a <= len(self.U1) <= 2 * eps * a,
            "U2_window": eps * b <= len(self.U2) <= 2 * eps * b,
        }
        if board is None or blocked is None:
            out["P2"] = out["P3"] = True
        else:
            m2, m1 = mask_of(self.V2), mask_of(self.V1)
            out["P2"] = all((m2 & ~board.nbr(blocked, u)).bit_count() >= b - self.m for u in self.V1)
            out["P3"] = all((m1 & ~board.nbr(blocked, u)).bit_count() >= a - self.m for u in self.V2)
        return out


@dataclass
class MatchingGame:
    """Maker's state: the matching M_G, dangerous set D and rule counters."""

    spec: MatchingGameSpec
    me: Owner = Owner.ONE
    partner: dict = field(default_factory=dict)
    D: set = field(default_factory=set)
    rule_counts: dict = field(default_factory=lambda: {1: 0, 2: 0, 3: 0})
    moves: int = 0
    last_rule: int = 0

    def __post_init__(self):
        s = self.spec
        self.side1 = mask_of(s.V1)
        self.side2 = mask_of(s.V2)
        self.mand1 = mask_of(s.V1 - s.U1)
        self.mand2 = mask_of(s.V2 - s.U2)
        self.opp = self.me.other

    @property
    def matching(self) -> list[Edge]:
        return sorted({edge(u, v) for u, v in self.partner.items()})

    def other_side(self, v: int) -> int:
        return self.side2 if self.side1 >> v & 1 else self.side1

    def breaker_degree(self, board: Board, v: int) -> int:
        return (board.nbr(self.opp, v) & self.other_side(v)).bit_count()

    def unmatched(self, mask: int) -> int:
        for v in self.partner:
            mask &= ~(1 << v)
        return mask

    def add_edge(self, u: int, v: int) -> None:
        if u in self.partner or v in self.partner:
            raise ValueError(f"{(u, v)} would break the matching")
        self.partner[u] = v
        self.partner[v] = u
        self.D.discard(u)
        self.D.discard(v)

    def refresh_dangerous(self, board: Board) -> set:
        d = self.spec.d
        everyone = self.side1 | self.side2
        self.D = {v for v in bits(self.unmatched(everyone)) if self.breaker_degree(board, v) >= d}
        return self.D

    def covers_mandatory(self) -> bool:
        return not self.unmatched(self.mand1 | self.mand2)

    def over(self, board: Board) -> bool:
        self.refresh_dangerous(board)
        return self.covers_mandatory() and not self.D

    def _pick(self, board: Board, pool: int) -> list[int]:
        return sorted(bits(pool), key=lambda v: (-self.breaker_degree(board, v), v))

    def maker_move(self, board: Board) -> Edge:
        self.refresh_dangerous(board)
        free_unmatched = self.unmatched(self.side1 | self.side2)
        mand = self.unmatched(self.mand1 | self.mand2)

        if self.D:
            for u in self._pick(board, mask_of(self.D)):
                cand = board.free_nbr(u) & self.other_side(u) & free_unmatched
                if cand:
                    pref = (cand & mask_of(self.D)) or (cand & mand) or cand
                    v = self._pick(board, pref)[0]
                    return self._claim(u, v, 1)
            raise Forfeit("a dangerous vertex has no free edge to an unmatched vertex", "rule 1")

        for u in self._pick(board, mand):
            cand = board.free_nbr(u) & self.other_side(u) & mand
            if cand:
                v = self._pick(board, cand)[0]
                return self._claim(u, v, 2)

        for u in self._pick(board, mand):
            cand = board.free_nbr(u) & self.other_side(u) & free_unmatched
            if cand:
                v = self._pick(board, cand)[0]
                return self._claim(u, v, 3)
        if mand:
            raise Forfeit("no edge satisfies any rule", "rule 3")
        raise Forfeit("game already over", "done")

    def _claim(self, u: int, v: int, rule: int) -> Edge:
        self.add_edge(u, v)
        self.rule_counts[rule] += 1
        self.last_rule = rule
        self.moves += 1
        return edge(u, v)

    def move(self, board: Board, last: Optional[Edge] = None) -> Edge:
        return self.maker_move(board)

    def done(self, board: Board) -> bool:
        return self.over(board)

    @property
    def stage(self) -> str:
        return f"rule{self.last_rule}" if self.last_rule else "start"

    def goals_status(self, board: Board) -> dict[str, bool]:
        """Evaluate goals (i)-(iv) on the current Maker and Breaker graphs."""
        s = self.spec
        every = s.V1 | s.V2
        both = self.side1 | self.side2
        deg = {v: (board.nbr(self.me, v) & self.other_side(v)).bit_count() for v in every}
        is_matching = all(d <= 1 for d in deg.values()) and all(
            (board.nbr(self.me, v) & both) == (board.nbr(self.me, v) & self.other_side(v)) for v in every
        )
        return {
            "i": is_matching,
            "ii": all(deg[v] == 1 for v in (s.V1 - s.U1) | (s.V2 - s.U2)),
            "iii": all(deg[v] == 1 for v in every if self.breaker_degree(board, v) >= s.d),
            "iv": 2 * sum(1 for u in s.U1 if deg[u] == 0) >= len(s.U1)
            and 2 * sum(1 for u in s.U2 if deg[u] == 0) >= len(s.U2),
        }

    def rule_bounds(self) -> dict[str, bool]:
        """The proof's usage bounds for rules (1) and (3)."""
        s = self.spec
        cap1 = min(len(s.U1), len(s.U2)) / 4
        return {
            "rule1": self.rule_counts[1] <= cap1,
            "rule3": self.rule_counts[3] <= 2 * (s.m + s.d),
            "length": self.moves <= len(s.V1),
        }
