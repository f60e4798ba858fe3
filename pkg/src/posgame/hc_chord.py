"""Hamilton cycle with a chord on a vertex subset (the H+ subgame).

``ChordSubgame`` is a reference heuristic with the contract the
k-connectivity strategy relies on: finish a spanning cycle of the part plus
one chord, spending exactly |V_i| + 1 edges when it is not disrupted, and
never putting the chord on a forbidden vertex.

Plan of the heuristic:

* grow a path and close it into a cycle C once it holds about half of the
  part (any path of >= 3 vertices will do if its closing edge is free);
* grow the remaining vertices into paths and join them into a single path Q,
  always serving the endpoint with the fewest free options first;
* insert Q into C: claim c_i - q_1, then q_b - c_{i-1} or q_b - c_{i+1}.  The
  second step has two choices, so one Breaker reply cannot stop it, and the
  dropped cycle edge becomes the chord.

If Breaker keeps killing the closing edge of the growing path, the fallback
is a "lollipop": claim an edge from a path end to an interior path vertex,
which makes a cycle with a hanging tail that is later closed back next to
the attachment vertex.

``MinimaxChord`` plays the same subgame optimally by exhaustive search on
parts of at most six vertices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Union

from .board import Board, Edge, Owner, bits, edge, lowest, mask_of
from .errors import BoardTooLarge, Forfeit
from .graphs import SimpleGraph, is_hamilton_cycle_with_chord

ForbiddenSpec = Union[None, Iterable[int], Callable[[Board], int]]


@dataclass
class Piece:
    """A component of Maker's graph inside the part."""

    kind: str  # "path", "cycle", "tailed", "done" or "broken"
    mask: int
    order: list = field(default_factory=list)  # path order / cycle order from the attachment
    tail: list = field(default_factory=list)  # tailed: attachment's tail neighbour ... tail end

    @property
    def ends(self) -> tuple[int, int]:
        return self.order[0], self.order[-1]

    @property
    def size(self) -> int:
        return self.mask.bit_count()


def _walk(adj: dict[int, int], start: int) -> list[int]:
    """Follow Maker edges from ``start`` until stuck or back at a visited vertex."""
    out, seen, prev, cur = [start], 1 << start, -1, start
    while True:
        nxt = adj[cur] & ~(1 << prev) if prev >= 0 else adj[cur]
        if not nxt:
            return out
        w = lowest(nxt)
        if seen >> w & 1:
            return out
        out.append(w)
        seen |= 1 << w
        prev, cur = cur, w


class ChordSubgame:
    """Reference strategy for building a Hamilton cycle plus chord on one part."""

    name = "reference"

    def __init__(self, vertices: Iterable[int], me: Owner = Owner.ONE, forbidden: ForbiddenSpec = None):
        self.verts = tuple(sorted(vertices))
        self.S = mask_of(self.verts)
        self.size = len(self.verts)
        if self.size < 4:
            raise ValueError("a cycle with a chord needs at least 4 vertices")
        self.me = Owner(me)
        self.opp = self.me.other
        self._forbidden = forbidden
        self.target = max(3, min(self.size - 1, (self.size + 1) // 2))
        self.moves = 0
        self.stage = "grow"

    # -- views ------------------------------------------------------------------

    def forbidden(self, board: Board) -> int:
        f = self._forbidden
        if f is None:
            return 0
        if callable(f):
            return f(board) & self.S
        return mask_of(f) & self.S

    def _free(self, board: Board, v: int) -> int:
        return board.free_nbr(v) & self.S

    def graph(self, board: Board) -> SimpleGraph:
        g = SimpleGraph(board.n)
        g.adj = [board.nbr(self.me, v) & self.S if self.S >> v & 1 else 0 for v in range(board.n)]
        return g

    def done(self, board: Board) -> bool:
        return is_hamilton_cycle_with_chord(self.graph(board), self.S)[0]

    def cycle_and_chord(self, board: Board) -> tuple[list[int], Edge]:
        g = self.graph(board)
        ok, chord = is_hamilton_cycle_with_chord(g, self.S)
        if not ok:
            raise ValueError("part is not a cycle with a chord yet")
        g.remove_edge(*chord)
        adj = {v: g.adj[v] for v in self.verts}
        return _walk(adj, self.verts[0]), chord

    # -- structure ------------------------------------------------------------------

    def pieces(self, board: Board) -> list[Piece]:
        adj = {v: board.nbr(self.me, v) & self.S for v in self.verts}
        seen, out = 0, []
        for v in self.verts:
            if seen >> v & 1:
                continue
            comp, frontier = 1 << v, 1 << v
            while frontier:
                nxt = 0
                for w in bits(frontier):
                    nxt |= adj[w]
                frontier = nxt & ~comp
                comp |= frontier
            seen |= comp
            out.append(self._classify(comp, adj))
        return out

    def _classify(self, comp: int, adj: dict[int, int]) -> Piece:
        vs = list(bits(comp))
        deg = {v: adj[v].bit_count() for v in vs}
        edges = sum(deg.values()) // 2
        size = len(vs)
        if size == 1:
            return Piece("path", comp, vs)
        if edges == size - 1 and max(deg.values()) <= 2:
            start = min(v for v in vs if deg[v] == 1)
            return Piece("path", comp, _walk(adj, start))
        if edges == size and all(d == 2 for d in deg.values()):
            return Piece("cycle", comp, _walk(adj, vs[0]))
        heavy = [v for v in vs if deg[v] == 3]
        leaves = [v for v in vs if deg[v] == 1]
        if edges == size and len(heavy) == 1 and len(leaves) == 1 and all(d <= 3 for d in deg.values()):
            c, t = heavy[0], leaves[0]
            tail = _walk(adj, t)
            tail = tail[: tail.index(c)] if c in tail else tail
            tail.reverse()  # attachment's neighbour first, tail end last
            ring = {v: adj[v] & ~mask_of(tail) for v in vs if v not in tail}
            return Piece("tailed", comp, _walk(ring, c), tail)
        if edges == size + 1 and comp == self.S and self.done_mask(adj):
            return Piece("done", comp, vs)
        return Piece("broken", comp, vs)

    def done_mask(self, adj: dict[int, int]) -> bool:
        g = SimpleGraph(max(self.verts) + 1)
        for v, a in adj.items():
            g.adj[v] = a
        return is_hamilton_cycle_with_chord(g, self.S)[0]

    # -- the move -----------------------------------------------------------------------

    def next_move(self, board: Board) -> Edge:
        pieces = self.pieces(board)
        kinds = [p.kind for p in pieces]
        if "done" in kinds:
            raise Forfeit("part already complete", "hc")
        if "broken" in kinds:
            raise Forfeit("Maker's graph on the part left the cycle-plus-chord shape", "hc")
        if (self.S & ~self.forbidden(board)).bit_count() < 2:
            raise Forfeit("fewer than two vertices may carry the chord", "hc")
        rings = [p for p in pieces if p.kind in ("cycle", "tailed")]
        paths = [p for p in pieces if p.kind == "path"]
        if len(rings) > 1:
            raise Forfeit("two cycles inside one part", "hc")
        if not rings:
            self.stage = "grow"
            e = self._grow(board, paths)
        else:
            ring = rings[0]
            if ring.kind == "cycle":
                if not paths:
                    self.stage = "chord"
                    e = self._chord(board, ring)
                elif len(paths) == 1:
                    self.stage = "insert"
                    e = self._insert(board, ring, paths[0])
                else:
                    self.stage = "join"
                    e = self._join(board, paths, ring, None)
            else:
                if not paths:
                    self.stage = "close"
                    e = self._close_tail(board, ring)
                else:
                    self.stage = "join"
                    e = self._join(board, paths, ring, ring.tail[-1])
        self.moves += 1
        return e

    def move(self, board: Board, last: Optional[Edge] = None) -> Edge:
        return self.next_move(board)

    # -- helpers ---------------------------------------------------------------------

    def _chord_ok(self, forb: int, a: int, b: int) -> bool:
        return not (forb >> a & 1 or forb >> b & 1)

    def _has_slot(self, ring: list[int], forb: int) -> bool:
        return any(self._chord_ok(forb, ring[i - 1], ring[i]) for i in range(len(ring)))

    def _options(self, board: Board, v: int, targets: int) -> int:
        return (self._free(board, v) & targets).bit_count()

    def _grow(self, board: Board, paths: list[Piece]) -> Edge:
        m = self.size
        forb = self.forbidden(board)
        # the chord will replace a ring edge, so the ring needs one with both ends allowed
        closable = [
            p for p in paths
            if self.target <= p.size <= m - 1 and board.is_free(*p.ends) and self._has_slot(p.order, forb)
        ]
        if closable:
            best = max(closable, key=lambda p: (p.size, -p.order[0]))
            return edge(*best.ends)

        ends = 0
        owner: dict[int, int] = {}
        for idx, p in enumerate(paths):
            for v in p.ends:
                ends |= 1 << v
                owner[v] = idx

        def opt(v: int) -> int:
            return self._options(board, v, ends & ~paths[owner[v]].mask)

        joins = []
        for v in bits(ends):
            pv = paths[owner[v]]
            for w in bits(self._free(board, v) & ends):
                if w > v and owner[w] != owner[v] and pv.size + paths[owner[w]].size <= m - 1:
                    joins.append((v, w))
        if not joins:
            return self._lollipop(board, paths)

        opts = {v: opt(v) for v in bits(ends)}
        if forb and not any(self._chord_ok(forb, a, b) for p in paths for a, b in zip(p.order, p.order[1:])):
            slots = [(x, y) for x, y in joins if self._chord_ok(forb, x, y)]
            if slots:
                return edge(*min(slots, key=lambda j: (opts[j[0]] + opts[j[1]], j)))
        critical = [v for v in opts if opts[v] <= 2 and any(v in j for j in joins)]
        if critical:
            u = min(critical, key=lambda v: (opts[v], v))
            partners = [a if b == u else b for a, b in joins if u in (a, b)]
            w = min(partners, key=lambda x: (opts[x], x))
            return edge(u, w)

        if all(p.size == 1 for p in paths):
            main = paths[owner[min(opts, key=lambda v: (opts[v], v))]]
        else:
            main = max(paths, key=lambda p: (p.size, -p.order[0]))
        scored = []
        for a, b in joins:
            for x, y in ((a, b), (b, a)):
                if not main.mask >> x & 1:
                    continue
                other = paths[owner[y]]
                new_size = main.size + other.size
                far_main = main.ends[1] if x == main.ends[0] else main.ends[0]
                far_other = other.ends[1] if y == other.ends[0] else other.ends[0]
                ready = new_size >= self.target and board.is_free(far_main, far_other) if far_main != far_other else False
                scored.append(((not ready, opts[x], opts[y], x, y), edge(x, y)))
        if scored:
            return min(scored)[1]
        u = min((v for j in joins for v in j), key=lambda v: (opts[v], v))
        partners = [a if b == u else b for a, b in joins if u in (a, b)]
        return edge(u, min(partners, key=lambda x: (opts[x], x)))

    def _lollipop(self, board: Board, paths: list[Piece]) -> Edge:
        forb = self.forbidden(board)
        rest = 0
        for p in paths:
            rest |= p.mask
        best = None
        for p in paths:
            L = p.size
            if L < 4:
                continue
            order = p.order
            for seq in (order, order[::-1]):
                end = seq[0]
                for j in range(2, L - 1):
                    attach = seq[j]
                    if not board.is_free(end, attach):
                        continue
                    targets = [seq[j - 1], end]
                    good = [t for t in targets if self._chord_ok(forb, attach, t)]
                    outside = rest & ~p.mask
                    tail_end = seq[-1]
                    score = sum(board.is_free(tail_end, t) for t in good)
                    score += sum(
                        all(board.is_free(x, t) for t in good) for x in bits(outside)
                    )
                    key = (score, -j, -end)
                    if good and (best is None or key > best[0]):
                        best = (key, edge(end, attach))
        if best is None:
            raise Forfeit("no extension available", "hc")
        return best[1]

    def _join(self, board: Board, paths: list[Piece], ring: Piece, anchor: Optional[int]) -> Edge:
        forb = self.forbidden(board)
        ends, owner = 0, {}
        for idx, p in enumerate(paths):
            for v in p.ends:
                ends |= 1 << v
                owner[v] = idx
        if anchor is not None:
            ends |= 1 << anchor
            owner[anchor] = -1
            c = ring.order[0]
            closers = [t for t in (ring.order[1], ring.order[-1]) if self._chord_ok(forb, c, t)]
            sink = mask_of(closers)
        else:
            sink = ring.mask

        def comp_mask(v: int) -> int:
            return ring.mask if owner[v] == -1 else paths[owner[v]].mask

        opts = {v: self._options(board, v, (ends & ~comp_mask(v)) | sink) for v in bits(ends)}
        joins = []
        for v in bits(ends):
            for w in bits(self._free(board, v) & ends):
                if w > v and owner[w] != owner[v]:
                    joins.append((v, w))
        if not joins:
            raise Forfeit("no join between path ends is free", "hc")

        final = len(paths) == 2 if anchor is None else len(paths) == 1
        if final:
            scored = []
            for a, b in joins:
                q = self._after_join(paths, owner, a, b, anchor)
                if anchor is None:
                    quality = self._insertion_quality(board, ring, q, forb)
                else:
                    quality = sum(board.is_free(q, t) for t in closers)
                    quality = (quality, quality)
                scored.append(((-quality[0], -quality[1], min(opts[a], opts[b]), a, b), edge(a, b)))
            return min(scored)[1]

        u = min((v for j in joins for v in j), key=lambda v: (opts[v], v))
        partners = [a if b == u else b for a, b in joins if u in (a, b)]
        w = min(partners, key=lambda x: (opts[x], x))
        return edge(u, w)

    def _after_join(self, paths, owner, a, b, anchor):
        """The merged path (as an order) or, in tail mode, the new tail end."""
        if anchor is not None:
            x = b if a == anchor else a
            if anchor not in (a, b):
                return anchor  # two outside paths joined; tail end unchanged
            p = paths[owner[x]]
            return p.ends[1] if x == p.ends[0] else p.ends[0]
        pa, pb = paths[owner[a]], paths[owner[b]]
        left = pa.order if pa.order[-1] == a else pa.order[::-1]
        right = pb.order if pb.order[0] == b else pb.order[::-1]
        return left + right

    def _insertion_options(self, board: Board, ring: Piece, q: list[int], forb: int):
        C = ring.order
        L = len(C)
        out = []
        orientations = [(q[0], q[-1])] if len(q) == 1 else [(q[0], q[-1]), (q[-1], q[0])]
        for i, c in enumerate(C):
            prev, nxt = C[i - 1], C[(i + 1) % L]
            for s, o in orientations:
                if not board.is_free(c, s):
                    continue
                partners = []
                if board.is_free(o, prev) and self._chord_ok(forb, prev, c):
                    partners.append(edge(o, prev))
                if board.is_free(o, nxt) and self._chord_ok(forb, c, nxt):
                    partners.append(edge(o, nxt))
                out.append((edge(c, s), partners))
        return out

    def _insertion_quality(self, board: Board, ring: Piece, q: list[int], forb: int) -> tuple[int, int]:
        opts = self._insertion_options(board, ring, q, forb)
        return sum(len(p) >= 2 for _, p in opts), sum(len(p) >= 1 for _, p in opts)

    def _insert(self, board: Board, ring: Piece, path: Piece) -> Edge:
        forb = self.forbidden(board)
        opts = self._insertion_options(board, ring, path.order, forb)
        scored = [(-len(p), e) for e, p in opts if p]
        if not scored:
            raise Forfeit("no way to insert the last path into the cycle", "hc")
        return min(scored)[1]

    def _close_tail(self, board: Board, ring: Piece) -> Edge:
        forb = self.forbidden(board)
        c, t = ring.order[0], ring.tail[-1]
        for w in sorted((ring.order[1], ring.order[-1])):
            if board.is_free(t, w) and self._chord_ok(forb, c, w):
                return edge(t, w)
        raise Forfeit("both closing edges next to the attachment are gone", "hc")

    def _chord(self, board: Board, ring: Piece) -> Edge:
        forb = self.forbidden(board)
        C = ring.order
        L = len(C)
        pos = {v: i for i, v in enumerate(C)}
        for a in C and sorted(C):
            if forb >> a & 1:
                continue
            for b in bits(self._free(board, a) & ~forb):
                d = abs(pos[a] - pos[b])
                if b > a and min(d, L - d) >= 2:
                    return edge(a, b)
        raise Forfeit("no admissible chord", "hc")


class MinimaxChord:
    """Optimal play of the subgame on at most six vertices (exhaustive search)."""

    name = "minimax"
    cap = 6

    def __init__(self, vertices: Iterable[int], me: Owner = Owner.ONE, forbidden: ForbiddenSpec = None):
        self.verts = tuple(sorted(vertices))
        if len(self.verts) > self.cap:
            raise BoardTooLarge(f"minimax is limited to {self.cap} vertices")
        if len(self.verts) < 4:
            raise ValueError("a cycle with a chord needs at least 4 vertices")
        self.S = mask_of(self.verts)
        self.me = Owner(me)
        self.opp = self.me.other
        self.moves = 0
        self.stage = "minimax"
        from .solver import chord_game

        self.game = chord_game(len(self.verts))

    def _local(self, board: Board) -> tuple[int, int]:
        mk = bk = 0
        for bit, (a, b) in enumerate(self.game.edges):
            own = board.owner(self.verts[a], self.verts[b])
            if own == self.me:
                mk |= 1 << bit
            elif own == self.opp:
                bk |= 1 << bit
        return mk, bk

    def done(self, board: Board) -> bool:
        mk, _ = self._local(board)
        return self.game.win(mk)

    def value(self, board: Board) -> Optional[int]:
        mk, bk = self._local(board)
        return self.game.value(mk, bk, maker_to_move=True)

    def next_move(self, board: Board) -> Edge:
        mk, bk = self._local(board)
        if self.game.win(mk):
            raise Forfeit("part already complete", "minimax")
        best = self.game.best_move(mk, bk)
        if best is None:
            raise Forfeit("no free edge", "minimax")
        a, b = self.game.edges[best]
        self.moves += 1
        return edge(self.verts[a], self.verts[b])

    def move(self, board: Board, last: Optional[Edge] = None) -> Edge:
        return self.next_move(board)
