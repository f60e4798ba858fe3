import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posgame.adversaries import GameContext, Scripted, make_adversary
from posgame.board import Board, Owner
from posgame.engine import GameSpec, Referee, build, dense_graph, run_game
from posgame.errors import Forfeit
from posgame.mindeg import StrongMinDeg, WeakMinDeg


def replay_board(t) -> Board:
    b = Board(t.header["n"])
    for mv in t.moves:
        b.claim(Owner.TWO if mv["player"] == "B" else Owner.ONE, *mv["edge"])
    return b


class TestWeakMove:
    def test_first_reply_on_k6(self):
        b = Board(6)
        b.claim(Owner.TWO, 0, 1)
        assert WeakMinDeg(6).move(b, (0, 1)) == (0, 2)

    def test_forced_finish(self):
        b = Board(4)
        b.claim(Owner.ONE, 0, 1)
        s = WeakMinDeg(4)
        assert s.move(b) == (2, 3)
        b.claim(Owner.ONE, 2, 3)
        assert s.done(b)

    def test_potential(self):
        b = Board(8)
        s = WeakMinDeg(8)
        assert s.potential(b) == 0
        b.claim(Owner.TWO, 3, 5)
        assert s.potential(b) == 2

    def test_no_isolated_vertex_forfeits(self):
        b = Board(4)
        b.claim(Owner.ONE, 0, 1)
        b.claim(Owner.ONE, 2, 3)
        with pytest.raises(Forfeit):
            WeakMinDeg(4).move(b)

    def test_sub_board_target(self):
        # "isolated" means degree below the target on a vertex subset
        b = Board(6)
        b.claim(Owner.ONE, 0, 1)
        s = WeakMinDeg(6, vertices=[0, 1, 2, 3], target=2)
        assert s.v0(b) == 0b1111
        e = s.move(b)
        assert set(e) <= {0, 1, 2, 3} and b.is_free(*e)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_dense_graph_min_degree(m):
    G = dense_graph(50, m, seed=4)
    assert min(g.bit_count() for g in G) >= 50 - m
    assert all(G[u] >> v & 1 == G[v] >> u & 1 for u in range(50) for v in range(50))


def test_greedy_at_n100_m3():
    t = run_game(GameSpec("weak-mindeg", 100, m=3, adversary="greedy"))
    assert t.winner == "M"
    assert t.result["mover_moves"] <= 51
    assert replay_board(t).min_degree(Owner.ONE) >= 1
    certs = t.certificates
    assert certs["star_violations"] == []
    assert certs["D0"] <= certs["D0_bound"]


@settings(max_examples=25, deadline=None)
@given(n=st.integers(10, 60), m=st.integers(1, 3), seed=st.integers(0, 1000),
       adv=st.sampled_from(["random", "greedy", "danger", "racer", "cut"]))
def test_weak_bound_holds(n, m, seed, adv):
    t = run_game(GameSpec("weak-mindeg", n, m=m, adversary=adv, seed=seed))
    assert t.result["outcome"] == "win" and t.winner == "M"
    assert t.result["mover_moves"] <= n // 2 + 1
    assert t.certificates["star_violations"] == []


class TestStrong:
    def test_odd_n_is_the_weak_strategy(self):
        n = 21
        board = Board(n)
        strong = StrongMinDeg(n, board=board)
        weak = WeakMinDeg(n)
        adv = make_adversary("random", 5)
        ctx = GameContext(n)
        last = None
        while not weak.done(board):
            e1 = strong.move(board, last)
            assert e1 == weak.move(board, last)
            board.claim(Owner.ONE, *e1)
            if weak.done(board):
                break
            last = adv.move(board, ctx)
            board.claim(Owner.TWO, *last)

    def test_cleanup_of_y(self):
        b = Board(10)
        s = StrongMinDeg(10, board=b)
        b.claim(Owner.ONE, *s.move(b, None))
        b.claim(Owner.TWO, 4, 5)
        e = s.move(b, (4, 5))
        assert (s.x, s.y) == (4, 5)
        assert s.A == 1 << 5
        assert 5 in e and 4 not in e
        b.claim(Owner.ONE, *e)
        b.claim(Owner.TWO, 6, 8)
        s.move(b, (6, 8))
        assert s.stage == "II"

    def test_xz_taken_by_blue(self):
        n = 20
        base = run_game(GameSpec("strong-mindeg", n, adversary="racer"))
        assert base.moves[-1]["stage"] == "IV"
        xz = base.moves[-1]["edge"]
        blue = [mv["edge"] for mv in base.moves if mv["player"] == "B"]
        script = blue[:-1] + [xz, [5, 16], [6, 17], [7, 13]]
        spec = GameSpec("strong-mindeg", n, adversary="scripted", script=script)
        setup = build(spec)
        ref = Referee(spec, setup, Scripted(script))
        res = ref.run()
        x = setup.strategy.x
        assert res["winner"] == "R"
        assert res["mover_moves"] == n // 2 + 1
        assert ref.board.degree(Owner.TWO, x) >= 2
        assert ref.board.owner(*xz) is Owner.TWO

    @pytest.mark.parametrize("adv", ["random", "greedy", "racer", "danger"])
    def test_red_matching_through_stage_three(self, adv):
        n = 40
        t = run_game(GameSpec("strong-mindeg", n, adversary=adv, seed=2))
        b = Board(n)
        for mv in t.moves:
            b.claim(Owner.TWO if mv["player"] == "B" else Owner.ONE, *mv["edge"])
            if mv["player"] == "R" and mv["stage"] in ("I", "II", "III"):
                assert b.max_degree(Owner.ONE) <= 1
        assert t.winner == "R"
        assert t.result["mover_moves"] <= n // 2 + 1
        assert t.certificates["blue_min_degree"] < 1
