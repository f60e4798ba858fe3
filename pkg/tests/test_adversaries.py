import pytest

from posgame.adversaries import (
    KINDS,
    CutAttacker,
    GameContext,
    GreedyDegree,
    MinimaxAdversary,
    RandomAdversary,
    Scripted,
    make_adversary,
)
from posgame.board import Board, Owner
from posgame.engine import GameSpec, run_game
from posgame.errors import BoardTooLarge, ScriptExhausted


def busy_board():
    b = Board(12)
    for u, v in [(0, 1), (2, 3), (4, 5)]:
        b.claim(Owner.ONE, u, v)
    for u, v in [(0, 2), (1, 3), (6, 7)]:
        b.claim(Owner.TWO, u, v)
    return b


class TestRandom:
    def test_reproducible(self):
        ctx = GameContext(12)
        a = RandomAdversary(7).move(busy_board(), ctx)
        b = RandomAdversary(7).move(busy_board(), ctx)
        assert a == b

    def test_respects_allowed(self):
        allowed = [0] * 6
        allowed[0], allowed[5] = 1 << 5, 1
        ctx = GameContext(6, allowed=allowed)
        assert RandomAdversary(1).move(Board(6), ctx) == (0, 5)


@pytest.mark.parametrize("kind", sorted(set(KINDS) - {"minimax"}))
def test_only_free_edges(kind):
    b = busy_board()
    ctx = GameContext(12, k=2, parts=[0b010101010101, 0b101010101010])
    adv = make_adversary(kind, 3)
    for _ in range(30):
        e = adv.move(b, ctx)
        assert b.is_free(*e)
        b.claim(Owner.TWO, *e)


def test_greedy_builds_a_star():
    b = Board(8)
    ctx = GameContext(8)
    adv = GreedyDegree()
    first = adv.move(b, ctx)
    b.claim(Owner.TWO, *first)
    second = adv.move(b, ctx)
    assert set(first) & set(second)


def test_cut_attacker_targets_foreign_part():
    b = Board(10)
    parts = [0b0000011111, 0b1111100000]
    u, v = CutAttacker().move(b, GameContext(10, k=3, parts=parts))
    assert (parts[0] >> u & 1) != (parts[0] >> v & 1)


def test_minimax_breaker_cannot_stop_connectivity():
    t = run_game(GameSpec("weak-conn1", 4, maker="minimax", adversary="minimax"))
    assert t.winner == "M"
    assert t.result["mover_moves"] == 3


def test_minimax_size_cap():
    with pytest.raises(BoardTooLarge):
        MinimaxAdversary().move(Board(7), GameContext(7))


def test_script_exhausted():
    s = Scripted([(0, 1)])
    ctx = GameContext(4)
    assert s.move(Board(4), ctx) == (0, 1)
    with pytest.raises(ScriptExhausted):
        s.move(Board(4), ctx)


def test_unknown_kind():
    with pytest.raises(ValueError):
        make_adversary("psychic")


def test_same_inputs_same_hash():
    spec = GameSpec("weak-mindeg", 30, m=2, adversary="random", seed=11)
    assert run_game(spec).result_hash() == run_game(spec).result_hash()
