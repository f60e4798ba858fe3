import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posgame.board import Board, Owner
from posgame.engine import GameSpec, run_game
from posgame.gk import PartTooSmall
from posgame.graphs import SimpleGraph, vertex_connectivity
from posgame.kconn import GameConstants, KConnMaker


def unopposed(n, k):
    b = Board(n)
    s = KConnMaker(n, k)
    trail = []
    while not s.done(b):
        e = s.move(b)
        trail.append((e, s.stage, b.copy()))
        b.claim(Owner.ONE, *e)
    return b, s, trail


class TestConstants:
    def test_desk_defaults(self):
        c = GameConstants.for_game(60, 3)
        assert c.profile == "desk"
        assert c.b_set_lower <= c.b_set_upper
        assert c.early_danger_service

    def test_override_casts(self):
        c = GameConstants.for_game(60, 3).override(danger_fraction="0.7", stage1_move_cap="99")
        assert c.danger_fraction == 0.7 and c.stage1_move_cap == 99

    def test_unknown_key(self):
        with pytest.raises(KeyError):
            GameConstants.for_game(60, 3, nonsense=1)

    def test_bad_type(self):
        with pytest.raises(TypeError):
            GameConstants.for_game(60, 3, stage1_move_cap="lots")

    def test_bad_range(self):
        with pytest.raises(ValueError):
            GameConstants.for_game(60, 3, danger_fraction=1.5)

    def test_paper_profile_is_infeasible_at_desk_scale(self):
        # n / k^6 rounds up past 2n / k^6 rounded down
        with pytest.raises(ValueError):
            GameConstants.for_game(60, 3, profile="paper")

    def test_unknown_profile(self):
        with pytest.raises(ValueError):
            GameConstants.for_game(60, 3, profile="lab")


class TestAlternate:
    def test_even_cycle_keeps_one_parity(self):
        cyc = list(range(20))
        assert KConnMaker.alternate(cyc, cyc) == list(range(0, 20, 2))

    def test_odd_cycle_drops_wraparound(self):
        cyc = list(range(9))
        pick = KConnMaker.alternate(cyc, cyc)
        assert len(pick) == 4
        assert 0 not in pick or 8 not in pick

    def test_adjacent_members_switch_parity(self):
        cyc = list(range(10))
        pick = KConnMaker.alternate(cyc, [0, 1, 3, 5, 6])
        assert pick == [1, 5] or pick == [0, 3, 6]

    @settings(max_examples=80, deadline=None)
    @given(L=st.integers(5, 40), seed=st.integers(0, 10_000), frac=st.floats(0.1, 1.0))
    def test_members_far_apart(self, L, seed, frac):
        rng = random.Random(seed)
        cyc = list(range(L))
        rng.shuffle(cyc)
        pool = rng.sample(cyc, max(1, int(frac * L)))
        pick = KConnMaker.alternate(cyc, pool)
        pos = {v: i for i, v in enumerate(cyc)}
        assert set(pick) <= set(pool)
        for a in pick:
            for b in pick:
                if a != b:
                    d = abs(pos[a] - pos[b])
                    assert min(d, L - d) >= 2


class TestStages:
    def test_breaker_move_inside_a_part_is_answered_there(self):
        b = Board(120)
        s = KConnMaker(120, 4)
        b.claim(Owner.TWO, 2, 5)  # both in part 2 of the round-robin partition
        e = s.move(b, (2, 5))
        assert all(v % 3 == 2 for v in e)
        assert s.annotation.endswith("S2")

    def test_unopposed_reports(self):
        n, k = 120, 4
        b, s, trail = unopposed(n, k)
        reports = {r.stage: r for r in s.stage_certificate()}
        ok, used, budget = reports["I"].checks["moves"]
        assert ok and used <= n + (k - 1) + 5 * k == budget
        assert reports["III"].passed
        assert reports["IV"].checks["degrees_k-1_or_k"][0]
        assert s.moves <= k * n // 2 + 1
        assert s.cap_violations == []

    def test_stage_two_serves_once_into_an_empty_part(self):
        n, k = 120, 4
        _, s, trail = unopposed(n, k)
        stage2 = [(e, before) for e, stage, before in trail if stage == "II"]
        assert stage2
        for (u, v), before in stage2:
            assert u % (k - 1) != v % (k - 1)
            # at least one endpoint had no Maker edge into the other's part
            assert not before.nbr(Owner.ONE, u) & s.masks[v % (k - 1)] or not before.nbr(Owner.ONE, v) & s.masks[u % (k - 1)]
            # a served vertex is never pushed above k
            assert before.degree(Owner.ONE, u) < k and before.degree(Owner.ONE, v) < k

    def test_part_too_small(self):
        with pytest.raises(PartTooSmall):
            KConnMaker(12, 4)

    def test_k_below_two(self):
        with pytest.raises(ValueError):
            KConnMaker(20, 1)


class TestGames:
    def test_random_k3_n60(self):
        t = run_game(GameSpec("weak-kconn", 60, k=3, adversary="random", seed=1))
        c = t.certificates
        assert t.winner == "M"
        assert t.result["mover_moves"] <= 91
        assert c["gk"]["all_pass"]
        assert c["connectivity"] >= 3
        assert c["cap_violations"] == []

    def test_k2_is_a_cycle_with_chord(self):
        n = 30
        t = run_game(GameSpec("weak-kconn", n, k=2, adversary="random", seed=4))
        assert t.winner == "M"
        assert t.result["mover_moves"] == n + 1
        assert t.certificates["gk"] is None
        assert t.certificates["connectivity"] >= 2

    def test_final_graph_is_k_connected(self):
        b, s, _ = unopposed(60, 3)
        assert s.certificate(b).all_pass
        assert vertex_connectivity(SimpleGraph.from_board(b, Owner.ONE)).connectivity >= 3
