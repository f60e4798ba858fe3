import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posgame.board import (
    Board,
    EdgeAlreadyClaimed,
    OverlappingSets,
    Owner,
    VertexOutOfRange,
    bits,
    edge,
    mask_of,
)


class TestClaim:
    def test_single_claim(self):
        b = Board(3)
        b.claim(Owner.ONE, 0, 1)
        assert b.degree(Owner.ONE, 0) == b.degree(Owner.ONE, 1) == 1
        assert b.claimed() == 1
        assert b.owner(1, 0) is Owner.ONE

    def test_double_claim_rejected(self):
        b = Board(3)
        b.claim(Owner.ONE, 0, 1)
        with pytest.raises(EdgeAlreadyClaimed):
            b.claim(Owner.TWO, 1, 0)

    def test_perfect_matching(self):
        b = Board(4)
        b.claim(Owner.ONE, 0, 1)
        b.claim(Owner.ONE, 2, 3)
        assert b.degrees(Owner.ONE) == [1, 1, 1, 1]
        assert b.edges(Owner.ONE) == [(0, 1), (2, 3)]

    def test_out_of_range(self):
        with pytest.raises(VertexOutOfRange):
            Board(4).claim(Owner.ONE, 0, 4)

    def test_cannot_claim_for_free(self):
        with pytest.raises(ValueError):
            Board(4).claim(Owner.FREE, 0, 1)

    def test_copy_is_independent(self):
        b = Board(5)
        b.claim(Owner.ONE, 0, 1)
        c = b.copy()
        c.claim(Owner.TWO, 2, 3)
        assert b.is_free(2, 3)
        assert not c.is_free(2, 3)


def test_degree_into():
    b = Board(5)
    assert b.degree_into(Owner.ONE, 0, {1, 2, 3}) == 0
    b.claim(Owner.ONE, 0, 1)
    b.claim(Owner.ONE, 0, 2)
    assert b.degree_into(Owner.ONE, 0, {1, 2, 3}) == 2
    assert b.degree_into(Owner.ONE, 0, {3}) == 0
    # v itself inside S is ignored
    assert b.degree_into(Owner.ONE, 0, {0, 1}) == 1


def test_free_edges_between():
    b = Board(4)
    assert b.free_edges_between({0, 1}, {2, 3}) == [(0, 2), (0, 3), (1, 2), (1, 3)]
    b.claim(Owner.TWO, 0, 2)
    assert (0, 2) not in b.free_edges_between({0, 1}, {2, 3})
    assert b.free_edges_between({0}, set()) == []
    with pytest.raises(OverlappingSets):
        b.free_edges_between({0, 1}, {1, 2})


def test_helpers():
    assert edge(3, 1) == (1, 3)
    assert mask_of([0, 2]) == 0b101
    assert list(bits(0b10110)) == [1, 2, 4]


def test_audit_detects_tampering():
    b = Board(6)
    b.claim(Owner.ONE, 0, 1)
    assert b.audit() == []
    b._deg[Owner.ONE][0] = 5
    assert any("degree of 0" in p for p in b.audit())


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 30), seed=st.integers(0, 10_000))
def test_alternating_play_keeps_tables_consistent(n, seed):
    rng = random.Random(seed)
    b = Board(n)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    rng.shuffle(pairs)
    who = Owner.ONE
    for u, v in pairs[: rng.randint(0, len(pairs))]:
        b.claim(who, u, v)
        assert b.claimed(Owner.ONE) - b.claimed(Owner.TWO) in (-1, 0, 1)
        who = who.other
    assert b.audit() == []
    assert b.free_count() == len(pairs) - b.claimed()
    # replaying the same claims reproduces the ownership map
    r = Board(n)
    for p in (Owner.ONE, Owner.TWO):
        for e in b.edges(p):
            r.claim(p, *e)
    assert r._own == b._own
