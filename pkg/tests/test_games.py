import itertools

import pytest
from hypothesis import given, strategies as st

from conftest import P, R, chain, structures, unary
from splitgame.core import INFINITY, ClockOrdinal, LabeledPartition, PartialMap, Structure, Vocabulary
from splitgame.errors import InvalidPosition, VocabularyMismatch
from splitgame.games import (
    DG,
    DUPLICATOR,
    EFC,
    SPOILER,
    GameKind,
    GamePosition,
    Obligation,
    Rank,
    Side,
    SpoilerMove,
    cross_check_bounded,
    delayed_replies,
    efc_extensions,
    efc_partitions,
    legal_moves,
    spoiler_rank,
    spoiler_witness,
    winner,
)
from splitgame.games.delayed import DGVVConfig, dgvv_rank
from splitgame.games.oracle import DGVVLiteral

KINDS = [EFC, DG, GameKind.dgvv(1), GameKind.dgvv(2)]
CLOCKS = [ClockOrdinal.parse(c) for c in ("0", "1", "2", "3", "w", "w+1", "w*2", "inf")]


class TestRanks:
    @pytest.mark.parametrize("kind", KINDS, ids=str)
    def test_isomorphic_is_infinite(self, kind):
        M = chain(3)
        assert spoiler_rank(kind, M, M.relabel({0: 2, 1: 0, 2: 1}).densified(), 1).is_infinite

    def test_p_pair(self, p_pair):
        assert spoiler_rank(EFC, *p_pair, 1) == Rank.of(1)

    @pytest.mark.parametrize("m,n,r", [(2, 3, 2), (3, 4, 3), (7, 8, 4)])
    def test_linear_orders(self, m, n, r):
        assert spoiler_rank(EFC, chain(m), chain(n), 1).natural == r

    def test_dg_p_pair(self, p_pair):
        assert spoiler_rank(DG, *p_pair, 1).value == ClockOrdinal(1, 1)

    def test_dg_broken_constants(self):
        V = Vocabulary.of({"P": 1}, ["c"])
        M = Structure.build(V, 2, {"P": {(0,)}}, {"c": 0})
        N = Structure.build(V, 2, {"P": {(0,)}}, {"c": 1})
        assert spoiler_rank(DG, M, N, 1).value == ClockOrdinal()

    def test_theta_must_be_positive(self, p_pair):
        with pytest.raises(ValueError):
            spoiler_rank(EFC, *p_pair, 0)

    def test_vocabulary_mismatch(self):
        with pytest.raises(VocabularyMismatch):
            spoiler_rank(EFC, chain(2), unary(2, []), 1)


class TestWinner:
    @pytest.mark.parametrize("kind", KINDS, ids=str)
    @pytest.mark.parametrize("clock", CLOCKS, ids=str)
    def test_self(self, kind, clock):
        M = unary(3, [1])
        assert winner(kind, M, M, 2, clock) is DUPLICATOR

    def test_p_pair_clocks(self, p_pair):
        assert winner(EFC, *p_pair, 1, 0) is DUPLICATOR
        assert winner(EFC, *p_pair, 1, 1) is SPOILER

    def test_orders_at_omega(self):
        assert winner(EFC, chain(2), chain(3), 1, "w") is SPOILER

    def test_dg_finite_clock_always_duplicator(self, p_pair):
        assert winner(DG, *p_pair, 1, 5) is DUPLICATOR
        assert winner(DG, *p_pair, 1, "w+1") is SPOILER

    @given(structures(max_size=3), structures(max_size=3), st.integers(1, 2), st.sampled_from(KINDS))
    def test_symmetry(self, M, N, theta, kind):
        assert spoiler_rank(kind, M, N, theta) == spoiler_rank(kind, N, M, theta)

    @given(structures(max_size=3), structures(max_size=3), st.integers(1, 2), st.sampled_from(KINDS))
    def test_clock_monotone(self, M, N, theta, kind):
        results = [winner(kind, M, N, theta, c) for c in CLOCKS]
        first = results.index(SPOILER) if SPOILER in results else len(results)
        assert all(r is SPOILER for r in results[first:])

    @given(structures(max_size=3), structures(max_size=3), st.integers(1, 2))
    def test_dg_infinite_implies_efc_infinite(self, M, N, theta):
        if spoiler_rank(DG, M, N, theta).is_infinite:
            assert spoiler_rank(EFC, M, N, theta).is_infinite

    @given(structures(max_size=3), structures(max_size=3), st.integers(1, 2), st.integers(2, 3))
    def test_dg_implies_efc_from_omega_two(self, M, N, theta, beta):
        if winner(DG, M, N, theta, ClockOrdinal(beta, 0)) is DUPLICATOR:
            assert winner(EFC, M, N, theta, beta) is DUPLICATOR

    def test_dg_implies_efc_fails_at_omega(self, p_pair):
        # Spoiler's clock choice below omega lets Duplicator delay past it
        assert winner(DG, *p_pair, 1, "w") is DUPLICATOR
        assert winner(EFC, *p_pair, 1, 1) is SPOILER


class TestOracle:
    def test_clock_zero(self, p_pair):
        assert cross_check_bounded(EFC, *p_pair, 1, 0) is DUPLICATOR

    def test_isomorphic(self):
        M = chain(2)
        for c in CLOCKS[:-1]:
            assert cross_check_bounded(EFC, M, M, 1, c) is DUPLICATOR

    def test_rejects_infinity(self, p_pair):
        with pytest.raises(ValueError):
            cross_check_bounded(EFC, *p_pair, 1, INFINITY)

    @given(structures(vocab=P, max_size=3), structures(vocab=P, max_size=3), st.integers(1, 2), st.sampled_from(CLOCKS[:-1]))
    def test_efc_unary(self, M, N, theta, clock):
        assert winner(EFC, M, N, theta, clock) is cross_check_bounded(EFC, M, N, theta, clock)

    @given(structures(max_size=2), structures(max_size=2), st.integers(1, 2), st.sampled_from(CLOCKS[:-1]))
    def test_dg(self, M, N, theta, clock):
        assert winner(DG, M, N, theta, clock) is cross_check_bounded(DG, M, N, theta, clock)

    @pytest.mark.parametrize(
        "config",
        [DGVVConfig(), DGVVConfig(literal_labels=True), DGVVConfig(new_due_label=1), DGVVConfig(strict_decrease=False)],
        ids=["default", "literal-labels", "due-at-one", "lazy-decrease"],
    )
    def test_dgvv_configs(self, config):
        structs = [unary(1, []), unary(2, [0]), unary(2, []), unary(3, [0, 1])]
        for M, N in itertools.combinations_with_replacement(structs, 2):
            for alpha in (1, 2):
                r = dgvv_rank(M, N, 1, alpha, config)
                lit = DGVVLiteral(M, N, 1, alpha, config)
                for c in range(5):
                    assert (r <= c) == lit.spoiler_wins(ClockOrdinal.finite(c))

    def test_literal_labels_alpha_one(self):
        M = unary(2, [0])
        assert dgvv_rank(M, M, 1, 1, DGVVConfig(literal_labels=True)) == 1
        assert dgvv_rank(M, M, 1, 1) == float("inf")


class TestMoves:
    def test_clock_zero_no_moves(self, p_pair):
        pos = GamePosition.initial(EFC, *p_pair, 1, 0)
        assert legal_moves(pos, *p_pair) == []

    def test_clock_one_two_elements(self, p_pair):
        pos = GamePosition.initial(EFC, *p_pair, 1, 1)
        moves = legal_moves(pos, *p_pair)
        assert len(moves) == 4
        assert all(m.clock == ClockOrdinal() and len(m.challenge) == 1 for m in moves)

    def test_delayed_games_may_pass(self, p_pair):
        pos = GamePosition.initial(DG, *p_pair, 1, 1)
        assert any(not m.challenge for m in legal_moves(pos, *p_pair))

    def test_efc_partitions_and_extensions(self, p_pair):
        M, N = p_pair
        pos = GamePosition.initial(EFC, M, N, 2, 2)
        move = SpoilerMove(ClockOrdinal.finite(1), Side.M, frozenset({0, 1}))
        assert len(efc_partitions(move)) == 2
        assert efc_extensions(pos, move, {0}, M, N) == []
        assert len(efc_extensions(pos, move, {1}, M, N)) == 2

    def test_due_obligation_without_extension(self, p_pair):
        M, N = p_pair
        ob = Obligation(Side.M, LabeledPartition(((0, 1),)), age=1)
        pos = GamePosition(DG, PartialMap.of({}), ClockOrdinal.finite(3), 1, (ob,))
        move = SpoilerMove(ClockOrdinal.finite(2), Side.M, frozenset())
        assert delayed_replies(pos, move, M, N) == []

    def test_broken_constants(self):
        V = Vocabulary.of({}, ["c", "d"])
        M = Structure.build(V, 2, {}, {"c": 0, "d": 1})
        N = Structure.build(V, 2, {}, {"c": 0, "d": 0})
        with pytest.raises(InvalidPosition):
            GamePosition.initial(EFC, M, N, 1)


class TestWitness:
    def test_p_pair(self, p_pair):
        move = spoiler_witness(EFC, *p_pair, 1)
        assert move.side is Side.M and move.challenge == {0} and move.clock == ClockOrdinal()

    def test_dg_p_pair(self, p_pair):
        move = spoiler_witness(DG, *p_pair, 1)
        assert move.clock == ClockOrdinal(1, 0) and move.challenge == {0}

    def test_isomorphic(self):
        assert spoiler_witness(EFC, chain(3), chain(3), 1) is None

    def test_broken_pi(self, p_pair):
        pos = GamePosition(EFC, PartialMap.of({0: 0}), ClockOrdinal.finite(3), 1)
        assert spoiler_witness(EFC, *p_pair, 1, pos) is None

    @given(structures(max_size=3), structures(max_size=3), st.integers(1, 2))
    def test_witness_achieves_rank(self, M, N, theta):
        from splitgame.games import efc_solver

        rank = spoiler_rank(EFC, M, N, theta)
        move = spoiler_witness(EFC, M, N, theta)
        if rank.is_infinite or rank.natural == 0:
            assert move is None
            return
        solver = efc_solver(M, N, theta)
        start = {}
        value = solver.challenge_value(start, {}, move.side, move.challenge)
        assert value == rank.natural - 1 == move.clock.finite_part
