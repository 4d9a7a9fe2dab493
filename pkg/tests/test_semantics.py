import itertools

import pytest
from hypothesis import given

from conftest import LT, P, R, chain, formulas, structures, unary
from splitgame.core import Structure
from splitgame.errors import EmptySeed, NotChain, NotSubstructure, UnboundVariable
from splitgame.logic import (
    BOT,
    TOP,
    And,
    Exists,
    Forall,
    Not,
    Or,
    SplitExists,
    SplitForall,
    dualize,
    eq,
    rel,
    subformula_closure,
)
from splitgame.semantics import (
    ADAPTED,
    STRICT,
    check_chain_union,
    covering_class_oracle,
    evaluate,
    is_elementary_substructure,
    skolem_closure,
)
from splitgame.synth import card_lt, encode_quantifier


def gate_empty(phi):
    """Copy of phi whose empty-set entries never decide: top for universal
    splits, bot for existential ones."""
    if isinstance(phi, (SplitForall, SplitExists)):
        neutral = TOP if isinstance(phi, SplitForall) else BOT
        table = [neutral] + [gate_empty(e) for e in phi.table[1:]]
        return type(phi)(phi.bound, table)
    if isinstance(phi, Not):
        return Not(gate_empty(phi.sub))
    if isinstance(phi, (And, Or)):
        return type(phi)(gate_empty(c) for c in phi.children())
    if isinstance(phi, (Exists, Forall)):
        return type(phi)(phi.var, gate_empty(phi.sub))
    return phi


def envs(M, names=("x", "y")):
    for vals in itertools.product(M.universe, repeat=len(names)):
        yield dict(zip(names, vals))


class TestEvaluate:
    @pytest.mark.parametrize("mode", [ADAPTED, STRICT])
    def test_top(self, mode):
        assert evaluate(unary(1, []), TOP, mode=mode)

    @pytest.mark.parametrize("k,expected", [(0, True), (1, True), (2, False), (3, False)])
    def test_card_lt_adapted(self, k, expected):
        assert evaluate(unary(3, range(k)), card_lt(2)) is expected

    @pytest.mark.parametrize("k", range(4))
    def test_card_lt_strict_always_false(self, k):
        assert not evaluate(unary(3, range(k)), card_lt(2), mode=STRICT)

    def test_unbound(self):
        with pytest.raises(UnboundVariable):
            evaluate(unary(1, []), rel("P", "x"))

    def test_split_exists_semantics(self):
        # some pair such that every partition has a block inside P
        phi = SplitExists(["a", "b"], [BOT, rel("P", "a"), rel("P", "b"), And((rel("P", "a"), rel("P", "b")))])
        assert evaluate(unary(2, [0]), phi)
        assert not evaluate(unary(2, []), phi)

    @given(structures(), formulas())
    def test_duality_both_modes(self, M, phi):
        neg = dualize(phi)
        for mode in (ADAPTED, STRICT):
            for env in envs(M):
                assert evaluate(M, neg, env, mode) != evaluate(M, phi, env, mode)

    @given(structures(), formulas())
    def test_modes_agree_with_top_gate(self, M, phi):
        phi = gate_empty(phi)
        for env in envs(M):
            assert evaluate(M, phi, env, ADAPTED) == evaluate(M, phi, env, STRICT)

    @pytest.mark.parametrize("theta", [1, 2, 3])
    def test_encoding_on_unary(self, theta):
        psi = rel("P", "x")
        for n in range(1, 4):
            for k in range(n + 1):
                M = unary(n, range(k))
                for xi in range(theta):
                    assert evaluate(M, encode_quantifier(psi, xi, theta)) == evaluate(M, Exists("x", psi))
                    assert evaluate(M, encode_quantifier(psi, xi, theta, universal=True)) == evaluate(M, Forall("x", psi))


class TestCovering:
    def test_uncovered_element(self):
        M = Structure.build(R, 3, {"R": {(0, 1), (0, 2)}})
        assert not covering_class_oracle(M, "R", 2)

    def test_loops(self):
        M = Structure.build(R, 3, {"R": {(0, 0), (1, 1), (2, 2)}})
        assert covering_class_oracle(M, "R", 1)

    def test_big_fiber(self):
        M = Structure.build(R, 2, {"R": {(0, 0), (0, 1)}})
        assert not covering_class_oracle(M, "R", 1)


class TestSkolem:
    def test_full_universe(self):
        M = chain(3)
        assert skolem_closure(M, [], M.universe) == M

    def test_order_witnesses(self):
        T = subformula_closure(Exists("x", rel("lt", "y", "x")))
        assert skolem_closure(chain(4), T, [0]).universe == (0, 1, 2, 3)

    def test_unsatisfiable_node_adds_nothing(self):
        T = subformula_closure(Exists("x", And((rel("lt", "x", "x"), eq("x", "y")))))
        assert skolem_closure(chain(4), T, [2]).universe == (2,)

    def test_errors(self):
        with pytest.raises(EmptySeed):
            skolem_closure(chain(3), [], [])
        with pytest.raises(NotSubstructure):
            skolem_closure(chain(3), [], [7])

    @given(structures(vocab=LT, max_size=5), formulas(vocab=LT, free=("x",)))
    def test_closure_is_elementary(self, M, phi):
        T = subformula_closure(phi)
        for mode in (ADAPTED, STRICT):
            M0 = skolem_closure(M, T, [M.universe[0]], mode)
            assert is_elementary_substructure(M0, M, T, mode)


def three_distinct():
    return Exists("x", Exists("y", Exists("z", And((Not(eq("x", "y")), Not(eq("y", "z")), Not(eq("x", "z")))))))


class TestElementary:
    def test_self(self):
        M = chain(3)
        assert is_elementary_substructure(M, M, subformula_closure(three_distinct()))

    def test_quantifier_free(self):
        M = chain(4)
        assert is_elementary_substructure(M.induced({1, 3}), M, subformula_closure(rel("lt", "x", "y")))

    def test_counting_fails(self):
        M = chain(3)
        assert not is_elementary_substructure(M.induced({0, 2}), M, subformula_closure(three_distinct()))

    def test_not_substructure(self):
        with pytest.raises(NotSubstructure):
            is_elementary_substructure(chain(2), unary(2, []), [])


class TestChains:
    def test_constant_chain(self):
        M = chain(3)
        report = check_chain_union([M, M, M], subformula_closure(three_distinct()))
        assert report.all_adjacent and report.ends

    def test_quantifier_free_fragment(self):
        M = chain(4)
        links = [M.induced({0}), M.induced({0, 2}), M.induced({0, 1, 2}), M]
        report = check_chain_union(links, subformula_closure(Not(rel("lt", "x", "y"))))
        assert report.all_adjacent and report.consistent_with_union_lemma

    def test_not_a_chain(self):
        M = chain(3)
        with pytest.raises(NotChain):
            check_chain_union([M, M.induced({0})], [])
        with pytest.raises(NotChain):
            check_chain_union([], [])
