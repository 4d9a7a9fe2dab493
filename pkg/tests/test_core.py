import itertools
import random

import pytest
from hypothesis import given, strategies as st

from conftest import LT, P, R, chain, structures, unary
from splitgame.core import (
    INFINITY,
    ClockOrdinal,
    Cmp,
    LabeledPartition,
    PartialMap,
    SetPartition,
    Structure,
    Vocabulary,
    are_isomorphic,
    canonical_key,
    enumerate_set_partitions,
    is_partial_isomorphism,
    mask_partitions,
    omega_times,
    ordinal_compare,
)
from splitgame.errors import OutOfUniverse, TooLarge, VocabularyMismatch


def bell(n):
    # Bell triangle, independent of the enumerator
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


class TestStructure:
    def test_build_and_access(self):
        M = Structure.build(R, 3, {"R": [(0, 1), (0, 2)]})
        assert M.size == 3
        assert M.rel("R") == {(0, 1), (0, 2)}

    def test_vocabulary_order_irrelevant(self):
        assert Vocabulary.of({"A": 1, "B": 2}) == Vocabulary.of({"B": 2, "A": 1})

    def test_tuple_outside_universe(self):
        with pytest.raises(OutOfUniverse):
            Structure.build(P, 2, {"P": [(5,)]})

    def test_induced(self):
        M = chain(4).induced({0, 2})
        assert M.universe == (0, 2)
        assert M.rel("lt") == {(0, 2)}


class TestPartialIso:
    def test_identity(self):
        M = chain(3)
        assert is_partial_isomorphism(M, M, {0: 0, 2: 2})

    def test_unary_disagreement(self, p_pair):
        M, N = p_pair
        assert not is_partial_isomorphism(M, N, {0: 0})

    def test_order_reversal(self):
        assert not is_partial_isomorphism(chain(3), chain(2), {0: 1, 2: 0})

    def test_not_injective(self):
        assert not is_partial_isomorphism(chain(3), chain(3), [(0, 0), (1, 0)])

    def test_vocabulary_mismatch(self):
        with pytest.raises(VocabularyMismatch):
            is_partial_isomorphism(chain(2), unary(2, []), {})

    def test_out_of_universe(self):
        with pytest.raises(OutOfUniverse):
            is_partial_isomorphism(chain(2), chain(2), {0: 7})

    @given(structures(), structures(), st.integers(0, 2**32 - 1))
    def test_symmetric_under_inverse(self, M, N, seed):
        rng = random.Random(seed)
        k = rng.randint(0, min(M.size, N.size))
        p = PartialMap.of(zip(rng.sample(M.universe, k), rng.sample(N.universe, k)))
        assert is_partial_isomorphism(M, N, p) == is_partial_isomorphism(N, M, p.inverse())


class TestPartitions:
    def test_empty(self):
        assert list(enumerate_set_partitions([])) == [SetPartition(())]

    def test_two(self):
        got = {p.blocks for p in enumerate_set_partitions([0, 1])}
        assert got == {(frozenset({0, 1}),), (frozenset({0}), frozenset({1}))}

    def test_three(self):
        assert len(list(enumerate_set_partitions(range(3)))) == 5

    @pytest.mark.parametrize("n", range(9))
    def test_bell_counts(self, n):
        parts = list(enumerate_set_partitions(range(n)))
        assert len(parts) == bell(n)
        assert len(set(parts)) == len(parts)

    @pytest.mark.parametrize("n", range(7))
    def test_mask_partitions_match(self, n):
        as_sets = {
            frozenset(frozenset(i for i in range(n) if b >> i & 1) for b in part)
            for part in mask_partitions((1 << n) - 1)
        }
        assert len(as_sets) == bell(n)

    def test_labeled_partition(self):
        lp = LabeledPartition(((0, 2), (1, 0), (2, 2)))
        assert lp.preimage(2) == {0, 2}
        assert len(lp.induced_partition()) == 2
        with pytest.raises(ValueError):
            LabeledPartition(((0, 3),), max_label=2)


class TestClocks:
    def test_compare(self):
        assert ordinal_compare(ClockOrdinal(2, 3), ClockOrdinal(3, 0)) is Cmp.LT
        assert ordinal_compare(ClockOrdinal(), ClockOrdinal()) is Cmp.EQ
        assert ordinal_compare(INFINITY, ClockOrdinal(9, 9)) is Cmp.GT

    def test_omega_times(self):
        assert omega_times(0) == ClockOrdinal()
        assert omega_times(1) == ClockOrdinal(1, 0)
        assert omega_times(3) == ClockOrdinal(3, 0)

    @pytest.mark.parametrize("text", ["0", "7", "w", "w+2", "w*3", "w*2+5", "inf"])
    def test_parse_round_trip(self, text):
        assert str(ClockOrdinal.parse(text)) == text

    @pytest.mark.parametrize("text", ["", "x", "w*", "w+", "w*2+a", "-1"])
    def test_parse_rejects(self, text):
        with pytest.raises(ValueError):
            ClockOrdinal.parse(text)

    @given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=3, max_size=3))
    def test_total_order(self, raw):
        a, b, c = (ClockOrdinal(x, y) for x, y in raw)
        assert (a <= b) or (b <= a)
        if a <= b and b <= c:
            assert a <= c
        assert (ordinal_compare(a, b) is Cmp.EQ) == (a == b)

    @given(st.integers(0, 50))
    def test_omega_times_monotone(self, k):
        assert omega_times(k) < omega_times(k + 1)


def brute_iso(M, N):
    if M.size != N.size:
        return False
    for perm in itertools.permutations(N.universe):
        m = dict(zip(M.universe, perm))
        if all({tuple(m[e] for e in t) for t in a} == set(b) for a, b in zip(M.rels, N.rels)):
            return True
    return False


class TestCanonicalKey:
    @given(structures(max_size=5), st.randoms())
    def test_invariant_under_relabeling(self, M, rng):
        perm = list(M.universe)
        rng.shuffle(perm)
        assert canonical_key(M) == canonical_key(M.relabel(dict(zip(M.universe, perm))))

    def test_p_structures_differ(self):
        assert canonical_key(unary(2, [0])) != canonical_key(unary(2, [0, 1]))

    def test_three_element_posets(self):
        keys = set()
        pairs = [(a, b) for a in range(3) for b in range(3) if a != b]
        for bits in range(1 << len(pairs)):
            lt = {p for i, p in enumerate(pairs) if bits >> i & 1}
            if any((b, a) in lt for a, b in lt):
                continue
            if any((a, c) not in lt for a, b in lt for b2, c in lt if b == b2):
                continue
            keys.add(canonical_key(Structure.build(LT, 3, {"lt": lt})))
        assert len(keys) == 5

    @given(structures(max_size=3), structures(max_size=3))
    def test_key_agrees_with_brute_force(self, M, N):
        assert are_isomorphic(M, N) == brute_iso(M, N)

    def test_bound(self):
        with pytest.raises(TooLarge):
            canonical_key(unary(9, []))
