import pytest

from conftest import LT, P, chain, unary
from splitgame.core import Vocabulary, canonical_key
from splitgame.errors import NotEquivalence, TooLarge, VocabularyMismatch
from splitgame.lab.corpus import CorpusSpec, Family, all_structures, classify, generate_corpus


def sizes(corpus):
    out = {}
    for S in corpus:
        out[S.size] = out.get(S.size, 0) + 1
    return out


class TestGenerate:
    def test_unary_two(self):
        corpus = generate_corpus(CorpusSpec(Family.UNARY, n_min=2, n_max=2))
        assert sorted(len(S.rel("P")) for S in corpus) == [0, 1, 2]

    def test_posets(self):
        assert sizes(generate_corpus(CorpusSpec(Family.POSETS, n_max=5))) == {1: 1, 2: 2, 3: 5, 4: 16, 5: 63}

    def test_graphs(self):
        assert sizes(generate_corpus(CorpusSpec(Family.GRAPHS, n_max=5))) == {1: 1, 2: 2, 3: 4, 4: 11, 5: 34}

    def test_two_predicates(self):
        # multisets of 4 types
        assert len(generate_corpus(CorpusSpec(Family.UNARY, n_min=2, n_max=2, p_count=2))) == 10

    def test_trees(self):
        trees = generate_corpus(CorpusSpec(Family.TREES, branch=2, depth=2, n_max=4))
        # rooted subtrees of the binary tree of height 2 up to isomorphism
        assert sizes(trees) == {1: 1, 2: 1, 3: 2, 4: 2}
        for T in trees:
            lt = T.rel("lt")
            assert all((a, c) in lt for a, b in lt for b2, c in lt if b == b2)

    def test_random_deterministic(self):
        spec = CorpusSpec(Family.RANDOM, n_max=4, count=10, seed=7)
        assert generate_corpus(spec) == generate_corpus(spec)

    def test_dedup(self):
        corpus = generate_corpus(CorpusSpec(Family.RANDOM, n_max=2, count=50, seed=1))
        keys = [canonical_key(S) for S in corpus]
        assert len(keys) == len(set(keys))

    def test_bounds(self):
        with pytest.raises(TooLarge):
            CorpusSpec(Family.GRAPHS, n_max=9)
        with pytest.raises(TooLarge):
            CorpusSpec(Family.TREES, branch=4, depth=3)

    def test_all_structures(self):
        assert len(all_structures(P, 3)) == 9
        assert len(all_structures(Vocabulary.of({"R": 2}), 3)) == 116


class TestClassify:
    def test_unary_two(self):
        corpus = generate_corpus(CorpusSpec(Family.UNARY, n_min=2, n_max=2))
        assert len(classify(corpus, 1, 1)) == 3

    def test_clock_zero(self):
        corpus = generate_corpus(CorpusSpec(Family.POSETS, n_max=3))
        assert len(classify(corpus, 2, 0)) == 1

    def test_copies(self):
        M = chain(3)
        assert classify([M, M.relabel({0: 1, 1: 2, 2: 0}).densified(), M], 1, 3) == [[M, M.relabel({0: 1, 1: 2, 2: 0}).densified(), M]]

    def test_mixed_vocabularies(self):
        with pytest.raises(VocabularyMismatch):
            classify([chain(2), unary(2, [])], 1, 1)

    def test_orders_separate_with_clock(self):
        corpus = [chain(n) for n in range(1, 5)]
        assert len(classify(corpus, 1, "w")) == 4
        assert len(classify(corpus, 1, 1)) == 1
        assert len(classify(corpus, 1, 2)) == 3
