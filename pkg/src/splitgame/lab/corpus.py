"""Deterministic corpora of small structures and equivalence classification."""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass

from ..core import CANONICAL_BOUND, Structure, Vocabulary, as_clock, canonical_key
from ..errors import NotEquivalence, TooLarge, VocabularyMismatch
from ..games import DUPLICATOR, EFC, winner
from ..randgen import random_structure

GRAPH_VOCAB = Vocabulary.of({"E": 2})
ORDER_VOCAB = Vocabulary.of({"lt": 2})


class Family(enum.Enum):
    UNARY = "unary"
    GRAPHS = "graphs"
    POSETS = "posets"
    TREES = "trees"
    RANDOM = "random"


@dataclass(frozen=True)
class CorpusSpec:
    """What to generate. Sizes run from ``n_min`` to ``n_max``; TREES uses
    ``branch`` and ``depth`` for the ambient tree and keeps rooted subtrees
    of at most ``n_max`` nodes; RANDOM draws ``count`` structures over
    ``vocab`` from ``seed``."""

    family: Family
    n_max: int = 3
    n_min: int = 1
    p_count: int = 1
    branch: int = 2
    depth: int = 2
    vocab: Vocabulary | None = None
    count: int = 20
    seed: int = 0
    dedup: bool = True

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not 1 <= self.n_min <= self.n_max:
            raise ValueError("need 1 <= n_min <= n_max")
        if self.n_max > CANONICAL_BOUND:
            raise TooLarge(f"corpora are limited to {CANONICAL_BOUND} elements")
        if self.family is Family.TREES:
            total = sum(self.branch**i for i in range(self.depth + 1))
            if total > 64:
                raise TooLarge("ambient tree exceeds 64 nodes")


def unary_vocab(p_count: int) -> Vocabulary:
    names = ["P"] if p_count == 1 else [f"P{i}" for i in range(p_count)]
    return Vocabulary.of({n: 1 for n in names})


def _unary(spec: CorpusSpec) -> list[Structure]:
    vocab = unary_vocab(spec.p_count)
    names = [n for n, _ in vocab.relations]
    out = []
    for n in range(spec.n_min, spec.n_max + 1):
        # an element's type is the set of predicates it satisfies; structures
        # up to isomorphism are multisets of types
        for types in itertools.combinations_with_replacement(range(1 << len(names)), n):
            rels = {name: {(i,) for i, t in enumerate(types) if t >> k & 1} for k, name in enumerate(names)}
            out.append(Structure.build(vocab, n, rels))
    return out


def _grow(levels_from: list[Structure], extend) -> list[Structure]:
    out = {}
    for S in levels_from:
        for T in extend(S):
            out.setdefault(canonical_key(T), T)
    return list(out.values())


def _graphs_by_size(n_max: int) -> dict[int, list[Structure]]:
    """Graphs up to isomorphism; each size is built by adding a vertex with
    every possible neighbourhood to the graphs one size smaller."""
    levels = {1: [Structure.build(GRAPH_VOCAB, 1, {"E": set()})]}

    def extend(S):
        n = S.size
        for mask in range(1 << n):
            nbrs = [i for i in range(n) if mask >> i & 1]
            edges = set(S.rel("E")) | {(n, i) for i in nbrs} | {(i, n) for i in nbrs}
            yield Structure.build(GRAPH_VOCAB, n + 1, {"E": edges})

    for n in range(2, n_max + 1):
        levels[n] = _grow(levels[n - 1], extend)
    return levels


def _posets_by_size(n_max: int) -> dict[int, list[Structure]]:
    """Strict partial orders up to isomorphism. A new element is added as a
    maximal element above a down-closed set; every poset arises this way by
    removing a maximal element."""
    levels = {1: [Structure.build(ORDER_VOCAB, 1, {"lt": set()})]}

    def extend(S):
        n = S.size
        lt = S.rel("lt")
        for mask in range(1 << n):
            below = {i for i in range(n) if mask >> i & 1}
            if any(a not in below for a, b in lt if b in below):
                continue
            yield Structure.build(ORDER_VOCAB, n + 1, {"lt": set(lt) | {(i, n) for i in below}})

    for n in range(2, n_max + 1):
        levels[n] = _grow(levels[n - 1], extend)
    return levels


def _trees(spec: CorpusSpec) -> list[Structure]:
    """Rooted subtrees (prefix-closed node sets) of the full tree of
    sequences of length at most ``depth`` over ``branch`` letters, ordered by
    strict prefix."""
    nodes = [()]
    for d in range(1, spec.depth + 1):
        nodes += [s for s in itertools.product(range(spec.branch), repeat=d)]
    out = []
    seen = set()

    def emit(chosen):
        idx = {s: i for i, s in enumerate(sorted(chosen, key=lambda s: (len(s), s)))}
        lt = {(idx[a], idx[b]) for a in chosen for b in chosen if len(a) < len(b) and b[: len(a)] == a}
        T = Structure.build(ORDER_VOCAB, len(chosen), {"lt": lt})
        if spec.n_min <= T.size:
            out.append(T)

    def grow(chosen: frozenset):
        if chosen in seen:
            return
        seen.add(chosen)
        emit(chosen)
        if len(chosen) == spec.n_max:
            return
        for s in nodes:
            if s not in chosen and s[:-1] in chosen:
                grow(chosen | {s})

    grow(frozenset({()}))
    return out


def generate_corpus(spec: CorpusSpec) -> list[Structure]:
    fam = spec.family
    if fam is Family.UNARY:
        out = _unary(spec)
    elif fam is Family.GRAPHS:
        levels = _graphs_by_size(spec.n_max)
        out = [S for n in range(spec.n_min, spec.n_max + 1) for S in levels[n]]
    elif fam is Family.POSETS:
        levels = _posets_by_size(spec.n_max)
        out = [S for n in range(spec.n_min, spec.n_max + 1) for S in levels[n]]
    elif fam is Family.TREES:
        out = _trees(spec)
    else:
        rng = random.Random(spec.seed)
        vocab = spec.vocab or GRAPH_VOCAB
        out = [random_structure(rng, vocab, rng.randint(spec.n_min, spec.n_max)) for _ in range(spec.count)]
    if spec.dedup:
        uniq: dict = {}
        for S in out:
            uniq.setdefault(canonical_key(S), S)
        out = list(uniq.values())
    return sorted(out, key=lambda S: (S.size, canonical_key(S))) if spec.dedup else out


def all_structures(vocab: Vocabulary, n_max: int, n_min: int = 1) -> list[Structure]:
    """Every structure over a constant-free ``vocab`` with ``n_min..n_max``
    elements, up to isomorphism. Exhaustive, so keep ``vocab`` and ``n_max`` tiny."""
    if vocab.constants:
        raise ValueError("all_structures expects a constant-free vocabulary")
    out: dict = {}
    for n in range(n_min, n_max + 1):
        slots = [(name, t) for name, ar in vocab.relations for t in itertools.product(range(n), repeat=ar)]
        if len(slots) > 20:
            raise TooLarge(f"{len(slots)} tuple slots at size {n}")
        for bits in range(1 << len(slots)):
            rels = {name: set() for name in vocab.relation_names()}
            for i, (name, t) in enumerate(slots):
                if bits >> i & 1:
                    rels[name].add(t)
            S = Structure.build(vocab, n, rels)
            out.setdefault(canonical_key(S), S)
    return sorted(out.values(), key=lambda S: (S.size, canonical_key(S)))


def classify(corpus: list[Structure], theta: int, clock) -> list[list[Structure]]:
    """Classes of ``corpus`` under "Duplicator wins EFC with this clock".

    The relation is checked to be an equivalence first; a failure raises
    NotEquivalence naming the offending structures.
    """
    clock = as_clock(clock)
    if corpus and any(S.vocab != corpus[0].vocab for S in corpus):
        raise VocabularyMismatch("corpus mixes vocabularies")
    n = len(corpus)
    rel = [[winner(EFC, corpus[i], corpus[j], theta, clock) is DUPLICATOR for j in range(n)] for i in range(n)]
    for i in range(n):
        if not rel[i][i]:
            raise NotEquivalence(f"structure {i} is not equivalent to itself")
        for j in range(n):
            if rel[i][j] != rel[j][i]:
                raise NotEquivalence(f"asymmetric at structures {i}, {j}")
            if not rel[i][j]:
                continue
            for k in range(n):
                if rel[j][k] and not rel[i][k]:
                    raise NotEquivalence(f"not transitive at structures {i}, {j}, {k}")
    classes: list[list[int]] = []
    for i in range(n):
        for cls in classes:
            if rel[cls[0]][i]:
                cls.append(i)
                break
        else:
            classes.append([i])
    return [[corpus[i] for i in cls] for cls in classes]
