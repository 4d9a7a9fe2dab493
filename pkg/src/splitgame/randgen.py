"""Seeded random formulas and structures for property tests and suites."""

from __future__ import annotations

import itertools
import random
from typing import Sequence

from .core import Structure, Vocabulary
from .logic import (
    BOT,
    TOP,
    And,
    Atom,
    Const,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    SplitExists,
    SplitForall,
    Var,
    mask_indices,
)


class FormulaGenerator:
    """Random formulas of bounded quantifier rank and split width.

    Every split table respects the free-variable convention: the entry for
    index set A may only use the split variables listed in A. Fresh bound
    variables are numbered so no variable is ever rebound.
    """

    def __init__(self, rng: random.Random, vocab: Vocabulary, width: int, leaf_prob: float = 0.3, split_prob: float = 0.5):
        self.rng = rng
        self.vocab = vocab
        self.width = width
        self.leaf_prob = leaf_prob
        self.split_prob = split_prob
        self._count = 0

    def fresh(self) -> str:
        self._count += 1
        return f"v{self._count}"

    def atom(self, scope: Sequence[str]) -> Formula:
        terms = [Var(v) for v in scope] + [Const(c) for c in self.vocab.constants]
        if not terms:
            return self.rng.choice((TOP, BOT))
        choices = list(self.vocab.relations) + [("=", 2)]
        name, arity = self.rng.choice(choices)
        out = Atom(name, tuple(self.rng.choice(terms) for _ in range(arity)))
        return Not(out) if self.rng.random() < 0.5 else out

    def formula(self, rank: int, scope: Sequence[str] = ()) -> Formula:
        rng = self.rng
        if rank == 0 or rng.random() < self.leaf_prob:
            return self.atom(scope)
        roll = rng.random()
        if roll < 0.2:
            cls = And if rng.random() < 0.5 else Or
            return cls((self.formula(rank, scope), self.formula(rank - 1, scope)))
        if roll < 0.25:
            return Not(self.formula(rank, scope))
        if roll < 0.25 + (1 - 0.25) * (1 - self.split_prob):
            v = self.fresh()
            cls = Exists if rng.random() < 0.5 else Forall
            return cls(v, self.formula(rank - 1, (*scope, v)))
        m = rng.randint(1, self.width)
        xs = [self.fresh() for _ in range(m)]
        table = [
            self.formula(rank - 1, (*scope, *(xs[i] for i in mask_indices(mask))))
            for mask in range(1 << m)
        ]
        cls = SplitForall if rng.random() < 0.5 else SplitExists
        return cls(xs, table)

    def sentence(self, rank: int) -> Formula:
        """A sentence whose outermost node is a quantifier or split."""
        if rank == 0:
            return self.atom(())
        rng = self.rng
        if rng.random() < self.split_prob:
            m = rng.randint(1, self.width)
            xs = [self.fresh() for _ in range(m)]
            table = [self.formula(rank - 1, [xs[i] for i in mask_indices(mask)]) for mask in range(1 << m)]
            return (SplitForall if rng.random() < 0.5 else SplitExists)(xs, table)
        v = self.fresh()
        return (Exists if rng.random() < 0.5 else Forall)(v, self.formula(rank - 1, (v,)))


def random_formula(rng: random.Random, vocab: Vocabulary, rank: int, width: int, free: Sequence[str] = ()) -> Formula:
    return FormulaGenerator(rng, vocab, width).formula(rank, tuple(free))


def random_sentence(rng: random.Random, vocab: Vocabulary, rank: int, width: int) -> Formula:
    return FormulaGenerator(rng, vocab, width).sentence(rank)


def random_structure(rng: random.Random, vocab: Vocabulary, n: int, density: float = 0.4) -> Structure:
    rels = {}
    for name, arity in vocab.relations:
        rels[name] = {t for t in itertools.product(range(n), repeat=arity) if rng.random() < density}
    consts = {c: rng.randrange(n) for c in vocab.constants}
    return Structure.build(vocab, n, rels, consts)
