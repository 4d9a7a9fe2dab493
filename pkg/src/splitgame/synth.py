"""Sentence builders: example split sentences, the covering sentence and
separating sentences extracted from Spoiler's winning strategy."""

from __future__ import annotations

import enum
import itertools
import math
from typing import Callable, Sequence

from .core import Structure, check_same_vocabulary, mask_partitions
from .errors import InvalidFormula, NoDistinguisher, WidthExceeded
from .games.base import Side
from .games.efc import EFCSolver, efc_solver
from .logic import (
    BOT,
    THETA_MAX,
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
    dualize,
    eq,
    mask_indices,
    rel,
)


class ExampleKind(enum.Enum):
    CARD_LT = "card_lt"
    NO_DESC_CHAIN = "no_desc_chain"
    NO_CLIQUE = "no_clique"
    NO_BRANCH = "no_branch"
    ARONSZAJN = "aronszajn"
    ENCODE_EXISTS = "encode_exists"
    ENCODE_FORALL = "encode_forall"


def _check_width(m: int) -> None:
    if m > THETA_MAX:
        raise WidthExceeded(f"width {m} exceeds THETA_MAX={THETA_MAX}")


def _names(m: int, prefix: str = "x", avoid=frozenset()) -> list[str]:
    out, i = [], 0
    while len(out) < m:
        name = f"{prefix}{i}"
        if name not in avoid:
            out.append(name)
        i += 1
    return out


def _split_sentence(cls, m: int, entry: Callable[[list[str], list[int]], Formula], prefix="x") -> Formula:
    xs = _names(m, prefix)
    return cls.from_function(xs, lambda A: entry(xs, sorted(A)))


def _pairs(idx, ordered: bool):
    if ordered:
        return itertools.combinations(idx, 2)
    return itertools.permutations(idx, 2)


def card_lt(theta: int, P: str = "P") -> Formula:
    """|P| < theta: every tuple splits into pieces that are either not
    entirely inside P or repeat an element."""
    _check_width(theta)

    def entry(xs, A):
        body = And(rel(P, xs[i]) for i in A)
        repeat = Or(eq(xs[i], xs[j]) for i, j in _pairs(A, False))
        return Or((dualize(body), repeat))

    return _split_sentence(SplitForall, theta, entry)


def no_desc_chain(theta: int, lt: str = "lt") -> Formula:
    """No tuple of length theta is strictly decreasing."""
    _check_width(theta)
    return _split_sentence(
        SplitForall, theta, lambda xs, A: Or(Not(rel(lt, xs[j], xs[i])) for i, j in _pairs(A, True))
    )


def no_branch(theta: int, lt: str = "lt") -> Formula:
    """No tuple of length theta is strictly increasing (a branch, in a tree)."""
    _check_width(theta)
    return _split_sentence(
        SplitForall, theta, lambda xs, A: Or(Not(rel(lt, xs[i], xs[j])) for i, j in _pairs(A, True))
    )


def no_clique(theta: int, R: str = "R") -> Formula:
    """No tuple of length theta is pairwise R-related."""
    _check_width(theta)
    return _split_sentence(
        SplitForall, theta, lambda xs, A: Or(Not(rel(R, xs[i], xs[j])) for i, j in _pairs(A, False))
    )


def encode_quantifier(psi: Formula, xi: int, theta: int, var: str = "x", universal: bool = False) -> Formula:
    """Split of width ``theta`` equivalent to ``exists var psi`` (or ``forall``).

    The piece holding index ``xi`` carries ``psi`` with ``var`` bound at that
    position; every other piece is bottom (top for the universal form).
    """
    _check_width(theta)
    if not 0 <= xi < theta:
        raise InvalidFormula(f"index {xi} outside a tuple of length {theta}")
    avoid = set(psi.free) | {var}
    others = iter(_names(theta - 1, "x", avoid))
    xs = [var if i == xi else next(others) for i in range(theta)]
    filler = TOP if universal else BOT
    cls = SplitForall if universal else SplitExists
    return cls.from_function(xs, lambda A: psi if xi in A else filler)


def build_example(kind: ExampleKind, theta: int, **params) -> Formula:
    """Example sentence of the given kind; ``params`` name the relation
    (``relation=``) or, for the encodings, give ``psi``, ``xi`` and ``var``."""
    kind = ExampleKind(kind)
    if kind is ExampleKind.CARD_LT:
        return card_lt(theta, params.get("relation", "P"))
    if kind in (ExampleKind.NO_DESC_CHAIN, ExampleKind.ARONSZAJN):
        return no_desc_chain(theta, params.get("relation", "lt"))
    if kind is ExampleKind.NO_BRANCH:
        return no_branch(theta, params.get("relation", "lt"))
    if kind is ExampleKind.NO_CLIQUE:
        return no_clique(theta, params.get("relation", "R"))
    return encode_quantifier(
        params["psi"],
        params.get("xi", 0),
        theta,
        params.get("var", "x"),
        universal=kind is ExampleKind.ENCODE_FORALL,
    )


def build_theta_mu(mu: int, R: str = "R") -> Formula:
    """Rank-2 sentence for: every R-fiber has at most ``mu`` elements and
    every element lies in some fiber."""
    if mu < 1:
        raise ValueError("mu must be at least 1")
    _check_width(mu + 1)
    y = "y"

    def small_fibers(xs, A):
        inside = And(rel(R, y, xs[i]) for i in A)
        repeat = Or(eq(xs[i], xs[j]) for i, j in _pairs(A, False))
        return Or((dualize(inside), repeat))

    part1 = Forall(y, _split_sentence(SplitForall, mu + 1, small_fibers))
    part2 = _split_sentence(SplitForall, mu, lambda xs, A: Exists(y, And(rel(R, y, xs[i]) for i in A)))
    return And((part1, part2))


# -- separating sentences ---------------------------------------------------


def _mismatch(S: Structure, T: Structure, terms: Sequence) -> Formula | None:
    """A literal over ``terms`` true at the S-side values and false at the
    T-side values. ``terms`` lists (term, s, t) triples."""
    for (u, s1, t1), (v, s2, t2) in itertools.combinations(terms, 2):
        if (s1 == s2) != (t1 == t2):
            atom = Atom("=", (u, v))
            return atom if s1 == s2 else Not(atom)
    values = {}
    for term, s, t in terms:
        values.setdefault(s, (term, t))
    for name, arity in S.vocab.relations:
        rs, rt = S.rel(name), T.rel(name)
        for combo in itertools.product(values.items(), repeat=arity):
            stup = tuple(s for s, _ in combo)
            ttup = tuple(t for _, (_, t) in combo)
            ins, intt = stup in rs, ttup in rt
            if ins != intt:
                atom = Atom(name, tuple(term for _, (term, _) in combo))
                return atom if ins else Not(atom)
    return None


class _Extractor:
    """Builds, for a position whose rank is finite, a formula over the
    position's terms that is true on the left and false on the right."""

    def __init__(self, M: Structure, N: Structure, theta: int):
        self.solvers = {False: efc_solver(M, N, theta), True: efc_solver(N, M, theta)}
        self.structs = {False: (M, N), True: (N, M)}
        self.memo: dict = {}
        reserved = set(M.vocab.constants)
        self.prefix = "x"
        while any(c.startswith(self.prefix) for c in reserved):
            self.prefix += "_"

    def separate(self, swapped: bool, terms: tuple, depth: int) -> Formula:
        key = (swapped, terms)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        S, T = self.structs[swapped]
        solver = self.solvers[swapped]
        fwd = {s: t for _, s, t in terms}
        if len(fwd) != len({s for _, s, _ in terms}) or not self._is_partial_iso(solver, terms):
            out = _mismatch(S, T, terms)
            if out is None:
                raise AssertionError("broken position without a mismatch")
        else:
            out = self._split(swapped, terms, fwd, depth)
        self.memo[key] = out
        return out

    @staticmethod
    def _is_partial_iso(solver: EFCSolver, terms) -> bool:
        fwd, bwd = {}, {}
        for _, s, t in terms:
            if fwd.setdefault(s, t) != t or bwd.setdefault(t, s) != s:
                return False
        return solver.iso.consistent(fwd, bwd)

    def _split(self, swapped, terms, fwd, depth) -> Formula:
        solver = self.solvers[swapped]
        r = solver.rank(fwd)
        if r == math.inf:
            raise NoDistinguisher("position is not won by Spoiler")
        side, challenge = solver.best_challenge(fwd)
        if side is Side.N:
            flipped = tuple((term, t, s) for term, s, t in terms)
            return dualize(self.separate(not swapped, flipped, depth))
        S, T = self.structs[swapped]
        bwd = {b: a for a, b in fwd.items()}
        elems = sorted(challenge)
        k = len(elems)
        xs = _names(k, f"{self.prefix}{depth}_")
        blockval = {}
        for mask in range(1, 1 << k):
            block = frozenset(elems[i] for i in mask_indices(mask))
            blockval[mask] = solver.block_value(fwd, bwd, Side.M, block)
        chosen = set()
        for parts in mask_partitions((1 << k) - 1):
            good = [b for b in parts if blockval[b] <= r - 1]
            if not good:
                raise AssertionError("partition survives a winning challenge")
            chosen.add(min(good, key=lambda b: (bin(b).count("1"), b)))
        table = []
        for mask in range(1 << k):
            if mask not in chosen:
                table.append(BOT)
                continue
            idx = mask_indices(mask)
            conj = []
            for image in itertools.product(T.universe, repeat=len(idx)):
                ext = terms + tuple((Var(xs[i]), elems[i], d) for i, d in zip(idx, image))
                conj.append(self.separate(swapped, ext, depth + 1))
            table.append(And(_dedup(conj)))
        return SplitExists(xs, table)


def _dedup(formulas):
    seen, out = set(), []
    for f in formulas:
        if f not in seen:
            seen.add(f)
            out.append(f)
    return out


def distinguishing_sentence(M: Structure, N: Structure, theta: int) -> Formula:
    """A sentence of quantifier rank at most the EFC Spoiler rank that holds
    in M and fails in N (ADAPTED semantics)."""
    check_same_vocabulary(M, N)
    if theta < 1:
        raise ValueError("theta must be at least 1")
    ex = _Extractor(M, N, theta)
    terms = tuple((Const(c), M.const(c), N.const(c)) for c in M.vocab.constants)
    if not _Extractor._is_partial_iso(ex.solvers[False], terms):
        out = _mismatch(M, N, terms)
        if out is None:
            raise AssertionError("constants clash without a mismatch")
        return out
    if ex.solvers[False].rank({s: t for _, s, t in terms}) == math.inf:
        raise NoDistinguisher("Duplicator wins the unbounded game: no separating sentence")
    return ex.separate(False, terms, 0)
