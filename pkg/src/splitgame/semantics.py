"""Model checking for split formulas, Skolem closure and elementary
substructures relative to a fragment."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .core import Structure, is_substructure
from .errors import (
    EmptySeed,
    NotBinary,
    NotChain,
    NotSubstructure,
    UnboundVariable,
    VocabularyMismatch,
    WidthExceeded,
)
from .logic import (
    THETA_MAX,
    And,
    Atom,
    Exists,
    Forall,
    Formula,
    Fragment,
    Not,
    Or,
    SplitExists,
    SplitForall,
    Var,
)


class SemanticsMode(enum.Enum):
    """How a finite split treats the piece indexed by the empty set.

    ADAPTED quantifies over partitions of the tuple into nonempty blocks.
    STRICT also requires (for universal splits) or accepts (for existential
    splits) the empty-set entry, since any labelling of a finite tuple by
    naturals leaves some label unused.
    """

    ADAPTED = "adapted"
    STRICT = "strict"


ADAPTED = SemanticsMode.ADAPTED
STRICT = SemanticsMode.STRICT


def _cover(full: int, good) -> bool:
    """Can the bits of ``full`` be partitioned into blocks with ``good(block)``?"""
    memo = {0: True}

    def go(mask: int) -> bool:
        hit = memo.get(mask)
        if hit is not None:
            return hit
        low = mask & -mask
        rest = mask ^ low
        sub = rest
        ok = False
        while True:
            block = sub | low
            if good(block) and go(mask ^ block):
                ok = True
                break
            if sub == 0:
                break
            sub = (sub - 1) & rest
        memo[mask] = ok
        return ok

    return go(full)


class Evaluator:
    """Truth of formulas in one structure under one semantics mode.

    Results are memoized per (formula, values of its free variables); the
    cache is write-once so sharing an evaluator is safe.
    """

    def __init__(self, M: Structure, mode: SemanticsMode = ADAPTED):
        self.M = M
        self.mode = mode
        self.universe = M.universe
        self.rels = M.interpretation()
        self.consts = M.constant_map()
        self._memo: dict = {}
        self._order: dict = {}

    def holds(self, phi: Formula, assignment: Mapping[str, int] | None = None) -> bool:
        env = dict(assignment or {})
        missing = phi.free - env.keys()
        if missing:
            raise UnboundVariable(f"no value for {sorted(missing)}")
        elems = set(self.universe)
        for v in phi.free:
            if env[v] not in elems:
                raise UnboundVariable(f"{v}={env[v]} is not an element of the structure")
        return self._ev(phi, env)

    def _free_order(self, phi: Formula) -> tuple:
        order = self._order.get(phi)
        if order is None:
            order = self._order[phi] = tuple(sorted(phi.free))
        return order

    def _ev(self, phi: Formula, env: dict) -> bool:
        if isinstance(phi, Atom):
            return self._atom(phi, env)
        key = (phi, tuple(env[v] for v in self._free_order(phi)))
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if isinstance(phi, Not):
            out = not self._ev(phi.sub, env)
        elif isinstance(phi, And):
            out = all(self._ev(s, env) for s in phi.subs)
        elif isinstance(phi, Or):
            out = any(self._ev(s, env) for s in phi.subs)
        elif isinstance(phi, (Exists, Forall)):
            want = isinstance(phi, Exists)
            out = not want
            saved = env.get(phi.var, _MISSING)
            for e in self.universe:
                env[phi.var] = e
                if self._ev(phi.sub, env) == want:
                    out = want
                    break
            _restore(env, phi.var, saved)
        elif isinstance(phi, SplitForall):
            out = self._split(phi, env, universal=True)
        elif isinstance(phi, SplitExists):
            out = self._split(phi, env, universal=False)
        else:
            raise TypeError(f"not a formula: {phi!r}")
        self._memo[key] = out
        return out

    def _atom(self, phi: Atom, env: dict) -> bool:
        vals = []
        for a in phi.args:
            if isinstance(a, Var):
                try:
                    vals.append(env[a.name])
                except KeyError:
                    raise UnboundVariable(a.name) from None
            else:
                try:
                    vals.append(self.consts[a.name])
                except KeyError:
                    raise VocabularyMismatch(f"unknown constant {a.name}") from None
        if phi.pred == "=":
            return vals[0] == vals[1]
        try:
            return tuple(vals) in self.rels[phi.pred]
        except KeyError:
            raise VocabularyMismatch(f"unknown relation {phi.pred}") from None

    def _split(self, phi, env: dict, universal: bool) -> bool:
        m = phi.width
        if m > THETA_MAX:
            raise WidthExceeded(f"split width {m} > {THETA_MAX}")
        if self.mode is STRICT:
            empty_entry = self._ev(phi.table[0], env)
            if universal and not empty_entry:
                return False
            if not universal and empty_entry:
                return True
        return self.split_condition(phi, env, universal)

    def split_condition(self, phi, env: dict, universal: bool, witness: bool = False):
        """The partition condition of a split, without the empty-set gate.

        Universal: every tuple admits a partition whose blocks all hold.
        Existential: some tuple makes every partition contain a true block.
        With ``witness`` the first tuple deciding the outcome is returned
        (a counterexample for universal, a witness for existential) or None.
        """
        bound = phi.bound
        table = phi.table
        full = (1 << len(bound)) - 1
        saved = [env.get(v, _MISSING) for v in bound]
        found = None
        try:
            for tup in itertools.product(self.universe, repeat=len(bound)):
                for v, e in zip(bound, tup):
                    env[v] = e
                sat: dict[int, bool] = {}

                def good(block, _sat=sat):
                    hit = _sat.get(block)
                    if hit is None:
                        hit = _sat[block] = self._ev(table[block], env)
                    return hit if universal else not hit

                coverable = _cover(full, good)
                # universal fails on an uncoverable tuple; existential
                # succeeds on a tuple where false blocks cannot cover
                if not coverable:
                    found = tup
                    break
        finally:
            for v, old in zip(bound, saved):
                _restore(env, v, old)
        if witness:
            return found
        return found is None if universal else found is not None


_MISSING = object()


def _restore(env: dict, var: str, saved) -> None:
    if saved is _MISSING:
        env.pop(var, None)
    else:
        env[var] = saved


def evaluate(
    M: Structure,
    phi: Formula,
    assignment: Mapping[str, int] | None = None,
    mode: SemanticsMode = ADAPTED,
) -> bool:
    return Evaluator(M, mode).holds(phi, assignment)


def covering_class_oracle(M: Structure, R: str, mu: int) -> bool:
    """Direct check of: every R-fiber has at most ``mu`` elements, and (for
    ``mu >= 1``) every element lies in some fiber."""
    if not M.vocab.has_relation(R) or M.vocab.arity(R) != 2:
        raise NotBinary(f"{R} is not a binary relation of the vocabulary")
    fibers: dict[int, set] = {a: set() for a in M.universe}
    for a, b in M.rel(R):
        fibers[a].add(b)
    if any(len(f) > mu for f in fibers.values()):
        return False
    if mu == 0:
        return True
    covered = set().union(*fibers.values())
    return covered >= set(M.universe)


# -- Skolem closure and elementary substructures ----------------------------


def _witness(ev: Evaluator, node: Formula, env: dict):
    """Least witness tuple for an existential node, or least counterexample
    tuple for a universal node; None when there is none."""
    if isinstance(node, (Exists, Forall)):
        want = isinstance(node, Exists)
        saved = env.get(node.var, _MISSING)
        try:
            for e in ev.universe:
                env[node.var] = e
                if ev._ev(node.sub, env) == want:
                    return (e,)
        finally:
            _restore(env, node.var, saved)
        return None
    if isinstance(node, (SplitExists, SplitForall)):
        return ev.split_condition(node, env, universal=isinstance(node, SplitForall), witness=True)
    return None


def skolem_closure(
    M: Structure,
    T: Fragment | Iterable[Formula],
    X: Iterable[int],
    mode: SemanticsMode = ADAPTED,
) -> Structure:
    """Substructure of M induced on the least superset of ``X`` (and the
    constants) closed under the least-witness Skolem functions of the
    quantifier nodes of ``T``.

    Existential nodes contribute their least witness; universal nodes
    contribute their least counterexample, i.e. the witness of the dual
    existential, which the fragment does not contain explicitly.
    """
    closed = set(X)
    if not closed:
        raise EmptySeed("seed set must be nonempty")
    univ = set(M.universe)
    if not closed <= univ:
        raise NotSubstructure(f"seed {sorted(closed - univ)} outside the universe")
    closed |= set(M.consts)
    nodes = [f for f in T if isinstance(f, (Exists, Forall, SplitExists, SplitForall))]
    ev = Evaluator(M, mode)
    done: set = set()
    changed = True
    while changed:
        changed = False
        members = sorted(closed)
        for node in nodes:
            free = tuple(sorted(node.free))
            for vals in itertools.product(members, repeat=len(free)):
                key = (node, vals)
                if key in done:
                    continue
                done.add(key)
                w = _witness(ev, node, dict(zip(free, vals)))
                if w is not None:
                    new = set(w) - closed
                    if new:
                        closed |= new
                        changed = True
    return M.induced(closed)


def is_elementary_substructure(
    M0: Structure,
    M: Structure,
    T: Fragment | Iterable[Formula],
    mode: SemanticsMode = ADAPTED,
) -> bool:
    """M0 is an induced substructure of M agreeing with M on every formula of
    ``T`` at every assignment into M0."""
    if not is_substructure(M0, M):
        raise NotSubstructure("M0 is not the substructure of M induced on its universe")
    e0, e1 = Evaluator(M0, mode), Evaluator(M, mode)
    for phi in T:
        free = tuple(sorted(phi.free))
        for vals in itertools.product(M0.universe, repeat=len(free)):
            env = dict(zip(free, vals))
            if e0.holds(phi, env) != e1.holds(phi, env):
                return False
    return True


def elementarity_failure(M0, M, T, mode=ADAPTED):
    """First (formula, assignment) on which M0 and M disagree, or None."""
    e0, e1 = Evaluator(M0, mode), Evaluator(M, mode)
    for phi in T:
        free = tuple(sorted(phi.free))
        for vals in itertools.product(M0.universe, repeat=len(free)):
            env = dict(zip(free, vals))
            if e0.holds(phi, env) != e1.holds(phi, env):
                return phi, env
    return None


@dataclass
class ChainReport:
    adjacent: list[bool]
    ends: bool | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def all_adjacent(self) -> bool:
        return all(self.adjacent)

    @property
    def consistent_with_union_lemma(self) -> bool:
        """False only when every link is elementary but the ends are not."""
        return not self.all_adjacent or bool(self.ends)


def check_chain_union(
    chain: list[Structure],
    T: Fragment | Iterable[Formula],
    mode: SemanticsMode = ADAPTED,
) -> ChainReport:
    """Which links of a chain of induced substructures are T-elementary, and
    whether the first member is T-elementary in the last."""
    if not chain:
        raise NotChain("empty chain")
    for a, b in zip(chain, chain[1:]):
        if a.vocab != b.vocab:
            raise VocabularyMismatch("chain members differ in vocabulary")
        if not is_substructure(a, b):
            raise NotChain("each member must be an induced substructure of the next")
    T = list(T)
    adjacent = [is_elementary_substructure(a, b, T, mode) for a, b in zip(chain, chain[1:])]
    report = ChainReport(adjacent)
    if all(adjacent):
        report.ends = is_elementary_substructure(chain[0], chain[-1], T, mode)
    return report
