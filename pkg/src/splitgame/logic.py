"""Formula syntax for the finitary split-quantifier logic.

A split node quantifies a tuple of ``m`` variables and carries a table with
one formula per subset of ``{0..m-1}``, stored in a tuple indexed by bitmask.
Formulas are immutable and cache their hash, free variables and quantifier
rank at construction, so large shared sentences stay cheap to hash.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .errors import InvalidFormula, WidthExceeded

THETA_MAX = 10


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self):
        return self.name


Term = Var | Const


class Formula:
    __slots__ = ("_hash", "free", "rank")

    def _fields(self) -> tuple:
        raise NotImplementedError

    def _finish(self, free: frozenset, rank: int) -> None:
        object.__setattr__(self, "free", free)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "_hash", hash((type(self).__name__,) + self._fields()))

    def __setattr__(self, key, value):
        raise AttributeError("formulas are immutable")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or self._hash != other._hash:
            return False
        return self._fields() == other._fields()

    def __repr__(self):
        from .textio import render

        return f"<{type(self).__name__} {render(self)}>"

    def children(self) -> tuple["Formula", ...]:
        return ()


class Atom(Formula):
    """``pred(args)``; the predicate ``"="`` is equality."""

    __slots__ = ("pred", "args")

    def __init__(self, pred: str, args: Iterable[Term]):
        args = tuple(args)
        if pred == "=" and len(args) != 2:
            raise InvalidFormula("equality takes two terms")
        if not args:
            raise InvalidFormula(f"atom {pred} needs at least one argument")
        object.__setattr__(self, "pred", pred)
        object.__setattr__(self, "args", args)
        self._finish(frozenset(a.name for a in args if isinstance(a, Var)), 0)

    def _fields(self):
        return (self.pred, self.args)


def eq(left: Term | str, right: Term | str) -> Atom:
    return Atom("=", (_term(left), _term(right)))


def rel(name: str, *args: Term | str) -> Atom:
    return Atom(name, tuple(_term(a) for a in args))


def _term(t: Term | str) -> Term:
    return Var(t) if isinstance(t, str) else t


class Not(Formula):
    __slots__ = ("sub",)

    def __init__(self, sub: Formula):
        object.__setattr__(self, "sub", sub)
        self._finish(sub.free, sub.rank)

    def _fields(self):
        return (self.sub,)

    def children(self):
        return (self.sub,)


class _Junction(Formula):
    __slots__ = ("subs",)

    def __init__(self, subs: Iterable[Formula] = ()):
        subs = tuple(subs)
        object.__setattr__(self, "subs", subs)
        free = frozenset().union(*(s.free for s in subs)) if subs else frozenset()
        self._finish(free, max((s.rank for s in subs), default=0))

    def _fields(self):
        return self.subs

    def children(self):
        return self.subs


class And(_Junction):
    """Finite conjunction; the empty conjunction is top."""

    __slots__ = ()


class Or(_Junction):
    """Finite disjunction; the empty disjunction is bottom."""

    __slots__ = ()


TOP = And(())
BOT = Or(())


class _Quantifier(Formula):
    __slots__ = ("var", "sub")

    def __init__(self, var: str, sub: Formula):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "sub", sub)
        self._finish(sub.free - {var}, sub.rank + 1)

    def _fields(self):
        return (self.var, self.sub)

    def children(self):
        return (self.sub,)


class Exists(_Quantifier):
    __slots__ = ()


class Forall(_Quantifier):
    __slots__ = ()


class _Split(Formula):
    __slots__ = ("bound", "table")

    def __init__(self, bound: Iterable[str], table: Iterable[Formula]):
        bound = tuple(bound)
        table = tuple(table)
        m = len(bound)
        if m > THETA_MAX:
            raise WidthExceeded(f"split width {m} exceeds THETA_MAX={THETA_MAX}")
        if len(set(bound)) != m:
            raise InvalidFormula(f"repeated bound variable in {bound}")
        if len(table) != 1 << m:
            raise InvalidFormula(f"split table over {m} variables needs {1 << m} entries, got {len(table)}")
        bound_set = frozenset(bound)
        for mask, entry in enumerate(table):
            allowed = {bound[i] for i in range(m) if mask >> i & 1}
            stray = (entry.free & bound_set) - allowed
            if stray:
                raise InvalidFormula(
                    f"entry for {{{','.join(str(i) for i in mask_indices(mask))}}} mentions "
                    f"{sorted(stray)} outside its index set"
                )
        object.__setattr__(self, "bound", bound)
        object.__setattr__(self, "table", table)
        free = frozenset().union(*(e.free for e in table)) - bound_set
        self._finish(free, max(e.rank for e in table) + 1)

    @classmethod
    def from_function(cls, bound: Iterable[str], entry: Callable[[frozenset], Formula]):
        """Build the table by calling ``entry`` on each index subset."""
        bound = tuple(bound)
        return cls(bound, (entry(frozenset(mask_indices(mask))) for mask in range(1 << len(bound))))

    @property
    def width(self) -> int:
        return len(self.bound)

    def entry(self, indices: Iterable[int]) -> Formula:
        return self.table[indices_mask(indices)]

    def _fields(self):
        return (self.bound, self.table)

    def children(self):
        return self.table


class SplitForall(_Split):
    """For every tuple some partition has every block's formula true."""

    __slots__ = ()


class SplitExists(_Split):
    """Some tuple has, for every partition, a block whose formula is true."""

    __slots__ = ()


def mask_indices(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def indices_mask(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


# -- operations -------------------------------------------------------------


def quantifier_rank(phi: Formula) -> int:
    return phi.rank


def free_variables(phi: Formula) -> frozenset:
    return phi.free


def implies(a: Formula, b: Formula) -> Formula:
    return Or((dualize(a), b))


def dualize(phi: Formula, _memo: dict | None = None) -> Formula:
    """Negation normal form of ``not phi``.

    Negation is pushed through connectives and quantifiers; a universal split
    becomes an existential split over the same variables whose entries are
    the dualized entries, and vice versa.
    """
    memo = {} if _memo is None else _memo
    key = (id(phi), True)
    hit = memo.get(key)
    if hit is not None:
        return hit[1]
    if isinstance(phi, Atom):
        out = Not(phi)
    elif isinstance(phi, Not):
        out = nnf(phi.sub, memo)
    elif isinstance(phi, And):
        out = Or(dualize(s, memo) for s in phi.subs)
    elif isinstance(phi, Or):
        out = And(dualize(s, memo) for s in phi.subs)
    elif isinstance(phi, Exists):
        out = Forall(phi.var, dualize(phi.sub, memo))
    elif isinstance(phi, Forall):
        out = Exists(phi.var, dualize(phi.sub, memo))
    elif isinstance(phi, SplitForall):
        out = SplitExists(phi.bound, (dualize(e, memo) for e in phi.table))
    elif isinstance(phi, SplitExists):
        out = SplitForall(phi.bound, (dualize(e, memo) for e in phi.table))
    else:
        raise TypeError(f"not a formula: {phi!r}")
    memo[key] = (phi, out)
    return out


def nnf(phi: Formula, _memo: dict | None = None) -> Formula:
    """Negation normal form of ``phi`` (negations only directly on atoms)."""
    memo = {} if _memo is None else _memo
    key = (id(phi), False)
    hit = memo.get(key)
    if hit is not None:
        return hit[1]
    if isinstance(phi, Atom):
        out = phi
    elif isinstance(phi, Not):
        out = dualize(phi.sub, memo)
    elif isinstance(phi, And):
        out = And(nnf(s, memo) for s in phi.subs)
    elif isinstance(phi, Or):
        out = Or(nnf(s, memo) for s in phi.subs)
    elif isinstance(phi, (Exists, Forall)):
        out = type(phi)(phi.var, nnf(phi.sub, memo))
    elif isinstance(phi, _Split):
        out = type(phi)(phi.bound, (nnf(e, memo) for e in phi.table))
    else:
        raise TypeError(f"not a formula: {phi!r}")
    memo[key] = (phi, out)
    return out


@dataclass(frozen=True)
class Fragment:
    """A subformula-closed finite set of formulas."""

    formulas: frozenset

    def __post_init__(self):
        for f in self.formulas:
            for c in f.children():
                if c not in self.formulas:
                    raise InvalidFormula(f"fragment not closed: missing child of {f!r}")

    def __iter__(self) -> Iterator[Formula]:
        return iter(self.formulas)

    def __len__(self):
        return len(self.formulas)

    def __contains__(self, phi):
        return phi in self.formulas

    def union(self, other: "Fragment") -> "Fragment":
        return Fragment(self.formulas | other.formulas)


def subformula_closure(phi: Formula | Iterable[Formula]) -> Fragment:
    """Least subformula-closed set containing ``phi`` (or every given formula)."""
    roots = [phi] if isinstance(phi, Formula) else list(phi)
    seen: set = set()
    stack = list(roots)
    while stack:
        f = stack.pop()
        if f in seen:
            continue
        seen.add(f)
        stack.extend(f.children())
    return Fragment(frozenset(seen))


def iter_nodes(phi: Formula) -> Iterator[Formula]:
    """Distinct nodes of ``phi`` (shared subterms visited once)."""
    seen: set[int] = set()
    stack = [phi]
    while stack:
        f = stack.pop()
        if id(f) in seen:
            continue
        seen.add(id(f))
        yield f
        stack.extend(f.children())


def max_width(phi: Formula) -> int:
    return max((n.width for n in iter_nodes(phi) if isinstance(n, _Split)), default=0)


def formula_size(phi: Formula) -> int:
    """Number of distinct nodes."""
    return sum(1 for _ in iter_nodes(phi))


def symbols(phi: Formula) -> tuple[set[str], set[str]]:
    """Relation names and constant names occurring in ``phi``."""
    rels: set[str] = set()
    consts: set[str] = set()
    for n in iter_nodes(phi):
        if isinstance(n, Atom):
            if n.pred != "=":
                rels.add(n.pred)
            consts.update(a.name for a in n.args if isinstance(a, Const))
    return rels, consts


Split = _Split
