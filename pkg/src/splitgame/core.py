"""Finite relational structures, partial isomorphisms, set partitions and
clock ordinals below omega squared."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Iterable, Iterator, Mapping

from .errors import OutOfUniverse, TooLarge, VocabularyMismatch

CANONICAL_BOUND = 8


@dataclass(frozen=True)
class Vocabulary:
    """Relation symbols with arities plus constant symbols.

    Both lists are kept sorted by name so that two vocabularies declared in a
    different order compare equal.
    """

    relations: tuple[tuple[str, int], ...] = ()
    constants: tuple[str, ...] = ()

    def __post_init__(self):
        rels = tuple(sorted((str(n), int(a)) for n, a in self.relations))
        consts = tuple(sorted(str(c) for c in self.constants))
        names = [n for n, _ in rels] + list(consts)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate symbol in vocabulary: {names}")
        for name, arity in rels:
            if arity < 1:
                raise ValueError(f"relation {name} has arity {arity} < 1")
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "constants", consts)

    @classmethod
    def of(cls, relations: Mapping[str, int] | None = None, constants: Iterable[str] = ()):
        return cls(tuple((relations or {}).items()), tuple(constants))

    def arity(self, name: str) -> int:
        for n, a in self.relations:
            if n == name:
                return a
        raise KeyError(name)

    def has_relation(self, name: str) -> bool:
        return any(n == name for n, _ in self.relations)

    def relation_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.relations)


@dataclass(frozen=True, eq=False)
class Structure:
    """A finite relational structure.

    ``universe`` is a sorted tuple of non-negative element ids.  Parsed and
    generated structures use ``0..n-1``; induced substructures keep the ids of
    the parent so that inclusion between universes is literal.
    """

    vocab: Vocabulary
    universe: tuple[int, ...]
    rels: tuple[frozenset, ...]
    consts: tuple[int, ...] = ()
    _hash: int = field(default=0, repr=False)

    def __post_init__(self):
        if not self.universe:
            raise ValueError("universe must be nonempty")
        elems = set(self.universe)
        if len(self.rels) != len(self.vocab.relations):
            raise ValueError("one interpretation per relation symbol required")
        for (name, arity), tuples in zip(self.vocab.relations, self.rels):
            for t in tuples:
                if len(t) != arity:
                    raise ValueError(f"tuple {t} has wrong arity for {name}/{arity}")
                for e in t:
                    if e not in elems:
                        raise OutOfUniverse(f"element {e} of {name}{t} not in universe")
        if len(self.consts) != len(self.vocab.constants):
            raise ValueError("one interpretation per constant required")
        for c, e in zip(self.vocab.constants, self.consts):
            if e not in elems:
                raise OutOfUniverse(f"constant {c}={e} not in universe")
        object.__setattr__(self, "_hash", hash((self.vocab, self.universe, self.rels, self.consts)))

    @classmethod
    def build(
        cls,
        vocab: Vocabulary,
        universe: int | Iterable[int],
        relations: Mapping[str, Iterable[Iterable[int]]] | None = None,
        constants: Mapping[str, int] | None = None,
    ) -> "Structure":
        if isinstance(universe, int):
            univ = tuple(range(universe))
        else:
            univ = tuple(sorted(set(universe)))
        relations = relations or {}
        constants = constants or {}
        unknown = set(relations) - set(vocab.relation_names())
        if unknown:
            raise KeyError(f"unknown relation(s): {sorted(unknown)}")
        rels = tuple(frozenset(tuple(t) for t in relations.get(n, ())) for n, _ in vocab.relations)
        consts = tuple(constants[c] for c in vocab.constants)
        return cls(vocab, univ, rels, consts)

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return (
            self._hash == other._hash
            and self.vocab == other.vocab
            and self.universe == other.universe
            and self.rels == other.rels
            and self.consts == other.consts
        )

    def __hash__(self):
        return self._hash

    @property
    def size(self) -> int:
        return len(self.universe)

    def rel(self, name: str) -> frozenset:
        for (n, _), tuples in zip(self.vocab.relations, self.rels):
            if n == name:
                return tuples
        raise KeyError(name)

    def const(self, name: str) -> int:
        return self.consts[self.vocab.constants.index(name)]

    def interpretation(self) -> dict[str, frozenset]:
        return {n: t for (n, _), t in zip(self.vocab.relations, self.rels)}

    def constant_map(self) -> dict[str, int]:
        return dict(zip(self.vocab.constants, self.consts))

    def is_dense(self) -> bool:
        return self.universe == tuple(range(len(self.universe)))

    def induced(self, subset: Iterable[int]) -> "Structure":
        """Substructure induced on ``subset`` (constants must lie inside)."""
        sub = frozenset(subset)
        if not sub <= set(self.universe):
            raise OutOfUniverse(f"{sorted(sub - set(self.universe))} not in universe")
        rels = tuple(frozenset(t for t in ts if all(e in sub for e in t)) for ts in self.rels)
        return Structure(self.vocab, tuple(sorted(sub)), rels, self.consts)

    def relabel(self, mapping: Mapping[int, int]) -> "Structure":
        rels = tuple(frozenset(tuple(mapping[e] for e in t) for t in ts) for ts in self.rels)
        consts = tuple(mapping[c] for c in self.consts)
        return Structure(self.vocab, tuple(sorted(mapping[e] for e in self.universe)), rels, consts)

    def densified(self) -> "Structure":
        """Isomorphic copy on ``0..n-1`` preserving element order."""
        if self.is_dense():
            return self
        return self.relabel({e: i for i, e in enumerate(self.universe)})


def is_substructure(small: Structure, big: Structure) -> bool:
    """True iff ``small`` is the substructure of ``big`` induced on its universe."""
    if small.vocab != big.vocab or not set(small.universe) <= set(big.universe):
        return False
    return small == big.induced(small.universe)


# -- partial isomorphisms ---------------------------------------------------


@dataclass(frozen=True)
class PartialMap:
    pairs: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset((int(a), int(b)) for a, b in self.pairs))

    @classmethod
    def of(cls, mapping: Mapping[int, int] | Iterable[tuple[int, int]]) -> "PartialMap":
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        return cls(frozenset(items))

    def domain(self) -> frozenset:
        return frozenset(a for a, _ in self.pairs)

    def range(self) -> frozenset:
        return frozenset(b for _, b in self.pairs)

    def is_injective_function(self) -> bool:
        return len(self.domain()) == len(self.pairs) == len(self.range())

    def inverse(self) -> "PartialMap":
        return PartialMap(frozenset((b, a) for a, b in self.pairs))

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(sorted(self.pairs))


def check_same_vocabulary(M: Structure, N: Structure) -> None:
    if M.vocab != N.vocab:
        raise VocabularyMismatch(f"{M.vocab} != {N.vocab}")


def is_partial_isomorphism(M: Structure, N: Structure, p) -> bool:
    """Decide whether ``p`` (a PartialMap, dict or iterable of pairs) is a
    partial isomorphism from M to N."""
    check_same_vocabulary(M, N)
    pairs = p.pairs if isinstance(p, PartialMap) else PartialMap.of(p).pairs
    mu, nu = set(M.universe), set(N.universe)
    for a, b in pairs:
        if a not in mu:
            raise OutOfUniverse(f"source {a} not in universe of M")
        if b not in nu:
            raise OutOfUniverse(f"target {b} not in universe of N")
    fwd: dict[int, int] = {}
    bwd: dict[int, int] = {}
    for a, b in pairs:
        if fwd.setdefault(a, b) != b or bwd.setdefault(b, a) != a:
            return False
    return IsoChecker(M, N).consistent(fwd, bwd)


class IsoChecker:
    """Incremental partial-isomorphism test for a fixed pair of structures.

    Relation tuples are indexed by the elements they contain, so extending a
    valid map only re-examines tuples that touch a new element.
    """

    def __init__(self, M: Structure, N: Structure):
        check_same_vocabulary(M, N)
        self.M, self.N = M, N
        self.rels = list(zip(M.rels, N.rels))
        self._m_index = [self._index(rm) for rm, _ in self.rels]
        self._n_index = [self._index(rn) for _, rn in self.rels]
        self.const_pairs = tuple(zip(M.consts, N.consts))

    @staticmethod
    def _index(tuples) -> dict[int, list]:
        idx: dict[int, list] = {}
        for t in tuples:
            for e in set(t):
                idx.setdefault(e, []).append(t)
        return idx

    def consistent(self, fwd: Mapping[int, int], bwd: Mapping[int, int]) -> bool:
        """Full check of an injective map given as forward/backward dicts."""
        for cm, cn in self.const_pairs:
            if cm in fwd and fwd[cm] != cn:
                return False
            if cn in bwd and bwd[cn] != cm:
                return False
        for rm, rn in self.rels:
            for t in rm:
                if all(e in fwd for e in t) and tuple(fwd[e] for e in t) not in rn:
                    return False
            for t in rn:
                if all(e in bwd for e in t) and tuple(bwd[e] for e in t) not in rm:
                    return False
        return True

    def extension_ok(self, fwd: Mapping[int, int], bwd: Mapping[int, int], new_pairs) -> bool:
        """Assuming ``fwd``/``bwd`` already include ``new_pairs`` and the map
        without them was a partial isomorphism, check the extended map."""
        for a, b in new_pairs:
            if fwd.get(a) != b or bwd.get(b) != a:
                return False
        for cm, cn in self.const_pairs:
            for a, b in new_pairs:
                if (a == cm) != (b == cn):
                    return False
        for (rm, rn), midx, nidx in zip(self.rels, self._m_index, self._n_index):
            for a, b in new_pairs:
                for t in midx.get(a, ()):
                    if all(e in fwd for e in t) and tuple(fwd[e] for e in t) not in rn:
                        return False
                for t in nidx.get(b, ()):
                    if all(e in bwd for e in t) and tuple(bwd[e] for e in t) not in rm:
                        return False
        return True

    def initial_map(self) -> dict[int, int] | None:
        """The map sending each constant of M to the same constant of N, or
        None when that is not a partial isomorphism."""
        fwd: dict[int, int] = {}
        bwd: dict[int, int] = {}
        for cm, cn in self.const_pairs:
            if fwd.setdefault(cm, cn) != cn or bwd.setdefault(cn, cm) != cm:
                return None
        return fwd if self.consistent(fwd, bwd) else None


# -- set partitions ---------------------------------------------------------


@dataclass(frozen=True)
class SetPartition:
    blocks: tuple[frozenset, ...]

    def __post_init__(self):
        blocks = tuple(sorted((frozenset(b) for b in self.blocks), key=lambda b: min(b)))
        seen: set = set()
        for b in blocks:
            if not b:
                raise ValueError("empty block")
            if seen & b:
                raise ValueError("blocks overlap")
            seen |= b
        object.__setattr__(self, "blocks", blocks)

    def support(self) -> frozenset:
        return frozenset().union(*self.blocks)

    def block_of(self, i) -> frozenset:
        for b in self.blocks:
            if i in b:
                return b
        raise KeyError(i)

    def __len__(self):
        return len(self.blocks)


def enumerate_set_partitions(indices: Iterable) -> Iterator[SetPartition]:
    """Every partition of ``indices`` into nonempty blocks, each exactly once.

    Restricted-growth enumeration: element k joins one of the blocks opened
    by earlier elements or opens a new one.
    """
    items = sorted(set(indices))

    def grow(k: int, blocks: list[list]) -> Iterator[list[list]]:
        if k == len(items):
            yield blocks
            return
        x = items[k]
        for b in blocks:
            b.append(x)
            yield from grow(k + 1, blocks)
            b.pop()
        blocks.append([x])
        yield from grow(k + 1, blocks)
        blocks.pop()

    for blocks in grow(0, []):
        yield SetPartition(tuple(frozenset(b) for b in blocks))


def mask_partitions(mask: int) -> Iterator[tuple[int, ...]]:
    """Partitions of the bits of ``mask`` as tuples of block bitmasks.

    The block holding the lowest bit is chosen first, so each partition is
    produced once.
    """
    if mask == 0:
        yield ()
        return
    low = mask & -mask
    rest = mask ^ low
    sub = rest
    while True:
        block = sub | low
        for tail in mask_partitions(rest ^ sub):
            yield (block,) + tail
        if sub == 0:
            break
        sub = (sub - 1) & rest


@dataclass(frozen=True)
class LabeledPartition:
    """A total labelling of a finite index set by naturals (delays)."""

    labels: tuple[tuple[int, int], ...]
    max_label: int | None = None

    def __post_init__(self):
        labels = tuple(sorted((int(i), int(l)) for i, l in self.labels))
        if any(l < 0 for _, l in labels):
            raise ValueError("labels are natural numbers")
        if self.max_label is not None and any(l > self.max_label for _, l in labels):
            raise ValueError(f"label exceeds maximum {self.max_label}")
        object.__setattr__(self, "labels", labels)

    def preimage(self, n: int) -> frozenset:
        return frozenset(i for i, l in self.labels if l == n)

    def induced_partition(self) -> SetPartition:
        groups: dict[int, set] = {}
        for i, l in self.labels:
            groups.setdefault(l, set()).add(i)
        return SetPartition(tuple(frozenset(g) for g in groups.values()))


# -- clock ordinals ---------------------------------------------------------


class Cmp(enum.Enum):
    LT = -1
    EQ = 0
    GT = 1


@total_ordering
@dataclass(frozen=True)
class ClockOrdinal:
    """``omega*omega_coeff + finite_part`` below omega squared, or infinity."""

    omega_coeff: int = 0
    finite_part: int = 0
    infinite: bool = False

    def __post_init__(self):
        if self.omega_coeff < 0 or self.finite_part < 0:
            raise ValueError("ordinal coefficients are natural numbers")
        if self.infinite and (self.omega_coeff or self.finite_part):
            raise ValueError("INFINITY carries no coefficients")

    def _key(self):
        return (1, 0, 0) if self.infinite else (0, self.omega_coeff, self.finite_part)

    def __lt__(self, other):
        if not isinstance(other, ClockOrdinal):
            return NotImplemented
        return self._key() < other._key()

    @classmethod
    def finite(cls, n: int) -> "ClockOrdinal":
        return cls(0, n)

    @classmethod
    def parse(cls, text: str) -> "ClockOrdinal":
        """Parse ``k``, ``w``, ``w*k``, ``w+m``, ``w*k+m`` or ``inf``."""
        s = text.replace(" ", "").lower()
        if s in ("inf", "infinity", "oo"):
            return INFINITY
        if s.isdigit():
            return cls(0, int(s))
        if not s.startswith("w"):
            raise ValueError(f"bad clock literal {text!r}")
        rest = s[1:]
        coeff, fin = 1, 0
        if rest.startswith("*"):
            num = ""
            rest = rest[1:]
            while rest and rest[0].isdigit():
                num, rest = num + rest[0], rest[1:]
            if not num:
                raise ValueError(f"bad clock literal {text!r}")
            coeff = int(num)
        if rest.startswith("+"):
            if not rest[1:].isdigit():
                raise ValueError(f"bad clock literal {text!r}")
            fin = int(rest[1:])
        elif rest:
            raise ValueError(f"bad clock literal {text!r}")
        return cls(coeff, fin)

    @property
    def is_finite(self) -> bool:
        return not self.infinite and self.omega_coeff == 0

    @property
    def is_limit(self) -> bool:
        return not self.infinite and self.omega_coeff > 0 and self.finite_part == 0

    def __str__(self):
        if self.infinite:
            return "inf"
        if self.omega_coeff == 0:
            return str(self.finite_part)
        head = "w" if self.omega_coeff == 1 else f"w*{self.omega_coeff}"
        return head if self.finite_part == 0 else f"{head}+{self.finite_part}"


INFINITY = ClockOrdinal(infinite=True)
ZERO = ClockOrdinal()


def ordinal_compare(a: ClockOrdinal, b: ClockOrdinal) -> Cmp:
    if a < b:
        return Cmp.LT
    if a == b:
        return Cmp.EQ
    return Cmp.GT


def omega_times(beta: int) -> ClockOrdinal:
    return ClockOrdinal(beta, 0)


def as_clock(value) -> ClockOrdinal:
    if isinstance(value, ClockOrdinal):
        return value
    if isinstance(value, int):
        return ClockOrdinal.finite(value)
    return ClockOrdinal.parse(str(value))


# -- canonical keys ---------------------------------------------------------


def _element_invariants(M: Structure) -> dict[int, tuple]:
    inv: dict[int, list] = {e: [] for e in M.universe}
    for (name, arity), tuples in zip(M.vocab.relations, M.rels):
        counts = {e: [0] * (arity + 1) for e in M.universe}
        for t in tuples:
            for pos, e in enumerate(t):
                counts[e][pos] += 1
            if len(set(t)) == 1:
                counts[t[0]][arity] += 1
        for e in M.universe:
            inv[e].append(tuple(counts[e]))
    for e in M.universe:
        inv[e].append(tuple(i for i, c in enumerate(M.consts) if c == e))
    return {e: tuple(v) for e, v in inv.items()}


def canonical_key(M: Structure, bound: int = CANONICAL_BOUND):
    """A key equal for two structures exactly when they are isomorphic.

    The serialized interpretation is minimized over all relabelings onto
    ``0..n-1``.  Elements are first grouped by an isomorphism-invariant
    signature and only signature-preserving relabelings are tried, which
    gives the same minimum class-wise and cuts the factorial down.
    """
    n = M.size
    if n > bound:
        raise TooLarge(f"canonical_key bound {bound} exceeded by size {n}")
    inv = _element_invariants(M)
    classes: dict[tuple, list[int]] = {}
    for e in M.universe:
        classes.setdefault(inv[e], []).append(e)
    ordered = sorted(classes.items())
    signature = tuple((sig, len(es)) for sig, es in ordered)
    best = None
    slots = []
    start = 0
    for _, es in ordered:
        slots.append((es, list(range(start, start + len(es)))))
        start += len(es)
    for choice in itertools.product(*(itertools.permutations(ids) for _, ids in slots)):
        mapping = {}
        for (es, _), ids in zip(slots, choice):
            mapping.update(zip(es, ids))
        ser = (
            tuple(tuple(sorted(tuple(mapping[e] for e in t) for t in ts)) for ts in M.rels),
            tuple(mapping[c] for c in M.consts),
        )
        if best is None or ser < best:
            best = ser
    return (M.vocab, n, signature, best)


def are_isomorphic(M: Structure, N: Structure) -> bool:
    if M.vocab != N.vocab or M.size != N.size:
        return False
    return canonical_key(M, bound=max(M.size, CANONICAL_BOUND)) == canonical_key(
        N, bound=max(N.size, CANONICAL_BOUND)
    )
