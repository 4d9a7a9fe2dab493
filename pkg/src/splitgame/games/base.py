"""Shared game vocabulary: kinds, positions, moves and ranks."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable

from ..core import (
    INFINITY,
    ClockOrdinal,
    IsoChecker,
    LabeledPartition,
    PartialMap,
    Structure,
    as_clock,
    check_same_vocabulary,
)
from ..errors import InvalidPosition


class Player(enum.Enum):
    SPOILER = "spoiler"
    DUPLICATOR = "duplicator"


SPOILER = Player.SPOILER
DUPLICATOR = Player.DUPLICATOR


class Side(enum.Enum):
    M = "M"
    N = "N"

    @property
    def other(self) -> "Side":
        return Side.N if self is Side.M else Side.M


@dataclass(frozen=True)
class GameKind:
    """EFC, DG, or DGVV with its bound ``alpha`` on delays."""

    name: str
    alpha: int | None = None

    def __post_init__(self):
        if self.name not in ("EFC", "DG", "DGVV"):
            raise ValueError(f"unknown game kind {self.name!r}")
        if self.name == "DGVV":
            if self.alpha is None or self.alpha < 1:
                raise ValueError("DGVV needs alpha >= 1")
        elif self.alpha is not None:
            raise ValueError(f"{self.name} takes no alpha")

    @classmethod
    def dgvv(cls, alpha: int) -> "GameKind":
        return cls("DGVV", alpha)

    @property
    def delayed(self) -> bool:
        return self.name != "EFC"

    def __str__(self):
        return f"DGVV({self.alpha})" if self.name == "DGVV" else self.name


EFC = GameKind("EFC")
DG = GameKind("DG")


@dataclass(frozen=True)
class Rank:
    """Least clock with which Spoiler wins; INFINITY when none does."""

    value: ClockOrdinal

    @classmethod
    def of(cls, r) -> "Rank":
        if isinstance(r, Rank):
            return r
        if isinstance(r, float) and math.isinf(r):
            return cls(INFINITY)
        return cls(as_clock(r))

    @property
    def is_infinite(self) -> bool:
        return self.value.infinite

    @property
    def is_finite(self) -> bool:
        """A natural number (not transfinite, not infinity)."""
        return self.value.is_finite

    @property
    def natural(self) -> int | None:
        return self.value.finite_part if self.value.is_finite else None

    def spoiler_wins(self, clock) -> bool:
        """Clock INFINITY is the clockless game: Spoiler wins it exactly
        when some ordinal clock suffices."""
        clock = as_clock(clock)
        if clock.infinite:
            return not self.is_infinite
        return self.value <= clock

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Obligation:
    """Pending delayed response: elements of one side with delays.

    ``age`` counts Duplicator moves made since the challenge (including the
    move answering it); an element whose label is below ``age`` is already
    mapped. Elements labelled past the end of the game are not recorded.
    """

    side: Side
    labeled: LabeledPartition
    age: int = 1

    def due_within(self, moves: int) -> frozenset:
        return frozenset(e for e, l in self.labeled.labels if l < self.age + moves)


@dataclass(frozen=True)
class GamePosition:
    kind: GameKind
    pi: PartialMap
    clock: ClockOrdinal
    theta: int
    obligations: tuple[Obligation, ...] = ()
    alpha0: int | None = None

    @classmethod
    def initial(cls, kind: GameKind, M: Structure, N: Structure, theta: int, clock=INFINITY, alpha0=None):
        """Start position: the map sending constants to constants.

        Raises InvalidPosition when that map is not a partial isomorphism
        (Spoiler has then already won).
        """
        start = IsoChecker(M, N).initial_map()
        if start is None:
            raise InvalidPosition("the constants do not induce a partial isomorphism")
        if kind.name == "DGVV" and alpha0 is None:
            alpha0 = kind.alpha - 1
        return cls(kind, PartialMap.of(start), as_clock(clock), theta, (), alpha0)

    def validate(self, M: Structure, N: Structure) -> None:
        check_same_vocabulary(M, N)
        if self.theta < 1:
            raise InvalidPosition("theta must be at least 1")
        fwd = self.pi.as_dict()
        if not self.pi.is_injective_function():
            raise InvalidPosition("pi is not injective")
        if not set(fwd) <= set(M.universe) or not set(fwd.values()) <= set(N.universe):
            raise InvalidPosition("pi leaves the universes")
        if not IsoChecker(M, N).consistent(fwd, {b: a for a, b in fwd.items()}):
            raise InvalidPosition("pi is not a partial isomorphism")
        if self.kind.name == "EFC" and self.obligations:
            raise InvalidPosition("EFC positions carry no obligations")
        if self.kind.name == "DGVV":
            if self.alpha0 is None or not 0 <= self.alpha0 < self.kind.alpha:
                raise InvalidPosition("DGVV position needs 0 <= alpha0 < alpha")
        dom, ran = self.pi.domain, self.pi.range
        for ob in self.obligations:
            universe = M.universe if ob.side is Side.M else N.universe
            covered = dom if ob.side is Side.M else ran
            for e, l in ob.labeled.labels:
                if e not in universe:
                    raise InvalidPosition(f"obligation element {e} outside {ob.side.value}")
                if l < ob.age and e not in covered:
                    raise InvalidPosition(f"element {e} came due but is unmapped")


@dataclass(frozen=True)
class SpoilerMove:
    clock: ClockOrdinal
    side: Side
    challenge: frozenset = field(default_factory=frozenset)

    def __str__(self):
        elems = " ".join(map(str, sorted(self.challenge)))
        return f"clock {self.clock}, {self.side.value}-side {{{elems}}}"


def fresh_elements(M: Structure, N: Structure, pi: PartialMap | dict, side: Side) -> tuple[int, ...]:
    fwd = pi.as_dict() if isinstance(pi, PartialMap) else pi
    if side is Side.M:
        return tuple(e for e in M.universe if e not in fwd)
    used = set(fwd.values())
    return tuple(e for e in N.universe if e not in used)


def small_subsets(elems: Iterable[int], theta: int, min_size: int = 1):
    from itertools import combinations

    elems = tuple(elems)
    for k in range(min_size, min(theta, len(elems)) + 1):
        for c in combinations(elems, k):
            yield frozenset(c)
