"""Game engines: EFC, Shelah's delayed game DG and its DGVV variant."""

from __future__ import annotations

import itertools
import math

from ..core import (
    INFINITY,
    ClockOrdinal,
    IsoChecker,
    LabeledPartition,
    PartialMap,
    SetPartition,
    Structure,
    as_clock,
    check_same_vocabulary,
    enumerate_set_partitions,
)
from ..errors import InvalidPosition
from .base import (
    DG,
    DUPLICATOR,
    EFC,
    SPOILER,
    GameKind,
    GamePosition,
    Obligation,
    Player,
    Rank,
    Side,
    SpoilerMove,
    fresh_elements,
    small_subsets,
)
from .delayed import DEFAULT_DGVV, DGVVConfig, dg_forcing_sets, dg_rank, dgvv_rank, dgvv_solver, minimal_covers
from .efc import EFCSolver, efc_solver
from .oracle import ORACLE_BOUND, literal_spoiler_wins

__all__ = [
    "DG", "DUPLICATOR", "EFC", "SPOILER", "GameKind", "GamePosition", "Obligation", "Player",
    "Rank", "Side", "SpoilerMove", "DGVVConfig", "EFCSolver", "efc_solver", "legal_moves",
    "efc_partitions", "efc_extensions", "delayed_replies", "spoiler_rank", "winner",
    "spoiler_witness", "cross_check_bounded", "clock_bound",
]


def _check_theta(theta: int) -> None:
    if theta < 1:
        raise ValueError("theta must be at least 1")


def _rank_value(r) -> ClockOrdinal:
    if isinstance(r, ClockOrdinal):
        return r
    return INFINITY if r == math.inf else ClockOrdinal.finite(int(r))


def spoiler_rank(kind: GameKind, M: Structure, N: Structure, theta: int) -> Rank:
    """Least clock with which Spoiler wins from the start position.

    Natural or infinite for EFC and DGVV; for DG it is 0, ``omega + m`` or
    infinite (with a finite clock Duplicator can always delay past the end).
    """
    _check_theta(theta)
    check_same_vocabulary(M, N)
    if kind.name == "EFC":
        return Rank(_rank_value(efc_solver(M, N, theta).initial_rank()))
    if kind.name == "DG":
        return Rank(dg_rank(M, N, theta))
    return Rank(_rank_value(dgvv_rank(M, N, theta, kind.alpha)))


def winner(kind: GameKind, M: Structure, N: Structure, theta: int, clock) -> Player:
    """SPOILER iff the rank is at most ``clock``; clock INFINITY is the
    clockless game, which Duplicator wins iff she survives forever."""
    return SPOILER if spoiler_rank(kind, M, N, theta).spoiler_wins(clock) else DUPLICATOR


def cross_check_bounded(kind: GameKind, M: Structure, N: Structure, theta: int, clock, bound: int = ORACLE_BOUND) -> Player:
    """Winner by direct search of the literal game with explicit clocks."""
    _check_theta(theta)
    check_same_vocabulary(M, N)
    clock = as_clock(clock)
    if clock.infinite:
        raise ValueError("the bounded oracle needs a clock below omega squared")
    return SPOILER if literal_spoiler_wins(kind, M, N, theta, clock, bound) else DUPLICATOR


# -- moves ------------------------------------------------------------------


def clock_bound(pos: GamePosition, M: Structure, N: Structure) -> int:
    """Finite part large enough for any canonical Spoiler clock choice."""
    base = M.size + N.size + 1
    if pos.kind.name == "DG":
        pending = max((l for ob in pos.obligations for _, l in ob.labeled.labels), default=0)
        return base + pending
    if pos.kind.name == "DGVV":
        return (base + 1) * (pos.kind.alpha + 1)
    return base


def canonical_clocks(clock: ClockOrdinal, bound: int) -> list[ClockOrdinal]:
    """Finite values up to ``bound`` plus ``omega*k + bound`` for each ``k``
    below the omega coefficient, and the predecessor when there is one."""
    if clock == ClockOrdinal():
        return []
    if clock.infinite:
        raise InvalidPosition("positions carry ordinal clocks below omega squared")
    out = set()
    if clock.is_finite:
        out.update(ClockOrdinal.finite(n) for n in range(min(clock.finite_part, bound + 1)))
    else:
        out.update(ClockOrdinal.finite(n) for n in range(bound + 1))
        out.update(ClockOrdinal(k, bound) for k in range(1, clock.omega_coeff))
        if clock.finite_part:
            out.add(ClockOrdinal(clock.omega_coeff, clock.finite_part - 1))
    return sorted(out)


def _pending(pos: GamePosition):
    for ob in pos.obligations:
        for e, l in ob.labeled.labels:
            yield ob.side, e, l, ob.age


def legal_moves(pos: GamePosition, M: Structure, N: Structure) -> list[SpoilerMove]:
    """Spoiler's canonical moves: a clock choice and a challenge of unmapped
    elements. Delayed games also allow the empty challenge (a pass)."""
    pos.validate(M, N)
    clocks = canonical_clocks(pos.clock, clock_bound(pos, M, N))
    challenges = []
    if pos.kind.delayed:
        challenges.append((Side.M, frozenset()))
    busy = {(s, e) for s, e, _, _ in _pending(pos)}
    for side in (Side.M, Side.N):
        free = [e for e in fresh_elements(M, N, pos.pi, side) if (side, e) not in busy]
        challenges.extend((side, c) for c in small_subsets(free, pos.theta))
    return [SpoilerMove(c, side, ch) for c in clocks for side, ch in challenges]


def efc_partitions(move: SpoilerMove) -> list[SetPartition]:
    """Duplicator's replies in EFC: the partition her labelling induces."""
    return list(enumerate_set_partitions(sorted(move.challenge)))


def efc_extensions(pos: GamePosition, move: SpoilerMove, block, M: Structure, N: Structure) -> list[GamePosition]:
    """Positions after Duplicator maps the block Spoiler picked (empty if she cannot)."""
    solver = efc_solver(M, N, pos.theta)
    fwd = pos.pi.as_dict()
    bwd = {b: a for a, b in fwd.items()}
    out = []
    for pairs in solver.extensions(fwd, bwd, move.side, frozenset(block)):
        nxt = dict(fwd)
        nxt.update(pairs)
        out.append(GamePosition(pos.kind, PartialMap.of(nxt), move.clock, pos.theta))
    return out


def delayed_replies(pos: GamePosition, move: SpoilerMove, M: Structure, N: Structure, label_cap: int | None = None):
    """Duplicator's replies in DG/DGVV as (labels, next position) pairs.

    Only minimal extensions are listed (she maps exactly what is due). In DG
    labels past the remaining number of moves are dropped as never due; at a
    transfinite clock labels run up to ``label_cap``.
    """
    if not pos.kind.delayed:
        raise InvalidPosition("delayed_replies applies to DG and DGVV")
    fwd = pos.pi.as_dict()
    iso = IsoChecker(M, N)
    elems = sorted(move.challenge)
    if pos.kind.name == "DG":
        if move.clock.is_finite:
            labels_range = range(move.clock.finite_part + 2)
            never = move.clock.finite_part + 1
        else:
            cap = clock_bound(pos, M, N) if label_cap is None else label_cap
            labels_range, never = range(cap + 1), None
        aged = [Obligation(ob.side, ob.labeled, ob.age + 1) for ob in pos.obligations]
        # an element labelled l falls due at the move that brings its age past l
        due = [(ob.side, e) for ob in pos.obligations for e, l in ob.labeled.labels if l == ob.age]
    else:
        cfg = DEFAULT_DGVV
        labels_range, never = cfg.labels(pos.alpha0), None
        aged, due = [], []
        for ob in pos.obligations:
            kept = []
            for e, l in ob.labeled.labels:
                l2 = max(l - 1, 0)
                if l2 == 0:
                    due.append((ob.side, e))
                else:
                    kept.append((e, l2))
            if kept:
                aged.append(Obligation(ob.side, LabeledPartition(tuple(kept)), 0))
    out = []
    for labels in itertools.product(labels_range, repeat=len(elems)):
        if pos.kind.name == "DG":
            now = [(move.side, e) for e, l in zip(elems, labels) if l == 0]
            kept = tuple((e, l) for e, l in zip(elems, labels) if l != never and l != 0)
            new_obs = aged + ([Obligation(move.side, LabeledPartition(kept), 1)] if kept else [])
        else:
            now = [(move.side, e) for e, l in zip(elems, labels) if l == cfg.new_due_label]
            kept = tuple((e, l) for e, l in zip(elems, labels) if l != cfg.new_due_label)
            new_obs = aged + ([Obligation(move.side, LabeledPartition(kept), 0)] if kept else [])
        need = due + now
        need_m = {e for s, e in need if s is Side.M}
        need_n = {e for s, e in need if s is Side.N}
        for ext in minimal_covers(iso, fwd, need_m, need_n):
            lab = LabeledPartition(tuple(zip(elems, labels)))
            nxt = GamePosition(pos.kind, PartialMap.of(ext), move.clock, pos.theta, tuple(new_obs), pos.alpha0)
            out.append((lab, nxt))
    return out


def spoiler_witness(kind: GameKind, M: Structure, N: Structure, theta: int, pos: GamePosition | None = None):
    """A Spoiler move achieving the rank of ``pos`` (default: the start),
    or None when the rank is infinite or ``pi`` is already broken."""
    _check_theta(theta)
    check_same_vocabulary(M, N)
    if pos is None:
        start = IsoChecker(M, N).initial_map()
        if start is None:
            return None
        fwd, obligations, alpha0 = start, (), None
    else:
        fwd = pos.pi.as_dict()
        if not pos.pi.is_injective_function() or not IsoChecker(M, N).consistent(fwd, {b: a for a, b in fwd.items()}):
            return None
        pos.validate(M, N)
        obligations, alpha0 = pos.obligations, pos.alpha0
    if kind.name == "EFC":
        solver = efc_solver(M, N, theta)
        found = solver.best_challenge(fwd)
        if found is None:
            return None
        side, challenge = found
        return SpoilerMove(ClockOrdinal.finite(solver.rank(fwd) - 1), side, challenge)
    if kind.name == "DG":
        if obligations:
            raise InvalidPosition("DG witnesses are computed for positions without pending obligations")
        sets = dg_forcing_sets(M, N, theta, fwd)
        if sets is None:
            return None
        side, challenge = sets[0]
        return SpoilerMove(ClockOrdinal(1, len(sets) - 1), side, challenge)
    if alpha0 is None:
        # Duplicator picks alpha0 first; answer for her best choice
        alpha0 = max(range(kind.alpha), key=lambda a: dgvv_solver(M, N, theta, a).rank(fwd))
    pending = frozenset((ob.side, e, l) for ob in obligations for e, l in ob.labeled.labels)
    solver = dgvv_solver(M, N, theta, alpha0)
    found = solver.best_option(fwd, pending)
    if found is None:
        return None
    side, challenge = found
    return SpoilerMove(ClockOrdinal.finite(int(solver.rank(fwd, pending)) - 1), side, challenge)
