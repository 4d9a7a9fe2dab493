"""Solvers for the two delayed games.

DG (labels are arbitrary naturals). With a finite clock Duplicator labels
every element past the end of the game, so nothing ever comes due and she
survives. Spoiler profits only from moves made while the clock is still
transfinite: after ``m`` such moves he drops to a finite clock larger than
every label handed out, and Duplicator must eventually map all ``m``
challenge sets. Delaying is never worse for her, so she can wait until she
has seen all of them. Hence the rank from a start map ``pi`` is

* 0 if ``pi`` is not a partial isomorphism,
* ``omega + m`` where ``m`` is the least number of one-sided sets of size at
  most ``theta`` whose union no partial isomorphism extending ``pi`` covers,
* infinity if there is no such ``m`` (exactly when ``pi`` extends to an
  isomorphism).

DGVV (delays bounded by ``alpha0 < alpha``, counted down each round). The
delays are bounded once ``alpha0`` is fixed, so the rank is finite or
infinite; it is computed by a least fixpoint over (partial isomorphism,
pending countdowns), with the empty challenge available as a pass.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

from ..core import INFINITY, ZERO, ClockOrdinal, IsoChecker, Structure
from .base import Side, fresh_elements

INF = math.inf


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _chunks(elems, size):
    elems = sorted(elems)
    return [frozenset(elems[i : i + size]) for i in range(0, len(elems), size)]


def minimal_covers(iso: IsoChecker, fwd: dict, need_m, need_n):
    """Every extension of ``fwd`` that maps exactly the uncovered elements of
    ``need_m`` (domain side) and ``need_n`` (range side)."""
    M, N = iso.M, iso.N
    bwd = {b: a for a, b in fwd.items()}
    todo = [(Side.M, e) for e in sorted(need_m) if e not in fwd]
    todo += [(Side.N, e) for e in sorted(need_n) if e not in bwd]
    fwd = dict(fwd)

    def covered(side, e):
        return e in fwd if side is Side.M else e in bwd

    def go(i):
        while i < len(todo) and covered(*todo[i]):
            i += 1
        if i == len(todo):
            yield dict(fwd)
            return
        side, e = todo[i]
        pool = N.universe if side is Side.M else M.universe
        for t in pool:
            a, b = (e, t) if side is Side.M else (t, e)
            if a in fwd or b in bwd:
                continue
            fwd[a], bwd[b] = b, a
            if iso.extension_ok(fwd, bwd, ((a, b),)):
                yield from go(i + 1)
            del fwd[a], bwd[b]

    yield from go(0)


def cover_extension(iso: IsoChecker, fwd: dict, need_m, need_n) -> dict | None:
    """A partial isomorphism extending ``fwd`` whose domain contains
    ``need_m`` and whose range contains ``need_n``, or None."""
    return next(minimal_covers(iso, fwd, need_m, need_n), None)


def dg_forcing_sets(M: Structure, N: Structure, theta: int, start: dict | None = None):
    """Fewest one-sided sets of size at most ``theta`` whose union cannot be
    covered by a partial isomorphism extending ``start``.

    Returns a list of (side, set) pairs, or None when ``start`` extends to
    an isomorphism. ``start`` defaults to the constants map, which must be a
    partial isomorphism.
    """
    iso = IsoChecker(M, N)
    if start is None:
        start = iso.initial_map()
        if start is None:
            raise ValueError("constants map is not a partial isomorphism")
    free_m = fresh_elements(M, N, start, Side.M)
    free_n = fresh_elements(M, N, start, Side.N)
    top = _ceil_div(len(free_m), theta) + _ceil_div(len(free_n), theta)
    # coverability is monotone, so for each split of the budget only the
    # largest affordable sets need testing
    for cost in range(1, top + 1):
        for i in range(cost + 1):
            a = min(theta * i, len(free_m))
            b = min(theta * (cost - i), len(free_n))
            if _ceil_div(a, theta) + _ceil_div(b, theta) < cost:
                continue
            for um in itertools.combinations(free_m, a):
                for un in itertools.combinations(free_n, b):
                    if cover_extension(iso, start, um, un) is None:
                        return [(Side.M, s) for s in _chunks(um, theta)] + [
                            (Side.N, s) for s in _chunks(un, theta)
                        ]
    return None


def dg_rank(M: Structure, N: Structure, theta: int, start: dict | None = None) -> ClockOrdinal:
    iso = IsoChecker(M, N)
    if start is None:
        start = iso.initial_map()
        if start is None:
            return ZERO
    elif not iso.consistent(start, {b: a for a, b in start.items()}):
        return ZERO
    sets = dg_forcing_sets(M, N, theta, start)
    return INFINITY if sets is None else ClockOrdinal(1, len(sets))


# -- DGVV -------------------------------------------------------------------


@dataclass(frozen=True)
class DGVVConfig:
    """Reading of the under-specified DGVV protocol.

    ``new_due_label``: a fresh element is due immediately when its label
    equals this value (0 by default; 1 is the literal reading of the move
    list). ``strict_decrease``: pending countdowns must drop every round
    (default) or may stay put. ``literal_labels``: labels range over
    ``alpha0`` itself, so ``alpha0 = 0`` leaves no legal labelling; by
    default they range over ``0..alpha0``, which is the literal game with
    ``alpha`` shifted by one and makes alpha = 1 the plain immediate game.
    """

    new_due_label: int = 0
    strict_decrease: bool = True
    literal_labels: bool = False

    def labels(self, alpha0: int) -> range:
        return range(alpha0 if self.literal_labels else alpha0 + 1)


DEFAULT_DGVV = DGVVConfig()


class DGVVSolver:
    """Least-fixpoint ranks for DGVV with a fixed ``alpha0``.

    A state is (partial isomorphism, pending) where pending holds
    (side, element, countdown) triples. Duplicator decreases every countdown
    by exactly one, which dominates faster decreases, and maps only what is
    due, which dominates mapping more.
    """

    def __init__(self, M: Structure, N: Structure, theta: int, alpha0: int, config: DGVVConfig = DEFAULT_DGVV):
        self.M, self.N, self.theta, self.alpha0 = M, N, theta, alpha0
        self.config = config
        self.iso = IsoChecker(M, N)
        self._succ: dict = {}
        self._rank: dict | None = None

    def spoiler_options(self, state):
        fwd_key, pending = state
        fwd = dict(fwd_key)
        yield (Side.M, frozenset())
        for side in (Side.M, Side.N):
            busy = {e for s, e, _ in pending if s is side}
            free = [e for e in fresh_elements(self.M, self.N, fwd, side) if e not in busy]
            for k in range(1, min(self.theta, len(free)) + 1):
                for c in itertools.combinations(free, k):
                    yield (side, frozenset(c))

    def responses(self, state, side: Side, challenge: frozenset):
        """Successor states over all Duplicator replies (may be empty)."""
        fwd_key, pending = state
        fwd = dict(fwd_key)
        cfg = self.config
        carried = []
        due_m, due_n = set(), set()
        for s, e, c in pending:
            c2 = c - 1 if (cfg.strict_decrease and c > 0) else c
            if c2 == 0 and (cfg.strict_decrease or c == 0):
                (due_m if s is Side.M else due_n).add(e)
            else:
                carried.append((s, e, c2))
        elems = sorted(challenge)
        out = set()
        for labels in itertools.product(cfg.labels(self.alpha0), repeat=len(elems)):
            dm, dn = set(due_m), set(due_n)
            new = list(carried)
            for e, l in zip(elems, labels):
                if l == cfg.new_due_label:
                    (dm if side is Side.M else dn).add(e)
                else:
                    new.append((side, e, l))
            for ext in minimal_covers(self.iso, fwd, dm, dn):
                dom, ran = set(ext), set(ext.values())
                rest = frozenset(
                    (s, e, c) for s, e, c in new if e not in (dom if s is Side.M else ran)
                )
                out.add((frozenset(ext.items()), rest))
        return out

    def _explore(self, root):
        stack = [root]
        while stack:
            s = stack.pop()
            if s in self._succ:
                continue
            opts = []
            for side, c in self.spoiler_options(s):
                nxt = self.responses(s, side, c)
                opts.append(((side, c), nxt))
                stack.extend(n for n in nxt if n not in self._succ)
            self._succ[s] = opts

    def ranks(self, root) -> dict:
        self._explore(root)
        rank = {s: INF for s in self._succ}
        k = 0
        while True:
            k += 1
            won = [
                s
                for s, opts in self._succ.items()
                if rank[s] == INF and any(all(rank[n] < k for n in nxt) for _, nxt in opts)
            ]
            if not won:
                return rank
            for s in won:
                rank[s] = k

    def rank(self, fwd: dict, pending=frozenset()) -> float:
        root = (frozenset(fwd.items()), frozenset(pending))
        if root not in self._succ:
            self._rank = self.ranks(root)
        elif self._rank is None or root not in self._rank:
            self._rank = self.ranks(root)
        return self._rank[root]

    def best_option(self, fwd: dict, pending=frozenset()):
        """A Spoiler challenge realising the rank, or None if it is infinite."""
        r = self.rank(fwd, pending)
        if r == INF:
            return None
        root = (frozenset(fwd.items()), frozenset(pending))
        for move, nxt in self._succ[root]:
            if all(self._rank[n] < r for n in nxt):
                return move
        raise AssertionError("rank not realised")


@lru_cache(maxsize=128)
def dgvv_solver(M, N, theta, alpha0, config=DEFAULT_DGVV) -> DGVVSolver:
    return DGVVSolver(M, N, theta, alpha0, config)


def dgvv_rank(M: Structure, N: Structure, theta: int, alpha: int, config: DGVVConfig = DEFAULT_DGVV) -> float:
    """Duplicator picks ``alpha0 < alpha`` first; the rank is the best she
    can secure."""
    start = IsoChecker(M, N).initial_map()
    if start is None:
        return 0
    return max(dgvv_solver(M, N, theta, a0, config).rank(start) for a0 in range(alpha))
