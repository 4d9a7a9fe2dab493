"""Independent bounded solvers playing the games by their literal rules.

Unlike the rank solvers, these carry explicit clock ordinals and make none of
the simplifications: Spoiler may challenge any set of at most ``theta``
elements (mapped ones and the empty set included), may pick an empty piece,
and Duplicator may extend the partial isomorphism by any pairs she likes.
Transfinite clocks are handled by bounding the finite part Spoiler may
choose at a limit, which is the only approximation; see ``reset_bound``.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from ..core import ClockOrdinal, IsoChecker, Structure, enumerate_set_partitions
from ..errors import TooLarge
from .base import Side

ORACLE_BOUND = 4


def all_partial_isos(M: Structure, N: Structure) -> list[frozenset]:
    """Every partial isomorphism from M to N, as frozensets of pairs."""
    iso = IsoChecker(M, N)
    out = []
    fwd: dict = {}
    bwd: dict = {}
    elems = M.universe

    def go(i: int):
        if i == len(elems):
            if iso.consistent(fwd, bwd):
                out.append(frozenset(fwd.items()))
            return
        a = elems[i]
        go(i + 1)
        for b in N.universe:
            if b in bwd:
                continue
            fwd[a], bwd[b] = b, a
            go(i + 1)
            del fwd[a], bwd[b]

    go(0)
    return out


def clocks_below(c: ClockOrdinal, reset_bound: int):
    """Ordinals below ``c`` that Spoiler may name, finite parts at limits
    capped by ``reset_bound``."""
    if c.infinite:
        raise ValueError("the bounded oracle needs a clock below omega squared")
    out = []
    for j in range(c.omega_coeff + 1):
        top = c.finite_part if j == c.omega_coeff else reset_bound + 1
        out.extend(ClockOrdinal(j, n) for n in range(top))
    return out


def _subsets(universe, theta):
    for k in range(min(theta, len(universe)) + 1):
        for c in itertools.combinations(universe, k):
            yield c


def _check_size(M, N, bound):
    if max(M.size, N.size) > bound:
        raise TooLarge(f"oracle limited to universes of at most {bound} elements")


class _Literal:
    def __init__(self, M, N, theta):
        self.M, self.N, self.theta = M, N, theta
        self.iso = IsoChecker(M, N)
        self.isos = all_partial_isos(M, N)
        self._ext: dict = {}

    def start(self):
        start = self.iso.initial_map()
        return None if start is None else frozenset(start.items())

    def supersets(self, pi: frozenset) -> list[frozenset]:
        hit = self._ext.get(pi)
        if hit is None:
            hit = self._ext[pi] = [g for g in self.isos if pi <= g]
        return hit

    @staticmethod
    def covers(g: frozenset, side: Side, elems) -> bool:
        have = {a for a, _ in g} if side is Side.M else {b for _, b in g}
        return all(e in have for e in elems)


class EFCLiteral(_Literal):
    def __init__(self, M, N, theta, reset_bound=None):
        super().__init__(M, N, theta)
        self.reset_bound = M.size + N.size + 1 if reset_bound is None else reset_bound
        self._inner: dict = {}
        self._wins: dict = {}

    def spoiler_wins(self, clock: ClockOrdinal) -> bool:
        start = self.start()
        if start is None:
            return True
        return self.wins(start, clock)

    def wins(self, pi, clock) -> bool:
        key = (pi, clock)
        hit = self._wins.get(key)
        if hit is None:
            hit = any(self.inner(pi, c) for c in clocks_below(clock, self.reset_bound))
            self._wins[key] = hit
        return hit

    def inner(self, pi, clock) -> bool:
        """Spoiler, having just named ``clock``, wins with some challenge."""
        key = (pi, clock)
        hit = self._inner.get(key)
        if hit is not None:
            return hit
        out = False
        for side, universe in ((Side.M, self.M.universe), (Side.N, self.N.universe)):
            for challenge in _subsets(universe, self.theta):
                if self._challenge_wins(pi, clock, side, challenge):
                    out = True
                    break
            if out:
                break
        self._inner[key] = out
        return out

    def _challenge_wins(self, pi, clock, side, challenge) -> bool:
        for part in enumerate_set_partitions(challenge):
            pieces = list(part.blocks) + [frozenset()]
            if not any(self._piece_wins(pi, clock, side, p) for p in pieces):
                return False
        return True

    def _piece_wins(self, pi, clock, side, piece) -> bool:
        return all(self.wins(g, clock) for g in self.supersets(pi) if self.covers(g, side, piece))


class DGLiteral(_Literal):
    """DG with labels as naturals. At a finite clock, labels beyond the
    remaining moves are merged into one never-due label; at a transfinite
    clock Duplicator's labels are capped at ``label_cap``."""

    def __init__(self, M, N, theta, label_cap=None, reset_slack=None):
        super().__init__(M, N, theta)
        g = -(-M.size // theta) + -(-N.size // theta) + 1
        self.label_cap = g if label_cap is None else label_cap
        self.reset_slack = g if reset_slack is None else reset_slack
        self._wins: dict = {}

    def spoiler_wins(self, clock: ClockOrdinal) -> bool:
        start = self.start()
        if start is None:
            return True
        return self.wins(start, frozenset(), clock)

    def wins(self, pi, pending, clock) -> bool:
        key = (pi, pending, clock)
        hit = self._wins.get(key)
        if hit is not None:
            return hit
        bound = max((l for _, _, l in pending), default=0) + self.reset_slack
        out = False
        for c in clocks_below(clock, bound):
            for side, universe in ((Side.M, self.M.universe), (Side.N, self.N.universe)):
                for challenge in _subsets(universe, self.theta):
                    if self._move_wins(pi, pending, c, side, challenge):
                        out = True
                        break
                if out:
                    break
            if out:
                break
        self._wins[key] = out
        return out

    def _move_wins(self, pi, pending, clock, side, challenge) -> bool:
        never = clock.finite_part + 1 if clock.is_finite else None
        top = never if never is not None else self.label_cap
        aged = [(s, e, l - 1) for s, e, l in pending]
        for labels in itertools.product(range(top + 1), repeat=len(challenge)):
            new = [(side, e, l) for e, l in zip(challenge, labels) if l != never]
            items = aged + new
            due = [(s, e) for s, e, l in items if l == 0]
            for g in self.supersets(pi):
                if not all(self.covers(g, s, (e,)) for s, e in due):
                    continue
                rest = frozenset(
                    (s, e, l) for s, e, l in items if l > 0 and not self.covers(g, s, (e,))
                )
                if clock == ClockOrdinal() or not self.wins(g, rest, clock):
                    return False
        return True


class DGVVLiteral(_Literal):
    def __init__(self, M, N, theta, alpha, config=None, reset_bound=None):
        from .delayed import DEFAULT_DGVV

        super().__init__(M, N, theta)
        self.alpha = alpha
        self.config = config or DEFAULT_DGVV
        size = M.size + N.size
        span = alpha if self.config.literal_labels else alpha + 1
        self.reset_bound = (size + 1) * span + 1 if reset_bound is None else reset_bound
        self._wins: dict = {}

    def spoiler_wins(self, clock: ClockOrdinal) -> bool:
        start = self.start()
        if start is None:
            return True
        return all(self.wins(a0, start, frozenset(), clock) for a0 in range(self.alpha))

    def wins(self, a0, pi, pending, clock) -> bool:
        key = (a0, pi, pending, clock)
        hit = self._wins.get(key)
        if hit is not None:
            return hit
        out = False
        for c in clocks_below(clock, self.reset_bound):
            for side, universe in ((Side.M, self.M.universe), (Side.N, self.N.universe)):
                for challenge in _subsets(universe, self.theta):
                    if self._move_wins(a0, pi, pending, c, side, challenge):
                        out = True
                        break
                if out:
                    break
            if out:
                break
        self._wins[key] = out
        return out

    def _updates(self, pending):
        """Every legal choice of new countdowns for the pending elements."""
        options = []
        for s, e, h in pending:
            if h == 0:
                vals = [0]
            else:
                vals = range(h + (0 if self.config.strict_decrease else 1))
            options.append([(s, e, v) for v in vals])
        return itertools.product(*options)

    def _move_wins(self, a0, pi, pending, clock, side, challenge) -> bool:
        due_label = self.config.new_due_label
        for labels in itertools.product(self.config.labels(a0), repeat=len(challenge)):
            for updated in self._updates(sorted(pending, key=lambda t: (t[0].value, t[1], t[2]))):
                due = [(s, e) for s, e, h in updated if h == 0]
                due += [(side, e) for e, l in zip(challenge, labels) if l == due_label]
                items = list(updated) + [(side, e, l) for e, l in zip(challenge, labels) if l != due_label]
                for g in self.supersets(pi):
                    if not all(self.covers(g, s, (e,)) for s, e in due):
                        continue
                    rest = frozenset(
                        (s, e, h) for s, e, h in items if not self.covers(g, s, (e,)) and (s, e) not in due
                    )
                    if clock == ClockOrdinal() or not self.wins(a0, g, rest, clock):
                        return False
        return True


@lru_cache(maxsize=64)
def _literal(kind_name, alpha, M, N, theta):
    if kind_name == "EFC":
        return EFCLiteral(M, N, theta)
    if kind_name == "DG":
        return DGLiteral(M, N, theta)
    return DGVVLiteral(M, N, theta, alpha)


def literal_spoiler_wins(kind, M, N, theta, clock, bound=ORACLE_BOUND) -> bool:
    _check_size(M, N, bound)
    return _literal(kind.name, kind.alpha, M, N, theta).spoiler_wins(clock)
