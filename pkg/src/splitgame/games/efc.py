"""Exact Spoiler ranks for the EFC game by backward induction.

Positions are partial isomorphisms. Spoiler challenges a set of at most
``theta`` unmapped elements on one side, Duplicator partitions it, Spoiler
picks a block and Duplicator maps that block into the other side:

    rank(pi) = 1 + min_challenge max_partition min_block max_image rank(pi + image)

with rank 0 when Duplicator cannot map the chosen block. Since every move
grows ``pi`` the recursion is well founded; positions where Spoiler has no
challenge (``pi`` total) have infinite rank.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterator

from ..core import IsoChecker, Structure
from .base import Side, fresh_elements, small_subsets

INF = math.inf


def _key(fwd: dict) -> frozenset:
    return frozenset(fwd.items())


class EFCSolver:
    def __init__(self, M: Structure, N: Structure, theta: int):
        if theta < 1:
            raise ValueError("theta must be at least 1")
        self.M, self.N, self.theta = M, N, theta
        self.iso = IsoChecker(M, N)
        self._rank: dict = {}
        self._block: dict = {}

    # -- public queries ---------------------------------------------------

    def initial(self) -> dict | None:
        return self.iso.initial_map()

    def initial_rank(self) -> float:
        start = self.initial()
        return 0 if start is None else self.rank(start)

    def rank(self, fwd: dict) -> float:
        key = _key(fwd)
        hit = self._rank.get(key)
        if hit is not None:
            return hit
        best = INF
        bwd = {b: a for a, b in fwd.items()}
        for side in (Side.M, Side.N):
            for c in small_subsets(fresh_elements(self.M, self.N, fwd, side), self.theta):
                v = self.challenge_value(fwd, bwd, side, c)
                if v < best:
                    best = v
                    if best == 0:
                        break
            if best == 0:
                break
        out = INF if best == INF else int(best) + 1
        self._rank[key] = out
        return out

    def best_challenge(self, fwd: dict) -> tuple[Side, frozenset] | None:
        """A challenge achieving ``rank(fwd)``; None when the rank is infinite."""
        target = self.rank(fwd)
        if target == INF:
            return None
        bwd = {b: a for a, b in fwd.items()}
        for side in (Side.M, Side.N):
            for c in small_subsets(fresh_elements(self.M, self.N, fwd, side), self.theta):
                if 1 + self.challenge_value(fwd, bwd, side, c) == target:
                    return side, c
        raise AssertionError("rank not realised by any challenge")

    def challenge_value(self, fwd: dict, bwd: dict, side: Side, challenge) -> float:
        """Value of Duplicator's best partition of ``challenge``.

        Computed by a subset recursion: the block holding the first element
        is chosen, the rest is partitioned recursively, and a partition is
        worth the least value among its blocks.
        """
        elems = tuple(sorted(challenge))
        values: dict[int, float] = {}

        def block_val(mask: int) -> float:
            v = values.get(mask)
            if v is None:
                block = frozenset(e for i, e in enumerate(elems) if mask >> i & 1)
                v = values[mask] = self.block_value(fwd, bwd, side, block)
            return v

        memo: dict[int, float] = {0: INF}

        def best(mask: int) -> float:
            hit = memo.get(mask)
            if hit is not None:
                return hit
            low = mask & -mask
            rest = mask ^ low
            sub = rest
            out = -1.0
            while True:
                blk = sub | low
                v = block_val(blk)
                if v > out:
                    v = min(v, best(mask ^ blk))
                    out = max(out, v)
                    if out == INF:
                        break
                if sub == 0:
                    break
                sub = (sub - 1) & rest
            memo[mask] = out
            return out

        return best((1 << len(elems)) - 1)

    def block_value(self, fwd: dict, bwd: dict, side: Side, block: frozenset) -> float:
        """Best rank Duplicator can reach by mapping ``block``; 0 if she cannot."""
        key = (_key(fwd), side, block)
        hit = self._block.get(key)
        if hit is not None:
            return hit
        out = 0
        for pairs in self.extensions(fwd, bwd, side, block):
            nxt = dict(fwd)
            nxt.update(pairs)
            out = max(out, self.rank(nxt))
            if out == INF:
                break
        self._block[key] = out
        return out

    def extensions(self, fwd: dict, bwd: dict, side: Side, block) -> Iterator[tuple]:
        """Every way to map ``block`` (fresh, on ``side``) into fresh elements
        of the other side keeping a partial isomorphism; yields (a, b) pairs."""
        elems = sorted(block)
        fwd, bwd = dict(fwd), dict(bwd)
        if side is Side.M:
            targets = [b for b in self.N.universe if b not in bwd]
        else:
            targets = [a for a in self.M.universe if a not in fwd]
        chosen: list[tuple[int, int]] = []

        def go(i: int):
            if i == len(elems):
                yield tuple(chosen)
                return
            e = elems[i]
            for t in targets:
                a, b = (e, t) if side is Side.M else (t, e)
                if a in fwd or b in bwd:
                    continue
                fwd[a], bwd[b] = b, a
                if self.iso.extension_ok(fwd, bwd, ((a, b),)):
                    chosen.append((a, b))
                    yield from go(i + 1)
                    chosen.pop()
                del fwd[a], bwd[b]

        yield from go(0)


@lru_cache(maxsize=256)
def efc_solver(M: Structure, N: Structure, theta: int) -> EFCSolver:
    return EFCSolver(M, N, theta)
