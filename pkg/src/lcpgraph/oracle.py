"""Brute-force ground truth for independence invariants.

Vertex sets are integer bitmasks over 0-based vertices. Maximal independent
sets are enumerated as maximal cliques of the complement graph with a
Tomita-style pivot; a naive 2^n filter is kept as an independent check.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from .graph import Graph

MAX_ORACLE_N = 25
MAX_NAIVE_N = 20


class OracleSizeError(ValueError):
    pass


def mask_of(s: int | Iterable[int]) -> int:
    if isinstance(s, int):
        return s
    m = 0
    for v in s:
        m |= 1 << int(v)
    return m


def members(mask: int) -> list[int]:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def indicator(mask: int, n: int) -> tuple[int, ...]:
    return tuple((mask >> i) & 1 for i in range(n))


def _full(g: Graph) -> int:
    return (1 << g.n) - 1


def is_independent(g: Graph, s) -> bool:
    m = mask_of(s)
    return all(not (g.rows[v] & m) for v in members(m))


def is_dominating(g: Graph, s) -> bool:
    m = mask_of(s)
    covered = m
    for v in members(m):
        covered |= g.rows[v]
    return covered == _full(g)


def is_maximal_independent(g: Graph, s) -> bool:
    # an independent set is maximal exactly when it dominates
    return is_independent(g, s) and is_dominating(g, s)


@dataclass(frozen=True)
class IndependentSetFamily:
    n: int
    sets: tuple[int, ...]
    maximal: tuple[bool, ...]
    maximum: tuple[bool, ...]

    def __len__(self):
        return len(self.sets)

    def sizes(self) -> list[int]:
        return [_popcount(s) for s in self.sets]

    def as_vertex_sets(self) -> list[frozenset[int]]:
        return [frozenset(members(s)) for s in self.sets]

    def indicators(self) -> set[tuple[int, ...]]:
        return {indicator(s, self.n) for s in self.sets}


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _check_size(g: Graph, limit: int = MAX_ORACLE_N):
    if g.n > limit:
        raise OracleSizeError(f"n={g.n} exceeds the oracle limit {limit}")


def _mis_pivot(g: Graph) -> list[int]:
    full = _full(g)
    comp = [full & ~g.rows[v] & ~(1 << v) for v in range(g.n)]
    out = []

    def expand(r, p, x):
        if not p and not x:
            out.append(r)
            return
        px = p | x
        pivot = max(members(px), key=lambda u: _popcount(p & comp[u]))
        cand = p & ~comp[pivot]
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            expand(r | low, p & comp[v], x & comp[v])
            p &= ~low
            x |= low
            cand &= ~low

    expand(0, full, 0)
    return out


def _mis_naive(g: Graph) -> list[int]:
    _check_size(g, MAX_NAIVE_N)
    return [s for s in range(1 << g.n) if is_maximal_independent(g, s)]


def enumerate_maximal_independent_sets(g: Graph, naive: bool = False) -> IndependentSetFamily:
    """All maximal independent sets, sorted by bitmask."""
    _check_size(g)
    sets = sorted(_mis_naive(g) if naive else _mis_pivot(g))
    sizes = [_popcount(s) for s in sets]
    top = max(sizes)
    return IndependentSetFamily(
        n=g.n,
        sets=tuple(sets),
        maximal=tuple(True for _ in sets),
        maximum=tuple(k == top for k in sizes),
    )


def enumerate_independent_sets(g: Graph) -> list[int]:
    """Every independent set, the empty set included (2^n scan)."""
    _check_size(g, MAX_NAIVE_N)
    return [s for s in range(1 << g.n) if is_independent(g, s)]


def alpha_brute(g: Graph) -> int:
    return max(_popcount(s) for s in enumerate_maximal_independent_sets(g).sets)


def beta_brute(g: Graph) -> int:
    return min(_popcount(s) for s in enumerate_maximal_independent_sets(g).sets)


def alpha_weighted_brute(g: Graph, w=None) -> float:
    """Maximum weight of an independent set; weights must be non-negative."""
    w = g.weights if w is None else w
    w = [float(v) for v in w]
    if len(w) != g.n:
        raise ValueError(f"expected {g.n} weights")
    if any(v < 0 for v in w):
        raise ValueError("weights must be non-negative")
    return max(
        sum(w[i] for i in members(s))
        for s in enumerate_maximal_independent_sets(g).sets
    )


def maximum_independent_set(g: Graph) -> int:
    fam = enumerate_maximal_independent_sets(g)
    return next(s for s, top in zip(fam.sets, fam.maximum) if top)


def is_well_covered(g: Graph) -> bool:
    return len(set(enumerate_maximal_independent_sets(g).sizes())) == 1


def is_very_well_covered(g: Graph) -> bool:
    sizes = set(enumerate_maximal_independent_sets(g).sizes())
    return len(sizes) == 1 and 2 * sizes.pop() == g.n
