"""Brute-force reference computations for small instances."""

from __future__ import annotations

import itertools
from collections import defaultdict
from fractions import Fraction
from typing import Dict, FrozenSet, List, Sequence, Tuple

Edge = Tuple[int, int]
Law = Dict[FrozenSet[Edge], Fraction]


def _uniform_subsets(acc: Law, pool: Sequence[Edge], size: int) -> Law:
    subs = list(itertools.combinations(pool, size))
    out: Law = defaultdict(Fraction)
    for s, p in acc.items():
        for c in subs:
            out[s | frozenset(c)] += p / len(subs)
    return out


def star_law(n: int, edges: List[Edge], k: int) -> Law:
    """Exact law of the star model: fair orientation, then min(k, d+) out-edges per vertex."""
    law: Law = defaultdict(Fraction)
    w = Fraction(1, 2 ** len(edges))
    for bits in itertools.product((0, 1), repeat=len(edges)):
        out = {v: [] for v in range(n)}
        for (a, b), o in zip(edges, bits):
            out[a if o else b].append((a, b))
        acc: Law = {frozenset(): w}
        for v in range(n):
            acc = _uniform_subsets(acc, out[v], min(k, len(out[v])))
        for s, p in acc.items():
            law[s] += p
    return dict(law)


def hat_law(n: int, edges: List[Edge], k: int) -> Law:
    """Exact law of the sequential hat model."""
    law: Law = defaultdict(Fraction)
    perms = list(itertools.permutations(range(n)))
    for perm in perms:
        acc: Law = {frozenset(): Fraction(1, len(perms))}
        for v in perm:
            nxt: Law = defaultdict(Fraction)
            for s, p in acc.items():
                free = [e for e in edges if v in e and e not in s]
                part = _uniform_subsets({s: p}, free, min(k, len(free)))
                for t, q in part.items():
                    nxt[t] += q
            acc = nxt
        for s, p in acc.items():
            law[s] += p
    return dict(law)


def kout_law(n: int, edges: List[Edge], k: int) -> Law:
    """Exact law of the plain k-out model (each vertex picks k neighbors)."""
    acc: Law = {frozenset(): Fraction(1)}
    for v in range(n):
        inc = [e for e in edges if v in e]
        acc = _uniform_subsets(acc, inc, k)
    return acc


def tv(a: Dict, b: Dict) -> float:
    keys = set(a) | set(b)
    return float(sum(abs(a.get(x, 0) - b.get(x, 0)) for x in keys) / 2)


def has_r_factor_brute(a: int, b: int, edges: List[Edge], r: int) -> bool:
    """Search all edge subsets of size r*a for an r-regular spanning subgraph."""
    if a != b:
        return False
    if r == 0:
        return True
    for sub in itertools.combinations(edges, r * a):
        dl = [0] * a
        dr = [0] * b
        for i, j in sub:
            dl[i] += 1
            dr[j] += 1
        if all(x == r for x in dl) and all(x == r for x in dr):
            return True
    return False


def max_matching_brute(a: int, b: int, edges: List[Edge]) -> int:
    best = 0
    for size in range(min(a, b), 0, -1):
        for sub in itertools.combinations(edges, size):
            if len({i for i, _ in sub}) == size and len({j for _, j in sub}) == size:
                return size
    return best


def gale_ryser_brute(a: int, b: int, edges: List[Edge], r: int) -> bool:
    es = set(edges)
    for xs in range(1 << a):
        X = [i for i in range(a) if xs >> i & 1]
        for ys in range(1 << b):
            Y = [j for j in range(b) if ys >> j & 1]
            e = sum(1 for i in X for j in Y if (i, j) in es)
            if e < r * (len(X) + len(Y) - a):
                return False
    return True


def hamiltonian_brute(n: int, edges: List[Edge]) -> bool:
    es = {(min(u, v), max(u, v)) for u, v in edges}
    if n < 3:
        return False
    for perm in itertools.permutations(range(1, n)):
        cyc = (0,) + perm
        if all((min(cyc[i], cyc[(i + 1) % n]), max(cyc[i], cyc[(i + 1) % n])) in es for i in range(n)):
            return True
    return False
