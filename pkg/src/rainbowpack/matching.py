"""Bipartite matchings, r-factors and perfect k-matchings."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .graph import BipartiteGraph

GALE_RYSER_MAX_N = 22


@dataclass(frozen=True)
class Matching:
    pairs: Tuple[Tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.pairs)

    def is_perfect_in(self, b: BipartiteGraph) -> bool:
        return len(self.pairs) == b.a == b.b


@dataclass(frozen=True)
class KMatching:
    """Vertex-disjoint stars; ``stars[x]`` are the right leaves of left vertex ``x``."""

    stars: Tuple[Tuple[int, ...], ...]

    def edges(self) -> List[Tuple[int, int]]:
        return [(x, y) for x, leaves in enumerate(self.stars) for y in leaves]


def validate_matching(b: BipartiteGraph, m: Matching) -> None:
    lefts = set()
    rights = set()
    for i, j in m.pairs:
        if not b.has_edge(i, j):
            raise AssertionError(f"matching pair ({i}, {j}) is not an edge")
        if i in lefts or j in rights:
            raise AssertionError(f"vertex reused by pair ({i}, {j})")
        lefts.add(i)
        rights.add(j)


def validate_k_matching(b: BipartiteGraph, km: KMatching, k: int) -> None:
    if len(km.stars) != b.a:
        raise AssertionError("k-matching must have one star per left vertex")
    used = set()
    for x, leaves in enumerate(km.stars):
        if len(leaves) != k:
            raise AssertionError(f"star at {x} has {len(leaves)} leaves, expected {k}")
        for y in leaves:
            if not b.has_edge(x, y):
                raise AssertionError(f"star edge ({x}, {y}) is not an edge")
            if y in used:
                raise AssertionError(f"right vertex {y} used by two stars")
            used.add(y)


# -- maximum matching ---------------------------------------------------------


def hopcroft_karp(
    left_adj: Sequence[Sequence[int]], n_right: int, warm: Optional[List[int]] = None
) -> List[int]:
    """Maximum matching; returns ``match[i]`` = right partner of left ``i`` or -1.

    ``warm`` is an optional valid partial matching to start from.
    """
    n_left = len(left_adj)
    match_l = list(warm) if warm is not None else [-1] * n_left
    match_r = [-1] * n_right
    for i, j in enumerate(match_l):
        if j >= 0:
            match_r[j] = i
    INF = n_left + 1

    while True:
        dist = [INF] * n_left
        q = deque()
        for i in range(n_left):
            if match_l[i] < 0:
                dist[i] = 0
                q.append(i)
        found = False
        while q:
            i = q.popleft()
            for j in left_adj[i]:
                i2 = match_r[j]
                if i2 < 0:
                    found = True
                elif dist[i2] == INF:
                    dist[i2] = dist[i] + 1
                    q.append(i2)
        if not found:
            break

        it = [0] * n_left

        def augment(root: int) -> bool:
            # iterative DFS along layered graph
            stack = [root]
            path_r: List[int] = []
            while stack:
                i = stack[-1]
                adj = left_adj[i]
                advanced = False
                while it[i] < len(adj):
                    j = adj[it[i]]
                    it[i] += 1
                    i2 = match_r[j]
                    if i2 < 0:
                        path_r.append(j)
                        for li, rj in zip(stack, path_r):
                            match_l[li] = rj
                            match_r[rj] = li
                        return True
                    if dist[i2] == dist[i] + 1:
                        path_r.append(j)
                        stack.append(i2)
                        advanced = True
                        break
                if not advanced:
                    dist[i] = INF
                    stack.pop()
                    if path_r:
                        path_r.pop()
            return False

        progress = False
        for i in range(n_left):
            if match_l[i] < 0 and augment(i):
                progress = True
        if not progress:
            break
    return match_l


def max_matching(b: BipartiteGraph) -> Matching:
    """Maximum-cardinality matching (Hopcroft-Karp), deterministic for a given input."""
    match_l = hopcroft_karp(b.left_adj, b.b)
    m = Matching(tuple((i, j) for i, j in enumerate(match_l) if j >= 0))
    validate_matching(b, m)
    return m


# -- Gale-Ryser -------------------------------------------------------------


def gale_ryser_check(
    b: BipartiteGraph, r: int
) -> Tuple[bool, Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]]:
    """Exact r-factor test by the Gale-Ryser subset condition.

    Returns ``(True, None)`` when ``e(X, Y) >= r(|X| + |Y| - n)`` for every
    ``X`` and ``Y``, else ``(False, (X, Y))`` with ``|X| + |Y|`` minimal.
    For a fixed ``X`` the worst ``Y`` is found greedily (right vertices with
    the fewest neighbors in ``X`` first), so the cost is ``2^n * n log n``.
    """
    if b.a != b.b:
        raise ValueError("Gale-Ryser check needs equal part sizes")
    n = b.a
    if n > GALE_RYSER_MAX_N:
        raise ValueError(f"n={n} exceeds exact-enumeration limit {GALE_RYSER_MAX_N}; use find_r_factor")
    if r < 0:
        raise ValueError("r must be non-negative")
    if n == 0:
        return True, None
    nbr_mask = np.array([sum(1 << i for i in b.right_adj[j]) for j in range(n)], dtype=np.uint32)
    best = None  # (size, X mask, Y tuple)
    chunk = 1 << 16
    total = 1 << n
    for lo in range(0, total, chunk):
        xs = np.arange(lo, min(total, lo + chunk), dtype=np.uint32)
        deg = np.bitwise_count(xs[:, None] & nbr_mask[None, :]).astype(np.int64)
        xsize = np.bitwise_count(xs).astype(np.int64)
        deficit = r - deg
        order = np.argsort(-deficit, axis=1, kind="stable")
        cum = np.cumsum(np.take_along_axis(deficit, order, axis=1), axis=1)
        bound = (r * (n - xsize))[:, None]
        viol = cum > bound
        rows = np.flatnonzero(viol.any(axis=1))
        if rows.size == 0:
            continue
        ysize = viol[rows].argmax(axis=1) + 1
        sizes = xsize[rows] + ysize
        pick = int(np.argmin(sizes))
        row = rows[pick]
        cand = (int(sizes[pick]), int(xs[row]), tuple(sorted(int(j) for j in order[row, : ysize[pick]])))
        if best is None or cand[0] < best[0]:
            best = cand
    if best is None:
        return True, None
    _, xmask, ys = best
    xs_tuple = tuple(i for i in range(n) if xmask >> i & 1)
    return False, (xs_tuple, ys)


def gale_ryser_slack_identity(n: int, x: int, y: int) -> int:
    """``x*y - n*(x + y - n)``, which equals ``(n - x)(n - y)``."""
    return x * y - n * (x + y - n)


# -- flow-based degree-constrained subgraphs ----------------------------------


def _degree_constrained(b: BipartiteGraph, left_cap: int, right_cap: int) -> Tuple[int, List[Tuple[int, int]]]:
    """Max flow with per-left capacity ``left_cap`` and per-right ``right_cap``."""
    a, bb = b.a, b.b
    edges = b.edge_list()
    src, sink = 0, a + bb + 1
    rows = [src] * a + [1 + i for i, _ in edges] + [1 + a + j for j in range(bb)]
    cols = [1 + i for i in range(a)] + [1 + a + j for _, j in edges] + [sink] * bb
    caps = [left_cap] * a + [1] * len(edges) + [right_cap] * bb
    size = a + bb + 2
    graph = csr_matrix(
        (np.array(caps, dtype=np.int32), (np.array(rows, dtype=np.int32), np.array(cols, dtype=np.int32))),
        shape=(size, size),
    )
    res = maximum_flow(graph, src, sink)
    if not edges:
        return int(res.flow_value), []
    flow = res.flow.tocsr()
    ei = np.fromiter((1 + i for i, _ in edges), dtype=np.int64, count=len(edges))
    ej = np.fromiter((1 + a + j for _, j in edges), dtype=np.int64, count=len(edges))
    vals = np.asarray(flow[ei, ej]).ravel()
    used = [e for e, v in zip(edges, vals) if v > 0]
    return int(res.flow_value), used


def find_r_factor(b: BipartiteGraph, r: int) -> Optional[BipartiteGraph]:
    """Spanning r-regular subgraph via max flow, or ``None`` if none exists."""
    if b.a != b.b:
        raise ValueError("r-factor search needs equal part sizes")
    if r < 0:
        raise ValueError("r must be non-negative")
    n = b.a
    if r == 0 or n == 0:
        return BipartiteGraph(n, n)
    if r > n or any(len(x) < r for x in b.left_adj) or any(len(x) < r for x in b.right_adj):
        return None
    value, used = _degree_constrained(b, r, r)
    if value != n * r:
        return None
    f = BipartiteGraph(n, n, used)
    assert all(len(x) == r for x in f.left_adj) and all(len(x) == r for x in f.right_adj)
    return f


def _regularity(b: BipartiteGraph) -> int:
    if b.a != b.b:
        raise ValueError("regular decomposition needs equal part sizes")
    degs = {len(x) for x in b.left_adj} | {len(x) for x in b.right_adj}
    if len(degs) > 1:
        raise ValueError(f"graph is not regular (degrees {sorted(degs)})")
    return degs.pop() if degs else 0


def _greedy(left_adj: Sequence[Sequence[int]], n_right: int) -> List[int]:
    taken = [False] * n_right
    match = [-1] * len(left_adj)
    for i, adj in enumerate(left_adj):
        for j in adj:
            if not taken[j]:
                taken[j] = True
                match[i] = j
                break
    return match


def decompose_regular(b: BipartiteGraph) -> List[Matching]:
    """Split an r-regular bipartite graph into r edge-disjoint perfect matchings."""
    r = _regularity(b)
    n = b.a
    adj = [list(x) for x in b.left_adj]
    out = []
    for _ in range(r):
        match = hopcroft_karp(adj, n, warm=_greedy(adj, n))
        if any(j < 0 for j in match):
            raise AssertionError("regular bipartite graph without a perfect matching")
        m = Matching(tuple(enumerate(match)))
        for i, j in m.pairs:
            adj[i].remove(j)
        out.append(m)
    _check_decomposition(b, out)
    return out


def _check_decomposition(b: BipartiteGraph, ms: List[Matching]) -> None:
    seen = set()
    for m in ms:
        validate_matching(b, m)
        if not m.is_perfect_in(b):
            raise AssertionError("matching is not perfect")
        for e in m.pairs:
            if e in seen:
                raise AssertionError(f"edge {e} used by two matchings")
            seen.add(e)


def many_matchings(b: BipartiteGraph, target: int) -> List[Matching]:
    """Edge-disjoint perfect matchings: as many as possible, at most ``target``.

    Binary-searches the largest ``r <= target`` for which an r-factor exists
    and decomposes it. The caller detects a shortfall by ``len(result) < target``.
    """
    if b.a != b.b:
        raise ValueError("needs equal part sizes")
    hi = min(target, b.a, min((len(x) for x in b.left_adj), default=0), min((len(x) for x in b.right_adj), default=0))
    lo = 0
    factor = None
    if hi > 0:
        factor = find_r_factor(b, hi)
        if factor is not None:
            lo = hi
        else:
            hi -= 1
            while lo < hi:
                mid = (lo + hi + 1) // 2
                f = find_r_factor(b, mid)
                if f is not None:
                    lo, factor = mid, f
                else:
                    hi = mid - 1
    if lo == 0:
        return []
    if factor is None or _regularity(factor) != lo:
        factor = find_r_factor(b, lo)
    ms = decompose_regular(factor)
    _check_decomposition(b, ms)
    return ms


def k_matchings_from_left_kout(
    b: BipartiteGraph, k: int, s: int, eps: float, target: Optional[int] = None
) -> List[KMatching]:
    """Edge-disjoint perfect k-matchings in a left-regular-ish bipartite graph.

    The right side (size ``k * a``) is cut into ``k`` consecutive blocks of
    ``a`` vertices; each block-induced subgraph contributes perfect
    matchings, and the j-th matchings of all blocks are united into the
    j-th k-matching. Aims for ``ceil((1 - eps) * s / k)`` unless ``target``
    is given; returns fewer when some block falls short.
    """
    n = b.a
    if k < 1 or b.b != k * n:
        raise ValueError(f"right side must have k * left = {k * n} vertices, has {b.b}")
    low = [x for x in range(n) if len(b.left_adj[x]) < s]
    if low:
        raise ValueError(f"left vertex {low[0]} has degree {len(b.left_adj[low[0]])} < s={s}")
    if target is None:
        target = math.ceil((1 - eps) * s / k)
    if target <= 0 or n == 0:
        return []
    per_block = []
    for blk in range(k):
        lo = blk * n
        sub = BipartiteGraph(n, n, ((x, y - lo) for x, y in b.edge_list() if lo <= y < lo + n))
        ms = many_matchings(sub, target)
        per_block.append(ms)
        if len(ms) < target:
            target = len(ms)
            if target == 0:
                return []
    out = []
    for idx in range(target):
        stars = [[] for _ in range(n)]
        for blk, ms in enumerate(per_block):
            for x, y in ms[idx].pairs:
                stars[x].append(blk * n + y)
        km = KMatching(tuple(tuple(sorted(st)) for st in stars))
        validate_k_matching(b, km, k)
        out.append(km)
    seen = set()
    for km in out:
        for e in km.edges():
            if e in seen:
                raise AssertionError(f"edge {e} shared by two k-matchings")
            seen.add(e)
    return out


def max_k_matching(b: BipartiteGraph, k: int) -> Optional[KMatching]:
    """A perfect k-matching (every left vertex gets ``k`` private right leaves) or ``None``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if b.b < k * b.a:
        raise ValueError(f"right side has {b.b} < k * left = {k * b.a} vertices")
    if k == 0:
        return KMatching(tuple(() for _ in range(b.a)))
    if any(len(x) < k for x in b.left_adj):
        return None
    value, used = _degree_constrained(b, k, 1)
    if value != k * b.a:
        return None
    stars = [[] for _ in range(b.a)]
    for i, j in used:
        stars[i].append(j)
    km = KMatching(tuple(tuple(st) for st in stars))
    validate_k_matching(b, km, k)
    return km
