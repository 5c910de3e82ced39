"""Property checkers returning verdicts with validated certificates.

Hamiltonicity is searched in stages: cheap necessary conditions, then a
randomized rotation-extension heuristic, then (for small graphs) an exact
dynamic program over vertex subsets. When the heuristic fails on a graph
too large for the exact stage the verdict is ``holds=None`` (unknown).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, List, Optional, Sequence, Tuple

from .graph import BipartiteGraph, ColoredGraph, Graph
from .matching import max_k_matching, max_matching, validate_k_matching, validate_matching
from .seeding import SeedLike, as_seed

EXACT_HAM_MAX_N = 16


@dataclass(frozen=True)
class PropertyVerdict:
    """``holds`` is ``True``, ``False`` or ``None`` (search gave up without a certificate)."""

    name: str
    holds: Optional[bool]
    witness: Any = None
    method: str = "exact"
    budget_spent: int = 0
    detail: str = ""

    def __bool__(self) -> bool:
        return self.holds is True


def has_perfect_matching(b: BipartiteGraph) -> PropertyVerdict:
    if b.a != b.b:
        raise ValueError(f"perfect matching needs equal parts, got {b.a} and {b.b}")
    m = max_matching(b)
    validate_matching(b, m)
    if len(m) == b.a:
        return PropertyVerdict("perfect-matching", True, m)
    return PropertyVerdict("perfect-matching", False, m, detail=f"maximum matching has size {len(m)} < {b.a}")


def has_k_matching(b: BipartiteGraph, k: int) -> PropertyVerdict:
    km = max_k_matching(b, k)
    if km is None:
        return PropertyVerdict("k-matching", False, detail=f"no perfect {k}-matching")
    validate_k_matching(b, km, k)
    return PropertyVerdict("k-matching", True, km)


def is_connected(g: Graph) -> PropertyVerdict:
    if g.n == 0:
        return PropertyVerdict("connected", True)
    seen = [False] * g.n
    seen[0] = True
    stack = [0]
    while stack:
        u = stack.pop()
        for v in g.adj[u]:
            if not seen[v]:
                seen[v] = True
                stack.append(v)
    if all(seen):
        return PropertyVerdict("connected", True)
    return PropertyVerdict("connected", False, seen.index(False), detail=f"vertex {seen.index(False)} unreachable from 0")


def is_rainbow(cg: ColoredGraph, edges: Optional[Iterable[Sequence[int]]] = None) -> PropertyVerdict:
    """Whether the given edges (all of ``cg`` by default) carry pairwise distinct colors.

    A failing verdict's witness is ``(color, edge, edge)``.
    """
    if edges is None:
        edges = cg.base.edge_list()
    seen = {}
    for e in edges:
        u, v = int(e[0]), int(e[1])
        key = (u, v) if u < v else (v, u)
        if key not in cg.color:
            raise ValueError(f"edge {key} is not in the colored graph")
        c = cg.color[key]
        if c in seen:
            return PropertyVerdict("rainbow", False, (c, seen[c], key), detail=f"color {c} repeated")
        seen[c] = key
    return PropertyVerdict("rainbow", True)


def are_edge_disjoint(parts: Sequence[Graph]) -> PropertyVerdict:
    """Witness on failure: ``(edge, first part index, second part index)``."""
    owner = {}
    for idx, part in enumerate(parts):
        for e in part.edge_list():
            if e in owner:
                return PropertyVerdict("edge-disjoint", False, (e, owner[e], idx))
            owner[e] = idx
    return PropertyVerdict("edge-disjoint", True)


# -- Hamiltonicity -------------------------------------------------------------


def validate_cycle(g: Graph, cycle: Sequence[int]) -> None:
    if len(cycle) != g.n or set(cycle) != set(range(g.n)):
        raise AssertionError("cycle must visit every vertex exactly once")
    for i, u in enumerate(cycle):
        v = cycle[(i + 1) % len(cycle)]
        if v not in g.adj[u]:
            raise AssertionError(f"cycle step {u}-{v} is not an edge")


def _rotation_extension(g: Graph, budget: int, rng) -> Tuple[Optional[List[int]], int]:
    """Randomized rotation-extension search; returns (cycle or None, steps used)."""
    n = g.n
    adj = [set(a) for a in g.adj]
    steps = 0
    while steps < budget:
        start = rng.randrange(n)
        path = [start]
        pos = {start: 0}
        stale = 0
        while steps < budget and stale < 4 * n:
            steps += 1
            end = path[-1]
            outside = [v for v in g.adj[end] if v not in pos]
            if outside:
                v = outside[rng.randrange(len(outside))]
                pos[v] = len(path)
                path.append(v)
                stale = 0
                continue
            if path[0] in adj[end] and len(path) >= 3:
                if len(path) == n:
                    return path, steps
                # close into a cycle and reopen next to a vertex off the cycle
                broke = False
                for i, u in enumerate(path):
                    fresh = [v for v in g.adj[u] if v not in pos]
                    if fresh:
                        path = path[i + 1 :] + path[: i + 1]
                        v = fresh[rng.randrange(len(fresh))]
                        path.append(v)
                        pos = {x: j for j, x in enumerate(path)}
                        broke = True
                        break
                if broke:
                    stale = 0
                    continue
            # rotate: pick a path neighbor u of the endpoint and reverse the tail after u
            cands = [u for u in g.adj[end] if pos[u] < len(path) - 2]
            if not cands:
                if len(path) > 1:
                    path.reverse()
                    pos = {x: j for j, x in enumerate(path)}
                stale += 1
                continue
            u = cands[rng.randrange(len(cands))]
            i = pos[u]
            tail = path[i + 1 :]
            tail.reverse()
            path[i + 1 :] = tail
            for j in range(i + 1, len(path)):
                pos[path[j]] = j
            stale += 1
    return None, steps


def _exact_hamiltonian(g: Graph) -> Optional[List[int]]:
    """Subset DP: ``ends[mask]`` = bitset of endpoints of paths from 0 covering ``mask``."""
    n = g.n
    nb = [0] * n
    for u in range(n):
        for v in g.adj[u]:
            nb[u] |= 1 << v
    full = (1 << n) - 1
    ends = [0] * (1 << n)
    ends[1] = 1
    for mask in range(1, full + 1, 2):
        e = ends[mask]
        while e:
            low = e & -e
            v = low.bit_length() - 1
            e ^= low
            nxt = nb[v] & ~mask
            while nxt:
                lw = nxt & -nxt
                nxt ^= lw
                ends[mask | lw] |= lw
    closing = ends[full] & nb[0]
    if not closing:
        return None
    # walk back from an endpoint adjacent to 0
    v = (closing & -closing).bit_length() - 1
    mask = full
    path = [v]
    while mask != 1:
        prev_mask = mask & ~(1 << v)
        cands = ends[prev_mask] & nb[v]
        u = (cands & -cands).bit_length() - 1
        path.append(u)
        mask, v = prev_mask, u
    path.reverse()
    return path


def is_hamiltonian(g: Graph, budget: Optional[int] = None, seed: SeedLike = 0, exact: bool = True) -> PropertyVerdict:
    """Staged Hamiltonicity search.

    ``budget`` caps rotation-extension steps (default ``50 * n**2``). Only
    the necessary-condition stage and the exact stage (``n <= 16``) ever
    return ``holds=False``; otherwise an unsuccessful search is ``None``.
    """
    n = g.n
    if n < 3:
        raise ValueError("Hamiltonicity needs at least 3 vertices")
    if budget is None:
        budget = 50 * n * n
    low = [v for v in range(n) if len(g.adj[v]) < 2]
    if low:
        return PropertyVerdict("hamiltonian", False, method="exact", detail=f"vertex {low[0]} has degree {len(g.adj[low[0]])}")
    conn = is_connected(g)
    if not conn.holds:
        return PropertyVerdict("hamiltonian", False, method="exact", detail=conn.detail)

    cycle, spent = _rotation_extension(g, budget, as_seed(seed).rng("posa"))
    if cycle is not None:
        validate_cycle(g, cycle)
        return PropertyVerdict("hamiltonian", True, tuple(cycle), method="heuristic", budget_spent=spent)
    if exact and n <= EXACT_HAM_MAX_N:
        cycle = _exact_hamiltonian(g)
        if cycle is None:
            return PropertyVerdict("hamiltonian", False, method="exact", budget_spent=spent)
        validate_cycle(g, cycle)
        return PropertyVerdict("hamiltonian", True, tuple(cycle), method="exact", budget_spent=spent)
    return PropertyVerdict("hamiltonian", None, method="heuristic", budget_spent=spent, detail="search budget exhausted")
