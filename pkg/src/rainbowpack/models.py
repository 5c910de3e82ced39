"""Random graph samplers.

Every sampler is a pure function of its parameters and a seed. Phases that
consume randomness draw from separately labelled streams (see
:mod:`rainbowpack.seeding`).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .graph import BipartiteGraph, ColoredGraph, Graph, Orientation, min_degree
from .seeding import SeedLike, as_seed


@dataclass(frozen=True)
class KOutSample:
    """A k-out style sample: ``chosen[x]`` lists the neighbors picked by ``x``."""

    result: Graph
    chosen: Tuple[Tuple[int, ...], ...]
    orientation: Optional[Orientation] = None


@dataclass(frozen=True)
class CouplingOutcome:
    """Output of :func:`sample_coupled`.

    ``h_star`` always has the star-model law. ``h_hat`` is the hat-model
    realisation, available only when every vertex ended with out-degree at
    least ``k`` in ``orientation`` (``agreed``); otherwise it is ``None``.
    """

    h_star: Graph
    h_hat: Optional[Graph]
    agreed: bool
    orientation: Orientation
    picks: Tuple[Tuple[int, ...], ...]


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")


def partial_shuffle(rng: random.Random, items: List, m: int) -> List:
    """First ``m`` entries of a uniform random permutation of ``items`` (in place)."""
    n = len(items)
    for i in range(min(m, n)):
        j = i + int(rng.random() * (n - i))
        items[i], items[j] = items[j], items[i]
    return items[:m]


def sample_gnp(g: Graph, p: float, seed: SeedLike) -> Graph:
    """Keep each edge of ``g`` independently with probability ``p``."""
    _check_p(p)
    if p == 1.0:
        return g
    rng = as_seed(seed).rng("gnp")
    r = rng.random
    return Graph._trusted(g.n, [e for e in g.edge_list() if r() < p])


def sample_colored(g: Graph, p: float, c: int, seed: SeedLike) -> ColoredGraph:
    """``sample_gnp`` followed by i.i.d. uniform colors from ``1..c``."""
    if c < 1:
        raise ValueError("palette size must be at least 1")
    s = as_seed(seed)
    h = sample_gnp(g, p, s)
    rng = s.rng("colors")
    return ColoredGraph(h, {e: 1 + int(rng.random() * c) for e in h.edge_list()}, c)


def sample_kout(g: Graph, k: int, seed: SeedLike) -> KOutSample:
    """Each vertex picks ``k`` distinct neighbors uniformly; orientations dropped."""
    if k < 0 or k > min_degree(g):
        raise ValueError(f"k={k} must lie in [0, min degree={min_degree(g)}]")
    rng = as_seed(seed).rng("kout")
    chosen = []
    edges = set()
    for x in range(g.n):
        pick = partial_shuffle(rng, list(g.adj[x]), k)
        chosen.append(tuple(pick))
        for y in pick:
            edges.add((x, y) if x < y else (y, x))
    return KOutSample(Graph._trusted(g.n, sorted(edges)), tuple(chosen))


def random_orientation(g: Graph, rng: random.Random) -> Orientation:
    r = rng.random
    arcs = [(u, v) if r() < 0.5 else (v, u) for u, v in g.edge_list()]
    return Orientation._trusted(g, arcs)


def sample_kout_star(g: Graph, k: int, seed: SeedLike) -> KOutSample:
    """Orient edges by fair coins; each vertex picks ``min(k, d+)`` out-edges."""
    if k < 1:
        raise ValueError("k must be at least 1")
    s = as_seed(seed)
    orient = random_orientation(g, s.rng("orient"))
    rng = s.rng("pick")
    chosen = []
    edges = []
    for x in range(g.n):
        pick = partial_shuffle(rng, list(orient.out[x]), k)
        chosen.append(tuple(pick))
        edges.extend((x, y) if x < y else (y, x) for y in pick)
    return KOutSample(Graph._trusted(g.n, sorted(edges)), tuple(chosen), orient)


def sample_kout_hat(g: Graph, k: int, seed: SeedLike) -> Graph:
    """Sequential model: vertices in random order claim ``k`` unclaimed incident edges.

    A vertex with fewer than ``k`` unclaimed incident edges claims all of
    them, possibly none.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    rng = as_seed(seed).rng("hat")
    order = list(range(g.n))
    rng.shuffle(order)
    claimed = set()
    for x in order:
        free = [y for y in g.adj[x] if ((x, y) if x < y else (y, x)) not in claimed]
        for y in partial_shuffle(rng, free, k):
            claimed.add((x, y) if x < y else (y, x))
    return Graph._trusted(g.n, sorted(claimed))


def sample_coupled(g: Graph, k: int, seed: SeedLike) -> CouplingOutcome:
    """Joint sampler for the star and hat models.

    Vertices are visited in a random order ``sigma``. Vertex ``x`` scans
    the still-open part of its neighborhood in a random order ``pi_x``; an
    edge already directed out of ``x`` is claimed, an undirected one is
    oriented by its fair coin ``X[x, y]`` and claimed when it points away
    from ``x``. The scan stops after ``k`` claims or when the open
    neighborhood is exhausted. Edges left undirected are finally oriented
    by independent fair coins.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    s = as_seed(seed)
    n = g.n
    # sigma and the pi_x share one stream; the lazy coins and the final
    # completion coins share another
    order_rng = s.rng("order")
    coins = s.rng("coins").random
    sigma = list(range(n))
    order_rng.shuffle(sigma)

    direction: Dict[Tuple[int, int], int] = {}  # normalized edge -> tail
    open_nbrs = [set(a) for a in g.adj]
    picks: List[List[int]] = [[] for _ in range(n)]
    for x in sigma:
        pi = sorted(open_nbrs[x])
        order_rng.shuffle(pi)
        a_x = picks[x]
        for y in pi:
            if len(a_x) >= k:
                break
            e = (x, y) if x < y else (y, x)
            tail = direction.get(e)
            if tail == x:
                a_x.append(y)
            elif tail is None:
                # coins are drawn per examined ordered pair, lazily
                if coins() < 0.5:
                    a_x.append(y)
                    open_nbrs[y].discard(x)
                    direction[e] = x
                else:
                    direction[e] = y

    arcs = []
    for e in g.edge_list():
        tail = direction.get(e)
        if tail is None:
            tail = e[0] if coins() < 0.5 else e[1]
        arcs.append((tail, e[1] if tail == e[0] else e[0]))
    orientation = Orientation._trusted(g, arcs)

    edges = sorted({(x, y) if x < y else (y, x) for x in range(n) for y in picks[x]})
    h_star = Graph._trusted(n, edges)
    agreed = all(len(o) >= k for o in orientation.out)
    return CouplingOutcome(
        h_star=h_star,
        h_hat=h_star if agreed else None,
        agreed=agreed,
        orientation=orientation,
        picks=tuple(tuple(p) for p in picks),
    )


def sample_left_kout(a: int, b: int, k: int, seed: SeedLike) -> BipartiteGraph:
    """Each of the ``a`` left vertices claims ``k`` distinct right vertices."""
    if not 0 <= k <= b:
        raise ValueError(f"k={k} must lie in [0, b={b}]")
    rng = as_seed(seed).rng("left-kout")
    edges = []
    for i in range(a):
        edges.extend((i, j) for j in rng.sample(range(b), k))
    return BipartiteGraph(a, b, edges)


def sample_kout_bipartite(n: int, k: int, seed: SeedLike) -> BipartiteGraph:
    """Two-sided k-out on ``K_{n,n}``: every vertex on both sides picks ``k`` neighbors."""
    s = as_seed(seed)
    left = sample_left_kout(n, n, k, s.child("left"))
    right = sample_left_kout(n, n, k, s.child("right"))
    return BipartiteGraph(n, n, left.edge_list() + [(i, j) for j, i in right.edge_list()])


def sample_bipartite_gnp(a: int, b: int, p: float, seed: SeedLike) -> BipartiteGraph:
    """Each of the ``a * b`` edges present independently with probability ``p``."""
    _check_p(p)
    r = as_seed(seed).rng("bgnp").random
    return BipartiteGraph(a, b, ((i, j) for i in range(a) for j in range(b) if r() < p))
