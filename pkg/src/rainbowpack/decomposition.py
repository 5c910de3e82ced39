"""Sample an edge-colored random subgraph while splitting it into rainbow parts.

:func:`decompose` draws ``h`` from the colored binomial model with a palette
of ``k * n`` colors and, when the color multisets can be ordered into full
palette blocks, carves ``h`` into edge-disjoint rainbow parts. Each part is
the union over vertices of ``k`` out-edges of a uniformly random
orientation, i.e. a star-model k-out graph.

``h`` has the colored binomial law whether or not the split succeeds; a
failed split leaves every edge in the remainder ``H_0``.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from .bounds import choose_r0, expected_m_r
from .graph import BipartiteGraph, ColoredGraph, Graph, Orientation, min_degree
from .matching import k_matchings_from_left_kout
from .models import partial_shuffle
from .seeding import SeedLike, as_seed


class PlanFailure(Exception):
    """The color multisets could not be ordered into enough palette blocks."""

    def __init__(self, reason: str, diagnostics: Dict):
        super().__init__(reason)
        self.reason = reason
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class ColorMultiset:
    owner: int
    entries: Tuple[int, ...]

    def classes(self) -> Dict[int, List[int]]:
        """``{r: sorted colors of multiplicity exactly r}``."""
        out: Dict[int, List[int]] = {}
        for c, mult in sorted(Counter(self.entries).items()):
            out.setdefault(mult, []).append(c)
        return out


@dataclass(frozen=True)
class OrderingPlan:
    """Per-vertex color orderings whose first ``t`` positions form full-palette blocks."""

    orderings: Tuple[Tuple[int, ...], ...]
    k: int
    t: int
    r0: int
    d: Tuple[int, ...]
    s_r: Tuple[int, ...]
    mu: Tuple[float, ...]
    m: Tuple[Tuple[int, ...], ...] = ()

    @property
    def blocks(self) -> int:
        return self.t // self.k

    def block_colors(self, i: int) -> List[int]:
        lo = self.k * i
        return [c for order in self.orderings for c in order[lo : lo + self.k]]


@dataclass
class DecompositionResult:
    h: ColoredGraph
    parts: List[Graph]
    remainder: Graph
    orientation: Orientation
    k: int
    s: int
    t_target: int
    plan: Optional[OrderingPlan] = None
    failure_reason: Optional[str] = None
    diagnostics: Dict = field(default_factory=dict)
    # per-vertex edge sequence x -> sigma_x(i), i < D_H(x)
    targets: Tuple[Tuple[int, ...], ...] = ()

    @property
    def t_achieved(self) -> int:
        return len(self.parts)

    @property
    def success(self) -> bool:
        return self.failure_reason is None


def build_multiplicity_graphs(
    multisets: List[ColorMultiset], r0: int, palette: int
) -> List[BipartiteGraph]:
    """``B_r`` for ``r = 1..r0``: edge ``(x, c - 1)`` iff color ``c`` occurs exactly ``r`` times in ``C_x``."""
    n = len(multisets)
    edges: List[List[Tuple[int, int]]] = [[] for _ in range(r0 + 1)]
    for x, ms in enumerate(multisets):
        for r, colors in ms.classes().items():
            if r <= r0:
                edges[r].extend((x, c - 1) for c in colors)
    return [BipartiteGraph(n, palette, edges[r]) for r in range(1, r0 + 1)]


@lru_cache(maxsize=256)
def _plan_params(k: int, n: int, s: int, eps: float):
    e4 = eps / 4
    r0 = choose_r0(e4, k, s / n)
    mu = tuple(expected_m_r(k, n, s, r) for r in range(1, r0 + 1))
    d = tuple(math.floor((1 - e4) * m) for m in mu)
    s_r = tuple(math.floor((1 - e4) * dr / k) for dr in d)
    return r0, mu, d, s_r


def plan_ordering(multisets: List[ColorMultiset], k: int, eps: float, seed: SeedLike) -> OrderingPlan:
    """Order each multiset so that the first ``t`` positions split into palette blocks.

    Raises :class:`PlanFailure` when some vertex has fewer than ``d_r``
    colors of multiplicity ``r`` or when too few perfect k-matchings exist.
    """
    n = len(multisets)
    if n == 0:
        raise ValueError("need at least one multiset")
    sizes = {len(ms.entries) for ms in multisets}
    if len(sizes) != 1:
        raise ValueError(f"multisets must have equal size, got sizes {sorted(sizes)}")
    s = sizes.pop()
    kn = k * n
    e4 = eps / 4
    r0, mu, d, s_r = _plan_params(k, n, s, eps)
    diag = {"r0": r0, "mu": list(mu), "d": list(d), "s_r": list(s_r)}

    classes = [ms.classes() for ms in multisets]
    needed = [(r, d[r - 1]) for r in range(1, r0 + 1) if d[r - 1] > 0]
    for x, cl in enumerate(classes):
        for r, dr in needed:
            if len(cl.get(r, ())) < dr:
                raise PlanFailure(
                    f"vertex {x} has m_{r}={len(cl.get(r, ()))} < d_{r}={dr}",
                    dict(diag, vertex=x, r=r),
                )

    active = [r for r in range(1, r0 + 1) if s_r[r - 1] > 0]
    stars_by_r: Dict[int, list] = {}
    if active:
        rng = as_seed(seed).rng("subsample")
    for r in active:
        want = s_r[r - 1]
        dr = d[r - 1]
        edges = []
        for x, cl in enumerate(classes):
            edges.extend((x, c - 1) for c in partial_shuffle(rng, list(cl[r]), dr))
        b_sub = BipartiteGraph(n, kn, edges)
        kms = k_matchings_from_left_kout(b_sub, k, dr, e4, target=want)
        if len(kms) < want:
            raise PlanFailure(
                f"found {len(kms)} of {want} perfect {k}-matchings for multiplicity {r}",
                dict(diag, r=r, achieved=len(kms)),
            )
        stars_by_r[r] = kms

    orderings = []
    for x, ms in enumerate(multisets):
        prefix: List[int] = []
        for r in active:
            a_r = [c + 1 for km in stars_by_r[r] for c in km.stars[x]]
            for _ in range(r):
                prefix.extend(a_r)
        if prefix:
            rest = Counter(ms.entries)
            rest.subtract(prefix)
            if min(rest.values()) < 0:
                raise AssertionError(f"ordering of vertex {x} uses colors outside its multiset")
            orderings.append(tuple(prefix) + tuple(sorted(rest.elements())))
        else:
            orderings.append(tuple(sorted(ms.entries)))

    t = k * sum(r * s_r[r - 1] for r in range(1, r0 + 1))
    m = tuple(tuple(len(cl.get(r, ())) for r in range(1, r0 + 1)) for cl in classes)
    plan = OrderingPlan(tuple(orderings), k, t, r0, d, s_r, mu, m)
    for i in range(plan.blocks):
        cols = plan.block_colors(i)
        if len(set(cols)) != kn:
            raise AssertionError(f"block {i} is not a full palette")
    return plan


def _binomial(rng: random.Random, trials: int, p: float) -> int:
    if p >= 1.0:
        return trials
    r = rng.random
    return sum(1 for _ in range(trials) if r() < p)


def decompose(g: Graph, p: float, k: int, eps: float, seed: SeedLike) -> DecompositionResult:
    """Sample ``h`` from the colored binomial model on ``g`` (palette ``k * n``) and split it.

    Steps: random orientation; out-degree ``D(x) ~ Bin(d+(x), p)``; a color
    multiset of size ``s = floor((1 - eps/4) * delta * p / 2)`` per vertex;
    a random injection ``sigma_x`` of ``D(x)`` positions into the
    out-neighborhood; position ``i < s`` carries the ``i``-th color of the
    (planned) ordering and later positions get fresh random colors. Block
    ``i`` of the plan becomes part ``i``.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    delta = min_degree(g)
    if delta < 1:
        raise ValueError("host graph needs minimum degree at least 1")
    n = g.n
    kn = k * n
    sd = as_seed(seed)
    rng = sd.rng("sample")
    rand = rng.random

    arcs = [(u, v) if rand() < 0.5 else (v, u) for u, v in g.edge_list()]
    orient = Orientation._trusted(g, arcs)
    s = math.floor((1 - eps / 4) * delta * p / 2)
    t_target = math.floor((1 - eps) * delta * p / (2 * k))

    targets = []
    draws = []
    for x in range(n):
        out = list(orient.out[x])
        dx = _binomial(rng, len(out), p)
        draws.append([1 + int(rand() * kn) for _ in range(s)])
        targets.append(tuple(partial_shuffle(rng, out, dx)))
    extra = [[1 + int(rand() * kn) for _ in range(max(0, len(tx) - s))] for tx in targets]
    return assemble(g, k, eps, orient, targets, draws, extra, t_target, sd.child("plan"))


def assemble(
    g: Graph,
    k: int,
    eps: float,
    orient: Orientation,
    targets: List[Tuple[int, ...]],
    draws: List[List[int]],
    extra: List[List[int]],
    t_target: int,
    plan_seed: SeedLike,
    failure: Optional[str] = None,
) -> DecompositionResult:
    """Color ``h`` and cut it into parts, given the sampled randomness.

    ``targets[x]`` lists the out-neighbors of ``x`` that carry an edge of
    ``h``, in position order; ``draws[x]`` is the color multiset of ``x``
    (its size is ``s``) and ``extra[x]`` colors positions ``s`` onward. No
    plan is attempted when ``failure`` is already set.
    """
    n = g.n
    kn = k * n
    s = len(draws[0]) if draws else 0
    if any(len(d) != s for d in draws):
        raise ValueError("all color multisets must have the same size")
    for x, tx in enumerate(targets):
        if len(extra[x]) != max(0, len(tx) - s):
            raise ValueError(f"vertex {x}: expected {max(0, len(tx) - s)} extra colors")
    if failure is None:
        short = [x for x, tx in enumerate(targets) if len(tx) < s]
        if short:
            failure = f"vertex {short[0]}: s={s} exceeds sampled out-degree {len(targets[short[0]])}"

    diagnostics: Dict = {"s": s, "t_target": t_target}
    if s > 0:
        r0, mu, d, s_r = _plan_params(k, n, s, eps)
        diagnostics.update(r0=r0, mu=list(mu), d=list(d), s_r=list(s_r))
    plan = None
    if failure is None and s > 0:
        multisets = [ColorMultiset(x, tuple(dr)) for x, dr in enumerate(draws)]
        try:
            plan = plan_ordering(multisets, k, eps, plan_seed)
        except PlanFailure as exc:
            failure = exc.reason
            diagnostics.update(exc.diagnostics)
        else:
            diagnostics["t_positions"] = plan.t
            diagnostics["m_r"] = [list(row) for row in plan.m]

    colors: Dict[Tuple[int, int], int] = {}
    for x in range(n):
        seq = plan.orderings[x] if plan is not None else draws[x]
        tx = targets[x]
        for i, y in enumerate(tx):
            c = seq[i] if i < s else extra[x][i - s]
            colors[(x, y) if x < y else (y, x)] = c
    h_graph = Graph._trusted(n, sorted(colors))
    h = ColoredGraph._trusted(h_graph, colors, kn)

    parts: List[Graph] = []
    if plan is not None:
        for i in range(plan.blocks):
            lo = k * i
            part_edges = [
                (x, y) if x < y else (y, x) for x in range(n) for y in targets[x][lo : lo + k]
            ]
            parts.append(Graph._trusted(n, sorted(part_edges)))
    used = set()
    for part in parts:
        used.update(part.edge_list())
    remainder = Graph._trusted(n, [e for e in h_graph.edge_list() if e not in used])
    diagnostics["t_achieved"] = len(parts)
    diagnostics["failure_reason"] = failure
    return DecompositionResult(
        h=h,
        parts=parts,
        remainder=remainder,
        orientation=orient,
        k=k,
        s=s,
        t_target=t_target,
        plan=plan,
        failure_reason=failure,
        diagnostics=diagnostics,
        targets=tuple(targets),
    )


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


def verify_decomposition(res: DecompositionResult) -> List[Check]:
    """Re-check disjointness, cover, rainbow parts, palette blocks and the out-degree signature."""
    checks: List[Check] = []
    h_edges = res.h.base.edges

    owner: Dict[Tuple[int, int], int] = {}
    clash = None
    for idx, part in enumerate(res.parts):
        for e in part.edge_list():
            if e in owner and clash is None:
                clash = (e, owner[e], idx)
            owner.setdefault(e, idx)
    for e in res.remainder.edge_list():
        if e in owner and clash is None:
            clash = (e, owner[e], "H0")
    checks.append(
        Check("edge-disjoint", clash is None, "" if clash is None else f"edge {clash[0]} in parts {clash[1]} and {clash[2]}")
    )

    union = set(owner) | set(res.remainder.edge_list())
    stray = union - h_edges
    lost = h_edges - union
    cover_ok = not stray and not lost
    detail = ""
    if stray:
        detail = f"edge {min(stray)} not in h"
    elif lost:
        detail = f"edge {min(lost)} of h missing from parts"
    checks.append(Check("cover", cover_ok, detail))

    total = sum(p.num_edges() for p in res.parts) + res.remainder.num_edges()
    checks.append(
        Check("conservation", total == len(h_edges), f"{total} != {len(h_edges)}" if total != len(h_edges) else "")
    )

    bad = None
    for idx, part in enumerate(res.parts):
        seen: Dict[int, Tuple[int, int]] = {}
        for e in part.edge_list():
            c = res.h.color.get(e)
            if c is None:
                continue
            if c in seen:
                bad = (idx, c, seen[c], e)
                break
            seen[c] = e
        if bad:
            break
    checks.append(
        Check("rainbow", bad is None, "" if bad is None else f"part {bad[0]}: color {bad[1]} on {bad[2]} and {bad[3]}")
    )

    blocks_ok = True
    detail = ""
    if res.plan is not None:
        kn = res.h.palette_size
        for i in range(res.plan.blocks):
            cols = res.plan.block_colors(i)
            if len(set(cols)) != kn or len(cols) != kn:
                blocks_ok = False
                detail = f"block {i} has {len(set(cols))} distinct colors"
                break
    checks.append(Check("palette-blocks", blocks_ok, detail))

    sig_ok = True
    detail = ""
    orient = res.orientation
    for idx, part in enumerate(res.parts):
        for x in range(part.n):
            outs = [y for y in part.adj[x] if y in orient.out[x]]
            want = min(res.k, orient.out_degree(x))
            if len(outs) != want:
                sig_ok = False
                detail = f"part {idx}: vertex {x} has {len(outs)} out-edges, expected {want}"
                break
        if not sig_ok:
            break
    checks.append(Check("out-degree-signature", sig_ok, detail))
    return checks
