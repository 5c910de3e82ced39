import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rainbowpack.decomposition import (
    ColorMultiset,
    PlanFailure,
    _plan_params,
    assemble,
    build_multiplicity_graphs,
    decompose,
    plan_ordering,
    verify_decomposition,
)
from rainbowpack.graph import Graph, circulant_graph, complete_graph
from rainbowpack.models import random_orientation
from rainbowpack.seeding import Seed
from rainbowpack.verify import are_edge_disjoint, is_rainbow


def layered_multisets(n, k, s, eps):
    """Multisets meeting every ``m_r >= d_r`` with exactly ``d_r`` colors per class.

    Colors of vertex ``x`` come in layers: layer ``l`` of block ``j`` is color
    ``j*n + (x + l) % n + 1``, so every full layer is a perfect matching into
    each block. Left-over positions go to one filler color of multiplicity
    above ``r0``.
    """
    r0, _, d, _ = _plan_params(k, n, s, eps)
    out = []
    for x in range(n):
        slots = [j * n + (x + l) % n + 1 for l in range(n) for j in range(k)]
        entries = []
        pos = 0
        for r, dr in enumerate(d, 1):
            for c in slots[pos : pos + dr]:
                entries.extend([c] * r)
            # skip to the next layer boundary so classes stay layer-aligned
            pos = k * math.ceil((pos + dr) / k)
        rest = s - len(entries)
        assert rest == 0 or rest > r0
        entries.extend([slots[pos]] * rest)
        out.append(ColorMultiset(x, tuple(entries)))
    return out


@pytest.mark.parametrize(
    "n,k,s,eps",
    [(9, 2, 23, 0.5), (8, 2, 22, 0.5), (5, 3, 11, 0.9), (45, 2, 5, 0.9), (91, 2, 45, 0.5)],
)
def test_plan_on_layered_multisets(n, k, s, eps):
    ms = layered_multisets(n, k, s, eps)
    plan = plan_ordering(ms, k, eps, 7)
    _, _, _, s_r = _plan_params(k, n, s, eps)
    assert plan.t == k * sum(r * sr for r, sr in enumerate(s_r, 1))
    assert plan.blocks >= 1
    for i in range(plan.blocks):
        assert sorted(plan.block_colors(i)) == list(range(1, k * n + 1))
    for m, order in zip(ms, plan.orderings):
        assert Counter(order) == Counter(m.entries)


def test_plan_rejects_short_class():
    n, k, s, eps = 9, 2, 23, 0.5
    ms = layered_multisets(n, k, s, eps)
    bad = ColorMultiset(0, (1,) * s)
    with pytest.raises(PlanFailure) as info:
        plan_ordering([bad] + ms[1:], k, eps, 0)
    assert "m_1" in info.value.reason


def test_plan_needs_equal_sizes():
    with pytest.raises(ValueError):
        plan_ordering([ColorMultiset(0, (1, 2)), ColorMultiset(1, (1,))], 2, 0.5, 0)


def test_multiplicity_graphs():
    ms = [ColorMultiset(0, (1, 1, 2)), ColorMultiset(1, (3, 4, 4))]
    b1, b2 = build_multiplicity_graphs(ms, 2, 4)
    assert b1.edges == {(0, 1), (1, 2)}
    assert b2.edges == {(0, 0), (1, 3)}


def _layered_result(n=45, k=2, s=5, eps=0.9, seed=3):
    """Run the assembly step on a host whose sampled draws are layered multisets."""
    g = complete_graph(n)
    orient = random_orientation(g, Seed(seed).rng("o"))
    assert min(orient.out_degree(x) for x in range(n)) >= s
    ms = layered_multisets(n, k, s, eps)
    targets = [tuple(orient.out[x]) for x in range(n)]
    extra = [[1] * (len(t) - s) for t in targets]
    return assemble(g, k, eps, orient, targets, [list(m.entries) for m in ms], extra, 0, seed)


def test_assembly_yields_rainbow_parts():
    res = _layered_result()
    assert res.success and res.t_achieved == 1
    assert all(c.passed for c in verify_decomposition(res)), verify_decomposition(res)
    part = res.parts[0]
    assert part.num_edges() == 2 * 45
    assert is_rainbow(res.h, part.edge_list()).holds
    assert are_edge_disjoint(res.parts + [res.remainder]).holds


def test_verifier_catches_tampering():
    res = _layered_result()
    e = res.parts[0].edge_list()[0]
    res.h.color[e] = res.h.color[res.parts[0].edge_list()[1]]
    names = {c.name for c in verify_decomposition(res) if not c.passed}
    assert names == {"rainbow"}


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 24), st.sampled_from([0.5, 0.8, 1.0]), st.sampled_from([0.3, 0.5, 0.9]), st.integers(0, 2**40))
def test_invariants_hold_on_every_run(n, p, eps, seed):
    res = decompose(complete_graph(n), p, 2, eps, seed)
    checks = verify_decomposition(res)
    assert all(c.passed for c in checks), [c for c in checks if not c.passed]
    assert res.t_achieved <= max(res.t_target, res.diagnostics.get("t_positions", 0) // 2)
    if not res.success:
        assert res.parts == [] and res.remainder == res.h.base


def test_failure_reason_names_vertex():
    res = decompose(circulant_graph(30, 6), 1.0, 2, 0.4, 1)
    assert not res.success
    assert res.failure_reason.startswith("vertex ")
    assert {"s", "r0", "d", "s_r", "t_achieved"} <= set(res.diagnostics)


def test_marginal_law_of_h():
    g = complete_graph(4)
    trials = 20000
    edge_hits = Counter()
    colors = Counter()
    for sd in range(trials):
        res = decompose(g, 0.5, 2, 0.5, sd)
        edge_hits.update(res.h.base.edge_list())
        colors.update(res.h.color.values())
    for e in g.edge_list():
        assert abs(edge_hits[e] / trials - 0.5) < 0.015
    assert set(colors) == set(range(1, 9))
    total = sum(colors.values())
    assert all(abs(colors[c] / total - 1 / 8) < 0.01 for c in colors)


def test_same_seed_same_decomposition():
    a = decompose(complete_graph(12), 0.9, 2, 0.5, 99)
    b = decompose(complete_graph(12), 0.9, 2, 0.5, 99)
    assert a.h == b.h and a.diagnostics == b.diagnostics


@pytest.mark.parametrize("kw", [dict(k=1), dict(p=0.0), dict(eps=1.0)])
def test_parameter_errors(kw):
    args = dict(g=complete_graph(5), p=0.5, k=2, eps=0.5, seed=0)
    args.update(kw)
    with pytest.raises(ValueError):
        decompose(**args)


def test_isolated_vertex_rejected():
    with pytest.raises(ValueError):
        decompose(Graph(3, [(0, 1)]), 0.5, 2, 0.5, 0)
