import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rainbowpack.graph import (
    BipartiteGraph,
    ColoredGraph,
    Graph,
    GraphFormatError,
    Orientation,
    circulant_graph,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    edges_between,
    load_colored,
    load_graph,
    min_degree,
    path_graph,
    save_colored,
    save_graph,
)


@st.composite
def graphs(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    return Graph(n, chosen)


def test_complete_graph_counts():
    g = complete_graph(5)
    assert g.num_edges() == 10
    assert min_degree(g) == 4
    g.check()


def test_edges_are_normalized_and_deduplicated():
    g = Graph(3, [(1, 0), (0, 1), (2, 1)])
    assert g.edge_list() == ((0, 1), (1, 2))
    assert g.has_edge(1, 0)


@pytest.mark.parametrize("edges", [[(0, 0)], [(0, 3)], [(-1, 1)]])
def test_bad_edges_rejected(edges):
    with pytest.raises(ValueError):
        Graph(3, edges)


def test_subgraph_must_stay_inside_host():
    g = path_graph(4)
    assert g.subgraph([(0, 1)]).num_edges() == 1
    with pytest.raises(ValueError):
        g.subgraph([(0, 2)])


@pytest.mark.parametrize("n,d", [(10, 4), (10, 5), (9, 4), (200, 150)])
def test_circulant_is_regular(n, d):
    g = circulant_graph(n, d)
    assert all(g.degree(v) == d for v in range(n))


def test_circulant_odd_degree_needs_even_order():
    with pytest.raises(ValueError):
        circulant_graph(9, 3)


def test_bipartite_roundtrip_through_plain_graph():
    b = BipartiteGraph(2, 3, [(0, 0), (1, 2), (0, 2)])
    g = b.to_graph()
    assert g.has_edge(0, 2) and g.has_edge(1, 4)
    assert BipartiteGraph.from_graph(g, 2) == b
    with pytest.raises(ValueError):
        BipartiteGraph.from_graph(complete_graph(4), 2)


def test_edges_between():
    b = complete_bipartite(3, 3)
    assert edges_between(b, [0, 1], [2]) == 2
    with pytest.raises(IndexError):
        edges_between(b, [5], [])


def test_orientation_must_cover_each_edge_once():
    g = cycle_graph(3)
    o = Orientation(g, [(0, 1), (1, 2), (2, 0)])
    assert [o.out_degree(x) for x in range(3)] == [1, 1, 1]
    with pytest.raises(ValueError):
        Orientation(g, [(0, 1), (1, 0), (1, 2), (2, 0)])
    with pytest.raises(ValueError):
        Orientation(g, [(0, 1), (1, 2)])


def test_colored_graph_validation():
    g = path_graph(3)
    cg = ColoredGraph(g, {(1, 0): 2, (1, 2): 1}, 2)
    assert cg.color_of(0, 1) == 2
    with pytest.raises(ValueError):
        ColoredGraph(g, {(0, 1): 3, (1, 2): 1}, 2)
    with pytest.raises(ValueError):
        ColoredGraph(g, {(0, 1): 1}, 2)


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_file_roundtrip(tmp_path_factory, g):
    path = tmp_path_factory.mktemp("g") / "g.txt"
    save_graph(g, path)
    assert load_graph(path) == g


@settings(max_examples=40, deadline=None)
@given(graphs(), st.integers(1, 7), st.data())
def test_colored_file_roundtrip(tmp_path_factory, g, c, data):
    colors = {e: data.draw(st.integers(1, c)) for e in g.edge_list()}
    cg = ColoredGraph(g, colors, c)
    path = tmp_path_factory.mktemp("c") / "c.txt"
    save_colored(cg, path)
    assert load_colored(path) == cg


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_adjacency_invariants(g):
    g.check()
    assert sum(g.degree(v) for v in range(g.n)) == 2 * g.num_edges()
    assert len(g.edges) == g.num_edges()


@pytest.mark.parametrize(
    "text,lineno",
    [
        ("3 1\n0 5\n", 2),
        ("# c\n3 2\n0 1\n0 1\n", 4),
        ("3 2\n0 1\n", 2),
        ("3 1\n0 x\n", 2),
        ("3\n", 1),
        ("", 0),
    ],
)
def test_parse_errors_report_line(tmp_path, text, lineno):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    with pytest.raises(GraphFormatError) as info:
        load_graph(path)
    assert info.value.lineno == lineno


def test_comments_and_color_column(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("# hello\n3 2\n0 1 4\n# mid\n1 2 4\n")
    assert load_graph(path).num_edges() == 2
    cg = load_colored(path)
    assert cg.palette_size == 4 and cg.color_of(1, 2) == 4


def test_colored_loader_needs_colors(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("2 1\n0 1\n")
    with pytest.raises(GraphFormatError):
        load_colored(path)
