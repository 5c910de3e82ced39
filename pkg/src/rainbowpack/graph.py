"""Immutable graph containers used by every sampler and checker.

Vertices are ``0..n-1``. Colors are ``1..c``. All containers are read-only
after construction and iterate in a deterministic (sorted) order.
"""

from __future__ import annotations

import os
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

Edge = Tuple[int, int]


class GraphFormatError(ValueError):
    """Raised when a graph file cannot be parsed."""

    def __init__(self, path, lineno: int, msg: str):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.path = path
        self.lineno = lineno


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Undirected simple graph on ``range(n)``.

    The adjacency lists are the source of truth; the edge set is derived
    from them and cached for O(1) membership tests.
    """

    __slots__ = ("n", "adj", "_edges", "_edge_list")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        nbrs: List[set] = [set() for _ in range(n)]
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        self.n = n
        self.adj: Tuple[Tuple[int, ...], ...] = tuple(tuple(sorted(s)) for s in nbrs)
        self._edges = None
        self._edge_list = None

    @classmethod
    def _trusted(cls, n: int, edge_list: List[Edge]) -> "Graph":
        # Fast path for samplers: edge_list holds distinct normalized pairs.
        g = cls.__new__(cls)
        nbrs: List[List[int]] = [[] for _ in range(n)]
        for u, v in edge_list:
            nbrs[u].append(v)
            nbrs[v].append(u)
        g.n = n
        g.adj = tuple(tuple(sorted(s)) for s in nbrs)
        g._edges = None
        g._edge_list = None
        return g

    @property
    def edges(self) -> frozenset:
        if self._edges is None:
            self._edges = frozenset(self.edge_list())
        return self._edges

    def edge_list(self) -> Tuple[Edge, ...]:
        """Edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        if self._edge_list is None:
            self._edge_list = tuple((u, v) for u in range(self.n) for v in self.adj[u] if u < v)
        return self._edge_list

    def num_edges(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self.adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return _norm(u, v) in self.edges

    def subgraph(self, edges: Iterable[Sequence[int]]) -> "Graph":
        """Spanning subgraph with the given edges, which must belong to ``self``."""
        sub = Graph(self.n, edges)
        extra = sub.edges - self.edges
        if extra:
            raise ValueError(f"edge {min(extra)} is not in the host graph")
        return sub

    def check(self) -> None:
        """Assert the structural invariants (symmetry, sortedness, simplicity)."""
        for u, nb in enumerate(self.adj):
            assert list(nb) == sorted(set(nb)), f"neighbors of {u} not sorted/unique"
            for v in nb:
                assert v != u, f"self-loop at {u}"
                assert u in self.adj[v], f"asymmetric adjacency {u}-{v}"

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.n, self.adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges()})"


class BipartiteGraph:
    """Bipartite graph with left part ``range(a)`` and right part ``range(b)``.

    Left and right indices are independent: edge ``(i, j)`` joins left
    vertex ``i`` to right vertex ``j``.
    """

    __slots__ = ("a", "b", "left_adj", "right_adj", "_edges")

    def __init__(self, a: int, b: int, edges: Iterable[Sequence[int]] = ()):
        if a < 0 or b < 0:
            raise ValueError("part sizes must be non-negative")
        left: List[set] = [set() for _ in range(a)]
        right: List[set] = [set() for _ in range(b)]
        for e in edges:
            i, j = int(e[0]), int(e[1])
            if not (0 <= i < a and 0 <= j < b):
                raise ValueError(f"edge ({i}, {j}) out of range for parts ({a}, {b})")
            left[i].add(j)
            right[j].add(i)
        self.a = a
        self.b = b
        self.left_adj: Tuple[Tuple[int, ...], ...] = tuple(tuple(sorted(s)) for s in left)
        self.right_adj: Tuple[Tuple[int, ...], ...] = tuple(tuple(sorted(s)) for s in right)
        self._edges = None

    @property
    def edges(self) -> frozenset:
        if self._edges is None:
            self._edges = frozenset(self.edge_list())
        return self._edges

    def edge_list(self) -> List[Edge]:
        return [(i, j) for i in range(self.a) for j in self.left_adj[i]]

    def num_edges(self) -> int:
        return sum(len(x) for x in self.left_adj)

    def left_degree(self, i: int) -> int:
        return len(self.left_adj[i])

    def right_degree(self, j: int) -> int:
        return len(self.right_adj[j])

    def has_edge(self, i: int, j: int) -> bool:
        return (i, j) in self.edges

    def to_graph(self) -> Graph:
        """Plain graph with left vertex ``i`` -> ``i`` and right ``j`` -> ``a + j``."""
        return Graph(self.a + self.b, ((i, self.a + j) for i, j in self.edge_list()))

    @classmethod
    def from_graph(cls, g: Graph, left_size: int) -> "BipartiteGraph":
        """Inverse of :meth:`to_graph`; raises if an edge stays inside one side."""
        edges = []
        for u, v in g.edge_list():
            if u < left_size <= v:
                edges.append((u, v - left_size))
            else:
                raise ValueError(f"edge ({u}, {v}) does not cross the split at {left_size}")
        return cls(left_size, g.n - left_size, edges)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BipartiteGraph)
            and (self.a, self.b) == (other.a, other.b)
            and self.left_adj == other.left_adj
        )

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.left_adj))

    def __repr__(self) -> str:
        return f"BipartiteGraph(a={self.a}, b={self.b}, m={self.num_edges()})"


class Orientation:
    """An orientation of every edge of ``base``; ``arcs`` holds ``(tail, head)`` pairs."""

    __slots__ = ("base", "arcs", "out")

    def __init__(self, base: Graph, arcs: Iterable[Edge]):
        arcs = frozenset((int(u), int(v)) for u, v in arcs)
        seen = set()
        out: List[List[int]] = [[] for _ in range(base.n)]
        for u, v in arcs:
            e = _norm(u, v)
            if e in seen:
                raise ValueError(f"edge {e} oriented in both directions")
            seen.add(e)
            out[u].append(v)
        if seen != base.edges:
            missing = base.edges - seen
            if missing:
                raise ValueError(f"edge {min(missing)} has no direction")
            raise ValueError(f"arc on {min(seen - base.edges)} is not a base edge")
        self.base = base
        self.arcs = arcs
        self.out: Tuple[Tuple[int, ...], ...] = tuple(tuple(sorted(o)) for o in out)

    @classmethod
    def _trusted(cls, base: Graph, arcs: List[Edge]) -> "Orientation":
        # arcs: exactly one direction per base edge, as produced by samplers
        o = cls.__new__(cls)
        out: List[List[int]] = [[] for _ in range(base.n)]
        for u, v in arcs:
            out[u].append(v)
        o.base = base
        o.arcs = frozenset(arcs)
        o.out = tuple(tuple(sorted(x)) for x in out)
        return o

    def out_neighbors(self, x: int) -> Tuple[int, ...]:
        return self.out[x]

    def out_degree(self, x: int) -> int:
        return len(self.out[x])

    def __repr__(self) -> str:
        return f"Orientation(n={self.base.n}, arcs={len(self.arcs)})"


class ColoredGraph:
    """Graph with one color in ``1..palette_size`` per edge."""

    __slots__ = ("base", "color", "palette_size")

    def __init__(self, base: Graph, color: Dict[Edge, int], palette_size: int):
        if palette_size < 1:
            raise ValueError("palette size must be positive")
        norm = {}
        for (u, v), c in color.items():
            norm[_norm(u, v)] = int(c)
        if set(norm) != base.edges:
            raise ValueError("every edge needs exactly one color")
        for e, c in norm.items():
            if not 1 <= c <= palette_size:
                raise ValueError(f"color {c} on edge {e} outside [1, {palette_size}]")
        self.base = base
        self.color = norm
        self.palette_size = palette_size

    @classmethod
    def _trusted(cls, base: Graph, color: Dict[Edge, int], palette_size: int) -> "ColoredGraph":
        cg = cls.__new__(cls)
        cg.base = base
        cg.color = color
        cg.palette_size = palette_size
        return cg

    @property
    def n(self) -> int:
        return self.base.n

    def colored_edges(self) -> Iterator[Tuple[int, int, int]]:
        for u, v in self.base.edge_list():
            yield u, v, self.color[(u, v)]

    def color_of(self, u: int, v: int) -> int:
        return self.color[_norm(u, v)]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ColoredGraph)
            and self.base == other.base
            and self.color == other.color
            and self.palette_size == other.palette_size
        )

    def __repr__(self) -> str:
        return f"ColoredGraph(n={self.n}, m={self.base.num_edges()}, c={self.palette_size})"


def min_degree(g: Graph) -> int:
    """Smallest vertex degree; 0 for graphs without vertices or edges."""
    if g.n == 0:
        return 0
    return min(len(a) for a in g.adj)


def edges_between(g: BipartiteGraph, X: Iterable[int], Y: Iterable[int]) -> int:
    """Number of edges with left end in ``X`` and right end in ``Y``."""
    X = set(X)
    Y = set(Y)
    for i in X:
        if not 0 <= i < g.a:
            raise IndexError(f"left index {i} out of range")
    for j in Y:
        if not 0 <= j < g.b:
            raise IndexError(f"right index {j} out of range")
    return sum(1 for i in X for j in g.left_adj[i] if j in Y)


def complete_graph(n: int) -> Graph:
    if n < 1:
        raise ValueError("n must be at least 1")
    return Graph._trusted(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def complete_bipartite(a: int, b: int) -> BipartiteGraph:
    if a < 1 or b < 1:
        raise ValueError("part sizes must be at least 1")
    return BipartiteGraph(a, b, ((i, j) for i in range(a) for j in range(b)))


def cycle_graph(n: int) -> Graph:
    return Graph(n, ((i, (i + 1) % n) for i in range(n)))


def path_graph(n: int) -> Graph:
    return Graph(n, ((i, i + 1) for i in range(n - 1)))


def circulant_graph(n: int, degree: int) -> Graph:
    """``degree``-regular circulant on ``n`` vertices (offsets 1..degree/2, plus n/2 if odd)."""
    if not 0 <= degree < n:
        raise ValueError(f"degree must be in [0, {n - 1}]")
    if degree % 2 and n % 2:
        raise ValueError("odd-degree regular graph needs an even vertex count")
    offsets = list(range(1, degree // 2 + 1))
    if degree % 2:
        offsets.append(n // 2)
    return Graph(n, ((i, (i + d) % n) for i in range(n) for d in offsets))


# -- text format ------------------------------------------------------------


def _write_lines(path, header: str, rows: List[str], comments: Sequence[str] = ()) -> None:
    dirname = os.path.dirname(os.fspath(path))
    if dirname:
        os.makedirs(dirname, exist_ok=True)
    with open(path, "w") as fh:
        for c in comments:
            fh.write(f"# {c}\n")
        fh.write(header + "\n")
        for r in rows:
            fh.write(r + "\n")


def save_graph(g: Graph, path) -> None:
    _write_lines(path, f"{g.n} {g.num_edges()}", [f"{u} {v}" for u, v in g.edge_list()])


def save_colored(cg: ColoredGraph, path) -> None:
    rows = [f"{u} {v} {c}" for u, v, c in cg.colored_edges()]
    _write_lines(path, f"{cg.n} {len(rows)}", rows, comments=[f"palette {cg.palette_size}"])


def _parse(path):
    n = m = None
    palette: Optional[int] = None
    rows = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "palette":
                    try:
                        palette = int(parts[1])
                    except ValueError:
                        raise GraphFormatError(path, lineno, "bad palette size") from None
                continue
            try:
                nums = [int(t) for t in line.split()]
            except ValueError:
                raise GraphFormatError(path, lineno, f"expected integers, got {line!r}") from None
            if n is None:
                if len(nums) != 2:
                    raise GraphFormatError(path, lineno, "header must be 'n m'")
                n, m = nums
                if n < 0 or m < 0:
                    raise GraphFormatError(path, lineno, "negative header value")
                continue
            if len(nums) not in (2, 3):
                raise GraphFormatError(path, lineno, "edge line must be 'u v' or 'u v color'")
            u, v = nums[0], nums[1]
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise GraphFormatError(path, lineno, f"invalid edge ({u}, {v})")
            rows.append((lineno, nums))
    if n is None:
        raise GraphFormatError(path, 0, "missing header")
    if len(rows) != m:
        last = rows[-1][0] if rows else 1
        raise GraphFormatError(path, last, f"header announces {m} edges, found {len(rows)}")
    return n, rows, palette


def load_graph(path) -> Graph:
    """Read a graph file; a color column, if present, is ignored."""
    n, rows, _ = _parse(path)
    seen = set()
    for lineno, nums in rows:
        e = _norm(nums[0], nums[1])
        if e in seen:
            raise GraphFormatError(path, lineno, f"duplicate edge {e}")
        seen.add(e)
    return Graph(n, seen)


def load_colored(path) -> ColoredGraph:
    n, rows, palette = _parse(path)
    color: Dict[Edge, int] = {}
    for lineno, nums in rows:
        if len(nums) != 3:
            raise GraphFormatError(path, lineno, "colored edge line needs 'u v color'")
        e = _norm(nums[0], nums[1])
        if e in color:
            raise GraphFormatError(path, lineno, f"duplicate edge {e}")
        if nums[2] < 1:
            raise GraphFormatError(path, lineno, f"color {nums[2]} must be positive")
        color[e] = nums[2]
    if palette is None:
        palette = max(color.values(), default=1)
    return ColoredGraph(Graph(n, color), color, palette)
