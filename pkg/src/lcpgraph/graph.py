"""Simple undirected graphs: construction, generators and text formats.

Vertices are 0-based inside the package. The text formats (edge list and
DIMACS) and the CLI use 1-based labels; conversion happens only in the
parsers and in :func:`from_edge_list`.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Malformed graph input (bad vertex, self-loop, parse failure)."""


class Graph:
    """Immutable simple graph stored as a dense 0/1 adjacency matrix.

    ``rows[i]`` is the neighbourhood of ``i`` as an integer bitmask, which the
    combinatorial code uses for constant-time set algebra.
    """

    __slots__ = ("n", "adjacency", "rows", "weights", "_edges")

    def __init__(self, adjacency, weights=None):
        a = np.array(adjacency, dtype=np.int64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise GraphError(f"adjacency must be square, got shape {a.shape}")
        if a.shape[0] < 1:
            raise GraphError("graph needs at least one vertex")
        if not np.array_equal(a, a.T):
            raise GraphError("adjacency is not symmetric")
        if np.any(np.diag(a) != 0):
            raise GraphError("self-loops are not allowed")
        if np.any((a != 0) & (a != 1)):
            raise GraphError("adjacency entries must be 0 or 1")
        a.setflags(write=False)
        n = a.shape[0]
        if weights is None:
            w = np.ones(n)
        else:
            w = np.array(weights, dtype=float)
            if w.shape != (n,):
                raise GraphError(f"expected {n} weights, got shape {w.shape}")
            if np.any(w < 0):
                raise GraphError("vertex weights must be non-negative")
        w.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "adjacency", a)
        object.__setattr__(self, "weights", w)
        rows = tuple(
            sum(1 << int(j) for j in np.flatnonzero(a[i])) for i in range(n)
        )
        object.__setattr__(self, "rows", rows)
        object.__setattr__(
            self,
            "_edges",
            tuple((int(i), int(j)) for i, j in zip(*np.nonzero(np.triu(a)))),
        )

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.adjacency, other.adjacency)
            and np.array_equal(self.weights, other.weights)
        )

    def __hash__(self):
        return hash((self.n, self._edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.num_edges})"

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Edges as 0-based pairs ``(i, j)`` with ``i < j``."""
        return self._edges

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    @property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    @property
    def degree_matrix(self) -> np.ndarray:
        return np.diag(self.degrees)

    def neighbors(self, i: int) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.adjacency[i])]

    def closed_neighborhood_sum(self, x) -> np.ndarray:
        """``(A + I) x``: each vertex's own value plus its neighbours'."""
        x = np.asarray(x, dtype=float)
        return self.adjacency @ x + x

    def is_regular(self) -> bool:
        d = self.degrees
        return bool(np.all(d == d[0]))

    def with_weights(self, weights) -> "Graph":
        return Graph(self.adjacency, weights)


def from_edge_list(n: int, edges: Iterable[tuple[int, int]], weights=None) -> Graph:
    """Build a graph from 1-based vertex pairs; duplicate edges collapse."""
    if n < 1:
        raise GraphError("n must be positive")
    a = np.zeros((n, n), dtype=np.int64)
    for u, v in edges:
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphError(f"edge ({u}, {v}) out of range 1..{n}")
        if u == v:
            raise GraphError(f"self-loop at vertex {u}")
        a[u - 1, v - 1] = a[v - 1, u - 1] = 1
    return Graph(a, weights)


def empty_graph(n: int) -> Graph:
    return from_edge_list(n, [])


def complete_graph(n: int) -> Graph:
    if n < 1:
        raise GraphError("n must be positive")
    return Graph(np.ones((n, n), dtype=np.int64) - np.eye(n, dtype=np.int64))


def path_graph(n: int) -> Graph:
    return from_edge_list(n, [(i, i + 1) for i in range(1, n)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("a simple cycle needs n >= 3")
    return from_edge_list(n, [(i, i + 1) for i in range(1, n)] + [(1, n)])


def star_graph(k: int) -> Graph:
    """K_{1,k}: vertex 1 is the centre."""
    if k < 0:
        raise GraphError("star needs k >= 0 leaves")
    return from_edge_list(k + 1, [(1, i) for i in range(2, k + 2)])


def petersen_graph() -> Graph:
    outer = [(i, i % 5 + 1) for i in range(1, 6)]
    spokes = [(i, i + 5) for i in range(1, 6)]
    inner = [(6 + i, 6 + (i + 2) % 5) for i in range(5)]
    return from_edge_list(10, outer + spokes + inner)


_FAMILIES = {
    "complete": complete_graph,
    "path": path_graph,
    "cycle": cycle_graph,
    "star": star_graph,
    "empty": empty_graph,
}


def named_graph(name: str, *params: int) -> Graph:
    """Standard families: complete, path, cycle, star (K_{1,k}), empty, petersen.

    ``name`` may carry its parameter inline, as in ``"cycle:8"``.
    """
    if ":" in name:
        name, _, arg = name.partition(":")
        try:
            params = tuple(int(p) for p in arg.split(",")) + tuple(params)
        except ValueError as exc:
            raise GraphError(f"bad parameters {arg!r}") from exc
    name = name.strip().lower()
    if name == "petersen":
        if params:
            raise GraphError("petersen takes no parameters")
        return petersen_graph()
    if name not in _FAMILIES:
        raise GraphError(f"unknown graph family {name!r}")
    if len(params) != 1:
        raise GraphError(f"{name} needs exactly one integer parameter")
    if name != "star" and params[0] < 1:
        raise GraphError("n must be positive")
    return _FAMILIES[name](params[0])


def gen_erdos_renyi(n: int, p: float, seed: int = 0) -> Graph:
    """G(n, p) with numpy's PCG64 generator seeded by ``seed``.

    One uniform draw per unordered pair, in row-major order of the upper
    triangle; the pair is an edge iff the draw is below ``p``.
    """
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"p must lie in [0, 1], got {p}")
    if n < 1:
        raise GraphError("n must be positive")
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, k=1)
    keep = rng.random(len(iu[0])) < p
    a = np.zeros((n, n), dtype=np.int64)
    a[iu[0][keep], iu[1][keep]] = 1
    return Graph(a + a.T)


def random_tree(n: int, rng: np.random.Generator) -> Graph:
    """Uniform labelled tree on ``n`` vertices by Pruefer-sequence decoding."""
    if n <= 2:
        return complete_graph(n)
    seq = [int(v) for v in rng.integers(0, n, size=n - 2)]
    degree = [1] * n
    for v in seq:
        degree[v] += 1
    a = np.zeros((n, n), dtype=np.int64)
    for v in seq:
        leaf = next(i for i in range(n) if degree[i] == 1)
        a[leaf, v] = a[v, leaf] = 1
        degree[leaf] -= 1
        degree[v] -= 1
    u, w = (i for i in range(n) if degree[i] == 1)
    a[u, w] = a[w, u] = 1
    return Graph(a)


def random_forest(n: int, rng: np.random.Generator) -> Graph:
    """Random forest on ``n`` vertices.

    Component sizes come from cutting a shuffled vertex order at random
    positions (each gap cut with probability 1/2); each component is an
    independent uniform random tree.
    """
    order = [int(v) for v in rng.permutation(n)]
    cuts = [i for i in range(1, n) if rng.random() < 0.5]
    bounds = [0, *cuts, n]
    a = np.zeros((n, n), dtype=np.int64)
    for lo, hi in zip(bounds, bounds[1:]):
        part = order[lo:hi]
        tree = random_tree(len(part), rng)
        for i, j in tree.edges:
            a[part[i], part[j]] = a[part[j], part[i]] = 1
    return Graph(a)


def disjoint_union(g1: Graph, g2: Graph) -> Graph:
    n1, n2 = g1.n, g2.n
    a = np.zeros((n1 + n2, n1 + n2), dtype=np.int64)
    a[:n1, :n1] = g1.adjacency
    a[n1:, n1:] = g2.adjacency
    return Graph(a, np.concatenate([g1.weights, g2.weights]))


def induced_subgraph(g: Graph, s: Sequence[int]) -> Graph:
    """Subgraph induced by 0-based vertices ``s``, relabelled in the given order."""
    idx = list(s)
    if not idx:
        raise GraphError("induced subgraph needs a non-empty vertex set")
    for v in idx:
        if not 0 <= v < g.n:
            raise GraphError(f"vertex {v} out of range")
    if len(set(idx)) != len(idx):
        raise GraphError("repeated vertex in subset")
    return Graph(g.adjacency[np.ix_(idx, idx)], g.weights[idx])


def connected_components(g: Graph) -> list[list[int]]:
    seen = [False] * g.n
    comps = []
    for start in range(g.n):
        if seen[start]:
            continue
        seen[start] = True
        stack, comp = [start], []
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in g.neighbors(v):
                if not seen[u]:
                    seen[u] = True
                    stack.append(u)
        comps.append(sorted(comp))
    return comps


def is_forest(g: Graph) -> bool:
    return g.num_edges == g.n - len(connected_components(g))


# -- text formats ----------------------------------------------------------

_INT = re.compile(r"^[+-]?\d+$")


def _ints(tokens, lineno):
    for t in tokens:
        if not _INT.match(t):
            raise GraphError(f"line {lineno}: expected integer, got {t!r}")
    return [int(t) for t in tokens]


def parse_dimacs(text: str) -> Graph:
    """DIMACS ``col`` format: ``c`` comments, one ``p edge n m``, ``e u v`` lines."""
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tok = line.split()
        if tok[0] == "p":
            if n is not None:
                raise GraphError(f"line {lineno}: duplicate problem line")
            if len(tok) != 4 or tok[1] not in ("edge", "col"):
                raise GraphError(f"line {lineno}: malformed problem line")
            n, _m = _ints(tok[2:], lineno)
        elif tok[0] == "e":
            if n is None:
                raise GraphError(f"line {lineno}: edge before problem line")
            if len(tok) != 3:
                raise GraphError(f"line {lineno}: malformed edge line")
            u, v = _ints(tok[1:], lineno)
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphError(f"line {lineno}: vertex out of range 1..{n}")
            edges.append((u, v))
        else:
            raise GraphError(f"line {lineno}: unknown line type {tok[0]!r}")
    if n is None:
        raise GraphError("missing 'p edge n m' line")
    return from_edge_list(n, edges)


def parse_edge_list(text: str) -> Graph:
    """Header ``n m``, then ``u v`` lines (1-based), then optional ``w i value``.

    Blank lines and ``#`` comments are ignored. Missing weights default to 1.
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line.split()))
    if not lines:
        raise GraphError("empty edge list")
    lineno, head = lines[0]
    if len(head) != 2:
        raise GraphError(f"line {lineno}: header must be 'n m'")
    n, m = _ints(head, lineno)
    if n < 1 or m < 0:
        raise GraphError(f"line {lineno}: invalid header")
    edges, weights = [], np.ones(n)
    for lineno, tok in lines[1:]:
        if tok[0] == "w":
            if len(tok) != 3:
                raise GraphError(f"line {lineno}: expected 'w i value'")
            (i,) = _ints(tok[1:2], lineno)
            if not 1 <= i <= n:
                raise GraphError(f"line {lineno}: vertex out of range")
            try:
                weights[i - 1] = float(tok[2])
            except ValueError as exc:
                raise GraphError(f"line {lineno}: bad weight {tok[2]!r}") from exc
        elif len(tok) == 2:
            edges.append(tuple(_ints(tok, lineno)))
        else:
            raise GraphError(f"line {lineno}: malformed line")
    if len(edges) != m:
        raise GraphError(f"header announces {m} edges, found {len(edges)}")
    return from_edge_list(n, edges, weights)


def parse_graph(text: str) -> Graph:
    """Auto-detect DIMACS (``p``/``c``/``e`` lines) versus the edge-list format."""
    for raw in text.splitlines():
        tok = raw.split()
        if not tok or tok[0].startswith("#"):
            continue
        if tok[0] in ("p", "c", "e"):
            return parse_dimacs(text)
        return parse_edge_list(text)
    raise GraphError("empty graph description")


def to_edge_list(g: Graph) -> str:
    out = [f"{g.n} {g.num_edges}"]
    out += [f"{i + 1} {j + 1}" for i, j in g.edges]
    out += [f"w {i + 1} {float(w)!r}" for i, w in enumerate(g.weights) if w != 1.0]
    return "\n".join(out) + "\n"


def to_dimacs(g: Graph) -> str:
    out = [f"p edge {g.n} {g.num_edges}"]
    out += [f"e {i + 1} {j + 1}" for i, j in g.edges]
    return "\n".join(out) + "\n"
