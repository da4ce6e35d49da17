"""Undirected multigraphs with integer edge weights, plus ground-truth structure queries.

Vertices are the dense ids ``0..n-1``.  Edges keep their construction order,
so edge ids (and the arc ids derived from them) are stable and reproducible.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class GraphError(ValueError):
    """Base class for invalid graph input."""


class SelfLoopError(GraphError):
    pass


class VertexRangeError(GraphError):
    pass


class WeightError(GraphError):
    pass


class EmptyGraphError(GraphError):
    pass


class Graph:
    """Immutable undirected multigraph; build with :func:`build_graph`.

    Endpoints and weights live in read-only int64 arrays ``u``, ``v``, ``w``.
    """

    __slots__ = ("n_vertices", "u", "v", "w", "_cache")

    def __init__(self, n_vertices: int, u: np.ndarray, v: np.ndarray, w: np.ndarray):
        self.n_vertices = int(n_vertices)
        for name, arr in (("u", u), ("v", v), ("w", w)):
            arr = np.ascontiguousarray(arr, dtype=np.int64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        self._cache = {}

    def __setattr__(self, name, value):
        if hasattr(self, "_cache"):
            raise AttributeError("Graph is immutable")
        object.__setattr__(self, name, value)

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.n_vertices == other.n_vertices
            and np.array_equal(self.u, other.u)
            and np.array_equal(self.v, other.v)
            and np.array_equal(self.w, other.w)
        )

    def __hash__(self):
        return hash((self.n_vertices, self.edges))

    def __repr__(self):
        return f"Graph(n_vertices={self.n_vertices}, n_edges={self.n_edges})"

    def _cached(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def n_edges(self) -> int:
        return len(self.u)

    @property
    def edges(self) -> tuple[tuple[int, int, int], ...]:
        return self._cached(
            "edges", lambda: tuple(zip(self.u.tolist(), self.v.tolist(), self.w.tolist()))
        )

    @property
    def is_unit_weight(self) -> bool:
        return bool((self.w == 1).all())

    def incident(self, v: int) -> tuple[tuple[int, int], ...]:
        """(edge id, other endpoint) for every edge at ``v``, in edge order."""
        def build():
            indptr, nbr, eid = self.csr()
            e, o = eid.tolist(), nbr.tolist()
            ptr = indptr.tolist()
            return tuple(tuple(zip(e[ptr[x]:ptr[x + 1]], o[ptr[x]:ptr[x + 1]]))
                         for x in range(self.n_vertices))
        return self._cached("adj", build)[v]

    def degrees(self) -> np.ndarray:
        return self._cached(
            "deg",
            lambda: np.bincount(np.concatenate([self.u, self.v]), minlength=self.n_vertices),
        )

    def adjacency_matrix(self) -> np.ndarray:
        """Integer adjacency with parallel-edge multiplicities."""
        a = np.zeros((self.n_vertices, self.n_vertices), dtype=np.int64)
        np.add.at(a, (self.u, self.v), 1)
        np.add.at(a, (self.v, self.u), 1)
        return a

    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(indptr, neighbor, edge_id) incidence arrays, edge ids ascending per vertex."""
        def build():
            m = self.n_edges
            owner = np.concatenate([self.u, self.v])
            other = np.concatenate([self.v, self.u])
            eid = np.concatenate([np.arange(m), np.arange(m)])
            order = np.lexsort((eid, owner))
            indptr = np.zeros(self.n_vertices + 1, dtype=np.int64)
            np.cumsum(self.degrees(), out=indptr[1:])
            return indptr, other[order], eid[order]
        return self._cached("csr", build)


def build_graph(n: int, edges) -> Graph:
    """Validate and freeze a graph.

    ``edges`` holds ``(u, v)`` or ``(u, v, w)`` rows (a list or an integer array).
    """
    n = int(n)
    if n < 0:
        raise VertexRangeError(f"negative vertex count {n}")
    if not isinstance(edges, np.ndarray) and len(edges) and len({len(e) for e in edges}) > 1:
        # mixed (u, v) and (u, v, w) rows
        edges = [tuple(e) if len(e) == 3 else (*e, 1) for e in edges]
    arr = np.asarray(edges if len(edges) else np.empty((0, 3)), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] not in (2, 3):
        raise GraphError("edges must be (u, v) or (u, v, w) rows")
    u, v = arr[:, 0], arr[:, 1]
    w = arr[:, 2] if arr.shape[1] == 3 else np.ones(len(arr), dtype=np.int64)
    bad = (u < 0) | (u >= n) | (v < 0) | (v >= n)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise VertexRangeError(f"edge ({u[i]}, {v[i]}) outside 0..{n - 1}")
    if (u == v).any():
        i = int(np.flatnonzero(u == v)[0])
        raise SelfLoopError(f"self-loop at vertex {u[i]}")
    if (w < 1).any():
        i = int(np.flatnonzero(w < 1)[0])
        raise WeightError(f"edge ({u[i]}, {v[i]}) has weight {w[i]}; weights must be >= 1")
    return Graph(n, u, v, w)


def inflate(g: Graph) -> Graph:
    """Subdivide every weight-w edge into a path of w unit edges."""
    n = g.n_vertices
    out = []
    for u, v, w in g.edges:
        prev = u
        for _ in range(w - 1):
            out.append((prev, n, 1))
            prev = n
            n += 1
        out.append((prev, v, 1))
    return build_graph(n, out)


def euler_characteristic(g: Graph) -> int:
    return g.n_edges - g.n_vertices


@dataclass(frozen=True)
class ArcIndex:
    """Directed arcs: edge e yields arc 2e = (u -> v) and 2e+1 = (v -> u)."""

    tail: np.ndarray
    head: np.ndarray

    @classmethod
    def from_graph(cls, g: Graph) -> "ArcIndex":
        tail = np.stack([g.u, g.v], axis=1).ravel()
        head = np.stack([g.v, g.u], axis=1).ravel()
        return cls(tail, head)

    def __len__(self) -> int:
        return len(self.tail)

    @staticmethod
    def reverse(a: int) -> int:
        return a ^ 1


# ---------------------------------------------------------------------------
# structure queries


@dataclass(frozen=True)
class StructureReport:
    component_count: int
    component_labels: np.ndarray
    global_min_cut: int | None
    bridge_count: int
    disconnected: bool

    def to_dict(self) -> dict:
        return {
            "component_count": self.component_count,
            "component_labels": self.component_labels.tolist(),
            "global_min_cut": self.global_min_cut,
            "bridge_count": self.bridge_count,
            "disconnected": self.disconnected,
        }


def connected_components(g: Graph) -> tuple[int, np.ndarray]:
    labels = np.full(g.n_vertices, -1, dtype=np.int64)
    count = 0
    for s in range(g.n_vertices):
        if labels[s] >= 0:
            continue
        labels[s] = count
        stack = [s]
        while stack:
            v = stack.pop()
            for _, w in g.incident(v):
                if labels[w] < 0:
                    labels[w] = count
                    stack.append(w)
        count += 1
    return count, labels


def bridges(g: Graph) -> list[int]:
    """Edge ids of all bridges (iterative low-link; parallel edges are never bridges)."""
    n = g.n_vertices
    disc = [-1] * n
    low = [0] * n
    out = []
    t = 0
    for root in range(n):
        if disc[root] >= 0:
            continue
        disc[root] = low[root] = t
        t += 1
        # frames: (vertex, edge id used to enter, iterator over incident edges)
        stack = [(root, -1, iter(g.incident(root)))]
        while stack:
            v, pe, it = stack[-1]
            advanced = False
            for e, w in it:
                if e == pe:
                    continue
                if disc[w] < 0:
                    disc[w] = low[w] = t
                    t += 1
                    stack.append((w, e, iter(g.incident(w))))
                    advanced = True
                    break
                low[v] = min(low[v], disc[w])
            if advanced:
                continue
            stack.pop()
            if stack:
                p = stack[-1][0]
                low[p] = min(low[p], low[v])
                if low[v] > disc[p]:
                    out.append(pe)
    return sorted(out)


def stoer_wagner(g: Graph) -> int:
    """Global minimum edge cut of a connected graph (unit capacity per edge)."""
    n = g.n_vertices
    if n < 2:
        raise GraphError("minimum cut needs at least 2 vertices")
    w = g.adjacency_matrix().astype(np.float64)
    active = np.ones(n, dtype=bool)
    best = np.inf
    for _ in range(n - 1):
        idx = np.flatnonzero(active)
        sub = w[np.ix_(idx, idx)]
        k = len(idx)
        in_a = np.zeros(k, dtype=bool)
        in_a[0] = True
        conn = sub[0].copy()
        prev = last = 0
        cut = 0.0
        for _ in range(k - 1):
            nxt = int(np.argmax(np.where(in_a, -1.0, conn)))
            prev, last = last, nxt
            cut = conn[nxt]
            in_a[nxt] = True
            conn += sub[nxt]
        best = min(best, cut)
        s, t = idx[prev], idx[last]
        w[s, :] += w[t, :]
        w[:, s] += w[:, t]
        w[s, s] = 0
        w[t, :] = 0
        w[:, t] = 0
        active[t] = False
    return int(round(best))


def exhaustive_min_cut(g: Graph) -> int:
    """Minimum over all vertex bipartitions; exponential, for small oracles."""
    n = g.n_vertices
    if n < 2:
        raise GraphError("minimum cut needs at least 2 vertices")
    if n > 20:
        raise GraphError("exhaustive min cut limited to 20 vertices")
    best = None
    # vertex 0 fixed on side A to skip mirror images
    for mask in range(1 << (n - 1)):
        side = (mask << 1)  # bit v set -> v on side B
        if side == 0:
            continue
        cut = sum(1 for u, v, _ in g.edges if ((side >> u) & 1) != ((side >> v) & 1))
        if best is None or cut < best:
            best = cut
    return best


def structure_report(g: Graph, *, min_cut: bool = True) -> StructureReport:
    """Components, bridges and (optionally) the exact global minimum cut.

    Disconnected graphs report a cut of 0 with ``disconnected`` set.  For
    graphs with at most 12 vertices the contraction result is re-checked
    against full bipartition enumeration.
    """
    if g.n_vertices == 0:
        raise EmptyGraphError("structure report of an empty graph")
    count, labels = connected_components(g)
    nb = len(bridges(g))
    if count > 1:
        cut = 0
    elif not min_cut or g.n_vertices < 2:
        cut = None
    else:
        cut = stoer_wagner(g)
        if g.n_vertices <= 12:
            check = exhaustive_min_cut(g)
            if check != cut:
                raise AssertionError(f"min cut mismatch: contraction {cut}, exhaustive {check}")
    return StructureReport(count, labels, cut, nb, count > 1)


# ---------------------------------------------------------------------------
# named graphs


def cycle_graph(k: int) -> Graph:
    return build_graph(k, [(i, (i + 1) % k) for i in range(k)])


def complete_graph(n: int) -> Graph:
    return build_graph(n, list(itertools.combinations(range(n), 2)))


def path_graph(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return build_graph(10, outer + spokes + inner)


def grid_graph(rows: int, cols: int) -> Graph:
    """Rectangular grid; vertex (i, j) has id ``i * cols + j``."""
    edges = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                edges.append((v, v + 1))
            if i + 1 < rows:
                edges.append((v, v + cols))
    return build_graph(rows * cols, edges)


def disjoint_union(*graphs: Graph) -> Graph:
    offs = np.cumsum([0] + [h.n_vertices for h in graphs])
    u = np.concatenate([h.u + o for h, o in zip(graphs, offs)])
    v = np.concatenate([h.v + o for h, o in zip(graphs, offs)])
    w = np.concatenate([h.w for h in graphs])
    return Graph(int(offs[-1]), u, v, w)


# ---------------------------------------------------------------------------
# edge-list format: header "n m", then one "u v w" line per edge


def dumps(g: Graph) -> str:
    lines = [f"{g.n_vertices} {g.n_edges}"]
    lines.extend(f"{u} {v} {w}" for u, v, w in g.edges)
    return "\n".join(lines) + "\n"


def loads(text: str) -> Graph:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise GraphError("empty edge-list file")
    try:
        n, m = (int(x) for x in rows[0])
        edges = [tuple(int(x) for x in r) for r in rows[1:]]
    except ValueError as exc:
        raise GraphError(f"malformed edge-list: {exc}") from None
    if len(edges) != m:
        raise GraphError(f"header declares {m} edges, file has {len(edges)}")
    for r in edges:
        if len(r) != 3:
            raise GraphError(f"edge line needs 'u v w', got {r}")
    return build_graph(n, edges)


def write_edgelist(g: Graph, path) -> None:
    Path(path).write_text(dumps(g))


def read_edgelist(path) -> Graph:
    return loads(Path(path).read_text())
