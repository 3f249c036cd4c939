"""k-nearest-neighbor record network and geodesic distances on it.

Two records are joined whenever either is among the other's nearest
neighbors (union rule), so the adjacency is symmetric by construction.
Candidates tied with the k-th nearest distance are all admitted, which
keeps the graph independent of input ordering; neighbor lists are stored
in ascending (distance, id) order.
"""

import heapq
from collections import deque

import numpy as np

from .distances import DistanceMatrix
from .errors import ArgumentError, FormatError


class KnnGraph:
    """Undirected weighted graph over record ids.

    ``adjacency[i]`` lists ``(j, length)`` pairs sorted by (length, id);
    every edge appears in both endpoint lists and there are no self
    loops.
    """

    def __init__(self, ids, adjacency, k_nn):
        self.ids = list(ids)
        self.adjacency = adjacency
        self.k_nn = k_nn

    @property
    def n(self) -> int:
        return len(self.ids)

    def edges(self):
        """Each undirected edge once, as (i, j, length) with i < j."""
        for i, nbrs in enumerate(self.adjacency):
            for j, w in nbrs:
                if i < j:
                    yield i, j, w

    def degree(self, i) -> int:
        return len(self.adjacency[i])


def build_knn_graph(dm: DistanceMatrix, k_nn: int) -> KnnGraph:
    """Union k-NN graph from a record distance matrix.

    Each node nominates the ``k_nn`` closest others plus every candidate
    tied with the cutoff distance; nominations are ordered by ascending
    (distance, record id) so the result is deterministic.
    """
    n = dm.n
    if not 1 <= k_nn < n:
        raise ArgumentError(f"k_nn={k_nn} must satisfy 1 <= k_nn < n={n}")
    neighbor_sets: list[set[int]] = [set() for _ in range(n)]
    order_key = sorted(range(n), key=lambda i: dm.ids[i])
    for i in range(n):
        ranked = sorted((j for j in range(n) if j != i),
                        key=lambda j: (dm.values[i, j], dm.ids[j]))
        cutoff = dm.values[i, ranked[k_nn - 1]]
        for j in ranked:
            if dm.values[i, j] > cutoff:
                break
            neighbor_sets[i].add(j)
            neighbor_sets[j].add(i)
    adjacency = []
    for i in range(n):
        nbrs = sorted(neighbor_sets[i], key=lambda j: (dm.values[i, j], dm.ids[j]))
        adjacency.append([(j, float(dm.values[i, j])) for j in nbrs])
    return KnnGraph(ids=dm.ids, adjacency=adjacency, k_nn=k_nn)


def connected_components(g: KnnGraph) -> list[list[int]]:
    """Node-index components, each sorted, discovered in index order."""
    seen = [False] * g.n
    components = []
    for start in range(g.n):
        if seen[start]:
            continue
        comp = []
        queue = deque([start])
        seen[start] = True
        while queue:
            u = queue.popleft()
            comp.append(u)
            for v, _ in g.adjacency[u]:
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
        components.append(sorted(comp))
    return components


def largest_component(g: KnnGraph):
    """Subgraph induced by the largest component plus the dropped ids.

    Size ties go to the component containing the smallest record id.
    """
    components = connected_components(g)
    max_size = max(len(c) for c in components)
    candidates = [c for c in components if len(c) == max_size]
    keep = min(candidates, key=lambda comp: min(g.ids[i] for i in comp))
    remap = {old: new for new, old in enumerate(keep)}
    adjacency = []
    for old in keep:
        adjacency.append([(remap[j], w) for j, w in g.adjacency[old] if j in remap])
    kept_ids = [g.ids[i] for i in keep]
    dropped = [g.ids[i] for i in range(g.n) if i not in remap]
    return KnnGraph(ids=kept_ids, adjacency=adjacency, k_nn=g.k_nn), dropped


def connect_components(g: KnnGraph, dm: DistanceMatrix) -> KnnGraph:
    """Join components by repeatedly adding the shortest inter-component edge.

    ``dm`` must cover every node id of the graph; ties break by the edge's
    (id_i, id_j) pair so the result is deterministic.
    """
    lookup = {item: i for i, item in enumerate(dm.ids)}
    missing = [item for item in g.ids if item not in lookup]
    if missing:
        raise ArgumentError(f"distance matrix does not cover node {missing[0]!r}")
    adjacency = [list(nbrs) for nbrs in g.adjacency]
    while True:
        comp_of = {}
        graph = KnnGraph(ids=g.ids, adjacency=adjacency, k_nn=g.k_nn)
        components = connected_components(graph)
        if len(components) == 1:
            return graph
        for ci, comp in enumerate(components):
            for node in comp:
                comp_of[node] = ci
        best = None
        for i in range(g.n):
            for j in range(i + 1, g.n):
                if comp_of[i] == comp_of[j]:
                    continue
                d = float(dm.values[lookup[g.ids[i]], lookup[g.ids[j]]])
                key = (d, g.ids[i], g.ids[j])
                if best is None or key < best[0]:
                    best = (key, i, j, d)
        _, i, j, d = best
        adjacency[i].append((j, d))
        adjacency[j].append((i, d))
        adjacency[i].sort(key=lambda item: (item[1], g.ids[item[0]]))
        adjacency[j].sort(key=lambda item: (item[1], g.ids[item[0]]))


class GeodesicMatrix:
    """All-pairs shortest-path lengths; +inf marks separate components."""

    def __init__(self, ids, values):
        self.ids = list(ids)
        self.values = np.asarray(values, dtype=float)

    @property
    def n(self) -> int:
        return len(self.ids)

    def is_connected(self) -> bool:
        return bool(np.isfinite(self.values).all())


def geodesics(g: KnnGraph) -> GeodesicMatrix:
    """Exact shortest paths from every source (non-negative lengths)."""
    if g.n == 0:
        raise ArgumentError("empty graph")
    for i, nbrs in enumerate(g.adjacency):
        for _, w in nbrs:
            if w < 0:
                raise ArgumentError(f"negative edge length at node {g.ids[i]!r}")
    values = np.full((g.n, g.n), np.inf)
    for source in range(g.n):
        dist = values[source]
        dist[source] = 0.0
        heap = [(0.0, source)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for v, w in g.adjacency[u]:
                nd = d + w
                if nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
    return GeodesicMatrix(ids=g.ids, values=values)


def write_edges_tsv(g: KnnGraph, path) -> None:
    """One undirected edge per line: ``id_i<TAB>id_j<TAB>length``."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# k_nn\t{g.k_nn}\n")
        for i, j, w in g.edges():
            fh.write(f"{g.ids[i]}\t{g.ids[j]}\t{w:.17g}\n")


def read_edges_tsv(path) -> KnnGraph:
    k_nn = 1
    raw_edges = []
    ids_seen = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if line.startswith("# k_nn\t"):
                k_nn = int(line.split("\t")[1])
                continue
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise FormatError(f"{path}:{lineno}: expected 'id_i<TAB>id_j<TAB>length'")
            a, b, w = parts[0], parts[1], float(parts[2])
            raw_edges.append((a, b, w))
            ids_seen[a] = True
            ids_seen[b] = True
    ids = sorted(ids_seen)
    index = {v: i for i, v in enumerate(ids)}
    neighbor_sets: list[dict[int, float]] = [dict() for _ in ids]
    for a, b, w in raw_edges:
        i, j = index[a], index[b]
        neighbor_sets[i][j] = w
        neighbor_sets[j][i] = w
    adjacency = []
    for i in range(len(ids)):
        nbrs = sorted(neighbor_sets[i].items(), key=lambda item: (item[1], ids[item[0]]))
        adjacency.append([(j, w) for j, w in nbrs])
    return KnnGraph(ids=ids, adjacency=adjacency, k_nn=k_nn)
