"""Bipartite membership graphs and their one-mode projections.

A build connects vertex cloud V to group cloud U: each pair (v, u) joins
independently with probability g(torus_distance(v, u)).  Projecting onto
V links two vertices iff they share a group (counting shared groups);
projecting onto U is symmetric.  Components of the projections match the
respective restrictions of the bipartite components exactly, which the
test suite checks sample by sample.

Two build modes:

* exact: one uniform per (vertex, group) pair, drawn vertex-major; the
  default when the pair count is small enough.
* truncated: a uniform grid over the torus indexes groups by cell; only
  pairs within the truncation radius support_radius(spec, eps_tail) are
  considered, skipping at most an eps_tail fraction of membership mass.
  For bounded-support kernels the radius is the exact support, so no mass
  is lost.  Uniforms are assigned per vertex in ascending vertex order
  (candidates in ascending group order), making the result independent of
  the cell iteration order.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .errors import ConfigError
from .geometry import GROUP, VERTEX, PointCloud
from .kernels import KernelSpec, _eval_kernel_array, support_radius


@dataclass(frozen=True)
class BuildOptions:
    """Build-mode selection: auto picks exact below the pair limit."""

    mode: str = "auto"  # auto | exact | truncated
    eps_tail: float = 1e-3
    exact_pair_limit: int = 10_000_000

    def __post_init__(self):
        if self.mode not in ("auto", "exact", "truncated"):
            raise ConfigError(f"unknown build mode {self.mode!r}")
        if not 0 <= self.eps_tail < 1:
            raise ConfigError(f"eps_tail must lie in [0, 1), got {self.eps_tail}")


@dataclass
class BipartiteGraph:
    vertex_count: int
    group_count: int
    memberships: list  # per vertex: sorted, duplicate-free group index array
    build_options: dict = field(default_factory=dict)

    def membership_counts(self) -> np.ndarray:
        return np.array([m.size for m in self.memberships], dtype=np.int64)

    def group_members(self) -> list:
        """Inverse mapping: per group, the sorted vertex indices in it."""
        counts = self.membership_counts()
        src = np.repeat(np.arange(self.vertex_count, dtype=np.int64), counts)
        dst = (
            np.concatenate(self.memberships)
            if self.vertex_count and counts.sum()
            else np.empty(0, dtype=np.int64)
        )
        order = np.argsort(dst, kind="stable")  # stable keeps vertex order sorted
        dst_sorted, src_sorted = dst[order], src[order]
        bounds = np.searchsorted(dst_sorted, np.arange(self.group_count + 1))
        return [src_sorted[bounds[k] : bounds[k + 1]] for k in range(self.group_count)]


def _min_image_distance_matrix(a: np.ndarray, b: np.ndarray, side: float) -> np.ndarray:
    """Pairwise torus distances, rows a, columns b."""
    if a.size == 0 or b.size == 0:
        return np.zeros((a.shape[0], b.shape[0]))
    delta = np.abs(a[:, None, :] - b[None, :, :])
    delta = np.minimum(delta, side - delta)
    return np.sqrt(np.sum(delta**2, axis=2))


def build_bipartite(
    V: PointCloud,
    U: PointCloud,
    spec: KernelSpec,
    rng: np.random.Generator,
    options: BuildOptions | None = None,
) -> BipartiteGraph:
    """Sample the membership graph between a vertex and a group cloud."""
    if V.role != VERTEX or U.role != GROUP:
        raise ValueError("build_bipartite needs a vertex cloud and a group cloud")
    if V.torus != U.torus:
        raise ValueError("clouds must live on the same torus")
    if spec.d != V.torus.d:
        raise ValueError(f"kernel dimension {spec.d} != torus dimension {V.torus.d}")
    opts = options or BuildOptions()

    mode = opts.mode
    if mode == "auto":
        n_pairs = V.positions.shape[0] * U.positions.shape[0]
        mode = "exact" if n_pairs <= opts.exact_pair_limit else "truncated"

    if mode == "exact":
        memberships = _build_exact(V, U, spec, rng)
        record = {"mode": "exact"}
    else:
        memberships, radius = _build_truncated(V, U, spec, rng, opts.eps_tail)
        record = {"mode": "truncated", "eps_tail": opts.eps_tail, "truncation_radius": radius}
    return BipartiteGraph(
        vertex_count=V.positions.shape[0],
        group_count=U.positions.shape[0],
        memberships=memberships,
        build_options=record,
    )


def _build_exact(V, U, spec, rng):
    side = V.torus.side
    n_v, n_u = V.positions.shape[0], U.positions.shape[0]
    memberships = []
    # vertex-major uniform order; chunking rows leaves the stream unchanged
    block = max(1, int(4_000_000 // max(n_u, 1)))
    for start in range(0, n_v, block):
        vp = V.positions[start : start + block]
        dist = _min_image_distance_matrix(vp, U.positions, side)
        probs = _eval_kernel_array(spec, dist)
        hits = rng.random((vp.shape[0], n_u)) < probs
        for row in hits:
            memberships.append(np.nonzero(row)[0].astype(np.int64))
    if n_v and not memberships:
        memberships = [np.empty(0, dtype=np.int64) for _ in range(n_v)]
    return memberships


def _build_truncated(V, U, spec, rng, eps_tail):
    torus = V.torus
    radius = support_radius(spec, 0.0)
    if not math.isfinite(radius):
        if eps_tail == 0.0:
            raise ConfigError(
                "truncated build needs eps_tail > 0 for a kernel with unbounded support"
            )
        radius = support_radius(spec, eps_tail)
    n_v, n_u, d = V.positions.shape[0], U.positions.shape[0], torus.d
    if radius <= 0.0:
        # zero-support kernel: nothing can ever connect
        return [np.empty(0, dtype=np.int64) for _ in range(n_v)], radius

    n_cells = max(1, int(torus.side / radius))
    cell_size = torus.side / n_cells
    shape = (n_cells,) * d

    def flat_cells(points):
        idx = np.clip((points / cell_size).astype(np.int64), 0, n_cells - 1)
        return np.ravel_multi_index(tuple(idx.T), shape) if points.size else np.empty(0, np.int64)

    u_flat = flat_cells(U.positions)
    u_order = np.argsort(u_flat, kind="stable")
    u_flat_sorted = u_flat[u_order]
    v_flat = flat_cells(V.positions)

    offsets = np.array(list(itertools.product((-1, 0, 1), repeat=d)), dtype=np.int64)

    cand_idx = [None] * n_v
    cand_prob = [None] * n_v
    for cell in np.unique(v_flat) if n_v else []:
        in_cell = np.nonzero(v_flat == cell)[0]
        multi = np.array(np.unravel_index(cell, shape), dtype=np.int64)
        neigh = np.unique(
            np.ravel_multi_index(tuple(((multi + offsets) % n_cells).T), shape)
        )
        lo = np.searchsorted(u_flat_sorted, neigh, side="left")
        hi = np.searchsorted(u_flat_sorted, neigh, side="right")
        pieces = [u_order[a:b] for a, b in zip(lo, hi) if b > a]
        if not pieces:
            for i in in_cell:
                cand_idx[i] = np.empty(0, dtype=np.int64)
                cand_prob[i] = np.empty(0)
            continue
        cand = np.sort(np.concatenate(pieces))
        dist = _min_image_distance_matrix(V.positions[in_cell], U.positions[cand], torus.side)
        within = dist <= radius
        probs = _eval_kernel_array(spec, dist)
        for row, i in enumerate(in_cell):
            sel = within[row]
            cand_idx[i] = cand[sel]
            cand_prob[i] = probs[row][sel]

    counts = np.array([c.size for c in cand_idx], dtype=np.int64) if n_v else np.empty(0, np.int64)
    uniforms = rng.random(int(counts.sum()))
    memberships, pos = [], 0
    for i in range(n_v):
        u = uniforms[pos : pos + counts[i]]
        pos += counts[i]
        memberships.append(cand_idx[i][u < cand_prob[i]])
    return memberships, radius


# ---------------------------------------------------------------------------
# projections


@dataclass
class IntersectionGraph:
    """One-mode projection: nodes on one side, edges from shared memberships."""

    side: str  # "V" or "U"
    node_count: int
    edges: np.ndarray  # (m, 2) with edges[:, 0] < edges[:, 1], lexicographically sorted
    shared_counts: np.ndarray  # (m,) common-membership multiplicity, >= 1
    indptr: np.ndarray = None
    indices: np.ndarray = None

    def __post_init__(self):
        if self.indptr is None:
            self.indptr, self.indices = _adjacency_csr(self.node_count, self.edges)

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    def neighbors(self, node: int) -> np.ndarray:
        return self.indices[self.indptr[node] : self.indptr[node + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)


def _adjacency_csr(n: int, edges: np.ndarray):
    if edges.size == 0:
        return np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int64)
    src = np.concatenate([edges[:, 0], edges[:, 1]])
    dst = np.concatenate([edges[:, 1], edges[:, 0]])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    return np.cumsum(indptr), dst


def _pair_keys_from_member_lists(member_lists, node_count: int) -> np.ndarray:
    """Expand every membership list into its node pairs, packed as int keys.

    Lists are grouped by size so the pair expansion is one vectorized
    indexing op per distinct size instead of per list.
    """
    sizes = np.array([len(m) for m in member_lists], dtype=np.int64)
    order = np.argsort(sizes, kind="stable")
    sorted_sizes = sizes[order]
    keys = []
    i = int(np.searchsorted(sorted_sizes, 2))
    while i < order.size:
        s = int(sorted_sizes[i])
        j = int(np.searchsorted(sorted_sizes, s, side="right"))
        stacked = np.stack([member_lists[k] for k in order[i:j]])
        a, b = np.triu_indices(s, 1)
        left, right = stacked[:, a], stacked[:, b]  # lists sorted, so left < right
        keys.append((left * node_count + right).ravel())
        i = j
    if not keys:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(keys)


def _project(member_lists, node_count: int, side: str) -> IntersectionGraph:
    if node_count * node_count >= np.iinfo(np.int64).max:
        raise ValueError("node count too large for packed pair keys")
    keys = _pair_keys_from_member_lists(member_lists, node_count)
    uniq, counts = np.unique(keys, return_counts=True)
    edges = np.stack([uniq // node_count, uniq % node_count], axis=1) if uniq.size else np.empty((0, 2), dtype=np.int64)
    return IntersectionGraph(
        side=side,
        node_count=node_count,
        edges=edges.astype(np.int64),
        shared_counts=counts.astype(np.int64),
    )


def project_onto_vertices(bi: BipartiteGraph) -> IntersectionGraph:
    """Link vertices sharing at least one group; counts the shared groups."""
    return _project(bi.group_members(), bi.vertex_count, side="V")


def project_onto_groups(bi: BipartiteGraph) -> IntersectionGraph:
    """Link groups sharing at least one vertex; counts the shared vertices."""
    return _project(bi.memberships, bi.group_count, side="U")


def shared_count_lookup(graph: IntersectionGraph, a: int, b: int) -> int:
    """Shared-membership multiplicity of the pair (a, b); 0 if not an edge."""
    if a == b:
        raise ValueError("no self-loops in a projection")
    lo, hi = (a, b) if a < b else (b, a)
    key = lo * graph.node_count + hi
    packed = graph.edges[:, 0] * graph.node_count + graph.edges[:, 1]
    pos = np.searchsorted(packed, key)
    if pos < packed.size and packed[pos] == key:
        return int(graph.shared_counts[pos])
    return 0


# ---------------------------------------------------------------------------
# components and degrees


@dataclass(frozen=True)
class ComponentPartition:
    node_count: int
    component_id: np.ndarray  # dense ids ordered by smallest contained node
    sizes: np.ndarray

    @property
    def n_components(self) -> int:
        return int(self.sizes.size)

    @property
    def largest_size(self) -> int:
        return int(self.sizes.max()) if self.sizes.size else 0


def _canonical_partition(labels: np.ndarray) -> ComponentPartition:
    n = labels.size
    if n == 0:
        return ComponentPartition(0, labels.astype(np.int64), np.empty(0, dtype=np.int64))
    n_comp = int(labels.max()) + 1
    first = np.full(n_comp, n, dtype=np.int64)
    np.minimum.at(first, labels, np.arange(n, dtype=np.int64))
    rank = np.empty(n_comp, dtype=np.int64)
    rank[np.argsort(first)] = np.arange(n_comp, dtype=np.int64)
    ids = rank[labels]
    return ComponentPartition(n, ids, np.bincount(ids).astype(np.int64))


def components(graph: IntersectionGraph) -> ComponentPartition:
    """Connected components with ids ordered by smallest contained node."""
    n = graph.node_count
    if n == 0:
        return ComponentPartition(0, np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))
    if graph.edge_count == 0:
        ids = np.arange(n, dtype=np.int64)
        return ComponentPartition(n, ids, np.ones(n, dtype=np.int64))
    mat = sparse.csr_matrix(
        (np.ones(graph.indices.size, dtype=np.int8), graph.indices, graph.indptr),
        shape=(n, n),
    )
    _, labels = csgraph.connected_components(mat, directed=False)
    return _canonical_partition(labels.astype(np.int64))


def bipartite_components(bi: BipartiteGraph) -> ComponentPartition:
    """Components of the bipartite graph; groups follow the vertices in the
    node numbering (group u sits at index vertex_count + u)."""
    n = bi.vertex_count + bi.group_count
    counts = bi.membership_counts()
    if n == 0:
        return ComponentPartition(0, np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))
    if counts.sum() == 0:
        ids = np.arange(n, dtype=np.int64)
        return ComponentPartition(n, ids, np.ones(n, dtype=np.int64))
    src = np.repeat(np.arange(bi.vertex_count, dtype=np.int64), counts)
    dst = bi.vertex_count + np.concatenate(bi.memberships)
    ones = np.ones(src.size, dtype=np.int8)
    mat = sparse.coo_matrix((ones, (src, dst)), shape=(n, n))
    _, labels = csgraph.connected_components(mat, directed=False)
    return _canonical_partition(labels.astype(np.int64))


def restrict_partition(partition: ComponentPartition, node_indices: np.ndarray) -> ComponentPartition:
    """Partition induced on a subset of nodes, in canonical id order."""
    sub = partition.component_id[np.asarray(node_indices, dtype=np.int64)]
    # re-densify ids before canonicalizing
    _, dense = np.unique(sub, return_inverse=True)
    return _canonical_partition(dense.astype(np.int64))


def largest_component_fraction(graph: IntersectionGraph) -> float:
    """Size of the largest component as a fraction of all nodes."""
    if graph.node_count == 0:
        raise ValueError("fraction undefined on an empty graph")
    return components(graph).largest_size / graph.node_count


@dataclass(frozen=True)
class DegreeHistogram:
    counts: np.ndarray  # index = degree
    mean: float
    node_count: int

    def to_rows(self):
        return [(int(d), int(c)) for d, c in enumerate(self.counts)]


def degree_histogram(graph: IntersectionGraph) -> DegreeHistogram:
    """Exact degree counts; mean equals 2 * edges / nodes."""
    degrees = graph.degrees()
    counts = np.bincount(degrees, minlength=1) if graph.node_count else np.zeros(1, np.int64)
    mean = 2.0 * graph.edge_count / graph.node_count if graph.node_count else 0.0
    return DegreeHistogram(counts=counts.astype(np.int64), mean=mean, node_count=graph.node_count)


def edges_to_csv(graph: IntersectionGraph, path) -> None:
    """Edge list CSV: endpoint indices and shared-membership count."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["a", "b", "shared_count"])
        for (a, b), c in zip(graph.edges, graph.shared_counts):
            writer.writerow([int(a), int(b), int(c)])
