"""
Preferential attachment trees, midpoint-cut percolation and the cluster
branching processes built on them.

Node i carries weight b(d(i) - 1) + 1 where d(i) is its degree; the root
starts with a half-edge, so every node enters with degree 1 and weight 1.
Node k+1 attaches to an existing node with probability proportional to its
weight. In continuous time the tree with k nodes waits an Exp(b(k-1) + k)
holding time before the next arrival.

Percolation cuts the edge from node i >= 2 to its parent with probability
1-p. A cut edge becomes two half-edges, so degrees (and weights) are
unchanged. Clusters are numbered by the label of their root node, which is
also the order of their birth times.
"""
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import ParameterError, SimulationError, UsageError
from .fenwick import FenwickTree
from .replicas import chunk_size, iter_chunks
from .theory import Model, birth_time_bounds, kappa, validate_bp

logger = logging.getLogger(__name__)


@dataclass
class PATree:
    """
    Preferential attachment tree with 1-based node labels (index 0 unused).

    Attributes:
        parent: parent[i] for i >= 2; parent[1] = 0.
        degree: Degree including the root's half-edge.
        weight: b(degree - 1) + 1.
        b: Reinforcement parameter.
        event_times: tau_1..tau_n for continuous builds.
    """

    parent: np.ndarray
    degree: np.ndarray
    weight: np.ndarray
    b: float
    event_times: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return len(self.parent) - 1

    def check_invariants(self) -> None:
        """
        Raises:
            SimulationError: If a structural identity fails.
        """
        n, b = self.n, self.b
        deg = self.degree[1:]
        if not np.array_equal(self.weight[1:], b * (deg - 1) + 1):
            raise SimulationError("weight/degree identity violated")
        if int(deg.sum()) != 2 * (n - 1) + 1:
            raise SimulationError("degree sum differs from 2(n-1)+1")
        expected = b * (n - 1) + n
        if abs(float(self.weight[1:].sum()) - expected) > 1e-9 * max(expected, 1.0):
            raise SimulationError("weight sum differs from b(n-1)+n")
        if self.event_times is not None and np.any(np.diff(self.event_times[1:]) <= 0):
            raise SimulationError("event times are not strictly increasing")


@dataclass
class PATForest:
    """
    A percolated tree.

    Attributes:
        tree: The underlying tree.
        p: Retention probability of an edge.
        cut: cut[i] flags the edge from node i to its parent (False for i < 2).
        cluster_id: 0-based cluster index of every node (index 0 is -1).
        sizes: Cluster sizes, ordered by root label.
        half_edges: Half-edge count H of every cluster.
        roots: Root label of every cluster.
        birth_times: Birth time of every cluster for continuous builds.
    """

    tree: PATree
    p: float
    cut: np.ndarray
    cluster_id: np.ndarray
    sizes: np.ndarray
    half_edges: np.ndarray
    roots: np.ndarray
    birth_times: Optional[np.ndarray] = None

    @property
    def n_clusters(self) -> int:
        return len(self.sizes)

    def y_values(self) -> np.ndarray:
        """Cluster weights Y_i = b(|c_i| - 2 + H_i) + |c_i|."""
        b = self.tree.b
        return b * (self.sizes - 2 + self.half_edges) + self.sizes

    def root_cluster_weights(self) -> np.ndarray:
        """|C_{i,n}| indexed by node label i = 1..n (0 where i is not a cluster root)."""
        out = np.zeros(self.tree.n, dtype=np.int64)
        out[self.roots - 1] = self.sizes
        return out

    def check_invariants(self) -> None:
        n = self.tree.n
        if int(self.sizes.sum()) != n:
            raise SimulationError("cluster sizes do not sum to n")
        if self.n_clusters != 1 + int(self.cut.sum()):
            raise SimulationError("cluster count differs from 1 + cuts")
        if np.any(self.half_edges < 1):
            raise SimulationError("live cluster with no half-edge")
        if np.any(np.diff(self.roots) <= 0):
            raise SimulationError("clusters are not ordered by root label")
        if self.birth_times is not None and np.any(np.diff(self.birth_times) <= 0):
            raise SimulationError("root-label order and birth order disagree")

    def rows(self) -> List[Tuple[int, int, int, int]]:
        """(node, parent, cut, cluster) rows with 1-based cluster numbers."""
        return [
            (i, int(self.tree.parent[i]), int(self.cut[i]), int(self.cluster_id[i]) + 1)
            for i in range(1, self.tree.n + 1)
        ]


def _grow(n: int, b: float, rng: np.random.Generator, continuous: bool) -> PATree:
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if b < 0:
        raise ParameterError(f"b must be >= 0, got {b}")
    parent = np.zeros(n + 1, dtype=np.int64)
    degree = np.zeros(n + 1, dtype=np.int64)
    degree[1] = 1
    weights = FenwickTree(capacity=n)
    weights.append(1.0)
    times = np.zeros(n + 1) if continuous else None
    clock = 0.0
    for k in range(1, n):
        if continuous:
            clock += rng.exponential(1.0 / (b * (k - 1) + k))
            times[k + 1] = clock
        i = weights.sample(rng)
        parent[k + 1] = i
        degree[i] += 1
        degree[k + 1] = 1
        weights.increment(i, b)
        weights.append(1.0)
    weight = b * (degree - 1) + 1.0
    weight[0] = 0.0
    tree = PATree(parent=parent, degree=degree, weight=weight, b=b, event_times=times)
    tree.check_invariants()
    return tree


def grow_discrete(n: int, b: float, rng: np.random.Generator) -> PATree:
    """Grow a tree of n nodes by weight-proportional attachment."""
    return _grow(n, b, rng, continuous=False)


def grow_continuous(n: int, b: float, rng: np.random.Generator) -> PATree:
    """
    Grow a tree of n nodes in continuous time.

    The holding time with k nodes is Exp(b(k-1) + k) (superposition of the
    node clocks); the arrival attaches weight-proportionally.
    """
    return _grow(n, b, rng, continuous=True)


def percolate(
    tree: PATree,
    p: float,
    rng: np.random.Generator,
    cut: Optional[Sequence[bool]] = None,
) -> PATForest:
    """
    Cut each edge independently with probability 1-p and label the clusters.

    Args:
        tree: A grown tree.
        p: Retention probability.
        rng: Random generator (one uniform per edge).
        cut: Forced cut flags for edges 2..n, bypassing the random marks.

    Returns:
        The forest with per-cluster size, half-edge count, root and birth time.
    """
    if not 0.0 < p <= 1.0:
        raise ParameterError(f"p must lie in (0, 1], got {p}")
    n = tree.n
    flags = np.zeros(n + 1, dtype=bool)
    if cut is None:
        u = rng.random(n + 1)
        flags[2:] = u[2:] > p
    else:
        forced = np.asarray(cut, dtype=bool)
        if forced.shape != (max(n - 1, 0),):
            raise UsageError(f"expected {n - 1} forced cut flags, got {forced.shape}")
        flags[2:] = forced
    cluster_id = np.full(n + 1, -1, dtype=np.int64)
    cluster_id[1] = 0
    roots = [1]
    parent = tree.parent
    for i in range(2, n + 1):
        if flags[i]:
            cluster_id[i] = len(roots)
            roots.append(i)
        else:
            cluster_id[i] = cluster_id[parent[i]]
    count = len(roots)
    sizes = np.bincount(cluster_id[1:], minlength=count)
    cut_nodes = np.flatnonzero(flags)
    half_edges = 1 + np.bincount(cluster_id[parent[cut_nodes]], minlength=count)
    root_arr = np.asarray(roots, dtype=np.int64)
    birth = tree.event_times[root_arr] if tree.event_times is not None else None
    forest = PATForest(
        tree=tree,
        p=p,
        cut=flags,
        cluster_id=cluster_id,
        sizes=sizes,
        half_edges=half_edges,
        roots=root_arr,
        birth_times=birth,
    )
    forest.check_invariants()
    return forest


def cluster_y_value(forest: PATForest, i: int) -> float:
    """
    Weight Y_i of the i-th cluster (1-based, root-label order) at tau_n.

    Returns 0 for a cluster that does not exist.
    """
    if i < 1 or i > forest.n_clusters:
        return 0.0
    size = int(forest.sizes[i - 1])
    h = int(forest.half_edges[i - 1])
    if h < 1:
        raise SimulationError(f"cluster {i} has no half-edge")
    return forest.tree.b * (size - 2 + h) + size


@dataclass
class RootClusterSample:
    """Root cluster observables at tau_n for a batch of replicas."""

    size: np.ndarray
    half_edges: np.ndarray
    y: np.ndarray


def sample_root_cluster(
    n: int, b: float, p: float, rng: np.random.Generator, size: int = 1
) -> RootClusterSample:
    """
    Root cluster along the discrete growth, as an exact reduced chain.

    With k nodes the total weight is (b+1)k - b; the newcomer lands in the
    root cluster with probability Y_1 / total, then either joins it
    (probability p: size+1, Y_1 + b + 1) or is cut off (H_1 + 1, Y_1 + b).
    """
    validate_bp(b, p)
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    sz = np.ones(size, dtype=np.int64)
    h = np.ones(size, dtype=np.int64)
    y = np.ones(size)
    for k in range(1, n):
        total = (b + 1.0) * k - b
        hit = rng.random(size) * total < y
        intact = rng.random(size) < p
        sz += hit & intact
        h += hit & ~intact
        y += np.where(hit, b + intact, 0.0)
    return RootClusterSample(size=sz, half_edges=h, y=y)


def sample_root_cluster_scaled(
    n: int, b: float, p: float, rng: np.random.Generator, size: Optional[int] = None
) -> Union[float, np.ndarray]:
    """|c_{1,n}| / n^kappa, one value or `size` values."""
    sample = sample_root_cluster(n, b, p, rng, size=1 if size is None else size)
    scaled = sample.size / n ** kappa(Model.SRS, b, p)
    if size is None:
        return float(scaled[0])
    return scaled


@dataclass
class ClusterProcessSample:
    """Cluster size, half-edges and weight Y read at fixed times, per replica."""

    times: np.ndarray
    size: np.ndarray
    half_edges: np.ndarray
    y: np.ndarray


def simulate_cluster_process(
    read_times: Sequence[float],
    b: float,
    p: float,
    rng: np.random.Generator,
    replicas: int = 1,
) -> ClusterProcessSample:
    """
    Simulate independent copies of a freshly born cluster and read them off.

    The cluster weight Y is a pure-birth process: it jumps at rate Y, by b+1
    with probability p (a node joins) or by b (a half-edge appears). Read
    times before 0 give an empty cluster.

    Args:
        read_times: Non-decreasing times.
        b, p: Model parameters.
        rng: Random generator.
        replicas: Number of independent clusters.

    Returns:
        Arrays of shape (replicas, len(read_times)).
    """
    validate_bp(b, p)
    times = np.asarray(read_times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise UsageError("read_times must be a non-empty 1-d sequence")
    if np.any(np.diff(times) < 0) or not np.all(np.isfinite(times)):
        raise UsageError("read_times must be finite and sorted ascending")
    m = times.size
    out_size = np.zeros((replicas, m), dtype=np.int64)
    out_h = np.zeros((replicas, m), dtype=np.int64)
    out_y = np.zeros((replicas, m))
    size = np.ones(replicas, dtype=np.int64)
    h = np.ones(replicas, dtype=np.int64)
    y = np.ones(replicas)
    clock = np.zeros(replicas)
    idx = np.full(replicas, int(np.searchsorted(times, 0.0, side="left")))
    live = np.flatnonzero(idx < m)
    while live.size:
        upcoming = clock[live] + rng.exponential(size=live.size) / y[live]
        pending, pending_next = live, upcoming
        while pending.size:
            j = idx[pending]
            before = times[j] < pending_next
            if not before.any():
                break
            rows, cols = pending[before], j[before]
            out_size[rows, cols] = size[rows]
            out_h[rows, cols] = h[rows]
            out_y[rows, cols] = y[rows]
            idx[rows] += 1
            more = idx[rows] < m
            pending, pending_next = rows[more], pending_next[before][more]
        still = idx[live] < m
        jumping = live[still]
        clock[jumping] = upcoming[still]
        intact = rng.random(jumping.size) < p
        size[jumping] += intact
        h[jumping] += ~intact
        y[jumping] += b + intact
        live = jumping
    return ClusterProcessSample(times=times, size=out_size, half_edges=out_h, y=out_y)


def f_times(x, b: float, p: float) -> np.ndarray:
    """Time argument (ln(1-p) - ln x)/(b+1) of the random function f."""
    return (np.log(1.0 - p) - np.log(np.asarray(x, dtype=float))) / (b + 1.0)


def sample_f_paths(x, b: float, p: float, rng: np.random.Generator, paths: int) -> np.ndarray:
    """
    Independent copies of f(x) = |T_1((ln(1-p) - ln x)/(b+1))| at arbitrary points.

    Each path is one cluster trajectory read at every requested point;
    f vanishes for x >= 1-p.

    Returns:
        Array of shape (paths, len(x)).
    """
    xs = np.asarray(x, dtype=float).ravel()
    if xs.size == 0:
        raise UsageError("f needs at least one evaluation point")
    if np.any(xs <= 0):
        raise UsageError("f is evaluated at strictly positive points only")
    s = f_times(xs, b, p)
    order = np.argsort(s, kind="stable")
    sample = simulate_cluster_process(s[order], b, p, rng, replicas=paths)
    f = np.empty((paths, xs.size), dtype=np.int64)
    f[:, order] = sample.size
    f[:, xs >= 1.0 - p] = 0
    return f


def sample_f_path(x_grid, b: float, p: float, rng: np.random.Generator) -> np.ndarray:
    """
    One path of f on an ascending grid of positive points.

    Raises:
        UsageError: On an empty, non-positive or unsorted grid.
    """
    xs = np.asarray(x_grid, dtype=float)
    if xs.size == 0:
        raise UsageError("x_grid must not be empty")
    if np.any(np.diff(xs) < 0):
        raise UsageError("x_grid must be sorted ascending")
    return sample_f_paths(xs, b, p, rng, paths=1)[0]


def sample_Xbar_Xunder(
    i: int,
    n: int,
    eps: float,
    b: float,
    p: float,
    rng: np.random.Generator,
    size: Optional[int] = None,
) -> Tuple[Union[int, np.ndarray], Union[int, np.ndarray]]:
    """
    Coupled draw of (X_under, X_bar): one fresh cluster read at t- and t+.

    A negative read time gives 0.

    Raises:
        ParameterError: If i < 2 (t+ is infinite for the root).
    """
    if i < 2:
        raise ParameterError(f"X_bar needs i >= 2, got {i}")
    t_minus, t_plus = birth_time_bounds(n, i, b, p, eps)
    sample = simulate_cluster_process([t_minus, t_plus], b, p, rng, 1 if size is None else size)
    lo, hi = sample.size[:, 0], sample.size[:, 1]
    if size is None:
        return int(lo[0]), int(hi[0])
    return lo, hi


def sample_w(b: float, n: int, rng: np.random.Generator, size: int) -> np.ndarray:
    """
    Approximate W = lim e^{-(b+1)t} Y(t) by e^{-(b+1) tau_n}(b(n-1)+n).

    tau_n is a sum of independent Exp((b+1)k - b) holding times.
    """
    if b < 0:
        raise ParameterError(f"b must be >= 0, got {b}")
    if n < 2:
        raise ParameterError(f"n must be >= 2, got {n}")
    rates = (b + 1.0) * np.arange(1, n) - b
    out = np.empty(size)
    step = chunk_size(8 * (n - 1), size)
    for start, stop in iter_chunks(size, step):
        tau = (rng.exponential(size=(stop - start, n - 1)) / rates).sum(axis=1)
        out[start:stop] = np.exp(-(b + 1.0) * tau) * (b * (n - 1) + n)
    return out


NodeCallback = Callable[[int, np.ndarray, np.ndarray], None]


def grow_percolated_batch(
    n: int,
    b: float,
    p: float,
    replicas: int,
    rng: np.random.Generator,
    on_node: Optional[NodeCallback] = None,
) -> np.ndarray:
    """
    Grow and percolate `replicas` trees side by side.

    Attachment uses the degree decomposition of the total weight
    k + b(k-1): with probability k/(k + b(k-1)) a uniform node is chosen,
    otherwise the parent end of a uniform existing edge.

    Args:
        n: Nodes per tree.
        b, p: Model parameters.
        replicas: Trees in the batch (all held in memory).
        rng: Random generator.
        on_node: Called as on_node(k, label, born) after node k (0-based)
            is placed; `label` is its cluster's root index, `born` flags a
            newly born cluster.

    Returns:
        Cluster root index (0-based) of every node, shape (replicas, n).
    """
    validate_bp(b, p)
    if n < 1 or replicas < 1:
        raise ParameterError(f"n and replicas must be >= 1, got n={n}, replicas={replicas}")
    parent = np.full((replicas, n), -1, dtype=np.int32)
    label = np.zeros((replicas, n), dtype=np.int32)
    rows = np.arange(replicas)
    if on_node is not None:
        on_node(0, label[:, 0], np.ones(replicas, dtype=bool))
    for k in range(1, n):
        u = rng.random(replicas) * (k + b * (k - 1))
        target = np.minimum(u.astype(np.int64), k - 1)
        if b > 0 and k > 1:
            via_edge = u >= k
            if via_edge.any():
                child = np.minimum(((u[via_edge] - k) / b).astype(np.int64), k - 2) + 1
                target[via_edge] = parent[rows[via_edge], child]
        parent[:, k] = target
        intact = rng.random(replicas) < p
        lab = np.where(intact, label[rows, target], k).astype(np.int32)
        label[:, k] = lab
        if on_node is not None:
            on_node(k, lab, ~intact)
    return label


def sample_cluster_sizes_batch(
    n: int, b: float, p: float, replicas: int, rng: np.random.Generator
) -> np.ndarray:
    """
    |C_{i,n}| indexed by root label for independent percolated trees.

    Returns:
        Integer array (replicas, n); entry i-1 is the size of the cluster
        rooted at node i, or 0 if node i is not a cluster root.
    """
    out = np.zeros((replicas, n), dtype=np.int64)
    step = chunk_size(16 * n, replicas)
    for start, stop in iter_chunks(replicas, step):
        count = stop - start
        labels = grow_percolated_batch(n, b, p, count, rng)
        flat = labels.astype(np.int64) + (np.arange(count) * n)[:, None]
        out[start:stop] = np.bincount(flat.ravel(), minlength=count * n).reshape(count, n)
    return out
