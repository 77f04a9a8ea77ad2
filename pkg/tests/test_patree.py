"""
Tests for preferential attachment trees, percolation and cluster processes.
"""
import numpy as np
import pytest

from app.errors import ParameterError, UsageError
from app.utils.patree import (
    cluster_y_value,
    f_times,
    grow_continuous,
    grow_discrete,
    grow_percolated_batch,
    percolate,
    sample_cluster_sizes_batch,
    sample_f_paths,
    sample_root_cluster,
    sample_w,
    sample_Xbar_Xunder,
    simulate_cluster_process,
)
from app.utils.stats import ks_two_sample
from app.utils.theory import Model, cluster_count_mean, half_edge_ratio, kappa


@pytest.mark.parametrize("b", [0.0, 0.5, 2.0])
def test_grown_trees_satisfy_invariants(b):
    """Parents precede children and degree and weight sums hold."""
    tree = grow_discrete(200, b, np.random.default_rng(0))
    tree.check_invariants()
    assert tree.parent[1] == 0
    assert np.all(tree.parent[2:] < np.arange(2, 201))
    assert tree.weight[1:].sum() == pytest.approx(b * 199 + 200)


def test_continuous_tree_times_increase():
    """Event times start at zero and strictly increase."""
    tree = grow_continuous(100, 1.0, np.random.default_rng(1))
    assert tree.event_times[1] == 0.0
    assert np.all(np.diff(tree.event_times[1:]) > 0)


def test_single_node_tree():
    """A one-node tree percolates to a single cluster."""
    tree = grow_discrete(1, 1.0, np.random.default_rng(2))
    forest = percolate(tree, 0.5, np.random.default_rng(2))
    assert forest.n_clusters == 1
    assert list(forest.sizes) == [1]
    assert cluster_y_value(forest, 1) == pytest.approx(1.0)


def test_forced_cuts_on_a_path():
    """Forced cut flags on a known tree give the expected clusters."""
    rng = np.random.default_rng(3)
    tree = grow_discrete(5, 0.0, rng)
    forest = percolate(tree, 0.5, rng, cut=[False, True, False, True])
    assert forest.n_clusters == 3
    assert list(forest.roots) == [1, 3, 5]
    assert forest.sizes.sum() == 5
    assert forest.half_edges.sum() == 3 + 2
    rows = forest.rows()
    assert rows[0][:3] == (1, 0, 0)
    assert cluster_y_value(forest, 4) == 0.0
    with pytest.raises(UsageError):
        percolate(tree, 0.5, rng, cut=[True])


def test_full_retention_keeps_one_cluster():
    """p = 1 never cuts an edge."""
    tree = grow_discrete(50, 1.0, np.random.default_rng(4))
    forest = percolate(tree, 1.0, np.random.default_rng(4))
    assert forest.n_clusters == 1
    assert forest.y_values()[0] == pytest.approx(tree.weight[1:].sum())


def test_cluster_count_mean():
    """The number of clusters averages 1 + (n-1)(1-p)."""
    rng = np.random.default_rng(5)
    tree = grow_discrete(400, 1.0, rng)
    counts = [percolate(tree, 0.3, rng).n_clusters for _ in range(400)]
    se = np.std(counts, ddof=1) / np.sqrt(len(counts))
    assert abs(np.mean(counts) - cluster_count_mean(400, 0.3)) < 4 * se


def test_continuous_birth_times_follow_labels():
    """Cluster birth times increase with the root label."""
    tree = grow_continuous(300, 1.0, np.random.default_rng(6))
    forest = percolate(tree, 0.5, np.random.default_rng(7))
    assert np.all(np.diff(forest.birth_times) > 0)


def test_reduced_chain_counts():
    """The root cluster chain keeps size, half-edges and weight consistent."""
    sample = sample_root_cluster(100, 1.0, 0.5, np.random.default_rng(8), size=50)
    assert np.all(sample.size >= 1)
    assert np.all(sample.half_edges >= 1)
    assert np.allclose(sample.y, 1.0 * (sample.size - 2 + sample.half_edges) + sample.size)


def test_cluster_process_read_times():
    """Negative read times give an empty cluster and reads are monotone."""
    times = [-1.0, 0.0, 0.5, 2.0]
    sample = simulate_cluster_process(times, 1.0, 0.5, np.random.default_rng(9), replicas=100)
    assert np.all(sample.size[:, 0] == 0)
    assert np.all(sample.size[:, 1] == 1)
    assert np.all(np.diff(sample.size[:, 1:], axis=1) >= 0)
    with pytest.raises(UsageError):
        simulate_cluster_process([1.0, 0.5], 1.0, 0.5, np.random.default_rng(9))


def test_cluster_process_mean_growth():
    """E[Y(t)] = exp((b + p) t)."""
    b, p, t = 1.0, 0.5, 1.0
    sample = simulate_cluster_process([t], b, p, np.random.default_rng(10), replicas=20000)
    y = sample.y[:, 0]
    se = y.std(ddof=1) / np.sqrt(y.size)
    assert abs(y.mean() - np.exp((b + p) * t)) < 4 * se


def test_f_vanishes_beyond_one_minus_p():
    """f(x) = 0 for x >= 1 - p and is non-increasing in x."""
    xs = np.array([0.01, 0.1, 0.3, 0.5, 0.7, 0.9])
    f = sample_f_paths(xs, 1.0, 0.4, np.random.default_rng(11), paths=200)
    assert f.shape == (200, 6)
    assert np.all(f[:, xs >= 0.6] == 0)
    assert np.all(np.diff(f, axis=1) <= 0)
    assert f_times(0.6, 1.0, 0.4) == pytest.approx(0.0)
    with pytest.raises(UsageError):
        sample_f_paths([0.0, 0.5], 1.0, 0.4, np.random.default_rng(11), paths=1)


def test_coupled_bounds_are_ordered():
    """X_under <= X_bar for a coupled read."""
    lo, hi = sample_Xbar_Xunder(3, 1000, 0.1, 1.0, 0.5, np.random.default_rng(12), size=200)
    assert np.all(lo <= hi)
    with pytest.raises(ParameterError):
        sample_Xbar_Xunder(1, 1000, 0.1, 1.0, 0.5, np.random.default_rng(12))


def test_w_has_unit_mean():
    """The tree martingale limit has mean one."""
    w = sample_w(1.0, 500, np.random.default_rng(13), size=4000)
    se = w.std(ddof=1) / np.sqrt(w.size)
    assert abs(w.mean() - 1.0) < 4 * se


def test_batch_growth_labels():
    """Batched labels point at earlier nodes and sizes sum to n."""
    labels = grow_percolated_batch(80, 1.0, 0.5, 20, np.random.default_rng(14))
    assert labels.shape == (20, 80)
    assert np.all(labels[:, 0] == 0)
    assert np.all(labels <= np.arange(80))
    sizes = sample_cluster_sizes_batch(80, 1.0, 0.5, 20, np.random.default_rng(15))
    assert np.all(sizes.sum(axis=1) == 80)
    assert np.all(sizes[:, 0] >= 1)


@pytest.mark.parametrize("b", [0.0, 1.0, 3.0])
def test_batch_growth_matches_tree_percolation(b):
    """The degree-decomposition sampler has the law of grow_discrete plus percolate."""
    n, p, reps = 60, 0.5, 3000
    labels = grow_percolated_batch(n, b, p, reps, np.random.default_rng(17))
    batch_root = (labels == 0).sum(axis=1)
    batch_count = np.array([np.unique(row).size for row in labels])
    rng = np.random.default_rng(18)
    tree_root = np.empty(reps)
    tree_count = np.empty(reps)
    for r in range(reps):
        forest = percolate(grow_discrete(n, b, rng), p, rng)
        tree_root[r] = forest.sizes[0]
        tree_count[r] = forest.n_clusters
    assert ks_two_sample(batch_root, tree_root).p_value > 1e-3
    assert ks_two_sample(batch_count, tree_count).p_value > 1e-3


@pytest.mark.parametrize("b, expected", [(0.0, 0.5), (10.0, 11.0 / 12.0)])
def test_third_node_attachment(b, expected):
    """Node 3 picks node 1 with probability (1 + b)/(2 + b)."""
    rng = np.random.default_rng(19)
    reps = 10_000
    share = np.mean([grow_discrete(3, b, rng).parent[3] == 1 for _ in range(reps)])
    se = np.sqrt(expected * (1.0 - expected) / reps)
    assert abs(share - expected) < 4 * se


def test_half_edges_track_root_weight():
    """(H_1 - ((1-p)/(b+p)) Y_1)/n^kappa shrinks in mean square as n grows."""
    b, p = 1.0, 0.5
    ratio = half_edge_ratio(b, p)
    k = kappa(Model.SRS, b, p)
    errors = []
    for n in (200, 5000):
        sample = sample_root_cluster(n, b, p, np.random.default_rng(20), size=4000)
        gap = (sample.half_edges - ratio * sample.y) / n**k
        errors.append(np.mean(gap**2))
    assert errors[1] < errors[0] / 3
    assert errors[1] < 0.05


def test_batch_callback_sees_every_node():
    """The node callback runs once per node with births flagged."""
    seen = []

    def on_node(k, label, born):
        seen.append((k, int(born.sum())))

    grow_percolated_batch(10, 0.5, 0.5, 4, np.random.default_rng(16), on_node=on_node)
    assert [k for k, _ in seen] == list(range(10))
    assert seen[0][1] == 4
