"""
Tests for the growable Fenwick tree.
"""
import numpy as np
import pytest

from app.errors import UsageError
from app.utils.fenwick import FenwickTree


def test_prefix_sums_survive_growth():
    """Cumulative sums match numpy after appends past the initial capacity."""
    rng = np.random.default_rng(0)
    tree = FenwickTree(capacity=2)
    weights = rng.random(37)
    for w in weights:
        tree.append(float(w))
    tree.increment(5, 2.5)
    weights[4] += 2.5
    expected = np.concatenate([[0.0], np.cumsum(weights)])
    got = [tree.get_cumulative_frequency(i) for i in range(len(tree) + 1)]
    assert np.allclose(got, expected)
    assert tree.total == pytest.approx(weights.sum())
    assert np.allclose(tree.values(), weights)
    assert tree.get_frequency(5) == pytest.approx(weights[4])


def test_find_skips_zero_weights():
    """find returns the smallest index whose prefix sum exceeds u."""
    tree = FenwickTree(weights=[1.0, 0.0, 2.0])
    assert tree.find(0.0) == 1
    assert tree.find(0.5) == 1
    assert tree.find(1.0) == 3
    assert tree.find(2.999) == 3
    assert tree.find(10.0) == 3


def test_sample_is_weight_proportional():
    """Empirical frequencies follow the weights."""
    rng = np.random.default_rng(1)
    tree = FenwickTree(weights=[1.0, 3.0, 6.0])
    draws = np.array([tree.sample(rng) for _ in range(20000)])
    freq = np.bincount(draws, minlength=4)[1:] / draws.size
    assert np.allclose(freq, [0.1, 0.3, 0.6], atol=0.02)


def test_append_returns_index():
    """Indexes are 1-based and consecutive."""
    tree = FenwickTree(capacity=1)
    assert tree.append(1.0) == 1
    assert tree.append(2.0) == 2
    assert len(tree) == 2


def test_usage_errors():
    """Negative weights, bad indexes and empty searches are rejected."""
    tree = FenwickTree()
    with pytest.raises(UsageError):
        tree.find(0.0)
    with pytest.raises(UsageError):
        tree.append(-1.0)
    tree.append(1.0)
    with pytest.raises(UsageError):
        tree.increment(2, 1.0)
    with pytest.raises(UsageError):
        tree.get_frequency(0)
    with pytest.raises(UsageError):
        FenwickTree(capacity=0)
