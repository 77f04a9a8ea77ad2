"""
Fenwick (binary indexed) tree over a growable array of non-negative weights.

Indexes are 1-based. `find` supports weight-proportional selection in
O(log n): draw u uniformly on [0, total) and take `find(u)`.
"""
from typing import Iterable, List, Optional

from ..errors import UsageError


class FenwickTree:
    """
    Cumulative weight table that supports appending new entries.

    Each index from 1 to `len(tree)` holds a weight; the capacity doubles when
    an append would overflow it.
    """

    def __init__(self, capacity: int = 16, weights: Optional[Iterable[float]] = None):
        if capacity < 1:
            raise UsageError(f"capacity must be positive, got {capacity}")
        self._capacity = capacity
        self._tree: List[float] = [0.0] * (capacity + 1)
        self._values: List[float] = [0.0] * (capacity + 1)
        self._size = 0
        self._total = 0.0
        self._log_capacity = self._highest_power(capacity)
        for w in weights or ():
            self.append(w)

    @staticmethod
    def _highest_power(n: int) -> int:
        u = 1
        while u * 2 <= n:
            u *= 2
        return u

    def __len__(self) -> int:
        return self._size

    @property
    def total(self) -> float:
        """Running total of all weights."""
        return self._total

    def _grow(self) -> None:
        values = self._values[1 : self._size + 1]
        self._capacity *= 2
        self._tree = [0.0] * (self._capacity + 1)
        self._values = [0.0] * (self._capacity + 1)
        self._log_capacity = self._highest_power(self._capacity)
        size = self._size
        self._size = 0
        self._total = 0.0
        for w in values:
            self.append(w)
        assert self._size == size

    def append(self, weight: float) -> int:
        """
        Append a weight at index `len(self) + 1`.

        Returns:
            The index of the new entry.
        """
        if weight < 0:
            raise UsageError(f"weights must be non-negative, got {weight}")
        if self._size == self._capacity:
            self._grow()
        self._size += 1
        self._values[self._size] = 0.0
        self.increment(self._size, weight)
        return self._size

    def increment(self, index: int, value: float) -> None:
        """Add `value` to the weight stored at `index`."""
        if not 0 < index <= self._size:
            raise UsageError(f"index {index} outside 1..{self._size}")
        self._values[index] += value
        self._total += value
        j = index
        tree = self._tree
        while j <= self._capacity:
            tree[j] += value
            j += j & -j

    def get_frequency(self, index: int) -> float:
        if not 0 < index <= self._size:
            raise UsageError(f"index {index} outside 1..{self._size}")
        return self._values[index]

    def get_cumulative_frequency(self, index: int) -> float:
        """Sum of the weights at indexes 1..index."""
        if not 0 <= index <= self._size:
            raise UsageError(f"index {index} outside 0..{self._size}")
        s = 0.0
        j = index
        while j > 0:
            s += self._tree[j]
            j -= j & -j
        return s

    def values(self) -> List[float]:
        """Copy of the stored weights in index order."""
        return self._values[1 : self._size + 1]

    def find(self, u: float) -> int:
        """
        Smallest index whose cumulative weight exceeds `u`.

        Args:
            u: A value in [0, total).

        Returns:
            An index in 1..len(self); float round-off at the top end is
            clamped to the last index.
        """
        if self._size == 0:
            raise UsageError("cannot search an empty tree")
        j = 0
        s = u
        half = self._log_capacity
        tree = self._tree
        while half > 0:
            k = j + half
            if k <= self._capacity and s >= tree[k]:
                j = k
                s -= tree[k]
            half >>= 1
        return min(j + 1, self._size)

    def sample(self, rng) -> int:
        """Draw an index with probability proportional to its weight."""
        return self.find(rng.random() * self._total)
