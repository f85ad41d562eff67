"""Linear orders, domains and the label-level operations on them.

Alternatives are the integers ``1..n``. An order is stored as the sequence of
alternatives from most to least preferred, so ``(2, 1, 3)`` ranks 2 first.
A :class:`Domain` packs its orders into an ``(m, n)`` ``uint8`` array whose
rows are unique and sorted lexicographically.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

MAX_N = 32

Order = tuple[int, ...]


class InvalidArgument(ValueError):
    """Raised for malformed orders, label sets or permutations."""


def _check_permutation(seq: Sequence[int], n: int | None = None) -> None:
    n = len(seq) if n is None else n
    if len(seq) != n or sorted(seq) != list(range(1, n + 1)):
        raise InvalidArgument(f"not a permutation of 1..{n}: {tuple(seq)}")


def reverse_order(order: Sequence[int]) -> Order:
    return tuple(reversed(order))


def _sorted_unique_rows(arr: np.ndarray) -> np.ndarray:
    if arr.shape[0] == 0:
        return arr
    # lexsort keys run last-to-first
    idx = np.lexsort(arr.T[::-1])
    arr = arr[idx]
    keep = np.ones(arr.shape[0], dtype=bool)
    keep[1:] = np.any(arr[1:] != arr[:-1], axis=1)
    return np.ascontiguousarray(arr[keep])


def all_orders(n: int) -> np.ndarray:
    """Every linear order on ``1..n`` as rows, in lexicographic order."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.uint8)
    return np.array(list(itertools.permutations(range(1, n + 1))), dtype=np.uint8)


class Domain:
    """An immutable set of linear orders on ``1..n``."""

    __slots__ = ("n", "orders", "__dict__")

    def __init__(self, n: int, orders, *, _trusted: bool = False):
        if not 0 <= n <= MAX_N:
            raise InvalidArgument(f"n must lie in 0..{MAX_N}, got {n}")
        arr = np.asarray(orders, dtype=np.int64 if not _trusted else np.uint8)
        if arr.size == 0:
            arr = np.zeros((0, n), dtype=np.uint8)
        if arr.ndim != 2 or arr.shape[1] != n:
            raise InvalidArgument(f"orders must be an (m, {n}) array")
        if not _trusted:
            if arr.size and (arr.min() < 1 or arr.max() > n):
                raise InvalidArgument("alternative outside 1..n")
            if arr.shape[0] and n:
                check = np.sort(arr, axis=1)
                if np.any(check != np.arange(1, n + 1)):
                    raise InvalidArgument("row is not a permutation of 1..n")
            arr = _sorted_unique_rows(arr.astype(np.uint8))
        arr.setflags(write=False)
        self.n = n
        self.orders = arr

    @classmethod
    def from_orders(cls, orders: Iterable[Sequence[int]], n: int | None = None) -> "Domain":
        rows = [tuple(int(x) for x in o) for o in orders]
        if n is None:
            if not rows:
                raise InvalidArgument("cannot infer n from an empty order list")
            n = len(rows[0])
        return cls(n, np.array(rows, dtype=np.int64).reshape(len(rows), n))

    @classmethod
    def from_strings(cls, words: Iterable[str]) -> "Domain":
        """Build from compact strings such as ``"123"`` (only for n <= 9)."""
        return cls.from_orders([tuple(int(c) for c in w) for w in words])

    @classmethod
    def full(cls, n: int) -> "Domain":
        return cls(n, all_orders(n), _trusted=True)

    @classmethod
    def _from_sorted(cls, n: int, arr: np.ndarray) -> "Domain":
        return cls(n, np.ascontiguousarray(arr, dtype=np.uint8), _trusted=True)

    def __len__(self) -> int:
        return self.orders.shape[0]

    def __iter__(self):
        for row in self.orders:
            yield tuple(int(x) for x in row)

    def __contains__(self, order) -> bool:
        order = np.asarray(order, dtype=np.uint8)
        if order.shape != (self.n,):
            return False
        return bool(np.any(np.all(self.orders == order, axis=1)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Domain):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.orders, other.orders)

    def __hash__(self) -> int:
        return hash((self.n, self.orders.tobytes()))

    def __repr__(self) -> str:
        return f"Domain(n={self.n}, size={len(self)})"

    def to_tuples(self) -> list[Order]:
        return list(self)

    def to_bytes(self) -> bytes:
        return self.orders.tobytes()

    @cached_property
    def positions(self) -> np.ndarray:
        """``positions[r, a]`` is the 0-based position of alternative ``a`` in row ``r``.

        Column 0 is unused so alternatives index directly.
        """
        m = len(self)
        pos = np.zeros((m, self.n + 1), dtype=np.int8)
        rows = np.repeat(np.arange(m), self.n)
        pos[rows, self.orders.ravel()] = np.tile(np.arange(self.n, dtype=np.int8), m)
        return pos

    @cached_property
    def codes(self) -> np.ndarray:
        """Integer key per order (mixed radix), increasing with lexicographic order."""
        base = np.int64(self.n + 1)
        out = np.zeros(len(self), dtype=np.int64)
        for k in range(self.n):
            out = out * base + self.orders[:, k]
        return out


def encode_orders(arr: np.ndarray, n: int) -> np.ndarray:
    base = np.int64(n + 1)
    out = np.zeros(arr.shape[0], dtype=np.int64)
    for k in range(arr.shape[1]):
        out = out * base + arr[:, k]
    return out


def _alternative_set(members: Iterable[int], n: int) -> list[int]:
    members = sorted(set(int(a) for a in members))
    if not members:
        raise InvalidArgument("empty alternative set")
    if members[0] < 1 or members[-1] > n:
        raise InvalidArgument(f"alternative set {members} not within 1..{n}")
    return members


def restrict(d: Domain, members: Iterable[int]) -> Domain:
    """Restrict every order to ``members`` and relabel them ``1..k`` preserving their order."""
    members = _alternative_set(members, d.n)
    k = len(members)
    if k == d.n:
        return d
    lookup = np.zeros(d.n + 1, dtype=np.uint8)
    lookup[members] = np.arange(1, k + 1, dtype=np.uint8)
    if len(d) == 0:
        return Domain(k, np.zeros((0, k), dtype=np.uint8), _trusted=True)
    relabelled = lookup[d.orders]
    sub = relabelled[relabelled > 0].reshape(len(d), k)
    return Domain._from_sorted(k, _sorted_unique_rows(sub))


def restriction_sizes(d: Domain, subsets: np.ndarray) -> np.ndarray:
    """Sizes of ``restrict(d, s)`` for each row ``s`` of ``subsets`` (1-based labels).

    Works on the position table: the restriction of an order to a subset is
    determined by the ranking of the subset's positions.
    """
    subsets = np.asarray(subsets, dtype=np.int64)
    k = subsets.shape[1]
    pos = d.positions.astype(np.int64)
    out = np.empty(subsets.shape[0], dtype=np.int64)
    # pattern key: for each order, argsort of positions within the subset
    base = np.int64(k)
    for s_idx, subset in enumerate(subsets):
        sub_pos = pos[:, subset]
        ranks = np.argsort(sub_pos, axis=1)
        key = np.zeros(len(d), dtype=np.int64)
        for c in range(k):
            key = key * base + ranks[:, c]
        out[s_idx] = np.unique(key).size
    return out


def relabel(d: Domain, pi: Sequence[int] | dict) -> Domain:
    """Replace alternative ``a`` by ``pi(a)`` in every order.

    ``pi`` is either a mapping or a sequence with ``pi[a - 1]`` the image of ``a``.
    """
    if isinstance(pi, dict):
        seq = [pi[a] for a in range(1, d.n + 1)]
    else:
        seq = list(pi)
    _check_permutation(seq, d.n)
    lookup = np.zeros(d.n + 1, dtype=np.uint8)
    lookup[1:] = seq
    return Domain._from_sorted(d.n, _sorted_unique_rows(lookup[d.orders]))


def dual(d: Domain) -> Domain:
    return Domain._from_sorted(d.n, _sorted_unique_rows(d.orders[:, ::-1]))


def compose_perms(tau: Sequence[int], sigma: Sequence[int]) -> tuple[int, ...]:
    """``tau o sigma`` for permutations given as image sequences."""
    return tuple(tau[s - 1] for s in sigma)


def invert_perm(pi: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(pi)
    for a, b in enumerate(pi, start=1):
        inv[b - 1] = a
    return tuple(inv)
