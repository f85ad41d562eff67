"""Canonical forms of domains under relabelling of alternatives.

The canonical form is the lexicographically least serialization (sorted
orders, concatenated) over all relabellings. Its first order is necessarily
``1 2 ... n``: some relabelling sends any member to the identity, and nothing
sorts below it. So the minimizing relabellings are among the ``|d|`` maps
``o^-1`` that send a member ``o`` to the identity, and only those need to be
tried. Relabellings reaching the minimum form a coset of the automorphism
group, which gives the automorphism count for free.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .orders import Domain, InvalidArgument, _sorted_unique_rows, dual

_CHUNK_CELLS = 20_000_000


@dataclass(frozen=True)
class CanonicalForm:
    n: int
    size: int
    orders: bytes
    automorphisms: int

    def domain(self) -> Domain:
        arr = np.frombuffer(self.orders, dtype=np.uint8).reshape(self.size, self.n)
        return Domain._from_sorted(self.n, arr.copy())

    @property
    def digest(self) -> str:
        return hashlib.sha256(bytes([self.n]) + self.orders).hexdigest()

    def __lt__(self, other: "CanonicalForm") -> bool:
        return (self.n, self.size, self.orders) < (other.n, other.size, other.orders)


def _row_codes(arr: np.ndarray, n: int) -> np.ndarray:
    base = np.int64(n + 1)
    out = np.zeros(arr.shape[:-1], dtype=np.int64)
    for k in range(n):
        out = out * base + arr[..., k]
    return out


def _candidate_keys(d: Domain, start: int, stop: int) -> np.ndarray:
    """Sorted order codes of ``relabel(d, o^-1)`` for members ``o`` in ``[start, stop)``."""
    # relabelling by o^-1 sends alternative a to its 1-based position in o
    lookup = d.positions[start:stop].astype(np.int64) + 1
    relabelled = np.take_along_axis(
        lookup[:, None, :], d.orders[None, :, :].astype(np.int64), axis=2
    )
    keys = _row_codes(relabelled, d.n)
    keys.sort(axis=1)
    return keys


def _argmin_rows(keys: np.ndarray) -> np.ndarray:
    """Indices of the lexicographically smallest rows (all ties)."""
    alive = np.arange(keys.shape[0])
    for col in range(keys.shape[1]):
        vals = keys[alive, col]
        alive = alive[vals == vals.min()]
        if alive.size == 1:
            break
    return alive


def _canonical_small(d: Domain) -> tuple[np.ndarray, int, int]:
    m, n = len(d), d.n
    step = max(1, _CHUNK_CELLS // max(1, m * n))
    best = None
    ties = 0
    witness = -1
    for start in range(0, m, step):
        keys = _candidate_keys(d, start, min(m, start + step))
        idx = _argmin_rows(keys)
        cand = keys[idx[0]]
        if best is None:
            best, ties, witness = cand, idx.size, start + int(idx[0])
            continue
        diff = np.nonzero(cand != best)[0]
        if diff.size == 0:
            ties += idx.size
        elif cand[diff[0]] < best[diff[0]]:
            best, ties, witness = cand, idx.size, start + int(idx[0])
    return best, ties, witness


def _canonical_generic(d: Domain) -> tuple[bytes, int, int]:
    best, ties, witness = None, 0, -1
    for k in range(len(d)):
        lookup = np.zeros(d.n + 1, dtype=np.uint8)
        lookup[1:] = d.positions[k, 1:] + 1
        data = _sorted_unique_rows(lookup[d.orders]).tobytes()
        if best is None or data < best:
            best, ties, witness = data, 1, k
        elif data == best:
            ties += 1
    return best, ties, witness


def canonical_relabelling(d: Domain) -> tuple[int, ...]:
    """A permutation (image sequence) taking ``d`` to its canonical form."""
    if len(d) == 0:
        return tuple(range(1, d.n + 1))
    if d.n <= 15:
        _, _, witness = _canonical_small(d)
    else:
        _, _, witness = _canonical_generic(d)
    return tuple(int(p) + 1 for p in d.positions[witness, 1:])


def canonical_form(d: Domain) -> CanonicalForm:
    cached = d.__dict__.get("_canonical")
    if cached is not None:
        return cached
    if len(d) == 0:
        form = CanonicalForm(d.n, 0, b"", 1)
    elif d.n <= 15:
        keys, ties, _ = _canonical_small(d)
        base = d.n + 1
        rows = np.zeros((len(d), d.n), dtype=np.uint8)
        rest = keys.copy()
        for k in range(d.n - 1, -1, -1):
            rows[:, k] = rest % base
            rest //= base
        form = CanonicalForm(d.n, len(d), rows.tobytes(), ties)
    else:
        data, ties, _ = _canonical_generic(d)
        form = CanonicalForm(d.n, len(d), data, ties)
    d.__dict__["_canonical"] = form
    return form


def is_isomorphic(d1: Domain, d2: Domain) -> bool:
    if d1.n != d2.n or len(d1) != len(d2):
        return False
    return canonical_form(d1).orders == canonical_form(d2).orders


def is_self_dual(d: Domain) -> bool:
    return is_isomorphic(d, dual(d))


def dedup(domains) -> list[Domain]:
    """One canonical representative per isomorphism class, sorted by size desc then bytes."""
    domains = list(domains)
    if not domains:
        return []
    ns = {d.n for d in domains}
    if len(ns) != 1:
        raise InvalidArgument(f"dedup needs a common n, got {sorted(ns)}")
    seen: dict[bytes, CanonicalForm] = {}
    for d in domains:
        form = canonical_form(d)
        seen.setdefault(form.orders, form)
    forms = sorted(seen.values(), key=lambda f: (-f.size, f.orders))
    return [f.domain() for f in forms]
