import itertools
import math
import random

import pytest

from condorcet_domains.canonical import (
    canonical_form,
    canonical_relabelling,
    dedup,
    is_isomorphic,
    is_self_dual,
)
from condorcet_domains.constructions import fishburn_domain
from condorcet_domains.orders import Domain, InvalidArgument, dual, relabel


def brute_force(d):
    """Minimal sorted byte string over all relabellings, and the number attaining it."""
    best, ties = None, 0
    for pi in itertools.permutations(range(1, d.n + 1)):
        key = relabel(d, pi).to_bytes()
        if best is None or key < best:
            best, ties = key, 1
        elif key == best:
            ties += 1
    return best, ties


def random_domain(rng, n, m):
    m = min(m, math.factorial(n))
    rows = set()
    while len(rows) < m:
        p = list(range(1, n + 1))
        rng.shuffle(p)
        rows.add(tuple(p))
    return Domain.from_orders(sorted(rows), n)


def test_matches_brute_force():
    rng = random.Random(21)
    for _ in range(60):
        n = rng.randint(1, 5)
        d = random_domain(rng, n, rng.randint(1, 10))
        best, ties = brute_force(d)
        form = canonical_form(d)
        assert form.orders == best
        assert form.automorphisms == ties
        assert relabel(d, canonical_relabelling(d)).to_bytes() == best


def test_invariant_under_relabelling():
    rng = random.Random(4)
    for _ in range(100):
        n = rng.randint(3, 7)
        d = fishburn_domain(n) if rng.random() < 0.5 else random_domain(rng, n, rng.randint(1, 12))
        pi = list(range(1, n + 1))
        rng.shuffle(pi)
        assert canonical_form(relabel(d, pi)) == canonical_form(d)


def test_record_domains(d8, d9_pair):
    assert canonical_form(dual(d8)) == canonical_form(d8)
    assert is_self_dual(d8)
    a, b = d9_pair
    assert not is_isomorphic(a, b)
    assert canonical_form(a).digest != canonical_form(b).digest


def test_dedup_collapses_isomorphic_copies():
    d = fishburn_domain(5)
    other = Domain.full(5)
    out = dedup([d, relabel(d, (5, 4, 3, 2, 1)), other])
    assert len(out) == 2
    assert [len(x) for x in out] == [120, 20]


def test_dedup_edge_cases():
    assert dedup([]) == []
    with pytest.raises(InvalidArgument):
        dedup([Domain.full(3), Domain.full(4)])


def test_dedup_idempotent_and_order_insensitive():
    rng = random.Random(8)
    ds = [random_domain(rng, 4, rng.randint(2, 8)) for _ in range(30)]
    ds += [relabel(d, (2, 1, 4, 3)) for d in ds[:10]]
    once = dedup(ds)
    assert dedup(once) == once
    rng.shuffle(ds)
    assert dedup(ds) == once


def test_self_dual_small():
    assert is_self_dual(Domain.from_strings(["123", "321"]))
    # orders sharing a first alternative cannot map onto orders sharing a last one
    assert not is_self_dual(Domain.from_strings(["123", "132"]))
