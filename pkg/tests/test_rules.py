import itertools
import random

import numpy as np
import pytest

from condorcet_domains.constructions import fishburn_domain, fishburn_scheme
from condorcet_domains.orders import Domain, restrict
from condorcet_domains.rules import (
    ALL_RULES,
    NeverRule,
    NotCondorcet,
    RuleAssignment,
    extract_rules,
    filter_all_orders,
    generate_domain,
    is_condorcet,
    is_copious,
    is_full,
    is_maximal,
    order_satisfies,
    triples,
    verify_by_profiles,
)


def random_assignment(rng, n, density=1.0, rules=ALL_RULES):
    asn = {}
    for t in itertools.combinations(range(1, n + 1), 3):
        if rng.random() < density:
            asn[t] = rng.choice(rules)
    return RuleAssignment(n, asn)


def test_rule_parsing_and_index():
    r = NeverRule.parse("2N3")
    assert (r.i, r.j, r.index, str(r)) == (2, 3, 5, "2N3")
    assert NeverRule.from_index(5) == r
    for bad in ("2M3", "4N1", "2N", "22N3"):
        with pytest.raises(ValueError):
            NeverRule.parse(bad)


def test_identity_satisfies_six_rules():
    sat = {str(r) for r in ALL_RULES if order_satisfies((1, 2, 3), (1, 2, 3), r)}
    assert sat == {"1N2", "1N3", "2N1", "2N3", "3N1", "3N2"}


@pytest.mark.parametrize("order", list(itertools.permutations((1, 2, 3))))
def test_each_order_violates_exactly_three_rules(order):
    # the i-th smallest alternative sits in exactly one position
    violated = {r for r in ALL_RULES if not order_satisfies(order, (1, 2, 3), r)}
    expected = {NeverRule(i, order.index(i) + 1) for i in (1, 2, 3)}
    assert violated == expected


def test_two_never_middle_on_three():
    d = generate_domain(RuleAssignment(3, {(1, 2, 3): "2N2"}))
    assert d == Domain.from_strings(["132", "213", "231", "312"])


def test_singleton_rules():
    rules = extract_rules(Domain.from_strings(["123"]))
    assert {str(r) for r in rules[(1, 2, 3)]} == {"1N2", "1N3", "2N1", "2N3", "3N1", "3N2"}


def test_full_domain_is_not_condorcet():
    d = Domain.full(3)
    assert not is_condorcet(d)
    assert not verify_by_profiles(d)
    with pytest.raises(NotCondorcet):
        is_full(d)
    with pytest.raises(NotCondorcet):
        is_maximal(d)


def test_fishburn_five():
    d = fishburn_domain(5)
    assert len(d) == 20
    assert is_condorcet(d) and verify_by_profiles(d)
    assert is_full(d) and is_maximal(d) and is_copious(d)


def test_singleton_is_full_but_not_maximal():
    # every order other than 123 breaks one of the six rules 123 satisfies
    d = Domain.from_strings(["123"])
    assert is_full(d)
    assert not is_maximal(d)


def test_fishburn_four_is_full():
    assert is_full(fishburn_domain(4))


def test_generated_domain_is_full_on_its_rules():
    rng = random.Random(7)
    for _ in range(30):
        d = generate_domain(random_assignment(rng, 5))
        assert is_full(d)


def test_maximal_direct_test_agrees_with_shortcut():
    for n in range(3, 8):
        d = fishburn_domain(n)
        assert is_copious(d) and is_full(d) and is_maximal(d)


def test_generate_matches_naive_filter():
    rng = random.Random(11)
    for _ in range(40):
        n = rng.randint(3, 6)
        asn = random_assignment(rng, n, density=rng.random())
        assert generate_domain(asn) == filter_all_orders(asn)


def test_sen_soundness_small():
    rng = random.Random(3)
    for _ in range(40):
        n = rng.randint(3, 5)
        assert verify_by_profiles(generate_domain(random_assignment(rng, n)))


def test_adding_a_rule_never_enlarges():
    rng = random.Random(5)
    for _ in range(30):
        asn = random_assignment(rng, 5, density=0.5)
        free = asn.unassigned
        if not free:
            continue
        more = dict(asn.rules)
        more[free[0]] = rng.choice(ALL_RULES)
        big, small = generate_domain(asn), generate_domain(RuleAssignment(5, more))
        assert set(small) <= set(big)


def test_extracted_rules_contain_assignment():
    rng = random.Random(9)
    for _ in range(30):
        asn = random_assignment(rng, 5)
        d = generate_domain(asn)
        if len(d) == 0:
            continue
        got = extract_rules(d)
        assert all(r in got[t] for t, r in asn.rules.items())


def test_restriction_closure():
    rng = random.Random(13)
    for _ in range(20):
        d = generate_domain(random_assignment(rng, 6))
        for k in (3, 4, 5):
            for sub in itertools.combinations(range(1, 7), k):
                assert is_condorcet(restrict(d, sub))


def test_rule_assignment_array_round_trip():
    asn = fishburn_scheme(6)
    assert RuleAssignment.from_array(6, asn.to_array()) == asn
    assert asn.complete and asn.unassigned == []
    assert len(triples(6)) == 20
    partial = RuleAssignment(4, {(1, 2, 4): "2N3"})
    arr = partial.to_array()
    assert (arr >= 0).sum() == 1 and np.count_nonzero(arr == -1) == 3
