import itertools

import numpy as np
import pytest

from condorcet_domains.analysis import is_peak_pit
from condorcet_domains.canonical import canonical_form
from condorcet_domains.constructions import fishburn_domain, fishburn_scheme
from condorcet_domains.orders import restrict
from condorcet_domains.rules import (
    PEAK_PIT_RULES,
    NeverRule,
    RuleAssignment,
    assignment_for,
    generate_domain,
    is_condorcet,
    is_copious,
    is_full,
)
from condorcet_domains.search import (
    Infeasible,
    PartialAssignment,
    SearchConfig,
    bootstrap,
    complete,
    exhaustive_maximal,
    extend,
    instantiate,
    merge_compatible,
    select_seeds,
)


def test_exhaustive_small():
    assert [len(d) for d in exhaustive_maximal(3)] == [4, 4, 4]
    assert len(exhaustive_maximal(4)[0]) == 9
    assert len(exhaustive_maximal(4)) == 31
    assert len(exhaustive_maximal(4, PEAK_PIT_RULES)) == 10


def test_exhaustive_symmetry_pruning_is_exact():
    plain = {canonical_form(d) for d in exhaustive_maximal(4, symmetry=False)}
    pruned = {canonical_form(d) for d in exhaustive_maximal(4)}
    assert plain == pruned


def test_exhaustive_refuses_large_n():
    with pytest.raises(Infeasible):
        exhaustive_maximal(6)
    with pytest.raises(Infeasible):
        exhaustive_maximal(7, PEAK_PIT_RULES)


def test_instantiate_embeddings():
    seed = fishburn_scheme(4)
    last = instantiate(seed, 5)
    assert last.rules.rules == seed.rules
    first = instantiate(seed, 1)
    assert first.rules.rules == {tuple(x + 1 for x in t): r for t, r in seed.rules.items()}
    assert set(first.rules.unassigned) == {t for t in itertools.combinations(range(1, 6), 3) if 1 in t}


def test_instantiation_restriction_keeps_seed():
    for n in range(3, 7):
        seed = fishburn_scheme(n)
        for i in range(1, n + 2):
            big = generate_domain(instantiate(seed, i).rules)
            rest = [a for a in range(1, n + 2) if a != i]
            assert len(restrict(big, rest)) >= len(generate_domain(seed))


def test_merge_compatible():
    seed = fishburn_scheme(4)
    # 1N3 is preserved by order-preserving embeddings, so every overlap agrees
    sym = RuleAssignment(4, {t: "1N3" for t in itertools.combinations(range(1, 5), 3)})
    merged = merge_compatible(instantiate(sym, 2), instantiate(sym, 4))
    assert isinstance(merged, PartialAssignment)
    assert len(merged.undecided) == 3
    other = RuleAssignment(4, {t: "3N1" for t in itertools.combinations(range(1, 5), 3)})
    assert merge_compatible(instantiate(sym, 2), instantiate(other, 4)) is None
    with pytest.raises(ValueError):
        merge_compatible(instantiate(seed, 2), instantiate(seed, 2))


def test_complete_threshold_and_copiousness():
    seed = assignment_for(fishburn_domain(5))
    p = merge_compatible(instantiate(seed, 3), instantiate(seed, 4))
    assert p is not None
    found = complete(p, SearchConfig(threshold=1))
    assert found and all(is_copious(d) for d in found)
    assert complete(p, SearchConfig(threshold=10**6)) == []


def test_extend_outputs_are_full_copious_peak_pit():
    seeds = exhaustive_maximal(4)[:3]
    out = extend(seeds, SearchConfig(threshold=18))
    assert len(out[0]) == 20
    for d in out:
        assert is_condorcet(d) and is_copious(d) and is_full(d) and is_peak_pit(d)


def test_extend_output_restrictions_not_smaller_than_seeds(d8):
    out = extend([d8], SearchConfig(pair_mode="shortcut", threshold=488))
    for d in out:
        sizes = [len(restrict(d, [a for a in range(1, 10) if a != i])) for i in range(1, 10)]
        assert max(sizes) >= 224


def test_shortcut_eight_to_nine(d8):
    out = extend([d8], SearchConfig(pair_mode="shortcut", threshold=492))
    assert [len(d) for d in out] == [492, 492]


def test_shortcut_matches_all_pairs_eight_to_nine(d8):
    cfg = SearchConfig(threshold=488)
    short = extend([d8], SearchConfig(pair_mode="shortcut", threshold=488))
    full = extend([d8], cfg)
    assert len(short[0]) == len(full[0]) == 492


def test_extend_uses_config_seeds():
    seeds = exhaustive_maximal(4)[:2]
    assert extend(None, SearchConfig(seeds=seeds, threshold=19)) == extend(seeds, SearchConfig(threshold=19))
    with pytest.raises(ValueError):
        extend([], SearchConfig())


def test_checkpoint_resume(tmp_path):
    seeds = exhaustive_maximal(4)[:2]
    path = tmp_path / "ckpt.txt"
    first = extend(seeds, SearchConfig(threshold=18, checkpoint=path))
    text = path.read_text()
    assert text.startswith("PARTIAL ") and " DONE" in text
    again = extend(seeds, SearchConfig(threshold=18, checkpoint=path))
    assert again == first
    assert path.read_text() == text


def test_select_seeds():
    ds = exhaustive_maximal(4)
    picked = select_seeds(ds, 0.10)
    assert picked and all(len(d) >= 0.9 * len(ds[0]) for d in picked)
    assert select_seeds([], 0.1) == []


def test_bootstrap_to_six():
    levels = bootstrap(exhaustive_maximal(4), 6)
    assert [len(levels[n][0]) for n in (4, 5, 6)] == [9, 20, 45]


def test_dual_rule_map():
    # reversing every order swaps positions 1 and 3 inside each triple
    seed = fishburn_scheme(5)
    rev = RuleAssignment(5, {t: NeverRule(r.i, 4 - r.j) for t, r in seed.rules.items()})
    d, e = generate_domain(seed), generate_domain(rev)
    assert np.array_equal(np.sort(e.codes), np.sort(type(d)(5, d.orders[:, ::-1]).codes))
