"""Never conditions on triples, rule assignments and the domains they generate.

Every triple ``a < b < c`` is read along the societal axis ``1 < 2 < ... < n``:
``a`` is its 1st alternative, ``b`` its 2nd, ``c`` its 3rd. Inside an order the
triple appears in one of six relative arrangements. We encode an arrangement
by three comparison bits ``4*[a before b] + 2*[a before c] + [b before c]``,
which leaves codes 2 and 5 unused. All rule tests reduce to 8-bit masks over
these codes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .orders import Domain, InvalidArgument, all_orders

Triple = tuple[int, int, int]


class NotCondorcet(ValueError):
    """Raised by operations that require a Condorcet domain."""


class NeverRule(NamedTuple):
    """``iNj``: the i-th alternative of the triple never sits in position j."""

    i: int
    j: int

    def __str__(self) -> str:
        return f"{self.i}N{self.j}"

    @property
    def index(self) -> int:
        return (self.i - 1) * 3 + (self.j - 1)

    @classmethod
    def parse(cls, text: str) -> "NeverRule":
        text = text.strip()
        if len(text) != 3 or text[1] not in "Nn" or text[0] not in "123" or text[2] not in "123":
            raise InvalidArgument(f"bad never condition {text!r}")
        return cls(int(text[0]), int(text[2]))

    @classmethod
    def from_index(cls, index: int) -> "NeverRule":
        return cls(index // 3 + 1, index % 3 + 1)


ALL_RULES: tuple[NeverRule, ...] = tuple(NeverRule(i, j) for i in (1, 2, 3) for j in (1, 2, 3))
PEAK_PIT_RULES: tuple[NeverRule, ...] = tuple(r for r in ALL_RULES if r.j in (1, 3))
# allowed set for the completion step of the inductive search
SEARCH_RULES: tuple[NeverRule, ...] = tuple(NeverRule.parse(s) for s in ("1N3", "3N1", "2N1", "2N3"))


def _code_words() -> dict[int, tuple[int, int, int]]:
    """Map each valid code to the axis ranks listed from top position to bottom."""
    words = {}
    for word in itertools.permutations((1, 2, 3)):
        pos = {alt: p for p, alt in enumerate(word)}
        code = 4 * (pos[1] < pos[2]) + 2 * (pos[1] < pos[3]) + (pos[2] < pos[3])
        words[code] = word
    return words


CODE_WORDS = _code_words()
VALID_CODES = tuple(sorted(CODE_WORDS))
VALID_MASK = sum(1 << c for c in VALID_CODES)

# RULE_FORBIDS[r] = bitmask of codes violating rule r
RULE_FORBIDS = np.zeros(9, dtype=np.int64)
for _r in ALL_RULES:
    for _code, _word in CODE_WORDS.items():
        if _word[_r.j - 1] == _r.i:
            RULE_FORBIDS[_r.index] |= 1 << _code

# SATISFIED[present] = 9-bit mask of rules holding on a triple whose arrangements are `present`
SATISFIED = np.zeros(256, dtype=np.int64)
for _present in range(256):
    _m = 0
    for _r in range(9):
        if not _present & RULE_FORBIDS[_r]:
            _m |= 1 << _r
    SATISFIED[_present] = _m

POPCOUNT = np.array([bin(x).count("1") for x in range(1 << 9)], dtype=np.int64)


def order_satisfies(order, triple: Triple, rule: NeverRule) -> bool:
    a, b, c = triple
    sub = [x for x in order if x in (a, b, c)]
    rank = {a: 1, b: 2, c: 3}
    return rank[sub[rule.j - 1]] != rule.i


@lru_cache(maxsize=None)
def triples(n: int) -> np.ndarray:
    """All triples of ``1..n`` in lexicographic order, shape ``(C(n,3), 3)``."""
    t = np.array(list(itertools.combinations(range(1, n + 1), 3)), dtype=np.int64)
    t = t.reshape(-1, 3)
    t.setflags(write=False)
    return t


@lru_cache(maxsize=None)
def triple_index(n: int) -> dict[Triple, int]:
    return {tuple(int(x) for x in t): k for k, t in enumerate(triples(n))}


def _check_triple(t: Iterable[int], n: int) -> Triple:
    a, b, c = sorted(int(x) for x in t)
    if not (1 <= a < b < c <= n):
        raise InvalidArgument(f"invalid triple {tuple(t)} for n={n}")
    return (a, b, c)


def codes_from_positions(pos: np.ndarray, n: int) -> np.ndarray:
    """Arrangement code of every triple in every row of a position table."""
    t = triples(n)
    pa, pb, pc = pos[:, t[:, 0]], pos[:, t[:, 1]], pos[:, t[:, 2]]
    return (4 * (pa < pb) + 2 * (pa < pc) + (pb < pc)).astype(np.uint8)


def triple_codes(d: Domain) -> np.ndarray:
    """``(|d|, C(n,3))`` arrangement codes, cached on the domain."""
    cached = d.__dict__.get("_triple_codes")
    if cached is None:
        cached = codes_from_positions(d.positions, d.n)
        cached.setflags(write=False)
        d.__dict__["_triple_codes"] = cached
    return cached


def present_masks(d: Domain) -> np.ndarray:
    """Per triple, the bitmask of arrangements that occur in ``d``."""
    cached = d.__dict__.get("_present")
    if cached is None:
        codes = triple_codes(d).astype(np.int64)
        if codes.shape[0] == 0:
            cached = np.zeros(codes.shape[1], dtype=np.int64)
        else:
            cached = np.bitwise_or.reduce(np.left_shift(1, codes), axis=0)
        d.__dict__["_present"] = cached
    return cached


@dataclass(frozen=True)
class RuleAssignment:
    """A possibly partial map from triples of ``1..n`` to never conditions."""

    n: int
    rules: Mapping[Triple, NeverRule] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 0:
            raise InvalidArgument("n must be non-negative")
        clean = {}
        for t, r in self.rules.items():
            t = _check_triple(t, self.n)
            if isinstance(r, str):
                r = NeverRule.parse(r)
            elif not isinstance(r, NeverRule):
                r = NeverRule(*r)
            clean[t] = r
        object.__setattr__(self, "rules", dict(sorted(clean.items())))

    @property
    def unassigned(self) -> list[Triple]:
        return [t for t in triple_index(self.n) if t not in self.rules]

    @property
    def complete(self) -> bool:
        return len(self.rules) == len(triple_index(self.n))

    def to_array(self) -> np.ndarray:
        """Rule index per triple (lexicographic triple order), -1 when unassigned."""
        out = np.full(len(triple_index(self.n)), -1, dtype=np.int64)
        idx = triple_index(self.n)
        for t, r in self.rules.items():
            out[idx[t]] = r.index
        return out

    @classmethod
    def from_array(cls, n: int, arr) -> "RuleAssignment":
        rules = {}
        for t, r in zip(triple_index(n), arr):
            if r >= 0:
                rules[t] = NeverRule.from_index(int(r))
        return cls(n, rules)

    def __eq__(self, other):
        if not isinstance(other, RuleAssignment):
            return NotImplemented
        return self.n == other.n and self.rules == other.rules

    def __hash__(self):
        return hash((self.n, tuple(self.rules.items())))


def forbidden_from_assignment(asn: RuleAssignment) -> np.ndarray:
    arr = asn.to_array()
    out = np.zeros(arr.shape[0], dtype=np.int64)
    assigned = arr >= 0
    out[assigned] = RULE_FORBIDS[arr[assigned]]
    return out


def _ordered_forbidden_table(n: int, forbidden: np.ndarray) -> np.ndarray:
    """``F[x, y, z]`` is True when ranking x above y above z breaks the triple's constraint."""
    table = np.zeros((n + 1, n + 1, n + 1), dtype=bool)
    for (a, b, c), mask in zip(triples(n), forbidden):
        if not mask:
            continue
        for x, y, z in itertools.permutations((a, b, c)):
            pos = {x: 0, y: 1, z: 2}
            code = 4 * (pos[a] < pos[b]) + 2 * (pos[a] < pos[c]) + (pos[b] < pos[c])
            if mask >> code & 1:
                table[x, y, z] = True
    return table


def generate_from_forbidden(n: int, forbidden: np.ndarray) -> Domain:
    """All orders on ``1..n`` avoiding, for each triple, the arrangement codes in ``forbidden``.

    Orders are grown from the top one position at a time; appending ``z`` below
    an existing prefix fixes the arrangement of every triple ``{x, y, z}`` with
    ``x, y`` already placed, so branches die as soon as a triple is violated.
    The frontier is expanded breadth-first in lexicographic order, which makes
    the output sorted without a final sort.
    """
    if n <= 2 or not np.any(forbidden):
        return Domain.full(n)
    table = _ordered_forbidden_table(n, forbidden)
    alts = np.arange(1, n + 1, dtype=np.uint8)
    prefixes = alts.reshape(n, 1)
    for k in range(1, n):
        m = prefixes.shape[0]
        if m == 0:
            break
        used = np.zeros((m, n + 1), dtype=bool)
        used[np.arange(m)[:, None], prefixes] = True
        rows, nxt = np.nonzero(~used[:, 1:])
        nxt = (nxt + 1).astype(np.uint8)
        cand = prefixes[rows]
        if k >= 2:
            xs, ys = np.triu_indices(k, 1)
            bad = table[cand[:, xs], cand[:, ys], nxt[:, None]].any(axis=1)
            keep = ~bad
            cand, nxt = cand[keep], nxt[keep]
        prefixes = np.concatenate([cand, nxt[:, None]], axis=1)
    if prefixes.shape[1] != n:
        return Domain(n, np.zeros((0, n), dtype=np.uint8), _trusted=True)
    return Domain._from_sorted(n, prefixes)


def generate_domain(asn: RuleAssignment) -> Domain:
    """The set of all orders satisfying every assigned rule; unassigned triples are free."""
    return generate_from_forbidden(asn.n, forbidden_from_assignment(asn))


def extract_rules(d: Domain) -> dict[Triple, set[NeverRule]]:
    """For every triple, all never conditions satisfied by every order of ``d``."""
    sat = SATISFIED[present_masks(d)]
    out = {}
    for t, mask in zip(triple_index(d.n), sat):
        out[t] = {NeverRule.from_index(r) for r in range(9) if mask >> r & 1}
    return out


def satisfied_masks(d: Domain) -> np.ndarray:
    """9-bit satisfied-rule mask per triple."""
    return SATISFIED[present_masks(d)]


def is_condorcet(d: Domain) -> bool:
    if d.n < 3:
        return True
    return bool(np.all(satisfied_masks(d) != 0))


def verify_by_profiles(d: Domain) -> bool:
    """Brute-force check: every 3-voter profile from ``d`` has an acyclic majority relation.

    Independent of the never-condition machinery; majority between x and y is
    decided by counting voters that rank x above y.
    """
    n, m = d.n, len(d)
    if n < 3 or m < 3:
        return True
    pos = d.positions.astype(np.int16)
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    pair_col = {p: k for k, p in enumerate(pairs)}
    # above[r, k]: voter r prefers pairs[k][0] to pairs[k][1]
    above = np.stack([pos[:, x] < pos[:, y] for x, y in pairs], axis=1)
    cyc = [(pair_col[(a, b)], pair_col[(b, c)], pair_col[(a, c)])
           for a, b, c in itertools.combinations(range(1, n + 1), 3)]
    ab, bc, ac = (np.array(z) for z in zip(*cyc))
    combos = np.array(list(itertools.combinations_with_replacement(range(m), 3)), dtype=np.int64)
    for start in range(0, combos.shape[0], 20000):
        chunk = combos[start:start + 20000]
        votes = above[chunk[:, 0]].astype(np.int8) + above[chunk[:, 1]] + above[chunk[:, 2]]
        maj = votes >= 2
        # a>b>c>a or the reverse cycle
        fwd = maj[:, ab] & maj[:, bc] & ~maj[:, ac]
        bwd = ~maj[:, ab] & ~maj[:, bc] & maj[:, ac]
        if np.any(fwd | bwd):
            return False
    return True


def _full_closure(d: Domain) -> Domain:
    sat = satisfied_masks(d)
    forbidden = np.zeros(sat.shape[0], dtype=np.int64)
    for r in range(9):
        has = (sat >> r & 1).astype(bool)
        forbidden[has] |= RULE_FORBIDS[r]
    return generate_from_forbidden(d.n, forbidden)


def is_full(d: Domain) -> bool:
    """True when ``d`` equals the set of all orders satisfying every rule ``d`` satisfies."""
    if not is_condorcet(d):
        raise NotCondorcet("is_full requires a Condorcet domain")
    return _full_closure(d) == d


def is_copious(d: Domain) -> bool:
    if d.n < 3:
        return True
    return bool(np.all(POPCOUNT[present_masks(d)] == 4))


def addable_orders(d: Domain) -> np.ndarray:
    """Orders outside ``d`` whose addition keeps the Condorcet property (rows)."""
    everything = Domain.full(d.n)
    codes = triple_codes(everything).astype(np.int64)
    present = present_masks(d)
    extended = present[None, :] | np.left_shift(1, codes)
    ok = np.all(SATISFIED[extended] != 0, axis=1)
    inside = np.isin(everything.codes, d.codes)
    return everything.orders[ok & ~inside]


def is_maximal(d: Domain) -> bool:
    """No order can be added without breaking the Condorcet property.

    A single-order test suffices: any order of a larger Condorcet domain can be
    added on its own. For n > 7 a copious full domain is accepted without it.
    """
    if not is_condorcet(d):
        raise NotCondorcet("is_maximal requires a Condorcet domain")
    if d.n > 7 and is_copious(d) and is_full(d):
        return True
    return addable_orders(d).shape[0] == 0


def filter_all_orders(asn: RuleAssignment) -> Domain:
    """Naive reference: test every one of the n! orders against every assigned rule."""
    keep = []
    for order in all_orders(asn.n):
        o = tuple(int(x) for x in order)
        if all(order_satisfies(o, t, r) for t, r in asn.rules.items()):
            keep.append(o)
    return Domain(asn.n, np.array(keep, dtype=np.int64).reshape(len(keep), asn.n))


def assignment_for(d: Domain, preference: Iterable[NeverRule] = SEARCH_RULES + ALL_RULES) -> RuleAssignment:
    """A complete assignment of rules satisfied by ``d``: per triple the first satisfied rule in ``preference``."""
    sat = satisfied_masks(d)
    pref = list(dict.fromkeys(preference))
    rules = {}
    for t, mask in zip(triple_index(d.n), sat):
        for r in pref:
            if mask >> r.index & 1:
                rules[t] = r
                break
        else:
            raise NotCondorcet(f"triple {t} satisfies no never condition")
    return RuleAssignment(d.n, rules)
