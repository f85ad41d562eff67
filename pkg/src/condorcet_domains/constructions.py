"""Fishburn's alternating scheme, the two disjoint-union compositions and growth-rate bounds."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, localcontext
from typing import Iterable, Mapping

import numpy as np

from .orders import Domain, InvalidArgument
from .rules import (
    RULE_FORBIDS,
    NeverRule,
    RuleAssignment,
    forbidden_from_assignment,
    generate_domain,
    generate_from_forbidden,
    satisfied_masks,
    triple_index,
    triples,
)

N1_3 = NeverRule(1, 3)
N3_1 = NeverRule(3, 1)


def fishburn_scheme(n: int) -> RuleAssignment:
    """2N1 on triples whose middle alternative is even, 2N3 otherwise."""
    if n < 3:
        raise InvalidArgument("Fishburn's scheme needs n >= 3")
    rules = {
        tuple(int(x) for x in t): NeverRule(2, 1) if t[1] % 2 == 0 else NeverRule(2, 3)
        for t in triples(n)
    }
    return RuleAssignment(n, rules)


def fishburn_domain(n: int) -> Domain:
    return generate_domain(fishburn_scheme(n))


def _forbidden(part: Domain | RuleAssignment) -> np.ndarray:
    """Per-triple forbidden arrangements: the assigned rules, or every rule a domain satisfies."""
    if isinstance(part, RuleAssignment):
        if not part.complete:
            raise InvalidArgument("composition inputs must be complete assignments")
        return forbidden_from_assignment(part)
    sat = satisfied_masks(part)
    out = np.zeros(sat.shape[0], dtype=np.int64)
    for r in range(9):
        out[(sat >> r & 1).astype(bool)] |= RULE_FORBIDS[r]
    return out


@dataclass(frozen=True)
class CompositionSpec:
    """Inputs of the 1N3-3N1 composition.

    ``a1`` and ``b1`` are the first blocks of the partitions of ``d1``'s and
    ``d2``'s labels (in their own numbering); the second blocks are the rest.
    """

    d1: Domain | RuleAssignment
    d2: Domain | RuleAssignment
    a1: frozenset[int] = frozenset()
    b1: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "a1", frozenset(int(x) for x in self.a1))
        object.__setattr__(self, "b1", frozenset(int(x) for x in self.b1))
        for block, part, name in ((self.a1, self.d1, "A1"), (self.b1, self.d2, "B1")):
            if not block <= set(range(1, part.n + 1)):
                raise InvalidArgument(f"{name} is not a subset of 1..{part.n}")

    @classmethod
    def from_partitions(cls, d1, d2, a1: Iterable[int], a2: Iterable[int], b1: Iterable[int], b2: Iterable[int]):
        a1, a2, b1, b2 = (frozenset(int(x) for x in s) for s in (a1, a2, b1, b2))
        if a1 & a2 or a1 | a2 != set(range(1, d1.n + 1)):
            raise InvalidArgument("A1, A2 must partition the labels of d1")
        if b1 & b2 or b1 | b2 != set(range(1, d2.n + 1)):
            raise InvalidArgument("B1, B2 must partition the labels of d2")
        return cls(d1, d2, a1, b1)


def _compose(d1, d2, cross) -> Domain:
    """Glue ``d1`` on ``1..n1`` and ``d2`` on ``n1+1..n1+n2`` with ``cross(a_side, b_side)`` rules on mixed triples."""
    n1, n2 = d1.n, d2.n
    n = n1 + n2
    f1, f2 = _forbidden(d1), _forbidden(d2)
    idx1, idx2 = triple_index(n1), triple_index(n2)
    forbidden = np.zeros(len(triple_index(n)), dtype=np.int64)
    for k, t in enumerate(triple_index(n)):
        a = tuple(x for x in t if x <= n1)
        b = tuple(x - n1 for x in t if x > n1)
        if len(a) == 3:
            forbidden[k] = f1[idx1[a]]
        elif len(b) == 3:
            forbidden[k] = f2[idx2[b]]
        else:
            forbidden[k] = RULE_FORBIDS[cross(a, b).index]
    return generate_from_forbidden(n, forbidden)


def compose_s1(spec: CompositionSpec) -> Domain:
    """The 1N3-3N1 composition on ``n1 + n2`` alternatives.

    Triples ``{a1, a2, b}`` get 1N3 when both ``a``'s lie in ``A1`` and 3N1
    otherwise; triples ``{a, b1, b2}`` get 3N1 when both ``b``'s lie in ``B1``
    and 1N3 otherwise. ``d2``'s labels are shifted above ``d1``'s.
    """

    def cross(a, b):
        if len(a) == 2:
            return N1_3 if set(a) <= spec.a1 else N3_1
        return N3_1 if set(b) <= spec.b1 else N1_3

    return _compose(spec.d1, spec.d2, cross)


def compose_s2(d1, d2) -> Domain:
    """Composition keeping every ``uv`` and ``vu`` concatenation.

    On a mixed triple the lone alternative from one side is forbidden from the
    middle position: 3N2 on ``{a1, a2, b}`` and 1N2 on ``{a, b1, b2}``.
    """

    def cross(a, b):
        return NeverRule(3, 2) if len(a) == 2 else NeverRule(1, 2)

    return _compose(d1, d2, cross)


def concatenations(d1: Domain, d2: Domain, *, interleaved: bool = False, reverse: bool = False) -> list[tuple[int, ...]]:
    """Orders ``uv`` (or ``vu``, or ``u1..u_{n-1} v1 u_n v2..v_m``) with ``d2`` shifted by ``d1.n``."""
    shift = d1.n
    out = []
    for u in d1:
        for v in d2:
            v = tuple(x + shift for x in v)
            if interleaved:
                out.append(u[:-1] + (v[0], u[-1]) + v[1:])
            elif reverse:
                out.append(v + u)
            else:
                out.append(u + v)
    return out


PEAK_PIT_LIMINF = "peak_pit_liminf"
FISHBURN_LIMINF = "fishburn_liminf"


@dataclass(frozen=True)
class GrowthBound:
    k: int
    value: Decimal
    kind: str

    def __float__(self) -> float:
        return float(self.value)

    def format(self, digits: int = 10) -> str:
        return format(self.value, f".{digits}g")


def liminf_bound(size: int, k: int, kind: str = FISHBURN_LIMINF) -> GrowthBound:
    """Asymptotic growth-rate bound from one record ``size`` on ``k`` alternatives.

    ``peak_pit_liminf`` is ``(2 size)^(1/k)``, from superadditivity;
    ``fishburn_liminf`` is ``size^(1/(k-1))``, from ``f(n+m-1) >= f(n) f(m)``.
    """
    if size < 1 or k < 2:
        raise InvalidArgument("need size >= 1 and k >= 2")
    with localcontext() as ctx:
        ctx.prec = 40
        if kind == PEAK_PIT_LIMINF:
            value = (Decimal(2 * size).ln() / k).exp()
        elif kind == FISHBURN_LIMINF:
            value = (Decimal(size).ln() / (k - 1)).exp()
        else:
            raise InvalidArgument(f"unknown bound kind {kind!r}")
    return GrowthBound(k, value, kind)


def best_liminf_bound(sizes: Mapping[int, int], kind: str = FISHBURN_LIMINF) -> GrowthBound:
    """The strongest bound over a table ``{k: size}``."""
    bounds = [liminf_bound(int(s), int(k), kind) for k, s in sizes.items() if int(k) >= 2]
    if not bounds:
        raise InvalidArgument("no usable (k, size) entries")
    return max(bounds, key=lambda b: (b.value, -b.k))
