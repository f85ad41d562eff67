"""Structural properties of domains: abundance, width, connectivity, core and friends."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .canonical import canonical_form, is_self_dual
from .orders import Domain, InvalidArgument, encode_orders, relabel, restriction_sizes
from .rules import (
    POPCOUNT,
    NeverRule,
    NotCondorcet,
    extract_rules,
    is_condorcet,
    is_copious,
    present_masks,
    satisfied_masks,
    triple_index,
)

DIAMETER_LIMIT = 1_000_000

_J13_MASK = sum(1 << ((i - 1) * 3 + (j - 1)) for i in (1, 2, 3) for j in (1, 3))


class IncompleteRecords(LookupError):
    """A record size needed by the census is missing."""


def abundance_profile(d: Domain, k: int) -> int:
    """Smallest restriction size over all ``k``-subsets of alternatives."""
    if not 2 <= k <= d.n:
        raise InvalidArgument(f"k must lie in 2..{d.n}, got {k}")
    if len(d) <= 1:
        return len(d)
    if k == 3:
        return int(POPCOUNT[present_masks(d)].min())
    subsets = np.array(list(itertools.combinations(range(1, d.n + 1), k)), dtype=np.int64)
    return int(restriction_sizes(d, subsets).min())


def is_ample(d: Domain) -> bool:
    return d.n < 2 or abundance_profile(d, 2) == 2


def is_peak_pit(d: Domain) -> bool:
    """Every triple satisfies some never condition of type iN1 or iN3."""
    if not is_condorcet(d):
        raise NotCondorcet("is_peak_pit requires a Condorcet domain")
    if d.n < 3:
        return True
    return bool(np.all(satisfied_masks(d) & _J13_MASK))


def has_maximum_width(d: Domain) -> bool:
    if len(d) == 0:
        return False
    rev = encode_orders(d.orders[:, ::-1], d.n)
    return bool(np.isin(rev, d.codes).any())


def adjacency_edges(d: Domain) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs of orders that differ by swapping two neighbouring positions."""
    src, dst = [], []
    codes = d.codes
    for k in range(d.n - 1):
        swapped = d.orders.copy()
        swapped[:, [k, k + 1]] = swapped[:, [k + 1, k]]
        keys = encode_orders(swapped, d.n)
        hit = np.searchsorted(codes, keys)
        hit[hit >= len(codes)] = 0
        ok = codes[hit] == keys
        src.append(np.nonzero(ok)[0])
        dst.append(hit[ok])
    return np.concatenate(src), np.concatenate(dst)


def connectivity_and_diameter(d: Domain) -> tuple[bool, int | None]:
    """Connectedness of the adjacent-transposition graph and its diameter.

    The diameter is ``None`` when the graph is disconnected or larger than
    :data:`DIAMETER_LIMIT` vertices.
    """
    m = len(d)
    if m == 0:
        raise InvalidArgument("empty domain")
    if m == 1:
        return True, 0
    src, dst = adjacency_edges(d)
    graph = coo_matrix((np.ones(src.size, dtype=np.int8), (src, dst)), shape=(m, m)).tocsr()
    n_comp, _ = connected_components(graph, directed=False)
    connected = n_comp == 1
    if not connected or m > DIAMETER_LIMIT:
        return connected, None
    diameter = 0
    step = max(1, 50_000_000 // m)
    for start in range(0, m, step):
        dist = shortest_path(graph, unweighted=True, directed=False,
                             indices=np.arange(start, min(m, start + step)))
        diameter = max(diameter, int(dist.max()))
    return connected, diameter


def kendall_tau_max(d: Domain) -> int:
    """Largest number of discordant pairs between two orders of ``d``."""
    pos = d.positions[:, 1:].astype(np.int16)
    best = 0
    pairs = list(itertools.combinations(range(d.n), 2))
    xs = np.array([p[0] for p in pairs])
    ys = np.array([p[1] for p in pairs])
    above = pos[:, xs] < pos[:, ys]
    for r in range(len(d)):
        best = max(best, int((above != above[r]).sum(axis=1).max()))
    return best


def core(d: Domain) -> Domain:
    """Members ``o`` such that relabelling by ``k -> o[k]`` maps ``d`` onto itself."""
    keep = []
    target = d.codes
    for r, row in enumerate(d.orders):
        lookup = np.zeros(d.n + 1, dtype=np.uint8)
        lookup[1:] = row
        keys = np.sort(encode_orders(lookup[d.orders], d.n))
        if np.array_equal(keys, target):
            keep.append(r)
    return Domain._from_sorted(d.n, d.orders[keep])


def first_last_counts(d: Domain) -> tuple[int, int]:
    if len(d) == 0:
        raise InvalidArgument("empty domain")
    return int(np.unique(d.orders[:, 0]).size), int(np.unique(d.orders[:, -1]).size)


def _bad_table(d: Domain) -> np.ndarray:
    """``bad[t, x, z]``: triple t lacks both 1N3 and 3N1 when x is its axis-lowest and z its highest.

    ``x`` and ``z`` index the triple members 0..2.
    """
    t_arr = np.array(list(triple_index(d.n)), dtype=np.int64).reshape(-1, 3)
    pos = d.positions.astype(np.int16)
    p = np.stack([pos[:, t_arr[:, 0]], pos[:, t_arr[:, 1]], pos[:, t_arr[:, 2]]], axis=2)
    last = np.argmax(p, axis=2)
    first = np.argmin(p, axis=2)
    never_last = np.stack([~np.any(last == a, axis=0) for a in range(3)], axis=1)
    never_first = np.stack([~np.any(first == a, axis=0) for a in range(3)], axis=1)
    bad = np.zeros((t_arr.shape[0], 3, 3), dtype=bool)
    for x in range(3):
        for z in range(3):
            if x != z:
                bad[:, x, z] = ~(never_last[:, x] | never_first[:, z])
    return bad


def min_non_13_31(d: Domain) -> int:
    """Fewest triples without a 1N3 or 3N1 certificate over all relabellings of ``d``.

    A relabelling only matters through the new axis it induces, so the search
    builds that axis from the bottom up and charges each triple once its
    highest member is placed. Branch and bound on the running count.
    """
    if not is_condorcet(d):
        raise NotCondorcet("min_non_13_31 requires a Condorcet domain")
    n = d.n
    if n < 3:
        return 0
    bad = _bad_table(d)
    idx = triple_index(n)
    # cost[x, y, z] for alternatives placed in axis order x < y < z
    cost = np.zeros((n + 1, n + 1, n + 1), dtype=np.int64)
    for (a, b, c), t in idx.items():
        members = (a, b, c)
        for lo, mid, hi in itertools.permutations(range(3)):
            cost[members[lo], members[mid], members[hi]] = bad[t, lo, hi]

    def axis_cost(axis):
        return sum(int(cost[x, y, z]) for x, y, z in itertools.combinations(axis, 3))

    best = axis_cost(tuple(range(1, n + 1)))
    best = min(best, axis_cost(tuple(range(n, 0, -1))))
    placed: list[int] = []
    used = [False] * (n + 1)

    def descend(acc: int) -> None:
        nonlocal best
        if acc >= best:
            return
        if len(placed) == n:
            best = acc
            return
        k = len(placed)
        options = []
        for z in range(1, n + 1):
            if used[z]:
                continue
            inc = 0
            for p in range(k):
                x = placed[p]
                for q in range(p + 1, k):
                    inc += cost[x, placed[q], z]
            options.append((inc, z))
        options.sort()
        for inc, z in options:
            if acc + inc >= best:
                break
            used[z] = True
            placed.append(z)
            descend(acc + int(inc))
            placed.pop()
            used[z] = False

    descend(0)
    return int(best)


def min_non_13_31_bruteforce(d: Domain) -> int:
    """Reference: relabel by every permutation and count triples directly."""
    good = {NeverRule(1, 3), NeverRule(3, 1)}
    best = None
    for pi in itertools.permutations(range(1, d.n + 1)):
        rules = extract_rules(relabel(d, pi))
        count = sum(1 for s in rules.values() if not (s & good))
        best = count if best is None else min(best, count)
    return best


def _record_size(records, k: int) -> int:
    if hasattr(records, "best_size"):
        size = records.best_size(k)
    else:
        size = records.get(k) if isinstance(records, Mapping) else None
    if size is None:
        raise IncompleteRecords(f"no record size for k={k}")
    return int(size)


def subdomain_census(d: Domain, records, ks: Iterable[int] | None = None) -> dict[int, int]:
    """For each ``k``, how many ``k``-subsets restrict ``d`` to a domain of record size."""
    if ks is None:
        ks = range(3, d.n)
    out = {}
    for k in ks:
        if not 1 <= k < d.n:
            raise InvalidArgument(f"k must lie in 1..{d.n - 1}")
        target = _record_size(records, k)
        subsets = np.array(list(itertools.combinations(range(1, d.n + 1), k)), dtype=np.int64)
        out[k] = int((restriction_sizes(d, subsets) == target).sum())
    return out


@dataclass
class PropertyReport:
    size: int
    is_peak_pit: bool | None = None
    has_max_width: bool | None = None
    is_copious: bool | None = None
    is_ample: bool | None = None
    abundance: dict[int, int] = field(default_factory=dict)
    core_size: int | None = None
    self_dual: bool | None = None
    connected: bool | None = None
    diameter: int | None = None
    first_last: tuple[int, int] | None = None
    min_2n1_2n3: int | None = None

    def items(self) -> list[tuple[str, object]]:
        out: list[tuple[str, object]] = [("size", self.size)]
        named = [
            ("peak_pit", self.is_peak_pit),
            ("max_width", self.has_max_width),
            ("copious", self.is_copious),
            ("ample", self.is_ample),
        ]
        out += [(k, v) for k, v in named if v is not None]
        out += [(f"abundance.{k}", v) for k, v in sorted(self.abundance.items())]
        tail = [
            ("core_size", self.core_size),
            ("self_dual", self.self_dual),
            ("connected", self.connected),
            ("diameter", self.diameter),
        ]
        out += [(k, v) for k, v in tail if v is not None or k == "diameter" and self.connected is not None]
        if self.first_last is not None:
            out += [("n_first", self.first_last[0]), ("n_last", self.first_last[1])]
        if self.min_2n1_2n3 is not None:
            out.append(("min_2n1_2n3", self.min_2n1_2n3))
        return out

    def to_text(self) -> str:
        def fmt(v):
            if v is None:
                return "undefined"
            if isinstance(v, bool):
                return "true" if v else "false"
            return str(v)

        return "".join(f"{k}={fmt(v)}\n" for k, v in self.items())

    def to_dict(self) -> dict:
        return {k: v for k, v in self.items()}

    @classmethod
    def from_dict(cls, data: Mapping) -> "PropertyReport":
        rep = cls(size=int(data["size"]))
        rep.is_peak_pit = data.get("peak_pit")
        rep.has_max_width = data.get("max_width")
        rep.is_copious = data.get("copious")
        rep.is_ample = data.get("ample")
        rep.abundance = {int(k.split(".")[1]): int(v) for k, v in data.items() if k.startswith("abundance.")}
        rep.core_size = data.get("core_size")
        rep.self_dual = data.get("self_dual")
        rep.connected = data.get("connected")
        rep.diameter = data.get("diameter")
        if "n_first" in data:
            rep.first_last = (int(data["n_first"]), int(data["n_last"]))
        rep.min_2n1_2n3 = data.get("min_2n1_2n3")
        return rep

    @classmethod
    def from_text(cls, text: str) -> "PropertyReport":
        data: dict[str, object] = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            key, _, raw = line.partition("=")
            raw = raw.strip()
            if raw in ("true", "false"):
                val: object = raw == "true"
            elif raw == "undefined":
                val = None
            else:
                val = int(raw)
            data[key.strip()] = val
        return cls.from_dict(data)


ALL_PROPERTIES = (
    "peak_pit", "max_width", "copious", "ample", "abundance",
    "core", "self_dual", "connectivity", "first_last", "min_2n1_2n3",
)
CHEAP_PROPERTIES = tuple(p for p in ALL_PROPERTIES if p != "min_2n1_2n3")


def property_report(d: Domain, props: Iterable[str] = ALL_PROPERTIES, abundance_ks: Iterable[int] | None = None) -> PropertyReport:
    props = set(props)
    unknown = props - set(ALL_PROPERTIES)
    if unknown:
        raise InvalidArgument(f"unknown properties: {sorted(unknown)}")
    rep = PropertyReport(size=len(d))
    condorcet = is_condorcet(d)
    if "peak_pit" in props and condorcet:
        rep.is_peak_pit = is_peak_pit(d)
    if "max_width" in props:
        rep.has_max_width = has_maximum_width(d)
    if "copious" in props:
        rep.is_copious = is_copious(d)
    if "ample" in props:
        rep.is_ample = is_ample(d)
    if "abundance" in props and d.n >= 2:
        ks = abundance_ks if abundance_ks is not None else range(2, min(d.n, 5) + 1)
        rep.abundance = {k: abundance_profile(d, k) for k in ks}
    if "core" in props:
        # the core depends on the labelling; report it for the canonical one
        rep.core_size = len(core(canonical_form(d).domain())) if len(d) else 0
    if "self_dual" in props:
        rep.self_dual = is_self_dual(d)
    if "connectivity" in props and len(d):
        rep.connected, rep.diameter = connectivity_and_diameter(d)
    if "first_last" in props and len(d):
        rep.first_last = first_last_counts(d)
    if "min_2n1_2n3" in props and condorcet:
        rep.min_2n1_2n3 = min_non_13_31(d)
    return rep
