"""Exhaustive enumeration of small maximal domains and the inductive extension n -> n+1.

The extension embeds rule assignments on ``[n]`` into ``[n+1]`` with one
alternative left out, merges pairs of embeddings (leaving ``i`` and ``j`` out)
that agree on every triple avoiding both, and completes the ``n-1`` triples
``{i, j, k}`` by backtracking over the allowed rules.
"""

from __future__ import annotations

import hashlib
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .canonical import dedup
from .orders import Domain, InvalidArgument, all_orders
from .rules import (
    ALL_RULES,
    PEAK_PIT_RULES,
    RULE_FORBIDS,
    SATISFIED,
    SEARCH_RULES,
    NeverRule,
    RuleAssignment,
    assignment_for,
    codes_from_positions,
    generate_from_forbidden,
    is_maximal,
    triple_index,
    triples,
)

log = logging.getLogger(__name__)

WORKERS_ENV = "CONDORCET_WORKERS"


class Infeasible(RuntimeError):
    """The requested search is beyond what this implementation will attempt."""


def _rule_set(rules: Iterable[NeverRule | str]) -> tuple[NeverRule, ...]:
    out = []
    for r in rules:
        out.append(NeverRule.parse(r) if isinstance(r, str) else NeverRule(*r))
    if not out:
        raise InvalidArgument("allowed rule set is empty")
    return tuple(sorted(set(out)))


def default_workers() -> int:
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


# ---------------------------------------------------------------- exhaustive


def _closed_under_relabelling(allowed: Sequence[NeverRule]) -> bool:
    # relabelling permutes the axis rank i inside a triple and keeps position j
    js = {r.j for r in allowed}
    return set(allowed) == {NeverRule(i, j) for i in (1, 2, 3) for j in js}


def exhaustive_maximal(
    n: int,
    allowed_rules: Iterable[NeverRule | str] = ALL_RULES,
    *,
    symmetry: bool = True,
) -> list[Domain]:
    """All maximal Condorcet domains generated by complete assignments over ``allowed_rules``.

    Returns one canonical representative per isomorphism class, largest first.

    Triples are assigned in lexicographic order. When the current order set
    already satisfies an allowed rule on the next triple, only that rule is
    branched on: any other choice yields a subset of a domain reachable this
    way, which cannot be maximal unless it is that domain. With ``symmetry``
    the first triple only takes rules of the form ``1Nj``; this is valid when
    the allowed set is closed under relabelling.
    """
    allowed = _rule_set(allowed_rules)
    peak_pit_only = set(allowed) <= set(PEAK_PIT_RULES)
    limit = 6 if peak_pit_only else 5
    if n > limit:
        raise Infeasible(f"exhaustive search is limited to n <= {limit} for this rule set")
    if n < 3:
        return [Domain.full(n)]
    everything = all_orders(n)
    codes = codes_from_positions(Domain.full(n).positions, n).astype(np.int64)
    bits = np.left_shift(1, codes)
    T = codes.shape[1]
    ok = np.stack(
        [np.stack([(bits[:, t] & RULE_FORBIDS[r.index]) == 0 for r in allowed]) for t in range(T)]
    )
    allowed_mask = sum(1 << r.index for r in allowed)
    use_symmetry = symmetry and _closed_under_relabelling(allowed)
    first_choices = [k for k, r in enumerate(allowed) if (r.i == 1 or not use_symmetry)]

    leaves: dict[bytes, np.ndarray] = {}

    def descend(t: int, mask: np.ndarray) -> None:
        if not mask.any():
            return
        if t == T:
            key = np.packbits(mask).tobytes()
            if key not in leaves:
                leaves[key] = mask
            return
        present = int(np.bitwise_or.reduce(bits[mask, t]))
        held = int(SATISFIED[present]) & allowed_mask
        if held:
            descend(t + 1, mask)
            return
        choices = first_choices if t == 0 else range(len(allowed))
        # a branch cutting a strict superset of a sibling's arrangements only
        # reaches subsets of that sibling's leaves; equal cuts are duplicates
        cuts = {k: int(RULE_FORBIDS[allowed[k].index]) & present for k in choices}
        for k in choices:
            c = cuts[k]
            if any(o != k and cuts[o] & c == cuts[o] and (cuts[o] != c or o < k) for o in choices):
                continue
            descend(t + 1, mask & ok[t, k])

    descend(0, np.ones(everything.shape[0], dtype=bool))
    found = []
    for mask in leaves.values():
        d = Domain._from_sorted(n, everything[mask])
        if is_maximal(d):
            found.append(d)
    return dedup(found)


# ----------------------------------------------------------------- extension


@dataclass(frozen=True)
class Instantiation:
    source: RuleAssignment
    omitted: int
    rules: RuleAssignment


@dataclass(frozen=True)
class PartialAssignment:
    rules: RuleAssignment
    i: int
    j: int

    @property
    def undecided(self) -> list[tuple[int, int, int]]:
        i, j = sorted((self.i, self.j))
        return [tuple(sorted((i, j, k))) for k in range(1, self.rules.n + 1) if k not in (i, j)]


@dataclass
class SearchConfig:
    allowed_rules: tuple[NeverRule, ...] = SEARCH_RULES
    threshold: int | None = None
    pair_mode: str = "all_pairs"
    seeds: list = field(default_factory=list)
    workers: int | None = None
    slack: float = 0.10
    threshold_ratio: float = 2.1
    checkpoint: str | os.PathLike | None = None
    include_duals: bool = True

    def __post_init__(self):
        self.allowed_rules = _rule_set(self.allowed_rules)
        if self.threshold is not None and self.threshold < 1:
            raise InvalidArgument("threshold must be >= 1")
        if self.pair_mode not in ("all_pairs", "shortcut"):
            raise InvalidArgument(f"unknown pair mode {self.pair_mode!r}")


def _embedding(n: int, omitted: int) -> np.ndarray:
    """``emb[a]`` is the image of ``a`` in ``[n+1] - {omitted}`` (order preserving)."""
    emb = np.zeros(n + 1, dtype=np.int64)
    for a in range(1, n + 1):
        emb[a] = a if a < omitted else a + 1
    return emb


def instantiate(seed: RuleAssignment, omitted: int) -> Instantiation:
    n = seed.n
    if not 1 <= omitted <= n + 1:
        raise InvalidArgument(f"omitted alternative must lie in 1..{n + 1}")
    emb = _embedding(n, omitted)
    rules = {tuple(int(emb[x]) for x in t): r for t, r in seed.rules.items()}
    return Instantiation(seed, omitted, RuleAssignment(n + 1, rules))


def merge_compatible(x: Instantiation, y: Instantiation) -> PartialAssignment | None:
    if x.omitted == y.omitted:
        raise InvalidArgument("instantiations must omit different alternatives")
    merged = dict(x.rules.rules)
    for t, r in y.rules.rules.items():
        if t in merged and merged[t] != r:
            return None
        merged[t] = r
    return PartialAssignment(RuleAssignment(x.rules.n, merged), x.omitted, y.omitted)


def _instantiation_arrays(seeds: np.ndarray, n: int, omitted: int) -> np.ndarray:
    """Rule arrays (over triples of ``[n+1]``) of every seed embedded leaving out ``omitted``."""
    emb = _embedding(n, omitted)
    idx_big = triple_index(n + 1)
    target = np.array([idx_big[tuple(int(emb[x]) for x in t)] for t in triples(n)], dtype=np.int64)
    out = np.full((seeds.shape[0], len(idx_big)), -1, dtype=np.int64)
    out[:, target] = seeds
    return out


def _complete_arrays(
    n1: int,
    partial: np.ndarray,
    undecided: np.ndarray,
    allowed: np.ndarray,
    threshold: int,
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Backtracking completion of one merged assignment.

    Returns ``(rule_array, orders)`` for every completion whose domain has at
    least ``threshold`` orders and is copious. Branches are cut when the
    order count drops below the threshold (it never grows again) or when a
    decided triple loses one of its four arrangements.
    """
    forbidden = np.zeros(partial.shape[0], dtype=np.int64)
    assigned = partial >= 0
    forbidden[assigned] = RULE_FORBIDS[partial[assigned]]
    base = generate_from_forbidden(n1, forbidden)
    if len(base) < threshold:
        return []
    codes = codes_from_positions(base.positions, n1).astype(np.int64)
    T = codes.shape[1]
    counts = np.zeros((T, 8), dtype=np.int64)
    np.add.at(counts, (np.broadcast_to(np.arange(T), codes.shape), codes), 1)
    decided = assigned.copy()
    if np.any((counts[decided] > 0).sum(axis=1) != 4):
        return []
    bits = np.left_shift(1, codes[:, undecided])
    ok = [[(bits[:, u] & RULE_FORBIDS[r]) == 0 for r in allowed] for u in range(len(undecided))]
    flat_offsets = 8 * np.arange(T)
    results = []
    rules = partial.copy()

    def descend(u: int, mask: np.ndarray, counts: np.ndarray) -> None:
        if u == len(undecided):
            results.append((rules.copy(), base.orders[mask]))
            return
        t = undecided[u]
        decided[t] = True
        for k, r in enumerate(allowed):
            new_mask = mask & ok[u][k]
            size = int(new_mask.sum())
            if size < threshold:
                continue
            removed = np.nonzero(mask & ~ok[u][k])[0]
            if removed.size:
                drop = np.bincount((codes[removed] + flat_offsets).ravel(), minlength=8 * T)
                new_counts = counts - drop.reshape(T, 8)
            else:
                new_counts = counts
            if np.any((new_counts[decided] > 0).sum(axis=1) != 4):
                continue
            rules[t] = r
            descend(u + 1, new_mask, new_counts)
        rules[t] = -1
        decided[t] = False

    descend(0, np.ones(len(base), dtype=bool), counts)
    return results


def complete(p: PartialAssignment, cfg: SearchConfig) -> list[Domain]:
    """Completions of ``p`` over the allowed rules, as domains of size >= threshold."""
    n1 = p.rules.n
    idx = triple_index(n1)
    partial = p.rules.to_array()
    undecided = np.array([idx[t] for t in p.undecided], dtype=np.int64)
    partial[undecided] = -1
    allowed = np.array([r.index for r in cfg.allowed_rules], dtype=np.int64)
    threshold = cfg.threshold if cfg.threshold is not None else 1
    out = _complete_arrays(n1, partial, undecided, allowed, threshold)
    return [Domain._from_sorted(n1, orders) for _, orders in out]


def _pairs(n1: int, mode: str, n: int) -> list[tuple[int, int]]:
    if mode == "shortcut":
        i = n // 2
        return [(i, i + 1)]
    return [(i, j) for i in range(1, n1 + 1) for j in range(1, n1 + 1) if i != j]


def _group(inst: np.ndarray, overlap: np.ndarray) -> dict[bytes, list[int]]:
    groups: dict[bytes, list[int]] = {}
    for k, row in enumerate(inst[:, overlap]):
        groups.setdefault(row.tobytes(), []).append(k)
    return groups


def _key_hash(key: bytes) -> str:
    return hashlib.sha1(key).hexdigest()[:12]


@dataclass
class _Task:
    i: int
    j: int
    key: bytes
    left: np.ndarray
    right: np.ndarray


def _run_task(args) -> list[tuple[np.ndarray, bytes]]:
    n1, task, undecided, allowed, threshold = args
    found: dict[bytes, np.ndarray] = {}
    for x in task.left:
        for y in task.right:
            merged = np.where(x >= 0, x, y)
            for rules, orders in _complete_arrays(n1, merged, undecided, allowed, threshold):
                found.setdefault(orders.tobytes(), rules)
    return [(rules, key) for key, rules in sorted(found.items())]


# reversing every order turns iNj into iN(4-j)
_DUAL_RULE = np.array([NeverRule(r.i, 4 - r.j).index for r in ALL_RULES], dtype=np.int64)


def _seed_arrays(seeds, n: int, include_duals: bool) -> np.ndarray:
    """Unique seed rule arrays, first-seen order, optionally followed by their duals."""
    rows = []
    for s in seeds:
        if isinstance(s, Domain):
            s = assignment_for(s)
        if s.n != n or not s.complete:
            raise InvalidArgument("seeds must be complete assignments on a common n")
        rows.append(s.to_array())
    if include_duals:
        rows += [_DUAL_RULE[r] for r in rows]
    out, seen = [], set()
    for r in rows:
        if r.tobytes() not in seen:
            seen.add(r.tobytes())
            out.append(r)
    return np.array(out, dtype=np.int64).reshape(len(out), -1)


def _load_checkpoint(path: Path) -> dict[tuple[int, int, str], list[np.ndarray]]:
    done: dict[tuple[int, int, str], list[np.ndarray]] = {}
    pending: dict[tuple[int, int, str], list[np.ndarray]] = {}
    if not path.exists():
        return done
    for line in path.read_text().splitlines():
        parts = line.split()
        if len(parts) < 4 or parts[0] != "PARTIAL":
            continue
        i, j = (int(x) for x in parts[1].split(","))
        key = (i, j, parts[2])
        if parts[3] == "DONE":
            done[key] = pending.pop(key, [])
        else:
            arr = np.array([NeverRule.parse(r).index for r in parts[3:]], dtype=np.int64)
            pending.setdefault(key, []).append(arr)
    return done


def extend(seeds=None, cfg: SearchConfig | None = None) -> list[Domain]:
    """Candidate domains on ``[n+1]`` grown from complete assignments on ``[n]``.

    Output: one canonical representative per isomorphism class with size at
    least the threshold, largest first. The result does not depend on the
    worker count.
    """
    cfg = cfg or SearchConfig()
    seeds = list(cfg.seeds if seeds is None else seeds)
    if not seeds:
        raise InvalidArgument("extend needs at least one seed")
    n = seeds[0].n
    seed_arr = _seed_arrays(seeds, n, cfg.include_duals)
    n1 = n + 1
    threshold = cfg.threshold
    if threshold is None:
        best = max(len(generate_from_forbidden(n, RULE_FORBIDS[row])) for row in seed_arr)
        threshold = int(np.ceil(best * cfg.threshold_ratio))
    allowed = np.array([r.index for r in cfg.allowed_rules], dtype=np.int64)
    idx = triple_index(n1)
    tri = triples(n1)

    inst = {i: _instantiation_arrays(seed_arr, n, i) for i in range(1, n1 + 1)}
    tasks: list[_Task] = []
    for i, j in _pairs(n1, cfg.pair_mode, n):
        avoid = ~np.any((tri == i) | (tri == j), axis=1)
        overlap = np.nonzero(avoid)[0]
        gi, gj = _group(inst[i], overlap), _group(inst[j], overlap)
        for key in sorted(gi.keys() & gj.keys()):
            tasks.append(_Task(i, j, key, inst[i][gi[key]], inst[j][gj[key]]))
    log.info("extend %d -> %d: %d seeds, %d groups, threshold %d", n, n1, len(seeds), len(tasks), threshold)

    def undecided_for(task: _Task) -> np.ndarray:
        a, b = sorted((task.i, task.j))
        return np.array([idx[tuple(sorted((a, b, k)))] for k in range(1, n1 + 1) if k not in (a, b)])

    ckpt = Path(cfg.checkpoint) if cfg.checkpoint else None
    done = _load_checkpoint(ckpt) if ckpt else {}
    todo = [t for t in tasks if (t.i, t.j, _key_hash(t.key)) not in done]
    jobs = [(n1, t, undecided_for(t), allowed, threshold) for t in todo]
    workers = cfg.workers or default_workers()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results_iter = pool.map(_run_task, jobs, chunksize=max(1, len(jobs) // (4 * workers)))
            computed = list(results_iter) if not ckpt else _with_checkpoint(ckpt, todo, results_iter)
    else:
        results_iter = map(_run_task, jobs)
        computed = list(results_iter) if not ckpt else _with_checkpoint(ckpt, todo, results_iter)

    domains: dict[bytes, Domain] = {}
    for rules_list in done.values():
        for rules in rules_list:
            d = generate_from_forbidden(n1, RULE_FORBIDS[rules])
            domains.setdefault(d.to_bytes(), d)
    for res in computed:
        for _, key in res:
            if key not in domains:
                arr = np.frombuffer(key, dtype=np.uint8).reshape(-1, n1)
                domains[key] = Domain._from_sorted(n1, arr.copy())
    return dedup(domains.values())


def _with_checkpoint(path: Path, tasks: list[_Task], results_iter) -> list:
    out = []
    with path.open("a") as fh:
        for task, res in zip(tasks, results_iter):
            tag = f"PARTIAL {task.i},{task.j} {_key_hash(task.key)}"
            for rules, _ in res:
                fh.write(tag + " " + " ".join(str(NeverRule.from_index(int(r))) for r in rules) + "\n")
            fh.write(tag + " DONE\n")
            fh.flush()
            out.append(res)
    return out


def select_seeds(domains: Sequence[Domain], slack: float = 0.10) -> list[Domain]:
    """Domains within ``slack`` (relative) of the largest size."""
    if not domains:
        return []
    best = max(len(d) for d in domains)
    cut = best * (1.0 - slack)
    return [d for d in domains if len(d) >= cut]


def bootstrap(start: Sequence[Domain], target_n: int, cfg: SearchConfig | None = None) -> dict[int, list[Domain]]:
    """Repeated extension from ``start`` up to ``target_n``.

    Each level is seeded with the previous level's domains within
    ``cfg.slack`` of its best size. Returns every level's output.
    """
    cfg = cfg or SearchConfig()
    if not start:
        raise InvalidArgument("bootstrap needs starting domains")
    n = start[0].n
    levels = {n: list(start)}
    while n < target_n:
        levels[n + 1] = extend(select_seeds(levels[n], cfg.slack), cfg)
        n += 1
        log.info("level %d: best %d", n, len(levels[n][0]) if levels[n] else 0)
    return levels
