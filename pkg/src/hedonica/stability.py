"""Deviation semantics and stability decisions for CR, SCR, NS, IS, SNS, SSNS and SIS.

Small games (n <= 12) are decided through a dense rank table over all
coalitions; group concepts are exhaustive up to n = 9 using the partition
space.  Larger games fall back to the bounded searches in ``_bounded``.
"""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np

from . import _bounded
from .model import Comparison, Partition, block_index, make_partition, partitions_iter, validate_partition

TABLE_CAP = 12
GROUP_EXACT_CAP = 9
DEFAULT_MAX_SIZE = 7
DEFAULT_MAX_H = 4


class Concept(str, enum.Enum):
    CR = "cr"
    SCR = "scr"
    NS = "ns"
    IS = "is"
    SNS = "sns"
    SSNS = "ssns"
    SIS = "sis"

    @classmethod
    def parse(cls, tag) -> "Concept":
        return tag if isinstance(tag, Concept) else cls(str(tag).strip().lower())

    @property
    def group(self) -> bool:
        return self in (Concept.SNS, Concept.SSNS, Concept.SIS)


class CapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class Deviation:
    deviators: frozenset
    successor: Partition

    def to_dict(self) -> dict:
        return {"deviators": sorted(self.deviators), "successor": [sorted(b) for b in self.successor]}


@dataclass
class StabilityReport:
    concept: Concept
    stable: bool
    witness: dict | None
    search_bounds: dict = field(default_factory=dict)
    exhaustive: bool = True
    elapsed_ms: float = 0.0

    def to_dict(self) -> dict:
        return {
            "concept": self.concept.value,
            "stable": self.stable,
            "witness": self.witness,
            "bounds": self.search_bounds,
            "exhaustive": self.exhaustive,
            "elapsed_ms": round(self.elapsed_ms, 3),
        }


def _check_partition(partition, n) -> Partition:
    partition = make_partition(partition)
    problem = validate_partition(partition, n)
    if problem:
        raise ValueError(f"invalid partition: {problem}")
    return partition


# --- dense rank table ---------------------------------------------------------------

class RankTable:
    """``rank[i, mask]`` is the dense rank of coalition ``mask`` in agent i's preorder (-1 if i not in mask)."""

    def __init__(self, game):
        n = game.n
        if n > TABLE_CAP:
            raise CapExceeded(f"rank table needs n <= {TABLE_CAP}")
        self.n = n
        size = 1 << n
        self.rank = np.full((n, size), -1, dtype=np.int32)
        masks = np.arange(size)
        self.member = ((masks[None, :] >> np.arange(n)[:, None]) & 1).astype(bool)
        self.popcount = self.member.sum(axis=0)
        for i in range(n):
            bit = 1 << i
            cols = [m for m in range(size) if m & bit]
            keys = [game.key(i, _members(m)) for m in cols]
            order = sorted(set(keys))
            pos = {k: r for r, k in enumerate(order)}
            self.rank[i, cols] = [pos[k] for k in keys]


def _members(mask: int) -> frozenset:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def _mask(coalition: Iterable[int]) -> int:
    m = 0
    for a in coalition:
        m |= 1 << a
    return m


def rank_table(game) -> RankTable:
    table = getattr(game, "_rank_table", None)
    if table is None:
        table = RankTable(game)
        try:
            game._rank_table = table
        except AttributeError:
            pass
    return table


@dataclass
class PartitionSpace:
    """All partitions of n agents with per-agent block masks and pair-togetherness bitmasks."""

    n: int
    partitions: list
    agent_mask: np.ndarray  # (P, n) block mask of each agent
    together: np.ndarray  # (P,) uint64 bitmask over agent pairs
    incident: np.ndarray  # (n,) uint64 pairs touching agent i
    index: dict


@lru_cache(maxsize=4)
def partition_space(n: int) -> PartitionSpace:
    if n > GROUP_EXACT_CAP:
        raise CapExceeded(f"partition space needs n <= {GROUP_EXACT_CAP}")
    pair_bit = {}
    for i in range(n):
        for j in range(i + 1, n):
            pair_bit[(i, j)] = len(pair_bit)
    incident = np.zeros(n, dtype=np.uint64)
    for (i, j), b in pair_bit.items():
        incident[i] |= np.uint64(1 << b)
        incident[j] |= np.uint64(1 << b)
    parts = list(partitions_iter(n))
    agent_mask = np.zeros((len(parts), n), dtype=np.int64)
    together = np.zeros(len(parts), dtype=np.uint64)
    index = {}
    for p, part in enumerate(parts):
        t = 0
        for block in part:
            m = _mask(block)
            members = sorted(block)
            for a in members:
                agent_mask[p, a] = m
            for x in range(len(members)):
                for y in range(x + 1, len(members)):
                    t |= 1 << pair_bit[(members[x], members[y])]
        together[p] = np.uint64(t)
        index[make_partition(part)] = p
    return PartitionSpace(n, parts, agent_mask, together, incident, index)


def _space_ranks(game, space: PartitionSpace) -> np.ndarray:
    cached = getattr(game, "_space_ranks", None)
    if cached is not None:
        return cached
    table = rank_table(game)
    ranks = table.rank[np.arange(space.n)[None, :], space.agent_mask]
    try:
        game._space_ranks = ranks
    except AttributeError:
        pass
    return ranks


# --- blocking coalitions ------------------------------------------------------------

def _blocking_from_table(table: RankTable, current: np.ndarray, strict_core: bool, max_size: int):
    rank = table.rank
    cur = current[:, None]
    within = table.popcount <= max_size
    within[0] = False
    outside = ~table.member
    if strict_core:
        weak = np.all((rank >= cur) | outside, axis=0)
        some = np.any((rank > cur) & table.member, axis=0)
        ok = weak & some & within
    else:
        ok = np.all((rank > cur) | outside, axis=0) & within
    hits = np.flatnonzero(ok)
    return None if hits.size == 0 else _members(int(hits[0]))


def find_blocking_coalition(game, partition, strict_core: bool = False, max_size: int | None = None):
    """A coalition blocking ``partition`` (all strictly better, or for the strict core all weakly with one strict)."""
    n = game.n
    partition = _check_partition(partition, n)
    max_size = n if max_size is None else min(max_size, n)
    if n <= TABLE_CAP:
        table = rank_table(game)
        where = block_index(partition, n)
        current = np.array([table.rank[i, _mask(where[i])] for i in range(n)])
        return _blocking_from_table(table, current, strict_core, max_size)
    return _bounded.bounded_blocking(game, partition, strict_core, max_size)


# --- single-agent deviations ----------------------------------------------------------

def find_single_deviation(game, partition, kind: Concept | str = Concept.NS):
    """First (agent, target) with T + {i} preferred to pi(i); IS also needs every member of T to welcome i.

    The target is a block of ``partition`` or the empty frozenset (going alone).
    """
    kind = Concept.parse(kind)
    if kind not in (Concept.NS, Concept.IS):
        raise ValueError("single deviations are NS or IS")
    n = game.n
    partition = _check_partition(partition, n)
    where = block_index(partition, n)
    for i in range(n):
        own = where[i]
        now = game.key(i, own)
        targets = [b for b in partition if b is not own]
        if len(own) > 1:
            targets.append(frozenset())
        for t in targets:
            joined = t | {i}
            if game.key(i, joined) <= now:
                continue
            if kind is Concept.IS and any(game.compare(j, joined, t) is Comparison.LESS for j in t):
                continue
            return i, t
    return None


def apply_move(partition: Partition, agent: int, target: frozenset) -> Partition:
    blocks = []
    for b in partition:
        if agent in b:
            b = b - {agent}
        if b == target - {agent} and target:
            b = b | {agent}
        if b:
            blocks.append(b)
    if not target:
        blocks.append(frozenset((agent,)))
    return make_partition(blocks)


# --- group deviations ---------------------------------------------------------------

def obtainable(partition, deviators: Iterable[int], successor) -> bool:
    """True iff non-deviators are together in ``successor`` exactly when they were in ``partition``."""
    partition = make_partition(partition)
    successor = make_partition(successor)
    agents = sorted(set().union(*partition)) if partition else []
    h = set(deviators)
    before = {a: b for b in partition for a in b}
    after = {a: b for b in successor for a in b}
    stay = [a for a in agents if a not in h]
    for x in range(len(stay)):
        for y in range(x + 1, len(stay)):
            i, j = stay[x], stay[y]
            if (j in before[i]) != (j in after[i]):
                return False
    return True


def verify_group_deviation(game, partition, deviators, successor, kind: Concept | str) -> bool:
    """Independent check that (deviators, successor) is a valid deviation of the given kind."""
    kind = Concept.parse(kind)
    n = game.n
    partition = _check_partition(partition, n)
    successor = _check_partition(successor, n)
    h = frozenset(deviators)
    if not h or not obtainable(partition, h, successor):
        return False
    before = block_index(partition, n)
    after = block_index(successor, n)
    cmp = [game.compare(i, after[i], before[i]) for i in range(n)]
    if kind is Concept.SSNS:
        return all(cmp[i] >= 0 for i in h) and any(cmp[i] > 0 for i in h)
    if not all(cmp[i] > 0 for i in h):
        return False
    if kind is Concept.SIS:
        return all(cmp[j] >= 0 for j in range(n) if j not in h)
    return True


def _scan_row(space: PartitionSpace, ranks: np.ndarray, row: int, kind: Concept):
    r0 = ranks[row]
    better = ranks > r0
    worse = ranks < r0
    dev = ~worse if kind is Concept.SSNS else better
    cover = np.bitwise_or.reduce(np.where(dev, space.incident[None, :], np.uint64(0)), axis=1)
    changed = space.together ^ space.together[row]
    ok = ((changed & ~cover) == 0) & better.any(axis=1)
    if kind is Concept.SIS:
        ok &= ~worse.any(axis=1)
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        return None
    q = int(hits[0])
    moved = [i for i in range(space.n) if dev[q, i] and (int(changed[q]) & int(space.incident[i]))]
    return Deviation(frozenset(moved), make_partition(space.partitions[q]))


def find_group_deviation(game, partition, kind: Concept | str, max_size: int | None = None,
                         max_h: int | None = None):
    """A group deviation of the given kind, or None.

    Up to n = 9 (with no bounds given) every successor partition is
    examined: a successor admits a valid deviator set iff the agents
    eligible to deviate touch every pair whose togetherness changed.
    Otherwise the bounded search caps |H| and the size of new blocks.
    """
    kind = Concept.parse(kind)
    if not kind.group:
        raise ValueError("group deviations are SNS, SSNS or SIS")
    n = game.n
    partition = _check_partition(partition, n)
    if n <= GROUP_EXACT_CAP and max_size is None and max_h is None:
        space = partition_space(n)
        return _scan_row(space, _space_ranks(game, space), space.index[partition], kind)
    max_size = DEFAULT_MAX_SIZE if max_size is None else max_size
    max_h = DEFAULT_MAX_H if max_h is None else max_h
    found = _bounded.bounded_group_deviation(game, partition, kind, max_size, max_h)
    if found is None:
        return None
    h, succ = found
    return Deviation(frozenset(h), make_partition(succ))


# --- dispatch -------------------------------------------------------------------------

def is_stable(game, partition, concept: Concept | str, max_size: int | None = None,
              max_h: int | None = None) -> StabilityReport:
    concept = Concept.parse(concept)
    start = time.perf_counter()
    n = game.n
    partition = _check_partition(partition, n)
    witness = None
    bounds: dict = {}
    exhaustive = True
    if concept in (Concept.CR, Concept.SCR):
        size = n if max_size is None else min(max_size, n)
        if n > TABLE_CAP and max_size is None:
            size = min(DEFAULT_MAX_SIZE, n)
        bounds = {"max_size": size}
        exhaustive = size >= n
        s = find_blocking_coalition(game, partition, concept is Concept.SCR, size)
        if s is not None:
            witness = {"blocking_coalition": sorted(s)}
    elif concept in (Concept.NS, Concept.IS):
        move = find_single_deviation(game, partition, concept)
        if move is not None:
            agent, target = move
            witness = {"agent": agent, "target": sorted(target),
                       "successor": [sorted(b) for b in apply_move(partition, agent, target)]}
    else:
        if n <= GROUP_EXACT_CAP and max_size is None and max_h is None:
            dev = find_group_deviation(game, partition, concept)
        else:
            ms = DEFAULT_MAX_SIZE if max_size is None else max_size
            mh = DEFAULT_MAX_H if max_h is None else max_h
            bounds = {"max_size": ms, "max_h": mh}
            exhaustive = False
            dev = find_group_deviation(game, partition, concept, ms, mh)
        if dev is not None:
            witness = dev.to_dict()
    return StabilityReport(concept, witness is None, witness, bounds, exhaustive,
                           (time.perf_counter() - start) * 1000)


def exists_stable(game, concept: Concept | str):
    """First stable partition in restricted-growth order, or None when none exists."""
    concept = Concept.parse(concept)
    n = game.n
    cap = GROUP_EXACT_CAP if concept.group else TABLE_CAP
    if n > cap:
        raise CapExceeded(f"exhaustive {concept.value}-existence is capped at n={cap}")
    if concept.group:
        space = partition_space(n)
        ranks = _space_ranks(game, space)
        table = rank_table(game)
        for row, part in enumerate(space.partitions):
            if _quick_group_deviation(table, space, ranks, row, concept):
                continue
            if _scan_row(space, ranks, row, concept) is None:
                return make_partition(part)
        return None
    table = rank_table(game)
    rank = table.rank
    for part in partitions_iter(n):
        masks = [_mask(b) for b in part]
        own = [0] * n
        for m in masks:
            for a in _members(m):
                own[a] = m
        current = np.array([rank[i, own[i]] for i in range(n)])
        if concept in (Concept.CR, Concept.SCR):
            if _blocking_from_table(table, current, concept is Concept.SCR, n) is None:
                return make_partition(part)
            continue
        if not _has_single_move(rank, masks, own, current, concept):
            return make_partition(part)
    return None


def _has_single_move(rank, masks, own, current, concept) -> bool:
    n = len(own)
    for i in range(n):
        bit = 1 << i
        options = [m for m in masks if m != own[i]]
        if own[i] != bit:
            options.append(0)
        for t in options:
            joined = t | bit
            if rank[i, joined] <= current[i]:
                continue
            if concept is Concept.IS:
                rest = _members(t)
                if any(rank[j, joined] < rank[j, t] for j in rest):
                    continue
            return True
    return False


def _quick_group_deviation(table, space, ranks, row, concept) -> bool:
    """Cheap sufficient test: a single NS/IS move or a carved-out blocking coalition."""
    n = space.n
    own = [int(m) for m in space.agent_mask[row]]
    current = ranks[row]
    rank = table.rank
    masks = sorted(set(own))
    if concept is not Concept.SIS:
        if _has_single_move(rank, masks, own, current, Concept.NS):
            return True
        return _blocking_from_table(table, current, concept is Concept.SSNS, n) is not None
    for i in range(n):
        bit = 1 << i
        for t in [m for m in masks if m != own[i]] + ([0] if own[i] != bit else []):
            joined = t | bit
            if rank[i, joined] <= current[i]:
                continue
            left = own[i] & ~bit
            if any(rank[j, joined] < rank[j, t] for j in _members(t)):
                continue
            if any(rank[j, left] < current[j] for j in _members(left)):
                continue
            return True
    return False


# --- dynamics -------------------------------------------------------------------------

@dataclass
class DynamicsOutcome:
    status: str  # "stabilized" | "budget_exhausted"
    partition: Partition
    steps: int
    cycle_length: int | None = None

    def to_dict(self) -> dict:
        return {"status": self.status, "partition": [sorted(b) for b in self.partition],
                "steps": self.steps, "cycle_length": self.cycle_length}


def run_dynamics(game, concept: Concept | str, start, budget: int = 10_000) -> DynamicsOutcome:
    """Apply the first NS/IS deviation repeatedly until stable or ``budget`` steps are spent."""
    concept = Concept.parse(concept)
    current = _check_partition(start, game.n)
    seen = {current: 0}
    cycle = None
    for step in range(budget):
        move = find_single_deviation(game, current, concept)
        if move is None:
            return DynamicsOutcome("stabilized", current, step)
        current = apply_move(current, *move)
        if cycle is None:
            if current in seen:
                cycle = step + 1 - seen[current]
            else:
                seen[current] = step + 1
    if find_single_deviation(game, current, concept) is None:
        return DynamicsOutcome("stabilized", current, budget)
    return DynamicsOutcome("budget_exhausted", current, budget, cycle)
