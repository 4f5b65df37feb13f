"""Agents, orderings, coalitions, partitions and friendship-graph analytics."""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from math import inf
from typing import Iterable, Iterator, Sequence

Coalition = frozenset
Partition = tuple  # tuple[frozenset[int], ...], normalized by ``make_partition``


class Comparison(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1

    @classmethod
    def of(cls, a, b) -> "Comparison":
        if a < b:
            return cls.LESS
        if a > b:
            return cls.GREATER
        return cls.EQUAL


@dataclass(frozen=True)
class OrderingProfile:
    """Per-agent weak orders over friends, best class first.

    Everything listed in ``rankings[i]`` is a friend of ``i`` and strictly
    above ``i``; every unlisted agent is an enemy and strictly below ``i``.
    """

    n: int
    rankings: tuple
    labels: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("agent count must be non-negative")
        if len(self.rankings) != self.n:
            raise ValueError(f"expected {self.n} rankings, got {len(self.rankings)}")
        rankings = []
        for i, ranking in enumerate(self.rankings):
            classes = []
            seen: set[int] = set()
            for cls in ranking:
                cls = frozenset(int(j) for j in cls)
                if not cls:
                    raise ValueError(f"agent {i}: empty equivalence class")
                for j in cls:
                    if not 0 <= j < self.n:
                        raise ValueError(f"agent {i}: friend {j} out of range")
                    if j == i:
                        raise ValueError(f"agent {i} ranks itself")
                    if j in seen:
                        raise ValueError(f"agent {i}: agent {j} appears twice")
                    seen.add(j)
                classes.append(cls)
            rankings.append(tuple(classes))
        object.__setattr__(self, "rankings", tuple(rankings))
        labels = tuple(self.labels) if self.labels else tuple([None] * self.n)
        if len(labels) != self.n:
            raise ValueError("labels must align with agents")
        object.__setattr__(self, "labels", labels)

        friends = []
        class_of = []
        for ranking in self.rankings:
            idx = {}
            for c, cls in enumerate(ranking):
                for j in cls:
                    idx[j] = c
            class_of.append(idx)
            friends.append(frozenset(idx))
        object.__setattr__(self, "_friends", tuple(friends))
        object.__setattr__(self, "_class_of", tuple(class_of))

    @classmethod
    def from_lists(cls, lists: Sequence[Sequence], labels: Sequence = ()) -> "OrderingProfile":
        """Build from per-agent lists; an entry is an agent or a collection of tied agents."""
        rankings = []
        for ranking in lists:
            rankings.append(tuple(
                frozenset(entry) if isinstance(entry, (set, frozenset, list, tuple)) else frozenset([entry])
                for entry in ranking
            ))
        return cls(len(rankings), tuple(rankings), tuple(labels))

    def friends(self, i: int) -> frozenset:
        return self._friends[i]

    def enemies(self, i: int) -> frozenset:
        return frozenset(range(self.n)) - self._friends[i] - {i}

    def num_classes(self, i: int) -> int:
        return len(self.rankings[i])

    def class_index(self, i: int, j: int) -> int | None:
        """Position of friend ``j`` in ``i``'s ranking (0 = best), None otherwise."""
        return self._class_of[i].get(j)

    def level(self, i: int, j: int) -> int:
        """Integer height of ``j`` in ``i``'s order: friends >= 1 (bottom class is 1), self 0, enemies -1."""
        if j == i:
            return 0
        c = self._class_of[i].get(j)
        if c is None:
            return -1
        return len(self.rankings[i]) - c

    def prefers(self, i: int, j: int, k: int) -> Comparison:
        """Compare ``j`` and ``k`` under agent ``i``'s ordering."""
        return Comparison.of(self.level(i, j), self.level(i, k))

    @property
    def is_strict(self) -> bool:
        return all(len(c) == 1 for r in self.rankings for c in r)

    @property
    def is_mutual(self) -> bool:
        return all(i in self._friends[j] for i in range(self.n) for j in self._friends[i])

    def max_friends(self) -> int:
        return max((len(f) for f in self._friends), default=0)


def make_partition(blocks: Iterable[Iterable[int]]) -> Partition:
    """Normalize blocks into a canonical tuple of frozensets ordered by smallest member."""
    out = [frozenset(int(a) for a in b) for b in blocks]
    out.sort(key=lambda b: min(b) if b else -1)
    return tuple(out)


def block_index(partition: Partition, n: int) -> list:
    """Map each agent to its block."""
    where = [None] * n
    for b in partition:
        for a in b:
            where[a] = b
    return where


def validate_partition(partition: Iterable[Iterable[int]], n: int) -> str | None:
    """Return None when ``partition`` is a disjoint cover of 0..n-1, else a violation description."""
    seen: set[int] = set()
    for block in partition:
        block = list(block)
        if not block:
            return "empty block"
        for a in block:
            if not isinstance(a, int) or not 0 <= a < n:
                return f"agent {a} out of range"
            if a in seen:
                return f"agent {a} duplicated"
            seen.add(a)
    for a in range(n):
        if a not in seen:
            return f"agent {a} missing"
    return None


def restricted_growth_strings(n: int) -> Iterator[list]:
    """Yield every restricted growth string of length ``n`` in lexicographic order.

    The yielded list is reused between iterations; copy it if you keep it.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    a = [0] * n
    b = [1] * n  # b[k] = 1 + max(a[:k])
    while True:
        yield a
        k = n - 1
        while k > 0 and a[k] == b[k]:
            k -= 1
        if k == 0:
            return
        a[k] += 1
        for m in range(k + 1, n):
            a[m] = 0
            b[m] = max(b[m - 1], a[m - 1] + 1)


def partitions_iter(n: int) -> Iterator[Partition]:
    """Every set partition of {0..n-1} exactly once, in restricted-growth-string order."""
    for rgs in restricted_growth_strings(n):
        blocks: list[list[int]] = [[] for _ in range(max(rgs) + 1)]
        for agent, label in enumerate(rgs):
            blocks[label].append(agent)
        yield tuple(frozenset(b) for b in blocks)


def bell(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


# --- friendship graph -------------------------------------------------------

@dataclass(frozen=True)
class FriendshipGraph:
    """Undirected reciprocal-friendship graph plus the one-sided directed arcs."""

    n: int
    adj: tuple  # tuple[frozenset[int], ...]
    arcs: frozenset  # directed (i, j) with j in F_i

    def edges(self) -> list:
        return sorted((i, j) for i in range(self.n) for j in self.adj[i] if i < j)

    def neighbors(self, i: int) -> frozenset:
        return self.adj[i]

    def one_sided(self) -> list:
        return sorted((i, j) for (i, j) in self.arcs if (j, i) not in self.arcs)

    def to_dot(self) -> str:
        lines = ["graph friendship {"]
        lines += [f"  {i};" for i in range(self.n)]
        lines += [f"  {i} -- {j};" for i, j in self.edges()]
        for i, j in self.one_sided():
            lines.append(f"  {i} -- {j} [style=dashed, dir=forward];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def friendship_graph(profile: OrderingProfile) -> FriendshipGraph:
    adj = []
    arcs = set()
    for i in range(profile.n):
        adj.append(frozenset(j for j in profile.friends(i) if i in profile.friends(j)))
        arcs.update((i, j) for j in profile.friends(i))
    return FriendshipGraph(profile.n, tuple(adj), frozenset(arcs))


def underlying_graph(profile: OrderingProfile) -> FriendshipGraph:
    """Graph with an edge whenever either agent lists the other (one-sided friendships included)."""
    adj = [set() for _ in range(profile.n)]
    for i in range(profile.n):
        for j in profile.friends(i):
            adj[i].add(j)
            adj[j].add(i)
    return FriendshipGraph(
        profile.n, tuple(frozenset(a) for a in adj),
        frozenset((i, j) for i in range(profile.n) for j in profile.friends(i)),
    )


@dataclass(frozen=True)
class GraphStats:
    max_degree: int
    girth: float  # math.inf for forests
    bipartite: bool
    mutual: bool

    def to_dict(self) -> dict:
        return {
            "max_degree": self.max_degree,
            "girth": None if self.girth == inf else int(self.girth),
            "bipartite": self.bipartite,
            "mutual": self.mutual,
        }


def _bfs(graph: FriendshipGraph, source: int) -> list:
    dist = [inf] * graph.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in graph.adj[u]:
            if dist[v] == inf:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def distance(graph: FriendshipGraph, i: int, j: int) -> float:
    """Hop count of a shortest path, ``math.inf`` when disconnected."""
    if i == j:
        return 0
    return _bfs(graph, i)[j]


def girth(graph: FriendshipGraph) -> float:
    best = inf
    for s in range(graph.n):
        dist = [inf] * graph.n
        parent = [-1] * graph.n
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for v in graph.adj[u]:
                if dist[v] == inf:
                    dist[v] = dist[u] + 1
                    parent[v] = u
                    queue.append(v)
                elif parent[u] != v:
                    best = min(best, dist[u] + dist[v] + 1)
    return best


def is_bipartite(graph: FriendshipGraph) -> bool:
    color = [-1] * graph.n
    for s in range(graph.n):
        if color[s] != -1:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in graph.adj[u]:
                if color[v] == -1:
                    color[v] = 1 - color[u]
                    queue.append(v)
                elif color[v] == color[u]:
                    return False
    return True


def chordless_four_cycles(graph: FriendshipGraph) -> list:
    """All induced 4-cycles, each reported once as (a, b, c, d) with a the smallest vertex."""
    found = set()
    adj = graph.adj
    for a in range(graph.n):
        for b in adj[a]:
            for d in adj[a]:
                if b >= d or b in adj[d]:
                    continue
                for c in (adj[b] & adj[d]) - {a}:
                    if c in adj[a]:
                        continue
                    cyc = (a, b, c, d)
                    if a == min(cyc):
                        found.add(cyc)
    return sorted(found)


def graph_stats(graph: FriendshipGraph) -> GraphStats:
    mutual = all((j, i) in graph.arcs for (i, j) in graph.arcs)
    return GraphStats(
        max_degree=max((len(a) for a in graph.adj), default=0),
        girth=girth(graph),
        bipartite=is_bipartite(graph),
        mutual=mutual,
    )
