"""Bounded searches for deviations in games too large for exhaustive scans.

Every supported family is enemy-anonymous: the value of S for agent i only
depends on F_i & S and |S|.  An agent's acceptable "profiles" (friend set
inside S, size of S) are therefore enumerable from its own friends, and any
concrete coalition realizing one profile per member is acceptable to all.
"""
from __future__ import annotations

from itertools import combinations

from .model import Comparison, block_index, make_partition


def _friend_subsets(friends, limit):
    friends = sorted(friends)
    for r in range(min(len(friends), limit) + 1):
        for combo in combinations(friends, r):
            yield frozenset(combo)


def _relations(game):
    p = game.profile
    rel = [set(p.friends(i)) for i in range(game.n)]
    for i in range(game.n):
        for j in p.friends(i):
            rel[j].add(i)
    return [frozenset(r) for r in rel]


def _profiles(game, i, own_key, max_size):
    """{A: (strict sizes, weak sizes)} over friend sets A and coalition sizes."""
    p = game.profile
    friends = p.friends(i)
    enemies = sorted(p.enemies(i))
    out = {}
    for a in _friend_subsets(friends, max_size - 1):
        strict, weak = set(), set()
        base = a | {i}
        for s in range(len(base), max_size + 1):
            e = s - len(base)
            if e > len(enemies):
                break
            key = game.key(i, base | frozenset(enemies[:e]))
            if key > own_key:
                strict.add(s)
                weak.add(s)
            elif key == own_key:
                weak.add(s)
        if weak:
            out[a] = (frozenset(strict), frozenset(weak))
    return out


# --- blocking coalitions ---------------------------------------------------------

def bounded_blocking(game, partition, strict_core: bool, max_size: int):
    """Blocking coalition of size <= max_size, exact under enemy anonymity."""
    n = game.n
    where = block_index(partition, n)
    rel = _relations(game)
    prof = []
    for i in range(n):
        table = _profiles(game, i, game.key(i, where[i]), max_size)
        if not strict_core:
            table = {a: (st, st) for a, (st, _) in table.items() if st}
        prof.append(table)
    cand = {i for i in range(n) if prof[i]}
    if not cand:
        return None
    friends = [game.profile.friends(i) for i in range(n)]

    def alive(piece):
        for i in piece:
            inside = friends[i] & piece
            if not any(inside <= a for a in prof[i]):
                return False
        return True

    def sizes_of(piece):
        allowed = None
        strict_at = set()
        for i in piece:
            entry = prof[i].get(friends[i] & piece)
            if entry is None:
                return None, None
            st, wk = entry
            allowed = wk if allowed is None else allowed & wk
            strict_at |= st
            if not allowed:
                return None, None
        allowed = {s for s in allowed if s >= len(piece)}
        return (allowed or None), strict_at

    pieces = []
    crel = {i: rel[i] & cand for i in cand}
    for v in sorted(cand):
        stack = [(frozenset([v]), frozenset(u for u in crel[v] if u > v), frozenset([v]) | crel[v])]
        while stack:
            sub, ext, closed = stack.pop()
            if not alive(sub):
                continue
            allowed, strict_at = sizes_of(sub)
            if allowed:
                if len(sub) in allowed and (not strict_core or len(sub) in strict_at):
                    return sub
                pieces.append((sub, allowed, strict_at))
            if len(sub) >= max_size:
                continue
            ext = set(ext)
            while ext:
                w = ext.pop()
                new_ext = set(ext) | {u for u in crel[w] if u > v and u not in closed}
                stack.append((sub | {w}, frozenset(new_ext), closed | crel[w] | {w}))

    # Combine disjoint, unrelated pieces to a common target size.
    pieces.sort(key=lambda t: (len(t[0]), sorted(t[0])))
    for target in range(2, max_size + 1):
        usable = [pc for pc in pieces if target in pc[1] and len(pc[0]) < target]
        found = _combine(usable, target, strict_core, rel)
        if found is not None:
            return found
    return None


def _combine(pieces, target, strict_core, rel):
    def rec(start, chosen, members, blocked, strict):
        total = len(members)
        if total == target:
            return members if (strict or not strict_core) else None
        for idx in range(start, len(pieces)):
            sub, _, strict_at = pieces[idx]
            if total + len(sub) > target or not sub.isdisjoint(blocked):
                continue
            nb = set(blocked) | sub
            for a in sub:
                nb |= rel[a]
            res = rec(idx + 1, chosen + [idx], members | sub, frozenset(nb), strict or target in strict_at)
            if res is not None:
                return res
        return None

    return rec(0, [], frozenset(), frozenset(), False)


# --- group deviations ------------------------------------------------------------

class _GroupSearch:
    def __init__(self, game, partition, kind, max_size, max_h):
        from .stability import Concept

        self.game = game
        self.n = game.n
        self.partition = partition
        self.kind = kind
        self.strict = kind in (Concept.SNS, Concept.SIS)
        self.sis = kind is Concept.SIS
        self.ssns = kind is Concept.SSNS
        self.max_size = max_size
        self.max_h = max_h
        self.where = block_index(partition, self.n)
        self.cur = [game.key(i, self.where[i]) for i in range(self.n)]
        self.rel = _relations(game)
        self.friends = [game.profile.friends(i) for i in range(self.n)]
        self.seen = set()
        self.budget = 200_000
        self._prof = {}

    def cmp(self, i, block):
        return Comparison.of(self.game.key(i, block), self.cur[i])

    def dev_ok(self, i, block):
        c = self.cmp(i, block)
        return c > 0 if self.strict else c >= 0

    def profiles(self, i):
        if i not in self._prof:
            self._prof[i] = _profiles(self.game, i, self.cur[i], self.max_size)
        return self._prof[i]

    def run(self):
        for d in range(self.n):
            if not any(st for st, _ in self.profiles(d).values()):
                continue
            state = _State(frozenset([d]), (d,), {}, {}, frozenset(), frozenset(), frozenset())
            res = self.dfs(state)
            if res is not None:
                return res
            if self.budget <= 0:
                break
        return None

    def dfs(self, st):
        self.budget -= 1
        if self.budget <= 0:
            return None
        sig = st.signature()
        if sig in self.seen:
            return None
        self.seen.add(sig)
        if not st.pending:
            return self.finalize(st)
        d = st.pending[0]
        for block, roles in self.landings(st, d):
            nxt = self.place(st, d, block, roles)
            if nxt is None:
                continue
            res = self.dfs(nxt)
            if res is not None:
                return res
        return None

    def landings(self, st, d):
        """Candidate landing blocks for pending deviator d, with a role per concrete member."""
        for a, (strict_sizes, weak_sizes) in self.profiles(d).items():
            sizes = strict_sizes if (self.strict or d == self.anchor_of(st)) else weak_sizes
            if not sizes:
                continue
            core = a | {d}
            if not core.isdisjoint(st.placed_all) or not core.isdisjoint(st.remnant_members):
                continue
            for s in sorted(sizes):
                if s < len(core):
                    continue
                for block in self.fill(st, d, core, s):
                    yield from self.assign_roles(st, d, block)

    def anchor_of(self, st):
        return st.anchor

    def fill(self, st, d, core, size):
        """Blocks of exactly ``size`` extending ``core`` without adding friends of d."""
        excluded = self.friends[d] | st.placed_all | st.remnant_members
        results = []

        def frontier(block):
            out = set()
            for m in block:
                out |= self.rel[m]
                out |= self.where[m]
            return sorted(out - block - excluded)

        visited = set()

        def grow(block):
            if block in visited:
                return
            visited.add(block)
            if len(block) == size:
                results.append(block)
                return
            for u in frontier(block):
                grow(block | {u})
            for extra in self.anonymous(st, d, block, size - len(block), excluded):
                results.append(block | extra)

        grow(frozenset(core))
        seen = set()
        for b in results:
            if b not in seen and len(b) == size:
                seen.add(b)
                yield b

    def anonymous(self, st, d, block, k, excluded):
        """Fill k slots with agents unrelated to ``block``: a whole remnant block and/or lone fillers."""
        if k <= 0:
            return []
        near = set(block)
        for m in block:
            near |= self.rel[m]
        out = []
        # whole remnant block of exactly k agents (they stay non-deviators)
        for blk in self.partition:
            if len(blk) != k or not blk.isdisjoint(near) or not blk.isdisjoint(excluded):
                continue
            if not blk.isdisjoint(st.h) or any(self.where[m] == blk for m in block):
                continue
            if self.sis and any(self.cmp(j, frozenset(block) | blk) < 0 for j in blk):
                continue
            out.append(blk)
            break
        # lone fillers, picked greedily, each a deviator that likes an enemy-only block of the final size
        if len(st.h) + k <= self.max_h:
            picked = []
            for w in range(self.n):
                if len(picked) == k:
                    break
                if w in near or w in excluded or w in st.h:
                    continue
                if any(self.where[w] == self.where[m] for m in list(block) + picked):
                    continue
                if not self._filler_ok(w, len(block) + k):
                    continue
                rest = self.where[w] - {w}
                if self.sis and any(self.cmp(j, rest) < 0 for j in rest):
                    continue
                picked.append(w)
                near |= self.rel[w]
            if len(picked) == k:
                out.append(frozenset(picked))
        return out

    def _filler_ok(self, w, size):
        prof = self.profiles(w).get(frozenset())
        if prof is None:
            return False
        strict_sizes, weak_sizes = prof
        return size in (strict_sizes if self.strict else weak_sizes)

    def assign_roles(self, st, d, block):
        """Yield (block, roles) where roles maps each other member to 'dev' or 'stay'."""
        if block == self.where[d]:
            return
        members = sorted(block - {d})
        options = []
        for m in members:
            opts = []
            if m in st.h:
                opts.append("dev")
            elif m in st.stay:
                opts.append("stay")
            else:
                if len(st.h) < self.max_h and self.dev_ok(m, block):
                    opts.append("dev")
                opts.append("stay")
            options.append(opts)

        def rec(idx, roles, origin):
            if idx == len(members):
                yield dict(roles)
                return
            m = members[idx]
            for role in options[idx]:
                o = origin
                if role == "stay":
                    if o is None:
                        o = self.where[m]
                    elif self.where[m] != o:
                        continue
                    if self.sis and self.cmp(m, block) < 0:
                        continue
                roles[m] = role
                yield from rec(idx + 1, roles, o)
                del roles[m]

        for roles in rec(0, {}, None):
            yield block, roles

    def place(self, st, d, block, roles):
        if not self.dev_ok(d, block):
            return None
        devs = {d} | {m for m, r in roles.items() if r == "dev"}
        stays = {m for m, r in roles.items() if r == "stay"}
        h = set(st.h) | devs
        pending = [p for p in st.pending if p not in devs]
        stay_all = set(st.stay) | stays
        remnant = set(st.remnant_members)
        if stays:
            origin = self.where[next(iter(stays))]
            if not origin.isdisjoint(st.remnant_members) or origin in st.remnants_used:
                return None
            for m in origin:
                if m in block:
                    if m in stays and m in st.h:
                        return None
                    continue
                if m in stay_all:
                    return None
                if m not in h:
                    h.add(m)
                    pending.append(m)
            remnant |= origin - h
        for m in devs:
            if not self.dev_ok(m, block):
                return None
        if len(h) > self.max_h:
            return None
        placed = dict(st.placed)
        for m in devs:
            placed[m] = block
        used = set(st.remnants_used)
        if stays:
            used.add(self.where[next(iter(stays))])
        return _State(frozenset(h), tuple(pending), placed, {}, frozenset(stay_all),
                      frozenset(remnant), frozenset(used), anchor=st.anchor)

    def finalize(self, st):
        from .stability import verify_group_deviation

        blocks = set(st.placed.values())
        covered = set().union(*blocks) if blocks else set()
        for b in self.partition:
            if b in st.remnants_used:
                continue
            rest = b - st.h - covered
            if rest:
                blocks.add(frozenset(rest))
        succ = make_partition(blocks)
        if sum(len(b) for b in succ) != self.n:
            return None
        if verify_group_deviation(self.game, self.partition, st.h, succ, self.kind):
            return st.h, succ
        if self.sis and len(st.h) < self.max_h:
            after = block_index(succ, self.n)
            for j in range(self.n):
                if j in st.h or j in st.stay:
                    continue
                if self.game.compare(j, after[j], self.where[j]) is Comparison.LESS:
                    nxt = _State(st.h | {j}, (j,), dict(st.placed), {}, st.stay,
                                 st.remnant_members, st.remnants_used, anchor=st.anchor)
                    res = self.dfs(nxt)
                    if res is not None:
                        return res
        return None


class _State:
    __slots__ = ("h", "pending", "placed", "extra", "stay", "remnant_members", "remnants_used", "anchor")

    def __init__(self, h, pending, placed, extra, stay, remnant_members, remnants_used, anchor=None):
        self.h = h
        self.pending = pending
        self.placed = placed
        self.extra = extra
        self.stay = stay
        self.remnant_members = remnant_members
        self.remnants_used = remnants_used
        self.anchor = pending[0] if anchor is None and pending else anchor

    @property
    def placed_all(self):
        return frozenset().union(*self.placed.values()) if self.placed else frozenset()

    def signature(self):
        return (self.h, frozenset(self.pending), frozenset(self.placed.items()), self.stay, self.remnants_used)


def bounded_group_deviation(game, partition, kind, max_size: int, max_h: int):
    """A verified (deviators, successor) pair within the bounds, or None."""
    return _GroupSearch(game, partition, kind, max_size, max_h).run()
