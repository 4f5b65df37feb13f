"""Concrete hedonic-game families instantiated from an ordering profile.

Every family turns the friend/enemy orderings into a coalition preference
for each agent.  Cardinal families compare exact rational values, ordinal
families compare rank tuples; either way ``HedonicGame.key`` returns a
totally ordered key and ``compare`` reduces to comparing keys.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .model import Comparison, OrderingProfile


class Family(str, enum.Enum):
    IRCL = "ircl"
    SR = "sr"
    W = "wgame"
    WB = "wbgame"
    AS = "as"
    HCNET = "hcnet"
    FHG = "fhg"
    SOCIAL_FHG = "socialfhg"
    MEDIAN = "median"
    MIDRANGE = "midrange"
    LAPPROVAL = "lapproval"

    @classmethod
    def parse(cls, tag: "str | Family") -> "Family":
        if isinstance(tag, Family):
            return tag
        key = str(tag).strip().lower().replace("-", "").replace("_", "")
        key = _ALIASES.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown family {tag!r}") from None

    @property
    def cardinal(self) -> bool:
        return self not in (Family.IRCL, Family.SR, Family.W, Family.WB)


_ALIASES = {
    "stableroommates": "sr",
    "w": "wgame",
    "wb": "wbgame",
    "additivelyseparable": "as",
    "coalitionnet": "hcnet",
    "coalitionnets": "hcnet",
    "fractionalhedonic": "fhg",
    "socialfractionalhedonic": "socialfhg",
    "lapp": "lapproval",
    "ellapproval": "lapproval",
}


def default_params(family: Family | str, n: int, l: int = 4) -> dict:
    """Utility range ``a`` (enemy value) and ``b`` (worst-friend value) for a family."""
    family = Family.parse(family)
    if family in (Family.AS, Family.HCNET):
        return {"a": -(n * n + 2 * n), "b": 4}
    if family is Family.FHG:
        return {"a": -(n * n + 5 * n), "b": 7}
    if family is Family.SOCIAL_FHG:
        return {"a": 0, "b": 7 * n}
    if family is Family.MEDIAN:
        return {"a": 0, "b": 5}
    if family is Family.MIDRANGE:
        return {"a": -3 * n, "b": 1}
    if family is Family.LAPPROVAL:
        if l < 4:
            raise ValueError("l-approval needs l >= 4")
        return {"a": -6 * l * n, "b": 4, "l": l}
    return {}


@dataclass(frozen=True)
class UtilityAssignment:
    a: int
    b: int
    values: tuple  # values[i][j]

    def __call__(self, i: int, j: int) -> int:
        return self.values[i][j]


def canonical_utilities(profile: OrderingProfile, a: int, b: int) -> UtilityAssignment:
    """Enemies get ``a``; the r-th friend class from the bottom gets ``b + r - 1``; self gets 0."""
    if b < 1:
        raise ValueError("worst-friend value b must be >= 1")
    rows = []
    for i in range(profile.n):
        row = [a] * profile.n
        row[i] = 0
        for j in profile.friends(i):
            row[j] = b + profile.level(i, j) - 1
        rows.append(tuple(row))
    return UtilityAssignment(a, b, tuple(rows))


# --- hedonic coalition nets ---------------------------------------------------

@dataclass(frozen=True)
class CoalitionNetRule:
    """``agents`` is read as a disjunction of presence atoms (a single agent is an atom)."""

    agents: frozenset
    weight: int

    def satisfied(self, coalition: frozenset) -> bool:
        return not self.agents.isdisjoint(coalition)

    def __str__(self) -> str:
        return " | ".join(str(a) for a in sorted(self.agents)) + f" -> {self.weight}"


def build_hcnet(profile: OrderingProfile, i: int, utilities: UtilityAssignment | None = None) -> list:
    friends = profile.friends(i)
    if len(friends) > 4:
        raise ValueError(f"agent {i} has {len(friends)} friends; coalition nets allow at most 4")
    n = profile.n
    if utilities is None:
        utilities = canonical_utilities(profile, -(n * n + 2 * n), 4)
    rules = [CoalitionNetRule(frozenset([j]), utilities(i, j)) for j in sorted(friends)]
    enemies = profile.enemies(i)
    if enemies:
        rules.append(CoalitionNetRule(frozenset(enemies), utilities.a))
    return rules


def evaluate_hcnet(rules: Iterable[CoalitionNetRule], coalition: Iterable[int]) -> int:
    coalition = frozenset(coalition)
    return sum(r.weight for r in rules if r.satisfied(coalition))


# --- IRCL ----------------------------------------------------------------------

def build_ircl_list(profile: OrderingProfile, i: int, pairs_only: bool = False) -> list:
    """Ranked list for agent ``i`` as a list of tiers (best first), each tier a list of coalitions.

    Triangles come first, one per tier, ordered by a deterministic linear
    extension of "(j,k) above (j',k') iff j >= j' and k > k'"; then the
    friend pairs grouped by friend class; then the singleton.  With
    ``pairs_only`` the triangle stage is skipped (stable roommates).
    """
    if not pairs_only and not profile.is_mutual:
        raise ValueError("IRCL lists require a mutual profile")
    tiers: list[list[frozenset]] = []
    if not pairs_only:
        ordered = []
        friends = sorted(profile.friends(i))
        for j in friends:
            for k in friends:
                if j == k:
                    continue
                cmp = profile.prefers(i, j, k)
                if cmp is Comparison.GREATER or (cmp is Comparison.EQUAL and j < k):
                    ordered.append((j, k))
        ordered.sort(key=lambda jk: (profile.class_index(i, jk[0]), profile.class_index(i, jk[1]), jk[0], jk[1]))
        tiers.extend([frozenset((i, j, k))] for j, k in ordered)
    for cls in profile.rankings[i]:
        tiers.append([frozenset((i, j)) for j in sorted(cls)])
    tiers.append([frozenset((i,))])
    return tiers


# --- games ---------------------------------------------------------------------

class HedonicGame:
    """A game from ``family`` over ``profile``; preferences are exposed through ``key``/``compare``."""

    def __init__(self, profile: OrderingProfile, family: Family | str, params: dict | None = None):
        self.profile = profile
        self.family = Family.parse(family)
        n = profile.n
        base = default_params(self.family, n, **({"l": params["l"]} if params and "l" in params else {}))
        base.update(params or {})
        self.params = base
        self._cache: dict = {}
        self.utilities = None
        if self.family.cardinal:
            self.utilities = canonical_utilities(profile, self.params["a"], self.params["b"])
        self._rules = None
        self._lists = None
        if self.family is Family.HCNET:
            self._rules = [build_hcnet(profile, i, self.utilities) for i in range(n)]
        elif self.family in (Family.IRCL, Family.SR):
            pairs_only = self.family is Family.SR
            self._lists = []
            for i in range(n):
                tiers = build_ircl_list(profile, i, pairs_only=pairs_only)
                rank = {}
                for t, tier in enumerate(tiers):
                    for c in tier:
                        rank[c] = -t
                self._lists.append((rank, -len(tiers)))

    @property
    def n(self) -> int:
        return self.profile.n

    def __repr__(self) -> str:
        return f"HedonicGame(n={self.n}, family={self.family.value!r})"

    def hcnet_rules(self, i: int) -> list:
        if self._rules is None:
            return build_hcnet(self.profile, i)
        return list(self._rules[i])

    def ircl_rank(self, i: int) -> dict:
        if self._lists is None:
            raise ValueError(f"{self.family.value} games have no IRCL list")
        return dict(self._lists[i][0])

    def evaluate(self, i: int, coalition: Iterable[int]):
        """Exact value of ``coalition`` for agent ``i`` (a Fraction, or a rank tuple for ordinal families)."""
        coalition = frozenset(coalition)
        if i not in coalition:
            raise ValueError(f"agent {i} is not in the coalition")
        return self._evaluate(i, coalition)

    def _evaluate(self, i: int, s: frozenset):
        fam = self.family
        p = self.profile
        if fam is Family.W:
            return (min((p.level(i, j) for j in s if j != i), default=0),)
        if fam is Family.WB:
            others = [p.level(i, j) for j in s if j != i]
            if not others:
                return (0, 0)
            return (min(others), max(others))
        if fam in (Family.IRCL, Family.SR):
            rank, unlisted = self._lists[i]
            return (rank.get(s, unlisted),)
        v = self.utilities.values[i]
        if fam is Family.AS:
            return Fraction(sum(v[j] for j in s))
        if fam is Family.HCNET:
            return Fraction(evaluate_hcnet(self._rules[i], s))
        if fam in (Family.FHG, Family.SOCIAL_FHG):
            return Fraction(sum(v[j] for j in s), len(s))
        if fam is Family.MEDIAN:
            vals = sorted(v[j] for j in s)
            m = len(vals)
            if m % 2:
                return Fraction(vals[m // 2])
            return Fraction(vals[m // 2 - 1] + vals[m // 2], 2)
        if fam is Family.MIDRANGE:
            others = [v[j] for j in s if j != i]
            if not others:
                return Fraction(0)
            return Fraction(max(others) + min(others), 2)
        if fam is Family.LAPPROVAL:
            others = sorted((v[j] for j in s if j != i), reverse=True)
            return Fraction(sum(others[: self.params["l"]]))
        raise AssertionError(fam)

    def key(self, i: int, coalition: frozenset):
        """Cached totally ordered key of ``coalition`` (which must contain ``i``) for agent ``i``."""
        ck = (i, coalition)
        try:
            return self._cache[ck]
        except KeyError:
            pass
        if i not in coalition:
            raise ValueError(f"agent {i} is not in the coalition")
        val = self._evaluate(i, coalition)
        if len(self._cache) > 2_000_000:
            self._cache.clear()
        self._cache[ck] = val
        return val

    def compare(self, i: int, s: Iterable[int], t: Iterable[int]) -> Comparison:
        return Comparison.of(self.key(i, frozenset(s)), self.key(i, frozenset(t)))


def make_game(profile: OrderingProfile, family: Family | str, params: dict | None = None) -> HedonicGame:
    return HedonicGame(profile, family, params)
