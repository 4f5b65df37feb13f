"""Exhaustive (or sampled) checks of the preference properties the hardness theorems rely on."""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator

from .families import Family, HedonicGame
from .model import Comparison, OrderingProfile

EXHAUSTIVE_CAP = 12


@dataclass(frozen=True)
class ToxicitySpec:
    flavor: str  # "strict" | "plain" | "weak"
    pairs: frozenset  # of (friend count k, enemy threshold l)

    def __post_init__(self):
        if self.flavor not in ("strict", "plain", "weak"):
            raise ValueError(f"unknown toxicity flavor {self.flavor!r}")
        pairs = frozenset((int(k), int(l)) for k, l in self.pairs)
        for k, l in pairs:
            if k < 0 or l < 1:
                raise ValueError(f"bad toxicity pair ({k},{l})")
        object.__setattr__(self, "pairs", pairs)

    @property
    def name(self) -> str:
        body = ",".join(f"[{k},{l}]" for k, l in sorted(self.pairs))
        return f"{self.flavor} {{{body}}}-toxic"


def toxic(flavor: str, *pairs) -> ToxicitySpec:
    return ToxicitySpec(flavor, frozenset(pairs))


@dataclass
class PropertyReport:
    name: str
    holds: bool
    witness: dict | None = None
    checked: int = 0

    def to_dict(self) -> dict:
        return {"property": self.name, "holds": self.holds, "witness": self.witness, "checked": self.checked}


def _coalitions(profile: OrderingProfile, i: int, k: int, l: int, rng=None, budget=None) -> Iterator[frozenset]:
    """Coalitions containing ``i`` with exactly ``k`` friends and at least ``l`` enemies of ``i``."""
    friends = sorted(profile.friends(i))
    enemies = sorted(profile.enemies(i))
    if k > len(friends) or l > len(enemies):
        return
    if rng is not None:
        for _ in range(budget):
            fs = rng.sample(friends, k)
            es = rng.sample(enemies, rng.randint(l, len(enemies)))
            yield frozenset([i, *fs, *es])
        return
    for fs in combinations(friends, k):
        for size in range(l, len(enemies) + 1):
            for es in combinations(enemies, size):
                yield frozenset((i, *fs, *es))


def _sampler(game, sample_budget, seed):
    if game.n <= EXHAUSTIVE_CAP:
        return None, None
    if sample_budget is None:
        raise ValueError(f"n={game.n} exceeds the exhaustive cap {EXHAUSTIVE_CAP}; pass sample_budget")
    return random.Random(seed), sample_budget


def check_consistency_on_pairs(game) -> PropertyReport:
    """{i,j} vs {i,k} must order exactly as j vs k for all j,k in F_i + {i}."""
    p = game.profile
    checked = 0
    for i in range(game.n):
        pool = sorted(p.friends(i) | {i})
        for j in pool:
            for k in pool:
                if j >= k:
                    continue
                checked += 1
                want = p.prefers(i, j, k)
                got = game.compare(i, frozenset((i, j)), frozenset((i, k)))
                if got != want:
                    return PropertyReport("consistent on pairs", False,
                                          {"agent": i, "j": j, "k": k, "expected": int(want), "got": int(got)}, checked)
    return PropertyReport("consistent on pairs", True, None, checked)


def check_toxicity(game, spec: ToxicitySpec, sample_budget: int | None = None, seed: int = 0) -> PropertyReport:
    p = game.profile
    rng, budget = _sampler(game, sample_budget, seed)
    checked = 0
    for i in range(game.n):
        alone = frozenset((i,))
        for k, l in sorted(spec.pairs):
            for s in _coalitions(p, i, k, l, rng, budget):
                checked += 1
                if spec.flavor == "strict":
                    bad = game.compare(i, s, alone) is not Comparison.LESS
                    versus = [i]
                elif spec.flavor == "plain":
                    bad = game.compare(i, s, alone) is Comparison.GREATER
                    versus = [i]
                else:
                    bad, versus = False, None
                    for j in sorted(p.friends(i)):
                        if game.compare(i, frozenset((i, j)), s) is not Comparison.GREATER:
                            bad, versus = True, sorted((i, j))
                            break
                if bad:
                    return PropertyReport(spec.name, False,
                                          {"agent": i, "k": k, "l": l, "coalition": sorted(s), "versus": versus},
                                          checked)
    return PropertyReport(spec.name, True, None, checked)


def check_triangle_appreciating(game, closeness: int = 2) -> PropertyReport:
    """{i,j,k} beats {i,j} for distinct friends j >= k whose classes are at most ``closeness`` apart."""
    p = game.profile
    checked = 0
    for i in range(game.n):
        for j in sorted(p.friends(i)):
            for k in sorted(p.friends(i)):
                if j == k or p.prefers(i, j, k) is Comparison.LESS:
                    continue
                if p.class_index(i, k) - p.class_index(i, j) > closeness:
                    continue
                checked += 1
                if game.compare(i, frozenset((i, j, k)), frozenset((i, j))) is not Comparison.GREATER:
                    return PropertyReport("triangle-appreciating", False,
                                          {"agent": i, "coalition": sorted((i, j, k)), "versus": sorted((i, j))},
                                          checked)
    return PropertyReport("triangle-appreciating", True, None, checked)


def check_monotone_on_triangles(game) -> PropertyReport:
    """j >= j' > k > k' implies {i,j,k} beats {i,j',k'}."""
    p = game.profile
    checked = 0
    for i in range(game.n):
        friends = sorted(p.friends(i))
        for j in friends:
            for j2 in friends:
                if p.prefers(i, j, j2) is Comparison.LESS:
                    continue
                for k in friends:
                    if p.prefers(i, j2, k) is not Comparison.GREATER:
                        continue
                    for k2 in friends:
                        if p.prefers(i, k, k2) is not Comparison.GREATER:
                            continue
                        checked += 1
                        a, b = frozenset((i, j, k)), frozenset((i, j2, k2))
                        if game.compare(i, a, b) is not Comparison.GREATER:
                            return PropertyReport("monotone on triangles", False,
                                                  {"agent": i, "coalition": sorted(a), "versus": sorted(b)}, checked)
    return PropertyReport("monotone on triangles", True, None, checked)


def check_intolerance_in_triangles(game) -> PropertyReport:
    """Adding an enemy of i to a mutual-friend triangle around i makes i strictly worse off."""
    p = game.profile
    checked = 0
    for i in range(game.n):
        friends = sorted(p.friends(i))
        for j, k in combinations(friends, 2):
            if k not in p.friends(j) or j not in p.friends(k):
                continue
            tri = frozenset((i, j, k))
            for e in sorted(p.enemies(i)):
                checked += 1
                if game.compare(i, tri, tri | {e}) is not Comparison.GREATER:
                    return PropertyReport("intolerant in triangles", False,
                                          {"agent": i, "coalition": sorted(tri), "versus": sorted(tri | {e})},
                                          checked)
    return PropertyReport("intolerant in triangles", True, None, checked)


# --- theorem contracts ------------------------------------------------------------

class Theorem(str, enum.Enum):
    T1 = "t1"
    T1_SNS = "t1-sns"
    T2 = "t2"
    T2B = "t2b"
    T3 = "t3"
    T3_SNS = "t3-sns"
    T3_SSNS = "t3-ssns"

    @classmethod
    def parse(cls, tag) -> "Theorem":
        if isinstance(tag, Theorem):
            return tag
        key = str(tag).strip().lower().replace("_", "-")
        if key == "t2nb":
            key = "t2"
        return cls(key)


def theorem_properties(theorem: Theorem) -> list:
    """Property list (name, callable(game)) each theorem demands of a family."""
    theorem = Theorem.parse(theorem)
    cons = ("consistent on pairs", check_consistency_on_pairs)

    def tox(flavor, *pairs):
        spec = toxic(flavor, *pairs)
        return (spec.name, lambda g: check_toxicity(g, spec))

    if theorem in (Theorem.T1, Theorem.T1_SNS):
        props = [cons, tox("plain", (0, 1)), tox("weak", (1, 1), (2, 2))]
        if theorem is Theorem.T1_SNS:
            props.append(tox("plain", (1, 1)))
        return props
    if theorem in (Theorem.T2, Theorem.T2B):
        return [cons, tox("strict", (0, 1), (1, 1), (2, 5))]
    props = [
        cons,
        ("triangle-appreciating", check_triangle_appreciating),
        ("monotone on triangles", check_monotone_on_triangles),
        tox("plain", (0, 1)),
        tox("weak", (1, 1), (2, 2), (3, 3)),
        ("intolerant in triangles", check_intolerance_in_triangles),
    ]
    if theorem is Theorem.T3_SNS:
        props += [tox("plain", (1, 1)), tox("weak", (2, 1))]
    if theorem is Theorem.T3_SSNS:
        props += [tox("strict", (0, 1), (1, 1)), tox("weak", (2, 1))]
    return props


_ALL = set(Theorem)
_T12 = {Theorem.T1, Theorem.T1_SNS, Theorem.T2, Theorem.T2B}
CLAIMS = {
    Family.IRCL: _ALL - {Theorem.T2B},
    Family.SR: _T12,
    Family.W: _T12,
    Family.WB: _T12,
    Family.AS: _ALL,
    Family.HCNET: _ALL,
    Family.FHG: _ALL,
    Family.SOCIAL_FHG: {Theorem.T1, Theorem.T3},
    Family.MEDIAN: {Theorem.T1, Theorem.T3},
    Family.MIDRANGE: _T12,
    Family.LAPPROVAL: _ALL,
}
"""(family, theorem) pairings whose property contract is proven."""


def random_profile(n: int, rng: random.Random, max_friends: int, strict: bool = True,
                   mutual: bool = True, bipartite: bool = False, density: float = 0.6) -> OrderingProfile:
    friends: list[set] = [set() for _ in range(n)]
    if bipartite:
        side = [rng.random() < 0.5 for _ in range(n)]
        for i in range(n):
            other = [j for j in range(n) if side[j] != side[i]]
            rng.shuffle(other)
            for j in other:
                if len(friends[i]) >= max_friends:
                    break
                if rng.random() < density:
                    friends[i].add(j)
    else:
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        rng.shuffle(pairs)
        for i, j in pairs:
            if rng.random() >= density:
                continue
            if mutual:
                if len(friends[i]) < max_friends and len(friends[j]) < max_friends:
                    friends[i].add(j)
                    friends[j].add(i)
            else:
                for a, b in ((i, j), (j, i)):
                    if len(friends[a]) < max_friends and rng.random() < 0.5:
                        friends[a].add(b)
    rankings = []
    for i in range(n):
        order = sorted(friends[i])
        rng.shuffle(order)
        classes: list[list[int]] = []
        for j in order:
            if classes and not strict and rng.random() < 0.4:
                classes[-1].append(j)
            else:
                classes.append([j])
        rankings.append(tuple(frozenset(c) for c in classes))
    return OrderingProfile(n, tuple(rankings))


def theorem_profile(theorem: Theorem, n: int, rng: random.Random) -> OrderingProfile:
    theorem = Theorem.parse(theorem)
    if theorem in (Theorem.T1, Theorem.T1_SNS):
        return random_profile(n, rng, 3, strict=False)
    if theorem is Theorem.T2:
        return random_profile(n, rng, 3, strict=True)
    if theorem is Theorem.T2B:
        return random_profile(n, rng, 3, strict=True, mutual=False, bipartite=True)
    return random_profile(n, rng, 4, strict=True)


@dataclass
class ContractResult:
    family: Family
    theorem: Theorem
    n: int
    seeds: int
    seed: int
    reports: dict = field(default_factory=dict)  # property name -> list of failing reports
    passed: dict = field(default_factory=dict)  # property name -> count of passing seeds

    @property
    def holds(self) -> bool:
        return not any(self.reports.values())

    def failures(self, name: str) -> list:
        return self.reports.get(name, [])

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "theorem": self.theorem.value,
            "n": self.n,
            "seeds": self.seeds,
            "seed": self.seed,
            "prng": "python-random/MT19937",
            "claimed": self.theorem in CLAIMS[self.family],
            "holds": self.holds,
            "properties": {
                name: {"passed": self.passed.get(name, 0), "failed": len(self.reports.get(name, [])),
                       "witness": (self.reports[name][0] if self.reports.get(name) else None)}
                for name in self.passed
            },
        }


def _contract_seeds(family, theorem, n, seed, params, seeds):
    """(passed counts, failing witnesses) per property for the given seed indices."""
    props = theorem_properties(theorem)
    passed = {name: 0 for name, _ in props}
    failed = {name: [] for name, _ in props}
    for s in seeds:
        rng = random.Random(f"{seed}:{theorem.value}:{s}")
        profile = theorem_profile(theorem, n, rng)
        game = HedonicGame(profile, family, params)
        for name, check in props:
            rep = check(game)
            if rep.holds:
                passed[name] += 1
            else:
                w = dict(rep.witness)
                w["seed"] = s
                failed[name].append(w)
    return passed, failed


def verify_family_contract(family: Family | str, theorem: Theorem | str, n: int = 7, seeds: int = 100,
                           seed: int = 0, params: dict | None = None, workers: int = 1) -> ContractResult:
    """Run the theorem's property list for ``family`` over ``seeds`` random profiles.

    Profile ``s`` is drawn from ``random.Random(f"{seed}:{theorem}:{s}")`` so
    results do not depend on ``workers``.
    """
    family = Family.parse(family)
    theorem = Theorem.parse(theorem)
    if n > EXHAUSTIVE_CAP:
        raise ValueError(f"n={n} exceeds the exhaustive cap {EXHAUSTIVE_CAP}")
    result = ContractResult(family, theorem, n, seeds, seed)
    workers = max(1, min(workers, seeds))
    chunks = [list(range(seeds))[k::workers] for k in range(workers)]
    if workers == 1:
        parts = [_contract_seeds(family, theorem, n, seed, params, chunks[0])]
    else:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_contract_seeds, *zip(*[(family, theorem, n, seed, params, c) for c in chunks])))
    for name, _ in theorem_properties(theorem):
        result.passed[name] = sum(p[name] for p, _ in parts)
        result.reports[name] = sorted((w for _, f in parts for w in f[name]), key=lambda w: w["seed"])
    return result


def all_reports(game, theorem: Theorem | str) -> list:
    return [check(game) for _, check in theorem_properties(theorem)]
