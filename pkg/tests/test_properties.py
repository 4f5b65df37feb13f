from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from hedonica import (CLAIMS, Comparison, Family, HedonicGame, OrderingProfile, Theorem,
                      check_consistency_on_pairs, check_intolerance_in_triangles, check_monotone_on_triangles,
                      check_toxicity, check_triangle_appreciating, make_game, toxic, verify_family_contract)
from hedonica.properties import random_profile, theorem_profile


class Planted(HedonicGame):
    """A game whose key is overridden on chosen coalitions for agent 0."""

    def __init__(self, profile, family, overrides):
        super().__init__(profile, family)
        self.overrides = overrides

    def key(self, i, coalition):
        if i == 0 and frozenset(coalition) in self.overrides:
            return self.overrides[frozenset(coalition)]
        return super().key(i, frozenset(coalition))


TRI = OrderingProfile.from_lists([[1, 2], [0, 2], [0, 1], []])


def test_consistency_holds_for_wgame_on_pentagon(pentagon):
    assert check_consistency_on_pairs(make_game(pentagon, "wgame")).holds


def test_consistency_planted_violation():
    g = Planted(TRI, "as", {frozenset({0, 2}): 100})
    rep = check_consistency_on_pairs(g)
    assert not rep.holds
    assert rep.witness["agent"] == 0 and {rep.witness["j"], rep.witness["k"]} == {1, 2}


def test_as_strictly_toxic_for_all_k():
    rng = random.Random(3)
    for _ in range(5):
        g = make_game(random_profile(7, rng, 4), "as")
        assert check_toxicity(g, toxic("strict", *[(k, 1) for k in range(5)])).holds


def test_socialfhg_weak_but_not_strict():
    rng = random.Random(4)
    g = make_game(random_profile(7, rng, 3), "socialfhg")
    assert check_toxicity(g, toxic("weak", (1, 1), (2, 2), (3, 3))).holds
    rep = check_toxicity(g, toxic("strict", (0, 1)))
    assert not rep.holds
    s = frozenset(rep.witness["coalition"])
    assert g.compare(rep.witness["agent"], s, {rep.witness["agent"]}) is Comparison.EQUAL


def test_triangle_checks_on_reference_families():
    rng = random.Random(5)
    prof = random_profile(7, rng, 4)
    for fam in ("as", "median", "fhg"):
        g = make_game(prof, fam)
        assert check_triangle_appreciating(g).holds
        assert check_monotone_on_triangles(g).holds
        assert check_intolerance_in_triangles(g).holds
    full = OrderingProfile.from_lists([[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]])
    assert not check_triangle_appreciating(make_game(full, "sr")).holds
    assert check_monotone_on_triangles(make_game(full, "wgame")).checked > 0


def test_intolerance_planted_violation():
    g = Planted(TRI, "as", {frozenset({0, 1, 2, 3}): 10_000})
    rep = check_intolerance_in_triangles(g)
    assert not rep.holds and rep.witness["versus"] == [0, 1, 2, 3]


def test_socialfhg_intolerant():
    full = OrderingProfile.from_lists([[1, 2], [0, 2], [0, 1], [], []])
    assert check_intolerance_in_triangles(make_game(full, "socialfhg")).holds


def test_toxicity_spec_validation():
    with pytest.raises(ValueError):
        toxic("mild", (0, 1))
    with pytest.raises(ValueError):
        toxic("strict", (0, 0))
    assert toxic("weak", (2, 2), (1, 1)).name == "weak {[1,1],[2,2]}-toxic"


def test_sampling_required_above_cap():
    p = OrderingProfile.from_lists([[] for _ in range(13)])
    g = make_game(p, "as")
    with pytest.raises(ValueError, match="sample_budget"):
        check_toxicity(g, toxic("strict", (0, 1)))
    assert check_toxicity(g, toxic("strict", (0, 1)), sample_budget=20).holds


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([f for f in Family if f is not Family.IRCL]), st.integers(0, 10_000))
def test_strict_implies_plain(family, seed):
    rng = random.Random(seed)
    g = make_game(random_profile(6, rng, 3), family)
    pairs = [(0, 1), (1, 1), (2, 2)]
    if check_toxicity(g, toxic("strict", *pairs)).holds:
        assert check_toxicity(g, toxic("plain", *pairs)).holds


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(list(Family)), st.sampled_from(list(Theorem)), st.integers(0, 10_000))
def test_witnesses_reproduce(family, theorem, seed):
    rng = random.Random(seed)
    profile = theorem_profile(theorem, 6, rng)
    if family is Family.IRCL and not profile.is_mutual:
        return
    g = make_game(profile, family)
    for rep in (check_triangle_appreciating(g), check_monotone_on_triangles(g)):
        if not rep.holds:
            w = rep.witness
            assert g.compare(w["agent"], w["coalition"], w["versus"]) is not Comparison.GREATER
    rep = check_toxicity(g, toxic("strict", (0, 1), (1, 1)))
    if not rep.holds:
        w = rep.witness
        assert g.compare(w["agent"], w["coalition"], w["versus"]) is not Comparison.LESS


@pytest.mark.parametrize("family, theorem", [("as", "t1"), ("median", "t3"), ("socialfhg", "t1")])
def test_contract_examples_hold(family, theorem):
    res = verify_family_contract(family, theorem, n=7, seeds=15)
    assert res.holds, res.to_dict()


def test_sr_fails_t3_triangles():
    res = verify_family_contract("sr", "t3", n=7, seeds=10)
    assert not res.holds
    assert res.failures("triangle-appreciating")
    assert res.to_dict()["claimed"] is False


def test_contract_is_seed_deterministic_and_worker_independent():
    a = verify_family_contract("midrange", "t2", n=6, seeds=8, seed=11).to_dict()
    b = verify_family_contract("midrange", "t2", n=6, seeds=8, seed=11, workers=2).to_dict()
    assert a == b
    assert a["prng"] == "python-random/MT19937"


def test_theorem_parse():
    assert Theorem.parse("t2nb") is Theorem.T2
    assert Theorem.parse("T3_SSNS") is Theorem.T3_SSNS


def test_claims_cover_every_family():
    assert set(CLAIMS) == set(Family)
    assert Theorem.T2B not in CLAIMS[Family.IRCL]
