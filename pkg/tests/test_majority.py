from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quasichoice.majority import (
    ALL_TYPES,
    HALF,
    MajorityType,
    build_chain,
    critical_strengths,
    majority_matrix,
    majority_relation,
    parse_chain,
    parse_strength,
    verify_inclusions,
)
from quasichoice.profile_io import parse_profile
from quasichoice.profiles import Profile
from quasichoice.relations import NotNestedError, RelationError

from conftest import fixture_profile, profiles, profiles_with_set
from oracles import majority_pairs, relations_over

TYPE_NAMES = [str(k) for k in ALL_TYPES]


def pairs_of(R):
    return {(x, y) for x in R.labels for y in R.labels if R.holds(x, y)}


strengths = st.sampled_from([Fraction(k, q) for q in range(1, 9) for k in range(1, q + 1)])


@given(profiles_with_set(max_m=4, max_n=5), st.sampled_from(TYPE_NAMES), strengths)
def test_relations_match_definition_oracle(ps, kind, alpha):
    p, S = ps
    R = majority_relation(kind, alpha, S, p)
    assert pairs_of(R) == majority_pairs(kind, alpha, p.restrict(S), sorted(S))


@given(profiles_with_set(max_m=4, max_n=4), st.sampled_from(TYPE_NAMES))
def test_critical_strengths_list_every_distinct_relation(ps, kind):
    p, S = ps
    sub = p.restrict(S)
    for beta, gamma in [(0, 1), (HALF, 1), (0, HALF), (Fraction(1, 7), Fraction(4, 7))]:
        crit = critical_strengths(kind, S, p, beta, gamma)
        assert crit[-1] == gamma
        got = [frozenset(pairs_of(majority_relation(kind, c, S, p))) for c in crit]
        assert got == relations_over(kind, sub, sorted(S), beta, gamma)


def test_three_cycle_critical_strengths():
    p = fixture_profile("three_cycle")
    assert critical_strengths("M", None, p) == [Fraction(1, 3), Fraction(2, 3), Fraction(1)]


def test_half_is_a_breakpoint():
    # a single indifferent voter: P is complete at 1/2 and empty above
    p = Profile(["a", "b"], np.ones((1, 2, 2), dtype=bool))
    assert HALF in critical_strengths("P", None, p)
    assert majority_relation("P", HALF, None, p).holds("a", "b")
    assert not majority_relation("P", Fraction(3, 5), None, p).holds("a", "b")


@pytest.mark.parametrize("text, value", [("0.5", HALF), ("4/7", Fraction(4, 7)), ("1", Fraction(1)), (Fraction(1, 3), Fraction(1, 3))])
def test_parse_strength(text, value):
    assert parse_strength(text) == value


def test_parse_strength_rejects_floats_and_junk():
    with pytest.raises(RelationError):
        parse_strength(0.5)
    with pytest.raises(RelationError):
        parse_strength("half")


def test_strength_range_checked():
    p = fixture_profile("three_cycle")
    with pytest.raises(RelationError):
        majority_relation("M", 0, None, p)
    with pytest.raises(RelationError):
        majority_relation("M", "3/2", None, p)
    with pytest.raises(RelationError):
        critical_strengths("M", None, p, HALF, HALF)


def test_parse_chain():
    spec = parse_chain("D(0.5,1]+B(0,1/2]+N1+M1")
    assert [str(s) for s in spec.segments] == ["D(1/2,1]", "B(0,1/2]"]
    assert spec.augment == ("N1", "M1")
    assert str(spec) == "D(1/2,1]+B(0,1/2]+N1+M1"


@pytest.mark.parametrize("bad", ["X(0,1]", "M(0,1)", "M1+M(0,1]", "M(1,0.5]", "M(0,1]+M1+M1", ""])
def test_parse_chain_errors(bad):
    with pytest.raises(RelationError):
        parse_chain(bad)


def test_c_counterexample_chain_members():
    p = fixture_profile("c_counterexample")
    chain = build_chain("M(1/7,4/7]", None, p)
    assert len(chain) == 3
    shown = [set(m.hull.pairs()) for m in chain.members]
    assert shown[0] == {("a", "b"), ("c", "b")}
    assert shown[1] == {("a", "b"), ("b", "a"), ("c", "b"), ("c", "a")}
    assert len(shown[2]) == 6


def test_gc_counterexample_half_relations():
    p = fixture_profile("gc_counterexample")
    want = {("c", "b"), ("a", "b"), ("b", "a")}
    for kind in ("M", "MS", "B"):
        assert set(majority_relation(kind, HALF, None, p).pairs()) == want


def test_mixed_types_that_do_not_nest():
    p = parse_profile("""
    alternatives: a b c d
    individual
    a > b
    c > d
    individual
    a > b
    individual
    b > a
    """)
    with pytest.raises(NotNestedError) as info:
        build_chain("M(1/2,3/5]+P(9/10,1]", None, p)
    assert set(info.value.witness) in ({"a", "b"}, {"c", "d"})


@given(profiles_with_set(max_m=5, max_n=6))
def test_inclusions_hold_at_every_critical_strength(ps):
    p, S = ps
    alphas = {c for k in ALL_TYPES for c in critical_strengths(k, S, p)} | {HALF, Fraction(1, 3)}
    for alpha in sorted(alphas):
        for check in verify_inclusions(p, S, alpha):
            assert check.holds, (str(check), alpha)


def test_literal_d_s_breaks_the_chain():
    """With d_S counting only strict voters, MS would escape B."""
    p = Profile(["a", "b"], [[[1, 1], [0, 1]], [[1, 1], [1, 1]]])
    alpha = Fraction(3, 5)
    literal_ds = 1
    p_ab, d_ab = int(p.tally.p[0, 1]), int(p.tally.d[0, 1])
    assert p_ab >= alpha * literal_ds          # MS would hold under the literal count
    assert not p_ab >= alpha * d_ab           # but B does not
    # the decided-individual count keeps MS inside B
    assert not majority_relation("MS", alpha, None, p).holds("a", "b")


def test_literal_r_equals_u_claim_fails():
    """At strengths up to n/(2n-1) R coincides with P and E but not with U."""
    p = Profile(["x", "y"], [[[1, 1], [0, 1]], [[1, 1], [1, 1]], [[1, 1], [1, 1]]])
    alpha = Fraction(11, 20)
    assert alpha <= Fraction(3, 5)
    R = majority_matrix(MajorityType.R, alpha, p)
    assert np.array_equal(R, majority_matrix(MajorityType.P, alpha, p))
    assert np.array_equal(R, majority_matrix(MajorityType.E, alpha, p))
    assert R[0, 1] and not majority_matrix(MajorityType.U, alpha, p)[0, 1]


def test_minority_complete_types():
    p = fixture_profile("sua_example")
    for kind in ("D", "P", "R"):
        R = majority_relation(kind, Fraction(1, 3), None, p).matrix
        assert (R | R.T).all()
