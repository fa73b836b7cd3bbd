from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quasichoice.axioms import (
    AxiomReport,
    Scope,
    check_choice_consistency,
    check_immunity,
    check_pareto,
    check_PR,
    check_ratio_rule_pairs,
    check_sNNR,
    check_triangle,
    ratio_functions,
    run_axiom,
)
from quasichoice.generators import planted_profile, random_profile
from quasichoice.majority import HALF, build_chain, majority_relation
from quasichoice.profiles import PerturbationStep, Profile, ProfileError
from quasichoice.rules import RuleConfigError, compile_rule

from conftest import fixture_profile, profiles, profiles_with_set

TYPES = ["M", "N", "MS", "NS", "B", "D", "P", "R", "U", "E"]


def test_report_line():
    rep = AxiomReport("GC", "fail", "subsets=all(m=3)", "S={a,b} x=a")
    assert rep.to_line() == "axiom=GC verdict=fail scope=subsets=all(m=3) witness=S={a,b} x=a"
    assert AxiomReport("C", "pass").to_line().endswith("witness=-")


# ------------------------------------------------------------------ immunity


@given(profiles_with_set(max_m=5, max_n=4), st.sampled_from(TYPES))
def test_chain_rules_are_strongly_immune_to_their_members(ps, kind):
    p, S = ps
    spec = f"{kind}(0,1]"
    rule = compile_rule(spec)
    if len(S) < 2:
        return
    for member in build_chain(spec, S, p).members:
        for _, _, raw in member.sources:
            assert check_immunity("strong", rule, raw, S, p).passed
            assert check_immunity("plain", rule, raw, S, p).passed
            assert check_immunity("weak", rule, raw, S, p).passed


def test_gc_modification_loses_strong_immunity():
    p = fixture_profile("gc_counterexample")
    A = majority_relation("M", HALF, None, p)
    rep = check_immunity("strong", "M(1/4,1/2]^GC", A, p.labels, p)
    assert rep.verdict == "fail" and rep.witness.startswith("x=a")


def test_singleton_is_vacuously_immune():
    p = fixture_profile("three_cycle")
    A = majority_relation("M", HALF, None, p)
    for level in ("weak", "plain", "strong"):
        assert check_immunity(level, "M(0.5,1]", A, {"a"}, p).passed


def test_immunity_levels_differ_on_a_cycle():
    # the rule that chooses everything: weak immunity holds on a 3-cycle,
    # plain immunity holds too (paths back exist), strong holds (hull is full)
    p = fixture_profile("three_cycle")
    everything = lambda S, prof: frozenset(S)  # noqa: E731
    A = majority_relation("M", "2/3", None, p)
    assert check_immunity("weak", everything, A, p.labels, p).passed
    assert check_immunity("plain", everything, A, p.labels, p).passed
    # restricted to {a, b} there is no way back from a to b
    assert check_immunity("weak", everything, A, {"a", "b"}, p).verdict == "fail"


# -------------------------------------------------------------------- Pareto


@given(profiles_with_set(max_m=5, max_n=4), st.sampled_from(TYPES))
def test_m1_augmented_rules_satisfy_weak_pareto(ps, kind):
    p, S = ps
    assert check_pareto("wP", f"{kind}(0.5,1]+M1", S, p).passed


@given(profiles_with_set(max_m=5, max_n=4), st.sampled_from(["N", "NS", "D"]))
def test_nnp_for_non_strict_relative_types(ps, kind):
    p, S = ps
    assert check_pareto("NNP", f"{kind}(0.5,1]", S, p).passed


def test_unanimous_pair_excludes_loser():
    p = Profile.from_orders("ab", [["a", "b"]] * 3)
    for variant in ("wP", "sP", "sP'"):
        assert check_pareto(variant, "M(0.5,1]", {"a", "b"}, p).passed
    assert compile_rule("M(0.5,1]")(frozenset("ab"), p) == {"a"}


def test_pareto_failure_is_reported():
    p = Profile.from_orders("ab", [["a", "b"]] * 3)
    everything = lambda S, prof: frozenset(S)  # noqa: E731
    rep = check_pareto("wP", everything, {"a", "b"}, p)
    assert rep.verdict == "fail" and "y=b" in rep.witness


# ------------------------------------------------------------ responsiveness


@given(profiles_with_set(max_m=4, max_n=4), st.sampled_from(TYPES),
       st.sampled_from([(0, 1), (HALF, 1), (0, HALF)]))
def test_snnr_for_chain_rules(ps, kind, rng):
    p, S = ps
    beta, gamma = (Fraction(v) for v in rng)
    assert check_sNNR(f"{kind}({beta},{gamma}]", S, p).passed


def test_snnr_rejects_invalid_step():
    p = fixture_profile("three_cycle")
    with pytest.raises(ProfileError):
        check_sNNR("M(0.5,1]", p.labels, p, [PerturbationStep(0, "a", "b", "promote")])


def test_snnr_irrelevant_step():
    p = fixture_profile("beta_example")
    steps = [PerturbationStep(0, "b", "a", "demote")]  # b is not chosen
    assert check_sNNR("M(0.5,1]", p.labels, p, steps).passed


@pytest.mark.parametrize("name", ["pr_1", "pr_2", "pr_3"])
@pytest.mark.parametrize("kind", TYPES)
def test_pr_fails_on_the_three_profiles(name, kind):
    p = fixture_profile(name)
    rep = check_PR(f"{kind}(0,1]", p.labels, p)
    assert rep.verdict == "fail" and "step=" in rep.witness


def test_pr_vacuous_with_single_choice():
    p = Profile.from_orders("ab", [["a", "b"]])
    assert check_PR("M(0.5,1]", {"a", "b"}, p).passed


def test_pr_fails_for_choose_everything():
    p = Profile.from_orders("ab", [["a", "b"], ["b", "a"]])
    everything = lambda S, prof: frozenset(S)  # noqa: E731
    assert check_PR(everything, {"a", "b"}, p).verdict == "fail"


# ------------------------------------------------------- choice consistency


def test_ca_fails_on_three_cycle():
    rep = check_choice_consistency("CA", "M(0.5,1]", fixture_profile("three_cycle"))
    assert rep.verdict == "fail"


def test_beta_fails_with_expected_witness():
    rep = check_choice_consistency("beta", "M(0.5,1]", fixture_profile("beta_example"))
    assert rep.verdict == "fail"
    assert rep.witness == "x=a y=d S={a,d} S'={a,b,c,d}"


def test_sua_fails_on_undecided_example():
    rep = check_choice_consistency("SUA", "B(0,1]", fixture_profile("sua_example"))
    assert rep.verdict == "fail"
    assert rep.witness == "S={x,y} S'={x,y,z} C(S)={x,y} C(S')={x}"


@given(profiles(max_m=4, max_n=3))
def test_gc_for_antisymmetric_plus_complete_chains(p):
    assert check_choice_consistency("GC", "B(0.5,1]+D(0,1/2]", p).passed


@given(profiles(max_m=4, max_n=3), st.sampled_from(TYPES))
def test_independence_of_irrelevant_alternatives(p, kind):
    assert check_choice_consistency("I", f"{kind}(0,1]", p).passed


@given(profiles(max_m=3, max_n=3), st.sampled_from(TYPES))
def test_isomorphism_invariance(p, kind):
    rep = check_choice_consistency("Iso", f"{kind}(0,1]", p, Scope(iso_limit=40))
    assert rep.passed


def test_iso_sampled_scope_is_reported():
    p = random_profile(1, 5, 4, "arbitrary-reflexive")
    rep = check_choice_consistency("Iso", "M(0.5,1]", p, Scope(iso_limit=5))
    assert rep.passed and rep.witness == "pass (sampled)" and "sampled" in rep.scope


@pytest.mark.parametrize("seed", range(10))
def test_cc_modified_rule_is_composition_consistent(seed):
    p = planted_profile(seed, 5, 3)
    assert check_choice_consistency("CC", "D(0.5,1]^C^GC^CC", p).passed


def test_id_fails_for_unmodified_incomplete_rule_somewhere():
    found = False
    for seed in range(200):
        p = random_profile(seed, 4, 3, "arbitrary-reflexive")
        if check_choice_consistency("Id", "M(0.5,1]", p).verdict == "fail":
            found = True
            break
    assert found
    assert check_choice_consistency("Id", "M(0.5,1]^Id", p).passed


def test_sampled_subsets_scope():
    p = random_profile(2, 7, 2, "linear-order")
    scope = Scope(max_exhaustive=5, samples=20)
    rep = check_choice_consistency("GC", "M(0.5,1]", p, scope)
    assert "sampled" in rep.scope


# ----------------------------------------------------------- ratio functions


def test_ratio_functions():
    p = fixture_profile("three_cycle")
    delta, pi, rho = ratio_functions(p, "a", "b")
    assert pi == Fraction(2, 3) and delta == Fraction(2, 3) and rho == Fraction(2, 3)
    undecided = fixture_profile("sua_example")
    assert ratio_functions(undecided, "x", "y") == (1, 1, 1)
    unanimous = Profile.from_orders("xy", [["x", "y"]] * 3)
    assert ratio_functions(unanimous, "x", "y")[1:] == (1, 1)


@given(st.integers(1, 5), st.integers(1, 7), st.integers(0, 10**6))
def test_triangle_on_total_quasi_orders(m, n, seed):
    p = random_profile(seed, m, n, "total-quasi-order")
    assert check_triangle(p, "d_P").passed
    assert check_triangle(p, "d_R").passed


@given(st.integers(1, 5), st.integers(1, 7), st.integers(0, 10**6))
def test_triangle_d_m_on_linear_orders(m, n, seed):
    assert check_triangle(random_profile(seed, m, n, "linear-order"), "d_M").passed


def test_triangle_not_applicable_outside_class():
    cyc = Profile(["a", "b", "c"], [[[1, 1, 0], [0, 1, 1], [1, 0, 1]]])
    assert check_triangle(cyc, "d_M").verdict == "na"
    assert check_triangle(fixture_profile("sua_example"), "d_P").verdict == "na"


@given(profiles(max_m=4, max_n=5), st.sampled_from(["B(0,1]", "M(0,1]", "MS(0,1]", "M(0,1/2]",
                                                    "D(0.3,1]", "D(0,1]", "N(0,1]", "NS(0,1]",
                                                    "P(0,1]", "P(1/4,3/4]", "P(0.5,1]", "P(0,1/3]",
                                                    "R(0,1]", "R(1/3,2/3]", "R(0.5,1]", "R(0,1/2]"]))
def test_ratio_rule_pairs(p, rule):
    assert check_ratio_rule_pairs(rule, p).passed


def test_ratio_rule_tie_keeps_both():
    p = Profile.from_orders("ab", [["a", "b"], ["b", "a"]])
    assert compile_rule("B(0,1]")(frozenset("ab"), p) == {"a", "b"}


def test_ratio_rule_outside_families():
    with pytest.raises(RuleConfigError):
        check_ratio_rule_pairs("U(0,1]", fixture_profile("three_cycle"))


def test_run_axiom_ids():
    p = fixture_profile("three_cycle")
    rep = run_axiom("sIm", "M(0.5,1]", p)
    assert rep.passed
    with pytest.raises(ValueError):
        run_axiom("nope", "M(0.5,1]", p)


def test_cc_can_break_immunity_for_semi_relative_types():
    # the last individual is decided only inside the component {p,q}; after
    # collapsing it they become undecided, which lowers the NS threshold
    from quasichoice import parse_profile
    p = parse_profile("""
        alternatives: p q s o
        individual
        p > s
        q > s
        o > s
        individual
        p > s
        p > o
        q > s
        q > o
        o > s
        individual
        q > p
        p = o
        q = o
        s = o
        individual
        p = o
        q = o
        individual
        q > p
    """)
    A = majority_relation("NS", "1/4", None, p)
    assert A.holds("o", "s") and not A.holds("s", "o")
    assert check_immunity("plain", "NS(0,1/4]^C^GC", A, p.labels, p).passed
    chosen = compile_rule("NS(0,1/4]^C^GC^CC")(frozenset(p.labels), p)
    assert "s" in chosen
    assert check_immunity("plain", "NS(0,1/4]^C^GC^CC", A, p.labels, p).verdict == "fail"


def test_d_m_triangle_fails_without_strict_transitivity():
    # 3-acyclic but a P b P c with a, c unrelated: 0 + 0 < 1
    p = Profile(["a", "b", "c"], np.array([[[1, 1, 0], [0, 1, 1], [0, 0, 1]]], dtype=bool))
    rep = check_triangle(p, "d_M")
    assert rep.verdict == "fail" and rep.witness == "x=a y=b z=c"
