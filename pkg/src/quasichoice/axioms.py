"""Finite-instance checkers for choice-rule axioms.

Every checker returns an :class:`AxiomReport`.  A failing report carries a
witness string naming the sets, alternatives, perturbation step or
isomorphism that violates the axiom, so the failure can be replayed.

Rules are passed as anything :func:`as_rule` accepts: a rule string, a
:class:`~quasichoice.rules.RuleSpec`, a compiled rule, or a plain callable
``rule(S, profile) -> frozenset``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence

import numpy as np

from .majority import HALF, MajorityType, build_chain, majority_relation
from .profiles import (
    PerturbationStep,
    Profile,
    ProfileError,
    all_components,
    apply_isomorphism,
    apply_perturbation,
    quotient,
    step_is_valid,
    valid_steps,
)
from .relations import Relation, classify_matrix, transitive_hull
from .rules import CompiledRule, RuleConfigError, RuleSpec, _as_set, modify_CC, parse_rule

PASS, FAIL, NA = "pass", "fail", "na"

CHOICE_AXIOMS = ("C", "GC", "Id", "CA", "beta", "SUA", "I", "Iso", "CC")
PARETO_AXIOMS = ("wP", "sP", "sP'", "NNP")
IMMUNITY_LEVELS = ("weak", "plain", "strong")
AXIOM_IDS = CHOICE_AXIOMS + PARETO_AXIOMS + ("wIm", "Im", "sIm", "sNNR", "PR")


@dataclass(frozen=True)
class AxiomReport:
    axiom: str
    verdict: str
    scope: str = "-"
    witness: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_line(self) -> str:
        return f"axiom={self.axiom} verdict={self.verdict} scope={self.scope} witness={self.witness or '-'}"

    __str__ = to_line


@dataclass(frozen=True)
class Scope:
    """How far quantifiers over subsets and isomorphisms are enumerated.

    Subsets are enumerated exhaustively when the universe has at most
    ``max_exhaustive`` alternatives and sampled (``samples`` draws) otherwise.
    Isomorphisms are enumerated when ``m! * n!`` is at most ``iso_limit`` and
    ``iso_limit`` random ones are drawn otherwise.
    """

    max_exhaustive: int = 5
    samples: int = 200
    iso_limit: int = 200
    seed: int = 0

    def exhaustive_for(self, m: int) -> bool:
        return m <= self.max_exhaustive

    def subsets(self, labels: Sequence[str], min_size: int = 1) -> list[frozenset]:
        labels = list(labels)
        m = len(labels)
        if self.exhaustive_for(m):
            return [
                frozenset(c)
                for k in range(max(min_size, 1), m + 1)
                for c in itertools.combinations(labels, k)
            ]
        rng = np.random.default_rng(self.seed)
        seen = {frozenset(labels)}
        out = [frozenset(labels)]
        for _ in range(self.samples):
            size = int(rng.integers(max(min_size, 1), m + 1))
            pick = frozenset(labels[i] for i in rng.choice(m, size=size, replace=False))
            if pick not in seen:
                seen.add(pick)
                out.append(pick)
        return out

    def describe(self, m: int) -> str:
        if self.exhaustive_for(m):
            return f"subsets=all(m={m})"
        return f"subsets=sampled({self.samples},seed={self.seed})"


DEFAULT_SCOPE = Scope()


def as_rule(rule) -> Callable[[frozenset, Profile], frozenset]:
    if isinstance(rule, (str, RuleSpec)):
        return CompiledRule(rule)
    if callable(rule):
        return rule
    raise RuleConfigError(f"cannot use {rule!r} as a choice rule")


def _fmt(S: Iterable[str]) -> str:
    return "{" + ",".join(sorted(S)) + "}"


def _pass(axiom: str, scope: str = "-") -> AxiomReport:
    return AxiomReport(axiom, PASS, scope)


def _fail(axiom: str, scope: str, witness: str) -> AxiomReport:
    return AxiomReport(axiom, FAIL, scope, witness)


# ------------------------------------------------------------------ immunity


def check_immunity(level: str, rule, A: Relation, S: Iterable[str], profile: Profile) -> AxiomReport:
    """Weak, plain or strong immunity of ``rule`` against arguments ``y A x``."""
    if level not in IMMUNITY_LEVELS:
        raise ValueError(f"immunity level must be one of {IMMUNITY_LEVELS}")
    axiom = {"weak": "wIm", "plain": "Im", "strong": "sIm"}[level]
    rule = as_rule(rule)
    S = _as_set(S)
    scope = f"S={_fmt(S)}"
    chosen = rule(S, profile)
    hull = transitive_hull(A, S)
    for x in sorted(chosen):
        for y in sorted(S):
            if level == "strong":
                if hull.holds(y, x) and not hull.holds(x, y):
                    return _fail(axiom, scope, f"x={x} y={y} (y above x in the hull)")
                continue
            if y == x or not A.holds(y, x):
                continue
            if level == "weak":
                if not any(A.holds(z, y) for z in S if z != y):
                    return _fail(axiom, scope, f"x={x} y={y} (nothing in S argues against y)")
            elif not hull.holds(x, y):
                return _fail(axiom, scope, f"x={x} y={y} (no path from x back to y)")
    return _pass(axiom, scope)


# -------------------------------------------------------------------- Pareto


_PARETO_TYPE = {"wP": MajorityType.M, "sP": MajorityType.N, "sP'": MajorityType.B}


def check_pareto(variant: str, rule, S: Iterable[str], profile: Profile) -> AxiomReport:
    if variant not in PARETO_AXIOMS:
        raise ValueError(f"Pareto variant must be one of {PARETO_AXIOMS}")
    rule = as_rule(rule)
    S = _as_set(S)
    scope = f"S={_fmt(S)}"
    chosen = rule(S, profile)
    if variant == "NNP":
        N1 = majority_relation(MajorityType.N, 1, S, profile)
        for y in sorted(chosen):
            for x in sorted(S - chosen):
                if N1.holds(x, y):
                    return _fail(variant, scope, f"x={x} y={y} (x N1 y, y chosen, x not)")
        return _pass(variant, scope)
    A = majority_relation(_PARETO_TYPE[variant], 1, S, profile)
    hull = transitive_hull(A)
    for y in sorted(chosen):
        for x in sorted(S):
            if A.holds(x, y) and not hull.holds(y, x):
                return _fail(variant, scope, f"x={x} y={y} (y chosen although dominated by x)")
    return _pass(variant, scope)


# ------------------------------------------------------------ responsiveness


def check_sNNR(rule, S: Iterable[str], profile: Profile,
               steps: Sequence[PerturbationStep] | None = None) -> AxiomReport:
    """A chosen ``x`` stays chosen and no unchosen alternative enters after a step favouring ``x``.

    ``steps`` defaults to every valid step whose favoured alternative is chosen.
    """
    rule = as_rule(rule)
    S = _as_set(S)
    chosen = rule(S, profile)
    if steps is None:
        steps = [st for x in sorted(chosen) for st in valid_steps(profile, favoured=x)]
        scope = f"S={_fmt(S)},steps=all({len(steps)})"
    else:
        for st in steps:
            if not step_is_valid(profile, st):
                raise ProfileError(f"perturbation {st} does not apply to this profile")
        scope = f"S={_fmt(S)},steps=given({len(steps)})"
    for st in steps:
        if st.x not in chosen:
            continue
        after = rule(S, apply_perturbation(profile, st))
        if st.x not in after:
            return _fail("sNNR", scope, f"step={st} drops {st.x}")
        entered = after - chosen
        if entered:
            return _fail("sNNR", scope, f"step={st} adds {_fmt(entered)}")
    return _pass("sNNR", scope)


def check_PR(rule, S: Iterable[str], profile: Profile) -> AxiomReport:
    """Every step favouring one chosen ``x`` over another chosen ``y`` must drop ``y``."""
    rule = as_rule(rule)
    S = _as_set(S)
    chosen = rule(S, profile)
    scope = f"S={_fmt(S)},steps=all"
    for x in sorted(chosen):
        for y in sorted(chosen):
            if x == y:
                continue
            for st in valid_steps(profile, favoured=x, against=y):
                after = rule(S, apply_perturbation(profile, st))
                if y in after:
                    return _fail("PR", scope, f"step={st} keeps {y} in {_fmt(after)}")
    return _pass("PR", scope)


# ------------------------------------------------------- choice consistency


def _iso_candidates(profile: Profile, scope: Scope) -> tuple[Iterator[tuple[dict, list]], str]:
    labels, n, m = list(profile.labels), profile.n, profile.m
    total = math.factorial(m) * math.factorial(n)
    if total <= scope.iso_limit:
        def gen():
            for perm in itertools.permutations(labels):
                for psi in itertools.permutations(range(n)):
                    yield dict(zip(labels, perm)), list(psi)
        return gen(), f"isos=all({total})"

    def sample():
        rng = np.random.default_rng(scope.seed)
        for _ in range(scope.iso_limit):
            perm = rng.permutation(m)
            yield {labels[i]: labels[j] for i, j in enumerate(perm)}, rng.permutation(n).tolist()
    return sample(), f"isos=sampled({scope.iso_limit},seed={scope.seed})"


def _check_cc_at(rule, S: frozenset, profile: Profile) -> Optional[str]:
    """Witness for a (CC) violation on ``S``, or ``None``."""
    sub = profile.restrict(S)
    whole = rule(S, sub)
    for B in all_components(sub):
        if B == S:
            continue
        collapsed, label = quotient(sub, B)
        outer = rule(frozenset(collapsed.labels), collapsed)
        expected = outer if label not in outer else (outer - {label}) | rule(B, sub)
        if expected != whole:
            return f"S={_fmt(S)} B={_fmt(B)} C(S)={_fmt(whole)} recursion={_fmt(expected)}"
    return None


def check_choice_consistency(axiom: str, rule, profile: Profile, scope: Scope = DEFAULT_SCOPE) -> AxiomReport:
    """Evaluate one set-consistency axiom over every feasible set in ``scope``."""
    if axiom not in CHOICE_AXIOMS:
        raise ValueError(f"axiom must be one of {CHOICE_AXIOMS}")
    rule = as_rule(rule)
    subsets = scope.subsets(profile.labels)
    desc = scope.describe(profile.m)
    C = lambda S: rule(S, profile)  # noqa: E731

    if axiom == "C":
        for S in subsets:
            if len(S) < 2:
                continue
            for x in sorted(S):
                if all(C(frozenset((x, y))) == {x} for y in S if y != x):
                    if C(S) != {x}:
                        return _fail(axiom, desc, f"S={_fmt(S)} x={x} C(S)={_fmt(C(S))}")
        return _pass(axiom, desc)

    if axiom == "GC":
        for S in subsets:
            for x in sorted(S - C(S)):
                if all(x in C(frozenset((x, y))) for y in S if y != x):
                    return _fail(axiom, desc, f"S={_fmt(S)} x={x} C(S)={_fmt(C(S))}")
        return _pass(axiom, desc)

    if axiom == "Id":
        for S in subsets:
            once = C(S)
            twice = C(once)
            if twice != once:
                return _fail(axiom, desc, f"S={_fmt(S)} C(S)={_fmt(once)} C(C(S))={_fmt(twice)}")
        return _pass(axiom, desc)

    if axiom == "I":
        for S in subsets:
            full, local = C(S), rule(S, profile.restrict(S))
            if full != local:
                return _fail(axiom, desc, f"S={_fmt(S)} C(S;R)={_fmt(full)} C(S;R|S)={_fmt(local)}")
        return _pass(axiom, desc)

    if axiom in ("CA", "beta", "SUA"):
        # largest supersets first so witnesses come out as (small S, big S')
        for big in sorted(subsets, key=len, reverse=True):
            Cbig = C(big)
            for S in subsets:
                if not S <= big:
                    continue
                CS = C(S)
                if axiom == "CA":
                    if CS & Cbig:
                        lost = (S & Cbig) - CS
                        if lost:
                            x = min(lost)
                            return _fail(axiom, desc, f"x={x} S={_fmt(S)} S'={_fmt(big)} C(S)={_fmt(CS)} C(S')={_fmt(Cbig)}")
                elif axiom == "beta":
                    inside, outside = CS & Cbig, CS - Cbig
                    if inside and outside:
                        return _fail(axiom, desc, f"x={min(inside)} y={min(outside)} S={_fmt(S)} S'={_fmt(big)}")
                else:
                    if Cbig <= CS and CS != Cbig:
                        return _fail(axiom, desc, f"S={_fmt(S)} S'={_fmt(big)} C(S)={_fmt(CS)} C(S')={_fmt(Cbig)}")
        return _pass(axiom, desc)

    if axiom == "Iso":
        isos, iso_desc = _iso_candidates(profile, scope)
        desc = f"{desc},{iso_desc}"
        for phi, psi in isos:
            image = apply_isomorphism(profile, phi, psi)
            for S in subsets:
                lhs = rule(frozenset(phi[x] for x in S), image)
                rhs = frozenset(phi[x] for x in C(S))
                if lhs != rhs:
                    mapping = ",".join(f"{k}->{phi[k]}" for k in sorted(phi))
                    return _fail(axiom, desc, f"S={_fmt(S)} phi={mapping} psi={psi}")
        if iso_desc.startswith("isos=sampled"):
            return AxiomReport(axiom, PASS, desc, "pass (sampled)")
        return _pass(axiom, desc)

    # CC
    for S in subsets:
        if len(S) < 3:
            continue
        witness = _check_cc_at(rule, S, profile)
        if witness:
            return _fail(axiom, desc, witness)
    return _pass(axiom, desc)


def check_cc_well_defined(rule, S: Iterable[str], profile: Profile) -> AxiomReport:
    """The (CC) modification gives the same set whichever proper component starts the recursion."""
    rule = as_rule(rule)
    S = _as_set(S)
    sub = profile.restrict(S)
    reference = modify_CC(rule, S, sub)
    starts = [B for B in all_components(sub) if B != S]
    scope = f"S={_fmt(S)},components={len(starts)}"
    for B in starts:
        got = modify_CC(rule, S, sub, first_component=B)
        if got != reference:
            return _fail("CC-well-defined", scope, f"B={_fmt(B)} gives {_fmt(got)}, default gives {_fmt(reference)}")
    return _pass("CC-well-defined", scope)


# ----------------------------------------------------------- ratio functions


def _ratio(num: int, den: int) -> Fraction:
    return Fraction(1) if den == 0 else Fraction(int(num), int(den))


def ratio_functions(profile: Profile, x: str, y: str) -> tuple[Fraction, Fraction, Fraction]:
    """``(delta, pi, rho)`` for the ordered pair ``(x, y)``; ``0/0`` counts as 1."""
    t = profile.tally
    i, j = profile.index(x), profile.index(y)
    delta = _ratio(t.r[i, j], t.d[i, j])
    pi = _ratio(t.p[i, j], t.p[i, j] + t.p[j, i])
    rho = _ratio(t.r[i, j], t.r[i, j] + t.r[j, i])
    return delta, pi, rho


METRICS = ("d_P", "d_R", "d_M")


def _metric_matrix(profile: Profile, metric: str) -> list[list[Fraction]]:
    t = profile.tally
    m = profile.m
    if metric == "d_M":
        return [[1 - Fraction(int(t.p[i, j]), t.n) for j in range(m)] for i in range(m)]
    num, opp = (t.p, t.p) if metric == "d_P" else (t.r, t.r)
    return [[1 - _ratio(num[i, j], num[i, j] + opp[j, i]) for j in range(m)] for i in range(m)]


def check_triangle(profile: Profile, metric: str) -> AxiomReport:
    """``d(x,y) + d(y,z) >= d(x,z)`` over all ordered triples, exactly.

    ``na`` when the profile lies outside the class where the metric is claimed
    to be a distance: total quasi-orders for ``d_P``/``d_R``, 3-acyclic
    relations for ``d_M``.  Inside that class ``d_M`` still fails whenever some
    individual has ``x P y P z`` with ``x`` and ``z`` strictly unrelated.
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}")
    axiom = f"triangle-{metric}"
    for i, mat in enumerate(profile.stack):
        cls = classify_matrix(mat)
        ok = cls.acyclic3 if metric == "d_M" else (cls.quasi_order and cls.complete)
        if not ok:
            need = "3-acyclic" if metric == "d_M" else "total quasi-order"
            return AxiomReport(axiom, NA, "triples=all", f"individual {i} is not a {need}")
    dist = _metric_matrix(profile, metric)
    labels = profile.labels
    for a, b, c in itertools.product(range(profile.m), repeat=3):
        if dist[a][b] + dist[b][c] < dist[a][c]:
            return _fail(axiom, "triples=all", f"x={labels[a]} y={labels[b]} z={labels[c]}")
    return _pass(axiom, "triples=all")


# ----------------------------------------------------- ratio-rule pair checks


def _pair_predictor(spec: RuleSpec):
    """Pairwise acceptability ``x in C({x,y})`` predicted from pi/rho, or ``None``."""
    chain = spec.chain
    if len(chain.segments) != 1 or chain.augment:
        return None
    seg = chain.segments[0]
    kind, beta, gamma = seg.kind, seg.beta, seg.gamma
    T = MajorityType
    if kind in (T.B, T.M, T.MS) and beta == 0 and gamma >= HALF:
        return lambda t, i, j: _ratio(t.p[i, j], t.p[i, j] + t.p[j, i]) >= _ratio(t.p[j, i], t.p[i, j] + t.p[j, i])
    if (kind == T.D and beta <= HALF and gamma == 1) or (kind in (T.N, T.NS) and beta == 0 and gamma == 1):
        return lambda t, i, j: _ratio(t.r[i, j], t.r[i, j] + t.r[j, i]) >= _ratio(t.r[j, i], t.r[i, j] + t.r[j, i])
    if kind == T.P:
        lo, hi = min(gamma, HALF), max(beta, HALF)

        def predict_p(t, i, j):
            p, q = int(t.p[i, j]), int(t.p[j, i])
            if p + q == 0:
                return True
            if beta < HALF and p < lo * (p + q):
                return False
            if gamma > HALF and q > hi * (p + q):
                return False
            return True
        return predict_p
    if kind == T.R:
        lo, hi = min(gamma, HALF), max(beta, HALF)

        def predict_r(t, i, j):
            if beta < HALF and _ratio(t.r[i, j], t.r[i, j] + t.r[j, i]) < lo:
                return False
            if gamma > HALF and t.p[j, i] > 0 and _ratio(t.r[j, i], t.r[i, j] + t.r[j, i]) > hi:
                return False
            return True
        return predict_r
    return None


def check_ratio_rule_pairs(rule: RuleSpec | str, profile: Profile) -> AxiomReport:
    """Pairwise choices agree with the pi (or rho) threshold characterization."""
    spec = parse_rule(rule) if isinstance(rule, str) else rule
    predict = _pair_predictor(spec)
    if predict is None:
        raise RuleConfigError(f"{spec} is not one of the ratio-rule families")
    compiled = CompiledRule(spec)
    t = profile.tally
    labels = profile.labels
    for i, j in itertools.permutations(range(profile.m), 2):
        x, y = labels[i], labels[j]
        got = x in compiled(frozenset((x, y)), profile)
        if got != predict(t, i, j):
            return _fail("ratio-pairs", "pairs=all", f"x={x} y={y} chosen={got}")
    return _pass("ratio-pairs", "pairs=all")


# ---------------------------------------------------------------- dispatcher


def _first_failure(axiom: str, reports: Iterable[AxiomReport], desc: str) -> AxiomReport:
    for rep in reports:
        if rep.verdict == FAIL:
            return AxiomReport(axiom, FAIL, desc, f"{rep.scope} {rep.witness}")
    return _pass(axiom, desc)


def run_axiom(axiom: str, rule: RuleSpec | str, profile: Profile, scope: Scope = DEFAULT_SCOPE) -> AxiomReport:
    """Check one axiom id over every feasible set in ``scope``.

    Immunity ids are checked against each majority relation the rule's chain
    is built from.
    """
    spec = parse_rule(rule) if isinstance(rule, str) else rule
    compiled = CompiledRule(spec)
    if axiom in CHOICE_AXIOMS:
        return check_choice_consistency(axiom, compiled, profile, scope)
    if axiom not in AXIOM_IDS:
        raise ValueError(f"unknown axiom {axiom!r}; expected one of {AXIOM_IDS}")
    desc = scope.describe(profile.m)
    subsets = [S for S in scope.subsets(profile.labels) if len(S) >= 2]
    if axiom in PARETO_AXIOMS:
        return _first_failure(axiom, (check_pareto(axiom, compiled, S, profile) for S in subsets), desc)
    if axiom == "sNNR":
        return _first_failure(axiom, (check_sNNR(compiled, S, profile) for S in subsets), desc)
    if axiom == "PR":
        return _first_failure(axiom, (check_PR(compiled, S, profile) for S in subsets), desc)
    level = {"wIm": "weak", "Im": "plain", "sIm": "strong"}[axiom]

    def reports():
        for S in subsets:
            for member in build_chain(spec.chain, S, profile).members:
                for kind, alpha, raw in member.sources:
                    rep = check_immunity(level, compiled, raw, S, profile)
                    if rep.verdict == FAIL:
                        yield AxiomReport(axiom, FAIL, rep.scope, f"A={kind}_{alpha} {rep.witness}")
                        return
            yield _pass(axiom)
    return _first_failure(axiom, reports(), desc)
