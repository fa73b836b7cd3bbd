"""Chain rules and the Condorcet, idempotency and composition-consistency modifications.

A *choice rule* here is any callable ``rule(S, profile) -> frozenset`` taking a
nonempty collection of labels ``S``.  :func:`compile_rule` turns a textual
rule such as ``D(0.5,1]+N1+M1^C^GC^CC^Id`` into such a callable; the
``modify_*`` functions implement one modification each on top of an
arbitrary rule.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .majority import HALF, ChainSpec, MajorityType, build_chain, parse_chain
from .profiles import Profile, ProfileError, quotient
from .relations import RelationError, common_optimals

ChoiceFunction = Callable[[frozenset, Profile], frozenset]

MODIFIERS = ("C", "GC", "CC", "Id")


class RuleConfigError(ValueError):
    """Rule text or modifier combination that cannot be evaluated."""


def _as_set(S) -> frozenset:
    if isinstance(S, str):
        raise ProfileError("a feasible set must be a collection of labels, not a string")
    S = frozenset(S)
    if not S:
        raise ProfileError("feasible set is empty")
    return S


# ----------------------------------------------------------------- base rule


def base_choice(chain: ChainSpec | str, S: Iterable[str], profile: Profile) -> frozenset:
    """Common optimal elements of the chain's hulls on ``S``."""
    S = _as_set(S)
    if len(S) == 1:
        return S
    built = build_chain(chain, S, profile)
    return common_optimals(built.relations)


# ------------------------------------------------------- Condorcet-type mods


def modify_C(rule: ChoiceFunction, S: Iterable[str], profile: Profile) -> frozenset:
    """``{x}`` when ``rule({x, y}) = {x}`` for every other ``y`` in ``S``, else ``rule(S)``."""
    S = _as_set(S)
    if len(S) == 1:
        return S
    for x in sorted(S):
        if all(rule(frozenset((x, y)), profile) == {x} for y in S if y != x):
            return frozenset((x,))
    return rule(S, profile)


def pairwise_acceptable(rule: ChoiceFunction, S: frozenset, profile: Profile) -> frozenset:
    """Members of ``S`` chosen from every pair they form within ``S``."""
    return frozenset(
        x for x in S if all(x in rule(frozenset((x, y)), profile) for y in S if y != x)
    )


def modify_GC(rule: ChoiceFunction, S: Iterable[str], profile: Profile) -> frozenset:
    """``rule(S)`` plus every alternative that is acceptable against each single rival."""
    S = _as_set(S)
    if len(S) == 1:
        return S
    return rule(S, profile) | pairwise_acceptable(rule, S, profile)


def modify_Id(rule: ChoiceFunction, S: Iterable[str], profile: Profile) -> frozenset:
    """Iterate ``T <- rule(T)`` from ``S`` until it stops shrinking."""
    current = _as_set(S)
    while True:
        nxt = rule(current, profile)
        if nxt == current:
            return current
        if not nxt <= current:
            raise RuleConfigError("rule returned alternatives outside the feasible set")
        current = nxt


# --------------------------------------------------------------- components


def phi_step(A: Iterable[str], S: Iterable[str], profile: Profile) -> frozenset:
    """One closure step towards the smallest component containing ``A``.

    Adds every ``y`` in ``S`` for which some individual does not relate ``y``
    in one uniform way (all strictly below, all equivalent, all strictly
    above, or all undecided) to the members of ``A``.
    """
    A = _as_set(A)
    S = _as_set(S)
    if not A <= S:
        raise ProfileError("A must be a subset of S")
    sub = profile.restrict(S)
    R = sub.stack
    Rt = R.transpose(0, 2, 1)
    P, E, U = R & ~Rt, R & Rt, ~(R | Rt)
    idx = sub.indices(A)
    below = P[:, idx, :].all(axis=1)  # x P_i y for every x in A
    equiv = E[:, idx, :].all(axis=1)
    above = P[:, :, idx].all(axis=2)  # y P_i x for every x in A
    undecided = U[:, idx, :].all(axis=1)
    uniform = (below | equiv | above | undecided).all(axis=0)
    return A | frozenset(lab for lab, ok in zip(sub.labels, uniform) if not ok)


def _difference_tensor(stack: np.ndarray) -> np.ndarray:
    """``diff[a, b, z]``: some individual relates ``z`` differently to ``a`` than to ``b``."""
    m = stack.shape[1]
    diff = np.zeros((m, m, m), dtype=bool)
    for R in stack:
        diff |= R[:, None, :] != R[None, :, :]
        diff |= R.T[:, None, :] != R.T[None, :, :]
    return diff


def _closure_from(stack: np.ndarray, seed: Sequence[int], diff: np.ndarray | None = None) -> np.ndarray:
    """Index mask of the smallest component of ``stack`` containing ``seed``.

    Equivalent to iterating :func:`phi_step` to its fixpoint: an outsider is
    pulled in as soon as one member differs from the reference member in how
    some individual relates it to that outsider.
    """
    if diff is None:
        diff = _difference_tensor(stack)
    pulls = diff[seed[0]]
    inside = np.zeros(stack.shape[1], dtype=bool)
    inside[list(seed)] = True
    count = int(inside.sum())
    while True:
        inside = inside | pulls[inside].any(axis=0)
        grown = int(inside.sum())
        if grown == count:
            return inside
        count = grown


def smallest_component(x: str, y: str, S: Iterable[str], profile: Profile) -> frozenset:
    """Smallest component of ``profile|_S`` containing both ``x`` and ``y``."""
    if x == y:
        raise ProfileError("smallest_component needs two distinct alternatives")
    sub = profile.restrict(_as_set(S))
    mask = _closure_from(sub.stack, [sub.index(x), sub.index(y)])
    return frozenset(lab for lab, ok in zip(sub.labels, mask) if ok)


def pair_components(S: Iterable[str], profile: Profile) -> dict[tuple[str, str], frozenset]:
    """``B_xy`` for every pair ``x < y`` of ``S`` (label order of the universe)."""
    sub = profile.restrict(_as_set(S))
    diff = _difference_tensor(sub.stack)
    out = {}
    for i, j in itertools.combinations(range(sub.m), 2):
        mask = _closure_from(sub.stack, [i, j], diff)
        out[(sub.labels[i], sub.labels[j])] = frozenset(lab for lab, ok in zip(sub.labels, mask) if ok)
    return out


def minimal_proper_component(S: Iterable[str], profile: Profile) -> Optional[frozenset]:
    """A smallest proper component of ``profile|_S``, or ``None``.

    Ties are broken by the sorted member labels so results are reproducible.
    """
    S = _as_set(S)
    if len(S) <= 2:
        return None
    sub = profile.restrict(S)
    diff = _difference_tensor(sub.stack)
    best_key, best = None, None
    for i, j in itertools.combinations(range(sub.m), 2):
        mask = _closure_from(sub.stack, [i, j], diff)
        size = int(mask.sum())
        if size == sub.m:
            continue
        members = frozenset(lab for lab, ok in zip(sub.labels, mask) if ok)
        key = (size, sorted(members))
        if best_key is None or key < best_key:
            best_key, best = key, members
    return best


def minimal_components(S: Iterable[str], profile: Profile) -> list[frozenset]:
    """All inclusion-minimal proper components of ``profile|_S``, sorted."""
    S = _as_set(S)
    proper = {B for B in pair_components(S, profile).values() if B != S}
    minimal = [B for B in proper if not any(other < B for other in proper)]
    return sorted(minimal, key=lambda B: (len(B), sorted(B)))


def modify_CC(rule: ChoiceFunction, S: Iterable[str], profile: Profile, *,
              first_component: Iterable[str] | None = None,
              recurse: ChoiceFunction | None = None) -> frozenset:
    """Composition-consistent version of ``rule`` (recursion over quotient profiles).

    ``first_component`` forces the top-level component (it must be a proper
    component of ``profile|_S``); deeper levels always use
    :func:`minimal_proper_component`.  ``recurse`` lets a caller supply a
    memoised version of this very function for the recursive calls.
    """
    S = _as_set(S)
    if recurse is None:
        recurse = partial(modify_CC, rule)
    if len(S) == 1:
        return S
    sub = profile.restrict(S)
    if first_component is not None:
        B = frozenset(first_component)
        if not (2 <= len(B) < len(S) and B <= S):
            raise ProfileError("first_component must be a proper subset of S with two or more members")
    else:
        B = minimal_proper_component(S, sub)
        if B is None:
            return rule(S, sub)
    collapsed, label = quotient(sub, B)
    outer = recurse(frozenset(collapsed.labels), collapsed)
    if label not in outer:
        return outer
    return (outer - {label}) | recurse(B, sub)


# -------------------------------------------------------------- rule specs


@dataclass(frozen=True)
class RuleSpec:
    chain: ChainSpec
    modifiers: tuple[str, ...] = ()

    def __post_init__(self):
        for mod in self.modifiers:
            if mod not in MODIFIERS:
                raise RuleConfigError(f"unknown modifier {mod!r}; expected one of {MODIFIERS}")
        if len(set(self.modifiers)) != len(self.modifiers):
            raise RuleConfigError("each modifier may appear at most once")
        if "CC" in self.modifiers:
            before = self.modifiers[: self.modifiers.index("CC")]
            if not ({"C", "GC"} <= set(before) or condorcet_native(self.chain)):
                raise RuleConfigError(
                    "CC needs a rule satisfying (C) and (GC): put ^C and ^GC before ^CC, "
                    "or use only antisymmetric or only complete relation types"
                )

    def __str__(self):
        return str(self.chain) + "".join(f"^{m}" for m in self.modifiers)

    @classmethod
    def parse(cls, text: str) -> "RuleSpec":
        return parse_rule(text)


def parse_rule(text: str) -> RuleSpec:
    """Parse a chain followed by ``^C``, ``^GC``, ``^CC``, ``^Id`` suffixes."""
    head, *mods = [part.strip() for part in text.strip().split("^")]
    try:
        chain = parse_chain(head)
    except RelationError as exc:
        raise RuleConfigError(str(exc)) from None
    return RuleSpec(chain, tuple(mods))


def _segment_antisymmetric(kind: MajorityType, beta, gamma) -> bool:
    if kind in (MajorityType.U, MajorityType.E):
        return True
    return beta >= HALF and kind not in (MajorityType.N, MajorityType.NS, MajorityType.D)


def _segment_complete(kind: MajorityType, beta, gamma) -> bool:
    return gamma <= HALF and kind in (MajorityType.D, MajorityType.P, MajorityType.R)


def condorcet_native(chain: ChainSpec) -> bool:
    """True when every chain relation is antisymmetric, or every one is complete.

    Such chain rules satisfy (C) and (GC) without modification.
    """
    anti = all(_segment_antisymmetric(s.kind, s.beta, s.gamma) for s in chain.segments)
    anti = anti and all(a in ("M1", "B1") for a in chain.augment)
    complete = all(_segment_complete(s.kind, s.beta, s.gamma) for s in chain.segments)
    complete = complete and not chain.augment
    return anti or complete


class _Memo:
    """Per-rule cache keyed by ``(profile, S)``."""

    def __init__(self, fn: ChoiceFunction):
        self.fn = fn
        self.cache: dict = {}

    def __call__(self, S, profile: Profile) -> frozenset:
        S = _as_set(S)
        key = (profile, S)
        hit = self.cache.get(key)
        if hit is None:
            hit = self.cache[key] = self.fn(S, profile)
        return hit


class CompiledRule:
    """A :class:`RuleSpec` turned into a memoised choice function.

    ``stages[k]`` is the rule after the first ``k`` modifiers.  Caches live on
    the instance; results are deterministic so sharing one instance is safe.
    """

    def __init__(self, spec: RuleSpec | str):
        if isinstance(spec, str):
            spec = parse_rule(spec)
        self.spec = spec
        chain = spec.chain
        stages: list[tuple[str, _Memo]] = [("base", _Memo(partial(base_choice, chain)))]
        for mod in spec.modifiers:
            prev = stages[-1][1]
            if mod == "C":
                stage = _Memo(partial(modify_C, prev))
            elif mod == "GC":
                stage = _Memo(partial(modify_GC, prev))
            elif mod == "Id":
                stage = _Memo(partial(modify_Id, prev))
            else:
                stage = _Memo(None)
                stage.fn = partial(modify_CC, prev, recurse=stage)
            stages.append((mod, stage))
        self.stages = stages

    def __call__(self, S, profile: Profile) -> frozenset:
        return self.stages[-1][1](S, profile)

    def stage(self, name: str) -> ChoiceFunction:
        for label, fn in self.stages:
            if label == name:
                return fn
        raise KeyError(name)

    def __str__(self):
        return str(self.spec)


def compile_rule(spec: RuleSpec | str) -> CompiledRule:
    return CompiledRule(spec)


# ------------------------------------------------------------------ evaluate


@dataclass(frozen=True)
class TraceStep:
    stage: str
    chosen: frozenset
    note: str = ""

    def __str__(self):
        text = f"{self.stage}: {' '.join(sorted(self.chosen))}"
        return f"{text}  [{self.note}]" if self.note else text


@dataclass(frozen=True)
class ChoiceResult:
    chosen: frozenset
    trace: tuple[TraceStep, ...] = field(default=())


def evaluate(rule: RuleSpec | str | CompiledRule, S: Iterable[str] | None, profile: Profile) -> ChoiceResult:
    """Apply the chain rule and then each modifier in order; record every stage."""
    compiled = rule if isinstance(rule, CompiledRule) else CompiledRule(rule)
    S = frozenset(profile.labels) if S is None else _as_set(S)
    sub = profile.restrict(S)
    trace = []
    for name, fn in compiled.stages:
        chosen = fn(S, sub)
        note = ""
        if name == "base":
            members = build_chain(compiled.spec.chain, S, sub).members if len(S) > 1 else []
            note = "chain: " + " <= ".join("/".join(m.source_names) for m in members) if members else "singleton"
        elif name == "CC":
            B = minimal_proper_component(S, sub)
            note = "component-free" if B is None else "first component {" + ",".join(sorted(B)) + "}"
        trace.append(TraceStep(name, chosen, note))
    return ChoiceResult(trace[-1].chosen, tuple(trace))
