"""Profiles of individual relations, pairwise tallies, components and quotients."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Literal, Sequence

import numpy as np

from .relations import Relation, RelationError, _check_labels, feasible_indices


class ProfileError(ValueError):
    """Malformed profile or an operation that does not apply to it."""


class Profile:
    """Ordered tuple of reflexive relations on one shared set of alternatives.

    ``stack[i, x, y]`` is true when individual ``i`` holds ``x R_i y``.
    Instances are immutable and hashable.
    """

    def __init__(self, labels: Sequence[str], stack):
        labels = _check_labels(labels)
        arr = np.array(stack, dtype=bool)
        m = len(labels)
        if arr.ndim != 3 or arr.shape[1:] != (m, m):
            raise ProfileError(f"stack shape {arr.shape} does not fit {m} alternatives")
        if arr.shape[0] < 1:
            raise ProfileError("a profile needs at least one individual")
        if not arr[:, np.arange(m), np.arange(m)].all():
            raise ProfileError("every individual relation must be reflexive")
        arr.setflags(write=False)
        self.labels = labels
        self.stack = arr
        self._index = {lab: i for i, lab in enumerate(labels)}
        self._hash = None

    @classmethod
    def from_relations(cls, relations: Sequence[Relation]) -> "Profile":
        if not relations:
            raise ProfileError("a profile needs at least one individual")
        labels = relations[0].labels
        if any(r.labels != labels for r in relations):
            raise ProfileError("individual relations live on different universes")
        return cls(labels, np.stack([r.matrix for r in relations]))

    @classmethod
    def from_orders(cls, labels: Sequence[str], orders: Sequence[Sequence[str]]) -> "Profile":
        """Profile of linear orders, each given best-first."""
        labels = _check_labels(labels)
        index = {lab: i for i, lab in enumerate(labels)}
        m = len(labels)
        stack = np.zeros((len(orders), m, m), dtype=bool)
        for k, order in enumerate(orders):
            if sorted(order) != sorted(labels):
                raise ProfileError(f"order {order!r} is not a permutation of the universe")
            for a, x in enumerate(order):
                for y in order[a:]:
                    stack[k, index[x], index[y]] = True
        return cls(labels, stack)

    @property
    def n(self) -> int:
        return self.stack.shape[0]

    @property
    def m(self) -> int:
        return len(self.labels)

    @property
    def individuals(self) -> list[Relation]:
        return [Relation(self.labels, mat) for mat in self.stack]

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ProfileError(f"unknown alternative {label!r}") from None

    def indices(self, S: Iterable[str] | None) -> np.ndarray:
        try:
            return feasible_indices(self.labels, self._index, S)
        except RelationError as exc:
            raise ProfileError(str(exc)) from None

    def restrict(self, S: Iterable[str]) -> "Profile":
        idx = self.indices(S)
        if len(idx) == self.m:
            return self
        return Profile([self.labels[i] for i in idx], self.stack[:, idx][:, :, idx])

    def permute_individuals(self, order: Sequence[int]) -> "Profile":
        """``(R_order[0], R_order[1], ...)``."""
        return Profile(self.labels, self.stack[list(order)])

    def relabel(self, mapping: dict[str, str]) -> "Profile":
        """Apply a bijection of labels; alternative order follows the new labels' positions."""
        new_labels = [mapping[x] for x in self.labels]
        if len(set(new_labels)) != len(new_labels):
            raise ProfileError("relabelling is not injective")
        return Profile(new_labels, self.stack)

    @cached_property
    def tally(self) -> "Tally":
        return tally(self)

    @cached_property
    def decided_count(self) -> int:
        return d_of_set(self)

    def __eq__(self, other):
        if not isinstance(other, Profile):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.stack, other.stack)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.labels, self.stack.shape, self.stack.tobytes()))
        return self._hash

    def __repr__(self):
        return f"Profile(m={self.m}, n={self.n}, labels={' '.join(self.labels)})"


@dataclass(frozen=True, eq=False)
class Tally:
    """Pairwise counts of individuals (all ``m x m`` integer matrices)."""

    n: int
    r: np.ndarray
    p: np.ndarray
    e: np.ndarray
    u: np.ndarray
    d: np.ndarray


def tally(profile: Profile) -> Tally:
    R = profile.stack
    Rt = R.transpose(0, 2, 1)
    arrays = {
        "r": R.sum(axis=0),
        "p": (R & ~Rt).sum(axis=0),
        "e": (R & Rt).sum(axis=0),
        "d": (R | Rt).sum(axis=0),
    }
    arrays["u"] = profile.n - arrays["d"]
    for arr in arrays.values():
        arr.setflags(write=False)
    return Tally(n=profile.n, **arrays)


def d_of_set(profile: Profile, S: Iterable[str] | None = None) -> int:
    """Number of individuals who are not completely undecided on ``S``.

    An individual counts when ``x R_i y`` for some distinct ``x, y`` in ``S``.
    This is the denominator of the semi-relative majority types; it dominates
    every pairwise ``d_xy`` inside ``S`` and is unchanged by switching a pair
    between strict preference and equivalence.
    """
    idx = profile.indices(S)
    sub = profile.stack[:, idx][:, :, idx]
    off = ~np.eye(len(idx), dtype=bool)
    return int((sub & off).any(axis=(1, 2)).sum())


def strict_voters(profile: Profile, S: Iterable[str] | None = None) -> int:
    """Number of individuals with some strict preference ``x P_i y`` inside ``S``."""
    idx = profile.indices(S)
    sub = profile.stack[:, idx][:, :, idx]
    return int((sub & ~sub.transpose(0, 2, 1)).any(axis=(1, 2)).sum())


# ----------------------------------------------------------------- components


def _component_mask(stack: np.ndarray, members: np.ndarray) -> bool:
    """True if the index set ``members`` is uniform towards every outsider."""
    outside = np.ones(stack.shape[1], dtype=bool)
    outside[members] = False
    rows = stack[:, members][:, :, outside]  # member R outsider
    cols = stack[:, :, members][:, outside, :]  # outsider R member
    same_rows = (rows == rows[:, :1, :]).all()
    same_cols = (cols == cols[:, :, :1]).all()
    return bool(same_rows and same_cols)


def is_component(B: Iterable[str], R: Relation) -> bool:
    """Is ``B`` (at least two alternatives) a generalized component of ``R``?"""
    idx = R.indices(B)
    if len(idx) < 2:
        raise ProfileError("a component has at least two alternatives")
    return _component_mask(R.matrix[None], idx)


def is_profile_component(B: Iterable[str], profile: Profile) -> bool:
    """Is ``B`` a component of every individual relation of the profile?"""
    idx = profile.indices(B)
    if len(idx) < 2:
        raise ProfileError("a component has at least two alternatives")
    return _component_mask(profile.stack, idx)


def all_components(profile: Profile, S: Iterable[str] | None = None) -> list[frozenset[str]]:
    """Every component of ``profile|_S`` by exhaustive subset enumeration.

    Exponential; meant for small test universes.  ``S`` itself is included.
    """
    sub = profile if S is None else profile.restrict(S)
    found = []
    for k in range(2, sub.m + 1):
        for combo in itertools.combinations(range(sub.m), k):
            if _component_mask(sub.stack, np.array(combo)):
                found.append(frozenset(sub.labels[i] for i in combo))
    return found


def component_label(members: Iterable[str], taken: Iterable[str] = ()) -> str:
    """Deterministic fresh label for a collapsed component, e.g. ``{b,b'}``."""
    label = "{" + ",".join(sorted(members)) + "}"
    taken = set(taken)
    while label in taken:
        label += "'"
    return label


def quotient(profile: Profile, B: Iterable[str], label: str | None = None) -> tuple[Profile, str]:
    """Collapse the component ``B`` into a single new alternative.

    Returns the quotient profile and the label used for the collapsed
    alternative, which takes the position of B's first member.
    """
    idx = profile.indices(B)
    if len(idx) < 2:
        raise ProfileError("a component has at least two alternatives")
    if not _component_mask(profile.stack, idx):
        raise ProfileError(f"{sorted(B)} is not a component of the profile")
    members = {profile.labels[i] for i in idx}
    if label is None:
        label = component_label(members, set(profile.labels) - members)
    keep = [i for i in range(profile.m) if i not in set(idx.tolist()) or i == idx[0]]
    new_labels = [label if i == idx[0] else profile.labels[i] for i in keep]
    stack = profile.stack
    out = stack[:, keep][:, :, keep].copy()
    pos = keep.index(int(idx[0]))
    # collapsed alternative relates to an outsider y iff every member does
    out[:, pos, :] = stack[:, idx][:, :, keep].all(axis=1)
    out[:, :, pos] = stack[:, keep][:, :, idx].all(axis=2)
    out[:, pos, pos] = True
    return Profile(new_labels, out), label


# --------------------------------------------------------------- isomorphisms


def find_isomorphism(p1: Profile, p2: Profile):
    """Brute-force search for ``(phi, psi)`` with ``x R_i y <=> phi(x) R'_psi(i) phi(y)``.

    ``phi`` maps labels of ``p1`` to labels of ``p2``; ``psi`` maps individual
    indices.  Returns ``None`` when the profiles are not isomorphic.
    """
    if p1.m != p2.m or p1.n != p2.n:
        return None
    t1, t2 = p1.tally, p2.tally
    for name in ("r", "p", "e"):
        a, b = getattr(t1, name), getattr(t2, name)
        if sorted(a.ravel().tolist()) != sorted(b.ravel().tolist()):
            return None
    targets: dict[bytes, list[int]] = {}
    for j, mat in enumerate(p2.stack):
        targets.setdefault(mat.tobytes(), []).append(j)
    want = Counter({k: len(v) for k, v in targets.items()})
    for perm in itertools.permutations(range(p2.m)):
        perm = np.array(perm)
        # image[i][perm[x], perm[y]] = p1[i][x, y]
        inv = np.argsort(perm)
        images = [mat[np.ix_(inv, inv)].tobytes() for mat in p1.stack]
        if Counter(images) != want:
            continue
        pools = {k: list(v) for k, v in targets.items()}
        psi = {i: pools[key].pop(0) for i, key in enumerate(images)}
        phi = {p1.labels[x]: p2.labels[perm[x]] for x in range(p1.m)}
        return phi, psi
    return None


def apply_isomorphism(profile: Profile, phi: dict[str, str], psi: Sequence[int] | dict[int, int]) -> Profile:
    """Image of ``profile`` under label bijection ``phi`` and individual bijection ``psi``.

    The image keeps the label order of ``profile`` so that ``phi`` acts as a
    permutation of positions.
    """
    labels = profile.labels
    pos = {lab: i for i, lab in enumerate(labels)}
    perm = np.array([pos[phi[x]] for x in labels])
    inv = np.argsort(perm)
    n = profile.n
    stack = np.empty_like(profile.stack)
    for i in range(n):
        stack[psi[i]] = profile.stack[i][np.ix_(inv, inv)]
    return Profile(labels, stack)


# -------------------------------------------------------------- perturbations


@dataclass(frozen=True)
class PerturbationStep:
    """One individual moves the pair ``{x, y}`` in favour of ``x``.

    ``promote``: ``x E_i y`` becomes ``x P_i y``.
    ``demote``: ``y P_i x`` becomes ``y E_i x``.
    """

    individual: int
    x: str
    y: str
    direction: Literal["promote", "demote"]

    def __str__(self):
        return f"{self.direction}(i={self.individual}, {self.x} over {self.y})"


def step_is_valid(profile: Profile, step: PerturbationStep) -> bool:
    if not 0 <= step.individual < profile.n or step.x == step.y:
        return False
    if step.x not in profile._index or step.y not in profile._index:
        return False
    R = profile.stack[step.individual]
    x, y = profile.index(step.x), profile.index(step.y)
    if step.direction == "promote":
        return bool(R[x, y] and R[y, x])
    if step.direction == "demote":
        return bool(R[y, x] and not R[x, y])
    return False


def apply_perturbation(profile: Profile, step: PerturbationStep) -> Profile:
    if not step_is_valid(profile, step):
        raise ProfileError(f"perturbation {step} does not apply to this profile")
    x, y = profile.index(step.x), profile.index(step.y)
    stack = profile.stack.copy()
    if step.direction == "promote":
        stack[step.individual, y, x] = False
    else:
        stack[step.individual, x, y] = True
    return Profile(profile.labels, stack)


def valid_steps(profile: Profile, favoured: str | None = None, against: str | None = None) -> list[PerturbationStep]:
    """All single-pair steps applicable to the profile, optionally filtered."""
    steps = []
    for i in range(profile.n):
        for x in profile.labels:
            if favoured is not None and x != favoured:
                continue
            for y in profile.labels:
                if x == y or (against is not None and y != against):
                    continue
                for direction in ("promote", "demote"):
                    step = PerturbationStep(i, x, y, direction)
                    if step_is_valid(profile, step):
                        steps.append(step)
    return steps
