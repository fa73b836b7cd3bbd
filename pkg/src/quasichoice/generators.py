"""Seeded random profiles of several preference classes.

``arbitrary-reflexive``, ``linear-order``, ``total-quasi-order`` and
``tournament`` are sampled uniformly from their class.  ``partial-order`` and
``quasi-order`` use random-extension heuristics and are *not* uniform.
"""

from __future__ import annotations

import string
from functools import lru_cache
from math import comb

import numpy as np

from .profiles import Profile, ProfileError
from .relations import closure_matrix

PROFILE_CLASSES = (
    "arbitrary-reflexive",
    "linear-order",
    "total-quasi-order",
    "partial-order",
    "quasi-order",
    "tournament",
)
_ALIASES = {"tournament-like": "tournament"}


def default_labels(m: int) -> list[str]:
    if m <= 26:
        return list(string.ascii_lowercase[:m])
    return [f"x{i}" for i in range(m)]


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@lru_cache(maxsize=None)
def _fubini(k: int) -> int:
    """Number of ordered set partitions (weak orders) of a k-set."""
    if k == 0:
        return 1
    return sum(comb(k, j) * _fubini(k - j) for j in range(1, k + 1))


def _randbelow(rng: np.random.Generator, bound: int) -> int:
    """Uniform integer in ``[0, bound)`` for arbitrarily large ``bound``."""
    bits = bound.bit_length()
    while True:
        value = int.from_bytes(rng.bytes((bits + 7) // 8), "little") >> (-bits % 8)
        if value < bound:
            return value


def _weak_order_levels(m: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform weak order as a level per element (0 = best)."""
    remaining = list(rng.permutation(m))
    level = np.empty(m, dtype=int)
    depth = 0
    while remaining:
        k = len(remaining)
        # top block of size j has probability C(k, j) * F(k - j) / F(k)
        weights = [comb(k, j) * _fubini(k - j) for j in range(1, k + 1)]
        pick = _randbelow(rng, _fubini(k))
        j = 1
        for w in weights:
            if pick < w:
                break
            pick -= w
            j += 1
        top, remaining = remaining[:j], remaining[j:]
        level[top] = depth
        depth += 1
    return level


def _one(cls: str, m: int, rng: np.random.Generator) -> np.ndarray:
    eye = np.eye(m, dtype=bool)
    if cls == "arbitrary-reflexive":
        return (rng.random((m, m)) < 0.5) | eye
    if cls == "linear-order":
        rank = np.argsort(rng.permutation(m))
        return rank[:, None] <= rank[None, :]
    if cls == "total-quasi-order":
        level = _weak_order_levels(m, rng)
        return level[:, None] <= level[None, :]
    if cls == "tournament":
        upper = np.triu(rng.random((m, m)) < 0.5, k=1)
        return upper | np.triu(~upper, k=1).T | eye
    if cls == "partial-order":
        # random DAG consistent with a random permutation, then closed
        rank = np.argsort(rng.permutation(m))
        above = (rank[:, None] < rank[None, :]) & (rng.random((m, m)) < 0.5)
        return closure_matrix(above | eye)
    if cls == "quasi-order":
        # random set partition into blocks, random partial order on the blocks
        blocks = rng.integers(0, m, size=m)
        _, blocks = np.unique(blocks, return_inverse=True)
        k = blocks.max() + 1
        order = _one("partial-order", k, rng)
        return order[np.ix_(blocks, blocks)]
    raise ProfileError(f"unknown profile class {cls!r}; expected one of {PROFILE_CLASSES}")


def random_relation_matrix(cls: str, m: int, seed=None) -> np.ndarray:
    return _one(_ALIASES.get(cls, cls), m, _rng(seed))


def random_profile(seed, m: int, n: int, cls: str = "arbitrary-reflexive", labels=None) -> Profile:
    """Profile of ``n`` independent draws from ``cls`` on ``m`` alternatives."""
    cls = _ALIASES.get(cls, cls)
    if cls not in PROFILE_CLASSES:
        raise ProfileError(f"unknown profile class {cls!r}; expected one of {PROFILE_CLASSES}")
    if m < 1 or n < 1:
        raise ProfileError("need m >= 1 and n >= 1")
    rng = _rng(seed)
    stack = np.stack([_one(cls, m, rng) for _ in range(n)])
    return Profile(labels or default_labels(m), stack)


def substitute(outer: Profile, inners: dict[str, Profile]) -> Profile:
    """Replace alternatives of ``outer`` by whole sub-profiles (lexicographic substitution).

    Each replaced alternative's members inherit its relations to everything
    outside and take their mutual relations from the inner profile, so every
    inner universe with two or more members is a component of the result.
    """
    labels: list[str] = []
    source: list[int] = []
    inner_of: list[tuple[str, int] | None] = []
    for k, lab in enumerate(outer.labels):
        inner = inners.get(lab)
        if inner is None:
            labels.append(lab)
            source.append(k)
            inner_of.append(None)
            continue
        if inner.n != outer.n:
            raise ProfileError("inner and outer profiles need the same individuals")
        for j, sub_lab in enumerate(inner.labels):
            labels.append(sub_lab)
            source.append(k)
            inner_of.append((lab, j))
    src = np.array(source)
    stack = outer.stack[:, src][:, :, src].copy()
    for lab, inner in inners.items():
        pos = [i for i, tag in enumerate(inner_of) if tag is not None and tag[0] == lab]
        stack[:, np.ix_(pos, pos)[0], np.ix_(pos, pos)[1]] = inner.stack
    return Profile(labels, stack)


def planted_profile(seed, m: int, n: int, cls: str = "arbitrary-reflexive", blocks: int = 2,
                    block_size: int = 2) -> Profile:
    """Random profile of class ``cls`` with ``blocks`` planted components of ``block_size``.

    Substitution keeps completeness and antisymmetry.  For the transitive
    classes with ties, an individual who ties a replaced alternative with
    another one is made indifferent inside the block, which keeps transitivity.
    """
    rng = _rng(seed)
    outer_m = m - blocks * (block_size - 1)
    if blocks < 1 or block_size < 2 or outer_m < max(blocks, 2):
        raise ProfileError("not enough alternatives to plant proper components")
    outer = random_profile(rng, outer_m, n, cls, labels=[f"o{i}" for i in range(outer_m)])
    inners = {}
    for b in range(blocks):
        names = [f"b{b}{chr(ord('a') + j)}" for j in range(block_size)]
        inner = random_profile(rng, block_size, n, cls, labels=names)
        if cls in ("total-quasi-order", "quasi-order"):
            tied = (outer.stack[:, b, :] & outer.stack[:, :, b]).sum(axis=1) > 1
            stack = inner.stack.copy()
            stack[tied] = True
            inner = Profile(names, stack)
        inners[outer.labels[b]] = inner
    return substitute(outer, inners)
