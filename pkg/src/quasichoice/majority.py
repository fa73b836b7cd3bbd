"""The ten majority/minority relation types, their critical strengths, and chains.

Every threshold is compared in cross-multiplied integer form, so a strength
``a/b`` never passes through floating point.  For strengths above one half
the "> 0" side conditions of the majority definitions apply; at or below one
half they are dropped, while the strict-difference clauses of the persuaded
types U and E are kept.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .profiles import Profile
from .relations import NotNestedError, Relation, RelationError, check_nested, closure_matrix

HALF = Fraction(1, 2)
ONE = Fraction(1)


class MajorityType(enum.Enum):
    M = "M"
    N = "N"
    MS = "MS"
    NS = "NS"
    B = "B"
    D = "D"
    P = "P"
    R = "R"
    U = "U"
    E = "E"

    def __str__(self):
        return self.value


ALL_TYPES = tuple(MajorityType)
STRICT_TYPES = frozenset({MajorityType.M, MajorityType.MS, MajorityType.B, MajorityType.P, MajorityType.E, MajorityType.U})


def as_type(tag) -> MajorityType:
    if isinstance(tag, MajorityType):
        return tag
    try:
        return MajorityType(str(tag).upper().replace("^S", "S"))
    except ValueError:
        raise RelationError(f"unknown majority type {tag!r}") from None


def parse_strength(text) -> Fraction:
    """Exact rational from ``"0.5"``, ``"4/7"``, an int or a Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise RelationError("strengths must be exact; pass a string or Fraction, not a float")
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise RelationError(f"cannot read strength {text!r}") from None


def _check_strength(alpha: Fraction) -> Fraction:
    alpha = parse_strength(alpha)
    if not 0 < alpha <= 1:
        raise RelationError(f"strength {alpha} is outside (0, 1]")
    return alpha


# ------------------------------------------------------------- raw matrices


def _stats(kind: MajorityType, profile: Profile):
    """``(stat, den)`` integer matrices of the type's defining ratio ``stat/den``."""
    t = profile.tally
    n = t.n
    if kind is MajorityType.M:
        return t.p, np.full_like(t.p, n)
    if kind is MajorityType.N:
        return t.r, np.full_like(t.r, n)
    if kind is MajorityType.MS:
        return t.p, np.full_like(t.p, profile.decided_count)
    if kind is MajorityType.NS:
        return t.r, np.full_like(t.r, profile.decided_count)
    if kind is MajorityType.B:
        return t.p, t.d
    if kind is MajorityType.D:
        return t.r, t.d
    if kind is MajorityType.P:
        return t.p, t.p + t.p.T
    if kind is MajorityType.R:
        return t.r, t.r + t.r.T
    if kind is MajorityType.U:
        return t.p + t.u, np.full_like(t.p, n)
    if kind is MajorityType.E:
        return t.p + t.e, t.d
    raise AssertionError(kind)


def majority_matrix(kind: MajorityType, alpha: Fraction, profile: Profile) -> np.ndarray:
    """Boolean matrix of ``A_alpha`` on the whole universe of ``profile``.

    ``alpha`` may be any positive rational here; callers that need the
    ``(0, 1]`` contract go through :func:`majority_relation`.
    """
    kind = as_type(kind)
    a, b = alpha.numerator, alpha.denominator
    minority = alpha <= HALF
    t = profile.tally
    stat, den = _stats(kind, profile)
    out = b * stat >= a * den
    if kind in (MajorityType.MS, MajorityType.NS, MajorityType.B, MajorityType.D, MajorityType.P):
        if not minority:
            out &= den > 0
    elif kind is MajorityType.R:
        if not minority:
            out &= t.p > 0
    elif kind in (MajorityType.U, MajorityType.E):
        out &= t.p > t.p.T
    np.fill_diagonal(out, True)
    return out


def majority_relation(kind, alpha, S: Iterable[str] | None, profile: Profile) -> Relation:
    """``A_alpha`` on the feasible set ``S`` (``None`` = whole universe)."""
    kind = as_type(kind)
    alpha = _check_strength(alpha)
    sub = profile if S is None else profile.restrict(S)
    return Relation(sub.labels, majority_matrix(kind, alpha, sub))


# -------------------------------------------------------- critical strengths


def _candidate_strengths(kind: MajorityType, profile: Profile, lo: Fraction, hi: Fraction) -> list[Fraction]:
    stat, den = _stats(kind, profile)
    off = ~np.eye(profile.m, dtype=bool)
    pairs = set(zip(stat[off & (den > 0)].tolist(), den[off & (den > 0)].tolist()))
    found = set()
    for s, d in pairs:
        g = gcd(s, d) or 1
        c = Fraction(s // g, d // g)
        if lo < c < hi:
            found.add(c)
    if lo < HALF < hi:
        found.add(HALF)
    found.add(hi)
    return sorted(found)


def critical_strengths(kind, S: Iterable[str] | None, profile: Profile, beta=0, gamma=1) -> list[Fraction]:
    """Strengths in ``(beta, gamma]`` at which ``A_alpha`` takes each of its distinct values.

    ``A_alpha`` is constant on ``(c_j, c_{j+1}]`` between consecutive returned
    values; relations at consecutive returned values differ, and ``gamma`` is
    always the last entry.
    """
    kind = as_type(kind)
    beta, gamma = parse_strength(beta), parse_strength(gamma)
    if not 0 <= beta < gamma <= 1:
        raise RelationError(f"invalid strength range ({beta}, {gamma}]")
    sub = profile if S is None else profile.restrict(S)
    cands = _candidate_strengths(kind, sub, beta, gamma)
    mats = [majority_matrix(kind, c, sub) for c in cands]
    keep = [c for c, mat, nxt in zip(cands, mats, mats[1:]) if not np.array_equal(mat, nxt)]
    keep.append(cands[-1])
    return keep


# --------------------------------------------------------------------- chains

_AUGMENTS = {"M1": MajorityType.M, "N1": MajorityType.N, "B1": MajorityType.B}


@dataclass(frozen=True)
class Segment:
    kind: MajorityType
    beta: Fraction
    gamma: Fraction

    def __post_init__(self):
        if not 0 <= self.beta < self.gamma <= 1:
            raise RelationError(f"invalid strength range ({self.beta}, {self.gamma}] in segment")

    def __str__(self):
        return f"{self.kind}({_fmt(self.beta)},{_fmt(self.gamma)}]"


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class ChainSpec:
    """Typed strength ranges plus optional unanimity augmentations (``M1``, ``N1``, ``B1``)."""

    segments: tuple[Segment, ...]
    augment: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.segments:
            raise RelationError("a chain needs at least one segment")
        for a in self.augment:
            if a not in _AUGMENTS:
                raise RelationError(f"unknown augmentation {a!r}")
        if len(set(self.augment)) != len(self.augment):
            raise RelationError("duplicate augmentation")

    def __str__(self):
        return "+".join([str(s) for s in self.segments] + list(self.augment))

    @classmethod
    def parse(cls, text: str) -> "ChainSpec":
        return parse_chain(text)


_SEGMENT_RE = re.compile(r"^(MS|NS|M|N|B|D|P|R|U|E)\(\s*([^,\s]+)\s*,\s*([^\]\s]+)\s*\]$")


def parse_chain(text: str) -> ChainSpec:
    """Parse ``TYPE(beta,gamma]`` segments joined by ``+``, then ``+M1``/``+N1``/``+B1``."""
    tokens = [tok.strip() for tok in text.strip().split("+")]
    segments, augment = [], []
    for tok in tokens:
        if tok in _AUGMENTS:
            augment.append(tok)
            continue
        match = _SEGMENT_RE.match(tok)
        if not match:
            raise RelationError(f"cannot parse chain component {tok!r}")
        if augment:
            raise RelationError("augmentations must follow all segments")
        kind, lo, hi = match.groups()
        segments.append(Segment(MajorityType(kind), parse_strength(lo), parse_strength(hi)))
    return ChainSpec(tuple(segments), tuple(augment))


@dataclass
class ChainMember:
    """One distinct hull in a built chain and the relations that produced it."""

    hull: Relation
    sources: list[tuple[str, Fraction, Relation]] = field(default_factory=list)

    @property
    def source_names(self) -> list[str]:
        return [f"{kind}@{_fmt(alpha)}" for kind, alpha, _ in self.sources]


@dataclass
class Chain:
    members: list[ChainMember]

    @property
    def relations(self) -> list[Relation]:
        return [m.hull for m in self.members]

    def __len__(self):
        return len(self.members)


def build_chain(spec: ChainSpec | str, S: Iterable[str] | None, profile: Profile) -> Chain:
    """Materialise the hulls of every distinct relation of the chain on ``S``.

    Members are ordered by containment, smallest first.  Raises
    :class:`NotNestedError` when the family is not a chain for this profile.
    """
    if isinstance(spec, str):
        spec = parse_chain(spec)
    sub = profile if S is None else profile.restrict(S)
    raw: list[tuple[str, Fraction, np.ndarray]] = []
    for seg in spec.segments:
        for c in critical_strengths(seg.kind, None, sub, seg.beta, seg.gamma):
            raw.append((str(seg.kind), c, majority_matrix(seg.kind, c, sub)))
    for tag in spec.augment:
        raw.append((tag[0], ONE, majority_matrix(_AUGMENTS[tag], ONE, sub)))

    by_hull: dict[bytes, ChainMember] = {}
    for kind, alpha, mat in raw:
        hull = closure_matrix(mat)
        key = hull.tobytes()
        member = by_hull.get(key)
        if member is None:
            member = by_hull[key] = ChainMember(Relation(sub.labels, hull))
        member.sources.append((kind, alpha, Relation(sub.labels, mat)))
    members = sorted(by_hull.values(), key=lambda mem: int(mem.hull.matrix.sum()))
    check_nested([mem.hull for mem in members])
    return Chain(members)


# ----------------------------------------------------------------- inclusions


@dataclass(frozen=True)
class InclusionCheck:
    claim: str
    holds: bool
    witness: tuple[str, str] | None = None

    def __str__(self):
        verdict = "pass" if self.holds else "fail"
        extra = f" witness={self.witness[0]},{self.witness[1]}" if self.witness else ""
        return f"{self.claim}: {verdict}{extra}"


def _subset_check(name: str, small: np.ndarray, big: np.ndarray, labels) -> InclusionCheck:
    bad = small & ~big
    if bad.any():
        i, j = map(int, np.argwhere(bad)[0])
        return InclusionCheck(name, False, (labels[i], labels[j]))
    return InclusionCheck(name, True)


def _equal_check(name: str, a: np.ndarray, b: np.ndarray, labels) -> InclusionCheck:
    bad = a ^ b
    if bad.any():
        i, j = map(int, np.argwhere(bad)[0])
        return InclusionCheck(name, False, (labels[i], labels[j]))
    return InclusionCheck(name, True)


def verify_inclusions(profile: Profile, S: Iterable[str] | None, alpha) -> list[InclusionCheck]:
    """Check every inclusion between the ten types that is claimed at strength ``alpha``."""
    alpha = _check_strength(alpha)
    sub = profile if S is None else profile.restrict(S)
    n = sub.n
    labels = sub.labels
    T = MajorityType
    rel = {k: majority_matrix(k, alpha, sub) for k in ALL_TYPES}
    checks: list[InclusionCheck] = []

    def chain(names: Sequence[str]):
        for lo, hi in zip(names, names[1:]):
            checks.append(_subset_check(f"{lo} <= {hi}", rel[T(lo)], rel[T(hi)], labels))

    chain(["M", "N", "NS", "D"])
    checks.append(_subset_check("MS <= NS", rel[T.MS], rel[T.NS], labels))
    if alpha > HALF:
        chain(["M", "MS", "B", "R", "P", "E", "D"])
        checks.append(_subset_check("B <= U", rel[T.B], rel[T.U], labels))
        if alpha <= Fraction(n, 2 * n - 1):
            checks.append(_equal_check("R = P (alpha <= n/(2n-1))", rel[T.R], rel[T.P], labels))
            checks.append(_equal_check("P = E (alpha <= n/(2n-1))", rel[T.P], rel[T.E], labels))
        shifted = majority_matrix(T.N, 1 - alpha + Fraction(1, n), sub)
        checks.append(_subset_check("U <= not N(1-alpha+1/n)^op", rel[T.U] & ~np.eye(sub.m, dtype=bool),
                                    ~shifted.T, labels))
        off = ~np.eye(sub.m, dtype=bool)
        for k in ALL_TYPES:
            if k in (T.N, T.NS, T.D):
                continue
            sym = rel[k] & rel[k].T & off
            checks.append(_subset_check(f"{k} antisymmetric", sym, np.zeros_like(sym), labels))
    else:
        chain(["M", "MS", "B", "P", "R", "D"])
        checks.append(_subset_check("U <= E", rel[T.U], rel[T.E], labels))
        checks.append(_equal_check("E = R(n/(2n-1))", rel[T.E],
                                   majority_matrix(T.R, Fraction(n, 2 * n - 1), sub), labels))
        for k in (T.D, T.P, T.R):
            full = np.ones_like(rel[k])
            checks.append(_subset_check(f"{k} complete", full, rel[k] | rel[k].T, labels))
        off = ~np.eye(sub.m, dtype=bool)
        for k in (T.U, T.E):
            sym = rel[k] & rel[k].T & off
            checks.append(_subset_check(f"{k} antisymmetric", sym, np.zeros_like(sym), labels))
        if alpha == HALF:
            checks.append(_equal_check("R(1/2) = P(1/2)", rel[T.R], rel[T.P], labels))
    for k in ALL_TYPES:
        for c in critical_strengths(k, None, sub, alpha, ONE) if alpha < 1 else []:
            if c == alpha:
                continue
            checks.append(_subset_check(f"{k}({_fmt(c)}) <= {k}({_fmt(alpha)})",
                                        majority_matrix(k, c, sub), rel[k], labels))
    return checks
