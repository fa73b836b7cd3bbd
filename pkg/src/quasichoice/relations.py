"""Finite reflexive relations and the order-theoretic toolkit built on them.

A :class:`Relation` is a reflexive binary relation over an ordered tuple of
alternative labels, stored as a dense read-only boolean matrix where
``matrix[i, j]`` means "labels[i] R labels[j]".  Feasible sets are passed
around as collections of labels; results come back as ``frozenset`` of labels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np


class RelationError(ValueError):
    """Malformed relation, feasible set, or chain."""


class NotNestedError(RelationError):
    """A family of relations that was expected to be a chain is not nested."""

    def __init__(self, message: str, witness: tuple = (), relations: tuple = ()):
        super().__init__(message)
        self.witness = witness  # the offending pair (x, y)
        self.relations = relations


def _check_labels(labels: Sequence[str]) -> tuple[str, ...]:
    labels = tuple(labels)
    if not labels:
        raise RelationError("a universe needs at least one alternative")
    if len(set(labels)) != len(labels):
        raise RelationError(f"duplicate alternative labels in {labels!r}")
    return labels


def _frozen(mat: np.ndarray) -> np.ndarray:
    mat = np.array(mat, dtype=bool)
    mat.setflags(write=False)
    return mat


class Relation:
    """Reflexive binary relation on a finite, ordered set of labels."""

    __slots__ = ("labels", "matrix", "_index", "_hash")

    def __init__(self, labels: Sequence[str], matrix, *, add_diagonal: bool = False):
        labels = _check_labels(labels)
        mat = np.array(matrix, dtype=bool)
        m = len(labels)
        if mat.shape != (m, m):
            raise RelationError(f"matrix shape {mat.shape} does not match {m} labels")
        if add_diagonal:
            np.fill_diagonal(mat, True)
        elif not mat.diagonal().all():
            raise RelationError("relation is not reflexive")
        self.labels = labels
        self.matrix = _frozen(mat)
        self._index = {lab: i for i, lab in enumerate(labels)}
        self._hash = None

    @classmethod
    def from_pairs(cls, labels: Sequence[str], pairs: Iterable[tuple[str, str]]) -> "Relation":
        """Build the reflexive relation containing the given ordered pairs."""
        labels = _check_labels(labels)
        index = {lab: i for i, lab in enumerate(labels)}
        mat = np.eye(len(labels), dtype=bool)
        for x, y in pairs:
            try:
                mat[index[x], index[y]] = True
            except KeyError as exc:
                raise RelationError(f"unknown alternative {exc.args[0]!r}") from None
        return cls(labels, mat)

    @classmethod
    def identity(cls, labels: Sequence[str]) -> "Relation":
        return cls(labels, np.eye(len(tuple(labels)), dtype=bool))

    @classmethod
    def full(cls, labels: Sequence[str]) -> "Relation":
        m = len(tuple(labels))
        return cls(labels, np.ones((m, m), dtype=bool))

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise RelationError(f"unknown alternative {label!r}") from None

    def indices(self, S: Iterable[str] | None) -> np.ndarray:
        """Sorted universe indices of the feasible set ``S`` (``None`` = all)."""
        return feasible_indices(self.labels, self._index, S)

    def holds(self, x: str, y: str) -> bool:
        return bool(self.matrix[self.index(x), self.index(y)])

    def pairs(self) -> list[tuple[str, str]]:
        """Off-diagonal pairs ``(x, y)`` with ``x R y``, in index order."""
        xs, ys = np.nonzero(self.matrix)
        return [(self.labels[i], self.labels[j]) for i, j in zip(xs, ys) if i != j]

    def restrict(self, S: Iterable[str]) -> "Relation":
        return restrict(self, S)

    def issubset(self, other: "Relation") -> bool:
        if self.labels != other.labels:
            raise RelationError("relations live on different universes")
        return not (self.matrix & ~other.matrix).any()

    __le__ = issubset

    def __eq__(self, other):
        if not isinstance(other, Relation):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.labels, self.matrix.tobytes()))
        return self._hash

    def __repr__(self):
        arrows = ", ".join(f"{x}>{y}" for x, y in self.pairs())
        return f"Relation({' '.join(self.labels)}: {arrows or 'no pairs'})"


def feasible_indices(labels: Sequence[str], index: dict, S: Iterable[str] | None) -> np.ndarray:
    if S is None:
        return np.arange(len(labels))
    if isinstance(S, str):
        raise RelationError("a feasible set must be a collection of labels, not a string")
    members = set(S)
    if not members:
        raise RelationError("feasible set is empty")
    try:
        idx = sorted(index[x] for x in members)
    except KeyError as exc:
        raise RelationError(f"{exc.args[0]!r} is not in the universe") from None
    return np.array(idx, dtype=int)


def restrict(R: Relation, S: Iterable[str]) -> Relation:
    """Restriction ``R|_S`` as a relation on ``S`` (labels kept in universe order)."""
    idx = R.indices(S)
    return Relation([R.labels[i] for i in idx], R.matrix[np.ix_(idx, idx)])


class Parts(NamedTuple):
    strict: np.ndarray
    equivalent: np.ndarray
    undecided: np.ndarray


def parts(R: Relation) -> Parts:
    """Split ``R`` into its asymmetric part, symmetric part and undecided pairs.

    The equivalence part contains the diagonal; the other two are irreflexive.
    """
    mat = R.matrix
    strict = mat & ~mat.T
    equivalent = mat & mat.T
    undecided = ~(mat | mat.T)
    return Parts(strict, equivalent, undecided)


def closure_matrix(mat: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure of a square boolean matrix (Warshall)."""
    out = np.array(mat, dtype=bool)
    np.fill_diagonal(out, True)
    for k in range(out.shape[0]):
        col = out[:, k]
        if col.any():
            out[col] |= out[k]
    return out


def optimal_mask(mat: np.ndarray) -> np.ndarray:
    """Boolean mask of the optimal elements of a square relation matrix.

    ``x`` is optimal when every ``y`` with ``y A x`` also has ``x A y``.
    """
    beaten = mat & ~mat.T  # beaten[y, x]: y A x but not x A y
    return ~beaten.any(axis=0)


def transitive_hull(R: Relation, S: Iterable[str] | None = None) -> Relation:
    """Smallest quasi-order on ``S`` containing ``R|_S``."""
    base = R if S is None else restrict(R, S)
    return Relation(base.labels, closure_matrix(base.matrix))


def optimal_elements(Q: Relation, S: Iterable[str] | None = None) -> frozenset[str]:
    """Q-optimal members of ``S``; may be empty when ``Q`` is not transitive."""
    base = Q if S is None else restrict(Q, S)
    mask = optimal_mask(base.matrix)
    return frozenset(lab for lab, ok in zip(base.labels, mask) if ok)


@dataclass(frozen=True)
class Classification:
    transitive: bool
    antisymmetric: bool
    complete: bool
    quasi_order: bool
    partial_order: bool
    linear_order: bool
    acyclic3: bool
    strict_transitive: bool
    rpr_in_p: bool


def _compose(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.int64) @ b.astype(np.int64)) > 0


def classify_matrix(mat: np.ndarray) -> Classification:
    mat = np.asarray(mat, dtype=bool)
    strict = mat & ~mat.T
    off = ~np.eye(mat.shape[0], dtype=bool)
    transitive = not (_compose(mat, mat) & ~mat).any()
    antisymmetric = not (mat & mat.T & off).any()
    complete = bool((mat | mat.T).all())
    # a strict 3-cycle x P y P z P x shows up on the diagonal of P^3
    acyclic3 = not np.diagonal(_compose(_compose(strict, strict), strict)).any()
    strict_transitive = not (_compose(strict, strict) & ~strict).any()
    rpr_in_p = not (_compose(_compose(mat, strict), mat) & ~strict).any()
    return Classification(
        transitive=transitive,
        antisymmetric=antisymmetric,
        complete=complete,
        quasi_order=transitive,
        partial_order=transitive and antisymmetric,
        linear_order=transitive and antisymmetric and complete,
        acyclic3=acyclic3,
        strict_transitive=strict_transitive,
        rpr_in_p=rpr_in_p,
    )


def classify(R: Relation) -> Classification:
    return classify_matrix(R.matrix)


def decompose_quasiorder(Q: Relation) -> list[Relation]:
    """Write a quasi-order as an intersection of at most ``|X|`` total quasi-orders.

    Every factor has the two-level shape ``(X x X) minus ((X \\ T) x T)``, built
    from the principal up-set ``T = {x : x Q z}`` of each ``z``.
    """
    if not classify(Q).quasi_order:
        raise RelationError("decompose_quasiorder needs a quasi-order")
    mat = Q.matrix
    factors: list[Relation] = []
    seen = set()
    for z in range(Q.size):
        upset = mat[:, z]
        # u F v fails exactly when v is in the up-set and u is not
        factor = ~np.outer(~upset, upset)
        key = factor.tobytes()
        if factor.all() or key in seen:
            continue
        seen.add(key)
        factors.append(Relation(Q.labels, factor))
    if not factors:
        factors.append(Relation.full(Q.labels))
    return factors


def top_cycle(T: Relation, S: Iterable[str] | None = None) -> frozenset[str]:
    """Top cycle of a tournament restricted to ``S``.

    Uses the score characterisation: sorted by descending out-degree, the top
    cycle is the shortest prefix whose members beat everything after it.
    """
    base = T if S is None else restrict(T, S)
    mat = base.matrix
    off = ~np.eye(base.size, dtype=bool)
    if not ((mat | mat.T).all() and not (mat & mat.T & off).any()):
        raise RelationError("top_cycle needs a tournament (complete and antisymmetric)")
    scores = (mat & off).sum(axis=1)
    order = sorted(range(base.size), key=lambda i: -scores[i])
    for k in range(1, base.size + 1):
        head, tail = order[:k], order[k:]
        if all(mat[i, j] for i in head for j in tail):
            return frozenset(base.labels[i] for i in head)
    raise AssertionError("unreachable: the whole set always dominates")


def check_nested(relations: Sequence[Relation]) -> None:
    """Raise :class:`NotNestedError` unless ``relations[k] <= relations[k+1]``."""
    for lo, hi in zip(relations, relations[1:]):
        if lo.labels != hi.labels:
            raise RelationError("chain members live on different universes")
        bad = lo.matrix & ~hi.matrix
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            raise NotNestedError(
                f"chain is not nested: ({lo.labels[i]}, {lo.labels[j]}) lies in "
                f"{lo!r} but not in {hi!r}",
                witness=(lo.labels[i], lo.labels[j]),
                relations=(lo, hi),
            )


def common_optimals(chain: Sequence[Relation], S: Iterable[str] | None = None) -> frozenset[str]:
    """Common optimal elements of a nested chain ``Q_1 <= ... <= Q_k`` of quasi-orders.

    Walks down the chain: start from the optimals of the largest member, then
    keep the optimals of each smaller member restricted to the survivors.
    """
    if not chain:
        raise RelationError("empty chain")
    members = [q if S is None else restrict(q, S) for q in chain]
    check_nested(members)
    labels = members[0].labels
    alive = np.arange(len(labels))
    for q in reversed(members):
        sub = q.matrix[np.ix_(alive, alive)]
        alive = alive[optimal_mask(sub)]
    return frozenset(labels[i] for i in alive)
