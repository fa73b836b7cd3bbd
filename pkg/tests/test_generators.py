from collections import Counter

import numpy as np
import pytest

from quasichoice.generators import PROFILE_CLASSES, random_profile
from quasichoice.profiles import ProfileError
from quasichoice.relations import classify_matrix


@pytest.mark.parametrize("cls", PROFILE_CLASSES)
def test_same_seed_same_profile(cls):
    assert random_profile(7, 5, 4, cls) == random_profile(7, 5, 4, cls)


CLASS_CHECK = {
    "linear-order": lambda c: c.linear_order,
    "total-quasi-order": lambda c: c.quasi_order and c.complete,
    "partial-order": lambda c: c.partial_order,
    "quasi-order": lambda c: c.quasi_order,
    "tournament": lambda c: c.complete and c.antisymmetric,
    "arbitrary-reflexive": lambda c: True,
}


@pytest.mark.parametrize("cls", PROFILE_CLASSES)
def test_class_membership(cls):
    for seed in range(40):
        p = random_profile(seed, 6, 3, cls)
        for mat in p.stack:
            assert CLASS_CHECK[cls](classify_matrix(mat))


def test_unknown_class():
    with pytest.raises(ProfileError):
        random_profile(0, 3, 3, "cyclic")


def test_alias_for_tournaments():
    assert random_profile(1, 4, 2, "tournament-like") == random_profile(1, 4, 2, "tournament")


def test_arbitrary_pairs_are_uniform():
    p = random_profile(123, 2, 8000, "arbitrary-reflexive")
    freq = Counter((bool(R[0, 1]), bool(R[1, 0])) for R in p.stack)
    expected = p.n / 4
    chi2 = sum((freq[k] - expected) ** 2 / expected for k in freq)
    assert len(freq) == 4
    assert chi2 < 16.27  # 3 degrees of freedom, p = 0.001


def test_weak_orders_are_uniform_on_three():
    # 13 weak orders on three alternatives
    p = random_profile(5, 3, 13000, "total-quasi-order")
    freq = Counter(R.tobytes() for R in p.stack)
    assert len(freq) == 13
    expected = p.n / 13
    chi2 = sum((v - expected) ** 2 / expected for v in freq.values())
    assert chi2 < 32.9  # 12 degrees of freedom, p = 0.001


def test_large_universe_weak_orders():
    p = random_profile(0, 50, 2, "total-quasi-order")
    assert p.m == 50 and all(classify_matrix(R).complete for R in p.stack)


def test_generator_argument_is_reused():
    rng = np.random.default_rng(0)
    a = random_profile(rng, 3, 2, "linear-order")
    b = random_profile(rng, 3, 2, "linear-order")
    assert a.labels == b.labels


# ------------------------------------------------------------ planted components

from oracles import is_component_brute  # noqa: E402

from quasichoice.generators import planted_profile, substitute  # noqa: E402


@pytest.mark.parametrize("cls", [c for c in PROFILE_CLASSES if c != "tournament"])
def test_planted_profiles_stay_in_class(cls):
    for seed in range(20):
        p = planted_profile(seed, 6, 3, cls)
        for mat in p.stack:
            assert CLASS_CHECK[cls](classify_matrix(mat))


@pytest.mark.parametrize("cls", PROFILE_CLASSES)
def test_planted_blocks_are_components(cls):
    for seed in range(20):
        p = planted_profile(seed, 7, 3, cls, blocks=2, block_size=2)
        assert p.m == 7
        for b in range(2):
            block = {f"b{b}a", f"b{b}b"}
            assert is_component_brute(p, block, p.labels)


def test_planting_needs_room():
    with pytest.raises(ProfileError):
        planted_profile(0, 3, 2, blocks=2, block_size=2)


def test_substitute_keeps_outer_relations():
    outer = random_profile(5, 3, 2, "linear-order", labels=["x", "y", "z"])
    inner = random_profile(6, 2, 2, "linear-order", labels=["x1", "x2"])
    p = substitute(outer, {"x": inner})
    assert p.labels == ("x1", "x2", "y", "z") or list(p.labels) == ["x1", "x2", "y", "z"]
    for i in range(2):
        for member in ("x1", "x2"):
            for other in ("y", "z"):
                assert p.stack[i, p.index(member), p.index(other)] == outer.stack[i, 0, outer.index(other)]
        assert p.stack[i, 0, 1] == inner.stack[i, 0, 1]


def test_substitute_rejects_mismatched_individuals():
    outer = random_profile(1, 3, 2)
    with pytest.raises(ProfileError):
        substitute(outer, {"a": random_profile(2, 2, 3, labels=["p", "q"])})
