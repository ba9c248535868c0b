import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import trees
from shrubkit.graphs import MonadicStructure
from shrubkit.logic import fo_equiv, monadic_fo_equiv, mso_equiv
from shrubkit.trees import Forest, Tree, enumerate_trees, star
from shrubkit.typesys import (
    ORACLE, CapPolicy, MonadicLemmaGap, calibrate_cap, fingerprint, index_census,
    monadic_grow, monadic_shrink, type_indicator,
)


# ---------------------------------------------------------------- indicators

def test_type_indicator_examples():
    f = Forest(2, (Tree(2, 1), Tree(2, 1), Tree(2, 2)))
    ind = type_indicator(f, 1, ORACLE)
    assert sorted(ind.counts().values()) == [1, 2]
    assert ind.total == 3
    assert type_indicator(Forest(2, ()), 1).total == 0
    assert type_indicator(Forest(2, ()), 1).classes == ()
    same = Forest(1, (star(2),) * 4)
    assert list(type_indicator(same, 2).counts().values()) == [4]


@settings(max_examples=60, deadline=None)
@given(st.lists(trees(1, 2, 3), max_size=5), st.integers(0, 2))
def test_type_indicator_partition(members, m):
    f = Forest(2, tuple(members))
    for clf in (ORACLE, CapPolicy.practical(2)):
        ind = type_indicator(f, m, clf)
        assert all(n > 0 for n in ind.counts().values())
        assert ind.total == len(f)
        owners = ind.class_of()
        assert sorted(owners) == list(range(len(f)))
        M = ind.as_monadic()
        assert len(M) == len(f)


# ---------------------------------------------------------------- fingerprints

def test_fingerprint_examples():
    assert fingerprint(star(3), 1, CapPolicy.practical(2)) == fingerprint(star(4), 1, CapPolicy.practical(2))
    assert fingerprint(star(3), 1, CapPolicy.practical(5)) != fingerprint(star(4), 1, CapPolicy.practical(5))
    for cp in (CapPolicy.practical(1), CapPolicy.practical(3), CapPolicy.paper(2)):
        assert fingerprint(Tree(2, 1), 1, cp) != fingerprint(Tree(2, 2), 1, cp)
    assert fingerprint(star(3), 1, CapPolicy.practical(2)).text == "1(1x2+)"
    assert fingerprint(star(3), 0, CapPolicy.practical(2)).text == "*"


def test_cap_policy_validation():
    with pytest.raises(ValueError):
        CapPolicy.practical(0)
    with pytest.raises(ValueError):
        CapPolicy("exotic")
    assert CapPolicy.practical(2, {1: 1}).cap(1, 0, 5) == 1
    assert CapPolicy.practical(2, {1: 1}).cap(2, 0, 5) == 2
    assert CapPolicy.paper(2).cap(1, 0, 5) == 6


def test_paper_fingerprints_coincide_with_isomorphism():
    ts = list(enumerate_trees(2, 2, 7))
    fps = [fingerprint(t, 2, CapPolicy.paper(2)).text for t in ts]
    assert len(set(fps)) == len(ts)


@settings(max_examples=100, deadline=None)
@given(trees(2, 2, 4))
def test_fingerprint_deterministic_and_shallow(t):
    cp = CapPolicy.practical(2)
    a, b = fingerprint(t, 2, cp), fingerprint(t, 2, cp)
    assert a == b
    depth = max_depth = 0
    for ch in a.text:
        depth += ch == "("
        depth -= ch == ")"
        max_depth = max(max_depth, depth)
    assert max_depth == t.height


# ---------------------------------------------------------------- calibration

def test_calibrate_d0_needs_cap_one():
    for m in (1, 2, 3):
        rep = calibrate_cap(0, 3, m, 3)
        assert rep.cap == 1 and rep.exact_cap == 1


def test_calibrate_small_height_one():
    rep = calibrate_cap(1, 1, 1, 6)
    assert rep.sound_cap == rep.cap == 1
    assert not rep.unsound


def test_calibrate_reports_witnesses_below_cap():
    rep = calibrate_cap(1, 1, 2, 7)
    assert rep.sound_cap == 2
    a, b = rep.unsound[1]
    assert fingerprint(a, 2, CapPolicy.practical(1)) == fingerprint(b, 2, CapPolicy.practical(1))
    assert not mso_equiv(a, b, 2)


@pytest.mark.parametrize("d,p,m,n", [(1, 2, 1, 6), (1, 2, 2, 6), (2, 1, 1, 7), (2, 2, 1, 6), (2, 1, 2, 7)])
def test_calibrated_cap_is_sound(d, p, m, n):
    rep = calibrate_cap(d, p, m, n)
    cp = CapPolicy.practical(rep.sound_cap)
    ts = list(enumerate_trees(d, p, n))
    by_fp = {}
    for t in ts:
        by_fp.setdefault(fingerprint(t, m, cp).text, []).append(t)
    for group in by_fp.values():
        for a in group[1:]:
            assert mso_equiv(group[0], a, m)
    assert rep.to_json()["sound_cap"] == rep.sound_cap


# ---------------------------------------------------------------- census

def test_index_census_examples():
    for m in (1, 2, 3):
        assert index_census(0, 3, m, 1) == 3
    assert index_census(0, 3, 0, 3) == 1
    assert index_census(1, 1, 1, 6) == index_census(1, 1, 1, 8)


def test_index_census_monotone_and_bounded():
    prev = 0
    for n in range(1, 8):
        c = index_census(2, 1, 2, n)
        assert prev <= c <= len(list(enumerate_trees(2, 1, n)))
        prev = c


# ---------------------------------------------------------------- monadic shrink and grow

SIGMA = ["T1", "T2"]


def M(c1, c2):
    return MonadicStructure.from_counts(SIGMA, [c1, c2])


def test_monadic_shrink_examples():
    A = M(5, 1)
    B = monadic_shrink(A, 4, 2, "T1#3")
    assert B.counts() == {"T1": 3, "T2": 1}
    assert "T1#3" in B.universe
    assert monadic_fo_equiv(A, B, 2) and fo_equiv(A, B, 2)
    assert monadic_shrink(A, len(A), 2, "T1#0") == A
    C = monadic_shrink(M(4, 3), 2, 1, "T2#0")
    assert C.counts() == {"T1": 1, "T2": 1}
    with pytest.raises(ValueError):
        monadic_shrink(A, 2, 2, "T1#0")  # (q-1)|sigma| = 2
    with pytest.raises(MonadicLemmaGap):
        monadic_shrink(M(5, 5), 3, 2, "T1#0")


def test_monadic_grow_examples():
    A = M(2, 1)
    B = monadic_grow(A, 10, 2, "T1")
    assert B.counts() == {"T1": 9, "T2": 1}
    assert monadic_fo_equiv(A, B, 2)
    assert fo_equiv(monadic_grow(A, 7, 2, "T1"), A, 2)
    assert monadic_grow(A, 3, 2, "T1") == A
    with pytest.raises(ValueError):
        monadic_grow(A, 10, 2, "T2")
    with pytest.raises(ValueError):
        monadic_grow(A, 2, 2, "T1")


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 6), st.integers(0, 6), st.integers(1, 4), st.data())
def test_monadic_shrink_property(c1, c2, q, data):
    A = M(c1, c2)
    if len(A) == 0:
        return
    lam = data.draw(st.integers(1, len(A)))
    keep = data.draw(st.sampled_from(A.universe))
    base = min(c1, q) + min(c2, q)
    if not (q - 1) * 2 < lam:
        with pytest.raises(ValueError):
            monadic_shrink(A, lam, q, keep)
        return
    if lam < base:
        with pytest.raises(MonadicLemmaGap):
            monadic_shrink(A, lam, q, keep)
        return
    B = monadic_shrink(A, lam, q, keep)
    assert len(B) == lam and keep in B.universe
    assert set(B.universe) <= set(A.universe)
    assert monadic_fo_equiv(A, B, q)
    assert fo_equiv(A, B, q)
    assert monadic_shrink(A, lam, q, keep) == B


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 5), st.integers(0, 5), st.integers(1, 3), st.integers(0, 4))
def test_monadic_grow_property(c1, c2, q, extra):
    A = M(c1, c2)
    if c1 < q or len(A) <= (q - 1) * 2:
        return
    B = monadic_grow(A, len(A) + extra, q, "T1")
    assert len(B) == len(A) + extra
    assert set(A.universe) <= set(B.universe)
    new = set(B.universe) - set(A.universe)
    assert all(B.predicate_of(a) == "T1" for a in new)
    assert monadic_fo_equiv(A, B, q)
    if len(B) <= 8:
        assert fo_equiv(A, B, q)
