import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import count_trees, nx_isomorphic, trees
from shrubkit.graphs import Graph, MonadicStructure, graph_from_json, graph_to_dot, graph_to_json, induced_subgraph
from shrubkit.trees import (
    Forest, InvalidPath, Tree, attach_root, canonical_form, enumerate_trees, forest_of,
    is_leaf_hereditary_subtree, node_at, replace_subtree, star, tree_from_json, tree_to_json,
)


def leaf(lab, p=2):
    return Tree(p, lab)


# ---------------------------------------------------------------- canonical_form

def test_canonical_form_examples():
    assert canonical_form(Tree(1, 1)) == canonical_form(Tree(1, 1))
    assert canonical_form(Tree(2, 1)) != canonical_form(Tree(2, 2))
    a = Tree(2, 1, (leaf(2), leaf(1)))
    b = Tree(2, 1, (leaf(1), leaf(2)))
    assert canonical_form(a) == canonical_form(b)
    assert a == b


def test_canonical_form_complete_against_graph_isomorphism():
    corpus = list(enumerate_trees(2, 2, 7))
    by_size = {}
    for t in corpus:
        by_size.setdefault(t.size, []).append(t)
    for group in by_size.values():
        for a, b in itertools.combinations(group[:40], 2):
            assert not nx_isomorphic(a, b)


@settings(max_examples=200, deadline=None)
@given(trees(2, 2, 3), st.randoms(use_true_random=False))
def test_canonical_form_invariant_under_child_shuffles(t, rnd):
    def shuffle(node):
        kids = [shuffle(c) for c in node.children]
        rnd.shuffle(kids)
        return Tree(node.p, node.label, tuple(kids))

    s = shuffle(t)
    assert canonical_form(s) == canonical_form(t)
    assert nx_isomorphic(s, t)


@settings(max_examples=200, deadline=None)
@given(trees(2, 2, 3), trees(2, 2, 3))
def test_canonical_form_iff_isomorphic(a, b):
    if a.size <= 10 and b.size <= 10:
        assert (canonical_form(a) == canonical_form(b)) == nx_isomorphic(a, b)


def test_canonical_order_is_total():
    ts = list(enumerate_trees(1, 2, 4))
    keys = [canonical_form(t) for t in ts]
    assert len(set(keys)) == len(keys)
    assert sorted(ts) == sorted(ts, key=canonical_form)


# ---------------------------------------------------------------- forests

def test_forest_of_examples():
    assert len(forest_of(Tree(1, 1))) == 0
    f = forest_of(star(2))
    assert f == Forest(1, (Tree(1, 1), Tree(1, 1)))
    t = Tree(2, 1, (Tree(2, 2, (leaf(1),)), leaf(2)))
    assert forest_of(t).size == t.size - 1


def test_attach_root_examples():
    assert attach_root(Forest(1, ()), 1) == Tree(1, 1)
    t = attach_root(Forest(2, (leaf(1),)), 2)
    assert t.size == 2 and t.root_label == 2
    with pytest.raises(ValueError):
        attach_root(Forest(2, ()), 3)


def test_forest_attach_inverse_on_enumerated_trees():
    for t in enumerate_trees(2, 2, 7):
        assert attach_root(forest_of(t), t.root_label) == t
        f = forest_of(t)
        assert forest_of(attach_root(f, 1)) == f
        expected = 1 + max((c.height for c in f), default=-1)
        assert attach_root(f, 1).height == expected


def test_forest_size_is_member_sum():
    f = Forest(2, (star(2, p=2), leaf(2), leaf(1)))
    assert f.size == 5
    assert list(f) == sorted(f.trees, key=canonical_form)


# ---------------------------------------------------------------- leaf-hereditary

def test_leaf_hereditary_examples():
    t = Tree(2, 1, (Tree(2, 2, (leaf(1),)), leaf(2)))
    emb = is_leaf_hereditary_subtree(t, t)
    assert emb == {path: path for path in t.paths()}
    assert is_leaf_hereditary_subtree(star(2), star(3)) is not None
    under_root = Tree(1, 1, (Tree(1, 1),))
    chain = Tree(1, 1, (Tree(1, 1, (Tree(1, 1),)),))
    assert is_leaf_hereditary_subtree(under_root, chain) is None


@settings(max_examples=150, deadline=None)
@given(trees(2, 2, 3), trees(2, 2, 3))
def test_leaf_hereditary_embedding_is_valid(a, b):
    emb = is_leaf_hereditary_subtree(a, b)
    if emb is None:
        return
    assert emb[()] == ()
    assert len(set(emb.values())) == len(emb)
    for pa, pb in emb.items():
        na, nb = node_at(a, pa), node_at(b, pb)
        assert na.label == nb.label
        if na.is_leaf:
            assert nb.is_leaf
        if pa:
            assert emb[pa[:-1]] == pb[:-1]


def test_leaf_hereditary_requires_same_p():
    with pytest.raises(ValueError):
        is_leaf_hereditary_subtree(Tree(1, 1), Tree(2, 1))


# ---------------------------------------------------------------- replace_subtree

def test_replace_subtree_examples():
    t = star(3)
    s = Tree(1, 1, (Tree(1, 1),))
    assert replace_subtree(t, (), s) == s
    assert replace_subtree(t, (0,), s).size == t.size + 1
    assert replace_subtree(t, (0,), Tree(1, 1)) == t
    with pytest.raises(InvalidPath):
        replace_subtree(t, (5,), s)


@settings(max_examples=100, deadline=None)
@given(trees(2, 2, 3), st.data())
def test_replace_subtree_only_touches_target(t, data):
    path = data.draw(st.sampled_from(list(t.paths())))
    s = Tree(2, 2, (leaf(1),))
    out = replace_subtree(t, path, s)
    assert out.size == t.size - node_at(t, path).size + s.size


# ---------------------------------------------------------------- enumeration

def test_enumeration_examples():
    assert len(list(enumerate_trees(0, 2, 3))) == 2
    assert [t.size for t in enumerate_trees(1, 1, 3)] == [1, 2, 3]
    assert len(list(enumerate_trees(1, 2, 2))) == 6


@pytest.mark.parametrize("d,p,n", [(0, 3, 4), (1, 1, 8), (1, 2, 7), (2, 1, 9), (2, 2, 8), (3, 1, 8)])
def test_enumeration_counts_match_euler_transform(d, p, n):
    got = list(enumerate_trees(d, p, n))
    assert len(got) == sum(count_trees(d, p, k) for k in range(1, n + 1))
    assert len(set(got)) == len(got)
    assert all(t.height <= d and t.size <= n for t in got)
    assert [t.size for t in got] == sorted(t.size for t in got)


# ---------------------------------------------------------------- graphs

def triangle():
    return Graph(1, {"a": 1, "b": 1, "c": 1}, [("a", "b"), ("b", "c"), ("a", "c")])


def test_induced_subgraph_examples():
    g = triangle()
    assert induced_subgraph(g, g.vertices) == g
    assert len(induced_subgraph(g, [])) == 0
    h = induced_subgraph(g, ["a", "b"])
    assert h.edges == frozenset({frozenset({"a", "b"})})
    with pytest.raises(KeyError):
        induced_subgraph(g, ["zz"])


def test_graph_invariants_enforced():
    with pytest.raises(ValueError):
        Graph(1, {"a": 1}, [("a", "a")])
    with pytest.raises(ValueError):
        Graph(1, {"a": 2})
    with pytest.raises(ValueError):
        Graph(1, {"a": 1}, [("a", "b")])


def test_graph_round_trips():
    g = Graph(2, {"v0": 1, "v1": 2}, [("v0", "v1")])
    assert graph_from_json(json.loads(json.dumps(graph_to_json(g)))) == g
    dot = graph_to_dot(g)
    assert '"v0" [label=1];' in dot and '"v0" -- "v1";' in dot


@settings(max_examples=100, deadline=None)
@given(trees(2, 3, 3))
def test_tree_json_round_trip(t):
    assert tree_from_json(json.dumps(tree_to_json(t))) == t


def test_monadic_structure_partition():
    A = MonadicStructure.from_counts(["T1", "T2"], {"T1": 2, "T2": 1})
    assert A.counts() == {"T1": 2, "T2": 1}
    assert len(A) == 3
    with pytest.raises(ValueError):
        MonadicStructure(["T1"], {"a": "T9"})
    sub = A.substructure(["T1#0"])
    assert sub.counts() == {"T1": 1, "T2": 0}
