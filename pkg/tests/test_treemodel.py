import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import formulas
from shrubkit.graphs import induced_subgraph
from shrubkit.logic import VocabularyError, mso_equiv, model_check, parse, rank
from shrubkit.treemodel import (
    InvalidModel, TreeModel, build_omega, flatten, interpret_formula, interpretation_rank,
    materialize, model_from_json, model_to_json, pair_label, random_model, restrict_to_leaves,
    symmetrize, unflatten, validate, vertex_id,
)
from shrubkit.trees import Tree, enumerate_trees, node_at

K2_SIG = {(1, 2, 1), (2, 1, 1)}


def k2_model(sig=K2_SIG):
    return TreeModel.build(2, 1, 1, [(1, 1), (2, 1)], sig)


def d2_model(sig=K2_SIG):
    return TreeModel.build(2, 1, 2, [[(1, 1), (2, 1)], [(1, 1)]], sig)


def reference_graph(tm):
    """Edges straight from the definition: distance 2l between leaves and (i, j, l) in S."""
    leaves = tm.tree.leaf_paths()
    edges = set()
    for a, b in itertools.combinations(leaves, 2):
        common = len(list(itertools.takewhile(lambda xy: xy[0] == xy[1], zip(a, b))))
        l = tm.d - common
        i, j = tm.leaf_pair(a)[0], tm.leaf_pair(b)[0]
        if (i, j, l) in tm.signature:
            edges.add(frozenset((vertex_id(a), vertex_id(b))))
    labels = {vertex_id(q): tm.leaf_pair(q)[1] for q in leaves}
    return labels, edges


# ---------------------------------------------------------------- validate

def test_validate_examples():
    assert validate(k2_model()).ok
    rep = validate(k2_model({(1, 2, 1)}))
    assert not rep.ok
    assert [v.kind for v in rep.violations] == ["asymmetric-signature"]
    short = TreeModel.build(1, 1, 2, [[(1, 1)], (1, 1)])
    rep = validate(short)
    assert not rep.ok and {v.kind for v in rep.violations} == {"path-length"}
    assert any(v.path == (0,) or v.path == (1,) for v in rep.violations)


def test_validate_flags_labels_and_signature_range():
    P = 3
    bad_leaf = TreeModel(2, 1, 1, Tree(P, P, (Tree(P, P),)))
    kinds = {v.kind for v in validate(bad_leaf).violations}
    assert "leaf-label" in kinds
    bad_internal = TreeModel(2, 1, 1, Tree(P, 1, (Tree(P, 1),)))
    assert "internal-label" in {v.kind for v in validate(bad_internal).violations}
    out_of_range = k2_model({(1, 3, 1), (3, 1, 1)})
    assert "signature-range" in {v.kind for v in validate(out_of_range).violations}
    assert validate(symmetrize(k2_model({(1, 2, 1)}))).ok


@pytest.mark.parametrize("r,p,d", [(1, 1, 1), (1, 1, 2), (2, 1, 1), (1, 2, 2)])
def test_validate_agrees_with_omega(r, p, d):
    omega = build_omega(r, p, d)
    P = r * p + 1
    n = 0
    for t in enumerate_trees(d + 1, P, 8 if P <= 2 else 6):
        tm = unflatten(t, r, p, d)
        assert model_check(t, omega) == validate(tm).ok, t
        n += 1
    assert n > 50


def test_omega_examples():
    assert model_check(flatten(k2_model()), build_omega(2, 1, 1))
    P = 3
    marked_leaf = Tree(P, P, (Tree(P, P), Tree(P, 1)))
    assert not model_check(marked_leaf, build_omega(2, 1, 1))
    assert rank(build_omega(2, 1, 1)) == 3


# ---------------------------------------------------------------- flatten / materialize

def test_flatten_labels():
    assert pair_label(1, 1, 2) == 1
    assert pair_label(2, 2, 2) == 4
    tm = TreeModel.build(2, 2, 1, [(1, 1), (2, 2)])
    t = flatten(tm)
    assert t.label == 5
    assert sorted(c.label for c in t.children) == [1, 4]
    assert unflatten(t, 2, 2, 1).tree == tm.tree


def test_materialize_examples():
    g = materialize(k2_model())
    assert len(g) == 2 and len(g.edges) == 1
    assert {g.label_of(v) for v in g.vertices} == {1}
    assert len(materialize(k2_model(set())).edges) == 0
    g = materialize(d2_model())
    (edge,) = g.edges
    assert {g.label_of(v) for v in edge} == {1}
    assert all(len(v.split(".")) == 3 for v in edge)
    with pytest.raises(InvalidModel):
        materialize(k2_model({(1, 2, 1)}))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_materialize_matches_edge_rule(seed, d):
    tm = random_model(random.Random(seed), 2, 2, d, 7)
    g = materialize(tm)
    labels, edges = reference_graph(tm)
    assert dict(g.labels) == labels
    assert g.edges == edges


# ---------------------------------------------------------------- interpretation

def test_interpret_examples():
    assert interpret_formula(parse("(true)"), K2_SIG, 2, 1, 1) == parse("(true)")
    phi = parse("(exists1 x (P 1 x))")
    tm = k2_model()
    assert model_check(materialize(tm), phi)
    assert model_check(flatten(tm), interpret_formula(phi, tm.signature, 2, 1, 1))
    phi = parse("(exists1 x (exists1 y (E x y)))")
    for tm, expected in ((d2_model(), True), (d2_model(set()), False)):
        assert model_check(materialize(tm), phi) is expected
        assert model_check(flatten(tm), interpret_formula(phi, tm.signature, 2, 1, 2)) is expected


def test_interpret_rejects_tree_vocabulary():
    with pytest.raises(VocabularyError):
        interpret_formula(parse("(exists1 x (root x))"), K2_SIG, 2, 1, 1)
    with pytest.raises(VocabularyError):
        interpret_formula(parse("(exists1 x (P 2 x))"), K2_SIG, 2, 1, 1)


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 2), formulas(2, 2, tree_vocab=False))
def test_interpretation_property(seed, d, phi):
    tm = random_model(random.Random(seed), 2, 2, d, 5)
    lhs = model_check(materialize(tm), phi)
    rhs = model_check(flatten(tm), interpret_formula(phi, tm.signature, 2, 2, d))
    assert lhs == rhs


def test_interpretation_rank_values():
    q0 = [interpretation_rank(1, 1, d) for d in range(5)]
    assert q0 == [3, 3, 3, 5, 7]
    assert all(a <= b for a, b in zip(q0, q0[1:]))
    assert all(q <= 2 * d + 3 for d, q in enumerate(q0))
    assert interpretation_rank(2, 2, 2) == interpretation_rank(1, 1, 2)


# ---------------------------------------------------------------- leaf-hereditary transfer

@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.data())
def test_leaf_hereditary_transfer(seed, d, data):
    tm = random_model(random.Random(seed), 2, 1, d, 7)
    leaves = tm.tree.leaf_paths()
    keep = data.draw(st.lists(st.sampled_from(leaves), min_size=1, unique=True))
    sub, prov = restrict_to_leaves(tm, keep)
    assert validate(sub).ok
    names = {q: vertex_id(prov[q]) for q in sub.tree.leaf_paths()}
    H = materialize(sub, names)
    G = materialize(tm)
    assert H == induced_subgraph(G, [vertex_id(q) for q in keep])
    for new, old in prov.items():
        assert node_at(sub.tree, new).label == node_at(tm.tree, old).label


# ---------------------------------------------------------------- I/O

def test_model_json_round_trip_and_format():
    tm = k2_model()
    obj = model_to_json(tm)
    assert obj == {"r": 2, "p": 1, "d": 1, "signature": [[1, 2, 1], [2, 1, 1]],
                   "tree": {"internal": True, "children": [{"leaf": [1, 1]}, {"leaf": [2, 1]}]}}
    assert model_from_json(json.dumps(obj)) == tm
    with pytest.raises(ValueError):
        model_from_json({"r": 1, "p": 1, "d": 1, "tree": {"leaf": [2, 1]}})


def test_graph_equivalence_survives_materialization_of_isomorphic_models():
    a = TreeModel.build(1, 1, 1, [(1, 1)] * 3, {(1, 1, 1)})
    b = TreeModel.build(1, 1, 1, [(1, 1)] * 4, {(1, 1, 1)})
    assert mso_equiv(materialize(a), materialize(a), 2)
    assert not mso_equiv(materialize(a), materialize(b), 3)
