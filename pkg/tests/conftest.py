"""Shared strategies and independent reference oracles for the test suite."""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb

import networkx as nx
from hypothesis import strategies as st

from shrubkit.logic.formula import (
    And, Bottom, Edge, Eq, Exists1, Exists2, Forall1, Forall2, Implies, In, Label, Not, Or, Root, Top,
)
from shrubkit.logic.structure import as_structure
from shrubkit.trees import Tree


# ---------------------------------------------------------------- strategies

def trees(max_height: int = 2, p: int = 2, max_children: int = 3):
    """Random trees of height at most ``max_height``."""

    def build(h):
        if h == 0:
            return st.integers(1, p).map(lambda lab: Tree(p, lab))
        kids = st.lists(build(h - 1), max_size=max_children)
        return st.builds(lambda lab, cs: Tree(p, lab, tuple(cs)), st.integers(1, p), kids)

    return st.integers(0, max_height).flatmap(build)


def fixed_height_trees(d: int, p: int = 2, max_children: int = 3):
    """Random trees of height exactly ``d``."""

    def build(h):
        if h == 0:
            return st.integers(1, p).map(lambda lab: Tree(p, lab))
        tall = build(h - 1).filter(lambda t: t.height == h - 1)
        rest = st.lists(st.integers(0, h - 1).flatmap(build), max_size=max_children - 1)
        return st.builds(lambda lab, a, cs: Tree(p, lab, (a, *cs)), st.integers(1, p), tall, rest)

    return build(d)


# ---------------------------------------------------------------- oracles

def nx_tree(t: Tree) -> nx.Graph:
    g = nx.Graph()

    def visit(node, name, is_root):
        g.add_node(name, label=node.label, root=is_root)
        for i, c in enumerate(node.children):
            child = f"{name}.{i}"
            visit(c, child, False)
            g.add_edge(name, child)

    visit(t, "r", True)
    return g


def nx_isomorphic(a: Tree, b: Tree) -> bool:
    match = lambda x, y: x["label"] == y["label"] and x["root"] == y["root"]  # noqa: E731
    return nx.is_isomorphic(nx_tree(a), nx_tree(b), node_match=match)


@lru_cache(maxsize=None)
def count_trees(h: int, p: int, n: int) -> int:
    """Number of isomorphism classes of p-labeled rooted trees of height <= h and size n."""
    if n < 1:
        return 0
    if h == 0:
        return p if n == 1 else 0
    return p * count_forests(h - 1, p, n - 1)


@lru_cache(maxsize=None)
def count_forests(h: int, p: int, n: int) -> int:
    """Multisets of height-<=h trees with total size n (Euler transform)."""
    # ways[k][s]: multisets drawn from tree sizes <= k with total s
    ways = [1] + [0] * n
    for k in range(1, n + 1):
        a = count_trees(h, p, k)
        if a == 0:
            continue
        new = [0] * (n + 1)
        for s in range(n + 1):
            for j in range(0, s // k + 1):
                new[s] += ways[s - j * k] * comb(a + j - 1, j)
        ways = new
    return ways[n]


def ref_eval(A, f, env=None) -> bool:
    """Textbook recursive evaluator; set variables range over frozensets."""
    S = as_structure(A)
    env = dict(env or {})
    universe = range(S.n)

    def ev(g, e):
        if isinstance(g, Top):
            return True
        if isinstance(g, Bottom):
            return False
        if isinstance(g, Eq):
            return e[g.x] == e[g.y]
        if isinstance(g, In):
            return e[g.x] in e[g.X]
        if isinstance(g, Edge):
            return bool(S.adj[e[g.x]] >> e[g.y] & 1)
        if isinstance(g, Root):
            return S.is_root(e[g.x])
        if isinstance(g, Label):
            return S.labels[e[g.x]] == g.i
        if isinstance(g, Not):
            return not ev(g.f, e)
        if isinstance(g, And):
            return all(ev(a, e) for a in g.args)
        if isinstance(g, Or):
            return any(ev(a, e) for a in g.args)
        if isinstance(g, Implies):
            return (not ev(g.a, e)) or ev(g.b, e)
        if isinstance(g, (Exists1, Forall1)):
            vals = (ev(g.f, {**e, g.v: a}) for a in universe)
            return any(vals) if isinstance(g, Exists1) else all(vals)
        if isinstance(g, (Exists2, Forall2)):
            subsets = (frozenset(c) for r in range(S.n + 1) for c in itertools.combinations(universe, r))
            vals = (ev(g.f, {**e, g.v: X}) for X in subsets)
            return any(vals) if isinstance(g, Exists2) else all(vals)
        raise TypeError(g)

    return ev(f, env)


# ---------------------------------------------------------------- formulas

def formulas(max_rank: int = 2, p: int = 2, tree_vocab: bool = True, points=("x", "y", "z"), sets=("X",)):
    """Random sentences of bounded rank; every variable is bound before use."""

    def gen(rank_left, bound_pts, bound_sets, depth):
        atoms = []
        if bound_pts:
            v = st.sampled_from(bound_pts)
            atoms += [st.builds(Eq, v, v), st.builds(Edge, v, v), st.builds(Label, st.integers(1, p), v)]
            if tree_vocab:
                atoms.append(st.builds(Root, v))
            if bound_sets:
                atoms.append(st.builds(In, v, st.sampled_from(bound_sets)))
        atoms += [st.just(Top()), st.just(Bottom())]
        leaf = st.one_of(atoms)
        if depth <= 0:
            return leaf
        sub = lambda: gen(rank_left, bound_pts, bound_sets, depth - 1)  # noqa: E731
        options = [leaf, sub().map(Not),
                   st.builds(lambda a, b: And((a, b)), sub(), sub()),
                   st.builds(lambda a, b: Or((a, b)), sub(), sub()),
                   st.builds(Implies, sub(), sub())]
        if rank_left > 0:
            fresh_p = [v for v in points if v not in bound_pts]
            if fresh_p:
                v = fresh_p[0]
                body = gen(rank_left - 1, bound_pts + (v,), bound_sets, depth - 1)
                options += [body.map(lambda b, v=v: Exists1(v, b)), body.map(lambda b, v=v: Forall1(v, b))]
            fresh_s = [V for V in sets if V not in bound_sets]
            if fresh_s:
                V = fresh_s[0]
                body = gen(rank_left - 1, bound_pts, bound_sets + (V,), depth - 1)
                options += [body.map(lambda b, V=V: Exists2(V, b)), body.map(lambda b, V=V: Forall2(V, b))]
        return st.one_of(options)

    return gen(max_rank, (), (), 4)
