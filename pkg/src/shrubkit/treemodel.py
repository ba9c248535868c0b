"""Tree models ``(s, S)``: validation, the graph they define, and the formula translation.

A model is stored as its flattened tree: a leaf carrying the pair ``(i, j)``
gets label ``(i - 1) * p + j`` and every internal node gets ``r * p + 1``.
Ill-formed inputs (a leaf with the internal marker, an internal node with a
pair label, a short path) stay representable so that ``validate`` can
report them.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .graphs import Graph
from .logic.formula import (
    And, Bottom, Edge, Eq, Exists1, Exists2, Forall1, Forall2, Formula, Implies, In, Label, Not,
    Or, Root, Top, VocabularyError, conj, disj, fresh_name, max_label, rank, uses_root,
    variables,
)
from .trees import Path, Tree, node_at

__all__ = [
    "TreeModel", "InvalidModel", "Violation", "ValidationReport", "validate", "flatten",
    "unflatten", "build_omega", "materialize", "interpret_formula", "interpretation_rank",
    "xi_vertex", "xi_edge", "xi_label", "leaf_formula", "vertex_id", "restrict_to_leaves",
    "symmetrize", "model_to_json", "model_from_json", "random_model", "full_signature",
]

Triple = Tuple[int, int, int]


class InvalidModel(ValueError):
    pass


def pair_label(i: int, j: int, p: int) -> int:
    return (i - 1) * p + j


def label_pair(lab: int, p: int) -> Tuple[int, int]:
    return (lab - 1) // p + 1, (lab - 1) % p + 1


@dataclass(frozen=True)
class TreeModel:
    r: int
    p: int
    d: int
    tree: Tree
    signature: FrozenSet[Triple] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.r < 1 or self.p < 1 or self.d < 0:
            raise ValueError("need r >= 1, p >= 1, d >= 0")
        if self.tree.p != self.internal_label:
            raise ValueError(f"flattened tree must use p = r*p+1 = {self.internal_label}")
        object.__setattr__(self, "signature", frozenset(tuple(t) for t in self.signature))

    @property
    def internal_label(self) -> int:
        return self.r * self.p + 1

    @classmethod
    def build(cls, r: int, p: int, d: int, spec, signature: Iterable[Sequence[int]] = ()) -> "TreeModel":
        """``spec`` is a pair ``(i, j)`` for a leaf or a list of specs for an internal node."""
        P = r * p + 1

        def go(x) -> Tree:
            if isinstance(x, tuple):
                i, j = x
                if not (1 <= i <= r and 1 <= j <= p):
                    raise ValueError(f"leaf pair {x} outside [{r}]x[{p}]")
                return Tree(P, pair_label(i, j, p))
            return Tree(P, P, tuple(go(c) for c in x))

        return cls(r, p, d, go(spec), frozenset(tuple(t) for t in signature))

    def leaf_pair(self, path: Path) -> Tuple[int, int]:
        return label_pair(node_at(self.tree, path).label, self.p)

    def with_tree(self, tree: Tree) -> "TreeModel":
        return TreeModel(self.r, self.p, self.d, tree, self.signature)


def full_signature(r: int, d: int) -> FrozenSet[Triple]:
    return frozenset((i, j, l) for i in range(1, r + 1) for j in range(1, r + 1) for l in range(1, d + 1))


def symmetrize(tm: TreeModel) -> TreeModel:
    S = set(tm.signature) | {(j, i, l) for i, j, l in tm.signature}
    return TreeModel(tm.r, tm.p, tm.d, tm.tree, frozenset(S))


def flatten(tm: TreeModel) -> Tree:
    return tm.tree


def unflatten(tree: Tree, r: int, p: int, d: int, signature: Iterable[Sequence[int]] = ()) -> TreeModel:
    return TreeModel(r, p, d, tree, frozenset(tuple(t) for t in signature))


def vertex_id(path: Path) -> str:
    return "v" + "".join(f".{i}" for i in path)


# ---------------------------------------------------------------- validation

@dataclass(frozen=True)
class Violation:
    kind: str
    path: Optional[Path]
    detail: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "path": list(self.path) if self.path is not None else None,
                "detail": self.detail}


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_json() for v in self.violations]}


def validate(tm: TreeModel) -> ValidationReport:
    out: List[Violation] = []
    P = tm.internal_label

    def walk(t: Tree, path: Path):
        if t.is_leaf:
            if len(path) != tm.d:
                out.append(Violation("path-length", path,
                                     f"root-to-leaf path has length {len(path)}, expected {tm.d}"))
            if t.label == P:
                out.append(Violation("leaf-label", path, "leaf carries the internal marker"))
        elif t.label != P:
            out.append(Violation("internal-label", path,
                                 f"internal node labeled {t.label}, expected {P}"))
        for i, c in enumerate(t.children):
            walk(c, path + (i,))

    walk(tm.tree, ())
    for (i, j, l) in sorted(tm.signature):
        if not (1 <= i <= tm.r and 1 <= j <= tm.r and 1 <= l <= tm.d):
            out.append(Violation("signature-range", None, f"triple {(i, j, l)} outside [r]^2 x [d]"))
        elif (j, i, l) not in tm.signature:
            out.append(Violation("asymmetric-signature", None,
                                 f"{(i, j, l)} is in S but {(j, i, l)} is not"))
    return ValidationReport(tuple(out))


# ---------------------------------------------------------------- graph

def materialize(tm: TreeModel, names: Optional[Mapping[Path, str]] = None) -> Graph:
    """The graph defined by ``tm``; vertex ids are leaf paths unless ``names`` renames them."""
    rep = validate(tm)
    if not rep.ok:
        raise InvalidModel("; ".join(v.detail for v in rep.violations))
    leaves = tm.tree.leaf_paths()
    ident = {q: (names[q] if names is not None else vertex_id(q)) for q in leaves}
    pairs = {q: tm.leaf_pair(q) for q in leaves}
    edges = []
    for a_idx, u in enumerate(leaves):
        for w in leaves[a_idx + 1:]:
            common = 0
            while common < tm.d and u[common] == w[common]:
                common += 1
            l = tm.d - common
            if (pairs[u][0], pairs[w][0], l) in tm.signature:
                edges.append((ident[u], ident[w]))
    return Graph(tm.p, {ident[q]: pairs[q][1] for q in leaves}, edges)


def restrict_to_leaves(tm: TreeModel, keep: Iterable[Path]) -> Tuple[TreeModel, Dict[Path, Path]]:
    """Leaf-hereditary submodel spanned by ``keep``; also returns new-path -> old-path."""
    keep = {tuple(q) for q in keep}
    if not keep:
        raise ValueError("a tree model needs at least one leaf")
    for q in keep:
        if not node_at(tm.tree, q).is_leaf:
            raise ValueError(f"{q} is not a leaf")

    def go(t: Tree, path: Path) -> Optional[Tuple[Tree, Dict[Path, Path]]]:
        if t.is_leaf:
            return (t, {(): path}) if path in keep else None
        kids = [go(c, path + (i,)) for i, c in enumerate(t.children)]
        kids = sorted((k for k in kids if k is not None), key=lambda k: k[0].key)
        if not kids:
            return None
        prov = {(): path}
        for i, (_, sub_prov) in enumerate(kids):
            prov.update({(i,) + q: old for q, old in sub_prov.items()})
        return Tree(t.p, t.label, tuple(k[0] for k in kids)), prov

    sub, prov = go(tm.tree, ())
    return tm.with_tree(sub), prov


# ---------------------------------------------------------------- formulas

def leaf_formula(x: str, taken: Iterable[str] = ()) -> Formula:
    """``x`` is a leaf: an isolated root, or a non-root node with at most one neighbour."""
    taken = set(taken) | {x}
    y = fresh_name("ly", taken)
    z = fresh_name("lz", taken | {y})
    isolated_root = And((Root(x), Not(Exists1(y, Edge(x, y)))))
    two_nbrs = Exists1(y, And((Edge(x, y), Exists1(z, And((Edge(x, z), Not(Eq(y, z))))))))
    return Or((isolated_root, And((Not(Root(x)), Not(two_nbrs)))))


def _walk(start: str, names: List[str], tail: Formula, prev: Optional[str] = None) -> Formula:
    """Non-backtracking walk ``start, names[0], ..., names[-1]`` followed by ``tail``.

    Built nested so each quantifier is guarded by an adjacency test.
    """
    if not names:
        return tail
    here, rest = names[0], names[1:]
    parts = [Edge(start, here)]
    if prev is not None:
        parts.append(Not(Eq(here, prev)))
    parts.append(_walk(here, rest, tail, start))
    return Exists1(here, And(tuple(parts)))


def _lca_at(x: str, y: str, l: int, taken: set) -> Formula:
    """For depth-d leaves ``x, y``: their lowest common ancestor sits ``l`` levels up."""
    a = []
    for k in range(1, l + 1):
        a.append(fresh_name(f"a{k}", taken | set(a)))
    taken = taken | set(a)
    b = []
    for k in range(1, l):
        b.append(fresh_name(f"b{k}", taken | set(b)))
    top = a[-1]
    a_prev = a[-2] if l >= 2 else x  # penultimate node of the x-chain
    b_last = b[-1] if b else y
    b_before = b[-2] if len(b) >= 2 else (y if b else None)
    close = [Edge(b_last, top), Not(Eq(b_last, a_prev))]
    if b_before is not None:
        close.append(Not(Eq(top, b_before)))
    y_chain = _walk(y, b, And(tuple(close)))
    return _walk(x, a, y_chain)


def _first_is(x: str, i: int, p: int) -> Formula:
    return disj(*[Label(pair_label(i, j, p), x) for j in range(1, p + 1)])


def _second_is(x: str, j: int, r: int, p: int) -> Formula:
    return disj(*[Label(pair_label(i, j, p), x) for i in range(1, r + 1)])


def _edge_body(x: str, y: str, S, r: int, p: int, taken: set) -> Formula:
    S = sorted(S)
    if not S:
        return Bottom()
    return disj(*[conj(_first_is(x, i, p), _first_is(y, j, p), _lca_at(x, y, l, taken | {x, y}))
                  for (i, j, l) in S])


def xi_vertex(x: str = "x") -> Formula:
    return leaf_formula(x)


def xi_label(j: int, r: int, p: int, x: str = "x") -> Formula:
    return And((leaf_formula(x), _second_is(x, j, r, p)))


def xi_edge(S, r: int, p: int, x: str = "x", y: str = "y") -> Formula:
    return And((leaf_formula(x, {y}), leaf_formula(y, {x}), _edge_body(x, y, S, r, p, {x, y})))


def build_omega(r: int, p: int, d: int) -> Formula:
    """FO sentence over the flattened vocabulary stating that a tree is a height-d tree model."""
    P = r * p + 1
    x = "x"
    chain = [f"w{k}" for k in range(1, d + 1)]
    to_root = _walk(x, chain, Root(chain[-1] if chain else x))
    leaf = leaf_formula(x)
    return conj(
        Forall1(x, Implies(leaf, Not(Label(P, x)))),
        Forall1(x, Implies(Not(leaf), Label(P, x))),
        Forall1(x, Implies(leaf, to_root)),
    )


def interpret_formula(phi: Formula, S, r: int, p: int, d: int) -> Formula:
    """Translate a graph formula into one over flattened tree models with signature ``S``.

    Quantifiers are relativized to leaves, labels become disjunctions over
    leaf pairs, and edges become the signature disjunction of LCA-height tests.
    """
    if uses_root(phi):
        raise VocabularyError("graph formulas cannot mention root")
    if max_label(phi) > p:
        raise VocabularyError(f"formula mentions P{max_label(phi)} but p={p}")
    taken = variables(phi)

    def go(f: Formula) -> Formula:
        if isinstance(f, (Top, Bottom, Eq, In)):
            return f
        if isinstance(f, Label):
            return _second_is(f.x, f.i, r, p)
        if isinstance(f, Edge):
            return _edge_body(f.x, f.y, S, r, p, set(taken))
        if isinstance(f, Not):
            return Not(go(f.f))
        if isinstance(f, And):
            return And(tuple(go(a) for a in f.args))
        if isinstance(f, Or):
            return Or(tuple(go(a) for a in f.args))
        if isinstance(f, Implies):
            return Implies(go(f.a), go(f.b))
        if isinstance(f, Exists1):
            return Exists1(f.v, And((leaf_formula(f.v, taken), go(f.f))))
        if isinstance(f, Forall1):
            return Forall1(f.v, Implies(leaf_formula(f.v, taken), go(f.f)))
        if isinstance(f, (Exists2, Forall2)):
            u = fresh_name("u", taken | {f.v})
            guard = Forall1(u, Implies(In(u, f.v), leaf_formula(u, taken | {u})))
            if isinstance(f, Exists2):
                return Exists2(f.v, And((guard, go(f.f))))
            return Forall2(f.v, Implies(guard, go(f.f)))
        raise TypeError(f"not a formula: {f!r}")

    return go(phi)


def interpretation_rank(r: int, p: int, d: int) -> int:
    """q0: the largest rank among the vertex, edge (full signature), label formulas and Omega."""
    parts = [xi_vertex(), xi_edge(full_signature(r, d), r, p), build_omega(r, p, d)]
    parts += [xi_label(j, r, p) for j in range(1, p + 1)]
    return max(rank(f) for f in parts)


# ---------------------------------------------------------------- I/O

def model_to_json(tm: TreeModel) -> dict:
    P = tm.internal_label

    def node(t: Tree) -> dict:
        if t.is_leaf and t.label != P:
            return {"leaf": list(label_pair(t.label, tm.p))}
        if t.label == P:
            return {"internal": True, "children": [node(c) for c in t.children]}
        return {"leaf": list(label_pair(t.label, tm.p)), "children": [node(c) for c in t.children]}

    return {"r": tm.r, "p": tm.p, "d": tm.d,
            "signature": [list(t) for t in sorted(tm.signature)], "tree": node(tm.tree)}


def model_from_json(obj) -> TreeModel:
    if isinstance(obj, str):
        obj = json.loads(obj)
    r, p, d = int(obj["r"]), int(obj["p"]), int(obj["d"])
    P = r * p + 1

    def node(x) -> Tree:
        kids = tuple(node(c) for c in x.get("children", []))
        if "leaf" in x:
            i, j = (int(v) for v in x["leaf"])
            if not (1 <= i <= r and 1 <= j <= p):
                raise ValueError(f"leaf pair {(i, j)} outside [{r}]x[{p}]")
            return Tree(P, pair_label(i, j, p), kids)
        if x.get("internal"):
            return Tree(P, P, kids)
        raise ValueError(f"node must be a leaf or internal: {x!r}")

    S = frozenset(tuple(int(v) for v in t) for t in obj.get("signature", []))
    for t in S:
        if len(t) != 3:
            raise ValueError(f"signature entries are triples, got {t}")
    return TreeModel(r, p, d, node(obj["tree"]), S)


def random_model(rng: random.Random, r: int, p: int, d: int, max_leaves: int,
                 edge_density: float = 0.5, max_children: int = 3) -> TreeModel:
    """A valid model with at most ``max_leaves`` leaves and a random symmetric signature."""

    def grow(depth: int):
        if depth == d:
            return (rng.randint(1, r), rng.randint(1, p))
        return [grow(depth + 1) for _ in range(rng.randint(1, max_children))]

    def n_leaves(spec) -> int:
        return 1 if isinstance(spec, tuple) else sum(n_leaves(c) for c in spec)

    while True:
        spec = grow(0)
        if n_leaves(spec) <= max_leaves:
            break
    S = set()
    for i in range(1, r + 1):
        for j in range(i, r + 1):
            for l in range(1, d + 1):
                if rng.random() < edge_density:
                    S |= {(i, j, l), (j, i, l)}
    return TreeModel.build(r, p, d, spec, S)
