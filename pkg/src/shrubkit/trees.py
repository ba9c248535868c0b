"""Labeled rooted trees and forests of bounded height.

Trees are unordered. Children are kept sorted by their canonical encoding, so
two ``Tree`` values compare equal exactly when they are isomorphic as labeled
rooted trees.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

__all__ = [
    "Tree",
    "Forest",
    "Path",
    "InvalidPath",
    "canonical_form",
    "forest_of",
    "attach_root",
    "is_leaf_hereditary_subtree",
    "replace_subtree",
    "enumerate_trees",
    "node_at",
    "star",
    "tree_from_json",
    "tree_to_json",
]

Path = Tuple[int, ...]


class InvalidPath(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Tree:
    """A ``p``-labeled rooted tree; every node carries a label in ``[p]``."""

    p: int
    label: int
    children: Tuple["Tree", ...] = ()

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"label alphabet size must be positive, got {self.p}")
        if not 1 <= self.label <= self.p:
            raise ValueError(f"label {self.label} outside [1, {self.p}]")
        kids = tuple(self.children)
        for c in kids:
            if not isinstance(c, Tree):
                raise TypeError(f"child {c!r} is not a Tree")
            if c.p != self.p:
                raise ValueError("all nodes of a tree share the same p")
        object.__setattr__(self, "children", tuple(sorted(kids, key=lambda c: c.key)))

    @classmethod
    def leaf(cls, label: int, p: int = 1) -> "Tree":
        return cls(p, label, ())

    @cached_property
    def key(self) -> bytes:
        return b"%d(" % self.label + b"".join(c.key for c in self.children) + b")"

    @cached_property
    def size(self) -> int:
        return 1 + sum(c.size for c in self.children)

    @cached_property
    def height(self) -> int:
        return 1 + max(c.height for c in self.children) if self.children else 0

    @property
    def root_label(self) -> int:
        return self.label

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def __eq__(self, other):
        if not isinstance(other, Tree):
            return NotImplemented
        return self.p == other.p and self.key == other.key

    def __hash__(self):
        return hash((self.p, self.key))

    def __lt__(self, other: "Tree") -> bool:
        return self.key < other.key

    def __repr__(self):
        return f"Tree(p={self.p}, {self.key.decode()})"

    def paths(self) -> Iterator[Path]:
        """Node paths in preorder."""
        yield ()
        for i, c in enumerate(self.children):
            for sub in c.paths():
                yield (i,) + sub

    def leaf_paths(self) -> List[Path]:
        return [path for path in self.paths() if node_at(self, path).is_leaf]

    def with_p(self, p: int) -> "Tree":
        return Tree(p, self.label, tuple(c.with_p(p) for c in self.children))


@dataclass(frozen=True, eq=False)
class Forest:
    """A finite multiset of trees over the same label alphabet."""

    p: int
    trees: Tuple[Tree, ...] = ()

    def __post_init__(self):
        for t in self.trees:
            if t.p != self.p:
                raise ValueError("forest members must share p")
        object.__setattr__(self, "trees", tuple(sorted(self.trees, key=lambda t: t.key)))

    @property
    def size(self) -> int:
        return sum(t.size for t in self.trees)

    def __len__(self):
        return len(self.trees)

    def __iter__(self):
        return iter(self.trees)

    def __eq__(self, other):
        if not isinstance(other, Forest):
            return NotImplemented
        return self.p == other.p and [t.key for t in self.trees] == [t.key for t in other.trees]

    def __hash__(self):
        return hash((self.p, tuple(t.key for t in self.trees)))

    def __repr__(self):
        return f"Forest(p={self.p}, [{', '.join(t.key.decode() for t in self.trees)}])"


def canonical_form(t: Tree) -> bytes:
    """Isomorphism-complete byte encoding of ``t``; bytes order is a total order on trees."""
    return t.key


def forest_of(t: Tree) -> Forest:
    return Forest(t.p, t.children)


def attach_root(f: Forest, label: int) -> Tree:
    return Tree(f.p, label, f.trees)


def star(k: int, label: int = 1, leaf_label: int = 1, p: int = 1) -> Tree:
    """Root labeled ``label`` with ``k`` leaf children labeled ``leaf_label``."""
    p = max(p, label, leaf_label)
    return Tree(p, label, tuple(Tree(p, leaf_label) for _ in range(k)))


def node_at(t: Tree, path: Sequence[int]) -> Tree:
    node = t
    for depth, i in enumerate(path):
        if not 0 <= i < len(node.children):
            raise InvalidPath(f"path {tuple(path)} leaves the tree at depth {depth}")
        node = node.children[i]
    return node


def replace_subtree(t: Tree, at: Sequence[int], s: Tree) -> Tree:
    if s.p != t.p:
        raise ValueError("replacement must use the same p")
    at = tuple(at)
    node_at(t, at)
    return _replace(t, at, s)


def _replace(t: Tree, at: Path, s: Tree) -> Tree:
    if not at:
        return s
    i = at[0]
    kids = list(t.children)
    kids[i] = _replace(kids[i], at[1:], s)
    return Tree(t.p, t.label, tuple(kids))


def _bipartite_matching(n_left: int, n_right: int, ok) -> Optional[List[int]]:
    """Match every left vertex to a distinct right vertex, or return None."""
    match_right = [-1] * n_right
    adj = [[j for j in range(n_right) if ok(i, j)] for i in range(n_left)]

    def augment(i, seen):
        for j in adj[i]:
            if j in seen:
                continue
            seen.add(j)
            if match_right[j] < 0 or augment(match_right[j], seen):
                match_right[j] = i
                return True
        return False

    for i in range(n_left):
        if not augment(i, set()):
            return None
    result = [-1] * n_left
    for j, i in enumerate(match_right):
        if i >= 0:
            result[i] = j
    return result


def is_leaf_hereditary_subtree(sub: Tree, sup: Tree) -> Optional[Dict[Path, Path]]:
    """Embed ``sub`` into ``sup`` root-to-root so that leaves land on leaves.

    Returns a node map from paths of ``sub`` to paths of ``sup``, or ``None``
    when no label-preserving, child-to-child, injective embedding exists.
    """
    if sub.p != sup.p:
        raise ValueError("trees must share p")
    memo: Dict[Tuple[bytes, bytes], bool] = {}

    def embeds(a: Tree, b: Tree) -> bool:
        k = (a.key, b.key)
        if k in memo:
            return memo[k]
        if a.label != b.label or len(a.children) > len(b.children):
            ok = False
        elif a.is_leaf:
            ok = b.is_leaf
        else:
            ok = _bipartite_matching(
                len(a.children), len(b.children),
                lambda i, j: embeds(a.children[i], b.children[j])) is not None
        memo[k] = ok
        return ok

    if not embeds(sub, sup):
        return None
    mapping: Dict[Path, Path] = {}

    def build(a: Tree, b: Tree, pa: Path, pb: Path):
        mapping[pa] = pb
        if a.is_leaf:
            return
        match = _bipartite_matching(
            len(a.children), len(b.children),
            lambda i, j: embeds(a.children[i], b.children[j]))
        for i, j in enumerate(match):
            build(a.children[i], b.children[j], pa + (i,), pb + (j,))

    build(sub, sup, (), ())
    return mapping


def enumerate_trees(d: int, p: int, max_size: int) -> Iterator[Tree]:
    """One tree per isomorphism class of height <= d, size <= max_size.

    Output is ordered by size, then canonical encoding.
    """
    if max_size < 1:
        return
    # by_height[h][n]: trees of height <= h and size n
    by_height: List[Dict[int, List[Tree]]] = [
        {1: [Tree(p, lab) for lab in range(1, p + 1)]}
    ]
    for h in range(1, d + 1):
        lower = by_height[h - 1]
        pool = sorted((t for n in lower for t in lower[n]), key=lambda t: (t.size, t.key))
        forests = _multisets_by_size(pool, max_size - 1)
        level: Dict[int, List[Tree]] = {}
        for total, fams in forests.items():
            n = total + 1
            level[n] = [Tree(p, lab, fam) for fam in fams for lab in range(1, p + 1)]
        by_height.append(level)
    top = by_height[d]
    for n in range(1, max_size + 1):
        yield from sorted(set(top.get(n, [])), key=lambda t: t.key)


def _multisets_by_size(pool: List[Tree], budget: int) -> Dict[int, List[Tuple[Tree, ...]]]:
    """All multisets of pool members grouped by total size (<= budget)."""
    out: Dict[int, List[Tuple[Tree, ...]]] = {}

    def rec(start: int, remaining: int, acc: List[Tree]):
        total = budget - remaining
        out.setdefault(total, []).append(tuple(acc))
        for i in range(start, len(pool)):
            t = pool[i]
            if t.size > remaining:
                break
            acc.append(t)
            rec(i, remaining - t.size, acc)
            acc.pop()

    rec(0, budget, [])
    return out


def tree_to_json(t: Tree) -> dict:
    def node(x: Tree) -> dict:
        return {"label": x.label, "children": [node(c) for c in x.children]}

    return {"p": t.p, "tree": node(t)}


def tree_from_json(obj) -> Tree:
    if isinstance(obj, str):
        obj = json.loads(obj)
    p = int(obj["p"])

    def node(x) -> Tree:
        return Tree(p, int(x["label"]), tuple(node(c) for c in x.get("children", [])))

    return node(obj["tree"])
