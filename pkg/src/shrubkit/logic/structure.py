"""Bitmask view of a finite structure, shared by the evaluator and the type engine."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from ..graphs import Graph, MonadicStructure
from ..trees import Forest, Tree

__all__ = ["Structure", "as_structure"]


@dataclass(frozen=True)
class Structure:
    """Elements ``0..n-1`` with one label each, symmetric edges and an optional root set.

    ``roots`` is ``None`` for the graph vocabulary and a bitmask for trees and
    forests (the roots of the components).
    """

    p: int
    labels: Tuple[int, ...]
    adj: Tuple[int, ...]
    roots: Optional[int] = None
    names: Tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def vocabulary(self) -> str:
        return "graph" if self.roots is None else "tree"

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def is_root(self, a: int) -> bool:
        return bool(self.roots is not None and self.roots >> a & 1)

    def restrict(self, mask: int) -> "Structure":
        keep = [a for a in range(self.n) if mask >> a & 1]
        pos = {a: i for i, a in enumerate(keep)}
        adj = []
        for a in keep:
            bits = 0
            for b in keep:
                if self.adj[a] >> b & 1:
                    bits |= 1 << pos[b]
            adj.append(bits)
        roots = None
        if self.roots is not None:
            roots = sum(1 << pos[a] for a in keep if self.roots >> a & 1)
        names = tuple(self.names[a] for a in keep) if self.names else ()
        return Structure(self.p, tuple(self.labels[a] for a in keep), tuple(adj), roots, names)


def _from_trees(p: int, trees) -> Structure:
    labels, adj_sets, roots, names = [], [], 0, []

    def visit(t: Tree, parent: Optional[int], name: str):
        me = len(labels)
        labels.append(t.label)
        adj_sets.append(set())
        names.append(name)
        if parent is not None:
            adj_sets[me].add(parent)
            adj_sets[parent].add(me)
        for i, c in enumerate(t.children):
            visit(c, me, f"{name}.{i}")

    for k, t in enumerate(trees):
        roots |= 1 << len(labels)
        visit(t, None, f"t{k}" if len(trees) != 1 else "v")
    adj = tuple(sum(1 << b for b in s) for s in adj_sets)
    return Structure(p, tuple(labels), adj, roots, tuple(names))


def as_structure(x) -> Structure:
    if isinstance(x, Structure):
        return x
    if isinstance(x, Tree):
        return _from_trees(x.p, [x])
    if isinstance(x, Forest):
        return _from_trees(x.p, list(x.trees))
    if isinstance(x, Graph):
        vs = x.vertices
        pos = {v: i for i, v in enumerate(vs)}
        adj = [0] * len(vs)
        for e in x.edges:
            a, b = (pos[v] for v in e)
            adj[a] |= 1 << b
            adj[b] |= 1 << a
        return Structure(x.p, tuple(lab for _, lab in x.labels), tuple(adj), None, tuple(vs))
    if isinstance(x, MonadicStructure):
        idx = {pred: i + 1 for i, pred in enumerate(x.sigma)}
        return Structure(max(1, len(x.sigma)), tuple(idx[pred] for _, pred in x.assignment),
                         (0,) * len(x), None, tuple(map(str, x.universe)))
    raise TypeError(f"cannot view {type(x).__name__} as a structure")
