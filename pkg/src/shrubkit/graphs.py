"""p-labeled simple graphs and monadic (one-predicate-per-element) structures."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Dict, FrozenSet, Hashable, Iterable, Mapping, Sequence, Tuple

__all__ = [
    "Graph",
    "MonadicStructure",
    "induced_subgraph",
    "graph_from_json",
    "graph_to_json",
    "graph_to_dot",
]


@dataclass(frozen=True)
class Graph:
    """Undirected, loop-free graph whose vertices carry one label in ``[p]``.

    Vertex identifiers are opaque strings.
    """

    p: int
    labels: Tuple[Tuple[str, int], ...]
    edges: FrozenSet[FrozenSet[str]]

    def __init__(self, p: int, labels: Mapping[str, int] | Iterable[Tuple[str, int]],
                 edges: Iterable[Iterable[str]] = ()):
        items = dict(labels.items() if isinstance(labels, Mapping) else labels)
        for v, lab in items.items():
            if not 1 <= lab <= p:
                raise ValueError(f"vertex {v!r} label {lab} outside [1, {p}]")
        es = set()
        for e in edges:
            u, w = tuple(e)
            if u == w:
                raise ValueError(f"loop at {u!r}")
            for x in (u, w):
                if x not in items:
                    raise ValueError(f"edge endpoint {x!r} is not a vertex")
            es.add(frozenset((u, w)))
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "labels", tuple(sorted(items.items())))
        object.__setattr__(self, "edges", frozenset(es))

    @property
    def vertices(self) -> Tuple[str, ...]:
        return tuple(v for v, _ in self.labels)

    def label_of(self, v: str) -> int:
        return dict(self.labels)[v]

    def __len__(self):
        return len(self.labels)

    def neighbours(self, v: str) -> FrozenSet[str]:
        return frozenset(w for e in self.edges if v in e for w in e if w != v)

    def relabeled(self, offset: int) -> "Graph":
        """Shift every label by ``offset``; the alphabet grows to ``p + offset``."""
        return Graph(self.p + offset, {v: lab + offset for v, lab in self.labels}, self.edges)

    def renamed(self, names: Mapping[str, str]) -> "Graph":
        return Graph(self.p, {names[v]: lab for v, lab in self.labels},
                     [[names[u] for u in e] for e in self.edges])


def induced_subgraph(g: Graph, vs: Iterable[str]) -> Graph:
    keep = set(vs)
    labels = dict(g.labels)
    unknown = keep - labels.keys()
    if unknown:
        raise KeyError(f"unknown vertices {sorted(unknown)}")
    return Graph(g.p, {v: labels[v] for v in keep}, [e for e in g.edges if e <= keep])


def graph_to_json(g: Graph) -> dict:
    return {
        "p": g.p,
        "vertices": [{"id": v, "label": lab} for v, lab in g.labels],
        "edges": sorted(sorted(e) for e in g.edges),
    }


def graph_from_json(obj) -> Graph:
    if isinstance(obj, str):
        obj = json.loads(obj)
    return Graph(int(obj["p"]), {str(v["id"]): int(v["label"]) for v in obj["vertices"]},
                 [[str(a), str(b)] for a, b in obj.get("edges", [])])


def graph_to_dot(g: Graph, name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    for v, lab in g.labels:
        lines.append(f'  "{v}" [label={lab}];')
    for a, b in sorted(sorted(e) for e in g.edges):
        lines.append(f'  "{a}" -- "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class MonadicStructure:
    """Finite structure over unary predicates where each element lies in exactly one."""

    sigma: Tuple[str, ...]
    assignment: Tuple[Tuple[Hashable, str], ...]

    def __init__(self, sigma: Sequence[str], assignment: Mapping[Hashable, str] | Iterable):
        sigma = tuple(sigma)
        if len(set(sigma)) != len(sigma):
            raise ValueError("duplicate predicate names")
        items = dict(assignment.items() if isinstance(assignment, Mapping) else assignment)
        for a, pred in items.items():
            if pred not in sigma:
                raise ValueError(f"element {a!r} assigned to unknown predicate {pred!r}")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "assignment", tuple(sorted(items.items(), key=lambda kv: repr(kv[0]))))

    @classmethod
    def from_counts(cls, sigma: Sequence[str], counts: Mapping[str, int] | Sequence[int]) -> "MonadicStructure":
        if not isinstance(counts, Mapping):
            counts = dict(zip(sigma, counts))
        return cls(sigma, {f"{pred}#{k}": pred for pred in sigma for k in range(counts.get(pred, 0))})

    @property
    def universe(self) -> Tuple[Hashable, ...]:
        return tuple(a for a, _ in self.assignment)

    def __len__(self):
        return len(self.assignment)

    def predicate_of(self, a: Hashable) -> str:
        return dict(self.assignment)[a]

    def counts(self) -> Dict[str, int]:
        c = Counter(pred for _, pred in self.assignment)
        return {pred: c.get(pred, 0) for pred in self.sigma}

    def members(self, pred: str) -> Tuple[Hashable, ...]:
        return tuple(a for a, q in self.assignment if q == pred)

    def substructure(self, elements: Iterable[Hashable]) -> "MonadicStructure":
        keep = set(elements)
        table = dict(self.assignment)
        missing = keep - table.keys()
        if missing:
            raise KeyError(f"unknown elements {sorted(map(repr, missing))}")
        return MonadicStructure(self.sigma, {a: table[a] for a in keep})
