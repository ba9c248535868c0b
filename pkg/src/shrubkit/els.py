"""Type-preserving shrink and grow of labeled trees, the preceq relation, and scale drivers."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .bounds import ScaleSpec, Window, chi, rho, scale_of, scale_window, tower_cmp, zeta
from .graphs import Graph
from .logic.formula import Formula, max_label, rank
from .logic.semantics import model_check
from .logic.types import BudgetExceeded, TypeArena, mso_equiv, mso_type
from .treemodel import InvalidModel, TreeModel, interpretation_rank, materialize, validate, vertex_id
from .trees import Path, Tree, _bipartite_matching, enumerate_trees, is_leaf_hereditary_subtree, node_at
from .typesys import CapPolicy, _fp_text

__all__ = [
    "Thresholds", "NoHeavyNode", "NoEligibleNode", "WindowTooNarrow", "StepLog", "ElsReport",
    "shrink", "shrink_with_provenance", "find_heavy_node", "step_shrink", "grow", "preceq",
    "els_down", "els_up", "graph_shrink", "SatResult", "sat_search", "ChainReport",
    "chain_check", "calibrated_thresholds",
]


class NoHeavyNode(LookupError):
    pass


class NoEligibleNode(LookupError):
    pass


class WindowTooNarrow(RuntimeError):
    pass


def _saturate(x, bound: int) -> int:
    return bound if tower_cmp(x, bound) >= 0 else x.value


@dataclass(frozen=True)
class Thresholds:
    """Child caps and indicator rank.

    ``practical``: a node is heavy when some class of its children has more
    than ``q`` members, and fingerprints use the same cap. ``paper``: caps
    are ``chi_{h,p}(m)`` and ranks ``rho_{h-1,p}(m)``, saturated at the family
    size + 1, so at desk scale nothing is ever heavy.
    """

    mode: str = "practical"
    cap_default: int = 2
    caps: Tuple[Tuple[int, int], ...] = ()
    q_override: Optional[int] = None
    classifier: str = "fingerprint"
    p: int = 1

    def __post_init__(self):
        if self.mode not in ("practical", "paper"):
            raise ValueError(f"unknown threshold mode {self.mode!r}")
        if self.classifier not in ("fingerprint", "oracle"):
            raise ValueError(f"unknown classifier {self.classifier!r}")
        if self.cap_default < 1 or any(c < 1 for _, c in self.caps):
            raise ValueError("caps must be at least 1")
        if self.q_override is not None and self.q_override < 1:
            raise ValueError("q must be at least 1")

    @classmethod
    def practical(cls, cap: int = 2, q: Optional[int] = None, table: Optional[Dict[int, int]] = None,
                  classifier: str = "fingerprint") -> "Thresholds":
        return cls("practical", cap, tuple(sorted((table or {}).items())), q, classifier)

    @classmethod
    def paper(cls, p: int, classifier: str = "fingerprint") -> "Thresholds":
        return cls("paper", 1, (), None, classifier, p)

    def cap_at(self, m: int) -> int:
        return dict(self.caps).get(m, self.cap_default)

    def q(self, m: int, child_height: int, family_size: int) -> int:
        if self.mode == "paper":
            return _saturate(rho(child_height, self.p, m), family_size + 1)
        return self.q_override if self.q_override is not None else self.cap_at(m)

    def heavy_cap(self, m: int, height: int, family_size: int) -> int:
        if self.mode == "paper":
            return _saturate(chi(max(height, 1), self.p, m), family_size + 1)
        return self.q(m, height - 1, family_size)

    def cap_policy(self) -> CapPolicy:
        if self.mode == "paper":
            return CapPolicy.paper(self.p)
        return CapPolicy.practical(self.cap_default, dict(self.caps))

    def describe(self) -> dict:
        return {"mode": self.mode, "cap": self.cap_default, "caps": {str(m): c for m, c in self.caps},
                "q": self.q_override, "classifier": self.classifier}


def calibrated_thresholds(d: int, p: int, ms: Sequence[int], max_size: int, jobs: int = 1) -> Thresholds:
    """Practical thresholds from sound caps, made nondecreasing in the rank."""
    from .typesys import calibrate_cap
    table, running = {}, 1
    for m in sorted(ms):
        running = max(running, calibrate_cap(d, p, m, max_size, jobs).sound_cap)
        table[m] = running
    return Thresholds.practical(cap=max(table.values()), table=table)


class _Classes:
    """Per-run class labels for subtrees at a fixed rank."""

    def __init__(self, m: int, th: Thresholds):
        self.m, self.th = m, th
        self.policy = th.cap_policy()
        self.memo: Dict[bytes, str] = {}
        self.arena = TypeArena()

    def __call__(self, t: Tree) -> str:
        if self.m == 0:
            return "*"
        if self.th.classifier == "oracle":
            hit = self.memo.get(b"o" + t.key)
            if hit is None:
                hit = self.memo[b"o" + t.key] = mso_type(t, self.m, self.arena).digest
            return hit
        return _fp_text(t, self.m, self.policy, self.memo)


def _witness_index(kids: Sequence[Tree]) -> int:
    """First child of maximum height."""
    best = 0
    for i, c in enumerate(kids):
        if c.height > kids[best].height:
            best = i
    return best


# ---------------------------------------------------------------- shrink

def shrink_with_provenance(t: Tree, m: int, th: Thresholds) -> Tuple[Tree, Dict[Path, Path]]:
    """Shrunk tree and a map from its node paths to the paths they came from in ``t``."""
    cls = _Classes(m, th)

    def go(s: Tree) -> Tuple[Tree, Dict[Path, Path]]:
        if s.is_leaf:
            return s, {(): ()}
        subs = [go(c) for c in s.children]
        kids = [k for k, _ in subs]
        labels = [cls(k) for k in kids]
        q = th.q(m, max(k.height for k in kids), len(kids))
        w = _witness_index(kids)
        groups: Dict[str, List[int]] = defaultdict(list)
        for i, lab in enumerate(labels):
            groups[lab].append(i)
        kept: List[int] = []
        for lab, idx in groups.items():
            take = idx[:min(len(idx), q)]
            if w in idx and w not in take:
                take[-1] = w
            kept.extend(take)
        kept.sort(key=lambda i: (kids[i].key, i))
        prov: Dict[Path, Path] = {(): ()}
        for new_i, old_i in enumerate(kept):
            for sp, op in subs[old_i][1].items():
                prov[(new_i,) + sp] = (old_i,) + op
        return Tree(s.p, s.label, tuple(kids[i] for i in kept)), prov

    return go(t)


def shrink(t: Tree, m: int, th: Thresholds) -> Tree:
    return shrink_with_provenance(t, m, th)[0]


# ---------------------------------------------------------------- heavy nodes and steps

def _nodes_by_height(t: Tree):
    out = [(node_at(t, path).height, path) for path in t.paths()]
    out.sort()
    return out


def _class_groups(node: Tree, cls: _Classes) -> Dict[str, List[int]]:
    groups: Dict[str, List[int]] = defaultdict(list)
    for i, c in enumerate(node.children):
        groups[cls(c)].append(i)
    return groups


def _is_heavy(node: Tree, m: int, th: Thresholds, cls: _Classes) -> bool:
    if node.is_leaf:
        return False
    n = len(node.children)
    if th.mode == "paper":
        return n > th.heavy_cap(m, node.height, n)
    q = th.q(m, node.height - 1, n)
    return any(len(idx) > q for idx in _class_groups(node, cls).values())


def find_heavy_node(t: Tree, th: Thresholds, m: int = 1) -> Tuple[Path, int]:
    """Lowest node whose children exceed the cap; ties go to the first path in preorder."""
    cls = _Classes(m, th)
    for h, path in _nodes_by_height(t):
        if _is_heavy(node_at(t, path), m, th, cls):
            return path, h
    raise NoHeavyNode("every node is within its caps")


@dataclass(frozen=True)
class StepLog:
    path: Path
    cls: str
    delta: int

    def to_json(self) -> dict:
        return {"path": list(self.path), "class": self.cls, "delta": self.delta}


def _replace_children(t: Tree, path: Path, kids: Sequence[Tree]) -> Tree:
    if not path:
        return Tree(t.p, t.label, tuple(kids))
    i = path[0]
    new = list(t.children)
    new[i] = _replace_children(t.children[i], path[1:], kids)
    return Tree(t.p, t.label, tuple(new))


def _step_shrink(t: Tree, m: int, th: Thresholds) -> Tuple[Tree, StepLog]:
    cls = _Classes(m, th)
    path, _ = find_heavy_node(t, th, m)
    z = node_at(t, path)
    kids = list(z.children)
    q = th.q(m, z.height - 1, len(kids))
    groups = _class_groups(z, cls)
    lab = min(groups, key=lambda g: (q - len(groups[g]), g))
    w = _witness_index(kids)
    victims = sorted((i for i in groups[lab] if i != w), key=lambda i: (kids[i].key, i))
    victim = victims[-1]
    delta = kids[victim].size
    del kids[victim]
    return _replace_children(t, path, kids), StepLog(path, lab, -delta)


def step_shrink(t: Tree, m: int, th: Thresholds) -> Tree:
    return _step_shrink(t, m, th)[0]


def _grow(t: Tree, m: int, k: int, th: Thresholds) -> Tuple[Tree, StepLog]:
    if k < 0:
        raise ValueError("k must be nonnegative")
    cls = _Classes(m, th)
    for h, path in _nodes_by_height(t):
        z = node_at(t, path)
        if z.is_leaf:
            continue
        if th.mode == "paper":
            if not _is_heavy(z, m, th, cls):
                continue
            eligible = list(_class_groups(z, cls).items())
        else:
            q = th.q(m, h - 1, len(z.children))
            eligible = [(g, idx) for g, idx in _class_groups(z, cls).items() if len(idx) >= q]
        if not eligible:
            continue
        lab, i = min(((g, i) for g, idx in eligible for i in idx),
                     key=lambda gi: (z.children[gi[1]].size, z.children[gi[1]].key))
        rep = z.children[i]
        if k == 0:
            return t, StepLog(path, lab, 0)
        new = _replace_children(t, path, list(z.children) + [rep] * k)
        return new, StepLog(path, lab, k * rep.size)
    raise NoEligibleNode("no node has a child class large enough to duplicate")


def grow(t: Tree, m: int, k: int, th: Thresholds) -> Tree:
    if k == 0:
        return t
    return _grow(t, m, k, th)[0]


# ---------------------------------------------------------------- preceq

def preceq(t1: Tree, t2: Tree, m: int, th: Thresholds) -> bool:
    if t1.p != t2.p:
        raise ValueError("trees must share p")
    cls = _Classes(m, th)
    memo: Dict[Tuple[bytes, bytes], bool] = {}

    def rel(a: Tree, b: Tree) -> bool:
        key = (a.key, b.key)
        if key in memo:
            return memo[key]
        ok = a.label == b.label and a.height == b.height
        if ok and not a.is_leaf:
            ca = Counter(cls(c) for c in a.children)
            cb = Counter(cls(c) for c in b.children)
            size = max(len(a.children), len(b.children))
            q = th.q(m, a.height - 1, size)
            ok = all(ca[g] == cb[g] or min(ca[g], cb[g]) >= q for g in set(ca) | set(cb))
            if ok:
                ok = _bipartite_matching(len(a.children), len(b.children),
                                         lambda i, j: rel(a.children[i], b.children[j])) is not None
        memo[key] = ok
        return ok

    return rel(t1, t2)


# ---------------------------------------------------------------- drivers

@dataclass
class ElsReport:
    direction: str
    input_size: int
    output_size: int
    eta: int
    lam: int
    rank: int
    window: Tuple[Union[int, str], Union[int, str]]
    steps: List[StepLog] = field(default_factory=list)
    verdicts: Dict[str, Optional[bool]] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "direction": self.direction, "input_size": self.input_size,
            "output_size": self.output_size, "eta": self.eta, "lambda": self.lam,
            "rank": self.rank, "window": list(self.window),
            "steps": [s.to_json() for s in self.steps],
            "delta": sum(s.delta for s in self.steps), "verdicts": self.verdicts,
        }


def _verdicts(small: Tree, big: Tree, m: int, th: Thresholds, verify: bool) -> Dict[str, Optional[bool]]:
    out: Dict[str, Optional[bool]] = {
        "leaf_hereditary": is_leaf_hereditary_subtree(small, big) is not None,
        "preceq": preceq(small, big, m, th),
    }
    if verify:
        try:
            out["oracle_equivalent"] = mso_equiv(small, big, m)
        except BudgetExceeded:
            out["oracle_equivalent"] = None
    return out


def _window_json(w: Window) -> Tuple[Union[int, str], Union[int, str]]:
    lo = w.start if w.after.is_exact else f"{w.after}+1"
    hi = w.end if w.upto.is_exact else str(w.upto)
    return lo, hi


def els_down(t: Tree, lam: int, f: ScaleSpec, th: Thresholds, verify: bool = True) -> Tuple[Tree, ElsReport]:
    eta = scale_of(f, t.size)
    if lam > eta:
        raise ValueError(f"target scale {lam} is above the input scale {eta}")
    w = scale_window(f, lam)
    rep = ElsReport("down", t.size, t.size, eta, lam, lam, _window_json(w))
    cur = t
    while tower_cmp(cur.size, w.upto) > 0:
        nxt, log = _step_shrink(cur, lam, th)
        if tower_cmp(nxt.size, w.after) <= 0:
            raise WindowTooNarrow(
                f"removing {-log.delta} nodes jumps from {cur.size} past the window {w}")
        rep.steps.append(log)
        cur = nxt
    rep.output_size = cur.size
    rep.verdicts = _verdicts(cur, t, lam, th, verify)
    return cur, rep


def els_up(t: Tree, lam: int, f: ScaleSpec, th: Thresholds, verify: bool = True,
           max_size: int = 100_000) -> Tuple[Tree, ElsReport]:
    """``max_size`` refuses targets that cannot be materialized."""
    eta = scale_of(f, t.size)
    if lam < eta:
        raise ValueError(f"target scale {lam} is below the input scale {eta}")
    w = scale_window(f, lam)
    if tower_cmp(w.after, max_size) >= 0:
        raise ValueError(f"target window {w} starts above max_size={max_size}")
    rep = ElsReport("up", t.size, t.size, eta, lam, eta, _window_json(w))
    cur = t
    while tower_cmp(cur.size, w.after) <= 0:
        nxt, log = _grow(cur, eta, 1, th)
        if tower_cmp(nxt.size, w.upto) > 0:
            raise WindowTooNarrow(
                f"adding {log.delta} nodes jumps from {cur.size} past the window {w}")
        rep.steps.append(log)
        cur = nxt
    rep.output_size = cur.size
    rep.verdicts = _verdicts(t, cur, eta, th, verify)
    return cur, rep


# ---------------------------------------------------------------- graphs

def graph_shrink(tm: TreeModel, m: int, th: Thresholds) -> Tuple[Graph, TreeModel]:
    """Shrink the model tree at rank ``m + q0`` and return the induced subgraph it defines.

    Vertex ids of the result are those of the same vertices in
    ``materialize(tm)``.
    """
    report = validate(tm)
    if not report.ok:
        raise InvalidModel("; ".join(v.detail for v in report.violations))
    q0 = interpretation_rank(tm.r, tm.p, tm.d)
    small, prov = shrink_with_provenance(tm.tree, m + q0, th)
    sub = tm.with_tree(small)
    names = {path: vertex_id(prov[path]) for path in small.leaf_paths()}
    return materialize(sub, names), sub


# ---------------------------------------------------------------- search and chains

@dataclass
class SatResult:
    tree: Optional[Tree]
    complete: bool
    explored: int
    bound: str

    def to_json(self) -> dict:
        from .trees import tree_to_json
        return {"found": self.tree is not None,
                "tree": tree_to_json(self.tree) if self.tree is not None else None,
                "complete": self.complete, "explored": self.explored, "bound": self.bound}


def sat_search(phi: Formula, d: int, p: int, max_size: int) -> SatResult:
    """First tree of ``T_{d,p}`` (by size, then encoding) satisfying ``phi``.

    ``complete`` is true when ``max_size`` reaches the small-model bound for
    the rank of ``phi``, so a miss proves unsatisfiability over the class.
    """
    if max_label(phi) > p:
        raise ValueError(f"formula mentions P{max_label(phi)} but p={p}")
    bound = zeta(d, p, rank(phi), d)
    complete = tower_cmp(max_size, bound) >= 0
    explored = 0
    for t in enumerate_trees(d, p, max_size):
        explored += 1
        if model_check(t, phi):
            return SatResult(t, complete, explored, str(bound))
    return SatResult(None, complete, explored, str(bound))


@dataclass
class ChainReport:
    links: List[bool]
    to_last: List[bool]

    @property
    def ok(self) -> bool:
        return all(self.links) and all(self.to_last)

    @property
    def first_failure(self) -> Optional[int]:
        for i, ok in enumerate(self.links):
            if not ok:
                return i
        return None

    def to_json(self) -> dict:
        return {"ok": self.ok, "links": self.links, "to_last": self.to_last,
                "first_failure": self.first_failure}


def chain_check(trees: Sequence[Tree], ms: Sequence[int], th: Thresholds) -> ChainReport:
    if len(trees) != len(ms) + 1 or len(trees) < 2:
        raise ValueError("need len(trees) == len(ms) + 1 >= 2")
    if any(b < a for a, b in zip(ms, ms[1:])):
        raise ValueError("ranks must be nondecreasing")
    links = [preceq(trees[i], trees[i + 1], ms[i], th) for i in range(len(ms))]
    to_last = [preceq(trees[i], trees[-1], ms[i], th) for i in range(len(ms))]
    return ChainReport(links, to_last)
