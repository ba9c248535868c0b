"""Type indicators over child families, capped-count fingerprints, and monadic shrink/grow.

A fingerprint is the root label together with the multiset of child
fingerprints, where each multiplicity is only recorded up to a cap: two
counts at or above the cap are indistinguishable. Equal fingerprints
therefore mean equal root labels and FO-equivalent child-type indicators
at the cap, which is the comparison the composition theorem needs.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .bounds import rho, tower_cmp
from .graphs import MonadicStructure
from .logic.monadic import monadic_fo_equiv
from .logic.types import TypeArena, mso_type
from .trees import Forest, Tree, enumerate_trees

__all__ = [
    "CapPolicy", "Fingerprint", "fingerprint", "TypeIndicator", "type_indicator",
    "CapReport", "calibrate_cap", "monadic_shrink", "monadic_grow", "MonadicLemmaGap",
    "index_census", "oracle_classes", "ORACLE",
]

ORACLE = "oracle"


@dataclass(frozen=True)
class CapPolicy:
    """``practical``: a constant cap ``c`` (optionally per rank via ``table``).

    ``paper``: the cap for a family of trees of height at most ``k`` is
    ``rho_{k,p}(m)``, saturated at family size + 1 so it never has to be
    materialized.
    """

    mode: str = "practical"
    c: int = 2
    table: Tuple[Tuple[int, int], ...] = ()
    p: int = 1

    def __post_init__(self):
        if self.mode not in ("practical", "paper"):
            raise ValueError(f"unknown cap mode {self.mode!r}")
        if self.mode == "practical" and (self.c < 1 or any(v < 1 for _, v in self.table)):
            raise ValueError("caps must be at least 1")

    @classmethod
    def practical(cls, c: int, table: Optional[Mapping[int, int]] = None) -> "CapPolicy":
        return cls("practical", c, tuple(sorted((table or {}).items())))

    @classmethod
    def paper(cls, p: int) -> "CapPolicy":
        return cls("paper", 1, (), p)

    def cap(self, m: int, child_height: int, family_size: int) -> int:
        if self.mode == "practical":
            return dict(self.table).get(m, self.c)
        sat = family_size + 1
        q = rho(child_height, self.p, m)
        return sat if tower_cmp(q, sat) >= 0 else q.value

    def describe(self) -> str:
        if self.mode == "paper":
            return f"paper(p={self.p})"
        if self.table:
            return "practical(" + ",".join(f"m{m}:{c}" for m, c in self.table) + f",default:{self.c})"
        return f"practical({self.c})"


@dataclass(frozen=True)
class Fingerprint:
    text: str
    policy: str

    def __str__(self):
        return self.text


def _fp_text(t: Tree, m: int, cp: CapPolicy, memo: Dict[bytes, str]) -> str:
    hit = memo.get(t.key)
    if hit is not None:
        return hit
    if t.is_leaf:
        out = str(t.label)
    else:
        counts = Counter(_fp_text(c, m, cp, memo) for c in t.children)
        cap = cp.cap(m, max(c.height for c in t.children), len(t.children))
        parts = []
        for sub in sorted(counts):
            n = counts[sub]
            parts.append(f"{sub}x{cap}+" if n >= cap else f"{sub}x{n}")
        out = f"{t.label}(" + " ".join(parts) + ")"
    memo[t.key] = out
    return out


def fingerprint(t: Tree, m: int, cp: CapPolicy) -> Fingerprint:
    if m == 0:
        return Fingerprint("*", cp.describe())
    return Fingerprint(_fp_text(t, m, cp, {}), cp.describe())


# ---------------------------------------------------------------- indicators

@dataclass(frozen=True)
class TypeIndicator:
    classes: Tuple[Tuple[str, int], ...]
    members: Tuple[Tuple[str, Tuple[int, ...]], ...] = field(default=(), compare=False)

    @property
    def total(self) -> int:
        return sum(n for _, n in self.classes)

    def counts(self) -> Dict[str, int]:
        return dict(self.classes)

    def class_of(self) -> Dict[int, str]:
        return {i: cls for cls, idx in self.members for i in idx}

    def as_monadic(self) -> MonadicStructure:
        return MonadicStructure([c for c, _ in self.classes], self.class_of())

    def to_json(self) -> dict:
        return {"total": self.total, "classes": [{"class": c, "count": n} for c, n in self.classes]}


def _classify(trees: Sequence[Tree], m: int, classifier, arena: Optional[TypeArena] = None) -> List[str]:
    if classifier == ORACLE:
        arena = arena or TypeArena()
        return [mso_type(t, m, arena).digest for t in trees]
    if isinstance(classifier, CapPolicy):
        memo: Dict[bytes, str] = {}
        return ["*" if m == 0 else _fp_text(t, m, classifier, memo) for t in trees]
    raise TypeError("classifier must be 'oracle' or a CapPolicy")


def type_indicator(f: Union[Forest, Sequence[Tree]], m: int, classifier=ORACLE) -> TypeIndicator:
    trees = list(f.trees if isinstance(f, Forest) else f)
    labels = _classify(trees, m, classifier)
    groups: Dict[str, List[int]] = defaultdict(list)
    for i, c in enumerate(labels):
        groups[c].append(i)
    order = sorted(groups)
    return TypeIndicator(tuple((c, len(groups[c])) for c in order),
                         tuple((c, tuple(groups[c])) for c in order))


# ---------------------------------------------------------------- calibration

@dataclass
class CapReport:
    d: int
    p: int
    m: int
    max_size: int
    n_trees: int
    n_classes: int
    sound_cap: int
    exact_cap: Optional[int]
    unsound: Dict[int, Tuple[Tree, Tree]]
    incomplete: Dict[int, Tuple[Tree, Tree]]

    @property
    def cap(self) -> int:
        return self.exact_cap if self.exact_cap is not None else self.sound_cap

    def to_json(self) -> dict:
        from .trees import canonical_form
        pair = lambda ab: [canonical_form(ab[0]).decode(), canonical_form(ab[1]).decode()]  # noqa: E731
        return {
            "d": self.d, "p": self.p, "m": self.m, "max_size": self.max_size,
            "trees": self.n_trees, "classes": self.n_classes, "cap": self.cap,
            "sound_cap": self.sound_cap, "exact_cap": self.exact_cap,
            "unsound_witness": {str(c): pair(ab) for c, ab in sorted(self.unsound.items())},
            "incomplete_witness": {str(c): pair(ab) for c, ab in sorted(self.incomplete.items())},
        }


def _oracle_digest(args) -> str:
    t, m = args
    return mso_type(t, m).digest


def oracle_classes(trees: Sequence[Tree], m: int, jobs: int = 1) -> List[str]:
    if jobs > 1 and len(trees) > 64:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_oracle_digest, [(t, m) for t in trees], chunksize=32))
    arena = TypeArena()
    return [mso_type(t, m, arena).digest for t in trees]


def _split_witness(keys_a: Sequence[str], keys_b: Sequence[str], trees) -> Optional[Tuple[Tree, Tree]]:
    """Two trees with equal ``keys_a`` but different ``keys_b``."""
    first: Dict[str, int] = {}
    for i, k in enumerate(keys_a):
        j = first.setdefault(k, i)
        if keys_b[j] != keys_b[i]:
            return trees[j], trees[i]
    return None


def calibrate_cap(d: int, p: int, m: int, max_size: int, jobs: int = 1,
                  max_c: Optional[int] = None) -> CapReport:
    """Scan caps ``c = 1, 2, ...`` against the exact oracle on all trees up to ``max_size``.

    ``sound_cap`` is the least ``c`` for which equal fingerprints imply
    oracle equivalence; ``exact_cap`` the least for which they coincide
    (``None`` if no cap up to the scan limit achieves both).
    """
    trees = list(enumerate_trees(d, p, max_size))
    oracle = oracle_classes(trees, m, jobs)
    limit = max_c if max_c is not None else max(1, max_size)
    unsound: Dict[int, Tuple[Tree, Tree]] = {}
    incomplete: Dict[int, Tuple[Tree, Tree]] = {}
    sound_cap = exact_cap = None
    for c in range(1, limit + 1):
        fps = _classify(trees, m, CapPolicy.practical(c))
        bad = _split_witness(fps, oracle, trees)
        miss = _split_witness(oracle, fps, trees)
        if bad is not None:
            unsound[c] = bad
        elif sound_cap is None:
            sound_cap = c
        if miss is not None:
            incomplete[c] = miss
        if bad is None and miss is None:
            exact_cap = c
            break
        if bad is None and c >= max_size:
            break
    if sound_cap is None:
        raise RuntimeError(f"no sound cap up to {limit}; fingerprints cannot separate the corpus")
    return CapReport(d, p, m, max_size, len(trees), len(set(oracle)), sound_cap, exact_cap,
                     unsound, incomplete)


def index_census(d: int, p: int, m: int, max_size: int, jobs: int = 1) -> int:
    trees = list(enumerate_trees(d, p, max_size))
    return len(set(oracle_classes(trees, m, jobs)))


# ---------------------------------------------------------------- monadic shrink and grow

class MonadicLemmaGap(ValueError):
    """The target size exceeds (q-1)|sigma| but is below what capped counts need."""


def _sort_key(a):
    return (repr(type(a)), repr(a))


def monadic_shrink(A: MonadicStructure, lam: int, q: int, keep: Hashable) -> MonadicStructure:
    """A ``lam``-element substructure containing ``keep`` and FO[q]-equivalent to ``A``."""
    k = len(A.sigma)
    if not ((q - 1) * k < lam <= len(A)):
        raise ValueError(f"lambda={lam} outside the range ({(q - 1) * k}, {len(A)}]")
    table = dict(A.assignment)
    if keep not in table:
        raise KeyError(f"{keep!r} is not an element of the structure")
    counts = A.counts()
    base = sum(min(n, q) for n in counts.values())
    if lam < base:
        raise MonadicLemmaGap(
            f"lambda={lam} is below sum(min(count, q)) = {base}; no FO[{q}]-equivalent "
            f"substructure of that size exists")
    chosen: Dict[str, List] = {}
    pools: Dict[str, List] = {}
    for pred in A.sigma:
        elems = sorted(A.members(pred), key=_sort_key)
        if keep in elems:
            elems.remove(keep)
            elems.insert(0, keep)
        take = min(len(elems), q)
        chosen[pred], pools[pred] = elems[:take], elems[take:]
    room = lam - base
    order = sorted(A.sigma, key=lambda pr: (-counts[pr], A.sigma.index(pr)))
    for pred in order:
        extra = min(room, len(pools[pred]))
        chosen[pred] += pools[pred][:extra]
        room -= extra
    return A.substructure(e for pred in A.sigma for e in chosen[pred])


def monadic_grow(A: MonadicStructure, lam: int, q: int, cls: str) -> MonadicStructure:
    """Add ``lam - |A|`` fresh elements to class ``cls``, preserving FO[q]-equivalence."""
    if cls not in A.sigma:
        raise KeyError(f"unknown predicate {cls!r}")
    counts = A.counts()
    if counts[cls] < q:
        raise ValueError(f"class {cls!r} has {counts[cls]} < q={q} elements")
    if lam < len(A):
        raise ValueError(f"lambda={lam} is smaller than |A|={len(A)}")
    if len(A) <= (q - 1) * len(A.sigma):
        raise ValueError(f"|A|={len(A)} must exceed (q-1)*|sigma|={(q - 1) * len(A.sigma)}")
    table = dict(A.assignment)
    names = set(map(str, table))
    new = {}
    for i in itertools.count():
        if len(new) == lam - len(A):
            break
        name = f"{cls}#new{i}"
        if name not in names and name not in table:
            new[name] = cls
    table.update(new)
    return MonadicStructure(A.sigma, table)
