"""Hintikka types: canonical m-round game types and the equivalences they decide.

A position is the sequence of moves played so far (elements for point moves,
bitmasks for set moves). Its rank-0 type is the atomic diagram of that
sequence; its rank-(r+1) type collects the rank-r types of all one-move
extensions. Two structures are MSO[m]- (resp. FO[m]-) equivalent iff their
rank-m types from the empty position coincide.

Ranks 1 and 2 are computed without enumerating subsets: at rank 1 the set
extensions add nothing beyond the diagram, and at rank 2 they are determined
by how many elements (0, 1 or at least 2) share each point fact.
"""

from __future__ import annotations

import hashlib
import os
import threading
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Hashable, Optional, Tuple

from .structure import Structure, as_structure

__all__ = [
    "Budget",
    "BudgetExceeded",
    "HintikkaType",
    "TypeArena",
    "mso_type",
    "fo_type",
    "mso_equiv",
    "fo_equiv",
    "default_budget",
]


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Budget:
    """Limits for the exact oracle.

    Set quantification at rank >= 3 enumerates all subsets, so it is refused
    above ``max_universe`` elements; ranks above ``max_rank`` are refused
    outright. FO type computation is refused when ``n ** m`` exceeds
    ``fo_work``.
    """

    max_universe: int = 12
    max_rank: int = 3
    fo_work: int = 5_000_000

    @classmethod
    def from_env(cls, var: str = "SHRUBKIT_BUDGET") -> "Budget":
        raw = os.environ.get(var, "").strip()
        if not raw:
            return cls()
        parts = [s.strip() for s in raw.split(",")]
        try:
            universe = int(parts[0])
            rank = int(parts[1]) if len(parts) > 1 and parts[1] else cls.max_rank
        except ValueError:
            raise ValueError(f"{var} must look like 'universe[,rank]', got {raw!r}") from None
        return cls(max_universe=universe, max_rank=rank)


def default_budget() -> Budget:
    return Budget.from_env()


@dataclass(frozen=True)
class HintikkaType:
    mode: str
    m: int
    digest: str

    def __str__(self):
        return f"{self.mode}{self.m}:{self.digest[:16]}"


def _canon(x) -> str:
    if isinstance(x, tuple):
        return "(" + ",".join(_canon(e) for e in x) + ")"
    if isinstance(x, frozenset):
        return "{" + ",".join(sorted(_canon(e) for e in x)) + "}"
    return repr(x)


class TypeArena:
    """Hash-consing table from structural type keys to stable digests.

    Safe to share between threads and between structures: keys are
    content-based, so sharing only saves work.
    """

    def __init__(self):
        self._table: Dict[Hashable, str] = {}
        self._lock = threading.Lock()

    def intern(self, key) -> str:
        with self._lock:
            hit = self._table.get(key)
        if hit is not None:
            return hit
        digest = hashlib.sha256(_canon(key).encode()).hexdigest()
        with self._lock:
            return self._table.setdefault(key, digest)

    def __len__(self):
        with self._lock:
            return len(self._table)


class _Engine:
    def __init__(self, S: Structure, mso: bool, arena: TypeArena):
        self.S = S
        self.mso = mso
        self.mode = "M" if mso else "F"
        self.arena = arena
        self.n = S.n
        self.root_flags = tuple(S.is_root(a) for a in range(S.n))

    def point_fact(self, pts, sets, a):
        S = self.S
        return ("p", S.labels[a], self.root_flags[a],
                tuple(a == b for b in pts),
                tuple(bool(S.adj[a] >> b & 1) for b in pts),
                tuple(bool(s >> a & 1) for s in sets))

    @staticmethod
    def set_fact(pts, mask):
        return ("s", tuple(bool(mask >> b & 1) for b in pts))

    def key(self, pts: tuple, sets: tuple, diag: tuple, r: int):
        mode, n = self.mode, self.n
        if r == 0:
            return (mode, 0, diag)
        if r == 1:
            return (mode, 1, diag, frozenset(self.point_fact(pts, sets, a) for a in range(n)))
        if self.mso and r == 2:
            facts = [self.point_fact(pts, sets, a) for a in range(n)]
            pt_ext = frozenset(self.key(pts + (a,), sets, diag + (facts[a],), 1) for a in range(n))
            cells = Counter(facts)
            set_ext = ("cells", frozenset((sig, min(c, 2)) for sig, c in cells.items()))
            return (mode, 2, diag, pt_ext, set_ext)
        intern = self.arena.intern
        pt_ext = frozenset(
            intern(self.key(pts + (a,), sets, diag + (self.point_fact(pts, sets, a),), r - 1))
            for a in range(n))
        if not self.mso:
            return (mode, r, diag, pt_ext)
        set_ext = frozenset(
            intern(self.key(pts, sets + (s,), diag + (self.set_fact(pts, s),), r - 1))
            for s in range(1 << n))
        return (mode, r, diag, pt_ext, set_ext)


def _check_budget(n: int, m: int, mso: bool, budget: Budget):
    if mso:
        if m > budget.max_rank:
            raise BudgetExceeded(f"MSO rank {m} exceeds the oracle limit {budget.max_rank}")
        if m >= 3 and n > budget.max_universe:
            raise BudgetExceeded(
                f"universe of {n} elements exceeds the oracle limit {budget.max_universe} at rank {m}")
    elif max(n, 1) ** max(m, 1) > budget.fo_work:
        raise BudgetExceeded(f"FO rank {m} on {n} elements exceeds the work limit {budget.fo_work}")


def _type(A, m: int, mso: bool, arena: Optional[TypeArena], budget: Optional[Budget]) -> HintikkaType:
    if m < 0:
        raise ValueError("rank must be nonnegative")
    S = as_structure(A)
    _check_budget(S.n, m, mso, budget or default_budget())
    eng = _Engine(S, mso, arena or TypeArena())
    return HintikkaType(eng.mode, m, eng.arena.intern(eng.key((), (), (), m)))


def mso_type(A, m: int, arena: Optional[TypeArena] = None,
             budget: Optional[Budget] = None) -> HintikkaType:
    return _type(A, m, True, arena, budget)


def fo_type(A, q: int, arena: Optional[TypeArena] = None,
            budget: Optional[Budget] = None) -> HintikkaType:
    return _type(A, q, False, arena, budget)


def _same_vocabulary(A: Structure, B: Structure):
    return A.vocabulary == B.vocabulary


def mso_equiv(A, B, m: int, budget: Optional[Budget] = None) -> bool:
    SA, SB = as_structure(A), as_structure(B)
    if not _same_vocabulary(SA, SB):
        raise ValueError("structures have different vocabularies")
    arena = TypeArena()
    return mso_type(SA, m, arena, budget) == mso_type(SB, m, arena, budget)


def fo_equiv(A, B, q: int, budget: Optional[Budget] = None) -> bool:
    SA, SB = as_structure(A), as_structure(B)
    if not _same_vocabulary(SA, SB):
        raise ValueError("structures have different vocabularies")
    arena = TypeArena()
    return fo_type(SA, q, arena, budget) == fo_type(SB, q, arena, budget)


def type_pair(A, m: int, arena: Optional[TypeArena] = None) -> Tuple[HintikkaType, HintikkaType]:
    """MSO and FO types at the same rank (convenience for reports)."""
    arena = arena or TypeArena()
    return mso_type(A, m, arena), fo_type(A, m, arena)
