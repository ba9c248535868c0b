"""Brute-force Ehrenfeucht-Fraisse games.

Independent of the type engine: it plays the game literally and is meant
for tiny structures, where it cross-checks ``mso_equiv`` and ``fo_equiv``.
"""

from __future__ import annotations

from functools import lru_cache

from .structure import Structure, as_structure

__all__ = ["ef_game"]


def _partial_iso(A: Structure, B: Structure, ma, mb) -> bool:
    pa = [(i, x) for i, (kind, x) in enumerate(ma) if kind == "p"]
    pb = [(i, x) for i, (kind, x) in enumerate(mb) if kind == "p"]
    for (_, a), (_, b) in zip(pa, pb):
        if A.labels[a] != B.labels[b] or A.is_root(a) != B.is_root(b):
            return False
    for (_, a1), (_, b1) in zip(pa, pb):
        for (_, a2), (_, b2) in zip(pa, pb):
            if (a1 == a2) != (b1 == b2):
                return False
            if bool(A.adj[a1] >> a2 & 1) != bool(B.adj[b1] >> b2 & 1):
                return False
    sets = [i for i, (kind, _) in enumerate(ma) if kind == "s"]
    for i in sets:
        for (_, a), (_, b) in zip(pa, pb):
            if bool(ma[i][1] >> a & 1) != bool(mb[i][1] >> b & 1):
                return False
    return True


def ef_game(A, B, rounds: int, mso: bool = True) -> bool:
    """True iff Duplicator wins the ``rounds``-round game (MSO or FO variant)."""
    SA, SB = as_structure(A), as_structure(B)

    def moves(S: Structure):
        out = [("p", a) for a in range(S.n)]
        if mso:
            out += [("s", s) for s in range(1 << S.n)]
        return out

    move_a, move_b = moves(SA), moves(SB)

    @lru_cache(maxsize=None)
    def dup_wins(ma, mb, r):
        if not _partial_iso(SA, SB, ma, mb):
            return False
        if r == 0:
            return True
        for x in move_a:
            if not any(y[0] == x[0] and dup_wins(ma + (x,), mb + (y,), r - 1) for y in move_b):
                return False
        for y in move_b:
            if not any(x[0] == y[0] and dup_wins(ma + (x,), mb + (y,), r - 1) for x in move_a):
                return False
        return True

    return dup_wins((), (), rounds)
