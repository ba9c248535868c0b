"""Closed-form FO equivalence for monadic structures."""

from __future__ import annotations

from ..graphs import MonadicStructure

__all__ = ["monadic_fo_equiv", "counts_fo_equiv"]


def counts_fo_equiv(ca, cb, q: int) -> bool:
    """Per-class counts agree, or both reach ``q``."""
    keys = set(ca) | set(cb)
    return all(ca.get(k, 0) == cb.get(k, 0) or min(ca.get(k, 0), cb.get(k, 0)) >= q for k in keys)


def monadic_fo_equiv(A: MonadicStructure, B: MonadicStructure, q: int) -> bool:
    if tuple(A.sigma) != tuple(B.sigma):
        raise ValueError(f"sigma mismatch: {A.sigma} vs {B.sigma}")
    return counts_fo_equiv(A.counts(), B.counts(), q)
