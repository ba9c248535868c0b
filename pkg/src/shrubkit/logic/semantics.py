"""Direct evaluation of formulas on finite structures."""

from __future__ import annotations

from typing import Callable, Dict, Mapping, Optional

from .formula import (
    And, Bottom, Edge, Eq, Exists1, Exists2, Forall1, Forall2, Formula, Implies, In, Label,
    Not, Or, Root, Top, VocabularyError, free_vars, is_set_var, max_label, uses_root,
)
from .structure import Structure, as_structure

__all__ = ["model_check", "UnboundVariable", "submasks"]

Env = Dict[str, int]
Fn = Callable[[Env], bool]


class UnboundVariable(ValueError):
    pass


def submasks(mask: int):
    s = mask
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & mask


def _subset_guard(f: Formula, X: str):
    """Match ``forall u (u in X -> g)`` with ``X`` not free in ``g``; return ``(u, g)``."""
    if (isinstance(f, Forall1) and isinstance(f.f, Implies) and isinstance(f.f.a, In)
            and f.f.a.x == f.v and f.f.a.X == X and X not in free_vars(f.f.b)):
        return f.v, f.f.b
    return None


def _compile(f: Formula, A: Structure) -> Fn:
    n = A.n
    if isinstance(f, Top):
        return lambda env: True
    if isinstance(f, Bottom):
        return lambda env: False
    if isinstance(f, Eq):
        x, y = f.x, f.y
        return lambda env: env[x] == env[y]
    if isinstance(f, In):
        x, X = f.x, f.X
        return lambda env: bool(env[X] >> env[x] & 1)
    if isinstance(f, Edge):
        x, y, adj = f.x, f.y, A.adj
        return lambda env: bool(adj[env[x]] >> env[y] & 1)
    if isinstance(f, Root):
        x, roots = f.x, A.roots or 0
        return lambda env: bool(roots >> env[x] & 1)
    if isinstance(f, Label):
        x, i, labels = f.x, f.i, A.labels
        return lambda env: labels[env[x]] == i
    if isinstance(f, Not):
        g = _compile(f.f, A)
        return lambda env: not g(env)
    if isinstance(f, And):
        gs = [_compile(a, A) for a in f.args]
        return lambda env: all(g(env) for g in gs)
    if isinstance(f, Or):
        gs = [_compile(a, A) for a in f.args]
        return lambda env: any(g(env) for g in gs)
    if isinstance(f, Implies):
        a, b = _compile(f.a, A), _compile(f.b, A)
        return lambda env: (not a(env)) or b(env)
    if isinstance(f, (Exists1, Forall1)):
        v, body, want = f.v, _compile(f.f, A), isinstance(f, Exists1)

        def point_q(env):
            old = env.get(v)
            try:
                for a in range(n):
                    env[v] = a
                    if body(env) == want:
                        return want
                return not want
            finally:
                _restore(env, v, old)

        return point_q
    if isinstance(f, (Exists2, Forall2)):
        return _compile_set_q(f, A)
    raise TypeError(f"not a formula: {f!r}")


def _restore(env: Env, v: str, old: Optional[int]):
    if old is None:
        env.pop(v, None)
    else:
        env[v] = old


def _compile_set_q(f, A: Structure) -> Fn:
    X, want, n = f.v, isinstance(f, Exists2), A.n
    guard = rest = None
    if want and isinstance(f.f, And) and f.f.args:
        guard = _subset_guard(f.f.args[0], X)
        rest = And(f.f.args[1:])
    elif not want and isinstance(f.f, Implies):
        guard = _subset_guard(f.f.a, X)
        rest = f.f.b
    if guard is not None:
        u, g_formula = guard
        g, body = _compile(g_formula, A), _compile(rest, A)

        def guarded(env):
            old_u, old_x = env.get(u), env.get(X)
            try:
                ext = 0
                for a in range(n):
                    env[u] = a
                    if g(env):
                        ext |= 1 << a
                _restore(env, u, old_u)
                for s in submasks(ext):
                    env[X] = s
                    if body(env) == want:
                        return want
                return not want
            finally:
                _restore(env, u, old_u)
                _restore(env, X, old_x)

        return guarded

    body = _compile(f.f, A)

    def set_q(env):
        old = env.get(X)
        try:
            for s in range(1 << n):
                env[X] = s
                if body(env) == want:
                    return want
            return not want
        finally:
            _restore(env, X, old)

    return set_q


def _env_value(A: Structure, var: str, value) -> int:
    lookup = {name: i for i, name in enumerate(A.names)}

    def element(e):
        if isinstance(e, str):
            if e not in lookup:
                raise KeyError(f"unknown element {e!r}")
            return lookup[e]
        if not 0 <= e < A.n:
            raise KeyError(f"element index {e} out of range")
        return e

    if is_set_var(var):
        if isinstance(value, int):
            return value
        return sum(1 << element(e) for e in set(value))
    return element(value)


def model_check(A, f: Formula, env: Optional[Mapping[str, object]] = None) -> bool:
    """Decide ``A |= f`` under ``env`` (point variables map to elements, set variables to sets)."""
    S = as_structure(A)
    if uses_root(f) and S.roots is None:
        raise VocabularyError("formula uses root but the structure has graph vocabulary")
    if max_label(f) > S.p:
        raise VocabularyError(f"formula mentions P{max_label(f)} but the structure has p={S.p}")
    env = dict(env or {})
    missing = free_vars(f) - env.keys()
    if missing:
        raise UnboundVariable(f"unbound variables: {sorted(missing)}")
    run_env = {k: _env_value(S, k, v) for k, v in env.items()}
    return _compile(f, S)(run_env)
