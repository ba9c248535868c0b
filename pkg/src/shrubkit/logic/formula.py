"""MSO formula syntax: AST, s-expression I/O, rank, and syntactic transforms.

Point variables start with a lowercase letter, set variables with an
uppercase one. The vocabulary is inferred from the atoms: a formula that
mentions ``root`` is a tree formula, otherwise it fits both vocabularies.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Callable, FrozenSet, Iterable, Iterator, List, Set, Tuple, Union

__all__ = [
    "Formula", "Top", "Bottom", "Eq", "In", "Edge", "Root", "Label", "Not", "And", "Or",
    "Implies", "Exists1", "Forall1", "Exists2", "Forall2",
    "FormulaSyntaxError", "VocabularyError", "ArityMismatch",
    "parse", "to_sexpr", "rank", "free_vars", "max_label", "uses_root", "variables",
    "subst_point", "relativize", "affine_relabel", "shift_labels", "fresh_name",
    "is_point_var", "is_set_var", "conj", "disj", "exists_chain",
]


class FormulaSyntaxError(ValueError):
    pass


class VocabularyError(ValueError):
    pass


class ArityMismatch(ValueError):
    pass


def is_point_var(name: str) -> bool:
    return bool(name) and name[0].islower()


def is_set_var(name: str) -> bool:
    return bool(name) and name[0].isupper()


class Formula:
    __slots__ = ()

    def __str__(self):
        return to_sexpr(self)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Eq(Formula):
    x: str
    y: str


@dataclass(frozen=True)
class In(Formula):
    x: str
    X: str


@dataclass(frozen=True)
class Edge(Formula):
    x: str
    y: str


@dataclass(frozen=True)
class Root(Formula):
    x: str


@dataclass(frozen=True)
class Label(Formula):
    i: int
    x: str


@dataclass(frozen=True)
class Not(Formula):
    f: Formula


@dataclass(frozen=True)
class And(Formula):
    args: Tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    args: Tuple[Formula, ...]


@dataclass(frozen=True)
class Implies(Formula):
    a: Formula
    b: Formula


@dataclass(frozen=True)
class Exists1(Formula):
    v: str
    f: Formula


@dataclass(frozen=True)
class Forall1(Formula):
    v: str
    f: Formula


@dataclass(frozen=True)
class Exists2(Formula):
    v: str
    f: Formula


@dataclass(frozen=True)
class Forall2(Formula):
    v: str
    f: Formula


_QUANTS = {"exists1": Exists1, "forall1": Forall1, "exists2": Exists2, "forall2": Forall2}
_QNAME = {v: k for k, v in _QUANTS.items()}
_POINT_Q = (Exists1, Forall1)
_SET_Q = (Exists2, Forall2)
_Q = _POINT_Q + _SET_Q


def conj(*fs: Formula) -> Formula:
    return fs[0] if len(fs) == 1 else And(tuple(fs))


def disj(*fs: Formula) -> Formula:
    if not fs:
        return Bottom()
    return fs[0] if len(fs) == 1 else Or(tuple(fs))


def exists_chain(vs: Iterable[str], body: Formula) -> Formula:
    for v in reversed(list(vs)):
        body = Exists1(v, body)
    return body


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(\(|\)|[^\s()]+)")


def _tokens(text: str) -> List[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"cannot tokenize at offset {pos}")
        out.append(m.group(1))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


def parse(text: str) -> Formula:
    toks = _tokens(text)
    if not toks:
        raise FormulaSyntaxError("empty input")
    f, i = _parse(toks, 0)
    if i != len(toks):
        raise FormulaSyntaxError(f"trailing tokens: {' '.join(toks[i:])}")
    return f


def _point(name: str) -> str:
    if not is_point_var(name):
        raise FormulaSyntaxError(f"expected a point variable, got {name!r}")
    return name


def _setv(name: str) -> str:
    if not is_set_var(name):
        raise FormulaSyntaxError(f"expected a set variable, got {name!r}")
    return name


def _parse(toks: List[str], i: int) -> Tuple[Formula, int]:
    if toks[i] != "(":
        raise FormulaSyntaxError(f"expected '(' but got {toks[i]!r}")
    if i + 1 >= len(toks):
        raise FormulaSyntaxError("unexpected end of input")
    head = toks[i + 1]
    j = i + 2
    args: List[Union[str, Formula]] = []
    while True:
        if j >= len(toks):
            raise FormulaSyntaxError("unbalanced parentheses")
        if toks[j] == ")":
            j += 1
            break
        if toks[j] == "(":
            sub, j = _parse(toks, j)
            args.append(sub)
        else:
            args.append(toks[j])
            j += 1
    return _build(head, args), j


def _want(head, args, kinds):
    if len(args) != len(kinds):
        raise FormulaSyntaxError(f"({head} ...) takes {len(kinds)} arguments, got {len(args)}")
    for a, k in zip(args, kinds):
        if (k == "f") != isinstance(a, Formula):
            raise FormulaSyntaxError(f"bad argument {a!r} to {head}")


def _build(head: str, args) -> Formula:
    if head == "true":
        _want(head, args, "")
        return Top()
    if head == "false":
        _want(head, args, "")
        return Bottom()
    if head == "=":
        _want(head, args, "vv")
        return Eq(_point(args[0]), _point(args[1]))
    if head == "in":
        _want(head, args, "vv")
        return In(_point(args[0]), _setv(args[1]))
    if head == "E":
        _want(head, args, "vv")
        return Edge(_point(args[0]), _point(args[1]))
    if head == "root":
        _want(head, args, "v")
        return Root(_point(args[0]))
    if head == "P":
        _want(head, args, "vv")
        try:
            idx = int(args[0])
        except ValueError:
            raise FormulaSyntaxError(f"label index must be an integer, got {args[0]!r}") from None
        if idx < 1:
            raise FormulaSyntaxError(f"label index must be positive, got {idx}")
        return Label(idx, _point(args[1]))
    if head == "not":
        _want(head, args, "f")
        return Not(args[0])
    if head in ("and", "or"):
        for a in args:
            if not isinstance(a, Formula):
                raise FormulaSyntaxError(f"bad argument {a!r} to {head}")
        return (And if head == "and" else Or)(tuple(args))
    if head == "implies":
        _want(head, args, "ff")
        return Implies(args[0], args[1])
    if head in _QUANTS:
        _want(head, args, "vf")
        cls = _QUANTS[head]
        v = _point(args[0]) if cls in _POINT_Q else _setv(args[0])
        return cls(v, args[1])
    raise FormulaSyntaxError(f"unknown head {head!r}")


def to_sexpr(f: Formula) -> str:
    if isinstance(f, Top):
        return "(true)"
    if isinstance(f, Bottom):
        return "(false)"
    if isinstance(f, Eq):
        return f"(= {f.x} {f.y})"
    if isinstance(f, In):
        return f"(in {f.x} {f.X})"
    if isinstance(f, Edge):
        return f"(E {f.x} {f.y})"
    if isinstance(f, Root):
        return f"(root {f.x})"
    if isinstance(f, Label):
        return f"(P {f.i} {f.x})"
    if isinstance(f, Not):
        return f"(not {to_sexpr(f.f)})"
    if isinstance(f, (And, Or)):
        head = "and" if isinstance(f, And) else "or"
        return "(" + " ".join([head] + [to_sexpr(a) for a in f.args]) + ")"
    if isinstance(f, Implies):
        return f"(implies {to_sexpr(f.a)} {to_sexpr(f.b)})"
    if isinstance(f, _Q):
        return f"({_QNAME[type(f)]} {f.v} {to_sexpr(f.f)})"
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------- measures

def _children(f: Formula) -> Tuple[Formula, ...]:
    if isinstance(f, Not):
        return (f.f,)
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, Implies):
        return (f.a, f.b)
    if isinstance(f, _Q):
        return (f.f,)
    return ()


def _walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(_children(g))


def rank(f: Formula) -> int:
    """Maximum number of nested quantifiers, point and set alike."""
    inner = max((rank(c) for c in _children(f)), default=0)
    return inner + 1 if isinstance(f, _Q) else inner


def _atom_vars(f: Formula) -> Tuple[str, ...]:
    if isinstance(f, (Eq, Edge)):
        return (f.x, f.y)
    if isinstance(f, In):
        return (f.x, f.X)
    if isinstance(f, (Root, Label)):
        return (f.x,)
    return ()


def free_vars(f: Formula) -> FrozenSet[str]:
    if isinstance(f, _Q):
        return free_vars(f.f) - {f.v}
    own = set(_atom_vars(f))
    for c in _children(f):
        own |= free_vars(c)
    return frozenset(own)


def variables(f: Formula) -> Set[str]:
    out: Set[str] = set()
    for g in _walk(f):
        out.update(_atom_vars(g))
        if isinstance(g, _Q):
            out.add(g.v)
    return out


def max_label(f: Formula) -> int:
    return max((g.i for g in _walk(f) if isinstance(g, Label)), default=0)


def uses_root(f: Formula) -> bool:
    return any(isinstance(g, Root) for g in _walk(f))


def fresh_name(base: str, taken: Iterable[str]) -> str:
    taken = set(taken)
    if base not in taken:
        return base
    for k in itertools.count(1):
        cand = f"{base}{k}"
        if cand not in taken:
            return cand
    raise AssertionError


# ---------------------------------------------------------------- transforms

def _map(f: Formula, fn: Callable[[Formula], Formula]) -> Formula:
    """Rebuild ``f`` with ``fn`` applied to each direct subformula."""
    if isinstance(f, Not):
        return Not(fn(f.f))
    if isinstance(f, And):
        return And(tuple(fn(a) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(fn(a) for a in f.args))
    if isinstance(f, Implies):
        return Implies(fn(f.a), fn(f.b))
    if isinstance(f, _Q):
        return type(f)(f.v, fn(f.f))
    return f


def _rename_atom(f: Formula, old: str, new: str) -> Formula:
    r = lambda v: new if v == old else v  # noqa: E731
    if isinstance(f, Eq):
        return Eq(r(f.x), r(f.y))
    if isinstance(f, Edge):
        return Edge(r(f.x), r(f.y))
    if isinstance(f, In):
        return In(r(f.x), r(f.X))
    if isinstance(f, Root):
        return Root(r(f.x))
    if isinstance(f, Label):
        return Label(f.i, r(f.x))
    return f


def subst_point(f: Formula, old: str, new: str) -> Formula:
    """Replace free occurrences of point variable ``old`` by ``new``, avoiding capture."""
    if old == new:
        return f
    if isinstance(f, _Q):
        if f.v == old:
            return f
        if f.v == new and old in free_vars(f.f):
            v2 = fresh_name(f.v, variables(f) | {new, old})
            body = subst_point(f.f, f.v, v2) if is_point_var(f.v) else _rename_set(f.f, f.v, v2)
            return type(f)(v2, subst_point(body, old, new))
        return type(f)(f.v, subst_point(f.f, old, new))
    if _atom_vars(f):
        return _rename_atom(f, old, new)
    return _map(f, lambda g: subst_point(g, old, new))


def _rename_set(f: Formula, old: str, new: str) -> Formula:
    if isinstance(f, _Q) and f.v == old:
        return f
    if isinstance(f, In):
        return _rename_atom(f, old, new)
    return _map(f, lambda g: _rename_set(g, old, new))


def relativize(theta: Formula, gamma: Formula) -> Formula:
    """Relativize every quantifier of ``theta`` to the extension of ``gamma``.

    ``gamma`` has exactly one free variable, a point variable. Set quantifiers
    range over subsets of that extension, expressed by a guard
    ``forall u (u in X -> gamma(u))``.
    """
    fv = free_vars(gamma)
    if len(fv) != 1 or not is_point_var(next(iter(fv))):
        raise ArityMismatch(f"gamma must have exactly one free point variable, has {sorted(fv)}")
    (gv,) = fv
    taken = variables(theta) | variables(gamma)

    def g_at(v: str) -> Formula:
        return subst_point(gamma, gv, v)

    def rel(f: Formula) -> Formula:
        if isinstance(f, Exists1):
            return Exists1(f.v, And((g_at(f.v), rel(f.f))))
        if isinstance(f, Forall1):
            return Forall1(f.v, Implies(g_at(f.v), rel(f.f)))
        if isinstance(f, (Exists2, Forall2)):
            u = fresh_name("u", taken | {f.v})
            guard = Forall1(u, Implies(In(u, f.v), g_at(u)))
            if isinstance(f, Exists2):
                return Exists2(f.v, And((guard, rel(f.f))))
            return Forall2(f.v, Implies(guard, rel(f.f)))
        return _map(f, rel)

    return rel(theta)


def shift_labels(psi: Formula, offset: int) -> Formula:
    def go(f: Formula) -> Formula:
        if isinstance(f, Label):
            if f.i + offset < 1:
                raise VocabularyError(f"label P{f.i} shifted by {offset} is not positive")
            return Label(f.i + offset, f.x)
        return _map(f, go)

    return go(psi)


def affine_relabel(psi: Formula, p: int) -> Formula:
    """Rewrite ``P_i`` as ``P_{i+p}``; ``psi`` must be a graph formula over ``P_1..P_p``."""
    if p < 1:
        raise ValueError("p must be positive")
    if uses_root(psi):
        raise VocabularyError("affine relabeling applies to graph formulas; found root")
    top = max_label(psi)
    if top > p:
        raise VocabularyError(f"label index {top} overflows the alphabet [1, {p}]")
    return shift_labels(psi, p)
