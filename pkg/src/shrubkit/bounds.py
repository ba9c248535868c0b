"""Tower-valued bound functions and scale windows, with exact comparisons.

A ``TowerNum`` is either an exact integer or ``2 ** e`` for a ``TowerNum``
exponent ``e``. The symbolic form is used only when the exact value would
exceed the digit budget, so a symbolic value always exceeds every exact
value of at most that many bits. Comparisons never approximate.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

__all__ = [
    "TowerNum", "tower", "tower_cmp", "cmp_linear", "log2_ceil", "g", "xi", "chi", "rho",
    "rho_without_c0", "zeta", "theta", "h_constant", "ScaleSpec", "theta_scale", "upsilon",
    "scale_of", "scale_window", "Window", "check_scale_inequality", "DEFAULT_DIGITS", "C0", "M0",
]

DEFAULT_DIGITS = 10 ** 6
C0 = 2
M0 = 1
_MIN_DIGITS = 20
_SMALL = 1 << 62  # coefficients and offsets used in comparisons stay below this

Num = Union["TowerNum", int]


def _bits_for(digits: Optional[int]) -> int:
    digits = DEFAULT_DIGITS if digits is None else digits
    if digits < _MIN_DIGITS:
        raise ValueError(f"digit budget must be at least {_MIN_DIGITS}")
    return int(digits * math.log2(10))


class TowerNum:
    __slots__ = ("_value", "_exp")

    def __init__(self, value: Optional[int] = None, exp: Optional["TowerNum"] = None):
        if (value is None) == (exp is None):
            raise ValueError("give exactly one of value or exp")
        if value is not None and value < 0:
            raise ValueError("TowerNum values are nonnegative")
        self._value = value
        self._exp = exp

    @classmethod
    def of(cls, x: Num) -> "TowerNum":
        return x if isinstance(x, TowerNum) else cls(value=int(x))

    @classmethod
    def pow2(cls, e: Num, digits: Optional[int] = None) -> "TowerNum":
        e = cls.of(e)
        if e.is_exact and e.value <= _bits_for(digits):
            return cls(value=1 << e.value)
        return cls(exp=e)

    @property
    def is_exact(self) -> bool:
        return self._value is not None

    @property
    def value(self) -> int:
        if self._value is None:
            raise OverflowError("value exceeds the digit budget; it is held symbolically")
        return self._value

    @property
    def exponent(self) -> "TowerNum":
        if self._exp is None:
            raise ValueError("exact TowerNum has no symbolic exponent")
        return self._exp

    def evaluate(self, max_bits: int) -> Optional[int]:
        """Exact integer when it fits in ``max_bits`` bits, else None."""
        if self.is_exact:
            return self._value if self._value.bit_length() <= max_bits else None
        e = self._exp.evaluate(64)
        if e is None or e + 1 > max_bits:
            return None
        return 1 << e

    def to_tower(self) -> Tuple[int, int]:
        """``(h, a)`` with ``self == tower(h, a)``, unwrapping exact powers of two above 2**64."""
        h, cur = 0, self
        while not cur.is_exact:
            h += 1
            cur = cur._exp
        a = cur._value
        while a > (1 << 64) and a & (a - 1) == 0:
            a = a.bit_length() - 1
            h += 1
        return h, a

    def __str__(self):
        h, a = self.to_tower()
        return str(a) if h == 0 else f"tower({h}, {a})"

    def __repr__(self):
        return f"TowerNum({self})"

    def _cmp(self, other) -> int:
        return tower_cmp(self, TowerNum.of(other))

    def __eq__(self, other):
        if not isinstance(other, (TowerNum, int)):
            return NotImplemented
        return self._cmp(other) == 0

    def __hash__(self):
        return hash(self.to_tower())

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0


def tower(h: int, n: Num, digits: Optional[int] = None) -> TowerNum:
    if h < 0:
        raise ValueError("tower height must be nonnegative")
    x = TowerNum.of(n)
    for _ in range(h):
        x = TowerNum.pow2(x, digits)
    return x


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def tower_cmp(a: Num, b: Num) -> int:
    """-1, 0 or 1 as ``a`` is less than, equal to, or greater than ``b``."""
    a, b = TowerNum.of(a), TowerNum.of(b)
    if a.is_exact and b.is_exact:
        return _sign(a.value - b.value)
    if not a.is_exact and not b.is_exact:
        return tower_cmp(a.exponent, b.exponent)
    if a.is_exact:
        return -tower_cmp(b, a)
    # a = 2**x symbolic, b exact
    B = b.value
    if B == 0:
        return 1
    k = B.bit_length() - 1  # 2**k <= B < 2**(k+1)
    c = tower_cmp(a.exponent, k)
    if c > 0:
        return 1
    if c < 0:
        return -1
    return 0 if B == 1 << k else -1


def _cmp_offset(x: TowerNum, c: int, y: TowerNum) -> int:
    """Compare ``x + c`` with ``y`` for a small integer ``c``."""
    if abs(c) >= _SMALL:
        raise ValueError("offset too large for exact comparison")
    if x.is_exact and y.is_exact:
        return _sign(x.value + c - y.value)
    if x.is_exact:  # y symbolic, far above any exact value +- small
        v = y.evaluate(max(x.value.bit_length(), 63) + 2)
        return _sign(x.value + c - v) if v is not None else -1
    if y.is_exact:
        v = x.evaluate(max(y.value.bit_length(), 63) + 2)
        return _sign(v + c - y.value) if v is not None else 1
    base = tower_cmp(x, y)
    return _sign(c) if base == 0 else base  # distinct symbolic powers differ by far more than |c|


def cmp_linear(a: Num, terms: Iterable[Tuple[int, Num]]) -> int:
    """Compare ``a`` with ``sum(c * b for c, b in terms)`` (positive small coefficients)."""
    a = TowerNum.of(a)
    exact_part = 0
    sym: List[Tuple[int, TowerNum]] = []
    for c, b in terms:
        if c < 0 or c >= _SMALL:
            raise ValueError("coefficients must be small and nonnegative")
        b = TowerNum.of(b)
        if c == 0:
            continue
        if b.is_exact:
            exact_part += c * b.value
        else:
            sym.append((c, b.exponent))
    if not sym:
        return tower_cmp(a, exact_part)
    # group equal exponents, find the largest
    groups: List[List] = []
    for c, e in sym:
        for grp in groups:
            if tower_cmp(grp[1], e) == 0:
                grp[0] += c
                break
        else:
            groups.append([c, e])
    top = groups[0]
    for grp in groups[1:]:
        if tower_cmp(grp[1], top[1]) > 0:
            top = grp
    C, Y = top
    rest = [grp for grp in groups if grp is not top]
    has_rest = bool(rest) or exact_part > 0
    # every lower term must sit far below 2**Y so the remainder lies in (0, 2**Y)
    slack = (len(rest) + 2).bit_length() + 63
    for c2, e2 in rest:
        if _cmp_offset(e2, slack, Y) >= 0:
            raise ValueError("terms too close in magnitude for exact comparison")
    if exact_part and tower_cmp(TowerNum.pow2(Y), exact_part << slack) <= 0:
        raise ValueError("terms too close in magnitude for exact comparison")
    if a.is_exact:
        if tower_cmp(TowerNum(exp=Y), a) > 0:
            return -1
        raise ValueError("exact left side too large for exact comparison")
    x = a.exponent
    if tower_cmp(x, Y) < 0:
        return -1
    if _cmp_offset(Y, 64, x) <= 0:
        return 1
    delta = next(k for k in range(64) if _cmp_offset(Y, k, x) == 0)
    if not has_rest:
        return _sign((1 << delta) - C)
    return 1 if (1 << delta) > C else -1


# ---------------------------------------------------------------- bound functions

def log2_ceil(p: int) -> int:
    if p < 1:
        raise ValueError("p must be positive")
    return (p - 1).bit_length()


def g(d: int, c0: int = C0) -> int:
    if d < 0:
        raise ValueError("d must be nonnegative")
    return (14 * c0) ** d


def xi(d: int, p: int, m: int, digits: Optional[int] = None) -> TowerNum:
    """Also evaluated at d = 0 by the same formula (used by the scale inequality)."""
    if d < 0:
        raise ValueError("d must be nonnegative")
    return tower(d + 1, g(d + 1) * (d + 1) * (m + 1) * (m + log2_ceil(p)), digits)


def chi(d: int, p: int, m: int, digits: Optional[int] = None) -> TowerNum:
    if d < 1:
        raise ValueError("chi is defined for d >= 1")
    return tower(d + 1, g(d + 1) * (m + 1) * (m + log2_ceil(p)), digits)


def rho(d: int, p: int, m: int, digits: Optional[int] = None, c0: int = C0) -> TowerNum:
    return tower(d + 1, 4 * c0 * g(d, c0) * (m + 1) * (m + log2_ceil(p)), digits)


def rho_without_c0(d: int, p: int, m: int, digits: Optional[int] = None) -> TowerNum:
    return tower(d + 1, 4 * g(d) * (m + 1) * (m + log2_ceil(p)), digits)


def zeta(d: int, p: int, n1: int, n2: int, digits: Optional[int] = None) -> TowerNum:
    return tower(n2, g(d) * (n1 + 1) * (n1 + log2_ceil(p)), digits)


def theta(d: int, p: int, lam: int, digits: Optional[int] = None) -> TowerNum:
    return xi(d, p, lam, digits)


def h_constant(d: int, q0: int, c0: int = C0) -> int:
    """``c1**2 * g(d) * d**2`` with ``c1 = ceil(q0 / d)``; reporting only."""
    if d < 1:
        raise ValueError("h is defined for d >= 1")
    c1 = -(-q0 // d)
    return c1 * c1 * g(d, c0) * d * d


def check_scale_inequality(d: int, p: int, lam: int, digits: Optional[int] = None) -> bool:
    """``theta(lam) >= theta(lam - 1) + xi_{d-1}(lam - 1)``."""
    if lam < 2:
        raise ValueError("the scale inequality needs lam >= 2")
    if d < 1:
        raise ValueError("the scale inequality needs d >= 1")
    lhs = theta(d, p, lam, digits)
    rhs = [(1, theta(d, p, lam - 1, digits)), (1, xi(d - 1, p, lam - 1, digits))]
    return cmp_linear(lhs, rhs) >= 0


# ---------------------------------------------------------------- scales

@dataclass
class ScaleSpec:
    """Strictly increasing boundaries ``f(1) < f(2) < ...``.

    ``kind`` is ``"explicit"`` (finite list), ``"theta"`` (tower-valued boundaries
    ``theta_{d,p}``) or ``"upsilon"``.
    """

    kind: str
    values: Tuple[int, ...] = ()
    d: int = 0
    p: int = 1
    r: int = 1
    q0: int = 0
    digits: Optional[int] = None
    _cache: Dict[int, TowerNum] = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self):
        if self.kind == "explicit":
            vals = tuple(int(v) for v in self.values)
            if not vals:
                raise ValueError("explicit scale needs at least one boundary")
            if vals[0] < 1 or any(b <= a for a, b in zip(vals, vals[1:])):
                raise ValueError("scale boundaries must be positive and strictly increasing")
            self.values = vals
        elif self.kind not in ("theta", "upsilon"):
            raise ValueError(f"unknown scale kind {self.kind!r}")

    @classmethod
    def explicit(cls, values: Sequence[int]) -> "ScaleSpec":
        return cls("explicit", tuple(values))

    @property
    def length(self) -> Optional[int]:
        return len(self.values) if self.kind == "explicit" else None

    def boundary(self, lam: int) -> TowerNum:
        """``f(lam)`` for ``lam >= 1``."""
        if lam < 1:
            raise ValueError("boundaries are indexed from 1")
        if self.kind == "explicit":
            if lam > len(self.values):
                raise IndexError(f"explicit scale has only {len(self.values)} boundaries")
            return TowerNum.of(self.values[lam - 1])
        if self.kind == "theta":
            return theta(self.d, self.p, lam, self.digits)
        with self._lock:
            return self._upsilon(lam)

    def _upsilon(self, i: int) -> TowerNum:
        if i in self._cache:
            return self._cache[i]
        th = lambda j: theta(self.d, self.p, j, self.digits)  # noqa: E731
        if i == 1:
            val = th(self.q0 + 1)
        else:
            prev = self._upsilon(i - 1)
            j = 1
            while cmp_linear(th(j), [(self.d + 1, prev)]) < 0:
                j += 1
            val = th(j + 1)
        self._cache[i] = val
        return val


def theta_scale(d: int, p: int, digits: Optional[int] = None) -> ScaleSpec:
    return ScaleSpec("theta", d=d, p=p, digits=digits)


def upsilon(r: int, p: int, d: int, q0: Optional[int] = None, digits: Optional[int] = None) -> ScaleSpec:
    if q0 is None:
        from .treemodel import interpretation_rank
        q0 = interpretation_rank(r, p, d)
    return ScaleSpec("upsilon", d=d, p=p, r=r, q0=q0, digits=digits)


@dataclass(frozen=True)
class Window:
    """Sizes ``n`` with ``after < n <= upto``."""

    after: TowerNum
    upto: TowerNum

    @property
    def start(self) -> int:
        return self.after.value + 1

    @property
    def end(self) -> int:
        return self.upto.value

    def __contains__(self, n: int) -> bool:
        return tower_cmp(n, self.after) > 0 and tower_cmp(n, self.upto) <= 0

    def __iter__(self):
        yield self.start
        yield self.end

    def __str__(self):
        lo = str(self.start) if self.after.is_exact else f"{self.after}+1"
        return f"[{lo}, {self.upto}]"


def scale_window(f: ScaleSpec, lam: int) -> Window:
    if lam < 0:
        raise ValueError("scale index must be nonnegative")
    hi = f.boundary(lam + 1)
    lo = TowerNum.of(0) if lam == 0 else f.boundary(lam)
    return Window(lo, hi)


def scale_of(f: ScaleSpec, n: int) -> int:
    """The unique ``lam`` with ``n`` in window ``lam``."""
    if n < 1:
        raise ValueError("sizes are positive")
    lam = 0
    while True:
        if f.length is not None and lam + 1 > f.length:
            raise ValueError(f"size {n} lies beyond the last boundary {f.values[-1]}")
        if tower_cmp(n, f.boundary(lam + 1)) <= 0:
            return lam
        lam += 1
