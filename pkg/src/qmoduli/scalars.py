"""Exact scalars: Laurent polynomials and rational functions in q over Q,
plus truncated hbar-series under q = exp(hbar/2).

All values are immutable.  Polynomials are stored densely as a tuple of
Fractions starting at the lowest exponent, trimmed on both ends, which makes
the representation canonical.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

Number = Union[int, Fraction]

_ZERO = Fraction(0)
_ONE = Fraction(1)


class PoleError(ZeroDivisionError):
    """Raised when an expansion at q = 1 meets a vanishing denominator."""


class ParseError(ValueError):
    pass


def _trim(low: int, c: list) -> tuple[int, tuple]:
    a, b = 0, len(c)
    while a < b and c[a] == 0:
        a += 1
    while b > a and c[b - 1] == 0:
        b -= 1
    if a == b:
        return 0, ()
    return low + a, tuple(c[a:b])


class LaurentPoly:
    """Sum of c_k q^k with rational c_k and finitely many nonzero terms."""

    __slots__ = ("_low", "_c", "_hash")

    def __init__(self, coeffs: Mapping[int, Number] | None = None):
        if not coeffs:
            self._low, self._c = 0, ()
        else:
            lo, hi = min(coeffs), max(coeffs)
            c = [_ZERO] * (hi - lo + 1)
            for e, v in coeffs.items():
                c[e - lo] += Fraction(v)
            self._low, self._c = _trim(lo, c)
        self._hash = None

    @classmethod
    def _raw(cls, low: int, c) -> "LaurentPoly":
        obj = cls.__new__(cls)
        obj._low, obj._c = _trim(low, list(c))
        obj._hash = None
        return obj

    @classmethod
    def const(cls, v: Number) -> "LaurentPoly":
        return cls._raw(0, [Fraction(v)])

    @classmethod
    def monomial(cls, e: int, v: Number = 1) -> "LaurentPoly":
        return cls._raw(e, [Fraction(v)])

    # -- inspection
    @property
    def coeffs(self) -> dict[int, Fraction]:
        return {self._low + k: v for k, v in enumerate(self._c) if v}

    @property
    def low(self) -> int:
        return self._low

    @property
    def high(self) -> int:
        return self._low + len(self._c) - 1

    def is_zero(self) -> bool:
        return not self._c

    def is_const(self) -> bool:
        return not self._c or (len(self._c) == 1 and self._low == 0)

    def is_monomial(self) -> bool:
        return len(self._c) == 1

    def lead(self) -> Fraction:
        return self._c[-1]

    def __call__(self, x: Number) -> Fraction:
        x = Fraction(x)
        acc = _ZERO
        for v in reversed(self._c):
            acc = acc * x + v
        if self._low:
            acc *= x ** self._low
        return acc

    # -- ring operations
    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            if isinstance(other, (int, Fraction)):
                other = LaurentPoly.const(other)
            else:
                return NotImplemented
        if not other._c:
            return self
        if not self._c:
            return other
        lo = min(self._low, other._low)
        hi = max(self.high, other.high)
        c = [_ZERO] * (hi - lo + 1)
        o = self._low - lo
        for k, v in enumerate(self._c):
            c[o + k] = v
        o = other._low - lo
        for k, v in enumerate(other._c):
            c[o + k] += v
        return LaurentPoly._raw(lo, c)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw(self._low, [-v for v in self._c])

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return LaurentPoly()
            return LaurentPoly._raw(self._low, [v * other for v in self._c])
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        a, b = self._c, other._c
        if not a or not b:
            return LaurentPoly()
        if len(b) == 1:
            m = b[0]
            return LaurentPoly._raw(self._low + other._low, [v * m for v in a])
        if len(a) == 1:
            m = a[0]
            return LaurentPoly._raw(self._low + other._low, [m * v for v in b])
        c = [_ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    c[i + j] += x * y
        return LaurentPoly._raw(self._low + other._low, c)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            if not self.is_monomial():
                raise ValueError("negative power of a non-monomial Laurent polynomial")
            return LaurentPoly._raw(self._low * e, [self._c[0] ** e])
        out = LaurentPoly.const(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by q^k."""
        if not self._c:
            return self
        return LaurentPoly._raw(self._low + k, self._c)

    def scale(self, v: Number) -> "LaurentPoly":
        return self * Fraction(v)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.const(other)
        if isinstance(other, RatFunc):
            return other == self
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._low == other._low and self._c == other._c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._low, self._c))
        return self._hash

    def __bool__(self):
        return bool(self._c)

    def __repr__(self):
        return f"LaurentPoly({self})"

    def __str__(self):
        return format_laurent(self)


# -- polynomial helpers on ordinary polynomials (low exponent 0), dense tuples

def _pmonic(c: tuple) -> tuple:
    lc = c[-1]
    if lc == 1:
        return c
    return tuple(v / lc for v in c)


def _pmod(a: tuple, b: tuple) -> tuple:
    """Remainder of a by b (b monic not required)."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    while len(r) - 1 >= db and r:
        f = r[-1] / lb
        if f:
            off = len(r) - 1 - db
            for k in range(db + 1):
                r[off + k] -= f * b[k]
        r.pop()
        while r and r[-1] == 0:
            r.pop()
    return tuple(r)


def _pdivexact(a: tuple, b: tuple) -> tuple:
    """Quotient a / b, assuming exact divisibility."""
    if len(b) == 1:
        f = b[0]
        return tuple(v / f for v in a) if f != 1 else a
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    qd = len(r) - 1 - db
    if qd < 0:
        raise ArithmeticError("inexact polynomial division")
    quo = [_ZERO] * (qd + 1)
    for off in range(qd, -1, -1):
        f = r[off + db] / lb
        quo[off] = f
        if f:
            for k in range(db + 1):
                r[off + k] -= f * b[k]
    if any(r[:db]):
        raise ArithmeticError("inexact polynomial division")
    return tuple(quo)


def _pgcd(a: tuple, b: tuple) -> tuple:
    """Monic gcd of two polynomials given as dense tuples (low exponent 0)."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return _pmonic(a) if a else ()
    if len(b) == 1:
        return (_ONE,)
    while b:
        a, b = b, _pmod(a, b)
        if len(b) == 1:
            return (_ONE,)
    return _pmonic(a)


class RatFunc:
    """num/den with den a monic ordinary polynomial with nonzero constant
    term and gcd(num, den) = 1 in Q[q, q^-1]."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: LaurentPoly | Number = 0, den: LaurentPoly | Number = 1):
        if not isinstance(num, LaurentPoly):
            num = LaurentPoly.const(num)
        if not isinstance(den, LaurentPoly):
            den = LaurentPoly.const(den)
        if den.is_zero():
            raise ZeroDivisionError("RatFunc with zero denominator")
        self.num, self.den = _reduce(num, den)
        self._hash = None

    @classmethod
    def _make(cls, num: LaurentPoly, den: LaurentPoly) -> "RatFunc":
        obj = cls.__new__(cls)
        obj.num, obj.den = num, den
        obj._hash = None
        return obj

    @classmethod
    def q(cls, e: int = 1) -> "RatFunc":
        return cls._make(LaurentPoly.monomial(e), _LP_ONE)

    @classmethod
    def from_laurent(cls, p: LaurentPoly) -> "RatFunc":
        return cls._make(p, _LP_ONE)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_laurent(self) -> bool:
        return self.den is _LP_ONE or self.den == _LP_ONE

    def __bool__(self):
        return not self.num.is_zero()

    def __call__(self, x: Number) -> Fraction:
        d = self.den(x)
        if d == 0:
            raise ZeroDivisionError(f"denominator {self.den} vanishes at q = {x}")
        return self.num(x) / d

    def __add__(self, other):
        if not isinstance(other, RatFunc):
            other = _coerce(other)
            if other is None:
                return NotImplemented
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            if self.den.is_const():
                return RatFunc._make(self.num + other.num, self.den)
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._make(-self.num, self.den)

    def __sub__(self, other):
        if not isinstance(other, RatFunc):
            other = _coerce(other)
            if other is None:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, RatFunc):
            other = _coerce(other)
            if other is None:
                return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return _RF_ZERO
        sd, od = self.den.is_const(), other.den.is_const()
        if sd and od:
            return RatFunc._make(self.num * other.num, _LP_ONE)
        # cross-cancel before multiplying
        n1, d1 = _cancel(self.num, other.den)
        n2, d2 = _cancel(other.num, self.den)
        return RatFunc._make(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def inv(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("division by zero in Q(q)")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        if not isinstance(other, RatFunc):
            other = _coerce(other)
            if other is None:
                return NotImplemented
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero in Q(q)")
        if other.num.is_monomial() and other.den.is_const():
            m = other.num
            return RatFunc._make(self.num.shift(-m.low) * (1 / m.lead()), self.den)
        return self * other.inv()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        return RatFunc._make(self.num ** e, self.den ** e)

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            other = _coerce(other)
            if other is None:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        return format_ratfunc(self)


def _coerce(x) -> RatFunc | None:
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, LaurentPoly):
        return RatFunc(x)
    if isinstance(x, (int, Fraction)):
        return RatFunc._make(LaurentPoly.const(x), _LP_ONE)
    return None


def _cancel(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    """Remove common factors of num (Laurent) and den (monic polynomial)."""
    if den.is_const() or num.is_monomial():
        return num, den
    g = _pgcd(num._c, den._c)
    if len(g) == 1:
        return num, den
    return (LaurentPoly._raw(num._low, _pdivexact(num._c, g)),
            LaurentPoly._raw(0, _pdivexact(den._c, g)))


def _reduce(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    if num.is_zero():
        return num, _LP_ONE
    # move the monomial part of den into num
    if den._low:
        num = num.shift(-den._low)
        den = den.shift(-den._low)
    lc = den.lead()
    if lc != 1:
        num = num * (1 / lc)
        den = den * (1 / lc)
    if den.is_const():
        return num, _LP_ONE
    return _cancel(num, den)


_LP_ONE = LaurentPoly.const(1)
_RF_ZERO = RatFunc._make(LaurentPoly(), _LP_ONE)
ZERO = _RF_ZERO
ONE = RatFunc._make(_LP_ONE, _LP_ONE)
Q = RatFunc.q(1)
QINV = RatFunc.q(-1)


def ratfunc_arith(a: RatFunc, b: RatFunc, op: str) -> RatFunc:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "sub":
        return a - b
    raise ValueError(f"unknown op {op!r}")


# -- text form

def _fmt_coeff(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def format_laurent(p: LaurentPoly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for e in sorted(p.coeffs, reverse=True):
        v = p.coeffs[e]
        neg = v < 0
        a = -v if neg else v
        if e == 0:
            body = _fmt_coeff(a)
        else:
            mono = "q" if e == 1 else f"q^{e}"
            body = mono if a == 1 else f"{_fmt_coeff(a)}*{mono}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)


def format_ratfunc(f: RatFunc) -> str:
    if f.den.is_const():
        return format_laurent(f.num)
    return f"({format_laurent(f.num)})/({format_laurent(f.den)})"


_TERM = re.compile(
    r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*(\*)?\s*)?(q(?:\s*\^\s*(-?\d+))?)?\s*")


def parse_laurent(text: str) -> LaurentPoly:
    s = text.strip()
    if not s:
        raise ParseError("empty polynomial")
    coeffs: dict[int, Fraction] = {}
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse {text!r} at offset {pos}")
        sign, num, star, mono, exp = m.groups()
        if num is None and mono is None:
            raise ParseError(f"cannot parse {text!r} at offset {pos}")
        if sign is None and not first:
            raise ParseError(f"missing operator in {text!r} at offset {pos}")
        if star and mono is None:
            raise ParseError(f"dangling '*' in {text!r}")
        c = Fraction(num) if num is not None else _ONE
        if sign == "-":
            c = -c
        e = 0 if mono is None else (int(exp) if exp is not None else 1)
        coeffs[e] = coeffs.get(e, _ZERO) + c
        pos = m.end()
        first = False
    return LaurentPoly(coeffs)


def parse_ratfunc(text: str) -> RatFunc:
    s = text.strip()
    m = re.fullmatch(r"\((.*)\)\s*/\s*\((.*)\)", s)
    if m:
        return RatFunc(parse_laurent(m.group(1)), parse_laurent(m.group(2)))
    return RatFunc(parse_laurent(s))


# -- hbar series

class HSeries:
    """c0 + c1*hbar + c2*hbar^2, arithmetic modulo hbar^3."""

    __slots__ = ("c0", "c1", "c2")

    def __init__(self, c0: Number = 0, c1: Number = 0, c2: Number = 0):
        self.c0, self.c1, self.c2 = Fraction(c0), Fraction(c1), Fraction(c2)

    def coeffs(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.c0, self.c1, self.c2)

    def __add__(self, o):
        o = _hs(o)
        return HSeries(self.c0 + o.c0, self.c1 + o.c1, self.c2 + o.c2)

    __radd__ = __add__

    def __neg__(self):
        return HSeries(-self.c0, -self.c1, -self.c2)

    def __sub__(self, o):
        return self + (-_hs(o))

    def __rsub__(self, o):
        return _hs(o) - self

    def __mul__(self, o):
        o = _hs(o)
        return HSeries(self.c0 * o.c0,
                       self.c0 * o.c1 + self.c1 * o.c0,
                       self.c0 * o.c2 + self.c1 * o.c1 + self.c2 * o.c0)

    __rmul__ = __mul__

    def inv(self) -> "HSeries":
        if self.c0 == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        a0 = 1 / self.c0
        a1 = -self.c1 * a0 * a0
        a2 = -(self.c1 * a1 + self.c2 * a0) * a0
        return HSeries(a0, a1, a2)

    def __truediv__(self, o):
        return self * _hs(o).inv()

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            o = HSeries(o)
        if not isinstance(o, HSeries):
            return NotImplemented
        return self.coeffs() == o.coeffs()

    def __hash__(self):
        return hash(self.coeffs())

    def __repr__(self):
        return f"HSeries({self.c0}, {self.c1}, {self.c2})"


def _hs(x) -> HSeries:
    if isinstance(x, HSeries):
        return x
    return HSeries(x)


def _expand_laurent(p: LaurentPoly) -> HSeries:
    # q^k = 1 + k h/2 + k^2 h^2/8 + O(h^3)
    c0 = c1 = c2 = _ZERO
    for e, v in p.coeffs.items():
        c0 += v
        c1 += v * e / 2
        c2 += v * e * e / 8
    return HSeries(c0, c1, c2)


def hbar_expand(f: RatFunc | LaurentPoly | Number) -> HSeries:
    """Taylor expansion of f(exp(hbar/2)) modulo hbar^3."""
    f = _coerce(f)
    d = _expand_laurent(f.den)
    if d.c0 == 0:
        raise PoleError(f"denominator {format_laurent(f.den)} vanishes at q = 1")
    n = _expand_laurent(f.num)
    if f.den.is_const():
        return n
    return n * d.inv()


def lp_from_terms(terms: Iterable[tuple[int, Number]]) -> LaurentPoly:
    d: dict[int, Fraction] = {}
    for e, v in terms:
        d[e] = d.get(e, _ZERO) + Fraction(v)
    return LaurentPoly(d)
