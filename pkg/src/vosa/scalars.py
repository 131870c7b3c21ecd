"""Exact coefficient arithmetic: rationals and rational functions in the level variable k.

Every coefficient in the engine is a LevelScalar: a reduced fraction of
polynomials in the single formal variable k over Q.  The representation is
canonical (monic denominator, coprime numerator/denominator), so equality of
scalars is structural equality.
"""

from __future__ import annotations

import re
from fractions import Fraction

Rat = Fraction

_F0 = Fraction(0)
_F1 = Fraction(1)


class ScalarError(ArithmeticError):
    """Invalid scalar arithmetic (division by zero, malformed input)."""


class PoleError(ScalarError):
    """Specialization of a scalar at a zero of its denominator."""


# ---------------------------------------------------------------------------
# dense polynomial helpers; coefficient lists over Fraction, low degree first


def _trim(cs):
    n = len(cs)
    while n > 1 and not cs[n - 1]:
        n -= 1
    return tuple(cs[:n])


def _padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _trim(out)


def _pneg(a):
    return tuple(-c for c in a)


def _pmul(a, b):
    if a == (_F0,) or b == (_F0,):
        return (_F0,)
    out = [_F0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _pscale(a, c):
    if not c:
        return (_F0,)
    return tuple(x * c for x in a)


def _pdivmod(a, b):
    # b must be nonzero
    q = [_F0] * max(len(a) - len(b) + 1, 1)
    r = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(r) - 1 >= db and any(r):
        dr = len(r) - 1
        while dr > 0 and not r[dr]:
            dr -= 1
        if dr < db or not r[dr]:
            break
        c = r[dr] / lb
        q[dr - db] += c
        for i, y in enumerate(b):
            r[dr - db + i] -= c * y
        r = list(_trim(r))
    return _trim(q), _trim(r)


def _pgcd(a, b):
    a, b = _trim(a), _trim(b)
    while b != (_F0,):
        _, r = _pdivmod(a, b)
        a, b = b, r
    if a == (_F0,):
        return (_F1,)
    return _pscale(a, 1 / a[-1])  # monic


def _peval(cs, x):
    acc = _F0
    for c in reversed(cs):
        acc = acc * x + c
    return acc


def _ptext(cs):
    """Render a polynomial in k without '^' (powers become repeated products)."""
    parts = []
    for i in range(len(cs) - 1, -1, -1):
        c = cs[i]
        if not c:
            continue
        if i == 0:
            mon = str(abs(c))
        else:
            kpow = "*".join(["k"] * i)
            mon = kpow if abs(c) == 1 else f"{abs(c)}*{kpow}"
        if not parts:
            parts.append(mon if c > 0 else "-" + mon)
        else:
            parts.append(("+ " if c > 0 else "- ") + mon)
    return " ".join(parts) if parts else "0"


class LevelScalar:
    """A reduced rational function num/den in k with Fraction coefficients."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=(_F1,), _reduced=False):
        if isinstance(num, (int, Fraction)):
            num = (Fraction(num),)
        if isinstance(den, (int, Fraction)):
            den = (Fraction(den),)
        num, den = _trim(num), _trim(den)
        if den == (_F0,):
            raise ScalarError("zero denominator")
        if not _reduced:
            if num == (_F0,):
                den = (_F1,)
            else:
                g = _pgcd(num, den)
                if g != (_F1,):
                    num, _ = _pdivmod(num, g)
                    den, _ = _pdivmod(den, g)
                lead = den[-1]
                if lead != 1:
                    num = _pscale(num, 1 / lead)
                    den = _pscale(den, 1 / lead)
        self.num = num
        self.den = den
        self._hash = hash((num, den))

    # -- constructors ------------------------------------------------------

    @staticmethod
    def of(x) -> "LevelScalar":
        if isinstance(x, LevelScalar):
            return x
        if isinstance(x, (int, Fraction)):
            return LevelScalar((Fraction(x),), (_F1,), _reduced=True)
        raise ScalarError(f"cannot coerce {x!r} to a scalar")

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num == (_F0,)

    def is_constant(self) -> bool:
        return len(self.num) == 1 and len(self.den) == 1

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ScalarError(f"{self} is not constant in k")
        return self.num[0] / self.den[0]

    def __bool__(self):
        return not self.is_zero()

    # -- field operations --------------------------------------------------

    def __add__(self, other):
        other = LevelScalar.of(other)
        if self.den == other.den:
            return LevelScalar(_padd(self.num, other.num), self.den)
        return LevelScalar(
            _padd(_pmul(self.num, other.den), _pmul(other.num, self.den)),
            _pmul(self.den, other.den),
        )

    __radd__ = __add__

    def __neg__(self):
        return LevelScalar(_pneg(self.num), self.den, _reduced=True)

    def __sub__(self, other):
        return self + (-LevelScalar.of(other))

    def __rsub__(self, other):
        return LevelScalar.of(other) + (-self)

    def __mul__(self, other):
        other = LevelScalar.of(other)
        if self.is_zero() or other.is_zero():
            return ZERO
        if self.is_constant() and other.is_constant():
            return LevelScalar((self.num[0] * other.num[0] / (self.den[0] * other.den[0]),),
                               (_F1,), _reduced=True)
        return LevelScalar(_pmul(self.num, other.num), _pmul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = LevelScalar.of(other)
        if other.is_zero():
            raise ScalarError("division by zero scalar")
        return LevelScalar(_pmul(self.num, other.den), _pmul(self.den, other.num))

    def __rtruediv__(self, other):
        return LevelScalar.of(other) / self

    # -- specialization ----------------------------------------------------

    def specialize(self, k0) -> Fraction:
        """Evaluate at a rational level k0; a vanishing denominator is a pole."""
        k0 = Fraction(k0)
        d = _peval(self.den, k0)
        if d == 0:
            raise PoleError(f"pole at k={k0}: denominator {_ptext(self.den)} vanishes")
        return _peval(self.num, k0) / d

    # -- canonical identity ------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LevelScalar.of(other)
        if not isinstance(other, LevelScalar):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return self._hash

    def text(self) -> str:
        if self.den == (_F1,):
            return _ptext(self.num)
        return f"({_ptext(self.num)})/({_ptext(self.den)})"

    def __repr__(self):
        return self.text()


ZERO = LevelScalar.of(0)
ONE = LevelScalar.of(1)
K = LevelScalar((_F0, _F1), (_F1,), _reduced=True)


def field_op(a: LevelScalar, b: LevelScalar, op: str) -> LevelScalar:
    """Named field operation; op is one of add, sub, mul, div."""
    a, b = LevelScalar.of(a), LevelScalar.of(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ScalarError(f"unknown field op {op!r}")


# ---------------------------------------------------------------------------
# text syntax: integer and fraction literals, k, + - * / ( )

_TOKEN = re.compile(r"\s*(\d+|k|[()+\-*/])")


def _tokenize_scalar(text):
    toks, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise ScalarError(f"bad scalar syntax at {text[pos:]!r}")
        toks.append(m.group(1))
        pos = m.end()
    return toks


def parse_scalar(text: str) -> LevelScalar:
    """Parse expressions like '-(2*k+1)/2' into a LevelScalar."""
    toks = _tokenize_scalar(text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take():
        nonlocal pos
        t = toks[pos]
        pos += 1
        return t

    def atom():
        t = peek()
        if t == "(":
            take()
            v = expr()
            if peek() != ")":
                raise ScalarError("expected ')'")
            take()
            return v
        if t == "-":
            take()
            return -atom()
        if t == "+":
            take()
            return atom()
        if t == "k":
            take()
            return K
        if t is not None and t.isdigit():
            take()
            return LevelScalar.of(int(t))
        raise ScalarError(f"unexpected token {t!r} in scalar")

    def factor():
        v = atom()
        while peek() in ("*", "/"):
            op = take()
            w = atom()
            v = v * w if op == "*" else v / w
        return v

    def expr():
        v = factor()
        while peek() in ("+", "-"):
            op = take()
            w = factor()
            v = v + w if op == "+" else v - w
        return v

    v = expr()
    if pos != len(toks):
        raise ScalarError(f"trailing input {toks[pos:]!r} in scalar")
    return v
