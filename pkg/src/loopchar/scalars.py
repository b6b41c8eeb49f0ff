"""Exact arithmetic in a cyclotomic field Q(zeta_N).

Elements are stored in the power basis 1, z, ..., z^(phi(N)-1), reduced modulo
the N-th cyclotomic polynomial, as a vector of integers over one common
positive denominator with the overall gcd divided out.  That reduced form is
unique, so equality, hashing and the canonical total order are all positional.

The conductor N is fixed per session: every base, twist root and coefficient
of a run lives in one shared field, which is what makes "(a/b)^r == 1" style
questions decidable.  Mixing elements of different conductors raises
ConductorMismatch rather than guessing an embedding.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd

from .errors import ConductorMismatch, ParseError
from .numtheory import divisors


def _exact_div(num: list[int], den: list[int]) -> list[int]:
    # num / den for integer polynomials with den monic; remainder must vanish
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1]
        out[k] = c
        if c:
            for j, dj in enumerate(den):
                num[k + j] -= c * dj
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (low degree first, monic) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise ValueError(f"cyclotomic_polynomial: expected positive n, got {n}")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in divisors(n):
        if d != n:
            poly = _exact_div(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


class CyclotomicField:
    """Shared per-session tables for Q(zeta_N)."""

    __slots__ = ("conductor", "modulus", "degree", "_red_rows", "zero", "one",
                 "_zeta_powers")

    def __init__(self, conductor: int):
        if conductor < 1:
            raise ValueError(f"conductor must be positive, got {conductor}")
        self.conductor = conductor
        self.modulus = cyclotomic_polynomial(conductor)
        self.degree = len(self.modulus) - 1
        d = self.degree
        # x^k reduced mod Phi_N for k = d .. 2d-2; rows stay integral (Phi_N is monic)
        rows = []
        cur = [0] * d
        for j, mj in enumerate(self.modulus[:d]):
            cur[j] = -mj
        for _ in range(d - 1):
            rows.append(tuple(cur))
            lead = cur[d - 1]
            cur = [0] + cur[:-1]
            if lead:
                for j, mj in enumerate(self.modulus[:d]):
                    cur[j] -= lead * mj
        self._red_rows = tuple(rows)
        self.zero = CycScalar(self, (0,) * d, 1)
        one = [0] * d
        one[0] = 1
        self.one = CycScalar(self, tuple(one), 1)
        # zeta_N^e for e = 0..N-1, built by repeated multiplication with the
        # reduced image of x
        if d == 1:
            zim = CycScalar(self, (-self.modulus[0],), 1)
        else:
            zim = CycScalar(self, tuple(1 if i == 1 else 0 for i in range(d)), 1)
        powers = [self.one]
        for _ in range(conductor - 1):
            powers.append(powers[-1] * zim)
        self._zeta_powers = tuple(powers)

    def from_rational(self, value) -> CycScalar:
        value = Fraction(value)
        nums = [0] * self.degree
        nums[0] = value.numerator
        return _make(self, nums, value.denominator)

    def zeta(self, order: int, power: int = 1) -> CycScalar:
        """zeta_order^power as a field element; order must divide the conductor."""
        if order < 1:
            raise ValueError(f"root order must be positive, got {order}")
        if self.conductor % order:
            raise ConductorMismatch(
                f"zeta({order}) does not live in Q(zeta_{self.conductor}); "
                f"the conductor must be a multiple of {order}")
        return self._zeta_powers[(self.conductor // order) * power % self.conductor]

    def __repr__(self):
        return f"CyclotomicField({self.conductor})"

    def __eq__(self, other):
        return isinstance(other, CyclotomicField) and other.conductor == self.conductor

    def __hash__(self):
        return hash(("CyclotomicField", self.conductor))


def _make(field: CyclotomicField, nums, den: int) -> "CycScalar":
    if den < 0:
        nums = [-v for v in nums]
        den = -den
    g = reduce(gcd, nums, den)
    if g > 1:
        nums = [v // g for v in nums]
        den //= g
    if not any(nums):
        den = 1
    return CycScalar(field, tuple(nums), den)


class CycScalar:
    """An element of Q(zeta_N) in reduced power-basis form.  Immutable."""

    __slots__ = ("field", "nums", "den")

    def __init__(self, field: CyclotomicField, nums: tuple[int, ...], den: int):
        self.field = field
        self.nums = nums
        self.den = den

    # -- coercion ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, CycScalar):
            if other.field.conductor != self.field.conductor:
                raise ConductorMismatch(
                    f"mixed conductors {self.field.conductor} and {other.field.conductor}")
            return other
        if isinstance(other, int):
            return self.field.from_rational(other)
        if isinstance(other, Fraction):
            return self.field.from_rational(other)
        return None

    # -- ring operations --------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        da, db = self.den, other.den
        g = gcd(da, db)
        ma, mb = db // g, da // g
        nums = [a * ma + b * mb for a, b in zip(self.nums, other.nums)]
        return _make(self.field, nums, da * ma)

    __radd__ = __add__

    def __neg__(self):
        return CycScalar(self.field, tuple(-v for v in self.nums), self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        f = self.field
        d = f.degree
        a, b = self.nums, other.nums
        conv = [0] * (2 * d - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        conv[i + j] += ai * bj
        out = conv[:d]
        rows = f._red_rows
        for k in range(d, 2 * d - 1):
            c = conv[k]
            if c:
                row = rows[k - d]
                for j, rj in enumerate(row):
                    if rj:
                        out[j] += c * rj
        return _make(f, out, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "CycScalar":
        if not self:
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        f = self.field
        if f.degree == 1:
            return _make(f, [self.den], self.nums[0])
        a = [Fraction(v, self.den) for v in self.nums]
        while a and not a[-1]:
            a.pop()
        old_r, r = a, [Fraction(c) for c in f.modulus]
        old_s, s = [Fraction(1)], []
        while r:
            q, rem = _fpoly_divmod(old_r, r)
            old_r, r = r, rem
            old_s, s = s, _fpoly_sub(old_s, _fpoly_mul(q, s))
        # old_r is a nonzero constant: the modulus is irreducible over Q
        c = old_r[0]
        inv = [x / c for x in old_s]
        inv += [Fraction(0)] * (f.degree - len(inv))
        den = reduce(lambda acc, x: acc * x.denominator // gcd(acc, x.denominator), inv, 1)
        return _make(f, [int(x * den) for x in inv], den)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = self.field.one
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- structure --------------------------------------------------------

    def __bool__(self):
        return any(self.nums)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.from_rational(other)
        if not isinstance(other, CycScalar):
            return NotImplemented
        return (self.field.conductor == other.field.conductor
                and self.nums == other.nums and self.den == other.den)

    def __hash__(self):
        return hash((self.field.conductor, self.nums, self.den))

    def key(self) -> tuple[Fraction, ...]:
        """Total-order key: the reduced rational coefficient vector."""
        return tuple(Fraction(v, self.den) for v in self.nums)

    def multiplicative_order(self, limit: int) -> int | None:
        """Smallest k <= limit with self^k == 1, or None."""
        p = self
        for k in range(1, limit + 1):
            if p == self.field.one:
                return k
            p = p * self
        return None

    def as_rational(self) -> Fraction | None:
        if any(self.nums[1:]):
            return None
        return Fraction(self.nums[0], self.den)

    # -- display ----------------------------------------------------------

    def __str__(self):
        if not self:
            return "0"
        n = self.field.conductor
        parts = []
        for j, v in enumerate(self.nums):
            if not v:
                continue
            c = Fraction(v, self.den)
            if j == 0:
                parts.append((c, str(abs(c))))
            else:
                z = f"zeta({n})" if j == 1 else f"zeta({n})^{j}"
                mag = abs(c)
                parts.append((c, z if mag == 1 else f"{mag}*{z}"))
        out = []
        for i, (c, text) in enumerate(parts):
            if i == 0:
                out.append(f"-{text}" if c < 0 else text)
            else:
                out.append(f" - {text}" if c < 0 else f" + {text}")
        return "".join(out)

    def __repr__(self):
        return f"<{self} | Q(zeta_{self.field.conductor})>"


# -- Fraction-polynomial helpers for the inverse --------------------------

def _fpoly_trim(p):
    while p and not p[-1]:
        p.pop()
    return p


def _fpoly_sub(a, b):
    out = [Fraction(0)] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(b):
        out[i] -= x
    return _fpoly_trim(out)


def _fpoly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _fpoly_trim(out)


def _fpoly_divmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    inv_lead = 1 / b[-1]
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1] * inv_lead
        q[k] = c
        if c:
            for j, bj in enumerate(b):
                a[k + j] -= c * bj
    return _fpoly_trim(q), _fpoly_trim(a[: len(b) - 1])


# -- spec-facing helpers ----------------------------------------------------

def root_of_unity(field: CyclotomicField, order: int, power: int = 1) -> CycScalar:
    """zeta_order^power in the session field."""
    return field.zeta(order, power)


def canonical_key(a: CycScalar) -> tuple[Fraction, ...]:
    """Deterministic total order on scalars, used for orbit tie-breaking."""
    return a.key()


def same_xi_orbit(a: CycScalar, b: CycScalar, r: int) -> int | None:
    """The l in 0..r-1 with b == zeta_r^l * a, or None if the two differ by
    something other than an r-th root of unity."""
    if not a or not b:
        raise ValueError("same_xi_orbit needs nonzero scalars")
    z = a.field.zeta(r)
    q = b / a
    cur = a.field.one
    for ell in range(r):
        if q == cur:
            return ell
        cur = cur * z
    return None


# -- literal parsing --------------------------------------------------------

_TOKEN = re.compile(r"\s*(zeta|\d+|\*\*|[()^+\-*/])")


def _tokenize(text: str) -> list[str]:
    toks, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ParseError(f"bad scalar literal near {text[pos:]!r}")
            break
        tok = m.group(1)
        toks.append("^" if tok == "**" else tok)
        pos = m.end()
    return toks


def parse_scalar(text: str, field: CyclotomicField) -> CycScalar:
    """Parse a scalar literal: rationals ("3/2", "-2"), roots of unity
    ("zeta(12)^5"), and sums/products/powers of these."""
    toks = _tokenize(str(text))
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take(expected=None):
        nonlocal pos
        if pos >= len(toks):
            raise ParseError(f"scalar literal {text!r} ended unexpectedly")
        tok = toks[pos]
        if expected is not None and tok != expected:
            raise ParseError(f"scalar literal {text!r}: expected {expected!r}, got {tok!r}")
        pos += 1
        return tok

    def parse_int():
        sign = 1
        while peek() in ("+", "-"):
            if take() == "-":
                sign = -sign
        tok = take()
        if not tok.isdigit():
            raise ParseError(f"scalar literal {text!r}: expected an integer, got {tok!r}")
        return sign * int(tok)

    def atom():
        tok = peek()
        if tok == "(":
            take()
            node = expr()
            take(")")
            return node
        if tok in ("-", "+"):
            take()
            node = atom()
            return -node if tok == "-" else node
        if tok == "zeta":
            take()
            take("(")
            order = parse_int()
            take(")")
            return field.zeta(order)
        if tok is not None and tok.isdigit():
            num = int(take())
            if peek() == "/":
                take()
                den = parse_int()
                if den == 0:
                    raise ParseError(f"scalar literal {text!r}: zero denominator")
                return field.from_rational(Fraction(num, den))
            return field.from_rational(num)
        raise ParseError(f"scalar literal {text!r}: unexpected token {tok!r}")

    def factor():
        node = atom()
        if peek() == "^":
            take()
            node = node ** parse_int()
        return node

    def term():
        node = factor()
        while peek() == "*":
            take()
            node = node * factor()
        return node

    def expr():
        node = term()
        while peek() in ("+", "-"):
            if take() == "+":
                node = node + term()
            else:
                node = node - term()
        return node

    node = expr()
    if pos != len(toks):
        raise ParseError(f"scalar literal {text!r}: trailing input {toks[pos:]}")
    return node


def required_zeta_orders(text: str) -> set[int]:
    """Orders mentioned by zeta(...) literals, for up-front conductor validation."""
    return {int(m) for m in re.findall(r"zeta\(\s*(\d+)\s*\)", str(text))}
