"""Exact arithmetic in Q(zeta_{p^e}) and the additive model mu = (1/p^e)Z/Z.

A :class:`CycloNum` of level ``e`` stores rational coordinates in the power
basis ``1, z, ..., z^(phi-1)`` of ``z = zeta_{p^e}`` (``phi = (p-1)p^(e-1)``),
i.e. modulo the cyclotomic polynomial.  Numbers of different levels are
coerced upward automatically.  Level 0 is Q itself.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache, total_ordering
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np


class LevelError(ValueError):
    pass


def _phi(p: int, e: int) -> int:
    return 1 if e == 0 else (p - 1) * p ** (e - 1)


@total_ordering
class MuVal:
    """The class of ``a / p^e`` in Q_p/Z_p."""

    __slots__ = ("p", "e", "a")

    def __init__(self, p: int, e: int, a: int):
        self.p = p
        self.e = e
        self.a = a % p**e

    @classmethod
    def zero(cls, p: int, e: int = 0) -> "MuVal":
        return cls(p, e, 0)

    @classmethod
    def from_fraction(cls, p: int, x: Fraction | int) -> "MuVal":
        x = Fraction(x)
        den = x.denominator
        e = 0
        while den % p == 0:
            den //= p
            e += 1
        if den != 1:
            raise LevelError(f"{x} is not p-power torsion for p={p}")
        return cls(p, e, x.numerator)

    def at_level(self, e: int) -> "MuVal":
        if e < self.e:
            if self.a % self.p ** (self.e - e):
                raise LevelError(f"cannot lower {self} to level {e}")
            return MuVal(self.p, e, self.a // self.p ** (self.e - e))
        return MuVal(self.p, e, self.a * self.p ** (e - self.e))

    def reduced(self) -> "MuVal":
        v = self
        while v.e > 0 and v.a % v.p == 0:
            v = MuVal(v.p, v.e - 1, v.a // v.p)
        return v

    def as_fraction(self) -> Fraction:
        return Fraction(self.a, self.p**self.e)

    def _common(self, other: "MuVal"):
        if self.p != other.p:
            raise LevelError("mixed primes")
        e = max(self.e, other.e)
        return e, self.at_level(e).a, other.at_level(e).a

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        e, a, b = self._common(other)
        return MuVal(self.p, e, a + b)

    __radd__ = __add__

    def __sub__(self, other):
        e, a, b = self._common(other)
        return MuVal(self.p, e, a - b)

    def __neg__(self):
        return MuVal(self.p, self.e, -self.a)

    def __mul__(self, n: int):
        if not isinstance(n, (int, np.integer)):
            return NotImplemented
        return MuVal(self.p, self.e, self.a * int(n))

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, MuVal):
            return self.p == other.p and self.as_fraction() == other.as_fraction()
        if isinstance(other, int) and other == 0:
            return self.a == 0
        return NotImplemented

    def __lt__(self, other):
        return self.as_fraction() < other.as_fraction()

    def __hash__(self):
        return hash((self.p, self.as_fraction()))

    def __bool__(self):
        return self.a != 0

    def __repr__(self):
        return f"{self.a}/{self.p**self.e}"


@lru_cache(maxsize=None)
def _reduction(p: int, e: int):
    """For each exponent k < p^e, the power-basis vector of z^k as a list of (index, sign)."""
    n = p**e
    phi = _phi(p, e)
    if e == 0:
        return ((((0, 1),),))
    step = p ** (e - 1)
    out = []
    for k in range(n):
        if k < phi:
            out.append(((k, 1),))
        else:
            t = k - phi
            out.append(tuple((t + i * step, -1) for i in range(p - 1)))
    return tuple(out)


def _from_cyclic(p: int, e: int, vec: Sequence) -> tuple:
    """Reduce coefficients on z^0..z^(p^e-1) to the power basis."""
    red = _reduction(p, e)
    out = [0] * _phi(p, e)
    for k, c in enumerate(vec):
        if c:
            for idx, s in red[k]:
                out[idx] += s * c
    return tuple(out)


def _norm_coeff(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


class CycloNum:
    """An element of Q(zeta_{p^e})."""

    __slots__ = ("p", "e", "coeffs")

    def __init__(self, p: int, e: int, coeffs: Iterable):
        self.p = p
        self.e = e
        c = tuple(_norm_coeff(x) for x in coeffs)
        if len(c) != _phi(p, e):
            raise LevelError(f"expected {_phi(p, e)} coefficients at level {e}, got {len(c)}")
        self.coeffs = c

    # -- constructors
    @classmethod
    def from_rational(cls, p: int, x, e: int = 0) -> "CycloNum":
        return cls(p, e, (x,) + (0,) * (_phi(p, e) - 1))

    @classmethod
    def zeta(cls, p: int, e: int, k: int = 1) -> "CycloNum":
        n = p**e
        vec = [0] * n
        vec[k % n] = 1
        return cls(p, e, _from_cyclic(p, e, vec))

    @classmethod
    def from_cyclic(cls, p: int, e: int, vec: Sequence) -> "CycloNum":
        """sum_k vec[k] * zeta^k for k = 0..p^e - 1."""
        if len(vec) != p**e:
            raise LevelError("cyclic vector has wrong length")
        return cls(p, e, _from_cyclic(p, e, [_norm_coeff(Fraction(v)) if not isinstance(v, (int, np.integer)) else int(v) for v in vec]))

    # -- level handling
    def at_level(self, e: int) -> "CycloNum":
        if e == self.e:
            return self
        if e < self.e:
            raise LevelError("cyclotomic values are only coerced upward")
        n = self.p**e
        vec = [0] * n
        step = self.p ** (e - self.e)
        for k, c in enumerate(self.coeffs):
            vec[k * step] = c
        return CycloNum(self.p, e, _from_cyclic(self.p, e, vec))

    def to_cyclic(self, e: int | None = None) -> list:
        e = self.e if e is None else e
        x = self.at_level(e)
        vec = [0] * (self.p**e)
        vec[: len(x.coeffs)] = x.coeffs
        return vec

    def _pair(self, other):
        if isinstance(other, CycloNum):
            if other.p != self.p:
                raise LevelError("mixed primes")
            e = max(self.e, other.e)
            return self.at_level(e), other.at_level(e)
        if isinstance(other, (int, Rational, np.integer)):
            return self, CycloNum.from_rational(self.p, Fraction(other), self.e)
        return None, None

    # -- ring operations
    def __add__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return CycloNum(a.p, a.e, (x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycloNum(self.p, self.e, (-x for x in self.coeffs))

    def __sub__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return CycloNum(a.p, a.e, (x - y for x, y in zip(a.coeffs, b.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        n = a.p**a.e
        vec = [0] * n
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        vec[(i + j) % n] += x * y
        return CycloNum(a.p, a.e, _from_cyclic(a.p, a.e, vec))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational, np.integer)):
            d = Fraction(other)
            return CycloNum(self.p, self.e, (Fraction(x) / d for x in self.coeffs))
        if isinstance(other, CycloNum) and other.is_rational():
            return self / other.rational()
        return NotImplemented

    def conj(self) -> "CycloNum":
        n = self.p**self.e
        vec = [0] * n
        for k, c in enumerate(self.coeffs):
            vec[(-k) % n] += c
        return CycloNum(self.p, self.e, _from_cyclic(self.p, self.e, vec))

    # -- predicates and conversions
    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise LevelError(f"{self!r} is not rational")
        return Fraction(self.coeffs[0])

    def is_integral(self) -> bool:
        return all(Fraction(c).denominator == 1 for c in self.coeffs)

    def __eq__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return a.coeffs == b.coeffs

    def __hash__(self):
        x = self
        # hash on the lowest level the number lives in
        while x.e > 0:
            step = x.p
            if any(c for k, c in enumerate(x.coeffs) if k % step):
                break
            lower = tuple(x.coeffs[k] for k in range(0, len(x.coeffs), step))
            if len(lower) != _phi(x.p, x.e - 1):
                break
            cand = CycloNum(x.p, x.e - 1, lower)
            if cand.at_level(x.e) != x:
                break
            x = cand
        return hash((x.p, x.e, x.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def to_complex(self) -> complex:
        n = self.p**self.e
        z = cmath.exp(2j * cmath.pi / n)
        return complex(sum(float(c) * z**k for k, c in enumerate(self.coeffs)))

    def to_json(self) -> dict:
        z = self.to_complex()
        return {
            "level": self.e,
            "coeffs": [str(Fraction(c)) for c in self.coeffs],
            "approx": [round(z.real, 12), round(z.imag, 12)],
        }

    def __repr__(self):
        if self.is_rational():
            return str(Fraction(self.coeffs[0]))
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if k == 0 else f"{c}*z{self.p**self.e}^{k}")
        return " + ".join(terms)


def psi(v: MuVal) -> CycloNum:
    """psi(a/p^e) = zeta_{p^e}^a."""
    return CycloNum.zeta(v.p, v.e, v.a)


def hermitian_inner(values_f: Sequence[CycloNum], values_g: Sequence[CycloNum],
                    class_sizes: Sequence[int], group_order: int) -> CycloNum:
    """<f, g> = |G|^-1 sum_C |C| f(C) conj(g(C))."""
    if not (len(values_f) == len(values_g) == len(class_sizes)):
        raise ValueError("class lists do not match")
    total = None
    for f, g, h in zip(values_f, values_g, class_sizes):
        term = f * g.conj() * h
        total = term if total is None else total + term
    if total is None:
        raise ValueError("empty class list")
    return total / group_order
