"""Finite fields GF(p^r) in a compatible tower.

Elements are stored as integers ``0 <= v < p**r``: the base-p digits of ``v``
are the coordinates in the power basis of a root of the defining polynomial.
Multiplication goes through discrete log/exp tables, so every defining
polynomial here is primitive.  Defining polynomials are Conway polynomials:
the least primitive polynomial (in Conway's signed ordering) whose roots are
norm-compatible with every subfield.  That makes ``embed`` a plain power map
and the whole tower consistent.

All arithmetic methods accept Python ints or numpy integer arrays.
"""

from __future__ import annotations

import functools
import threading
from math import gcd

import numpy as np
from sympy import factorint, isprime

# Conway polynomials, coefficients from the constant term upwards.
CONWAY_TABLE: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 1): (1, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (3, 1): (1, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (3, 5): (1, 2, 0, 0, 0, 1),
    (3, 6): (2, 2, 1, 0, 2, 0, 1),
    (5, 1): (3, 1),
    (5, 2): (2, 4, 1),
    (5, 3): (3, 3, 0, 1),
    (5, 4): (2, 4, 4, 0, 1),
    (5, 5): (3, 4, 0, 0, 0, 1),
    (5, 6): (2, 0, 1, 4, 1, 0, 1),
    (7, 1): (4, 1),
    (7, 2): (3, 6, 1),
    (7, 3): (4, 0, 6, 1),
    (7, 4): (3, 4, 5, 0, 1),
    (7, 5): (4, 1, 0, 0, 0, 1),
    (7, 6): (3, 6, 4, 5, 1, 0, 1),
}

MAX_FIELD_ORDER = 1 << 20
_ADD_TABLE_LIMIT = 1 << 10

_tower_lock = threading.RLock()


class FieldError(ValueError):
    pass


# -- polynomials over F_p as coefficient lists (constant term first) ---------

def _poly_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mulmod(a, b, f, p):
    """a*b mod f over F_p; f monic."""
    if not a or not b:
        return []
    res = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                res[i + j] = (res[i + j] + x * y) % p
    n = len(f) - 1
    for k in range(len(res) - 1, n - 1, -1):
        c = res[k]
        if c:
            for i in range(n + 1):
                res[k - n + i] = (res[k - n + i] - c * f[i]) % p
    return _poly_trim(res[:n])


def _poly_powmod(a, e, f, p):
    result = [1]
    base = list(a)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, f, p)
        base = _poly_mulmod(base, base, f, p)
        e >>= 1
    return result


def is_primitive_poly(f: tuple[int, ...], p: int) -> bool:
    """True iff monic f of degree n is primitive over F_p (root generates F_{p^n}^*)."""
    n = len(f) - 1
    if f[-1] != 1 or n < 1:
        return False
    if f[0] % p == 0:
        return False
    order = p**n - 1
    x = [0, 1] if n > 1 else [(-f[0]) % p]
    if _poly_powmod(x, order, list(f), p) != [1]:
        return False
    for ell in factorint(order):
        if _poly_powmod(x, order // ell, list(f), p) == [1]:
            return False
    return True


def _conway_key(f, p):
    n = len(f) - 1
    return tuple(((-1) ** (n - i) * f[i]) % p for i in range(n - 1, -1, -1))


def _candidates_in_conway_order(p, n):
    # enumerate keys lexicographically and rebuild coefficients from them
    for idx in range(p**n):
        key = []
        v = idx
        for _ in range(n):
            key.append(v % p)
            v //= p
        key.reverse()
        coeffs = [0] * (n + 1)
        coeffs[n] = 1
        for pos, i in enumerate(range(n - 1, -1, -1)):
            coeffs[i] = (key[pos] * (-1) ** (n - i)) % p
        yield tuple(coeffs)


def compute_conway_polynomial(p: int, n: int) -> tuple[int, ...]:
    """Search for the Conway polynomial of degree n over F_p."""
    sub = [d for d in range(1, n) if n % d == 0]
    sub_polys = {d: conway_polynomial(p, d) for d in sub}
    order = p**n - 1
    for f in _candidates_in_conway_order(p, n):
        if not is_primitive_poly(f, p):
            continue
        ok = True
        for d, g in sub_polys.items():
            # norm of the root down to F_{p^d} must be a root of g
            x = [0, 1] if n > 1 else [(-f[0]) % p]
            y = _poly_powmod(x, order // (p**d - 1), list(f), p)
            acc = []
            for c in reversed(g):
                acc = _poly_mulmod(acc, y, list(f), p)
                acc = (acc or [0])
                acc[0] = (acc[0] + c) % p
                acc = _poly_trim(acc)
            if acc:
                ok = False
                break
        if ok:
            return f
    raise FieldError(f"no Conway polynomial found for ({p}, {n})")  # pragma: no cover


@functools.lru_cache(maxsize=None)
def conway_polynomial(p: int, n: int) -> tuple[int, ...]:
    if (p, n) in CONWAY_TABLE:
        return CONWAY_TABLE[(p, n)]
    return compute_conway_polynomial(p, n)


# -- fields -----------------------------------------------------------------

class Field:
    """GF(p^r) with log/exp tables.  Build through :func:`make_field`."""

    def __init__(self, p: int, r: int, poly: tuple[int, ...]):
        self.p = p
        self.r = r
        self.q = p**r
        self.poly = poly
        q = self.q
        self.pw = np.array([p**i for i in range(r)], dtype=np.int64)
        vals = np.arange(q, dtype=np.int64)
        self.digits = np.stack([(vals // p**i) % p for i in range(r)], axis=1) if r else vals[:, None]
        exp = np.zeros(2 * (q - 1) + 1, dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        # powers of the root, coefficient vectors shifted by one and reduced
        cur = [1] + [0] * (r - 1)
        for k in range(q - 1):
            v = sum(c * p**i for i, c in enumerate(cur))
            exp[k] = v
            if log[v] != -1:
                raise FieldError(f"defining polynomial {poly} is not primitive")
            log[v] = k
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                cur = [(cur[i] - top * poly[i]) % p for i in range(r)]
        exp[q - 1:2 * (q - 1)] = exp[:q - 1]
        exp[2 * (q - 1)] = exp[0]
        self.exp = exp
        self.log = log
        if q <= _ADD_TABLE_LIMIT and p != 2:
            d = self.digits
            self._add = (((d[:, None, :] + d[None, :, :]) % p) @ self.pw).astype(np.int64)
            self._neg = (((-d) % p) @ self.pw).astype(np.int64)
        else:
            self._add = None
            self._neg = None if p != 2 else vals

    def __repr__(self):
        return f"GF({self.p}^{self.r})"

    @property
    def name(self) -> str:
        return f"GF({self.p}^{self.r})"

    def __len__(self):
        return self.q

    def __reduce__(self):
        return (make_field, (self.p, self.r))

    # -- scalar/array plumbing
    @staticmethod
    def _wrap(out, scalar):
        return int(out) if scalar else out

    def elements(self):
        return range(self.q)

    def element(self, v) -> "FieldElem":
        return FieldElem(self, int(v))

    def from_coords(self, coords) -> int:
        if len(coords) != self.r:
            raise FieldError("coordinate vector has wrong length")
        return int(sum((int(c) % self.p) * self.p**i for i, c in enumerate(coords)))

    def coords(self, a) -> tuple[int, ...]:
        return tuple(int(c) for c in self.digits[int(a)])

    def add(self, a, b):
        scalar = np.isscalar(a) and np.isscalar(b)
        if self.p == 2:
            return self._wrap(np.bitwise_xor(a, b), scalar)
        if self._add is not None:
            return self._wrap(self._add[a, b], scalar)
        a = np.asarray(a)
        b = np.asarray(b)
        out = ((self.digits[a] + self.digits[b]) % self.p) @ self.pw
        return self._wrap(out, scalar)

    def neg(self, a):
        scalar = np.isscalar(a)
        if self._neg is not None:
            return self._wrap(self._neg[a], scalar)
        out = ((-self.digits[np.asarray(a)]) % self.p) @ self.pw
        return self._wrap(out, scalar)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def scalar_mul(self, n: int, a):
        """n*a for an integer n (repeated addition)."""
        scalar = np.isscalar(a)
        out = ((self.digits[np.asarray(a)] * (n % self.p)) % self.p) @ self.pw
        return self._wrap(out, scalar)

    def mul(self, a, b):
        scalar = np.isscalar(a) and np.isscalar(b)
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        la = self.log[a]
        lb = self.log[b]
        out = np.where((la < 0) | (lb < 0), 0, self.exp[np.maximum(la, 0) + np.maximum(lb, 0)])
        return self._wrap(out, scalar)

    def inv(self, a):
        scalar = np.isscalar(a)
        la = self.log[np.asarray(a, dtype=np.int64)]
        if np.any(la < 0):
            raise ZeroDivisionError("inverse of zero in " + self.name)
        out = self.exp[(-la) % (self.q - 1)]
        return self._wrap(out, scalar)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        scalar = np.isscalar(a)
        la = self.log[np.asarray(a, dtype=np.int64)]
        if e == 0:
            out = np.ones_like(la)
        elif e > 0:
            out = np.where(la < 0, 0, self.exp[(np.maximum(la, 0) * (e % (self.q - 1))) % (self.q - 1)])
        else:
            if np.any(la < 0):
                raise ZeroDivisionError("negative power of zero")
            out = self.exp[(la * (e % (self.q - 1))) % (self.q - 1)]
        return self._wrap(out, scalar)

    def frobenius(self, a, k: int = 1):
        """a -> a^(p^k); negative k uses that F_q is perfect."""
        k %= self.r
        return self.pow(a, self.p**k) if k else (int(a) if np.isscalar(a) else np.asarray(a).copy())

    def abs_trace(self, a):
        """Trace down to the prime field, returned as an int in [0, p)."""
        acc = a
        x = a
        for _ in range(self.r - 1):
            x = self.frobenius(x, 1)
            acc = self.add(acc, x)
        return acc  # lies in F_p, encoded as 0..p-1

    # -- tower
    def is_subfield_degree(self, d: int) -> bool:
        return d >= 1 and self.r % d == 0

    def subfield(self, d: int) -> "Field":
        if not self.is_subfield_degree(d):
            raise FieldError(f"GF({self.p}^{d}) is not a subfield of {self.name}")
        return make_field(self.p, d)

    def in_subfield(self, a, d: int):
        """Mask/bool: a lies in GF(p^d) inside this field."""
        step = (self.q - 1) // (self.p**d - 1)
        la = self.log[np.asarray(a, dtype=np.int64)]
        res = (la < 0) | (la % step == 0)
        return bool(res) if np.isscalar(a) else res

    def descend(self, a, sub: "Field"):
        """Inverse of embed: element of this field lying in ``sub``, as an element of ``sub``."""
        if sub.p != self.p or self.r % sub.r:
            raise FieldError(f"{sub.name} is not a subfield of {self.name}")
        scalar = np.isscalar(a)
        step = (self.q - 1) // (sub.q - 1)
        la = self.log[np.asarray(a, dtype=np.int64)]
        if np.any((la >= 0) & (la % step != 0)):
            raise FieldError(f"element does not lie in {sub.name}")
        out = np.where(la < 0, 0, sub.exp[np.maximum(la, 0) // step])
        return self._wrap(out, scalar)

    def embed_from(self, a, sub: "Field"):
        """Image of ``a`` (an element of ``sub``) in this field."""
        if sub.p != self.p or self.r % sub.r:
            raise FieldError(f"cannot embed {sub.name} into {self.name}")
        scalar = np.isscalar(a)
        step = (self.q - 1) // (sub.q - 1)
        la = sub.log[np.asarray(a, dtype=np.int64)]
        out = np.where(la < 0, 0, self.exp[np.maximum(la, 0) * step])
        return self._wrap(out, scalar)

    def rel_trace(self, a, sub: "Field"):
        """Trace from this field down to ``sub``, returned as an element of ``sub``."""
        if sub.p != self.p or self.r % sub.r:
            raise FieldError(f"{sub.name} is not a subfield of {self.name}")
        m = self.r // sub.r
        acc = a
        x = a
        for _ in range(m - 1):
            x = self.frobenius(x, sub.r)
            acc = self.add(acc, x)
        return self.descend(acc, sub)

    def primitive_element(self) -> int:
        return int(self.exp[0 if self.q == 2 else 1]) if self.q > 2 else 1


@functools.lru_cache(maxsize=None)
def _make_field(p: int, r: int) -> Field:
    return Field(p, r, conway_polynomial(p, r))


def make_field(p: int, r: int) -> Field:
    """GF(p^r).  Equal arguments return the identical object."""
    if not isinstance(p, (int, np.integer)) or not isprime(int(p)):
        raise FieldError(f"characteristic {p} is not prime")
    if not isinstance(r, (int, np.integer)) or r < 1:
        raise FieldError(f"extension degree must be >= 1, got {r}")
    if p**r > MAX_FIELD_ORDER:
        raise FieldError(f"GF({p}^{r}) exceeds the supported field size")
    with _tower_lock:
        return _make_field(int(p), int(r))


# -- element wrapper --------------------------------------------------------

@functools.total_ordering
class FieldElem:
    """An element of a :class:`Field`, with operator overloading."""

    __slots__ = ("field", "value")

    def __init__(self, field: Field, value: int):
        self.field = field
        value = int(value)
        if not 0 <= value < field.q:
            raise FieldError(f"{value} is not an element encoding of {field.name}")
        self.value = value

    @property
    def coords(self) -> tuple[int, ...]:
        return self.field.coords(self.value)

    def _coerce(self, other):
        if isinstance(other, FieldElem):
            if other.field is self.field:
                return other.value
            big = self.field if self.field.r >= other.field.r else other.field
            raise FieldError(f"mixed fields {self.field.name} and {other.field.name}; embed into {big.name} first")
        if isinstance(other, (int, np.integer)):
            return self.field.scalar_mul(int(other), 1)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElem(self.field, self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElem(self.field, self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElem(self.field, self.field.sub(o, self.value))

    def __neg__(self):
        return FieldElem(self.field, self.field.neg(self.value))

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElem(self.field, self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElem(self.field, self.field.div(self.value, o))

    def __pow__(self, e: int):
        return FieldElem(self.field, self.field.pow(self.value, e))

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.field is other.field and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == self.field.scalar_mul(int(other), 1)
        return NotImplemented

    def __lt__(self, other):
        return self.value < other.value

    def __hash__(self):
        return hash((self.field.p, self.field.r, self.value))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.field.name}[{self.value}]"

    def frobenius(self, k: int = 1) -> "FieldElem":
        return frobenius(self, k)


def elements(field: Field):
    return [FieldElem(field, v) for v in field.elements()]


def embed(x: FieldElem, target: Field) -> FieldElem:
    if x.field.p != target.p or target.r % x.field.r:
        raise FieldError(f"degree {x.field.r} does not divide {target.r}")
    return FieldElem(target, target.embed_from(x.value, x.field))


def frobenius(x: FieldElem, k: int = 1) -> FieldElem:
    return FieldElem(x.field, x.field.frobenius(x.value, k))


def rel_trace(x: FieldElem, sub: Field) -> FieldElem:
    return FieldElem(sub, x.field.rel_trace(x.value, sub))


def multiplicative_order(field: Field, a: int) -> int:
    la = int(field.log[a])
    if la < 0:
        raise ZeroDivisionError("zero has no multiplicative order")
    return (field.q - 1) // gcd(la, field.q - 1)
