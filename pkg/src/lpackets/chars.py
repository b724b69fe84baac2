"""Exact character tables and class-function calculus for finite p-groups.

Class functions store, for each conjugacy class, integer coordinates in the
power basis of Q(zeta_{p^e}) over a common positive denominator.  Tables are
computed with the Dixon-Schneider method modulo a prime l = 1 (mod exponent)
and lifted to cyclotomic integers; the lift is then re-verified exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd, isqrt
from typing import Callable, Iterable, Sequence

import numpy as np
from sympy import isprime, primitive_root

from .cyclo import CycloNum, MuVal, _phi, _reduction
from .group import FiniteGroup, GroupError, Subgroup


class CharError(ValueError):
    pass


def _log_p(n: int, p: int) -> int:
    e = 0
    while n > 1:
        if n % p:
            raise CharError(f"{n} is not a power of {p}")
        n //= p
        e += 1
    return e


def group_level(G: FiniteGroup) -> int:
    """e with p^e = exponent of G."""
    return _log_p(G.exponent, G.p)


@lru_cache(maxsize=None)
def _red_matrix(p: int, e: int) -> np.ndarray:
    """Row k = power-basis coordinates of zeta^k, k < p^e."""
    red = _reduction(p, e)
    R = np.zeros((p**e, _phi(p, e)), dtype=np.int64)
    for k, terms in enumerate(red):
        for idx, s in terms:
            R[k, idx] += s
    R.setflags(write=False)
    return R


@lru_cache(maxsize=None)
def _lift_matrix(p: int, e0: int, e1: int) -> np.ndarray:
    """Power basis at level e0 -> power basis at level e1 >= e0."""
    step = p ** (e1 - e0)
    R = _red_matrix(p, e1)
    return np.stack([R[k * step] for k in range(_phi(p, e0))])


def _cyclic_mul(A: np.ndarray, B: np.ndarray, n: int) -> np.ndarray:
    """Rowwise product of cyclic coefficient vectors, returned with n columns."""
    out = np.zeros((A.shape[0], n), dtype=np.int64)
    for i in range(A.shape[1]):
        a = A[:, i]
        if not a.any():
            continue
        for j in range(B.shape[1]):
            out[:, (i + j) % n] += a * B[:, j]
    return out


def _conj_cyclic(A: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros((A.shape[0], n), dtype=np.int64)
    for k in range(A.shape[1]):
        out[:, (-k) % n] += A[:, k]
    return out


def _as_cyclo(x, p: int, e: int) -> CycloNum:
    if isinstance(x, CycloNum):
        return x.at_level(max(e, x.e)) if x.e < e else x
    return CycloNum.from_rational(p, Fraction(x), e)


class ClassFunction:
    """A class function on ``group`` with values in Q(zeta_{p^e})."""

    __slots__ = ("group", "e", "coef", "den", "__weakref__")

    def __init__(self, group: FiniteGroup, coef, den: int = 1, e: int | None = None):
        self.group = group
        self.e = group_level(group) if e is None else e
        coef = np.asarray(coef, dtype=np.int64)
        if coef.shape != (group.num_classes, _phi(group.p, self.e)):
            raise CharError(f"coefficient array has shape {coef.shape}")
        if den <= 0:
            raise CharError("denominator must be positive")
        g = reduce(gcd, (int(x) for x in np.unique(np.abs(coef))), den)
        if g > 1:
            coef = coef // g
            den //= g
        self.coef = coef
        self.den = int(den)
        self.coef.setflags(write=False)

    # -- constructors
    @classmethod
    def from_values(cls, group: FiniteGroup, values: Sequence) -> "ClassFunction":
        if len(values) != group.num_classes:
            raise CharError("one value per class expected")
        p = group.p
        e = max([group_level(group)] + [v.e for v in values if isinstance(v, CycloNum)])
        vals = [_as_cyclo(v, p, e).at_level(e) for v in values]
        den = 1
        for v in vals:
            for c in v.coeffs:
                den = den * Fraction(c).denominator // gcd(den, Fraction(c).denominator)
        coef = np.array([[int(Fraction(c) * den) for c in v.coeffs] for v in vals], dtype=np.int64)
        return cls(group, coef, den, e)

    @classmethod
    def from_function(cls, group: FiniteGroup, func: Callable[[int], object]) -> "ClassFunction":
        return cls.from_values(group, [func(int(r)) for r in group.class_reps])

    @classmethod
    def constant(cls, group: FiniteGroup, c=1) -> "ClassFunction":
        return cls.from_values(group, [c] * group.num_classes)

    @classmethod
    def trivial(cls, group: FiniteGroup) -> "ClassFunction":
        return cls.constant(group, 1)

    @classmethod
    def regular(cls, group: FiniteGroup) -> "ClassFunction":
        vals = [0] * group.num_classes
        vals[int(group.class_of[group.identity])] = group.order
        return cls.from_values(group, vals)

    @classmethod
    def indicator(cls, group: FiniteGroup, class_index: int, weight=1) -> "ClassFunction":
        vals = [0] * group.num_classes
        vals[class_index] = weight
        return cls.from_values(group, vals)

    # -- views
    @property
    def p(self) -> int:
        return self.group.p

    @property
    def n(self) -> int:
        return self.p**self.e

    @property
    def values(self) -> tuple[CycloNum, ...]:
        return tuple(CycloNum(self.p, self.e, [Fraction(int(c), self.den) for c in row]) for row in self.coef)

    def value(self, class_index: int) -> CycloNum:
        return CycloNum(self.p, self.e, [Fraction(int(c), self.den) for c in self.coef[class_index]])

    def __call__(self, g: int) -> CycloNum:
        return self.value(int(self.group.class_of[g]))

    @property
    def degree(self):
        v = self(self.group.identity)
        return v.rational() if v.is_rational() else v

    def at_level(self, e: int) -> "ClassFunction":
        if e == self.e:
            return self
        if e < self.e:
            raise CharError("class functions are only coerced upward")
        return ClassFunction(self.group, self.coef @ _lift_matrix(self.p, self.e, e), self.den, e)

    def _align(self, other: "ClassFunction"):
        if other.group is not self.group:
            raise CharError("class functions on different groups")
        e = max(self.e, other.e)
        return self.at_level(e), other.at_level(e)

    # -- arithmetic
    def __add__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        a, b = self._align(other)
        den = a.den * b.den // gcd(a.den, b.den)
        return ClassFunction(a.group, a.coef * (den // a.den) + b.coef * (den // b.den), den, a.e)

    __radd__ = __add__

    def __neg__(self):
        return ClassFunction(self.group, -self.coef, self.den, self.e)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, np.integer, Fraction)):
            c = Fraction(other)
            return ClassFunction(self.group, self.coef * c.numerator, self.den * c.denominator, self.e)
        if isinstance(other, ClassFunction):
            a, b = self._align(other)
            cyc = _cyclic_mul(a.coef, b.coef, a.n)
            return ClassFunction(a.group, cyc @ _red_matrix(a.p, a.e), a.den * b.den, a.e)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (1 / Fraction(other))

    def conj(self) -> "ClassFunction":
        return ClassFunction(self.group, _conj_cyclic(self.coef, self.n) @ _red_matrix(self.p, self.e), self.den, self.e)

    def inner(self, other: "ClassFunction"):
        """<self, other> = |G|^-1 sum_C |C| self(C) conj(other(C)); a Fraction when rational."""
        a, b = self._align(other)
        cyc = _cyclic_mul(a.coef, _conj_cyclic(b.coef, a.n), a.n)
        total = (cyc * a.group.class_sizes[:, None]).sum(axis=0) @ _red_matrix(a.p, a.e)
        den = a.den * b.den * a.group.order
        if not total[1:].any():
            return Fraction(int(total[0]), den)
        return CycloNum(a.p, a.e, [Fraction(int(c), den) for c in total])

    def norm(self):
        return self.inner(self)

    def is_zero(self) -> bool:
        return not self.coef.any()

    def __eq__(self, other):
        if not isinstance(other, ClassFunction) or other.group is not self.group:
            return NotImplemented
        a, b = self._align(other)
        return a.den == b.den and np.array_equal(a.coef, b.coef)

    def __hash__(self):
        # lifting spreads coordinates without touching the constant term
        return hash((id(self.group), self.den, self.coef[:, 0].tobytes()))

    def key(self) -> tuple:
        return (self.den, tuple(int(x) for x in self.coef.ravel()))

    def kernel(self) -> np.ndarray:
        """Elements where the function equals its value at 1."""
        idc = int(self.group.class_of[self.group.identity])
        same = (self.coef == self.coef[idc]).all(axis=1)
        return np.nonzero(same[self.group.class_of])[0]

    def to_json(self) -> dict:
        return {"level": self.e, "values": [v.to_json() for v in self.values]}

    def __repr__(self):
        return f"ClassFunction({list(self.values)})"


# -- Dixon-Schneider ----------------------------------------------------------

def class_constants(G: FiniteGroup) -> np.ndarray:
    """a[r, i, j] = #{(x, y) in C_r x C_i : x y = z_j}."""
    cached = getattr(G, "_class_constants", None)
    if cached is not None:
        return cached
    k = G.num_classes
    a = np.zeros((k, k, k), dtype=np.int32)
    cls = G.class_of
    allg = np.arange(G.order)
    for j, z in enumerate(G.class_reps):
        y = G.table[G.inv[allg], z]
        a[:, :, j] = np.bincount(cls * k + cls[y], minlength=k * k).reshape(k, k)
    G._class_constants = a
    return a


def dixon_prime(G: FiniteGroup) -> int:
    E = G.exponent
    lo = 2 * isqrt(G.order) + 1
    l = ((lo - 1) // E + 1) * E + 1
    while not isprime(l) or l <= 2 * (G.order ** 0.5):
        l += E
    return l


def _nullspace_mod(A: np.ndarray, l: int) -> np.ndarray:
    """Basis of {v : A v = 0 mod l}; columns, with identity on the free coordinates."""
    A = np.array(A, dtype=np.int64) % l
    m, n = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(A[r:, c])[0]
        if len(nz) == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            A[[r, pr]] = A[[pr, r]]
        A[r] = (A[r] * pow(int(A[r, c]), -1, l)) % l
        others = np.nonzero(A[:, c])[0]
        others = others[others != r]
        if len(others):
            A[others] = (A[others] - np.outer(A[others, c], A[r])) % l
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in set(pivots)]
    N = np.zeros((n, len(free)), dtype=np.int64)
    for t, f in enumerate(free):
        N[f, t] = 1
        for i, pc in enumerate(pivots):
            N[pc, t] = (-A[i, f]) % l
    return N


def _min_poly_roots(A: np.ndarray, l: int, rng: np.random.Generator) -> list[int]:
    """Roots in F_l of the minimal polynomial of a random Krylov vector of A."""
    d = A.shape[0]
    v = rng.integers(0, l, size=d)
    K = [v]
    while True:
        w = (A @ K[-1]) % l
        M = np.stack(K + [w], axis=1)
        ns = _nullspace_mod(M, l)
        if ns.shape[1]:
            # the last column is pivot-free only when it depends on the others
            coeffs = ns[:, -1]
            break
        K.append(w)
    lam = np.arange(l, dtype=np.int64)
    val = np.zeros(l, dtype=np.int64)
    for c in coeffs[::-1]:
        val = (val * lam + int(c)) % l
    return [int(x) for x in np.nonzero(val == 0)[0]]


def _dixon_mod(G: FiniteGroup, l: int) -> list[np.ndarray]:
    """Simultaneous eigenvectors of the class matrices mod l, normalized at the identity class."""
    a = class_constants(G)
    k = G.num_classes
    rng = np.random.default_rng(12345)
    spaces = [(np.eye(k, dtype=np.int64), list(range(k)))]
    done: list[np.ndarray] = []
    for r in range(k):
        if not spaces:
            break
        M = a[r].astype(np.int64) % l
        nxt = []
        for V, P in spaces:
            d = V.shape[1]
            A = (M @ V)[P] % l
            pieces = []
            roots = _min_poly_roots(A, l, rng)
            for lam in roots:
                B = _nullspace_mod((A - lam * np.eye(d, dtype=np.int64)) % l, l)
                if B.shape[1]:
                    pieces.append(B)
            if sum(B.shape[1] for B in pieces) != d:
                pieces = []
                for lam in range(l):
                    B = _nullspace_mod((A - lam * np.eye(d, dtype=np.int64)) % l, l)
                    if B.shape[1]:
                        pieces.append(B)
            for B in pieces:
                W = (V @ B) % l
                # rows where W restricts to the identity
                Pn = [P[f] for f in _identity_rows(B)]
                if W.shape[1] == 1:
                    done.append(W[:, 0])
                else:
                    nxt.append((W, Pn))
        spaces = nxt
    if spaces:
        raise CharError("class matrices failed to split the class algebra")
    idc = int(G.class_of[G.identity])
    out = []
    for w in done:
        if w[idc] == 0:
            raise CharError("eigenvector vanishes at the identity class")
        out.append((w * pow(int(w[idc]), -1, l)) % l)
    return out


def _identity_rows(B: np.ndarray) -> list[int]:
    rows = []
    for t in range(B.shape[1]):
        col = B[:, t]
        for i in np.nonzero(col == 1)[0]:
            if (B[i] == np.eye(B.shape[1], dtype=np.int64)[t]).all():
                rows.append(int(i))
                break
        else:
            raise CharError("lost echelon structure")
    return rows


def _lift_characters(G: FiniteGroup, omegas: list[np.ndarray], l: int) -> list[np.ndarray]:
    """Cyclic integer arrays (k x E) of the irreducible characters."""
    E = G.exponent
    k = G.num_classes
    h = G.class_sizes
    inv_cls = G.inverse_class
    Z = pow(primitive_root(l), (l - 1) // E, l)
    orders = G.element_orders[G.class_reps]
    pmaps = {}
    for n in set(orders.tolist()):
        pmaps[n] = np.stack([G.power_map(t) for t in range(n)], axis=1)  # k x n
    out = []
    for w in omegas:
        s = sum(int(w[r]) * int(w[inv_cls[r]]) * pow(int(h[r]), -1, l) for r in range(k)) % l
        d2 = (G.order * pow(s, -1, l)) % l
        d = next((x for x in range(1, isqrt(G.order) + 1) if G.order % x == 0 and (x * x) % l == d2), None)
        if d is None:
            raise CharError("no admissible degree found")
        chi = np.array([(d * int(w[r]) * pow(int(h[r]), -1, l)) % l for r in range(k)], dtype=np.int64)
        X = np.zeros((k, E), dtype=np.int64)
        for r in range(k):
            n = int(orders[r])
            zn = pow(Z, E // n, l)
            vals = chi[pmaps[n][r]]
            inv_n = pow(n, -1, l)
            for j in range(n):
                m = sum(int(vals[t]) * pow(zn, (-j * t) % n, l) for t in range(n)) * inv_n % l
                if m > d:
                    raise CharError("eigenvalue multiplicity lift out of range")
                X[r, j * (E // n)] = m
        out.append(X)
    return out


def verify_orthogonality(G: FiniteGroup, X: np.ndarray) -> bool:
    """Exact check of <chi_a, chi_b> = delta_ab from cyclic integer arrays (chars x classes x E)."""
    E = X.shape[2]
    kc = X.shape[0]
    Xh = (X * G.class_sizes[None, :, None]).reshape(kc, -1)
    gram = np.zeros((kc, kc, E), dtype=np.int64)
    for delta in range(E):
        Xs = np.roll(X, delta, axis=2).reshape(kc, -1)
        gram[:, :, delta] = Xh @ Xs.T
    e = _log_p(E, G.p)
    red = gram @ _red_matrix(G.p, e)
    target = np.zeros_like(red)
    target[np.arange(kc), np.arange(kc), 0] = G.order
    return bool(np.array_equal(red, target))


@dataclass
class Decomposition:
    """Multiplicities <f, chi_i>; ``is_character`` is False when some are not nonnegative integers."""

    multiplicities: list
    is_character: bool
    reconstructs: bool
    issues: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.multiplicities)

    def as_dict(self) -> dict:
        return dict(self.multiplicities)

    def constituents(self) -> list[int]:
        return [i for i, _ in self.multiplicities]


class CharacterTable:
    def __init__(self, group: FiniteGroup, irreducibles: list[ClassFunction]):
        self.group = group
        self.irreducibles = irreducibles
        self.degrees = [int(chi.degree) for chi in irreducibles]
        self._index = {chi: i for i, chi in enumerate(irreducibles)}

    def __len__(self):
        return len(self.irreducibles)

    def __getitem__(self, i) -> ClassFunction:
        return self.irreducibles[i]

    def __iter__(self):
        return iter(self.irreducibles)

    def index(self, chi: ClassFunction) -> int:
        return self._index[chi]

    def decompose(self, f: ClassFunction) -> Decomposition:
        mults, issues = [], []
        recon = None
        ok = True
        for i, chi in enumerate(self.irreducibles):
            m = f.inner(chi)
            if m == 0:
                continue
            mults.append((i, m))
            if not (isinstance(m, Fraction) and m.denominator == 1 and m > 0):
                ok = False
                issues.append({"irreducible": i, "multiplicity": str(m)})
            if isinstance(m, Fraction):
                term = chi * m
            else:
                term = chi * ClassFunction.constant(self.group, m)
            recon = term if recon is None else recon + term
        reconstructs = (recon == f) if recon is not None else f.is_zero()
        if not reconstructs:
            issues.append({"reconstruction": "failed"})
        return Decomposition(mults, ok and reconstructs, reconstructs, issues)

    def with_central_character(self, Z: Subgroup, lam: "LinearChar") -> list[int]:
        """Irreducibles whose restriction to the central subgroup Z is degree * psi(lam)."""
        out = []
        for i, chi in enumerate(self.irreducibles):
            d = self.degrees[i]
            if all(chi(int(z)) == psi_value(lam(int(z))) * d for z in Z.members):
                out.append(i)
        return out

    def verify(self) -> bool:
        G = self.group
        if sum(d * d for d in self.degrees) != G.order:
            return False
        if len(self.irreducibles) != G.num_classes:
            return False
        E = G.exponent
        e = _log_p(E, G.p)
        X = np.stack([_cyclic_of(chi.at_level(e)) for chi in self.irreducibles])
        return verify_orthogonality(G, X)

    def value_matrix(self) -> list[list[CycloNum]]:
        return [list(chi.values) for chi in self.irreducibles]

    def to_json(self) -> dict:
        G = self.group
        return {
            "order": G.order,
            "classes": [{"representative": list(G.enc(int(r))), "size": int(s)}
                        for r, s in zip(G.class_reps, G.class_sizes)],
            "degrees": self.degrees,
            "irreducibles": [chi.to_json()["values"] for chi in self.irreducibles],
        }


def _cyclic_of(chi: ClassFunction) -> np.ndarray:
    if chi.den != 1:
        raise CharError("expected integral coefficients")
    X = np.zeros((chi.coef.shape[0], chi.n), dtype=np.int64)
    X[:, : chi.coef.shape[1]] = chi.coef
    return X


def character_table(G: FiniteGroup) -> CharacterTable:
    cached = getattr(G, "_char_table", None)
    if cached is not None:
        return cached
    if G.is_abelian() and G.order > 64:
        chars = [lc.to_class_function() for lc in linear_characters(G)]
        X = None
    else:
        l = dixon_prime(G)
        omegas = _dixon_mod(G, l)
        Xs = _lift_characters(G, omegas, l)
        e = group_level(G)
        R = _red_matrix(G.p, e)
        chars = [ClassFunction(G, X @ R, 1, e) for X in Xs]
        X = np.stack(Xs)
    triv = ClassFunction.trivial(G)
    chars.sort(key=lambda c: (int(c.degree), c != triv, c.key()))
    table = CharacterTable(G, chars)
    if X is not None and not (verify_orthogonality(G, X) and sum(d * d for d in table.degrees) == G.order):
        raise CharError("character table failed exact verification")
    G._char_table = table
    return table


# -- induction, restriction, convolution ---------------------------------------

def _check_sub(H: Subgroup, G: FiniteGroup | None = None):
    if not isinstance(H, Subgroup):
        raise CharError("expected a Subgroup")
    if G is not None and H.parent is not G:
        raise CharError("subgroup is not contained in the group")


def induce(H: Subgroup, f: ClassFunction) -> ClassFunction:
    """Ind_H^G f for f a class function on ``H.as_group()``."""
    _check_sub(H)
    if f.group is H.parent and H.order == H.parent.order:
        return f
    Hg = H.as_group()
    if f.group is not Hg:
        raise CharError("class function does not live on the subgroup")
    G = H.parent
    eG = max(group_level(G), f.e)
    f = f.at_level(eG)
    target = G.class_of[H.members[Hg.class_reps]]
    acc = np.zeros((G.num_classes, f.coef.shape[1]), dtype=object)
    for d, c in enumerate(target):
        acc[c] += f.coef[d].astype(object) * int(Hg.class_sizes[d])
    # Ind f(C) = |G| / (|H| |C|) * sum_{d in C} |d| f(d)
    den_all = f.den * H.order
    scale = [Fraction(G.order, int(G.class_sizes[c])) for c in range(G.num_classes)]
    L = 1
    for s in scale:
        L = L * s.denominator // gcd(L, s.denominator)
    rows = [[int(x) * int(s * L) for x in acc[c]] for c, s in enumerate(scale)]
    return ClassFunction(G, np.array(rows, dtype=np.int64), den_all * L, eG)


def restrict(H: Subgroup, f: ClassFunction) -> ClassFunction:
    _check_sub(H)
    if f.group is not H.parent:
        raise CharError("class function is not on the parent group")
    Hg = H.as_group()
    rows = f.coef[H.parent.class_of[H.members[Hg.class_reps]]]
    return ClassFunction(Hg, rows, f.den, f.e)


def convolve(f: ClassFunction, g: ClassFunction) -> ClassFunction:
    """(f * g)(x) = sum_y f(y) g(y^-1 x)."""
    if f.group is not g.group:
        raise CharError("convolution of class functions on different groups")
    a, b = f._align(g)
    G = a.group
    T = class_constants(G).astype(np.int64)
    k = G.num_classes
    out = np.zeros((k, a.n), dtype=np.int64)
    for r in range(k):
        if not a.coef[r].any():
            continue
        prod = _cyclic_mul(np.repeat(a.coef[r:r + 1], k, axis=0), b.coef, a.n)  # i x n
        out += T[r].T @ prod
    return ClassFunction(G, out @ _red_matrix(a.p, a.e), a.den * b.den, a.e)


def mackey_irreducible(H: Subgroup, rho: ClassFunction) -> bool:
    """Is Ind_H^G rho irreducible?  Norm test and double-coset test must agree."""
    ind = induce(H, rho)
    norm_ok = ind.norm() == 1
    G = H.parent
    Hg = rho.group
    mackey_ok = rho.norm() == 1
    if mackey_ok:
        seen = H.mask.copy()
        for g in range(G.order):
            if seen[g]:
                continue
            dc = np.unique(G.table[G.table[H.members[:, None], g], H.members[None, :]].ravel())
            seen[dc] = True
            # K = H ∩ g^-1 H g ; compare rho and x -> rho(g x g^-1) on K
            conjH = G.conj(H.members, g)
            K = conjH[H.mask[conjH]]
            back = G.table[G.table[g, K], G.inv[g]]
            whole = Hg is G
            ca = Hg.class_of[K if whole else H.local_index(K)]
            cb = Hg.class_of[back if whole else H.local_index(back)]
            pairs, counts = np.unique(np.stack([ca, cb], axis=1), axis=0, return_counts=True)
            total = None
            for (x, y), c in zip(pairs, counts):
                term = rho.value(int(x)) * rho.value(int(y)).conj() * int(c)
                total = term if total is None else total + term
            if total:
                mackey_ok = False
                break
    if norm_ok != mackey_ok:
        raise CharError("Mackey double-coset test disagrees with the norm test")
    return norm_ok


# -- linear characters ---------------------------------------------------------

def psi_value(v: MuVal) -> CycloNum:
    return CycloNum.zeta(v.p, v.e, v.a)


class LinearChar:
    """A homomorphism from a (sub)group to mu, stored as residues a with chi(g) = a / p^e."""

    def __init__(self, domain: FiniteGroup | Subgroup, residues, e: int):
        self.domain = domain
        if isinstance(domain, Subgroup):
            self.group = domain.parent
            self.members = domain.members
        else:
            self.group = domain
            self.members = np.arange(domain.order)
        self.e = e
        self.residues = np.asarray(residues, dtype=np.int64) % (self.p**e)
        if self.residues.shape != (len(self.members),):
            raise CharError("one residue per domain element expected")
        full = np.full(self.group.order, -1, dtype=np.int64)
        full[self.members] = self.residues
        self._full = full

    @property
    def p(self) -> int:
        return self.group.p

    @property
    def subgroup(self) -> Subgroup:
        return self.domain if isinstance(self.domain, Subgroup) else self.group.whole()

    def residue(self, g) -> int | np.ndarray:
        r = self._full[g]
        if np.any(r < 0):
            raise CharError("element outside the domain")
        return r if np.ndim(r) else int(r)

    def __call__(self, g) -> MuVal:
        return MuVal(self.p, self.e, self.residue(int(g)))

    def at_level(self, e: int) -> "LinearChar":
        if e < self.e:
            if (self.residues % self.p ** (self.e - e)).any():
                raise CharError("cannot lower the level")
            return LinearChar(self.domain, self.residues // self.p ** (self.e - e), e)
        return LinearChar(self.domain, self.residues * self.p ** (e - self.e), e)

    def is_trivial(self) -> bool:
        return not self.residues.any()

    def is_homomorphism(self) -> bool:
        t = self.group.table
        sub = t[np.ix_(self.members, self.members)]
        if (self._full[sub] < 0).any():
            return False
        lhs = self._full[sub]
        rhs = (self.residues[:, None] + self.residues[None, :]) % self.p**self.e
        return bool((lhs == rhs).all())

    def conjugate(self, g: int) -> "LinearChar":
        """chi^g on g^-1 H g, chi^g(x) = chi(g x g^-1)."""
        G = self.group
        H = self.subgroup
        Hc = G.conjugate(H, g)
        back = G.table[G.table[g, Hc.members], G.inv[g]]
        return LinearChar(Hc, self._full[back], self.e)

    def restrict(self, K: Subgroup) -> "LinearChar":
        return LinearChar(K, self.residue(K.members), self.e)

    def to_class_function(self) -> ClassFunction:
        """psi o chi as a class function on the domain group."""
        Hg = self.domain.as_group() if isinstance(self.domain, Subgroup) else self.domain
        reps = Hg.class_reps
        e = max(self.e, group_level(Hg))
        chi = self.at_level(e)
        return ClassFunction.from_values(Hg, [CycloNum.zeta(self.p, e, int(chi.residues[r])) for r in reps])

    def reduced_residues(self) -> tuple:
        e = self.e
        res = self.residues
        while e > 0 and not (res % self.p).any():
            res = res // self.p
            e -= 1
        return (e, res.tobytes())

    def __eq__(self, other):
        return isinstance(other, LinearChar) and other.group is self.group and \
            np.array_equal(self.members, other.members) and self.reduced_residues() == other.reduced_residues()

    def __hash__(self):
        return hash((id(self.group), self.members.tobytes(), self.reduced_residues()))

    def __add__(self, other: "LinearChar") -> "LinearChar":
        if not np.array_equal(self.members, other.members):
            raise CharError("characters on different domains")
        e = max(self.e, other.e)
        return LinearChar(self.domain, self.at_level(e).residues + other.at_level(e).residues, e)

    def __repr__(self):
        return f"LinearChar(|H|={len(self.members)}, e={self.e})"

    def to_json(self) -> dict:
        return {"level": self.e, "domain_order": int(len(self.members)),
                "values": {",".join(map(str, self.group.enc(int(g)))): f"{int(a)}/{self.p**self.e}"
                           for g, a in zip(self.members, self.residues)}}


def linear_characters(G: FiniteGroup | Subgroup) -> list[LinearChar]:
    """All homomorphisms to mu, via the abelianization (deterministic order)."""
    if isinstance(G, Subgroup):
        Hg = G.as_group()
        return [LinearChar(G, lc.residues, lc.e) for lc in linear_characters(Hg)]
    comm = G.commutator_subgroup()
    quo = G.quotient(comm)
    Q = quo.group
    gens, orders, exps = Q.abelian_basis()
    p = G.p
    E = max(orders) if orders else 1
    e = _log_p(E, p)
    out = []
    coords = exps[quo.projection]  # element -> exponent vector
    import itertools
    for avec in itertools.product(*[range(n) for n in orders]):
        res = np.zeros(G.order, dtype=np.int64)
        for a, n, col in zip(avec, orders, coords.T):
            res += a * col * (E // n)
        out.append(LinearChar(G, res % E, e))
    return out


def extend_characters(chi: LinearChar, target: Subgroup, first_only: bool = True) -> list[LinearChar]:
    """Extensions of chi (on H) to target >= H, by depth-first search over generators.

    Values are tried in increasing residue order, so the first result is canonical.
    """
    G = chi.group
    H = chi.subgroup
    if not H.issubset(target):
        raise CharError("target does not contain the domain")
    e = max(chi.e, _log_p(target.as_group().exponent, G.p))
    base = chi.at_level(e)
    mod = G.p**e
    results: list[LinearChar] = []

    def dfs(members: np.ndarray, vals: np.ndarray):
        if len(members) == target.order:
            results.append(LinearChar(target, vals, e))
            return
        cur = np.zeros(G.order, dtype=bool)
        cur[members] = True
        rest = target.members[~cur[target.members]]
        # pick a generator normalizing the current subgroup so the cosets t^j * cur form a group
        t = next((int(x) for x in rest if cur[G.conj(members, int(x))].all()), int(rest[0]))
        # order of t modulo the current subgroup
        k, x = 1, t
        while not cur[x]:
            x = int(G.table[x, t])
            k += 1
        full = np.full(G.order, -1, dtype=np.int64)
        full[members] = vals
        target_val = int(full[x])
        for v in range(mod):
            if (k * v - target_val) % mod:
                continue
            new_m, new_v = [members], [vals]
            tj = G.identity
            for j in range(1, k):
                tj = int(G.table[tj, t])
                new_m.append(G.table[tj, members])
                new_v.append((vals + j * v) % mod)
            m2 = np.concatenate(new_m)
            v2 = np.concatenate(new_v)
            cand = LinearChar(Subgroup(G, m2), v2[np.argsort(m2)], e)
            if len(np.unique(m2)) == len(m2) and cand.is_homomorphism():
                dfs(cand.members, cand.residues)
                if first_only and results:
                    return

    dfs(base.members, base.residues)
    return results
