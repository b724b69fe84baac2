"""Additive (linearized) polynomials and realization of F_p-subspaces."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..gf import Field, FieldError, make_field


class RealizationError(ValueError):
    pass


@dataclass(frozen=True)
class LinearizedPoly:
    """sum_i c_i x^(p^i) with coefficients in ``base``."""

    base: Field
    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(int(x) for x in c))

    @classmethod
    def identity(cls, base: Field) -> "LinearizedPoly":
        return cls(base, (1,))

    @classmethod
    def zero(cls, base: Field) -> "LinearizedPoly":
        return cls(base, ())

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x, F: Field | None = None):
        """Evaluate at x in ``F`` (default: the base field); F must contain the base."""
        F = self.base if F is None else F
        x = np.asarray(x, dtype=np.int64)
        acc = np.zeros_like(x)
        for i, c in enumerate(self.coeffs):
            if c:
                cF = F.embed_from(c, self.base)
                acc = F.add(acc, F.mul(cF, F.pow(x, self.base.p**i)))
        return int(acc) if acc.ndim == 0 else acc

    def compose(self, other: "LinearizedPoly") -> "LinearizedPoly":
        """(self o other)(x) = self(other(x)); mirrors twisted multiplication."""
        F = self.base
        out: dict[int, int] = {}
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                if a and b:
                    t = F.mul(a, F.pow(b, F.p**i))
                    out[i + j] = F.add(out.get(i + j, 0), t)
        deg = max(out, default=-1)
        return LinearizedPoly(F, tuple(out.get(k, 0) for k in range(deg + 1)))

    def reduce_mod_frobenius(self) -> "LinearizedPoly":
        """Fold x^(p^(i+r)) = x^(p^i), valid as functions on the base field."""
        F = self.base
        out = [0] * F.r
        for i, c in enumerate(self.coeffs):
            out[i % F.r] = F.add(out[i % F.r], c)
        return LinearizedPoly(F, tuple(out))

    def __add__(self, other: "LinearizedPoly") -> "LinearizedPoly":
        F = self.base
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return LinearizedPoly(F, tuple(F.add(x, y) for x, y in zip(a, b)))

    def to_json(self) -> dict:
        return {"field": self.base.name, "coeffs": list(self.coeffs)}

    def __repr__(self):
        terms = [f"{c}*x^{self.base.p}^{i}" if i else f"{c}*x" for i, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) or "0"


def map_matrix(F: Field, func) -> np.ndarray:
    """r x r matrix over F_p of an F_p-linear map on F (acting on coordinate columns)."""
    M = np.zeros((F.r, F.r), dtype=np.int64)
    for j in range(F.r):
        M[:, j] = F.digits[int(func(F.p**j))]
    return M


def apply_matrix(F: Field, M: np.ndarray, x):
    x = np.asarray(x, dtype=np.int64)
    return ((F.digits[x] @ M.T) % F.p) @ F.pw


def _solve_field(F: Field, A: list[list[int]], y: list[int]) -> list[int]:
    """Solve A c = y over F by Gauss-Jordan elimination."""
    n = len(A)
    M = [list(row) + [yy] for row, yy in zip(A, y)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            raise FieldError("singular Moore matrix")
        M[col], M[piv] = M[piv], M[col]
        inv = F.inv(M[col][col])
        M[col] = [F.mul(v, inv) for v in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [F.sub(a, F.mul(f, b)) for a, b in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def moore_solve(M, F: Field) -> LinearizedPoly:
    """The unique sum_{i<r} c_i x^(p^i) agreeing with the F_p-linear map M on all of F."""
    M = np.asarray(M, dtype=np.int64) % F.p
    if M.shape != (F.r, F.r):
        raise RealizationError("matrix size does not match the field degree")
    basis = [F.p**j for j in range(F.r)]
    moore = [[F.pow(b, F.p**i) for i in range(F.r)] for b in basis]
    rhs = [int(apply_matrix(F, M, b)) for b in basis]
    return LinearizedPoly(F, tuple(_solve_field(F, moore, rhs)))


# -- subspaces of F_q^n -------------------------------------------------------

def fp_span(F: Field, gens: np.ndarray) -> np.ndarray:
    """All F_p-combinations of the rows of ``gens`` (vectors over F), sorted by mixed radix."""
    n = gens.shape[1] if gens.ndim == 2 else 0
    span = {tuple([0] * n)}
    for g in gens:
        new = set(span)
        for v in span:
            w = np.array(v, dtype=np.int64)
            for _ in range(F.p - 1):
                w = F.add(w, g)
                new.add(tuple(int(x) for x in w))
        span = new
    return np.array(sorted(span), dtype=np.int64).reshape(-1, n)


def fp_basis(F: Field, vectors: np.ndarray) -> np.ndarray:
    """A greedy F_p-basis of the set of vectors (first independent ones in the given order)."""
    basis = []
    seen = {tuple([0] * vectors.shape[1])}
    for v in vectors:
        t = tuple(int(x) for x in v)
        if t in seen:
            continue
        basis.append(v)
        seen = {tuple(int(x) for x in w) for w in fp_span(F, np.array(basis))}
    return np.array(basis, dtype=np.int64).reshape(-1, vectors.shape[1])


@dataclass
class Realization:
    """An additive-polynomial map f : F_q^k -> F_q^n (entries ``polys[i][j]``) with image L."""

    base: Field
    n: int
    k: int
    polys: tuple

    def apply(self, X: np.ndarray, m: int = 1) -> np.ndarray:
        F = make_field(self.base.p, self.base.r * m)
        X = np.atleast_2d(np.asarray(X, dtype=np.int64))
        out = np.zeros((X.shape[0], self.n), dtype=np.int64)
        for i in range(self.n):
            for j in range(self.k):
                f = self.polys[i][j]
                if not f.is_zero():
                    out[:, i] = F.add(out[:, i], f(X[:, j], F))
        return out

    def points(self, m: int = 1) -> np.ndarray:
        """f(A'(F_{q^m})) as sorted unique rows."""
        F = make_field(self.base.p, self.base.r * m)
        total = F.q**self.k
        if total > 1 << 20:
            raise RealizationError("base change too large to enumerate")
        idx = np.arange(total)
        X = np.zeros((total, self.k), dtype=np.int64)
        for t in range(self.k - 1, -1, -1):
            X[:, t] = idx % F.q
            idx //= F.q
        return np.unique(self.apply(X, m), axis=0)

    def base_change_ok(self, max_m: int = 3, limit: int = 1 << 16) -> dict:
        """|f(A'(F_{q^m}))| = q^(km) for each m <= max_m that is small enough to enumerate."""
        out = {}
        for m in range(1, max_m + 1):
            if self.base.q ** (self.k * m) > limit:
                break
            out[m] = len(self.points(m)) == self.base.q ** (self.k * m)
        return out

    def describe(self) -> dict:
        return {"kind": "additive", "k": self.k, "n": self.n,
                "polys": [[f.to_json()["coeffs"] for f in row] for row in self.polys]}


def realize_subgroup(L, F: Field, n: int | None = None, *, tries: int = 16, seed: int = 0,
                     check_levels: int = 3) -> Realization:
    """Realize an F_p-subspace L of F^n with |L| = q^k as the image of F^k under additive polynomials.

    The first candidate uses the greedy basis of L; further candidates permute and
    recombine it until the base change to F_{q^m} stays injective for m <= check_levels.
    """
    L = np.unique(np.atleast_2d(np.asarray(L, dtype=np.int64)), axis=0)
    n = L.shape[1] if n is None else n
    q = F.q
    size = len(L)
    k = 0
    while q**k < size:
        k += 1
    if q**k != size:
        raise RealizationError(f"|L| = {size} is not a power of q = {q}")
    span = fp_span(F, fp_basis(F, L))
    if len(span) != size or not np.array_equal(span, L):
        raise RealizationError("L is not closed under addition")
    if k == 0:
        return Realization(F, n, 0, tuple(() for _ in range(n)))
    B = fp_basis(F, L)  # (k*r) x n
    rng = np.random.default_rng(seed)
    order = np.arange(len(B))
    for attempt in range(tries):
        if attempt:
            # random invertible F_p-recombination of the basis
            while True:
                T = rng.integers(0, F.p, size=(len(B), len(B)))
                if _rank_mod(T, F.p) == len(B):
                    break
            Bt = np.array([_fp_comb(F, T[i], B) for i in range(len(B))])
        else:
            Bt = B[order]
        polys = []
        for i in range(n):
            row = []
            for j in range(k):
                # coordinate i of the image of the j-th F_q factor: basis element p^s -> Bt[j*r+s, i]
                images = [int(Bt[j * F.r + s, i]) for s in range(F.r)]
                M = np.stack([F.digits[v] for v in images], axis=1)
                row.append(moore_solve(M, F))
            polys.append(tuple(row))
        R = Realization(F, n, k, tuple(polys))
        if not np.array_equal(R.points(1), L):
            continue
        checks = R.base_change_ok(check_levels)
        if all(checks.values()):
            return R
    raise RealizationError("no realization passed the base-change check")


def _fp_comb(F: Field, coeffs, vectors) -> np.ndarray:
    acc = np.zeros(vectors.shape[1], dtype=np.int64)
    for c, v in zip(coeffs, vectors):
        for _ in range(int(c)):
            acc = F.add(acc, v)
    return acc


def _rank_mod(A: np.ndarray, p: int) -> int:
    A = np.array(A, dtype=np.int64) % p
    r = 0
    rows, cols = A.shape
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i, c]), None)
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * pow(int(A[r, c]), -1, p)) % p
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] = (A[i] - A[i, c] * A[r]) % p
        r += 1
    return r


def all_subspaces(F: Field, n: int, size: int) -> list[np.ndarray]:
    """Every F_p-subspace of F^n of the given order (small cases only)."""
    total = F.q**n
    vecs = np.array(list(itertools.product(range(F.q), repeat=n)), dtype=np.int64)
    dim = 0
    while F.p**dim < size:
        dim += 1
    seen = set()
    out = []
    for combo in itertools.combinations(range(1, total), dim):
        S = fp_span(F, vecs[list(combo)])
        if len(S) != size:
            continue
        key = S.tobytes()
        if key not in seen:
            seen.add(key)
            out.append(S)
    return out


def moore_correspondence(F: Field) -> dict:
    """Run moore_solve on every F_p-linear map of F and check agreement and injectivity."""
    r, p = F.r, F.p
    elems = np.arange(F.q)
    seen = set()
    agree = True
    count = 0
    for entries in itertools.product(range(p), repeat=r * r):
        M = np.array(entries, dtype=np.int64).reshape(r, r)
        f = moore_solve(M, F)
        if not np.array_equal(f(elems), apply_matrix(F, M, elems)):
            agree = False
        seen.add(f.coeffs + (0,) * (r - len(f.coeffs)))
        count += 1
    return {"field": F.name, "maps": count, "distinct_polynomials": len(seen),
            "coefficient_vectors": F.q**r, "agree": agree,
            "bijection": agree and len(seen) == count == F.q**r}
