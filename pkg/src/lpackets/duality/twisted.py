"""Twisted Laurent polynomials k{tau, tau^-1} with tau c = c^p tau, and the isotropic search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ..gf import Field, make_field


class TwistedError(ValueError):
    pass


class TwistedPoly:
    """sum_j c_j tau^j over a finite field k (coefficients stored as a sparse dict)."""

    __slots__ = ("k", "coeffs")

    def __init__(self, k: Field, coeffs: dict | None = None):
        self.k = k
        self.coeffs = {int(j): int(c) for j, c in (coeffs or {}).items() if c}

    @classmethod
    def const(cls, k: Field, c: int) -> "TwistedPoly":
        return cls(k, {0: c})

    @classmethod
    def tau(cls, k: Field, j: int = 1, c: int = 1) -> "TwistedPoly":
        return cls(k, {j: c})

    @classmethod
    def random(cls, k: Field, rng: np.random.Generator, lo: int = -1, hi: int = 1) -> "TwistedPoly":
        return cls(k, {j: int(rng.integers(0, k.q)) for j in range(lo, hi + 1)})

    def _check(self, other: "TwistedPoly"):
        if not isinstance(other, TwistedPoly):
            raise TwistedError("expected a twisted polynomial")
        if other.k is not self.k:
            raise TwistedError("base field mismatch")

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for j, c in other.coeffs.items():
            out[j] = self.k.add(out.get(j, 0), c)
        return TwistedPoly(self.k, out)

    def __neg__(self):
        return TwistedPoly(self.k, {j: self.k.neg(c) for j, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        return twisted_mul(self, other)

    def star(self) -> "TwistedPoly":
        return twisted_star(self)

    def __eq__(self, other):
        return isinstance(other, TwistedPoly) and other.k is self.k and other.coeffs == self.coeffs

    def __hash__(self):
        return hash((self.k.p, self.k.r, tuple(sorted(self.coeffs.items()))))

    def is_zero(self) -> bool:
        return not self.coeffs

    def support(self) -> tuple[int, int] | None:
        if not self.coeffs:
            return None
        return min(self.coeffs), max(self.coeffs)

    def coefficient(self, j: int) -> int:
        return self.coeffs.get(j, 0)

    def embed(self, K: Field) -> "TwistedPoly":
        return TwistedPoly(K, {j: K.embed_from(c, self.k) for j, c in self.coeffs.items()})

    def to_json(self) -> dict:
        return {"field": self.k.name, "terms": {str(j): c for j, c in sorted(self.coeffs.items())}}

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c}*t^{j}" for j, c in sorted(self.coeffs.items()))


def twisted_mul(f: TwistedPoly, g: TwistedPoly) -> TwistedPoly:
    """(a tau^i)(b tau^j) = a b^(p^i) tau^(i+j)."""
    f._check(g)
    k = f.k
    out: dict[int, int] = {}
    for i, a in f.coeffs.items():
        for j, b in g.coeffs.items():
            t = k.mul(a, k.frobenius(b, i))
            out[i + j] = k.add(out.get(i + j, 0), t)
    return TwistedPoly(k, out)


def twisted_star(f: TwistedPoly) -> TwistedPoly:
    """(c tau^j)* = tau^-j c = c^(p^-j) tau^-j."""
    k = f.k
    return TwistedPoly(k, {-j: k.frobenius(c, -j) for j, c in f.coeffs.items()})


def is_skewsymmetric(f: TwistedPoly) -> bool:
    """Membership in the F_p-span of {tau^j c - c tau^-j}: c_0 = 0 and c_-j = -c_j^(p^-j)."""
    k = f.k
    if f.coefficient(0):
        return False
    js = {abs(j) for j in f.coeffs}
    for j in js:
        if k.neg(k.frobenius(f.coefficient(j), -j)) != f.coefficient(-j):
            return False
    return True


def skew_part(c: int, j: int, k: Field) -> TwistedPoly:
    """tau^j c - c tau^-j."""
    return TwistedPoly.tau(k, j) * TwistedPoly.const(k, c) - TwistedPoly.const(k, c) * TwistedPoly.tau(k, -j)


def F_eval(a: TwistedPoly, b: TwistedPoly, d: TwistedPoly, x: TwistedPoly, y: TwistedPoly) -> TwistedPoly:
    """F(x, y) = x* a x - y* b* x + x* b y + y* d y."""
    if not (is_skewsymmetric(a) and is_skewsymmetric(d)):
        raise TwistedError("a and d must be skewsymmetric")
    xs, ys = x.star(), y.star()
    return xs * a * x - ys * b.star() * x + xs * b * y + ys * d * y


# -- isotropic search -----------------------------------------------------------

@dataclass
class SearchResult:
    found: bool
    x: TwistedPoly | None = None
    y: TwistedPoly | None = None
    m: int | None = None
    N: int | None = None
    transcript: list = field(default_factory=list)
    status: str = ""

    def to_json(self) -> dict:
        out = {"found": self.found, "status": self.status, "transcript": self.transcript}
        if self.found:
            out.update({"m": self.m, "N": self.N, "x": self.x.to_json(), "y": self.y.to_json()})
        return out


def _F_batch(K: Field, a: dict, bs: dict, b: dict, d: dict, X: np.ndarray, Y: np.ndarray, N: int) -> dict:
    """Coefficients of F(x, y) for a batch of (x, y); columns of X, Y are exponents -N..N."""
    out: dict[int, np.ndarray] = {}
    B = X.shape[0]

    def term(U, coef, V, sign):
        # sum over u_i tau^i (u)^* ... : (u_i tau^i)^* c tau^j (v_l tau^l)
        # = u_i^(p^-i) c^(p^-i) v_l^(p^(j-i)) tau^(j+l-i)
        for i in range(-N, N + 1):
            ui = U[:, i + N]
            if not ui.any():
                continue
            ui_t = K.frobenius(ui, -i)
            for j, c in coef.items():
                cij = K.frobenius(c, -i)
                for l in range(-N, N + 1):
                    vl = V[:, l + N]
                    if not vl.any():
                        continue
                    val = K.mul(K.mul(ui_t, cij), K.frobenius(vl, j - i))
                    if sign < 0:
                        val = K.neg(val)
                    e = j + l - i
                    out[e] = K.add(out.get(e, np.zeros(B, dtype=np.int64)), val)

    term(X, a, X, 1)
    term(Y, bs, X, -1)
    term(X, b, Y, 1)
    term(Y, d, Y, 1)
    return out


def _normalized_candidates(Q: int, L: int, limit: int):
    """Vectors of length L over range(Q), nonzero, first nonzero entry 1, in canonical order; chunked."""
    for t in range(L):
        rest = L - t - 1
        total = Q**rest
        for start in range(0, total, limit):
            idx = np.arange(start, min(total, start + limit))
            V = np.zeros((len(idx), L), dtype=np.int64)
            V[:, t] = 1
            tmp = idx.copy()
            for s in range(L - 1, t, -1):
                V[:, s] = tmp % Q
                tmp //= Q
            yield V


def isotropic_search(a: TwistedPoly, b: TwistedPoly, d: TwistedPoly, N: int = 1, m_max: int = 2,
                     budget: int = 1 << 17, chunk: int = 1 << 14) -> SearchResult:
    """Look for nonzero (x, y), supports in [-N', N'] with N' <= N, over F_{q^m} with m <= m_max,
    such that F(x, y) = 0.  Cells (m, N') are visited in diagonal order; cells whose normalized
    candidate count exceeds ``budget`` are skipped and listed in the transcript.
    """
    k = a.k
    for g in (b, d):
        a._check(g)
    if not (is_skewsymmetric(a) and is_skewsymmetric(d)):
        raise TwistedError("a and d must be skewsymmetric")
    if N < 0 or m_max < 1:
        raise TwistedError("bounds must be N >= 0 and m_max >= 1")
    cells = sorted(((m, n) for m in range(1, m_max + 1) for n in range(0, N + 1)), key=lambda c: (c[0] + c[1], c[1]))
    transcript = []
    for m, n in cells:
        K = make_field(k.p, k.r * m)
        L = 2 * (2 * n + 1)
        count = sum(K.q ** (L - t - 1) for t in range(L))
        if count > budget:
            transcript.append({"m": m, "N": n, "candidates": count, "status": "skipped (budget)"})
            continue
        aK, bK, dK = a.embed(K), b.embed(K), d.embed(K)
        bsK = bK.star()
        tried = 0
        for V in _normalized_candidates(K.q, L, chunk):
            X, Y = V[:, : 2 * n + 1], V[:, 2 * n + 1:]
            coeffs = _F_batch(K, aK.coeffs, bsK.coeffs, bK.coeffs, dK.coeffs, X, Y, n)
            zero = np.ones(len(V), dtype=bool)
            for arr in coeffs.values():
                zero &= arr == 0
            hits = np.nonzero(zero)[0]
            if len(hits):
                h = int(hits[0])
                tried += h + 1
                x = TwistedPoly(K, {j - n: int(X[h, j]) for j in range(2 * n + 1)})
                y = TwistedPoly(K, {j - n: int(Y[h, j]) for j in range(2 * n + 1)})
                val = F_eval(aK, bK, dK, x, y)
                if not val.is_zero():
                    raise TwistedError("batched evaluation disagrees with F_eval")
                transcript.append({"m": m, "N": n, "candidates": tried, "status": "found",
                                   "F(x,y)": val.to_json()})
                return SearchResult(True, x, y, m, n, transcript, "found")
            tried += len(V)
        transcript.append({"m": m, "N": n, "candidates": tried, "status": "exhausted"})
    return SearchResult(False, transcript=transcript, status="not found within bounds")


def random_skew(k: Field, rng: np.random.Generator, max_j: int = 1) -> TwistedPoly:
    """A random element of the skew span with support in [-max_j, max_j]."""
    out = TwistedPoly(k)
    for j in range(1, max_j + 1):
        out = out + skew_part(int(rng.integers(0, k.q)), j, k)
    return out
