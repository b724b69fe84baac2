"""Characters of additive groups via the Lang isogeny, and the trace pairing on G_a^n."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from ..cyclo import MuVal
from ..gf import Field, make_field


class LangError(ValueError):
    pass


def solve_mod_p(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """One solution X of A X = B (mod p) for every column of B; raises if some column is inconsistent."""
    A = np.array(A, dtype=np.int64) % p
    B = np.array(B, dtype=np.int64) % p
    rows, cols = A.shape
    M = np.concatenate([A, B], axis=1)
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if len(nz) == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            M[[r, pr]] = M[[pr, r]]
        M[r] = (M[r] * pow(int(M[r, c]), -1, p)) % p
        others = np.nonzero(M[:, c])[0]
        others = others[others != r]
        if len(others):
            M[others] = (M[others] - np.outer(M[others, c], M[r])) % p
        pivots.append(c)
        r += 1
    if M[r:, cols:].any():
        raise LangError("Lang equation has no solution in the chosen extension")
    X = np.zeros((cols, B.shape[1]), dtype=np.int64)
    for i, c in enumerate(pivots):
        X[c] = M[i, cols:]
    return X


class ArtinSchreier:
    """K = E[t] / (t^p - t - c), a degree-p extension of E = F_{q^m}."""

    def __init__(self, E: Field):
        self.E = E
        p = E.p
        self.p = p
        traces = np.array([int(E.abs_trace(x)) for x in range(E.q)])
        self.c = int(np.nonzero(traces)[0][0])
        # (t + c)^i in the basis 1, t, ..., t^(p-1)  (i < p so no reduction is needed)
        P = np.zeros((p, p), dtype=np.int64)
        for i in range(p):
            for s in range(i + 1):
                coef = comb(i, s) % p
                if coef:
                    P[i, s] = E.mul(E.scalar_mul(coef, 1), E.pow(self.c, i - s))
        self.P = P

    def frob_p(self, G: np.ndarray) -> np.ndarray:
        """Rows of G are elements of K; returns their p-th powers."""
        E = self.E
        Gp = E.pow(G, self.p)
        out = np.zeros_like(G)
        for i in range(self.p):
            gi = Gp[:, i]
            if not gi.any():
                continue
            out = E.add(out, E.mul(gi[:, None], self.P[i][None, :]))
        return out

    def frob(self, G: np.ndarray, k: int) -> np.ndarray:
        for _ in range(k):
            G = self.frob_p(G)
        return G

    def to_fp(self, G: np.ndarray) -> np.ndarray:
        """Coordinates over F_p (dimension p * deg E)."""
        return self.E.digits[G].reshape(G.shape[0], -1)

    def from_fp(self, V: np.ndarray) -> np.ndarray:
        E = self.E
        return V.reshape(V.shape[0], self.p, E.r) @ E.pw


@lru_cache(maxsize=None)
def _lang_operator(p: int, r: int, m: int):
    Fq = make_field(p, r)
    E = make_field(p, r * m)
    K = ArtinSchreier(E)
    D = p * E.r
    basis = np.zeros((D, p), dtype=np.int64)
    for i in range(p):
        for s in range(E.r):
            basis[i * E.r + s, i] = p**s
    image = E.sub(K.frob(basis, r), basis)
    A = K.to_fp(image).T  # D x D
    return Fq, E, K, A


def lang_values(q_field: Field, m: int, xs) -> np.ndarray:
    """For each x in F_{q^m}: solve g^q - g = x in K and return Fr_{q^m}(g) - g as an element of F_q."""
    p, r = q_field.p, q_field.r
    Fq, E, K, A = _lang_operator(p, r, m)
    xs = np.atleast_1d(np.asarray(xs, dtype=np.int64))
    rhs = np.zeros((len(xs), p), dtype=np.int64)
    rhs[:, 0] = xs
    Gfp = solve_mod_p(A, K.to_fp(rhs).T, p).T
    G = K.from_fp(Gfp)
    check = E.sub(K.frob(G, r), G)
    if not np.array_equal(check, rhs):
        raise LangError("Lang solution failed verification")
    val = E.sub(K.frob(G, r * m), G)
    if val[:, 1:].any():
        raise LangError("Fr^m(g) - g left the base field")
    return E.descend(val[:, 0], Fq)


def _char_residue(chi, F: Field, v: np.ndarray) -> np.ndarray:
    """Evaluate chi on rows of coordinate vectors over F_q.

    ``chi`` is either a LinearChar on points(G_a^n) over F_q or a dual vector a
    (meaning x -> Tr_{q/p}(sum a_i x_i) / p).
    """
    from ..group import encode
    v = np.atleast_2d(v)
    if hasattr(chi, "residue"):
        return np.asarray(chi.residue(encode(v, F.q))), chi.e
    a = np.asarray(chi, dtype=np.int64)
    acc = np.zeros(v.shape[0], dtype=np.int64)
    for i in range(v.shape[1]):
        acc = F.add(acc, F.mul(v[:, i], int(a[i])))
    return np.asarray(F.abs_trace(acc)), 1


def lang_character(chi, x, m: int, q_field: Field | None = None) -> MuVal:
    """chi pushed through the Lang isogeny, evaluated at x in A(F_{q^m}) (coordinate tuple)."""
    F = q_field if q_field is not None else chi.group.model.base
    x = np.atleast_1d(np.asarray(x, dtype=np.int64))
    vals = np.array([lang_values(F, m, [xi])[0] for xi in x])
    res, e = _char_residue(chi, F, vals[None, :])
    return MuVal(F.p, e, int(res[0]))


def trace_character(chi, x, m: int, q_field: Field | None = None) -> MuVal:
    """chi(Tr_{q^m/q}(x)) coordinatewise."""
    F = q_field if q_field is not None else chi.group.model.base
    E = make_field(F.p, F.r * m)
    x = np.atleast_1d(np.asarray(x, dtype=np.int64))
    tr = E.rel_trace(x, F)
    res, e = _char_residue(chi, F, np.atleast_1d(tr)[None, :])
    return MuVal(F.p, e, int(res[0]))


@dataclass
class SerrePairing:
    """(x, a) -> Tr_{q/p}(sum a_i x_i) / p on F_q^n x F_q^n."""

    field: Field
    n: int
    residues: np.ndarray  # |A| x |A|, values mod p (level 1)

    def value(self, xi: int, ai: int) -> MuVal:
        return MuVal(self.field.p, 1, int(self.residues[xi, ai]))

    def gram_counts(self) -> np.ndarray:
        """cnt[s, x, y] = #{a : R[x,a] - R[y,a] = s}."""
        p = self.field.p
        R = self.residues
        onehot = np.stack([(R == s).astype(np.int64) for s in range(p)])
        cnt = np.zeros((p,) + R.shape, dtype=np.int64)
        for s in range(p):
            for t in range(p):
                cnt[s] += onehot[t] @ onehot[(t - s) % p].T
        return cnt

    def is_perfect(self) -> bool:
        """Exactly: C C^* = |A| I for the psi-image C, hence C is invertible."""
        cnt = self.gram_counts()
        N = self.residues.shape[0]
        eye = np.eye(N, dtype=bool)
        diag_ok = (cnt[0][eye] == N).all() and all((cnt[s][eye] == 0).all() for s in range(1, cnt.shape[0]))
        off = ~eye
        offdiag_ok = all((cnt[s][off] == cnt[0][off]).all() for s in range(cnt.shape[0]))
        return bool(diag_ok and offdiag_ok)

    def to_json(self) -> dict:
        return {"field": self.field.name, "n": self.n, "perfect": self.is_perfect(),
                "residues_mod_p": self.residues.tolist() if self.residues.size <= 4096 else "omitted"}


def serre_pairing_matrix(F: Field, n: int = 1) -> SerrePairing:
    from ..group import all_coords
    X = all_coords(F, n)
    N = len(X)
    acc = np.zeros((N, N), dtype=np.int64)
    for i in range(n):
        acc = F.add(acc, F.mul(X[:, i][:, None], X[:, i][None, :]))
    return SerrePairing(F, n, np.asarray(F.abs_trace(acc)))
