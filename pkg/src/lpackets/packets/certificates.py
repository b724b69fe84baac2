"""Algebraic certificates for subgroups, and model groups at higher levels without tables.

A certificate describes a subgroup H of G(F_q) as the F_q-points of a
subvariety given by explicit equations-free data (a linear span or an
additive-polynomial parametrization), so that H(F_{q^m}) can be produced for
every m and checked to still be a subgroup of order q^(mk).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ..duality.linearized import RealizationError, Realization, fp_basis, fp_span, realize_subgroup
from ..gf import Field
from ..group import (FiniteGroup, GroupError, GroupModel, Subgroup, all_coords, decode, encode,
                     group_cap, model_mul)


def level_cap() -> int:
    """Largest G(F_{q^m}) handled coordinate-wise (no multiplication table)."""
    return int(os.environ.get("LPACKETS_LEVEL_CAP", 16 * group_cap()))


class CertificateError(GroupError):
    pass


# -- linear algebra over F_q ---------------------------------------------------

def fq_row_reduce(F: Field, rows: np.ndarray) -> np.ndarray:
    """Reduced row echelon form over F (zero rows dropped)."""
    M = [list(map(int, r)) for r in np.atleast_2d(rows)]
    out = []
    ncols = len(M[0]) if M else 0
    for c in range(ncols):
        piv = next((i for i, r in enumerate(M) if r[c]), None)
        if piv is None:
            continue
        row = M.pop(piv)
        inv = F.inv(row[c])
        row = [F.mul(v, inv) for v in row]
        M = [[F.sub(a, F.mul(r[c], b)) for a, b in zip(r, row)] for r in M]
        out = [[F.sub(a, F.mul(r[c], b)) for a, b in zip(r, row)] for r in out]
        out.append(row)
    out.sort(key=lambda r: next(i for i, v in enumerate(r) if v))
    return np.array(out, dtype=np.int64).reshape(-1, ncols)


def fq_span(F: Field, basis: np.ndarray) -> np.ndarray:
    """All F-linear combinations of the rows of ``basis``."""
    basis = np.atleast_2d(np.asarray(basis, dtype=np.int64))
    k, n = basis.shape
    C = all_coords(F, k)
    acc = np.zeros((len(C), n), dtype=np.int64)
    for i in range(k):
        acc = F.add(acc, F.mul(C[:, i][:, None], basis[i][None, :]))
    return acc


def fq_subspaces(F: Field, n: int, limit: int = 1 << 15):
    """Every F-subspace of F^n, as reduced echelon bases, smallest dimension first."""
    count = 0
    for k in range(n + 1):
        for pivots in _combinations(n, k):
            free = [(i, j) for i, pi in enumerate(pivots) for j in range(pi + 1, n) if j not in pivots]
            for vals in np.ndindex(*([F.q] * len(free))) if free else [()]:
                B = np.zeros((k, n), dtype=np.int64)
                for i, pi in enumerate(pivots):
                    B[i, pi] = 1
                for (i, j), v in zip(free, vals):
                    B[i, j] = v
                count += 1
                if count > limit:
                    raise CertificateError(f"more than {limit} subspaces of F^{n}")
                yield B


def _combinations(n, k):
    from itertools import combinations
    return combinations(range(n), k)


# -- certificates --------------------------------------------------------------

@dataclass
class LinearCertificate:
    """H(F_{q^m}) is the F_{q^m}-span of a fixed F_q-basis in the model coordinates."""

    model: GroupModel
    basis: np.ndarray

    @property
    def k(self) -> int:
        return int(self.basis.shape[0])

    def points(self, m: int) -> np.ndarray:
        F = self.model.field_at(m)
        if self.k == 0:
            return np.zeros((1, self.model.dim), dtype=np.int64)
        B = F.embed_from(self.basis, self.model.base)
        return fq_span(F, B)

    def describe(self) -> dict:
        return {"kind": "linear", "dim": self.k, "basis": self.basis.tolist()}


@dataclass
class AdditiveCertificate:
    """H(F_{q^m}) is the image of F_{q^m}^k under additive polynomials over F_q."""

    model: GroupModel
    realization: Realization

    @property
    def k(self) -> int:
        return self.realization.k

    def points(self, m: int) -> np.ndarray:
        return self.realization.points(m)

    def describe(self) -> dict:
        return self.realization.describe()


def certify(H: Subgroup, *, check_level: int = 2) -> tuple[object | None, str]:
    """Try to attach an algebraic certificate to a subgroup of G(F_q).

    Returns ``(certificate, note)``; the certificate is None when |H| is not a
    power of q, when the coordinates are not an additive subgroup, or when the
    base-changed point set fails to be a subgroup of the expected order.
    """
    G = H.parent
    model = G.model
    if model is None or G.m != 1:
        return None, "no model at level 1"
    F = model.base
    size = H.order
    k = 0
    while F.q**k < size:
        k += 1
    if F.q**k != size:
        return None, f"|H| = {size} is not a power of q = {F.q}"
    X = G.coords[H.members]
    basis = fq_row_reduce(F, X) if size > 1 else np.zeros((0, model.dim), dtype=np.int64)
    if len(basis) == k and np.array_equal(np.sort(encode(fq_span(F, basis), F.q) if k else np.array([0])),
                                          np.sort(encode(X, F.q))):
        cert = LinearCertificate(model, basis)
    else:
        span = fp_span(F, fp_basis(F, X))
        if len(span) != size:
            return None, "coordinates are not an additive subgroup"
        try:
            cert = AdditiveCertificate(model, realize_subgroup(X, F))
        except RealizationError as exc:
            return None, str(exc)
    ok, note = check_certificate(cert, check_level)
    return (cert if ok else None), note


def check_certificate(cert, max_level: int = 2) -> tuple[bool, str]:
    """H(F_{q^m}) has q^(mk) points and is closed under the model product, for m <= max_level."""
    model = cert.model
    checked = []
    for m in range(1, max_level + 1):
        F = model.field_at(m)
        n = F.q ** cert.k
        if n > level_cap():
            break
        P = cert.points(m)
        idx = np.unique(encode(P, F.q))
        if len(idx) != n:
            return False, f"base change to level {m} has {len(idx)} points, expected {n}"
        LG = LevelGroup.of(model, m)
        _, closed = LG.generating_set(idx)
        if not closed:
            return False, f"base change to level {m} is not a subgroup"
        checked.append(m)
    return True, f"subgroup of order q^{cert.k} at levels {checked}"


# -- coordinate-wise groups ----------------------------------------------------

class LevelGroup:
    """G(F_{q^m}) handled through coordinates and encoded indices, without a table."""

    def __init__(self, model: GroupModel, m: int):
        self.model = model
        self.m = m
        self.F = model.field_at(m)
        self.Q = self.F.q
        self.dim = model.dim
        self.order = self.Q**self.dim
        if self.order > level_cap():
            raise CertificateError(f"G at level {m} has {self.order} points, above the cap {level_cap()}")
        self.identity = 0
        self._inv = None

    @classmethod
    def of(cls, model: GroupModel, m: int) -> "LevelGroup":
        cache = model.__dict__.setdefault("_level_groups", {})
        if m not in cache:
            cache[m] = cls(model, m)
        return cache[m]

    def coords(self, idx) -> np.ndarray:
        return decode(np.atleast_1d(idx), self.Q, self.dim)

    def index(self, X) -> np.ndarray:
        return encode(np.atleast_2d(X), self.Q)

    def mul(self, a, b) -> np.ndarray:
        return self.index(model_mul(self.model, self.F, self.coords(a), self.coords(b)))

    def inv(self, a) -> np.ndarray:
        if self._inv is None:
            self._inv = self.index(self.model.inverse_coords(self.F, self.coords(np.arange(self.order))))
        return self._inv[np.asarray(a, dtype=np.int64)]

    def conj(self, h, g) -> np.ndarray:
        """g^-1 h g, broadcasting one of the two arguments."""
        return self.mul(self.mul(self.inv(g), h), g)

    def commutator(self, a, b) -> np.ndarray:
        """a b a^-1 b^-1."""
        return self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))

    def closure(self, gens, start=None, limit: int | None = None, start_gens=None) -> np.ndarray:
        """Sorted indices of the subgroup generated by ``gens`` and the subgroup ``start``.

        Enumerates right cosets S*r of S = ``start`` with S*r*t looked up for
        every generator t; ``start_gens`` must generate S (computed if omitted).
        """
        gens = [int(g) for g in np.unique(np.atleast_1d(np.asarray(gens, dtype=np.int64)))]
        if start is None:
            S = np.array([self.identity], dtype=np.int64)
            start_gens = []
        else:
            S = np.unique(np.asarray(start, dtype=np.int64))
            if start_gens is None:
                start_gens, _ = self.generating_set(S)
        allgens = np.array(sorted(set(gens) | {int(s) for s in start_gens}), dtype=np.int64)
        seen = np.zeros(self.order, dtype=bool)
        seen[S] = True
        count = len(S)
        frontier = np.array([self.identity], dtype=np.int64)
        chunk = max(1, (1 << 20) // len(S))
        while len(frontier) and len(allgens):
            Y = self.mul(np.repeat(frontier, len(allgens)), np.tile(allgens, len(frontier)))
            Y = np.unique(Y[~seen[Y]])
            reps = []
            for c in range(0, len(Y), chunk):
                for y in Y[c:c + chunk]:
                    if seen[y]:
                        continue
                    coset = self.mul(S, np.full(len(S), y))
                    seen[coset] = True
                    count += len(S)
                    reps.append(int(y))
                    if limit is not None and count > limit:
                        return np.nonzero(seen)[0]
            frontier = np.array(reps, dtype=np.int64)
        return np.nonzero(seen)[0]

    def generating_set(self, members, start=None, start_gens=None) -> tuple[list[int], bool]:
        """Greedy generators of the set over the subgroup ``start``; ``closed`` tells whether it is a subgroup."""
        members = np.unique(np.asarray(members, dtype=np.int64))
        inset = np.zeros(self.order, dtype=bool)
        inset[members] = True
        if not inset[self.identity]:
            return [], False
        if start is None:
            cur = np.array([self.identity], dtype=np.int64)
            known: list[int] = []
        else:
            cur = np.unique(np.asarray(start, dtype=np.int64))
            known = list(start_gens) if start_gens is not None else self.generating_set(cur)[0]
        mask = np.zeros(self.order, dtype=bool)
        mask[cur] = True
        gens: list[int] = []
        for g in members:
            if mask[g]:
                continue
            gens.append(int(g))
            cur = self.closure([g], start=cur, limit=len(members), start_gens=known + gens[:-1])
            if len(cur) > len(members) or not inset[cur].all():
                return gens, False
            mask[:] = False
            mask[cur] = True
        return gens, bool(len(cur) == len(members))

    def all_elements(self) -> np.ndarray:
        return np.arange(self.order)


def level_points(cert, m: int) -> np.ndarray:
    """Sorted encoded indices of H(F_{q^m})."""
    F = cert.model.field_at(m)
    return np.unique(encode(cert.points(m), F.q))


def transfer_residues(chi, cert, m: int) -> tuple[np.ndarray, np.ndarray]:
    """chi o Tr on H(F_{q^m}): (sorted indices, residues).  Raises if a trace leaves H(F_q)."""
    model = cert.model
    F1 = model.field_at(1)
    Fm = model.field_at(m)
    idx = level_points(cert, m)
    X = decode(idx, Fm.q, model.dim)
    T = Fm.rel_trace(X, F1) if m > 1 else X
    t_idx = encode(np.atleast_2d(T), F1.q)
    G = chi.group
    if not chi.subgroup.mask[t_idx].all():
        raise CertificateError("trace of a point leaves the subgroup")
    return idx, chi.residue(t_idx)


def certified_subgroups(G: FiniteGroup, limit: int = 1 << 15) -> list[Subgroup]:
    """Subgroups of G(F_q) whose coordinates form an F_q-subspace, each with a linear certificate."""
    model = G.model
    if model is None or G.m != 1:
        raise CertificateError("certified subgroups need a model group at level 1")
    cache = G.__dict__.setdefault("_certified", {})
    if limit in cache:
        return list(cache[limit])
    F = model.base
    out = []
    for B in fq_subspaces(F, model.dim, limit):
        members = np.unique(encode(fq_span(F, B), F.q)) if len(B) else np.array([G.identity])
        if len(B) and not _closed(G, members):
            continue
        out.append(G.subgroup(members, certificate=LinearCertificate(model, B)))
    cache[limit] = out
    return list(out)


def _closed(G: FiniteGroup, members: np.ndarray) -> bool:
    mask = np.zeros(G.order, dtype=bool)
    mask[members] = True
    if not mask[G.identity]:
        return False
    return bool(mask[G.table[np.ix_(members, members)]].all())


class LevelData:
    """H(F_{q^m}) for a certified H, with generators and conjugation data cached on the certificate."""

    def __init__(self, cert, m: int):
        self.cert = cert
        self.m = m
        self.L = LevelGroup.of(cert.model, m)
        self.points = level_points(cert, m)
        self.mask = np.zeros(self.L.order, dtype=bool)
        self.mask[self.points] = True
        self.gens, self.closed = self.L.generating_set(self.points)
        self._conj = None
        self._stab: dict = {}

    @classmethod
    def of(cls, cert, m: int) -> "LevelData":
        cache = cert.__dict__.setdefault("_level_data", {})
        if m not in cache:
            cache[m] = cls(cert, m)
        return cache[m]

    def conj_table(self) -> list[np.ndarray]:
        """For each generator s of H(F_{q^m}): g^-1 s g for every g in G(F_{q^m})."""
        if self._conj is None:
            allg = self.L.all_elements()
            self._conj = [self.L.conj(np.full(self.L.order, s), allg) for s in self.gens]
        return self._conj

    def transfer(self, chi) -> np.ndarray:
        """chi o Tr as residues on G(F_{q^m}), -1 outside H(F_{q^m})."""
        idx, res = transfer_residues(chi, self.cert, self.m)
        full = np.full(self.L.order, -1, dtype=np.int64)
        full[idx] = res
        return full

    def is_homomorphism(self, full: np.ndarray, mod: int) -> bool:
        res = full[self.points]
        for s in self.gens:
            prod = self.L.mul(self.points, np.full(len(self.points), s))
            if (full[prod] != (res + full[s]) % mod).any():
                return False
        return True

    def stabilizer(self, full: np.ndarray) -> np.ndarray:
        """Indices g with g^-1 H g = H and chi(g^-1 h g) = chi(h), for chi given by ``full``."""
        keep = np.ones(self.L.order, dtype=bool)
        for s, c in zip(self.gens, self.conj_table()):
            keep &= full[c] == full[s]
        return np.nonzero(keep)[0]

    def commutators(self, stab: np.ndarray) -> tuple[list[int], list[np.ndarray]]:
        """Generators of ``stab`` over H(F_{q^m}) and the commutators [x, s] for x in stab."""
        key = stab.tobytes()
        if key not in self._stab:
            sgens, _ = self.L.generating_set(stab, start=self.points, start_gens=self.gens)
            comms = [self.L.commutator(stab, np.full(len(stab), s)) for s in sgens]
            self._stab[key] = (sgens, comms)
        return self._stab[key]
