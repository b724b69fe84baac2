"""Bi-additive pairings and quadratic forms on finite abelian p-groups with values in mu."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ..cyclo import MuVal

MAX_W = 1 << 10


class PairingError(ValueError):
    pass


class FiniteAbelian:
    """Z/n_1 x ... x Z/n_k (all n_i powers of p); elements indexed in mixed radix."""

    def __init__(self, p: int, orders: tuple[int, ...]):
        self.p = p
        self.orders = tuple(int(n) for n in orders)
        for n in self.orders:
            m = n
            while m % p == 0:
                m //= p
            if m != 1:
                raise PairingError(f"{n} is not a power of {p}")
        self.size = int(np.prod(self.orders, dtype=np.int64)) if self.orders else 1
        if self.size > MAX_W:
            raise PairingError(f"|W| = {self.size} exceeds the cap {MAX_W}")
        self.rank = len(self.orders)
        self.exponent = max(self.orders, default=1)
        self.level = _log(self.exponent, p)

    def __repr__(self):
        return "W(" + " x ".join(f"Z/{n}" for n in self.orders) + ")"

    @classmethod
    def elementary(cls, p: int, rank: int) -> "FiniteAbelian":
        return cls(p, (p,) * rank)

    def vectors(self) -> np.ndarray:
        if not self.orders:
            return np.zeros((1, 0), dtype=np.int64)
        return np.array(list(itertools.product(*[range(n) for n in self.orders])), dtype=np.int64)

    def index(self, v) -> int | np.ndarray:
        v = np.asarray(v, dtype=np.int64)
        idx = np.zeros(v.shape[:-1], dtype=np.int64)
        for n, col in zip(self.orders, np.moveaxis(v, -1, 0)):
            idx = idx * n + (col % n)
        return idx

    def add(self, u, v) -> np.ndarray:
        return (np.asarray(u) + np.asarray(v)) % np.array(self.orders, dtype=np.int64)

    def scale(self, n: int, v) -> np.ndarray:
        return (n * np.asarray(v)) % np.array(self.orders, dtype=np.int64)

    def to_json(self) -> dict:
        return {"p": self.p, "orders": list(self.orders)}


def _log(n: int, p: int) -> int:
    e = 0
    while n > 1:
        n //= p
        e += 1
    return e


class Pairing:
    """A bi-additive W x W -> mu given by residues B_ij (level e) on the basis."""

    def __init__(self, W: FiniteAbelian, matrix, e: int | None = None):
        self.W = W
        self.e = W.level if e is None else e
        mod = W.p**self.e
        B = np.asarray(matrix, dtype=np.int64).reshape(W.rank, W.rank) % mod
        for i, j in itertools.product(range(W.rank), repeat=2):
            if (W.orders[i] * B[i, j]) % mod or (W.orders[j] * B[i, j]) % mod:
                raise PairingError(f"B[{i},{j}] is not compatible with the orders")
        self.B = B
        self._table = None

    @property
    def mod(self) -> int:
        return self.W.p**self.e

    def value(self, x, y) -> MuVal:
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        return MuVal(self.W.p, self.e, int(x @ self.B @ y) % self.mod)

    def table(self) -> np.ndarray:
        if self._table is None:
            V = self.W.vectors()
            self._table = (V @ self.B @ V.T) % self.mod
        return self._table

    def is_alternating(self) -> bool:
        return not np.diag(self.table()).any()

    def is_symmetric(self) -> bool:
        T = self.table()
        return bool((T == T.T).all())

    def radical(self) -> np.ndarray:
        """Indices x with B(x, .) = 0."""
        return np.nonzero(~self.table().any(axis=1))[0]

    def is_nondegenerate(self) -> bool:
        # W -> Hom(W, mu) is injective iff bijective (the groups have equal order)
        return len(self.radical()) == 1

    @classmethod
    def from_table(cls, W: FiniteAbelian, table: np.ndarray, e: int) -> "Pairing":
        """Check bi-additivity exhaustively and recover the basis matrix."""
        mod = W.p**e
        table = np.asarray(table, dtype=np.int64) % mod
        basis = [W.index(np.eye(W.rank, dtype=np.int64)[i]) for i in range(W.rank)]
        B = table[np.ix_(basis, basis)]
        P = cls(W, B, e)
        if not np.array_equal(P.table(), table):
            raise PairingError("table is not bi-additive")
        return P

    def to_json(self) -> dict:
        return {"W": self.W.to_json(), "level": self.e, "basis_matrix": self.B.tolist(),
                "nondegenerate": self.is_nondegenerate()}


class AlternatingPairing(Pairing):
    def __init__(self, W: FiniteAbelian, matrix, e: int | None = None):
        super().__init__(W, matrix, e)
        if np.diag(self.B).any() or ((self.B + self.B.T) % self.mod).any():
            raise PairingError("pairing is not alternating")

    @classmethod
    def from_table(cls, W, table, e):
        P = Pairing.from_table(W, table, e)
        return cls(W, P.B, e)


def random_alternating(W: FiniteAbelian, rng: np.random.Generator, nondegenerate: bool = True,
                       tries: int = 1000) -> AlternatingPairing:
    """Random alternating pairing on an elementary abelian W (values at level 1)."""
    if any(n != W.p for n in W.orders):
        raise PairingError("random pairings are drawn on elementary abelian groups")
    k = W.rank
    for _ in range(tries):
        A = np.zeros((k, k), dtype=np.int64)
        iu = np.triu_indices(k, 1)
        A[iu] = rng.integers(0, W.p, size=len(iu[0]))
        A = (A - A.T) % W.p
        P = AlternatingPairing(W, A, 1)
        if not nondegenerate or P.is_nondegenerate():
            return P
    raise PairingError("failed to draw a nondegenerate pairing")


@dataclass
class Lagrangian:
    W: FiniteAbelian
    members: np.ndarray  # element indices
    generators: list

    @property
    def order(self) -> int:
        return len(self.members)

    def vectors(self) -> np.ndarray:
        return self.W.vectors()[self.members]

    def to_json(self) -> dict:
        return {"order": self.order, "generators": [list(map(int, g)) for g in self.generators]}


def find_lagrangian(P: Pairing) -> Lagrangian:
    """Grow an isotropic subgroup one element of order p (mod the current one) at a time."""
    W = P.W
    if not P.is_alternating():
        raise PairingError("pairing is not alternating")
    if not P.is_nondegenerate():
        raise PairingError("degenerate pairing")
    T = P.table()
    V = W.vectors()
    inI = np.zeros(W.size, dtype=bool)
    inI[0] = True
    gens = []
    # prefer e_1, e_2, ... : rank candidates with the first coordinate least significant
    le_rank = np.argsort(np.argsort(FiniteAbelian(W.p, W.orders[::-1]).index(V[:, ::-1]), kind="stable"))
    while inI.sum() ** 2 < W.size:
        perp = ~T[:, inI].any(axis=1)
        pV = np.array([W.index(W.scale(W.p, v)) for v in V])
        cand = np.nonzero(perp & ~inI & inI[pV])[0]
        if len(cand) == 0:
            raise PairingError("isotropic extension stalled")
        y = int(cand[np.argmin(le_rank[cand])])
        gens.append(V[y].copy())
        members = np.nonzero(inI)[0]
        new = [members]
        cur = V[members]
        for _ in range(W.p - 1):
            cur = W.add(cur, V[y])
            new.append(W.index(cur))
        inI[np.concatenate(new)] = True
    if inI.sum() ** 2 != W.size:
        raise PairingError("|W| is not a perfect square")
    L = Lagrangian(W, np.nonzero(inI)[0], gens)
    if T[np.ix_(L.members, L.members)].any():
        raise PairingError("internal error: result is not isotropic")
    return L


class QuadraticForm:
    """q : W -> mu given on every element (residues at level e)."""

    def __init__(self, W: FiniteAbelian, values, e: int):
        self.W = W
        self.e = e
        self.values = np.asarray(values, dtype=np.int64) % (W.p**e)
        if self.values.shape != (W.size,):
            raise PairingError("one value per element of W expected")

    @classmethod
    def from_function(cls, W: FiniteAbelian, func, e: int) -> "QuadraticForm":
        return cls(W, [func(tuple(int(c) for c in v)) for v in W.vectors()], e)

    def __call__(self, x) -> MuVal:
        return MuVal(self.W.p, self.e, int(self.values[self.W.index(x)]))

    def polar_table(self) -> np.ndarray:
        """q(x + y) - q(x) - q(y)."""
        V = self.W.vectors()
        S = self.W.index(self.W.add(V[:, None, :], V[None, :, :]))
        return (self.values[S] - self.values[:, None] - self.values[None, :]) % (self.W.p**self.e)


@dataclass
class RefinementVerdict:
    scaling_ok: bool
    polarization_ok: bool
    nondegenerate: bool
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.scaling_ok and self.polarization_ok and self.nondegenerate

    def to_json(self) -> dict:
        return {"ok": self.ok, "scaling": self.scaling_ok, "polarization": self.polarization_ok,
                "nondegenerate": self.nondegenerate, "counterexamples": self.counterexamples}


def check_quadratic_refinement(Q: QuadraticForm, P: Pairing | None = None) -> RefinementVerdict:
    """Check q(nx) = n^2 q(x), B(x,y) = q(x+y) - q(x) - q(y), and nondegeneracy of B.

    Without ``P`` the polarization of q itself is used as B.
    """
    W = Q.W
    V = W.vectors()
    mod = W.p**Q.e
    bad = []
    scaling_ok = True
    for n in range(W.exponent * W.p):
        nx = W.index(W.scale(n, V))
        diff = (Q.values[nx] - n * n * Q.values) % mod
        if diff.any():
            x = int(np.nonzero(diff)[0][0])
            bad.append({"identity": "scaling", "n": n, "x": V[x].tolist()})
            scaling_ok = False
            break
    polar = Q.polar_table()
    if P is None:
        Btab, e = polar, Q.e
        polar_ok = True
    else:
        if P.W.orders != W.orders:
            raise PairingError("pairing and form live on different groups")
        e = max(P.e, Q.e)
        Btab = P.table() * W.p ** (e - P.e) % (W.p**e)
        polar_e = polar * W.p ** (e - Q.e) % (W.p**e)
        mism = np.argwhere(Btab != polar_e)
        polar_ok = len(mism) == 0
        if not polar_ok:
            i, j = mism[0]
            bad.append({"identity": "polarization", "x": V[i].tolist(), "y": V[j].tolist()})
    nondeg = int((~Btab.any(axis=1)).sum()) == 1
    if not nondeg:
        rad = [V[i].tolist() for i in np.nonzero(~Btab.any(axis=1))[0][:4]]
        bad.append({"identity": "nondegeneracy", "radical_sample": rad})
    return RefinementVerdict(scaling_ok, polar_ok, nondeg, bad)
