"""Finite groups of F_{q^m}-points of a few unipotent group families.

A :class:`GroupModel` knows how to multiply coordinate tuples over any field
in the tower of its base field.  :func:`points` enumerates ``G(F_{q^m})`` as a
:class:`FiniteGroup`: elements are indices ``0..N-1`` into the
lexicographically sorted coordinate tuples, with a full multiplication table.
Quotients and subgroups turned into groups are ordinary :class:`FiniteGroup`
objects without a model.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Sequence

import numpy as np

from .gf import Field, make_field

DEFAULT_CAP = 1 << 12


class GroupError(ValueError):
    pass


class CapExceeded(GroupError):
    pass


def group_cap() -> int:
    return int(os.environ.get("LPACKETS_GROUP_CAP", DEFAULT_CAP))


# -- models -----------------------------------------------------------------

class GroupModel:
    """Base class; subclasses set ``base`` (the field of definition) and ``dim``."""

    base: Field
    dim: int
    easy: bool = False
    family: str = ""

    def validate(self) -> None:
        pass

    def mul(self, F: Field, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def inverse_coords(self, F: Field, X: np.ndarray) -> np.ndarray:
        # generic: x^{-1} = x^{|G|-1} is too slow; subclasses override
        raise NotImplementedError

    def field_at(self, m: int) -> Field:
        return make_field(self.base.p, self.base.r * m)

    def to_json(self) -> dict:
        raise NotImplementedError

    def _embed_const(self, F: Field, c):
        return F.embed_from(c, self.base)


def _mat_entries(F: Field, n: int, X: np.ndarray, positions):
    """Unpack coordinate columns into a dict (i, j) -> column."""
    return {pos: X[:, t] for t, pos in enumerate(positions)}


@dataclass(eq=False)
class AlgebraGroup(GroupModel):
    """Elements ``1 + x`` with ``x`` in a nilpotent associative algebra J.

    ``constants[(i, j)] = {k: c}`` means ``e_i e_j = sum_k c e_k``, with ``c``
    an element (int encoding) of ``base``.
    """

    base: Field
    dim: int
    constants: dict = dc_field(default_factory=dict)
    family: str = "algebra"
    easy: bool = True

    def __post_init__(self):
        self._terms = [(i, j, k, c) for (i, j), row in sorted(self.constants.items())
                       for k, c in sorted(row.items()) if c]

    def validate(self) -> None:
        F = self.base
        d = self.dim
        for i, j, k, c in self._terms:
            if not (0 <= i < d and 0 <= j < d and 0 <= k < d) or not 0 <= c < F.q:
                raise GroupError("structure constant out of range")

        def prod(x, y):
            z = [0] * d
            for i, j, k, c in self._terms:
                if x[i] and y[j]:
                    z[k] = F.add(z[k], F.mul(F.mul(x[i], y[j]), c))
            return z

        basis = [[1 if t == s else 0 for t in range(d)] for s in range(d)]
        for a, b, c in itertools.product(basis, repeat=3):
            if prod(prod(a, b), c) != prod(a, prod(b, c)):
                raise GroupError("structure constants are not associative")
        # nilpotency: J^(d+1) = 0, tracked as spans of monomials
        layer = basis
        for _ in range(d):
            layer = [prod(x, y) for x in layer for y in basis]
            layer = [v for v in layer if any(v)]
            if not layer:
                return
        raise GroupError("algebra is not nilpotent")

    def mul(self, F, X, Y):
        Z = F.add(X, Y)
        for i, j, k, c in self._terms:
            t = F.mul(F.mul(X[:, i], Y[:, j]), self._embed_const(F, c))
            Z[:, k] = F.add(Z[:, k], t)
        return Z

    def inverse_coords(self, F, X):
        # (1+x)^{-1} = sum_k (-x)^k
        negx = F.neg(X)
        total = np.zeros_like(X)
        power = negx.copy()
        for _ in range(self.dim):
            total = F.add(total, power)
            power = self._algmul(F, power, negx)
            if not power.any():
                break
        return total

    def _algmul(self, F, X, Y):
        Z = np.zeros_like(X)
        for i, j, k, c in self._terms:
            t = F.mul(F.mul(X[:, i], Y[:, j]), self._embed_const(F, c))
            Z[:, k] = F.add(Z[:, k], t)
        return Z

    def to_json(self):
        return {"family": "algebra", "p": self.base.p, "r": self.base.r, "dim": self.dim,
                "constants": [[i, j, k, c] for i, j, k, c in self._terms]}


def unitriangular_positions(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


class Unitriangular(AlgebraGroup):
    """Upper unitriangular n x n matrices; coordinates x_ij (i < j) in lexicographic order."""

    def __init__(self, n: int, base: Field):
        if n < 1:
            raise GroupError("n must be positive")
        self.n = n
        pos = unitriangular_positions(n)
        index = {ij: t for t, ij in enumerate(pos)}
        consts: dict = {}
        for (i, j) in pos:
            for (j2, k) in pos:
                if j2 == j:
                    consts.setdefault((index[(i, j)], index[(j, k)]), {})[index[(i, k)]] = 1
        super().__init__(base=base, dim=len(pos), constants=consts, family="ul")

    def to_json(self):
        return {"family": "ul", "n": self.n, "p": self.base.p, "r": self.base.r}


class VectorGroup(AlgebraGroup):
    """The additive group G_a^n (zero multiplication on J)."""

    def __init__(self, n: int, base: Field):
        super().__init__(base=base, dim=n, constants={}, family="vector")

    def to_json(self):
        return {"family": "vector", "n": self.dim, "p": self.base.p, "r": self.base.r}


@dataclass(eq=False)
class FakeHeisenberg(GroupModel):
    """F x F with (x,u)(y,v) = (x+y, u+v+x*y^(p^s)); needs p > 2."""

    base: Field
    s: int = 1
    dim: int = 2
    family: str = "fakeheis"

    def validate(self):
        if self.base.p == 2:
            raise GroupError("fake Heisenberg requires p > 2")
        if self.s < 1:
            raise GroupError("twist exponent s must be >= 1")

    def mul(self, F, X, Y):
        x, u = X[:, 0], X[:, 1]
        y, v = Y[:, 0], Y[:, 1]
        tw = F.mul(x, F.frobenius(y, self.s))
        return np.stack([F.add(x, y), F.add(F.add(u, v), tw)], axis=1)

    def inverse_coords(self, F, X):
        x, u = X[:, 0], X[:, 1]
        # (x,u)(-x,w) = (0, u + w - x*x^(p^s))
        w = F.sub(F.mul(x, F.frobenius(x, self.s)), u)
        return np.stack([F.neg(x), w], axis=1)

    def to_json(self):
        return {"family": "fakeheis", "s": self.s, "p": self.base.p, "r": self.base.r}


SP4_J = np.fliplr(np.eye(4, dtype=np.int64))


@dataclass(eq=False)
class Sp4MaxUnipotent(GroupModel):
    """Maximal unipotent subgroup of Sp_4 (J = antidiagonal ones), p = 2.

    Coordinates (m12, m13, m14, m23); the remaining entries are forced:
    m34 = m12 and m24 = m13 + m12*m23.
    """

    base: Field
    dim: int = 4
    family: str = "sp4"

    def validate(self):
        if self.base.p != 2:
            raise GroupError("Sp4MaxUnipotent is implemented for p = 2 only")

    @staticmethod
    def matrices(F: Field, X: np.ndarray) -> np.ndarray:
        a, b, c, d = (X[:, t] for t in range(4))
        M = np.zeros((X.shape[0], 4, 4), dtype=np.int64)
        for t in range(4):
            M[:, t, t] = 1
        M[:, 0, 1] = a
        M[:, 0, 2] = b
        M[:, 0, 3] = c
        M[:, 1, 2] = d
        M[:, 1, 3] = F.add(b, F.mul(a, d))
        M[:, 2, 3] = a
        return M

    @staticmethod
    def matmul(F: Field, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        n = A.shape[1]
        C = np.zeros_like(A)
        for i in range(n):
            for j in range(n):
                acc = np.zeros(A.shape[0], dtype=np.int64)
                for k in range(n):
                    acc = F.add(acc, F.mul(A[:, i, k], B[:, k, j]))
                C[:, i, j] = acc
        return C

    def mul(self, F, X, Y):
        C = self.matmul(F, self.matrices(F, X), self.matrices(F, Y))
        return np.stack([C[:, 0, 1], C[:, 0, 2], C[:, 0, 3], C[:, 1, 2]], axis=1)

    def inverse_coords(self, F, X):
        # unipotent 4x4: (1+N)^{-1} = 1 - N + N^2 - N^3
        M = self.matrices(F, X)
        eye = np.zeros_like(M)
        for t in range(4):
            eye[:, t, t] = 1
        N = np.stack([F.sub(M[..., i], eye[..., i]) for i in range(4)], axis=-1)
        acc = eye.copy()
        power = eye.copy()
        negN = np.stack([F.neg(N[..., i]) for i in range(4)], axis=-1)
        for _ in range(3):
            power = self.matmul(F, power, negN)
            acc = np.stack([F.add(acc[..., i], power[..., i]) for i in range(4)], axis=-1)
        return np.stack([acc[:, 0, 1], acc[:, 0, 2], acc[:, 0, 3], acc[:, 1, 2]], axis=1)

    def is_symplectic(self, F: Field, X: np.ndarray) -> np.ndarray:
        M = self.matrices(F, X)
        Mt = np.transpose(M, (0, 2, 1))
        J = np.broadcast_to(SP4_J, M.shape).copy()
        P = self.matmul(F, self.matmul(F, Mt, J), M)
        return (P == J).all(axis=(1, 2))

    def to_json(self):
        return {"family": "sp4", "p": self.base.p, "r": self.base.r}


@dataclass(eq=False)
class DirectProduct(GroupModel):
    factors: tuple = ()
    family: str = "product"

    def __post_init__(self):
        if not self.factors:
            raise GroupError("empty direct product")
        bases = {(f.base.p, f.base.r) for f in self.factors}
        if len(bases) != 1:
            raise GroupError("direct product factors must share the base field")
        self.base = self.factors[0].base
        self.dim = sum(f.dim for f in self.factors)
        self.easy = all(f.easy for f in self.factors)

    def validate(self):
        for f in self.factors:
            f.validate()

    def _split(self, X):
        out, start = [], 0
        for f in self.factors:
            out.append(X[:, start:start + f.dim])
            start += f.dim
        return out

    def mul(self, F, X, Y):
        return np.concatenate([f.mul(F, a, b) for f, a, b in zip(self.factors, self._split(X), self._split(Y))], axis=1)

    def inverse_coords(self, F, X):
        return np.concatenate([f.inverse_coords(F, a) for f, a in zip(self.factors, self._split(X))], axis=1)

    def to_json(self):
        return {"family": "product", "factors": [f.to_json() for f in self.factors]}


def model_from_json(doc: dict) -> GroupModel:
    fam = doc.get("family")
    if fam == "product":
        return DirectProduct(tuple(model_from_json(f) for f in doc["factors"]))
    base = make_field(int(doc["p"]), int(doc.get("r", 1)))
    if fam == "ul":
        model = Unitriangular(int(doc["n"]), base)
    elif fam == "vector":
        model = VectorGroup(int(doc["n"]), base)
    elif fam == "fakeheis":
        model = FakeHeisenberg(base, int(doc.get("s", 1)))
    elif fam == "sp4":
        model = Sp4MaxUnipotent(base)
    elif fam == "algebra":
        consts: dict = {}
        for i, j, k, c in doc.get("constants", []):
            consts.setdefault((i, j), {})[k] = c
        model = AlgebraGroup(base=base, dim=int(doc["dim"]), constants=consts)
    else:
        raise GroupError(f"unknown group family {fam!r}")
    model.validate()
    return model


# -- finite groups ------------------------------------------------------------

class FiniteGroup:
    """A finite group on indices 0..N-1 with a multiplication table."""

    def __init__(self, table: np.ndarray, coords: np.ndarray | None = None, *, model: GroupModel | None = None,
                 m: int = 1, label: str = "", p: int | None = None):
        self.table = table
        self._p = p if p is not None else (model.base.p if model is not None else None)
        self.order = table.shape[0]
        self.coords = coords
        self.model = model
        self.m = m
        self.label = label
        ident = np.nonzero((table == np.arange(self.order)[None, :]).all(axis=1))[0]
        if len(ident) != 1:
            raise GroupError("multiplication table has no unique identity")
        self.identity = int(ident[0])
        inv = np.empty(self.order, dtype=np.int64)
        rows, cols = np.nonzero(table == self.identity)
        if len(rows) != self.order:
            raise GroupError("multiplication table is not a group table")
        inv[rows] = cols
        self.inv = inv

    def __repr__(self):
        return f"FiniteGroup({self.label or 'abstract'}, order={self.order})"

    def __len__(self):
        return self.order

    @property
    def field(self) -> Field | None:
        return self.model.field_at(self.m) if self.model is not None else None

    @property
    def dim(self) -> int | None:
        return self.model.dim if self.model is not None else None

    @property
    def q(self) -> int | None:
        return self.model.base.q if self.model is not None else None

    @property
    def p(self) -> int:
        from sympy import factorint
        if self._p is not None:
            return self._p
        primes = list(factorint(self.order))
        if len(primes) > 1:
            raise GroupError("not a p-group")
        return primes[0] if primes else 2

    def enc(self, i: int) -> tuple:
        if self.coords is None:
            return (int(i),)
        return tuple(int(c) for c in self.coords[i])

    def mul(self, a, b):
        return self.table[a, b]

    def conj(self, h, g):
        """g^-1 h g (works on index arrays)."""
        return self.table[self.table[self.inv[g], h], g]

    def commutator(self, a, b):
        """a b a^-1 b^-1."""
        t = self.table
        return t[t[t[a, b], self.inv[a]], self.inv[b]]

    def power(self, g, k: int):
        result = np.full(np.shape(g), self.identity, dtype=np.int64)
        base = np.asarray(g)
        k %= self.exponent
        while k:
            if k & 1:
                result = self.table[result, base]
            base = self.table[base, base]
            k >>= 1
        return result if np.ndim(g) else int(result)

    @cached_property
    def element_orders(self) -> np.ndarray:
        orders = np.zeros(self.order, dtype=np.int64)
        cur = np.arange(self.order)
        k = 1
        while (orders == 0).any():
            hit = (cur == self.identity) & (orders == 0)
            orders[hit] = k
            cur = self.table[cur, np.arange(self.order)]
            k += 1
        return orders

    @cached_property
    def exponent(self) -> int:
        from math import lcm
        return int(lcm(*set(self.element_orders.tolist())))

    def is_abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    # -- conjugacy
    @cached_property
    def _class_data(self):
        class_of = np.full(self.order, -1, dtype=np.int64)
        classes = []
        allg = np.arange(self.order)
        for h in range(self.order):
            if class_of[h] >= 0:
                continue
            orbit = np.unique(self.conj(h, allg))
            class_of[orbit] = len(classes)
            classes.append(orbit)
        return classes, class_of

    @property
    def classes(self) -> list[np.ndarray]:
        return self._class_data[0]

    @property
    def class_of(self) -> np.ndarray:
        return self._class_data[1]

    @cached_property
    def class_sizes(self) -> np.ndarray:
        return np.array([len(c) for c in self.classes], dtype=np.int64)

    @cached_property
    def class_reps(self) -> np.ndarray:
        return np.array([int(c[0]) for c in self.classes], dtype=np.int64)

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    def power_map(self, k: int) -> np.ndarray:
        """Class index of g^k for each class representative g."""
        return self.class_of[self.power(self.class_reps, k)]

    @cached_property
    def inverse_class(self) -> np.ndarray:
        return self.class_of[self.inv[self.class_reps]]

    # -- subgroups
    def subgroup(self, members, generators=None, certificate=None) -> "Subgroup":
        return Subgroup(self, members, generators=generators, certificate=certificate)

    def generate(self, gens) -> "Subgroup":
        gens = np.unique(np.asarray(list(gens), dtype=np.int64))
        elems = np.array([self.identity], dtype=np.int64)
        if len(gens) == 0:
            return Subgroup(self, elems, generators=())
        frontier = elems
        seen = np.zeros(self.order, dtype=bool)
        seen[elems] = True
        while len(frontier):
            new = np.unique(self.table[np.ix_(frontier, gens)].ravel())
            new = new[~seen[new]]
            seen[new] = True
            frontier = new
        return Subgroup(self, np.nonzero(seen)[0], generators=tuple(int(g) for g in gens))

    def whole(self) -> "Subgroup":
        return Subgroup(self, np.arange(self.order))

    def trivial(self) -> "Subgroup":
        return Subgroup(self, np.array([self.identity]))

    def center(self) -> "Subgroup":
        mask = (self.table == self.table.T).all(axis=1)
        return Subgroup(self, np.nonzero(mask)[0])

    def commutator_subgroup(self) -> "Subgroup":
        comms = set()
        allg = np.arange(self.order)
        for a in range(self.order):
            comms.update(np.unique(self.commutator(a, allg)).tolist())
        return self.generate(sorted(comms))

    def centralizer(self, g: int) -> "Subgroup":
        mask = self.table[:, g] == self.table[g, :]
        return Subgroup(self, np.nonzero(mask)[0])

    def normalizer(self, H: "Subgroup") -> "Subgroup":
        H = self._own(H)
        allg = np.arange(self.order)
        mask = np.ones(self.order, dtype=bool)
        for h in H.generating_set():
            mask &= H.mask[self.conj(h, allg)]
        return Subgroup(self, np.nonzero(mask)[0])

    def conjugate(self, H: "Subgroup", g: int) -> "Subgroup":
        """g^-1 H g."""
        H = self._own(H)
        members = np.unique(self.conj(H.members, g))
        cert = _conjugate_cert(H.certificate, self, g) if H.certificate is not None else None
        gens = tuple(int(x) for x in self.conj(np.asarray(H.generators), g)) if H.generators else None
        return Subgroup(self, members, generators=gens, certificate=cert)

    def is_normal(self, H: "Subgroup") -> bool:
        return self.normalizer(H).order == self.order

    def _own(self, H: "Subgroup") -> "Subgroup":
        if H.parent is not self:
            raise GroupError("subgroup belongs to a different group")
        return H

    def quotient(self, N: "Subgroup") -> "Quotient":
        N = self._own(N)
        if not self.is_normal(N):
            raise GroupError("subgroup is not normal")
        coset_of = np.full(self.order, -1, dtype=np.int64)
        reps = []
        for g in range(self.order):
            if coset_of[g] >= 0:
                continue
            coset_of[self.table[g, N.members]] = len(reps)
            reps.append(g)
        reps = np.array(reps, dtype=np.int64)
        qt = coset_of[self.table[np.ix_(reps, reps)]]
        coords = self.coords[reps] if self.coords is not None else None
        Q = FiniteGroup(qt, coords, label=f"{self.label}/N[{N.order}]", p=self.p)
        return Quotient(Q, coset_of, reps, self, N)

    def derived_data(self) -> dict:
        comm = self.commutator_subgroup()
        ab = self.quotient(comm)
        return {"center": self.center(), "commutator_subgroup": comm,
                "abelianization": ab, "exponent": self.exponent}

    def check_axioms(self) -> bool:
        t = self.table
        idx = np.arange(self.order)
        if not (t[self.identity] == idx).all() or not (t[:, self.identity] == idx).all():
            return False
        if not (t[idx, self.inv] == self.identity).all():
            return False
        for a in range(self.order):
            # (a b) c == a (b c) for all b, c
            if not (t[t[a][:, None], idx[None, :]] == t[a][t]).all():
                return False
        return True

    def abelian_basis(self) -> tuple[list[int], list[int], np.ndarray]:
        """Generators g_i of orders n_i (non-increasing) with G = (+) <g_i>.

        Also returns ``exps`` with ``g = prod g_i^exps[g, i]`` for every element.
        """
        if not self.is_abelian():
            raise GroupError("abelian basis of a nonabelian group")
        t = self.table
        in_S = np.zeros(self.order, dtype=bool)
        in_S[self.identity] = True
        gens: list[int] = []
        orders: list[int] = []
        allg = np.arange(self.order)
        while not in_S.all():
            # order of every element modulo S
            ordS = np.zeros(self.order, dtype=np.int64)
            cur = allg.copy()
            k = 1
            while (ordS == 0).any():
                ordS[(ordS == 0) & in_S[cur]] = k
                cur = t[cur, allg]
                k += 1
            n = int(ordS.max())
            x = int(np.argmax(ordS == n))
            cands = t[x, np.nonzero(in_S)[0]]
            good = cands[self.power(cands, n) == self.identity]
            if len(good) == 0:
                raise GroupError("failed to split a cyclic summand")
            y = int(good.min())
            gens.append(y)
            orders.append(n)
            S = np.nonzero(in_S)[0]
            block = [S]
            cur = S
            for _ in range(n - 1):
                cur = t[y, cur]
                block.append(cur)
            in_S[np.concatenate(block)] = True
        exps = np.zeros((self.order, len(gens)), dtype=np.int64)
        elems = np.array([self.identity])
        vecs = np.zeros((1, len(gens)), dtype=np.int64)
        for i, (g, n) in enumerate(zip(gens, orders)):
            new_e, new_v = [elems], [vecs]
            cur = elems
            for j in range(1, n):
                cur = t[cur, g]
                v = vecs.copy()
                v[:, i] = j
                new_e.append(cur)
                new_v.append(v)
            elems = np.concatenate(new_e)
            vecs = np.concatenate(new_v)
        exps[elems] = vecs
        return gens, orders, exps

    # -- Frobenius
    def frobenius_perm(self, k: int = 1) -> np.ndarray:
        """Coordinatewise q^k-power map as an index permutation (model groups only)."""
        if self.model is None:
            raise GroupError("Frobenius needs a model group")
        F = self.field
        X = F.frobenius(self.coords, self.model.base.r * k)
        return encode(X, F.q)


@dataclass
class Quotient:
    group: FiniteGroup
    projection: np.ndarray
    section: np.ndarray
    parent: FiniteGroup
    kernel: "Subgroup"


class Subgroup:
    """A subgroup of ``parent`` given by its (sorted) member indices."""

    def __init__(self, parent: FiniteGroup, members, generators=None, certificate=None):
        self.parent = parent
        self.members = np.unique(np.asarray(members, dtype=np.int64))
        self.generators = tuple(generators) if generators is not None else None
        self.certificate = certificate

    @property
    def order(self) -> int:
        return len(self.members)

    def __len__(self):
        return self.order

    def __contains__(self, g) -> bool:
        return bool(self.mask[int(g)])

    def __eq__(self, other):
        return isinstance(other, Subgroup) and other.parent is self.parent and np.array_equal(self.members, other.members)

    def __hash__(self):
        return hash((id(self.parent), self.members.tobytes()))

    def __repr__(self):
        return f"Subgroup(order={self.order} of {self.parent!r})"

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.order, dtype=bool)
        m[self.members] = True
        return m

    def is_closed(self) -> bool:
        t = self.parent.table
        return bool(self.mask[t[np.ix_(self.members, self.members)]].all()) and self.parent.identity in self

    def issubset(self, other: "Subgroup") -> bool:
        return bool(other.mask[self.members].all())

    def intersect(self, other: "Subgroup") -> "Subgroup":
        return Subgroup(self.parent, self.members[other.mask[self.members]])

    def generating_set(self) -> tuple[int, ...]:
        if self.generators is not None:
            return self.generators
        gens: list[int] = []
        seen = np.zeros(self.parent.order, dtype=bool)
        seen[self.parent.identity] = True
        for g in self.members:
            if not seen[g]:
                gens.append(int(g))
                seen = self.parent.generate(gens).mask.copy()
        self.generators = tuple(gens)
        return self.generators

    @cached_property
    def _group_data(self):
        pos = np.full(self.parent.order, -1, dtype=np.int64)
        pos[self.members] = np.arange(self.order)
        t = pos[self.parent.table[np.ix_(self.members, self.members)]]
        coords = self.parent.coords[self.members] if self.parent.coords is not None else None
        return FiniteGroup(t, coords, label=f"sub[{self.order}] of {self.parent.label}", p=self.parent.p), pos

    def as_group(self) -> FiniteGroup:
        """The subgroup as a standalone group; index i corresponds to ``members[i]``."""
        return self._group_data[0]

    def local_index(self, g) -> np.ndarray | int:
        """Parent index -> index in :meth:`as_group`."""
        out = self._group_data[1][g]
        return out if np.ndim(out) else int(out)


def encode(X: np.ndarray, Q: int) -> np.ndarray:
    """Lexicographic mixed-radix index of coordinate rows."""
    idx = np.zeros(X.shape[0], dtype=np.int64)
    for t in range(X.shape[1]):
        idx = idx * Q + X[:, t]
    return idx


def decode(idx: np.ndarray, Q: int, d: int) -> np.ndarray:
    idx = np.asarray(idx, dtype=np.int64)
    out = np.zeros((idx.shape[0], d), dtype=np.int64)
    for t in range(d - 1, -1, -1):
        out[:, t] = idx % Q
        idx = idx // Q
    return out


def all_coords(F: Field, d: int) -> np.ndarray:
    return decode(np.arange(F.q**d), F.q, d)


def points(model: GroupModel, m: int = 1, cap: int | None = None) -> FiniteGroup:
    """G(F_{q^m}) as an enumerated group."""
    model.validate()
    if m < 1:
        raise GroupError("extension degree must be >= 1")
    F = model.field_at(m)
    cap = group_cap() if cap is None else cap
    N = F.q ** model.dim
    if N > cap:
        raise CapExceeded(f"group order {N} exceeds cap {cap}")
    X = all_coords(F, model.dim)
    dtype = np.int16 if N < 1 << 15 else np.int32
    table = np.empty((N, N), dtype=dtype)
    chunk = max(1, (1 << 18) // N)
    for i0 in range(0, N, chunk):
        i1 = min(N, i0 + chunk)
        A = np.repeat(X[i0:i1], N, axis=0)
        B = np.tile(X, (i1 - i0, 1))
        table[i0:i1] = encode(model.mul(F, A, B), F.q).reshape(i1 - i0, N)
    label = f"{model.family}/{model.base.name}" + (f"@m={m}" if m > 1 else "")
    return FiniteGroup(table, X, model=model, m=m, label=label)


def model_mul(model: GroupModel, F: Field, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.int64))
    Y = np.atleast_2d(np.asarray(Y, dtype=np.int64))
    if X.shape[0] == 1 and Y.shape[0] > 1:
        X = np.repeat(X, Y.shape[0], axis=0)
    if Y.shape[0] == 1 and X.shape[0] > 1:
        Y = np.repeat(Y, X.shape[0], axis=0)
    return model.mul(F, X, Y)


def model_conj(model: GroupModel, F: Field, H: np.ndarray, g: np.ndarray) -> np.ndarray:
    """g^-1 h g on coordinate rows."""
    g = np.atleast_2d(g)
    return model_mul(model, F, model_mul(model, F, model.inverse_coords(F, g), H), g)


@dataclass
class FrobGroup:
    """A finite group with an automorphism phi (an index permutation)."""

    group: FiniteGroup
    phi: np.ndarray

    @classmethod
    def standard(cls, group: FiniteGroup) -> "FrobGroup":
        return cls(group, group.frobenius_perm(1))

    @classmethod
    def inner(cls, group: FiniteGroup, h: int) -> "FrobGroup":
        """phi(g) = h g h^-1."""
        allg = np.arange(group.order)
        return cls(group, group.table[group.table[h, allg], group.inv[h]])

    def is_automorphism(self) -> bool:
        t = self.group.table
        phi = np.asarray(self.phi)
        if sorted(phi.tolist()) != list(range(self.group.order)):
            return False
        return bool((phi[t] == t[phi[:, None], phi[None, :]]).all())

    def fixed_points(self) -> Subgroup:
        if "_fixed" not in self.__dict__:
            self.__dict__["_fixed"] = Subgroup(self.group, np.nonzero(self.phi == np.arange(self.group.order))[0])
        return self.__dict__["_fixed"]


@dataclass
class ConjugatedCertificate:
    """Certificate of g^-1 L g given a certificate of L and g over the base field level."""

    inner: object
    g_coords: tuple
    model: GroupModel
    level: int

    @property
    def k(self) -> int:
        return self.inner.k

    def points(self, m: int) -> np.ndarray:
        F = self.model.field_at(m)
        base_level = self.model.field_at(self.level)
        g = F.embed_from(np.asarray(self.g_coords, dtype=np.int64), base_level)
        return model_conj(self.model, F, self.inner.points(m), g)

    def describe(self) -> dict:
        return {"kind": "conjugate", "by": list(self.g_coords), "of": self.inner.describe()}


def _conjugate_cert(cert, group: FiniteGroup, g: int):
    return ConjugatedCertificate(cert, group.enc(g), group.model, group.m)
