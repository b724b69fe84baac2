"""phi-conjugacy classes and induction of class functions through inner forms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..chars import ClassFunction, induce
from ..group import FiniteGroup, FrobGroup, Subgroup


class PhiError(ValueError):
    pass


@dataclass
class PhiConjClasses:
    source: FrobGroup
    classes: list  # sorted index arrays, ordered by smallest element
    class_of: np.ndarray

    def __len__(self):
        return len(self.classes)

    @property
    def reps(self) -> list[int]:
        return [int(c[0]) for c in self.classes]

    def lang_image(self) -> np.ndarray:
        """{phi(g) g^-1}."""
        G = self.source.group
        allg = np.arange(G.order)
        return np.unique(G.table[self.source.phi[allg], G.inv[allg]])

    def conjugator(self, g: int, target: int) -> int:
        """Some c with phi(c) g c^-1 = target."""
        G, phi = self.source.group, self.source.phi
        allg = np.arange(G.order)
        hit = np.nonzero(G.table[G.table[phi[allg], g], G.inv[allg]] == target)[0]
        if len(hit) == 0:
            raise PhiError("elements are not phi-conjugate")
        return int(hit[0])

    def to_json(self) -> dict:
        G = self.source.group
        return {"count": len(self.classes), "sizes": [int(len(c)) for c in self.classes],
                "representatives": [list(G.enc(int(c[0]))) for c in self.classes]}


def phi_conj_classes(FG: FrobGroup) -> PhiConjClasses:
    """Orbits of g -> phi(x) g x^-1."""
    if not FG.is_automorphism():
        raise PhiError("phi is not an automorphism")
    G = FG.group
    allg = np.arange(G.order)
    class_of = np.full(G.order, -1, dtype=np.int64)
    classes = []
    for g in range(G.order):
        if class_of[g] >= 0:
            continue
        orbit = np.unique(G.table[G.table[FG.phi[allg], g], G.inv[allg]])
        class_of[orbit] = len(classes)
        classes.append(orbit)
    return PhiConjClasses(FG, classes, class_of)


def restrict_frobenius(FG: FrobGroup, K: Subgroup) -> FrobGroup:
    """phi restricted to a phi-stable subgroup, as a standalone FrobGroup."""
    if not K.mask[FG.phi[K.members]].all():
        raise PhiError("subgroup is not phi-stable")
    Kg = K.as_group()
    return FrobGroup(Kg, np.asarray(K.local_index(FG.phi[K.members])))


def twisted_fixed_points(FG: FrobGroup, K: Subgroup, beta: int) -> Subgroup:
    """Fixed points in K of k -> beta^-1 phi(k) beta: the inner form of K twisted by beta."""
    cache = FG.__dict__.setdefault("_twisted", {})
    key = (K.members.tobytes(), int(beta))
    if key not in cache:
        G = FG.group
        k = K.members
        img = G.table[G.table[G.inv[beta], FG.phi[k]], beta]
        cache[key] = G.subgroup(k[img == k])
    return cache[key]


@dataclass
class OrbitTerm:
    coset_rep: int  # x' with phi(x')^-1 x' the canonical class representative
    beta: int
    stabilizer: Subgroup  # inside Gamma^phi, as a subgroup of Gamma
    orbit_size: int

    def to_json(self, G: FiniteGroup) -> dict:
        return {"coset_rep": list(G.enc(self.coset_rep)), "class_rep": list(G.enc(self.beta)),
                "stabilizer_order": self.stabilizer.order, "orbit_size": self.orbit_size}


@dataclass
class InnerFormInduction:
    result: ClassFunction  # on Gamma^phi as a standalone group
    fixed: Subgroup  # Gamma^phi inside Gamma
    terms: list

    def to_json(self) -> dict:
        G = self.fixed.parent
        return {"fixed_order": self.fixed.order, "orbits": [t.to_json(G) for t in self.terms],
                "values": self.result.to_json()}


def fixed_coset_orbits(FG: FrobGroup, Gp: Subgroup) -> tuple[Subgroup, list[OrbitTerm], PhiConjClasses]:
    """Orbits of Gamma^phi on the phi-fixed cosets x Gamma', with normalized representatives."""
    G = FG.group
    phi = FG.phi
    if not Gp.mask[phi[Gp.members]].all():
        raise PhiError("Gamma' is not phi-stable")
    local = restrict_frobenius(FG, Gp)
    pcc = phi_conj_classes(local)
    fixed = FG.fixed_points()
    # coset id of x Gamma' = smallest element of the coset
    allg = np.arange(G.order)
    cos = G.table[allg[:, None], Gp.members[None, :]].min(axis=1)
    beta_all = G.table[G.inv[phi[allg]], allg]  # phi(x)^-1 x
    fixed_cosets = np.unique(cos[Gp.mask[beta_all]])
    seen = np.zeros(G.order, dtype=bool)
    terms = []
    for c in fixed_cosets:
        if seen[c]:
            continue
        orbit = np.unique(cos[G.table[fixed.members, c]])
        seen[orbit] = True
        x = int(c)
        beta = int(beta_all[x])
        b_loc = Gp.local_index(beta)
        b0_loc = pcc.reps[pcc.class_of[b_loc]]
        # phi(c') beta c'^-1 = beta0 with c' in Gamma', then x' = x c'^-1
        cl = Gp.members[pcc.conjugator(b_loc, b0_loc)]
        xp = int(G.table[x, G.inv[cl]])
        b0 = int(Gp.members[b0_loc])
        if int(G.table[G.inv[phi[xp]], xp]) != b0:
            raise PhiError("internal error: normalized representative has the wrong class")
        inner = twisted_fixed_points(FG, Gp, b0)
        stab = G.subgroup(np.unique(G.table[G.table[xp, inner.members], G.inv[xp]]))
        if not fixed.mask[stab.members].all():
            raise PhiError("internal error: stabilizer is not phi-fixed")
        terms.append(OrbitTerm(xp, b0, stab, int(len(orbit))))
    return fixed, terms, pcc


def induce_with_inner_forms(FG: FrobGroup, Gp: Subgroup,
                            t: dict[int, ClassFunction | Callable[[int], object]]) -> InnerFormInduction:
    """Sum over Gamma^phi-orbits on (Gamma/Gamma')^phi of the induced transported class functions.

    ``t`` maps a class representative beta (an element of Gamma', the smallest
    element of its phi-conjugacy class in Gamma') to a class function on the
    twisted fixed group ``twisted_fixed_points(FG, Gp, beta)``: either a
    ClassFunction on its ``as_group()`` or a callable on elements of Gamma.
    """
    G = FG.group
    fixed, terms, _ = fixed_coset_orbits(FG, Gp)
    Fg = fixed.as_group()
    total = None
    for term in terms:
        if term.beta not in t:
            raise PhiError(f"no class function supplied for the class of {G.enc(term.beta)}")
        f = t[term.beta]
        inner = twisted_fixed_points(FG, Gp, term.beta)
        xp = term.coset_rep
        if isinstance(f, ClassFunction):
            if f.group is not inner.as_group() and inner.order == Gp.order and f.group is Gp.as_group():
                inner = Gp
            if f.group is not inner.as_group():
                raise PhiError("class function does not live on the twisted fixed group")

            def ev(s, f=f, inner=inner, xp=xp):
                return f(inner.local_index(int(G.table[G.table[G.inv[xp], s], xp])))
        else:
            def ev(s, f=f, xp=xp):
                return f(int(G.table[G.table[G.inv[xp], s], xp]))
        S = Fg.subgroup(fixed.local_index(term.stabilizer.members))
        Sg = S.as_group()
        moved = ClassFunction.from_function(Sg, lambda i, S=S, ev=ev: ev(int(fixed.members[S.members[i]])))
        piece = induce(S, moved)
        total = piece if total is None else total + piece
    if total is None:
        total = ClassFunction.constant(Fg, 0)
    return InnerFormInduction(total, fixed, terms)

