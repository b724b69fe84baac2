"""Witnesses (P, chi~) with Ind_P^G chi~ irreducible, P carrying an algebraic certificate."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..chars import CharacterTable, LinearChar, character_table, induce
from ..group import FiniteGroup, Subgroup
from .admissible import AdmissibilityError, enumerate_admissible, heisenberg_rep
from .certificates import certify

EASY_FAMILIES = ("ul", "algebra", "vector")


class HigmanError(ValueError):
    pass


@dataclass
class HigmanWitness:
    rho: int
    P: Subgroup
    chi: LinearChar
    certificate: object | None
    status: str
    checks: dict = field(default_factory=dict)

    @property
    def index(self) -> int:
        return self.P.parent.order // self.P.order

    def to_json(self) -> dict:
        G = self.P.parent
        return {"irreducible": self.rho, "P_order": self.P.order, "index": self.index,
                "P_generators": [list(G.enc(g)) for g in self.P.generating_set()],
                "chi": self.chi.to_json(), "status": self.status,
                "certificate": None if self.certificate is None else self.certificate.describe(),
                "checks": self.checks}


def _power_of(n: int, q: int) -> bool:
    while n % q == 0 and n > 1:
        n //= q
    return n == 1


def _pairs(G: FiniteGroup, table: CharacterTable):
    cache = G.__dict__.setdefault("_higman_pairs", {})
    if id(table) not in cache:
        cache[id(table)] = enumerate_admissible(G, mode="finite", table=table)
    return cache[id(table)]


def strong_higman_witness(G: FiniteGroup, rho: int, table: CharacterTable | None = None,
                          require_easy: bool = True) -> HigmanWitness:
    """Find P and a linear chi~ on P with Ind_P^G chi~ equal to the irreducible ``rho``.

    P is the preimage of a Lagrangian of Gamma'/H for an admissible pair covering
    rho, and chi~ extends chi to it.  P is certified as the points of an algebraic
    subgroup when Gamma'/H has exponent p; otherwise the witness comes back with
    status "realization not implemented".
    """
    if G.model is None:
        raise HigmanError("strong Higman witnesses need a model group")
    if require_easy and G.model.family not in EASY_FAMILIES:
        raise HigmanError(f"model family {G.model.family!r} is not in the easy families")
    table = table if table is not None else character_table(G)
    if not 0 <= rho < len(table):
        raise HigmanError(f"irreducible index {rho} out of range")
    E = _pairs(G, table)
    target = table[rho]
    for k in E.coverage[rho]:
        pair = E.pairs[k]
        try:
            hr = heisenberg_rep(pair)
        except AdmissibilityError:
            continue
        P = hr.Ltilde
        chi = hr.extension
        ind = induce(P, LinearChar(P.as_group(), chi.residues, chi.e).to_class_function())
        checks = {"induced_equals_irreducible": ind == target,
                  "index_is_power_of_q": _power_of(G.order // P.order, G.model.base.q),
                  "order_is_power_of_q": _power_of(P.order, G.model.base.q)}
        if not checks["induced_equals_irreducible"]:
            continue
        quotient = pair.pairing.W if pair.pairing is not None else None
        exponent_p = quotient is None or all(n == G.p for n in quotient.orders)
        if not exponent_p:
            return HigmanWitness(rho, P, chi, None, "realization not implemented", checks)
        cert, note = certify(P)
        if cert is None:
            return HigmanWitness(rho, P, chi, None, f"no certificate: {note}", checks)
        P.certificate = cert
        checks["certified"] = True
        return HigmanWitness(rho, P, chi, cert, "certified", checks)
    raise HigmanError(f"no admissible pair yields a witness for irreducible {rho}")


def all_witnesses(G: FiniteGroup, table: CharacterTable | None = None) -> list[HigmanWitness]:
    table = table if table is not None else character_table(G)
    return [strong_higman_witness(G, i, table) for i in range(len(table))]
