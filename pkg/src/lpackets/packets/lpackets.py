"""Geometric conjugacy of admissible pairs, L-packets, and the partition check."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..chars import CharacterTable
from ..group import FiniteGroup
from .admissible import AdmissiblePair
from .certificates import CertificateError, LevelData, LevelGroup, certify, level_cap

DEFAULT_M = 4


class GeomConjError(ValueError):
    pass


@dataclass
class GeomConjClass:
    members: list  # AdmissiblePair objects defined over F_q
    indices: list  # positions in the input list
    witnesses: list = field(default_factory=list)  # {"from", "to", "m", "g"}
    M: int = DEFAULT_M
    M_eff: int = 1
    under_merge_possible: bool = False

    @property
    def representative(self) -> AdmissiblePair:
        return self.members[0]

    def to_json(self) -> dict:
        return {"indices": list(self.indices), "size": len(self.members), "witnesses": self.witnesses,
                "M": self.M, "M_searched": self.M_eff, "under_merge_possible": self.under_merge_possible}


def _cert(H):
    if H.certificate is None:
        cert, _ = certify(H)
        if cert is None:
            raise GeomConjError(f"subgroup of order {H.order} has no certificate")
        H.certificate = cert
    return H.certificate


def searchable_levels(G: FiniteGroup, M: int) -> int:
    """Largest m <= M such that G(F_{q^m}) fits under the level cap."""
    model = G.model
    m_eff = 1
    for m in range(2, M + 1):
        if model.base.q ** (m * model.dim) > level_cap():
            break
        m_eff = m
    return m_eff


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> bool:
        a, b = self.find(i), self.find(j)
        if a == b:
            return False
        self.parent[max(a, b)] = min(a, b)
        return True


def _level1_witness(G: FiniteGroup, a: AdmissiblePair, b: AdmissiblePair, mod: int) -> int | None:
    """Some g with g^-1 H_a g = H_b and chi_b(g^-1 h g) = chi_a(h), or None."""
    allg = np.arange(G.order)
    ok = np.ones(G.order, dtype=bool)
    for s in a.H.generating_set():
        c = G.conj(np.full(G.order, s), allg)
        inside = b.H.mask[c]
        ok &= inside
        vals = np.where(inside, b.chi._full[c] * (mod // b.chi.p**b.chi.e), -1)
        ok &= vals == a.chi.residue(s) * (mod // a.chi.p**a.chi.e)
        if not ok.any():
            return None
    return int(np.argmax(ok)) if ok.any() else None


def geometric_conjugacy(pairs: list[AdmissiblePair], M: int = DEFAULT_M) -> list[GeomConjClass]:
    """Group pairs that become conjugate under G(F_{q^m}) for some m <= M.

    Pairs are compared after base change: H(F_{q^m}) from the certificate and
    chi transferred by composing with the coordinatewise trace.  Levels whose
    point count exceeds the level cap are skipped and the classes say so.
    """
    if M < 1:
        raise GeomConjError("the bound M must be at least 1")
    if not pairs:
        return []
    G = pairs[0].group
    if any(p.group is not G for p in pairs):
        raise GeomConjError("pairs must live in one group")
    if G.model is None:
        raise GeomConjError("geometric conjugacy needs a model group")
    M_eff = searchable_levels(G, M)
    mod = G.p ** max(p.chi.e for p in pairs)
    n = len(pairs)
    uf = _UnionFind(n)
    witnesses = []
    by_order: dict[int, list[int]] = {}
    for i, p in enumerate(pairs):
        by_order.setdefault(p.H.order, []).append(i)

    for idxs in by_order.values():
        for a_pos, i in enumerate(idxs):
            for j in idxs[a_pos + 1:]:
                if uf.find(i) == uf.find(j):
                    continue
                g = _level1_witness(G, pairs[i], pairs[j], mod)
                if g is not None:
                    uf.union(i, j)
                    witnesses.append({"from": i, "to": j, "m": 1, "g": [int(c) for c in G.enc(g)]})

    for m in range(2, M_eff + 1):
        L = LevelGroup.of(G.model, m)
        for idxs in by_order.values():
            if len({uf.find(i) for i in idxs}) < 2:
                continue
            data = {}
            for i in idxs:
                D = LevelData.of(_cert(pairs[i].H), m)
                if not D.closed:
                    raise GeomConjError(f"H(F_q^{m}) is not a subgroup for pair {i}")
                full = D.transfer(pairs[i].chi)
                scale = mod // pairs[i].chi.p ** pairs[i].chi.e
                data[i] = (D, np.where(full >= 0, full * scale, -1))
            for a_pos, i in enumerate(idxs):
                Di, fi = data[i]
                conj = None
                for j in idxs[a_pos + 1:]:
                    if uf.find(i) == uf.find(j):
                        continue
                    if conj is None:
                        conj = Di.conj_table()
                    Dj, fj = data[j]
                    ok = np.ones(L.order, dtype=bool)
                    for s, c in zip(Di.gens, conj):
                        ok &= fj[c] == fi[s]
                        if not ok.any():
                            break
                    if ok.any():
                        g = int(np.argmax(ok))
                        uf.union(i, j)
                        witnesses.append({"from": i, "to": j, "m": m,
                                          "g": [int(c) for c in L.coords(g)[0]]})

    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(uf.find(i), []).append(i)
    classes = []
    roots = sorted(groups, key=lambda r: groups[r][0])
    for r in roots:
        members = groups[r]
        wit = [w for w in witnesses if uf.find(w["from"]) == r]
        order = pairs[members[0]].H.order
        # another class with the same |H| might still merge over a larger extension
        rivals = any(uf.find(k) != r for k in by_order[order])
        classes.append(GeomConjClass([pairs[k] for k in members], members, wit, M, M_eff, rivals))
    return classes


def conjugate_pair_check(G: FiniteGroup, a: AdmissiblePair, b: AdmissiblePair, witness: dict) -> bool:
    """Re-verify one recorded witness independently of the search."""
    m = witness["m"]
    g = np.asarray(witness["g"], dtype=np.int64)
    mod = G.p ** max(a.chi.e, b.chi.e)
    sa, sb = mod // a.chi.p**a.chi.e, mod // b.chi.p**b.chi.e
    if m == 1:
        gi = int(np.nonzero((G.coords == g).all(axis=1))[0][0])
        c = G.conj(a.H.members, gi)
        if not b.H.mask[c].all():
            return False
        return bool((b.chi.residue(c) * sb % mod == a.chi.residue(a.H.members) * sa % mod).all())
    L = LevelGroup.of(G.model, m)
    gi = int(L.index(g)[0])
    Da, Db = LevelData.of(_cert(a.H), m), LevelData.of(_cert(b.H), m)
    fa, fb = Da.transfer(a.chi), Db.transfer(b.chi)
    c = L.conj(Da.points, np.full(len(Da.points), gi))
    if not Db.mask[c].all():
        return False
    return bool((fb[c] * sb % mod == fa[Da.points] * sa % mod).all())


# -- packets -------------------------------------------------------------------

@dataclass
class LPacket:
    geom_class: GeomConjClass
    members: frozenset

    def to_json(self) -> dict:
        return {"members": sorted(self.members), "class": self.geom_class.to_json()}


def lpacket_of_class(G: FiniteGroup, table: CharacterTable, C: GeomConjClass) -> LPacket:
    """All irreducible constituents of the inductions over the class."""
    out = set()
    for pair in C.members:
        if pair.group is not G:
            raise GeomConjError("class members are not defined over this group")
        out.update(table.decompose(pair.inducing_character()).constituents())
    if not out:
        raise GeomConjError("empty packet")
    return LPacket(C, frozenset(out))


@dataclass
class PartitionVerdict:
    ok: bool
    covering: bool
    equal_or_disjoint: bool
    overlaps: list
    uncovered: list
    note: str = ""

    def to_json(self) -> dict:
        return {"ok": self.ok, "covering": self.covering, "equal_or_disjoint": self.equal_or_disjoint,
                "overlaps": self.overlaps, "uncovered": self.uncovered, "note": self.note}


def verify_partition(packets, table: CharacterTable, M: int | None = None) -> PartitionVerdict:
    """Check pairwise equal-or-disjoint and total coverage of the irreducibles.

    ``packets`` may hold LPacket objects or plain sets of indices.
    """
    sets = [frozenset(p.members if isinstance(p, LPacket) else p) for p in packets]
    overlaps = []
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if sets[i] != sets[j] and sets[i] & sets[j]:
                overlaps.append({"packets": [i, j], "common": sorted(sets[i] & sets[j]),
                                 "only_first": sorted(sets[i] - sets[j]),
                                 "only_second": sorted(sets[j] - sets[i])})
    seen = set().union(*sets) if sets else set()
    uncovered = [k for k in range(len(table)) if k not in seen]
    note = ""
    if uncovered:
        bound = f"M = {M}" if M is not None else "the search bounds"
        note = f"coverage failure: bound-limited under {bound}, not a counterexample"
    if overlaps:
        note = (note + "; " if note else "") + "overlapping packets: classes may be under-merged"
    return PartitionVerdict(not overlaps and not uncovered, not uncovered, not overlaps, overlaps, uncovered, note)


@dataclass
class PacketReport:
    classes: list
    packets: list
    verdict: PartitionVerdict

    def distinct(self) -> list[frozenset]:
        out = []
        for p in self.packets:
            if p.members not in out:
                out.append(p.members)
        return out

    def to_json(self) -> dict:
        return {"packets": [p.to_json() for p in self.packets],
                "distinct_packets": [sorted(s) for s in self.distinct()],
                "partition": self.verdict.to_json()}


def lpackets(G: FiniteGroup, table: CharacterTable, pairs: list[AdmissiblePair], M: int = DEFAULT_M) -> PacketReport:
    classes = geometric_conjugacy(pairs, M)
    packets = [lpacket_of_class(G, table, C) for C in classes]
    return PacketReport(classes, packets, verify_partition(packets, table, M))
