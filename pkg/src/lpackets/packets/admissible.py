"""Admissible pairs (H, chi): stabilizers, commutator pairings, admissibility and enumeration."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt

import numpy as np

from ..chars import (CharacterTable, ClassFunction, LinearChar, character_table, extend_characters, induce,
                     linear_characters, restrict)
from ..duality.pairings import AlternatingPairing, FiniteAbelian, Lagrangian, find_lagrangian
from ..group import FiniteGroup, GroupError, Subgroup
from .certificates import CertificateError, LevelData, certified_subgroups, certify


class AdmissibilityError(ValueError):
    """A precondition failed; ``witness`` names the offending data."""

    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = witness or {}


def _coords(G: FiniteGroup, g) -> list[int]:
    return list(G.enc(int(g)))


# -- stabilizer and commutator pairing -----------------------------------------

def stabilizer_of_pair(G: FiniteGroup, H: Subgroup, chi: LinearChar) -> Subgroup:
    """{g in N_G(H) : chi(g^-1 h g) = chi(h) for all h in H}."""
    N = G.normalizer(H)
    keep = np.ones(N.order, dtype=bool)
    for h in H.generating_set():
        c = G.conj(np.full(N.order, h), N.members)
        keep &= chi.residue(c) == chi.residue(h)
    return G.subgroup(N.members[keep])


class CommutatorPairing(AlternatingPairing):
    """B_chi on Gamma'/H, with the data needed to move between Gamma' and W."""

    def __init__(self, W: FiniteAbelian, matrix, e: int, *, stabilizer: Subgroup, H: Subgroup,
                 chi: LinearChar, section: list[int], vectors: np.ndarray):
        super().__init__(W, matrix, e)
        self.stabilizer = stabilizer
        self.H = H
        self.chi = chi
        self.section = section  # parent indices lifting the basis of W
        self.vectors = vectors  # W-vector of every member of the stabilizer

    def preimage(self, members_W) -> Subgroup:
        """Preimage in Gamma' of a set of W-indices."""
        wanted = np.zeros(self.W.size, dtype=bool)
        wanted[np.asarray(members_W, dtype=np.int64)] = True
        idx = self.W.index(self.vectors) if self.W.rank else np.zeros(self.stabilizer.order, dtype=np.int64)
        return self.stabilizer.parent.subgroup(self.stabilizer.members[wanted[idx]])


def commutator_pairing(Gp: Subgroup, H: Subgroup, chi: LinearChar, verify: bool = True) -> CommutatorPairing:
    """(x, y) -> chi(x y x^-1 y^-1) on Gamma'/H.

    Raises :class:`AdmissibilityError` naming a pair of generators whose
    commutator leaves H when Gamma'/H is not commutative.
    """
    G = Gp.parent
    if not H.issubset(Gp):
        raise AdmissibilityError("H is not contained in the stabilizer")
    gens = Gp.generating_set()
    for h in H.generating_set():
        c = G.conj(np.full(Gp.order, h), Gp.members)
        if not H.mask[c].all() or (chi.residue(c) != chi.residue(h)).any():
            raise AdmissibilityError("chi is not invariant under the stabilizer")
    for i, a in enumerate(gens):
        for b in gens[i + 1:]:
            c = G.commutator(a, b)
            if not H.mask[c]:
                raise AdmissibilityError("Gamma'/H is not commutative",
                                         {"x": _coords(G, a), "y": _coords(G, b), "commutator": _coords(G, c)})
    local = Gp.as_group()
    quo = local.quotient(local.subgroup(Gp.local_index(H.members)))
    qgens, orders, exps = quo.group.abelian_basis()
    W = FiniteAbelian(G.p, tuple(orders))
    section = [int(Gp.members[quo.section[g]]) for g in qgens]
    e = chi.e
    B = np.zeros((W.rank, W.rank), dtype=np.int64)
    for i, a in enumerate(section):
        for j, b in enumerate(section):
            B[i, j] = chi.residue(G.commutator(a, b))
    vectors = exps[quo.projection]
    P = CommutatorPairing(W, B, e, stabilizer=Gp, H=H, chi=chi, section=section, vectors=vectors)
    if verify and Gp.order * Gp.order <= 1 << 20:
        # every value chi([x, y]) agrees with the pairing of the images
        T = P.table()
        idx = W.index(vectors) if W.rank else np.zeros(Gp.order, dtype=np.int64)
        comm = G.commutator(Gp.members[:, None], Gp.members[None, :])
        if not np.array_equal(chi.residue(comm), T[np.ix_(idx, idx)]):
            raise AdmissibilityError("commutator pairing is not bi-additive")
    return P


# -- admissibility -------------------------------------------------------------

@dataclass
class Condition:
    ok: bool | None
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"ok": self.ok, **self.detail}


@dataclass
class AdmissibilityVerdict:
    admissible: bool
    conditions: dict
    certificate: dict | None
    flags: list = field(default_factory=list)
    geometric: dict | None = None

    @property
    def geometric_admissible(self) -> bool | None:
        return None if self.geometric is None else self.geometric.get("admissible")

    def to_json(self) -> dict:
        return {"admissible": self.admissible,
                "conditions": {k: c.to_json() for k, c in self.conditions.items()},
                "certificate": self.certificate, "flags": list(self.flags), "geometric": self.geometric}


@dataclass
class AdmissiblePair:
    H: Subgroup
    chi: LinearChar
    stabilizer: Subgroup
    pairing: CommutatorPairing | None
    verdict: AdmissibilityVerdict

    @property
    def group(self) -> FiniteGroup:
        return self.H.parent

    @property
    def quotient_order(self) -> int:
        return self.stabilizer.order // self.H.order

    def inducing_character(self) -> ClassFunction:
        return induce(self.H, self.chi.to_class_function())

    def to_json(self) -> dict:
        G = self.group
        return {"H": {"order": self.H.order, "generators": [_coords(G, g) for g in self.H.generating_set()]},
                "chi": self.chi.to_json(),
                "stabilizer_order": self.stabilizer.order,
                "quotient_order": self.quotient_order,
                "pairing": self.pairing.to_json() if self.pairing is not None else None,
                "verdict": self.verdict.to_json()}


def _condition_three(G: FiniteGroup, H: Subgroup, chi: LinearChar, Gp: Subgroup) -> Condition:
    """For g outside Gamma', chi and chi^g differ on H cap g^-1 H g."""
    outside = np.nonzero(~Gp.mask)[0]
    if len(outside) == 0:
        return Condition(True, {"checked": 0})
    hs = H.members
    res_h = chi.residue(hs)
    for start in range(0, len(outside), 256):
        gs = outside[start:start + 256]
        conj = G.conj(hs[None, :], gs[:, None])  # g^-1 h g
        inside = H.mask[conj]
        vals = np.where(inside, chi._full[conj], res_h[None, :])
        agree = (vals == res_h[None, :]).all(axis=1)
        if agree.any():
            g = int(gs[np.argmax(agree)])
            return Condition(False, {"witness_g": _coords(G, g), "checked": start + int(np.argmax(agree)) + 1})
    return Condition(True, {"checked": int(len(outside))})


def is_admissible(G: FiniteGroup, H: Subgroup, chi: LinearChar, *, geometric: bool = False) -> AdmissibilityVerdict:
    """Check the three admissibility conditions at the level of G(F_q).

    With ``geometric=True`` the pair is also base-changed to F_{q^2}: the
    character transfer chi o Tr must stay a homomorphism, and a degenerate
    pairing is accepted when its radical at level 2 has fewer than q^2 points.
    """
    flags = []
    cert = H.certificate
    note = "supplied"
    if cert is None:
        cert, note = certify(H)
    if cert is None:
        flags.append("connectedness unverified")
    cert_json = None if cert is None else {**cert.describe(), "note": note}
    Gp = stabilizer_of_pair(G, H, chi)
    conds = {}
    pairing = None
    try:
        pairing = commutator_pairing(Gp, H, chi)
        conds["1"] = Condition(True, {"stabilizer_order": Gp.order})
    except AdmissibilityError as exc:
        conds["1"] = Condition(False, {"stabilizer_order": Gp.order, "reason": str(exc), **exc.witness})
    if pairing is not None:
        rad = len(pairing.radical())
        size = pairing.W.size
        conds["2"] = Condition(rad == 1, {"quotient_order": size, "radical_order": rad,
                                          "perfect_square": isqrt(size) ** 2 == size})
    else:
        conds["2"] = Condition(None, {"reason": "condition (1) failed"})
    conds["3"] = _condition_three(G, H, chi, Gp)
    admissible = all(c.ok for c in conds.values())
    geo = None
    if geometric:
        geo = _geometric_check(G, H, chi, cert, conds, pairing)
    return AdmissibilityVerdict(bool(admissible), conds, cert_json, flags, geo)


def _neutral_part(G, H, Gp, stabs: dict) -> dict:
    """Lower bound for the identity component of the stabilizer at each level.

    Joins every certified connected subgroup K with H <= K whose points lie in
    the stabilizer at all levels in ``stabs``.  Returns level -> sorted indices.
    """
    found = []
    for K in certified_subgroups(G):
        if K.order < H.order or not Gp.mask[K.members].all() or not K.mask[H.members].all():
            continue
        ok = True
        for m, st in stabs.items():
            if m == 1:
                continue
            DK = LevelData.of(K.certificate, m)
            if not DK.closed or not st[DK.points].all():
                ok = False
                break
        if ok:
            found.append(K)
    out = {}
    for m in stabs:
        if m == 1:
            pts = np.unique(np.concatenate([K.members for K in found]))
            out[m] = G.generate(pts).members
        else:
            levels = [LevelData.of(K.certificate, m) for K in found]
            big = max(levels, key=lambda D: len(D.points))
            gens = [g for D in levels if D is not big for g in D.gens]
            out[m] = big.L.closure(gens, start=big.points, start_gens=big.gens)
    return out


def _geometric_check(G, H, chi, cert, conds, pairing) -> dict:
    out: dict = {"levels": [1]}
    if cert is None:
        out.update(admissible=None, reason="no certificate, base change unavailable")
        return out
    if not conds["3"].ok:
        out.update(admissible=False, reason="condition (3) fails at level 1")
        return out
    try:
        D = LevelData.of(cert, 2)
        full = D.transfer(chi)
    except CertificateError as exc:
        out.update(admissible=None, reason=str(exc))
        return out
    out["levels"].append(2)
    if not D.closed:
        out.update(admissible=False, reason="H(F_{q^2}) is not a subgroup")
        return out
    mod = G.p**chi.e
    if not D.is_homomorphism(full, mod):
        out.update(admissible=False, transfer_homomorphism=False,
                   reason="chi o Tr is not a homomorphism at level 2")
        return out
    out["transfer_homomorphism"] = True
    Gp = stabilizer_of_pair(G, H, chi)
    st2 = np.zeros(D.L.order, dtype=bool)
    st2[D.stabilizer(full)] = True
    neutral = _neutral_part(G, H, Gp, {1: None, 2: st2})
    q = G.model.base.q
    level1 = LevelData.of(cert, 1)
    radicals = {}
    for m, (Dm, fm) in {1: (level1, level1.transfer(chi)), 2: (D, full)}.items():
        C = neutral[m]
        gens, _ = Dm.L.generating_set(C, start=Dm.points, start_gens=Dm.gens)
        inrad = np.ones(len(C), dtype=bool)
        for s in gens:
            c = Dm.L.commutator(C, np.full(len(C), s))
            if (fm[c] < 0).any():
                out.update(admissible=False, neutral_orders={k: int(len(v)) for k, v in neutral.items()},
                           reason=f"identity component of the stabilizer is not commutative mod H at level {m}")
                return out
            inrad &= fm[c] == 0
        radicals[m] = int(inrad.sum()) // len(Dm.points)
    ok = any(r < q**m for m, r in radicals.items())
    out.update(stabilizer_order_level2=int(st2.sum()),
               neutral_orders={m: int(len(v)) for m, v in neutral.items()},
               radical_orders=radicals, admissible=ok,
               reason="pairing on the identity component has finite radical" if ok
               else "radical grows with the level")
    return out


def admissible_pair(G: FiniteGroup, H: Subgroup, chi: LinearChar, *, geometric: bool = False) -> AdmissiblePair:
    verdict = is_admissible(G, H, chi, geometric=geometric)
    Gp = stabilizer_of_pair(G, H, chi)
    try:
        P = commutator_pairing(Gp, H, chi, verify=False)
    except AdmissibilityError:
        P = None
    return AdmissiblePair(H, chi, Gp, P, verdict)


# -- Heisenberg representation -------------------------------------------------

@dataclass
class HeisenbergRep:
    pair: AdmissiblePair
    character: ClassFunction  # on the stabilizer (as its own group)
    degree: int
    lagrangian: Lagrangian
    Ltilde: Subgroup
    extension: LinearChar
    checks: dict

    def induced(self) -> ClassFunction:
        return induce(self.pair.stabilizer, self.character)

    def to_json(self) -> dict:
        return {"degree": self.degree, "lagrangian": self.lagrangian.to_json(),
                "Ltilde_order": self.Ltilde.order, "checks": self.checks}


def heisenberg_rep(pair: AdmissiblePair) -> HeisenbergRep:
    """Induce an extension of chi from the preimage of a Lagrangian of Gamma'/H."""
    P = pair.pairing
    if P is None:
        raise AdmissibilityError("condition (1) fails; no pairing")
    if not P.is_nondegenerate():
        raise AdmissibilityError("pairing is degenerate", {"radical_order": int(len(P.radical()))})
    G = pair.group
    Gp = pair.stabilizer
    L = find_lagrangian(P) if P.W.rank else Lagrangian(P.W, np.array([0]), [])
    Lt = P.preimage(L.members)
    exts = extend_characters(pair.chi, Lt, first_only=False) if Lt.order // pair.H.order <= 64 else \
        extend_characters(pair.chi, Lt)
    if not exts:
        raise AdmissibilityError("chi does not extend to the Lagrangian preimage",
                                 {"obstruction_order": Lt.order})
    local = Gp.as_group()

    def pi_of(ext: LinearChar) -> ClassFunction:
        sub = local.subgroup(Gp.local_index(Lt.members))
        lc = LinearChar(sub, ext.residues, ext.e)
        return induce(sub, lc.to_class_function())

    pi = pi_of(exts[0])
    deg = int(pi.degree)
    Hl = local.subgroup(Gp.local_index(pair.H.members))
    res = restrict(Hl, pi)
    target = LinearChar(Hl, pair.chi.residues, pair.chi.e).to_class_function() * deg
    checks = {
        "irreducible": pi.norm() == 1,
        "restriction_is_multiple_of_chi": res == target,
        "degree_squared_is_index": deg * deg == P.W.size,
        "extension_independent": all(pi_of(x) == pi for x in exts[-1:]),
    }
    if not all(checks.values()):
        raise AdmissibilityError("Heisenberg representation failed verification", checks)
    return HeisenbergRep(pair, pi, deg, L, Lt, exts[0], checks)


# -- enumeration ---------------------------------------------------------------

@dataclass
class Enumeration:
    group: FiniteGroup
    mode: str
    pairs: list
    coverage: dict  # irreducible index -> list of pair indices
    constituents: list  # per pair: irreducible indices of Ind chi
    tested: int
    constraints: dict

    @property
    def uncovered(self) -> list[int]:
        return [i for i, v in self.coverage.items() if not v]

    @property
    def covered(self) -> bool:
        return not self.uncovered

    def to_json(self) -> dict:
        return {"mode": self.mode, "constraints": self.constraints, "tested": self.tested,
                "pairs": [dict(p.to_json(), constituents=c) for p, c in zip(self.pairs, self.constituents)],
                "coverage_complete": self.covered, "uncovered": self.uncovered}


def _subgroup_key(H: Subgroup) -> bytes:
    return H.members.tobytes()


def conjugacy_reps(G: FiniteGroup, subgroups: list[Subgroup]) -> list[Subgroup]:
    """First member of each G-conjugacy class, in input order."""
    seen: set[bytes] = set()
    out = []
    allg = np.arange(G.order)
    for H in subgroups:
        if _subgroup_key(H) in seen:
            continue
        out.append(H)
        conj = G.conj(H.members[None, :], allg[:, None])
        for row in np.unique(np.sort(conj, axis=1), axis=0):
            seen.add(row.astype(np.int64).tobytes())
    return out


def character_orbit_reps(G: FiniteGroup, H: Subgroup, chars: list[LinearChar]) -> list[LinearChar]:
    """One character per N_G(H)-orbit."""
    N = G.normalizer(H)
    seen: set = set()
    out = []
    for chi in chars:
        if chi.reduced_residues() in seen:
            continue
        out.append(chi)
        for g in N.members:
            back = G.table[G.table[g, H.members], G.inv[g]]  # g h g^-1
            seen.add(LinearChar(H, chi.residue(back), chi.e).reduced_residues())
    return out


def enumerate_admissible(G: FiniteGroup, *, mode: str = "finite", max_index: int | None = None,
                         certificate_required: bool = True, candidates: list[Subgroup] | None = None,
                         table: CharacterTable | None = None) -> Enumeration:
    """Admissible pairs over certificate-backed subgroups, up to conjugacy, with coverage.

    ``mode="finite"`` uses the level-1 conditions; ``mode="geometric"`` also
    requires the level-2 checks of :func:`is_admissible`.
    """
    if mode not in ("finite", "geometric"):
        raise ValueError(f"unknown mode {mode!r}")
    if candidates is None:
        candidates = certified_subgroups(G)
    if certificate_required:
        candidates = [H for H in candidates if H.certificate is not None]
    candidates = sorted(candidates, key=lambda H: (-H.order, H.members.tolist()))
    if max_index is not None:
        candidates = [H for H in candidates if G.order // H.order <= max_index]
    reps = conjugacy_reps(G, candidates)
    table = table if table is not None else character_table(G)
    pairs, consts = [], []
    tested = 0
    geometric = mode == "geometric"
    for H in reps:
        chars = character_orbit_reps(G, H, linear_characters(H))
        for chi in chars:
            tested += 1
            verdict = is_admissible(G, H, chi, geometric=geometric)
            ok = verdict.geometric_admissible if geometric else verdict.admissible
            if not ok:
                continue
            Gp = stabilizer_of_pair(G, H, chi)
            try:
                P = commutator_pairing(Gp, H, chi, verify=False)
            except AdmissibilityError:
                P = None
            pair = AdmissiblePair(H, chi, Gp, P, verdict)
            dec = table.decompose(pair.inducing_character())
            pairs.append(pair)
            consts.append(dec.constituents())
    coverage = {i: [] for i in range(len(table))}
    for k, c in enumerate(consts):
        for i in c:
            coverage[i].append(k)
    constraints = {"max_index": max_index, "certificate_required": certificate_required,
                   "candidates": len(candidates), "candidate_classes": len(reps)}
    return Enumeration(G, mode, pairs, coverage, consts, tested, constraints)
