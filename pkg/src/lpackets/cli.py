"""Command-line front end: ``lpackets <command> [model flags] [options]``.

Every command writes one JSON report (schema-versioned, with the normalized
config echoed back).  Exit status: 0 success, 1 a mathematical check failed,
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np
from sympy import isprime

SCHEMA = "lpackets.report/1"
COMMANDS = ("chartable", "admissible", "lpackets", "verify-higman", "heisenberg", "lagrangian",
            "linearize", "isotropic", "phiconj", "induce")
FAMILIES = ("ul", "vector", "fakeheis", "sp4", "algebra")


class ConfigError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors) if isinstance(errors, (list, tuple)) else [str(errors)]
        super().__init__("; ".join(self.errors))


@dataclass
class RunConfig:
    family: str = "ul"
    p: int = 2
    r: int = 1
    n: int | None = None
    s: int = 1
    dim: int | None = None
    constants: list = field(default_factory=list)
    m: int = 1
    M: int = 4
    N: int = 1
    m_max: int = 2
    mode: str = "finite"
    group_cap: int | None = None
    level_cap: int | None = None
    seed: int = 0
    count: int = 100
    witnesses: bool = False
    out: str | None = None
    csv: str | None = None
    options: dict = field(default_factory=dict)

    def model_json(self) -> dict:
        doc = {"family": self.family, "p": self.p, "r": self.r}
        if self.family in ("ul", "vector"):
            doc["n"] = self.n
        elif self.family == "fakeheis":
            doc["s"] = self.s
        elif self.family == "algebra":
            doc.update(dim=self.dim, constants=self.constants)
        return doc

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        return validate_config(doc)


def validate_config(doc: dict) -> RunConfig:
    """Normalize a config document; collects every violation before raising."""
    errors = []
    known = {f.name for f in fields(RunConfig)}
    model = doc.get("model", {})
    flat = {**{k: v for k, v in doc.items() if k != "model"}, **model}
    unknown = sorted(set(flat) - known)
    if unknown:
        errors.append(f"unknown keys: {', '.join(unknown)}")
    cfg = RunConfig(**{k: v for k, v in flat.items() if k in known})
    ints = ["p", "r", "s", "m", "M", "N", "m_max", "seed", "count"]
    for name in ints + ["n", "dim", "group_cap", "level_cap"]:
        v = getattr(cfg, name)
        if v is None:
            continue
        if isinstance(v, bool) or not isinstance(v, int):
            errors.append(f"{name} must be an integer, got {v!r}")
    if errors:
        raise ConfigError(errors)
    if cfg.family not in FAMILIES:
        errors.append(f"unknown family {cfg.family!r} (expected one of {', '.join(FAMILIES)})")
    if not isprime(cfg.p):
        errors.append(f"p = {cfg.p} is not prime")
    for name in ("r", "m", "M", "m_max", "s", "count"):
        if getattr(cfg, name) < 1:
            errors.append(f"{name} must be >= 1")
    if cfg.N < 0:
        errors.append("N must be >= 0")
    if cfg.n is not None and cfg.n < 1:
        errors.append("n must be >= 1")
    if cfg.dim is not None and cfg.dim < 1:
        errors.append("dim must be >= 1")
    if cfg.family == "fakeheis" and cfg.p == 2:
        errors.append("fake Heisenberg requires p > 2")
    if cfg.mode not in ("finite", "geometric"):
        errors.append(f"mode must be finite or geometric, got {cfg.mode!r}")
    for name in ("group_cap", "level_cap"):
        v = getattr(cfg, name)
        if v is not None and v < 1:
            errors.append(f"{name} must be positive")
    if errors:
        raise ConfigError(errors)
    return cfg


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: parse error at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return validate_config(doc)


# -- helpers -------------------------------------------------------------------

def _model(cfg: RunConfig):
    from .group import model_from_json
    if cfg.family in ("ul", "vector") and cfg.n is None:
        raise ConfigError(f"family {cfg.family} needs --n")
    if cfg.family == "algebra" and cfg.dim is None:
        raise ConfigError("family algebra needs dim")
    return model_from_json(cfg.model_json())


def _group(cfg: RunConfig):
    from .group import points
    return points(_model(cfg), cfg.m)


def _table(G):
    from .chars import character_table
    return character_table(G)


def _is_power(n: int, q: int) -> bool:
    while n > 1 and n % q == 0:
        n //= q
    return n == 1


def _write_csv(path: str, header: list, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


# -- commands ------------------------------------------------------------------

def cmd_chartable(cfg: RunConfig) -> tuple[dict, bool]:
    G = _group(cfg)
    T = _table(G)
    if cfg.csv:
        _write_csv(cfg.csv, ["irreducible", "degree"], [[i, d] for i, d in enumerate(T.degrees)])
    return {"order": G.order, "num_classes": G.num_classes, "degrees": sorted(T.degrees),
            "table": T.to_json(), "verified": T.verify()}, T.verify()


def cmd_verify_higman(cfg: RunConfig) -> tuple[dict, bool]:
    G = _group(cfg)
    T = _table(G)
    q = G.model.base.q ** cfg.m
    bad = sorted({d for d in T.degrees if not _is_power(d, q)})
    out = {"order": G.order, "q": q, "degrees": sorted(T.degrees), "all_powers_of_q": not bad,
           "non_powers": bad}
    ok = not bad
    if cfg.witnesses:
        from .packets.higman import all_witnesses
        W = all_witnesses(G, T)
        out["witnesses"] = [w.to_json() for w in W]
        wit_ok = all(w.checks["induced_equals_irreducible"] and w.status == "certified" for w in W)
        out["all_witnesses_certified"] = wit_ok
        ok = ok and wit_ok
    if cfg.csv:
        _write_csv(cfg.csv, ["irreducible", "degree", "power_of_q"],
                   [[i, d, _is_power(d, q)] for i, d in enumerate(T.degrees)])
    return out, ok


def cmd_admissible(cfg: RunConfig) -> tuple[dict, bool]:
    from .packets.admissible import enumerate_admissible
    G = _group(cfg)
    T = _table(G)
    E = enumerate_admissible(G, mode=cfg.mode, table=T)
    out = E.to_json()
    # coverage is a theorem only for the geometric notion; finite mode just reports it
    ok = E.covered or cfg.mode == "finite"
    if cfg.csv:
        _write_csv(cfg.csv, ["pair", "H_order", "stabilizer_order", "constituents"],
                   [[k, p.H.order, p.stabilizer.order, " ".join(map(str, c))]
                    for k, (p, c) in enumerate(zip(E.pairs, E.constituents))])
    return out, ok


def cmd_lpackets(cfg: RunConfig) -> tuple[dict, bool]:
    from .packets.admissible import enumerate_admissible
    from .packets.lpackets import lpackets
    G = _group(cfg)
    T = _table(G)
    E = enumerate_admissible(G, mode="geometric", table=T)
    R = lpackets(G, T, E.pairs, cfg.M)
    out = {"order": G.order, "degrees": T.degrees, "pairs": len(E.pairs), "M": cfg.M,
           "M_searched": R.classes[0].M_eff if R.classes else None, **R.to_json()}
    if cfg.csv:
        rows = []
        for k, s in enumerate(R.distinct()):
            rows.extend([k, i, T.degrees[i]] for i in sorted(s))
        _write_csv(cfg.csv, ["packet", "irreducible", "degree"], rows)
    return out, R.verdict.ok


def cmd_heisenberg(cfg: RunConfig) -> tuple[dict, bool]:
    from math import isqrt
    from .packets.admissible import AdmissibilityError, enumerate_admissible, heisenberg_rep
    G = _group(cfg)
    T = _table(G)
    E = enumerate_admissible(G, mode="finite", table=T)
    rows, ok = [], True
    for k, pair in enumerate(E.pairs):
        try:
            hr = heisenberg_rep(pair)
        except AdmissibilityError as exc:
            rows.append({"pair": k, "error": str(exc), "detail": getattr(exc, "witness", {})})
            ok = False
            continue
        ind = hr.induced()
        index = G.order // pair.stabilizer.order
        expect = index * isqrt(pair.quotient_order)
        good = (hr.degree ** 2 == pair.quotient_order and ind.norm() == 1 and ind.degree == expect)
        ok = ok and good
        rows.append({"pair": k, "H_order": pair.H.order, "quotient_order": pair.quotient_order,
                     "degree": hr.degree, "induced_degree": int(ind.degree), "expected_degree": expect,
                     "induced_irreducible": ind.norm() == 1, "ok": good, **hr.to_json()})
    return {"pairs": rows, "all_ok": ok}, ok


def cmd_lagrangian(cfg: RunConfig) -> tuple[dict, bool]:
    from .duality.pairings import FiniteAbelian, find_lagrangian, random_alternating
    n = cfg.n or 1
    rng = np.random.default_rng(cfg.seed)
    W = FiniteAbelian.elementary(cfg.p, 2 * n)
    rows, ok = [], True
    for _ in range(cfg.count):
        P = random_alternating(W, rng)
        L = find_lagrangian(P)
        T = P.table()
        good = L.order ** 2 == W.size and not T[np.ix_(L.members, L.members)].any()
        ok = ok and good
        rows.append({"pairing": P.B.tolist(), "lagrangian": L.to_json(), "ok": good})
    return {"W": W.to_json(), "trials": rows, "all_ok": ok}, ok


def cmd_linearize(cfg: RunConfig) -> tuple[dict, bool]:
    from .duality.linearized import moore_correspondence
    from .gf import make_field
    res = moore_correspondence(make_field(cfg.p, cfg.r))
    return res, res["bijection"]


def cmd_isotropic(cfg: RunConfig) -> tuple[dict, bool]:
    from .duality.twisted import TwistedPoly, isotropic_search, random_skew
    from .gf import make_field
    k = make_field(cfg.p, cfg.r)
    rng = np.random.default_rng(cfg.seed)
    rows = []
    found = 0
    for _ in range(cfg.count):
        a = random_skew(k, rng)
        d = random_skew(k, rng)
        b = TwistedPoly.random(k, rng)
        res = isotropic_search(a, b, d, N=cfg.N, m_max=cfg.m_max)
        found += res.found
        rows.append({"a": a.to_json(), "b": b.to_json(), "d": d.to_json(), **res.to_json()})
    # a miss means the bounded search ran out, not that no solution exists
    return {"field": k.name, "N": cfg.N, "m_max": cfg.m_max, "instances": rows, "found": found,
            "bound_limited": cfg.count - found}, True


def cmd_phiconj(cfg: RunConfig) -> tuple[dict, bool]:
    from .group import FrobGroup
    from .packets.phi import phi_conj_classes
    G = _group(cfg)
    inner = cfg.options.get("inner")
    FG = FrobGroup.inner(G, int(inner)) if inner is not None else FrobGroup.standard(G)
    P = phi_conj_classes(FG)
    image = P.lang_image()
    out = {"order": G.order, "phi": "inner" if inner is not None else "frobenius", **P.to_json(),
           "identity_class_is_lang_image": bool(np.array_equal(P.classes[P.class_of[0]], image))}
    ok = out["identity_class_is_lang_image"]
    if inner is not None:
        out["ordinary_classes"] = G.num_classes
        ok = ok and len(P) == G.num_classes
    if G.is_abelian():
        out["coker_order"] = G.order // len(image)
        ok = ok and len(P) == out["coker_order"]
    return out, ok


def cmd_induce(cfg: RunConfig) -> tuple[dict, bool]:
    from .chars import ClassFunction, induce
    from .group import FrobGroup
    from .packets.phi import fixed_coset_orbits, induce_with_inner_forms, twisted_fixed_points
    G = _group(cfg)
    FG = FrobGroup.standard(G)
    which = cfg.options.get("subgroup", "center")
    Gp = {"center": G.center, "commutator": G.commutator_subgroup, "trivial": G.trivial,
          "whole": G.whole}.get(which)
    if Gp is None:
        raise ConfigError(f"unknown subgroup {which!r}")
    Gp = Gp()
    _, terms, _ = fixed_coset_orbits(FG, Gp)
    t = {}
    for term in terms:
        inner = twisted_fixed_points(FG, Gp, term.beta)
        t[term.beta] = ClassFunction.trivial(inner.as_group())
    R = induce_with_inner_forms(FG, Gp, t)
    out = {"order": G.order, "subgroup": which, "subgroup_order": Gp.order, **R.to_json()}
    ok = True
    expect_deg = sum(R.fixed.order // term.stabilizer.order for term in terms)
    out["degree"] = str(R.result.degree)
    ok = R.result.degree == expect_deg
    if len(terms) == 1 and terms[0].beta == int(Gp.members[0]):
        fixed_sub = R.fixed.as_group().subgroup(R.fixed.local_index(terms[0].stabilizer.members))
        plain = induce(fixed_sub, ClassFunction.trivial(fixed_sub.as_group()))
        out["single_orbit_matches_plain_induce"] = plain == R.result
        ok = ok and plain == R.result
    return out, ok


HANDLERS = {
    "chartable": cmd_chartable, "admissible": cmd_admissible, "lpackets": cmd_lpackets,
    "verify-higman": cmd_verify_higman, "heisenberg": cmd_heisenberg, "lagrangian": cmd_lagrangian,
    "linearize": cmd_linearize, "isotropic": cmd_isotropic, "phiconj": cmd_phiconj, "induce": cmd_induce,
}


# -- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lpackets", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON config file; flags override its values")
    for name, typ in (("family", str), ("p", int), ("r", int), ("n", int), ("s", int), ("dim", int),
                      ("m", int), ("M", int), ("N", int), ("m-max", int), ("mode", str),
                      ("group-cap", int), ("level-cap", int), ("seed", int), ("count", int),
                      ("out", str), ("csv", str)):
        ap.add_argument(f"--{name}", type=typ, default=None)
    ap.add_argument("--witnesses", action="store_true", default=None,
                    help="verify-higman: also build a certified witness per irreducible")
    ap.add_argument("--inner", type=int, default=None, help="phiconj: use conjugation by this element")
    ap.add_argument("--subgroup", default=None, help="induce: center, commutator, trivial or whole")
    return ap


def config_from_args(args: argparse.Namespace) -> RunConfig:
    doc: dict = {}
    if args.config:
        doc = load_config(args.config).to_dict()
    for key in ("family", "p", "r", "n", "s", "dim", "m", "M", "N", "m_max", "mode", "group_cap",
                "level_cap", "seed", "count", "out", "csv", "witnesses"):
        v = getattr(args, key)
        if v is not None:
            doc[key] = v
    opts = dict(doc.get("options", {}))
    if args.inner is not None:
        opts["inner"] = args.inner
    if args.subgroup is not None:
        opts["subgroup"] = args.subgroup
    doc["options"] = opts
    return validate_config(doc)


def run(argv: list[str] | None = None) -> tuple[int, dict | None]:
    import os
    from .group import GroupError
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), None
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        for e in exc.errors:
            print(f"lpackets: config error: {e}", file=sys.stderr)
        return 2, None
    saved = {k: os.environ.get(k) for k in ("LPACKETS_GROUP_CAP", "LPACKETS_LEVEL_CAP")}
    if cfg.group_cap is not None:
        os.environ["LPACKETS_GROUP_CAP"] = str(cfg.group_cap)
    if cfg.level_cap is not None:
        os.environ["LPACKETS_LEVEL_CAP"] = str(cfg.level_cap)
    t0 = time.perf_counter()
    try:
        results, ok = HANDLERS[args.command](cfg)
    except ConfigError as exc:
        print(f"lpackets: config error: {exc}", file=sys.stderr)
        return 2, None
    except GroupError as exc:
        print(f"lpackets: {exc}", file=sys.stderr)
        return 2, None
    finally:
        # caps are per run; don't leak them into the caller's environment
        for k, v in saved.items():
            if v is None:
                os.environ.pop(k, None)
            else:
                os.environ[k] = v
    report = {"schema": SCHEMA, "command": args.command, "config": cfg.to_dict(),
              "results": results, "verdict": {"ok": bool(ok)},
              "timing": {"seconds": round(time.perf_counter() - t0, 3)}}
    text = json.dumps(report, indent=2, sort_keys=True, default=_jsonable)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return (0 if ok else 1), report


def _jsonable(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if hasattr(x, "to_json"):
        return x.to_json()
    return str(x)


def main(argv: list[str] | None = None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
