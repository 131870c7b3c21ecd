"""Command-line entry point dispatching the verification suites.

Every command produces a RunReport; --json switches the output to canonical
JSON (sorted keys, deterministic payloads up to wallTime).  Exit codes:
0 pass, 1 fail, 2 usage or computation error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from . import brst, center, engine, morphisms, presentations, sugawara, susypoly
from .engine import (bracket, jacobi_defect, parse_state, sample_state,
                     skew_expected, to_text, wick_consistency_defect)
from .scalars import PoleError


@dataclass
class RunReport:
    command: str
    parameters: dict
    status: str   # pass | fail | error
    payload: object
    wall_time: float

    def to_json(self):
        return {
            "command": self.command,
            "parameters": self.parameters,
            "status": self.status,
            "payload": self.payload,
            "wallTime": round(self.wall_time, 3),
        }


def _level_of(args):
    if getattr(args, "critical", False):
        return "critical"
    if getattr(args, "generic", False):
        return "generic"
    if getattr(args, "k", None) is not None:
        return Fraction(args.k)
    return getattr(args, "level", None) or "generic"


def _algebra(args, level):
    if getattr(args, "file", None):
        return presentations.load_presentation_json(args.file, level)
    return presentations.build(args.algebra, level)


# -- individual commands -----------------------------------------------------


def cmd_bracket(args):
    P = _algebra(args, _level_of(args))
    x = parse_state(P, args.left)
    y = parse_state(P, args.right)
    lp = bracket(x, y)
    payload = {"bracket": repr(lp),
               "nthProducts": {str(d): to_text(lp.nth(d)) for d in lp.degrees()}}
    return "pass", payload


def cmd_normalize(args):
    P = _algebra(args, _level_of(args))
    st = parse_state(P, args.expr)
    w = st.weight()
    payload = {"state": to_text(st),
               "weight": None if w is None else str(w),
               "parity": st.parity()}
    return "pass", payload


def cmd_check_hom(args):
    explicit = args.critical or args.generic or args.k is not None
    level = _level_of(args) if explicit else "default"
    if getattr(args, "file", None):
        gm = morphisms.load_genmap_json(args.file, None if level == "default" else level)
    else:
        gm = morphisms.resolve_map(args.map, level)
    rep = morphisms.check_homomorphism(gm)
    return ("pass" if rep.ok else "fail"), rep.to_json()


_DIAGRAMS = {
    "ks-square": lambda: morphisms.check_diagram(
        [morphisms.resolve_map("KS_inf"), morphisms.resolve_map("id_eta_bar")],
        [morphisms.resolve_map("eta"), morphisms.resolve_map("q")],
        ["J", "S", "G+", "G-"], label="ks-square"),
    "quotient-square": lambda: morphisms.check_diagram(
        [morphisms.resolve_map("Phi", "critical"), morphisms.resolve_map("quotient_W"),
         morphisms.resolve_map("Psi")],
        [morphisms.resolve_map("g"), morphisms.resolve_map("incl_FMS2")],
        ["h1", "h2", "e12", "e21", "e13", "e31", "e23", "e32"],
        label="quotient-square"),
}


def cmd_check_diagram(args):
    rep = _DIAGRAMS[args.diagram]()
    return ("pass" if rep.ok else "fail"), rep.to_json()


def cmd_brst(args):
    level = _level_of(args)
    rep = brst.verify_brst(level)
    payload = {
        "dSquared": rep["dSquared"],
        "closedGenerators": rep["closedGenerators"],
        "bracketTableMatches": rep["bracketTableMatches"],
    }
    if level == "generic":
        kern = brst.screening_kernel_report(level)
        payload["screeningKernel"] = kern
        ok = (rep["dSquared"] and all(rep["closedGenerators"].values())
              and rep["bracketTableMatches"] and all(kern.values()))
    else:
        payload["screeningKernel"] = "skipped (screening exponents have a pole at k=-1)"
        ok = (rep["dSquared"] and all(rep["closedGenerators"].values())
              and rep["bracketTableMatches"])
    return ("pass" if ok else "fail"), payload


def cmd_ss(args):
    level = _level_of(args)
    P, vs = sugawara.ss_vectors(args.p, args.m, args.n, level)
    payload = {"vectors": {str(q): to_text(st) for q, st in sorted(vs.items())}}
    status = "pass"
    if args.check_central:
        rep = sugawara.check_central(vs[args.p], P)
        payload["centrality"] = rep.to_json()
        status = "pass" if rep.is_central else "fail"
    return status, payload


def cmd_center(args):
    level = _level_of(args)
    P = _algebra(args, level)
    weights = []
    for w in range(args.max_weight + 1):
        sl = center.center_dimension(P, w)
        entry = sl.to_json(with_basis=args.basis)
        if args.symbols:
            entry["symbols"] = [repr(s) for s in _center_symbols(args.algebra, level, sl)]
        weights.append(entry)
    return "pass", {"weights": weights}


def _center_symbols(label, level, sl):
    if label == "V_gl21":
        gm = morphisms.resolve_map("rho", "critical" if level == "critical" else level)
    elif label == "W_gl21":
        gm = morphisms.resolve_map("rho_red", "critical" if level == "critical" else level)
    else:
        raise engine.EngineError(f"--symbols supports V_gl21 / W_gl21, not {label}")
    imgs = [morphisms.apply_map(gm, z) for z in sl.basis]
    if not imgs:
        return []
    return center.adapted_leading_symbols(imgs, center.GL21_SYMBOLS)


def cmd_hilbert(args):
    if args.ring == "lambda-aff":
        dims = susypoly.affine_hilbert(args.m, args.n, args.max_weight)
    else:
        dims = center.hilbert(args.ring, args.max_weight, level=_level_of(args))
    return "pass", {"dims": dims}


_AXIOM_ALGEBRAS = ("A_phi", "A_a", "V_gl11", "V_gl21", "Pi_half")


def cmd_jacobi_sample(args):
    rng = random.Random(args.seed)
    labels = [args.algebra] if args.algebra else list(_AXIOM_ALGEBRAS)
    payload = {}
    failures = 0
    for label in labels:
        P = presentations.build(label, _level_of(args))
        bad = 0
        for _ in range(args.count):
            x, y, z = (sample_state(P, rng) for _ in range(3))
            if jacobi_defect(x, y, z):
                bad += 1
        payload[label] = {"triples": args.count, "failures": bad}
        failures += bad
    return ("pass" if failures == 0 else "fail"), payload


def cmd_verify_all(args):
    rng = random.Random(args.seed)
    payload = {}
    ok = True

    def record(name, passed, detail=None):
        nonlocal ok
        payload[name] = {"status": "pass" if passed else "fail"}
        if detail is not None:
            payload[name]["detail"] = detail
        ok = ok and passed

    for name, levels in (("q", ["critical"]), ("eta", ["critical"]),
                         ("KS", ["generic"]), ("KS_inf", ["critical"]),
                         ("eta_bar", ["critical"]), ("rho", ["generic", "critical"]),
                         ("rho_R", ["generic"]), ("rho_red", ["generic", "critical"]),
                         ("Phi", ["generic", "critical"]), ("g", ["critical"]),
                         ("FMS", ["critical"]), ("Psi", ["critical"])):
        for lvl in levels:
            rep = morphisms.check_homomorphism(morphisms.resolve_map(name, lvl))
            record(f"hom:{name}@{lvl}", rep.ok, {"pairs": rep.pairs_checked})
    for dname, builder in _DIAGRAMS.items():
        rep = builder()
        record(f"diagram:{dname}", rep.ok)
    b = brst.verify_brst("generic")
    record("brst:dSquared", b["dSquared"])
    record("brst:closed", all(b["closedGenerators"].values()))
    record("brst:table", b["bracketTableMatches"])
    kern = brst.screening_kernel_report("generic")
    record("brst:screenings", all(kern.values()), {"checks": len(kern)})
    for (m, n) in ((1, 1), (2, 1)):
        for p in (1, 2, 3):
            P, vs = sugawara.ss_vectors(p, m, n, "critical")
            c1 = sugawara.check_central(vs[p], P).is_central
            c2 = sugawara.check_central(engine.derive(vs[p]), P).is_central
            record(f"ss:gl{m}{n}:p{p}", c1 and c2)
        Pg, vg = sugawara.ss_vectors(2, m, n, "generic")
        record(f"ss:gl{m}{n}:generic-witness",
               not sugawara.check_central(vg[2], Pg).is_central)
    w11 = args.max_weight_gl11
    dims_c = center.center_hilbert(presentations.build("V_gl11", "critical"), w11)
    dims_m = center.hilbert("M0", w11)
    dims_a = susypoly.affine_hilbert(1, 1, w11)
    record("center:gl11", dims_c == dims_m == dims_a,
           {"center": dims_c, "M0": dims_m, "affine": dims_a})
    w21 = args.max_weight_gl21
    dv = center.center_hilbert(presentations.build("V_gl21", "critical"), w21)
    dw = center.center_hilbert(presentations.build("W_gl21", "critical"), w21)
    da = susypoly.affine_hilbert(2, 1, w21)
    record("center:gl21", dv == dw == da, {"V": dv, "W": dw, "affine": da})
    jac = 0
    wick = 0
    skew = 0
    for label in _AXIOM_ALGEBRAS:
        P = presentations.build(label)
        for g1 in P.gens:
            for g2 in P.gens:
                if (bracket(P.state(g1.name), P.state(g2.name))
                        - skew_expected(P.state(g1.name), P.state(g2.name))).coeffs:
                    skew += 1
        for _ in range(args.samples):
            x, y, z = (sample_state(P, rng) for _ in range(3))
            if jacobi_defect(x, y, z):
                jac += 1
            if not wick_consistency_defect(x, y, z).is_zero():
                wick += 1
    record("axioms:skew", skew == 0)
    record("axioms:jacobi", jac == 0, {"samples": args.samples * len(_AXIOM_ALGEBRAS)})
    record("axioms:wick", wick == 0, {"samples": args.samples * len(_AXIOM_ALGEBRAS)})
    return ("pass" if ok else "fail"), payload


# -- argument parsing ----------------------------------------------------------


def _add_level_flags(sp):
    sp.add_argument("--critical", action="store_true", help="specialize at the critical level")
    sp.add_argument("--generic", action="store_true", help="formal level k")
    sp.add_argument("--k", help="explicit rational level")


def _add_common(sp):
    sp.add_argument("--json", action="store_true", help="machine-readable output")


def build_parser():
    ap = argparse.ArgumentParser(prog="vosa",
                                 description="exact lambda-bracket verifications for vertex superalgebras")
    ap.add_argument("--json", action="store_true", help="machine-readable output")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("bracket", help="lambda-bracket of two expressions")
    sp.add_argument("--algebra", required=True)
    sp.add_argument("--file", help="custom algebra JSON")
    sp.add_argument("--left", required=True)
    sp.add_argument("--right", required=True)
    _add_level_flags(sp)
    _add_common(sp)
    sp.set_defaults(fn=cmd_bracket)

    sp = sub.add_parser("normalize", help="canonical form of an expression")
    sp.add_argument("--algebra", required=True)
    sp.add_argument("--file")
    sp.add_argument("--expr", required=True)
    _add_level_flags(sp)
    _add_common(sp)
    sp.set_defaults(fn=cmd_normalize)

    sp = sub.add_parser("check-hom", help="verify a generator map")
    sp.add_argument("--map", help="catalog map name")
    sp.add_argument("--file", help="custom map JSON")
    _add_level_flags(sp)
    _add_common(sp)
    sp.set_defaults(fn=cmd_check_hom)

    sp = sub.add_parser("check-diagram", help="verify a commuting square")
    sp.add_argument("--diagram", choices=sorted(_DIAGRAMS), required=True)
    _add_common(sp)
    sp.set_defaults(fn=cmd_check_diagram)

    sp = sub.add_parser("brst", help="certify the BRST reduction")
    sp.add_argument("what", nargs="?", default="verify", choices=["verify"])
    _add_level_flags(sp)
    _add_common(sp)
    sp.set_defaults(fn=cmd_brst)

    sp = sub.add_parser("ss", help="Segal-Sugawara vectors")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--check-central", action="store_true")
    sp.add_argument("--level", default="critical")
    _add_level_flags(sp)
    _add_common(sp)
    sp.set_defaults(fn=cmd_ss)

    sp = sub.add_parser("center", help="graded center dimensions")
    sp.add_argument("--algebra", required=True)
    sp.add_argument("--file")
    sp.add_argument("--level", default="critical")
    sp.add_argument("--max-weight", type=int, required=True)
    sp.add_argument("--basis", action="store_true")
    sp.add_argument("--symbols", action="store_true")
    _add_level_flags(sp)
    _add_common(sp)
    sp.set_defaults(fn=cmd_center)

    sp = sub.add_parser("hilbert", help="graded dimension series")
    sp.add_argument("--ring", required=True,
                    help="lambda-aff | M0 | coset:sl2 | coset:gl2 | center:<label>")
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--max-weight", type=int, required=True)
    sp.add_argument("--level", default="critical")
    _add_common(sp)
    sp.set_defaults(fn=cmd_hilbert)

    sp = sub.add_parser("jacobi-sample", help="seeded random Jacobi identity suite")
    sp.add_argument("--algebra")
    sp.add_argument("--count", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    _add_level_flags(sp)
    _add_common(sp)
    sp.set_defaults(fn=cmd_jacobi_sample)

    sp = sub.add_parser("verify-all", help="aggregate verification suite")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--max-weight-gl11", type=int, default=5)
    sp.add_argument("--max-weight-gl21", type=int, default=3)
    _add_common(sp)
    sp.set_defaults(fn=cmd_verify_all)

    return ap


def render(report: RunReport, as_json: bool) -> str:
    if as_json:
        return json.dumps(report.to_json(), sort_keys=True, indent=2, default=str)
    lines = [f"[{report.status.upper()}] {report.command} ({report.wall_time:.2f}s)"]
    lines.append(json.dumps(report.payload, sort_keys=True, indent=2, default=str))
    return "\n".join(lines)


def execute(argv):
    ap = build_parser()
    args = ap.parse_args(argv)
    params = {k: str(v) for k, v in vars(args).items()
              if k not in ("fn", "json") and v is not None}
    t0 = time.time()
    try:
        status, payload = args.fn(args)
    except (engine.EngineError, PoleError, KeyError, ValueError) as exc:
        status, payload = "error", {"error": f"{type(exc).__name__}: {exc}"}
    report = RunReport(args.command, params, status, payload, time.time() - t0)
    return report, args.json


def main(argv=None):
    report, as_json = execute(sys.argv[1:] if argv is None else argv)
    print(render(report, as_json))
    if report.status == "pass":
        return 0
    if report.status == "fail":
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
