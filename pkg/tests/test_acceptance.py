"""Acceptance suite: every criterion is exercised at its stated strength and
prints one pass/fail line.  All equalities are exact identities of normal
forms (rational or rational-function arithmetic); no tolerances appear.
"""

import random
import time
from fractions import Fraction

import pytest

from vosa import brst, center, morphisms, presentations, sugawara, susypoly
from vosa.engine import (bracket, derive, jacobi_defect, sample_state,
                         skew_expected, wick_consistency_defect)
from vosa.presentations import build


def _report(num, label, ok, t0):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {label} ({time.time() - t0:.1f}s)"
    print(line)
    assert ok, line


def test_criterion_1_eta_isomorphism():
    t0 = time.time()
    rep = morphisms.check_homomorphism(morphisms.resolve_map("eta", "critical"))
    ok = rep.ok and rep.unordered_pairs == 10
    _report(1, "eta: W(sl(2|1)) = V(gl(1|1)) at the critical level, 10 pairs", ok, t0)


def test_criterion_2_brst_table():
    t0 = time.time()
    rep = brst.verify_brst("generic")
    ok = (rep["dSquared"] and all(rep["closedGenerators"].values())
          and rep["bracketTableMatches"] and rep["tableReport"].unordered_pairs == 15)
    _report(2, "BRST: d^2=0, five closed generators, 15-pair table identity in k", ok, t0)


def test_criterion_3_wakimoto():
    t0 = time.time()
    rep = morphisms.check_homomorphism(morphisms.resolve_map("rho", "generic"))
    ok = rep.ok and rep.pairs_checked == 81
    _report(3, "Wakimoto rho: all 81 ordered gl(2|1) pairs at generic level", ok, t0)


def test_criterion_4_screening_kernels():
    t0 = time.time()
    rho = morphisms.resolve_map("rho", "generic")
    ok = True
    for i in (1, 2):
        for g in rho.source.gens:
            ok = ok and brst.screening_action(i, rho.images[g.name]).is_zero()
    witness = brst.screening_action(1, rho.target.gen_state("as"))
    ok = ok and not witness.is_zero()
    _report(4, "screenings kill all 9 Wakimoto images; S1(a*) != 0 witness", ok, t0)


def test_criterion_5_kazama_suzuki():
    t0 = time.time()
    ok = morphisms.check_homomorphism(morphisms.resolve_map("KS", "generic")).ok
    ok = ok and morphisms.check_homomorphism(morphisms.resolve_map("KS_inf", "critical")).ok
    diag = morphisms.check_diagram(
        [morphisms.resolve_map("KS_inf"), morphisms.resolve_map("id_eta_bar")],
        [morphisms.resolve_map("eta"), morphisms.resolve_map("q")],
        ["J", "S", "G+", "G-"])
    ok = ok and diag.ok
    _report(5, "Kazama-Suzuki at generic k, its large-level limit, and the square", ok, t0)


def test_criterion_6_sugawara_centrality():
    t0 = time.time()
    ok = True
    for (m, n) in ((1, 1), (2, 1)):
        for p in (1, 2, 3):
            P, vs = sugawara.ss_vectors(p, m, n, "critical")
            ok = ok and sugawara.check_central(vs[p], P).is_central
            ok = ok and sugawara.check_central(derive(vs[p]), P).is_central
        Pg, vg = sugawara.ss_vectors(2, m, n, "generic")
        rep = sugawara.check_central(vg[2], Pg)
        ok = ok and not rep.is_central and bool(rep.witnesses)
    _report(6, "s_pp, ds_pp central at critical (p<=3, both algebras); "
               "generic witness", ok, t0)


def test_criterion_7_center_hilbert_gl11():
    t0 = time.time()
    dims = center.center_hilbert(build("V_gl11", "critical"), 5)
    m0 = center.hilbert("M0", 5)
    aff = susypoly.affine_hilbert(1, 1, 5)
    ok = dims == m0 == aff and dims[:4] == [1, 1, 3, 6]
    _report(7, f"gl(1|1) center series {dims} = M0 = affine ring, w <= 5", ok, t0)


def test_criterion_8_center_coincidence_gl21():
    t0 = time.time()
    dv = center.center_hilbert(build("V_gl21", "critical"), 3)
    dw = center.center_hilbert(build("W_gl21", "critical"), 3)
    aff = susypoly.affine_hilbert(2, 1, 3)
    ok = dv == dw == aff
    rho = morphisms.resolve_map("rho", "critical")
    for w in range(1, 4):
        sl = center.center_dimension(build("V_gl21", "critical"), w)
        imgs = [morphisms.apply_map(rho, z) for z in sl.basis]
        # images land in the Heisenberg subalgebra (the routing lemma)
        for img in imgs:
            ok = ok and all(rho.target.gens[gi].name.startswith("ehat")
                            for (fs, _v) in img.terms for gi, _d in fs)
        syms = center.adapted_leading_symbols(imgs, center.GL21_SYMBOLS)
        ok = ok and len(syms) == sl.dimension
        ok = ok and all(susypoly.in_affine_span(s, 2, 1) for s in syms)
        plain = [s for s in syms
                 if all(N == 0 for mono in s.terms for ((_k, _i, N), _e) in mono)]
        ok = ok and all(susypoly.is_supersymmetric(s, 2, 1) for s in plain)
    _report(8, f"gl(2|1) center series {dv} = W-center = affine ring; "
               "symbols supersymmetric", ok, t0)


def test_criterion_9_leading_symbols_of_sugawara():
    t0 = time.time()
    rho = morphisms.resolve_map("rho", "critical")
    ok = True
    for p in range(1, 5):
        P, vs = sugawara.ss_vectors(p, 2, 1, "critical")
        img = morphisms.apply_map(rho, vs[p])
        sym = center.leading_symbol(img, center.GL21_SYMBOLS)
        ok = ok and sym == susypoly.power_sum(p, 2, 1)
    _report(9, "leading symbol of rho(s_pp) is the super power sum, p <= 4", ok, t0)


def test_criterion_10_inverse_reduction():
    t0 = time.time()
    ok = morphisms.check_homomorphism(morphisms.resolve_map("Phi", "generic")).ok
    ok = ok and morphisms.check_homomorphism(morphisms.resolve_map("Phi", "critical")).ok
    probes = ["h1", "h2", "e12", "e21", "e13", "e31", "e23", "e32"]
    diag = morphisms.check_diagram(
        [morphisms.resolve_map("Phi", "critical"), morphisms.resolve_map("quotient_W"),
         morphisms.resolve_map("Psi")],
        [morphisms.resolve_map("g"), morphisms.resolve_map("incl_FMS2")], probes)
    ok = ok and diag.ok and diag.probes_checked == 8
    _report(10, "inverse reduction Phi at generic and critical; quotient square", ok, t0)


def test_criterion_11_axiom_property_suite():
    t0 = time.time()
    ok = True
    for label in presentations.catalog_labels():
        P = build(label)
        for g1 in P.gens:
            for g2 in P.gens:
                x, y = P.state(g1.name), P.state(g2.name)
                if (bracket(x, y) - skew_expected(x, y)).coeffs:
                    ok = False
    rng = random.Random(0)
    jac_fail = wick_fail = 0
    total = 0
    for label in ("A_phi", "A_a", "V_gl11", "V_gl21", "Pi_half"):
        P = build(label)
        for _ in range(200):
            x, y, z = (sample_state(P, rng) for _ in range(3))
            total += 1
            if jacobi_defect(x, y, z):
                jac_fail += 1
            if not wick_consistency_defect(x, y, z).is_zero():
                wick_fail += 1
    ok = ok and jac_fail == 0 and wick_fail == 0 and total >= 1000
    _report(11, f"axioms: skew on all tables; Jacobi and Wick on {total} "
                "seeded triples, zero failures", ok, t0)
