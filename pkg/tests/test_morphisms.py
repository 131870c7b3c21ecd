from fractions import Fraction

import pytest

from vosa.engine import bracket, parse_state, to_text
from vosa.morphisms import (GenMap, MorphismError, apply_map,
                            check_diagram, check_homomorphism,
                            leading_terms_distinct, load_genmap_json,
                            resolve_map)
from vosa.presentations import build


def test_resolve_map_images():
    q = resolve_map("q")
    assert q.images["e11"] == parse_state(q.target, ":phi phis:")
    eta = resolve_map("eta")
    assert eta.images["S"] == parse_state(eta.target, "e11 + e22")
    phi = resolve_map("Phi", "generic")
    assert phi.images["e12"] == phi.target.exp_state([1, 0])


def test_unknown_map():
    with pytest.raises(MorphismError):
        resolve_map("nonsense")


def test_level_constraints():
    with pytest.raises(MorphismError):
        resolve_map("eta", "generic")
    with pytest.raises(MorphismError):
        resolve_map("KS", "critical")


@pytest.mark.parametrize("name,level,pairs", [
    ("q", "critical", 16),
    ("eta", "critical", 16),
    ("KS", "generic", 16),
    ("KS_inf", "critical", 16),
    ("eta_bar", "critical", 9),
    ("id_eta_bar", "critical", 25),
    ("rho", "generic", 81),
    ("rho", "critical", 81),
    ("rho_R", "generic", 9),
    ("rho_red", "generic", 25),
    ("rho_red", "critical", 25),
    ("Phi", "generic", 64),
    ("Phi", "critical", 64),
    ("g", "critical", 64),
    ("FMS", "critical", 4),
    ("Psi", "critical", 49),
    ("quotient_W", "critical", 100),
    ("incl_FMS2", "critical", 36),
])
def test_catalog_homomorphisms(name, level, pairs):
    rep = check_homomorphism(resolve_map(name, level))
    assert rep.pairs_checked == pairs
    assert rep.ok, [vars(m) for m in rep.mismatches[:3]]


def test_identity_map_passes():
    A = build("A_phi")
    gm = GenMap("id", A, A, {g.name: A.gen_state(g.name) for g in A.gens})
    assert check_homomorphism(gm).ok


def test_corrupted_eta_fails_with_e22_discrepancy():
    eta = resolve_map("eta")
    bad = dict(eta.images)
    bad["S"] = eta.target.gen_state("e11")
    gm = GenMap("eta_bad", eta.source, eta.target, bad, level="critical")
    rep = check_homomorphism(gm)
    assert not rep.ok
    hit = [m for m in rep.mismatches if {m.left, m.right} == {"G+", "G-"}]
    assert hit
    e22 = to_text(eta.target.gen_state("e22"))
    assert any(e22 in m.discrepancy for m in hit)


def test_apply_map_multiplicativity():
    q = resolve_map("q")
    S = q.source
    x = parse_state(S, ":e12 e21: + 2*D(e11,1)")
    img = apply_map(q, x)
    # transported brackets equal brackets of transported states on samples
    lhs = apply_map(q, bracket(S.gen_state("e12"), x).coefficient(0))
    rhs = bracket(q.images["e12"], img).coefficient(0)
    assert lhs == rhs


def test_diagrams():
    d1 = check_diagram([resolve_map("KS_inf"), resolve_map("id_eta_bar")],
                       [resolve_map("eta"), resolve_map("q")],
                       ["J", "S", "G+", "G-"])
    assert d1.ok and d1.probes_checked == 4
    probes = ["h1", "h2", "e12", "e21", "e13", "e31", "e23", "e32"]
    d2 = check_diagram([resolve_map("Phi", "critical"), resolve_map("quotient_W"),
                        resolve_map("Psi")],
                       [resolve_map("g"), resolve_map("incl_FMS2")], probes)
    assert d2.ok and d2.probes_checked == 8


def test_degenerate_identity_diagram():
    A = build("A_phi")
    ident = GenMap("id", A, A, {g.name: A.gen_state(g.name) for g in A.gens})
    rep = check_diagram([ident], [ident], ["phi", "phis"])
    assert rep.ok


def test_incompatible_paths_raise():
    with pytest.raises(MorphismError):
        check_diagram([resolve_map("eta")], [resolve_map("q")], ["J"])


def test_leading_term_injectivity_witnesses():
    for name in ("rho", "Phi"):
        ok, leads = leading_terms_distinct(resolve_map(name, "generic"))
        assert ok and len(leads) == len(resolve_map(name, "generic").source.gens)


def test_json_map_loader():
    data = {
        "label": "eta_file",
        "source": "W_sl21",
        "target": "V_gl11",
        "level": "critical",
        "images": {"J": "e11", "S": "e11 + e22", "G+": "e12", "G-": "e21"},
    }
    gm = load_genmap_json(data)
    assert check_homomorphism(gm).ok
