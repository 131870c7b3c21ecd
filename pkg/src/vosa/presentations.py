"""Catalog of the vertex superalgebras used by the verification suites.

Bilinear forms on gl(m|n) are computed exactly from structure constants:
kappa_V is the supertrace form, kappa_g the Killing form str(ad ad), and the
critical form is -kappa_g/2.  Affine presentations are built along the level
line kappa(k) = k*kappa_V + str(.)str(.), which passes through the critical
form at k = n-m; for gl(1|1) that line degenerates and we use the Killing
direction -k*str(.)str(.) instead (critical at k = -1), which keeps h central
at every level.
"""

from __future__ import annotations

from fractions import Fraction

from .engine import GeneratorSpec, Presentation, State, derive, nprod
from .scalars import K, LevelScalar

_HALF = Fraction(1, 2)


# ---------------------------------------------------------------------------
# gl(m|n) structure constants; elements are dicts {(i, j): Fraction}, 1-indexed


class GLSuper:
    """Exact structure constants and invariant forms of gl(m|n)."""

    def __init__(self, m, n):
        self.m, self.n = m, n
        self.basis = [(i, j) for i in range(1, m + n + 1) for j in range(1, m + n + 1)]

    def parity_idx(self, i):
        return 0 if i <= self.m else 1

    def parity(self, i, j):
        return self.parity_idx(i) ^ self.parity_idx(j)

    def elem(self, i, j):
        return {(i, j): Fraction(1)}

    def lie(self, u, v):
        """Super commutator [u, v] = uv - (-1)^{p(u)p(v)} vu for homogeneous u, v."""
        pu = self._par_of(u)
        pv = self._par_of(v)
        sgn = Fraction(1) if (pu and pv) else Fraction(-1)
        out = {}
        for (a, b), cu in u.items():
            for (c, d), cv in v.items():
                if b == c:
                    out[(a, d)] = out.get((a, d), Fraction(0)) + cu * cv
                if d == a:
                    out[(c, b)] = out.get((c, b), Fraction(0)) + sgn * cu * cv
        return {k: c for k, c in out.items() if c}

    def _par_of(self, u):
        p = None
        for (i, j) in u:
            q = self.parity(i, j)
            if p is None:
                p = q
            elif p != q:
                raise ValueError("inhomogeneous element")
        return 0 if p is None else p

    def matmul(self, u, v):
        out = {}
        for (a, b), cu in u.items():
            for (c, d), cv in v.items():
                if b == c:
                    out[(a, d)] = out.get((a, d), Fraction(0)) + cu * cv
        return {k: c for k, c in out.items() if c}

    def supertrace(self, u):
        s = Fraction(0)
        for (i, j), c in u.items():
            if i == j:
                s += c * (-1) ** self.parity_idx(i)
        return s

    def kappa_V(self, u, v):
        return self.supertrace(self.matmul(u, v))

    def kappa_g(self, u, v):
        """Killing form str_g(ad_u ad_v) over the full gl(m|n)."""
        s = Fraction(0)
        for (i, j) in self.basis:
            x = self.elem(i, j)
            y = self.lie(u, self.lie(v, x))
            s += y.get((i, j), Fraction(0)) * (-1) ** self.parity(i, j)
        return s

    def kappa_c(self, u, v):
        return -_HALF * self.kappa_g(u, v)


class BilinearForm:
    """An even supersymmetric invariant form on gl(m|n), cached as a matrix."""

    def __init__(self, kind, m, n, k1=None, k2=None):
        self.kind = kind
        self.m, self.n = m, n
        gl = GLSuper(m, n)
        self.basis = gl.basis
        k1 = LevelScalar.of(0) if k1 is None else LevelScalar.of(k1)
        k2 = LevelScalar.of(0) if k2 is None else LevelScalar.of(k2)
        rows = []
        for u in gl.basis:
            row = []
            eu = gl.elem(*u)
            for v in gl.basis:
                ev = gl.elem(*v)
                if kind == "traceForm":
                    val = LevelScalar.of(gl.kappa_V(eu, ev))
                elif kind == "killingForm":
                    val = LevelScalar.of(gl.kappa_g(eu, ev))
                elif kind == "critical":
                    val = LevelScalar.of(gl.kappa_c(eu, ev))
                elif kind == "linearCombo":
                    val = k1 * gl.kappa_V(eu, ev) + k2 * gl.kappa_g(eu, ev)
                else:
                    raise ValueError(f"unknown form kind {kind!r}")
                row.append(val)
            rows.append(tuple(row))
        self.matrix = tuple(rows)
        self._pos = {b: i for i, b in enumerate(gl.basis)}

    def value(self, u, v):
        """Evaluate on elements given as {(i,j): coeff} dicts."""
        acc = LevelScalar.of(0)
        for bu, cu in u.items():
            for bv, cv in v.items():
                acc = acc + self.matrix[self._pos[bu]][self._pos[bv]] * (cu * cv)
        return acc


def standard_form(m, n):
    """The catalog level line kappa(k): see the module docstring."""
    gl = GLSuper(m, n)

    def val(u, v):
        if m == n:
            return LevelScalar.of(-1) * K * gl.supertrace(u) * gl.supertrace(v)
        return K * gl.kappa_V(u, v) + gl.supertrace(u) * gl.supertrace(v) * LevelScalar.of(1)

    return val


# ---------------------------------------------------------------------------
# affine builders


def _affine_presentation(label, m, n, basis_named, kappa_val, critical_k,
                         charges=None, aliases=None):
    """Universal affine presentation on a chosen basis of a subalgebra of gl(m|n).

    basis_named: list of (name, element-dict).  Brackets are
    [u_l v] = [u,v] + kappa(u,v) lambda, with [u,v] re-expressed in the basis.
    """
    gl = GLSuper(m, n)
    gens = [GeneratorSpec(name, gl._par_of(el), 1) for name, el in basis_named]
    P = Presentation(label, gens, critical_k=critical_k, charges=charges)
    named = dict(basis_named)

    def in_basis(el):
        # exact expansion of el in the chosen basis (works for all our bases:
        # off-diagonal elements are basis members, diagonals solved linearly)
        el = dict(el)
        out = {}
        for name, b in basis_named:
            if len(b) == 1:
                (key, c0), = b.items()
                if key in el and key[0] != key[1]:
                    out[name] = el.pop(key) / c0
        if el:
            diag_names = [nm for nm, b in basis_named if all(i == j for (i, j) in b)]
            idx = sorted({key for nm in diag_names for key in named[nm]} | set(el))
            rows = [[named[nm].get(key, Fraction(0)) for nm in diag_names] for key in idx]
            rhs = [el.get(key, Fraction(0)) for key in idx]
            sol = _solve_exact(rows, rhs)
            if sol is None:
                raise ValueError(f"element {el} not in span of basis of {label}")
            for nm, c in zip(diag_names, sol):
                if c:
                    out[nm] = out.get(nm, Fraction(0)) + c
        return out

    names = [nm for nm, _ in basis_named]
    for i, na in enumerate(names):
        for nb in names[i:]:
            u, v = named[na], named[nb]
            lie = gl.lie(u, v)
            poly = {}
            if lie:
                st = P.zero()
                for nm, c in in_basis(lie).items():
                    st = st + P.gen_state(nm) * c
                if not st.is_zero():
                    poly[0] = st
            kv = kappa_val(u, v)
            if not kv.is_zero():
                poly[1] = P.vacuum() * kv
            if poly:
                P.set_bracket(na, nb, poly)
    for nm, expr in (aliases or {}).items():
        st = P.zero()
        for bn, c in in_basis(expr).items():
            st = st + P.gen_state(bn) * c
        P.set_alias(nm, st)
    return P


def _solve_exact(rows, rhs):
    """Solve a small overdetermined exact linear system; None if inconsistent."""
    nrow, ncol = len(rows), len(rows[0]) if rows else 0
    A = [list(r) + [b] for r, b in zip(rows, rhs)]
    piv = []
    r = 0
    for c in range(ncol):
        p = next((i for i in range(r, nrow) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        lead = A[r][c]
        A[r] = [x / lead for x in A[r]]
        for i in range(nrow):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        piv.append(c)
        r += 1
        if r == nrow:
            break
    sol = [Fraction(0)] * ncol
    for i, c in enumerate(piv):
        sol[c] = A[i][ncol]
    for row, b in zip(rows, rhs):
        if sum(x * s for x, s in zip(row, sol)) != b:
            return None
    return sol


def _gl_basis(m, n):
    return [(f"e{i}{j}", {(i, j): Fraction(1)}) for i in range(1, m + n + 1)
            for j in range(1, m + n + 1)]


def _gl_charges(m, n):
    d = m + n
    out = {}
    for i in range(1, d + 1):
        for j in range(1, d + 1):
            vec = [Fraction(0)] * d
            vec[i - 1] += 1
            vec[j - 1] -= 1
            out[f"e{i}{j}"] = tuple(vec)
    return out


def build_V_gl(m, n):
    label = f"V_gl{m}{n}" if n else f"V_gl{m}"
    crit = -1 if m == n else n - m
    aliases = {"h": {(i, i): Fraction(1) for i in range(1, m + n + 1)}}
    if (m, n) == (2, 1):
        aliases["h1"] = {(1, 1): Fraction(1), (2, 2): Fraction(-1)}
        aliases["h2"] = {(2, 2): Fraction(1), (3, 3): Fraction(1)}
    return _affine_presentation(label, m, n, _gl_basis(m, n), standard_form(m, n),
                                crit, charges=_gl_charges(m, n), aliases=aliases)


def build_V_sl21():
    gl = GLSuper(2, 1)
    basis = [
        ("h1", {(1, 1): Fraction(1), (2, 2): Fraction(-1)}),
        ("h2", {(2, 2): Fraction(1), (3, 3): Fraction(1)}),
        ("e12", gl.elem(1, 2)), ("e21", gl.elem(2, 1)),
        ("e13", gl.elem(1, 3)), ("e31", gl.elem(3, 1)),
        ("e23", gl.elem(2, 3)), ("e32", gl.elem(3, 2)),
    ]

    def kv(u, v):
        return K * gl.kappa_V(u, v)

    charges = {nm: tuple(Fraction(x) for x in vec) for nm, vec in {
        "e12": (1, -1, 0), "e21": (-1, 1, 0), "e13": (1, 0, -1),
        "e31": (-1, 0, 1), "e23": (0, 1, -1), "e32": (0, -1, 1)}.items()}
    return _affine_presentation("V_sl21", 2, 1, basis, kv, -1, charges=charges)


def build_V_sl11():
    gl = GLSuper(1, 1)
    basis = [("h", {(1, 1): Fraction(1), (2, 2): Fraction(1)}),
             ("e12", gl.elem(1, 2)), ("e21", gl.elem(2, 1))]

    def kv(u, v):
        return K * gl.kappa_V(u, v)

    return _affine_presentation("V_sl11", 1, 1, basis, kv, 0,
                                charges={"e12": (Fraction(1),), "e21": (Fraction(-1),)})


def build_V_sl2(level_scalar=None, label="V_sl2"):
    """V^l(sl2) with E,H,F; level l is the formal k unless level_scalar is given."""
    ell = K if level_scalar is None else level_scalar
    P = Presentation(label, [GeneratorSpec(x, 0, 1) for x in ("E", "H", "F")],
                     critical_k=-2,
                     charges={"E": (Fraction(1),), "F": (Fraction(-1),)})
    P.set_bracket("E", "F", {0: P.gen_state("H"), 1: P.vacuum() * ell})
    P.set_bracket("H", "E", {0: P.gen_state("E") * 2})
    P.set_bracket("H", "F", {0: P.gen_state("F") * (-2)})
    P.set_bracket("H", "H", {1: P.vacuum() * (ell * 2)})
    return P


def build_V_sl2_KS():
    """V^l(sl2) with the duality level l = -2 + 1/(k+1) eliminated into k."""
    ell = LevelScalar.of(-2) + LevelScalar.of(1) / (K + 1)
    return build_V_sl2(level_scalar=ell, label="V_sl2_KS")


def build_V_inf(kind):
    """Large-level limits: commutative differential polynomial algebras."""
    if kind == "sl2":
        names = ["Ebar", "Hbar", "Fbar"]
        label = "V_inf_sl2"
        charges = {"Ebar": (Fraction(1),), "Fbar": (Fraction(-1),)}
    else:
        names = ["Ebar", "Hbar", "Fbar", "Nbar"]
        label = "V_inf_gl2"
        charges = {"Ebar": (Fraction(1),), "Fbar": (Fraction(-1),)}
    return Presentation(label, [GeneratorSpec(x, 0, 1) for x in names], charges=charges)


# ---------------------------------------------------------------------------
# free-field and lattice builders


def build_A_phi():
    P = Presentation("A_phi", [GeneratorSpec("phi", 1, _HALF), GeneratorSpec("phis", 1, _HALF)],
                     charges={"phi": (Fraction(1),), "phis": (Fraction(-1),)})
    P.set_bracket("phi", "phis", {0: P.vacuum()})
    return P


def build_A_a():
    P = Presentation("A_a", [GeneratorSpec("a", 0, _HALF), GeneratorSpec("as", 0, _HALF)],
                     charges={"a": (Fraction(1),), "as": (Fraction(-1),)})
    P.set_bracket("a", "as", {0: P.vacuum()})
    return P


def build_M():
    return Presentation("M", [GeneratorSpec("xi+", 0, _HALF), GeneratorSpec("xi-", 0, _HALF)],
                        charges={"xi+": (Fraction(1),), "xi-": (Fraction(-1),)})


def build_ghosts_gl21():
    """Charged BRST fermions with parity opposite to e_{1,i} of gl(2|1)."""
    P = Presentation("ghosts_gl21",
                     [GeneratorSpec("phi2", 1, _HALF), GeneratorSpec("phi2s", 1, _HALF),
                      GeneratorSpec("phi3", 0, _HALF), GeneratorSpec("phi3s", 0, _HALF)])
    P.set_bracket("phi2", "phi2s", {0: P.vacuum()})
    P.set_bracket("phi3", "phi3s", {0: P.vacuum()})
    return P


def heisenberg(label, names, gram, weights=None, critical_k=None, with_lattice=True):
    """Heisenberg algebra [h_i l h_j] = G_ij lambda, optionally carrying its lattice."""
    weights = weights or [1] * len(names)
    gens = [GeneratorSpec(nm, 0, w) for nm, w in zip(names, weights)]
    P = Presentation(label, gens, gram=gram if with_lattice else None,
                     lattice=names if with_lattice else None, critical_k=critical_k)
    for i, na in enumerate(names):
        for j in range(i, len(names)):
            g = LevelScalar.of(gram[i][j]) if not isinstance(gram[i][j], LevelScalar) else gram[i][j]
            if not g.is_zero():
                P.set_bracket(na, names[j], {1: P.vacuum() * g})
    return P


def build_pi_h_gl21():
    """The gl(1)-factor of W(gl(2|1)): [h_l h] = (k+1) lambda."""
    return heisenberg("pi_h_gl21", ["h"], [[K + 1]], critical_k=-1, with_lattice=False)


def build_pi_h_wak():
    """Heisenberg lattice of the gl(2|1) Wakimoto realization, level kappa - kappa_c."""
    kp1 = K + 1
    gram = [[kp1, LevelScalar.of(0), LevelScalar.of(0)],
            [LevelScalar.of(0), kp1, LevelScalar.of(0)],
            [LevelScalar.of(0), LevelScalar.of(0), LevelScalar.of(-1) * kp1]]
    P = heisenberg("pi_h_wak", ["ehat1", "ehat2", "ehat3"], gram, critical_k=-1)
    P.set_alias("b0", P.gen_state("ehat1") + P.gen_state("ehat2") + P.gen_state("ehat3"))
    P.set_alias("b1", P.gen_state("ehat1") - P.gen_state("ehat2"))
    P.set_alias("b2", P.gen_state("ehat2") + P.gen_state("ehat3"))
    return P


def build_pi_J():
    return heisenberg("pi_J", ["J"], [[1]], with_lattice=False)


def build_A_wak():
    """Free fields of the gl(2|1) Wakimoto realization (all phi here are odd)."""
    gens = [GeneratorSpec("a", 0, 1), GeneratorSpec("as", 0, 0),
            GeneratorSpec("phi2", 1, 1), GeneratorSpec("phi2s", 1, 0),
            GeneratorSpec("phi3", 1, 1), GeneratorSpec("phi3s", 1, 0)]
    P = Presentation("A_wak", gens, critical_k=-1)
    P.set_bracket("a", "as", {0: P.vacuum()})
    P.set_bracket("phi2", "phi2s", {0: P.vacuum()})
    P.set_bracket("phi3", "phi3s", {0: P.vacuum()})
    return P


def build_A_bar():
    """The reduced bc pair of the W(gl(2|1)) free-field realization (DS-twisted weights)."""
    P = Presentation("A_bar", [GeneratorSpec("phi2", 1, Fraction(3, 2)),
                               GeneratorSpec("phi2s", 1, Fraction(-1, 2))], critical_k=-1)
    P.set_bracket("phi2", "phi2s", {0: P.vacuum()})
    return P


def build_W_sl21():
    """W(sl(2|1)) by its strong generators J, G+, G-, S and bracket table."""
    kp1 = K + 1
    P = Presentation("W_sl21",
                     [GeneratorSpec("J", 0, 1), GeneratorSpec("G+", 1, Fraction(3, 2)),
                      GeneratorSpec("G-", 1, Fraction(3, 2)), GeneratorSpec("S", 0, 2)],
                     critical_k=-1,
                     charges={"G+": (Fraction(1),), "G-": (Fraction(-1),)})
    J, Gp, Gm, S = (P.gen_state(x) for x in ("J", "G+", "G-", "S"))
    one = P.vacuum()
    P.set_bracket("J", "J", {1: one * (LevelScalar.of(-1) * (2 * K + 1))})
    P.set_bracket("J", "G+", {0: Gp})
    P.set_bracket("J", "G-", {0: -1 * Gm})
    P.set_bracket("S", "S", {0: derive(S) * (-1 * kp1), 1: S * (-2 * kp1),
                             3: one * (LevelScalar.of(Fraction(-3, 2)) * kp1 * kp1 * (2 * K + 1))})
    P.set_bracket("S", "J", {0: derive(J) * (-1 * kp1), 1: J * (-1 * kp1)})
    P.set_bracket("S", "G+", {0: derive(Gp) * (-1 * kp1), 1: Gp * (Fraction(-3, 2) * kp1)})
    P.set_bracket("S", "G-", {0: derive(Gm) * (-1 * kp1), 1: Gm * (Fraction(-3, 2) * kp1)})
    P.set_bracket("G+", "G-", {0: S - derive(J) * (kp1 * Fraction(1, 2)),
                               1: J * (-1 * kp1), 2: one * (kp1 * (2 * K + 1))})
    return P


def build_Pi(denom=1):
    """Half-lattice algebra along the isotropic direction c, exponents in (1/denom)Zc."""
    label = "Pi" if denom == 1 else ("Pi_half" if denom == 2 else f"Pi_1_{denom}")
    q = Fraction(1, denom)
    gens = [GeneratorSpec("c", 0, 1), GeneratorSpec("d", 0, 1),
            GeneratorSpec("ep", 0, 0, kind=(LevelScalar.of(q), LevelScalar.of(0))),
            GeneratorSpec("em", 0, 0, kind=(LevelScalar.of(-q), LevelScalar.of(0)))]
    P = Presentation(label, gens, gram=[[0, 2], [2, 0]], lattice=["c", "d"])
    P.set_bracket("c", "d", {1: P.vacuum() * 2})
    half = Fraction(1, 2)
    P.set_alias("u", (P.gen_state("c") + P.gen_state("d")) * half)
    P.set_alias("v", (P.gen_state("c") - P.gen_state("d")) * half)
    return P


def build_V0_nplus():
    """Level-0 affine algebra of the upper nilpotent subalgebra of gl(2|1)."""
    P = Presentation("V0_nplus", [GeneratorSpec("e12", 0, 1), GeneratorSpec("e23", 1, 1),
                                  GeneratorSpec("e13", 1, 1)], critical_k=-1)
    P.set_bracket("e12", "e23", {0: P.gen_state("e13")})
    return P


# ---------------------------------------------------------------------------
# tensor products


def tensor(p1: Presentation, p2: Presentation, label=None, suffixes=None,
           critical_k="first"):
    """Tensor product presentation: factors commute, brackets unchanged within factors."""
    if suffixes is None:
        collide = set(g.name for g in p1.gens) & set(g.name for g in p2.gens)
        ren1 = {n: n for n in (g.name for g in p1.gens)}
        ren2 = {n: (n + "_2" if n in collide else n) for n in (g.name for g in p2.gens)}
    else:
        ren1 = {g.name: g.name + suffixes[0] for g in p1.gens}
        ren2 = {g.name: g.name + suffixes[1] for g in p2.gens}

    n1, n2 = len(p1.lattice), len(p2.lattice)
    zpad = LevelScalar.of(0)
    gens = []
    for P, ren, lpad, rpad in ((p1, ren1, 0, n2), (p2, ren2, n1, 0)):
        for g in P.gens:
            kind = g.kind
            if kind != "plain":
                kind = (zpad,) * lpad + tuple(kind) + (zpad,) * rpad
            gens.append(GeneratorSpec(ren[g.name], g.parity, g.weight, kind))
    lat_names = [ren1[p1.gens[i].name] for i in p1.lattice] + \
                [ren2[p2.gens[i].name] for i in p2.lattice]
    gram = None
    if p1.gram is not None or p2.gram is not None:
        z = LevelScalar.of(0)
        gram = []
        for i in range(n1 + n2):
            row = []
            for j in range(n1 + n2):
                if i < n1 and j < n1:
                    row.append(p1.gram[i][j])
                elif i >= n1 and j >= n1:
                    row.append(p2.gram[i - n1][j - n1])
                else:
                    row.append(z)
            gram.append(tuple(row))

    if critical_k == "first":
        ck = p1.critical_k if p1.critical_k is not None else p2.critical_k
    else:
        ck = critical_k

    charges = None
    if p1.charges or p2.charges:
        d1 = len(next(iter(p1.charges.values()))) if p1.charges else 0
        d2 = len(next(iter(p2.charges.values()))) if p2.charges else 0
        charges = {}
        for nm, vec in (p1.charges or {}).items():
            charges[ren1[nm]] = tuple(vec) + (Fraction(0),) * d2
        for nm, vec in (p2.charges or {}).items():
            charges[ren2[nm]] = (Fraction(0),) * d1 + tuple(vec)

    out = Presentation(label or f"{p1.label}(x){p2.label}", gens,
                       gram=gram, lattice=lat_names or None,
                       critical_k=ck, charges=charges)

    def port(P, ren):
        shift = {P.index[n]: out.index[ren[n]] for n in ren}
        lat_map = {pos: lat_names.index(ren[P.gens[gi].name]) for pos, gi in enumerate(P.lattice)}

        def port_vec(vec):
            if vec is None:
                return None
            z = LevelScalar.of(0)
            full = [z] * len(lat_names)
            for pos, c in enumerate(vec):
                full[lat_map[pos]] = c
            return tuple(full)

        def port_terms(terms):
            return {(tuple((shift[gi], dd) for gi, dd in fs), port_vec(vec)): c
                    for (fs, vec), c in terms.items()}

        for (i, j), lp in P._table.items():
            out._table[(shift[i], shift[j])] = {deg: port_terms(v) for deg, v in lp.items()}
        for nm, st in P.aliases.items():
            target = ren.get(nm, nm)
            if target in out.aliases or target in out.index:
                target = target + "_2"
            out.aliases[target] = State(out, port_terms(st.terms))

    port(p1, ren1)
    port(p2, ren2)
    return out


# ---------------------------------------------------------------------------
# the catalog


_BUILDERS = {
    "A_phi": build_A_phi,
    "A_a": build_A_a,
    "M": build_M,
    "V_gl11": lambda: build_V_gl(1, 1),
    "V_gl21": lambda: build_V_gl(2, 1),
    "V_gl2": lambda: build_V_gl(2, 0),
    "V_sl11": build_V_sl11,
    "V_sl21": build_V_sl21,
    "V_sl2": build_V_sl2,
    "V_sl2_KS": build_V_sl2_KS,
    "V_inf_sl2": lambda: build_V_inf("sl2"),
    "V_inf_gl2": lambda: build_V_inf("gl2"),
    "W_sl21": build_W_sl21,
    "W_gl21": lambda: tensor(build_W_sl21(), build_pi_h_gl21(), label="W_gl21"),
    "Pi": lambda: build_Pi(1),
    "Pi_half": lambda: build_Pi(2),
    "pi_J": build_pi_J,
    "pi_h_gl21": build_pi_h_gl21,
    "pi_h_wak": build_pi_h_wak,
    "ghosts_gl21": build_ghosts_gl21,
    "A_wak": build_A_wak,
    "A_bar": build_A_bar,
    "V0_nplus": build_V0_nplus,
}

_CACHE = {}


def catalog_labels():
    return sorted(_BUILDERS)


def build(label, level="generic"):
    """Build a catalog presentation at the requested level ('generic', 'critical',
    or an explicit rational); results are cached so states remain comparable."""
    if label not in _BUILDERS:
        raise KeyError(f"unknown algebra label {label!r}; known: {', '.join(catalog_labels())}")
    key = (label, str(level))
    got = _CACHE.get(key)
    if got is None:
        base_key = (label, "generic")
        base = _CACHE.get(base_key)
        if base is None:
            base = _BUILDERS[label]()
            _CACHE[base_key] = base
        got = base if level == "generic" else base.at_level(level)
        _CACHE[key] = got
    return got


def load_presentation_json(path_or_dict, level="generic") -> Presentation:
    """Load a custom algebra from the structured JSON format.

    {label, generators: [{name, parity: "even"|"odd", weight: "1/2",
    kind: "plain" | {"latticeExponential": {"vector": [...]}}}],
    latticeBasis: [names], gram: [[scalar text]],
    brackets: [{left, right, lambdaPoly: {"0": expr, ...}}]}
    """
    import json as _json

    from .scalars import parse_scalar

    if isinstance(path_or_dict, dict):
        data = path_or_dict
    else:
        with open(path_or_dict) as fh:
            data = _json.load(fh)
    gens = []
    for g in data["generators"]:
        parity = 1 if g.get("parity", "even") == "odd" else 0
        kind = g.get("kind", "plain")
        if kind != "plain":
            kind = tuple(parse_scalar(str(c)) for c in kind["latticeExponential"]["vector"])
        gens.append(GeneratorSpec(g["name"], parity, Fraction(str(g.get("weight", 1))), kind))
    gram = None
    if "gram" in data:
        gram = [[parse_scalar(str(c)) for c in row] for row in data["gram"]]
    P = Presentation(data.get("label", "custom"), gens, gram=gram,
                     lattice=data.get("latticeBasis"),
                     critical_k=data.get("criticalK"))
    for row in data.get("brackets", []):
        P.set_bracket(row["left"], row["right"],
                      {int(d): expr for d, expr in row["lambdaPoly"].items()})
    if level not in ("generic", None):
        P = P.at_level(level)
    return P


def tensor_cached(labels, level="generic", label=None, suffixes=None, critical_k="first"):
    """Left-nested tensor of catalog presentations, cached by signature."""
    key = ("tensor", tuple(labels), str(level), label, suffixes, str(critical_k))
    got = _CACHE.get(key)
    if got is None:
        parts = [build(l, "generic") for l in labels]
        P = parts[0]
        for q in parts[1:]:
            P = tensor(P, q, critical_k=critical_k)
        if label:
            P.label = label
        if level != "generic":
            P = P.at_level(level)
        _CACHE[key] = P
        got = P
    return got
