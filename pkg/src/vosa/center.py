"""Graded center computation by exact linear algebra, with Li-filtration symbols.

An element z of weight w is central iff [g_l z] = 0 for every strong generator
g; by the Wick formula this is the complete condition.  Each (generator,
lambda-degree, target monomial) triple contributes one linear constraint on
the coordinates of z over the PBW monomial basis; the kernel is computed by
exact sparse elimination over the scalar field.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .engine import EngineError, Presentation, State, bracket, to_text
from .presentations import build
from .scalars import LevelScalar
from .susypoly import SuperPoly

_Z = LevelScalar.of(0)


def graded_basis(P: Presentation, weight) -> list:
    """Canonical PBW monomials of the given weight, as term keys.

    Requires every (non-exponential) generator weight to be positive.
    Factors run generator by generator with derivative orders weakly
    decreasing (strictly for odd generators), which is the canonical order.
    """
    import math

    weight = Fraction(weight)
    gens = [(i, g) for i, g in enumerate(P.gens) if not g.is_exp()]
    for _i, g in gens:
        if g.weight <= 0:
            raise EngineError(
                f"graded basis needs positive generator weights; {g.name} has {g.weight}")
    out = []

    def per_gen(pos, left, acc):
        if left == 0:
            out.append((tuple(acc), None))
            return
        if pos == len(gens) or left < 0:
            return
        gi, g = gens[pos]
        per_gen(pos + 1, left, acc)

        def choose(dmax, left, acc2):
            for d in range(dmax, -1, -1):
                w = g.weight + d
                if w > left:
                    continue
                acc3 = acc2 + [(gi, d)]
                rem = left - w
                if rem == 0:
                    out.append((tuple(acc3), None))
                else:
                    per_gen(pos + 1, rem, acc3)
                    nxt = d if not g.parity else d - 1
                    if nxt >= 0:
                        choose(nxt, rem, acc3)

        if left >= g.weight:
            choose(math.floor(left - g.weight), left, acc)

    per_gen(0, weight, [])
    return sorted(out, key=lambda tk: tuple((gi, -d) for gi, d in tk[0]))


def graded_dimension_series(P: Presentation, max_weight) -> list:
    """Integer graded dimensions at weights 0..max_weight (integer grid)."""
    return [len(graded_basis(P, w)) for w in range(max_weight + 1)]


@dataclass
class CenterSlice:
    weight: object
    dimension: int
    basis: list

    def to_json(self, with_basis=False):
        data = {"w": str(self.weight), "dim": self.dimension}
        if with_basis:
            data["basis"] = [to_text(z) for z in self.basis]
        return data


def _charge_zero(P, keys):
    if P.charges is None:
        return keys
    out = []
    for tk in keys:
        ch = P.term_charge(tk)
        if ch is None or all(c == 0 for c in ch):
            out.append(tk)
    return out


def center_dimension(P: Presentation, weight, certify=True) -> CenterSlice:
    """Exact center slice at one weight (the presentation fixes the level).

    When the presentation declares Cartan-type charges, candidates are
    restricted to total charge zero: a central element is annihilated by the
    Cartan zero modes, which act diagonally with these charges.
    """
    keys = _charge_zero(P, graded_basis(P, weight))
    n = len(keys)
    if n == 0:
        return CenterSlice(weight, 0, [])
    cands = [State(P, {tk: LevelScalar.of(1)}) for tk in keys]
    gens = [g.name for g in P.gens if not g.is_exp()]
    # online RREF over the scalar field; rows are sparse dicts col -> scalar
    echelon = {}  # pivot col -> reduced row

    def reduce_row(row):
        # eliminate every known pivot column (rows stay fully reduced, so each
        # step removes one pivot column and introduces none)
        while True:
            hit = [c for c in row if c in echelon]
            if not hit:
                break
            c = min(hit)
            f = row[c]
            for kk, cc in echelon[c].items():
                vv = row.get(kk, _Z) - f * cc
                if vv.is_zero():
                    row.pop(kk, None)
                else:
                    row[kk] = vv
        if not row:
            return
        lead = min(row)
        lc = row[lead]
        newrow = {kk: cc / lc for kk, cc in row.items()}
        for other in echelon.values():
            if lead in other:
                f = other[lead]
                for kk, cc in newrow.items():
                    vv = other.get(kk, _Z) - f * cc
                    if vv.is_zero():
                        other.pop(kk, None)
                    else:
                        other[kk] = vv
        echelon[lead] = newrow

    for gname in gens:
        gs = P.gen_state(gname)
        lps = [bracket(gs, st) for st in cands]
        degs = set()
        for lp in lps:
            degs |= set(lp.coeffs)
        for dg in degs:
            by_target = {}
            for col, lp in enumerate(lps):
                for tk, c in lp.coefficient(dg).terms.items():
                    by_target.setdefault(tk, {})[col] = c
            for row in by_target.values():
                reduce_row(dict(row))

    pivots = set(echelon)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        coeffs = {fc: LevelScalar.of(1)}
        for pc, row in echelon.items():
            if fc in row:
                coeffs[pc] = -1 * row[fc]
        z = P.zero()
        for col, cf in coeffs.items():
            z = z + cands[col] * cf
        basis.append(z)
    if certify:
        for z in basis:
            for gname in gens:
                if not bracket(P.gen_state(gname), z).is_zero():
                    raise EngineError(
                        f"center certification failed at weight {weight}: "
                        f"[{gname}, {to_text(z)}] != 0")
    return CenterSlice(weight, len(basis), basis)


def center_hilbert(P: Presentation, max_weight, certify=True) -> list:
    return [center_dimension(P, w, certify=certify).dimension
            for w in range(max_weight + 1)]


# ---------------------------------------------------------------------------
# Li filtration leading symbols


def li_degree(tkey):
    return sum(d for _gi, d in tkey[0])


def leading_symbol(x: State, var_map) -> SuperPoly:
    """Minimal Li-degree part of x as a commutative (super)polynomial.

    var_map sends generator names to susypoly variables ('u', i) / ('v', j),
    or to ('odd:<name>', i) for odd generators.  x must be weight-homogeneous
    and exponential-free.
    """
    if x.is_zero():
        return SuperPoly.zero()
    if x.weight() is None:
        raise EngineError("leading symbol needs a weight-homogeneous state")
    P = x.pres
    degs = [li_degree(tk) for tk in x.terms]
    dmin = min(degs)
    out = SuperPoly.zero()
    for (fs, vec), c in x.terms.items():
        if vec is not None:
            raise EngineError("leading symbol of an exponential-carrying state")
        if li_degree((fs, vec)) != dmin:
            continue
        mono = SuperPoly.one()
        for gi, d in fs:
            name = P.gens[gi].name
            kind, idx = var_map[name]
            mono = mono * SuperPoly.variable(kind, idx, d)
        out = out + mono * c.constant_value()
    return out


GL21_SYMBOLS = {"ehat1": ("u", 1), "ehat2": ("u", 2), "ehat3": ("v", 1)}


def adapted_leading_symbols(basis, var_map) -> list:
    """Leading symbols of a filtration-adapted basis of the given span.

    Symbols of a raw kernel basis may coincide; adapting the basis to the Li
    filtration (subtracting matching lower parts, which raises the degree)
    yields as many linearly independent symbols as the span dimension.
    Monomials of different derivative counts never interact, so reduction can
    be restricted to echelon entries of the element's current minimal degree.
    """
    echelon = []  # (symbol, pivot monomial, carrier state)
    out = []
    for z in basis:
        zz = z
        while True:
            if zz.is_zero():
                raise EngineError("adapted symbols: basis is not linearly independent")
            deg = min(li_degree(tk) for tk in zz.terms)
            sym = leading_symbol(zz, var_map)
            carrier = zz
            for esym, epiv, estate in echelon:
                if epiv in sym.terms:
                    c = sym.terms[epiv] / esym.terms[epiv]
                    sym = sym - esym * c
                    carrier = carrier - estate * c
            if sym.is_zero():
                zz = carrier
                continue
            echelon.append((sym, min(sym.terms), carrier))
            out.append(sym)
            break
    return out


# ---------------------------------------------------------------------------
# Hilbert series of the comparison rings


def _charge_zero_count(P, w):
    return len(_charge_zero(P, graded_basis(P, w)))


def hilbert_M0(max_weight) -> list:
    """Graded dimensions of the charge-zero differential polynomials in xi+-."""
    M = build("M")
    return [_charge_zero_count(M, w) for w in range(max_weight + 1)]


def hilbert_large_level_coset(which, max_weight) -> list:
    """K^inf: charge-zero part of the large-level limit with the Cartan removed.

    Counted in the grading transported from the commutative differential
    polynomials in xi+-, under which Ebar, Fbar weigh 1/2 (so the sl2 series
    matches the M0 series entry by entry); the extra gl(1) boson weighs 1.
    """
    key = ("coset_pres", which)
    from .presentations import _CACHE
    P = _CACHE.get(key)
    if P is None:
        from .engine import GeneratorSpec
        half = Fraction(1, 2)
        gens = [GeneratorSpec("Ebar", 0, half), GeneratorSpec("Fbar", 0, half)]
        charges = {"Ebar": (Fraction(1),), "Fbar": (Fraction(-1),)}
        if which == "gl2":
            gens.append(GeneratorSpec("Nbar", 0, 1))
        P = Presentation(f"Kinf_{which}", gens, charges=charges)
        _CACHE[key] = P
    return [_charge_zero_count(P, w) for w in range(max_weight + 1)]


def hilbert(subject, max_weight, level="critical") -> list:
    """Dimension sequences for 'M0', 'coset:sl2', 'coset:gl2' or 'center:<label>'."""
    if subject == "M0":
        return hilbert_M0(max_weight)
    if subject.startswith("coset:"):
        return hilbert_large_level_coset(subject.split(":", 1)[1], max_weight)
    if subject.startswith("center:"):
        P = build(subject.split(":", 1)[1], level)
        return center_hilbert(P, max_weight)
    raise ValueError(f"unknown hilbert subject {subject!r}")
