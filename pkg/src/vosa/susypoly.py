"""Supersymmetric polynomials, their power sums, and the affine Hilbert series.

The ring R^{m|n}_inf has even variables d^N u_i, d^N v_j graded by N+1.
For leading-symbol work the same polynomial type also hosts extra named
variables, possibly odd (Grassmann); the supersymmetry test itself only
concerns polynomials in the plain u's and v's.
"""

from __future__ import annotations

from fractions import Fraction

_F0 = Fraction(0)
_F1 = Fraction(1)

# a variable is (kind, index, dorder); kinds 'u', 'v' are even, kind names
# starting with 'odd:' are Grassmann


def _is_odd(var):
    return var[0].startswith("odd:")


def _mono_mul(m1, m2):
    """Multiply two monomials; returns (monomial, sign) or None if it vanishes."""
    atoms = []
    for var, e in m1:
        atoms.extend([var] * e)
    sign = 1
    out = list(m1)
    for var, e in m2:
        for _ in range(e):
            if _is_odd(var):
                crossings = sum(1 for w in atoms if _is_odd(w) and w > var)
                if var in atoms:
                    return None, 0
                sign *= (-1) ** crossings
            atoms.append(var)
    atoms.sort()
    mono = []
    i = 0
    while i < len(atoms):
        j = i
        while j < len(atoms) and atoms[j] == atoms[i]:
            j += 1
        if _is_odd(atoms[i]) and j - i > 1:
            return None, 0
        mono.append((atoms[i], j - i))
        i = j
    return tuple(mono), sign


class SuperPoly:
    """Exact-rational polynomial in graded (super)variables."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    @staticmethod
    def zero():
        return SuperPoly({})

    @staticmethod
    def one():
        return SuperPoly({(): _F1})

    @staticmethod
    def variable(kind, index, dorder=0):
        return SuperPoly({(((kind, index, dorder), 1),): _F1})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, SuperPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, _F0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return SuperPoly(out)

    def __sub__(self, other):
        return self + other * Fraction(-1)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            return SuperPoly({m: cv * c for m, cv in self.terms.items()})
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono, sign = _mono_mul(m1, m2)
                if sign == 0:
                    continue
                v = out.get(mono, _F0) + sign * c1 * c2
                if v:
                    out[mono] = v
                else:
                    out.pop(mono, None)
        return SuperPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e):
        out = SuperPoly.one()
        for _ in range(e):
            out = out * self
        return out

    def derive(self):
        """Total derivative: d(d^N x) = d^{N+1} x extended by the Leibniz rule."""
        out = SuperPoly.zero()
        for mono, c in self.terms.items():
            for pos, (var, e) in enumerate(mono):
                kind, idx, N = var
                rest = list(mono)
                sign = 1
                if _is_odd(var):
                    sign = (-1) ** sum(1 for w, ee in mono[:pos] if _is_odd(w))
                    rest[pos : pos + 1] = []
                    hit = SuperPoly({tuple(rest): _F1})
                else:
                    if e == 1:
                        rest[pos : pos + 1] = []
                    else:
                        rest[pos] = (var, e - 1)
                    hit = SuperPoly({tuple(rest): Fraction(e)})
                bumped = SuperPoly.variable(kind, idx, N + 1)
                out = out + (hit * bumped) * (sign * c)
        return out

    def weight(self):
        """Common weight wt(d^N x) = N+1, or None if inhomogeneous."""
        w = None
        for mono in self.terms:
            mw = sum((N + 1) * e for ((_k, _i, N), e) in mono)
            if w is None:
                w = mw
            elif w != mw:
                return None
        return w

    def rename(self, mapping):
        """Substitute variables by variables: mapping (kind, idx) -> (kind', idx')."""
        out = {}
        for mono, c in self.terms.items():
            new = tuple(sorted(((mapping.get((k, i), (k, i)) + (N,)), e)
                               for ((k, i, N), e) in mono))
            out[new] = out.get(new, _F0) + c
        return SuperPoly(out)

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for mono, c in sorted(self.terms.items()):
            atoms = []
            for (k, i, N), e in mono:
                name = f"{k}{i}" if not k.startswith("odd:") else k[4:] + str(i)
                if N:
                    name = f"d^{N}{name}"
                atoms.append(name if e == 1 else f"{name}^{e}")
            body = "*".join(atoms) if atoms else "1"
            bits.append(f"{c}*{body}" if c != 1 or not atoms else body)
        return " + ".join(bits).replace("+ -", "- ")


def u(i, N=0):
    return SuperPoly.variable("u", i, N)


def v(j, N=0):
    return SuperPoly.variable("v", j, N)


def power_sum(p, m, n) -> SuperPoly:
    """s_p = sum u_i^p - (-1)^p sum v_j^p."""
    if p < 1:
        raise ValueError("power sums need p >= 1")
    out = SuperPoly.zero()
    for i in range(1, m + 1):
        out = out + u(i) ** p
    sgn = Fraction(-((-1) ** p))
    for j in range(1, n + 1):
        out = out + v(j) ** p * sgn
    return out


def _swap_vars(f, kind, i, j):
    mapping = {(kind, i): (kind, j), (kind, j): (kind, i)}
    return f.rename(mapping)


def is_supersymmetric(f: SuperPoly, m, n) -> bool:
    """S_m x S_n invariance plus cancellation under u_m = t, v_n = -t."""
    for mono in f.terms:
        for (k, _i, N), _e in mono:
            if k not in ("u", "v") or N:
                raise ValueError("supersymmetry test expects a plain u/v polynomial")
    for i in range(1, m):
        if _swap_vars(f, "u", i, i + 1) != f:
            return False
    for j in range(1, n):
        if _swap_vars(f, "v", j, j + 1) != f:
            return False
    # substitute u_m = t, v_n = -t and require the t-dependence to vanish
    collected = {}
    for mono, c in f.terms.items():
        tdeg = 0
        sign = 1
        rest = []
        for (k, i, N), e in mono:
            if k == "u" and i == m:
                tdeg += e
            elif k == "v" and i == n:
                tdeg += e
                sign *= (-1) ** e
            else:
                rest.append(((k, i, N), e))
        key = (tuple(rest), tdeg)
        collected[key] = collected.get(key, _F0) + sign * c
    return all(not c for (rest, tdeg), c in collected.items() if tdeg >= 1)


def _rank(vectors):
    """Rank of a list of {monomial: Fraction} rows by sparse elimination."""
    echelon = {}
    rank = 0
    for vec in vectors:
        row = dict(vec)
        while row:
            lead = min(row)
            if lead in echelon:
                piv = echelon[lead]
                f = row[lead]
                for kk, cc in piv.items():
                    vv = row.get(kk, _F0) - f * cc
                    if vv:
                        row[kk] = vv
                    else:
                        row.pop(kk, None)
            else:
                lc = row[lead]
                echelon[lead] = {kk: cc / lc for kk, cc in row.items()}
                rank += 1
                break
    return rank


def affine_generating_products(m, n, weight):
    """All products of d^r s_p of the given total weight."""
    gens = []
    for p in range(1, weight + 1):
        sp = power_sum(p, m, n)
        for r in range(0, weight - p + 1):
            gens.append((p + r, sp))
            sp = sp.derive()
    products = []

    def extend(idx, left, acc):
        if left == 0:
            products.append(acc)
            return
        for t in range(idx, len(gens)):
            gw, gp = gens[t]
            if gw > left:
                continue
            extend(t, left - gw, acc * gp)

    if weight == 0:
        return [SuperPoly.one()]
    extend(0, weight, SuperPoly.one())
    return [p for p in products if not p.is_zero()]


def in_affine_span(f: SuperPoly, m, n) -> bool:
    """Membership of a homogeneous polynomial in the affine supersymmetric ring."""
    if f.is_zero():
        return True
    w = f.weight()
    if w is None:
        raise ValueError("affine span membership needs a weight-homogeneous input")
    vecs = [p.terms for p in affine_generating_products(m, n, w)]
    base = _rank(vecs)
    return _rank(vecs + [f.terms]) == base


def affine_hilbert(m, n, max_weight):
    """Graded dimensions of the differential algebra generated by the power sums.

    Spanning set: all products of d^r s_p with total weight w; exact rank over Q.
    """
    gens = []
    for p in range(1, max_weight + 1):
        sp = power_sum(p, m, n)
        for r in range(0, max_weight - p + 1):
            gens.append((p + r, sp))
            sp = sp.derive()
    dims = [1]
    for w in range(1, max_weight + 1):
        products = []

        def extend(idx, left, acc):
            if left == 0:
                products.append(acc)
                return
            for t in range(idx, len(gens)):
                gw, gp = gens[t]
                if gw > left:
                    continue
                extend(t, left - gw, acc * gp)

        extend(0, w, SuperPoly.one())
        dims.append(_rank([p.terms for p in products if not p.is_zero()]))
    return dims
