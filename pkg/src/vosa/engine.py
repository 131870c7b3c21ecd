"""Normal forms and lambda-bracket calculus for strongly generated vertex superalgebras.

States are kept in a canonical PBW-style normal form: each term is a
right-nested normally ordered product of derivatives of generators, sorted by
(generator index ascending, derivative order descending), optionally ending in
a single lattice exponential.  Equality of states is equality of normal forms.

All rewriting is driven by four mode-algebra identities (straightening of two
adjacent factors, quasi-associativity, the two non-commutative Wick formulas)
plus the lattice-exponential contraction rules along isotropic directions.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import LevelScalar, Rat, ScalarError, parse_scalar

_ONE = LevelScalar.of(1)
_ZERO = LevelScalar.of(0)


class EngineError(Exception):
    """Errors raised by normal-form computations."""


class UnknownGeneratorError(EngineError):
    pass


class ExpPairingError(EngineError):
    """Exponential product or bracket requested along non-orthogonal vectors."""


class ParseError(EngineError):
    pass


def _fall(m, j):
    """Falling factorial m(m-1)...(m-j+1) as a Fraction (m may be negative)."""
    acc = Fraction(1)
    for t in range(j):
        acc *= m - t
    return acc


def _binom(m, j):
    """Generalized binomial coefficient C(m, j) for integer m of any sign."""
    acc = Fraction(1)
    for t in range(j):
        acc = acc * (m - t) / (t + 1)
    return acc


def _factorial(n):
    acc = 1
    for t in range(2, n + 1):
        acc *= t
    return Fraction(acc)


# ---------------------------------------------------------------------------
# generator data


class GeneratorSpec:
    """A strong generator: name, parity (0 even / 1 odd), weight, kind.

    kind is 'plain' or a lattice vector (tuple of LevelScalar over the
    presentation's lattice basis) for an exponential generator e^vector.
    """

    __slots__ = ("name", "parity", "weight", "kind")

    def __init__(self, name, parity, weight, kind="plain"):
        self.name = name
        self.parity = int(parity)
        self.weight = Fraction(weight)
        if kind != "plain":
            kind = tuple(LevelScalar.of(c) for c in kind)
            if self.parity != 0:
                raise EngineError(f"exponential generator {name} must be even")
        self.kind = kind

    def is_exp(self):
        return self.kind != "plain"


def _fkey(f):
    # canonical factor order: generator index ascending, derivative descending
    return (f[0], -f[1])


class Presentation:
    """A vertex superalgebra given by strong generators and a bracket table.

    The table stores one orientation per generator pair; the other is derived
    by skew-symmetry.  Presentations are immutable once the table is filled
    and act as the computation context (and cache holder) for all engine
    operations on their states.
    """

    def __init__(self, label, generators, gram=None, lattice=None,
                 critical_k=None, charges=None):
        self.label = label
        self.gens = tuple(generators)
        self.index = {}
        for i, g in enumerate(self.gens):
            if g.name in self.index:
                raise EngineError(f"duplicate generator name {g.name!r}")
            self.index[g.name] = i
        # lattice: names of the Heisenberg generators carrying the Gram form
        self.lattice = tuple(self.index[n] for n in lattice) if lattice else ()
        self._lattice_pos = {gi: p for p, gi in enumerate(self.lattice)}
        if gram is not None:
            gram = tuple(tuple(LevelScalar.of(c) for c in row) for row in gram)
            if len(gram) != len(self.lattice):
                raise EngineError("Gram matrix size does not match lattice basis")
        has_exp = any(g.is_exp() for g in self.gens)
        if has_exp and gram is None:
            raise EngineError("exponential generators require a Gram matrix")
        self.gram = gram
        self.critical_k = None if critical_k is None else Fraction(critical_k)
        self.level = "generic"
        self.charges = dict(charges) if charges else None
        self.aliases = {}
        self._table = {}
        # computation caches, keyed on term keys (never mutated after storing)
        self._c_pair = {}
        self._c_lmul = {}
        self._c_nprod = {}
        self._c_bgen = {}
        self._c_btt = {}
        self._c_expmode = {}
        self._c_derive = {}

    # -- construction -------------------------------------------------------

    def gen_index(self, name):
        try:
            return self.index[name]
        except KeyError:
            raise UnknownGeneratorError(f"unknown generator {name!r} in {self.label}") from None

    def set_bracket(self, a, b, poly):
        """Record [a_lambda b] as {n: a_(n)b}, the n-th product table.

        Table entries follow the divided-power display [a_l b] = sum a_(n)b l^n/n!,
        so values can be copied from bracket tables verbatim; internally the
        polynomial coefficient a_(n)b/n! is stored.
        """
        i, j = self.gen_index(a), self.gen_index(b)
        lp = {}
        for deg, st in poly.items():
            if isinstance(st, str):
                st = self.parse_state(st)
            deg = int(deg)
            v = _vscale(st.terms, Fraction(1) / _factorial(deg)) if deg > 1 else dict(st.terms)
            if v:
                lp[deg] = v
        self._table[(i, j)] = lp
        self._c_pair.clear()

    def set_alias(self, name, state):
        if isinstance(state, str):
            state = self.parse_state(state)
        self.aliases[name] = state

    # -- basic state constructors -------------------------------------------

    def vacuum(self):
        return State(self, {((), None): _ONE})

    def zero(self):
        return State(self, {})

    def gen_state(self, name):
        gi = self.gen_index(name)
        g = self.gens[gi]
        if g.is_exp():
            return self.exp_state(g.kind)
        return State(self, {(((gi, 0),), None): _ONE})

    def exp_state(self, vec):
        vec = self._canon_exp(tuple(LevelScalar.of(c) for c in vec))
        return State(self, {((), vec): _ONE})

    def state(self, name):
        """Generator or alias lookup by name."""
        if name in self.aliases:
            return self.aliases[name]
        return self.gen_state(name)

    def _canon_exp(self, vec):
        if vec is None:
            return None
        if len(vec) != len(self.lattice):
            raise EngineError("lattice vector length mismatch")
        if all(c.is_zero() for c in vec):
            return None
        return vec

    # -- parities, weights, pairings ----------------------------------------

    def term_parity(self, tkey):
        p = 0
        for gi, _ in tkey[0]:
            p ^= self.gens[gi].parity
        return p

    def term_weight(self, tkey):
        w = Fraction(0)
        for gi, d in tkey[0]:
            w += self.gens[gi].weight + d
        return w

    def term_charge(self, tkey):
        if self.charges is None:
            return None
        acc = None
        for gi, _ in tkey[0]:
            c = self.charges.get(self.gens[gi].name)
            if c is None:
                continue
            acc = c if acc is None else tuple(x + y for x, y in zip(acc, c))
        return acc

    def pairing_gen_vec(self, gi, vec):
        pos = self._lattice_pos.get(gi)
        if pos is None or vec is None:
            return _ZERO
        acc = _ZERO
        for q, c in enumerate(vec):
            if c:
                acc = acc + c * self.gram[pos][q]
        return acc

    def pairing_vec_vec(self, v1, v2):
        if v1 is None or v2 is None:
            return _ZERO
        acc = _ZERO
        for p, c in enumerate(v1):
            if not c:
                continue
            for q, d in enumerate(v2):
                if d:
                    acc = acc + c * d * self.gram[p][q]
        return acc

    # -- table access --------------------------------------------------------

    def pair_lp(self, i, j):
        """[g_i lambda g_j] as {degree: vec}, deriving the missing orientation."""
        got = self._c_pair.get((i, j))
        if got is not None:
            return got
        if (i, j) in self._table:
            lp = self._table[(i, j)]
        elif (j, i) in self._table:
            sign = -1 if (self.gens[i].parity and self.gens[j].parity) else 1
            lp = _lp_neg_shift(self, self._table[(j, i)], -sign)
        else:
            lp = {}
        self._c_pair[(i, j)] = lp
        return lp

    # -- specialization ------------------------------------------------------

    def specialized(self, k0):
        """A copy of this presentation with every scalar evaluated at k=k0."""
        k0 = Fraction(k0)

        def sp(c):
            return LevelScalar.of(c.specialize(k0))

        gens = []
        for g in self.gens:
            kind = g.kind if g.kind == "plain" else tuple(sp(c) for c in g.kind)
            gens.append(GeneratorSpec(g.name, g.parity, g.weight, kind))
        gram = None
        if self.gram is not None:
            gram = tuple(tuple(sp(c) for c in row) for row in self.gram)
        out = Presentation(f"{self.label}", gens,
                           gram=gram,
                           lattice=tuple(self.gens[i].name for i in self.lattice),
                           critical_k=self.critical_k, charges=self.charges)
        out.level = k0
        for (i, j), lp in self._table.items():
            out._table[(i, j)] = {
                deg: {(fs, _spec_exp(vec, k0)): sp(c) for (fs, vec), c in v.items()}
                for deg, v in lp.items()
            }
        for name, st in self.aliases.items():
            out.aliases[name] = State(out, {(fs, _spec_exp(vec, k0)): sp(c)
                                            for (fs, vec), c in st.terms.items()})
        return out

    def at_level(self, level):
        """'generic', 'critical', or an explicit rational level."""
        if level == "generic":
            return self
        if level == "critical":
            if self.critical_k is None:
                raise EngineError(f"{self.label} has no critical level")
            return self.specialized(self.critical_k)
        return self.specialized(Fraction(level))

    def __repr__(self):
        return f"<Presentation {self.label} ({len(self.gens)} generators, level={self.level})>"


def _spec_exp(vec, k0):
    if vec is None:
        return None
    return tuple(LevelScalar.of(c.specialize(k0)) for c in vec)


# ---------------------------------------------------------------------------
# internal linear algebra on term vectors: vec = {termkey: LevelScalar}


def _vadd(acc, v, c=_ONE):
    if not v:
        return acc
    if c is _ONE:
        for key, cv in v.items():
            old = acc.get(key)
            new = cv if old is None else old + cv
            if new.is_zero():
                acc.pop(key, None)
            else:
                acc[key] = new
    else:
        if isinstance(c, (int, Fraction)):
            c = LevelScalar.of(c)
        if c.is_zero():
            return acc
        for key, cv in v.items():
            old = acc.get(key)
            add = cv * c
            new = add if old is None else old + add
            if new.is_zero():
                acc.pop(key, None)
            else:
                acc[key] = new
    return acc


def _vscale(v, c):
    if isinstance(c, (int, Fraction)):
        c = LevelScalar.of(c)
    if c.is_zero() or not v:
        return {}
    return {key: cv * c for key, cv in v.items()}


def _lp_add(acc, lp, c=_ONE, shift=0):
    for deg, v in lp.items():
        slot = acc.setdefault(deg + shift, {})
        _vadd(slot, v, c)
        if not slot:
            del acc[deg + shift]
    return acc


def _lp_prune(lp):
    return {deg: v for deg, v in lp.items() if v}


# ---------------------------------------------------------------------------
# derivatives


def _derive_term(P, tkey):
    got = P._c_derive.get(tkey)
    if got is not None:
        return got
    factors, vec = tkey
    acc = {}
    for pos in range(len(factors)):
        gi, d = factors[pos]
        raw = factors[:pos] + ((gi, d + 1),) + factors[pos + 1:]
        _vadd(acc, _emit_monomial(P, raw, vec))
    if vec is not None:
        # translation acts on e^gamma by attaching the Heisenberg state of gamma
        for pos_l, c in enumerate(vec):
            if c:
                raw = factors + ((P.lattice[pos_l], 0),)
                _vadd(acc, _emit_monomial(P, raw, vec), c)
    P._c_derive[tkey] = acc
    return acc


def _emit_monomial(P, factors, vec):
    """Normalize a raw factor list over an exp/vacuum base."""
    if _is_canonical(P, factors):
        return {(factors, vec): _ONE}
    return _norm_monomial(P, factors, vec)


def _is_canonical(P, factors):
    for a in range(1, len(factors)):
        f, h = factors[a - 1], factors[a]
        if _fkey(f) > _fkey(h):
            return False
        if f == h and P.gens[f[0]].parity:
            return False
    return True


def _norm_monomial(P, factors, vec):
    acc = {((), P._canon_exp(vec) if vec is not None else None): _ONE}
    for f in reversed(factors):
        acc = _lmul_vec(P, f, acc)
    return acc


def _derive_vec(P, v, n=1):
    for _ in range(n):
        acc = {}
        for tkey, c in v.items():
            _vadd(acc, _derive_term(P, tkey), c)
        v = acc
    return v


# ---------------------------------------------------------------------------
# straightening: multiply a single factor onto a normal-form state


def _lmul_vec(P, f, v):
    acc = {}
    for tkey, c in v.items():
        _vadd(acc, _lmul_term(P, f, tkey), c)
    return acc


def _lmul_term(P, f, tkey):
    key = (f, tkey)
    got = P._c_lmul.get(key)
    if got is not None:
        return got
    factors, vec = tkey
    if not factors or _fkey(f) < _fkey(factors[0]):
        out = {((f,) + factors, vec): _ONE}
    else:
        h = factors[0]
        odd = P.gens[f[0]].parity
        if f == h and not odd:
            out = {((f,) + factors, vec): _ONE}
        else:
            rest = (factors[1:], vec)
            if f == h:
                # odd square :A:Ax:: = 1/2 {A,A} x expanded by the mode commutator
                out = _reorder_correction(P, f, f, rest, Fraction(1, 2))
            else:
                restv = {rest: _ONE}
                main = _lmul_vec(P, h, _lmul_vec(P, f, restv))
                sign = -1 if (odd and P.gens[h[0]].parity) else 1
                out = _vscale(main, sign)
                _vadd(out, _reorder_correction(P, f, h, rest, Fraction(1)))
    P._c_lmul[key] = out
    return out


def _reorder_correction(P, f, h, rest, scale):
    """sum_j (-1)^j/(j+1) nprod(d^{j+1} Q_j, rest) with Q = [F_lambda H]."""
    lp = _factor_pair_lp(P, f, h)
    acc = {}
    restv = {rest: _ONE}
    for j, qj in lp.items():
        c = Fraction((-1) ** j, j + 1) * scale
        _vadd(acc, _nprod_vec(P, _derive_vec(P, qj, j + 1), restv), c)
    return acc


def _factor_pair_lp(P, f, h):
    """[d^m g_f lambda d^n g_h] from the generator table."""
    base = P.pair_lp(f[0], h[0])
    lp = _lp_lambda_plus_d(P, base, h[1])
    if f[1]:
        lp = {deg + f[1]: _vscale(v, (-1) ** f[1]) for deg, v in lp.items()}
    return lp


def _lp_lambda_plus_d(P, lp, n):
    """Apply (lambda + d)^n to a lambda polynomial with state coefficients."""
    if n == 0:
        return lp
    out = {}
    for i, v in lp.items():
        dv = v
        for j in range(n + 1):
            if j > 0:
                dv = _derive_vec(P, dv)
            slot = out.setdefault(n - j + i, {})
            _vadd(slot, dv, _binom(n, j))
    return _lp_prune(out)


def _lp_neg_shift(P, lp, outer=1):
    """outer * sum_i (-lambda - d)^i s_i  (skew-symmetry substitution)."""
    out = {}
    for i, v in lp.items():
        dv = v
        for j in range(i + 1):
            if j > 0:
                dv = _derive_vec(P, dv)
            slot = out.setdefault(i - j, {})
            _vadd(slot, dv, Fraction(outer) * (-1) ** i * _binom(i, j))
    return _lp_prune(out)


# ---------------------------------------------------------------------------
# normally ordered product of states


def _nprod_vec(P, v1, v2):
    acc = {}
    for skey, c in v1.items():
        part = _nprod_term_vec(P, skey, v2)
        _vadd(acc, part, c)
    return acc


def _nprod_term_vec(P, skey, v2):
    acc = {}
    for tkey, d in v2.items():
        _vadd(acc, _nprod_tt(P, skey, tkey), d)
    return acc


def _nprod_tt(P, skey, tkey):
    key = (skey, tkey)
    got = P._c_nprod.get(key)
    if got is not None:
        return got
    sf, sexp = skey
    if not sf:
        if sexp is None:
            out = {tkey: _ONE}
        else:
            out = _exp_mode(P, sexp, -1, tkey)
    else:
        # peel the first factor by quasi-associativity
        F = sf[0]
        g, m = F
        rest = (sf[1:], sexp)
        restv = {rest: _ONE}
        out = _lmul_vec(P, F, _nprod_tt(P, rest, tkey))
        R = _bracket_tt(P, rest, tkey)          # [s'_lambda y]
        for jm1, rj in R.items():
            _vadd(out, _lmul_vec(P, (g, m + jm1 + 1), rj), Fraction(1, jm1 + 1))
        Pl = _bracket_left_factor(P, F, tkey)   # [F_lambda y]
        if Pl:
            sign = -1 if (P.gens[g].parity and P.term_parity(rest)) else 1
            dv = restv
            jmax = max(Pl)
            for j in range(jmax + 1):
                dv = _derive_vec(P, dv)
                pj = Pl.get(j)
                if pj:
                    _vadd(out, _nprod_vec(P, dv, pj), Fraction(sign, j + 1))
    P._c_nprod[key] = out
    return out


def _bracket_left_factor(P, F, tkey):
    g, m = F
    lp = _bgen(P, g, tkey)
    if m:
        lp = {deg + m: _vscale(v, (-1) ** m) for deg, v in lp.items()}
    return lp


# ---------------------------------------------------------------------------
# lattice exponential modes: (e^gamma)_(m) applied to a normal-form term


def _exp_mode(P, gamma, m, tkey):
    key = (gamma, m, tkey)
    got = P._c_expmode.get(key)
    if got is not None:
        return got
    factors, delta = tkey
    if not factors:
        if delta is not None and not P.pairing_vec_vec(gamma, delta).is_zero():
            raise ExpPairingError(
                f"non-orthogonal exponential pair in {P.label}: ({_vec_text(P, gamma)}, {_vec_text(P, delta)})")
        if m >= 0:
            out = {}
        else:
            n = -m - 1
            out = _derive_vec(P, {((), gamma): _ONE}, n)
            if n:
                out = _vscale(out, Fraction(1, int(_factorial(n))))
            if delta is not None:
                merged = {}
                for (fs, gv), c in out.items():
                    s = tuple(a + b for a, b in zip(gv, delta)) if gv is not None else delta
                    merged[(fs, P._canon_exp(s))] = c
                out = merged
    else:
        h, n = factors[0]
        rest = (factors[1:], delta)
        out = _lmul_vec(P, (h, n), _exp_mode(P, gamma, m, rest))
        c = P.pairing_gen_vec(h, gamma)
        if not c.is_zero():
            coef = Fraction(0)
            for j in range(n + 1):
                coef += (_binom(m, j) * _factorial(j) * _binom(n, j)
                         * (-1) ** (n - j) * _fall(m - 1 - j, n - j))
            if coef:
                _vadd(out, _exp_mode(P, gamma, m - 1 - n, rest), (-c) * coef)
    P._c_expmode[key] = out
    return out


# ---------------------------------------------------------------------------
# lambda brackets


def _bgen(P, aref, tkey):
    """[alpha_lambda t] for alpha a plain generator index or ('exp', gamma)."""
    key = (aref, tkey)
    got = P._c_bgen.get(key)
    if got is not None:
        return got
    factors, delta = tkey
    out = {}
    if not factors:
        if delta is not None:
            if isinstance(aref, int):
                c = P.pairing_gen_vec(aref, delta)
                if not c.is_zero():
                    out = {0: {((), delta): c}}
            else:
                gamma = aref[1]
                if not P.pairing_vec_vec(gamma, delta).is_zero():
                    raise ExpPairingError(
                        f"non-orthogonal exponential bracket in {P.label}")
    else:
        h, n = factors[0]
        rest = (factors[1:], delta)
        restv = {rest: _ONE}
        if isinstance(aref, int):
            base = P.pair_lp(aref, h)
            pa = P.gens[aref].parity
        else:
            c = P.pairing_gen_vec(h, aref[1])
            base = {} if c.is_zero() else {0: {((), aref[1]): -c}}
            pa = 0
        PH = _lp_lambda_plus_d(P, base, n)
        # :[a_l H] t': term
        for i, si in PH.items():
            slot = out.setdefault(i, {})
            _vadd(slot, _nprod_vec(P, si, restv))
        # (-1)^{p(a)p(H)} :H [a_l t']:
        sign = -1 if (pa and P.gens[h].parity) else 1
        inner = _bgen(P, aref, rest)
        for i, si in inner.items():
            slot = out.setdefault(i, {})
            _vadd(slot, _lmul_vec(P, (h, n), si), sign)
        # integral term
        for i, si in PH.items():
            W = _bracket_vec_vec(P, si, restv)
            for j, w in W.items():
                slot = out.setdefault(i + j + 1, {})
                _vadd(slot, w, Fraction(1, j + 1))
    out = _lp_prune(out)
    P._c_bgen[key] = out
    return out


def _bracket_tt(P, skey, tkey):
    key = (skey, tkey)
    got = P._c_btt.get(key)
    if got is not None:
        return got
    sf, sexp = skey
    if not sf:
        if sexp is None:
            out = {}
        else:
            out = _bgen(P, ("exp", sexp), tkey)
    elif len(sf) == 1 and sexp is None:
        g, m = sf[0]
        out = _bgen(P, g, tkey)
        if m:
            out = {deg + m: _vscale(v, (-1) ** m) for deg, v in out.items()}
    else:
        # right Wick formula on s = :F s':
        F = sf[0]
        g, m = F
        rest = (sf[1:], sexp)
        restv = {rest: _ONE}
        sign = -1 if (P.gens[g].parity and P.term_parity(rest)) else 1
        R = _bracket_tt(P, rest, tkey)          # [s'_lambda y]
        Pl = _bracket_left_factor(P, F, tkey)   # [F_lambda y]
        out = {}
        #  :(e^{d d_lambda}F)[s'_l y]:
        for i, ri in R.items():
            for j in range(i + 1):
                c = _fall(i, j) / _factorial(j)
                slot = out.setdefault(i - j, {})
                _vadd(slot, _lmul_vec(P, (g, m + j), ri), c)
        #  +- :(e^{d d_lambda}s')[F_l y]:
        if Pl:
            dv = restv
            imax = max(Pl)
            for j in range(imax + 1):
                if j:
                    dv = _derive_vec(P, dv)
                for i in range(j, imax + 1):
                    pi = Pl.get(i)
                    if pi:
                        c = Fraction(sign) * _fall(i, j) / _factorial(j)
                        slot = out.setdefault(i - j, {})
                        _vadd(slot, _nprod_vec(P, dv, pi), c)
        #  +- int_0^lambda [s'_mu [F_{lambda-mu} y]] dmu
        for i, pi in Pl.items():
            W = _bracket_vec_vec(P, restv, pi)
            for j, w in W.items():
                c = Fraction(sign) * _factorial(i) * _factorial(j) / _factorial(i + j + 1)
                slot = out.setdefault(i + j + 1, {})
                _vadd(slot, w, c)
        out = _lp_prune(out)
    P._c_btt[key] = out
    return out


def _bracket_vec_vec(P, v1, v2):
    acc = {}
    for skey, c in v1.items():
        for tkey, d in v2.items():
            _lp_add(acc, _bracket_tt(P, skey, tkey), c * d)
    return _lp_prune(acc)


# ---------------------------------------------------------------------------
# public value types


class State:
    """A normal-form element: finite sum of canonical terms with scalar coefficients."""

    __slots__ = ("pres", "terms")

    def __init__(self, pres, terms):
        self.pres = pres
        self.terms = {k: c for k, c in terms.items() if not c.is_zero()}

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        _same_pres(self, other)
        acc = dict(self.terms)
        _vadd(acc, other.terms)
        return State(self.pres, acc)

    def __sub__(self, other):
        _same_pres(self, other)
        acc = dict(self.terms)
        _vadd(acc, other.terms, LevelScalar.of(-1))
        return State(self.pres, acc)

    def __neg__(self):
        return State(self.pres, {k: -c for k, c in self.terms.items()})

    def __mul__(self, c):
        return State(self.pres, _vscale(self.terms, c))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, State):
            return NotImplemented
        return self.pres is other.pres and self.terms == other.terms

    def __hash__(self):
        return hash((id(self.pres), tuple(sorted(self.terms.items(), key=lambda kv: _term_sort_key(kv[0])))))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: _term_sort_key(kv[0]))

    def weight(self):
        """Common weight of all terms, or None if inhomogeneous (exp factors weigh 0)."""
        w = None
        for tkey in self.terms:
            tw = self.pres.term_weight(tkey)
            if w is None:
                w = tw
            elif w != tw:
                return None
        return w

    def parity(self):
        p = None
        for tkey in self.terms:
            tp = self.pres.term_parity(tkey)
            if p is None:
                p = tp
            elif p != tp:
                return None
        return p

    def map_scalars(self, fn):
        return State(self.pres, {k: fn(c) for k, c in self.terms.items()})

    def __repr__(self):
        return to_text(self)


def _term_sort_key(tkey):
    factors, vec = tkey
    ev = () if vec is None else tuple(c.text() for c in vec)
    return (len(factors), tuple(_fkey(f) for f in factors), ev)


def _same_pres(a, b):
    if a.pres is not b.pres:
        raise EngineError(
            f"states from different presentations: {a.pres.label} vs {b.pres.label}")


class LambdaPoly:
    """A polynomial in lambda with State coefficients (the singular OPE part)."""

    __slots__ = ("pres", "coeffs")

    def __init__(self, pres, coeffs):
        self.pres = pres
        self.coeffs = {d: s for d, s in coeffs.items() if not s.is_zero()}

    def coefficient(self, n):
        """True polynomial coefficient of lambda^n, i.e. x_(n)y / n!."""
        return self.coeffs.get(n, self.pres.zero())

    def nth(self, n):
        """The n-th product x_(n)y = n! * coefficient(n)."""
        return self.coefficient(n) * _factorial(n)

    def degrees(self):
        return sorted(self.coeffs)

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, LambdaPoly):
            return NotImplemented
        return self.pres is other.pres and self.coeffs == other.coeffs

    def __sub__(self, other):
        out = dict(self.coeffs)
        for d, s in other.coeffs.items():
            out[d] = out.get(d, self.pres.zero()) - s
        return LambdaPoly(self.pres, out)

    def __repr__(self):
        # divided-power display: the state shown at L^n is the n-th product x_(n)y
        if not self.coeffs:
            return "0"
        bits = []
        for d in self.degrees():
            s = f"({to_text(self.nth(d))})"
            if d == 0:
                bits.append(s)
            elif d == 1:
                bits.append(f"{s}*L")
            else:
                bits.append(f"{s}*L^{d}/{d}!")
        return " + ".join(bits)


# ---------------------------------------------------------------------------
# public operations


def derive(x: State, n: int = 1) -> State:
    """n-th translation-operator derivative of a state."""
    return State(x.pres, _derive_vec(x.pres, x.terms, n))


def nprod(x: State, y: State) -> State:
    """Normally ordered product :xy: in canonical form."""
    _same_pres(x, y)
    return State(x.pres, _nprod_vec(x.pres, x.terms, y.terms))


def bracket(x: State, y: State) -> LambdaPoly:
    """[x_lambda y]; the lambda^n coefficient is x_(n)y / n!."""
    _same_pres(x, y)
    lp = _bracket_vec_vec(x.pres, x.terms, y.terms)
    return LambdaPoly(x.pres, {d: State(x.pres, v) for d, v in lp.items()})


def nth_product(x: State, n: int, y: State) -> State:
    """x_(n)y for any integer n."""
    _same_pres(x, y)
    if n >= 0:
        return bracket(x, y).coefficient(n) * _factorial(n)
    m = -n - 1
    return nprod(derive(x, m) * (Fraction(1) / _factorial(m)), y)


def zero_mode(x: State, y: State) -> State:
    """x_(0)y, the zero-mode action."""
    return bracket(x, y).coefficient(0)


def attach_exp(x: State, vec) -> State:
    """Set the exponential slot of every term of x to e^vec.

    This realizes the Fock-module vector "x applied to the highest-weight
    vector of charge vec": each canonical monomial gets the exponential
    attached with no contraction (unlike nprod, which would insert the lattice
    Wick corrections of the iterated normal product).
    """
    P = x.pres
    vec = P._canon_exp(tuple(LevelScalar.of(c) for c in vec))
    out = {}
    for (fs, old), c in x.terms.items():
        if old is not None:
            raise ExpPairingError("attach_exp on a term already carrying an exponential")
        key = (fs, vec)
        out[key] = out.get(key, _ZERO) + c
    return State(P, out)


def skew_expected(x: State, y: State) -> LambdaPoly:
    """-(-1)^{p(x)p(y)} [y_{-lambda-d} x]; equals bracket(x, y) by skew-symmetry."""
    px, py = x.parity(), y.parity()
    if px is None or py is None:
        raise EngineError("skew check requires parity-homogeneous states")
    sign = -1 if (px and py) else 1
    lp = _bracket_vec_vec(x.pres, y.terms, x.terms)
    out = _lp_neg_shift(x.pres, lp, -sign)
    return LambdaPoly(x.pres, {d: State(x.pres, v) for d, v in out.items()})


def quasi_comm_defect(x: State, y: State) -> State:
    """:xy: - (-1)^{p(x)p(y)} :yx: - int_{-d}^0 [x_lambda y] dlambda (must be 0)."""
    px, py = x.parity(), y.parity()
    sign = -1 if (px and py) else 1
    lhs = nprod(x, y) - sign * nprod(y, x)
    P = x.pres
    lp = _bracket_vec_vec(P, x.terms, y.terms)
    integral = {}
    for j, v in lp.items():
        _vadd(integral, _derive_vec(P, v, j + 1), Fraction((-1) ** j, j + 1))
    return lhs - State(P, integral)


def jacobi_defect(a: State, b: State, c: State):
    """[a_l [b_m c]] - (-1)^{p(a)p(b)} [b_m [a_l c]] - [[a_l b]_{l+m} c].

    Returns {(i, j): State} of nonzero lambda^i mu^j coefficients; empty = pass.
    """
    P = a.pres
    pa, pb = a.parity(), b.parity()
    if pa is None or pb is None:
        raise EngineError("Jacobi check requires parity-homogeneous states")
    sign = -1 if (pa and pb) else 1
    acc = {}

    def put(i, j, v, coef=_ONE):
        slot = acc.setdefault((i, j), {})
        _vadd(slot, v, coef)
        if not slot:
            del acc[(i, j)]

    bc = _bracket_vec_vec(P, b.terms, c.terms)
    for j, v in bc.items():
        lv = _bracket_vec_vec(P, a.terms, v)
        for i, w in lv.items():
            put(i, j, w)
    ac = _bracket_vec_vec(P, a.terms, c.terms)
    for i, v in ac.items():
        mv = _bracket_vec_vec(P, b.terms, v)
        for j, w in mv.items():
            put(i, j, w, LevelScalar.of(-sign))
    ab = _bracket_vec_vec(P, a.terms, b.terms)
    for i, v in ab.items():
        nv = _bracket_vec_vec(P, v, c.terms)
        for j, w in nv.items():
            # nu^j with nu = lambda + mu
            for l in range(j + 1):
                put(i + l, j - l, w, LevelScalar.of(-_binom(j, l)))
    return {ij: State(P, v) for ij, v in acc.items() if v}


def sample_state(P: Presentation, rng, max_factors=2, max_deriv=1, scalars=(1, 2, -1)):
    """A random nonzero monomial state with small integer coefficient (seeded)."""
    gens = [g.name for g in P.gens if not g.is_exp()]
    for _ in range(100):
        st = P.vacuum()
        for _ in range(rng.randint(1, max_factors)):
            g = gens[rng.randrange(len(gens))]
            st = nprod(derive(P.gen_state(g), rng.randint(0, max_deriv)), st)
        if not st.is_zero():
            return st * LevelScalar.of(scalars[rng.randrange(len(scalars))])
    raise EngineError(f"could not sample a nonzero state in {P.label}")


def wick_consistency_defect(a: State, b: State, c: State) -> LambdaPoly:
    """[a_l :bc:] minus the same bracket after rewriting :bc: by quasi-commutativity."""
    P = a.pres
    pb, pc = b.parity(), c.parity()
    sign = -1 if (pb and pc) else 1
    lp = _bracket_vec_vec(P, b.terms, c.terms)
    integral = {}
    for j, v in lp.items():
        _vadd(integral, _derive_vec(P, v, j + 1), Fraction((-1) ** j, j + 1))
    rewritten = sign * nprod(c, b) + State(P, integral)
    return bracket(a, nprod(b, c)) - bracket(a, rewritten)


# ---------------------------------------------------------------------------
# expression trees, parsing and printing


def normalize(P: Presentation, tree) -> State:
    """Evaluate an expression tree to a canonical State."""
    kind = tree[0]
    if kind == "gen":
        return P.state(tree[1])
    if kind == "num":
        return State(P, {((), None): LevelScalar.of(tree[1])})
    if kind == "add":
        return normalize(P, tree[1]) + normalize(P, tree[2])
    if kind == "sub":
        return normalize(P, tree[1]) - normalize(P, tree[2])
    if kind == "neg":
        return -normalize(P, tree[1])
    if kind == "smul":
        return normalize(P, tree[2]) * tree[1]
    if kind == "D":
        return derive(normalize(P, tree[1]), tree[2])
    if kind == "nord":
        return nprod(normalize(P, tree[1]), normalize(P, tree[2]))
    if kind == "exp":
        return P.exp_state(tree[1])
    raise EngineError(f"bad expression node {kind!r}")


class _Tokens:
    def __init__(self, P, text):
        self.text = text
        self.toks = []
        names = sorted(list(P.index) + list(P.aliases)
                       + [P.gens[i].name for i in P.lattice], key=len, reverse=True)
        pos = 0
        n = len(text)
        while pos < n:
            ch = text[pos]
            if ch.isspace():
                pos += 1
                continue
            if ch.isdigit():
                q = pos
                while q < n and text[q].isdigit():
                    q += 1
                self.toks.append(("num", text[pos:q], pos))
                pos = q
                continue
            matched = None
            for name in names:
                if text.startswith(name, pos):
                    matched = name
                    break
            if matched and (matched not in ("D", "exp")):
                self.toks.append(("ident", matched, pos))
                pos += len(matched)
                continue
            if text.startswith("D(", pos):
                self.toks.append(("D(", "D(", pos))
                pos += 2
                continue
            if text.startswith("exp(", pos):
                self.toks.append(("exp(", "exp(", pos))
                pos += 4
                continue
            if ch == "k":
                self.toks.append(("k", "k", pos))
                pos += 1
                continue
            if ch in "()+-*/:,":
                self.toks.append((ch, ch, pos))
                pos += 1
                continue
            if ch.isalpha() or ch == "_":
                q = pos
                while q < n and (text[q].isalnum() or text[q] == "_"):
                    q += 1
                self.toks.append(("ident", text[pos:q], pos))
                pos = q
                continue
            raise ParseError(f"unexpected character {ch!r} at column {pos + 1}")
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None, len(self.text))

    def take(self):
        t = self.peek()
        self.pos += 1
        return t

    def expect(self, kind):
        t = self.take()
        if t[0] != kind:
            raise ParseError(f"expected {kind!r} at column {t[2] + 1}, found {t[1]!r}")
        return t


def parse(P: Presentation, text: str):
    """Parse expression text over presentation P into an expression tree."""
    tk = _Tokens(P, text)
    tree = _parse_sum(P, tk)
    if tk.peek()[0] is not None:
        t = tk.peek()
        raise ParseError(f"trailing input {t[1]!r} at column {t[2] + 1}")
    return tree


def parse_state(P: Presentation, text: str) -> State:
    return normalize(P, parse(P, text))


Presentation.parse_state = lambda self, text: parse_state(self, text)


def _parse_sum(P, tk):
    neg = False
    if tk.peek()[0] == "-":
        tk.take()
        neg = True
    node = _parse_prod(P, tk)
    if neg:
        node = ("neg", node)
    while tk.peek()[0] in ("+", "-"):
        op = tk.take()[0]
        rhs = _parse_prod(P, tk)
        node = ("add" if op == "+" else "sub", node, rhs)
    return node


def _parse_prod(P, tk):
    save = tk.pos
    sc = _try_scalar(P, tk)
    if sc is not None:
        nxt = tk.peek()[0]
        if nxt == "*":
            tk.take()
            atom = _parse_atom(P, tk)
            return ("smul", sc, atom)
        if nxt in (None, "+", "-", ")", ",", ":"):
            return ("num", sc)
        tk.pos = save
    return _parse_atom(P, tk)


def _try_scalar(P, tk):
    """Greedy scalar sub-parse; returns None (with position restored) on failure."""
    save = tk.pos

    def atom():
        t = tk.peek()
        if t[0] == "(":
            tk.take()
            v = expr()
            if tk.peek()[0] != ")":
                raise ParseError("")
            tk.take()
            return v
        if t[0] == "-":
            tk.take()
            return -atom()
        if t[0] == "k":
            tk.take()
            return parse_scalar("k")
        if t[0] == "num":
            tk.take()
            return LevelScalar.of(int(t[1]))
        raise ParseError("")

    def factor():
        v = atom()
        while tk.peek()[0] in ("*", "/"):
            mark = tk.pos
            op = tk.take()[0]
            try:
                w = atom()
            except ParseError:
                tk.pos = mark
                break
            v = v * w if op == "*" else v / w
        return v

    def expr():
        v = factor()
        while tk.peek()[0] in ("+", "-"):
            mark = tk.pos
            op = tk.take()[0]
            try:
                w = factor()
            except ParseError:
                tk.pos = mark
                break
            v = v + w if op == "+" else v - w
        return v

    # top-level scalars in a product are factors; scalar sums need parentheses
    # (which atom() handles), otherwise "1 + 2*J" would swallow the sum
    try:
        return factor()
    except (ParseError, ScalarError):
        tk.pos = save
        return None


def _parse_atom(P, tk):
    t = tk.peek()
    if t[0] == "ident":
        tk.take()
        if t[1] not in P.index and t[1] not in P.aliases:
            raise ParseError(f"unknown identifier {t[1]!r} at column {t[2] + 1}")
        return ("gen", t[1])
    if t[0] == "D(":
        tk.take()
        inner = _parse_sum(P, tk)
        tk.expect(",")
        num = tk.expect("num")
        tk.expect(")")
        return ("D", inner, int(num[1]))
    if t[0] == ":":
        tk.take()
        a = _parse_atom(P, tk)
        b = _parse_atom(P, tk)
        tk.expect(":")
        return ("nord", a, b)
    if t[0] == "exp(":
        tk.take()
        vec = _parse_latvec(P, tk)
        tk.expect(")")
        return ("exp", vec)
    if t[0] == "(":
        tk.take()
        node = _parse_sum(P, tk)
        tk.expect(")")
        return node
    raise ParseError(f"unexpected token {t[1]!r} at column {t[2] + 1}")


def _parse_latvec(P, tk):
    if not P.lattice:
        raise ParseError(f"presentation {P.label} has no lattice basis")
    coeffs = [LevelScalar.of(0)] * len(P.lattice)
    names = {P.gens[gi].name: pos for pos, gi in enumerate(P.lattice)}
    sign = 1
    if tk.peek()[0] == "-":
        tk.take()
        sign = -1
    while True:
        save = tk.pos
        sc = _try_scalar(P, tk)
        if sc is not None and tk.peek()[0] == "*":
            tk.take()
        elif sc is not None and tk.peek()[0] == "ident":
            # e.g. "2c" is not allowed; scalars must be followed by '*'
            tk.pos = save
            sc = None
        elif sc is not None:
            raise ParseError("lattice vector term must mention a basis generator")
        t = tk.expect("ident")
        if t[1] not in names:
            raise ParseError(f"{t[1]!r} is not a lattice basis generator")
        c = sc if sc is not None else LevelScalar.of(1)
        pos = names[t[1]]
        coeffs[pos] = coeffs[pos] + c * sign
        nxt = tk.peek()[0]
        if nxt in ("+", "-"):
            sign = 1 if tk.take()[0] == "+" else -1
            continue
        break
    return tuple(coeffs)


# -- printing ----------------------------------------------------------------


def _vec_text(P, vec):
    bits = []
    for pos, c in enumerate(vec):
        if c.is_zero():
            continue
        name = P.gens[P.lattice[pos]].name
        if c == LevelScalar.of(1):
            term = name
        elif c == LevelScalar.of(-1):
            term = f"-1*{name}"
        else:
            term = f"{_scalar_factor_text(c)}*{name}"
        bits.append(term)
    return "+".join(bits).replace("+-", "-") if bits else "0"


def _scalar_factor_text(c):
    s = c.text()
    if s.startswith("-") or "+" in s or " " in s or "/" in s:
        return f"({s})"
    return s


def _factor_text(P, f):
    gi, d = f
    name = P.gens[gi].name
    return name if d == 0 else f"D({name},{d})"


def _term_body_text(P, tkey):
    factors, vec = tkey
    atoms = [_factor_text(P, f) for f in factors]
    if vec is not None:
        atoms.append(f"exp({_vec_text(P, vec)})")
    if not atoms:
        return "1"
    body = atoms[-1]
    for a in reversed(atoms[:-1]):
        body = f":{a} {body}:"
    return body


def to_text(x: State) -> str:
    """Canonical text form; parse(to_text(x)) normalizes back to x."""
    if x.is_zero():
        return "0"
    P = x.pres
    bits = []
    for tkey, c in x.sorted_terms():
        body = _term_body_text(P, tkey)
        if body == "1":
            piece = _scalar_factor_text(c) if not c == _ONE else "1"
            if c == LevelScalar.of(-1):
                piece = "-1"
        elif c == _ONE:
            piece = body
        elif c == LevelScalar.of(-1):
            piece = f"-{body}"
        else:
            piece = f"{_scalar_factor_text(c)}*{body}"
        bits.append(piece)
    out = bits[0]
    for b in bits[1:]:
        out += f" - {b[1:]}" if b.startswith("-") else f" + {b}"
    return out
