"""Matrix Segal-Sugawara vectors from supertrace powers of d + E.

The element d + E lives in End(C^{m|n}) tensor U(negative loop modes + d);
entries are sums of mode words e_{ij,(-r)} with a right d-power.  The product
uses the Koszul sign rule across the matrix factor, and d is commuted to the
right with [d, u_(-r)] = r u_(-r-1).  Supertrace coefficients of d^{p-q} give
the vectors s_{p,q}, projected into the affine vertex superalgebra by letting
the mode word act on the vacuum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .engine import LambdaPoly, State, bracket, derive, nprod
from .presentations import build, build_V_gl

_F0 = Fraction(0)
_F1 = Fraction(1)


def _par(i, m):
    return 0 if i <= m else 1


def _word_parity(word, m):
    p = 0
    for (i, j, _r) in word:
        p ^= _par(i, m) ^ _par(j, m)
    return p


def _rising(r, j):
    acc = 1
    for t in range(j):
        acc *= r + t
    return acc


def _binomial(d, j):
    acc = 1
    for t in range(j):
        acc = acc * (d - t) // (t + 1)
    return acc


def _push_d(d, word):
    """Rewrite d^d * word as sum of word' * d^{d'} (d commuted to the right)."""
    if d == 0 or not word:
        return {(word, d): _F1}
    (i, j, r), rest = word[0], word[1:]
    out = {}
    for jj in range(d + 1):
        c = Fraction(_binomial(d, jj) * _rising(r, jj))
        if not c:
            continue
        for (w2, d2), c2 in _push_d(d - jj, rest).items():
            key = (((i, j, r + jj),) + w2, d2)
            out[key] = out.get(key, _F0) + c * c2
    return {k: c for k, c in out.items() if c}


def _emul(e1, e2):
    """Product in U(negative modes + d); words concatenate, d pushes right."""
    out = {}
    for (w1, d1), c1 in e1.items():
        for (w2, d2), c2 in e2.items():
            for (wm, dm), cm in _push_d(d1, w2).items():
                key = (w1 + wm, dm + d2)
                out[key] = out.get(key, _F0) + c1 * c2 * cm
    return {k: c for k, c in out.items() if c}


def _eadd(acc, e, sign=1):
    for key, c in e.items():
        v = acc.get(key, _F0) + sign * c
        if v:
            acc[key] = v
        else:
            acc.pop(key, None)
    return acc


def d_plus_E(m, n):
    """The matrix d + E with entries delta_ij d + (-1)^{p(i)} e_{ij,(-1)}.

    The parity dressing (-1)^{p(i)} absorbs the Koszul sign rule of the
    End(C^{m|n}) factor, after which entries multiply as an ordinary matrix
    product; this is the normalization under which the supertrace coefficients
    are central at the critical level (and str(d+E) = (m-n) d + sum e_ii).
    """
    size = m + n
    M = [[{} for _ in range(size)] for _ in range(size)]
    for i in range(1, size + 1):
        for j in range(1, size + 1):
            sgn = Fraction((-1) ** _par(i, m))
            entry = {(((i, j, 1),), 0): sgn}
            if i == j:
                entry[((), 1)] = _F1
            M[i - 1][j - 1] = entry
    return M


def matmul(A, B, m, n):
    """Entrywise matrix product (Koszul signs are pre-absorbed, see d_plus_E)."""
    size = m + n
    C = [[{} for _ in range(size)] for _ in range(size)]
    for i in range(size):
        for l in range(size):
            acc = {}
            for j in range(size):
                for (w1, d1), c1 in A[i][j].items():
                    prod = _emul({(w1, d1): c1}, B[j][l])
                    _eadd(acc, prod)
            C[i][l] = acc
    return C


def supertrace(M, m, n):
    acc = {}
    for i in range(1, m + n + 1):
        _eadd(acc, M[i - 1][i - 1], sign=(-1) ** _par(i, m))
    return acc


def str_power(p, m, n):
    """Supertrace of (d + E)^p, split as {q: words with d-power p-q}.

    The zeroth power follows the scalar convention str(X^0) = 1."""
    if p == 0:
        return {0: {((), 0): _F1}}
    T = d_plus_E(m, n)
    M = T
    for _ in range(p - 1):
        M = matmul(M, T, m, n)
    tr = supertrace(M, m, n)
    out = {}
    for (w, d), c in tr.items():
        q = p - d
        slot = out.setdefault(q, {})
        slot[(w, 0)] = slot.get((w, 0), _F0) + c
    return out


_PRES_CACHE = {}


def glmn_presentation(m, n, level="generic"):
    """V(gl(m|n)) for the sizes the expansion supports (m+n <= 4)."""
    if m + n > 4 or m < 1 or n < 0:
        raise ValueError(f"unsupported size gl({m}|{n})")
    key = (m, n, str(level))
    got = _PRES_CACHE.get(key)
    if got is None:
        if (m, n) in ((1, 1), (2, 1), (2, 0)):
            got = build(f"V_gl{m}{n}" if n else f"V_gl{m}", level)
        else:
            base_key = (m, n, "generic")
            base = _PRES_CACHE.get(base_key)
            if base is None:
                base = build_V_gl(m, n)
                _PRES_CACHE[base_key] = base
            got = base if level == "generic" else base.at_level(level)
        _PRES_CACHE[key] = got
    return got


def project_word(P, word, coeff):
    """Apply a negative-mode word to the vacuum: e_{ij,(-r)} acts as the
    (-r)-th product of the generator, i.e. d^{r-1}e_ij/(r-1)! normally ordered."""
    st = P.vacuum() * coeff
    for (i, j, r) in reversed(word):
        gen = P.gen_state(f"e{i}{j}")
        if r > 1:
            fact = 1
            for t in range(2, r):
                fact *= t  # (r-1)!
            gen = derive(gen, r - 1) * Fraction(1, fact)
        st = nprod(gen, st)
    return st


def ss_vectors(p, m, n, level="generic"):
    """The Segal-Sugawara states {q: s_{p,q}} inside V(gl(m|n)) at the level."""
    P = glmn_presentation(m, n, level)
    out = {q: P.zero() for q in range(p + 1)}
    for q, words in str_power(p, m, n).items():
        st = P.zero()
        for (w, _d), c in words.items():
            st = st + project_word(P, w, c)
        out[q] = st
    return P, out


@dataclass
class CentralityReport:
    is_central: bool
    witnesses: dict

    def to_json(self):
        return {
            "central": self.is_central,
            "witnesses": {name: repr(lp) for name, lp in self.witnesses.items()},
        }


def check_central(x: State, P=None) -> CentralityReport:
    """x is central iff [g_l x] = 0 for every strong generator g."""
    P = P or x.pres
    witnesses = {}
    for g in P.gens:
        lp = bracket(P.gen_state(g.name), x)
        if not lp.is_zero():
            witnesses[g.name] = lp
    return CentralityReport(not witnesses, witnesses)
