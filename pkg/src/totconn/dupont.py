"""The simplicial contraction from polynomial forms onto elementary forms.

Provides the three maps E (elementary-form extension), Int (integration
over sub-simplices) and s (the simplicial homotopy operator built from
radial contractions toward vertices), together with verifiers for the
side conditions

    Int o E = Id,   Int o s = s o E = s o s = 0,   ds + sd = E Int - Id,

Stokes compatibility and simplicial naturality.  All arithmetic is exact.
"""

from __future__ import annotations

import functools
import itertools
from fractions import Fraction

from .forms import (PolyForm, SimplicialOperator, integrate_over_simplex,
                    simplex_dt, simplex_monomials, simplex_t)
from .scalars import rat, rat_str


def index_strings(n, size):
    """Strictly increasing tuples of the given size inside {0..n}."""
    return list(itertools.combinations(range(n + 1), size))


class NCElement:
    """Element of the elementary-forms cochain space on the n-simplex.

    Stored as {I: coefficient} over strictly increasing index tuples
    I in {0..n}; the basis element indexed by I has degree |I| - 1.
    """

    __slots__ = ("n", "coeffs")

    def __init__(self, n, coeffs=None):
        self.n = n
        clean = {}
        if coeffs:
            for I, c in coeffs.items():
                I = tuple(I)
                if list(I) != sorted(set(I)):
                    raise ValueError("NCElement: index set not strictly increasing")
                if I and not (0 <= I[0] and I[-1] <= n):
                    raise ValueError("NCElement: index out of range")
                c = rat(c)
                if c:
                    clean[I] = clean.get(I, Fraction(0)) + c
        self.coeffs = {k: v for k, v in clean.items() if v}

    @classmethod
    def basis(cls, n, I):
        return cls(n, {tuple(I): Fraction(1)})

    @classmethod
    def zero(cls, n):
        return cls(n, {})

    @classmethod
    def unit(cls, n):
        return cls(n, {(i,): Fraction(1) for i in range(n + 1)})

    def is_zero(self):
        return not self.coeffs

    def homogeneous_degree(self):
        degs = {len(I) - 1 for I in self.coeffs}
        if len(degs) == 1:
            return degs.pop()
        return None

    def component(self, degree):
        return NCElement(self.n, {I: c for I, c in self.coeffs.items()
                                  if len(I) - 1 == degree})

    def __add__(self, other):
        if self.n != other.n:
            raise ValueError("NCElement: mixed simplices")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            s = out.get(k, Fraction(0)) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return NCElement(self.n, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        c = rat(c)
        return NCElement(self.n, {k: c * v for k, v in self.coeffs.items()} if c else {})

    def __eq__(self, other):
        return isinstance(other, NCElement) and self.n == other.n and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.n, frozenset(self.coeffs.items())))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join("%s*L%s" % (rat_str(c), "".join(map(str, I)))
                          for I, c in sorted(self.coeffs.items()))


@functools.lru_cache(maxsize=None)
def elementary_form(I, n) -> PolyForm:
    """The degree-p elementary form w_I = p! sum_j (-1)^j t_{i_j} dt_{...}."""
    I = tuple(I)
    if not I or list(I) != sorted(set(I)) or I[0] < 0 or I[-1] > n:
        raise ValueError("elementary_form: invalid index set")
    p = len(I) - 1
    out = PolyForm.zero(n)
    for j in range(p + 1):
        term = simplex_t(n, I[j])
        for k in range(p + 1):
            if k == j:
                continue
            term = term.wedge(simplex_dt(n, I[k]))
        if j % 2:
            term = term.scale(-1)
        out = out + term
    fact = 1
    for k in range(2, p + 1):
        fact *= k
    return out.scale(fact)


def dupont_E(lam: NCElement) -> PolyForm:
    out = PolyForm.zero(lam.n)
    for I, c in lam.coeffs.items():
        out = out + elementary_form(I, lam.n).scale(c)
    return out


def dupont_Int(form: PolyForm, n: int) -> NCElement:
    """Integrate pullbacks over all sub-simplices of the n-simplex."""
    if form.nvars != n:
        raise ValueError("dupont_Int: form is not on the n-simplex")
    coeffs = {}
    for size in range(1, n + 2):
        p = size - 1
        comp = form.component(p)
        if comp.is_zero():
            continue
        for I in index_strings(n, size):
            pulled = SimplicialOperator.inclusion(I, n).pullback(comp)
            val = integrate_over_simplex(pulled, p)
            if val:
                coeffs[I] = val
    return NCElement(n, coeffs)


# ---------------------------------------------------------------------
# the homotopy operator
# ---------------------------------------------------------------------

def _expand_phi_terms(form: PolyForm, i: int):
    """Expansion of phi_i^*(form) as {(uexp, has_du): PolyForm}.

    Work in full barycentric coordinates: write the form over monomials in
    t_0..t_n and dt_0..dt_n is unnecessary -- the eliminated coordinates
    t_1..t_n transform as t_k -> u t_k + (1-u) delta_ik, which stays inside
    the eliminated chart.
    """
    n = form.nvars
    buckets = {}

    def emit(uexp, has_du, exps, dts, c):
        key = (uexp, has_du)
        d = buckets.setdefault(key, {})
        tk = (tuple(exps), tuple(dts))
        s = d.get(tk, Fraction(0)) + c
        if s:
            d[tk] = s
        else:
            d.pop(tk, None)

    for (exps, dts), c in form.terms.items():
        # polynomial factor
        poly_parts = [((0,) * n, 0, Fraction(1))]  # (exps, uexp, coeff)
        for j in range(n):
            e = exps[j]
            if e == 0:
                continue
            new_parts = []
            # t_{j+1} -> u t_{j+1} + (1-u) delta_{i,j+1}
            if i == j + 1:
                # (u t + 1 - u)^e -- expand binomially in (u t) and (1-u)
                for a in range(e + 1):
                    from math import comb
                    coeff = comb(e, a)
                    # (u t)^a (1-u)^{e-a}; expand (1-u)^{e-a}
                    for b in range(e - a + 1):
                        cb = comb(e - a, b) * ((-1) ** b)
                        for pexps, pu, pc in poly_parts:
                            ne = list(pexps)
                            ne[j] += a
                            new_parts.append((tuple(ne), pu + a + b, pc * coeff * cb))
            else:
                for pexps, pu, pc in poly_parts:
                    ne = list(pexps)
                    ne[j] += e
                    new_parts.append((tuple(ne), pu + e, pc))
            poly_parts = new_parts
        # dt factor: product over j in dts of (u dt_j + (t_j - delta) du)
        dt_parts = [((), False, (0,) * n, 0, Fraction(1))]
        # entries: (dts_so_far, has_du, extra_exps, extra_uexp, coeff)
        for j in dts:
            new_parts = []
            for (pd, pdu, pe, pu, pc) in dt_parts:
                # option A: u dt_{j+1}; the new dt only passes the larger
                # dt indices already collected (du stays leftmost)
                if j not in pd:
                    sign = 1
                    for b in pd:
                        if b > j:
                            sign = -sign
                    new_parts.append((tuple(sorted(pd + (j,))), pdu, pe, pu + 1,
                                      pc * sign))
                # option B: (t_j - delta_{i,j+1}) du
                if not pdu:
                    sign = 1
                    for b in pd:
                        sign = -sign  # du passes over every existing dt
                    ne = list(pe)
                    ne[j] += 1
                    new_parts.append((pd, True, tuple(ne), pu, pc * sign))
                    if i == j + 1:
                        new_parts.append((pd, True, pe, pu, pc * sign * Fraction(-1)))
            dt_parts = new_parts
        for pexps, pu, pc in poly_parts:
            for (qd, qdu, qe, qu, qc) in dt_parts:
                exps_total = tuple(a + b for a, b in zip(pexps, qe))
                emit(pu + qu, qdu, exps_total, qd, c * pc * qc)

    return {key: PolyForm(n, terms) for key, terms in buckets.items() if terms}


@functools.lru_cache(maxsize=200000)
def h_operator(form: PolyForm, i: int) -> PolyForm:
    """h^i = (integration along u in [0,1]) o phi_i^*.

    Keeps the du-component of the pulled-back form and integrates its
    polynomial u-dependence exactly.  The fiber orientation is pinned by
    the side conditions: with du collected leftmost, the integral carries
    a global minus sign (the other orientation breaks ds + sd = E Int - Id
    on the monomial spanning set).
    """
    n = form.nvars
    out = PolyForm.zero(n)
    for (uexp, has_du), part in _expand_phi_terms(form, i).items():
        if not has_du:
            continue
        out = out + part.scale(Fraction(-1, uexp + 1))
    return out


def dupont_s(form: PolyForm, n: int) -> PolyForm:
    """The simplicial homotopy operator.

    s(w) = sum over j and strings i_0 < ... < i_j of
    w_{i_0..i_j} wedge h^{i_j} ... h^{i_0}(w), with j below deg(w).
    """
    if form.nvars != n:
        raise ValueError("dupont_s: form is not on the n-simplex")
    out = PolyForm.zero(n)
    for p in sorted({len(key[1]) for key in form.terms}):
        comp = form.component(p)
        # h-composites along ascending strings share prefixes; walk them
        # depth-first so each h application happens once
        stack = [((), comp)]
        while stack:
            I, inner = stack.pop()
            if I:
                out = out + elementary_form(I, n).wedge(inner)
            if len(I) >= p:
                continue
            lo = I[-1] + 1 if I else 0
            for idx in range(lo, n + 1):
                nxt = h_operator(inner, idx)
                if not nxt.is_zero():
                    stack.append((I + (idx,), nxt))
    return out


def nc_differential(lam: NCElement) -> NCElement:
    """Differential transported through the contraction: Int o d o E."""
    return dupont_Int(dupont_E(lam).d(), lam.n)


def nc_simplicial_action(theta: SimplicialOperator, lam: NCElement) -> NCElement:
    """Action of a monotone map [q] -> [n] on elementary cochains.

    theta_* lambda_I = sum of lambda_K over K in {0..q} mapped bijectively
    onto I by theta.
    """
    if theta.m != lam.n:
        raise ValueError("nc_simplicial_action: dimension mismatch")
    q = theta.n
    out = {}
    for I, c in lam.coeffs.items():
        size = len(I)
        for K in itertools.combinations(range(q + 1), size):
            if tuple(theta.images[k] for k in K) == I:
                out[K] = out.get(K, Fraction(0)) + c
    return NCElement(q, out)


# ---------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------

def nc_basis(n):
    out = []
    for size in range(1, n + 2):
        for I in index_strings(n, size):
            out.append(NCElement.basis(n, I))
    return out


def verify_side_conditions(n, max_poly_deg=4, corrupt=False):
    """Check the contraction identities on a spanning set; returns a report.

    ``corrupt`` injects a deliberate error (test hook for the CLI).
    """
    failures = []
    span = simplex_monomials(n, max_poly_deg)

    for lam in nc_basis(n):
        got = dupont_Int(dupont_E(lam), n)
        if corrupt:
            got = got + NCElement.basis(n, (0,))
        if got != lam:
            failures.append(("Int(E(lambda)) != lambda", n, repr(lam)))
        sE = dupont_s(dupont_E(lam), n)
        if not sE.is_zero():
            failures.append(("s(E(lambda)) != 0", n, repr(lam)))

    for w in span:
        sw = dupont_s(w, n)
        if not dupont_Int(sw, n).is_zero():
            failures.append(("Int(s(w)) != 0", n, repr(w)))
        if not dupont_s(sw, n).is_zero():
            failures.append(("s(s(w)) != 0", n, repr(w)))
        lhs = sw.d() + dupont_s(w.d(), n)
        rhs = dupont_E(dupont_Int(w, n)) - w
        if lhs != rhs:
            failures.append(("d s + s d != E Int - Id", n, repr(w)))
    return failures


def verify_stokes(n, max_poly_deg=4):
    """Int(dw)(sigma_I) = alternating sum over deleted indices, termwise."""
    failures = []
    for w in simplex_monomials(n, max_poly_deg):
        left = dupont_Int(w.d(), n)
        for size in range(2, n + 2):
            for I in index_strings(n, size):
                lhs = left.coeffs.get(I, Fraction(0))
                rhs = Fraction(0)
                val = dupont_Int(w, n)
                for j in range(size):
                    J = I[:j] + I[j + 1:]
                    rhs += (-1) ** j * val.coeffs.get(J, Fraction(0))
                if lhs != rhs:
                    failures.append(("stokes", n, repr(w), I))
    return failures


def verify_naturality(n, max_poly_deg=3):
    """E, Int and s commute with the cofaces into and the codegeneracies
    out of dimension n (so every form involved lives on a simplex of
    dimension at most n)."""
    failures = []
    ops = [SimplicialOperator.coface(n - 1, i) for i in range(n + 1)] if n >= 1 else []
    ops += [SimplicialOperator.codegeneracy(n - 1, i) for i in range(n)] if n >= 1 else []
    for theta in ops:
        for lam in nc_basis(theta.m):
            lhs = theta.pullback(dupont_E(lam))
            rhs = dupont_E(nc_simplicial_action(theta, lam))
            if lhs != rhs:
                failures.append(("E naturality", repr(theta), repr(lam)))
        for w in simplex_monomials(theta.m, max_poly_deg):
            lhs = nc_simplicial_action(theta, dupont_Int(w, theta.m))
            rhs = dupont_Int(theta.pullback(w), theta.n)
            if lhs != rhs:
                failures.append(("Int naturality", repr(theta), repr(w)))
        for w in simplex_monomials(theta.m, max_poly_deg):
            lhs = theta.pullback(dupont_s(w, theta.m))
            rhs = dupont_s(theta.pullback(w), theta.n)
            if lhs != rhs:
                failures.append(("s naturality", repr(theta), repr(w)))
    return failures
