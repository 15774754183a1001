"""Polynomial differential forms with exact rational coefficients.

One representation serves two ambients:

* forms on the standard n-simplex, with the barycentric relations
  t0 = 1 - sum(t_i), dt0 = -sum(dt_i) eliminated at construction so that
  equality is literal coefficient equality;
* forms on R^m with coordinates x_1..x_m (used by connection forms).

A form is a dict {(exps, dts): Fraction} where ``exps`` is a tuple of
exponents (one per variable, 0-based) and ``dts`` a strictly increasing
tuple of 0-based variable indices.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import factorial

from .scalars import rat, rat_str


def _merge_dts(d1, d2):
    """Concatenate-and-sort two dt index tuples; (None, 0) if repeated."""
    if not d1:
        return d2, 1
    if not d2:
        return d1, 1
    if set(d1) & set(d2):
        return None, 0
    merged = d1 + d2
    sign = 1
    # count inversions between the blocks (all dt's have degree 1)
    for a in d1:
        for b in d2:
            if a > b:
                sign = -sign
    return tuple(sorted(merged)), sign


class PolyForm:
    """Immutable polynomial differential form on a fixed variable set.

    ``ndiff`` limits which leading variables carry differentials; trailing
    variables beyond it are formal constants (discrete parameters), so d
    ignores them and no dx exists for them.
    """

    __slots__ = ("nvars", "terms", "varname", "ndiff")

    def __init__(self, nvars, terms=None, varname="t", ndiff=None):
        self.nvars = nvars
        self.varname = varname
        self.ndiff = nvars if ndiff is None else ndiff
        clean = {}
        if terms:
            for (exps, dts), c in terms.items():
                if any(j >= self.ndiff for j in dts):
                    raise ValueError("differential on a non-smooth variable")
                c = rat(c)
                if c:
                    clean[(tuple(exps), tuple(dts))] = clean.get((tuple(exps), tuple(dts)), Fraction(0)) + c
        self.terms = {k: v for k, v in clean.items() if v}

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, nvars, varname="t", ndiff=None):
        return cls(nvars, {}, varname, ndiff)

    @classmethod
    def const(cls, nvars, c, varname="t", ndiff=None):
        c = rat(c)
        if not c:
            return cls.zero(nvars, varname, ndiff)
        return cls(nvars, {((0,) * nvars, ()): c}, varname, ndiff)

    @classmethod
    def one(cls, nvars, varname="t", ndiff=None):
        return cls.const(nvars, 1, varname, ndiff)

    @classmethod
    def var(cls, nvars, j, varname="t", ndiff=None):
        exps = [0] * nvars
        exps[j] = 1
        return cls(nvars, {(tuple(exps), ()): Fraction(1)}, varname, ndiff)

    @classmethod
    def dvar(cls, nvars, j, varname="t", ndiff=None):
        return cls(nvars, {((0,) * nvars, (j,)): Fraction(1)}, varname, ndiff)

    # -- basic structure ----------------------------------------------
    def is_zero(self):
        return not self.terms

    def homogeneous_degree(self):
        """Form degree if homogeneous, else None; zero counts as any."""
        degs = {len(dts) for _, dts in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            return None
        return degs.pop()

    def component(self, degree):
        return PolyForm(self.nvars,
                        {k: v for k, v in self.terms.items() if len(k[1]) == degree},
                        self.varname, self.ndiff)

    def max_poly_degree(self):
        return max((sum(e) for e, _ in self.terms), default=0)

    def __eq__(self, other):
        return (isinstance(other, PolyForm) and self.nvars == other.nvars
                and self.ndiff == other.ndiff and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, self.ndiff, frozenset(self.terms.items())))

    def __add__(self, other):
        if self.nvars != other.nvars:
            raise ValueError("PolyForm: mixed ambients")
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k, Fraction(0)) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return PolyForm(self.nvars, out, self.varname, self.ndiff)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        c = rat(c)
        if not c:
            return PolyForm.zero(self.nvars, self.varname, self.ndiff)
        return PolyForm(self.nvars, {k: c * v for k, v in self.terms.items()},
                        self.varname, self.ndiff)

    def wedge(self, other):
        if self.nvars != other.nvars:
            raise ValueError("PolyForm: mixed ambients")
        out = {}
        for (e1, d1), c1 in self.terms.items():
            for (e2, d2), c2 in other.terms.items():
                dts, sign = _merge_dts(d1, d2)
                if dts is None:
                    continue
                exps = tuple(a + b for a, b in zip(e1, e2))
                key = (exps, dts)
                s = out.get(key, Fraction(0)) + sign * c1 * c2
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return PolyForm(self.nvars, out, self.varname, self.ndiff)

    def d(self):
        out = {}
        for (exps, dts), c in self.terms.items():
            for j in range(self.ndiff):
                if exps[j] == 0:
                    continue
                dnew, sign = _merge_dts((j,), dts)
                if dnew is None:
                    continue
                e = list(exps)
                e[j] -= 1
                key = (tuple(e), dnew)
                s = out.get(key, Fraction(0)) + sign * c * exps[j]
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return PolyForm(self.nvars, out, self.varname, self.ndiff)

    def substitute(self, images):
        """Pull back along x_j -> images[j] (PolyForms of degree 0).

        dx_j maps to d(images[j]) computed in the target ambient.  All
        images must share one ambient.
        """
        if len(images) != self.nvars:
            raise ValueError("substitute: need one image per variable")
        if images:
            tgt_nvars = images[0].nvars
            tgt_name = images[0].varname
            tgt_ndiff = images[0].ndiff
        else:
            tgt_nvars, tgt_name, tgt_ndiff = 0, self.varname, None
        out = PolyForm.zero(tgt_nvars, tgt_name, tgt_ndiff)
        dimages = [im.d() for im in images]
        for (exps, dts), c in self.terms.items():
            acc = PolyForm.const(tgt_nvars, c, tgt_name, tgt_ndiff)
            for j, e in enumerate(exps):
                for _ in range(e):
                    acc = acc.wedge(images[j])
            for j in dts:
                acc = acc.wedge(dimages[j])
            out = out + acc
        return out

    def partial(self, j):
        out = {}
        for (exps, dts), c in self.terms.items():
            if exps[j] == 0:
                continue
            e = list(exps)
            e[j] -= 1
            out[(tuple(e), dts)] = out.get((tuple(e), dts), Fraction(0)) + c * exps[j]
        return PolyForm(self.nvars, out, self.varname, self.ndiff)

    def eval_at(self, point):
        """Evaluate the degree-0 part at a rational point."""
        val = Fraction(0)
        for (exps, dts), c in self.terms.items():
            if dts:
                continue
            term = c
            for j, e in enumerate(exps):
                term *= rat(point[j]) ** e
            val += term
        return val

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for (exps, dts), c in sorted(self.terms.items()):
            factors = [rat_str(c)]
            for j, e in enumerate(exps):
                if e:
                    factors.append("%s%d%s" % (self.varname, j + 1, "^%d" % e if e > 1 else ""))
            for j in dts:
                factors.append("d%s%d" % (self.varname, j + 1))
            bits.append("*".join(factors))
        return " + ".join(bits)

    # -- JSON ----------------------------------------------------------
    def to_json(self):
        return [{"coeff": rat_str(c), "exps": list(exps), "dts": [j + 1 for j in dts]}
                for (exps, dts), c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, nvars, data, varname="t"):
        terms = {}
        for item in data:
            key = (tuple(item["exps"]), tuple(j - 1 for j in item["dts"]))
            terms[key] = terms.get(key, Fraction(0)) + rat(item["coeff"])
        return cls(nvars, terms, varname)


# ---------------------------------------------------------------------
# simplex flavor: forms on the standard n-simplex in eliminated
# coordinates t_1..t_n (t_0 and dt_0 substituted away).
# ---------------------------------------------------------------------

def simplex_t(n, i):
    """The barycentric coordinate t_i on the n-simplex, 0 <= i <= n."""
    if not 0 <= i <= n:
        raise ValueError("simplex_t: index out of range")
    if i == 0:
        out = PolyForm.one(n)
        for j in range(n):
            out = out - PolyForm.var(n, j)
        return out
    return PolyForm.var(n, i - 1)


def simplex_dt(n, i):
    if not 0 <= i <= n:
        raise ValueError("simplex_dt: index out of range")
    if i == 0:
        out = PolyForm.zero(n)
        for j in range(n):
            out = out - PolyForm.dvar(n, j)
        return out
    return PolyForm.dvar(n, i - 1)


class SimplicialOperator:
    """A monotone map [n] -> [m], acting on forms by geometric pullback."""

    def __init__(self, source_dim, target_dim, images):
        self.n = source_dim
        self.m = target_dim
        self.images = tuple(images)
        if len(self.images) != source_dim + 1:
            raise ValueError("SimplicialOperator: need n+1 images")
        if any(self.images[i] > self.images[i + 1] for i in range(source_dim)):
            raise ValueError("SimplicialOperator: not monotone")
        if any(not 0 <= v <= target_dim for v in self.images):
            raise ValueError("SimplicialOperator: image out of range")

    @classmethod
    def coface(cls, n, i):
        """d^i: [n] -> [n+1], skipping i."""
        return cls(n, n + 1, [j if j < i else j + 1 for j in range(n + 1)])

    @classmethod
    def codegeneracy(cls, n, i):
        """s^i: [n+1] -> [n], hitting i twice."""
        return cls(n + 1, n, [j if j <= i else j - 1 for j in range(n + 2)])

    @classmethod
    def inclusion(cls, subset, m):
        subset = tuple(subset)
        return cls(len(subset) - 1, m, subset)

    def compose(self, inner):
        """self o inner, with inner: [k] -> [n]."""
        if inner.m != self.n:
            raise ValueError("compose: dimension mismatch")
        return SimplicialOperator(inner.n, self.m,
                                  [self.images[v] for v in inner.images])

    def is_injective(self):
        return len(set(self.images)) == len(self.images)

    def pullback(self, form: PolyForm) -> PolyForm:
        """Pull a form on the target simplex back to the source simplex."""
        if form.nvars != self.m:
            raise ValueError("pullback: form lives on the wrong simplex")
        if self.m == 0:
            # forms on the point are constants; extend constantly
            return PolyForm.const(self.n, form.eval_at(()))
        images = []
        for j in range(1, self.m + 1):
            acc = PolyForm.zero(self.n)
            for i in range(self.n + 1):
                if self.images[i] == j:
                    acc = acc + simplex_t(self.n, i)
            images.append(acc)
        return form.substitute(images)

    def __repr__(self):
        return "[%d]->[%d]:%s" % (self.n, self.m, list(self.images))


def integrate_over_simplex(form: PolyForm, p: int) -> Fraction:
    """Exact integral of a top-degree form over the geometric p-simplex.

    Uses the factorial formula termwise; non-top components integrate
    to 0 by convention.
    """
    if form.nvars != p:
        raise ValueError("integrate_over_simplex: form is not on the p-simplex")
    if p == 0:
        return form.eval_at(())
    total = Fraction(0)
    full = tuple(range(p))
    for (exps, dts), c in form.terms.items():
        if dts != full:
            continue
        num = 1
        for e in exps:
            num *= factorial(e)
        total += c * Fraction(num, factorial(sum(exps) + p))
    return total


def simplex_monomials(n, max_poly_deg, form_degree=None):
    """Spanning monomial forms t^E dt_S on the n-simplex (eliminated coords)."""
    out = []
    for total in range(max_poly_deg + 1):
        for exps in itertools.product(range(total + 1), repeat=n):
            if sum(exps) != total:
                continue
            for r in range(n + 1):
                if form_degree is not None and r != form_degree:
                    continue
                for dts in itertools.combinations(range(n), r):
                    out.append(PolyForm(n, {(exps, dts): Fraction(1)}))
    return out
