"""Cosimplicial commutative dg-algebras and their normalized total complex.

Two backends share one element model (bidegree-indexed components):

* a polynomial group-cochain backend for the translation action of Z^m
  on R^m, where a level-p component is a polynomial map from p group
  arguments to polynomial forms on R^m and equality is polynomial
  identity;
* a finite presentation (explicit bases, differentials, products, coface
  and codegeneracy matrices per level).

The product of total-complex elements is computed levelwise from the
transferred simplex structures: for inputs of bidegrees (p_i, q_i) the
output lives at level l = sum p_i + 2 - n and equals

  sum over index strings I_1..I_n of
    +/- (top coefficient of m_n^{[l]}(lam_{I_1}, ..., lam_{I_n}))
        (x) sigma_{I_1 *} a_1 ^ ... ^ sigma_{I_n *} a_n,

with the sign (-1)^{sum_{i<j} p_i q_j}.  The closed-form products on
degree-1 elements are implemented independently and tested against this
general formula.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb, factorial

from .forms import PolyForm
from .graded import GradedVectorSpace
from .linalg import Echelon, vec_add
from .scalars import bernoulli, rat, rat_str
from .structures import FiniteAlgebra
from .transfer import nc_structure


class LevelCapError(RuntimeError):
    pass


# ---------------------------------------------------------------------
# backend (b): polynomial group cochains for Z^m acting on R^m
# ---------------------------------------------------------------------

class GroupCochain:
    """Polynomial map (g_1..g_p) -> polynomial q-form on R^m.

    Stored as a PolyForm in m*(p+1) variables: the first m are the point
    coordinates (smooth, with differentials), the following m-blocks are
    the group arguments (formal constants).
    """

    __slots__ = ("m", "p", "form")

    def __init__(self, m, p, form: PolyForm):
        self.m = m
        self.p = p
        if form.nvars != m * (p + 1) or form.ndiff != m:
            raise ValueError("GroupCochain: wrong ambient")
        self.form = form

    @classmethod
    def zero(cls, m, p):
        return cls(m, p, PolyForm.zero(m * (p + 1), varname="z", ndiff=m))

    @classmethod
    def from_form(cls, m, form_on_rm: PolyForm):
        """A bidegree-(0, q) cochain from a form on R^m."""
        terms = {}
        for (exps, dts), c in form_on_rm.terms.items():
            terms[(tuple(exps), dts)] = c
        return cls(m, 0, PolyForm(m, terms, varname="z", ndiff=m))

    def x_var(self, j):
        return PolyForm.var(self.m * (self.p + 1), j, varname="z", ndiff=self.m)

    def g_var(self, slot, j):
        return PolyForm.var(self.m * (self.p + 1), self.m * slot + j,
                            varname="z", ndiff=self.m)

    def is_zero(self):
        return self.form.is_zero()

    def __add__(self, other):
        if (self.m, self.p) != (other.m, other.p):
            raise ValueError("GroupCochain: mixed bidegrees")
        return GroupCochain(self.m, self.p, self.form + other.form)

    def scale(self, c):
        return GroupCochain(self.m, self.p, self.form.scale(c))

    def __eq__(self, other):
        return (isinstance(other, GroupCochain)
                and (self.m, self.p) == (other.m, other.p)
                and self.form == other.form)

    def __hash__(self):
        return hash((self.m, self.p, self.form))

    def __repr__(self):
        return "GC[p=%d](%r)" % (self.p, self.form)

    def form_degree(self):
        return self.form.homogeneous_degree()

    def wedge(self, other):
        if self.p != other.p:
            raise ValueError("pointwise product needs equal levels")
        return GroupCochain(self.m, self.p, self.form.wedge(other.form))

    def d(self):
        return GroupCochain(self.m, self.p, self.form.d())

    def _subst(self, x_images, g_images):
        """Affine substitution into new ambient with p_new slots."""
        return self.form.substitute(list(x_images) + list(g_images))

    def _ambient(self, p_new):
        n = self.m * (p_new + 1)
        return [PolyForm.var(n, j, varname="z", ndiff=self.m) for j in range(n)]

    def coface(self, i):
        """d^i: level p -> p+1 for the translation action groupoid."""
        p, m = self.p, self.m
        amb = self._ambient(p + 1)
        x = amb[:m]

        def g(slot, j):
            return amb[m * slot + j]

        if i == 0:
            x_images = [x[j] + g(1, j) for j in range(m)]
            g_images = [g(s + 1, j) for s in range(1, p + 1) for j in range(m)]
        elif i <= p:
            x_images = x
            g_images = []
            for s in range(1, p + 1):
                if s < i:
                    g_images.extend(g(s, j) for j in range(m))
                elif s == i:
                    g_images.extend(g(s, j) + g(s + 1, j) for j in range(m))
                else:
                    g_images.extend(g(s + 1, j) for j in range(m))
        elif i == p + 1:
            x_images = x
            g_images = [g(s, j) for s in range(1, p + 1) for j in range(m)]
        else:
            raise ValueError("coface index out of range")
        return GroupCochain(m, p + 1, self._subst(x_images, g_images))

    def codegeneracy(self, i):
        """s^i pullback: level p -> p-1, inserting the identity after slot i."""
        p, m = self.p, self.m
        if not 0 <= i <= p - 1:
            raise ValueError("codegeneracy index out of range")
        amb = self._ambient(p - 1)
        x = amb[:m]
        zero = PolyForm.zero(m * p, varname="z", ndiff=m)

        def g(slot, j):
            return amb[m * slot + j]

        g_images = []
        for s in range(1, p + 1):
            if s <= i:
                g_images.extend(g(s, j) for j in range(m))
            elif s == i + 1:
                g_images.extend(zero for _ in range(m))
            else:
                g_images.extend(g(s - 1, j) for j in range(m))
        return GroupCochain(m, p - 1, self._subst(x, g_images))

    def is_normalized(self):
        return all(self.codegeneracy(i).is_zero() for i in range(self.p))

    def translate(self, g_point):
        """Pull back along x -> x + g for an explicit rational tuple g."""
        amb = self._ambient(self.p)
        m = self.m
        x_images = [amb[j] + PolyForm.const(m * (self.p + 1), rat(g_point[j]),
                                            varname="z", ndiff=m)
                    for j in range(m)]
        return GroupCochain(m, self.p, self._subst(x_images, amb[m:]))

    def eval_g(self, g_points):
        """Substitute explicit integer tuples for all group arguments."""
        if len(g_points) != self.p:
            raise ValueError("need one group element per slot")
        m = self.m
        amb = self._ambient(0)
        consts = []
        for gp in g_points:
            consts.extend(PolyForm.const(m, rat(gj), varname="z", ndiff=m)
                          for gj in gp)
        form = self.form.substitute(list(amb) + consts)
        return GroupCochain(m, 0, form)


class GroupCochainBackend:
    """The translation action of Z^m on R^m, handled symbolically."""

    def __init__(self, m):
        self.m = m

    def zero(self, p):
        return GroupCochain.zero(self.m, p)

    def add(self, a, b):
        return a + b

    def scale(self, a, c):
        return a.scale(c)

    def is_zero(self, a):
        return a.is_zero()

    def one(self):
        return GroupCochain(self.m, 0, PolyForm.one(self.m, varname="z", ndiff=self.m))

    def d(self, a):
        return a.d()

    def wedge(self, a, b):
        return a.wedge(b)

    def coface(self, a, i):
        return a.coface(i)

    def codegeneracy(self, a, i):
        return a.codegeneracy(i)

    def form_degree(self, a):
        return a.form_degree()


# ---------------------------------------------------------------------
# backend (a): finite presentations
# ---------------------------------------------------------------------

class FinitePresentation:
    """Explicit cosimplicial cdga on levels 0..level_cap.

    ``levels[p]`` is a FiniteAlgebra (a dga); ``cofaces[p]`` is a list of
    p+2 linear maps level p -> p+1 given as {src key: vector}; similarly
    ``codegeneracies[p]`` maps level p+1 -> p with p+2 entries... indexed
    0..p.
    """

    def __init__(self, levels, cofaces, codegeneracies):
        self.levels = list(levels)
        self.cofaces = [list(m) for m in cofaces]
        self.codegeneracies = [list(m) for m in codegeneracies]

    @property
    def level_cap(self):
        return len(self.levels) - 1

    def zero(self, p):
        return {}

    def add(self, a, b):
        return vec_add(a, b)

    def scale(self, a, c):
        return {k: rat(c) * v for k, v in a.items()} if rat(c) else {}

    def is_zero(self, a):
        return not a

    def one(self):
        return {self.levels[0].unit_key: Fraction(1)}

    def d(self, a, p=None):
        if not a:
            return {}
        if p is None:
            p = self._level_of(a)
        return self.levels[p].m(1, [a])

    def wedge(self, a, b, p=None):
        if not a or not b:
            return {}
        if p is None:
            p = self._level_of(a)
        return self.levels[p].m(2, [a, b])

    def _level_of(self, a):
        raise ValueError("finite presentation needs explicit levels")

    def apply_map(self, table, vec):
        out = {}
        for key, c in vec.items():
            col = table.get(key)
            if col:
                out = vec_add(out, col, c)
        return out

    def coface(self, a, i, p):
        """d^i applied to a level-p element."""
        if p + 1 > self.level_cap:
            raise LevelCapError("coface beyond level cap")
        return self.apply_map(self.cofaces[p][i], a)

    def codegeneracy(self, a, i, p):
        """s^i applied to a level-(p+1) element."""
        return self.apply_map(self.codegeneracies[p][i], a)

    def check_identities(self):
        """Cosimplicial identities and dga-map property on basis probes."""
        failures = []
        for p in range(self.level_cap):
            for i in range(p + 2):
                for j in range(i + 1, p + 3):
                    if p + 2 > self.level_cap:
                        continue
                    for key in self.levels[p].space.keys():
                        v = {key: Fraction(1)}
                        lhs = self.coface(self.coface(v, i, p), j, p + 1)
                        rhs = self.coface(self.coface(v, j - 1, p), i, p + 1)
                        if lhs != rhs:
                            failures.append(("d^j d^i", p, i, j, key))
        for p in range(self.level_cap):
            for i in range(p + 1):
                for key in self.levels[p + 1].space.keys():
                    v = {key: Fraction(1)}
                    got = self.codegeneracy(v, i, p)
                    back = self.coface(got, i, p) if p + 1 <= self.level_cap else None
                    del back
            # s^i d^i = id = s^i d^{i+1}
            for i in range(p + 1):
                for key in self.levels[p].space.keys():
                    v = {key: Fraction(1)}
                    for j in (i, i + 1):
                        got = self.codegeneracy(self.coface(v, j, p), i, p)
                        if got != v:
                            failures.append(("s^i d^j != id", p, i, j, key))
        return failures


def _linear_map_to_json(table):
    out = {}
    for (d, name), col in sorted(table.items()):
        out["%d:%s" % (d, name)] = {"%d:%s" % (dt, nt): rat_str(c)
                                    for (dt, nt), c in sorted(col.items())}
    return out


def _linear_map_from_json(data):
    def parse(label):
        d, name = label.split(":", 1)
        return (int(d), name)
    return {parse(src): {parse(tgt): rat(c) for tgt, c in col.items()}
            for src, col in data.items()}


def presentation_to_json(pres: FinitePresentation):
    return {
        "levels": [lvl.to_json() for lvl in pres.levels],
        "cofaces": [[_linear_map_to_json(t) for t in maps]
                    for maps in pres.cofaces],
        "codegeneracies": [[_linear_map_to_json(t) for t in maps]
                           for maps in pres.codegeneracies],
    }


def presentation_from_json(data) -> FinitePresentation:
    levels = [FiniteAlgebra.from_json(lvl) for lvl in data["levels"]]
    cofaces = [[_linear_map_from_json(t) for t in maps]
               for maps in data["cofaces"]]
    codegens = [[_linear_map_from_json(t) for t in maps]
                for maps in data["codegeneracies"]]
    pres = FinitePresentation(levels, cofaces, codegens)
    failures = pres.check_identities()
    if failures:
        raise ValueError("cosimplicial identities fail: %r" % (failures[:3],))
    return pres


def constant_presentation(alg: FiniteAlgebra, level_cap=2) -> FinitePresentation:
    """The constant cosimplicial dga on a finite cdga."""
    ident = {k: {k: Fraction(1)} for k in alg.space.keys()}
    levels = [alg] * (level_cap + 1)
    cofaces = [[ident for _ in range(p + 2)] for p in range(level_cap)]
    codegens = [[ident for _ in range(p + 1)] for p in range(level_cap)]
    return FinitePresentation(levels, cofaces, codegens)


def group_action_presentation(alg: FiniteAlgebra, elements, mult, action,
                              level_cap=2) -> FinitePresentation:
    """Action groupoid of a finite group on a finite cdga.

    ``elements`` lists group elements (hashables, identity first);
    ``mult`` is the group multiplication; ``action(g)`` gives the algebra
    pullback automorphism as {src key: vector}.  Level p holds maps
    G^p -> A with basis keyed by ((g_1..g_p), a-key).
    """
    ident = elements[0]

    levels = []
    spaces = []
    for p in range(level_cap + 1):
        degrees = {}
        for tup in itertools.product(elements, repeat=p):
            for key in alg.space.keys():
                d, name = key
                degrees.setdefault(d, []).append(str((tup, name)))
        space = GradedVectorSpace(degrees)
        lvl = FiniteAlgebra(space, kind="Cinf", arity_cap=alg.arity_cap,
                            unit_key=None)
        # differential and product act pointwise in the group arguments
        for tup in itertools.product(elements, repeat=p):
            for key in alg.space.keys():
                src = (key[0], str((tup, key[1])))
                dval = alg.m(1, [{key: Fraction(1)}])
                if dval:
                    lvl.set_value(1, (src,), {(k[0], str((tup, k[1]))): c
                                              for k, c in dval.items()})
            for key_a in alg.space.keys():
                for key_b in alg.space.keys():
                    val = alg.m(2, [{key_a: Fraction(1)}, {key_b: Fraction(1)}])
                    if val:
                        lvl.set_value(2, ((key_a[0], str((tup, key_a[1]))),
                                          (key_b[0], str((tup, key_b[1])))),
                                      {(k[0], str((tup, k[1]))): c
                                       for k, c in val.items()})
        if p == 0:
            lvl.unit_key = (0, str(((), alg.unit_key[1])))
        levels.append(lvl)
        spaces.append(space)

    def coface_table(p, i):
        table = {}
        for tup in itertools.product(elements, repeat=p + 1):
            for key in alg.space.keys():
                if i == 0:
                    inner_tup = tup[1:]
                    twisted = action(tup[0])  # pullback along x -> g.x
                    img = twisted.get(key, {})
                    col = {(k[0], str((tup, k[1]))): c for k, c in img.items()}
                    src = (key[0], str((inner_tup, key[1])))
                    table.setdefault(src, {})
                    table[src] = vec_add(table[src], col)
                elif i <= p:
                    inner_tup = tup[:i - 1] + (mult(tup[i - 1], tup[i]),) + tup[i + 1:]
                    src = (key[0], str((inner_tup, key[1])))
                    col = {(key[0], str((tup, key[1]))): Fraction(1)}
                    table.setdefault(src, {})
                    table[src] = vec_add(table[src], col)
                else:
                    inner_tup = tup[:p]
                    src = (key[0], str((inner_tup, key[1])))
                    col = {(key[0], str((tup, key[1]))): Fraction(1)}
                    table.setdefault(src, {})
                    table[src] = vec_add(table[src], col)
        return table

    def codegen_table(p, i):
        # s^i: level p+1 -> level p; the basis indicator at tup survives
        # exactly when the inserted slot holds the identity
        table = {}
        for tup in itertools.product(elements, repeat=p + 1):
            for key in alg.space.keys():
                if tup[i] == ident:
                    reduced = tup[:i] + tup[i + 1:]
                    src = (key[0], str((tup, key[1])))
                    table[src] = {(key[0], str((reduced, key[1]))): Fraction(1)}
        return table

    cofaces = [[coface_table(p, i) for i in range(p + 2)] for p in range(level_cap)]
    codegens = [[codegen_table(p, i) for i in range(p + 1)] for p in range(level_cap)]
    return FinitePresentation(levels, cofaces, codegens)


# ---------------------------------------------------------------------
# total-complex elements
# ---------------------------------------------------------------------

class TotElement:
    """Bidegree-decomposed element of the normalized total complex."""

    __slots__ = ("backend", "components")

    def __init__(self, backend, components=None):
        self.backend = backend
        self.components = {}
        if components:
            for (p, q), val in components.items():
                if not self._bz(val):
                    self.components[(p, q)] = val

    def _bz(self, val):
        return self.backend.is_zero(val)

    @classmethod
    def zero(cls, backend):
        return cls(backend, {})

    def is_zero(self):
        return not self.components

    def total_degree(self):
        degs = {p + q for p, q in self.components}
        if len(degs) == 1:
            return degs.pop()
        return None

    def bidegrees(self):
        return sorted(self.components)

    def component(self, p, q):
        return self.components.get((p, q), self.backend.zero(p))

    def __add__(self, other):
        out = dict(self.components)
        for key, val in other.components.items():
            cur = out.get(key)
            s = self.backend.add(cur, val) if cur is not None else val
            if self._bz(s):
                out.pop(key, None)
            else:
                out[key] = s
        return TotElement(self.backend, out)

    def scale(self, c):
        c = rat(c)
        if not c:
            return TotElement.zero(self.backend)
        return TotElement(self.backend,
                          {k: self.backend.scale(v, c) for k, v in self.components.items()})

    def __sub__(self, other):
        return self + other.scale(-1)

    def __eq__(self, other):
        if not isinstance(other, TotElement) or self.backend is not other.backend:
            return NotImplemented
        keys = set(self.components) | set(other.components)
        for k in keys:
            p, _ = k
            diff = self.backend.add(self.component(*k),
                                    self.backend.scale(other.component(*k), Fraction(-1)))
            if not self.backend.is_zero(diff):
                return False
        return True

    def __repr__(self):
        if not self.components:
            return "Tot(0)"
        return "Tot{%s}" % ", ".join("(%d,%d): %r" % (p, q, v)
                                     for (p, q), v in sorted(self.components.items()))

    def is_normalized(self):
        for (p, q), val in self.components.items():
            if p == 0:
                continue
            for i in range(p):
                if not self._bz(self._codegeneracy(val, i, p)):
                    return False
        return True

    def _codegeneracy(self, val, i, p):
        be = self.backend
        if isinstance(be, GroupCochainBackend):
            return be.codegeneracy(val, i)
        return be.codegeneracy(val, i, p - 1)

    def _coface(self, val, i, p):
        be = self.backend
        if isinstance(be, GroupCochainBackend):
            return be.coface(val, i)
        return be.coface(val, i, p)


def partial_tilde(backend, val, p):
    """The cosimplicial differential: alternating sum of cofaces."""
    out = backend.zero(p + 1) if isinstance(backend, GroupCochainBackend) else {}
    for i in range(p + 2):
        piece = (backend.coface(val, i) if isinstance(backend, GroupCochainBackend)
                 else backend.coface(val, i, p))
        piece = backend.scale(piece, Fraction((-1) ** i))
        out = backend.add(out, piece)
    return out


def tot_differential(v: TotElement) -> TotElement:
    """D(a) = partial-tilde(a) + (-1)^p d(a) on bidegree (p, q)."""
    be = v.backend
    out = TotElement.zero(be)
    for (p, q), val in v.components.items():
        dpart = be.scale(be.d(val) if isinstance(be, GroupCochainBackend)
                         else be.d(val, p), Fraction((-1) ** p))
        out = out + TotElement(be, {(p, q + 1): dpart})
        out = out + TotElement(be, {(p + 1, q): partial_tilde(be, val, p)})
    return out


# ---------------------------------------------------------------------
# psi: reconstruction of coend components from the normalized picture
# ---------------------------------------------------------------------

def sigma_pushforward(backend, val, I, p, target_level):
    """A(sigma_I) for the inclusion with image I in {0..target_level}."""
    missing = [j for j in range(target_level + 1) if j not in set(I)]
    cur = val
    cur_level = p
    for j in sorted(missing):
        cur = (backend.coface(cur, j) if isinstance(backend, GroupCochainBackend)
               else backend.coface(cur, j, cur_level))
        cur_level += 1
    return cur


def psi_components(v: TotElement, level: int):
    """Level-n component of the coend element: {(I, q): value} with
    value = A(sigma_I) applied to the bidegree-(|I|-1, q) part.

    Raises on non-normalized input: the reconstruction is only the
    inverse of the normalized picture.
    """
    if not v.is_normalized():
        raise ValueError("psi needs a normalized element")
    be = v.backend
    out = {}
    for (p, q), val in v.components.items():
        if p > level:
            continue
        for I in itertools.combinations(range(level + 1), p + 1):
            img = sigma_pushforward(be, val, I, p, level)
            if not be.is_zero(img):
                out[(I, q)] = img
    return out


def psi_inverse(backend, level_components, level):
    """Extract the normalized element from a level's coend data."""
    out = {}
    for (I, q), val in level_components.items():
        if I == tuple(range(level + 1)):
            out[(level, q)] = val
    return TotElement(backend, out)


def psi_roundtrip_ok(v: TotElement, level: int) -> bool:
    comp = psi_components(v, level)
    back = psi_inverse(v.backend, comp, level)
    want = TotElement(v.backend, {k: val for k, val in v.components.items()
                                  if k[0] == level})
    return back == want


# ---------------------------------------------------------------------
# the products
# ---------------------------------------------------------------------

def _nc_top_coefficient(l, n, strings, arity_cap):
    """Top coefficient of m_n^{[l]}(lam_{I_1}, .., lam_{I_n})."""
    res = nc_structure(l, arity_cap)
    alg = res.algebra
    elems = []
    for I in strings:
        if len(I) == 1:
            i = I[0]
            if i == 0:
                vec = {(0, "1"): Fraction(1)}
                for j in range(1, l + 1):
                    vec[(0, "v%d" % j)] = Fraction(-1)
            else:
                vec = {(0, "v%d" % i): Fraction(1)}
        else:
            vec = {(len(I) - 1, "L" + "".join(map(str, I))): Fraction(1)}
        elems.append(vec)
    val = alg.m(n, elems)
    if l == 0:
        return val.get((0, "1"), Fraction(0))
    top = (l, "L" + "".join(map(str, range(l + 1))))
    return val.get(top, Fraction(0))


class TotalComplexAlgebra:
    """The normalized total complex as an infinity-structure carrier."""

    def __init__(self, backend, level_cap=3, arity_cap=6):
        self.backend = backend
        self.level_cap = level_cap
        self.arity_cap = arity_cap
        self.kind = "Cinf"

    def zero(self):
        return TotElement.zero(self.backend)

    def one(self):
        return TotElement(self.backend, {(0, 0): self.backend.one()})

    def add(self, a, b, coeff=Fraction(1)):
        return a + b.scale(coeff)

    def scale(self, a, c):
        return a.scale(c)

    def is_zero(self, a):
        return a.is_zero()

    def degree(self, a):
        return a.total_degree()

    def m(self, k, elems):
        if k == 1:
            return tot_differential(elems[0])
        out = self.zero()
        pieces = [list(e.components.items()) for e in elems]
        for combo in itertools.product(*pieces):
            bidegs = [key for key, _ in combo]
            vals = [val for _, val in combo]
            out = out + self._pure_product(k, bidegs, vals)
        return out

    def _pure_product(self, n, bidegs, vals):
        be = self.backend
        if n > self.arity_cap:
            raise LevelCapError("product arity %d exceeds cap %d" % (n, self.arity_cap))
        ps = [p for p, _ in bidegs]
        qs = [q for _, q in bidegs]
        l = sum(ps) + 2 - n
        if l < 0:
            return self.zero()
        if l > self.level_cap:
            raise LevelCapError("product level %d exceeds cap %d" % (l, self.level_cap))
        sign_exp = 0
        for i in range(n):
            for j in range(i + 1, n):
                sign_exp += qs[i] * ps[j]
        total = None
        for strings in itertools.product(
                *[list(itertools.combinations(range(l + 1), p + 1)) for p in ps]):
            c = _nc_top_coefficient(l, n, strings, self.arity_cap)
            if not c:
                continue
            wedge = None
            for I, p, val in zip(strings, ps, vals):
                img = sigma_pushforward(be, val, I, p, l)
                wedge = img if wedge is None else (
                    be.wedge(wedge, img) if isinstance(be, GroupCochainBackend)
                    else be.wedge(wedge, img, l))
                if be.is_zero(wedge):
                    break
            else:
                piece = be.scale(wedge, c)
                total = piece if total is None else be.add(total, piece)
        if total is None or be.is_zero(total):
            return self.zero()
        total = be.scale(total, Fraction((-1) ** sign_exp))
        return TotElement(be, {(l, sum(qs)): total})


def project_to_base(v: TotElement) -> TotElement:
    """r: keep bidegree (0, q), kill positive levels."""
    return TotElement(v.backend, {k: val for k, val in v.components.items()
                                  if k[0] == 0})


def window_basis(be: GroupCochainBackend, level_cap, poly_cap, form_cap):
    """Normalized monomial cochains with bounded total polynomial degree.

    A monomial is normalized exactly when every group slot appears with
    positive degree; the window is closed under the total differential up
    to one extra level, which suffices for cohomology in low degrees.
    """
    m = be.m
    basis = []
    for p in range(level_cap + 1):
        nv = m * (p + 1)
        for q in range(form_cap + 1):
            for dts in itertools.combinations(range(m), q):
                for exps in _bounded_exponents(nv, poly_cap):
                    ok = True
                    for s in range(1, p + 1):
                        if not any(exps[m * s + j] for j in range(m)):
                            ok = False
                            break
                    if not ok:
                        continue
                    form = PolyForm(nv, {(tuple(exps), dts): Fraction(1)},
                                    varname="z", ndiff=m)
                    basis.append(((p, q), GroupCochain(m, p, form)))
    return basis


def _bounded_exponents(nvars, cap):
    if nvars == 0:
        yield ()
        return
    for head in range(cap + 1):
        for tail in _bounded_exponents(nvars - 1, cap - head):
            yield (head,) + tail


def tot_window_cohomology(be: GroupCochainBackend, max_degree=2, level_cap=2,
                          poly_cap=3, form_cap=None):
    """Betti numbers of (window, D) by exact rank computation."""
    if form_cap is None:
        form_cap = max_degree
    basis = window_basis(be, level_cap + 1, poly_cap, form_cap + 1)
    index = {}
    for (pq, el) in basis:
        for key in el.form.terms:
            index[(pq, key)] = len(index)

    def coords(v: TotElement):
        out = {}
        for (p, q), val in v.components.items():
            for key, c in val.form.terms.items():
                idx = index.get(((p, q), key))
                if idx is None:
                    raise LevelCapError("window too small for the image")
                out[idx] = c
        return out

    dims = {}
    ranks = {}
    kernels = {}
    for deg in range(max_degree + 2):
        degree_basis = [(pq, el) for (pq, el) in basis
                        if pq[0] + pq[1] == deg and pq[0] <= level_cap]
        dims[deg] = len(degree_basis)
        ech = Echelon()
        kernel_count = 0
        for (p, q), el in degree_basis:
            v = TotElement(be, {(p, q): el})
            dv = tot_differential(v)
            vec = coords(dv)
            if not vec:
                kernel_count += 1
            elif not ech.insert(vec):
                kernel_count += 1
        ranks[deg] = ech.rank
        kernels[deg] = kernel_count
    betti = {}
    for deg in range(max_degree + 1):
        betti[deg] = kernels[deg] - ranks.get(deg - 1, 0)
    return betti


# ---------------------------------------------------------------------
# closed-form products on elements of total degree <= 1
# ---------------------------------------------------------------------

def _split_degree_one(a: TotElement):
    b = a.component(1, 0)
    c = a.component(0, 1)
    extra = [k for k in a.components if k not in ((1, 0), (0, 1))]
    if extra:
        raise ValueError("input is not of total degree 1")
    return b, c


def tot_product_degree1(alg: TotalComplexAlgebra, elems):
    """The closed-form product of total-degree-1 elements.

    Implements the closed degree-1 formulas: the four-term arity-2
    product (with m2(c1, c2) the levelwise wedge) and, for higher arity,
    the Bernoulli-weighted sum over one (0,1)-slot plus the pure (1,0)
    product; the all-(0,1) part vanishes for arity > 2.  Coefficients
    are calibrated against the general transferred-product formula.
    """
    be = alg.backend
    l = len(elems)
    if l < 2:
        raise ValueError("need at least two inputs")
    split = [_split_degree_one(e) for e in elems]
    if l == 2:
        (b1, c1), (b2, c2) = split
        out = alg.zero()
        # m2(c1, c2): levelwise wedge at level 0
        if not be.is_zero(c1) and not be.is_zero(c2):
            out = out + TotElement(be, {(0, 2): _wedge(be, c1, c2, 0)})
        # m2(b1, c2) = -1/2 b1 ptilde(c2) + b1 d0(c2)
        out = out + _m2_bc(alg, b1, c2)
        # m2(c1, b2) = -m2(b2, c1) by graded commutativity in degree 1
        out = out + _m2_bc(alg, b2, c1).scale(-1)
        # m2(b1, b2): the 1/6 formula
        out = out + _m2_bb(alg, b1, b2)
        return out
    coeff = bernoulli(l - 1) / factorial(l - 1)
    out = alg.zero()
    bs = [s[0] for s in split]
    for i in range(l):
        ci = split[i][1]
        if be.is_zero(ci):
            continue
        prod = None
        for j in range(l):
            if j == i:
                continue
            if be.is_zero(bs[j]):
                prod = None
                break
            prod = bs[j] if prod is None else _wedge(be, prod, bs[j], 1)
        if prod is None:
            continue
        term = _wedge(be, prod, _ptilde(be, ci, 0), 1)
        # an odd insertion alternates with its slot (calibrated against
        # the general formula)
        sgn = Fraction((-1) ** (l - 1)) * ((-1) ** i) * comb(l - 1, i)
        term = be.scale(term, sgn * coeff)
        out = out + TotElement(be, {(1, 1): term})
    # the pure (1,0)-part, evaluated through the general formula
    if all(not be.is_zero(b) for b in bs):
        pure = [TotElement(be, {(1, 0): b}) for b in bs]
        out = out + alg.m(l, pure)
    return out


def _wedge(be, a, b, level):
    return be.wedge(a, b) if isinstance(be, GroupCochainBackend) else be.wedge(a, b, level)


def _ptilde(be, val, p):
    return partial_tilde(be, val, p)


def _d0(be, val, p):
    return be.coface(val, 0) if isinstance(be, GroupCochainBackend) else be.coface(val, 0, p)


def _m2_bc(alg, b, c):
    """m2(b, c) = -1/2 b ptilde(c) + b d^0(c) for b (1,0) and c (0,q)."""
    be = alg.backend
    if be.is_zero(b) or be.is_zero(c):
        return alg.zero()
    q = be.form_degree(c) if isinstance(be, GroupCochainBackend) else _fp_degree(be, c)
    term = be.add(be.scale(_wedge(be, b, _ptilde(be, c, 0), 1), Fraction(-1, 2)),
                  _wedge(be, b, _d0(be, c, 0), 1))
    return TotElement(be, {(1, q): term})


def _fp_degree(be, vec):
    degs = {k[0] for k in vec}
    if len(degs) == 1:
        return degs.pop()
    return None


def _m2_bb(alg, b1, b2):
    """m2(b1, b2): the one-sixth combination of coface products."""
    be = alg.backend
    if be.is_zero(b1) or be.is_zero(b2):
        return alg.zero()

    def dcb(val, i):
        return be.coface(val, i) if isinstance(be, GroupCochainBackend) \
            else be.coface(val, i, 1)

    d0b1, d1b1, d2b1 = dcb(b1, 0), dcb(b1, 1), dcb(b1, 2)
    d0b2, d1b2, d2b2 = dcb(b2, 0), dcb(b2, 1), dcb(b2, 2)
    acc = be.scale(_wedge(be, d0b1, be.add(d1b2, d2b2), 2), Fraction(-1))
    acc = be.add(acc, _wedge(be, d1b1, be.add(d0b2, be.scale(d2b2, Fraction(-1))), 2))
    acc = be.add(acc, _wedge(be, d2b1, be.add(d0b2, d1b2), 2))
    return TotElement(be, {(2, 0): be.scale(acc, Fraction(1, 6))})


def tot_product_degree1_with_scalar(alg: TotalComplexAlgebra, elems, x, slot):
    """Closed form for one total-degree-0 input x among degree-1 inputs.

    m_l(a_1, .., x, .., a_l) = (-1)^slot binom(l-1, slot-1) B_{l-1}/(l-1)!
    b_1 ... b_l ptilde(x), slots counted from 1.
    """
    be = alg.backend
    l = len(elems) + 1
    split = [_split_degree_one(e) for e in elems]
    bs = [s[0] for s in split]
    if l == 2:
        other = elems[0]
        b, c = split[0]
        out = alg.zero()
        # m2(c, x) = c x and m2(x, c) = x c; m2(b, x) = -1/2 b ptilde x + b d0 x
        if not be.is_zero(c):
            out = out + TotElement(be, {(0, 1): _wedge(be, c, x, 0)})
        if not be.is_zero(b):
            term = be.add(be.scale(_wedge(be, b, _ptilde(be, x, 0), 1), Fraction(-1, 2)),
                          _wedge(be, b, _d0(be, x, 0), 1))
            out = out + TotElement(be, {(1, 0): term})
        return out
    if any(be.is_zero(b) for b in bs):
        return alg.zero()
    prod = None
    for b in bs:
        prod = b if prod is None else _wedge(be, prod, b, 1)
    # an even (degree-0) insertion enters only through the binomial;
    # no per-slot sign occurs (calibrated against the general formula)
    coeff = (Fraction((-1) ** (l - 1)) * comb(l - 1, slot - 1)
             * bernoulli(l - 1) / factorial(l - 1))
    term = be.scale(_wedge(be, prod, _ptilde(be, x, 0), 1), coeff)
    return TotElement(be, {(1, 0): term})
