"""Homotopy transfer of structures across a contraction.

The big side is any dga-flavored carrier (polynomial forms, a finite
presentation); the small side gets the transferred structure through the
planar-tree sum, implemented as the two-branch recursion

    lam_n = sum_{s=1}^{n-1} (-1)^{s+1} m2( H lam_s (x) H lam_{n-s} ),

performed in the shifted picture, where the two branch maps are even
and the recursion carries no signs of its own.  The calibration anchors
are the Bernoulli coefficients of the transferred interval products and
the one-sixth coefficients on the triangle; the structure relations, the
shuffle-vanishing property and the morphism relations for the inclusion
are the running oracles.
"""

from __future__ import annotations

import functools
import itertools
from fractions import Fraction

from .dupont import NCElement, dupont_E, dupont_Int, dupont_s, index_strings
from .graded import GradedVectorSpace
from .linalg import Echelon, vec_add
from .structures import (FiniteAlgebra, FormsAlgebra, InfinityMorphism,
                         shift_sign)


class Contraction:
    """Inclusion/projection/homotopy data with verified side conditions.

    ``big`` is an algebra carrier; ``include`` maps small basis keys to
    big elements, ``project`` big elements to small vectors, ``homotopy``
    big elements to big elements (degree -1).
    """

    def __init__(self, big, small_space: GradedVectorSpace, include, project,
                 homotopy, unit_key=None, tag=""):
        self.big = big
        self.small_space = small_space
        self.include = include
        self.project = project
        self.homotopy = homotopy
        self.unit_key = unit_key
        self.tag = tag

    def include_vec(self, vec):
        out = self.big.zero()
        for key, c in vec.items():
            out = self.big.add(out, self.include(key), c)
        return out

    def verify_side_conditions(self, witnesses=()):
        """p i = Id always; the h-conditions on the supplied big elements."""
        failures = []
        for key in self.small_space.keys():
            got = self.project(self.include(key))
            if got != {key: Fraction(1)}:
                failures.append(("p i != Id", key, got))
            hi = self.homotopy(self.include(key))
            if not self.big.is_zero(hi):
                failures.append(("h i != 0", key))
        for w in witnesses:
            hw = self.homotopy(w)
            if not self.big.is_zero(self.homotopy(hw)):
                failures.append(("h h != 0", repr(w)))
            if self.project(hw):
                failures.append(("p h != 0", repr(w)))
            lhs = self.big.add(self.big.m(1, [hw]), self.homotopy(self.big.m(1, [w])))
            rhs = self.big.add(self.include_vec(self.project(w)), w, Fraction(-1))
            if not self.big.is_zero(self.big.add(lhs, rhs, Fraction(-1))):
                failures.append(("d h + h d != i p - Id", repr(w)))
        return failures


class TransferResult:
    """Transferred structure plus the inclusion quasi-morphism."""

    def __init__(self, algebra: FiniteAlgebra, inclusion: InfinityMorphism,
                 contraction: Contraction, arity_cap: int):
        self.algebra = algebra
        self.inclusion = inclusion
        self.contraction = contraction
        self.arity_cap = arity_cap


class ArityCapError(RuntimeError):
    pass


class TransferredAlgebra(FiniteAlgebra):
    """Transferred structure with lazily computed structure constants.

    Structure constants m_n on basis words are evaluated from the tree
    recursion on first use and cached in the ordinary sparse tables, so
    checkers and serialization see a plain table-backed structure.
    """

    def __init__(self, contraction: Contraction, arity_cap: int, kind="Cinf"):
        super().__init__(contraction.small_space, kind=kind,
                         arity_cap=arity_cap, unit_key=contraction.unit_key)
        self.contraction = contraction
        self._lam = {}
        self._done = set()
        big = contraction.big
        for key in self.space.keys():
            val = contraction.project(big.m(1, [contraction.include(key)]))
            if val:
                self.set_value(1, (key,), val)

    def hlam(self, word):
        """eta Lam on a word of basis keys: the inclusion for single
        letters, the homotopy of the tree sum otherwise.  In the shifted
        picture these maps are even, so the recursion itself is sign-free.
        """
        cached = self._lam.get(("h", word))
        if cached is not None:
            return cached
        if len(word) == 1:
            val = self.contraction.include(word[0])
        else:
            val = self.contraction.homotopy(self.lam(word))
        self._lam[("h", word)] = val
        return val

    def lam(self, word):
        cached = self._lam.get(word)
        if cached is not None:
            return cached
        n = len(word)
        if n > self.arity_cap:
            raise ArityCapError("transfer: arity cap %d exceeded" % self.arity_cap)
        big = self.contraction.big
        total = big.zero()
        degs = [k[0] for k in word]
        for s in range(1, n):
            left = self.hlam(word[:s])
            right = self.hlam(word[s:])
            if big.is_zero(left) or big.is_zero(right):
                continue
            # delta_2 on the shifted carriers: the only sign is the shift
            # dictionary of the binary product on the left degree
            left_deg = sum(degs[:s]) + 1 - s
            sign = -1 if (left_deg - 1) % 2 else 1
            total = big.add(total, big.m(2, [left, right]), Fraction(sign))
        self._lam[word] = total
        return total

    def _ensure(self, k, word):
        if k == 1 or (k, word) in self._done:
            return
        self._done.add((k, word))
        val = self.contraction.project(self.lam(word))
        if val:
            sign = shift_sign([key[0] for key in word])
            if sign != 1:
                val = {kk: -c for kk, c in val.items()}
            self.set_value(k, word, val)

    def m(self, k, elems):
        if len(elems) != k:
            raise ValueError("arity mismatch")
        if k > self.arity_cap:
            raise ArityCapError("transfer: arity cap %d exceeded" % self.arity_cap)
        for combo in itertools.product(*[list(e) for e in elems]):
            self._ensure(k, tuple(combo))
        return super().m(k, elems)

    def materialize(self, arity):
        for k in range(2, arity + 1):
            for word in itertools.product(self.space.keys(), repeat=k):
                self._ensure(k, word)


def transfer_structure(contraction: Contraction, arity_cap: int,
                       kind="Cinf") -> TransferResult:
    """Transferred m_n for n <= arity_cap, with the inclusion morphism."""
    alg = TransferredAlgebra(contraction, arity_cap, kind=kind)
    big = contraction.big

    def component(k):
        def apply(elems):
            out = big.zero()
            for combo in itertools.product(*[list(e.items()) for e in elems]):
                wrd = tuple(key for key, _ in combo)
                coeff = Fraction(1)
                for _, c in combo:
                    coeff *= c
                if k == 1:
                    val = contraction.include(wrd[0])
                else:
                    val = contraction.homotopy(alg.lam(wrd))
                    coeff *= shift_sign([key[0] for key in wrd])
                if not big.is_zero(val):
                    out = big.add(out, val, coeff)
            return out
        return apply

    components = {k: component(k) for k in range(1, arity_cap + 1)}
    inclusion = InfinityMorphism(alg, big, components=components,
                                 arity_cap=arity_cap)
    return TransferResult(alg, inclusion, contraction, arity_cap)


# ---------------------------------------------------------------------
# contraction from a Hodge-type decomposition of a finite dga
# ---------------------------------------------------------------------

class HodgeError(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


def contraction_from_hodge(alg: FiniteAlgebra, w_vectors, m_vectors,
                           names=None, tag="hodge") -> Contraction:
    """Contraction onto span(w_vectors) along m_vectors (+) d(m_vectors).

    The decomposition must be direct and span the window; W must consist
    of closed vectors and M may not contain nonzero exact elements.  The
    homotopy inverts d from dM back to M with the sign forced by
    d h + h d = i p - Id.
    """
    order = alg.space.key_order
    d = lambda v: alg.m(1, [v])

    for i, w in enumerate(w_vectors):
        if d(w):
            raise HodgeError("W is not closed", witness=w)
    dm_vectors = [d(m) for m in m_vectors]
    if any(not dm for dm in dm_vectors):
        raise HodgeError("d is not injective on M",
                         witness=next(m for m in m_vectors if not d(m)))

    ech = Echelon(order)
    for v in list(w_vectors) + list(m_vectors) + dm_vectors:
        if not ech.insert(dict(v)):
            raise HodgeError("decomposition is not direct", witness=v)
    ambient = alg.space.keys()
    missing = [k for k in ambient if not ech.contains({k: Fraction(1)})]
    if missing:
        raise HodgeError("decomposition does not span: missing %r" % (missing,),
                         witness=missing)

    # exact elements inside M (beyond 0) would break h h = 0 / p h = 0
    exact = Echelon(order)
    for k in ambient:
        dv = d({k: Fraction(1)})
        if dv:
            exact.insert(dv)
    for m in m_vectors:
        if exact.contains(dict(m)):
            raise HodgeError("M contains a nonzero exact element", witness=m)

    # tagged elimination: express any vector in the (W, M, dM) basis
    blocks = [("W", v) for v in w_vectors] + [("M", v) for v in m_vectors] + \
             [("dM", v) for v in dm_vectors]

    def tag_order(k):
        if isinstance(k, tuple) and len(k) == 2 and k[0] == "_blk_":
            return (1, k[1])
        return (0, order(k))

    tagged = Echelon(tag_order)
    for j, (_, v) in enumerate(blocks):
        vv = dict(v)
        vv[("_blk_", j)] = Fraction(1)
        tagged.insert(vv)

    def coords(vec):
        res = tagged.reduce(dict(vec))
        out = [Fraction(0)] * len(blocks)
        for k, c in res.items():
            if isinstance(k, tuple) and len(k) == 2 and k[0] == "_blk_":
                out[k[1]] = -c
            elif c:
                raise HodgeError("vector outside the decomposition", witness=vec)
        return out

    if names is None:
        names = ["w%d" % (j + 1) for j in range(len(w_vectors))]
    by_degree = {}
    w_keys = []
    for name, v in zip(names, w_vectors):
        deg = {k[0] for k in v}
        if len(deg) != 1:
            raise HodgeError("W basis vector not homogeneous", witness=v)
        deg = deg.pop()
        by_degree.setdefault(deg, []).append(name)
        w_keys.append((deg, name))
    small = GradedVectorSpace(by_degree)

    unit_key = None
    if alg.unit_key is not None:
        for key, v in zip(w_keys, w_vectors):
            if v == {alg.unit_key: Fraction(1)}:
                unit_key = key

    def include(key):
        return dict(w_vectors[w_keys.index(key)])

    def project(vec):
        cs = coords(vec)
        out = {}
        for j in range(len(w_vectors)):
            if cs[j]:
                out[w_keys[j]] = cs[j]
        return out

    def homotopy(vec):
        cs = coords(vec)
        out = {}
        base = len(w_vectors) + len(m_vectors)
        for j in range(len(m_vectors)):
            c = cs[base + j]
            if c:
                out = vec_add(out, m_vectors[j], -c)
        return out

    return Contraction(alg, small, include, project, homotopy,
                       unit_key=unit_key, tag=tag)


def identity_contraction(alg: FiniteAlgebra) -> Contraction:
    space = alg.space
    return Contraction(alg, space,
                       include=lambda key: {key: Fraction(1)},
                       project=lambda vec: dict(vec),
                       homotopy=lambda vec: {},
                       unit_key=alg.unit_key, tag="identity")


# ---------------------------------------------------------------------
# the transferred structures on the simplex cochains
# ---------------------------------------------------------------------

def nc_space(n) -> GradedVectorSpace:
    degrees = {0: ["1"] + ["v%d" % i for i in range(1, n + 1)]}
    for size in range(2, n + 2):
        degrees[size - 1] = ["L" + "".join(map(str, I))
                             for I in index_strings(n, size)]
    return GradedVectorSpace(degrees)


def nc_key_to_lambda(key, n):
    """Small basis key -> NCElement (the unit key is the sum of vertices)."""
    deg, name = key
    if name == "1":
        return NCElement.unit(n)
    if name.startswith("v"):
        return NCElement.basis(n, (int(name[1:]),))
    return NCElement.basis(n, tuple(int(ch) for ch in name[1:]))


def nc_vector_from_element(elem: NCElement):
    """NCElement -> sparse vector over the nc_space basis."""
    n = elem.n
    out = {}
    for I, c in elem.coeffs.items():
        if len(I) == 1:
            i = I[0]
            if i == 0:
                # lambda_0 = 1 - sum_i lambda_i in the adapted basis
                out = vec_add(out, {(0, "1"): Fraction(1)}, c)
                for j in range(1, n + 1):
                    out = vec_add(out, {(0, "v%d" % j): Fraction(1)}, -c)
            else:
                out = vec_add(out, {(0, "v%d" % i): Fraction(1)}, c)
        else:
            out = vec_add(out, {(len(I) - 1, "L" + "".join(map(str, I))): Fraction(1)}, c)
    return out


def dupont_contraction(n) -> Contraction:
    big = FormsAlgebra(n)
    space = nc_space(n)

    def include(key):
        return dupont_E(nc_key_to_lambda(key, n))

    def project(form):
        return nc_vector_from_element(dupont_Int(form, n))

    def homotopy(form):
        return dupont_s(form, n)

    return Contraction(big, space, include, project, homotopy,
                       unit_key=(0, "1"), tag="dupont[%d]" % n)


@functools.lru_cache(maxsize=None)
def nc_structure(n, arity_cap) -> TransferResult:
    """Memoized transferred structure on the n-simplex cochains."""
    return transfer_structure(dupont_contraction(n), arity_cap, kind="Cinf")
