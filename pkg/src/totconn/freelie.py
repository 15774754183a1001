"""Truncated free tensor and free Lie algebra machinery.

Words are tuples of generator indices; series are dicts {word: Fraction}
truncated at a fixed word length.  The tensor algebra carries the
concatenation product and the unshuffle coproduct, whose primitives are
the free Lie algebra; Lyndon words provide the canonical bracket basis.
All generators sit in degree zero, so no Koszul signs appear here.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .linalg import Echelon, vec_add, vec_scale
from .scalars import rat, rat_str


class TruncationError(RuntimeError):
    pass


EMPTY = ()


def check_order(order):
    if order < 1:
        raise TruncationError("truncation order must be >= 1")


def tensor_mul(a: dict, b: dict, order: int) -> dict:
    """Concatenation product, dropping words longer than ``order``."""
    out = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            if len(wa) + len(wb) > order:
                continue
            w = wa + wb
            s = out.get(w, Fraction(0)) + ca * cb
            if s:
                out[w] = s
            else:
                out.pop(w, None)
    return out


def tensor_exp(x: dict, order: int) -> dict:
    """exp of a series with no constant term."""
    if EMPTY in x:
        raise ValueError("exp needs a series without constant term")
    out = {EMPTY: Fraction(1)}
    power = {EMPTY: Fraction(1)}
    fact = 1
    for k in range(1, order + 1):
        power = tensor_mul(power, x, order)
        if not power:
            break
        fact *= k
        out = vec_add(out, power, Fraction(1, fact))
    return out


def tensor_log(t: dict, order: int) -> dict:
    """log of a series with constant term 1."""
    if t.get(EMPTY) != 1:
        raise ValueError("log needs constant term 1")
    u = {w: c for w, c in t.items() if w != EMPTY}
    out = {}
    power = {EMPTY: Fraction(1)}
    for k in range(1, order + 1):
        power = tensor_mul(power, u, order)
        if not power:
            break
        out = vec_add(out, power, Fraction((-1) ** (k + 1), k))
    return out


def bch(x: dict, y: dict, order: int) -> dict:
    """log(exp(x) exp(y)) in the truncated tensor algebra."""
    check_order(order)
    prod = tensor_mul(tensor_exp(x, order), tensor_exp(y, order), order)
    return tensor_log(prod, order)


def unshuffle_coproduct(t: dict, order: int) -> dict:
    """Delta(T) as {(left word, right word): coeff}; generators primitive."""
    out = {}
    for w, c in t.items():
        for r in range(len(w) + 1):
            for S in itertools.combinations(range(len(w)), r):
                left = tuple(w[i] for i in S)
                right = tuple(w[i] for i in range(len(w)) if i not in S)
                key = (left, right)
                s = out.get(key, Fraction(0)) + c
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
    return out


def is_grouplike(t: dict, order: int) -> bool:
    """Delta(T) = T (x) T up to word length ``order`` in each slot pair."""
    if t.get(EMPTY) != 1:
        return False
    delta = unshuffle_coproduct(t, order)
    want = {}
    for w1, c1 in t.items():
        for w2, c2 in t.items():
            if len(w1) + len(w2) > order:
                continue
            key = (w1, w2)
            s = want.get(key, Fraction(0)) + c1 * c2
            if s:
                want[key] = s
            else:
                want.pop(key, None)
    delta = {k: v for k, v in delta.items() if len(k[0]) + len(k[1]) <= order}
    return delta == want


def is_primitive(x: dict, order: int) -> bool:
    delta = unshuffle_coproduct(x, order)
    want = {}
    for w, c in x.items():
        if 0 < len(w) <= order:
            want[(w, EMPTY)] = c
            want[(EMPTY, w)] = c
    if x.get(EMPTY):
        return False
    return delta == want


# ---------------------------------------------------------------------
# Lyndon words and the free Lie algebra
# ---------------------------------------------------------------------

def lyndon_words(num_gens, max_len):
    """All Lyndon words over 0..num_gens-1 of length <= max_len (Duval)."""
    out = []
    w = [-1]
    while w:
        w[-1] += 1
        m = len(w)
        if w[-1] < num_gens:
            out.append(tuple(w))
            while len(w) < max_len:
                w.append(w[len(w) - m])
        while w and w[-1] == num_gens - 1:
            w.pop()
    return sorted(out, key=lambda t: (len(t), t))


def standard_factorization(w):
    """w = uv with v the longest proper Lyndon suffix."""
    if len(w) < 2:
        raise ValueError("no factorization for letters")
    for i in range(1, len(w)):
        v = w[i:]
        if _is_lyndon(v):
            return w[:i], v
    raise AssertionError("unreachable for Lyndon input")


def _is_lyndon(w):
    if not w:
        return False
    for i in range(1, len(w)):
        if w[i:] <= w:
            return False
    return True


def commutator(a: dict, b: dict, order: int) -> dict:
    return vec_add(tensor_mul(a, b, order), tensor_mul(b, a, order), Fraction(-1))


def lyndon_bracket(w, order=None) -> dict:
    """The right-normed standard bracketing of a Lyndon word, expanded."""
    if order is None:
        order = len(w)
    if len(w) == 1:
        return {tuple(w): Fraction(1)}
    u, v = standard_factorization(tuple(w))
    return commutator(lyndon_bracket(u, order), lyndon_bracket(v, order), order)


class FreeLie:
    """The free Lie algebra on named degree-zero generators, truncated."""

    def __init__(self, gen_names, order):
        check_order(order)
        self.gen_names = list(gen_names)
        self.order = order
        self.lyndon = [w for w in lyndon_words(len(self.gen_names), order)]
        self._bracket_elems = {w: lyndon_bracket(w, order) for w in self.lyndon}
        # echelon of Lie elements per length, tagged with Lyndon coordinates
        self._lie_ech = Echelon(self._tag_order)
        for w in self.lyndon:
            v = dict(self._bracket_elems[w])
            v[("_lyn_", w)] = Fraction(1)
            self._lie_ech.insert(v)

    @staticmethod
    def _tag_order(k):
        if isinstance(k, tuple) and len(k) == 2 and k[0] == "_lyn_":
            return (1, len(k[1]), k[1])
        return (0, len(k), k)

    def gen(self, i) -> dict:
        return {(i,): Fraction(1)}

    def to_lyndon(self, x: dict):
        """Lyndon coordinates of a Lie element; None if not a Lie element."""
        res = self._lie_ech.reduce(dict(x))
        coords = {}
        leftover = {}
        for k, c in res.items():
            if isinstance(k, tuple) and len(k) == 2 and k[0] == "_lyn_":
                coords[k[1]] = -c
            else:
                leftover[k] = c
        if leftover:
            return None
        return coords

    def from_lyndon(self, coords) -> dict:
        out = {}
        for w, c in coords.items():
            out = vec_add(out, self._bracket_elems[tuple(w)], rat(c))
        return out

    def is_lie_element(self, x: dict) -> bool:
        return self.to_lyndon(x) is not None

    def graded_dims(self):
        dims = {}
        for w in self.lyndon:
            dims[len(w)] = dims.get(len(w), 0) + 1
        return dims


def series_repr(x: dict, gen_names):
    if not x:
        return "0"
    bits = []
    for w in sorted(x, key=lambda t: (len(t), t)):
        label = "1" if not w else "".join(gen_names[i] for i in w)
        bits.append("%s*%s" % (rat_str(x[w]), label))
    return " + ".join(bits)


def bracket_label(w, gen_names):
    """Lyndon word -> nested-bracket string like "[X,[X,Y]]"."""
    w = tuple(w)
    if len(w) == 1:
        return gen_names[w[0]]
    u, v = standard_factorization(w)
    return "[%s,%s]" % (bracket_label(u, gen_names), bracket_label(v, gen_names))


def parse_bracket(expr, gen_names):
    """Nested-bracket string -> expanded tensor series of the bracketing."""
    expr = expr.strip()
    if not expr.startswith("["):
        if expr not in gen_names:
            raise ValueError("unknown generator %r" % (expr,))
        return {(gen_names.index(expr),): Fraction(1)}
    if not expr.endswith("]"):
        raise ValueError("unbalanced bracket in %r" % (expr,))
    inner = expr[1:-1]
    depth = 0
    for i, ch in enumerate(inner):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        elif ch == "," and depth == 0:
            left = parse_bracket(inner[:i], gen_names)
            right = parse_bracket(inner[i + 1:], gen_names)
            order = max(max((len(w) for w in left), default=1)
                        + max((len(w) for w in right), default=1), 1)
            return commutator(left, right, order + 8)
    raise ValueError("no top-level comma in %r" % (expr,))


def lie_series_to_json(x: dict, free: "FreeLie"):
    """Lyndon-normal JSON form {"trunc": N, "terms": {label: coeff}}."""
    coords = free.to_lyndon(x)
    if coords is None:
        raise ValueError("not a Lie element")
    return {"trunc": free.order,
            "terms": {bracket_label(w, free.gen_names): rat_str(c)
                      for w, c in sorted(coords.items())}}


def lie_series_from_json(data, free: "FreeLie"):
    out = {}
    for label, c in data["terms"].items():
        br = parse_bracket(label, free.gen_names)
        out = vec_add(out, {w: v for w, v in br.items() if len(w) <= free.order},
                      rat(c))
    return out


# ---------------------------------------------------------------------
# Lie ideals, quotients and the enveloping quotient
# ---------------------------------------------------------------------

class LieIdealPresentation:
    """The Lie ideal generated by given Lie series inside a free Lie algebra.

    Generators may be non-homogeneous in word length (they carry tails);
    the per-length spans are computed by iterated ad-closure and kept in a
    triangular echelon so quotient normal forms are canonical.
    """

    def __init__(self, free: FreeLie, generators):
        self.free = free
        self.generators = [dict(g) for g in generators]
        order = free.order
        for g in self.generators:
            if not free.is_lie_element(g):
                raise ValueError("ideal generator is not a Lie element")
        # ad-closure: span{ ad_{x_{i1}} ... ad_{x_im} g } truncated
        self.span = Echelon(lambda k: (len(k), k))
        frontier = list(self.generators)
        for g in frontier:
            self.span.insert(g)
        while frontier:
            nxt = []
            for g in frontier:
                min_len = min((len(w) for w in g), default=order + 1)
                if min_len >= order:
                    continue
                for i in range(len(free.gen_names)):
                    h = commutator(free.gen(i), g, order)
                    if h and self.span.insert(h):
                        nxt.append(h)
            frontier = nxt

    def reduce(self, x: dict) -> dict:
        return self.span.reduce(dict(x))

    def contains(self, x: dict) -> bool:
        return not self.reduce(x)


class FiberLieAlgebra:
    """Nilpotent quotient u/I^k of a free Lie algebra modulo an ideal.

    The complement basis is chosen among Lyndon brackets by deterministic
    elimination by word length; brackets are reduced to that basis.
    """

    def __init__(self, free: FreeLie, ideal: LieIdealPresentation, k: int):
        if k < 2:
            raise ValueError("truncation order k must be >= 2")
        if k - 1 > free.order:
            raise ValueError("free Lie truncation too small for k")
        self.free = free
        self.ideal = ideal
        self.k = k
        # span of (ideal + words of length >= k), echelonized
        self._mod = Echelon(lambda key: (len(key), key))
        for row in ideal.span.basis():
            self._mod.insert({w: c for w, c in row.items() if len(w) < k})
        # pick complement basis among Lyndon brackets of length < k, and
        # tag their reduced forms so normal forms come out as coordinates
        self.basis = []
        indep = Echelon(lambda key: (len(key), key))
        self._coord_ech = Echelon(self._tag_order)
        for w in free.lyndon:
            if len(w) >= k:
                continue
            elem = {ww: c for ww, c in lyndon_bracket(w, free.order).items()
                    if len(ww) < k}
            red = self._mod.reduce(elem)
            if indep.insert(red):
                self.basis.append(w)
                tagged = dict(red)
                tagged[("_q_", w)] = Fraction(1)
                self._coord_ech.insert(tagged)

    @staticmethod
    def _tag_order(key):
        if isinstance(key, tuple) and len(key) == 2 and key[0] == "_q_":
            return (1, len(key[1]), key[1])
        return (0, len(key), key)

    def normal_form(self, x: dict) -> dict:
        """Image of a Lie series in u/I^k, as quotient-basis coordinates."""
        x = {w: c for w, c in x.items() if len(w) < self.k}
        res = self._coord_ech.reduce(self._mod.reduce(x))
        coords = {}
        for key, c in res.items():
            if isinstance(key, tuple) and len(key) == 2 and key[0] == "_q_":
                if key[1] in set(self.basis):
                    coords[key[1]] = -c
            elif c:
                raise ArithmeticError("element does not reduce to the quotient basis")
        return coords

    def bracket(self, coords_a, coords_b):
        a = self.free.from_lyndon(coords_a)
        b = self.free.from_lyndon(coords_b)
        return self.normal_form(commutator(a, b, self.free.order))

    def dim(self):
        return len(self.basis)

    def graded_dims(self):
        dims = {}
        for w in self.basis:
            dims[len(w)] = dims.get(len(w), 0) + 1
        return dims

    def check_jacobi(self):
        failures = []
        coords = [{w: Fraction(1)} for w in self.basis]
        for a, b, c in itertools.combinations(coords, 3):
            j = self.bracket(a, self.bracket(b, c))
            j = _coords_add(j, self.bracket(b, self.bracket(c, a)))
            j = _coords_add(j, self.bracket(c, self.bracket(a, b)))
            if j:
                failures.append((a, b, c, j))
        return failures


def _coords_add(a, b, coeff=Fraction(1)):
    out = dict(a)
    for k, v in b.items():
        s = out.get(k, Fraction(0)) + coeff * v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


class EnvelopingQuotient:
    """T(gens)/(two-sided ideal of R0), truncated by word length.

    This is the completed enveloping algebra of the fiber Lie algebra at
    truncated scale; transport values and holonomies live here.
    """

    def __init__(self, free: FreeLie, ideal: LieIdealPresentation, order: int):
        check_order(order)
        self.free = free
        self.order = order
        self.ideal = ideal
        self._mod = Echelon(lambda key: (len(key), key))
        num = len(free.gen_names)
        gens = [{w: c for w, c in g.items() if len(w) <= order}
                for g in ideal.generators]
        for g in gens:
            self._insert_two_sided(g, num)

    def _insert_two_sided(self, g, num_gens):
        min_len = min((len(w) for w in g), default=self.order + 1)
        frontier = [g]
        self._mod.insert(g)
        while frontier:
            nxt = []
            for v in frontier:
                vmin = min((len(w) for w in v), default=self.order + 1)
                if vmin >= self.order:
                    continue
                for i in range(num_gens):
                    left = tensor_mul({(i,): Fraction(1)}, v, self.order)
                    right = tensor_mul(v, {(i,): Fraction(1)}, self.order)
                    for h in (left, right):
                        if h and self._mod.insert(h):
                            nxt.append(h)
            frontier = nxt

    def reduce(self, x: dict) -> dict:
        return self._mod.reduce({w: c for w, c in x.items()
                                 if len(w) <= self.order})

    def eq(self, a: dict, b: dict) -> bool:
        return self.reduce(vec_add(a, b, Fraction(-1))) == {}

    def mul(self, a: dict, b: dict) -> dict:
        return self.reduce(tensor_mul(self.reduce(a), self.reduce(b), self.order))

    def exp(self, x: dict) -> dict:
        return self.reduce(tensor_exp(self.reduce(x), self.order))

    def log(self, t: dict) -> dict:
        return self.reduce(tensor_log(self.reduce(t), self.order))

    def inverse(self, t: dict) -> dict:
        if t.get(EMPTY) != 1:
            raise ValueError("only grouplike-style series are inverted")
        return self.exp(vec_scale(self.log(t), Fraction(-1)))

    def is_grouplike(self, t: dict) -> bool:
        """log(t) is a Lie element modulo the ideal span."""
        x = self.log(t)
        # solve x = lie + ideal: reduce x modulo (Lie span + ideal span)
        ech = Echelon(lambda key: (len(key), key))
        for w in self.free.lyndon:
            if len(w) > self.order:
                continue
            ech.insert({ww: c for ww, c in lyndon_bracket(w, self.order).items()
                        if len(ww) <= self.order})
        for row in self._mod.basis():
            ech.insert(dict(row))
        return not ech.reduce(x)
