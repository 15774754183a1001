"""Convolution structures on Hom(T^c(V[1]), A) as truncated series.

A series is a word-indexed family of target elements: the word entries
are shifted-basis generators of the positively graded source, and the
series of degree r assigns to a word of shifted degree k a target element
of degree r + k.  Everything is truncated at a fixed word length, and
exceeding the truncation is a hard error, never silent.

The operations M_n convolve the target structure maps against the word
deconcatenation coproduct (with the alternating arity twist), the
skew-symmetrizations l_n follow, and Maurer-Cartan elements of degree 1
correspond to morphisms of infinity-structures.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .freelie import (EnvelopingQuotient, FiberLieAlgebra, FreeLie,
                      LieIdealPresentation, TruncationError, is_primitive)
from .graded import GradedVectorSpace
from .scalars import rat
from .signs import antisym_sign, shuffle_product, word
from .structures import (FiniteAlgebra, InfinityMorphism, delta_apply,
                         f_shifted, shift_sign)


class Generators:
    """Shifted generators of T^c(V[1]) for a positively graded source."""

    def __init__(self, space: GradedVectorSpace):
        if any(d <= 0 for d in space.degrees):
            raise ValueError("source must be positively graded")
        self.space = space
        self.keys = space.keys()           # (degree, name) in V
        self.shifted = [d - 1 for d, _ in self.keys]

    def index_of(self, key):
        return self.keys.index(key)

    def word_degree(self, w):
        return sum(self.shifted[i] for i in w)

    def words(self, max_len, max_degree=None, indices=None):
        idxs = range(len(self.keys)) if indices is None else indices
        for n in range(1, max_len + 1):
            for w in itertools.product(idxs, repeat=n):
                if max_degree is not None and self.word_degree(w) > max_degree:
                    continue
                yield w

    def degree_zero_indices(self):
        return [i for i, d in enumerate(self.shifted) if d == 0]

    def label(self, w):
        return "".join("[%s]" % self.keys[i][1] for i in w)


class TensorSeries:
    """Word-truncated element of the convolution algebra."""

    __slots__ = ("gens", "target", "trunc", "degree", "data")

    def __init__(self, gens: Generators, target, trunc: int, degree: int,
                 data=None):
        if trunc < 1:
            raise TruncationError("truncation order must be >= 1")
        self.gens = gens
        self.target = target
        self.trunc = trunc
        self.degree = degree
        self.data = {}
        if data:
            for w, val in data.items():
                w = tuple(w)
                if len(w) > trunc:
                    raise TruncationError("word beyond truncation order")
                if not target.is_zero(val):
                    self.data[w] = val

    def value(self, w):
        w = tuple(w)
        if len(w) > self.trunc:
            raise TruncationError("word beyond truncation order")
        return self.data.get(w, self.target.zero())

    def is_zero(self):
        return not self.data

    def support_order(self):
        """Least word length carrying a nonzero value (the I-filtration)."""
        return min((len(w) for w in self.data), default=None)

    def add(self, other, coeff=Fraction(1)):
        if other.trunc != self.trunc:
            raise TruncationError("truncation mismatch")
        out = dict(self.data)
        for w, val in other.data.items():
            cur = out.get(w)
            s = self.target.add(cur, val, coeff) if cur is not None \
                else self.target.scale(val, coeff)
            if self.target.is_zero(s):
                out.pop(w, None)
            else:
                out[w] = s
        return TensorSeries(self.gens, self.target, self.trunc, self.degree, out)

    def scale(self, c):
        c = rat(c)
        if not c:
            return TensorSeries(self.gens, self.target, self.trunc, self.degree)
        return TensorSeries(self.gens, self.target, self.trunc, self.degree,
                            {w: self.target.scale(v, c) for w, v in self.data.items()})

    def eq(self, other):
        return self.add(other, Fraction(-1)).is_zero()

    def __repr__(self):
        if not self.data:
            return "Series(0)"
        bits = []
        for w in sorted(self.data, key=lambda t: (len(t), t)):
            bits.append("%s: %r" % (self.gens.label(w), self.data[w]))
        return "Series{%s}" % "; ".join(bits)


# ---------------------------------------------------------------------
# the convolution operations
# ---------------------------------------------------------------------

def _splittings(w, parts):
    """Ordered splittings into possibly-empty consecutive subwords."""
    n = len(w)
    for cuts in itertools.combinations_with_replacement(range(n + 1), parts - 1):
        pieces = []
        prev = 0
        for c in cuts:
            pieces.append(w[prev:c])
            prev = c
        pieces.append(w[prev:])
        yield pieces


def conv_M(n, series_list, trunc=None):
    """M_n(f_1..f_n): the twisted target structure convolved along the
    deconcatenation coproduct.

    In the shifted conventions used throughout, the arity twist that
    makes degree-1 series with alpha(1) = 0 satisfy the Maurer-Cartan
    equation exactly when their coalgebra avatars are morphisms is a
    global minus on every arity (the degree-1 case m~_1 = -m_1 included);
    the correspondence is asserted jointly in the tests.
    """
    f0 = series_list[0]
    gens, target = f0.gens, f0.target
    if any(f.trunc != f0.trunc for f in series_list):
        raise TruncationError("conv_M: truncation mismatch")
    trunc = trunc if trunc is not None else f0.trunc
    degs = [f.degree for f in series_list]
    out_degree = sum(degs) + 2 - n
    out = {}
    for w in list(gens.words(trunc)) + [()]:
        total = target.zero()
        for pieces in _splittings(tuple(w), n):
            vals = []
            sign = 1
            dead = False
            for b, (f, u) in enumerate(zip(series_list, pieces)):
                if len(u) > f.trunc:
                    dead = True
                    break
                v = f.value(u) if u else f.data.get((), None)
                if v is None:
                    v = target.zero()
                if target.is_zero(v):
                    dead = True
                    break
                # Koszul: f_b passes the earlier subwords
                if degs[b] % 2 and sum(gens.word_degree(pieces[a])
                                       for a in range(b)) % 2:
                    sign = -sign
                vals.append(v)
            if dead:
                continue
            total = target.add(total, target.m(n, vals), Fraction(sign))
        if not target.is_zero(total):
            out[tuple(w)] = target.scale(total, Fraction(-1))
    return TensorSeries(gens, target, trunc, out_degree, out)


def source_delta(gens: Generators, source: FiniteAlgebra, w, trunc):
    """The coderivation of the source structure applied to a word.

    Returns {word: coeff}; entries are expanded through the shifted
    dictionary of the source structure maps.
    """
    out = {}
    w = tuple(w)
    n = len(w)
    degs = [gens.keys[i][0] for i in w]
    for q in range(1, n + 1):
        for p in range(0, n - q + 1):
            sub = w[p:p + q]
            if hasattr(source, "in_window") and \
                    not source.in_window(q, [gens.keys[i] for i in sub]):
                continue
            sign = -1 if sum(d - 1 for d in degs[:p]) % 2 else 1
            elems = [{gens.keys[i]: Fraction(1)} for i in sub]
            val = delta_apply(source, q, elems, degs[p:p + q])
            for key, c in val.items():
                j = gens.index_of(key)
                w2 = w[:p] + (j,) + w[p + q:]
                s = out.get(w2, Fraction(0)) + sign * c
                if s:
                    out[w2] = s
                else:
                    out.pop(w2, None)
    return out


def conv_partial(f: TensorSeries, source: FiniteAlgebra) -> TensorSeries:
    """partial(f) = -m_1 f - (-1)^{|f|} f o delta."""
    gens, target = f.gens, f.target
    out = {}
    for w, val in f.data.items():
        dv = target.scale(target.m(1, [val]), Fraction(-1))
        if not target.is_zero(dv):
            out[w] = dv
    sgn = Fraction(-((-1) ** f.degree))
    for w in gens.words(f.trunc):
        total = target.zero()
        for w2, c in source_delta(gens, source, w, f.trunc).items():
            v = f.data.get(w2)
            if v is not None:
                total = target.add(total, v, c)
        if not target.is_zero(total):
            cur = out.get(tuple(w))
            s = target.add(cur, total, sgn) if cur is not None \
                else target.scale(total, sgn)
            if target.is_zero(s):
                out.pop(tuple(w), None)
            else:
                out[tuple(w)] = s
    return TensorSeries(gens, target, f.trunc, f.degree + 1, out)


def conv_l(n, series_list, source: FiniteAlgebra):
    """The skew-symmetrized convolution operations; l_1 is partial."""
    if n == 1:
        return conv_partial(series_list[0], source)
    f0 = series_list[0]
    degs = [f.degree for f in series_list]
    out = TensorSeries(f0.gens, f0.target, f0.trunc, sum(degs) + 2 - n)
    for perm in itertools.permutations(range(n)):
        chi = antisym_sign(perm, degs)
        term = conv_M(n, [series_list[p] for p in perm])
        out = out.add(term, chi)
    return out


class ConvolutionAlgebra:
    """Carrier adapter so the generic skew-relation checker applies."""

    def __init__(self, gens, target, source, trunc):
        self.gens = gens
        self.target = target
        self.source = source
        self.trunc = trunc

    def zero(self):
        return TensorSeries(self.gens, self.target, self.trunc, 0)

    def add(self, a, b, coeff=Fraction(1)):
        return a.add(b, coeff)

    def scale(self, a, c):
        return a.scale(c)

    def is_zero(self, a):
        return a.is_zero()

    def degree(self, a):
        return a.degree

    def m(self, k, elems):
        return conv_l(k, list(elems), self.source)

    def series(self, degree, data=None):
        return TensorSeries(self.gens, self.target, self.trunc, degree, data)


def mc_defect(alpha: TensorSeries, source: FiniteAlgebra) -> TensorSeries:
    """partial(alpha) + sum_k l_k(alpha..alpha)/k!, via M_k for odd alpha."""
    if alpha.degree != 1:
        raise ValueError("Maurer-Cartan elements have degree 1")
    if alpha.data.get(()) is not None:
        raise ValueError("alpha(1) must vanish")
    out = conv_partial(alpha, source)
    for k in range(2, alpha.trunc + 1):
        term = conv_M(k, [alpha] * k)
        if term.is_zero():
            continue
        out = out.add(term)
    return out


def mc_check(alpha: TensorSeries, source: FiniteAlgebra):
    """Report of failing words for the Maurer-Cartan equation."""
    defect = mc_defect(alpha, source)
    return [(w, defect.data[w]) for w in sorted(defect.data,
                                                key=lambda t: (len(t), t))]


# ---------------------------------------------------------------------
# the dictionary between morphisms and Maurer-Cartan elements
# ---------------------------------------------------------------------

def morphism_to_mc(f: InfinityMorphism, gens: Generators, trunc: int) -> TensorSeries:
    """alpha(w) = (shift dictionary) f_n on the unshifted entries."""
    target = f.target
    data = {}
    for w in gens.words(trunc):
        keys = [gens.keys[i] for i in w]
        elems = [{k: Fraction(1)} for k in keys]
        val = f_shifted(f, len(w), elems, [k[0] for k in keys])
        if not target.is_zero(val):
            data[tuple(w)] = val
    return TensorSeries(gens, target, trunc, 1, data)


def mc_to_morphism(alpha: TensorSeries, source: FiniteAlgebra) -> InfinityMorphism:
    """The table-backed morphism with components read off the series."""
    gens = alpha.gens
    tables = {}
    for w, val in alpha.data.items():
        if not w:
            continue
        keys = tuple(gens.keys[i] for i in w)
        sign = shift_sign([k[0] for k in keys])
        tables.setdefault(len(w), {})[keys] = alpha.target.scale(val, sign)
    return InfinityMorphism(source, alpha.target, tables=tables,
                            arity_cap=alpha.trunc)


def check_reduced(alpha: TensorSeries):
    """alpha kills non-trivial shuffles (membership in the reduced part)."""
    gens, target = alpha.gens, alpha.target
    failures = []
    for w in gens.words(alpha.trunc):
        for p in range(1, len(w)):
            entries = tuple((i, gens.shifted[i]) for i in w)
            total = target.zero()
            for sh_word, coeff in shuffle_product(word(*entries[:p]),
                                                  word(*entries[p:])).items():
                ww = tuple(lab for lab, _ in sh_word)
                v = alpha.data.get(ww)
                if v is not None:
                    total = target.add(total, v, coeff)
            if not target.is_zero(total):
                failures.append((tuple(w), p))
    return failures


# ---------------------------------------------------------------------
# delta-star, the Lie ideal and the fiber Lie algebra
# ---------------------------------------------------------------------

def delta_star(mW: FiniteAlgebra, trunc: int):
    """Dual of the minimal codifferential on degree-one duals.

    For each degree-2 basis element the emitted series collects the
    structure constants of m_n on degree-1 inputs; the result lives in
    the free Lie algebra on the degree-1 duals (primitivity is verified).
    Returns (FreeLie, LieIdealPresentation, generator dict).
    """
    if mW.maps.get(1):
        raise ValueError("delta_star needs a minimal structure (m_1 = 0)")
    one_keys = mW.space.keys(1)
    two_keys = mW.space.keys(2)
    free = FreeLie([name for _, name in one_keys], trunc)
    gens_out = {key: {} for key in two_keys}
    for n in range(2, mW.arity_cap + 1):
        table = mW.maps.get(n, {})
        for wrd, val in table.items():
            if any(k not in one_keys for k in wrd):
                continue
            w = tuple(one_keys.index(k) for k in wrd)
            if len(w) > trunc:
                continue
            for key, c in val.items():
                if key in gens_out:
                    cur = gens_out[key]
                    s = cur.get(w, Fraction(0)) + c
                    if s:
                        cur[w] = s
                    else:
                        cur.pop(w, None)
    generators = []
    for key in two_keys:
        g = gens_out[key]
        if g:
            if not is_primitive(g, trunc):
                raise ValueError("delta-star image is not primitive: %r" % (key,))
            generators.append(g)
    ideal = LieIdealPresentation(free, generators)
    return free, ideal, gens_out


def fiber_quotient(free: FreeLie, ideal: LieIdealPresentation, k: int) -> FiberLieAlgebra:
    return FiberLieAlgebra(free, ideal, k)


# ---------------------------------------------------------------------
# degree-zero reduction and functoriality
# ---------------------------------------------------------------------

def degree_zero_restrict(alpha: TensorSeries) -> TensorSeries:
    """Restriction to words in the degree-zero shifted generators."""
    zero_idx = set(alpha.gens.degree_zero_indices())
    data = {w: v for w, v in alpha.data.items()
            if all(i in zero_idx for i in w)}
    return TensorSeries(alpha.gens, alpha.target, alpha.trunc, alpha.degree, data)


def reduce_mod_ideal(alpha: TensorSeries, env: EnvelopingQuotient,
                     index_map) -> dict:
    """Quotient normal form: {reduced word: target element}.

    ``index_map`` sends series generator indices to enveloping generator
    indices (only degree-zero generators may map).
    """
    out = {}
    for w, val in alpha.data.items():
        ww = tuple(index_map[i] for i in w)
        red = env.reduce({ww: Fraction(1)})
        for w2, c in red.items():
            cur = out.get(w2)
            s = alpha.target.add(cur, val, c) if cur is not None \
                else alpha.target.scale(val, c)
            if alpha.target.is_zero(s):
                out.pop(w2, None)
            else:
                out[w2] = s
    return out


def series_eq_mod_ideal(a: TensorSeries, b: TensorSeries,
                        env: EnvelopingQuotient, index_map) -> bool:
    ra = reduce_mod_ideal(a, env, index_map)
    rb = reduce_mod_ideal(b, env, index_map)
    keys = set(ra) | set(rb)
    for k in keys:
        diff = a.target.add(ra.get(k, a.target.zero()),
                            a.target.scale(rb.get(k, a.target.zero()), Fraction(-1)))
        if not a.target.is_zero(diff):
            return False
    return True


def pullback_along(k_mor: InfinityMorphism, alpha: TensorSeries,
                   gens_src: Generators) -> TensorSeries:
    """Precomposition with the coalgebra morphism of k: W -> V.

    alpha is a series over V-generators; the result is over W-generators.
    The shifted morphism components are even, so no signs appear beyond
    the shift dictionary inside each component.
    """
    gens_v = alpha.gens
    target = alpha.target
    data = {}
    for w in gens_src.words(alpha.trunc):
        keys = [gens_src.keys[i] for i in w]
        total = target.zero()
        for parts in range(1, len(w) + 1):
            for pieces in _splittings(tuple(w), parts):
                if any(not u for u in pieces):
                    continue
                # each block maps through k to a vector of V-generators
                block_vecs = []
                dead = False
                for u in pieces:
                    elems = [{keys_u: Fraction(1)}
                             for keys_u in (gens_src.keys[i] for i in u)]
                    degs = [gens_src.keys[i][0] for i in u]
                    vec = f_shifted(k_mor, len(u), elems, degs)
                    if not vec:
                        dead = True
                        break
                    block_vecs.append(vec)
                if dead:
                    continue
                for combo in itertools.product(*[list(v.items()) for v in block_vecs]):
                    coeff = Fraction(1)
                    target_word = []
                    for key, c in combo:
                        coeff *= c
                        target_word.append(gens_v.index_of(key))
                    v = alpha.data.get(tuple(target_word))
                    if v is not None:
                        total = target.add(total, v, coeff)
        if not target.is_zero(total):
            data[tuple(w)] = total
    return TensorSeries(gens_src, target, alpha.trunc, alpha.degree, data)


def pushforward_along(h_mor: InfinityMorphism, alpha: TensorSeries,
                      new_target) -> TensorSeries:
    """Postcomposition with an infinity-morphism of the target."""
    gens = alpha.gens
    data = {}
    for w in gens.words(alpha.trunc):
        total = new_target.zero()
        for parts in range(1, len(w) + 1):
            for pieces in _splittings(tuple(w), parts):
                if any(not u for u in pieces):
                    continue
                vals = []
                degs = []
                dead = False
                for u in pieces:
                    v = alpha.data.get(tuple(u))
                    if v is None:
                        dead = True
                        break
                    vals.append(v)
                    degs.append(alpha.degree + gens.word_degree(u))
                if dead:
                    continue
                out = f_shifted(h_mor, parts, vals, degs)
                total = new_target.add(total, out)
        if not new_target.is_zero(total):
            data[tuple(w)] = total
    return TensorSeries(gens, new_target, alpha.trunc, alpha.degree, data)


# ---------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------

def check_filtration_additive(series_list, source, max_n=3):
    """l_k raises the support order at least additively."""
    failures = []
    for k in range(2, max_n + 1):
        for combo in itertools.combinations(series_list, k):
            orders = [f.support_order() for f in combo]
            if any(o is None for o in orders):
                continue
            out = conv_l(k, list(combo), source)
            oo = out.support_order()
            if oo is not None and oo < sum(orders):
                failures.append((orders, oo))
    return failures
