"""Koszul sign engine, shuffles and tensor words.

This module is the single source of signs for the whole library: every
graded permutation, shuffle product and tensor-map evaluation routes
through :func:`koszul_sign`.

Permutations are 0-based tuples ``perm`` with the meaning "output slot j
holds the input element ``perm[j]``"; ``degrees[i]`` is the degree of input
element ``i``.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .scalars import ONE


def is_permutation(perm) -> bool:
    n = len(perm)
    return sorted(perm) == list(range(n))


def perm_sign(perm) -> int:
    """(-1)^inversions of the permutation."""
    sign = 1
    for j in range(len(perm)):
        for k in range(j + 1, len(perm)):
            if perm[j] > perm[k]:
                sign = -sign
    return sign


def koszul_sign(perm, degrees) -> Fraction:
    """Sign picked up by reordering graded elements along ``perm``.

    Each adjacent transposition of elements of degrees a, b contributes
    (-1)^{a*b}; the closed form is the product over inversion pairs.
    """
    if len(perm) != len(degrees):
        raise ValueError("koszul_sign: permutation/degree length mismatch")
    if not is_permutation(perm):
        raise ValueError("koszul_sign: not a bijection: %r" % (perm,))
    sign = 1
    for j in range(len(perm)):
        for k in range(j + 1, len(perm)):
            if perm[j] > perm[k] and (degrees[perm[j]] * degrees[perm[k]]) % 2:
                sign = -sign
    return Fraction(sign)


def antisym_sign(perm, degrees) -> Fraction:
    """sgn(perm) times the Koszul sign; the weight in antisymmetrizations."""
    return perm_sign(perm) * koszul_sign(perm, degrees)


def shuffles(p: int, q: int):
    """All (p,q)-shuffles as 0-based permutations of {0..p+q-1}.

    Output slot j holds input perm[j]; inputs 0..p-1 keep their relative
    order, as do inputs p..p+q-1.  Trivial shuffles (p=0 or q=0) are
    rejected, mirroring the "non-trivial shuffles" subspace.
    """
    if p < 1 or q < 1:
        raise ValueError("shuffles: p and q must be >= 1")
    out = []
    for positions in itertools.combinations(range(p + q), p):
        perm = [None] * (p + q)
        for i, pos in enumerate(positions):
            perm[pos] = i
        rest = iter(range(p, p + q))
        for j in range(p + q):
            if perm[j] is None:
                perm[j] = next(rest)
        out.append(tuple(perm))
    return out


class TensorWord(tuple):
    """A word in a tensor (co)algebra: a tuple of (label, degree) entries."""

    __slots__ = ()

    @property
    def degree(self) -> int:
        return sum(d for _, d in self)

    def degrees(self):
        return tuple(d for _, d in self)

    def __add__(self, other):  # concatenation
        return TensorWord(tuple.__add__(self, other))

    def __repr__(self):
        if not self:
            return "TensorWord()"
        return "|".join(str(label) for label, _ in self)


EMPTY_WORD = TensorWord()


def word(*entries) -> TensorWord:
    return TensorWord(tuple(entries))


def shuffle_product(a: TensorWord, b: TensorWord) -> dict:
    """Graded shuffle product as a formal sum {TensorWord: coefficient}.

    The empty word is the unit.  Signs come from inversions between the
    two blocks only, weighted by entry degrees.
    """
    if not a:
        return {TensorWord(b): ONE}
    if not b:
        return {TensorWord(a): ONE}
    entries = tuple(a) + tuple(b)
    degrees = tuple(d for _, d in entries)
    out: dict = {}
    for perm in shuffles(len(a), len(b)):
        w = TensorWord(tuple(entries[i] for i in perm))
        coeff = koszul_sign(perm, degrees)
        out[w] = out.get(w, 0) + coeff
        if out[w] == 0:
            del out[w]
    return out


def nontrivial_shuffle_words(entries):
    """All shuffle-product sums mu'(u, v) with u+v a fixed word ``entries``.

    Returns a list of formal sums, one for each proper split of the word;
    these span the non-trivial-shuffles subspace in the given word length.
    """
    entries = tuple(entries)
    sums = []
    for p in range(1, len(entries)):
        u = TensorWord(entries[:p])
        v = TensorWord(entries[p:])
        sums.append(shuffle_product(u, v))
    return sums


def deconcatenations(w: TensorWord, parts: int):
    """All ordered splittings of ``w`` into ``parts`` (possibly empty) words."""
    n = len(w)
    for cuts in itertools.combinations_with_replacement(range(n + 1), parts - 1):
        pieces = []
        prev = 0
        ok = True
        for c in cuts:
            if c < prev:
                ok = False
                break
            pieces.append(TensorWord(tuple(w)[prev:c]))
            prev = c
        if not ok:
            continue
        pieces.append(TensorWord(tuple(w)[prev:]))
        yield tuple(pieces)
