"""Multiplicative infinity-structures and their relation checkers.

Algebra carriers share one informal protocol: ``zero()``, ``add``,
``scale``, ``is_zero``, ``degree`` (None for zero/mixed) and ``m(k,
elems)``.  Finite carriers (sparse structure-constant tables over a
named basis) additionally enumerate basis vectors, which makes the
checkers exhaustive at small arity.

Relations are evaluated in the unrestricted form: for structures,

    sum_{p+q+r=n, q>=1} (-1)^{p+qr} m_{p+1+r} o (Id^p x m_q x Id^r) = 0,

which folds the differential terms of the split formulation into the
same sum; a differential graded algebra passes on the nose, and all
transferred structures are checked against this single convention.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .forms import PolyForm
from .graded import GradedVectorSpace, vector_degree
from .linalg import vec_add, vec_scale
from .scalars import rat
from .signs import antisym_sign, shuffle_product, word


class AlgebraBase:
    """Shared no-op defaults for algebra carriers over dict-vectors."""

    def zero(self):
        return {}

    def add(self, a, b, coeff=Fraction(1)):
        return vec_add(a, b, coeff)

    def scale(self, a, c):
        return vec_scale(a, rat(c))

    def is_zero(self, a):
        return not a

    def degree(self, a):
        return vector_degree(a)


class FormsAlgebra:
    """The polynomial-forms dga on the n-simplex as an infinity-target."""

    def __init__(self, n):
        self.n = n

    def zero(self):
        return PolyForm.zero(self.n)

    def one(self):
        return PolyForm.one(self.n)

    def add(self, a, b, coeff=Fraction(1)):
        return a + b.scale(coeff)

    def scale(self, a, c):
        return a.scale(c)

    def is_zero(self, a):
        return a.is_zero()

    def degree(self, a):
        return a.homogeneous_degree()

    def m(self, k, elems):
        if k == 1:
            return elems[0].d()
        if k == 2:
            return elems[0].wedge(elems[1])
        return PolyForm.zero(self.n)


class FiniteAlgebra(AlgebraBase):
    """Arity-indexed structure maps on a finite-type graded space.

    ``maps[k]`` is {input word (tuple of basis keys): {output key: coeff}};
    m_k has degree 2 - k (checked on insertion).  ``kind`` is one of
    "Ainf", "Cinf", "Linf", "1Ainf", "1Cinf"; 1-truncated kinds carry the
    degree window on which their relations are imposed.
    """

    KINDS = ("Ainf", "Cinf", "Linf", "1Ainf", "1Cinf")

    def __init__(self, space: GradedVectorSpace, kind="Ainf", arity_cap=6,
                 maps=None, unit_key=None):
        if kind not in self.KINDS:
            raise ValueError("unknown kind %r" % (kind,))
        self.space = space
        self.kind = kind
        self.arity_cap = arity_cap
        self.unit_key = unit_key
        self.maps = {}
        if maps:
            for k, table in maps.items():
                for w, out in table.items():
                    self.set_value(k, w, out)

    # -- construction ---------------------------------------------------
    def set_value(self, k, input_word, output_vec):
        input_word = tuple(input_word)
        if len(input_word) != k:
            raise ValueError("arity mismatch")
        out = {key: rat(c) for key, c in output_vec.items() if rat(c)}
        if not out:
            self.maps.get(k, {}).pop(input_word, None)
            return
        in_deg = sum(key[0] for key in input_word)
        for key in out:
            if key[0] != in_deg + 2 - k:
                raise ValueError("m_%d value at %r breaks degree 2-k" % (k, input_word))
        self.maps.setdefault(k, {})[input_word] = out

    @classmethod
    def from_dga(cls, space, diff_blocks, products, kind="Cinf", arity_cap=6,
                 unit_key=None):
        """Build from a differential and binary-product table."""
        alg = cls(space, kind=kind, arity_cap=arity_cap, unit_key=unit_key)
        for src, col in diff_blocks.items():
            alg.set_value(1, (src,), col)
        for (a, b), out in products.items():
            alg.set_value(2, (a, b), out)
        return alg

    # -- protocol ---------------------------------------------------------
    def one(self):
        if self.unit_key is None:
            raise ValueError("algebra has no unit")
        return {self.unit_key: Fraction(1)}

    def m(self, k, elems):
        if len(elems) != k:
            raise ValueError("arity mismatch")
        table = self.maps.get(k)
        if not table:
            return {}
        out = {}
        for combo in itertools.product(*[list(e.items()) for e in elems]):
            wrd = tuple(key for key, _ in combo)
            coeff = Fraction(1)
            for _, c in combo:
                coeff *= c
            val = table.get(wrd)
            if val:
                out = vec_add(out, val, coeff)
        return out

    def basis_vectors(self, degrees=None):
        keys = self.space.keys()
        if degrees is not None:
            keys = [k for k in keys if k[0] in degrees]
        return [{k: Fraction(1)} for k in keys]

    def basis_words(self, arity, degrees=None, window=None):
        keys = self.space.keys()
        if degrees is not None:
            keys = [k for k in keys if k[0] in degrees]
        for combo in itertools.product(keys, repeat=arity):
            if window is not None and sum(k[0] for k in combo) > window:
                continue
            yield tuple({k: Fraction(1)} for k in combo)

    def in_window(self, arity, word_keys):
        """1-truncated structures act only below total degree arity+1."""
        if self.kind in ("1Ainf", "1Cinf"):
            return sum(k[0] for k in word_keys) <= arity
        return True

    def to_json(self):
        out = {"kind": self.kind, "arity_cap": self.arity_cap,
               "space": self.space.to_json(), "maps": {}}
        if self.unit_key is not None:
            out["unit"] = list(self.unit_key)
        for k in sorted(self.maps):
            entries = []
            for wrd, val in sorted(self.maps[k].items()):
                for key, c in sorted(val.items()):
                    entries.append({"in": [[d, n] for d, n in wrd],
                                    "out": [key[0], key[1]],
                                    "coeff": str(c)})
            out["maps"][str(k)] = entries
        return out

    @classmethod
    def from_json(cls, data):
        space = GradedVectorSpace.from_json(data["space"])
        unit = tuple(data["unit"]) if "unit" in data else None
        alg = cls(space, kind=data["kind"], arity_cap=data["arity_cap"],
                  unit_key=unit)
        for k, entries in data["maps"].items():
            k = int(k)
            acc = {}
            for e in entries:
                wrd = tuple((int(d), n) for d, n in e["in"])
                key = (int(e["out"][0]), e["out"][1])
                acc.setdefault(wrd, {})[key] = rat(e["coeff"])
            for wrd, val in acc.items():
                alg.set_value(k, wrd, val)
        return alg


# ---------------------------------------------------------------------
# element/probe helpers
# ---------------------------------------------------------------------

def probe_degrees(alg, elems):
    return [alg.degree(e) for e in elems]


def shift_sign(degrees):
    """Sign of (s^{-1})^{x k} on the shift of elements of these degrees.

    Conjugating m_k to the coalgebra component delta_k = s o m_k o
    (s^{-1})^{x k} produces, on the shifted word s x_1 (x) ... (x) s x_k,
    the sign (-1)^{sum_j (k-j)(d_j - 1)}.  The same sign converts back.
    """
    k = len(degrees)
    e = sum((k - j - 1) * (degrees[j] - 1) for j in range(k))
    return -1 if e % 2 else 1


def delta_apply(alg, k, elems, degs=None):
    """The shifted structure component delta_k evaluated on carrier elements.

    Elements stand for their images under the shift; the returned carrier
    element stands for its shift as well (shifted degree = degree - 1).
    """
    if degs is None:
        degs = [alg.degree(e) for e in elems]
    sign = shift_sign(degs)
    out = alg.m(k, elems)
    return out if sign == 1 else alg.scale(out, -1)


def _inner_delta(alg, n, elems, degs):
    """Yield (coeff, replaced elements, replaced degrees, outer arity) for
    Id^p (x) delta_q (x) Id^r in the shifted picture; delta_q is odd, so
    it picks up the shifted degrees of the first p entries."""
    for q in range(1, n + 1):
        for p in range(0, n - q + 1):
            r = n - p - q
            sign = 1
            if sum(d - 1 for d in degs[:p]) % 2:
                sign = -1
            inner = delta_apply(alg, q, elems[p:p + q], degs[p:p + q])
            if alg.is_zero(inner):
                continue
            new_elems = list(elems[:p]) + [inner] + list(elems[p + q:])
            new_degs = list(degs[:p]) + [sum(degs[p:p + q]) + 2 - q] + list(degs[p + q:])
            yield Fraction(sign), new_elems, new_degs, p + 1 + r


def stasheff_defect(alg, elems):
    """delta^2 = 0 evaluated on one probe word (shifted picture)."""
    n = len(elems)
    degs = probe_degrees(alg, elems)
    if any(d is None for d in degs):
        raise ValueError("probes must be homogeneous and nonzero")
    total = alg.zero()
    for coeff, new_elems, new_degs, k in _inner_delta(alg, n, elems, degs):
        total = alg.add(total, delta_apply(alg, k, new_elems, new_degs), coeff)
    return total


def check_stasheff(alg, probes, max_report=10):
    """Evaluate the structure relations on each probe word; list failures."""
    failures = []
    for elems in probes:
        if hasattr(alg, "in_window"):
            keys = [next(iter(e)) for e in elems if isinstance(e, dict)]
            if len(keys) == len(elems) and not alg.in_window(len(elems) - 1, keys):
                continue
        defect = stasheff_defect(alg, list(elems))
        if not alg.is_zero(defect):
            failures.append((tuple_repr(elems), defect))
            if len(failures) >= max_report:
                break
    return failures


def tuple_repr(elems):
    bits = []
    for e in elems:
        if isinstance(e, dict) and len(e) == 1:
            ((d, n), c), = e.items()
            bits.append("%s%s" % (n, "" if c == 1 else "*%s" % c))
        else:
            bits.append(repr(e))
    return "(" + ", ".join(bits) + ")"


def check_shuffle_vanishing(alg, arity_cap, degrees=None, max_report=10):
    """All m_k vanish on images of non-trivial shuffle products."""
    if getattr(alg, "kind", None) not in ("Cinf", "1Cinf"):
        raise ValueError("shuffle vanishing only applies to Cinf kinds")
    failures = []
    keys = alg.space.keys()
    if degrees is not None:
        keys = [k for k in keys if k[0] in degrees]
    for k in range(2, arity_cap + 1):
        for entries in itertools.product(keys, repeat=k):
            if not alg.in_window(k, entries):
                continue
            # the shuffles live in the shifted word, so entry degrees and
            # the evaluation both use the shifted dictionary
            wrd = word(*[(key, key[0] - 1) for key in entries])
            for p in range(1, k):
                total = alg.zero()
                shuffled = shuffle_product(word(*tuple(wrd)[:p]), word(*tuple(wrd)[p:]))
                for shuffled_word, coeff in shuffled.items():
                    elems = [{lab: Fraction(1)} for lab, _ in shuffled_word]
                    degs = [lab[0] for lab, _ in shuffled_word]
                    total = alg.add(total, delta_apply(alg, k, elems, degs), coeff)
                if not alg.is_zero(total):
                    failures.append((entries, p, total))
                    if len(failures) >= max_report:
                        return failures
    return failures


# ---------------------------------------------------------------------
# morphisms
# ---------------------------------------------------------------------

class InfinityMorphism:
    """Arity-indexed components f_k of degree 1-k between carriers.

    Components are either sparse tables {input word: target element}
    (finite sources) or callables taking a list of source elements.
    """

    def __init__(self, source, target, components=None, tables=None,
                 arity_cap=6):
        self.source = source
        self.target = target
        self.arity_cap = arity_cap
        self.components = dict(components or {})
        self.tables = {int(k): dict(v) for k, v in (tables or {}).items()}

    def apply(self, k, elems):
        if k in self.components:
            return self.components[k](list(elems))
        table = self.tables.get(k)
        if not table:
            return self.target.zero()
        out = self.target.zero()
        for combo in itertools.product(*[list(e.items()) for e in elems]):
            wrd = tuple(key for key, _ in combo)
            coeff = Fraction(1)
            for _, c in combo:
                coeff *= c
            val = table.get(wrd)
            if val is not None:
                out = self.target.add(out, val, coeff)
        return out

    @classmethod
    def identity(cls, alg):
        return cls(alg, alg, components={1: lambda es: es[0]})

    @classmethod
    def strict(cls, source, target, fn):
        return cls(source, target, components={1: lambda es: fn(es[0])})


def f_shifted(f: InfinityMorphism, k, elems, degs):
    """Shifted morphism component F_k on carrier elements (even degree)."""
    sign = shift_sign(degs)
    out = f.apply(k, elems)
    return out if sign == 1 else f.target.scale(out, -1)


def morphism_defect(f: InfinityMorphism, elems):
    """F delta = delta F evaluated on one probe word (shifted picture).

    The shifted components F_k are even, so the splitting side carries no
    Koszul signs at all; all signs come from delta being odd and from the
    shift dictionary.
    """
    n = len(elems)
    src, tgt = f.source, f.target
    degs = [src.degree(e) for e in elems]
    if any(d is None for d in degs):
        raise ValueError("probes must be homogeneous and nonzero")
    lhs = tgt.zero()
    for coeff, new_elems, new_degs, k in _inner_delta(src, n, elems, degs):
        lhs = tgt.add(lhs, f_shifted(f, k, new_elems, new_degs), coeff)
    rhs = tgt.zero()
    for k in range(1, n + 1):
        for arities in compositions(n, k):
            pos = 0
            values = []
            value_degs = []
            dead = False
            for i in arities:
                block = elems[pos:pos + i]
                block_degs = degs[pos:pos + i]
                pos += i
                values.append(f_shifted(f, i, block, block_degs))
                value_degs.append(sum(block_degs) + 1 - i)
            if any(tgt.is_zero(v) for v in values):
                continue
            rhs = tgt.add(rhs, delta_apply(tgt, k, values, value_degs))
    return tgt.add(lhs, rhs, Fraction(-1))


def compositions(n, k):
    """Ordered splittings of n into k positive parts."""
    if k == 1:
        yield (n,)
        return
    for first in range(1, n - k + 2):
        for rest in compositions(n - first, k - 1):
            yield (first,) + rest


def check_morphism(f: InfinityMorphism, probes, max_report=10):
    failures = []
    for elems in probes:
        defect = morphism_defect(f, list(elems))
        if not f.target.is_zero(defect):
            failures.append((tuple_repr(elems), defect))
            if len(failures) >= max_report:
                break
    return failures


# ---------------------------------------------------------------------
# antisymmetrization and the skew relations
# ---------------------------------------------------------------------

def antisymmetrize(alg: FiniteAlgebra) -> FiniteAlgebra:
    """l_n := sum over permutations of sgn * Koszul * m_n^sigma."""
    if alg.kind not in ("Ainf", "Cinf"):
        raise ValueError("antisymmetrize expects an associative-flavor input")
    out = FiniteAlgebra(alg.space, kind="Linf", arity_cap=alg.arity_cap,
                        unit_key=None)
    for k, table in alg.maps.items():
        # candidate input words: permutations of the stored ones
        seen = set()
        for wrd in table:
            for perm in itertools.permutations(range(k)):
                seen.add(tuple(wrd[j] for j in perm))
        for src in seen:
            degs = [key[0] for key in src]
            total = {}
            for perm in itertools.permutations(range(k)):
                val = table.get(tuple(src[p] for p in perm))
                if not val:
                    continue
                total = vec_add(total, val, antisym_sign(perm, degs))
            if total:
                out.set_value(k, src, total)
    return out


def perm_inverse(perm):
    inv = [0] * len(perm)
    for j, p in enumerate(perm):
        inv[p] = j
    return tuple(inv)


def linfty_defect(alg, elems):
    """The skew-symmetric relation on one probe word.

    sum_{p+q=n+1} sum_{|S|=q} (-1)^{(p-1)q} chi(sigma_S) l_p(l_q(x_S), x_rest).
    """
    n = len(elems)
    degs = probe_degrees(alg, elems)
    if any(d is None for d in degs):
        raise ValueError("probes must be homogeneous and nonzero")
    total = alg.zero()
    for q in range(1, n + 1):
        p = n + 1 - q
        for S in itertools.combinations(range(n), q):
            rest = [j for j in range(n) if j not in S]
            perm = tuple(S) + tuple(rest)
            chi = antisym_sign(perm, degs)
            inner = alg.m(q, [elems[j] for j in S])
            if alg.is_zero(inner):
                continue
            outer = alg.m(p, [inner] + [elems[j] for j in rest])
            sign = chi * ((-1) ** ((p - 1) * q))
            total = alg.add(total, outer, Fraction(sign))
    return total


def check_linfty(alg, probes, max_report=10):
    failures = []
    for elems in probes:
        defect = linfty_defect(alg, list(elems))
        if not alg.is_zero(defect):
            failures.append((tuple_repr(elems), defect))
            if len(failures) >= max_report:
                break
    return failures


def check_unitality(alg: FiniteAlgebra, max_report=10):
    """m2(1,a)=a=m2(a,1); m_k with a unit argument vanishes for k>=3."""
    failures = []
    one = alg.one()
    for v in alg.basis_vectors():
        if not alg.is_zero(vec_add(alg.m(2, [one, v]), v, Fraction(-1))):
            failures.append(("m2(1,a) != a", tuple_repr([v])))
        if not alg.is_zero(vec_add(alg.m(2, [v, one]), v, Fraction(-1))):
            failures.append(("m2(a,1) != a", tuple_repr([v])))
    for k in range(3, alg.arity_cap + 1):
        if k not in alg.maps:
            continue
        for wrd in alg.maps[k]:
            for slot in range(k):
                elems = [{key: Fraction(1)} for key in wrd]
                elems[slot] = one
                if not alg.is_zero(alg.m(k, elems)):
                    failures.append(("m_%d with unit nonzero" % k, wrd, slot))
                    if len(failures) >= max_report:
                        return failures
    return failures


# ---------------------------------------------------------------------
# interval tensoring and homotopies
# ---------------------------------------------------------------------

class IntervalAlgebra:
    """Omega(1) tensor A, elements {(t-exponent, has_dt): A-element}."""

    def __init__(self, base):
        self.base = base

    def zero(self):
        return {}

    def add(self, a, b, coeff=Fraction(1)):
        out = {k: v for k, v in a.items()}
        for k, v in b.items():
            s = self.base.add(out.get(k, self.base.zero()), v, coeff)
            if self.base.is_zero(s):
                out.pop(k, None)
            else:
                out[k] = s
        return out

    def scale(self, a, c):
        c = rat(c)
        if not c:
            return {}
        return {k: self.base.scale(v, c) for k, v in a.items()}

    def is_zero(self, a):
        return all(self.base.is_zero(v) for v in a.values())

    def degree(self, a):
        degs = set()
        for (e, dt), v in a.items():
            if self.base.is_zero(v):
                continue
            d = self.base.degree(v)
            if d is None:
                return None
            degs.add(d + (1 if dt else 0))
        if len(degs) == 1:
            return degs.pop()
        return None

    def include(self, a):
        """A-element -> 1 (x) a."""
        return {(0, False): a}

    def from_poly_pairs(self, pairs):
        """[(t-exp, has_dt, A-element)] -> element."""
        out = {}
        for e, dt, v in pairs:
            out = self.add(out, {(e, bool(dt)): v})
        return out

    def m(self, k, elems):
        if k == 1:
            out = {}
            for (e, dt), v in elems[0].items():
                # d(t^e) (x) v
                if e > 0 and not dt:
                    out = self.add(out, {(e - 1, True): self.base.scale(v, e)})
                # +/- t^e (x) d v
                sign = -1 if dt else 1
                dv = self.base.m(1, [v])
                if not self.base.is_zero(dv):
                    out = self.add(out, {(e, dt): dv}, Fraction(sign))
            return out
        out = {}
        for combo in itertools.product(*[list(e.items()) for e in elems]):
            exps = 0
            dt_count = 0
            sign = 1
            adegs = []
            pdegs = []
            vals = []
            dead = False
            for (e, dt), v in combo:
                exps += e
                if dt:
                    dt_count += 1
                pdegs.append(1 if dt else 0)
                d = self.base.degree(v)
                if d is None:
                    dead = True
                    break
                adegs.append(d)
                vals.append(v)
            if dead or dt_count > 1:
                continue
            # Koszul: pull the Omega(1) factors left past the A factors,
            # and across each other (the dt ordering among p's)
            for i in range(len(combo)):
                if pdegs[i] % 2 and sum(adegs[:i]) % 2:
                    sign = -sign
            inner = self.base.m(k, vals)
            if self.base.is_zero(inner):
                continue
            out = self.add(out, {(exps, dt_count == 1): inner}, Fraction(sign))
        return out

    def evaluate(self, a, value):
        """Strict evaluation t -> value in {0, 1}, dt -> 0.

        The generator t is the barycentric coordinate of vertex 0, so the
        evaluation i_0 at vertex 0 substitutes t = 1 and i_1 substitutes
        t = 0.
        """
        out = self.base.zero()
        for (e, dt), v in a.items():
            if dt:
                continue
            if value == 0:
                if e == 0:
                    out = self.base.add(out, v)
            else:
                out = self.base.add(out, v)
        return out


def interval_tensor(alg):
    """The tensored carrier plus the two strict endpoint evaluations i_0, i_1."""
    omega_a = IntervalAlgebra(alg)
    ev0 = InfinityMorphism(omega_a, alg,
                           components={1: lambda es: omega_a.evaluate(es[0], 1)})
    ev1 = InfinityMorphism(omega_a, alg,
                           components={1: lambda es: omega_a.evaluate(es[0], 0)})
    return omega_a, ev0, ev1


class Homotopy:
    """A morphism into Omega(1) (x) B with its two endpoint evaluations."""

    def __init__(self, H: InfinityMorphism, f0: InfinityMorphism, f1: InfinityMorphism):
        self.H = H
        self.f0 = f0
        self.f1 = f1

    def endpoint(self, j, k, elems):
        omega_b = self.H.target
        return omega_b.evaluate(self.H.apply(k, elems), j)

    def check_endpoints(self, probes):
        failures = []
        tgt = self.f0.target
        for elems in probes:
            k = len(elems)
            for j, f in ((0, self.f0), (1, self.f1)):
                got = self.endpoint(j, k, list(elems))
                want = f.apply(k, list(elems))
                if not tgt.is_zero(tgt.add(got, want, Fraction(-1))):
                    failures.append((j, tuple_repr(elems)))
        return failures
