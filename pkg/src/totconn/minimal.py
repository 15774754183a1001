"""Construction and comparison of low-degree minimal models.

``one_minimal_model`` builds a Hodge-type decomposition of a finite dga
window by deterministic exact elimination, transfers the structure onto
the chosen harmonic representatives, and restricts to the low-degree
truncation whose degree-2 part is generated by products of degree-1
elements.  ``compare_models`` produces the comparison morphism between
two models of the same algebra (linear part the projected inclusion,
higher corrections solved arity by arity) and the induced map on dual
tensor algebras used for the filtered-isomorphism checks.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .convolution import Generators, delta_star, mc_check, morphism_to_mc
from .freelie import FiberLieAlgebra, lyndon_bracket
from .graded import GradedVectorSpace
from .linalg import Echelon
from .scalars import rat
from .structures import FiniteAlgebra, InfinityMorphism, check_morphism
from .transfer import (TransferResult, contraction_from_hodge,
                       transfer_structure)


class ModelError(ValueError):
    pass


def _pivot_candidates(keys, strategy):
    """Deterministic candidate vectors for complement choices."""
    singles = [{k: Fraction(1)} for k in keys]
    pairs = []
    for i in range(len(keys)):
        for j in range(i + 1, len(keys)):
            pairs.append({keys[i]: Fraction(1), keys[j]: Fraction(1)})
    if strategy == "lex":
        return singles + pairs
    if strategy == "revlex":
        return list(reversed(singles)) + list(reversed(pairs))
    if strategy == "shear":
        return pairs + singles
    raise ValueError("unknown pivot strategy %r" % (strategy,))


def hodge_decomposition(alg: FiniteAlgebra, pivot="lex"):
    """W, M vectors for a deterministic Hodge-type decomposition.

    Per degree: W is a complement of the exact part inside the closed
    part (with the unit chosen as the degree-0 representative), M a
    complement of the closed part chosen from the pivot candidates.
    """
    order = alg.space.key_order
    degrees = sorted(alg.space.degrees)
    w_vectors = []
    m_vectors = []
    for d in degrees:
        keys = alg.space.keys(d)
        prev_keys = alg.space.keys(d - 1)
        exact = Echelon(order)
        for k in prev_keys:
            dv = alg.m(1, [{k: Fraction(1)}])
            if dv:
                exact.insert(dv)
        closed = []
        closed_ech = Echelon(order)
        # closed subspace via kernel elimination: tag source coordinates
        tagged = Echelon(lambda key: ((0, order(key[1])) if key[0] == "v"
                                      else (1, order(key[1]))))
        for k in keys:
            vec = {("v", kk): c for kk, c in alg.m(1, [{k: Fraction(1)}]).items()}
            vec[("s", k)] = Fraction(1)
            tagged.insert(vec)
        for pivot_key, row in tagged.rows.items():
            if pivot_key[0] == "s" and all(kk[0] == "s" for kk in row):
                closed.append({kk[1]: c for kk, c in row.items()})
        for v in closed:
            closed_ech.insert(v)
        # W: complement of exact inside closed, picked from the pivot
        # candidates (so different strategies change the representatives)
        w_ech = Echelon(order)
        for v in exact.basis():
            w_ech.insert(dict(v))
        chosen_w = []
        if d == 0 and alg.unit_key is not None:
            unit = {alg.unit_key: Fraction(1)}
            if closed_ech.contains(unit) and w_ech.insert(dict(unit)):
                chosen_w.append(unit)
        for cand in _pivot_candidates(keys, pivot) + [dict(v) for v in closed]:
            if not closed_ech.contains(dict(cand)):
                continue
            if w_ech.insert(dict(cand)):
                chosen_w.append(dict(cand))
        w_vectors.extend(chosen_w)
        # M: complement of closed inside the degree, from pivot candidates
        m_ech = Echelon(order)
        for v in closed:
            m_ech.insert(dict(v))
        for cand in _pivot_candidates(keys, pivot):
            if m_ech.insert(dict(cand)):
                m_vectors.append(dict(cand))
    return w_vectors, m_vectors


class OneMinimalModel:
    """Low-degree minimal structure with its morphism into the target."""

    def __init__(self, algebra: FiniteAlgebra, morphism: InfinityMorphism,
                 target: FiniteAlgebra, transfer: TransferResult, pivot: str):
        self.algebra = algebra
        self.morphism = morphism
        self.target = target
        self.transfer = transfer
        self.pivot = pivot

    def generators(self) -> Generators:
        return Generators(positive_part_space(self.algebra.space))

    def w1_keys(self):
        return self.algebra.space.keys(1)

    def w2_keys(self):
        return self.algebra.space.keys(2)


def positive_part_space(space: GradedVectorSpace) -> GradedVectorSpace:
    return GradedVectorSpace({d: names for d, names in space.degrees.items()
                              if d > 0})


def positive_part(alg: FiniteAlgebra) -> FiniteAlgebra:
    """The structure restricted to positive degrees."""
    space = positive_part_space(alg.space)
    out = FiniteAlgebra(space, kind=alg.kind, arity_cap=alg.arity_cap)
    keys = set(space.keys())
    for k, table in alg.maps.items():
        for wrd, val in table.items():
            if all(kk in keys for kk in wrd):
                vv = {kk: c for kk, c in val.items() if kk in keys}
                if vv:
                    out.set_value(k, wrd, vv)
    return out


def one_minimal_model(B: FiniteAlgebra, arity_cap=4, pivot="lex") -> OneMinimalModel:
    """Build the low-degree minimal model of a finite (c)dga window."""
    w_vectors, m_vectors = hodge_decomposition(B, pivot=pivot)
    # connectedness: exactly one harmonic representative in degree 0
    h0 = [v for v in w_vectors if {k[0] for k in v} == {0}]
    if len(h0) != 1:
        raise ModelError("cohomology is not connected in degree 0")
    names = []
    counter = {}
    for v in w_vectors:
        d = next(iter(v))[0]
        counter[d] = counter.get(d, 0) + 1
        names.append("h%d_%d" % (d, counter[d]))
    con = contraction_from_hodge(B, w_vectors, m_vectors, names=names,
                                 tag="hodge[%s]" % pivot)
    failures = con.verify_side_conditions(
        [{k: Fraction(1)} for k in B.space.keys()])
    if failures:
        raise ModelError("side conditions failed: %r" % (failures[:3],))
    res = transfer_structure(con, arity_cap, kind="1Cinf")
    full = res.algebra
    full.materialize(arity_cap)

    # regenerate the degree-2 part from products of degree-1 elements
    one_keys = full.space.keys(1)
    two_keys = full.space.keys(2)
    gen2 = Echelon(full.space.key_order)
    for n in range(2, arity_cap + 1):
        for wrd in itertools.product(one_keys, repeat=n):
            val = full.m(n, [{k: Fraction(1)} for k in wrd])
            if val:
                gen2.insert(val)
    # keep exactly a basis of the generated part, expressed on the chosen keys
    kept2 = []
    probe = Echelon(full.space.key_order)
    for row in gen2.basis():
        probe.insert(dict(row))
    for k in two_keys:
        if probe.contains({k: Fraction(1)}):
            kept2.append(k)
    if gen2.rank != len(kept2):
        raise ModelError("window too small to span the generated degree-2 part")

    unit_name = None
    if full.unit_key is not None:
        unit_name = full.unit_key
    degrees = {1: [name for _, name in one_keys], 2: [name for _, name in kept2]}
    if unit_name is not None:
        degrees[0] = [unit_name[1]]
    space = GradedVectorSpace(degrees)
    model = FiniteAlgebra(space, kind="1Cinf", arity_cap=arity_cap,
                          unit_key=unit_name)
    keep = set(space.keys())
    for k, table in full.maps.items():
        for wrd, val in table.items():
            if all(kk in keep for kk in wrd):
                vv = {kk: c for kk, c in val.items() if kk in keep}
                bad = {kk: c for kk, c in val.items() if kk not in keep and kk[0] == 2}
                if bad and all(kk[0] == 1 for kk in wrd):
                    raise ModelError("degree-1 products escape the generated part")
                if vv:
                    model.set_value(k, wrd, vv)

    # the morphism: inclusion components restricted to the model basis
    def component(k):
        def apply(elems):
            return res.inclusion.apply(k, elems)
        return apply

    morphism = InfinityMorphism(model, B,
                                components={k: component(k)
                                            for k in range(1, arity_cap + 1)},
                                arity_cap=arity_cap)
    out = OneMinimalModel(model, morphism, B, res, pivot)
    _verify_model(out)
    return out


def _verify_model(model: OneMinimalModel):
    alg = model.algebra
    if alg.maps.get(1):
        raise ModelError("transferred structure is not minimal")
    # the linear part embeds onto independent cohomology classes
    B = model.target
    order = B.space.key_order
    exact = Echelon(order)
    for k in B.space.keys():
        dv = B.m(1, [{k: Fraction(1)}])
        if dv:
            exact.insert(dv)
    class_ech = Echelon(order)
    for key in alg.space.keys(1):
        img = model.morphism.apply(1, [{key: Fraction(1)}])
        if B.m(1, [img]):
            raise ModelError("degree-1 image is not closed")
        red = exact.reduce(img)
        if not red or not class_ech.insert(red):
            raise ModelError("degree-1 classes are not independent")
    # morphism relations on degree-1 words within the cap
    probes = []
    one_keys = alg.space.keys(1)
    for n in range(1, min(alg.arity_cap, 4) + 1):
        probes.extend([{k: Fraction(1)} for k in wrd]
                      for wrd in itertools.product(one_keys, repeat=n))
    failures = check_morphism(model.morphism, probes)
    if failures:
        raise ModelError("model morphism fails: %r" % (failures[:2],))


def massey_report(model: OneMinimalModel):
    """Tables of the minimal products on degree-1 inputs, per arity."""
    alg = model.algebra
    one_keys = alg.space.keys(1)
    report = {}
    for n in range(2, alg.arity_cap + 1):
        table = {}
        for wrd in itertools.product(one_keys, repeat=n):
            val = alg.m(n, [{k: Fraction(1)} for k in wrd])
            if val:
                table[tuple(name for _, name in wrd)] = \
                    {key[1]: c for key, c in val.items()}
        if table:
            report[n] = table
    return report


def model_fiber_data(model: OneMinimalModel, trunc=4, k=4):
    """delta-star ideal and nilpotent quotient of a model."""
    W = positive_part(model.algebra)
    free, ideal, gens_out = delta_star(W, trunc)
    fib = FiberLieAlgebra(free, ideal, k)
    return free, ideal, fib


def model_mc(model: OneMinimalModel, trunc=4):
    """The series of the model morphism, checked Maurer-Cartan."""
    W = positive_part(model.algebra)
    gens = Generators(W.space)
    alpha = morphism_to_mc(model.morphism, gens, trunc)
    report = mc_check(alpha, W)
    if report:
        raise ModelError("model series is not Maurer-Cartan: %r" % (report[:2],))
    return gens, alpha


# ---------------------------------------------------------------------
# comparison of two models of the same algebra
# ---------------------------------------------------------------------

class Comparison:
    """k: W2 -> W1 with linear part the projected inclusion, plus the
    induced algebra map on dual tensor generators."""

    def __init__(self, model1, model2, k_tables, dual_matrix):
        self.model1 = model1
        self.model2 = model2
        self.k_tables = k_tables
        self.dual_matrix = dual_matrix  # {W1 degree-1 name: {W2 name: coeff}}

    def morphism(self):
        return InfinityMorphism(self.model2.algebra, self.model1.algebra,
                                tables=self.k_tables,
                                arity_cap=self.model2.algebra.arity_cap)

    def dual_on_word(self, w, free1, free2):
        """Image of a dual word (indices in model1 generators)."""
        out = {(): Fraction(1)}
        names1 = free1.gen_names
        names2 = free2.gen_names
        for i in w:
            step = {}
            col = self.dual_matrix.get(names1[i], {})
            for ww, c in out.items():
                for name2, c2 in col.items():
                    j = names2.index(name2)
                    w2 = ww + (j,)
                    s = step.get(w2, Fraction(0)) + c * c2
                    if s:
                        step[w2] = s
                    else:
                        step.pop(w2, None)
            out = step
        return out

    def dual_series(self, series, free1, free2, trunc):
        out = {}
        for w, c in series.items():
            if len(w) > trunc:
                continue
            for w2, c2 in self.dual_on_word(w, free1, free2).items():
                s = out.get(w2, Fraction(0)) + c * c2
                if s:
                    out[w2] = s
                else:
                    out.pop(w2, None)
        return out


def compare_models(model1: OneMinimalModel, model2: OneMinimalModel,
                   arity_cap=3) -> Comparison:
    """Comparison morphism via projection of the second model's images.

    The linear part is p1 o g2_1; higher components on degree-1 words are
    fixed to zero (the canonical representative) and the components with
    one degree-2 entry are solved arity by arity from the morphism
    relations on degree-1 probe words.
    """
    W1, W2 = model1.algebra, model2.algebra
    p1 = model1.transfer.contraction.project
    rename = _transfer_key_map(model1)
    k1 = {}
    for key in W2.space.keys():
        img = model2.morphism.apply(1, [{key: Fraction(1)}])
        proj = p1(img)
        k1[(key,)] = {rename[kk]: c for kk, c in proj.items()
                      if rename.get(kk) is not None}
    k_tables = {1: k1}
    one2 = W2.space.keys(1)
    two2 = W2.space.keys(2)
    from .linalg import solve
    from .structures import morphism_defect

    # the arity-2 relation must hold for the linear part alone
    cur = InfinityMorphism(W2, W1, tables=k_tables, arity_cap=arity_cap)
    for wrd in itertools.product(one2, repeat=2):
        if morphism_defect(cur, [{k: Fraction(1)} for k in wrd]):
            raise ModelError("linear comparison is not multiplicative on "
                             "classes: %r" % (wrd,))

    # unknowns: all components k_2 .. k_{cap-1} (degree-1 values on
    # all-degree-1 words, degree-2 values on words with one degree-2
    # entry); relations: all-degree-1 probes at arities 3..cap.  The
    # defect is affine in the unknowns, so exact unit-probing assembles
    # the linear system in one pass.
    unknowns = []
    for j in range(2, arity_cap):
        for wrd in itertools.product(one2, repeat=j):
            for vk in W1.space.keys(1):
                unknowns.append((j, tuple(wrd), vk))
        for pos in range(j):
            for combo in itertools.product(one2, repeat=j - 1):
                for t in two2:
                    wrd = combo[:pos] + (t,) + combo[pos:]
                    for vk in W1.space.keys(2):
                        unknowns.append((j, tuple(wrd), vk))
    unknowns = sorted(set(unknowns))
    probes = []
    for n in range(3, arity_cap + 1):
        probes.extend(itertools.product(one2, repeat=n))

    def total_defect(tables):
        mor = InfinityMorphism(W2, W1, tables=tables, arity_cap=arity_cap)
        out = {}
        for wi, wrd in enumerate(probes):
            d = morphism_defect(mor, [{k: Fraction(1)} for k in wrd])
            for key, c in d.items():
                out[(wi, key)] = c
        return out

    def copy_tables(tbs):
        return {kk: {w: dict(v) for w, v in tb.items()} for kk, tb in tbs.items()}

    if unknowns:
        base = total_defect(copy_tables(k_tables))
        cols = []
        for (j, wrd, vk) in unknowns:
            probe_tables = copy_tables(k_tables)
            probe_tables.setdefault(j, {}).setdefault(wrd, {})
            probe_tables[j][wrd][vk] = probe_tables[j][wrd].get(vk, Fraction(0)) + 1
            col = total_defect(probe_tables)
            diff = dict(col)
            for key, c in base.items():
                s = diff.get(key, Fraction(0)) - c
                if s:
                    diff[key] = s
                else:
                    diff.pop(key, None)
            cols.append(diff)
        sol = solve(cols, {k: -v for k, v in base.items() if v})
        if sol is None:
            raise ModelError("comparison extension is obstructed")
        for (j, wrd, vk), x in zip(unknowns, sol):
            if x:
                k_tables.setdefault(j, {}).setdefault(wrd, {})[vk] = x

    # dual matrix on degree-1 generators
    dual = {}
    for key1 in W1.space.keys(1):
        col = {}
        for key2 in one2:
            val = k_tables[1].get((key2,), {})
            c = val.get(key1)
            if c:
                col[key2[1]] = c
        dual[key1[1]] = col
    return Comparison(model1, model2, k_tables, dual)


def _transfer_key_map(model: OneMinimalModel):
    """Identity on the model's keys (transfer names are shared)."""
    return {k: k for k in model.transfer.algebra.space.keys()}


def check_comparison(comp: Comparison, trunc=4, k=4):
    """Filtered-isomorphism checks for the induced dual map.

    Verifies that the dual algebra map sends the first model's ideal
    generators into the second model's ideal span (per word length), and
    that the induced maps on nilpotent quotients are bijective.
    """
    free1, ideal1, fib1 = model_fiber_data(comp.model1, trunc, k)
    free2, ideal2, fib2 = model_fiber_data(comp.model2, trunc, k)
    failures = []
    for g in ideal1.generators:
        img = comp.dual_series(g, free1, free2, trunc)
        if not ideal2.contains(img):
            failures.append(("generator image escapes the ideal", g))
    if fib1.dim() != fib2.dim():
        failures.append(("quotient dimensions differ", fib1.dim(), fib2.dim()))
    # rank of the induced map on the quotient
    reduced = []
    rank_ech = Echelon(lambda key: (len(key), key))
    for w in fib1.basis:
        img = comp.dual_series(lyndon_bracket(w, free1.order), free1, free2, trunc)
        red = fib2._mod.reduce({ww: c for ww, c in img.items() if len(ww) < k})
        reduced.append(red)
        rank_ech.insert(red)
    if rank_ech.rank != fib1.dim():
        failures.append(("induced quotient map is not injective", rank_ech.rank))
    return failures


def formality_check(model: OneMinimalModel, trunc=4):
    """Homogeneity verdict for the ideal generators.

    Returns (verdict, metadata): "homogeneous generators" when every
    dual-codifferential generator is concentrated in a single word
    length, else "inconclusive".  The metadata also records the weaker
    sufficient condition that the degree-2 product-image subspaces of
    the different arities intersect trivially.
    """
    free, ideal, gens_out = delta_star(positive_part(model.algebra), trunc)
    lengths = []
    homogeneous = True
    for g in ideal.generators:
        ls = {len(w) for w in g}
        lengths.append(sorted(ls))
        if len(ls) > 1:
            homogeneous = False
    # the sufficient condition: the degree-2 product-image subspaces of
    # the different arities intersect trivially
    alg = model.algebra
    one_keys = alg.space.keys(1)
    spans = {}
    for n in range(2, alg.arity_cap + 1):
        ech = Echelon(alg.space.key_order)
        for wrd in itertools.product(one_keys, repeat=n):
            val = alg.m(n, [{k: Fraction(1)} for k in wrd])
            if val:
                ech.insert(val)
        if ech.rank:
            spans[n] = ech.basis()
    inter_rank = None
    if len(spans) >= 2:
        from .linalg import intersect_spans
        items = list(spans.values())
        cur = items[0]
        for nxt in items[1:]:
            cur = intersect_spans(cur, nxt, alg.space.key_order)
        inter_rank = len(cur)
    verdict = "homogeneous generators" if homogeneous else "inconclusive"
    metadata = {
        "generator_lengths": lengths,
        "sufficient_condition": "intersection over arities of the product-image subspaces is zero",
        "product_image_arities": sorted(spans),
        "intersection_rank": inter_rank,
    }
    return verdict, metadata
