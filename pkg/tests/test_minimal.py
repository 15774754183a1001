from fractions import Fraction

import pytest

from totconn.convolution import Generators, degree_zero_restrict, mc_check
from totconn.graded import GradedVectorSpace
from totconn.minimal import (ModelError, check_comparison, compare_models,
                             formality_check, hodge_decomposition,
                             massey_report, model_fiber_data, model_mc,
                             one_minimal_model, positive_part)
from totconn.structures import FiniteAlgebra
from tests.test_structures import heisenberg_cdga, torus_cdga


def circle_cdga():
    space = GradedVectorSpace({0: ["1"], 1: ["dx"]})
    unit = (0, "1")
    prod = {(unit, unit): {unit: Fraction(1)},
            (unit, (1, "dx")): {(1, "dx"): Fraction(1)},
            ((1, "dx"), unit): {(1, "dx"): Fraction(1)}}
    return FiniteAlgebra.from_dga(space, {}, prod, kind="Cinf", arity_cap=4,
                                  unit_key=unit)


def test_circle_model():
    model = one_minimal_model(circle_cdga(), arity_cap=4)
    assert [k[1] for k in model.w1_keys()] and len(model.w1_keys()) == 1
    assert model.w2_keys() == []
    assert massey_report(model) == {}
    free, ideal, fib = model_fiber_data(model, trunc=4, k=4)
    assert fib.dim() == 1
    assert ideal.generators == []


def test_torus_model():
    model = one_minimal_model(torus_cdga(), arity_cap=4)
    assert len(model.w1_keys()) == 2
    assert len(model.w2_keys()) == 1
    rep = massey_report(model)
    assert set(rep) == {2}
    free, ideal, fib = model_fiber_data(model, trunc=4, k=4)
    assert fib.dim() == 2
    assert len(ideal.generators) == 1
    assert {len(w) for w in ideal.generators[0]} == {2}
    verdict, meta = formality_check(model)
    assert verdict == "homogeneous generators"


def test_heisenberg_model():
    model = one_minimal_model(heisenberg_cdga(arity_cap=4), arity_cap=4)
    assert len(model.w1_keys()) == 2
    assert len(model.w2_keys()) == 2
    rep = massey_report(model)
    assert 2 not in rep  # the binary products vanish on degree one
    assert 3 in rep
    coeffs = {c for table in rep[3].values() for c in table.values()}
    assert coeffs <= {Fraction(1), Fraction(-1), Fraction(2), Fraction(-2)}
    free, ideal, fib = model_fiber_data(model, trunc=4, k=4)
    assert fib.graded_dims() == {1: 2, 2: 1}
    assert fib.dim() == 3
    verdict, _ = formality_check(model)
    assert verdict == "homogeneous generators"


def test_heisenberg_massey_constants_are_units():
    model = one_minimal_model(heisenberg_cdga(arity_cap=4), arity_cap=4)
    rep = massey_report(model)[3]
    # the triple products on (a,a,b)-type words carry unit coefficients
    seen = set()
    for wrd, val in rep.items():
        for _, c in val.items():
            seen.add(abs(c))
    assert Fraction(1) in seen


def test_model_mc_dictionary():
    model = one_minimal_model(torus_cdga(), arity_cap=4)
    gens, alpha = model_mc(model, trunc=4)
    assert alpha.data  # nontrivial series


def test_model_connected_requirement():
    space = GradedVectorSpace({0: ["1", "e"], 1: []})
    alg = FiniteAlgebra(space, kind="Cinf", arity_cap=3, unit_key=(0, "1"))
    with pytest.raises(ModelError):
        one_minimal_model(alg, arity_cap=3)


def test_hodge_pivots_differ_on_heisenberg():
    B = heisenberg_cdga()
    w_lex, m_lex = hodge_decomposition(B, pivot="lex")
    w_shear, m_shear = hodge_decomposition(B, pivot="shear")
    assert (w_lex, m_lex) != (w_shear, m_shear)


def test_self_comparison_is_identity():
    model = one_minimal_model(torus_cdga(), arity_cap=3)
    comp = compare_models(model, model, arity_cap=3)
    for key in model.algebra.space.keys():
        assert comp.k_tables[1][(key,)] == {key: Fraction(1)}
    assert check_comparison(comp, trunc=4, k=4) == []


def test_comparison_of_permuted_torus_models():
    B = torus_cdga()
    m1 = one_minimal_model(B, arity_cap=3, pivot="lex")
    m2 = one_minimal_model(B, arity_cap=3, pivot="revlex")
    comp = compare_models(m1, m2, arity_cap=3)
    assert check_comparison(comp, trunc=4, k=4) == []
    # the linear part permutes the degree-1 generators
    mat = comp.dual_matrix
    assert all(len(col) == 1 for col in mat.values())


def test_comparison_with_rescaled_generator():
    # a rescaled copy of the one-generator model: the comparison is the
    # scaling on duals and the quotient dimensions are preserved
    from totconn.minimal import OneMinimalModel
    from totconn.structures import InfinityMorphism
    B = circle_cdga()
    m1 = one_minimal_model(B, arity_cap=3)
    key = m1.algebra.space.keys(1)[0]
    scaled = InfinityMorphism(
        m1.algebra, B,
        tables={1: {(k,): {bk: 2 * c for bk, c in
                           m1.morphism.apply(1, [{k: Fraction(1)}]).items()}
                    for k in m1.algebra.space.keys()}},
        arity_cap=3)
    m2 = OneMinimalModel(m1.algebra, scaled, B, m1.transfer, "scaled")
    comp = compare_models(m1, m2, arity_cap=3)
    assert comp.dual_matrix[key[1]] == {key[1]: Fraction(2)}
    assert check_comparison(comp, trunc=4, k=4) == []


def test_comparison_of_heisenberg_pivots():
    B = heisenberg_cdga()
    m1 = one_minimal_model(B, arity_cap=4, pivot="lex")
    m2 = one_minimal_model(B, arity_cap=4, pivot="shear")
    comp = compare_models(m1, m2, arity_cap=4)
    assert check_comparison(comp, trunc=4, k=4) == []
    f1 = model_fiber_data(m1, trunc=4, k=4)[2]
    f2 = model_fiber_data(m2, trunc=4, k=4)[2]
    assert f1.dim() == f2.dim() == 3
    for kk in (2, 3, 4):
        fa = model_fiber_data(m1, trunc=4, k=kk)[2]
        fb = model_fiber_data(m2, trunc=4, k=kk)[2]
        assert fa.dim() == fb.dim()


def test_synthetic_inconclusive_formality():
    # m2 and m3 both hitting the same degree-2 line force a mixed-length
    # generator
    space = GradedVectorSpace({1: ["a", "b"], 2: ["z"]})
    W = FiniteAlgebra(space, kind="1Cinf", arity_cap=3)
    a, b, z = (1, "a"), (1, "b"), (2, "z")
    W.set_value(2, (a, b), {z: Fraction(1)})
    W.set_value(2, (b, a), {z: Fraction(-1)})
    W.set_value(3, (a, a, b), {z: Fraction(1)})
    W.set_value(3, (a, b, a), {z: Fraction(-2)})
    W.set_value(3, (b, a, a), {z: Fraction(1)})

    class Dummy:
        algebra = W
        arity_cap = 3

    model = Dummy()
    verdict, meta = formality_check(model, trunc=4)
    assert verdict == "inconclusive"
    assert meta["generator_lengths"] == [[2, 3]]
