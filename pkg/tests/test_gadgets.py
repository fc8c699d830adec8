import random

import pytest
from hypothesis import given, strategies as st

from holant.algebra import Mat2, named, scalar, zeta
from holant.entanglement import GHZ, W, classify_ternary, classify_ternary_symmetric
from holant.evaluate import effective_bruteforce
from holant.families import in_M_closure
from holant.gadgets import (GENEQ4, NOT_APPLICABLE, TERNARY, GadgetRecipe, SearchExhausted, binary_escape,
                            contract_unary, extract_hard_core, pin, pr_binary_extract, pr_binary_recipe,
                            self_loop, symmetrize, ternary_extract, triangle_recipe, triangle_symmetrize,
                            unary_chain, unary_chain_recipe)
from holant.signatures import (EQ, NEQ, ONE, Signature, apply_matrix, delta, permute, sym, tensor,
                               to_symmetric, transform)

from oracles import np_decomposable, rand_invertible, rand_nondecomposable, rand_signature, rand_w_type

seeds = st.integers(0, 10 ** 6)


def test_contract_unary_and_pin():
    f = Signature(range(8))
    assert pin(f, 0, 1) == Signature([4, 5, 6, 7])
    assert pin(f, 2, 0) == Signature([0, 2, 4, 6])
    assert contract_unary(f, 1, Signature([1, -1])) == Signature([-2, -2, -2, -2])


def test_self_loop():
    f = Signature(range(8))
    assert self_loop(f, 0, 2) == Signature([0 + 5, 2 + 7])


@given(seeds)
def test_recipes_replay(seed):
    rng = random.Random(seed)
    f = rand_signature(rng, 4)
    rec = (GadgetRecipe.source(f).pin(1, "+").permute([2, 0, 1])
           .holographic(rand_invertible(rng)).attach(0, Signature([1, zeta(5)]), "u"))
    assert rec.verify()
    other = GadgetRecipe.source(rand_signature(rng, 3), "g")
    joined = rec.join(other, [(0, 1)], "join")
    assert joined.verify()
    assert joined.signature == effective_bruteforce(joined.gadget)
    assert GadgetRecipe.source(f).loop(0, 3).verify()


@given(seeds, st.integers(3, 5))
def test_binary_extraction(seed, n):
    rng = random.Random(seed)
    f = rand_nondecomposable(rng, n)
    j, k = rng.sample(range(n), 2)
    g, names = pr_binary_extract(f, j, k)
    assert len(names) == n - 2
    assert not (g.values[0] * g.values[3] - g.values[1] * g.values[2]).is_zero()
    rec = pr_binary_recipe(f, j, k)
    assert rec.signature == g and rec.verify()


def test_binary_extraction_orientation():
    f = tensor(Signature([1, 2]), EQ(2))
    with pytest.raises(ValueError):
        pr_binary_extract(f, 1, 2)
    g, _ = pr_binary_extract(Signature([1, 2, 3, 4, 5, 6, 7, 9]), 2, 0)
    h, _ = pr_binary_extract(Signature([1, 2, 3, 4, 5, 6, 7, 9]), 0, 2)
    assert g == permute(h, [1, 0])
    with pytest.raises(ValueError):
        pr_binary_extract(EQ(3), 1, 1)


@given(seeds, st.integers(4, 5))
def test_ternary_extraction(seed, n):
    f = rand_nondecomposable(random.Random(seed), n)
    g, rec = ternary_extract(f)
    assert classify_ternary(g).tag in (GHZ, W)
    assert rec.verify()


def test_ternary_extraction_of_one4():
    g, rec = ternary_extract(ONE(4))
    # delta_0 is tried first and already leaves a W-type ternary
    assert g == ONE(3)
    assert rec.steps[-1] == "contract argument 3 with delta_0"
    assert contract_unary(ONE(4), 3, delta("+")) == sym(1, 1, 0, 0)


def test_ternary_extraction_rejects_decomposable():
    with pytest.raises(ValueError):
        ternary_extract(tensor(EQ(2), EQ(2)))
    with pytest.raises(ValueError):
        ternary_extract(EQ(2))


@given(seeds, st.integers(0, 2))
def test_triangle_closed_form(seed, rot):
    rng = random.Random(seed)
    m = rand_invertible(rng)
    f = apply_matrix(m, EQ(3))
    g = m.transpose() @ m
    a, b, c, d = g.a, g.b, g.c, g.d
    assert triangle_symmetrize(f, rot) == transform(m, sym(a ** 3, a * b * c, b * c * d, d ** 3))


def test_triangle_of_one3():
    assert triangle_symmetrize(ONE(3)) == sym(0, 1, 0, 1)


@given(seeds, st.integers(0, 2))
def test_triangle_recipe_matches(seed, rot):
    f = rand_signature(random.Random(seed), 3)
    rec = triangle_recipe(GadgetRecipe.source(f), rot)
    assert rec.signature == triangle_symmetrize(f, rot)
    assert rec.verify()


@given(seeds)
def test_symmetrize_w_inputs(seed):
    rng = random.Random(seed)
    f, _ = rand_w_type(rng)
    if any(in_M_closure(f, named(k)) for k in ("K", "KX")):
        return
    s, rec = symmetrize(f)
    assert classify_ternary_symmetric(s).tag == GHZ
    assert rec.verify() and rec.signature == s.expand()


def test_symmetrize_needs_a_helper_in_KM():
    f = transform(named("K"), apply_matrix(Mat2(1, 0, 0, 2), ONE(3), [0]))
    with pytest.raises(ValueError):
        symmetrize(f)
    helper = Signature([1, 2, 3, 5])
    s, rec = symmetrize(f, helper)
    assert classify_ternary_symmetric(s).tag in (GHZ, W)
    assert rec.verify()
    with pytest.raises(ValueError):
        symmetrize(f, transform(named("K"), Signature([0, 1, 1, 0])))


def test_symmetric_input_is_returned_as_is():
    s, rec = symmetrize(EQ(3))
    assert s.values == (1, 0, 0, 1) and len(rec.steps) == 1


def test_binary_escape():
    f = EQ(3)
    g, rec = binary_escape(f, "K")
    assert g.arity == 2 and not in_M_closure(g, named("K"))
    assert rec.verify()
    with pytest.raises(ValueError):
        binary_escape(transform(named("K"), ONE(3)), "K")


@pytest.mark.parametrize("sign", ["+", "-"])
def test_unary_chain(sign):
    z = zeta(5)
    kprime = Signature([z, 1, 1, 0])
    s = 1 if sign == "+" else -1
    for length in range(4):
        rec = unary_chain_recipe(kprime, sign, length)
        assert rec.verify()
        assert unary_chain(kprime, sign, length) == Signature([1, length * z + s])
    with pytest.raises(ValueError):
        unary_chain(EQ(2), "+", 1)


def test_hard_core_eq4():
    res = extract_hard_core([EQ(4)])
    assert res.outcome == GENEQ4
    assert res.trace.D["D0"] == 4
    assert res.recipe.verify()


def test_hard_core_one4():
    res = extract_hard_core([ONE(4)])
    assert res.outcome == TERNARY and res.trace.D["D0"] == 2
    assert classify_ternary(res.signature).tag in (GHZ, W)
    assert res.recipe.verify() and res.recipe.signature == res.signature


def test_hard_core_not_applicable():
    res = extract_hard_core([EQ(2), Signature([1, 2])])
    assert res.outcome == NOT_APPLICABLE and res.recipe is None
    assert extract_hard_core([tensor(delta("0"), delta("0"))]).outcome == NOT_APPLICABLE


@given(seeds, st.integers(3, 6))
def test_hard_core_random(seed, n):
    rng = random.Random(seed)
    f = rand_signature(rng, n, zero_prob=rng.choice([0.3, 0.7, 0.9]))
    res = extract_hard_core([f])
    if res.outcome == NOT_APPLICABLE:
        return
    assert res.recipe.verify()
    g = res.signature
    if res.outcome == TERNARY:
        assert g.arity == 3 and classify_ternary(g).tag in (GHZ, W)
    else:
        assert g.arity == 4 and not np_decomposable(g)


def test_escape_of_eq4():
    g, rec = binary_escape(EQ(4), "K")
    assert g == sym(1, 0, -1)
    assert rec.steps[1:] == ["contract argument 0 with delta_+", "contract argument 0 with delta_-"]
    assert binary_escape(sym(1, 0, -1), "K")[0] == sym(1, 0, -1)


def test_symmetrize_k_one3_with_helper():
    f = transform(named("K"), ONE(3))
    with pytest.raises(ValueError):
        symmetrize(f)
    s, rec = symmetrize(f, sym(1, 0, -1))
    assert rec.verify()
    assert classify_ternary_symmetric(s).tag == GHZ
    # the escape composition leaves both matching closures before the triangle
    composed = [apply_matrix(Mat2(1, 0, 0, -1), f, [axis]) for axis in range(3)]
    assert any(not any(in_M_closure(g, named(k)) for k in ("K", "KX")) for g in composed)
    assert any("compose binary gadget" in step for step in rec.steps)


def test_chain_example():
    assert unary_chain(Signature([2, 1, 1, 0]), "+", 3) == Signature([1, 7])


def test_self_loop_examples():
    assert self_loop(EQ(3), 1, 2) == delta("+")
    assert self_loop(ONE(3), 1, 2) == delta("1")


@given(seeds)
def test_triangle_output_is_symmetric(seed):
    f = rand_signature(random.Random(seed), 3)
    for rot in range(3):
        assert to_symmetric(triangle_symmetrize(f, rot)) is not None


@given(seeds)
def test_operations_commute_with_scaling(seed):
    rng = random.Random(seed)
    f = rand_signature(rng, 3)
    c = zeta(rng.randrange(24)) * rng.randint(1, 4)
    m = rand_invertible(rng)
    u = rand_signature(rng, 1)
    assert contract_unary(f * c, 1, u) == contract_unary(f, 1, u) * c
    assert self_loop(f * c, 0, 2) == self_loop(f, 0, 2) * c
    assert transform(m, f * c) == transform(m, f) * c
