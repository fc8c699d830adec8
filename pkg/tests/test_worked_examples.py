"""Small hand-checkable cases for each operation (argument slots are 0-based)."""
import pytest

from holant.algebra import Mat2, ata_x_form, factor_orthogonal_diagonal, named, qr_orthogonal_decompose, zeta
from holant.entanglement import (DECOMPOSABLE, GHZ, W, classify_ternary, classify_ternary_symmetric,
                                 factorize, ghz_witness, is_degenerate)
from holant.evaluate import (EvaluationError, affine_normal_form, holant_affine, holant_binary_chain,
                             holant_bruteforce, holant_contract, holant_generalized_equality)
from holant.gadgets import contract_unary, holographic, pr_binary_extract, self_loop, ternary_extract
from holant.grids import SignatureGrid, genus, graph_grid, validate
from holant.signatures import (EQ, NEQ, ONE, Signature, SymSignature, delta, matricize, permute, rank,
                               scale_equiv, standard, sym, tensor, to_symmetric)


def grid(vertices, edges):
    g = SignatureGrid()
    for k, s in enumerate(vertices):
        g.add_vertex(s, k)
    for a, b in edges:
        g.add_edge(a, b)
    return g


def test_qr_examples():
    i = named("I")
    assert qr_orthogonal_decompose(i, "lower") == (i, i, "orthogonal")
    q, r, kind = qr_orthogonal_decompose(named("K"), "lower")
    assert (q, r, kind) == (named("K"), i, "K")
    q, r, kind = qr_orthogonal_decompose(Mat2(1, 2, 3, 4), "lower")
    assert q.inverse().equiv(Mat2(4, -2, 2, 4))
    assert r.equiv(Mat2(-2, 0, 14, 20))


def test_orthogonal_diagonal_examples():
    assert factor_orthogonal_diagonal(Mat2.diag(2, 3)) == (named("I"), Mat2.diag(2, 3))
    q, d = factor_orthogonal_diagonal(Mat2(3, -4, 4, 3))
    assert q.equiv(Mat2(3, -4, 4, 3)) and d.equiv(named("I"))
    assert factor_orthogonal_diagonal(Mat2(1, 1, 1, 2)) is None


def test_ata_examples():
    assert ata_x_form(named("K")) == ("KD", named("I"))
    assert named("K").transpose() @ named("K") == Mat2(0, 2, 2, 0)
    assert ata_x_form(named("KX") @ Mat2.diag(1, 5)) == ("KXD", Mat2.diag(1, 5))
    assert ata_x_form(named("I")) is None


def test_standard_and_symmetric_examples():
    assert [int(str(v)) for v in standard("EQ", 3).values] == [1, 0, 0, 0, 0, 0, 0, 1]
    assert standard("ONE", 3) == sym(0, 1, 0, 0)
    assert standard("deltaMinus").values == Signature([1, -1]).values
    assert to_symmetric(EQ(3)) == SymSignature((1, 0, 0, 1))
    assert to_symmetric(Signature([1, 2, 3, 4])) is None
    assert to_symmetric(ONE(4)) == SymSignature((0, 1, 0, 0, 0))


def test_scale_equiv_examples():
    assert scale_equiv(EQ(2) * 2, EQ(2)) == 2
    assert scale_equiv(delta("0"), delta("1")) is None
    assert scale_equiv(holographic(named("K"), delta("0")), delta("i")) == 1


def test_tensor_permute_matricize_examples():
    t = tensor(delta("0"), delta("1"))
    assert t.values == Signature([0, 1, 0, 0]).values
    assert permute(t, [1, 0]) == tensor(delta("1"), delta("0"))
    assert permute(EQ(3), [2, 0, 1]) == EQ(3)
    assert rank(matricize(EQ(2), [0])) == 2
    assert rank(matricize(tensor(delta("+"), delta("+")), [0])) == 1
    m = matricize(ONE(3), [0])
    assert [[int(str(v)) for v in row] for row in m] == [[0, 1, 1, 0], [1, 0, 0, 0]] and rank(m) == 2


def test_validate_examples():
    g = SignatureGrid()
    g.add_vertex(EQ(3), "a")
    g.add_edge(("a", 0), ("a", 1))
    assert any("arity mismatch" in m for m in validate(g))
    assert validate(grid([delta("+"), delta("+")], [((0, 0), (1, 0))])) == []


def test_effective_and_genus_examples():
    assert self_loop(EQ(3), 1, 2) == delta("+")
    assert self_loop(ONE(3), 1, 2) == delta("1")
    k4 = graph_grid([(u, w) for u in range(4) for w in range(u + 1, 4)], ONE)
    assert holant_contract(k4) == 3
    tri = grid([EQ(2)] * 3, [((0, 1), (1, 0)), ((1, 1), (2, 0)), ((2, 1), (0, 0))]).with_natural_rotation()
    assert genus(tri) == 0
    loop = grid([EQ(2)], [((0, 0), (0, 1))]).with_natural_rotation()
    assert genus(loop) == 0
    k5 = graph_grid([(u, w) for u in range(5) for w in range(u + 1, 5)], EQ).with_natural_rotation()
    assert genus(k5) >= 1


def test_evaluator_examples():
    assert holant_bruteforce(grid([delta("+"), delta("+")], [((0, 0), (1, 0))])) == 2
    assert holant_bruteforce(grid([EQ(2), NEQ()], [((0, 0), (1, 0)), ((0, 1), (1, 1))])) == 0
    tri = grid([EQ(2)] * 3, [((0, 1), (1, 0)), ((1, 1), (2, 0)), ((2, 1), (0, 0))])
    assert holant_bruteforce(tri) == 2
    h = Signature([1, 2, 3, 4])
    path = grid([delta("0"), h, delta("1")], [((0, 0), (1, 0)), ((1, 1), (2, 0))])
    assert holant_contract(path) == 2 and holant_binary_chain(path) == 2
    for k in range(1, 6):
        cyc = grid([EQ(2)] * k, [((j, 1), ((j + 1) % k, 0)) for j in range(k)])
        assert holant_binary_chain(cyc) == 2
    two = grid([EQ(2), EQ(2), EQ(2), EQ(2)], [((0, 0), (1, 0)), ((0, 1), (1, 1)),
                                              ((2, 0), (3, 1)), ((2, 1), (3, 0))])
    assert holant_binary_chain(two) == 4


def test_generalized_equality_examples():
    k4_eq = graph_grid([(u, w) for u in range(4) for w in range(u + 1, 4)], EQ)
    assert holant_generalized_equality(k4_eq) == 2
    f = sym(3, 0, 5)
    assert holant_generalized_equality(grid([f, f], [((0, 0), (1, 0)), ((0, 1), (1, 1))])) == 34
    with pytest.raises(EvaluationError):
        holant_generalized_equality(graph_grid([(0, 1), (0, 1), (0, 1)], ONE))


def test_affine_examples():
    form = affine_normal_form(EQ(2))
    assert form.c == 1 and form.lin == [0, 0] and not form.quad
    assert affine_normal_form(Signature([1, 1, 1, -1])).quad == {(0, 1)}
    assert affine_normal_form(ONE(3)) is None
    assert holant_affine(grid([EQ(2)], [((0, 0), (0, 1))])) == 2
    hadamard = Signature([1, 1, 1, -1])
    plus = delta("+")
    assert holant_affine(grid([hadamard, plus, plus], [((0, 0), (1, 0)), ((0, 1), (2, 0))])) == 2
    assert holant_affine(grid([delta("i"), delta("+")], [((0, 0), (1, 0))])) == 1 + zeta(6)


def test_factorize_examples():
    f = tensor(EQ(2), NEQ())
    assert [a for a, _ in factorize(f)] == [(0, 1), (2, 3)]
    assert len(factorize(EQ(4))) == 1
    assert [a for a, _ in factorize(tensor(delta("0"), delta("0"), delta("0")))] == [(0,), (1,), (2,)]
    assert is_degenerate(Signature([1, 1, 1, 1]))
    assert not is_degenerate(EQ(2)) and not is_degenerate(ONE(3))


def test_ternary_class_examples():
    assert classify_ternary(EQ(3)).tag == GHZ
    assert classify_ternary(ONE(3)).tag == W
    assert classify_ternary(tensor(delta("0"), EQ(2))).tag == DECOMPOSABLE
    assert classify_ternary_symmetric(SymSignature((1, 1, 1, 1))).decomposable


def test_ghz_witness_examples():
    assert ghz_witness(SymSignature((1, 0, 0, 1))) == named("I")
    m = ghz_witness(SymSignature((2, 0, 2, 0)))
    assert {(m.a, m.c), (m.b, m.d)} == {(1, 1), (1, -1)}
    with pytest.raises(ValueError):
        ghz_witness(SymSignature((1, 1, 1, 1)))


def test_contraction_examples():
    assert contract_unary(EQ(3), 0, delta("1")) == tensor(delta("1"), delta("1"))
    assert contract_unary(EQ(4), 3, delta("+")) == EQ(3)
    assert contract_unary(ONE(3), 2, delta("0")) == NEQ()
    assert self_loop(EQ(4), 2, 3) == EQ(2)
    assert self_loop(ONE(3), 1, 2) == delta("1")
    assert self_loop(EQ(2), 0, 1).values[0] == 2
    assert holographic(named("K"), delta("0")) == delta("i")
    assert scale_equiv(holographic(named("K"), delta("0"), transpose=True), delta("+")) is not None
    assert holographic(named("X"), EQ(3)) == EQ(3)


def test_extraction_examples():
    assert pr_binary_extract(EQ(4), 0, 1) == (EQ(2), ("+", "+"))
    assert pr_binary_extract(ONE(4), 0, 1) == (NEQ(), ("0", "0"))
    with pytest.raises(ValueError):
        pr_binary_extract(tensor(EQ(2), EQ(2)), 0, 1)
    g, rec = ternary_extract(EQ(4))
    assert g == EQ(3) and rec.steps[-1].endswith("delta_+")
