"""Abstract crystals, tensor products, and isomorphism matching.

The rank-1 model crystals have completely explicit arrows, so they pin
the axiom checker first.  Extracted crystal graphs and tensor products
are then required to pass the same checker, and the tensor rules are
cross-checked against the simplified highest-weight rule wherever the
latter applies.
"""

import pytest

from bbcrystal.binf import build_binf
from bbcrystal.cartan import (
    Weight,
    imaginary_datum,
    isotropic_datum,
    mixed_datum,
    sl2_datum,
)
from bbcrystal.crystal import (
    MINUS_INFINITY,
    Mismatch,
    TensorElement,
    add_weights,
    find_isomorphism,
    graph_crystal,
    model_crystal,
    sl2_string,
    tensor,
    validate_axioms,
)
from bbcrystal.hwmod import build_crystal_lambda


def fund(d, mults):
    return Weight(tuple(mults.items()))


# ---------------------------------------------------------------------------
# model crystals and strings
# ---------------------------------------------------------------------------


def test_model_crystal_isotropic_level_three():
    crystal = model_crystal(isotropic_datum(), m=2, max_height=4)
    level3 = sorted(c for c in crystal.elements if sum(c) == 3)
    assert level3 == [(1, 1, 1), (2, 1), (3,)]


def test_model_crystal_statistics():
    d = imaginary_datum()
    crystal = model_crystal(d, m=3, max_height=4)
    top = Weight(((1, 3),))
    for c in crystal.elements:
        n = sum(c)
        assert crystal.weight(c) == (top.minus(1, n) if n else top)
        assert crystal.epsilon(c, 1) == 0
        assert crystal.phi(c, 1) == 3 + 2 * n


def test_model_crystal_binf_style_statistics():
    crystal = model_crystal(imaginary_datum(), max_height=3)
    assert crystal.weight(()) == Weight(())
    assert crystal.phi((1,), 1) == 2
    assert crystal.epsilon((1,), 1) == 0


def test_model_crystal_non_isotropic_arrows():
    crystal = model_crystal(imaginary_datum(), m=1, max_height=4)
    assert crystal.f((2, 1), 1, 1) == (1, 2, 1)
    assert crystal.e((2, 1), 1, 2) == (1,)
    assert crystal.e((2, 1), 1, 1) is None


def test_model_crystal_isotropic_arrows():
    crystal = model_crystal(isotropic_datum(), m=0, max_height=4)
    assert crystal.f((2, 1), 1, 1) == (2, 1, 1)
    assert crystal.e((2, 1), 1, 2) == (1,)
    assert crystal.e((1, 1), 1, 2) is None


def test_model_crystal_rejects_real_vertex():
    with pytest.raises(ValueError):
        model_crystal(sl2_datum(), m=2)
    with pytest.raises(ValueError):
        model_crystal(mixed_datum(), m=1)


def test_sl2_string_shape():
    crystal = sl2_string(sl2_datum(), m=2)
    assert list(crystal.elements) == [0, 1, 2]
    for k in crystal.elements:
        assert crystal.epsilon(k, 1) == k
        assert crystal.phi(k, 1) == 2 - k
    assert crystal.f(1, 1) == 2
    assert crystal.f(2, 1) is None
    assert crystal.e(0, 1) is None


def test_sl2_string_binf_style_leaves_end_unknown():
    crystal = sl2_string(sl2_datum(), max_height=3)
    assert crystal.phi(2, 1) == -2
    assert crystal.f_level(3, 1) == 0
    with pytest.raises(KeyError):
        crystal.f(3, 1)


def test_minus_infinity_sentinel_is_absorbing():
    assert MINUS_INFINITY + 5 == MINUS_INFINITY
    assert max(3, MINUS_INFINITY) == 3
    assert MINUS_INFINITY < -10**9


# ---------------------------------------------------------------------------
# axiom checker
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "crystal",
    [
        model_crystal(isotropic_datum(), m=2, max_height=4),
        model_crystal(isotropic_datum(), max_height=4),
        model_crystal(imaginary_datum(), m=1, max_height=4),
        model_crystal(imaginary_datum(), max_height=4),
        sl2_string(sl2_datum(), m=3),
        sl2_string(sl2_datum(), max_height=4),
    ],
)
def test_model_crystals_satisfy_axioms(crystal):
    assert validate_axioms(crystal) == []


def test_extracted_graphs_satisfy_axioms():
    d = mixed_datum()
    assert validate_axioms(graph_crystal(build_binf(d, 3))) == []
    module = build_crystal_lambda(d, fund(d, {1: 1, 2: 1}), 3)
    assert validate_axioms(graph_crystal(module)) == []
    assert validate_axioms(graph_crystal(build_binf(isotropic_datum(), 4))) == []


def test_unchanged_phi_across_arrow_fails_imaginary_axiom():
    crystal = model_crystal(imaginary_datum(), max_height=3).copy()
    target = crystal.f((1,), 1, 1)
    crystal.phi_map[(target, 1)] = crystal.phi_map[((1,), 1)]
    labels = {axiom for axiom, _, _ in validate_axioms(crystal)}
    assert "e1" in labels


def test_unchanged_eps_across_real_arrow_fails_real_axiom():
    crystal = sl2_string(sl2_datum(), m=2).copy()
    crystal.eps_map[(1, 1)] = 0
    crystal.phi_map[(1, 1)] = 1
    labels = {axiom for axiom, _, _ in validate_axioms(crystal)}
    assert "d1" in labels


def test_arrow_where_phi_minus_infinity_fails():
    crystal = sl2_string(sl2_datum(), m=2).copy()
    crystal.eps_map[(0, 1)] = MINUS_INFINITY
    crystal.phi_map[(0, 1)] = MINUS_INFINITY
    labels = {axiom for axiom, _, _ in validate_axioms(crystal)}
    assert "f" in labels


def test_broken_inverse_fails_axiom_c():
    crystal = model_crystal(isotropic_datum(), max_height=3).copy()
    crystal.e_arrows[((1,), 1, 1)] = None
    labels = {axiom for axiom, _, _ in validate_axioms(crystal)}
    assert "c" in labels


# ---------------------------------------------------------------------------
# tensor products
# ---------------------------------------------------------------------------


def test_tensor_requires_shared_datum():
    left = model_crystal(isotropic_datum(), max_height=2)
    right = model_crystal(imaginary_datum(), max_height=2)
    with pytest.raises(ValueError):
        tensor(left, right)


def test_tensor_statistics_formula():
    d = mixed_datum()
    factor = graph_crystal(build_crystal_lambda(d, fund(d, {1: 1, 2: 1}), 2))
    prod = tensor(factor, factor)
    from bbcrystal.cartan import pairing

    for b1 in factor.elements:
        for b2 in factor.elements:
            pair = TensorElement(b1, b2)
            wt1 = factor.weight(b1)
            wt2 = factor.weight(b2)
            assert prod.weight(pair) == add_weights(wt1, wt2)
            for i in d.vertices:
                eps = max(
                    factor.epsilon(b1, i),
                    factor.epsilon(b2, i) - pairing(d, i, wt1),
                )
                phi = max(
                    factor.phi(b1, i) + pairing(d, i, wt2),
                    factor.phi(b2, i),
                )
                assert prod.epsilon(pair, i) == eps
                assert prod.phi(pair, i) == phi


def test_tensor_real_arrow_side_selection():
    string = sl2_string(sl2_datum(), m=2)
    prod = tensor(string, string)
    top = TensorElement(0, 0)
    assert prod.f(top, 1) == TensorElement(1, 0)
    middle = TensorElement(1, 1)
    assert prod.f(middle, 1) == TensorElement(1, 2)
    assert prod.e(middle, 1) == TensorElement(0, 1)


def test_tensor_imaginary_raising_window_gives_zero():
    crystal = model_crystal(imaginary_datum(), max_height=3)
    prod = tensor(crystal, crystal)
    pair = TensorElement((1,), ())
    assert crystal.phi((1,), 1) == 2
    assert crystal.epsilon((), 1) == 0
    assert prod.e(pair, 1, 1) is None
    assert prod.f(pair, 1, 1) == TensorElement((1, 1), ())


@pytest.mark.parametrize(
    "factors",
    [
        (model_crystal(isotropic_datum(), m=2, max_height=3),) * 2,
        (model_crystal(imaginary_datum(), m=0, max_height=3),) * 2,
        (
            sl2_string(sl2_datum(), m=2),
            sl2_string(sl2_datum(), m=1),
        ),
    ],
)
def test_tensor_satisfies_axioms(factors):
    assert validate_axioms(tensor(*factors)) == []


def test_tensor_of_module_graphs_satisfies_axioms():
    d = mixed_datum()
    factor = graph_crystal(build_crystal_lambda(d, fund(d, {1: 1, 2: 1}), 3))
    assert validate_axioms(tensor(factor, factor)) == []
    binf = graph_crystal(build_binf(d, 3))
    assert validate_axioms(tensor(binf, binf)) == []


def test_tensor_matches_simplified_highest_weight_rule():
    """With eps identically zero the full rule collapses to comparisons
    against the pairing of the left weight, including the zero window."""
    cases = [
        model_crystal(isotropic_datum(), m=0, max_height=3),
        model_crystal(isotropic_datum(), m=2, max_height=3),
        model_crystal(imaginary_datum(), m=0, max_height=3),
        model_crystal(imaginary_datum(), m=1, max_height=3),
    ]
    from bbcrystal.cartan import pairing

    seen = {"left": 0, "right": 0, "window": 0}
    for crystal in cases:
        d = crystal.datum
        i = d.vertices[0]
        aii = d.a(i, i)
        prod = tensor(crystal, crystal)
        for b1 in crystal.elements:
            m1 = pairing(d, i, crystal.weight(b1))
            assert m1 >= 0
            for b2 in crystal.elements:
                pair = TensorElement(b1, b2)
                for l in range(1, prod.f_level(pair, i) + 1):
                    if m1 > 0:
                        want = crystal.f(b1, i, l)
                        want = want if want is None else TensorElement(want, b2)
                    else:
                        want = crystal.f(b2, i, l)
                        want = want if want is None else TensorElement(b1, want)
                    assert prod.f(pair, i, l) == want
                for l in range(1, prod.e_level(pair, i) + 1):
                    if m1 > -l * aii:
                        seen["left"] += 1
                        want = crystal.e(b1, i, l)
                        want = want if want is None else TensorElement(want, b2)
                    elif m1 > 0:
                        seen["window"] += 1
                        want = None
                    else:
                        seen["right"] += 1
                        want = crystal.e(b2, i, l)
                        want = want if want is None else TensorElement(b1, want)
                    assert prod.e(pair, i, l) == want
    assert min(seen.values()) > 0


def test_tensor_associative_up_to_bound_three():
    d = sl2_datum()
    a = sl2_string(d, m=1)
    b = sl2_string(d, m=2)
    left = tensor(tensor(a, b), a)
    right = tensor(a, tensor(b, a))
    found = find_isomorphism(left, right, bound=3)
    assert isinstance(found, dict) and len(found) >= 4

    di = imaginary_datum()
    a2 = model_crystal(di, m=1, max_height=3)
    b2 = model_crystal(di, m=0, max_height=3)
    c2 = model_crystal(di, m=2, max_height=3)
    left2 = tensor(tensor(a2, b2), c2)
    right2 = tensor(a2, tensor(b2, c2))
    found2 = find_isomorphism(left2, right2, bound=3)
    assert isinstance(found2, dict) and len(found2) >= 8


# ---------------------------------------------------------------------------
# isomorphism search
# ---------------------------------------------------------------------------


def test_tensor_head_of_two_strings_is_larger_string():
    d = sl2_datum()
    module = graph_crystal(build_crystal_lambda(d, Weight(((1, 1),)), 3))
    prod = tensor(module, module)
    target = graph_crystal(build_crystal_lambda(d, Weight(((1, 2),)), 3))
    found = find_isomorphism(prod, target, bound=3)
    assert isinstance(found, dict)
    assert len(found) == 3


def test_binf_graph_matches_model_crystal():
    for d in (isotropic_datum(), imaginary_datum()):
        graph = graph_crystal(build_binf(d, 4))
        model = model_crystal(d, max_height=4)
        found = find_isomorphism(graph, model)
        assert isinstance(found, dict)
        assert len(found) == len(graph.elements)


def test_strings_of_different_lengths_do_not_match():
    short = sl2_string(sl2_datum(), m=2)
    long = sl2_string(sl2_datum(), m=3)
    found = find_isomorphism(short, long)
    assert isinstance(found, Mismatch)
    # phi already betrays the string length at the source, so the walk
    # reports the counterexample there rather than at the final arrow.
    assert found.kind in ("weight", "phi")


def test_flipped_end_arrow_is_detected():
    good = sl2_string(sl2_datum(), m=2)
    bad = good.copy()
    bad.f_arrows[(2, 1, 1)] = 0
    found = find_isomorphism(good, bad)
    assert isinstance(found, Mismatch)
    assert found.kind == "arrow"
