"""Weight-space quotients, radical membership, and the integral monomials.

Dimension oracles come first and are independent of the algebra code:
partition and composition counts fix what the rank-one quotients must
look like before any Gram matrix is built.
"""

from fractions import Fraction

import pytest

from bbcrystal.cartan import (
    BorcherdsCartanDatum,
    GenIndex,
    RootVector,
    imaginary_datum,
    isotropic_datum,
    mixed_datum,
    sl2_datum,
)
from bbcrystal.freealg import FreeElement, e_dprime, e_prime, lusztig_form
from bbcrystal.qrat import ScalarQ
from bbcrystal import uqminus
from bbcrystal.uqminus import (
    WordCapExceeded,
    act_e_dprime,
    act_e_prime,
    act_mul_b,
    build_weight_space,
    commutator_element,
    dim_at,
    divided_power,
    form_u,
    integral_monomials,
    is_in_radical,
    lift,
    radical_generators_at,
    reduce_element,
    serre_element,
    unit_u,
    words_at_weight,
    zero_u,
)


def partition_count(n):
    table = [1] + [0] * n
    for part in range(1, n + 1):
        for total in range(part, n + 1):
            table[total] += table[total - part]
    return table[n]


def composition_count(n):
    return 1 if n == 0 else 2 ** (n - 1)


def b(d, i, l=1):
    return FreeElement.generator(d, i, l)


def rank1_root(l):
    return RootVector({1: l})


def small_roots(d, max_height):
    """Every nonzero weight of height at most max_height."""
    roots = [RootVector()]
    seen = {roots[0]}
    out = []
    frontier = [RootVector()]
    for _ in range(max_height):
        nxt = []
        for a in frontier:
            for i in d.vertices:
                r = a.plus(i, 1)
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
                    out.append(r)
        frontier = nxt
    return out


# ---------------------------------------------------------------------------
# word enumeration
# ---------------------------------------------------------------------------


def test_words_mixed_small():
    d = mixed_datum()
    alpha = RootVector({1: 2, 2: 1})
    ws = words_at_weight(d, alpha)
    g1, g2 = GenIndex(1, 1), GenIndex(2, 1)
    assert ws == [(g1, g1, g2), (g1, g2, g1), (g2, g1, g1)]


def test_words_isotropic_level3():
    d = isotropic_datum()
    ws = words_at_weight(d, rank1_root(3))
    ls = [tuple(g.l for g in w) for w in ws]
    assert ls == [(1, 1, 1), (1, 2), (2, 1), (3,)]


def test_word_counts_match_compositions():
    d = imaginary_datum()
    for l in range(7):
        assert len(words_at_weight(d, rank1_root(l))) == composition_count(l)


def test_word_cap_enforced():
    d = mixed_datum()
    with pytest.raises(WordCapExceeded):
        words_at_weight(d, RootVector({1: 2, 2: 1}), word_cap=2)


# ---------------------------------------------------------------------------
# quotient dimensions against the counting oracles
# ---------------------------------------------------------------------------


def test_dim_rank1_real():
    d = sl2_datum()
    for l in range(7):
        assert dim_at(d, rank1_root(l)) == 1


def test_dim_rank1_isotropic():
    d = isotropic_datum()
    expected = [1, 1, 2, 3, 5, 7, 11]
    for l in range(7):
        assert dim_at(d, rank1_root(l)) == partition_count(l) == expected[l]


def test_dim_rank1_imaginary_free():
    d = imaginary_datum()
    for l in range(7):
        assert dim_at(d, rank1_root(l)) == composition_count(l)


def test_dim_mixed_frozen():
    d = mixed_datum()
    model = build_weight_space(d, RootVector({1: 2, 2: 1}))
    assert len(model.words) == 3
    assert model.dim == 2
    assert model.pivots == (0, 1)


# ---------------------------------------------------------------------------
# radical membership
# ---------------------------------------------------------------------------


def test_serre_element_in_radical():
    d = mixed_datum()
    r = serre_element(d, 1, 2, 1)
    assert not r.is_zero
    assert is_in_radical(r)
    assert len(r.coeffs) == 3


def test_isotropic_commutator_in_radical():
    d = isotropic_datum()
    r = commutator_element(d, 1, 1, 1, 2)
    assert not r.is_zero
    assert is_in_radical(r)
    assert not is_in_radical(b(d, 1, 1) * b(d, 1, 2))


def test_radical_generators_all_heights():
    for d, nontrivial in (
        (mixed_datum(), True),
        (isotropic_datum(), True),
        (imaginary_datum(), False),
    ):
        total = 0
        for alpha in small_roots(d, 5):
            for r in radical_generators_at(d, alpha):
                assert r.weight() == alpha
                assert is_in_radical(r)
                total += 1
        assert (total > 0) == nontrivial


def test_radical_spans_word_deficit_mixed():
    d = mixed_datum()
    alpha = RootVector({1: 2, 2: 1})
    gens = radical_generators_at(d, alpha)
    assert len(gens) == 1
    model = build_weight_space(d, alpha)
    assert len(model.words) - model.dim == 1


def test_radical_is_ideal_sampled():
    d = mixed_datum()
    for alpha in small_roots(d, 3):
        for r in radical_generators_at(d, alpha):
            for i in d.vertices:
                for l in (1,) if d.is_real(i) else (1, 2):
                    g = b(d, i, l)
                    assert is_in_radical(g * r)
                    assert is_in_radical(r * g)


def test_radical_stable_under_derivations():
    d = mixed_datum()
    for alpha in small_roots(d, 4):
        for r in radical_generators_at(d, alpha):
            for i in d.vertices:
                for l in (1,) if d.is_real(i) else (1, 2):
                    assert is_in_radical(e_prime(i, l, r))
                    assert is_in_radical(e_dprime(i, l, r))


# ---------------------------------------------------------------------------
# reduce, lift, and the quotient operations
# ---------------------------------------------------------------------------


def test_reduce_fixes_pivot_words():
    d = mixed_datum()
    model = build_weight_space(d, RootVector({1: 2, 2: 1}))
    for n, pos in enumerate(model.pivots):
        u = model.reduce(FreeElement(d, {model.words[pos]: ScalarQ.one()}))
        assert [c.is_zero for c in u.coords] == [m != n for m in range(model.dim)]
        assert model.reduce(model.lift(u)) == u


def test_reduce_kills_radical_shift():
    d = mixed_datum()
    alpha = RootVector({1: 2, 2: 1})
    (r,) = radical_generators_at(d, alpha)
    x = b(d, 1) * b(d, 1) * b(d, 2)
    assert reduce_element(x + r.scale(ScalarQ.q(3))) == reduce_element(x)


def test_reduce_is_linear():
    d = isotropic_datum()
    x = b(d, 1, 1) * b(d, 1, 2)
    y = b(d, 1, 3)
    c = ScalarQ.q(-1) + ScalarQ.of(2)
    lhs = reduce_element(x.scale(c) + y)
    rhs = reduce_element(x).scale(c) + reduce_element(y)
    assert lhs == rhs


def test_unit_and_zero():
    d = mixed_datum()
    assert unit_u(d).coords == (ScalarQ.one(),)
    assert zero_u(d).is_zero
    assert reduce_element(FreeElement(d)).is_zero
    assert lift(zero_u(d)).is_zero


def test_act_mul_descends():
    d = mixed_datum()
    alpha = RootVector({1: 2, 2: 1})
    (r,) = radical_generators_at(d, alpha)
    x = b(d, 1) * b(d, 2) * b(d, 1)
    for i, l in ((1, 1), (2, 1), (2, 2)):
        direct = reduce_element(b(d, i, l) * x)
        assert act_mul_b(i, l, reduce_element(x)) == direct
        assert act_mul_b(i, l, reduce_element(x + r)) == direct


def test_act_e_prime_descends():
    d = mixed_datum()
    alpha = RootVector({1: 2, 2: 1})
    (r,) = radical_generators_at(d, alpha)
    x = b(d, 2) * b(d, 1) * b(d, 1)
    for i, l in ((1, 1), (2, 1)):
        direct = reduce_element(e_prime(i, l, x))
        assert act_e_prime(i, l, reduce_element(x)) == direct
        assert act_e_prime(i, l, reduce_element(x + r)) == direct
        direct2 = reduce_element(e_dprime(i, l, x))
        assert act_e_dprime(i, l, reduce_element(x + r)) == direct2


def test_bar_descends():
    d = mixed_datum()
    c = ScalarQ.q(2) + ScalarQ.of(1)
    x = (b(d, 1) * b(d, 2) * b(d, 1)).scale(c)
    assert reduce_element(x.bar()) == reduce_element(x).bar()


def test_form_on_quotient_matches_free_form():
    d = mixed_datum()
    alpha = RootVector({1: 2, 2: 1})
    (r,) = radical_generators_at(d, alpha)
    x = b(d, 1) * b(d, 1) * b(d, 2)
    y = b(d, 1) * b(d, 2) * b(d, 1)
    assert form_u(reduce_element(x), reduce_element(y)) == lusztig_form(x, y)
    assert form_u(reduce_element(x + r), reduce_element(y)) == lusztig_form(x, y)


# ---------------------------------------------------------------------------
# divided powers, Serre expansion, integral monomials
# ---------------------------------------------------------------------------


def test_divided_power_values():
    d = sl2_datum()
    two = divided_power(d, 1, 2)
    w = (GenIndex(1, 1), GenIndex(1, 1))
    assert two.coeffs == {w: (ScalarQ.q(1) + ScalarQ.q(-1)).inverse()}
    with pytest.raises(ValueError):
        divided_power(isotropic_datum(), 1, 2)


def test_serre_element_expansion():
    d = mixed_datum()
    r = serre_element(d, 1, 2, 1)
    g1, g2 = GenIndex(1, 1), GenIndex(2, 1)
    inv2 = (ScalarQ.q(1) + ScalarQ.q(-1)).inverse()
    assert r.coeffs[(g2, g1, g1)] == inv2
    assert r.coeffs[(g1, g1, g2)] == inv2
    assert r.coeffs[(g1, g2, g1)] == -ScalarQ.one()
    with pytest.raises(ValueError):
        serre_element(d, 2, 1, 1)
    with pytest.raises(ValueError):
        serre_element(d, 1, 1, 1)


def test_integral_monomials_run_normalization():
    d = mixed_datum()
    ms = integral_monomials(d, RootVector({1: 2, 2: 1}))
    g1, g2 = GenIndex(1, 1), GenIndex(2, 1)
    inv2 = (ScalarQ.q(1) + ScalarQ.q(-1)).inverse()
    by_word = {next(iter(m.coeffs)): next(iter(m.coeffs.values())) for m in ms}
    assert by_word[(g1, g1, g2)] == inv2
    assert by_word[(g1, g2, g1)] == ScalarQ.one()
    assert by_word[(g2, g1, g1)] == inv2


def test_integral_monomials_imaginary_untouched():
    d = isotropic_datum()
    for m in integral_monomials(d, rank1_root(3)):
        assert list(m.coeffs.values()) == [ScalarQ.one()]


def test_divided_power_product_is_integral_multiple():
    d = sl2_datum()
    prod = divided_power(d, 1, 2) * divided_power(d, 1, 3)
    (m,) = integral_monomials(d, rank1_root(5))
    word = next(iter(prod.coeffs))
    ratio = prod.coeffs[word] / m.coeffs[word]
    from bbcrystal.qrat import q_binom

    assert ratio == q_binom(5, 2)


def test_scaled_datum_levels_respect_symmetrizer():
    d = BorcherdsCartanDatum((1, 2), ((2, -2), (-1, 0)), (1, 2))
    alpha = RootVector({1: 1, 2: 1})
    model = build_weight_space(d, alpha)
    assert len(model.words) == 2
    assert model.dim == 2
    r = serre_element(d, 1, 2, 1)
    assert is_in_radical(r)
    assert r.weight() == RootVector({1: 3, 2: 1})
