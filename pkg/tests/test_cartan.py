"""Borcherds-Cartan datum validation, weights, and level combinatorics."""

import pytest

from bbcrystal.cartan import (
    BorcherdsCartanDatum,
    DatumParseError,
    RootVector,
    Weight,
    dominant_weight,
    enumerate_compositions,
    imaginary_datum,
    is_dominant,
    isotropic_datum,
    mixed_datum,
    pairing,
    parse_datum,
    part_multiplicity,
    root_pairing,
    sl2_datum,
    sym_form,
    validate_datum,
    validate_datum_lines,
)
from bbcrystal.qrat import QVAR, ScalarQ


# independent counting oracles, written before the enumerators
def partition_count(n):
    ways = [1] + [0] * n
    for part in range(1, n + 1):
        for t in range(part, n + 1):
            ways[t] += ways[t - part]
    return ways[n]


def composition_count(n):
    return 1 if n == 0 else 2 ** (n - 1)


def test_mixed_datum_valid_and_classified():
    d = mixed_datum()
    assert validate_datum(d) == []
    assert d.real_vertices() == (1,)
    assert d.imaginary_vertices() == (2,)
    assert d.is_isotropic(2) and not d.is_isotropic(1)
    assert d.a(1, 2) == -1 and d.a(2, 1) == -1
    assert d.s(1) == 1


def test_bad_diagonal_rejected():
    d = BorcherdsCartanDatum((1,), ((1,),), (1,))
    report = validate_datum(d)
    assert any("diagonal" in msg for msg in report)


def test_odd_negative_diagonal_rejected():
    d = BorcherdsCartanDatum((1,), ((-3,),), (1,))
    assert validate_datum(d) != []


def test_positive_offdiagonal_rejected():
    d = BorcherdsCartanDatum((1, 2), ((2, 1), (1, 2)), (1, 1))
    assert any("off-diagonal" in msg for msg in validate_datum(d))


def test_non_symmetrizable_rejected():
    d = BorcherdsCartanDatum((1, 2), ((2, -1), (-2, 2)), (1, 1))
    assert any("symmetrizability" in msg for msg in validate_datum(d))


def test_nonpositive_symmetrizer_rejected():
    d = BorcherdsCartanDatum((1,), ((2,),), (0,))
    assert any("positive" in msg for msg in validate_datum(d))


def test_pairing_and_sym_form():
    d = mixed_datum()
    lam = dominant_weight(d, {1: 1}).minus(1, 1).minus(2, 1)
    assert pairing(d, 1, lam) == 1 - (2 - 1)
    assert pairing(d, 2, lam) == 0 - (-1 + 0)
    assert sym_form(d, 1, 2) == -1 == sym_form(d, 2, 1)
    assert sym_form(d, 2, 2) == 0
    assert sym_form(d, 1, 1) == 2
    alpha = RootVector({1: 2, 2: 1})
    assert root_pairing(d, 1, alpha) == 2 * 2 - 1
    assert root_pairing(d, 2, alpha) == -2


def test_weight_and_root_arithmetic():
    lam = Weight({1: 2})
    mu = lam.minus(1, 1).minus(2, 3)
    assert mu.offset == RootVector({1: 1, 2: 3})
    assert mu.plus(2, 1).offset == RootVector({1: 1, 2: 2})
    assert mu.offset.height() == 4
    with pytest.raises(ValueError):
        mu.plus(1, 2)
    assert RootVector({1: 1}) + RootVector({1: 1, 2: 2}) == RootVector({1: 2, 2: 2})
    assert lam == Weight({1: 2, 2: 0})
    assert hash(lam) == hash(Weight({1: 2}))


def test_dominance():
    d = mixed_datum()
    assert is_dominant(d, dominant_weight(d, {1: 3, 2: 1}))
    assert is_dominant(d, Weight())
    assert not is_dominant(d, Weight({1: 1}).minus(1, 1))
    with pytest.raises(ValueError):
        dominant_weight(d, {1: -1})
    with pytest.raises(ValueError):
        dominant_weight(d, {9: 1})


def test_compositions_real():
    d = sl2_datum()
    for l in range(1, 5):
        assert enumerate_compositions(d, 1, l) == [(l,)]


def test_compositions_isotropic():
    d = isotropic_datum()
    assert enumerate_compositions(d, 1, 0) == [()]
    assert enumerate_compositions(d, 1, 4) == [
        (4,),
        (3, 1),
        (2, 2),
        (2, 1, 1),
        (1, 1, 1, 1),
    ]
    for l in range(11):
        cs = enumerate_compositions(d, 1, l)
        assert len(cs) == partition_count(l)
        assert len(set(cs)) == len(cs)
        assert all(tuple(sorted(c, reverse=True)) == c for c in cs)
        assert all(sum(c) == l for c in cs)


def test_compositions_imaginary():
    d = imaginary_datum()
    assert enumerate_compositions(d, 1, 3) == [(3,), (2, 1), (1, 2), (1, 1, 1)]
    for l in range(11):
        cs = enumerate_compositions(d, 1, l)
        assert len(cs) == composition_count(l)
        assert len(set(cs)) == len(cs)
        assert all(sum(c) == l for c in cs)


def test_part_multiplicity():
    assert part_multiplicity((2, 1, 1), 1) == 2
    assert part_multiplicity((2, 1, 1), 2) == 1
    assert part_multiplicity((), 3) == 0


def test_q_helpers():
    d = BorcherdsCartanDatum((1,), ((2,),), (2,))
    q = QVAR
    assert d.q_i(1) == ScalarQ.q(2)
    assert d.q_ii(1) == ScalarQ.q(2)
    assert d.bracket(1, 2) == q**2 + q**-2
    iso = isotropic_datum()
    assert iso.q_ii(1) == ScalarQ.one()
    ni = imaginary_datum(-2, 1)
    assert ni.q_ii(1) == ScalarQ.q(-1)
    assert mixed_datum().bracket_factorial(1, 2) == q + q**-1


MIXED_TEXT = """
# one real and one isotropic vertex
vertex 1 a=2 s=1
vertex 2 a=0 s=1
edge 1 2 a=-1
edge 2 1 a=-1
"""


def test_parse_round_trip():
    d, lines = parse_datum(MIXED_TEXT)
    assert d == mixed_datum()
    assert lines[("vertex", 1)] == 3
    assert lines[("edge", 2, 1)] == 6
    assert validate_datum(d) == []


def test_parse_errors_are_line_precise():
    with pytest.raises(DatumParseError) as err:
        parse_datum("vertex 1 a=2 s=1\nvertx 2 a=0 s=1\n")
    assert err.value.line == 2
    with pytest.raises(DatumParseError) as err:
        parse_datum("vertex 1 a=2 s=1\nvertex 1 a=0 s=1\n")
    assert err.value.line == 2
    with pytest.raises(DatumParseError) as err:
        parse_datum("vertex 1 a=2 s=1\nedge 1 3 a=-1\n")
    assert err.value.line == 2
    with pytest.raises(DatumParseError) as err:
        parse_datum("vertex 1 a=two s=1\n")
    assert err.value.line == 1
    with pytest.raises(DatumParseError) as err:
        parse_datum("vertex 1 a=2 s=1\nedge 1 1 a=-1\n")
    assert err.value.line == 2
    with pytest.raises(DatumParseError):
        parse_datum("# empty\n")


def test_validation_with_lines_points_at_edge():
    text = "vertex 1 a=2 s=1\nvertex 2 a=0 s=1\nedge 1 2 a=-1\nedge 2 1 a=-2\n"
    d, lines = parse_datum(text)
    report = validate_datum_lines(d, lines)
    assert report, "expected a symmetrizability violation"
    assert any(ln in (3, 4) for ln, _ in report)
