"""Grammar, spans, canonical formatting, round trips."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsbound import (
    GaussianRational,
    LaurentPoly,
    ParseError,
    format_matrix,
    format_poly,
    parse_matrix,
    parse_poly,
)

from conftest import EXAMPLE_MATRIX_TEXT, random_poly


def test_parse_example_poly():
    p = parse_poly("z1^3*z2 + 2*z1*z2^2 - 16")
    assert p.dim == 2
    assert p.terms == {
        (3, 1): GaussianRational(1),
        (1, 2): GaussianRational(2),
        (0, 0): GaussianRational(-16),
    }


def test_parse_zero():
    assert parse_poly("0").is_zero()
    assert parse_poly("0").dim == 1


def test_parse_complex_coefficient():
    p = parse_poly("(1/2 + 3/4i)*z1^-2")
    assert p.terms == {(-2,): GaussianRational(Fraction(1, 2), Fraction(3, 4))}


def test_parse_decimal_is_exact():
    p = parse_poly("0.25*z1")
    assert p.terms == {(1,): GaussianRational(Fraction(1, 4))}


def test_parse_unary_minus_binds_to_term():
    p = parse_poly("-z1*z2")
    assert p.terms == {(1, 1): GaussianRational(-1)}


def test_parse_comment_and_whitespace():
    p = parse_poly("z1   # trailing comment\n + 1  # another\n")
    assert p == parse_poly("z1 + 1")


def test_parse_repeated_variable_accumulates():
    assert parse_poly("z1*z1") == parse_poly("z1^2")


def test_parse_pure_imaginary_forms():
    assert parse_poly("i").terms == {(0,): GaussianRational(0, 1)}
    assert parse_poly("3/4i*z1").terms == {(1,): GaussianRational(0, Fraction(3, 4))}
    assert parse_poly("-i*z1") == parse_poly("(0 - i)*z1")


def test_parse_expected_dim_embeds_and_rejects():
    p = parse_poly("z1 + 1", expected_dim=3)
    assert p.dim == 3
    with pytest.raises(ParseError) as exc:
        parse_poly("z1*z4", expected_dim=2)
    assert exc.value.kind == "dimension-mismatch"


@pytest.mark.parametrize(
    "text,kind",
    [
        ("z1 +", "unexpected-token"),
        ("z1^x", "unexpected-token"),
        ("z1^i", "bad-exponent"),
        ("z1^1.5", "bad-exponent"),
        ("1/0", "bad-number"),
        ("z1 @ z2", "unexpected-token"),
        ("z100", "unexpected-token"),
        ("z0", "unexpected-token"),
        ("(1 + i", "unbalanced-bracket"),
        ("2*3", "unexpected-token"),
        ("", "unexpected-token"),
    ],
)
def test_parse_poly_errors(text, kind):
    with pytest.raises(ParseError) as exc:
        parse_poly(text)
    assert exc.value.kind == kind
    span = exc.value.span
    assert 0 <= span.start <= span.end <= len(text)


def test_parse_matrix_example(example_matrix):
    A = example_matrix
    assert (A.rows, A.cols, A.dim) == (2, 3, 2)
    assert A[0, 0] == parse_poly("z1^3", expected_dim=2)
    assert A[1, 0] == parse_poly("2*z1*z2^2 - 16")


def test_parse_matrix_zero_entry_ok():
    A = parse_matrix("[[0]]")
    assert (A.rows, A.cols) == (1, 1)
    assert A.is_zero()


def test_parse_matrix_ragged_rows():
    with pytest.raises(ParseError) as exc:
        parse_matrix("[[z1],[z1, z2]]")
    assert exc.value.kind == "dimension-mismatch"
    assert "ragged" in exc.value.message


def test_parse_matrix_unbalanced():
    with pytest.raises(ParseError) as exc:
        parse_matrix("[[z1], [z2]")
    assert exc.value.kind == "unbalanced-bracket"


def test_format_example_canonical_order():
    p = parse_poly("z1^3*z2 + 2*z1*z2^2 - 16")
    assert format_poly(p) == "2*z1*z2^2 + z1^3*z2 - 16"


def test_format_zero():
    assert format_poly(LaurentPoly.zero(2)) == "0"


def test_format_units_and_signs():
    assert format_poly(parse_poly("-z1 + 1")) == "-z1 + 1"
    assert format_poly(parse_poly("i*z1 - 2/3")) == "i*z1 - 2/3"
    assert format_poly(parse_poly("(1/2 - 3/4i)*z2^-1")) == "(1/2-3/4i)*z2^-1"


def test_format_matrix_round_trip(example_matrix):
    text = format_matrix(example_matrix)
    assert parse_matrix(text) == example_matrix


def test_round_trip_seeded_corpus():
    rng = random.Random(77)
    for _ in range(300):
        p = random_poly(rng, rng.randint(1, 3), max_terms=10, exp_range=9)
        assert parse_poly(format_poly(p), expected_dim=p.dim) == p


@st.composite
def poly_strategy(draw):
    dim = draw(st.integers(1, 3))
    n = draw(st.integers(0, 10))
    terms = {}
    for _ in range(n):
        exp = tuple(draw(st.integers(-9, 9)) for _ in range(dim))
        re = draw(st.fractions(max_denominator=10**4))
        im = draw(st.fractions(max_denominator=10**4))
        if abs(re.numerator) > 10**4 or abs(im.numerator) > 10**4:
            re, im = Fraction(1), Fraction(0)
        terms[exp] = GaussianRational(re, im)
    return LaurentPoly(dim, terms)


@settings(max_examples=200)
@given(poly_strategy())
def test_round_trip_property(p):
    assert parse_poly(format_poly(p), expected_dim=p.dim) == p


@settings(max_examples=200)
@given(poly_strategy(), poly_strategy())
def test_format_injective_on_canonical_forms(p, q):
    if p.dim == q.dim and p != q:
        assert format_poly(p) != format_poly(q)


@settings(max_examples=300)
@given(st.text(alphabet="z123[]()+-*/^i., \n#", max_size=40))
def test_error_spans_stay_inside_input(text):
    try:
        parse_matrix(text) if text.lstrip().startswith("[") else parse_poly(text)
    except ParseError as exc:
        assert 0 <= exc.span.start <= exc.span.end <= len(text)
