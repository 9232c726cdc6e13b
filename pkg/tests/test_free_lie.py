import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dglkit.free_lie import (
    CutoffExceeded,
    GeneratorError,
    GeneratorSet,
    LieElement,
    ParseError,
    bracket,
    decompose,
    format_element,
    from_coordinates,
    is_lyndon,
    oracle_embed,
    parse_expression,
)


def test_lyndon_words():
    assert is_lyndon((0, 1))
    assert not is_lyndon((1, 0))
    assert not is_lyndon((0, 0))


def test_degree_zero_generator_rejected():
    with pytest.raises(GeneratorError, match="connected"):
        GeneratorSet([("e", 0)], 4)


def test_odd_self_bracket_survives_even_vanishes():
    g = GeneratorSet([("a", 1), ("b", 2)], 6)
    a, b = g.generator("a"), g.generator("b")
    assert not bracket(a, a).is_zero()
    assert bracket(b, b).is_zero()
    # [a,[a,a]] = 0 by Jacobi
    assert bracket(a, bracket(a, a)).is_zero()


def test_dimensions_one_odd_generator():
    g = GeneratorSet([("a", 1)], 6)
    assert [len(g.basis_words(k)) for k in range(1, 7)] == [1, 1, 0, 0, 0, 0]


def test_dimensions_two_degree_one_generators():
    g = GeneratorSet([("a", 1), ("b", 1)], 4)
    # super Witt counts for two odd generators
    assert [len(g.basis_words(k)) for k in range(1, 5)] == [2, 3, 2, 3]


def test_cutoff_is_enforced():
    g = GeneratorSet([("a", 1)], 3)
    with pytest.raises(CutoffExceeded):
        g.basis_words(4)


def test_parse_and_format_round_trip():
    g = GeneratorSet([("a", 1), ("b", 1), ("x", 3)], 6)
    e = parse_expression("[[b,a],x] - 2*[a,[a,x]]", g)
    assert parse_expression(format_element(e), g) == e


def test_parse_errors():
    g = GeneratorSet([("a", 1)], 4)
    with pytest.raises(ParseError, match="unknown generator"):
        parse_expression("[a,q]", g)
    with pytest.raises(ParseError):
        parse_expression("[a,a", g)


GENS = GeneratorSet([("a", 1), ("b", 2), ("c", 3)], 8)


@st.composite
def elements(draw, degree):
    words = GENS.basis_words(degree)
    coeffs = draw(st.lists(st.integers(-3, 3), min_size=len(words), max_size=len(words)))
    return from_coordinates(GENS, degree, coeffs)


@given(st.integers(1, 3).flatmap(lambda p: st.integers(1, 3).flatmap(
    lambda q: st.tuples(elements(p), elements(q)))))
@settings(max_examples=60, deadline=None)
def test_antisymmetry(pair):
    x, y = pair
    sign = -(-1) ** (x.degree * y.degree)
    assert bracket(x, y) == sign * bracket(y, x)


@given(st.tuples(st.integers(1, 2), st.integers(1, 3), st.integers(1, 3)).flatmap(
    lambda d: st.tuples(elements(d[0]), elements(d[1]), elements(d[2]))))
@settings(max_examples=40, deadline=None)
def test_jacobi(triple):
    x, y, z = triple
    p, q, r = x.degree, y.degree, z.degree
    total = ((-1) ** (p * r) * bracket(x, bracket(y, z)) + (-1) ** (q * p) * bracket(y, bracket(z, x))
             + (-1) ** (r * q) * bracket(z, bracket(x, y)))
    assert total.is_zero()


@given(st.integers(1, 3).flatmap(lambda p: st.integers(1, 3).flatmap(
    lambda q: st.tuples(elements(p), elements(q)))))
@settings(max_examples=40, deadline=None)
def test_bracket_matches_tensor_commutator(pair):
    x, y = pair
    tx, ty = oracle_embed(x), oracle_embed(y)
    sign = -1 if x.degree * y.degree % 2 == 0 else 1
    expect = {}
    for u, cu in tx.items():
        for v, cv in ty.items():
            for w, c in ((u + v, cu * cv), (v + u, sign * cu * cv)):
                expect[w] = expect.get(w, 0) + c
    expect = {w: c for w, c in expect.items() if c}
    assert oracle_embed(bracket(x, y)) == expect


def test_coordinates_round_trip():
    e = parse_expression("[a,[a,b]] - 3*[b,b] + [a,c]", GENS)
    assert e.degree == 4
    assert from_coordinates(GENS, 4, decompose(e)) == e


def test_mixed_degrees_rejected():
    with pytest.raises(ValueError, match="degrees"):
        parse_expression("[a,b] + [a,[a,b]]", GENS)
