import itertools

import pytest
from hypothesis import given, settings, strategies as st

from ncpit.algebra import PrimeField, Rationals
from ncpit.errors import DecodeError, ParseError, ShapeError
from ncpit.freepoly import (
    SparsePoly,
    decode_bits,
    encode_word,
    is_encoding_prefix,
    parse_sparse,
    parse_word,
    sparse_mul,
)

F7 = PrimeField(7)


def test_encode_examples():
    assert encode_word((1,)) == "010"
    assert encode_word(()) == ""
    assert encode_word((1, 2)) == "0100110"


def test_decode_examples():
    assert decode_bits("0100110", 2) == (1, 2)
    assert decode_bits("", 3) == ()
    with pytest.raises(DecodeError, match="unterminated"):
        decode_bits("011", 2)


@pytest.mark.parametrize(
    "bits,offset",
    [("1", 0), ("00", 0), ("0110", 0), ("0100", 4), ("01", 2)],
)
def test_decode_error_offsets(bits, offset):
    with pytest.raises(DecodeError) as info:
        decode_bits(bits, 1)
    assert info.value.offset == offset


def test_roundtrip_exhaustive():
    seen = {}
    for n in range(1, 7):
        for d in range(0, 7 if n <= 3 else 4):
            for w in itertools.product(range(1, n + 1), repeat=d):
                bits = encode_word(w)
                assert decode_bits(bits, n) == w
                assert len(bits) <= d * (n + 2)
                assert seen.setdefault(bits, w) == w


def test_encoding_prefixes():
    for w in [(1,), (2, 1), (3, 3, 1)]:
        bits = encode_word(w)
        for j in range(len(bits) + 1):
            assert is_encoding_prefix(bits[:j], 3)
    assert not is_encoding_prefix("1", 3)
    assert not is_encoding_prefix("00", 3)
    assert not is_encoding_prefix("01111", 3)


def test_products():
    x1 = SparsePoly.variable(F7, 2, 1)
    x2 = SparsePoly.variable(F7, 2, 2)
    assert sparse_mul(x1, x2).terms == {(1, 2): 1}
    p = sparse_mul(x1 + x2, x1 - x2)
    assert p.terms == {(1, 1): 1, (1, 2): 6, (2, 1): 1, (2, 2): 6}
    assert sparse_mul(x1, SparsePoly.zero(F7, 2)) == SparsePoly.zero(F7, 2)
    comm = sparse_mul(x1, x2) - sparse_mul(x2, x1)
    assert len(comm) == 2
    with pytest.raises(ShapeError):
        sparse_mul(x1, SparsePoly.variable(F7, 3, 1))


def test_text_format_roundtrip():
    q = Rationals()
    p = SparsePoly(q, 2, {(): "1/2", (2, 1): 3, (1,): "-2/3"})
    text = p.format()
    assert text == "1/2 1\n-2/3 x1\n3 x2 x1\n"
    assert parse_sparse(text, q, 2) == p
    with pytest.raises(ParseError, match="line 2"):
        parse_sparse("1 x1\n2 x9\n", F7, 2)
    assert parse_word("x1 x2") == (1, 2)


def test_degree_conventions():
    assert SparsePoly.zero(F7, 2).degree == 0
    assert SparsePoly(F7, 2, {(1, 2, 1): 3, (2,): 7}).degree == 3


poly_st = st.dictionaries(
    st.lists(st.integers(1, 2), max_size=3).map(tuple), st.integers(0, 6), max_size=4
).map(lambda t: SparsePoly(F7, 2, t))


@given(poly_st, poly_st, poly_st)
@settings(max_examples=80)
def test_algebra_laws(a, b, c):
    assert sparse_mul(sparse_mul(a, b), c) == sparse_mul(a, sparse_mul(b, c))
    assert sparse_mul(a, b + c) == sparse_mul(a, b) + sparse_mul(a, c)
    assert sparse_mul(a + b, c) == sparse_mul(a, c) + sparse_mul(b, c)
    assert (a - a) == SparsePoly.zero(F7, 2)
