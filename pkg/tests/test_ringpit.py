import random
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from ncpit.algebra import PrimeField
from ncpit.circuit import CircuitBuilder, parse_circuit
from ncpit.errors import DomainMismatchError, ParameterError, ParseError
from ncpit.ringpit import (
    SampleSet,
    default_trials,
    eval_ring_circuit,
    expand_commutative,
    expand_noncommutative,
    expand_univariate,
    kronecker_substitute,
    monic_degree,
    nc_ring_test,
    reduce_mod_monic,
    ring_identity_test,
    sample_monic,
    sz_blackbox_test,
    with_negation,
)
from ncpit.rings import QuotientRing, RingPoly, ZMod, monic_divrem, parse_ring_spec, ring_scalar

from helpers import int_expand, random_circuit, random_ring_zero_circuit

DATA = Path(__file__).parent / "data"
Z4, Z6 = ZMod(4), ZMod(6)
BOOL2 = parse_ring_spec("quot:zmod:2:y^2+y")
RINGS = [Z4, Z6, ZMod(9), BOOL2, parse_ring_spec("quot:zmod:4:y^2+1"), parse_ring_spec("prod:zmod:4,zmod:9")]


def poly(ring, ints):
    return RingPoly.from_ints(ring, ints)


def univariate(ring, ints):
    """Circuit for ``sum ints[i] x^i``, built with Horner's rule."""
    b = CircuitBuilder(1, ring)
    x = b.input(1)
    acc = b.const(ints[-1])
    for c in reversed(ints[:-1]):
        acc = b.add(b.mul(acc, x), b.const(c))
    return b.build(acc)


# ring oracles


def test_ring_scalar_examples():
    assert Z6.decode(ring_scalar(Z6, 10)) == 4
    assert ring_scalar(Z6, 0) == Z6.zero
    assert ring_scalar(Z6, 1) == Z6.one
    assert ring_scalar(Z6, -1) == Z6.encode(5)


@given(st.sampled_from(RINGS), st.integers(0, 10**6), st.integers(0, 10**6))
@settings(max_examples=100)
def test_ring_scalar_is_homomorphic(ring, a, b):
    assert ring.mul(ring_scalar(ring, a), ring_scalar(ring, b)) == ring_scalar(ring, a * b)
    assert ring.add(ring_scalar(ring, a), ring_scalar(ring, b)) == ring_scalar(ring, a + b)


def test_ring_scalar_matches_residue():
    for t in (2, 6, 30, 257):
        z = ZMod(t)
        for c in (0, 1, 5, 1000, 2**70 + 3):
            assert z.decode(ring_scalar(z, c)) == c % t


def test_ring_axioms_on_sampled_triples():
    rng = random.Random(41)
    for ring in RINGS:
        elems = list(ring.elements())
        assert len(set(elems)) == ring.size
        for _ in range(200):
            a, b, c = (rng.choice(elems) for _ in range(3))
            add, mul = ring.add, ring.mul
            assert add(a, b) == add(b, a) and mul(a, b) == mul(b, a)
            assert add(add(a, b), c) == add(a, add(b, c))
            assert mul(mul(a, b), c) == mul(a, mul(b, c))
            assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))
            assert add(a, ring.zero) == a and mul(a, ring.one) == a
            assert add(a, ring.neg(a)) == ring.zero


def test_quotient_ring_arithmetic():
    y = BOOL2.parse("y")
    assert BOOL2.mul(y, y) == y
    assert BOOL2.mul(y, BOOL2.parse("y+1")) == BOOL2.zero
    assert BOOL2.format(BOOL2.parse("y+1")) == "1+y"
    i = parse_ring_spec("quot:zmod:4:y^2+1").parse("y")
    r = parse_ring_spec("quot:zmod:4:y^2+1")
    assert r.mul(i, i) == r.neg(r.one)


def test_parse_ring_spec():
    assert parse_ring_spec("zmod:6") == Z6 == parse_ring_spec("zmod 6")
    assert parse_ring_spec("quot:zmod:2:y^2+y") == QuotientRing(2, [0, 1, 1])
    prod = parse_ring_spec("prod:zmod:4,zmod:9")
    assert prod.size == 36 and prod.element_bits == 2 + 4
    for bad in ("zmod", "field:7", "quot:zmod:2:", "quot:zmod:2:2y^2+1"):
        with pytest.raises((ParseError, ParameterError)):
            parse_ring_spec(bad)


class _AddOnly:
    def __init__(self, ring):
        self.zero, self.one, self.add, self.mul = ring.zero, ring.one, ring.add, ring.mul


def test_with_negation_synthesizes_neg():
    o = with_negation(_AddOnly(Z6))
    assert o.characteristic == 6
    for x in range(6):
        assert o.neg(Z6.encode(x)) == Z6.encode(-x)
    assert with_negation(Z6) is Z6
    with pytest.raises(ParameterError):
        with_negation(_AddOnly(ZMod(300)), cap=100)


# monic division


def test_monic_divrem_examples():
    quot, rem = monic_divrem(poly(Z6, [1, 0, 1]), poly(Z6, [1, 1]))
    assert quot == poly(Z6, [5, 1]) and rem == poly(Z6, [2])
    q = poly(Z6, [3, 2, 1])
    assert monic_divrem(q, q) == (poly(Z6, [1]), poly(Z6, []))
    g = poly(Z6, [4, 1])
    assert monic_divrem(g, q) == (poly(Z6, []), g)
    with pytest.raises(ParameterError):
        monic_divrem(g, poly(Z6, [1, 2]))


def test_division_remultiplies():
    rng = random.Random(42)
    for _ in range(300):
        ring = ZMod(rng.randint(2, 30)) if rng.random() < 0.7 else rng.choice(RINGS)
        elems = list(ring.elements())
        g = RingPoly(ring, [rng.choice(elems) for _ in range(rng.randint(0, 12))])
        q = RingPoly(ring, [rng.choice(elems) for _ in range(rng.randint(1, 6))] + [ring.one])
        quot, rem = monic_divrem(g, q)
        assert q * quot + rem == g
        assert rem.degree < q.degree


# substitution and sampling


def test_kronecker_examples():
    b = CircuitBuilder(2, Z6)
    x1, x2 = b.input(1), b.input(2)
    c = b.build(b.mul(b.mul(x1, x1), x2))
    g, D = kronecker_substitute(c, 2)
    assert D == 6
    assert expand_univariate(g) == poly(Z6, [0, 0, 0, 0, 0, 1])
    b = CircuitBuilder(3, Z6)
    g, _ = kronecker_substitute(b.build(b.input(1)), 4)
    assert expand_univariate(g) == poly(Z6, [0, 1])


def test_kronecker_faithfulness():
    rng = random.Random(43)
    for _ in range(150):
        n, d = rng.randint(1, 3), rng.randint(1, 3)
        b = CircuitBuilder(n, Z6)
        terms = []
        for _ in range(rng.randint(1, 4)):
            exps = [0] * n
            for _ in range(rng.randint(0, d)):
                exps[rng.randrange(n)] += 1
            mono = b.product([b.input(i + 1) for i in range(n) for _ in range(exps[i])]) if any(exps) else b.const(1)
            terms.append(b.scale(rng.randrange(1, 6), mono))
        if rng.random() < 0.3:
            terms.append(b.scale(-1, terms[0]))
        c = b.build(b.sum(terms))
        f = expand_commutative(c)
        ref = {}
        for w, v in int_expand(c, 6, commutative=True).items():
            ref[tuple(w.count(i) for i in range(1, n + 1))] = v
        assert {e: Z6.decode(v) for e, v in f.items()} == ref
        g, D = kronecker_substitute(c, d)
        gu = expand_univariate(g)
        assert gu.is_zero() == (not f)
        assert gu.degree <= D
        for e, v in f.items():
            k = sum(x * (d + 1) ** i for i, x in enumerate(e))
            assert gu.coeffs[k] == v


def test_sample_monic_shape():
    assert monic_degree(6, Fraction(1, 2)) == 8
    assert monic_degree(0, Fraction(1, 2)) == monic_degree(1, Fraction(1, 2)) == 5
    assert SampleSet.for_monic(Z6, 8, Fraction(1, 2)).M == 257
    assert SampleSet.for_blackbox(Z6, Fraction(1, 2)).M == 33
    rng = random.Random(44)
    ones = {ring_scalar(Z6, c) for c in range(6)}
    for _ in range(50):
        q = sample_monic(6, Fraction(1, 2), Z6, rng)
        assert q.degree == 8 and q.is_monic()
        assert set(q.coeffs) <= ones
    with pytest.raises(ParameterError):
        monic_degree(6, 1)
    assert default_trials(8, Fraction(1, 2)) == 888


# the tests themselves


def test_ring_identity_test_examples():
    z4sq = parse_circuit((DATA / "z4_square.nc").read_text())
    b = CircuitBuilder(1, Z6)
    two_x = b.build(b.scale(2, b.input(1)))
    b = CircuitBuilder(1, Z6)
    x = b.input(1)
    x_minus_x = b.build(b.sub(x, x))
    for seed in range(20):
        assert ring_identity_test(z4sq, trials=5, rng=random.Random(seed)).zero
        v = ring_identity_test(two_x, trials=1, rng=random.Random(seed))
        assert not v.zero and v.witness["remainder"] == ["0", "2"]
        assert ring_identity_test(x_minus_x, trials=5, rng=random.Random(seed)).zero


def test_ring_identity_test_is_reproducible():
    c = univariate(Z6, [0, 3, 0, 2])
    a = ring_identity_test(c, trials=20, rng=random.Random(7))
    b = ring_identity_test(c, trials=20, rng=random.Random(7))
    assert a == b


def test_requires_ring_domain():
    b = CircuitBuilder(1, PrimeField(7))
    with pytest.raises(DomainMismatchError):
        ring_identity_test(b.build(b.input(1)), trials=1)


def test_nc_ring_examples():
    b = CircuitBuilder(2, Z6)
    x1, x2 = b.input(1), b.input(2)
    comm = b.build(b.sub(b.mul(x1, x2), b.mul(x2, x1)))
    v = nc_ring_test(comm, 2, trials=30, rng=random.Random(3))
    assert v.info["k"] == 2 and not v.zero
    assert len(v.witness["entry"]) == 2 and v.witness["remainder"]
    b = CircuitBuilder(2, Z6)
    x1 = b.input(1)
    assert nc_ring_test(b.build(b.sub(x1, x1)), 1, trials=3, rng=random.Random(3)).zero
    # the commutator vanishes commutatively, so the commutative test misses it
    assert ring_identity_test(comm, trials=20, rng=random.Random(3)).zero


def test_one_sidedness():
    rng = random.Random(45)
    for ring in (Z4, Z6, BOOL2):
        for _ in range(12):
            c = random_ring_zero_circuit(rng, ring, rng.randint(1, 2), max_gates=10, max_degree=4)
            assert not expand_noncommutative(c)
            seed = rng.getrandbits(32)
            assert ring_identity_test(c, trials=2, rng=random.Random(seed)).zero
            assert nc_ring_test(c, trials=1, rng=random.Random(seed)).zero
            assert sz_blackbox_test(c, ring, c.n, Fraction(1, 2), 5, random.Random(seed)).zero


def test_expansions_match_integer_oracle():
    rng = random.Random(46)
    for _ in range(80):
        t = rng.randint(2, 30)
        ring = ZMod(t)
        c = random_circuit(rng, ring, rng.randint(1, 3), max_gates=10, max_degree=4)
        nc = expand_noncommutative(c)
        assert {w: ring.decode(v) for w, v in nc.items()} == int_expand(c, t)


def test_gate_structured_reduction():
    rng = random.Random(47)
    for _ in range(150):
        ring = ZMod(rng.randint(2, 30)) if rng.random() < 0.7 else rng.choice(RINGS)
        c = random_circuit(rng, ring, 1, max_gates=12, max_degree=8)
        elems = list(ring.elements())
        q = RingPoly(ring, [rng.choice(elems) for _ in range(rng.randint(1, 4))] + [ring.one])
        assert reduce_mod_monic(c, q) == monic_divrem(expand_univariate(c), q)[1]


def test_sz_blackbox_rates():
    b = CircuitBuilder(1, Z4)
    two_x = b.build(b.scale(2, b.input(1)))
    rng = random.Random(48)
    hits = sum(not sz_blackbox_test(two_x, Z4, 1, Fraction(1, 2), 1, rng).zero for _ in range(3000))
    # M = 17, and 8 of the residues 0..16 are odd
    assert abs(hits / 3000 - 8 / 17) < 0.04

    z101 = ZMod(101)
    b = CircuitBuilder(2, z101)
    prod = b.build(b.mul(b.input(1), b.input(2)))
    misses = sum(sz_blackbox_test(prod, z101, 2, Fraction(1, 2), 1, rng).zero for _ in range(3000))
    assert misses / 3000 <= Fraction(4, 101) * Fraction(5, 4)

    v = sz_blackbox_test(lambda pt: Z4.mul(ring_scalar(Z4, 2), pt[0]), Z4, 1, Fraction(1, 2), 50, random.Random(1))
    assert not v.zero and v.witness["point"][0] % 2 == 1


def test_eval_ring_circuit():
    c = univariate(Z6, [1, 0, 1])
    for x in range(6):
        assert Z6.decode(eval_ring_circuit(c, [Z6.encode(x)])) == (x * x + 1) % 6
