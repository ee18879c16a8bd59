"""Randomized identity testing for circuits whose constants live in a finite ring oracle.

Three tests are provided:

* :func:`sz_blackbox_test` evaluates at random points ``c * 1`` with ``c``
  drawn below a bound ``M`` derived from the encoding length and ``epsilon``.
* :func:`ring_identity_test` maps a commutative circuit to one variable by
  Kronecker substitution, draws a random monic ``q`` and evaluates the circuit
  in ``R[x]/(q)`` gate by gate; a nonzero remainder proves the circuit nonzero.
* :func:`nc_ring_test` handles noncommutative circuits by substituting
  ``k x k`` matrices of fresh commuting variables and testing every entry.

All three are one-sided: a circuit computing zero is always reported zero.
"""

import math
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .circuit import Circuit, CircuitBuilder, is_ring_domain
from .errors import DomainMismatchError, ParameterError, ResourceError
from .rings import RingPoly, _divrem, monic_divrem, poly_add, poly_mul, ring_scalar

__all__ = [
    "RingVerdict",
    "SampleSet",
    "ring_scalar",
    "monic_divrem",
    "monic_degree",
    "default_trials",
    "eval_ring_circuit",
    "sz_blackbox_test",
    "kronecker_substitute",
    "sample_monic",
    "reduce_mod_monic",
    "ring_identity_test",
    "nc_ring_test",
    "expand_commutative",
    "expand_univariate",
    "expand_noncommutative",
    "with_negation",
]


def _epsilon(eps):
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ParameterError("epsilon must lie strictly between 0 and 1")
    return eps


@dataclass(frozen=True)
class SampleSet:
    """``{c * 1 : 0 <= c < M}`` together with how ``M`` was derived."""

    M: int
    epsilon: Fraction
    bits: int
    multiplier: int = 1

    @classmethod
    def for_blackbox(cls, oracle, epsilon):
        """``M = floor(2^(m+1) / epsilon) + 1``."""
        eps = _epsilon(epsilon)
        m = oracle.element_bits
        return cls(math.floor(Fraction(2 ** (m + 1)) / eps) + 1, eps, m)

    @classmethod
    def for_monic(cls, oracle, degree, epsilon):
        """``M = floor(degree * 2^(m+1) / epsilon) + 1``."""
        eps = _epsilon(epsilon)
        m = oracle.element_bits
        return cls(math.floor(Fraction(degree * 2 ** (m + 1)) / eps) + 1, eps, m, degree)

    def draw_int(self, rng):
        return rng.randrange(self.M)

    def draw(self, oracle, rng):
        return ring_scalar(oracle, rng.randrange(self.M))


@dataclass
class RingVerdict:
    zero: bool
    trials: int
    witness: object = None
    info: dict = dc_field(default_factory=dict)

    @property
    def verdict(self):
        return "zero" if self.zero else "nonzero"


def monic_degree(D, epsilon):
    """``ceil(log2(12 D / (1 - epsilon)))``, exactly; ``D`` is clamped to at least 1."""
    eps = _epsilon(epsilon)
    target = Fraction(12 * max(D, 1)) / (1 - eps)
    k = 0
    while 2**k < target:
        k += 1
    return k


def default_trials(deg_q, epsilon):
    """Trials needed to push the miss probability below ``2^-20``."""
    eps = _epsilon(epsilon)
    return math.ceil(20 * math.log(2) * 4 * deg_q / float(1 - eps))


def with_negation(oracle, cap=1 << 16):
    """Return ``oracle`` if it can negate; otherwise a wrapper computing ``-a = (char-1) a``."""
    if callable(getattr(oracle, "neg", None)):
        return oracle
    return _NegatingOracle(oracle, cap)


class _NegatingOracle:
    def __init__(self, inner, cap):
        self._inner = inner
        char, acc = 1, inner.one
        while acc != inner.zero:
            if char >= cap:
                raise ParameterError(f"additive order of 1 exceeds probe cap {cap}")
            acc = inner.add(acc, inner.one)
            char += 1
        self.characteristic = char

    def __getattr__(self, name):
        return getattr(self._inner, name)

    def neg(self, a):
        c, acc, power = self.characteristic - 1, self._inner.zero, a
        while c:
            if c & 1:
                acc = self._inner.add(acc, power)
            c >>= 1
            if c:
                power = self._inner.add(power, power)
        return acc


def _fmt(oracle, a):
    fmt = getattr(oracle, "format", None)
    return fmt(a) if fmt else a.hex()


def _require_ring(c):
    if not is_ring_domain(c.domain):
        raise DomainMismatchError("ring tests need a circuit declared over a ring")


def eval_ring_circuit(c, point):
    """Commutative evaluation of a ring-mode circuit at ring elements ``point``."""
    o = c.domain
    return c.fold(
        lambda i: point[i - 1],
        lambda v: v,
        o.add,
        o.mul,
        o.mul,
    )


def sz_blackbox_test(f, oracle, n, epsilon, trials, rng):
    """Evaluate ``f`` at ``trials`` random points of ``U^n``; nonzero on the first nonzero value.

    ``f`` is a ring-mode :class:`Circuit` or any callable taking a list of
    ``n`` encodings.  The guarantee assumes the characteristic primes of the
    ring are large compared with ``n`` and the degree; that cannot be checked
    through the oracle and is left to the caller.
    """
    if isinstance(f, Circuit):
        _require_ring(f)
        circuit = f
        f = lambda pt: eval_ring_circuit(circuit, pt)
    U = SampleSet.for_blackbox(oracle, epsilon)
    info = {"M": U.M}
    for trial in range(trials):
        cs = [U.draw_int(rng) for _ in range(n)]
        value = f([ring_scalar(oracle, c) for c in cs])
        if value != oracle.zero:
            return RingVerdict(False, trial + 1, {"trial": trial, "point": cs, "value": _fmt(oracle, value)}, info)
    return RingVerdict(True, trials, None, info)


def kronecker_substitute(c, d):
    """Replace ``x_i`` by ``x^((d+1)^(i-1))``; returns ``(univariate circuit, D)`` with ``D = d (d+1)^(n-1)``."""
    _require_ring(c)
    if d < 0:
        raise ParameterError("degree bound must be nonnegative")
    b = CircuitBuilder(1, c.domain)
    x = b.input(1)
    squares = [x]  # squares[j] = x^(2^j)
    powers = {}

    def power(e):
        if e not in powers:
            while (1 << len(squares)) <= e:
                squares.append(b.mul(squares[-1], squares[-1]))
            parts = [squares[j] for j in range(len(squares)) if e >> j & 1]
            powers[e] = b.product(parts)
        return powers[e]

    renum = {}
    for idx in c.reachable():
        g = c.gates[idx]
        if g.op == "input":
            renum[idx] = power((d + 1) ** (g.a - 1))
        elif g.op == "const":
            renum[idx] = b.const(g.a)
        elif g.op in ("add", "mul"):
            renum[idx] = (b.add if g.op == "add" else b.mul)(renum[g.a], renum[g.b])
        else:
            renum[idx] = b.scale(g.a, renum[g.b])
    return b.build(renum[c.output]), d * (d + 1) ** (c.n - 1)


def sample_monic(D, epsilon, oracle, rng):
    """Random monic ``q`` of degree ``monic_degree(D, epsilon)`` with lower coefficients from ``U``."""
    deg_q = monic_degree(D, epsilon)
    U = SampleSet.for_monic(oracle, deg_q, epsilon)
    coeffs = [U.draw(oracle, rng) for _ in range(deg_q)]
    return RingPoly(oracle, coeffs + [oracle.one])


def reduce_mod_monic(c, q):
    """Value of a univariate ring-mode circuit in ``R[x]/(q)``, reducing after every product."""
    _require_ring(c)
    if c.n != 1:
        raise ParameterError("gate-structured reduction needs a univariate circuit")
    if not q.is_monic() or q.degree < 1:
        raise ParameterError("modulus must be monic of degree >= 1")
    o, qc = c.domain, q.coeffs

    def rem(p):
        return _divrem(o, p, qc)[1] if len(p) > q.degree else p

    x = rem([o.zero, o.one])
    out = c.fold(
        lambda i: x,
        lambda v: [v],
        lambda a, b: poly_add(o, a, b),
        lambda a, b: rem(poly_mul(o, a, b)),
        lambda v, a: [o.mul(v, t) for t in a],
    )
    return RingPoly(o, out)


def ring_identity_test(c, d=None, epsilon=Fraction(1, 2), trials=None, rng=None):
    """Randomized zero test for a commutative ring-mode circuit (one-sided)."""
    _require_ring(c)
    o = c.domain
    rng = rng if rng is not None else random.Random()
    d = c.formal_degree() if d is None else d
    g, D = kronecker_substitute(c, d)
    deg_q = monic_degree(D, epsilon)
    trials = default_trials(deg_q, epsilon) if trials is None else trials
    U = SampleSet.for_monic(o, deg_q, epsilon)
    info = {"D": D, "deg_q": deg_q, "M": U.M}
    for trial in range(trials):
        trial_rng = random.Random(rng.getrandbits(64))
        q = sample_monic(D, epsilon, o, trial_rng)
        r = reduce_mod_monic(g, q)
        if not r.is_zero():
            witness = {
                "trial": trial,
                "modulus": [_fmt(o, a) for a in q.coeffs],
                "remainder": [_fmt(o, a) for a in r.coeffs],
            }
            return RingVerdict(False, trial + 1, witness, info)
    return RingVerdict(True, trials, None, info)


def matrix_substitution(c, k):
    """Commutative circuit for ``c`` with each ``x_i`` replaced by a ``k x k`` matrix of fresh variables.

    Variable ``y^(i)_(r,s)`` gets index ``(i-1) k^2 + r k + s + 1``.  Returns
    the shared circuit (output unset) and a ``k x k`` grid of output gate ids,
    ``None`` marking entries that are structurally zero.
    """
    _require_ring(c)
    o = c.domain
    b = CircuitBuilder(c.n * k * k, o)

    def plus(a, e):
        if a is None:
            return e
        if e is None:
            return a
        return b.add(a, e)

    val = {}
    for idx in c.reachable():
        g = c.gates[idx]
        if g.op == "input":
            base = (g.a - 1) * k * k
            m = [[b.input(base + r * k + s + 1) for s in range(k)] for r in range(k)]
        elif g.op == "const":
            cg = b.const(g.a) if g.a != o.zero else None
            m = [[cg if r == s else None for s in range(k)] for r in range(k)]
        elif g.op == "add":
            A, B = val[g.a], val[g.b]
            m = [[plus(A[r][s], B[r][s]) for s in range(k)] for r in range(k)]
        elif g.op == "mul":
            A, B = val[g.a], val[g.b]
            m = []
            for r in range(k):
                row = []
                for s in range(k):
                    acc = None
                    for t in range(k):
                        if A[r][t] is not None and B[t][s] is not None:
                            acc = plus(acc, b.mul(A[r][t], B[t][s]))
                    row.append(acc)
                m.append(row)
        else:
            A = val[g.b]
            m = [[None if e is None else b.scale(g.a, e) for e in row] for row in A]
        val[idx] = m
    if not b.gates:
        b.const(0)
    return b, val[c.output]


def nc_ring_test(c, d=None, epsilon=Fraction(1, 2), trials=None, rng=None):
    """Zero test for a noncommutative ring-mode circuit via ``k x k`` symbolic matrices, ``k = ceil(d/2)+1``."""
    _require_ring(c)
    rng = rng if rng is not None else random.Random()
    d = c.formal_degree() if d is None else d
    k = (d + 1) // 2 + 1
    builder, grid = matrix_substitution(c, k)
    full = builder.build()
    total = 0
    info = {"k": k, "entries": k * k}
    for r in range(k):
        for s in range(k):
            gid = grid[r][s]
            if gid is None:
                continue
            sub = full.with_output(gid).prune()
            v = ring_identity_test(sub, d, epsilon, trials, rng)
            total += v.trials
            if not v.zero:
                info.update(v.info)
                return RingVerdict(False, total, {"entry": [r, s], **v.witness}, info)
    return RingVerdict(True, total, None, info)


# reference expansions (ground truth for tests)


def _check_cap(terms, cap, what):
    if len(terms) > cap:
        raise ResourceError(f"{what}: term count exceeds cap {cap}")


def expand_commutative(c, term_cap=100_000):
    """``{exponent tuple: coefficient}`` of a ring-mode circuit read commutatively."""
    _require_ring(c)
    o, n = c.domain, c.n
    zero = o.zero

    def clean(d):
        return {e: v for e, v in d.items() if v != zero}

    def add(a, b):
        out = dict(a)
        for e, v in b.items():
            out[e] = o.add(out[e], v) if e in out else v
        return clean(out)

    def mul(a, b):
        out = {}
        for e1, v1 in a.items():
            for e2, v2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                p = o.mul(v1, v2)
                out[e] = o.add(out[e], p) if e in out else p
        out = clean(out)
        _check_cap(out, term_cap, "commutative expansion")
        return out

    one_hot = lambda i: tuple(1 if j == i - 1 else 0 for j in range(n))
    return c.fold(
        lambda i: {one_hot(i): o.one},
        lambda v: clean({(0,) * n: v}),
        add,
        mul,
        lambda v, a: clean({e: o.mul(v, x) for e, x in a.items()}),
    )


def expand_univariate(c):
    """Coefficient list of a univariate ring-mode circuit as a :class:`RingPoly`."""
    if c.n != 1:
        raise ParameterError("expected a univariate circuit")
    terms = expand_commutative(c)
    deg = max((e[0] for e in terms), default=-1)
    coeffs = [c.domain.zero] * (deg + 1)
    for (e,), v in terms.items():
        coeffs[e] = v
    return RingPoly(c.domain, coeffs)


def expand_noncommutative(c, term_cap=100_000):
    """``{word: coefficient}`` of a ring-mode circuit with noncommuting variables."""
    _require_ring(c)
    o = c.domain
    zero = o.zero

    def clean(d):
        return {w: v for w, v in d.items() if v != zero}

    def add(a, b):
        out = dict(a)
        for w, v in b.items():
            out[w] = o.add(out[w], v) if w in out else v
        return clean(out)

    def mul(a, b):
        out = {}
        for u, x in a.items():
            for w, y in b.items():
                p = o.mul(x, y)
                key = u + w
                out[key] = o.add(out[key], p) if key in out else p
        out = clean(out)
        _check_cap(out, term_cap, "noncommutative expansion")
        return out

    return c.fold(
        lambda i: {(i,): o.one},
        lambda v: clean({(): v}),
        add,
        mul,
        lambda v, a: clean({w: o.mul(v, x) for w, x in a.items()}),
    )
