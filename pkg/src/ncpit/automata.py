"""Binary automata with a unique accepting state and their transition matrices.

Transition functions are small immutable objects with a ``step(q, b)``
method rather than materialized tables, so that the mod-``p`` counters and
their prefix restrictions cost O(1) to build regardless of ``p``.  They are
hashable by value: automata that differ only in their accepting state share
an equal ``delta`` and ``q0``, and callers use that to evaluate once per
transition structure.
"""

import bisect
import math
from dataclasses import dataclass, field as dc_field
from functools import lru_cache

from .algebra import FunctionalMatrix, is_prime
from .errors import ParameterError
from .freepoly import encode_var


@dataclass(frozen=True)
class ModDelta:
    """``q -> 2q + b (mod p)``: reading bit ``b`` appends it to a binary numeral."""

    p: int

    @property
    def state_count(self):
        return self.p

    def step(self, q, b):
        return (2 * q + b) % self.p

    def run(self, q, bits):
        return ((q << len(bits)) + int(bits, 2)) % self.p if bits else q


@dataclass(frozen=True)
class TableDelta:
    zero: tuple
    one: tuple

    @property
    def state_count(self):
        return len(self.zero)

    def step(self, q, b):
        return (self.one if b else self.zero)[q]

    def run(self, q, bits):
        zero, one = self.zero, self.one
        for ch in bits:
            q = (one if ch == "1" else zero)[q]
        return q


@dataclass(frozen=True)
class PrefixDelta:
    """Prefix tracker glued in front of a base automaton.

    States ``0..L-1`` have read that many bits of ``prefix``; ``L`` is dead;
    ``L+1+s`` is base state ``s``.  Finishing the prefix jumps to the base
    state ``entry`` reached by running the prefix from the base start.
    """

    base: object
    prefix: str
    entry: int
    _len: int = dc_field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_len", len(self.prefix))

    @property
    def state_count(self):
        return self._len + 1 + self.base.state_count

    def step(self, q, b):
        L = self._len
        if q < L:
            if b == (self.prefix[q] == "1"):
                return q + 1 if q + 1 < L else L + 1 + self.entry
            return L
        if q == L:
            return L
        return L + 1 + self.base.step(q - L - 1, b)

    def run(self, q, bits):
        L = self._len
        if q > L:
            return L + 1 + self.base.run(q - L - 1, bits)
        if q == L:
            return L
        rest = self.prefix[q:]
        if len(bits) < len(rest):
            return q + len(bits) if rest.startswith(bits) else L
        if not bits.startswith(rest):
            return L
        return L + 1 + self.base.run(self.entry, bits[len(rest):])


def _run(delta, q, bits):
    return delta.run(q, bits)


@dataclass(frozen=True)
class Dfa:
    """Complete DFA over {0,1} with start ``q0`` and single accepting state ``qf``."""

    state_count: int
    delta: object
    q0: int
    qf: int

    def __post_init__(self):
        if self.state_count < 1 or self.delta.state_count != self.state_count:
            raise ParameterError("state count does not match transition function")
        if not (0 <= self.q0 < self.state_count and 0 <= self.qf < self.state_count):
            raise ParameterError("start/accepting state out of range")

    @classmethod
    def from_table(cls, zero, one, q0, qf):
        zero, one = tuple(zero), tuple(one)
        if len(zero) != len(one):
            raise ParameterError("transition table rows differ in length")
        k = len(zero)
        if any(not 0 <= t < k for t in zero + one):
            raise ParameterError("transition target out of range")
        return cls(k, TableDelta(zero, one), q0, qf)

    def step(self, q, b):
        return self.delta.step(q, b)

    def run(self, bits, q=None):
        return _run(self.delta, self.q0 if q is None else q, bits)

    def accepts(self, bits):
        return self.run(bits) == self.qf

    def table(self):
        """Materialized transition table as ``(zero_targets, one_targets)``."""
        step = self.delta.step
        r = range(self.state_count)
        return tuple(step(q, 0) for q in r), tuple(step(q, 1) for q in r)


def build_mod_automaton(p, i):
    """``A_{p,i}``: accepts ``w`` iff the numeral ``1w`` is congruent to ``i`` mod ``p``."""
    if not is_prime(p):
        raise ParameterError(f"{p} is not prime")
    if not 0 <= i < p:
        raise ParameterError(f"residue {i} not in [0, {p})")
    return Dfa(p, ModDelta(p), 1 % p, i)


def build_word_automaton(u):
    """Chain automaton accepting exactly the string ``u``; state ``len(u)+1`` is dead."""
    L = len(u)
    dead = L + 1
    zero = [dead] * (L + 2)
    one = [dead] * (L + 2)
    for j, ch in enumerate(u):
        (one if ch == "1" else zero)[j] = j + 1
    return Dfa(L + 2, TableDelta(tuple(zero), tuple(one)), 0, L)


def prefix_restrict(a, u):
    """``[A]_u``: accepts exactly the strings that start with ``u`` and are accepted by ``a``."""
    delta = PrefixDelta(a.delta, u, _run(a.delta, a.q0, u))
    L = len(u)
    q0 = 0 if L else L + 1 + a.q0
    return Dfa(delta.state_count, delta, q0, L + 1 + a.qf)


def bit_matrices(a, field):
    """``(M_0, M_1)`` with ``M_b(q, q') = 1`` iff ``delta(q, b) = q'``."""
    step = a.delta.step
    k = a.state_count
    return (
        FunctionalMatrix(field, k, lambda q: step(q, 0)),
        FunctionalMatrix(field, k, lambda q: step(q, 1)),
    )


@lru_cache(maxsize=2048)
def _variable_matrices(delta, n, field):
    k = delta.state_count
    mats = []
    for i in range(1, n + 1):
        block = encode_var(i)
        mats.append(FunctionalMatrix(field, k, lambda q, block=block: _run(delta, q, block)))
    return tuple(mats)


def transition_matrices(a, n, field):
    """``[M_{v_1}, ..., M_{v_n}]`` where ``v_i = 0 1^i 0``, as functional 0/1 matrices."""
    if n < 1:
        raise ParameterError("need at least one variable")
    return list(_variable_matrices(a.delta, n, field))


def delta_matrices(delta, n, field):
    """Same as :func:`transition_matrices`, keyed by the transition function alone."""
    return _variable_matrices(delta, n, field)


_SMALL_PRIMES = (2, 3, 5, 7, 11)
_prime_cache = list(_SMALL_PRIMES)


def primes_up_to(bound):
    sieve = bytearray([1]) * (bound + 1)
    sieve[:2] = b"\x00\x00"
    for q in range(2, math.isqrt(bound) + 1):
        if sieve[q]:
            sieve[q * q :: q] = bytes(len(range(q * q, bound + 1, q)))
    return [q for q in range(bound + 1) if sieve[q]]


def _ensure_primes(count):
    global _prime_cache
    if count <= len(_prime_cache):
        return
    count = max(count, 2 * len(_prime_cache))
    # p_N < N (ln N + ln ln N) for N >= 6; start at twice that
    bound = int(2 * count * (math.log(count) + math.log(math.log(count)))) + 1
    while True:
        found = primes_up_to(bound)
        if len(found) >= count:
            _prime_cache = found
            return
        bound *= 2


def nth_prime(j):
    """The ``j``-th prime, 0-based (``nth_prime(0) == 2``)."""
    _ensure_primes(j + 1)
    return _prime_cache[j]


def first_primes(count):
    """The first ``count`` primes in increasing order."""
    _ensure_primes(count)
    return tuple(_prime_cache[:count])


def family_prime_count(m, s):
    """``N = (m+2) * C(s,2) + 1``."""
    return (m + 2) * math.comb(s, 2) + 1


class AutomataFamily:
    """The members ``A_{p,i}`` for the first ``N`` primes, ordered by ``(p, i)``.

    Behaves as a read-only sequence of :class:`Dfa`.  Members are created on
    access, and :meth:`groups` walks the primes lazily, so a scan that stops
    at an early prime never pays for the whole family.
    """

    def __init__(self, m, s, prime_count):
        self.m = m
        self.s = s
        self.prime_count = prime_count
        self._offsets = None
        self._size = None

    @property
    def params(self):
        return self.m, self.s

    @property
    def primes(self):
        return first_primes(self.prime_count)

    @property
    def offsets(self):
        if self._offsets is None:
            offsets, total = [], 0
            for p in self.primes:
                offsets.append(total)
                total += p
            self._offsets = tuple(offsets)
            self._size = total
        return self._offsets

    def __len__(self):
        if self._size is None:
            self.offsets
        return self._size

    def locate(self, index):
        """Family index -> ``(p, i)``."""
        size = len(self)
        if index < 0:
            index += size
        if not 0 <= index < size:
            raise IndexError(index)
        j = bisect.bisect_right(self.offsets, index) - 1
        return self.primes[j], index - self.offsets[j]

    def index_of(self, p, i):
        return self.offsets[self.primes.index(p)] + i

    def member(self, p, i):
        return build_mod_automaton(p, i)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return [self[j] for j in range(*index.indices(len(self)))]
        return self.member(*self.locate(index))

    def __iter__(self):
        for _, delta, q0, qfs in self.groups():
            for qf in qfs:
                yield Dfa(delta.state_count, delta, q0, qf)

    def groups(self):
        """Yield ``(first_index, delta, q0, accepting_states)`` per prime.

        Members of one group share transition function and start state and
        differ only in the accepting state, so one evaluation serves them all.
        """
        offset = 0
        for j in range(self.prime_count):
            p = nth_prime(j)
            yield offset, ModDelta(p), 1 % p, range(p)
            offset += p

    def restrict(self, u):
        return RestrictedFamily(self, u)

    def __repr__(self):
        return f"AutomataFamily(m={self.m}, s={self.s}, primes={self.prime_count})"


class RestrictedFamily:
    """``[F]_u``: every member of ``F`` prefix-restricted to ``u``, same order."""

    def __init__(self, base, u):
        self.base = base
        self.u = u

    def __len__(self):
        return len(self.base)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return [self[j] for j in range(*index.indices(len(self)))]
        return prefix_restrict(self.base[index], self.u)

    def __iter__(self):
        for _, delta, q0, qfs in self.groups():
            for qf in qfs:
                yield Dfa(delta.state_count, delta, q0, qf)

    def groups(self):
        u, L = self.u, len(self.u)
        for start, delta, q0, qfs in family_groups(self.base):
            pd = PrefixDelta(delta, u, delta.run(q0, u))
            if isinstance(qfs, range):
                shifted = range(L + 1 + qfs.start, L + 1 + qfs.stop)
            else:
                shifted = tuple(L + 1 + f for f in qfs)
            yield start, pd, (0 if L else L + 1 + q0), shifted


def family_groups(fam):
    """Group consecutive members sharing ``(delta, q0)``; see :meth:`AutomataFamily.groups`."""
    if hasattr(fam, "groups"):
        yield from fam.groups()
        return
    start, key, qfs = 0, None, []
    for idx, a in enumerate(fam):
        k = (a.delta, a.q0)
        if k != key:
            if qfs:
                yield start, key[0], key[1], tuple(qfs)
            start, key, qfs = idx, k, []
        qfs.append(a.qf)
    if qfs:
        yield start, key[0], key[1], tuple(qfs)


def build_isolating_family(m, s):
    """An ``(m, s)``-isolating family: ``A_{p,i}`` over the first ``(m+2)C(s,2)+1`` primes."""
    if m < 1 or s < 1:
        raise ParameterError("family parameters must be positive")
    return AutomataFamily(m, s, family_prime_count(m, s))


def isolates(a, strings):
    """True if ``a`` accepts exactly one of ``strings``."""
    return sum(1 for w in strings if a.accepts(w)) == 1
