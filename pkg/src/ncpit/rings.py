"""Finite commutative rings presented as oracles, and univariate polynomials over them.

Algorithms only ever see opaque ``bytes`` encodings together with the
oracle's ``add``, ``mul``, ``neg`` and the distinguished ``zero``/``one``.
Encodings are canonical, so equality of ring elements is equality of bytes.
The concrete rings here (``Z_t``, ``Z_t[y]/(g)`` and direct products) exist
to drive the algorithms; nothing outside this module decodes an element.
"""

import re

from .errors import ParameterError, ParseError


class RingOracle:
    """Base class: subclasses provide ``_add``, ``_mul``, ``_neg`` and element codecs."""

    element_bits = 0
    zero = b""
    one = b""
    _tables = None

    # oracle interface

    def add(self, a, b):
        if self._tables:
            return self._tables[0][a, b]
        return self._add(a, b)

    def mul(self, a, b):
        if self._tables:
            return self._tables[1][a, b]
        return self._mul(a, b)

    def neg(self, a):
        if self._tables:
            return self._tables[2][a]
        return self._neg(a)

    def is_zero(self, a):
        return a == self.zero

    # helpers for in-repo rings

    def _tabulate(self, limit=256):
        if self.size > limit:
            return
        elems = list(self.elements())
        add = {(a, b): self._add(a, b) for a in elems for b in elems}
        mul = {(a, b): self._mul(a, b) for a in elems for b in elems}
        neg = {a: self._neg(a) for a in elems}
        self._tables = (add, mul, neg)

    def from_int(self, c):
        return ring_scalar(self, c)

    def parse(self, token):
        token = token.strip()
        if not re.fullmatch(r"[+-]?\d+", token):
            raise ValueError(f"bad ring literal {token!r}")
        return self.from_int(int(token))

    def __eq__(self, other):
        return type(other) is type(self) and other.spec() == self.spec()

    def __hash__(self):
        return hash(self.spec())

    def __repr__(self):
        return f"<ring {self.spec()}>"


class ZMod(RingOracle):
    """Integers modulo ``t``, encoded as fixed-width big-endian residues."""

    def __init__(self, t):
        t = int(t)
        if t < 2:
            raise ParameterError("modulus must be at least 2")
        self.t = t
        self.size = t
        self.element_bits = max(1, (t - 1).bit_length())
        self._width = (self.element_bits + 7) // 8
        self.zero = self.encode(0)
        self.one = self.encode(1)
        self._tabulate()

    def encode(self, x):
        return (x % self.t).to_bytes(self._width, "big")

    def decode(self, a):
        return int.from_bytes(a, "big")

    def elements(self):
        return (self.encode(x) for x in range(self.t))

    def _add(self, a, b):
        return self.encode(self.decode(a) + self.decode(b))

    def _mul(self, a, b):
        return self.encode(self.decode(a) * self.decode(b))

    def _neg(self, a):
        return self.encode(-self.decode(a))

    def format(self, a):
        return str(self.decode(a))

    def spec(self):
        return f"zmod:{self.t}"


def _parse_ypoly(text, t):
    """``"y^2+y"`` -> ``[0, 1, 1]`` with coefficients reduced mod ``t``."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial")
    if s[0] not in "+-":
        s = "+" + s
    coeffs = {}
    for sign, body in re.findall(r"([+-])([^+-]+)", s):
        m = re.fullmatch(r"(\d*)\*?(y(?:\^(\d+))?)?", body)
        if not m or (not m.group(1) and not m.group(2)):
            raise ValueError(f"bad term {body!r}")
        c = int(m.group(1)) if m.group(1) else 1
        e = (int(m.group(3)) if m.group(3) else 1) if m.group(2) else 0
        coeffs[e] = coeffs.get(e, 0) + (c if sign == "+" else -c)
    deg = max(coeffs)
    return [coeffs.get(e, 0) % t for e in range(deg + 1)]


class QuotientRing(RingOracle):
    """``Z_t[y] / (g)`` for a monic ``g``; elements are coefficient tuples of length ``deg g``."""

    def __init__(self, t, modulus):
        self.base = ZMod(t)
        self.t = self.base.t
        g = [c % self.t for c in modulus]
        while len(g) > 1 and g[-1] == 0:
            g.pop()
        if len(g) < 2 or g[-1] != 1:
            raise ParameterError("quotient modulus must be monic of degree >= 1")
        self.modulus = tuple(g)
        self.deg = len(g) - 1
        self.size = self.t**self.deg
        self._w = self.base._width
        self.element_bits = self.base.element_bits * self.deg
        self.zero = self.encode((0,))
        self.one = self.encode((1,))
        self._tabulate()

    def encode(self, coeffs):
        coeffs = list(coeffs) + [0] * (self.deg - len(coeffs))
        return b"".join(self.base.encode(c) for c in coeffs)

    def decode(self, a):
        w = self._w
        return tuple(int.from_bytes(a[i : i + w], "big") for i in range(0, len(a), w))

    def elements(self):
        for x in range(self.size):
            digits = []
            for _ in range(self.deg):
                x, r = divmod(x, self.t)
                digits.append(r)
            yield self.encode(digits)

    def _add(self, a, b):
        return self.encode([x + y for x, y in zip(self.decode(a), self.decode(b))])

    def _neg(self, a):
        return self.encode([-x for x in self.decode(a)])

    def _mul(self, a, b):
        x, y = self.decode(a), self.decode(b)
        prod = [0] * (2 * self.deg - 1)
        for i, u in enumerate(x):
            if u:
                for j, v in enumerate(y):
                    prod[i + j] += u * v
        g, d, t = self.modulus, self.deg, self.t
        for i in range(len(prod) - 1, d - 1, -1):
            c = prod[i] % t
            if c:
                for j in range(d + 1):
                    prod[i - d + j] -= c * g[j]
        return self.encode([c % t for c in prod[:d]])

    def parse(self, token):
        token = token.strip()
        if re.fullmatch(r"[+-]?\d+", token):
            return self.from_int(int(token))
        try:
            coeffs = _parse_ypoly(token, self.t)
        except ValueError as exc:
            raise ValueError(f"bad ring literal {token!r}") from exc
        # reduce by the modulus through the oracle itself
        y = self.encode((0, 1)) if self.deg > 1 else self.neg(self.encode((self.modulus[0],)))
        acc, power = self.zero, self.one
        for c in coeffs:
            acc = self.add(acc, self.mul(self.from_int(c), power))
            power = self.mul(power, y)
        return acc

    def format(self, a):
        terms = []
        for e, c in enumerate(self.decode(a)):
            if c:
                mono = "" if e == 0 else ("y" if e == 1 else f"y^{e}")
                terms.append(mono if c == 1 and mono else f"{c}{mono}")
        return "+".join(terms) if terms else "0"

    def spec(self):
        g = "+".join(
            ("y" if e == 1 else f"y^{e}") if c == 1 and e else (f"{c}" + ("" if e == 0 else ("y" if e == 1 else f"y^{e}")))
            for e, c in reversed(list(enumerate(self.modulus)))
            if c
        )
        return f"quot:zmod:{self.t}:{g}"


class ProductRing(RingOracle):
    """Direct product; encodings are the component encodings concatenated."""

    def __init__(self, components):
        self.components = tuple(components)
        if len(self.components) < 2:
            raise ParameterError("a product needs at least two factors")
        self._widths = [len(r.zero) for r in self.components]
        self.size = 1
        for r in self.components:
            self.size *= r.size
        self.element_bits = sum(r.element_bits for r in self.components)
        self.zero = b"".join(r.zero for r in self.components)
        self.one = b"".join(r.one for r in self.components)
        self._tabulate()

    def split(self, a):
        out, pos = [], 0
        for w in self._widths:
            out.append(a[pos : pos + w])
            pos += w
        return out

    def elements(self):
        from itertools import product

        for parts in product(*(list(r.elements()) for r in self.components)):
            yield b"".join(parts)

    def _add(self, a, b):
        return b"".join(r.add(x, y) for r, x, y in zip(self.components, self.split(a), self.split(b)))

    def _mul(self, a, b):
        return b"".join(r.mul(x, y) for r, x, y in zip(self.components, self.split(a), self.split(b)))

    def _neg(self, a):
        return b"".join(r.neg(x) for r, x in zip(self.components, self.split(a)))

    def parse(self, token):
        token = token.strip()
        if token.startswith("(") and token.endswith(")"):
            parts = token[1:-1].split(",")
            if len(parts) != len(self.components):
                raise ValueError(f"bad ring literal {token!r}")
            return b"".join(r.parse(p) for r, p in zip(self.components, parts))
        return super().parse(token)

    def format(self, a):
        return "(" + ",".join(r.format(x) for r, x in zip(self.components, self.split(a))) + ")"

    def spec(self):
        return "prod:" + ",".join(r.spec() for r in self.components)


def parse_ring_spec(text):
    """Build an oracle from ``zmod:6``, ``quot:zmod:2:y^2+y`` or ``prod:zmod:4,zmod:9``."""
    s = text.strip()
    m = re.fullmatch(r"zmod[\s:]+(\d+)", s)
    if m:
        return ZMod(int(m.group(1)))
    if s.startswith("quot:"):
        m = re.fullmatch(r"quot:zmod:(\d+):(.+)", s)
        if not m:
            raise ParseError(f"bad quotient ring spec {text!r}")
        t = int(m.group(1))
        try:
            return QuotientRing(t, _parse_ypoly(m.group(2), t))
        except ValueError as exc:
            raise ParseError(str(exc)) from None
    if s.startswith("prod:"):
        return ProductRing(parse_ring_spec(part) for part in s[5:].split(","))
    raise ParseError(f"unknown ring spec {text!r}")


def ring_scalar(oracle, c):
    """``c * e`` by binary doubling: O(log c) oracle additions."""
    if c < 0:
        return oracle.neg(ring_scalar(oracle, -c))
    acc, power = oracle.zero, oracle.one
    while c:
        if c & 1:
            acc = oracle.add(acc, power)
        c >>= 1
        if c:
            power = oracle.add(power, power)
    return acc


class RingPoly:
    """Univariate polynomial over a ring oracle; ``coeffs[i]`` multiplies ``x^i``.

    Trailing zero coefficients are trimmed, so the zero polynomial has no
    coefficients and degree -1.
    """

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring, coeffs):
        coeffs = list(coeffs)
        zero = ring.zero
        while coeffs and coeffs[-1] == zero:
            coeffs.pop()
        self.ring = ring
        self.coeffs = tuple(coeffs)

    @classmethod
    def from_ints(cls, ring, ints):
        return cls(ring, [ring_scalar(ring, c) for c in ints])

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def is_monic(self):
        return bool(self.coeffs) and self.coeffs[-1] == self.ring.one

    def __eq__(self, other):
        if not isinstance(other, RingPoly):
            return NotImplemented
        return self.ring == other.ring and self.coeffs == other.coeffs

    __hash__ = None

    def __repr__(self):
        fmt = getattr(self.ring, "format", None)
        body = [fmt(c) if fmt else c.hex() for c in self.coeffs]
        return f"RingPoly({body})"

    def __add__(self, other):
        return RingPoly(self.ring, poly_add(self.ring, self.coeffs, other.coeffs))

    def __mul__(self, other):
        return RingPoly(self.ring, poly_mul(self.ring, self.coeffs, other.coeffs))


def poly_add(ring, a, b):
    if len(a) < len(b):
        a, b = b, a
    add = ring.add
    out = list(a)
    for i, c in enumerate(b):
        out[i] = add(out[i], c)
    return out


def poly_mul(ring, a, b):
    if not a or not b:
        return []
    zero, add, mul = ring.zero, ring.add, ring.mul
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == zero:
            continue
        for j, y in enumerate(b):
            if y != zero:
                out[i + j] = add(out[i + j], mul(x, y))
    return out


def poly_scale(ring, c, a):
    mul = ring.mul
    return [mul(c, x) for x in a]


def _divrem(ring, g, q):
    # q: coefficient list of a monic polynomial, deg >= 1
    dq = len(q) - 1
    zero, add, mul = ring.zero, ring.add, ring.mul
    negq = [ring.neg(c) for c in q[:-1]]
    r = list(g)
    if len(r) <= dq:
        return [], r
    quot = [zero] * (len(r) - dq)
    for i in range(len(r) - 1, dq - 1, -1):
        c = r[i]
        if c == zero:
            continue
        base = i - dq
        quot[base] = c
        for j, nq in enumerate(negq):
            if nq != zero:
                r[base + j] = add(r[base + j], mul(c, nq))
        r[i] = zero
    return quot, r[:dq]


def monic_divrem(g, q):
    """Divide ``g`` by monic ``q``: returns ``(quotient, remainder)`` with ``deg rem < deg q``."""
    if not q.is_monic() or q.degree < 1:
        raise ParameterError("divisor must be monic of degree >= 1")
    quot, rem = _divrem(q.ring, g.coeffs, q.coeffs)
    return RingPoly(q.ring, quot), RingPoly(q.ring, rem)
