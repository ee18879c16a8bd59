"""Words over noncommuting variables and sparse noncommutative polynomials.

A word is a tuple of 1-based variable indices; ``()`` is the constant
monomial.  Variable ``x_i`` is written in binary as the block ``0 1^i 0``, so
a word of degree ``d`` over ``n`` variables encodes to at most ``d(n+2)``
bits.  Bit strings are ordinary ``str`` objects over ``'0'`` and ``'1'``.
"""

from .errors import DecodeError, DomainMismatchError, ParseError, ShapeError


def encode_var(i):
    return "0" + "1" * i + "0"


def encode_word(word):
    return "".join(encode_var(i) for i in word)


def decode_bits(bits, n):
    """Inverse of :func:`encode_word`; raises :class:`DecodeError` on malformed input."""
    word = []
    pos, end = 0, len(bits)
    while pos < end:
        if bits[pos] != "0":
            raise DecodeError("block must start with 0", pos)
        j = pos + 1
        while j < end and bits[j] == "1":
            j += 1
        if j == end:
            raise DecodeError("unterminated block", j)
        if bits[j] != "0":
            raise DecodeError(f"unexpected symbol {bits[j]!r}", j)
        i = j - pos - 1
        if i == 0:
            raise DecodeError("empty block", pos)
        if i > n:
            raise DecodeError(f"variable index {i} exceeds n={n}", pos)
        word.append(i)
        pos = j + 1
    return tuple(word)


def is_encoding_prefix(bits, n):
    """True if some valid encoding over ``n`` variables starts with ``bits``."""
    ones = None  # None: at a block boundary; k: inside a block after k ones
    for b in bits:
        if ones is None:
            if b != "0":
                return False
            ones = 0
        elif b == "1":
            ones += 1
            if ones > n:
                return False
        else:
            if ones == 0:
                return False
            ones = None
    return True


def format_word(word):
    return " ".join(f"x{i}" for i in word) if word else "1"


def parse_word(text, n=None):
    """Parse ``"x1 x2"`` (or ``"1"`` for the empty word) into a tuple."""
    text = text.strip()
    if text in ("", "1"):
        return ()
    word = []
    for tok in text.replace("*", " ").split():
        if not tok.startswith("x") or not tok[1:].isdigit():
            raise ParseError(f"bad variable {tok!r}")
        i = int(tok[1:])
        if i < 1 or (n is not None and i > n):
            raise ParseError(f"variable {tok} out of range")
        word.append(i)
    return tuple(word)


class SparsePoly:
    """Element of the free algebra ``F{x_1..x_n}`` as a map word -> coefficient.

    Zero coefficients are never stored; the zero polynomial has no terms and
    degree 0.
    """

    __slots__ = ("field", "n", "terms")

    def __init__(self, field, n, terms=None):
        self.field = field
        self.n = n
        clean = {}
        if terms:
            for w, c in terms.items():
                w = tuple(w)
                if any(i < 1 or i > n for i in w):
                    raise ShapeError(f"word {w} uses a variable outside 1..{n}")
                c = field.parse(c) if isinstance(c, str) else field(c)
                if c:
                    clean[w] = c
        self.terms = clean

    @classmethod
    def _raw(cls, field, n, terms):
        p = cls.__new__(cls)
        p.field, p.n, p.terms = field, n, terms
        return p

    @classmethod
    def zero(cls, field, n):
        return cls._raw(field, n, {})

    @classmethod
    def constant(cls, field, n, c):
        return cls(field, n, {(): c})

    @classmethod
    def variable(cls, field, n, i):
        return cls(field, n, {(i,): field.one})

    @classmethod
    def monomial(cls, field, n, word, c=None):
        return cls(field, n, {tuple(word): field.one if c is None else c})

    @property
    def degree(self):
        return max((len(w) for w in self.terms), default=0)

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def coefficient(self, word):
        return self.terms.get(tuple(word), self.field.zero)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda wc: (len(wc[0]), wc[0]))

    def _check(self, other):
        if not isinstance(other, SparsePoly):
            raise TypeError("expected a SparsePoly")
        if other.n != self.n:
            raise ShapeError(f"variable counts differ: {self.n} vs {other.n}")
        if other.field != self.field:
            raise DomainMismatchError(f"{self.field!r} vs {other.field!r}")

    def _add(self, other, sign):
        self._check(other)
        red = self.field.reduce
        out = dict(self.terms)
        for w, c in other.terms.items():
            v = red(out.get(w, 0) + sign * c)
            if v:
                out[w] = v
            else:
                out.pop(w, None)
        return SparsePoly._raw(self.field, self.n, out)

    def __add__(self, other):
        return self._add(other, 1)

    def __sub__(self, other):
        return self._add(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        red = self.field.reduce
        c = red(c)
        out = {}
        if c:
            for w, v in self.terms.items():
                v = red(c * v)
                if v:
                    out[w] = v
        return SparsePoly._raw(self.field, self.n, out)

    def __mul__(self, other):
        if isinstance(other, SparsePoly):
            return sparse_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.field == other.field and self.n == other.n and self.terms == other.terms

    __hash__ = None

    def __repr__(self):
        body = " + ".join(
            f"{self.field.format(c)}*{format_word(w)}" for w, c in self.sorted_terms()
        )
        return f"SparsePoly({body or '0'})"

    def format(self):
        """Text form: one ``<coeff> <var> ...`` line per term, sorted by degree then word."""
        lines = []
        for w, c in self.sorted_terms():
            lines.append(f"{self.field.format(c)} {format_word(w)}")
        return "\n".join(lines) + ("\n" if lines else "")


def sparse_mul(a, b):
    """Noncommutative product: words concatenate, coefficients multiply."""
    a._check(b)
    red = a.field.reduce
    out = {}
    for u, c in a.terms.items():
        for v, d in b.terms.items():
            w = u + v
            out[w] = out.get(w, 0) + c * d
    out = {w: r for w, r in ((w, red(c)) for w, c in out.items()) if r}
    return SparsePoly._raw(a.field, a.n, out)


def parse_sparse(text, field, n):
    """Read the line format written by :meth:`SparsePoly.format`."""
    terms = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        coeff, _, rest = line.partition(" ")
        try:
            c = field.parse(coeff)
            w = parse_word(rest, n)
        except (ValueError, ParseError) as exc:
            raise ParseError(str(exc), lineno) from None
        if w in terms:
            raise ParseError(f"duplicate monomial {format_word(w)}", lineno)
        terms[w] = c
    return SparsePoly(field, n, terms)
