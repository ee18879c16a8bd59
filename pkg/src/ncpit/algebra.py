"""Exact scalar fields and sparse-row matrices over them.

Scalars are plain Python values: ``int`` residues in ``[0, p)`` for a prime
field and :class:`fractions.Fraction` for the rationals.  The field object
carries the context (modulus, parsing, formatting), so matrices and
polynomials hold a reference to their field and compare it on every binary
operation.

Matrices store each row as a dict ``{column: nonzero value}``.  The matrices
this package evaluates circuits on are mostly automaton transition matrices
(one 1 per row) and sums of a few of them, so rows stay short even when the
dimension is in the thousands.
"""

from fractions import Fraction

from .errors import DomainMismatchError, ParameterError, ShapeError

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n):
    """Miller-Rabin with fixed bases; deterministic for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _parse_fraction(text):
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad scalar literal {text!r}") from exc


class PrimeField:
    """The field of residues modulo a prime ``p``."""

    zero = 0
    one = 1

    def __init__(self, p):
        p = int(p)
        if not is_prime(p):
            raise ParameterError(f"field modulus {p} is not prime")
        self.p = p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"

    def reduce(self, x):
        return x % self.p

    def inv(self, x):
        x %= self.p
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.p)

    def __call__(self, value):
        """Coerce an int or Fraction into the field."""
        if isinstance(value, Fraction):
            return value.numerator * self.inv(value.denominator) % self.p
        return int(value) % self.p

    def parse(self, text):
        try:
            return self(_parse_fraction(text))
        except ZeroDivisionError:
            raise ValueError(f"{text!r} has a denominator divisible by {self.p}") from None

    def format(self, x):
        return str(x)

    def spec(self):
        return f"field p={self.p}"


class Rationals:
    """Exact rationals backed by :class:`fractions.Fraction`."""

    zero = Fraction(0)
    one = Fraction(1)

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Rationals()"

    def reduce(self, x):
        return x if type(x) is Fraction else Fraction(x)

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(x)

    def __call__(self, value):
        return Fraction(value)

    def parse(self, text):
        return _parse_fraction(text)

    def format(self, x):
        return str(Fraction(x))

    def spec(self):
        return "field rational"


def _check_field(a, b):
    if a.field != b.field:
        raise DomainMismatchError(f"{a.field!r} vs {b.field!r}")


class Matrix:
    """Immutable matrix over a field, stored as sparse rows."""

    __slots__ = ("field", "nrows", "ncols", "_rows")

    def __init__(self, field, nrows, ncols, rows):
        # rows: one dict per row holding canonical nonzero entries (trusted)
        if nrows < 1 or ncols < 1:
            raise ShapeError("matrix dimensions must be positive")
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        self._rows = rows

    @classmethod
    def from_rows(cls, field, rows):
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise ShapeError("empty matrix")
        ncols = len(rows[0])
        sparse = []
        for r in rows:
            if len(r) != ncols:
                raise ShapeError("ragged rows")
            d = {}
            for j, v in enumerate(r):
                v = field(v)
                if v:
                    d[j] = v
            sparse.append(d)
        return cls(field, len(rows), ncols, tuple(sparse))

    @classmethod
    def zeros(cls, field, nrows, ncols=None):
        ncols = nrows if ncols is None else ncols
        return cls(field, nrows, ncols, tuple({} for _ in range(nrows)))

    @classmethod
    def scalar(cls, field, k, c):
        c = field.reduce(c)
        if not c:
            return cls.zeros(field, k)
        return cls(field, k, k, tuple({i: c} for i in range(k)))

    @classmethod
    def identity(cls, field, k):
        return cls.scalar(field, k, field.one)

    def row(self, i):
        """Row ``i`` as ``{column: value}``; callers must not mutate it."""
        return self._rows[i]

    def rows(self):
        return [self.row(i) for i in range(self.nrows)]

    def to_lists(self):
        zero = self.field.zero
        out = []
        for i in range(self.nrows):
            r = [zero] * self.ncols
            for j, v in self.row(i).items():
                r[j] = v
            out.append(r)
        return out

    @property
    def entries(self):
        return [v for r in self.to_lists() for v in r]

    @property
    def shape(self):
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.row(i).get(j, self.field.zero)

    def is_zero(self):
        return not any(self.row(i) for i in range(self.nrows))

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.field == other.field
            and self.shape == other.shape
            and all(self.row(i) == other.row(i) for i in range(self.nrows))
        )

    __hash__ = None

    def __repr__(self):
        return f"Matrix({self.field!r}, {self.to_lists()!r})"

    def _combine(self, other, sign):
        _check_field(self, other)
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        red = self.field.reduce
        out = []
        for i in range(self.nrows):
            acc = dict(self.row(i))
            for j, v in other.row(i).items():
                acc[j] = acc.get(j, 0) + sign * v
            out.append({j: w for j, w in ((j, red(v)) for j, v in acc.items()) if w})
        return Matrix(self.field, self.nrows, self.ncols, tuple(out))

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        red = self.field.reduce
        c = red(c)
        if not c:
            return Matrix.zeros(self.field, self.nrows, self.ncols)
        out = tuple(
            {j: w for j, w in ((j, red(c * v)) for j, v in self.row(i).items()) if w}
            for i in range(self.nrows)
        )
        return Matrix(self.field, self.nrows, self.ncols, out)

    def __matmul__(self, other):
        return mat_mul(self, other)

    def transpose(self):
        cols = [{} for _ in range(self.ncols)]
        for i in range(self.nrows):
            for j, v in self.row(i).items():
                cols[j][i] = v
        return Matrix(self.field, self.ncols, self.nrows, tuple(cols))


class FunctionalMatrix(Matrix):
    """0/1 matrix with exactly one 1 per row, i.e. the graph of a map ``q -> target(q)``.

    Targets are computed on demand and memoized, so a transition matrix of a
    large automaton costs nothing until rows are actually read.
    """

    __slots__ = ("_target", "_memo")

    def __init__(self, field, size, target):
        self.field = field
        self.nrows = self.ncols = size
        self._target = target
        self._memo = {}
        self._rows = None

    @classmethod
    def from_targets(cls, field, targets):
        targets = tuple(targets)
        return cls(field, len(targets), targets.__getitem__)

    def target(self, q):
        try:
            return self._memo[q]
        except KeyError:
            t = self._memo[q] = self._target(q)
            return t

    def row(self, i):
        return {self.target(i): self.field.one}

    def compose(self, other):
        """``self @ other`` as a functional matrix: first self's map, then other's."""
        _check_field(self, other)
        if self.ncols != other.nrows:
            raise ShapeError("dimension mismatch in product")
        first, second = self.target, other.target
        return FunctionalMatrix(self.field, self.nrows, lambda q: second(first(q)))


def mat_mul(a, b):
    """Exact matrix product ``a @ b``."""
    _check_field(a, b)
    if a.ncols != b.nrows:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    if isinstance(a, FunctionalMatrix) and isinstance(b, FunctionalMatrix):
        return a.compose(b)
    red = a.field.reduce
    out = []
    for i in range(a.nrows):
        out.append(row_times(a.row(i), b, red))
    return Matrix(a.field, a.nrows, b.ncols, tuple(out))


def row_times(vec, m, reduce):
    """Sparse row vector ``vec`` (dict) times matrix ``m``; returns a dict."""
    acc = {}
    for k, x in vec.items():
        for j, y in m.row(k).items():
            acc[j] = acc.get(j, 0) + x * y
    return {j: w for j, w in ((j, reduce(v)) for j, v in acc.items()) if w}


def solve_linear(a, b):
    """Solve ``a @ x = b`` exactly; free variables are set to zero.

    Returns the solution as a list, or ``None`` when the system is
    inconsistent.
    """
    field = a.field
    if a.nrows != len(b):
        raise ShapeError(f"{a.nrows} equations but {len(b)} right-hand sides")
    for v in b:
        if isinstance(v, Fraction) and isinstance(field, PrimeField) and v.denominator != 1:
            raise DomainMismatchError("rational right-hand side for a prime field")
    red = field.reduce
    rows = [r + [red(v)] for r, v in zip(a.to_lists(), b)]
    ncols = a.ncols
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = field.inv(rows[r][c])
        rows[r] = [red(x * inv) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [red(x - f * y) for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    if any(row[-1] for row in rows[r:]):
        return None
    x = [field.zero] * ncols
    for i, c in enumerate(pivots):
        x[c] = rows[i][-1]
    return x


class Basis:
    """Incrementally built basis kept in reduced row-echelon form.

    Each stored vector carries an opaque label; pivots strictly increase and
    every pivot column is zero in all other stored vectors.
    """

    def __init__(self, field, dim):
        self.field = field
        self.dim = dim
        self._vectors = []  # (pivot, vector) sorted by pivot
        self._labels = []

    def __len__(self):
        return len(self._vectors)

    @property
    def rank(self):
        return len(self._vectors)

    @property
    def vectors(self):
        return [(p, list(v)) for p, v in self._vectors]

    @property
    def labels(self):
        return list(self._labels)

    def reduce(self, v):
        red = self.field.reduce
        v = [red(x) for x in v]
        for p, b in self._vectors:
            f = v[p]
            if f:
                v = [red(x - f * y) for x, y in zip(v, b)]
        return v

    def contains(self, v):
        if len(v) != self.dim:
            raise ShapeError(f"vector of length {len(v)} in dimension {self.dim}")
        return not any(self.reduce(v))

    def extend(self, v, label=None):
        if len(v) != self.dim:
            raise ShapeError(f"vector of length {len(v)} in dimension {self.dim}")
        red = self.field.reduce
        v = self.reduce(v)
        pivot = next((i for i, x in enumerate(v) if x), None)
        if pivot is None:
            return False
        inv = self.field.inv(v[pivot])
        v = [red(x * inv) for x in v]
        for idx, (p, b) in enumerate(self._vectors):
            f = b[pivot]
            if f:
                self._vectors[idx] = (p, [red(x - f * y) for x, y in zip(b, v)])
        pos = sum(1 for p, _ in self._vectors if p < pivot)
        self._vectors.insert(pos, (pivot, v))
        self._labels.insert(pos, label)
        return True


def basis_extend(basis, v, label=None):
    """Insert ``v`` if it lies outside the span of ``basis``; report whether it did."""
    return basis.extend(v, label)
