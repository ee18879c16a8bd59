"""Noncommutative algebraic branching programs and their black-box reconstruction.

An ABP over ``n`` variables has levels ``0..d`` of widths ``G_0..G_d`` with
``G_0 = G_d = 1``; the edge from gate ``j`` at level ``i`` to gate ``k`` at
level ``i+1`` carries a homogeneous linear form, stored as its ``n``
coefficients.  A zero coefficient vector is the same as a missing edge.

Reconstruction walks the levels in order.  For each level it keeps a small
set of monomials whose coefficient vectors (one coordinate per gate) span
all such vectors, and solves for the next level's edge labels using only
the equations indexed by those monomials.
"""

from .algebra import Basis, Matrix, PrimeField, Rationals, row_times, solve_linear
from .circuit import BlackBoxPoly
from .errors import OracleInconsistency, ParameterError, ParseError, ResourceError, ShapeError
from .freepoly import SparsePoly, sparse_mul
from .pit import coefficient_of


class Abp:
    def __init__(self, field, n, widths, forms):
        self.field = field
        self.n = n
        self.widths = tuple(widths)
        if len(self.widths) < 2 or self.widths[0] != 1 or self.widths[-1] != 1:
            raise ShapeError("widths must start and end with 1 and have at least two levels")
        if any(w < 1 for w in self.widths):
            raise ShapeError("widths must be positive")
        if len(forms) != self.depth:
            raise ShapeError(f"expected {self.depth} layers of edge labels, got {len(forms)}")
        clean = []
        for i, layer in enumerate(forms):
            if len(layer) != self.widths[i] or any(len(r) != self.widths[i + 1] for r in layer):
                raise ShapeError(f"layer {i} has the wrong shape")
            out = []
            for r in layer:
                out_r = []
                for form in r:
                    if len(form) != n:
                        raise ShapeError(f"layer {i}: linear form needs {n} coefficients")
                    out_r.append(tuple(field(c) for c in form))
                out.append(tuple(out_r))
            clean.append(tuple(out))
        self.forms = tuple(clean)

    @property
    def depth(self):
        return len(self.widths) - 1

    def form(self, level, j, k):
        """Coefficients of the edge label from ``(level, j)`` to ``(level+1, k)``."""
        return self.forms[level][j][k]

    def gates(self):
        return [(i, j) for i, w in enumerate(self.widths) for j in range(w)]

    def __eq__(self, other):
        if not isinstance(other, Abp):
            return NotImplemented
        return (self.field, self.n, self.widths, self.forms) == (other.field, other.n, other.widths, other.forms)

    __hash__ = None

    def __repr__(self):
        return f"Abp(n={self.n}, widths={list(self.widths)})"


def _check_gate(a, level, gate):
    if not 0 <= level <= a.depth:
        raise ParameterError(f"level {level} outside 0..{a.depth}")
    if not 0 <= gate < a.widths[level]:
        raise ParameterError(f"gate {gate} outside 0..{a.widths[level] - 1} at level {level}")


def abp_gate_eval(a, level, gate, mats):
    """Matrix value of gate ``(level, gate)`` with ``x_s`` set to ``mats[s-1]``."""
    _check_gate(a, level, gate)
    if len(mats) != a.n:
        raise ShapeError(f"expected {a.n} matrices, got {len(mats)}")
    k = mats[0].nrows
    vals = [Matrix.identity(a.field, k)]
    for i in range(level):
        labels = {}
        nxt = []
        for t in range(a.widths[i + 1]):
            acc = Matrix.zeros(a.field, k)
            for j, v in enumerate(vals):
                form = a.forms[i][j][t]
                if not any(form):
                    continue
                key = form
                if key not in labels:
                    lab = Matrix.zeros(a.field, k)
                    for s, c in enumerate(form):
                        if c:
                            lab = lab + mats[s].scale(c)
                    labels[key] = lab
                acc = acc + v @ labels[key]
            nxt.append(acc)
        vals = nxt
    return vals[gate]


def abp_gate_row(a, level, gate, mats, q):
    """Row ``q`` of :func:`abp_gate_eval`, computed by pushing a row vector through the layers."""
    _check_gate(a, level, gate)
    red = a.field.reduce
    vals = [{q: a.field.one}]
    for i in range(level):
        moved = [[row_times(v, m, red) if v else {} for m in mats] for v in vals]
        nxt = []
        for t in range(a.widths[i + 1]):
            acc = {}
            for j in range(len(vals)):
                for s, c in enumerate(a.forms[i][j][t]):
                    if c:
                        for col, x in moved[j][s].items():
                            acc[col] = acc.get(col, 0) + c * x
            nxt.append({col: w for col, w in ((col, red(x)) for col, x in acc.items()) if w})
        vals = nxt
    return vals[gate]


class AbpOracle:
    """Gate-level evaluation access to a hidden ABP, plus its declared shape.

    Counts queries and remembers the largest matrix dimension used.
    """

    def __init__(self, abp):
        self._abp = abp
        self.field = abp.field
        self.n = abp.n
        self.widths = abp.widths
        self.depth = abp.depth
        self.queries = 0
        self.max_dim = 0

    def _note(self, mats):
        self.queries += 1
        self.max_dim = max(self.max_dim, mats[0].nrows)

    def query(self, level, gate, mats):
        self._note(mats)
        return abp_gate_eval(self._abp, level, gate, mats)

    def query_row(self, level, gate, mats, q):
        self._note(mats)
        return abp_gate_row(self._abp, level, gate, mats, q)

    def gate_blackbox(self, level, gate):
        return GateBlackBox(self, level, gate)


class GateBlackBox(BlackBoxPoly):
    """One gate of an ABP oracle seen as an ordinary polynomial black box."""

    def __init__(self, oracle, level, gate):
        super().__init__(oracle.field, oracle.n, level, None)
        self.oracle = oracle
        self.level = level
        self.gate = gate

    def evaluate(self, mats):
        return self.oracle.query(self.level, self.gate, mats)

    def evaluate_row(self, mats, q):
        return self.oracle.query_row(self.level, self.gate, mats, q)


class RSBasis:
    """Monomials of one level whose gate-coefficient vectors are independent.

    ``entries`` holds ``(word, vector)`` with the vector as measured; the
    backing :class:`Basis` only answers independence questions.
    """

    def __init__(self, field, level, width):
        self.level = level
        self.width = width
        self.entries = []
        self._basis = Basis(field, width)

    def __len__(self):
        return len(self.entries)

    def words(self):
        return [w for w, _ in self.entries]

    def add(self, word, vector):
        if self._basis.extend(list(vector), word):
            self.entries.append((word, tuple(vector)))
            return True
        return False

    def spans(self, vector):
        return self._basis.contains(list(vector))


def source_basis(field):
    b = RSBasis(field, 0, 1)
    b.add((), (field.one,))
    return b


class _CoefficientCache:
    def __init__(self, oracle):
        self.oracle = oracle
        self._boxes = {}
        self._memo = {}

    def __call__(self, level, gate, word):
        key = (level, gate, word)
        if key not in self._memo:
            box = self._boxes.get((level, gate))
            if box is None:
                box = self._boxes[(level, gate)] = self.oracle.gate_blackbox(level, gate)
            self._memo[key] = coefficient_of(box, word)
        return self._memo[key]

    def vector(self, level, word):
        return tuple(self(level, g, word) for g in range(self.oracle.widths[level]))


def rs_basis_extend(o, level, prev, coeff=None):
    """Basis for ``level`` built from the candidates ``m * x_s`` with ``m`` from ``prev``."""
    if level == 0:
        return source_basis(o.field)
    coeff = coeff or _CoefficientCache(o)
    out = RSBasis(o.field, level, o.widths[level])
    seen = set()
    for m, _ in prev.entries:
        for s in range(1, o.n + 1):
            w = m + (s,)
            if w in seen:
                continue
            seen.add(w)
            out.add(w, coeff.vector(level, w))
            if len(out) == out.width:
                return out
    return out


def reconstruct_abp(o):
    """An ABP of the oracle's shape computing the same polynomial at every gate."""
    field, n = o.field, o.n
    coeff = _CoefficientCache(o)
    basis = source_basis(field)
    forms = []
    for i in range(o.depth):
        g_here, g_next = o.widths[i], o.widths[i + 1]
        layer = [[[field.zero] * n for _ in range(g_next)] for _ in range(g_here)]
        if basis.entries:
            system = Matrix.from_rows(field, [vec for _, vec in basis.entries])
            for t in range(g_next):
                for s in range(1, n + 1):
                    rhs = [coeff(i + 1, t, m + (s,)) for m, _ in basis.entries]
                    sol = solve_linear(system, rhs)
                    if sol is None:
                        raise OracleInconsistency(f"no edge labels reproduce gate ({i + 1}, {t})")
                    for j, v in enumerate(sol):
                        layer[j][t][s - 1] = v
        forms.append(layer)
        basis = rs_basis_extend(o, i + 1, basis, coeff)
    return Abp(field, n, o.widths, forms)


def abp_expand_levels(a, term_cap=200_000):
    """Polynomials of every gate, as a list of lists indexed ``[level][gate]``."""
    field, n = a.field, a.n
    vals = [SparsePoly.constant(field, n, field.one)]
    levels = [vals]
    for i in range(a.depth):
        nxt = []
        for t in range(a.widths[i + 1]):
            acc = SparsePoly.zero(field, n)
            for j, v in enumerate(vals):
                form = a.forms[i][j][t]
                if any(form):
                    lin = SparsePoly(field, n, {(s + 1,): c for s, c in enumerate(form) if c})
                    acc = acc + sparse_mul(v, lin)
            if len(acc) > term_cap:
                raise ResourceError(f"gate ({i + 1}, {t}): term count exceeds cap {term_cap}")
            nxt.append(acc)
        vals = nxt
        levels.append(vals)
    return levels


def abp_expand(a, gate=None):
    """Exact polynomial at ``gate = (level, index)``; the sink when omitted."""
    level, j = (a.depth, 0) if gate is None else gate
    _check_gate(a, level, j)
    return abp_expand_levels(_truncate(a, level))[level][j]


def _truncate(a, level):
    if level == a.depth:
        return a
    # levels past the requested one are irrelevant; drop them without re-validating widths
    t = Abp.__new__(Abp)
    t.field, t.n = a.field, a.n
    t.widths = a.widths[: level + 1]
    t.forms = a.forms[:level]
    return t


# text format


def format_abp(a):
    fmt = a.field.format
    out = ["nabp v1", a.field.spec(), f"vars {a.n}", "widths " + " ".join(map(str, a.widths))]
    for i, layer in enumerate(a.forms):
        for j, row in enumerate(layer):
            for t, form in enumerate(row):
                if any(form):
                    out.append(f"edge {i} {j} -> {i + 1} {t} : " + " ".join(fmt(c) for c in form))
    return "\n".join(out) + "\n"


def parse_abp(text):
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line))
    if not lines or lines[0][1] != "nabp v1":
        raise ParseError("missing 'nabp v1' header", lines[0][0] if lines else 1)
    if len(lines) < 4:
        raise ParseError("truncated header", lines[-1][0])
    lineno, dom = lines[1]
    try:
        if dom == "field rational":
            field = Rationals()
        elif dom.startswith("field p="):
            field = PrimeField(int(dom[len("field p="):]))
        else:
            raise ValueError(f"bad field declaration {dom!r}")
    except ValueError as exc:
        raise ParseError(str(exc), lineno) from None
    lineno, vl = lines[2]
    parts = vl.split()
    if len(parts) != 2 or parts[0] != "vars" or not parts[1].isdigit() or int(parts[1]) < 1:
        raise ParseError("expected 'vars <n>' with n >= 1", lineno)
    n = int(parts[1])
    lineno, wl = lines[3]
    parts = wl.split()
    if parts[0] != "widths" or len(parts) < 3 or not all(p.isdigit() for p in parts[1:]):
        raise ParseError("expected 'widths G0 ... Gd'", lineno)
    widths = [int(p) for p in parts[1:]]
    if widths[0] != 1 or widths[-1] != 1 or min(widths) < 1:
        raise ParseError("widths must be positive with G0 = Gd = 1", lineno)
    zero = (field.zero,) * n
    forms = [[[zero] * widths[i + 1] for _ in range(widths[i])] for i in range(len(widths) - 1)]
    seen = set()
    for lineno, line in lines[4:]:
        head, sep, coeffs = line.partition(":")
        toks = head.split()
        if not sep or len(toks) != 6 or toks[0] != "edge" or toks[3] != "->":
            raise ParseError("expected 'edge i j -> i+1 k : c1 ... cn'", lineno)
        try:
            i, j, i2, t = (int(x) for x in (toks[1], toks[2], toks[4], toks[5]))
        except ValueError:
            raise ParseError("edge endpoints must be integers", lineno) from None
        if i2 != i + 1 or not 0 <= i < len(widths) - 1:
            raise ParseError("edges must join consecutive levels", lineno)
        if not (0 <= j < widths[i] and 0 <= t < widths[i2]):
            raise ParseError("edge endpoint outside the declared widths", lineno)
        if (i, j, t) in seen:
            raise ParseError(f"duplicate edge {i} {j} -> {i2} {t}", lineno)
        seen.add((i, j, t))
        cs = coeffs.split()
        if len(cs) != n:
            raise ParseError(f"linear form needs {n} coefficients", lineno)
        try:
            forms[i][j][t] = tuple(field.parse(c) for c in cs)
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    return Abp(field, n, widths, forms)
