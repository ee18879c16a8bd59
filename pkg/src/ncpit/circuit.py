"""Noncommutative arithmetic circuits, their text format, and black-box evaluation.

A circuit's domain is either a scalar field (``PrimeField``/``Rationals``)
or a ring oracle from :mod:`ncpit.rings`; constants are stored as values of
that domain.  Evaluation is a fold over the gates reachable from the output,
so unused gates cost nothing.
"""

from typing import NamedTuple

from .algebra import FunctionalMatrix, Matrix, PrimeField, Rationals, row_times
from .errors import DomainMismatchError, ParseError, ResourceError, ShapeError
from .freepoly import SparsePoly, sparse_mul
from .rings import RingOracle, parse_ring_spec, ring_scalar

OPS = ("input", "const", "add", "mul", "scale")


class Gate(NamedTuple):
    """``input``: a = variable index; ``const``: a = value; ``add``/``mul``: operand gate ids;
    ``scale``: a = value, b = operand gate id."""

    op: str
    a: object
    b: object = None

    def operands(self):
        if self.op in ("add", "mul"):
            return (self.a, self.b)
        if self.op == "scale":
            return (self.b,)
        return ()


def is_ring_domain(domain):
    return isinstance(domain, RingOracle)


class Circuit:
    def __init__(self, n, domain, gates, output=None):
        self.n = n
        self.domain = domain
        self.gates = tuple(Gate(*g) for g in gates)
        if not self.gates:
            raise ShapeError("circuit has no gates")
        for idx, g in enumerate(self.gates):
            if g.op not in OPS:
                raise ShapeError(f"gate {idx}: unknown op {g.op!r}")
            if g.op == "input" and not 1 <= g.a <= n:
                raise ShapeError(f"gate {idx}: variable x{g.a} outside 1..{n}")
            for o in g.operands():
                if not 0 <= o < idx:
                    raise ShapeError(f"gate {idx}: operand g{o} is not an earlier gate")
        self.output = len(self.gates) - 1 if output is None else output
        if not 0 <= self.output < len(self.gates):
            raise ShapeError(f"output gate g{self.output} does not exist")
        self._reach = None

    def __len__(self):
        return len(self.gates)

    def __repr__(self):
        return f"<Circuit n={self.n} gates={len(self.gates)} output=g{self.output}>"

    def reachable(self):
        """Sorted ids of the gates the output depends on."""
        if self._reach is None:
            seen = {self.output}
            for idx in range(self.output, -1, -1):
                if idx in seen:
                    seen.update(self.gates[idx].operands())
            self._reach = tuple(sorted(seen))
        return self._reach

    def with_output(self, output):
        return Circuit(self.n, self.domain, self.gates, output)

    def prune(self):
        """Equivalent circuit holding only the reachable gates."""
        keep = self.reachable()
        renum = {old: new for new, old in enumerate(keep)}
        gates = []
        for old in keep:
            g = self.gates[old]
            if g.op in ("add", "mul"):
                g = Gate(g.op, renum[g.a], renum[g.b])
            elif g.op == "scale":
                g = Gate("scale", g.a, renum[g.b])
            gates.append(g)
        return Circuit(self.n, self.domain, gates, renum[self.output])

    def fold(self, on_input, on_const, on_add, on_mul, on_scale, output=None):
        """Evaluate bottom-up with the given gate semantics; returns the output's value."""
        out = self.output if output is None else output
        keep = self.reachable() if output is None else self.with_output(out).reachable()
        val = {}
        for idx in keep:
            g = self.gates[idx]
            if g.op == "input":
                val[idx] = on_input(g.a)
            elif g.op == "const":
                val[idx] = on_const(g.a)
            elif g.op == "add":
                val[idx] = on_add(val[g.a], val[g.b])
            elif g.op == "mul":
                val[idx] = on_mul(val[g.a], val[g.b])
            else:
                val[idx] = on_scale(g.a, val[g.b])
        return val[out]

    def formal_degree(self):
        return self.fold(
            lambda i: 1,
            lambda c: 0,
            max,
            lambda a, b: a + b,
            lambda c, a: a,
        )


class CircuitBuilder:
    """Append-only helper for building circuits in code.

    Integer constants are coerced into the domain (ring scalars via
    doubling), so ``b.scale(-1, g)`` works over fields and rings alike.
    """

    def __init__(self, n, domain):
        self.n = n
        self.domain = domain
        self.gates = []
        self._inputs = {}

    def _value(self, c):
        if is_ring_domain(self.domain):
            return c if isinstance(c, bytes) else ring_scalar(self.domain, c)
        return self.domain(c)

    def _push(self, gate):
        self.gates.append(gate)
        return len(self.gates) - 1

    def input(self, i):
        if i not in self._inputs:
            self._inputs[i] = self._push(Gate("input", i))
        return self._inputs[i]

    def const(self, c):
        return self._push(Gate("const", self._value(c)))

    def add(self, a, b):
        return self._push(Gate("add", a, b))

    def mul(self, a, b):
        return self._push(Gate("mul", a, b))

    def scale(self, c, g):
        return self._push(Gate("scale", self._value(c), g))

    def sub(self, a, b):
        return self.add(a, self.scale(-1, b))

    def sum(self, ids):
        ids = list(ids)
        acc = ids[0]
        for g in ids[1:]:
            acc = self.add(acc, g)
        return acc

    def product(self, ids):
        ids = list(ids)
        acc = ids[0]
        for g in ids[1:]:
            acc = self.mul(acc, g)
        return acc

    def build(self, output=None):
        return Circuit(self.n, self.domain, self.gates, output)


def circuit_from_poly(poly):
    """A sum-of-products circuit computing a :class:`SparsePoly` (zero maps to ``0 * 1``)."""
    b = CircuitBuilder(poly.n, poly.field)
    terms = []
    for w, c in poly.sorted_terms():
        mono = b.product([b.input(i) for i in w]) if w else b.const(1)
        terms.append(b.scale(c, mono))
    if not terms:
        terms.append(b.const(0))
    return b.build(b.sum(terms))


# text format


def _parse_domain(text, lineno):
    kind, _, rest = text.partition(" ")
    rest = rest.strip()
    try:
        if kind == "field":
            if rest == "rational":
                return Rationals()
            if rest.startswith("p="):
                return PrimeField(int(rest[2:]))
        elif kind == "ring":
            return parse_ring_spec(rest)
    except (ValueError, ParseError) as exc:
        raise ParseError(str(exc), lineno) from None
    raise ParseError(f"bad domain declaration {text!r}", lineno)


def _meaningful_lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_circuit(text):
    """Parse the ``ncircuit v1`` format; errors carry the offending line number."""
    lines = list(_meaningful_lines(text))
    if not lines or lines[0][1] != "ncircuit v1":
        raise ParseError("missing 'ncircuit v1' header", lines[0][0] if lines else 1)
    if len(lines) < 3:
        raise ParseError("truncated header", lines[-1][0])
    domain = _parse_domain(lines[1][1], lines[1][0])
    lineno, vline = lines[2]
    parts = vline.split()
    if len(parts) != 2 or parts[0] != "vars" or not parts[1].isdigit() or int(parts[1]) < 1:
        raise ParseError("expected 'vars <n>' with n >= 1", lineno)
    n = int(parts[1])

    b = CircuitBuilder(n, domain)
    ids = {}  # file gate number -> internal index
    output = None

    def ref(tok, lineno):
        if not tok.startswith("g") or not tok[1:].isdigit():
            raise ParseError(f"bad gate reference {tok!r}", lineno)
        k = int(tok[1:])
        if k not in ids:
            raise ParseError(f"reference to undefined gate {tok}", lineno)
        return ids[k]

    def scalar(tok, lineno):
        try:
            return domain.parse(tok)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(str(exc), lineno) from None

    for lineno, line in lines[3:]:
        if output is not None:
            raise ParseError("'output' must be the last line", lineno)
        toks = line.split()
        if toks[0] == "output":
            if len(toks) != 2:
                raise ParseError("expected 'output g<k>'", lineno)
            output = ref(toks[1], lineno)
            continue
        name, op, args = toks[0], toks[1] if len(toks) > 1 else "", toks[2:]
        if not name.startswith("g") or not name[1:].isdigit():
            raise ParseError(f"bad gate id {name!r}", lineno)
        k = int(name[1:])
        if k in ids:
            raise ParseError(f"duplicate gate id {name}", lineno)
        if k != len(ids):
            raise ParseError(f"expected gate g{len(ids)}, found {name}", lineno)
        if op == "input":
            if len(args) != 1 or not args[0].startswith("x") or not args[0][1:].isdigit():
                raise ParseError("expected 'input x<i>'", lineno)
            i = int(args[0][1:])
            if not 1 <= i <= n:
                raise ParseError(f"variable x{i} out of range 1..{n}", lineno)
            gid = b._push(Gate("input", i))
        elif op == "const":
            if len(args) != 1:
                raise ParseError("expected 'const <c>'", lineno)
            gid = b._push(Gate("const", scalar(args[0], lineno)))
        elif op in ("add", "mul"):
            if len(args) < 2:
                raise ParseError(f"'{op}' needs at least two operands", lineno)
            operands = [ref(t, lineno) for t in args]
            gid = operands[0]
            for o in operands[1:]:
                gid = b._push(Gate(op, gid, o))
        elif op == "scale":
            if len(args) != 2:
                raise ParseError("expected 'scale <c> g<k>'", lineno)
            gid = b._push(Gate("scale", scalar(args[0], lineno), ref(args[1], lineno)))
        else:
            raise ParseError(f"unknown gate type {op!r}", lineno)
        ids[k] = gid
    if output is None:
        raise ParseError("missing 'output' line", lines[-1][0])
    return b.build(output)


def format_circuit(c):
    if is_ring_domain(c.domain):
        header = f"ring {c.domain.spec()}"
    else:
        header = c.domain.spec()
    fmt = c.domain.format
    out = ["ncircuit v1", header, f"vars {c.n}"]
    for idx, g in enumerate(c.gates):
        if g.op == "input":
            body = f"input x{g.a}"
        elif g.op == "const":
            body = f"const {fmt(g.a)}"
        elif g.op == "scale":
            body = f"scale {fmt(g.a)} g{g.b}"
        else:
            body = f"{g.op} g{g.a} g{g.b}"
        out.append(f"g{idx} {body}")
    out.append(f"output g{c.output}")
    return "\n".join(out) + "\n"


# evaluation


def _check_mats(field, mats, n):
    if len(mats) != n:
        raise ShapeError(f"expected {n} matrices, got {len(mats)}")
    if not mats:
        raise ShapeError("no matrices supplied")
    k = mats[0].nrows
    for m in mats:
        if m.nrows != k or m.ncols != k:
            raise ShapeError("substituted matrices must all be k x k for one k")
        if m.field != field:
            raise DomainMismatchError(f"matrix over {m.field!r}, circuit over {field!r}")
    return k


def eval_on_matrices(c, mats):
    """Output matrix of ``c`` (a circuit or black box) with ``x_i`` set to ``mats[i-1]``."""
    if isinstance(c, BlackBoxPoly):
        return c.evaluate(mats)
    if is_ring_domain(c.domain):
        raise DomainMismatchError("matrix evaluation needs a field-mode circuit")
    field = c.domain
    k = _check_mats(field, mats, c.n)
    return c.fold(
        lambda i: mats[i - 1],
        lambda v: Matrix.scalar(field, k, v),
        lambda a, b: a + b,
        lambda a, b: a @ b,
        lambda v, a: a.scale(v),
    )


def eval_row(c, mats, q):
    """Row ``q`` of the output matrix, as ``{column: value}``.

    Only the rows actually reached are computed: a product's row ``q`` needs
    row ``q`` of its left factor and, for each nonzero column ``j`` there,
    row ``j`` of its right factor.  For automaton matrices this touches a
    handful of states instead of all of them.
    """
    if is_ring_domain(c.domain):
        raise DomainMismatchError("matrix evaluation needs a field-mode circuit")
    field = c.domain
    _check_mats(field, mats, c.n)
    red = field.reduce
    gates = c.gates
    memo = {}

    def row(g, r):
        key = (g, r)
        hit = memo.get(key)
        if hit is not None:
            return hit
        gate = gates[g]
        op = gate.op
        if op == "input":
            res = mats[gate.a - 1].row(r)
        elif op == "const":
            res = {r: gate.a} if gate.a else {}
        elif op == "add":
            res = dict(row(gate.a, r))
            for j, v in row(gate.b, r).items():
                res[j] = res.get(j, 0) + v
            res = {j: w for j, w in ((j, red(v)) for j, v in res.items()) if w}
        elif op == "mul":
            left = row(gate.a, r)
            acc = {}
            for j, x in left.items():
                for l, y in row(gate.b, j).items():
                    acc[l] = acc.get(l, 0) + x * y
            res = {j: w for j, w in ((j, red(v)) for j, v in acc.items()) if w}
        else:
            s = gate.a
            res = {j: w for j, w in ((j, red(s * v)) for j, v in row(gate.b, r).items()) if w}
        memo[key] = res
        return res

    return row(c.output, q)


def brute_expand(c, degree_cap=64, term_cap=200_000):
    """Exact polynomial computed by a field-mode circuit, by sparse expansion."""
    if is_ring_domain(c.domain):
        raise DomainMismatchError("brute_expand needs a field-mode circuit")
    field, n = c.domain, c.n
    val = {}
    for idx in c.reachable():
        g = c.gates[idx]
        if g.op == "input":
            p = SparsePoly.variable(field, n, g.a)
        elif g.op == "const":
            p = SparsePoly.constant(field, n, g.a)
        elif g.op == "add":
            p = val[g.a] + val[g.b]
        elif g.op == "mul":
            a, b = val[g.a], val[g.b]
            if a and b:
                if a.degree + b.degree > degree_cap:
                    raise ResourceError(f"gate g{idx}: degree exceeds cap {degree_cap}")
                if len(a) * len(b) > 4 * term_cap:
                    raise ResourceError(f"gate g{idx}: term count exceeds cap {term_cap}")
            p = sparse_mul(a, b)
        else:
            p = val[g.b].scale(g.a)
        if p.degree > degree_cap:
            raise ResourceError(f"gate g{idx}: degree exceeds cap {degree_cap}")
        if len(p) > term_cap:
            raise ResourceError(f"gate g{idx}: term count exceeds cap {term_cap}")
        val[idx] = p
    return val[c.output]


# black boxes


class BlackBoxPoly:
    """Evaluate-at-matrices access to a hidden polynomial, with declared bounds.

    Subclasses implement :meth:`evaluate`; :meth:`evaluate_row` may be
    overridden with something cheaper than computing the whole matrix.
    """

    def __init__(self, field, n, d=None, t=None):
        self.field = field
        self.n = n
        self.d = d
        self.t = t

    def evaluate(self, mats):
        raise NotImplementedError

    def evaluate_row(self, mats, q):
        return dict(self.evaluate(mats).row(q))

    def constant_term(self):
        """Coefficient of the empty word: evaluate with every variable set to the 1x1 zero."""
        zero = Matrix.zeros(self.field, 1)
        return self.evaluate([zero] * self.n)[0, 0]


class CircuitBlackBox(BlackBoxPoly):
    def __init__(self, circuit, d=None, t=None):
        if is_ring_domain(circuit.domain):
            raise DomainMismatchError("black-box matrix evaluation needs a field-mode circuit")
        super().__init__(circuit.domain, circuit.n, d, t)
        self.circuit = circuit

    def evaluate(self, mats):
        return eval_on_matrices(self.circuit, mats)

    def evaluate_row(self, mats, q):
        return eval_row(self.circuit, mats, q)


class PolyBlackBox(BlackBoxPoly):
    """Black box over an explicit :class:`SparsePoly`: ``sum_w c_w * prod mats along w``."""

    def __init__(self, poly, d=None, t=None):
        super().__init__(poly.field, poly.n, poly.degree if d is None else d, len(poly) if t is None else t)
        self.poly = poly

    def evaluate(self, mats):
        field = self.field
        k = _check_mats(field, mats, self.n)
        rows = [self.evaluate_row(mats, q) for q in range(k)]
        return Matrix(field, k, k, tuple(rows))

    def evaluate_row(self, mats, q):
        field = self.field
        _check_mats(field, mats, self.n)
        red = field.reduce
        acc = {}
        if all(isinstance(m, FunctionalMatrix) for m in mats):
            for w, c in self.poly.terms.items():
                s = q
                for i in w:
                    s = mats[i - 1].target(s)
                acc[s] = acc.get(s, 0) + c
        else:
            for w, c in self.poly.terms.items():
                vec = {q: c}
                for i in w:
                    vec = row_times(vec, mats[i - 1], red)
                    if not vec:
                        break
                for j, v in vec.items():
                    acc[j] = acc.get(j, 0) + v
        return {j: w for j, w in ((j, red(v)) for j, v in acc.items()) if w}


class DifferenceBlackBox(BlackBoxPoly):
    """``f - g`` for two black boxes over the same field and variables."""

    def __init__(self, f, g, d=None, t=None):
        if f.field != g.field:
            raise DomainMismatchError("black boxes over different fields")
        if f.n != g.n:
            raise ShapeError("black boxes over different variable counts")
        super().__init__(f.field, f.n, d, t)
        self.f, self.g = f, g

    def evaluate(self, mats):
        return self.f.evaluate(mats) - self.g.evaluate(mats)

    def evaluate_row(self, mats, q):
        red = self.field.reduce
        acc = dict(self.f.evaluate_row(mats, q))
        for j, v in self.g.evaluate_row(mats, q).items():
            acc[j] = acc.get(j, 0) - v
        return {j: w for j, w in ((j, red(v)) for j, v in acc.items()) if w}


class CountingBlackBox(BlackBoxPoly):
    """Wraps a black box and counts evaluations (full-matrix and single-row)."""

    def __init__(self, inner):
        super().__init__(inner.field, inner.n, inner.d, inner.t)
        self.inner = inner
        self.full_queries = 0
        self.row_queries = 0
        self.max_dim = 0

    @property
    def queries(self):
        return self.full_queries + self.row_queries

    def _note(self, mats):
        if mats:
            self.max_dim = max(self.max_dim, mats[0].nrows)

    def evaluate(self, mats):
        self.full_queries += 1
        self._note(mats)
        return self.inner.evaluate(mats)

    def evaluate_row(self, mats, q):
        self.row_queries += 1
        self._note(mats)
        return self.inner.evaluate_row(mats, q)
