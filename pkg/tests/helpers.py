"""Independent reference implementations and random generators shared by the tests.

The oracles here deliberately avoid the package's own arithmetic: dense
list-of-lists matrices, integer numerals, explicit path following.
"""

import itertools
import random
from fractions import Fraction

from ncpit.abp import Abp
from ncpit.algebra import PrimeField, Rationals
from ncpit.circuit import CircuitBuilder, is_ring_domain
from ncpit.freepoly import SparsePoly
from ncpit.ringpit import expand_noncommutative


# dense oracles


def dense_mul(a, b, mod=None):
    n, m, k = len(a), len(b), len(b[0])
    out = [[0] * k for _ in range(n)]
    for i in range(n):
        for j in range(k):
            s = sum(a[i][t] * b[t][j] for t in range(m))
            out[i][j] = s % mod if mod else s
    return out


def dense_add(a, b, mod=None):
    return [[(x + y) % mod if mod else x + y for x, y in zip(r, s)] for r, s in zip(a, b)]


def dense_identity(k):
    return [[1 if i == j else 0 for j in range(k)] for i in range(k)]


def dense_poly_at(terms, mats, mod=None):
    """``sum c_w prod mats[w_j]`` with plain nested lists; ``terms`` maps word -> int/Fraction."""
    k = len(mats[0])
    acc = [[0] * k for _ in range(k)]
    for w, c in terms.items():
        prod = dense_identity(k)
        for i in w:
            prod = dense_mul(prod, mats[i - 1], mod)
        acc = dense_add(acc, [[c * x for x in r] for r in prod], mod)
    if mod:
        acc = [[x % mod for x in r] for r in acc]
    return acc


def numeral(w):
    """``n_w``: the integer written ``1w`` in binary."""
    return int("1" + w, 2)


def follow(zero, one, q, bits):
    for ch in bits:
        q = (one if ch == "1" else zero)[q]
    return q


def rank_mod(vectors, p):
    rows = [[x % p for x in v] for v in vectors]
    rank, col = 0, 0
    ncols = len(rows[0]) if rows else 0
    while rank < len(rows) and col < ncols:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [x * inv % p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def all_words(n, length):
    return list(itertools.product(range(1, n + 1), repeat=length))


# generators


def random_scalar(rng, field, nonzero=False):
    if is_ring_domain(field):
        elems = [e for e in field.elements() if e != field.zero or not nonzero]
        return rng.choice(elems)
    while True:
        if isinstance(field, Rationals):
            c = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
        else:
            c = rng.randrange(field.p)
        if c or not nonzero:
            return field(c)


def random_sparse(rng, field, n, d, t):
    """Random polynomial with at most ``t`` terms, each of degree in ``1..d``."""
    terms = {}
    for _ in range(t):
        w = tuple(rng.randint(1, n) for _ in range(rng.randint(1, d)))
        terms[w] = random_scalar(rng, field, nonzero=True)
    return SparsePoly(field, n, terms)


def random_circuit(rng, field, n, max_gates=12, max_degree=5):
    """Random DAG over ``field``; formal degree stays within ``max_degree``.

    Three styles in equal shares: a dense piece (one linear form of all
    inputs, then products reusing recent gates), a loose random piece, and an
    identity that expands to zero built around a random piece.
    """
    for _ in range(100):
        b = CircuitBuilder(n, field)
        deg = {}

        def push(gid, d):
            deg[gid] = d
            return gid

        def scaled(g):
            return b.scale(random_scalar(rng, field, True), g) if rng.random() < 0.5 else g

        def random_piece(budget, dense):
            ids = [push(b.input(i), 1) for i in range(1, n + 1)]
            rng.shuffle(ids)
            if rng.random() < 0.3:
                ids.append(push(b.const(random_scalar(rng, field, True)), 0))
            if dense and len(ids) > 1:
                acc = scaled(ids[0])
                for g in ids[1:]:
                    acc = b.add(acc, scaled(g))
                ids.append(push(acc, 1))
            elif budget - len(b.gates) >= 4 and len(ids) > 1:
                x, y = rng.sample(ids, 2)
                ids.append(push(b.add(x, scaled(y)), max(deg[x], deg[y])))
            while len(b.gates) < budget:
                # lean on recent gates so the output depends on most of the circuit
                x = ids[-1] if rng.random() < 0.6 else rng.choice(ids)
                y = rng.choice(ids[-3:] if dense or rng.random() < 0.5 else ids)
                op = rng.choice(["add", "mul", "mul", "scale"] if dense else ["add", "add", "mul", "mul", "scale"])
                if op == "mul" and deg[x] + deg[y] > max_degree:
                    op = "add"
                if op == "add" and x == y:
                    y = rng.choice(ids)
                if op == "add":
                    ids.append(push(b.add(x, y), max(deg[x], deg[y])))
                elif op == "mul":
                    ids.append(push(b.mul(x, y) if rng.random() < 0.5 else b.mul(y, x), deg[x] + deg[y]))
                else:
                    ids.append(push(b.scale(random_scalar(rng, field, True), x), deg[x]))
            return ids[-1]

        kind = rng.randrange(3)
        if kind < 2:
            out = random_piece(rng.randint(min(max_gates, 2 * n + 1), max_gates), dense=kind == 0)
        else:
            a = random_piece(rng.randint(n + 1, max(n + 1, max_gates - 6)), dense=rng.random() < 0.5)
            template = rng.choice(["sub_self", "distribute", "associate", "double"])
            if template == "sub_self":
                out = b.sub(a, a)
            elif template == "double":
                out = b.sub(b.scale(2, a), b.add(a, a))
            else:
                y, z = b.input(rng.randint(1, n)), b.input(rng.randint(1, n))
                if deg[a] + 2 > max_degree:
                    continue
                if template == "distribute":
                    out = b.sub(b.mul(b.add(a, y), z), b.add(b.mul(a, z), b.mul(y, z)))
                else:
                    out = b.sub(b.mul(b.mul(a, y), z), b.mul(a, b.mul(y, z)))
        c = b.build(out)
        if len(c.gates) <= max_gates and c.formal_degree() <= max_degree:
            return c
    raise RuntimeError("could not build a circuit within the limits")


def random_abp(rng, field, n, widths, density=0.8):
    forms = []
    for i in range(len(widths) - 1):
        layer = []
        for _ in range(widths[i]):
            row = []
            for _ in range(widths[i + 1]):
                if rng.random() < density:
                    row.append(tuple(random_scalar(rng, field) for _ in range(n)))
                else:
                    row.append((0,) * n)
            layer.append(row)
        forms.append(layer)
    return Abp(field, n, widths, forms)


def random_widths(rng, depth, max_width):
    return [1] + [rng.randint(1, max_width) for _ in range(depth - 1)] + [1]


def fields():
    return [PrimeField(7), PrimeField(1009), Rationals()]


def seeded(seed):
    return random.Random(seed)


def zero_divisor_pair(rng, ring):
    """Nonzero ``u, v`` with ``u v = 0``, found by search."""
    elems = [e for e in ring.elements() if e != ring.zero]
    pairs = [(u, v) for u in elems for v in elems if ring.mul(u, v) == ring.zero]
    return rng.choice(pairs) if pairs else None


def random_ring_zero_circuit(rng, ring, n, max_gates=14, max_degree=5):
    """A ring-mode circuit that expands to zero.

    Either one of the ``f - f`` style templates, or ``(u a)(v b)`` with
    ``u v = 0`` built from two random subcircuits ``a`` and ``b``.
    """
    pair = zero_divisor_pair(rng, ring)
    if pair is None or rng.random() < 0.5:
        while True:
            c = random_circuit(rng, ring, n, max_gates, max_degree)
            if not expand_noncommutative(c):
                return c
    u, v = pair
    half = max(1, max_degree // 2)
    a = random_circuit(rng, ring, n, max_gates // 2, half)
    b2 = random_circuit(rng, ring, n, max_gates // 2, half)
    b = CircuitBuilder(n, ring)
    ga = _copy_into(b, a)
    gb = _copy_into(b, b2)
    return b.build(b.mul(b.scale(u, ga), b.scale(v, gb)))


def _copy_into(b, c):
    ids = {}
    for idx in c.reachable():
        g = c.gates[idx]
        if g.op == "input":
            ids[idx] = b.input(g.a)
        elif g.op == "const":
            ids[idx] = b.const(g.a)
        elif g.op == "add":
            ids[idx] = b.add(ids[g.a], ids[g.b])
        elif g.op == "mul":
            ids[idx] = b.mul(ids[g.a], ids[g.b])
        else:
            ids[idx] = b.scale(g.a, ids[g.b])
    return ids[c.output]


def int_expand(c, t, commutative=False):
    """Expansion of a ``Z_t`` circuit with plain integer arithmetic.

    Words are tuples of variable indices; with ``commutative`` they are sorted.
    """
    val = {}
    dec = lambda a: int.from_bytes(a, "big")
    for idx in c.reachable():
        g = c.gates[idx]
        if g.op == "input":
            v = {(g.a,): 1}
        elif g.op == "const":
            v = {(): dec(g.a)}
        elif g.op == "add":
            v = dict(val[g.a])
            for w, x in val[g.b].items():
                v[w] = v.get(w, 0) + x
        elif g.op == "mul":
            v = {}
            for w1, x in val[g.a].items():
                for w2, y in val[g.b].items():
                    w = w1 + w2
                    if commutative:
                        w = tuple(sorted(w))
                    v[w] = v.get(w, 0) + x * y
        else:
            v = {w: dec(g.a) * x for w, x in val[g.b].items()}
        val[idx] = {w: x % t for w, x in v.items() if x % t}
    return val[c.output]


# acceptance reporting: one line per criterion, printed at the end of the run

ACCEPTANCE_LINES = []


def report_criterion(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok
