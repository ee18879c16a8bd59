"""Deterministic identity testing, coefficient extraction and sparse interpolation.

Everything here talks to the polynomial only through a black box that is
evaluated at automaton transition matrices.  Members of a mod-``p`` family
share their matrices and differ only in the accepting state, so each prime
costs one evaluation; a single row (the start state's) already carries the
``(q0, qf)`` entries for all residues at once.
"""

from dataclasses import dataclass

from .algebra import Matrix
from .automata import (
    build_isolating_family,
    build_word_automaton,
    delta_matrices,
    family_groups,
    transition_matrices,
)
from .circuit import DifferenceBlackBox, PolyBlackBox
from .errors import DecodeError, PromiseViolation, ShapeError
from .freepoly import SparsePoly, decode_bits, encode_word, is_encoding_prefix


@dataclass(frozen=True)
class TestOutcome:
    """``value`` is the first nonzero ``(q0, qf)`` entry found; ``witness`` is ``(index, value)``."""

    __test__ = False

    value: object
    witness: tuple = None

    def __bool__(self):
        return bool(self.value)


def _first_hit(row, qfs):
    if isinstance(qfs, range):
        hits = [j for j in row if j in qfs]
        if hits:
            j = min(hits)
            return j - qfs.start, row[j]
        return None
    for pos, qf in enumerate(qfs):
        v = row.get(qf)
        if v:
            return pos, v
    return None


def run_test(f, fam):
    """Scan ``fam`` in order and return the first nonzero ``M_out(q0, qf)``, else zero."""
    for start, delta, q0, qfs in family_groups(fam):
        row = f.evaluate_row(delta_matrices(delta, f.n, f.field), q0)
        if row:
            hit = _first_hit(row, qfs)
            if hit:
                pos, v = hit
                return TestOutcome(v, (start + pos, v))
    return TestOutcome(f.field.zero)


def find_witness(f, d, t):
    """Like :func:`identity_test` but returns ``None`` for zero or a dict describing the witness.

    The constant term is read off a 1x1 evaluation.  Then, for each prime in
    the isolating family, the start-state row is checked first (cheap, and
    it names the residue whose automaton isolates) and, failing that, the
    whole output matrix.
    """
    c0 = f.constant_term()
    if c0:
        return {"kind": "constant", "value": f.field.format(c0)}
    if d < 1:
        return None
    fam = build_isolating_family(d * (f.n + 2), max(t, 1))
    for start, delta, q0, qfs in family_groups(fam):
        mats = delta_matrices(delta, f.n, f.field)
        row = f.evaluate_row(mats, q0)
        entry = None
        if row:
            hit = _first_hit(row, qfs)
            if hit:
                pos, v = hit
                entry = (q0, qfs[pos], v)
            else:
                j = min(row)
                entry = (q0, j, row[j])
            residue = pos if hit else 0
        else:
            out = f.evaluate(mats)
            for r in range(out.nrows):
                rr = out.row(r)
                if rr:
                    j = min(rr)
                    entry = (r, j, rr[j])
                    break
            residue = 0
        if entry is not None:
            return {
                "kind": "automaton",
                "prime": delta.p,
                "residue": residue,
                "index": start + residue,
                "entry": [entry[0], entry[1]],
                "value": f.field.format(entry[2]),
            }
    return None


def identity_test(f, d, t):
    """True iff ``f`` is identically zero, given ``deg f <= d`` and at most ``t`` terms."""
    return find_witness(f, d, t) is None


def coefficient_of(f, m):
    """Coefficient of the word ``m`` in ``f``."""
    m = tuple(m)
    if any(i < 1 or i > f.n for i in m):
        raise ShapeError(f"word {m} uses a variable outside 1..{f.n}")
    if not m:
        return f.constant_term()
    a = build_word_automaton(encode_word(m))
    row = f.evaluate_row(transition_matrices(a, f.n, f.field), a.q0)
    return row.get(a.qf, f.field.zero)


def _decodes(u, n):
    if not u:
        return None
    try:
        return decode_bits(u, n)
    except DecodeError:
        return None


def interpolate(f, d, t, verify=False, trace=None):
    """Recover ``f`` exactly by prefix search over encodings.

    A prefix ``u`` is expanded when the prefix-restricted isolating family
    sees something below it.  Children that cannot begin any encoding over
    ``n`` variables are skipped without a query.  ``trace``, if given, is a
    list that receives the explored prefixes in visiting order.
    """
    n, field = f.n, f.field
    terms = {}
    c0 = f.constant_term()
    if c0:
        terms[()] = c0
    if d >= 1:
        fam = build_isolating_family(d * (n + 2), max(t, 1))
        cap = d * (n + 2)
        stack = [""]
        while stack:
            u = stack.pop()
            if trace is not None:
                trace.append(u)
            word = _decodes(u, n)
            if word is not None:
                alpha = run_test(f, [build_word_automaton(u)]).value
                if alpha:
                    terms[word] = alpha
            if len(u) >= cap:
                continue
            children = []
            for b in "01":
                v = u + b
                if is_encoding_prefix(v, n) and run_test(f, fam.restrict(v)):
                    children.append(v)
            stack.extend(reversed(children))
    result = SparsePoly(field, n, terms)
    if verify:
        diff = DifferenceBlackBox(f, PolyBlackBox(result))
        if not identity_test(diff, d, 2 * max(t, 1)):
            raise PromiseViolation(f"polynomial is not within degree {d} and {t} terms")
    return result


def letter_chain_matrices(word, n, d, field):
    """``d x d`` matrices of the chain automaton over the ``n``-letter alphabet spelling ``word``.

    ``x_i`` moves state ``j`` to ``j+1`` exactly when the ``j``-th letter is
    ``x_i``; every other transition is absent (a zero row).  The
    ``(0, len(word))`` entry of ``f`` at these matrices is the coefficient of
    ``word``, so the value is nonzero whenever ``word`` is a monomial of ``f``.
    """
    if len(word) >= d:
        raise ShapeError(f"a word of length {len(word)} needs more than {d} states")
    rows = [[{} for _ in range(d)] for _ in range(n)]
    for j, i in enumerate(word):
        rows[i - 1][j] = {j + 1: field.one}
    return [Matrix(field, d, d, tuple(r)) for r in rows]
