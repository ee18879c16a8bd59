"""Command-line front end.

Every subcommand prints one JSON object on stdout and a short human summary
(with timing) on stderr, so stdout is byte-identical across repeated runs.
Exit status: 0 verdict reached, 2 usage or input error, 3 resource cap or
broken promise.
"""

import argparse
import json
import random
import sys
import time
from fractions import Fraction

from .abp import AbpOracle, format_abp, parse_abp, reconstruct_abp
from .automata import family_prime_count
from .circuit import CircuitBlackBox, is_ring_domain, parse_circuit
from .errors import NcpitError, OracleInconsistency, PromiseViolation, ResourceError
from .freepoly import format_word, parse_word
from .pit import coefficient_of, find_witness, interpolate
from .ringpit import nc_ring_test, ring_identity_test

DEFAULT_MAX_PRIMES = 200_000


class UsageError(Exception):
    pass


def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _field_circuit(path):
    c = parse_circuit(_read(path))
    if is_ring_domain(c.domain):
        raise UsageError("this command needs a field-mode circuit; use ring-test for rings")
    return c


def _check_bounds(args, n, cap):
    if args.d < 0 or args.t < 0:
        raise UsageError("degree and term bounds must be nonnegative")
    if args.d >= 1:
        count = family_prime_count(args.d * (n + 2), max(args.t, 1))
        if count > cap:
            raise ResourceError(f"isolating family needs {count} primes, cap is {cap} (see --max-primes)")


def cmd_test(args):
    c = _field_circuit(args.circuit)
    _check_bounds(args, c.n, args.max_primes)
    w = find_witness(CircuitBlackBox(c, args.d, args.t), args.d, args.t)
    report = {"verdict": "zero" if w is None else "nonzero", "witness": w}
    return report, report["verdict"]


def cmd_interpolate(args):
    c = _field_circuit(args.circuit)
    _check_bounds(args, c.n, args.max_primes)
    f = interpolate(CircuitBlackBox(c, args.d, args.t), args.d, args.t, verify=args.verify)
    report = {"terms": len(f), "polynomial": f.format()}
    return report, f"{len(f)} terms"


def cmd_coeff(args):
    c = _field_circuit(args.circuit)
    try:
        m = parse_word(args.monomial, c.n)
    except NcpitError as exc:
        raise UsageError(str(exc)) from None
    v = coefficient_of(CircuitBlackBox(c), m)
    report = {"monomial": format_word(m), "coefficient": c.domain.format(v)}
    return report, f"coefficient {report['coefficient']}"


def cmd_abp(args):
    a = parse_abp(_read(args.abp))
    o = AbpOracle(a)
    r = reconstruct_abp(o)
    report = {"abp": format_abp(r), "queries": o.queries, "max_dim": o.max_dim}
    return report, f"{o.queries} oracle queries, matrices up to {o.max_dim}x{o.max_dim}"


def _fraction(text):
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad number {text!r}") from None
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("epsilon must lie strictly between 0 and 1")
    return v


def cmd_ring(args):
    c = parse_circuit(_read(args.circuit))
    if not is_ring_domain(c.domain):
        raise UsageError("ring-test needs a circuit declared with 'ring <spec>'")
    if args.d is not None and args.d < 0:
        raise UsageError("degree bound must be nonnegative")
    if args.trials is not None and args.trials < 1:
        raise UsageError("--trials must be positive")
    rng = random.Random(args.seed)
    test = nc_ring_test if args.nc else ring_identity_test
    v = test(c, args.d, args.epsilon, args.trials, rng)
    report = {
        "verdict": v.verdict,
        "seed": args.seed,
        "epsilon": str(args.epsilon),
        "trials": v.trials,
        "witness": v.witness,
        "info": v.info,
    }
    return report, f"{v.verdict} after {v.trials} trials (seed {args.seed})"


def build_parser():
    p = argparse.ArgumentParser(prog="ncpit", description="Identity testing and interpolation for noncommutative polynomials.")
    p.add_argument("--max-primes", type=int, default=DEFAULT_MAX_PRIMES, help="cap on the isolating family size (in primes)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("test", help="deterministic identity test")
    s.add_argument("-c", "--circuit", required=True)
    s.add_argument("-d", type=int, required=True, help="degree bound")
    s.add_argument("-t", type=int, required=True, help="term-count bound")
    s.set_defaults(func=cmd_test)

    s = sub.add_parser("interpolate", help="recover all monomials and coefficients")
    s.add_argument("-c", "--circuit", required=True)
    s.add_argument("-d", type=int, required=True)
    s.add_argument("-t", type=int, required=True)
    s.add_argument("--verify", action="store_true", help="re-test f minus the result")
    s.set_defaults(func=cmd_interpolate)

    s = sub.add_parser("coeff", help="coefficient of one monomial")
    s.add_argument("-c", "--circuit", required=True)
    s.add_argument("-m", "--monomial", required=True, help='e.g. "x1 x2"')
    s.set_defaults(func=cmd_coeff)

    s = sub.add_parser("abp-reconstruct", help="rebuild an ABP from gate queries")
    s.add_argument("-a", "--abp", required=True)
    s.set_defaults(func=cmd_abp)

    s = sub.add_parser("ring-test", help="randomized test over a ring oracle")
    s.add_argument("-c", "--circuit", required=True)
    s.add_argument("--epsilon", type=_fraction, default=Fraction(1, 2))
    s.add_argument("--trials", type=int, default=None, help="default: enough for failure <= 2^-20")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--nc", action="store_true", help="treat variables as noncommuting")
    s.add_argument("-d", type=int, default=None, help="degree bound (default: formal degree)")
    s.set_defaults(func=cmd_ring)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        report, summary = args.func(args)
    except (UsageError, NcpitError, ValueError) as exc:
        if isinstance(exc, (ResourceError, PromiseViolation, OracleInconsistency)):
            code = 3
        else:
            code = 2
        print(f"ncpit {args.command}: error: {exc}", file=sys.stderr)
        return code
    elapsed = time.perf_counter() - start
    out = {"command": args.command, **report}
    sys.stdout.write(json.dumps(out, sort_keys=True) + "\n")
    print(f"ncpit {args.command}: {summary} ({elapsed:.3f} s)", file=sys.stderr)
    return 0
