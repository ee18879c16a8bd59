"""Automata-based identity testing and interpolation for noncommutative polynomials,
black-box ABP reconstruction, and randomized identity testing over finite rings."""

from .abp import Abp, AbpOracle, abp_expand, abp_gate_eval, parse_abp, format_abp, reconstruct_abp, rs_basis_extend
from .algebra import Basis, Matrix, PrimeField, Rationals, basis_extend, mat_mul, solve_linear
from .automata import (
    AutomataFamily,
    Dfa,
    build_isolating_family,
    build_mod_automaton,
    build_word_automaton,
    prefix_restrict,
    transition_matrices,
)
from .circuit import (
    BlackBoxPoly,
    Circuit,
    CircuitBlackBox,
    CircuitBuilder,
    PolyBlackBox,
    brute_expand,
    eval_on_matrices,
    format_circuit,
    parse_circuit,
)
from .errors import (
    DecodeError,
    DomainMismatchError,
    NcpitError,
    OracleInconsistency,
    ParameterError,
    ParseError,
    PromiseViolation,
    ResourceError,
    ShapeError,
)
from .freepoly import SparsePoly, decode_bits, encode_word, parse_sparse, sparse_mul
from .pit import TestOutcome, coefficient_of, identity_test, interpolate, run_test
from .ringpit import (
    RingVerdict,
    SampleSet,
    kronecker_substitute,
    monic_divrem,
    nc_ring_test,
    ring_identity_test,
    ring_scalar,
    sample_monic,
    sz_blackbox_test,
)
from .rings import ProductRing, QuotientRing, RingOracle, RingPoly, ZMod, parse_ring_spec

__version__ = "0.1.0"
