"""Exact constructions around rearrangements of conditionally convergent series.

Modules: ``core`` (rationals, streams, moduli, permutations, bracketings),
``rearrange`` (rearrangement to any target), ``oscillate`` (oscillating
permutations and divergence witnesses), ``bdn`` (series from pseudobounded
sets), ``instrument`` (the plus-tail predicate and its lambda/sigma
machinery), ``catalog`` (demo series and permutations with hand-derived
moduli) and ``cli``.

The library is single-threaded: memo tables are unsynchronized.
"""

from .core import (
    Bracketing,
    CauchyModulus,
    ConvergentSeries,
    Permutation,
    Rational,
    TermStream,
    apply_permutation,
    bracket_series,
    coverage_index,
    format_rational,
    limit_approx,
    parse_rational,
    partial_sum,
    permuted_series,
    verify_modulus,
)
from .errors import (
    BracketingError,
    BudgetExceeded,
    CertificateViolation,
    ConstructionError,
    InjectivityError,
    MembershipViolation,
    ModulusViolation,
    NotFound,
    OverlapError,
    PseudoboundednessViolation,
    SeparationViolation,
    TailViolation,
)
from .rearrange import DivergenceCertificate, RearrangementTarget, riemann_permutation, sign_split

__version__ = "0.1.0"
