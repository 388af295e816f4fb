"""Rigorous summatory-function computation and Mertens-bound certification.

The package computes M(x), psi(x), N(x), m(x), m1(x), Q(x) with exact or
outward-rounded interval arithmetic, verifies the combinatorial identities
relating them at exact integer points, and mechanically certifies the
explicit bound chain culminating in |M(x)| <= x/160383 for x >= 8.4e9 and
|M(x)| <= x/180194 for x >= 1e19.
"""

from .enclosure import (
    Enclosure,
    EnclosureDomainError,
    constants,
    directed_sum,
    euler_gamma,
    pi_enclosure,
    pi_squared,
    sum_enclosure,
    zeta_half,
    zeta_real,
)
from .hypotheses import (
    HypothesisLedger,
    LedgerEntry,
    RootModel,
    default_ledger,
)
from .sieve import Segment, base_primes, sieve_mangoldt, sieve_mobius
from .summatory import (
    ResourceLimitError,
    ScanReport,
    SummatorySeries,
    lambda_sqrt_envelope_check,
    m1_at,
    m_at,
    m_scan,
    mertens_scan,
    n_scan,
    psi_scan,
    q_scan,
    scan_ceiling,
    threshold_scan,
    verify_root_model,
    weighted_sum,
)
from .identity import (
    IdentityResidual,
    alpha_constant,
    beta_constant,
    chebyshev_A,
    hyperbola_residual,
    mellin_identity_check,
    mn_gap_scan,
    mobius_floor_identity_check,
    n_via_abel,
    schoenfeld_residual,
    step_mellin_integral,
)
from .certify import (
    BoundCertificate,
    PipelineError,
    TheoremAssembly,
    TraceTerm,
    dyadic_pipeline,
    dyadic_step,
    first_range_pipeline,
    large_x_iteration,
    large_x_step,
    lstar_enclosure,
    mu2_sum_bounds,
    n_to_m_gap,
    ramare_crossover,
    theorem_A_assembly,
    within_one_unit,
)

__version__ = "1.0.0"
