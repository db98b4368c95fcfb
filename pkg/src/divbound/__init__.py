"""divbound: witness divisors, censuses and coprime-square sequence sums
for divisor-function inequalities.

Every n has a divisor d with d^4 <= n and tau(n) <= 8 * tau(d)^7; this
package constructs and certifies such witnesses, mass-verifies the summed
form tau(n) <= 8 * sum tau(d)^7 over ranges, generates the prime families
proving the constant 8 sharp, and tabulates the congruence sums the bound
feeds in sieve applications.
"""

from .arith import (
    Factorization,
    SieveSegment,
    divisors_up_to_fourth_root,
    euler_phi,
    factorize,
    next_prime_in,
    omega,
    spf_sieve_segment,
    tau,
)
from .census import (
    CensusConfig,
    CensusReport,
    CheckpointError,
    EqualityCase,
    best_constant_curve,
    divisor_weight_sum,
    equality_census,
    verify_range,
)
from .gaussian import (
    GammaSpec,
    GaussianTable,
    congruence_sum_A,
    congruence_sum_A_via_residues,
    discrepancy_table,
    main_term_M,
    rho,
    sequence_a,
)
from .lowerbound import LowerBoundInstance, build_instance, verify_instance
from .witness import (
    CertificationError,
    ExponentSplit,
    WitnessCertificate,
    construct_witness,
    floor_quarter_inequalities,
    obstruction_instance,
    split_by_exponent,
    witness_cube_part,
    witness_high_exponent,
    witness_square_part,
    witness_squarefree,
)

__version__ = "0.1.0"

__all__ = [
    "Factorization",
    "SieveSegment",
    "factorize",
    "tau",
    "omega",
    "euler_phi",
    "divisors_up_to_fourth_root",
    "spf_sieve_segment",
    "next_prime_in",
    "ExponentSplit",
    "WitnessCertificate",
    "CertificationError",
    "floor_quarter_inequalities",
    "split_by_exponent",
    "witness_high_exponent",
    "witness_squarefree",
    "witness_square_part",
    "witness_cube_part",
    "construct_witness",
    "obstruction_instance",
    "CensusConfig",
    "CensusReport",
    "EqualityCase",
    "CheckpointError",
    "divisor_weight_sum",
    "verify_range",
    "equality_census",
    "best_constant_curve",
    "LowerBoundInstance",
    "build_instance",
    "verify_instance",
    "GammaSpec",
    "GaussianTable",
    "sequence_a",
    "rho",
    "congruence_sum_A",
    "congruence_sum_A_via_residues",
    "main_term_M",
    "discrepancy_table",
]
