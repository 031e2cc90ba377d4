"""Certified error bounds for estimated sparse solutions of
underdetermined linear systems.

Given a wide dictionary A and any candidate solution of A s = x, the
package computes upper bounds on the distance to the unknown sparsest
solution, from the order statistics of the candidate and combinatorial
spectral constants of the dictionary. Exact (noiseless), noisy and
probabilistic (Gaussian random dictionary) regimes are covered, along
with the worst-case construction showing the main bound is attained.
"""

__version__ = "0.1.0"

from .analysis import (
    EtaResult,
    KruskalRank,
    SpectralProfile,
    eta_j,
    g_constant,
    gamma_profile,
    kruskal_rank,
    sigma_min_j,
    unit_norm_columns,
)
from .backend import ACTIVE_BACKEND
from .certify import (
    BoundCertificate,
    Check,
    Theorem,
    TightnessExample,
    THETA_MAX_DEGREES,
    alpha_stat,
    first_bound,
    h_stat,
    loose_bound,
    noisy_loose_bound,
    noisy_tight_bound,
    tight_bound,
    tightness_example,
)
from .errors import (
    BudgetExceededError,
    DomainError,
    InvalidInputError,
    ParseError,
    PreconditionError,
    SingularityError,
    SparseCertError,
    UnsupportedSizeError,
)
from .matops import (
    enumerate_subsets,
    oracle_spectrum,
    pseudoinverse_frobenius,
    read_matrix,
    singular_spectrum,
    take_columns,
    write_matrix,
)
from .random_dict import (
    ProbBoundReport,
    RandomDictSpec,
    TailCheckResult,
    eta_seq,
    failure_bound,
    gamma_analog,
    gamma_seq,
    gaussian_dictionary,
    regime_check,
    sparsity_supremum,
    szarek_check,
)
from .recover import ProblemInstance, make_instance, min_l2_solve, sl0_solve

__all__ = [
    "ACTIVE_BACKEND",
    "BoundCertificate",
    "BudgetExceededError",
    "Check",
    "DomainError",
    "EtaResult",
    "InvalidInputError",
    "KruskalRank",
    "ParseError",
    "PreconditionError",
    "ProbBoundReport",
    "ProblemInstance",
    "RandomDictSpec",
    "SingularityError",
    "SparseCertError",
    "SpectralProfile",
    "THETA_MAX_DEGREES",
    "TailCheckResult",
    "Theorem",
    "TightnessExample",
    "UnsupportedSizeError",
    "alpha_stat",
    "enumerate_subsets",
    "eta_j",
    "eta_seq",
    "failure_bound",
    "first_bound",
    "g_constant",
    "gamma_analog",
    "gamma_profile",
    "gamma_seq",
    "gaussian_dictionary",
    "h_stat",
    "kruskal_rank",
    "loose_bound",
    "make_instance",
    "min_l2_solve",
    "noisy_loose_bound",
    "noisy_tight_bound",
    "oracle_spectrum",
    "pseudoinverse_frobenius",
    "read_matrix",
    "regime_check",
    "sigma_min_j",
    "singular_spectrum",
    "sl0_solve",
    "sparsity_supremum",
    "szarek_check",
    "take_columns",
    "tight_bound",
    "tightness_example",
    "unit_norm_columns",
    "write_matrix",
]
