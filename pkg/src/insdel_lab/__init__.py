"""Finite-field laboratory for insertion/deletion correction by Reed-Solomon codes.

The package splits into arithmetic layers (field, rs), combinatorial layers
(align, chains), the matrix machinery (vmatrix), the certificate algorithms
and probability bounds (certify), and the experiment harness with its CLI
(harness, reporting, cli).
"""

from .align import (
    IncreasingSubsequence,
    MatchingPair,
    agreement_count,
    edit_distance,
    extract_matching,
    lcs,
    lcs_length,
    matching_pair,
    restrict,
)
from .certify import (
    BankCheckpoint,
    BoundReport,
    CertifyOutcome,
    CertifyRun,
    OutcomeKind,
    certificate_count_bound,
    certify_v1,
    certify_v2,
    failure_prob_bound_linear,
    failure_prob_bound_quadratic,
    faulty_index,
    schwartz_zippel_bound,
)
from .chains import (
    Chain,
    ChainDecomposition,
    ChainKind,
    ChainVariant,
    Orientation,
    decompose,
    is_chain,
    is_maximal,
    order_parts,
    split_long_chains,
    var_set,
)
from .errors import BudgetError, InvariantViolation, LabError, ParameterError
from .field import (
    FieldElement,
    PrimeModulus,
    RandomSeed,
    derive_stream,
    is_prime,
    sample_distinct_tuple,
    stream_rng,
)
from .harness import (
    ExperimentConfig,
    MonteCarloResult,
    TheoremResult,
    brute_force_max_lcs,
    canonical_pair,
    corrects_insdel_bruteforce,
    corrects_insdel_vmatrix,
    monte_carlo,
    replay_trial,
    run_theorem_experiment,
)
from .reporting import Summary, TrialRecord, clopper_pearson, serialize
from .rs import (
    Codeword,
    Polynomial,
    RsCode,
    encode,
    enumerate_codewords,
    sample_random_code,
)
from .vmatrix import (
    AssignedMatrix,
    BlockSpec,
    VMatrixSpec,
    block_matrix,
    build,
    determinant,
    is_full_column_rank,
    rank,
    symbolic_determinant,
    symbolically_zero,
)

__version__ = "0.1.0"
