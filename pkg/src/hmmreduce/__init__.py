"""HMM order reduction via I-divergence factorization of pseudo-Hankel matrices."""

__version__ = "0.1.0"

from .errors import (
    DegenerateStateError,
    DomainError,
    HmmReduceError,
    InputError,
    InternalConsistencyError,
    ModelParseError,
    ReducibilityError,
    ShapeError,
    SizeLimitError,
    ValidationError,
)
from .hmm import AbSpec, HmmModel, model_from_ab, stationary_vector, string_probability
from .lexical import FLO, LLO, LexOrder, flo, llo
from .hankel import (
    HankelSystem,
    block_diag_gamma,
    build_factors,
    hankel_from_oracle,
    marginalize_gamma,
    marginalize_pi,
    repackage_pi_tilde,
)
from .nmf import (
    NmfState,
    Step1Config,
    Step2Config,
    divergence,
    step1_factorize,
    step2_gamma,
    step2_pi,
)
from .pipeline import (
    ReductionConfig,
    ReductionResult,
    final_divergence,
    reduce_model,
    split_m_concat,
)
from .experiments import (
    ExperimentReport,
    RunRecord,
    Step2Comparison,
    compare_step2_versions,
    run_batch,
    variability_index,
    write_divergence_decay_csv,
    write_final_divergence_csv,
    write_table_csv,
    write_variability_csv,
)
from .modelio import (
    dump_model,
    example_model,
    load_model,
    parse_model,
    save_model,
)
