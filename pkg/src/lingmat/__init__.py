"""Word-matrix ensembles: permutation-invariant observables, a 5-parameter
Gaussian matrix model with Monte Carlo validation, exact invariant
counting, and a PPMI + ridge-regression corpus pipeline."""

__version__ = "0.1.0"

from .matrix_core import (  # noqa: F401
    Ensemble,
    ParseError,
    PermutationMap,
    WordMatrix,
    antisymmetric_part,
    apply_permutation,
    read_ensemble,
    read_matrix,
    symmetric_part,
    write_ensemble,
    write_matrix,
)
from .invariants import (  # noqa: F401
    CATALOG,
    QUADRATIC_TAGS,
    EnsembleAverages,
    GraphInvariant,
    element_histogram,
    ensemble_averages,
    eval_all,
    eval_graph_invariant,
    eval_invariant,
)
from .counting import (  # noqa: F401
    Partition,
    count_invariants,
    count_invariants_stable,
    enumerate_quadratic_graphs,
    partitions,
)
from .gauss import (  # noqa: F401
    FIT_TAGS,
    HIGHER_TAGS,
    GaussParams,
    GeneralGaussSpec,
    MomentReport,
    NonGaussianAveragesError,
    fit,
    log_partition,
    moment_report,
    predict_moment,
)
from .sampler import (  # noqa: F401
    SampleSpec,
    monte_carlo_check,
    sample,
)
from .regression import (  # noqa: F401
    DivergenceError,
    RegressionConfig,
    SingularSystemError,
    TrainingSet,
    fit_closed_form,
    fit_gradient_descent,
    loss,
)
from .pipeline import PipelineConfig, PipelineError, run_pipeline  # noqa: F401
