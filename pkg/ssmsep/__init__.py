"""Real vs complex diagonal state space models: constructors, lower bounds, training, quantization."""

from .bounds import (
    BoundQuery,
    BoundReport,
    Parity,
    count_alternations,
    forward_difference,
    lower_bound_copy,
    lower_bound_general,
    lower_bound_oscillatory,
    lower_bound_random,
    restrict_parity,
    sign_changes,
)
from .constructors import ConstructionResult, construct_complex_dft, construct_real_vandermonde
from .errors import ConfigError, NumericAbort, ReportError, SolverError, SSMError, ValidationError
from .params import StableParams, gradient, loss
from .quantization import QuantizationReport, QuantizationSpec, estimate_robustness
from .ssm import (
    DiagonalSSM,
    Mode,
    ScalarSeries,
    StateTrace,
    apply,
    approximation_error,
    bilinear_discretize,
    impulse_response,
    is_stable,
)
from .targets import TargetKind, TargetSpec, generate, normalized_error
from .training import TrainConfig, TrainTrace, growth_check, train
