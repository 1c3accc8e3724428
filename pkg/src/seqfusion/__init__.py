"""Sequential decision fusion of per-frame locomotion-environment classifier scores."""

from .core import (
    EPSILON,
    EnvLabel,
    FusionTrace,
    InvalidDistributionError,
    Method,
    ProbDist5,
    ScoreStream,
    argmax_label,
    normalize,
)
from .evaluation import (
    AccuracyReport,
    DelaySweep,
    accuracy_with_delay,
    delay_sweep,
    summarize,
    timing_bench,
    welch_ttest,
)
from .fusion import (
    FusionConfig,
    SmootherState,
    fuse_hmm,
    fuse_pipeline,
    smoother_init,
    viterbi_step,
    voting_filter,
)
from .simulator import NoiseModel, TrialScript, generate_session, generate_trial
from .transition import (
    InvalidParametersError,
    RuleViolation,
    TransitionMatrix,
    TransitionRuleParams,
    build_matrix,
    validate_rules,
)

__version__ = "0.1.0"
