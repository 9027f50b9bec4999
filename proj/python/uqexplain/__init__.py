"""Calibrated, uncertainty-aware explanations for tabular predictions.

The heavy lifting lives in the compiled extension ``uqexplain._core``;
this package re-exports its public surface.
"""

from uqexplain._core import (  # noqa: F401
    CalibratedPrediction,
    Calibrator,
    Category,
    Condition,
    ConditionOp,
    ConformalPredictiveDistribution,
    DataSplit,
    Dataset,
    Explainer,
    ExplainerOptions,
    Explanation,
    ExplanationKind,
    ExplanationMode,
    ExternalScores,
    FeatureKind,
    FeatureRule,
    FilterKind,
    ForestParams,
    IntervalMode,
    IntervalSide,
    IsotonicFit,
    ModeKind,
    ProbabilityInterval,
    RandomForest,
    ScoringModel,
    Task,
    TiePolicy,
    TriagedRule,
    VennAbersCalibrator,
    categorize,
    category_name,
    decile_boundaries,
    demo_housing,
    demo_quality,
    discretize_feature,
    feasible,
    filter_category,
    filter_ensured,
    fit_isotonic,
    is_ensured,
    load_csv,
    load_external_scores,
    predicted_class_prob,
    rank_rules,
    rank_score,
    regularise,
    render_conditions,
    split,
    synth_classification,
    synth_regression,
    train_forest,
    triage_explanation,
    va_predict,
    write_csv,
)

__version__ = "0.1.0"
