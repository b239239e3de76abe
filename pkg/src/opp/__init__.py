"""Objectives, Principles and Practices (OPP) assessment engine for agile methods."""

from opp.adequacy import (
    AdequacyReport,
    Coverage,
    LikertLabel,
    Mode,
    RankedList,
    assess_adequacy,
    map_likert,
    objective_coverage,
    principle_coverage,
    rank_methods,
)
from opp.formats import (
    builtin_method,
    embedded_errata,
    embedded_framework,
    load_framework,
    load_measurements,
    load_method,
    serialize,
)
from opp.indicators import (
    AssessmentMode,
    IndicatorHierarchy,
    Measurement,
    MeasurementSet,
    Node,
    Policy,
    ScoreReport,
    aggregate,
    ahp_weights,
    assess,
    build_hierarchy,
    consistency_ratio,
    normalize,
)
from opp.model import (
    FrameworkModel,
    MethodDefinition,
    ValidationReport,
    check_consistency,
    derive_linkages,
    expected_counts,
    validate_framework,
)

__version__ = "0.1.0"
