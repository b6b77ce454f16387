"""Global-value-chain accounting over inter-country input-output tables."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    ICIOTable,
    LeontiefInverse,
    Mode,
    NodeIndex,
    SectorGroup,
    TechCoefficients,
    ValidationReport,
    Violation,
    build_table,
    leontief_inverse,
    technical_coefficients,
    validate_table,
)
from .decompose import (  # noqa: E402
    Attribution,
    ExportDecomposition,
    ExportVector,
    VAOriginMatrix,
    accounts,
    backward_manufacturing_share,
    decompose_all,
    decompose_exports,
    dva_by_group,
    gross_exports,
    oracle_va_trace,
    participation_series,
    va_origin_matrix,
)
from .taxonomy import (  # noqa: E402
    Bucket,
    BucketAssignment,
    CountryIndicators,
    SizeClass,
    SizeCutoffs,
    TaxonomyConfig,
    Thresholds,
    TransitionReport,
    classify,
    classify_panel,
    indicators_from_table,
    replay_trace,
    size_class,
    transitions,
)
from .ingest import SynthParams, read_dataset, synth_economy, write_dataset  # noqa: E402
