"""Muscle fatigue resistance from empirical maximum endurance time models."""

__version__ = "0.1.0"

from .analysis import (
    EvaluationGrid,
    GroupStatistics,
    IccVariant,
    PredictionBand,
    RegressionResult,
    analyze_catalog,
    analyze_model,
    group_statistics,
    icc,
    normal_plot_positions,
    pearson_r,
    prediction_band,
    regress_m,
    regress_m_oracle,
)
from .catalog import EmpiricalMetModel, Family, Group, ModelCatalog, load_catalog, reference_catalog
from .core import (
    CapacityTrajectory,
    FatigueParams,
    LoadProfile,
    endurance_time,
    fcem_static,
    met_extended,
    simulate_capacity,
)
from .errors import CatalogError, DegenerateInputError, DomainError, InfeasibleLoadError, MetFatigueError
from .report import build_validation_report, export_figure_data
