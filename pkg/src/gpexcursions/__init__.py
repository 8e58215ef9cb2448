"""Level crossings and excursions of stationary Gaussian processes.

Synthesize paths for a given autocorrelation, detect crossings and
excursions, evaluate the closed-form crossing laws and compare the two.
"""

from .acf import (
    AcfKind,
    AcfModel,
    ConditionFlags,
    SpectralMoments,
    check_conditions,
    eval_acf,
    read_acf_csv,
    spectral_moments,
)
from .config import RunConfig, load_config
from .crossings import (
    conditional_upcrossing_stats,
    crossing_intervals,
    crossing_table,
    detect_crossings,
    empirical_rates,
    excursion_table,
    pooled_rates,
    segment_excursions,
)
from .errors import (
    AcfRangeError,
    ConditioningError,
    ConfigError,
    DomainError,
    EstimationError,
    LevelCrossingError,
    OracleInsufficientError,
    PreconditionError,
    SynthesisError,
)
from .gp import SamplePath, make_rng, read_path_csv, synthesize_blocks, synthesize_path, write_path_csv
from .stats import EmpiricalDistribution, ValidationReport, check_scalar, ks_statistic, validate
from .successive import TwoLevelSpec, parabola_mc_oracle, window_probability
from .theory import (
    ErlangLaw,
    ExponentialLaw,
    LevelContext,
    RayleighLaw,
    large_excursion_length_law,
    negative_excursion_length_law,
    rice_rate,
    up_rate,
)

__version__ = "0.1.0"
