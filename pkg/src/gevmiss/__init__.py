"""GEV estimation from block maxima with missing observations.

Block maxima computed over incomplete blocks are biased low; this
package provides maximum-likelihood estimators that account for the
missingness, either by censoring-style weights on each block's
log-likelihood contribution or by an EM loop over blocks whose maxima
may or may not have survived the gaps. It also bundles the simulation
machinery used to compare the estimators and a small tidal pipeline
that turns hourly water levels into annual surge maxima.
"""

from .bootstrap import BootSummary, boot_summary_to_csv, bootstrap_fit
from .estimators import (
    METHODS,
    FitError,
    FitResult,
    HessianError,
    fisher_se,
    fit,
    fit_em,
    fit_weighted,
    init_params,
    weighted_nll,
)
from .gev import GevParams
from .kernels import NUMBA_ENABLED
from .simulate import (
    DISTS,
    SCENARIOS,
    ScenarioConfig,
    SimSeries,
    StudyError,
    StudyRow,
    SplitMaxBoundsReport,
    apply_missingness,
    extract_blocks,
    gen_series,
    run_study,
    study_rows_to_csv,
    split_max_bounds_check,
    true_return_level,
)
from .tides import (
    DEFAULT_CONSTITUENTS,
    HourlySeries,
    TidalModel,
    annual_blocks,
    detrend_surge,
    fit_tidal,
    parse_hourly_csv,
    read_blocks_csv,
    write_blocks_csv,
    write_hourly_csv,
)
from .weights import (
    BlockRecord,
    CensorStatus,
    WeightedSample,
    weight_conditional_empirical,
    weight_em,
    weight_unconditional,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "NUMBA_ENABLED",
    "GevParams",
    "CensorStatus",
    "BlockRecord",
    "WeightedSample",
    "weight_unconditional",
    "weight_conditional_empirical",
    "weight_em",
    "METHODS",
    "FitError",
    "HessianError",
    "FitResult",
    "weighted_nll",
    "init_params",
    "fit_weighted",
    "fit",
    "fit_em",
    "fisher_se",
    "DISTS",
    "SCENARIOS",
    "ScenarioConfig",
    "SimSeries",
    "StudyError",
    "StudyRow",
    "SplitMaxBoundsReport",
    "gen_series",
    "apply_missingness",
    "extract_blocks",
    "true_return_level",
    "run_study",
    "study_rows_to_csv",
    "split_max_bounds_check",
    "BootSummary",
    "bootstrap_fit",
    "boot_summary_to_csv",
    "DEFAULT_CONSTITUENTS",
    "HourlySeries",
    "TidalModel",
    "parse_hourly_csv",
    "write_hourly_csv",
    "fit_tidal",
    "detrend_surge",
    "annual_blocks",
    "write_blocks_csv",
    "read_blocks_csv",
]
