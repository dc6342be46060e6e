"""LMS-family adaptive filters and a seeded Monte-Carlo estimation benchmark.

The package provides:

* :mod:`lmslab.kernels` -- Gamma function and fractional magnitude kernels;
* :mod:`lmslab.filters` -- one-step update rules for LMS, momentum LMS,
  fractional LMS and three momentum-fractional variants;
* :mod:`lmslab.signal_model` -- the multi-harmonic benchmark signal and
  its parameter transforms;
* :mod:`lmslab.metrics` -- normalized weight difference and MSE;
* :mod:`lmslab.experiment` -- the deterministic Monte-Carlo engine,
  step-size calibration and the full scenario grid;
* :mod:`lmslab.reporting` -- table and learning-curve rendering;
* :mod:`lmslab.cli` -- the ``lmslab`` command.
"""

from .filters import (
    DivergenceError,
    FilterParams,
    FilterState,
    StepRecord,
    Variant,
    WEIGHT_LIMIT,
    default_muf,
    flms_step,
    lms_step,
    make_filter,
    mflms_assembled_step,
    mflms_corrected_step,
    mflms_published16_step,
    momentum_lms_step,
    step,
)
from .kernels import abs_pow, gamma
from .metrics import MetricSpace, mse, nwd
from .experiment import (
    AggregateResult,
    AllRunsDivergedError,
    CalibrationError,
    GridConfig,
    GridEntry,
    RunTrajectory,
    ScenarioConfig,
    calibrate_mu1,
    full_grid,
    lms_params,
    mflms_params,
    run_monte_carlo,
    run_single,
)
from .signal_model import (
    HarmonicSpec,
    ModelTruth,
    aphi_from_bc,
    bc_from_aphi,
    benchmark_spec,
    regressor,
    synthesize,
)

__version__ = "0.1.0"
