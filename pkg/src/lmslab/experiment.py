"""Deterministic, seeded Monte-Carlo engine for the estimation benchmark.

The benchmark sweeps a grid of noise levels, momentum coefficients and
fractional orders.  Each momentum value is paired with a plain-LMS
learning rate; each momentum-fractional scenario is run at a base step
size ``mu1`` obtained by :func:`calibrate_mu1` so that the two
algorithms are set up at equal convergence before their steady states
are compared (an explicit ``mu1`` override skips calibration).

Noise levels are grid labels: with the default ``variance`` scale a
level ``L`` means the disturbance has variance ``L`` (standard
deviation ``sqrt(L)``); the ``std`` scale reads the level directly as
the standard deviation.  The variance reading is the one under which
the published reference values for this benchmark are reproduced, so it
is the default.

Reproducibility contract: every random draw is a pure function of
``(base_seed, stream domain, run index)``.  Weight initialisation and
noise use separate sub-streams, runs never share a stream, and ensemble
means are reduced in ascending run-index order, so results are
bit-identical across repeated invocations and any worker count.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .filters import (
    FilterParams,
    FilterState,
    Variant,
    default_muf,
    diverged_rows,
    step,
)
from .metrics import MetricSpace, mse, nwd
from .signal_model import ModelTruth, aphi_from_bc, benchmark_spec, regressor

__all__ = [
    "ScenarioConfig",
    "GridConfig",
    "GridEntry",
    "RunTrajectory",
    "AggregateResult",
    "CalibrationError",
    "AllRunsDivergedError",
    "run_single",
    "run_monte_carlo",
    "calibrate_mu1",
    "full_grid",
    "lms_params",
    "mflms_params",
    "DEFAULT_BASE_SEED",
    "NOISE_LEVELS",
    "ALPHAS",
    "FRACTIONAL_ORDERS",
    "PAIRED_LMS_ETAS",
]

log = logging.getLogger(__name__)

DEFAULT_BASE_SEED = 42

# Default benchmark grid: noise levels x momentum values x fractional
# orders, with the conventional LMS learning-rate pairing per momentum.
NOISE_LEVELS = (0.30, 0.60, 0.90)
ALPHAS = (0.2, 0.5, 0.8)
FRACTIONAL_ORDERS = (0.25, 0.50, 0.75)
PAIRED_LMS_ETAS = (0.027, 0.042, 0.1)

# Calibration search bracket for mu1 and the flatness ratio separating a
# mid-transient reference from one already at its steady state.
_MU_BRACKET = (1e-4, 0.5)
_CONVERGED_RATIO = 1.2

# Sub-stream domains: the main ensemble and calibration probes never
# share random streams.
_DOMAIN_MAIN = 0
_DOMAIN_CALIBRATION = 1


class CalibrationError(RuntimeError):
    """No step size in the search bracket achieves the requested match."""


class AllRunsDivergedError(RuntimeError):
    """Every run of an ensemble hit the divergence guard."""


@dataclass(frozen=True)
class ScenarioConfig:
    """One cell of the benchmark grid plus the Monte-Carlo protocol.

    ``noise_std`` is the actual standard deviation of the disturbance.
    ``lms_eta`` is the paired plain-LMS learning rate; ``mflms_mu1`` is
    the momentum-fractional base step (``None`` means "calibrate"), and
    ``mflms_muf`` overrides the fractional step size (``None`` selects
    ``mu1 * Gamma(2 - f)``).
    """

    noise_std: float
    alpha: float
    f: float
    lms_eta: float
    mflms_mu1: float | None = None
    mflms_muf: float | None = None
    n_runs: int = 1000
    n_iters: int = 1000
    checkpoint_interval: int = 100
    base_seed: int = DEFAULT_BASE_SEED
    metric_space: MetricSpace = MetricSpace.APHI

    def __post_init__(self):
        if self.noise_std < 0:
            raise ValueError("noise_std must be non-negative")
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError("alpha must lie in [0, 1)")
        if not 0.0 < self.f < 1.0:
            raise ValueError("f must lie strictly in (0, 1)")
        if not self.lms_eta > 0:
            raise ValueError("lms_eta must be positive")
        if self.mflms_mu1 is not None and not self.mflms_mu1 > 0:
            raise ValueError("mflms_mu1 must be positive")
        if self.mflms_muf is not None and self.mflms_muf < 0:
            raise ValueError("mflms_muf must be non-negative")
        if self.n_runs < 1 or self.n_iters < 1:
            raise ValueError("n_runs and n_iters must be positive")
        if self.checkpoint_interval < 1 or self.n_iters % self.checkpoint_interval:
            raise ValueError("checkpoint_interval must divide n_iters")
        if not 0 <= self.base_seed < 2**64:
            raise ValueError("base_seed must fit in 64 bits")

    @property
    def checkpoints(self) -> np.ndarray:
        """Iteration indices at which ensemble fitness is recorded."""
        k = self.checkpoint_interval
        return np.arange(k, self.n_iters + 1, k)


@dataclass
class RunTrajectory:
    """Checkpointed fitness and final parameters of one run."""

    nwd_at_checkpoints: np.ndarray
    final_theta_aphi: np.ndarray
    final_theta_bc: np.ndarray
    diverged: bool


@dataclass
class AggregateResult:
    """Ensemble means over the non-diverged runs of a scenario."""

    mean_nwd_at_checkpoints: np.ndarray
    mean_final_theta_aphi: np.ndarray
    mse_of_mean: float
    mean_per_run_mse: float
    divergence_count: int


def lms_params(eta: float) -> FilterParams:
    """Plain-LMS parameter set at learning rate ``eta``."""
    return FilterParams(mu1=eta, muf=0.0, f=0.5, alpha=0.0, variant=Variant.LMS)


def mflms_params(mu1: float, alpha: float, f: float, muf: float | None = None) -> FilterParams:
    """Momentum-fractional parameter set; ``muf=None`` selects the default."""
    if muf is None:
        muf = default_muf(mu1, f)
    return FilterParams(mu1=mu1, muf=muf, f=f, alpha=alpha, variant=Variant.MFLMS_ASSEMBLED)


def _run_rngs(base_seed: int, domain: int, run_index: int):
    """Independent generators for weight init and noise of one run."""
    rng_w = np.random.default_rng(np.random.SeedSequence(base_seed, spawn_key=(domain, run_index, 0)))
    rng_e = np.random.default_rng(np.random.SeedSequence(base_seed, spawn_key=(domain, run_index, 1)))
    return rng_w, rng_e


def _simulate(
    algorithm: FilterParams,
    scenario: ScenarioConfig,
    run_indices,
    domain: int = _DOMAIN_MAIN,
    n_iters: int | None = None,
):
    """Advance a batch of runs; returns (nwd_ck, final_bc, diverged).

    Every run owns its seed-derived streams, so the returned rows do not
    depend on how runs are grouped into batches.
    """
    run_indices = list(run_indices)
    n_iters = scenario.n_iters if n_iters is None else n_iters
    interval = scenario.checkpoint_interval
    n_ck = n_iters // interval
    spec, truth = benchmark_spec(scenario.noise_std)
    m = len(truth.theta_bc)

    psi = regressor(spec.frequencies, np.arange(1, n_iters + 1))
    d_clean = (psi * truth.theta_bc).sum(axis=-1)

    n_runs = len(run_indices)
    w0 = np.empty((n_runs, m))
    eps = np.empty((n_runs, n_iters))
    for row, run_index in enumerate(run_indices):
        rng_w, rng_e = _run_rngs(scenario.base_seed, domain, run_index)
        w0[row] = rng_w.standard_normal(m)
        eps[row] = rng_e.normal(0.0, scenario.noise_std, n_iters)

    state = FilterState(w=w0, w_prev=w0.copy(), v=np.zeros((n_runs, m)), n=0)
    frozen = np.zeros(n_runs, dtype=bool)
    nwd_ck = np.empty((n_runs, n_ck))

    if scenario.metric_space is MetricSpace.APHI:
        truth_vec = truth.theta_aphi
    else:
        truth_vec = truth.theta_bc

    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n_iters):
            d = d_clean[k] + eps[:, k]
            new_state, _ = step(state, psi[k], d, algorithm)
            bad = diverged_rows(new_state.w) | frozen
            if bad.any():
                # Diverged runs stay frozen at their last in-bound state.
                new_state.w[bad] = state.w[bad]
                new_state.w_prev[bad] = state.w_prev[bad]
                new_state.v[bad] = state.v[bad]
                frozen = bad
            state = new_state
            if (k + 1) % interval == 0:
                if scenario.metric_space is MetricSpace.APHI:
                    estimate = aphi_from_bc(state.w)
                else:
                    estimate = state.w
                nwd_ck[:, (k + 1) // interval - 1] = nwd(estimate, truth_vec)

    return nwd_ck, state.w.copy(), frozen


def run_single(algorithm: FilterParams, scenario: ScenarioConfig, run_index: int) -> RunTrajectory:
    """One seeded run: Gaussian weight init, noisy samples, checkpointed fitness.

    Identical ``(algorithm, scenario, run_index)`` always reproduce the
    same trajectory bit for bit.  Divergence is recorded, not raised.
    """
    if not 0 <= run_index < scenario.n_runs:
        raise ValueError("run_index out of range")
    nwd_ck, final_bc, frozen = _simulate(algorithm, scenario, [run_index])
    final_bc = final_bc[0]
    return RunTrajectory(
        nwd_at_checkpoints=nwd_ck[0],
        final_theta_aphi=aphi_from_bc(final_bc),
        final_theta_bc=final_bc,
        diverged=bool(frozen[0]),
    )


def _aggregate(nwd_ck: np.ndarray, final_bc: np.ndarray, frozen: np.ndarray, truth: ModelTruth) -> AggregateResult:
    alive = ~frozen
    if not alive.any():
        raise AllRunsDivergedError("every run in the ensemble diverged")
    final_aphi = aphi_from_bc(final_bc[alive])
    mean_aphi = final_aphi.mean(axis=0)
    per_run = mse(final_aphi, truth.theta_aphi)
    return AggregateResult(
        mean_nwd_at_checkpoints=nwd_ck[alive].mean(axis=0),
        mean_final_theta_aphi=mean_aphi,
        mse_of_mean=float(mse(mean_aphi, truth.theta_aphi)),
        mean_per_run_mse=float(np.mean(per_run)),
        divergence_count=int(frozen.sum()),
    )


def run_monte_carlo(algorithm: FilterParams, scenario: ScenarioConfig, workers: int = 1) -> AggregateResult:
    """Ensemble of ``scenario.n_runs`` independent runs, averaged.

    Diverged runs are excluded from the means and counted.  The result
    is independent of ``workers``: runs are partitioned into contiguous
    index blocks and reassembled in order before any reduction.
    """
    indices = range(scenario.n_runs)
    if workers <= 1 or scenario.n_runs == 1:
        nwd_ck, final_bc, frozen = _simulate(algorithm, scenario, indices)
    else:
        blocks = np.array_split(np.asarray(indices), min(workers, scenario.n_runs))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _simulate(algorithm, scenario, b), blocks))
        nwd_ck = np.concatenate([p[0] for p in parts], axis=0)
        final_bc = np.concatenate([p[1] for p in parts], axis=0)
        frozen = np.concatenate([p[2] for p in parts], axis=0)
    _, truth = benchmark_spec(scenario.noise_std)
    return _aggregate(nwd_ck, final_bc, frozen, truth)


def _calibration_curve(algorithm, scenario, calibration_runs, n_iters=None):
    """Mean checkpointed fitness over the calibration ensemble (inf if all diverge)."""
    cal = replace(scenario, n_runs=calibration_runs)
    nwd_ck, _, frozen = _simulate(
        algorithm, cal, range(calibration_runs), domain=_DOMAIN_CALIBRATION, n_iters=n_iters
    )
    alive = ~frozen
    if not alive.any():
        return np.full(nwd_ck.shape[1], math.inf)
    return nwd_ck[alive].mean(axis=0)


def calibrate_mu1(
    scenario: ScenarioConfig,
    target_checkpoint: int = 0,
    tolerance: float = 0.05,
    calibration_runs: int = 200,
    on_no_match: str = "raise",
) -> float:
    """Step size at which the momentum-fractional filter matches the paired LMS.

    The paired LMS is run on a reduced ensemble and its mean fitness at
    ``checkpoints[target_checkpoint]`` becomes the target; bisection
    over ``mu1`` in ``[1e-4, 0.5]`` then matches the candidate's mean
    fitness at the same checkpoint to within ``tolerance`` (relative).

    Two regimes of the reference trajectory need different roots of the
    match equation:

    * still converging at the checkpoint (its value sits well above its
      final floor): equal convergence means matching the transient, so
      the bisection solves the descending branch of the fitness-vs-mu1
      curve;
    * already at steady state: the match equation degenerates (a whole
      interval of step sizes matches), so the search resolves the
      ascending branch near the upper edge of the tolerance band: the
      fastest-converging configuration consistent with the match.

    ``on_no_match`` selects the failure behaviour: ``"raise"`` (default)
    raises :class:`CalibrationError`, ``"closest"`` returns the bracket
    point whose fitness comes closest to the target.
    """
    if not tolerance > 0:
        raise ValueError("tolerance must be positive (a zero-width match is unreachable)")
    if calibration_runs < 1:
        raise ValueError("calibration_runs must be positive")
    if on_no_match not in ("raise", "closest"):
        raise ValueError("on_no_match must be 'raise' or 'closest'")
    checkpoints = scenario.checkpoints
    if not 0 <= target_checkpoint < len(checkpoints):
        raise ValueError("target_checkpoint out of range")
    probe_iters = int(checkpoints[target_checkpoint])

    reference = lms_params(scenario.lms_eta)
    ref_curve = _calibration_curve(reference, scenario, calibration_runs)
    target = float(ref_curve[target_checkpoint])
    ref_floor = float(ref_curve[-1])
    if not math.isfinite(target):
        raise CalibrationError("the reference LMS ensemble diverged")

    def h(mu1: float) -> float:
        algorithm = mflms_params(mu1, scenario.alpha, scenario.f, scenario.mflms_muf)
        curve = _calibration_curve(algorithm, scenario, calibration_runs, n_iters=probe_iters)
        return float(curve[target_checkpoint])

    lo, hi = _MU_BRACKET
    grid = [lo]
    while grid[-1] < hi:
        grid.append(min(grid[-1] * 2, hi))
    values = [h(mu) for mu in grid]

    transient = target > _CONVERGED_RATIO * ref_floor
    if transient:
        # Descending branch: first crossing of the target from above.
        bracket = next(
            (i for i in range(1, len(grid)) if values[i - 1] > target >= values[i]),
            None,
        )
        level = target
        descending = True
    else:
        # Ascending branch: last crossing of the upper part of the band
        # (strictly inside it so bisection jitter cannot leave the band).
        level = target * (1 + 0.8 * tolerance)
        crossings = [
            i for i in range(1, len(grid)) if values[i - 1] <= level < values[i]
        ]
        bracket = crossings[-1] if crossings else None
        descending = False

    if bracket is None:
        finite = [(mu, v) for mu, v in zip(grid, values) if math.isfinite(v)]
        best_mu, best_v = min(finite, key=lambda t: abs(t[1] - target), default=(None, math.inf))
        if best_mu is not None and abs(best_v - target) <= tolerance * target:
            return best_mu
        if on_no_match == "closest" and best_mu is not None:
            log.warning(
                "no mu1 in [%g, %g] matches the reference fitness %.4g within %g%%; "
                "using closest (mu1=%.4g, fitness %.4g)",
                lo, hi, target, 100 * tolerance, best_mu, best_v,
            )
            return best_mu
        raise CalibrationError(
            f"no mu1 in [{lo:g}, {hi:g}] matches the reference fitness {target:.4g} "
            f"within {100 * tolerance:g}%"
        )

    a, b = grid[bracket - 1], grid[bracket]
    h_mid = values[bracket]
    mid = b
    for _ in range(60):
        mid = 0.5 * (a + b)
        h_mid = h(mid)
        # Descending branch: a value above the level means the root lies
        # to the right of mid; ascending branch is the mirror image.
        if (h_mid > level) == descending:
            a = mid
        else:
            b = mid
        if (b - a) <= 1e-4 * b:
            break
    if abs(h_mid - target) > tolerance * target:
        if on_no_match == "closest":
            return mid
        raise CalibrationError(
            f"bisection converged to mu1={mid:.4g} but its fitness {h_mid:.4g} "
            f"misses the reference {target:.4g} by more than {100 * tolerance:g}%"
        )
    return mid


@dataclass(frozen=True)
class GridConfig:
    """Full benchmark grid: the scenario axes plus the run protocol."""

    noise_levels: tuple = NOISE_LEVELS
    noise_scale: str = "variance"
    alphas: tuple = ALPHAS
    fractional_orders: tuple = FRACTIONAL_ORDERS
    lms_etas: tuple = PAIRED_LMS_ETAS
    mflms_mu1: float | None = None
    n_runs: int = 1000
    n_iters: int = 1000
    checkpoint_interval: int = 100
    base_seed: int = DEFAULT_BASE_SEED
    metric_space: MetricSpace = MetricSpace.APHI
    calibration_runs: int = 200
    calibration_tolerance: float = 0.05

    def __post_init__(self):
        if self.noise_scale not in ("variance", "std"):
            raise ValueError("noise_scale must be 'variance' or 'std'")
        if len(self.alphas) != len(self.lms_etas):
            raise ValueError("alphas and lms_etas must pair up one-to-one")
        if not self.noise_levels or not self.alphas or not self.fractional_orders:
            raise ValueError("grid axes must be non-empty")

    def noise_std(self, level: float) -> float:
        """Disturbance standard deviation for a grid noise level."""
        return math.sqrt(level) if self.noise_scale == "variance" else float(level)

    def scenario(self, level: float, alpha: float, f: float, eta: float) -> ScenarioConfig:
        return ScenarioConfig(
            noise_std=self.noise_std(level),
            alpha=alpha,
            f=f,
            lms_eta=eta,
            mflms_mu1=self.mflms_mu1,
            n_runs=self.n_runs,
            n_iters=self.n_iters,
            checkpoint_interval=self.checkpoint_interval,
            base_seed=self.base_seed,
            metric_space=self.metric_space,
        )


@dataclass(frozen=True)
class GridEntry:
    """One table row: scenario, the algorithm actually run, and its aggregate."""

    sigma_label: str
    variant: Variant
    alpha: float
    f: float | None
    step_size: float
    scenario: ScenarioConfig
    aggregate: AggregateResult

    @property
    def label(self) -> str:
        if self.variant is Variant.LMS:
            return f"LMS(eta={self.step_size:g})"
        if self.variant is Variant.MOMENTUM_LMS:
            return f"mLMS(eta={self.step_size:g}) a={self.alpha:g}"
        if self.variant is Variant.FLMS:
            return f"FLMS(f={self.f:.2f})"
        name = {
            Variant.MFLMS_ASSEMBLED: "mFLMS",
            Variant.MFLMS_PUBLISHED16: "mFLMS-published",
            Variant.MFLMS_CORRECTED: "mFLMS-corrected",
        }[self.variant]
        return f"{name}(f={self.f:.2f}) a={self.alpha:g}"


def sigma_label(level: float) -> str:
    return f"{level:.2f}"


def full_grid(config: GridConfig, workers: int = 1) -> list[GridEntry]:
    """Run the complete benchmark grid in table row order.

    For each noise level and each momentum block: the fractional-order
    scenarios first, then the paired LMS row.  Momentum-fractional step
    sizes come from ``config.mflms_mu1`` when set, otherwise from
    :func:`calibrate_mu1` (falling back to the closest achievable match
    rather than aborting the grid).
    """
    tasks = []
    for level in config.noise_levels:
        for alpha, eta in zip(config.alphas, config.lms_etas):
            for f in config.fractional_orders:
                tasks.append(("mflms", level, alpha, eta, f))
            tasks.append(("lms", level, alpha, eta, config.fractional_orders[0]))

    def run_task(task) -> GridEntry:
        kind, level, alpha, eta, f = task
        scenario = config.scenario(level, alpha, f, eta)
        if kind == "lms":
            algorithm = lms_params(eta)
            entry_f = None
            size = eta
        else:
            mu1 = scenario.mflms_mu1
            if mu1 is None:
                mu1 = calibrate_mu1(
                    scenario,
                    tolerance=config.calibration_tolerance,
                    calibration_runs=config.calibration_runs,
                    on_no_match="closest",
                )
            algorithm = mflms_params(mu1, alpha, f, scenario.mflms_muf)
            entry_f = f
            size = mu1
        aggregate = run_monte_carlo(algorithm, scenario)
        log.info(
            "scenario sigma=%s alpha=%g %s step=%.5g: final mean NWD %.4f",
            sigma_label(level), alpha,
            "lms" if kind == "lms" else f"f={f:g}", size,
            aggregate.mean_nwd_at_checkpoints[-1],
        )
        return GridEntry(
            sigma_label=sigma_label(level),
            variant=algorithm.variant,
            alpha=alpha,
            f=entry_f,
            step_size=size,
            scenario=scenario,
            aggregate=aggregate,
        )

    if workers <= 1:
        return [run_task(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_task, tasks))
