"""One-step update rules for the LMS family of adaptive filters.

Six variants share a common state layout:

* ``LMS`` -- plain stochastic gradient: ``w' = w + mu1*e*u``.
* ``MOMENTUM_LMS`` -- the LMS gradient accumulated through a velocity
  term ``v' = alpha*v + g``, ``w' = w + v'``.
* ``FLMS`` -- LMS plus a fractional-magnitude term:
  ``w' = w + mu1*e*u + (muf/Gamma(2-f))*e*(u * |w|**(1-f))``.
* ``MFLMS_ASSEMBLED`` -- the FLMS gradient driven through the velocity
  accumulator; this is the canonical momentum-fractional variant used by
  the benchmark experiments.
* ``MFLMS_PUBLISHED16`` -- a collapsed single-recursion form,
  ``w' = w + alpha*(w - w_prev) + mu1*e*(u * |w|**(1-f))``, which drops
  the plain gradient term.  From a zero start it can never leave the
  origin; it exists so that defect is mechanised and testable.
* ``MFLMS_CORRECTED`` -- the collapsed form with the missing term
  restored: ``w' = w + alpha*(w - w_prev) + mu1*e*(u + u * |w|**(1-f))``.

Filters know nothing about the signal model: the caller supplies the
regressor/desired pair for each step.  Step functions are pure state
transitions; ``w``, ``w_prev`` and ``v`` may carry leading batch
dimensions (with ``d`` batched to match), in which case each row
advances independently and the divergence guard is the caller's job via
:func:`diverged_rows`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .kernels import abs_pow, gamma

__all__ = [
    "Variant",
    "FilterParams",
    "FilterState",
    "StepRecord",
    "DivergenceError",
    "WEIGHT_LIMIT",
    "default_muf",
    "make_filter",
    "step",
    "lms_step",
    "momentum_lms_step",
    "flms_step",
    "mflms_assembled_step",
    "mflms_published16_step",
    "mflms_corrected_step",
    "diverged_rows",
]

# A run whose weight magnitude crosses this bound is declared diverged;
# the experiment engine records the event instead of propagating
# overflow toward infinity.
WEIGHT_LIMIT = 1e6


class DivergenceError(RuntimeError):
    """A weight magnitude crossed :data:`WEIGHT_LIMIT` during a step."""


class Variant(enum.Enum):
    LMS = "lms"
    MOMENTUM_LMS = "momentum_lms"
    FLMS = "flms"
    MFLMS_ASSEMBLED = "mflms"
    MFLMS_PUBLISHED16 = "mflms_published16"
    MFLMS_CORRECTED = "mflms_corrected"


def default_muf(mu1: float, f: float) -> float:
    """Conventional fractional step size ``muf = mu1 * Gamma(2 - f)``.

    With this choice the fractional term's coefficient
    ``muf / Gamma(2 - f)`` collapses to ``mu1``, which makes the three
    momentum-fractional variants directly comparable.
    """
    return mu1 * gamma(2.0 - f)


@dataclass(frozen=True)
class FilterParams:
    """Step sizes, fractional order, momentum coefficient and variant.

    Parameters
    ----------
    mu1: float
        Base step size, ``> 0``.  For plain LMS this is the learning
        rate usually written ``eta``.
    muf: float
        Fractional-term step size, ``>= 0``.
    f: float
        Fractional order, strictly inside ``(0, 1)``.
    alpha: float
        Momentum coefficient in ``[0, 1)``; ``0`` expresses the
        momentum-free degenerate case.
    variant: Variant
        Which update rule :func:`step` dispatches to.
    """

    mu1: float
    muf: float
    f: float
    alpha: float
    variant: Variant

    def __post_init__(self):
        if not self.mu1 > 0:
            raise ValueError("mu1 must be positive")
        if self.muf < 0:
            raise ValueError("muf must be non-negative")
        if not 0.0 < self.f < 1.0:
            raise ValueError("fractional order f must lie strictly in (0, 1)")
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError("alpha must lie in [0, 1)")
        if self.variant is Variant.LMS and (self.muf != 0 or self.alpha != 0):
            raise ValueError("LMS requires muf = 0 and alpha = 0")
        if self.variant is Variant.MOMENTUM_LMS and self.muf != 0:
            raise ValueError("momentum LMS requires muf = 0")
        if self.variant is Variant.FLMS and self.alpha != 0:
            raise ValueError("FLMS requires alpha = 0")


@dataclass
class FilterState:
    """Weights, previous weights, velocity and the iteration counter.

    All three vectors share the trailing length ``M``; ``w_prev`` is
    consumed only by the collapsed-recursion variants and ``v`` only by
    the velocity-driven ones, but every variant carries the full state
    so a single runner serves them all.
    """

    w: np.ndarray
    w_prev: np.ndarray
    v: np.ndarray
    n: int = 0

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=np.float64)
        self.w_prev = np.asarray(self.w_prev, dtype=np.float64)
        self.v = np.asarray(self.v, dtype=np.float64)
        if not (self.w.shape == self.w_prev.shape == self.v.shape):
            raise ValueError("w, w_prev and v must share a shape")
        if self.n < 0:
            raise ValueError("iteration counter must be non-negative")


@dataclass
class StepRecord:
    """Instantaneous error and the norm of the applied weight update."""

    error: float | np.ndarray
    gradient_norm: float | np.ndarray


def make_filter(
    variant: Variant,
    mu1: float,
    muf: float | None,
    f: float,
    alpha: float,
    m: int,
    initial_w,
) -> tuple[FilterState, FilterParams]:
    """Build a validated parameter set and a cold-start state.

    ``initial_w`` is injected by the caller (the benchmark initialises
    weights from standard Gaussian draws); ``muf=None`` selects the
    conventional default :func:`default_muf` for the fractional
    variants and ``0`` otherwise.

    Returns the state (``w = w_prev = initial_w``, zero velocity,
    ``n = 0``) together with the parameters.
    """
    if muf is None:
        if variant in (Variant.FLMS, Variant.MFLMS_ASSEMBLED):
            muf = default_muf(mu1, f)
        else:
            muf = 0.0
    params = FilterParams(mu1=mu1, muf=muf, f=f, alpha=alpha, variant=variant)
    w0 = np.asarray(initial_w, dtype=np.float64)
    if w0.ndim != 1 or len(w0) != m:
        raise ValueError(f"initial_w must be a vector of length {m}")
    if not np.all(np.isfinite(w0)):
        raise ValueError("initial_w must be finite")
    state = FilterState(w=w0.copy(), w_prev=w0.copy(), v=np.zeros(m), n=0)
    return state, params


def diverged_rows(w: np.ndarray) -> np.ndarray:
    """Boolean mask of batch rows whose weight magnitude crossed the guard."""
    return (np.abs(w) > WEIGHT_LIMIT).any(axis=-1)


def _error(state: FilterState, u: np.ndarray, d) -> np.ndarray:
    if u.shape[-1] != state.w.shape[-1]:
        raise ValueError(
            f"regressor length {u.shape[-1]} does not match filter length "
            f"{state.w.shape[-1]}"
        )
    # e = d - u.w, evaluated before any weight change.
    return np.asarray(d - (u * state.w).sum(axis=-1))


def _gradient(state: FilterState, u: np.ndarray, e: np.ndarray, params: FilterParams) -> np.ndarray:
    # Instantaneous update direction shared by the LMS/FLMS family.  The
    # muf == 0 branch keeps the reduction identities exact to the bit.
    g = params.mu1 * e[..., None] * u
    if params.muf != 0.0:
        coeff = params.muf / gamma(2.0 - params.f)
        g = g + coeff * e[..., None] * u * abs_pow(state.w, 1.0 - params.f)
    return g


def _finish(state: FilterState, w_new: np.ndarray, v_new: np.ndarray, e: np.ndarray):
    if w_new.ndim == 1 and np.any(np.abs(w_new) > WEIGHT_LIMIT):
        raise DivergenceError(
            f"weight magnitude exceeded {WEIGHT_LIMIT:g} at iteration {state.n + 1}"
        )
    new_state = FilterState(w=w_new, w_prev=state.w.copy(), v=v_new, n=state.n + 1)
    delta = w_new - state.w
    norm = np.sqrt((delta * delta).sum(axis=-1))
    if e.ndim == 0:
        record = StepRecord(error=float(e), gradient_norm=float(norm))
    else:
        record = StepRecord(error=e, gradient_norm=norm)
    return new_state, record


def _require(params: FilterParams, variant: Variant):
    if params.variant is not variant:
        raise ValueError(f"params.variant is {params.variant}, expected {variant}")


def lms_step(state: FilterState, u, d, params: FilterParams):
    """Plain LMS update ``w' = w + mu1*e*u``."""
    _require(params, Variant.LMS)
    u = np.asarray(u, dtype=np.float64)
    e = _error(state, u, d)
    g = _gradient(state, u, e, params)
    return _finish(state, state.w + g, state.v.copy(), e)


def momentum_lms_step(state: FilterState, u, d, params: FilterParams):
    """LMS driven through the velocity accumulator ``v' = alpha*v + g``."""
    _require(params, Variant.MOMENTUM_LMS)
    u = np.asarray(u, dtype=np.float64)
    e = _error(state, u, d)
    g = _gradient(state, u, e, params)
    v_new = g if params.alpha == 0.0 else params.alpha * state.v + g
    return _finish(state, state.w + v_new, v_new, e)


def flms_step(state: FilterState, u, d, params: FilterParams):
    """Fractional LMS update with the ``|w|**(1-f)`` magnitude term."""
    _require(params, Variant.FLMS)
    u = np.asarray(u, dtype=np.float64)
    e = _error(state, u, d)
    g = _gradient(state, u, e, params)
    return _finish(state, state.w + g, state.v.copy(), e)


def mflms_assembled_step(state: FilterState, u, d, params: FilterParams):
    """Momentum-fractional LMS assembled from its defining recursions.

    ``g = mu1*e*u + (muf/Gamma(2-f))*e*(u * |w|**(1-f))``;
    ``v' = alpha*v + g``; ``w' = w + v'``.
    """
    _require(params, Variant.MFLMS_ASSEMBLED)
    u = np.asarray(u, dtype=np.float64)
    e = _error(state, u, d)
    g = _gradient(state, u, e, params)
    v_new = g if params.alpha == 0.0 else params.alpha * state.v + g
    return _finish(state, state.w + v_new, v_new, e)


def mflms_published16_step(state: FilterState, u, d, params: FilterParams):
    """Collapsed recursion that omits the plain gradient term.

    ``w' = w + alpha*(w - w_prev) + mu1*e*(u * |w|**(1-f))``.  The form
    presumes ``muf = mu1*Gamma(2-f)`` and is kept verbatim, missing
    term and all: started from ``w = w_prev = 0`` it is a fixed point of
    the origin.
    """
    _require(params, Variant.MFLMS_PUBLISHED16)
    u = np.asarray(u, dtype=np.float64)
    e = _error(state, u, d)
    base = state.w + params.alpha * (state.w - state.w_prev)
    w_new = base + params.mu1 * e[..., None] * (u * abs_pow(state.w, 1.0 - params.f))
    return _finish(state, w_new, state.v.copy(), e)


def mflms_corrected_step(state: FilterState, u, d, params: FilterParams):
    """Collapsed recursion with the plain gradient term restored.

    ``w' = w + alpha*(w - w_prev) + mu1*e*(u + u * |w|**(1-f))``.  Its
    difference from :func:`mflms_published16_step` on identical inputs
    is exactly ``mu1*e*u``.
    """
    _require(params, Variant.MFLMS_CORRECTED)
    u = np.asarray(u, dtype=np.float64)
    e = _error(state, u, d)
    base = state.w + params.alpha * (state.w - state.w_prev)
    w_new = base + params.mu1 * e[..., None] * (u + u * abs_pow(state.w, 1.0 - params.f))
    return _finish(state, w_new, state.v.copy(), e)


_DISPATCH = {
    Variant.LMS: lms_step,
    Variant.MOMENTUM_LMS: momentum_lms_step,
    Variant.FLMS: flms_step,
    Variant.MFLMS_ASSEMBLED: mflms_assembled_step,
    Variant.MFLMS_PUBLISHED16: mflms_published16_step,
    Variant.MFLMS_CORRECTED: mflms_corrected_step,
}


def step(state: FilterState, u, d, params: FilterParams):
    """Advance one iteration with the update rule selected by ``params.variant``."""
    return _DISPATCH[params.variant](state, u, d, params)
