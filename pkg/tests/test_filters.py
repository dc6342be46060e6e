"""Filter step tests: hand-derived examples, reduction identities, the
published-form discrepancy, and equivalence against a naive oracle.

The naive oracle below re-implements every update rule with plain
Python floats, sequential sums and the standard library's Gamma; it
shares no code with the package.
"""

import math

import numpy as np
import pytest

from lmslab.filters import (
    DivergenceError,
    FilterParams,
    FilterState,
    Variant,
    WEIGHT_LIMIT,
    default_muf,
    diverged_rows,
    flms_step,
    lms_step,
    make_filter,
    mflms_assembled_step,
    mflms_corrected_step,
    mflms_published16_step,
    momentum_lms_step,
    step,
)

# --- naive reference implementation (oracle) ---------------------------


def naive_step(variant, w, w_prev, v, u, d, mu1, muf, f, alpha):
    """Loop-based reference for one update; returns (w', v', e)."""
    w, w_prev, v, u = list(w), list(w_prev), list(v), list(u)
    e = d
    for ui, wi in zip(u, w):
        e -= ui * wi
    coeff = muf / math.gamma(2.0 - f)
    frac = [coeff * e * ui * abs(wi) ** (1.0 - f) for ui, wi in zip(u, w)]
    plain = [mu1 * e * ui for ui in u]
    if variant is Variant.LMS:
        return [wi + gi for wi, gi in zip(w, plain)], v, e
    if variant is Variant.MOMENTUM_LMS:
        v_new = [alpha * vi + gi for vi, gi in zip(v, plain)]
        return [wi + vi for wi, vi in zip(w, v_new)], v_new, e
    if variant is Variant.FLMS:
        return [wi + gi + fi for wi, gi, fi in zip(w, plain, frac)], v, e
    if variant is Variant.MFLMS_ASSEMBLED:
        v_new = [alpha * vi + gi + fi for vi, gi, fi in zip(v, plain, frac)]
        return [wi + vi for wi, vi in zip(w, v_new)], v_new, e
    if variant is Variant.MFLMS_PUBLISHED16:
        return [
            wi + alpha * (wi - wpi) + mu1 * e * ui * abs(wi) ** (1.0 - f)
            for wi, wpi, ui in zip(w, w_prev, u)
        ], v, e
    if variant is Variant.MFLMS_CORRECTED:
        return [
            wi + alpha * (wi - wpi) + mu1 * e * (ui + ui * abs(wi) ** (1.0 - f))
            for wi, wpi, ui in zip(w, w_prev, u)
        ], v, e
    raise AssertionError(variant)


def state_of(w, w_prev=None, v=None):
    w = np.asarray(w, dtype=float)
    return FilterState(
        w=w.copy(),
        w_prev=w.copy() if w_prev is None else np.asarray(w_prev, dtype=float),
        v=np.zeros_like(w) if v is None else np.asarray(v, dtype=float),
    )


def params_of(variant, mu1=0.1, muf=0.0, f=0.5, alpha=0.0):
    return FilterParams(mu1=mu1, muf=muf, f=f, alpha=alpha, variant=variant)


def random_case(rng, variant):
    m = int(rng.integers(1, 9))
    mu1 = float(rng.uniform(0.01, 0.4))
    f = float(rng.uniform(0.05, 0.95))
    if variant is Variant.LMS:
        muf, alpha = 0.0, 0.0
    elif variant is Variant.MOMENTUM_LMS:
        muf, alpha = 0.0, float(rng.uniform(0, 0.95))
    elif variant is Variant.FLMS:
        muf, alpha = float(rng.uniform(0, 0.3)), 0.0
    else:
        muf, alpha = float(rng.uniform(0, 0.3)), float(rng.uniform(0, 0.95))
    params = FilterParams(mu1=mu1, muf=muf, f=f, alpha=alpha, variant=variant)
    state = state_of(rng.normal(0, 2, m), rng.normal(0, 2, m), rng.normal(0, 1, m))
    u = rng.normal(0, 1.5, m)
    d = float(rng.normal(0, 2))
    return state, u, d, params


class TestParamsValidation:
    def test_ranges(self):
        with pytest.raises(ValueError):
            params_of(Variant.LMS, mu1=0.0)
        with pytest.raises(ValueError):
            params_of(Variant.FLMS, muf=-0.1)
        with pytest.raises(ValueError):
            params_of(Variant.FLMS, f=0.0)
        with pytest.raises(ValueError):
            params_of(Variant.FLMS, f=1.0)
        with pytest.raises(ValueError):
            params_of(Variant.MFLMS_ASSEMBLED, alpha=1.0)
        with pytest.raises(ValueError):
            params_of(Variant.MFLMS_ASSEMBLED, alpha=-0.2)

    def test_variant_constraints(self):
        with pytest.raises(ValueError):
            params_of(Variant.LMS, muf=0.1)
        with pytest.raises(ValueError):
            params_of(Variant.LMS, alpha=0.1)
        with pytest.raises(ValueError):
            params_of(Variant.MOMENTUM_LMS, muf=0.1)
        with pytest.raises(ValueError):
            params_of(Variant.FLMS, alpha=0.1)


class TestMakeFilter:
    def test_cold_start(self):
        state, params = make_filter(Variant.LMS, 0.1, 0.0, 0.5, 0.0, 8, np.zeros(8))
        assert state.n == 0
        np.testing.assert_array_equal(state.w, np.zeros(8))
        np.testing.assert_array_equal(state.w_prev, np.zeros(8))
        np.testing.assert_array_equal(state.v, np.zeros(8))

    def test_gaussian_init_accepted(self):
        rng = np.random.default_rng(0)
        w0 = rng.standard_normal(8)
        state, params = make_filter(
            Variant.MFLMS_ASSEMBLED, 0.027, 0.027 * math.gamma(1.75), 0.25, 0.2, 8, w0
        )
        np.testing.assert_array_equal(state.w, w0)
        assert params.muf == pytest.approx(default_muf(0.027, 0.25), rel=1e-12)

    def test_default_muf(self):
        _, params = make_filter(Variant.MFLMS_ASSEMBLED, 0.1, None, 0.25, 0.2, 4, np.zeros(4))
        assert params.muf == pytest.approx(0.1 * math.gamma(1.75), rel=1e-12)
        _, params = make_filter(Variant.LMS, 0.1, None, 0.5, 0.0, 4, np.zeros(4))
        assert params.muf == 0.0

    def test_boundary_rejection(self):
        with pytest.raises(ValueError):
            make_filter(Variant.MFLMS_ASSEMBLED, 0.1, None, 0.5, 1.0, 4, np.zeros(4))
        with pytest.raises(ValueError):
            make_filter(Variant.LMS, 0.1, 0.0, 0.5, 0.0, 4, np.zeros(3))


class TestHandDerivedExamples:
    def test_lms_one_step(self):
        state = state_of([0.0, 0.0])
        new, rec = lms_step(state, [1.0, 0.0], 1.0, params_of(Variant.LMS, mu1=0.5))
        assert rec.error == 1.0
        np.testing.assert_array_equal(new.w, [0.5, 0.0])
        np.testing.assert_array_equal(new.w_prev, [0.0, 0.0])
        assert new.n == 1

    def test_no_noise_fixed_point_all_variants(self):
        rng = np.random.default_rng(21)
        theta = rng.normal(0, 1, 6)
        u = rng.normal(0, 1, 6)
        d = float((u * theta).sum())
        for variant in Variant:
            state = state_of(theta, theta, np.zeros(6))
            params = random_case(rng, variant)[3]
            new, rec = step(state, u, d, params)
            assert rec.error == 0.0
            np.testing.assert_array_equal(new.w, theta)

    def test_zero_regressor(self):
        state = state_of([1.0])
        new, rec = lms_step(state, [0.0], 7.0, params_of(Variant.LMS))
        assert rec.error == 7.0
        np.testing.assert_array_equal(new.w, [1.0])

    def test_flms_hand_value(self):
        # fractional coefficient collapses to mu1, |1|**0.5 = 1:
        # w' = 1 + 0.1 + 0.1 = 1.2
        params = params_of(Variant.FLMS, mu1=0.1, muf=0.1 * math.gamma(1.5), f=0.5)
        new, rec = flms_step(state_of([1.0]), [1.0], 2.0, params)
        assert rec.error == 1.0
        assert new.w[0] == pytest.approx(1.2, abs=1e-15)

    def test_flms_zero_weights_equal_lms(self):
        params_f = params_of(Variant.FLMS, mu1=0.2, muf=0.15, f=0.3)
        params_l = params_of(Variant.LMS, mu1=0.2)
        u, d = np.array([0.7, -1.1]), 0.9
        new_f, _ = flms_step(state_of([0.0, 0.0]), u, d, params_f)
        new_l, _ = lms_step(state_of([0.0, 0.0]), u, d, params_l)
        np.testing.assert_array_equal(new_f.w, new_l.w)

    def test_momentum_coasting(self):
        # After a step with a gradient, a zero-error step still moves the
        # weights by alpha * v.
        params = params_of(Variant.MOMENTUM_LMS, mu1=0.1, alpha=0.5)
        s1, _ = momentum_lms_step(state_of([0.0]), [1.0], 1.0, params)
        v1 = s1.v.copy()
        assert v1[0] != 0.0
        s2, rec = momentum_lms_step(s1, [0.0], 0.0, params)
        assert rec.error == 0.0
        np.testing.assert_array_equal(s2.w, s1.w + 0.5 * v1)

    def test_assembled_cold_start_equals_lms(self):
        params_m = params_of(Variant.MFLMS_ASSEMBLED, mu1=0.1, muf=0.2, f=0.4, alpha=0.6)
        params_l = params_of(Variant.LMS, mu1=0.1)
        u, d = np.array([1.3, -0.2]), 0.5
        new_m, _ = mflms_assembled_step(state_of([0.0, 0.0]), u, d, params_m)
        new_l, _ = lms_step(state_of([0.0, 0.0]), u, d, params_l)
        np.testing.assert_array_equal(new_m.w, new_l.w)

    def test_published16_hand_value(self):
        params = params_of(Variant.MFLMS_PUBLISHED16, mu1=0.1, f=0.5, alpha=0.0)
        new, rec = mflms_published16_step(state_of([1.0]), [1.0], 2.0, params)
        assert rec.error == 1.0
        assert new.w[0] == pytest.approx(1.1, abs=1e-15)

    def test_published16_origin_fixed_point(self):
        params = params_of(Variant.MFLMS_PUBLISHED16, mu1=0.3, f=0.25, alpha=0.7)
        new, _ = mflms_published16_step(state_of([0.0, 0.0]), [1.0, 2.0], 5.0, params)
        np.testing.assert_array_equal(new.w, [0.0, 0.0])

    def test_corrected_escapes_origin(self):
        params = params_of(Variant.MFLMS_CORRECTED, mu1=0.3, f=0.25, alpha=0.7)
        u, d = np.array([1.0, 2.0]), 5.0
        new, rec = mflms_corrected_step(state_of([0.0, 0.0]), u, d, params)
        np.testing.assert_array_equal(new.w, 0.3 * rec.error * u)

    def test_corrected_hand_value(self):
        params = params_of(Variant.MFLMS_CORRECTED, mu1=0.1, f=0.5, alpha=0.2)
        new, rec = mflms_corrected_step(state_of([1.0], w_prev=[0.5]), [1.0], 2.0, params)
        assert rec.error == 1.0
        assert new.w[0] == pytest.approx(1.3, abs=1e-15)

    def test_corrected_zero_weights_reduce_to_lms(self):
        params_c = params_of(Variant.MFLMS_CORRECTED, mu1=0.25, f=0.6, alpha=0.0)
        params_l = params_of(Variant.LMS, mu1=0.25)
        u, d = np.array([0.4, 1.7, -2.0]), -0.8
        new_c, _ = mflms_corrected_step(state_of([0.0] * 3), u, d, params_c)
        new_l, _ = lms_step(state_of([0.0] * 3), u, d, params_l)
        np.testing.assert_array_equal(new_c.w, new_l.w)


class TestReductionChain:
    """Bit-level reduction identities on shared random inputs."""

    N_DRAWS = 1000

    def _pairs(self, variant_a, kwargs_a, variant_b, kwargs_b):
        rng = np.random.default_rng(99)
        for _ in range(self.N_DRAWS):
            m = int(rng.integers(1, 9))
            w = rng.normal(0, 2, m)
            v = rng.normal(0, 1, m)
            u = rng.normal(0, 1.5, m)
            d = float(rng.normal(0, 2))
            mu1 = float(rng.uniform(0.01, 0.4))
            f = float(rng.uniform(0.05, 0.95))
            muf = float(rng.uniform(0.0, 0.3))
            pa = FilterParams(mu1=mu1, variant=variant_a, f=f,
                              **{**dict(muf=muf, alpha=0.0), **kwargs_a})
            pb = FilterParams(mu1=mu1, variant=variant_b, f=f,
                              **{**dict(muf=muf, alpha=0.0), **kwargs_b})
            sa = state_of(w, w, v)
            sb = state_of(w, w, v)
            na, ra = step(sa, u, d, pa)
            nb, rb = step(sb, u, d, pb)
            assert ra.error == rb.error
            np.testing.assert_array_equal(na.w, nb.w)

    def test_assembled_alpha0_is_flms(self):
        self._pairs(Variant.MFLMS_ASSEMBLED, dict(alpha=0.0), Variant.FLMS, {})

    def test_flms_muf0_is_lms(self):
        self._pairs(Variant.FLMS, dict(muf=0.0), Variant.LMS, dict(muf=0.0))

    def test_assembled_muf0_is_momentum(self):
        rng = np.random.default_rng(123)
        alpha = float(rng.uniform(0, 0.95))
        self._pairs(
            Variant.MFLMS_ASSEMBLED, dict(muf=0.0, alpha=alpha),
            Variant.MOMENTUM_LMS, dict(muf=0.0, alpha=alpha),
        )

    def test_momentum_alpha0_is_lms(self):
        self._pairs(Variant.MOMENTUM_LMS, dict(muf=0.0), Variant.LMS, dict(muf=0.0))

    def test_assembled_muf0_alpha0_is_lms(self):
        self._pairs(
            Variant.MFLMS_ASSEMBLED, dict(muf=0.0, alpha=0.0),
            Variant.LMS, dict(muf=0.0),
        )


class TestDiscrepancyIdentity:
    def test_corrected_minus_published_is_plain_gradient(self):
        # With mu_f = mu1*Gamma(2-f) the two collapsed forms differ by
        # exactly mu1*e*u.
        rng = np.random.default_rng(42)
        for _ in range(1000):
            m = int(rng.integers(1, 9))
            w = rng.normal(0, 1.5, m)
            w_prev = rng.normal(0, 1.5, m)
            u = rng.normal(0, 1.5, m)
            d = float(rng.normal(0, 2))
            mu1 = float(rng.uniform(0.01, 0.4))
            f = float(rng.uniform(0.05, 0.95))
            alpha = float(rng.uniform(0, 0.95))
            muf = default_muf(mu1, f)
            pc = FilterParams(mu1=mu1, muf=muf, f=f, alpha=alpha,
                              variant=Variant.MFLMS_CORRECTED)
            pp = FilterParams(mu1=mu1, muf=muf, f=f, alpha=alpha,
                              variant=Variant.MFLMS_PUBLISHED16)
            nc, rc = mflms_corrected_step(state_of(w, w_prev), u, d, pc)
            np_, rp = mflms_published16_step(state_of(w, w_prev), u, d, pp)
            expected = mu1 * rc.error * u
            diff = nc.w - np_.w
            # The residual is rounding at the weight scale, so measure
            # relative to the larger of the update and the weights.
            scale = max(np.linalg.norm(expected), np.linalg.norm(w))
            assert np.linalg.norm(diff - expected) <= 1e-14 * scale


class TestErrorDefinition:
    def test_error_is_pre_update_residual(self):
        rng = np.random.default_rng(31)
        for variant in Variant:
            state, u, d, params = random_case(rng, variant)
            w_before = state.w.copy()
            _, rec = step(state, u, d, params)
            assert rec.error == float(d - (u * w_before).sum())


class TestStepOracle:
    def test_all_variants_match_naive_oracle(self):
        rng = np.random.default_rng(77)
        variants = list(Variant)
        for i in range(1000):
            variant = variants[i % len(variants)]
            state, u, d, params = random_case(rng, variant)
            w_exp, v_exp, e_exp = naive_step(
                variant, state.w, state.w_prev, state.v, u, d,
                params.mu1, params.muf, params.f, params.alpha,
            )
            new, rec = step(state, u, d, params)
            assert rec.error == pytest.approx(e_exp, rel=1e-12, abs=1e-12)
            np.testing.assert_allclose(new.w, w_exp, rtol=1e-12, atol=1e-12)
            np.testing.assert_allclose(new.v, v_exp, rtol=1e-12, atol=1e-12)


class TestStepRecord:
    def test_gradient_norm_is_applied_update_norm(self):
        rng = np.random.default_rng(13)
        for variant in Variant:
            state, u, d, params = random_case(rng, variant)
            w_before = state.w.copy()
            new, rec = step(state, u, d, params)
            assert rec.gradient_norm == pytest.approx(
                np.sqrt(((new.w - w_before) ** 2).sum()), rel=1e-15
            )


class TestGuardsAndErrors:
    def test_divergence_guard_raises_unbatched(self):
        params = params_of(Variant.LMS, mu1=1.0)
        state = state_of([WEIGHT_LIMIT * 0.999])
        with pytest.raises(DivergenceError):
            lms_step(state, [1.0], 3.0 * WEIGHT_LIMIT, params)

    def test_divergence_mask_batched(self):
        params = params_of(Variant.LMS, mu1=1.0)
        w = np.array([[WEIGHT_LIMIT * 0.999], [0.0]])
        state = FilterState(w=w, w_prev=w.copy(), v=np.zeros_like(w))
        new, _ = lms_step(state, np.array([1.0]), np.array([3.0 * WEIGHT_LIMIT, 0.5]), params)
        mask = diverged_rows(new.w)
        assert mask.tolist() == [True, False]

    def test_dimension_mismatch(self):
        params = params_of(Variant.LMS)
        with pytest.raises(ValueError):
            lms_step(state_of([0.0, 0.0]), [1.0], 1.0, params)

    def test_variant_dispatch_guard(self):
        with pytest.raises(ValueError):
            lms_step(state_of([0.0]), [1.0], 1.0, params_of(Variant.FLMS))

    def test_state_shape_validation(self):
        with pytest.raises(ValueError):
            FilterState(w=np.zeros(3), w_prev=np.zeros(2), v=np.zeros(3))
