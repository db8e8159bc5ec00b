import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gtele import (
    GaussianState,
    PhasePoint,
    ResourceParams,
    Variant,
    added_noise,
    averaged_output,
    conditional_output,
    density_at,
    ensemble_perfect,
    fidelity,
    fidelity_coherent_closed_form,
    is_perfect,
    make,
    measurement_distribution,
    sender_marginal,
    teleport,
)
from gtele.errors import (
    DegenerateInput,
    DimensionMismatch,
    ExactLimitUnsupported,
    ImproperLimitCombination,
    NegativeNoise,
    UndefinedFidelity,
)

from conftest import one_mode_states

STD, CL = Variant.STANDARD, Variant.CLASSICAL


def f_tmss(r):
    return 1 / (1 + math.exp(-2 * r))


def f_mirror(r):
    return 1 / math.sqrt((1 + math.exp(-2 * r)) * (1 + math.exp(2 * r)))


def sample_protocol_numpy(input, params, n, rng, sign=1):
    """Direct sampling of the six coordinates; independent of the library's sampler."""
    a1 = rng.multivariate_normal(input.mean, input.cov, size=n)
    res = rng.multivariate_normal(np.zeros(4), params.covariance(), size=n)
    q1, p1 = a1.T
    q2, p2, q3, p3 = res.T
    beta = np.column_stack([q2 - q1, p2 + sign * p1])
    out = np.column_stack([q3 - beta[:, 0], p3 + sign * beta[:, 1]])
    return beta, out


class TestMeasurement:
    def test_vacuum_resource(self, coherent):
        d = measurement_distribution(coherent, make("tmss", 0))
        np.testing.assert_array_equal(d.mean, [0, 0])
        np.testing.assert_allclose(d.cov, np.eye(2), atol=1e-15)

    def test_against_sampling(self, coherent):
        params = make("tmss", 0.8).params
        beta, _ = sample_protocol_numpy(coherent, params, 400_000, np.random.default_rng(3))
        d = measurement_distribution(coherent, params)
        se = np.sqrt(2 / beta.shape[0]) * np.diag(d.cov)
        assert np.all(np.abs(np.diag(np.cov(beta.T)) - np.diag(d.cov)) < 5 * se)

    def test_mean_linearity(self):
        inp = GaussianState([3, -2], [[0.6, 0.1], [0.1, 0.5]])
        for res in (make("tmss", 1), ResourceParams(1, 2, 0.3, 0.4)):
            np.testing.assert_array_equal(measurement_distribution(inp, res).mean, [-3, -2])
        np.testing.assert_array_equal(measurement_distribution(inp, make("tmss", 1), CL).mean, [-3, 2])

    @settings(max_examples=5, deadline=None)
    @given(one_mode_states())
    def test_normalized(self, s):
        from scipy import integrate

        d = measurement_distribution(s, make("tmss", 0.5))
        sd = np.sqrt(np.diag(d.cov))
        lo, hi = d.mean - 8 * sd, d.mean + 8 * sd
        val, _ = integrate.dblquad(lambda p, q: density_at(d, [q, p]), lo[0], hi[0], lo[1], hi[1], epsabs=1e-12)
        assert val == pytest.approx(1.0, abs=1e-6)

    def test_errors(self, coherent):
        for kind in ("epr", "mirror"):
            with pytest.raises(ExactLimitUnsupported):
                measurement_distribution(coherent, make(kind))
        with pytest.raises(DegenerateInput):
            measurement_distribution(GaussianState([0, 0], [[0, 0], [0, 1]]), make("tmss", 1))


class TestConditional:
    @pytest.mark.parametrize("beta", [(0, 0), (1.5, -3), (-40, 7)])
    def test_epr_returns_input(self, beta):
        inp = GaussianState([0.3, -1], [[0.7, 0.2], [0.2, 0.9]])
        assert conditional_output(inp, make("epr"), beta) == inp
        assert conditional_output(inp, make("mirror"), beta, CL) == inp

    def test_improper_combinations(self, coherent):
        with pytest.raises(ImproperLimitCombination):
            conditional_output(coherent, make("epr"), (0, 0), CL)
        with pytest.raises(ImproperLimitCombination):
            conditional_output(coherent, make("mirror"), (0, 0), STD)

    def test_point_gives_delta_at_record(self, coherent):
        out = conditional_output(coherent, make("point"), (1.5, -0.5))
        np.testing.assert_array_equal(out.mean, [-1.5, -0.5])
        np.testing.assert_array_equal(out.cov, np.zeros((2, 2)))
        out = conditional_output(coherent, make("point"), (1.5, -0.5), CL)
        np.testing.assert_array_equal(out.mean, [-1.5, 0.5])

    def test_null_params_match_point_limit(self, coherent):
        a = conditional_output(coherent, ResourceParams(0, 0, 0, 0), (1.0, 2.0))
        b = conditional_output(coherent, make("point"), (1.0, 2.0))
        np.testing.assert_allclose(a.mean, b.mean, atol=1e-14)
        np.testing.assert_allclose(a.cov, b.cov, atol=1e-14)

    def test_against_rejection_sampling(self, coherent):
        params = make("tmss", 1).params
        beta, out = sample_protocol_numpy(coherent, params, 3_000_000, np.random.default_rng(11))
        keep = np.all(np.abs(beta) <= 0.05, axis=1)
        kept = out[keep]
        cond = conditional_output(coherent, params, (0, 0))
        n = kept.shape[0]
        assert n > 1000
        se_mean = kept.std(axis=0) / math.sqrt(n)
        assert np.all(np.abs(kept.mean(axis=0) - cond.mean) < 5 * se_mean)
        emp_var = kept.var(axis=0)
        assert np.all(np.abs(emp_var - np.diag(cond.cov)) < 5 * emp_var * math.sqrt(2 / n))

    @given(one_mode_states(), st.floats(-5, 5), st.floats(-5, 5))
    def test_cov_independent_of_beta(self, s, bq, bp):
        res = make("tmss", 0.6)
        a = conditional_output(s, res, (0.0, 0.0))
        b = conditional_output(s, res, (bq, bp))
        np.testing.assert_array_equal(a.cov, b.cov)

    def test_averages_to_averaged_output(self):
        inp = GaussianState([0.4, -0.3], [[0.6, 0.15], [0.15, 0.8]])
        for res, var in ((make("tmss", 0.7), STD), (ResourceParams(1.0, 1.5, 0.4, 0.9), STD),
                         (ResourceParams(1.0, 1.5, 0.4, 0.9), CL)):
            pb = measurement_distribution(inp, res, var)
            sd = np.sqrt(np.diag(pb.cov))
            qs = np.linspace(pb.mean[0] - 8 * sd[0], pb.mean[0] + 8 * sd[0], 81)
            ps = np.linspace(pb.mean[1] - 8 * sd[1], pb.mean[1] + 8 * sd[1], 81)
            w = np.array([[density_at(pb, [q, p]) for p in ps] for q in qs])
            w *= (qs[1] - qs[0]) * (ps[1] - ps[0])
            cond_cov = conditional_output(inp, res, (0, 0), var).cov
            mean = np.zeros(2)
            second = np.zeros((2, 2))
            for i, q in enumerate(qs):
                for j, p in enumerate(ps):
                    m = conditional_output(inp, res, (q, p), var).mean
                    mean += w[i, j] * m
                    second += w[i, j] * np.outer(m, m)
            mix_cov = cond_cov + second - np.outer(mean, mean)
            avg = averaged_output(inp, res, var)
            np.testing.assert_allclose(mean, avg.mean, atol=1e-4)
            np.testing.assert_allclose(mix_cov, avg.cov, atol=1e-4)


class TestAveraged:
    def test_epr_identity(self):
        inp = GaussianState([1, 2], [[0.9, -0.1], [-0.1, 0.4]])
        assert averaged_output(inp, make("epr")) == inp

    def test_vacuum_resource(self, coherent):
        np.testing.assert_allclose(averaged_output(coherent, make("tmss", 0)).cov, 1.5 * np.eye(2), atol=1e-15)

    @pytest.mark.parametrize("r", [1, 2, 4, 6])
    def test_large_squeezing(self, coherent, r):
        out = averaged_output(coherent, make("tmss", r))
        noise = np.diag(out.cov) - 0.5
        # Cancellation in a + b - 2c leaves an absolute error of a few ulps of cosh(2r).
        np.testing.assert_allclose(noise, math.exp(-2 * r), rtol=0, atol=8 * np.finfo(float).eps * math.cosh(2 * r))

    def test_noise_formulas(self):
        p = ResourceParams(1.3, 0.8, 0.4, -0.6)
        s = p.a + p.b
        assert added_noise(p, STD) == pytest.approx((s - 2 * p.c1, s + 2 * p.c2), abs=1e-15)
        assert added_noise(p, CL) == pytest.approx((s - 2 * p.c1, s - 2 * p.c2), abs=1e-15)

    @given(one_mode_states())
    def test_invariants(self, s):
        p = ResourceParams(1.3, 0.8, 0.4, -0.6)
        for var in (STD, CL):
            out = averaged_output(s, p, var)
            np.testing.assert_array_equal(out.mean, s.mean)
            np.testing.assert_array_equal(out.cov, s.cov + np.diag(added_noise(p, var)))

    def test_negative_noise(self, coherent):
        with pytest.raises(NegativeNoise):
            averaged_output(coherent, ResourceParams(1, 1, 1.5, 0))

    def test_mirror_limit_standard_diverges(self, coherent):
        with pytest.raises(ImproperLimitCombination):
            averaged_output(coherent, make("mirror"), STD)
        noise_p = [added_noise(make("mirror-tmss", r))[1] for r in (1, 2, 3)]
        np.testing.assert_allclose(noise_p, [math.exp(2 * r) for r in (1, 2, 3)], rtol=1e-12)

    def test_one_mode_only(self):
        with pytest.raises(DimensionMismatch):
            averaged_output(GaussianState(np.zeros(4), np.eye(4)), make("epr"))


class TestSenderMarginal:
    @pytest.mark.parametrize("beta", [(0, 0), (5, -7)])
    def test_uniform(self, beta):
        assert sender_marginal(make("tmss", 1), beta).value == 1 / (2 * math.pi)

    def test_classical_variant(self):
        assert sender_marginal(make("mirror"), (1, 1), CL).value == 1 / (2 * math.pi)

    @given(
        st.sampled_from(["tmss", "mirror-tmss", "epr", "mirror", "point"]),
        st.floats(0, 3),
        st.floats(-1e6, 1e6),
        st.floats(-1e6, 1e6),
        st.sampled_from([STD, CL]),
    )
    def test_constant(self, kind, r, bq, bp, var):
        res = make(kind, r) if kind in ("tmss", "mirror-tmss") else make(kind)
        assert sender_marginal(res, PhasePoint(bq, bp), var).value == 1 / (2 * math.pi)


class TestPerfect:
    def test_examples(self):
        assert is_perfect(make("epr"), STD)
        assert not is_perfect(make("mirror"), STD)
        assert is_perfect(make("mirror"), CL)
        assert not is_perfect(make("epr"), CL)
        assert not is_perfect(make("point"), STD)
        assert ensemble_perfect(make("point"), STD)
        assert not is_perfect(ResourceParams(0, 0, 0, 0))
        assert ensemble_perfect(ResourceParams(0, 0, 0, 0))
        assert not ensemble_perfect(make("tmss", 3))

    def test_zero_noise_finite_resource_is_not_single_shot(self, coherent):
        # q3 = q2 and p3 = -p2 exactly, but beta still carries information on the input.
        p = ResourceParams(1.0, 1.0, 1.0, -1.0)
        assert ensemble_perfect(p)
        assert averaged_output(coherent, p) == coherent
        assert conditional_output(coherent, p, (0.5, 0.5)) != coherent
        assert not is_perfect(p)

    @pytest.mark.parametrize(
        "res,var",
        [
            (make("epr"), STD),
            (make("mirror"), CL),
            (make("point"), STD),
            (ResourceParams(0, 0, 0, 0), CL),
            (make("tmss", 1), STD),
            (ResourceParams(2, 2, 2, 2), CL),
        ],
    )
    def test_ensemble_perfect_iff_output_equals_input(self, res, var):
        rng = np.random.default_rng(5)
        for _ in range(20):
            a = rng.normal(size=(2, 2))
            inp = GaussianState(rng.normal(size=2), a @ a.T + 0.1 * np.eye(2))
            assert (averaged_output(inp, res, var) == inp) == ensemble_perfect(res, var)


class TestFidelity:
    def test_self(self, coherent):
        assert fidelity(coherent, coherent) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("r", [0, 0.25, 1, 2, 3])
    def test_tmss_and_mirror_curves(self, coherent, r):
        assert fidelity(coherent, averaged_output(coherent, make("tmss", r))) == pytest.approx(f_tmss(r), abs=1e-12)
        assert fidelity(coherent, averaged_output(coherent, make("mirror-tmss", r))) == pytest.approx(
            f_mirror(r), abs=1e-12
        )

    def test_closed_form_examples(self):
        assert fidelity_coherent_closed_form(make("tmss", 0)) == 0.5
        assert fidelity_coherent_closed_form(make("tmss", 1)) == pytest.approx(0.8807970779778823, abs=1e-12)
        assert fidelity_coherent_closed_form(make("mirror-tmss", 1)) == pytest.approx(0.3240271368319427, abs=1e-12)

    def test_closed_form_undefined(self):
        with pytest.raises(UndefinedFidelity):
            fidelity_coherent_closed_form(ResourceParams(1, 1, 2, 0))

    def test_closed_form_matches_pipeline(self, coherent):
        rng = np.random.default_rng(2024)
        checked = 0
        while checked < 1000:
            a, b = rng.uniform(0, 3, size=2)
            c1, c2 = rng.uniform(-3, 3, size=2)
            p = ResourceParams(a, b, c1, c2)
            nq, np_ = added_noise(p)
            if nq <= 0 or np_ <= 0:
                continue
            pipe = fidelity(coherent, averaged_output(coherent, p))
            assert abs(pipe - fidelity_coherent_closed_form(p)) <= 1e-12
            checked += 1

    def test_monotone_families(self):
        rs = np.linspace(0, 3, 61)
        up = [fidelity_coherent_closed_form(make("tmss", r)) for r in rs]
        down = [fidelity_coherent_closed_form(make("mirror-tmss", r)) for r in rs]
        assert np.all(np.diff(up) > 0)
        assert np.all(np.diff(down) < 0)


def test_teleport_bundle(coherent):
    out = teleport(coherent, make("tmss", 1), PhasePoint(0.2, -0.1))
    assert out.fidelity == pytest.approx(f_tmss(1), abs=1e-12)
    assert out.noise_q == pytest.approx(math.exp(-2), abs=1e-12)
    assert out.averaged_output.cov[0, 0] == pytest.approx(0.5 + out.noise_q, abs=1e-15)
    assert out.variant is STD and STD.physically_measurable and not CL.physically_measurable
