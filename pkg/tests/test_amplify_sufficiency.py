"""Amplificadores por estatística suficiente"""

import math

import numpy as np
import pytest
from sklearn.covariance import empirical_covariance

from sample_amplification import divergences
from sample_amplification.amplify_sufficiency import (
    METHODS,
    amplify,
    amplify_exponential,
    amplify_gaussian_cov,
    amplify_gaussian_mean,
    amplify_gaussian_mean_cov,
    amplify_lowrank_cov,
    amplify_poisson_hybrid,
    amplify_poissonized_discrete,
    amplify_uniform,
    bound_for,
)
from sample_amplification.errors import (
    AmplificationImpossibleError,
    DegenerateSupportError,
    DomainError,
    InsufficientSamplesError,
    RequiresEvenNError,
    UnsupportedFamilyError,
    ValidationError,
)
from sample_amplification.families import (
    Dataset,
    FamilyKind,
    FamilySpec,
    ParamPoint,
    default_param,
    sample,
    sufficient_stat,
    suffstat_of_array,
)
from sample_amplification.numerics import RngState, sym_sqrt
from sample_amplification.verify import tv_mc_suffstat

from .conftest import random_psd


def _random_instance(method: str, seed: int):
    """Família, dados e m sorteados para o método (n par e n-1 >= d)"""
    gen = RngState(seed, 7).generator()
    kind = METHODS[method].kind
    d = int(gen.integers(1, 5))
    n = 2 * int(gen.integers(d // 2 + 2, 15))
    m = int(gen.integers(0, 25))
    family = FamilySpec(kind, d)
    if kind in (FamilyKind.GAUSSIAN_MEAN, FamilyKind.GAUSSIAN_MEAN_COV):
        param = ParamPoint(mean=gen.normal(0.0, 3.0, d), cov=random_psd(gen, d) + 0.1 * np.eye(d))
    elif kind == FamilyKind.GAUSSIAN_COV:
        param = ParamPoint(cov=random_psd(gen, d) + 0.1 * np.eye(d))
    elif kind in (FamilyKind.PRODUCT_EXPONENTIAL, FamilyKind.PRODUCT_POISSON):
        param = ParamPoint(rates=gen.uniform(0.5, 5.0, d))
    elif kind == FamilyKind.UNIFORM_RECT:
        lower = gen.normal(0.0, 2.0, d)
        param = ParamPoint(lower=lower, upper=lower + gen.uniform(0.5, 3.0, d))
    else:
        param = ParamPoint(probs=gen.dirichlet(np.ones(d)))
    data = sample(family, param, n, gen)
    return family, param, data, m


EXACT_METHODS = [name for name in METHODS if name != "lowrank_cov"]


class TestSufficiencyExactness:

    @pytest.mark.parametrize("method", EXACT_METHODS)
    def test_target_reproduced_on_random_instances(self, method):
        for seed in range(100):
            _, param, data, m = _random_instance(method, seed)
            out = amplify(method, data, m, RngState(seed, 8), param)
            assert out.n_out == data.n + m
            assert out.check_target(), f"semente {seed}"

    @pytest.mark.parametrize("method", [name for name in EXACT_METHODS if name != "poisson_hybrid"])
    def test_identity_map_keeps_input_statistic(self, method):
        family, param, data, m = _random_instance(method, 3)
        out = amplify(method, data, m, RngState(4), param)
        before = sufficient_stat(family, data)
        after = suffstat_of_array(family, out.samples)
        for key, value in before.values.items():
            np.testing.assert_allclose(after.values[key], value, rtol=1e-8, atol=1e-10)

    def test_permuted_input_gives_same_counts(self, rng):
        family = FamilySpec(FamilyKind.POISSONIZED_DISCRETE, 6)
        data = sample(family, ParamPoint(probs=np.full(6, 1 / 6)), 40, rng)
        shuffled = Dataset(data.samples[::-1], family)
        a = amplify_poissonized_discrete(data, 9, RngState(1))
        b = amplify_poissonized_discrete(shuffled, 9, RngState(1))
        np.testing.assert_array_equal(a.target_stat.values["total"], b.target_stat.values["total"])
        np.testing.assert_array_equal(a.samples, b.samples)


class TestGaussianMean:

    def test_column_means_preserved(self, rng, gaussian_mean):
        family, param = gaussian_mean
        data = sample(family, param, 30, rng)
        out = amplify_gaussian_mean(data, param.cov, 12, RngState(2))
        np.testing.assert_allclose(out.samples.mean(axis=0), data.samples.mean(axis=0), atol=1e-10)

    def test_zero_m_is_conditional_resample(self, rng, gaussian_mean):
        family, param = gaussian_mean
        data = sample(family, param, 10, rng)
        out = amplify_gaussian_mean(data, param.cov, 0, RngState(2))
        assert out.bound.value == 0.0
        assert out.n_out == 10
        np.testing.assert_allclose(out.samples.mean(axis=0), data.samples.mean(axis=0), atol=1e-10)
        assert not np.allclose(out.samples, data.samples)

    def test_bound(self, rng, gaussian_mean):
        family, param = gaussian_mean
        out = amplify_gaussian_mean(sample(family, param, 100, rng), param.cov, 10, RngState(2))
        assert out.bound.value == pytest.approx(0.068482, abs=1e-6)

    def test_registry_uses_known_covariance(self, rng):
        family = FamilySpec(FamilyKind.GAUSSIAN_MEAN, 2)
        param = ParamPoint(mean=np.zeros(2), cov=np.diag([1e-6, 1e-6]))
        data = sample(family, param, 20, rng)
        out = amplify("gaussian_mean", data, 50, RngState(3), param)
        assert np.abs(out.samples - data.samples.mean(axis=0)).max() < 0.05

    def test_wrong_covariance_shape(self, rng, gaussian_mean):
        family, param = gaussian_mean
        with pytest.raises(ValidationError):
            amplify_gaussian_mean(sample(family, param, 5, rng), np.eye(3), 1, rng)


class TestGaussianCov:

    def test_scalar_case(self, rng):
        family = FamilySpec(FamilyKind.GAUSSIAN_COV, 1)
        data = sample(family, default_param(family), 25, rng)
        out = amplify_gaussian_cov(data, 5, RngState(1))
        assert np.sum(out.samples ** 2) == pytest.approx(30 * np.sum(data.samples ** 2) / 25, rel=1e-10)

    def test_frame_is_orthonormal(self, rng):
        family = FamilySpec(FamilyKind.GAUSSIAN_COV, 3)
        data = sample(family, default_param(family), 50, rng)
        out = amplify_gaussian_cov(data, 10, RngState(1))
        cov_n = data.samples.T @ data.samples / 50
        frame = out.samples @ np.linalg.inv(sym_sqrt(60 * cov_n))
        np.testing.assert_allclose(frame.T @ frame, np.eye(3), atol=1e-8)

    def test_bound(self):
        assert bound_for("gaussian_cov", FamilySpec(FamilyKind.GAUSSIAN_COV, 10), 400, 5).value == pytest.approx(0.25)

    def test_rank_deficient_output(self, rng):
        family = FamilySpec(FamilyKind.GAUSSIAN_COV, 5)
        data = sample(family, default_param(family), 2, rng)
        out = amplify_gaussian_cov(data, 1, RngState(1))
        assert out.metadata["rank_deficient"]
        assert np.all(np.isfinite(out.samples))
        assert out.bound.value == 1.0
        assert np.linalg.matrix_rank(out.samples) <= 2


class TestGaussianMeanCov:

    def test_frame_is_centered(self, rng):
        family = FamilySpec(FamilyKind.GAUSSIAN_MEAN_COV, 3)
        data = sample(family, ParamPoint(mean=np.array([1.0, -2.0, 5.0]), cov=np.eye(3)), 20, rng)
        out = amplify_gaussian_mean_cov(data, 7, RngState(1))
        mean_n = data.samples.mean(axis=0)
        np.testing.assert_allclose(out.samples.mean(axis=0), mean_n, atol=1e-10)
        np.testing.assert_allclose((out.samples - mean_n).sum(axis=0), 0.0, atol=1e-8)

    def test_unbiased_covariance_preserved(self, rng):
        family = FamilySpec(FamilyKind.GAUSSIAN_MEAN_COV, 3)
        data = sample(family, ParamPoint(mean=np.zeros(3), cov=random_psd(RngState(9).generator(), 3) + np.eye(3)), 20, rng)
        out = amplify_gaussian_mean_cov(data, 7, RngState(1))
        before = empirical_covariance(data.samples) * 20 / 19
        after = empirical_covariance(out.samples) * 27 / 26
        np.testing.assert_allclose(after, before, rtol=1e-8, atol=1e-10)

    def test_bound(self):
        family = FamilySpec(FamilyKind.GAUSSIAN_MEAN_COV, 10)
        assert bound_for("gaussian_mean_cov", family, 401, 4).value == pytest.approx(0.3)

    def test_single_sample(self):
        family = FamilySpec(FamilyKind.GAUSSIAN_MEAN_COV, 2)
        with pytest.raises(InsufficientSamplesError):
            amplify_gaussian_mean_cov(Dataset(np.zeros((1, 2)), family), 3, RngState(1))


class TestExponential:

    def test_column_means_preserved(self, rng):
        family = FamilySpec(FamilyKind.PRODUCT_EXPONENTIAL, 3)
        data = sample(family, ParamPoint(rates=np.array([0.5, 1.0, 4.0])), 15, rng)
        out = amplify_exponential(data, 6, RngState(1))
        np.testing.assert_allclose(out.samples.mean(axis=0), data.samples.mean(axis=0), rtol=1e-10)
        assert np.all(out.samples > 0)

    def test_bound_is_gamma_kl(self):
        family = FamilySpec(FamilyKind.PRODUCT_EXPONENTIAL, 3)
        expected = math.sqrt(divergences.gamma_kl(30, 4, 3) / 2)
        assert bound_for("exponential", family, 30, 4).value == pytest.approx(expected, rel=1e-12)

    def test_bound_dominates_statistic_tv(self, rng):
        family = FamilySpec(FamilyKind.PRODUCT_EXPONENTIAL, 1)
        tv, se = tv_mc_suffstat(family, default_param(family), 20, 2, "exponential", 50000, rng)
        assert bound_for("exponential", family, 20, 2).value >= tv - 3 * se

    def test_nonpositive_entries(self):
        family = FamilySpec(FamilyKind.PRODUCT_EXPONENTIAL, 1)
        with pytest.raises(DomainError):
            amplify_exponential(Dataset(np.array([[1.0], [0.0]]), family), 1, RngState(1))


class TestUniform:

    def test_min_max_preserved(self, rng):
        family = FamilySpec(FamilyKind.UNIFORM_RECT, 2)
        data = sample(family, ParamPoint(lower=[-3.0, 10.0], upper=[-1.0, 12.5]), 12, rng)
        out = amplify_uniform(data, 20, RngState(1))
        np.testing.assert_allclose(out.samples.min(axis=0), data.samples.min(axis=0), rtol=1e-12)
        np.testing.assert_allclose(out.samples.max(axis=0), data.samples.max(axis=0), rtol=1e-12)

    def test_zero_m_bound(self, rng):
        family = FamilySpec(FamilyKind.UNIFORM_RECT, 2)
        out = amplify_uniform(sample(family, default_param(family), 10, rng), 0, RngState(1))
        assert out.bound.value == 0.0

    def test_degenerate_coordinate(self):
        family = FamilySpec(FamilyKind.UNIFORM_RECT, 2)
        data = Dataset(np.array([[0.1, 0.5], [0.3, 0.5], [0.2, 0.5]]), family)
        with pytest.raises(DegenerateSupportError):
            amplify_uniform(data, 1, RngState(1))

    def test_single_sample(self):
        family = FamilySpec(FamilyKind.UNIFORM_RECT, 1)
        with pytest.raises(InsufficientSamplesError):
            amplify_uniform(Dataset(np.array([[0.4]]), family), 1, RngState(1))


class TestPoissonHybrid:

    def test_block_totals(self, rng):
        family = FamilySpec(FamilyKind.PRODUCT_POISSON, 3)
        data = sample(family, ParamPoint(rates=np.array([0.0, 2.0, 7.5])), 40, rng)
        out = amplify_poisson_hybrid(data, 15, RngState(1))
        np.testing.assert_array_equal(out.samples[:20], data.samples[:20])
        np.testing.assert_array_equal(out.samples[20:].sum(axis=0), out.metadata["block_total"])
        assert np.all(out.samples[:, 0] == 0)
        assert out.samples.shape == (55, 3)

    def test_bound(self):
        family = FamilySpec(FamilyKind.PRODUCT_POISSON, 100)
        assert bound_for("poisson_hybrid", family, 400, 10).value == pytest.approx(0.35355, abs=1e-5)

    def test_odd_n(self):
        family = FamilySpec(FamilyKind.PRODUCT_POISSON, 1)
        with pytest.raises(RequiresEvenNError):
            amplify_poisson_hybrid(Dataset(np.ones((3, 1)), family), 1, RngState(1))


class TestPoissonizedDiscrete:

    def test_column_sums_preserved(self, rng):
        family = FamilySpec(FamilyKind.POISSONIZED_DISCRETE, 8)
        data = sample(family, default_param(family), 30, rng)
        out = amplify_poissonized_discrete(data, 12, RngState(1))
        np.testing.assert_array_equal(out.samples.sum(axis=0), data.samples.sum(axis=0))
        assert out.n_out == 42

    def test_bound(self):
        family = FamilySpec(FamilyKind.POISSONIZED_DISCRETE, 5)
        assert bound_for("poissonized_discrete", family, 100, 10).value == pytest.approx(0.7071, abs=1e-4)

    def test_bound_ignores_support_and_hybrid_does_not(self):
        n, m = 400, 20
        expected = math.sqrt(m * m / (2 * n))
        values = []
        for k in (10, 10 ** 4):
            report = bound_for("poissonized_discrete", FamilySpec(FamilyKind.POISSONIZED_DISCRETE, k), n, m)
            assert abs(report.value - expected) <= 1e-12
            hybrid = bound_for("poisson_hybrid", FamilySpec(FamilyKind.PRODUCT_POISSON, k), n, m)
            assert abs(hybrid.unclipped - m * math.sqrt(2 * k) / n) <= 1e-12
            values.append(hybrid.unclipped)
        assert values[1] > values[0]


class TestLowRank:

    @pytest.fixture
    def lowrank(self):
        family = FamilySpec(FamilyKind.LOW_RANK_COV, 6, rank=3)
        return family, default_param(family, RngState(9))

    def test_new_rows_in_span(self, rng, lowrank):
        family, param = lowrank
        data = sample(family, param, 3, rng)
        out = amplify_lowrank_cov(data, 10, RngState(1))
        projection = out.metadata["projection"]
        fresh = out.samples[3:]
        assert np.abs(fresh - fresh @ projection).max() <= 1e-8
        np.testing.assert_array_equal(out.samples[:3], data.samples)

    def test_recovered_projection(self, rng, lowrank):
        family, param = lowrank
        out = amplify_lowrank_cov(sample(family, param, 4, rng), 2, RngState(1))
        eigenvalues = np.sort(np.linalg.eigvalsh(out.metadata["projection"]))
        np.testing.assert_allclose(eigenvalues, [0, 0, 0, 1, 1, 1], atol=1e-8)
        np.testing.assert_allclose(out.metadata["projection"], param.frame @ param.frame.T, atol=1e-8)
        assert out.bound.value == 0.0

    def test_too_few_samples(self, rng, lowrank):
        family, param = lowrank
        with pytest.raises(AmplificationImpossibleError) as excinfo:
            amplify_lowrank_cov(sample(family, param, 2, rng), 1, RngState(1))
        message = str(excinfo.value)
        assert "n=2 < d=3" in message
        assert "subespaço próprio" in message
        assert "se e somente se n >= d" in message


class TestRegistry:

    def test_unknown_method(self, rng, gaussian_mean):
        family, param = gaussian_mean
        with pytest.raises(ValidationError):
            amplify("bogus", sample(family, param, 4, rng), 1, rng)

    def test_family_mismatch(self, rng, gaussian_mean):
        family, param = gaussian_mean
        data = sample(family, param, 4, rng)
        with pytest.raises(ValidationError):
            amplify("gaussian_cov", data, 1, rng)
        with pytest.raises(UnsupportedFamilyError):
            amplify_exponential(data, 1, rng)

    def test_negative_m(self, rng, gaussian_mean):
        family, param = gaussian_mean
        with pytest.raises(ValidationError):
            amplify("gaussian_mean", sample(family, param, 4, rng), -1, rng)

    def test_deterministic(self, gaussian_mean):
        family, param = gaussian_mean
        data = sample(family, param, 10, RngState(1))
        a = amplify("gaussian_mean", data, 5, RngState(2))
        b = amplify("gaussian_mean", data, 5, RngState(2))
        np.testing.assert_array_equal(a.samples, b.samples)

    @pytest.mark.parametrize("method, kind, n, m", [
        ("gaussian_mean", FamilyKind.GAUSSIAN_MEAN, 100, 10),
        ("exponential", FamilyKind.PRODUCT_EXPONENTIAL, 50, 5),
        ("uniform", FamilyKind.UNIFORM_RECT, 40, 2),
    ])
    def test_bound_dominates_mc_tv(self, rng, method, kind, n, m):
        family = FamilySpec(kind, 2)
        tv, se = tv_mc_suffstat(family, default_param(family), n, m, method, 20000, rng)
        assert tv <= bound_for(method, family, n, m).value + 3 * se
