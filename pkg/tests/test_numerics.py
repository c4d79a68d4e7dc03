"""Gerador determinístico, funções especiais e raiz simétrica"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special, stats

from sample_amplification.errors import DomainError, NotPSDError, ValidationError
from sample_amplification.numerics import (
    RngState,
    as_generator,
    binomial_cdf,
    chi2_cdf,
    chunk_sizes,
    digamma,
    log_gamma,
    mean_and_stderr,
    multivariate_digamma,
    multivariate_log_gamma,
    normal_cdf,
    poisson_binomial_cdf,
    sample_chi2,
    sample_dirichlet,
    sample_gamma,
    sample_poisson,
    sample_std_normal,
    spawn_generators,
    sym_sqrt,
    trigamma,
)

from .conftest import random_psd


class TestRngState:

    def test_same_state_same_draws(self):
        a = sample_std_normal(RngState(7, 3), 100)
        b = sample_std_normal(RngState(7, 3), 100)
        np.testing.assert_array_equal(a, b)

    def test_streams_differ(self):
        a = sample_std_normal(RngState(7, 0), 100)
        b = sample_std_normal(RngState(7, 1), 100)
        assert not np.array_equal(a, b)

    def test_substreams_differ_from_parent(self):
        parent = RngState(7)
        draws = [sample_std_normal(s, 50) for s in (parent, parent.substream(0), parent.substream(1))]
        assert not np.array_equal(draws[0], draws[1])
        assert not np.array_equal(draws[1], draws[2])

    def test_substream_is_pure(self):
        state = RngState(11)
        assert state.substream(4) == state.substream(4)
        assert state.substream(4).path == (4,)
        assert state.path == ()

    @pytest.mark.parametrize("seed, stream", [(-1, 0), (2 ** 64, 0), (0, -3)])
    def test_out_of_range_seed(self, seed, stream):
        with pytest.raises(ValidationError):
            RngState(seed, stream)

    def test_negative_substream(self):
        with pytest.raises(ValidationError):
            RngState(1).substream(-1)

    def test_label(self):
        assert RngState(5, 2).substream(9).label() == "5:2:9"

    def test_as_generator_rejects_other_types(self):
        with pytest.raises(ValidationError):
            as_generator(42)

    def test_live_generator_passes_through(self):
        gen = RngState(1).generator()
        assert as_generator(gen) is gen

    def test_spawn_generators_deterministic(self):
        first = [g.random() for g in spawn_generators(RngState(3), 4)]
        second = [g.random() for g in spawn_generators(RngState(3), 4)]
        assert first == second
        assert len(set(first)) == 4


class TestSamplers:

    def test_dirichlet_on_simplex(self, rng):
        draws = sample_dirichlet(rng, 6, size=1000)
        np.testing.assert_allclose(draws.sum(axis=1), 1.0, atol=1e-12)
        assert np.all(draws >= 0)

    def test_chi2_mean(self, rng):
        draws = sample_chi2(rng, 5, size=10 ** 6)
        mean, se = mean_and_stderr(draws)
        assert abs(mean - 5.0) <= 3 * se

    def test_gamma_rate_parametrization(self, rng):
        draws = sample_gamma(rng, 3.0, 2.0, size=200000)
        mean, se = mean_and_stderr(draws)
        assert abs(mean - 1.5) <= 4 * se

    def test_poisson_zero_mean(self, rng):
        assert np.all(sample_poisson(rng, 0.0, size=100) == 0)

    @pytest.mark.parametrize("call", [
        lambda r: sample_chi2(r, 0),
        lambda r: sample_gamma(r, -1.0, 1.0),
        lambda r: sample_gamma(r, 1.0, 0.0),
        lambda r: sample_dirichlet(r, 0),
        lambda r: sample_poisson(r, -0.5),
    ])
    def test_domain_errors(self, rng, call):
        with pytest.raises(DomainError):
            call(rng)

    def test_chunk_sizes_cover_total(self):
        sizes = list(chunk_sizes(10_001, width=7, budget=700))
        assert sum(sizes) == 10_001
        assert max(sizes) == 100

    def test_stderr_of_single_value(self):
        mean, se = mean_and_stderr(np.array([2.0]))
        assert mean == 2.0
        assert math.isnan(se)


class TestSpecialFunctions:

    def test_values(self):
        assert log_gamma(1.0) == pytest.approx(0.0, abs=1e-15)
        assert digamma(1.0) == pytest.approx(-0.5772156649, abs=1e-10)
        assert trigamma(1.0) == pytest.approx(1.6449340668, abs=1e-10)

    @pytest.mark.parametrize("function", [log_gamma, digamma, trigamma])
    def test_nonpositive_argument(self, function):
        with pytest.raises(DomainError):
            function(0.0)

    @given(st.floats(min_value=0.05, max_value=500.0))
    def test_multivariate_reduces_at_d1(self, x):
        assert multivariate_log_gamma(x, 1) == pytest.approx(float(special.gammaln(x)), rel=1e-12, abs=1e-12)
        assert multivariate_digamma(x, 1) == pytest.approx(float(special.digamma(x)), rel=1e-12, abs=1e-12)

    def test_multivariate_log_gamma_d2(self):
        expected = 0.5 * math.log(math.pi) + math.lgamma(1.5) + math.lgamma(1.0)
        assert multivariate_log_gamma(1.5, 2) == pytest.approx(expected, rel=1e-12)

    @given(st.floats(min_value=0.6, max_value=300.0))
    def test_multivariate_digamma_d2(self, x):
        expected = special.digamma(x) + special.digamma(x - 0.5)
        assert multivariate_digamma(x, 2) == pytest.approx(float(expected), rel=1e-10, abs=1e-10)

    def test_multivariate_domain(self):
        with pytest.raises(DomainError):
            multivariate_log_gamma(1.0, 3)

    def test_cdfs(self):
        assert chi2_cdf(0.0, 3) == 0.0
        assert normal_cdf(0.0) == 0.5
        assert binomial_cdf(12, 12, 0.3) == pytest.approx(1.0)
        np.testing.assert_allclose(chi2_cdf(np.array([0.5, 2.0, 7.0]), 4), stats.chi2.cdf([0.5, 2.0, 7.0], 4), rtol=1e-12)

    def test_cdf_domains(self):
        with pytest.raises(DomainError):
            chi2_cdf(-1.0, 2)
        with pytest.raises(DomainError):
            binomial_cdf(1, 3, 1.5)

    @settings(max_examples=50)
    @given(st.integers(min_value=1, max_value=40), st.floats(min_value=0.0, max_value=1.0), st.data())
    def test_poisson_binomial_matches_binomial(self, n, p, data):
        k = data.draw(st.integers(min_value=0, max_value=n))
        assert poisson_binomial_cdf(k, [p] * n) == pytest.approx(float(stats.binom.cdf(k, n, p)), abs=1e-12)

    def test_poisson_binomial_edges(self):
        assert poisson_binomial_cdf(-1, [0.3, 0.4]) == 0.0
        assert poisson_binomial_cdf(2, [0.3, 0.4]) == pytest.approx(1.0)
        assert poisson_binomial_cdf(0, [0.3, 0.4]) == pytest.approx(0.7 * 0.6)


class TestSymSqrt:

    def test_identity_and_diagonal(self):
        np.testing.assert_allclose(sym_sqrt(np.eye(3)), np.eye(3), atol=1e-14)
        np.testing.assert_allclose(sym_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-12)

    @settings(max_examples=30)
    @given(st.integers(min_value=1, max_value=8), st.integers(min_value=0, max_value=2 ** 32 - 1))
    def test_square_recovers_matrix(self, d, seed):
        M = random_psd(RngState(seed).generator(), d)
        R = sym_sqrt(M)
        np.testing.assert_allclose(R, R.T, atol=1e-12)
        np.testing.assert_allclose(R @ R, M, atol=1e-9 * max(1.0, np.abs(M).max()))

    def test_pseudo_inverse_root_rank_one(self):
        v = np.array([3.0, 4.0])
        R = sym_sqrt(np.outer(v, v), pseudo=True)
        # R·v = v/‖v‖ e R·(vvᵀ)·R é a projeção em span(v)
        np.testing.assert_allclose(R @ v, v / np.linalg.norm(v), atol=1e-12)
        np.testing.assert_allclose(R @ np.outer(v, v) @ R, np.outer(v, v) / 25.0, atol=1e-12)

    def test_rejects_asymmetric(self):
        with pytest.raises(ValidationError):
            sym_sqrt(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(NotPSDError):
            sym_sqrt(np.diag([1.0, -0.1]))

    def test_clips_roundoff(self):
        R = sym_sqrt(np.diag([1.0, -1e-13]))
        np.testing.assert_allclose(R, np.diag([1.0, 0.0]), atol=1e-12)
