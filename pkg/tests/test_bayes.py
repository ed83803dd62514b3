"""Quadrature densities, entropies, and the information-gain report."""

from __future__ import annotations

import math

import numpy as np
import pytest

import qutritcodec.bayes as bayes
from qutritcodec import (
    ConvergenceError,
    Density1D,
    Density2D,
    QuadratureSpec,
    average_success_probability,
    decode_posterior_failure,
    decode_posterior_success,
    direct_measurement_gain,
    encode_posterior,
    entropy_bits,
    gain_report,
    joint_state,
    outcome_likelihood,
    outcome_prior,
    prior_theta,
    report_scalars,
)
from conftest import random_pair

QUAD = QuadratureSpec(nodes_per_axis=64)
GRID = np.linspace(0.0, math.pi, 32)


def integral_1d(density: Density1D, quad=QUAD) -> float:
    x, w = quad.nodes()
    return float(np.sum(w * density.pdf(x)))


def integral_2d(density: Density2D, quad=QUAD) -> float:
    x, w = quad.nodes()
    return float(np.einsum("i,j,ij->", w, w, density.pdf(x[:, None], x[None, :])))


class TestPrior:
    def test_endpoint_and_midpoint_values(self):
        prior = prior_theta()
        assert prior.pdf(np.array([0.0]))[0] == 0.0
        assert prior.pdf(np.array([math.pi / 2]))[0] == pytest.approx(0.5)

    def test_normalization(self):
        assert integral_1d(prior_theta()) == pytest.approx(1.0, abs=1e-12)


class TestOutcomeLikelihood:
    def test_impossible_result(self):
        assert outcome_likelihood(0, 0.0, 0.0) == 0.0

    def test_closed_form_for_first_outcome(self):
        t1, t2 = np.meshgrid(GRID, GRID, indexing="ij")
        expected = (1 - np.cos(t1 / 2) ** 2 * np.cos(t2 / 2) ** 2) / 3
        np.testing.assert_allclose(
            outcome_likelihood(0, t1, t2), expected, atol=1e-15
        )

    def test_vanishes_where_the_branch_is_certainly_other(self):
        assert outcome_likelihood(2, 0.0, math.pi) == pytest.approx(0.0, abs=1e-30)

    def test_likelihoods_sum_to_one(self):
        t1, t2 = np.meshgrid(GRID, GRID, indexing="ij")
        total = sum(outcome_likelihood(j, t1, t2) for j in range(4))
        np.testing.assert_allclose(total, np.ones_like(t1), atol=1e-15)

    def test_matches_register_amplitudes(self, rng):
        for _ in range(20):
            pair = random_pair(rng)
            c = joint_state(pair).amplitudes
            for j in range(4):
                expected = (1 - abs(c[j]) ** 2) / 3
                got = outcome_likelihood(j, pair.q1.theta, pair.q2.theta)
                assert got == pytest.approx(expected, abs=1e-12)

    def test_invalid_outcome(self):
        with pytest.raises(ValueError):
            outcome_likelihood(4, 0.0, 0.0)


class TestOutcomePrior:
    def test_uniform_quarter(self):
        for j in range(4):
            assert outcome_prior(j, QUAD) == pytest.approx(0.25, abs=1e-12)

    def test_sums_to_one(self):
        total = sum(outcome_prior(j, QUAD) for j in range(4))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_node_count_independence(self):
        coarse = outcome_prior(0, QuadratureSpec(64))
        fine = outcome_prior(0, QuadratureSpec(256))
        assert coarse == pytest.approx(fine, abs=1e-12)


class TestEncodePosterior:
    def test_closed_form_on_a_grid(self):
        posterior = encode_posterior(0, QUAD)
        t1, t2 = np.meshgrid(GRID, GRID, indexing="ij")
        expected = (
            (1 - np.cos(t1 / 2) ** 2 * np.cos(t2 / 2) ** 2)
            / 3 * np.sin(t1) * np.sin(t2)
        )
        np.testing.assert_allclose(posterior.pdf(t1, t2), expected, atol=1e-12)

    def test_vanishes_at_the_origin(self):
        posterior = encode_posterior(0, QUAD)
        assert posterior.pdf(np.array([0.0]), np.array([0.0]))[0] == 0.0

    def test_reflection_symmetry_between_first_and_last_outcome(self):
        post0 = encode_posterior(0, QUAD)
        post3 = encode_posterior(3, QUAD)
        t1, t2 = np.meshgrid(GRID, GRID, indexing="ij")
        np.testing.assert_allclose(
            post3.pdf(t1, t2),
            post0.pdf(math.pi - t1, math.pi - t2),
            atol=1e-12,
        )

    def test_normalization(self):
        for j in range(4):
            assert integral_2d(encode_posterior(j, QUAD)) == pytest.approx(
                1.0, abs=1e-9
            )


class TestDecodePosteriors:
    def test_success_joint_matches_the_product_form(self):
        success = decode_posterior_success(0, 1, QUAD)
        t1, t2 = np.meshgrid(GRID[1:-1], GRID[1:-1], indexing="ij")
        expected = 0.5 * np.sin(t1) * np.sin(t2 / 2) ** 2 * np.sin(t2)
        np.testing.assert_allclose(success.joint.pdf(t1, t2), expected, atol=1e-9)

    def test_success_marginals(self):
        success = decode_posterior_success(0, 1, QUAD)
        x, _ = QUAD.nodes()
        np.testing.assert_allclose(
            success.marginal_q1.pdf(x), 0.5 * np.sin(x), atol=1e-9
        )
        np.testing.assert_allclose(
            success.marginal_q2.pdf(x), np.sin(x / 2) ** 2 * np.sin(x), atol=1e-9
        )

    def test_failure_joint_closed_form(self):
        failure = decode_posterior_failure(0, 1, QUAD)
        t1, t2 = np.meshgrid(GRID[1:-1], GRID[1:-1], indexing="ij")
        expected = (
            np.sin(t1 / 2) ** 2 * np.cos(t2 / 2) ** 2 * np.sin(t1) * np.sin(t2)
        )
        np.testing.assert_allclose(failure.joint.pdf(t1, t2), expected, atol=1e-9)

    def test_failure_weight_is_one_third(self):
        weight = 1.0 - average_success_probability(0, 1, QUAD)
        assert weight == pytest.approx(1 / 3, abs=1e-9)

    def test_failure_density_factorizes(self):
        failure = decode_posterior_failure(0, 1, QUAD)
        inner = GRID[1:-1]
        t1, t2 = np.meshgrid(inner, inner, indexing="ij")
        product = failure.marginal_q1.pdf(inner)[:, None] * (
            failure.marginal_q2.pdf(inner)[None, :]
        )
        np.testing.assert_allclose(failure.joint.pdf(t1, t2), product, atol=1e-9)

    def test_failure_vanishes_on_the_first_axis(self):
        failure = decode_posterior_failure(0, 1, QUAD)
        values = failure.joint.pdf(np.zeros(5), np.linspace(0.1, 3.0, 5))
        np.testing.assert_allclose(values, 0.0, atol=1e-15)

    def test_normalization(self):
        assert integral_2d(decode_posterior_success(0, 1, QUAD).joint) == pytest.approx(
            1.0, abs=1e-9
        )
        assert integral_2d(decode_posterior_failure(0, 1, QUAD).joint) == pytest.approx(
            1.0, abs=1e-9
        )


class TestEntropy:
    def test_uniform_density(self):
        uniform = Density1D(pdf=lambda theta: np.full_like(theta, 1 / math.pi))
        assert entropy_bits(uniform, QUAD) == pytest.approx(
            math.log2(math.pi), abs=1e-12
        )

    def test_prior_entropy_is_stable_under_node_doubling(self):
        coarse = entropy_bits(prior_theta(), QuadratureSpec(256))
        fine = entropy_bits(prior_theta(), QuadratureSpec(512))
        assert abs(coarse - fine) <= 1e-9

    def test_product_density_entropy_is_additive(self):
        prior = prior_theta()
        product = Density2D(pdf=lambda t1, t2: prior.pdf(t1) * prior.pdf(t2))
        assert entropy_bits(product, QUAD) == pytest.approx(
            2 * entropy_bits(prior, QUAD), abs=1e-9
        )

    def test_negative_density_rejected(self):
        bad = Density1D(pdf=lambda theta: np.sin(theta) - 0.5)
        with pytest.raises(ValueError, match="negative"):
            entropy_bits(bad, QUAD)


class TestAverageSuccess:
    def test_two_thirds_for_the_worked_case(self):
        assert average_success_probability(0, 1, QUAD) == pytest.approx(
            2 / 3, abs=1e-9
        )

    def test_two_thirds_for_every_outcome_and_target(self):
        for j in range(4):
            for a in (1, 2):
                assert average_success_probability(j, a, QUAD) == pytest.approx(
                    2 / 3, abs=1e-9
                )


@pytest.fixture(scope="module")
def report():
    return gain_report(QuadratureSpec(128), check_convergence=False)


class TestGainReport:
    def test_published_constants(self, report):
        assert report.encoding_gain == pytest.approx(0.0735, abs=5e-4)
        for a in (0, 1):
            assert report.marginal_encoding_gain[a] == pytest.approx(0.027, abs=5e-4)
            assert report.failure_gain[a] == pytest.approx(0.252, abs=5e-4)
        assert report.decode_gain[0] == pytest.approx(-0.027, abs=5e-4)
        assert report.decode_gain[1] == pytest.approx(0.252, abs=5e-4)
        assert report.success_total[1] == pytest.approx(0.279, abs=1e-3)

    def test_identities(self, report):
        assert report.success_total[0] == pytest.approx(0.0, abs=1e-9)
        assert report.success_total[1] == pytest.approx(report.direct_gain, abs=1e-9)
        for a in (0, 1):
            assert report.failure_total[a] == pytest.approx(
                report.direct_gain, abs=1e-9
            )
        assert sum(report.outcome_prior) == pytest.approx(1.0, abs=1e-12)

    def test_marginal_gains_agree_with_each_other(self, report):
        assert report.marginal_encoding_gain[0] == pytest.approx(
            report.marginal_encoding_gain[1], abs=1e-9
        )

    def test_joint_gain_exceeds_the_marginal_sum(self, report):
        assert report.encoding_gain - sum(report.marginal_encoding_gain) > 0.015

    def test_direct_gain_matches_helper(self, report):
        assert direct_measurement_gain(QuadratureSpec(128)) == pytest.approx(
            report.direct_gain, abs=1e-15
        )

    def test_scalars_are_independent_of_the_outcome(self, report):
        base = report_scalars(report)
        for j in (1, 2, 3):
            other = report_scalars(
                gain_report(QuadratureSpec(128), outcome=j, check_convergence=False)
            )
            for name in base:
                assert other[name] == pytest.approx(base[name], abs=1e-9), name

    def test_swapping_the_decode_target_swaps_the_per_qubit_gains(self, report):
        swapped = gain_report(
            QuadratureSpec(128), outcome=0, target=2, check_convergence=False
        )
        assert swapped.decode_gain[0] == pytest.approx(report.decode_gain[1], abs=1e-9)
        assert swapped.decode_gain[1] == pytest.approx(report.decode_gain[0], abs=1e-9)
        for a in (0, 1):
            assert swapped.failure_gain[a] == pytest.approx(
                report.failure_gain[a], abs=1e-9
            )


class TestConvergenceGate:
    def test_quadrature_spec_floor(self):
        with pytest.raises(ValueError):
            QuadratureSpec(nodes_per_axis=8)

    def test_passes_at_default_resolution(self):
        gain_report(QuadratureSpec(64))  # no exception

    def test_raises_when_scalars_drift(self, monkeypatch):
        true_report_at = bayes._gain_report_at

        def drifting(quad, outcome, target):
            report = true_report_at(quad, outcome, target)
            # inject a resolution-dependent bias well above the gate
            bias = 1e-4 if quad.nodes_per_axis > 64 else 0.0
            return bayes.GainReport(
                nodes_per_axis=report.nodes_per_axis,
                outcome_prior=report.outcome_prior,
                success_probability=report.success_probability,
                encoding_gain=report.encoding_gain + bias,
                marginal_encoding_gain=report.marginal_encoding_gain,
                decode_gain=report.decode_gain,
                failure_gain=report.failure_gain,
                direct_gain=report.direct_gain,
                success_total=report.success_total,
                failure_total=report.failure_total,
            )

        monkeypatch.setattr(bayes, "_gain_report_at", drifting)
        with pytest.raises(ConvergenceError, match="encoding_gain"):
            gain_report(QuadratureSpec(64))
