"""Bayesian information-gain accounting over the preparation angles.

Random preparations put independent priors (1/2) sin(theta) on each qubit's
polar angle; every likelihood that appears in the protocol is independent
of the azimuthal phases, so the whole analysis lives on [0, pi]^2. All
integrals use a fixed tensor-product Gauss-Legendre rule, which keeps every
reported scalar deterministic, and entropies are differential entropies in
bits with the 0 * log 0 = 0 convention at density zeros.

Gain conventions: the "encoding gain" compares the joint prior with the
posterior after observing an encoding outcome; marginal gains do the same
per qubit. Decode and failure gains fix one decoded qubit (the reported
pair indexes the qubit whose state is being tracked, not the decode
target) and compare the encode posterior with the posterior after a
successful or failed decoding.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .codec import intact_block, qubit_bit

# Scalars of a gain report must be stable under node doubling within this
# tolerance, otherwise the quadrature has not converged.
CONVERGENCE_ATOL = 1e-7


class ConvergenceError(RuntimeError):
    """Raised when node doubling moves a reported scalar too much."""

    def __init__(self, scalar_name: str, drift: float, nodes_per_axis: int):
        self.scalar_name = scalar_name
        self.drift = drift
        self.nodes_per_axis = nodes_per_axis
        super().__init__(
            f"quadrature with {nodes_per_axis} nodes has not converged: "
            f"{scalar_name} moves by {drift:.3e} under node doubling"
        )


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor-product Gauss-Legendre rule on [0, pi] per axis."""

    nodes_per_axis: int = 256

    def __post_init__(self) -> None:
        if self.nodes_per_axis < 16:
            raise ValueError(
                f"nodes_per_axis must be at least 16, got {self.nodes_per_axis}"
            )

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights on [0, pi]; arrays are cached and read-only."""
        return _gauss_legendre(self.nodes_per_axis)

    def doubled(self) -> "QuadratureSpec":
        return QuadratureSpec(2 * self.nodes_per_axis)


@functools.lru_cache(maxsize=None)
def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    nodes = 0.5 * math.pi * (x + 1.0)
    weights = 0.5 * math.pi * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@dataclass(frozen=True)
class Density1D:
    """Probability density over the polar angle of one qubit."""

    pdf: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Density2D:
    """Joint probability density over both polar angles."""

    pdf: Callable[[np.ndarray, np.ndarray], np.ndarray]


class Posterior2D(NamedTuple):
    """A joint posterior density together with its two marginals."""

    joint: Density2D
    marginal_q1: Density1D
    marginal_q2: Density1D


def prior_theta() -> Density1D:
    """Polar-angle density (1/2) sin(theta) of a uniformly random qubit."""
    return Density1D(pdf=lambda theta: 0.5 * np.sin(theta))


def _bit_weight(bit: int, theta: np.ndarray) -> np.ndarray:
    """Squared amplitude of one qubit's basis component at the given angle."""
    half = 0.5 * np.asarray(theta, dtype=float)
    return np.cos(half) ** 2 if bit == 0 else np.sin(half) ** 2


def _register_weight(index: int, theta1, theta2) -> np.ndarray:
    """|c_index|^2 of the joint register state, independent of the phases."""
    return _bit_weight(qubit_bit(index, 1), theta1) * _bit_weight(
        qubit_bit(index, 2), theta2
    )


def outcome_likelihood(outcome: int, theta1, theta2):
    """Probability of encoding outcome j given the preparation angles.

    Equals (1 - |c_j|^2) / 3 and lies in [0, 1/3]; broadcasting arrays of
    angles is supported.
    """
    if outcome not in (0, 1, 2, 3):
        raise ValueError(f"outcome must be one of 0..3, got {outcome!r}")
    return (1.0 - _register_weight(outcome, theta1, theta2)) / 3.0


def _integrate_2d(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray], quad: QuadratureSpec
) -> float:
    x, w = quad.nodes()
    values = f(x[:, None], x[None, :])
    # einsum reduces with numpy's pairwise summation in a fixed order, so
    # the result does not depend on any parallel execution of the caller.
    return float(np.einsum("i,j,ij->", w, w, values))


def _integrate_1d(f: Callable[[np.ndarray], np.ndarray], quad: QuadratureSpec) -> float:
    x, w = quad.nodes()
    return float(np.sum(w * f(x)))


def outcome_prior(outcome: int, quad: QuadratureSpec) -> float:
    """Prior probability of encoding outcome j, integrated over preparations."""
    prior = prior_theta().pdf
    return _integrate_2d(
        lambda t1, t2: outcome_likelihood(outcome, t1, t2) * prior(t1) * prior(t2),
        quad,
    )


def encode_posterior(outcome: int, quad: QuadratureSpec) -> Density2D:
    """Posterior density of the angles given an observed encoding outcome."""
    prior = prior_theta().pdf
    normalization = outcome_prior(outcome, quad)

    def pdf(theta1, theta2):
        return (
            outcome_likelihood(outcome, theta1, theta2)
            * prior(theta1)
            * prior(theta2)
            / normalization
        )

    return Density2D(pdf=pdf)


def _conditional_success(outcome: int, target: int, theta1, theta2):
    """Success probability of decoding `target` as a function of the angles."""
    block = intact_block(outcome, target)
    numerator = sum(_register_weight(k, theta1, theta2) for k in block)
    return numerator / (1.0 - _register_weight(outcome, theta1, theta2))


def average_success_probability(outcome: int, target: int, quad: QuadratureSpec) -> float:
    """Decoding success probability averaged over the encode posterior."""
    posterior = encode_posterior(outcome, quad)
    return _integrate_2d(
        lambda t1, t2: _conditional_success(outcome, target, t1, t2)
        * posterior.pdf(t1, t2),
        quad,
    )


def marginal_density(density: Density2D, quad: QuadratureSpec, axis: int) -> Density1D:
    """Marginal of a joint density: axis 1 keeps theta1, axis 2 keeps theta2."""
    if axis not in (1, 2):
        raise ValueError(f"axis must be 1 or 2, got {axis!r}")
    x, w = quad.nodes()

    def pdf(theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if axis == 1:
            values = density.pdf(theta[:, None], x[None, :])
        else:
            values = density.pdf(x[None, :], theta[:, None])
        return values @ w

    return Density1D(pdf=pdf)


def _success_posterior_2d(
    outcome: int, target: int, quad: QuadratureSpec
) -> Density2D:
    posterior = encode_posterior(outcome, quad)
    weight = average_success_probability(outcome, target, quad)

    def pdf(theta1, theta2):
        return (
            _conditional_success(outcome, target, theta1, theta2)
            * posterior.pdf(theta1, theta2)
            / weight
        )

    return Density2D(pdf=pdf)


def _failure_posterior_2d(
    outcome: int, target: int, quad: QuadratureSpec
) -> Density2D:
    posterior = encode_posterior(outcome, quad)
    weight = 1.0 - average_success_probability(outcome, target, quad)

    def pdf(theta1, theta2):
        return (
            (1.0 - _conditional_success(outcome, target, theta1, theta2))
            * posterior.pdf(theta1, theta2)
            / weight
        )

    return Density2D(pdf=pdf)


def decode_posterior_success(
    outcome: int, target: int, quad: QuadratureSpec
) -> Posterior2D:
    """Posterior after encoding outcome j and a successful decode of `target`."""
    joint = _success_posterior_2d(outcome, target, quad)
    return Posterior2D(
        joint=joint,
        marginal_q1=marginal_density(joint, quad, axis=1),
        marginal_q2=marginal_density(joint, quad, axis=2),
    )


def decode_posterior_failure(
    outcome: int, target: int, quad: QuadratureSpec
) -> Posterior2D:
    """Posterior after encoding outcome j and a failed decode of `target`."""
    joint = _failure_posterior_2d(outcome, target, quad)
    return Posterior2D(
        joint=joint,
        marginal_q1=marginal_density(joint, quad, axis=1),
        marginal_q2=marginal_density(joint, quad, axis=2),
    )


def _plogp(values: np.ndarray) -> np.ndarray:
    if np.any(values < 0.0):
        raise ValueError("density is negative at a quadrature node")
    positive = values > 0.0
    safe = np.where(positive, values, 1.0)
    return np.where(positive, values * np.log2(safe), 0.0)


def entropy_bits(density: Density1D | Density2D, quad: QuadratureSpec) -> float:
    """Differential entropy -integral p log2 p, in bits (may be negative)."""
    x, w = quad.nodes()
    if isinstance(density, Density1D):
        return float(-np.sum(w * _plogp(np.asarray(density.pdf(x)))))
    values = np.asarray(density.pdf(x[:, None], x[None, :]))
    return float(-np.einsum("i,j,ij->", w, w, _plogp(values)))


def direct_measurement_gain(quad: QuadratureSpec) -> float:
    """Expected entropy drop from a plain basis measurement of one qubit.

    The outcome probabilities are cos^2(theta/2) and sin^2(theta/2); the
    gain is the prior entropy minus the outcome-averaged posterior entropy.
    """
    prior = prior_theta()
    p_zero = _integrate_1d(
        lambda t: _bit_weight(0, t) * prior.pdf(t), quad
    )
    posterior_zero = Density1D(pdf=lambda t: _bit_weight(0, t) * prior.pdf(t) / p_zero)
    posterior_one = Density1D(
        pdf=lambda t: _bit_weight(1, t) * prior.pdf(t) / (1.0 - p_zero)
    )
    h_prior = entropy_bits(prior, quad)
    h_after = p_zero * entropy_bits(posterior_zero, quad) + (
        1.0 - p_zero
    ) * entropy_bits(posterior_one, quad)
    return h_prior - h_after


@dataclass(frozen=True)
class GainReport:
    """Every scalar of the information-gain accounting at one resolution.

    Per-qubit tuples are indexed (qubit 1, qubit 2). Decode and failure
    gains use the convention of outcome 0 with qubit 1 as the decode
    target; the symmetry across outcomes and targets is a tested property
    rather than an input here.
    """

    nodes_per_axis: int
    outcome_prior: tuple[float, float, float, float]
    success_probability: tuple[tuple[float, float], ...]  # [outcome][target - 1]
    encoding_gain: float
    marginal_encoding_gain: tuple[float, float]
    decode_gain: tuple[float, float]
    failure_gain: tuple[float, float]
    direct_gain: float
    success_total: tuple[float, float]
    failure_total: tuple[float, float]


def report_scalars(report: GainReport) -> dict[str, float]:
    """Flatten a gain report into named scalars (used by checks and the CLI)."""
    scalars: dict[str, float] = {}
    for j in range(4):
        scalars[f"outcome_prior_{j}"] = report.outcome_prior[j]
    for j in range(4):
        for a in (1, 2):
            scalars[f"success_probability_j{j}_target{a}"] = (
                report.success_probability[j][a - 1]
            )
    scalars["encoding_gain"] = report.encoding_gain
    for a in (1, 2):
        scalars[f"marginal_encoding_gain_q{a}"] = report.marginal_encoding_gain[a - 1]
        scalars[f"decode_gain_q{a}"] = report.decode_gain[a - 1]
        scalars[f"failure_gain_q{a}"] = report.failure_gain[a - 1]
        scalars[f"success_total_q{a}"] = report.success_total[a - 1]
        scalars[f"failure_total_q{a}"] = report.failure_total[a - 1]
    scalars["direct_gain"] = report.direct_gain
    return scalars


def _gain_report_at(quad: QuadratureSpec, outcome: int, target: int) -> GainReport:
    prior = prior_theta()
    prior_2d = Density2D(pdf=lambda t1, t2: prior.pdf(t1) * prior.pdf(t2))

    outcome_priors = tuple(outcome_prior(j, quad) for j in range(4))
    success = tuple(
        tuple(average_success_probability(j, a, quad) for a in (1, 2))
        for j in range(4)
    )

    posterior = encode_posterior(outcome, quad)
    encoding_gain = entropy_bits(prior_2d, quad) - entropy_bits(posterior, quad)

    h_prior_1d = entropy_bits(prior, quad)
    posterior_marginals = {
        a: marginal_density(posterior, quad, axis=a) for a in (1, 2)
    }
    h_posterior_marginal = {
        a: entropy_bits(posterior_marginals[a], quad) for a in (1, 2)
    }
    marginal_encoding = tuple(h_prior_1d - h_posterior_marginal[a] for a in (1, 2))

    success_post = decode_posterior_success(outcome, target, quad)
    failure_post = decode_posterior_failure(outcome, target, quad)
    success_marginals = {1: success_post.marginal_q1, 2: success_post.marginal_q2}
    failure_marginals = {1: failure_post.marginal_q1, 2: failure_post.marginal_q2}
    decode_gain = tuple(
        h_posterior_marginal[a] - entropy_bits(success_marginals[a], quad)
        for a in (1, 2)
    )
    failure_gain = tuple(
        h_posterior_marginal[a] - entropy_bits(failure_marginals[a], quad)
        for a in (1, 2)
    )

    direct = direct_measurement_gain(quad)
    return GainReport(
        nodes_per_axis=quad.nodes_per_axis,
        outcome_prior=outcome_priors,
        success_probability=success,
        encoding_gain=encoding_gain,
        marginal_encoding_gain=marginal_encoding,
        decode_gain=decode_gain,
        failure_gain=failure_gain,
        direct_gain=direct,
        success_total=tuple(
            marginal_encoding[a - 1] + decode_gain[a - 1] for a in (1, 2)
        ),
        failure_total=tuple(
            marginal_encoding[a - 1] + failure_gain[a - 1] for a in (1, 2)
        ),
    )


def gain_report(
    quad: QuadratureSpec,
    outcome: int = 0,
    target: int = 1,
    check_convergence: bool = True,
) -> GainReport:
    """Compute every gain scalar at the given resolution.

    With check_convergence the report is recomputed at doubled nodes and a
    ConvergenceError is raised if any scalar moves by more than
    CONVERGENCE_ATOL; the returned report is always the one at the
    requested resolution.
    """
    report = _gain_report_at(quad, outcome, target)
    if check_convergence:
        doubled = _gain_report_at(quad.doubled(), outcome, target)
        base_scalars = report_scalars(report)
        doubled_scalars = report_scalars(doubled)
        worst_name = max(
            base_scalars, key=lambda k: abs(base_scalars[k] - doubled_scalars[k])
        )
        worst = abs(base_scalars[worst_name] - doubled_scalars[worst_name])
        if worst > CONVERGENCE_ATOL:
            raise ConvergenceError(worst_name, worst, quad.nodes_per_axis)
    return report
