"""Shared helpers: random preparations and the explicit 12-dimensional
encoding pipeline used as an oracle for the closed-form branch."""

from __future__ import annotations

import numpy as np
import pytest

from qutritcodec import (
    BlochAngles,
    PureState,
    QubitPair,
    ancilla,
    apply_permutation,
    encoding_projector,
    joint_state,
    project,
    relabel_unitary,
    tensor_product,
)


def random_pair(rng: np.random.Generator) -> QubitPair:
    """Haar-marginal random preparation of both qubits."""
    u = rng.random(4)
    return QubitPair(
        q1=BlochAngles(theta=float(np.arccos(1 - 2 * u[0])), phi=float(2 * np.pi * u[1])),
        q2=BlochAngles(theta=float(np.arccos(1 - 2 * u[2])), phi=float(2 * np.pi * u[3])),
    )


def pipeline_encode(pair: QubitPair, outcome: int):
    """Encoding by explicit tensor, projection, relabeling and slicing.

    Independent of the closed-form branch: builds the 12-dimensional
    ancilla-register state, projects onto the outcome's projector, applies
    the relabeling permutation, and reads the qutrit off the register level
    every component ends up in.
    """
    state = tensor_product(ancilla(), joint_state(pair))
    probability, collapsed = project(state, encoding_projector(outcome))
    if collapsed is None:
        return probability, None
    relabeled = apply_permutation(collapsed, relabel_unitary())
    register_level = (outcome + 1) % 4
    return probability, PureState(relabeled.amplitudes[register_level::4])


def phase_aligned_max_diff(a: PureState, b: PureState) -> float:
    """Largest componentwise deviation after aligning the global phase of b."""
    overlap = np.vdot(a.amplitudes, b.amplitudes)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.max(np.abs(a.amplitudes - b.amplitudes * np.conj(phase))))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
