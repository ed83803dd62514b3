"""Exact pure-state linear algebra for small fixed dimensions.

Everything here operates on plain complex statevectors. Measurements are
restricted to projectors that are diagonal in the computational basis and
unitaries that permute basis labels, so every operation reduces to index
arithmetic plus a handful of numpy reductions. All values are immutable
after construction and all operations are pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Unit-norm tolerance enforced when a state is constructed.
NORM_ATOL = 1e-12
# Born weight at or below this is treated as an impossible branch: the
# projection returns no collapsed state instead of renormalized noise.
NULL_BRANCH_EPS = 1e-15
# A projector family used for sampling must have total Born weight 1
# within this tolerance.
COMPLETENESS_ATOL = 1e-10

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class BlochAngles:
    """Polar and azimuthal angles (radians) of a single-qubit pure state."""

    theta: float
    phi: float = 0.0

    def __post_init__(self) -> None:
        theta = float(self.theta)
        phi = float(self.phi)
        if not math.isfinite(theta) or not (0.0 <= theta <= math.pi):
            raise ValueError(f"theta must lie in [0, pi], got {self.theta!r}")
        if not math.isfinite(phi):
            raise ValueError(f"phi must be finite, got {self.phi!r}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi % TWO_PI)


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit-norm complex statevector of small fixed dimension.

    The amplitude array is copied and frozen at construction; the squared
    norm must already be 1 within NORM_ATOL. Global phase is never
    canonicalized, so comparisons should go through fidelity or
    equal_up_to_global_phase.
    """

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=np.complex128, copy=True)
        if amps.ndim != 1 or amps.size < 1:
            raise ValueError("amplitudes must be a nonempty one-dimensional sequence")
        if not np.all(np.isfinite(amps.real)) or not np.all(np.isfinite(amps.imag)):
            raise ValueError("amplitudes must all be finite")
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > NORM_ATOL:
            raise ValueError(f"state must be unit norm, got squared norm {norm_sq!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True)
class DiagonalProjector:
    """Projector onto a subset of computational-basis levels."""

    dim: int
    indices: frozenset[int]

    def __post_init__(self) -> None:
        indices = frozenset(int(i) for i in self.indices)
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if not indices:
            raise ValueError("projector needs at least one basis index")
        if any(i < 0 or i >= self.dim for i in indices):
            raise ValueError(f"basis index out of range for dim={self.dim}: {sorted(indices)}")
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "dim", int(self.dim))

    def sorted_indices(self) -> tuple[int, ...]:
        return tuple(sorted(self.indices))


@dataclass(frozen=True)
class PermutationUnitary:
    """Basis relabeling unitary: amplitude at k moves to map[k]."""

    map: tuple[int, ...]

    def __post_init__(self) -> None:
        image = tuple(int(k) for k in self.map)
        if sorted(image) != list(range(len(image))):
            raise ValueError("map must be a bijection of 0..dim-1")
        object.__setattr__(self, "map", image)

    @property
    def dim(self) -> int:
        return len(self.map)


def make_qubit_state(angles: BlochAngles) -> PureState:
    """Statevector (cos(theta/2), e^{i phi} sin(theta/2)) of one qubit."""
    half = 0.5 * angles.theta
    return PureState(
        np.array([math.cos(half), np.exp(1j * angles.phi) * math.sin(half)])
    )


def tensor_product(a: PureState, b: PureState) -> PureState:
    """Joint state with the first factor as the slow index.

    Combined basis index is (index_a * dim_b) + index_b.
    """
    return PureState(np.kron(a.amplitudes, b.amplitudes))


def _require_same_dim(dim_a: int, dim_b: int, what: str) -> None:
    if dim_a != dim_b:
        raise ValueError(f"dimension mismatch in {what}: {dim_a} vs {dim_b}")


def project(
    state: PureState, proj: DiagonalProjector
) -> tuple[float, PureState | None]:
    """Born probability of a projector and the collapsed state.

    Returns (probability, collapsed). The collapsed state is None when the
    probability does not exceed NULL_BRANCH_EPS, since renormalizing a
    numerically null branch would only amplify rounding noise.
    """
    _require_same_dim(proj.dim, state.dim, "project")
    idx = np.fromiter(proj.indices, dtype=np.intp, count=len(proj.indices))
    probability = float(np.sum(np.abs(state.amplitudes[idx]) ** 2))
    if probability <= NULL_BRANCH_EPS:
        return probability, None
    collapsed = np.zeros_like(state.amplitudes)
    collapsed[idx] = state.amplitudes[idx] / math.sqrt(probability)
    return probability, PureState(collapsed)


def sample_complete_measurement(
    state: PureState,
    projectors: Sequence[DiagonalProjector],
    u: float,
) -> tuple[int, PureState]:
    """Sample one outcome of a complete projective measurement.

    The outcome is the smallest index m whose cumulative Born probability,
    scanned in ascending outcome order, strictly exceeds u. The strict
    comparison makes runs bit-reproducible for a given u and means a
    zero-weight outcome is never realized.
    """
    if not 0.0 <= u < 1.0:
        raise ValueError(f"u must lie in [0, 1), got {u!r}")
    family = tuple(projectors)
    seen: set[int] = set()
    total_indices = 0
    for proj in family:
        _require_same_dim(proj.dim, state.dim, "sample_complete_measurement")
        seen.update(proj.indices)
        total_indices += len(proj.indices)
    if total_indices != state.dim or seen != set(range(state.dim)):
        raise ValueError("projector family must partition the basis")

    branches = [project(state, proj) for proj in family]
    total = sum(p for p, _ in branches)
    if abs(total - 1.0) > COMPLETENESS_ATOL:
        raise ValueError(f"projector family is not complete: total probability {total!r}")

    cumulative = 0.0
    chosen: tuple[int, PureState] | None = None
    for m, (probability, collapsed) in enumerate(branches):
        cumulative += probability
        if cumulative > u and collapsed is not None:
            chosen = (m, collapsed)
            break
    if chosen is None:
        # Reachable only when rounding leaves the total just below u; fall
        # back to the last realizable outcome.
        chosen = max(
            (m, c) for m, (p, c) in enumerate(branches) if c is not None
        )
    return chosen


def apply_permutation(state: PureState, unitary: PermutationUnitary) -> PureState:
    """Relabel basis indices: the new amplitude at map[k] is the old one at k."""
    _require_same_dim(unitary.dim, state.dim, "apply_permutation")
    out = np.empty_like(state.amplitudes)
    out[np.asarray(unitary.map, dtype=np.intp)] = state.amplitudes
    return PureState(out)


def fidelity(a: PureState, b: PureState) -> float:
    """Squared overlap |<a|b>|^2 between two pure states."""
    _require_same_dim(a.dim, b.dim, "fidelity")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def equal_up_to_global_phase(a: PureState, b: PureState, tol: float = 1e-12) -> bool:
    """Whether two states coincide physically, i.e. fidelity >= 1 - tol."""
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    return fidelity(a, b) >= 1.0 - tol
