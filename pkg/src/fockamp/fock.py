"""Truncated bosonic Fock spaces: ladder operators, diagonal states, exact moments.

Everything here is dense, desk-scale linear algebra on number-state bases.
States are stored as probability vectors over number states (phase-randomized
inputs make off-diagonal density-matrix terms irrelevant to every quantity we
compute); operators stay full complex matrices.  This module is the brute-force
oracle the amplification channels and closed-form noise formulas are checked
against.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

__all__ = [
    "FockSpace",
    "OperatorMatrix",
    "DiagonalState",
    "NumberStats",
    "TruncationError",
    "annihilation",
    "creation",
    "number_op",
    "identity",
    "tensor",
    "embed",
    "fock_state",
    "thermal_state",
    "empirical_state",
    "product_probs",
    "moments",
    "leakage",
    "default_cutoff",
    "check_truncation",
    "settle_cutoff",
]

LEAKAGE_TOP_LEVELS = 3
LEAKAGE_TOL = 1e-10


class TruncationError(RuntimeError):
    """A state carries non-negligible weight in the top levels of its space."""


@dataclass(frozen=True)
class FockSpace:
    """Number-state space truncated at occupation ``cutoff`` (dimension cutoff+1)."""

    cutoff: int

    def __post_init__(self):
        if not isinstance(self.cutoff, (int, np.integer)) or self.cutoff < 0:
            raise ValueError(f"cutoff must be a nonnegative integer, got {self.cutoff!r}")

    @property
    def dim(self) -> int:
        return self.cutoff + 1


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense complex matrix acting on a tensor product of Fock spaces."""

    spaces: tuple[FockSpace, ...]
    mat: np.ndarray

    def __post_init__(self):
        spaces = tuple(self.spaces)
        object.__setattr__(self, "spaces", spaces)
        mat = _frozen_array(self.mat, complex)
        side = math.prod(sp.dim for sp in spaces)
        if mat.ndim != 2 or mat.shape != (side, side):
            raise ValueError(f"matrix shape {mat.shape} does not match factor dimensions (side {side})")
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def dagger(self) -> "OperatorMatrix":
        return OperatorMatrix(self.spaces, self.mat.conj().T)

    def _check_same_shape(self, other: "OperatorMatrix"):
        if self.spaces != other.spaces:
            raise ValueError("operators act on different space shapes")

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_same_shape(other)
        return OperatorMatrix(self.spaces, self.mat @ other.mat)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_same_shape(other)
        return OperatorMatrix(self.spaces, self.mat + other.mat)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_same_shape(other)
        return OperatorMatrix(self.spaces, self.mat - other.mat)

    def __rmul__(self, scalar) -> "OperatorMatrix":
        return OperatorMatrix(self.spaces, scalar * self.mat)


@dataclass(frozen=True)
class DiagonalState:
    """Probability vector over the number states of a single space."""

    space: FockSpace
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (self.space.dim,):
            raise ValueError(f"probability vector length {probs.shape} does not match dimension {self.space.dim}")
        if np.any(probs < 0):
            raise ValueError("probabilities must be nonnegative")
        total = float(probs.sum())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {total}, expected 1 within 1e-12")
        object.__setattr__(self, "probs", _frozen_array(probs, float))

    def number_stats(self) -> "NumberStats":
        n = np.arange(self.space.dim)
        mean = float(self.probs @ n)
        var = float(self.probs @ (n * n)) - mean * mean
        return NumberStats(mean, max(var, 0.0))


@dataclass(frozen=True)
class NumberStats:
    """(mean, variance) pair of a number observable."""

    mean: float
    variance: float

    def __post_init__(self):
        if self.variance < -1e-9:
            raise ValueError(f"variance must be nonnegative, got {self.variance}")
        object.__setattr__(self, "variance", max(float(self.variance), 0.0))
        object.__setattr__(self, "mean", float(self.mean))


def annihilation(space: FockSpace) -> OperatorMatrix:
    """Ladder operator with entries <n-1|a|n> = sqrt(n)."""
    mat = np.diag(np.sqrt(np.arange(1, space.dim, dtype=float)), k=1)
    return OperatorMatrix((space,), mat)


def creation(space: FockSpace) -> OperatorMatrix:
    return annihilation(space).dagger()


def number_op(space: FockSpace) -> OperatorMatrix:
    """diag(0, 1, ..., s)."""
    return OperatorMatrix((space,), np.diag(np.arange(space.dim, dtype=float)))


def identity(space: FockSpace) -> OperatorMatrix:
    return OperatorMatrix((space,), np.eye(space.dim))


def tensor(*ops: OperatorMatrix) -> OperatorMatrix:
    """Kronecker product, factor order preserved."""
    if not ops:
        raise ValueError("tensor() needs at least one operator")
    mat = ops[0].mat
    spaces = list(ops[0].spaces)
    for op in ops[1:]:
        mat = np.kron(mat, op.mat)
        spaces.extend(op.spaces)
    return OperatorMatrix(tuple(spaces), mat)


def embed(op: OperatorMatrix, factor_index: int, full_shape: Sequence[FockSpace]) -> OperatorMatrix:
    """Lift a single-factor operator to the full product space with identities elsewhere."""
    full_shape = tuple(full_shape)
    if not 0 <= factor_index < len(full_shape):
        raise IndexError(f"factor index {factor_index} out of range for {len(full_shape)} factors")
    if op.spaces != (full_shape[factor_index],):
        raise ValueError("operator does not act on the factor at the given index")
    factors = [identity(sp) for sp in full_shape]
    factors[factor_index] = op
    return tensor(*factors)


def fock_state(space: FockSpace, n: int) -> DiagonalState:
    if not 0 <= n <= space.cutoff:
        raise ValueError(f"occupation {n} exceeds cutoff {space.cutoff}")
    probs = np.zeros(space.dim)
    probs[n] = 1.0
    return DiagonalState(space, probs)


def thermal_state(space: FockSpace, nbar: float) -> DiagonalState:
    """Geometric number distribution with mean ``nbar``, renormalized over 0..s.

    Truncation is renormalized rather than clipped, so the probabilities sum to
    one exactly; the bias this introduces is controlled by the leakage check.
    """
    if nbar < 0:
        raise ValueError(f"mean occupation must be nonnegative, got {nbar}")
    if nbar == 0:
        return fock_state(space, 0)
    q = nbar / (nbar + 1.0)
    weights = q ** np.arange(space.dim)
    return DiagonalState(space, weights / weights.sum())


def empirical_state(space: FockSpace, probs: Sequence[float]) -> DiagonalState:
    """State from a caller-supplied weight vector (renormalized)."""
    weights = np.asarray(probs, dtype=float)
    if weights.shape != (space.dim,):
        raise ValueError(f"weight vector length {weights.shape} does not match dimension {space.dim}")
    if np.any(weights < 0):
        raise ValueError("weights must be nonnegative")
    total = weights.sum()
    if total <= 0:
        raise ValueError("weights must not all vanish")
    return DiagonalState(space, weights / total)


StateLike = Union[DiagonalState, Sequence[DiagonalState]]


def product_probs(states: Sequence[DiagonalState]) -> np.ndarray:
    """Joint probability vector of independent factors (Kronecker of the marginals)."""
    probs = states[0].probs
    for st in states[1:]:
        probs = np.kron(probs, st.probs)
    return probs


def moments(state: StateLike, observable: OperatorMatrix) -> NumberStats:
    """Exact <O> and <O^2> - <O>^2 of an observable against a diagonal state.

    ``state`` is either a DiagonalState on the observable's full (flattened)
    index space or a list of per-factor DiagonalStates, taken as independent.
    No diagonality is assumed for the observable itself: the second moment uses
    the full matrix square.
    """
    if isinstance(state, DiagonalState):
        probs = state.probs
    else:
        probs = product_probs(list(state))
    if probs.shape[0] != observable.dim:
        raise ValueError(f"state dimension {probs.shape[0]} does not match operator side {observable.dim}")
    diag_o = observable.mat.diagonal()
    diag_o2 = np.einsum("ij,ji->i", observable.mat, observable.mat)
    mean = float(np.real(probs @ diag_o))
    second = float(np.real(probs @ diag_o2))
    return NumberStats(mean, max(second - mean * mean, 0.0))


def leakage(state: DiagonalState, top_k: int) -> float:
    """Total probability in the ``top_k`` highest number states."""
    if not 0 <= top_k <= state.space.dim:
        raise ValueError(f"top_k must lie in [0, {state.space.dim}], got {top_k}")
    if top_k == 0:
        return 0.0
    return float(state.probs[-top_k:].sum())


def default_cutoff(n_b_mean: float, n_b_var: float, gain: float, n_a_max: int) -> int:
    """Starting cutoff for an amplification experiment.

    ceil(n_b + G*n_a_max + 10*sqrt(var_b + 1) + 10): mean reach of the amplified
    signal plus a ten-sigma-style pad.  Always validate with check_truncation;
    heavy-tailed reservoir states may need settle_cutoff to grow it further.
    """
    return math.ceil(n_b_mean + gain * n_a_max + 10.0 * math.sqrt(n_b_var + 1.0) + 10.0)


def check_truncation(*states: DiagonalState, top_levels: int = LEAKAGE_TOP_LEVELS, tol: float = LEAKAGE_TOL):
    """Abort when any state leaks more than ``tol`` into its top levels."""
    for st in states:
        k = min(top_levels, st.space.dim)
        leak = leakage(st, k)
        if leak > tol:
            raise TruncationError(
                f"cutoff {st.space.cutoff} inadequate: top-{k} leakage {leak:.3e} exceeds {tol:.0e}"
            )


def settle_cutoff(
    build_state: Callable[[int], DiagonalState],
    start: int,
    top_levels: int = LEAKAGE_TOP_LEVELS,
    tol: float = LEAKAGE_TOL,
    max_cutoff: int = 100_000,
) -> int:
    """Grow a cutoff from ``start`` until the leakage guard passes for the state."""
    s = max(start, top_levels)
    while s <= max_cutoff:
        if leakage(build_state(s), top_levels) <= tol:
            return s
        s = max(s + 8, int(1.5 * s))
    raise TruncationError(f"no adequate cutoff at or below {max_cutoff}")
