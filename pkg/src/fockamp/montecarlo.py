"""Seeded Monte Carlo photon-counting sampler.

Every amplification model reduces to one closed-form combination per trial:

    output = sum_j  w_j * (reservoir draw j)  +  signal

with integer weights fixed by the model (per-step gain factors for cascades,
all ones for parallel modes) and a deterministic signal of G excitations per
input photon.  Draw (t, j) comes from a counter-based generator keyed on
(seed, t, j), so trials are reproducible under any execution order or split,
and all estimator sums are exact integer arithmetic, making the returned
statistics bitwise deterministic.

Reservoir draws use untruncated laws (the geometric law for thermal states),
so this module is the truncation-free statistical oracle for the closed-form
variances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .fock import NumberStats
from .noise import (
    steps_for,
    var_g_modes,
    var_multistep_multi,
    var_multistep_single,
    var_single_mode,
)

__all__ = [
    "ReservoirSpec",
    "ScenarioSpec",
    "SampleStats",
    "CounterStream",
    "sample_reservoir",
    "reservoir_draws",
    "run_scenario",
    "run_shelving",
    "run_multiplexed",
    "analytic_variance",
]

MC_MODELS = ("SingleMode", "GModes", "MultiStepSingle", "MultiStepMulti", "Multiplexed", "Shelving")

_MASK = (1 << 64) - 1
_PHI = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_BLOCK = 1 << 17


def _mix_int(z: int) -> int:
    """64-bit finalizer (SplitMix64 style) on plain Python integers."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def _mix_u64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def _stream_keys(seed: int, draw_index: int) -> tuple[int, int]:
    base = _mix_int((seed & _MASK) ^ _mix_int((draw_index + 1) * _PHI))
    return base, _mix_int(base + _MIX2)


def _uniforms(seed: int, draw_index: int, start: int, count: int) -> np.ndarray:
    """Uniforms in [0, 1) for trials start..start+count-1 of one draw slot."""
    key1, key2 = _stream_keys(seed, draw_index)
    t = np.arange(start, start + count, dtype=np.uint64)
    state = t * np.uint64(_PHI) + np.uint64(key1)
    z = _mix_u64(_mix_u64(state) ^ np.uint64(key2))
    return (z >> np.uint64(11)) * (2.0**-53)


@dataclass(frozen=True)
class ReservoirSpec:
    """Occupation-number law of one reservoir mode."""

    kind: str  # "fock" | "thermal" | "empirical"
    n: int = 0
    nbar: float = 0.0
    probs: Optional[tuple] = None

    def __post_init__(self):
        if self.kind == "fock":
            if self.n < 0:
                raise ValueError(f"fock occupation must be nonnegative, got {self.n}")
        elif self.kind == "thermal":
            if self.nbar < 0:
                raise ValueError(f"thermal mean must be nonnegative, got {self.nbar}")
        elif self.kind == "empirical":
            p = np.asarray(self.probs, dtype=float)
            if p.ndim != 1 or p.size == 0:
                raise ValueError("empirical law needs a nonempty probability vector")
            if np.any(p < 0):
                raise ValueError("empirical probabilities must be nonnegative")
            if abs(float(p.sum()) - 1.0) > 1e-12:
                raise ValueError(f"empirical probabilities sum to {p.sum()}, expected 1 within 1e-12")
            object.__setattr__(self, "probs", tuple(float(x) for x in p))
        else:
            raise ValueError(f"unknown reservoir kind {self.kind!r}")

    @classmethod
    def fock(cls, n: int) -> "ReservoirSpec":
        return cls("fock", n=n)

    @classmethod
    def thermal(cls, nbar: float) -> "ReservoirSpec":
        return cls("thermal", nbar=float(nbar))

    @classmethod
    def empirical(cls, probs: Sequence[float]) -> "ReservoirSpec":
        return cls("empirical", probs=tuple(probs))

    @property
    def stats(self) -> NumberStats:
        if self.kind == "fock":
            return NumberStats(float(self.n), 0.0)
        if self.kind == "thermal":
            return NumberStats(self.nbar, self.nbar * (self.nbar + 1.0))
        p = np.asarray(self.probs)
        n = np.arange(p.size)
        mean = float(p @ n)
        return NumberStats(mean, float(p @ (n * n)) - mean * mean)

    @property
    def label(self) -> str:
        if self.kind == "fock":
            return f"fock({self.n})"
        if self.kind == "thermal":
            return f"thermal({self.nbar:g})"
        return f"empirical(len={len(self.probs)})"

    def _draw_block(self, u: np.ndarray) -> np.ndarray:
        if self.kind == "fock":
            return np.full(u.shape, self.n, dtype=np.int64)
        if self.kind == "thermal":
            if self.nbar == 0.0:
                return np.zeros(u.shape, dtype=np.int64)
            q = self.nbar / (self.nbar + 1.0)
            return np.floor(np.log1p(-u) / math.log(q)).astype(np.int64)
        cdf = np.cumsum(np.asarray(self.probs))
        idx = np.searchsorted(cdf, u, side="right")
        return np.minimum(idx, len(self.probs) - 1).astype(np.int64)


class CounterStream:
    """One-at-a-time view of the counter-based generator, for single draws."""

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed)
        self.stream = int(stream)
        self._k = 0

    def uniform(self) -> float:
        u = float(_uniforms(self.seed, self._k, self.stream, 1)[0])
        self._k += 1
        return u


def sample_reservoir(spec: ReservoirSpec, stream: CounterStream) -> int:
    """One occupation-number draw from the reservoir law."""
    u = np.array([stream.uniform()])
    return int(spec._draw_block(u)[0])


def reservoir_draws(spec: ReservoirSpec, count: int, seed: int, draw_index: int = 0) -> np.ndarray:
    """Vectorized draws for trials 0..count-1 of one draw slot."""
    return spec._draw_block(_uniforms(seed, draw_index, 0, count))


@dataclass(frozen=True)
class SampleStats:
    """Estimators from one scenario run (variance unbiased, its error bar from m4)."""

    count: int
    mean: float
    variance: float
    std_error_of_variance: float

    def __post_init__(self):
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")
        if self.variance < 0:
            raise ValueError(f"variance must be nonnegative, got {self.variance}")


@dataclass(frozen=True)
class ScenarioSpec:
    """One photon-counting scenario: model, gain structure, reservoir, trial plan."""

    model: str
    input_n_a: int
    reservoir: ReservoirSpec
    trials: int
    seed: int
    gain_G: Optional[int] = None
    step_gain_g: Optional[int] = None
    steps_N: Optional[int] = None
    cavity_mode_count: Optional[int] = None
    mode_budget: Optional[int] = None

    def __post_init__(self):
        if self.model not in MC_MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        for name in ("input_n_a", "trials", "seed", "gain_G", "step_gain_g", "steps_N", "cavity_mode_count", "mode_budget"):
            value = getattr(self, name)
            if value is not None and (isinstance(value, bool) or not isinstance(value, (int, np.integer))):
                raise ValueError(f"{name} must be an integer, got {value!r}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.input_n_a < 0:
            raise ValueError(f"input photon number must be nonnegative, got {self.input_n_a}")
        if self.model in ("MultiStepSingle", "MultiStepMulti"):
            if self.step_gain_g is None or self.steps_N is None:
                raise ValueError(f"{self.model} requires step_gain_g and steps_N")
            if self.step_gain_g < 2 or self.steps_N < 1:
                raise ValueError("step gain must be >= 2 and steps >= 1")
            total = self.step_gain_g**self.steps_N
            if self.gain_G is not None and self.gain_G != total:
                raise ValueError(f"gain_G = {self.gain_G} inconsistent with g**N = {total}")
            object.__setattr__(self, "gain_G", total)
        else:
            if self.gain_G is None or self.gain_G < 1:
                raise ValueError(f"{self.model} requires an integer gain >= 1")
        if self.model == "Shelving":
            m = self.cavity_mode_count
            if m is None or not 1 <= m <= self.gain_G:
                raise ValueError(f"cavity mode count must lie in [1, G], got {m}")
        if self.model == "Multiplexed":
            budget = self.mode_budget if self.mode_budget is not None else self.input_n_a
            if budget < self.input_n_a:
                raise ValueError(f"mode budget {budget} below input photon number {self.input_n_a}")
            object.__setattr__(self, "mode_budget", budget)


def _weights_and_signal(spec: ScenarioSpec) -> tuple[list[int], int]:
    """Per-draw weights and the deterministic signal count for one trial."""
    big_g = spec.gain_G
    n_a = spec.input_n_a
    if spec.model == "SingleMode":
        return [1], big_g * n_a
    if spec.model == "GModes":
        return [1] * big_g, big_g * n_a
    if spec.model == "MultiStepSingle":
        g, n_steps = spec.step_gain_g, spec.steps_N
        return [g ** (n_steps - k) for k in range(1, n_steps + 1)], big_g * n_a
    if spec.model == "MultiStepMulti":
        # Step n feeds g**n fresh modes whose noise the remaining N-n steps
        # amplify by g**(N-n); the final readout sums the g**N last-step modes.
        g, n_steps = spec.step_gain_g, spec.steps_N
        weights: list[int] = []
        for n in range(1, n_steps + 1):
            weights.extend([g ** (n_steps - n)] * (g**n))
        return weights, big_g * n_a
    if spec.model == "Multiplexed":
        return [1] * (big_g * spec.mode_budget), big_g * n_a
    # Shelving: G fluorescence quanta per absorbed photon spread over the
    # cavity modes; each mode carries one independent reservoir draw.
    return [1] * spec.cavity_mode_count, big_g * n_a


def analytic_variance(spec: ScenarioSpec) -> float:
    """Closed-form output variance for the scenario (fixed n_a, so no input noise)."""
    a = NumberStats(float(spec.input_n_a), 0.0)
    b = spec.reservoir.stats
    if spec.model == "SingleMode":
        return var_single_mode(spec.gain_G, a, b)
    if spec.model == "GModes":
        return var_g_modes(spec.gain_G, a, b)
    if spec.model == "MultiStepSingle":
        return var_multistep_single(spec.gain_G, spec.step_gain_g, a, b)
    if spec.model == "MultiStepMulti":
        return var_multistep_multi(spec.gain_G, spec.step_gain_g, a, b)
    if spec.model == "Multiplexed":
        return spec.gain_G * spec.mode_budget * b.variance
    return spec.cavity_mode_count * b.variance  # Shelving


def _power_sums(spec: ScenarioSpec, trial_offset: int) -> tuple[int, int, int, int]:
    """Exact integer sums of x, x^2, x^3, x^4 over all trial outputs."""
    weights, signal = _weights_and_signal(spec)
    s1 = s2 = s3 = s4 = 0
    done = 0
    while done < spec.trials:
        count = min(_BLOCK, spec.trials - done)
        start = trial_offset + done
        x = np.full(count, signal, dtype=np.int64)
        for j, w in enumerate(weights):
            if spec.reservoir.kind == "fock":
                x += w * spec.reservoir.n
            else:
                u = _uniforms(spec.seed, j, start, count)
                x += w * spec.reservoir._draw_block(u)
        xmax = int(x.max())
        if xmax > 0 and xmax**4 * count > 2**62:
            # fall back to exact big-int accumulation for extreme counts
            for v in x.tolist():
                s1 += v
                s2 += v * v
                s3 += v * v * v
                s4 += v * v * v * v
        else:
            x2 = x * x
            s1 += int(x.sum())
            s2 += int(x2.sum())
            s3 += int((x2 * x).sum())
            s4 += int((x2 * x2).sum())
        done += count
    return s1, s2, s3, s4


def _stats_from_power_sums(n: int, s1: int, s2: int, s3: int, s4: int) -> SampleStats:
    mean = s1 / n
    if n == 1:
        return SampleStats(1, mean, 0.0, 0.0)
    # exact integer numerators keep the results independent of summation order
    ss = s2 - (s1 * s1) / n
    variance = max(ss / (n - 1), 0.0)
    m2 = max(ss / n, 0.0)
    m4 = (s4 - 4.0 * mean * s3 + 6.0 * mean * mean * s2 - 4.0 * mean**3 * s1) / n + mean**4
    var_of_var = (m4 - (n - 3) / (n - 1) * m2 * m2) / n
    return SampleStats(n, mean, variance, math.sqrt(max(var_of_var, 0.0)))


def run_scenario(spec: ScenarioSpec, trial_offset: int = 0) -> SampleStats:
    """Simulate the scenario and return output-count estimators.

    Trial t draws from substreams keyed on (seed, trial_offset + t, draw slot),
    so a run of 2T trials decomposes exactly into two T-trial runs at offsets
    0 and T.
    """
    return _stats_from_power_sums(spec.trials, *_power_sums(spec, trial_offset))


def run_shelving(spec: ScenarioSpec, trial_offset: int = 0) -> SampleStats:
    """Fluorescence readout with a configurable number of cavity output modes.

    cavity_mode_count = G reproduces the G-mode model; = 1 reproduces the
    single-mode optimum (bitwise, given the same seed policy).
    """
    if spec.model != "Shelving":
        raise ValueError(f"expected a Shelving scenario, got {spec.model!r}")
    return run_scenario(spec, trial_offset)


def run_multiplexed(
    gain: int,
    n: int,
    reservoir: ReservoirSpec,
    trials: int,
    seed: int,
    mode_budget: Optional[int] = None,
) -> SampleStats:
    """Photon-number multiplexing: one excitation in each of G*n out of G*budget modes."""
    spec = ScenarioSpec(
        model="Multiplexed",
        input_n_a=n,
        reservoir=reservoir,
        trials=trials,
        seed=seed,
        gain_G=gain,
        mode_budget=mode_budget,
    )
    return run_scenario(spec)
