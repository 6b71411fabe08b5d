"""Closed-form output-number variances and signal-to-noise ratios.

One variance function per amplification mechanism, plus the SNR of each
mechanism for a fixed input photon number (signal = amplified-mode count minus
background, divided by the output standard deviation).  Linear-mechanism SNRs
are the upper bounds obtained for the most favorable input; nonlinear ones are
equalities.  Zero-noise denominators yield +inf rather than an error so gain
sweeps that include G = 1 stay plottable.
"""
from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from typing import Optional, Sequence

from .fock import NumberStats

__all__ = [
    "MECHANISM_TAGS",
    "Mechanism",
    "SnrCurve",
    "var_caves",
    "var_phase_sensitive",
    "var_single_mode",
    "var_g_modes",
    "var_multistep_single",
    "var_multistep_multi",
    "snr",
    "snr_curve",
]

MECHANISM_TAGS = (
    "PhaseInsensitive",
    "PhaseSensitive",
    "SingleMode",
    "GModes",
    "MultiStepSingleMode",
    "MultiStepMultiMode",
)
_LINEAR = ("PhaseInsensitive", "PhaseSensitive")
_MULTISTEP = ("MultiStepSingleMode", "MultiStepMultiMode")


def _check_real_gain(gain) -> float:
    g = float(gain)
    if g < 1.0:
        raise ValueError(f"gain must be >= 1, got {gain}")
    return g


def _check_integer_gain(gain) -> int:
    if isinstance(gain, bool) or not isinstance(gain, numbers.Real) or float(gain) != int(gain):
        raise ValueError(f"this mechanism requires an integer gain, got {gain!r}")
    g = int(gain)
    if g < 1:
        raise ValueError(f"gain must be >= 1, got {gain}")
    return g


def steps_for(total_gain: int, step_gain: int) -> int:
    """Number of steps N with step_gain**N == total_gain, exact integer arithmetic."""
    g = _check_integer_gain(step_gain)
    if g < 2:
        raise ValueError(f"step gain must be >= 2, got {step_gain}")
    total = _check_integer_gain(total_gain)
    n, power = 1, g
    while power < total:
        power *= g
        n += 1
    if power != total:
        raise ValueError(f"total gain {total_gain} is not a power of the step gain {step_gain}")
    return n


@dataclass(frozen=True)
class Mechanism:
    """Amplification mechanism label with its validated gain parameters."""

    tag: str
    gain_G: float
    step_gain_g: Optional[int] = None
    steps_N: Optional[int] = None

    def __post_init__(self):
        if self.tag not in MECHANISM_TAGS:
            raise ValueError(f"unknown mechanism tag {self.tag!r}")
        if self.tag in _MULTISTEP:
            g = self.step_gain_g
            if g is None:
                raise ValueError(f"{self.tag} requires a per-step gain")
            total = _check_integer_gain(self.gain_G)
            n = steps_for(total, g)
            if self.steps_N is not None and self.steps_N != n:
                raise ValueError(f"steps_N = {self.steps_N} inconsistent with {g}**N = {total}")
            object.__setattr__(self, "gain_G", total)
            object.__setattr__(self, "steps_N", n)
        elif self.tag in _LINEAR:
            object.__setattr__(self, "gain_G", _check_real_gain(self.gain_G))
        else:
            object.__setattr__(self, "gain_G", _check_integer_gain(self.gain_G))

    @classmethod
    def phase_insensitive(cls, gain: float) -> "Mechanism":
        return cls("PhaseInsensitive", gain)

    @classmethod
    def phase_sensitive(cls, gain: float) -> "Mechanism":
        return cls("PhaseSensitive", gain)

    @classmethod
    def single_mode(cls, gain: int) -> "Mechanism":
        return cls("SingleMode", gain)

    @classmethod
    def g_modes(cls, gain: int) -> "Mechanism":
        return cls("GModes", gain)

    @classmethod
    def multistep_single(cls, step_gain: int, steps: int) -> "Mechanism":
        return cls("MultiStepSingleMode", step_gain**steps, step_gain, steps)

    @classmethod
    def multistep_multi(cls, step_gain: int, steps: int) -> "Mechanism":
        return cls("MultiStepMultiMode", step_gain**steps, step_gain, steps)


def var_caves(gain: float, a: NumberStats, b: NumberStats) -> float:
    """Output-number variance of the phase-insensitive linear amplifier."""
    g = _check_real_gain(gain)
    return (
        g * g * a.variance
        + (g - 1.0) ** 2 * b.variance
        + g * (g - 1.0) * (2.0 * a.mean * b.mean + a.mean + b.mean + 1.0)
    )


def var_phase_sensitive(gain: float, a: NumberStats) -> float:
    """Output-number variance of the phase-sensitive linear amplifier."""
    g = _check_real_gain(gain)
    return (6.0 * g * (g - 1.0) + 1.0) * a.variance + 2.0 * g * (g - 1.0) * (
        a.mean * a.mean + a.mean + 1.0
    )


def var_single_mode(gain: int, a: NumberStats, b: NumberStats) -> float:
    """Single-mode nonlinear amplification: reservoir noise enters unamplified."""
    g = _check_integer_gain(gain)
    return b.variance + g * g * a.variance


def var_g_modes(gain: int, a: NumberStats, b: NumberStats) -> float:
    """Amplification into G independent reservoir modes, summed readout."""
    g = _check_integer_gain(gain)
    return g * b.variance + g * g * a.variance


def var_multistep_single(total_gain: int, step_gain: int, a: NumberStats, b: NumberStats) -> float:
    """N-step cascade into a single mode per step, total gain g**N."""
    steps_for(total_gain, step_gain)  # validates the pair
    big_g = float(total_gain)
    return (big_g * big_g - 1.0) / (step_gain * step_gain - 1.0) * b.variance + big_g * big_g * a.variance


def var_multistep_multi(total_gain: int, step_gain: int, a: NumberStats, b: NumberStats) -> float:
    """N-step cascade, each step amplifying one excitation into g modes."""
    steps_for(total_gain, step_gain)
    big_g = float(total_gain)
    return big_g * (big_g - 1.0) / (step_gain - 1.0) * b.variance + big_g * big_g * a.variance


def snr(mechanism: Mechanism, n_a: int, dn_b: float) -> float:
    """Signal-to-noise ratio for a fixed input photon number n_a.

    dn_b is the standard deviation of the reservoir occupation.  Returns +inf
    when the noise denominator vanishes (zero-noise reservoir, or G = 1 for the
    linear mechanisms, where no noise is added at all).
    """
    if n_a < 1:
        raise ValueError(f"n_a must be >= 1, got {n_a}")
    if dn_b < 0:
        raise ValueError(f"dn_b must be nonnegative, got {dn_b}")
    g_tot = mechanism.gain_G
    tag = mechanism.tag
    if tag == "PhaseSensitive":
        if g_tot == 1.0:
            return math.inf
        return (2.0 * g_tot - 1.0) / math.sqrt(2.0 * g_tot * (g_tot - 1.0)) * n_a
    if dn_b == 0.0:
        return math.inf
    if tag == "PhaseInsensitive":
        if g_tot == 1.0:
            return math.inf
        return g_tot / (g_tot - 1.0) * n_a / dn_b
    if tag == "SingleMode":
        return g_tot * n_a / dn_b
    if tag == "GModes":
        return math.sqrt(g_tot) * n_a / dn_b
    g_step = mechanism.step_gain_g
    if tag == "MultiStepSingleMode":
        return g_tot * math.sqrt(g_step * g_step - 1.0) * n_a / (math.sqrt(g_tot * g_tot - 1.0) * dn_b)
    # MultiStepMultiMode
    return math.sqrt(g_tot * (g_step - 1.0)) * n_a / (math.sqrt(g_tot - 1.0) * dn_b)


@dataclass(frozen=True)
class SnrCurve:
    """SNR values of one mechanism family over a gain grid."""

    tag: str
    step_gain_g: Optional[int]
    grid: tuple
    values: tuple
    n_a: int
    dn_b: float

    def __post_init__(self):
        if len(self.grid) != len(self.values):
            raise ValueError("grid and SNR value lists must have equal length")
        object.__setattr__(self, "grid", tuple(self.grid))
        object.__setattr__(self, "values", tuple(self.values))


def mechanism_for(tag: str, gain, step_gain: Optional[int] = None) -> Mechanism:
    """Build a validated Mechanism for one grid point of a family."""
    if tag in _MULTISTEP:
        if step_gain is None:
            raise ValueError(f"{tag} requires a per-step gain")
        return Mechanism(tag, gain, step_gain)
    return Mechanism(tag, gain)


def snr_curve(
    tag: str, grid: Sequence, n_a: int, dn_b: float, step_gain: Optional[int] = None
) -> SnrCurve:
    """Elementwise SNR over a gain grid; invalid grid points raise."""
    values = tuple(snr(mechanism_for(tag, g, step_gain), n_a, dn_b) for g in grid)
    return SnrCurve(tag, step_gain, tuple(grid), values, n_a, dn_b)
