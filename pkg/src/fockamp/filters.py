"""Lossless pre-amplification frequency filtering and thermal-noise suppression.

A filter is a pointwise pair of transmission/reflection amplitudes with
|T|^2 + |R|^2 = 1; the filtered mode then feeds the single-mode amplifier at an
independent (typically much higher) frequency, where the reservoir occupancy is
Bose-Einstein suppressed.  Frequencies enter the occupancy only through the
dimensionless ratio hbar*omega / (k_B * temperature).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fock import DiagonalState, FockSpace, NumberStats, OperatorMatrix, annihilation, identity, moments, tensor

__all__ = [
    "HBAR_OVER_K",
    "TransferPair",
    "ThermalEnv",
    "lorentzian_transfer",
    "filtered_output_operator",
    "thermal_occupancy",
    "amplification_frequency_gain",
    "filtered_amplified_stats",
    "read_transfer_table",
]

# hbar / k_B in kelvin * seconds (CODATA hbar = 1.054571817e-34 J s, k_B = 1.380649e-23 J/K)
HBAR_OVER_K = 1.054571817e-34 / 1.380649e-23

UNITARITY_TOL = 1e-12
TABLE_UNITARITY_TOL = 1e-9


@dataclass(frozen=True)
class TransferPair:
    """Transmission/reflection amplitudes of a lossless filter at one frequency."""

    omega: float
    T: complex
    R: complex

    def __post_init__(self):
        miss = abs(abs(self.T) ** 2 + abs(self.R) ** 2 - 1.0)
        if miss > UNITARITY_TOL:
            raise ValueError(f"lossless filter requires |T|^2+|R|^2 = 1, off by {miss:.3e}")


@dataclass(frozen=True)
class ThermalEnv:
    """Temperature of the detector environment (kelvin)."""

    temperature: float
    hbar_over_k: float = HBAR_OVER_K

    def __post_init__(self):
        if self.temperature <= 0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")

    def ratio(self, omega: float) -> float:
        """Dimensionless hbar*omega / (k_B T)."""
        return self.hbar_over_k * omega / self.temperature


def lorentzian_transfer(omega: float, omega0: float, gamma: float) -> TransferPair:
    """Single-pole resonance: T = (g/2)/(i(w-w0)+g/2), R = i(w-w0)/(i(w-w0)+g/2).

    Perfectly transmitting on resonance and lossless at every detuning.  This
    is the default filter model; externally tabulated (T, R) pairs can be used
    anywhere a TransferPair is accepted.
    """
    if gamma <= 0:
        raise ValueError(f"linewidth must be positive, got {gamma}")
    denom = 1j * (omega - omega0) + gamma / 2.0
    return TransferPair(omega, complex((gamma / 2.0) / denom), complex(1j * (omega - omega0) / denom))


def filtered_output_operator(space_a: FockSpace, space_c: FockSpace, tp: TransferPair) -> OperatorMatrix:
    """Number operator of the filtered mode a_out = T a + R c on the (a, c) space."""
    a_out = tp.T * tensor(annihilation(space_a), identity(space_c)) + tp.R * tensor(
        identity(space_a), annihilation(space_c)
    )
    return a_out.dagger() @ a_out


def thermal_occupancy(omega: float, env: ThermalEnv) -> float:
    """Bose-Einstein mean occupation 1/(exp(hbar*omega/kT) - 1)."""
    if omega <= 0:
        raise ValueError(f"frequency must be positive, got {omega}")
    return 1.0 / math.expm1(env.ratio(omega))


def amplification_frequency_gain(omega_in: float, omega_amp: float, env: ThermalEnv) -> float:
    """Reservoir-occupancy suppression ratio nbar(omega_amp) / nbar(omega_in)."""
    return thermal_occupancy(omega_amp, env) / thermal_occupancy(omega_in, env)


def filtered_amplified_stats(
    tp: TransferPair, a: DiagonalState, c: DiagonalState, gain: int, b_env: NumberStats
) -> NumberStats:
    """Output-count statistics of filter-then-amplify into a single mode.

    The filtered photon number (exact moments of the two-mode operator) is
    amplified by integer G into a reservoir with the given occupation
    statistics: mean = nbar_b + G*mean_f, variance = var_b + G^2*var_f.
    """
    if not isinstance(gain, (int, np.integer)) or gain < 1:
        raise ValueError(f"gain must be an integer >= 1, got {gain!r}")
    filtered = moments([a, c], filtered_output_operator(a.space, c.space, tp))
    return NumberStats(b_env.mean + gain * filtered.mean, b_env.variance + gain * gain * filtered.variance)


def read_transfer_table(path) -> list[TransferPair]:
    """Load (omega, T, R) rows from CSV columns omega,T_re,T_im,R_re,R_im.

    Rows violating |T|^2+|R|^2 = 1 beyond 1e-9 are rejected with the row
    number; accepted rows are rescaled onto the lossless constraint so the
    stored pairs satisfy it at full precision.
    """
    pairs = []
    with open(Path(path), newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"omega", "T_re", "T_im", "R_re", "R_im"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ValueError(f"filter table must have columns {sorted(required)}")
        for lineno, row in enumerate(reader, start=2):
            t = complex(float(row["T_re"]), float(row["T_im"]))
            r = complex(float(row["R_re"]), float(row["R_im"]))
            norm = abs(t) ** 2 + abs(r) ** 2
            if abs(norm - 1.0) > TABLE_UNITARITY_TOL:
                raise ValueError(f"row {lineno}: |T|^2+|R|^2 off unity by {abs(norm - 1.0):.3e} (limit 1e-9)")
            scale = 1.0 / math.sqrt(norm)
            pairs.append(TransferPair(float(row["omega"]), t * scale, r * scale))
    return pairs
