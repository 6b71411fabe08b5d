import math

import pytest

from fockamp import (
    FockSpace,
    Mechanism,
    NumberStats,
    caves_number_out,
    fock_state,
    moments,
    nonlinear_bout,
    phase_sensitive_number_out,
    settle_cutoff,
    snr,
    snr_curve,
    thermal_state,
    var_caves,
    var_g_modes,
    var_multistep_multi,
    var_multistep_single,
    var_phase_sensitive,
    var_single_mode,
)
from fockamp.fock import default_cutoff
from fockamp.noise import steps_for


A0 = NumberStats(0.0, 0.0)
INPUTS = {
    "fock1": NumberStats(1.0, 0.0),
    "mixed": NumberStats(2.0, 3.0),
    "thermalish": NumberStats(1.0, 2.0),
}


class TestVarianceFormulas:
    def test_caves_gain_one(self):
        a = NumberStats(1.4, 0.9)
        assert var_caves(1.0, a, INPUTS["thermalish"]) == a.variance

    def test_caves_plug_ins(self):
        assert var_caves(2.0, INPUTS["fock1"], A0) == 4.0
        assert var_caves(3.0, INPUTS["fock1"], INPUTS["thermalish"]) == 38.0

    def test_phase_sensitive_gain_one(self):
        a = NumberStats(0.3, 0.25)
        assert var_phase_sensitive(1.0, a) == a.variance

    def test_phase_sensitive_plug_ins(self):
        assert var_phase_sensitive(2.0, A0) == 4.0
        assert var_phase_sensitive(2.0, INPUTS["fock1"]) == 12.0

    def test_single_mode_plug_ins(self):
        assert var_single_mode(10, INPUTS["fock1"], NumberStats(0.7, 2.0)) == 2.0
        assert var_single_mode(1, NumberStats(1.0, 1.0), A0) == 1.0
        assert var_single_mode(5, INPUTS["mixed"], INPUTS["thermalish"]) == 77.0

    def test_g_modes_plug_ins(self):
        a, b = INPUTS["fock1"], INPUTS["thermalish"]
        assert var_g_modes(1, a, b) == var_single_mode(1, a, b)
        assert var_g_modes(4, a, b) == 8.0
        assert var_g_modes(100, A0, NumberStats(0.5, 1.0)) == 100.0

    def test_multistep_single_plug_ins(self):
        a, b = INPUTS["fock1"], NumberStats(0.4, 1.0)
        assert var_multistep_single(5, 5, a, b) == var_single_mode(5, a, b)
        assert var_multistep_single(8, 2, a, b) == 21.0
        assert var_multistep_single(9, 3, A0, NumberStats(0.4, 2.0)) == 20.0

    def test_multistep_multi_plug_ins(self):
        a, b = INPUTS["fock1"], NumberStats(0.4, 1.0)
        assert var_multistep_multi(5, 5, a, b) == var_g_modes(5, a, b)
        assert var_multistep_multi(8, 2, a, b) == 56.0 + 64.0 * 0.0
        assert var_multistep_multi(9, 3, A0, b) == 36.0

    def test_gain_validation(self):
        with pytest.raises(ValueError):
            var_caves(0.5, A0, A0)
        with pytest.raises(ValueError):
            var_single_mode(2.5, A0, A0)
        with pytest.raises(ValueError):
            var_g_modes(0, A0, A0)
        with pytest.raises(ValueError):
            var_multistep_single(10, 3, A0, A0)  # 10 is not a power of 3
        with pytest.raises(ValueError):
            var_multistep_multi(12, 2, A0, A0)

    def test_reservoir_prefactor_is_exactly_one(self):
        # the noise floor: no admissible transformation can push this below 1
        for gain in (1, 7, 40):
            for s2 in (0.3, 1.0, 2.6):
                assert var_single_mode(gain, NumberStats(5.0, 0.0), NumberStats(0.4, s2)) == s2


class TestMechanism:
    def test_multistep_requires_exact_power(self):
        Mechanism("MultiStepSingleMode", 8, 2)
        with pytest.raises(ValueError):
            Mechanism("MultiStepSingleMode", 10, 3)
        with pytest.raises(ValueError):
            Mechanism("MultiStepMultiMode", 8, 2, steps_N=2)

    def test_constructors_fill_steps(self):
        m = Mechanism.multistep_multi(2, 5)
        assert (m.gain_G, m.step_gain_g, m.steps_N) == (32, 2, 5)
        assert steps_for(32, 2) == 5

    def test_integer_gain_for_nonlinear_tags(self):
        with pytest.raises(ValueError):
            Mechanism.single_mode(2.5)
        Mechanism.phase_insensitive(2.5)  # linear gains stay real

    def test_unknown_tag(self):
        with pytest.raises(ValueError):
            Mechanism("Quadratic", 2)


class TestSnr:
    def test_point_values(self):
        assert snr(Mechanism.single_mode(100), 1, 1.0) == 100.0
        assert snr(Mechanism.g_modes(100), 1, 1.0) == 10.0
        assert snr(Mechanism.phase_sensitive(2.0), 1, 1.0) == pytest.approx(1.5, abs=1e-15)

    def test_phase_insensitive_saturates(self):
        value = snr(Mechanism.phase_insensitive(1e6), 1, 1.0)
        assert value == pytest.approx(1.000001, rel=1e-9)

    def test_infinite_sentinels(self):
        assert snr(Mechanism.phase_insensitive(1.0), 1, 1.0) == math.inf
        assert snr(Mechanism.phase_sensitive(1.0), 1, 1.0) == math.inf
        assert snr(Mechanism.single_mode(5), 1, 0.0) == math.inf
        assert snr(Mechanism.g_modes(5), 2, 0.0) == math.inf

    def test_phase_sensitive_ignores_reservoir_noise(self):
        m = Mechanism.phase_sensitive(3.0)
        assert snr(m, 2, 0.5) == snr(m, 2, 10.0)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            snr(Mechanism.single_mode(2), 0, 1.0)
        with pytest.raises(ValueError):
            snr(Mechanism.single_mode(2), 1, -0.1)

    def test_multistep_values(self):
        assert snr(Mechanism.multistep_single(2, 2), 1, 1.0) == pytest.approx(4 * math.sqrt(3) / math.sqrt(15))
        assert snr(Mechanism.multistep_multi(2, 2), 1, 1.0) == pytest.approx(2 / math.sqrt(3))


class TestSnrCurve:
    def test_linear_in_gain_for_single_mode(self):
        curve = snr_curve("SingleMode", [1, 2, 4], 2, 1.0)
        assert curve.values == (2.0, 4.0, 8.0)

    def test_phase_sensitive_curve(self):
        curve = snr_curve("PhaseSensitive", [2, 10_000], 1, 1.0)
        assert curve.values[0] == pytest.approx(1.5, abs=1e-15)
        assert curve.values[1] == pytest.approx(math.sqrt(2.0), rel=1e-4)

    def test_empty_grid(self):
        curve = snr_curve("GModes", [], 1, 1.0)
        assert curve.grid == () and curve.values == ()

    def test_invalid_grid_point_raises(self):
        with pytest.raises(ValueError):
            snr_curve("MultiStepMultiMode", [9, 10], 1, 1.0, step_gain=3)


class TestOrderings:
    @pytest.mark.parametrize("gain", [4, 16, 64, 256])
    def test_single_mode_beats_g_modes_beats_linear(self, gain):
        sm = snr(Mechanism.single_mode(gain), 1, 1.0)
        gm = snr(Mechanism.g_modes(gain), 1, 1.0)
        pi = snr(Mechanism.phase_insensitive(gain), 1, 1.0)
        assert sm > gm > pi

    @pytest.mark.parametrize("steps", range(2, 11))
    def test_two_per_step_multimode_trails_linear_bound(self, steps):
        gain = 2**steps
        assert snr(Mechanism.multistep_multi(2, steps), 1, 1.0) < snr(
            Mechanism.phase_insensitive(gain), 1, 1.0
        )

    @pytest.mark.parametrize("step_gain", [2, 4, 8])
    def test_cascades_interpolate_below_g_modes(self, step_gain):
        # multi-step cascades re-amplify early-stage noise by g**(N-k), so for
        # N >= 2 both cascade variants sit at or below the flat G-mode spread,
        # and the multi-mode cascade is always the noisier of the two
        gain = 64
        sm = snr(Mechanism.single_mode(gain), 1, 1.0)
        gm = snr(Mechanism.g_modes(gain), 1, 1.0)
        mss = snr(Mechanism("MultiStepSingleMode", gain, step_gain), 1, 1.0)
        msm = snr(Mechanism("MultiStepMultiMode", gain, step_gain), 1, 1.0)
        assert sm >= gm >= mss >= msm

    def test_one_step_cascades_recover_the_envelopes(self):
        assert snr(Mechanism.multistep_single(7, 1), 1, 1.0) == snr(Mechanism.single_mode(7), 1, 1.0)
        assert snr(Mechanism.multistep_multi(7, 1), 1, 1.0) == pytest.approx(
            snr(Mechanism.g_modes(7), 1, 1.0), rel=1e-15
        )

    def test_large_gain_limits(self):
        assert snr(Mechanism.phase_insensitive(1e4), 1, 1.0) == pytest.approx(1.0, rel=0.01)
        assert snr(Mechanism.phase_sensitive(1e4), 1, 1.0) == pytest.approx(math.sqrt(2), rel=0.01)


class TestMatrixOracleAgreement:
    @staticmethod
    def make_state(kind, par):
        # Fock inputs have no tail, so a small space is already exact; thermal
        # tails need the grown cutoff from the leakage policy.
        if kind == "fock":
            return fock_state(FockSpace(8), par)
        s = settle_cutoff(lambda k: thermal_state(FockSpace(k), par), default_cutoff(par, par * (par + 1), 3, 2))
        return thermal_state(FockSpace(s), par)

    @pytest.mark.parametrize("gain", [1.0, 2.0, 3.0])
    def test_caves_against_moments(self, gain):
        cases = [("fock", 1), ("thermal", 0.8)]
        for kind_a, par_a in cases:
            for kind_b, par_b in cases:
                rho_a = self.make_state(kind_a, par_a)
                rho_b = self.make_state(kind_b, par_b)
                got = moments([rho_a, rho_b], caves_number_out(rho_a.space, rho_b.space, gain)).variance
                want = var_caves(gain, rho_a.number_stats(), rho_b.number_stats())
                assert got == pytest.approx(want, rel=1e-8, abs=1e-8)

    @pytest.mark.parametrize("gain", [1.0, 1.5, 3.0])
    def test_phase_sensitive_against_moments(self, gain):
        for kind, par in (("fock", 2), ("thermal", 1.0)):
            rho = self.make_state(kind, par)
            got = moments(rho, phase_sensitive_number_out(rho.space, gain)).variance
            want = var_phase_sensitive(gain, rho.number_stats())
            assert got == pytest.approx(want, rel=1e-8, abs=1e-8)

    @pytest.mark.parametrize("gain", [1, 3, 5])
    def test_single_mode_exact_agreement(self, gain):
        sb, sa = FockSpace(45), FockSpace(3)
        rho_b, rho_a = thermal_state(sb, 1.0), fock_state(sa, 2)
        bout = nonlinear_bout(sb, sa, gain, 0.2)
        got = moments([rho_b, rho_a], bout.dagger() @ bout).variance
        want = var_single_mode(gain, rho_a.number_stats(), rho_b.number_stats())
        assert abs(got - want) <= 1e-12 * max(1.0, want)
