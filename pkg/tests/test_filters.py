import math

import numpy as np
import pytest

from fockamp import (
    FockSpace,
    NumberStats,
    ThermalEnv,
    TransferPair,
    amplification_frequency_gain,
    filtered_amplified_stats,
    filtered_output_operator,
    fock_state,
    lorentzian_transfer,
    moments,
    read_transfer_table,
    thermal_occupancy,
    thermal_state,
    var_single_mode,
)

# environment chosen so that hbar*omega/kT = x maps to omega = x / SCALE
ENV = ThermalEnv(temperature=1.0, hbar_over_k=1.0)


class TestTransferPair:
    def test_lossless_enforced(self):
        TransferPair(1.0, complex(math.sqrt(0.5)), complex(0, math.sqrt(0.5)))
        with pytest.raises(ValueError):
            TransferPair(1.0, 0.9 + 0j, 0.1 + 0j)

    def test_resonance_is_exact(self):
        tp = lorentzian_transfer(5.0, 5.0, 0.5)
        assert tp.T == 1.0 + 0j
        assert tp.R == 0j

    def test_half_width_point(self):
        tp = lorentzian_transfer(1.0, 0.0, 2.0)  # detuning = gamma/2
        assert abs(tp.T) ** 2 == pytest.approx(0.5, abs=1e-15)
        assert abs(tp.R) ** 2 == pytest.approx(0.5, abs=1e-15)

    @pytest.mark.parametrize("omega", np.linspace(-40.0, 40.0, 17).tolist())
    def test_unitarity_identity(self, omega):
        tp = lorentzian_transfer(omega, 1.3, 0.7)
        assert abs(abs(tp.T) ** 2 + abs(tp.R) ** 2 - 1.0) <= 1e-12

    def test_transmission_monotone_off_resonance(self):
        t2 = [abs(lorentzian_transfer(2.0 + d, 2.0, 1.0).T) ** 2 for d in np.linspace(0, 10, 60)]
        assert all(b < a for a, b in zip(t2, t2[1:]))

    def test_linewidth_validation(self):
        with pytest.raises(ValueError):
            lorentzian_transfer(1.0, 1.0, 0.0)


class TestFilteredOperator:
    def test_perfect_transmission_passes_the_input(self):
        sa, sc = FockSpace(5), FockSpace(5)
        op = filtered_output_operator(sa, sc, TransferPair(1.0, 1.0 + 0j, 0j))
        for n in range(4):
            stats = moments([fock_state(sa, n), thermal_state(sc, 0.8)], op)
            assert stats.mean == pytest.approx(n, abs=1e-12)

    def test_full_reflection_swaps_in_the_internal_mode(self):
        sa, sc = FockSpace(5), FockSpace(6)
        op = filtered_output_operator(sa, sc, TransferPair(1.0, 0j, 1.0 + 0j))
        rho_c = thermal_state(sc, 0.5)
        stats = moments([fock_state(sa, 3), rho_c], op)
        assert stats.mean == pytest.approx(rho_c.number_stats().mean, abs=1e-12)

    def test_half_transmission_is_bernoulli(self):
        sa, sc = FockSpace(4), FockSpace(4)
        tp = lorentzian_transfer(1.0, 0.0, 2.0)  # |T|^2 = 1/2 exactly
        stats = moments([fock_state(sa, 1), fock_state(sc, 0)], filtered_output_operator(sa, sc, tp))
        assert stats.mean == pytest.approx(0.5, abs=1e-12)
        assert stats.variance == pytest.approx(0.25, abs=1e-12)


class TestThermalOccupancy:
    def test_hand_points(self):
        assert thermal_occupancy(math.log(2.0), ENV) == pytest.approx(1.0, rel=1e-12)
        assert thermal_occupancy(2.0 * math.log(2.0), ENV) == pytest.approx(1.0 / 3.0, rel=1e-12)

    def test_deep_suppression_matches_boltzmann_tail(self):
        # frozen from a 50-digit evaluation of 1/(e^30 - 1)
        value = thermal_occupancy(30.0, ENV)
        assert value == pytest.approx(9.357622968841050e-14, rel=1e-12)
        assert value == pytest.approx(math.exp(-30.0), rel=1e-6)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            thermal_occupancy(0.0, ENV)
        with pytest.raises(ValueError):
            ThermalEnv(-4.0)

    def test_physical_constants_scale(self):
        env = ThermalEnv(300.0)
        x = env.ratio(2.0e15)
        assert x == pytest.approx(1.054571817e-34 * 2.0e15 / (1.380649e-23 * 300.0), rel=1e-12)

    def test_log_occupancy_slope(self):
        omega = np.linspace(10.0, 40.0, 200)
        logs = [math.log(thermal_occupancy(w, ENV)) for w in omega]
        slope = np.polyfit(omega, logs, 1)[0]
        assert slope == pytest.approx(-1.0, rel=1e-6)


class TestFrequencyGain:
    def test_same_frequency(self):
        assert amplification_frequency_gain(3.0, 3.0, ENV) == 1.0

    def test_doubling_from_hand_points(self):
        ratio = amplification_frequency_gain(math.log(2.0), 2.0 * math.log(2.0), ENV)
        assert ratio == pytest.approx(1.0 / 3.0, rel=1e-12)

    def test_deep_regime_is_exponential(self):
        ratio = amplification_frequency_gain(20.0, 28.0, ENV)
        assert ratio == pytest.approx(math.exp(-8.0), rel=0.01)


class TestFilteredAmplifiedStats:
    def test_perfect_transmission_reduces_to_single_mode_noise(self):
        sa, sc = FockSpace(5), FockSpace(5)
        b_env = NumberStats(0.7, 1.9)
        out = filtered_amplified_stats(TransferPair(1.0, 1.0 + 0j, 0j), fock_state(sa, 1), fock_state(sc, 0), 50, b_env)
        assert out.mean == pytest.approx(0.7 + 50.0, abs=1e-12)
        assert out.variance == pytest.approx(1.9, abs=1e-12)
        assert out.variance == pytest.approx(
            var_single_mode(50, fock_state(sa, 1).number_stats(), b_env), abs=1e-12
        )

    def test_full_reflection_gives_background_only(self):
        sa, sc = FockSpace(4), FockSpace(4)
        b_env = NumberStats(0.3, 0.6)
        out = filtered_amplified_stats(TransferPair(1.0, 0j, 1.0 + 0j), fock_state(sa, 2), fock_state(sc, 0), 9, b_env)
        assert out.mean == pytest.approx(0.3, abs=1e-12)
        assert out.variance == pytest.approx(0.6, abs=1e-12)

    def test_bernoulli_amplification(self):
        sa, sc = FockSpace(4), FockSpace(4)
        tp = lorentzian_transfer(1.0, 0.0, 2.0)
        out = filtered_amplified_stats(tp, fock_state(sa, 1), fock_state(sc, 0), 2, NumberStats(0.0, 0.0))
        assert out.mean == pytest.approx(1.0, abs=1e-12)
        assert out.variance == pytest.approx(1.0, abs=1e-12)  # G^2 * p(1-p) = 4 * 1/4

    def test_reflected_thermal_mode_raises_the_noise(self):
        sa, sc = FockSpace(6), FockSpace(40)
        b_env = NumberStats(0.1, 0.2)
        perfect = filtered_amplified_stats(
            TransferPair(1.0, 1.0 + 0j, 0j), fock_state(sa, 1), fock_state(sc, 0), 6, b_env
        )
        leaky = filtered_amplified_stats(
            lorentzian_transfer(1.0, 0.0, 2.0), fock_state(sa, 1), thermal_state(sc, 0.8), 6, b_env
        )
        assert leaky.variance > perfect.variance

    def test_gain_validation(self):
        sa, sc = FockSpace(2), FockSpace(2)
        with pytest.raises(ValueError):
            filtered_amplified_stats(TransferPair(1.0, 1.0 + 0j, 0j), fock_state(sa, 0), fock_state(sc, 0), 0, NumberStats(0, 0))
        with pytest.raises(ValueError):
            filtered_amplified_stats(TransferPair(1.0, 1.0 + 0j, 0j), fock_state(sa, 0), fock_state(sc, 0), 2.5, NumberStats(0, 0))


class TestTransferTable:
    HEADER = "omega,T_re,T_im,R_re,R_im\n"

    def test_round_trips_lorentzian_samples(self, tmp_path):
        rows = [self.HEADER]
        for w in np.linspace(0.0, 4.0, 9):
            tp = lorentzian_transfer(float(w), 2.0, 1.0)
            rows.append(
                f"{float(w)!r},{tp.T.real!r},{tp.T.imag!r},{tp.R.real!r},{tp.R.imag!r}\n"
            )
        path = tmp_path / "filter.csv"
        path.write_text("".join(rows))
        pairs = read_transfer_table(path)
        assert len(pairs) == 9
        for w, tp in zip(np.linspace(0.0, 4.0, 9), pairs):
            ref = lorentzian_transfer(float(w), 2.0, 1.0)
            assert abs(tp.T - ref.T) <= 1e-12 and abs(tp.R - ref.R) <= 1e-12

    def test_rejects_lossy_row_with_its_number(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(self.HEADER + "1.0,1.0,0.0,0.0,0.0\n2.0,0.8,0.0,0.1,0.0\n")
        with pytest.raises(ValueError, match="row 3"):
            read_transfer_table(path)

    def test_requires_all_columns(self, tmp_path):
        path = tmp_path / "short.csv"
        path.write_text("omega,T_re\n1.0,1.0\n")
        with pytest.raises(ValueError, match="columns"):
            read_transfer_table(path)

    def test_accepts_small_unitarity_slack(self, tmp_path):
        # off unity by 1e-10: inside the 1e-9 gate, rescaled on load
        t = math.sqrt(0.5 + 5e-11)
        r = math.sqrt(0.5)
        path = tmp_path / "slack.csv"
        path.write_text(self.HEADER + f"1.0,{t!r},0.0,{r!r},0.0\n")
        (pair,) = read_transfer_table(path)
        assert abs(abs(pair.T) ** 2 + abs(pair.R) ** 2 - 1.0) <= 1e-12
