"""Self-contained invariant suite behind the ``verify`` CLI command.

Each check exercises one contract of the operator algebra, the amplification
channels, the closed-form noise expressions, or the filtering pipeline, and
reports a measured figure alongside its verdict.  All checks are deterministic
given the configured seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import channels, filters, noise
from .fock import (
    DiagonalState,
    FockSpace,
    NumberStats,
    OperatorMatrix,
    TruncationError,
    annihilation,
    check_truncation,
    default_cutoff,
    embed,
    fock_state,
    identity,
    leakage,
    moments,
    number_op,
    settle_cutoff,
    tensor,
    thermal_state,
)

__all__ = ["CheckResult", "VerifyConfig", "run_checks"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class VerifyConfig:
    cutoff: Optional[int] = None  # overrides the heuristic when set
    gain: Optional[float] = None
    seed: int = 2024
    fixed_phase: Optional[float] = None


def _thermal_space(nbar: float, gain: float, n_a_max: int, override: Optional[int]) -> FockSpace:
    """Cutoff from the heuristic (grown until the leakage guard passes), or the override."""
    if override is not None:
        return FockSpace(override)
    start = default_cutoff(nbar, nbar * (nbar + 1.0), gain, n_a_max)
    return FockSpace(settle_cutoff(lambda s: thermal_state(FockSpace(s), nbar), start))


def _rel_err(value: float, reference: float) -> float:
    return abs(value - reference) / max(1.0, abs(reference))


def run_checks(cfg: VerifyConfig = VerifyConfig()) -> list[CheckResult]:
    checks: list[tuple[str, Callable[[], tuple[bool, str]]]] = []
    rng = np.random.default_rng(cfg.seed)
    gain = cfg.gain if cfg.gain is not None else 3.0

    def check(name):
        def deco(fn):
            checks.append((name, fn))
            return fn

        return deco

    # ---------------------------------------------------------------- fock core

    @check("ladder commutator pattern")
    def _():
        sp = FockSpace(12)
        a = annihilation(sp)
        comm = channels.commutator(a, a.dagger()).mat
        expected = np.eye(sp.dim)
        expected[-1, -1] = -sp.cutoff
        dev = np.max(np.abs(comm - expected))
        return dev <= 1e-12, f"max deviation {dev:.2e}"

    @check("number operator equals a^dag a")
    def _():
        sp = FockSpace(9)
        dev = np.max(np.abs((annihilation(sp).dagger() @ annihilation(sp)).mat - number_op(sp).mat))
        return dev <= 1e-12, f"max deviation {dev:.2e}"

    @check("thermal state normalized and monotone")
    def _():
        ok, worst = True, 0.0
        for nbar in (0.1, 0.7, 1.0, 3.5):
            st = thermal_state(FockSpace(50), nbar)
            worst = max(worst, abs(float(st.probs.sum()) - 1.0))
            ok &= bool(np.all(np.diff(st.probs) <= 0))
        return ok and worst <= 1e-12, f"worst |sum-1| {worst:.2e}"

    @check("thermal moments at large cutoff")
    def _():
        st = thermal_state(FockSpace(60), 1.0)
        stats = moments(st, number_op(st.space))
        err = max(abs(stats.mean - 1.0), abs(stats.variance - 2.0))
        return err <= 1e-9, f"max |error| {err:.2e}"

    @check("variance scaling under observable rescaling")
    def _():
        st = thermal_state(FockSpace(40), 0.8)
        obs = number_op(st.space)
        base = moments(st, obs)
        scaled = moments(st, 2.5 * obs)
        err = abs(scaled.variance - 2.5**2 * base.variance)
        ok = err <= 1e-10 * max(1.0, scaled.variance) and base.variance >= 0
        return ok, f"|var(2.5 O) - 2.5^2 var(O)| = {err:.2e}"

    @check("independent factors multiply expectations")
    def _():
        sa, sb = FockSpace(6), FockSpace(7)
        rho_a, rho_b = thermal_state(sa, 0.5), fock_state(sb, 3)
        f = OperatorMatrix((sa,), np.diag(rng.standard_normal(sa.dim)))
        g = OperatorMatrix((sb,), np.diag(rng.standard_normal(sb.dim)))
        joint = moments([rho_a, rho_b], tensor(f, g)).mean
        split = moments(rho_a, f).mean * moments(rho_b, g).mean
        return abs(joint - split) <= 1e-10, f"|joint - product| = {abs(joint - split):.2e}"

    @check("leakage shrinks as the cutoff grows")
    def _():
        leaks = [leakage(thermal_state(FockSpace(s), 1.0), 3) for s in (20, 30, 45, 60)]
        ok = all(l2 < l1 for l1, l2 in zip(leaks, leaks[1:]))
        return ok, f"top-3 leakage {leaks[0]:.1e} -> {leaks[-1]:.1e}"

    @check("operators on distinct factors commute")
    def _():
        shape = [FockSpace(4), FockSpace(3)]
        x = OperatorMatrix((shape[0],), rng.standard_normal((5, 5)))
        y = OperatorMatrix((shape[1],), rng.standard_normal((4, 4)))
        dev = np.max(np.abs(channels.commutator(embed(x, 0, shape), embed(y, 1, shape)).mat))
        return dev <= 1e-12, f"max |[X x 1, 1 x Y]| = {dev:.2e}"

    @check("truncation guard at configured cutoff")
    def _():
        sp = _thermal_space(1.0, gain, 2, cfg.cutoff)
        try:
            check_truncation(thermal_state(sp, 1.0))
        except TruncationError as exc:
            return False, str(exc)
        return True, f"cutoff {sp.cutoff} passes the top-3 leakage guard"

    # ------------------------------------------------------------ amp channels

    @check("shift operator unitary")
    def _():
        worst = 0.0
        for phi in (0.0, 0.7, math.pi, 5.1):
            s = channels.shift_operator(FockSpace(24), phi)
            worst = max(worst, float(np.max(np.abs(s.mat.conj().T @ s.mat - np.eye(25)))))
        return worst <= 1e-12, f"max |S^dag S - 1| = {worst:.2e}"

    @check("nonlinear output-number identity")
    def _():
        worst = 0.0
        g_int = max(1, int(round(gain)))
        for s_b, s_a in ((25, 4), (12, 8)):
            sb, sa = FockSpace(s_b), FockSpace(s_a)
            bout = channels.nonlinear_bout(sb, sa, g_int, 0.35)
            target = embed(number_op(sb), 0, (sb, sa)) + float(g_int) * embed(number_op(sa), 1, (sb, sa))
            worst = max(worst, float(np.max(np.abs((bout.dagger() @ bout).mat - target.mat))))
        return worst <= 1e-12, f"max |b^dag b - (n_b + G n_a)| = {worst:.2e}"

    @check("truncated commutator, single-mode sector")
    def _():
        sb = FockSpace(3)
        bout = channels.nonlinear_bout(sb, FockSpace(0), 1, 0.0)
        res = channels.check_pegg_barnett(channels.commutator(bout, bout.dagger()), sb)
        return res.ok, f"max deviation from 1 - (s+1)|s><s| pattern: {res.max_deviation:.2e}"

    @check("truncated commutator, two-mode clean region")
    def _():
        sb, sa = FockSpace(30), FockSpace(2)
        bout = channels.nonlinear_bout(sb, sa, 2, 0.0)
        comm = channels.commutator(bout, bout.dagger()).mat
        diag = np.real(np.diag(comm)).reshape(sb.dim, sa.dim)  # [b level, a level]
        clean = diag[: 30 - 2 * 2, :]
        dev = float(np.max(np.abs(clean - 1.0)))
        return dev <= 1e-12, f"max |diag - 1| below level s_b - G*s_a: {dev:.2e}"

    @check("output moments independent of the shift phase")
    def _():
        sb, sa = FockSpace(30), FockSpace(3)
        state = [thermal_state(sb, 0.5), fock_state(sa, 1)]
        phases = [cfg.fixed_phase if cfg.fixed_phase is not None else 0.0,
                  float(np.random.default_rng(cfg.seed).uniform(0, 2 * math.pi))]
        results = []
        for phi in phases:
            bout = channels.nonlinear_bout(sb, sa, 2, phi)
            results.append(moments(state, bout.dagger() @ bout))
        dev = max(abs(results[0].mean - results[1].mean), abs(results[0].variance - results[1].variance))
        return dev <= 1e-12, f"phases {phases[0]:.3f} vs {phases[1]:.3f}: max moment difference {dev:.2e}"

    @check("linear-gain coefficient identity")
    def _():
        worst = max(abs(math.sqrt(g) ** 2 - math.sqrt(g - 1.0) ** 2 - 1.0) for g in (1.0, 1.5, 2.0, 7.25, 100.0))
        return worst <= 1e-12, f"max |G - (G-1) - 1| = {worst:.2e}"

    @check("commutator is traceless")
    def _():
        d = 14
        x = OperatorMatrix((FockSpace(d - 1),), rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
        y = OperatorMatrix((FockSpace(d - 1),), rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
        tr = abs(np.trace(channels.commutator(x, y).mat))
        return tr <= 1e-10, f"|trace| = {tr:.2e}"

    @check("idealized transfer map bookkeeping")
    def _():
        seen = set()
        g_int = max(1, int(round(gain)))
        for n in range(3):
            for m in range(12):
                for nn in range(6):
                    if m < g_int * n:
                        try:
                            channels.ideal_schrodinger_map(n, m, nn, g_int)
                        except ValueError:
                            continue
                        return False, f"inadmissible input (n={n}, M={m}) not rejected"
                    rec = channels.ideal_schrodinger_map(n, m, nn, g_int)
                    if rec.M_out + rec.N_out != m + nn or rec.N_out - nn != g_int * n:
                        return False, f"conservation violated at (n={n}, M={m}, N={nn})"
                    key = (rec.M_out, rec.N_out, rec.absorber_energy)
                    if key in seen:
                        return False, f"output collision at (n={n}, M={m}, N={nn})"
                    seen.add(key)
        return True, f"{len(seen)} admissible inputs map injectively, conserve M+N, reject M < G n"

    # ----------------------------------------------------------- moment oracles

    @check("phase-insensitive variance matches the matrix oracle")
    def _():
        try:
            sa = _thermal_space(0.0, gain, 1, cfg.cutoff)
            sb = _thermal_space(0.6, gain, 1, cfg.cutoff)
            rho_a, rho_b = fock_state(sa, 1), thermal_state(sb, 0.6)
            check_truncation(rho_a, rho_b)
            op = channels.caves_number_out(sa, sb, gain)
            mc = moments([rho_a, rho_b], op)
            an = noise.var_caves(gain, rho_a.number_stats(), rho_b.number_stats())
        except TruncationError as exc:
            return False, str(exc)
        err = _rel_err(mc.variance, an)
        return err <= 1e-8, f"relative error {err:.2e} at G = {gain:g}"

    @check("phase-sensitive variance matches the matrix oracle")
    def _():
        try:
            sa = _thermal_space(0.6, 2.0 * gain, 1, cfg.cutoff)
            rho_a = thermal_state(sa, 0.6)
            check_truncation(rho_a)
            mc = moments(rho_a, channels.phase_sensitive_number_out(sa, gain))
            an = noise.var_phase_sensitive(gain, rho_a.number_stats())
        except TruncationError as exc:
            return False, str(exc)
        err = _rel_err(mc.variance, an)
        return err <= 1e-8, f"relative error {err:.2e} at G = {gain:g}"

    @check("single-mode variance exact through the operator identity")
    def _():
        g_int = max(1, int(round(gain)))
        sb = _thermal_space(1.0, g_int, 2, cfg.cutoff)
        sa = FockSpace(4)
        try:
            rho_b, rho_a = thermal_state(sb, 1.0), fock_state(sa, 2)
            check_truncation(rho_b)
        except TruncationError as exc:
            return False, str(exc)
        bout = channels.nonlinear_bout(sb, sa, g_int, 0.0)
        mc = moments([rho_b, rho_a], bout.dagger() @ bout)
        an = noise.var_single_mode(g_int, rho_a.number_stats(), rho_b.number_stats())
        err = abs(mc.variance - an)
        return err <= 1e-12 * max(1.0, an), f"|matrix - closed form| = {err:.2e}"

    # ------------------------------------------------------------- closed forms

    @check("gain-1 consistency of the closed forms")
    def _():
        a, b = NumberStats(1.3, 0.6), NumberStats(0.9, 1.7)
        errs = [
            abs(noise.var_caves(1.0, a, b) - a.variance),
            abs(noise.var_phase_sensitive(1.0, a) - a.variance),
            abs(noise.var_multistep_single(3, 3, a, b) - noise.var_single_mode(3, a, b)),
            abs(noise.var_multistep_multi(3, 3, a, b) - noise.var_g_modes(3, a, b)),
        ]
        return max(errs) <= 1e-12, f"max reduction error {max(errs):.2e}"

    @check("SNR ordering: single mode, G modes, linear bound")
    def _():
        ok = True
        for g in (4, 16, 64, 256):
            sm = noise.snr(noise.Mechanism.single_mode(g), 1, 1.0)
            gm = noise.snr(noise.Mechanism.g_modes(g), 1, 1.0)
            pi = noise.snr(noise.Mechanism.phase_insensitive(g), 1, 1.0)
            ok &= sm > gm > pi
        return ok, "SingleMode > GModes > PhaseInsensitive on G in {4, 16, 64, 256}"

    @check("two-per-step cascade into modes trails the linear bound")
    def _():
        ok = True
        for n_steps in range(2, 11):
            g_tot = 2**n_steps
            mm = noise.snr(noise.Mechanism.multistep_multi(2, n_steps), 1, 1.0)
            pi = noise.snr(noise.Mechanism.phase_insensitive(g_tot), 1, 1.0)
            ok &= mm < pi
        return ok, "MultiStepMultiMode(g=2) < PhaseInsensitive for G = 2^N, N = 2..10"

    @check("large-gain saturation of the linear SNRs")
    def _():
        pi = noise.snr(noise.Mechanism.phase_insensitive(1e4), 1, 1.0)
        ps = noise.snr(noise.Mechanism.phase_sensitive(1e4), 1, 1.0)
        err = max(abs(pi - 1.0), abs(ps - math.sqrt(2.0)) / math.sqrt(2.0))
        return err <= 0.01, f"max relative miss {err:.2e} at G = 1e4"

    @check("reservoir-noise floor of single-mode amplification")
    def _():
        a = NumberStats(5.0, 0.0)
        devs = [abs(noise.var_single_mode(g, a, NumberStats(0.4, s2)) - s2) for g in (1, 7, 40) for s2 in (0.3, 1.0, 2.6)]
        return max(devs) == 0.0, f"b-variance prefactor deviation {max(devs):.2e} (must be exactly 1)"

    # ---------------------------------------------------------------- filtering

    @check("filter unitarity over a frequency scan")
    def _():
        worst = 0.0
        for w in np.linspace(0.2e15, 3.0e15, 10_000):
            tp = filters.lorentzian_transfer(float(w), 1.5e15, 2e13)
            worst = max(worst, abs(abs(tp.T) ** 2 + abs(tp.R) ** 2 - 1.0))
        return worst <= 1e-12, f"max ||T|^2+|R|^2 - 1| over 10^4 points = {worst:.2e}"

    @check("on-resonance transmission is exact")
    def _():
        tp = filters.lorentzian_transfer(1.5e15, 1.5e15, 2e13)
        return tp.T == 1.0 and tp.R == 0.0, f"T = {tp.T}, R = {tp.R}"

    @check("transmission falls monotonically off resonance")
    def _():
        det = np.linspace(0.0, 5e13, 40)
        t2 = [abs(filters.lorentzian_transfer(1.5e15 + d, 1.5e15, 2e13).T) ** 2 for d in det]
        ok = all(b < a for a, b in zip(t2, t2[1:]))
        return ok, f"|T|^2 spans {t2[0]:.3f} -> {t2[-1]:.3f}"

    @check("exponential suppression of thermal occupancy")
    def _():
        env = filters.ThermalEnv(4.0)
        x = np.linspace(10.0, 40.0, 200)
        omega = x * env.temperature / env.hbar_over_k
        slope = np.polyfit(omega, [math.log(filters.thermal_occupancy(w, env)) for w in omega], 1)[0]
        target = -env.hbar_over_k / env.temperature
        err = abs(slope - target) / abs(target)
        return err <= 1e-6, f"log-slope relative error {err:.2e}"

    @check("filter-then-amplify consistency")
    def _():
        sa, sc = FockSpace(6), FockSpace(6)
        rho_a, rho_c = fock_state(sa, 1), fock_state(sc, 0)
        b_env = NumberStats(0.4, 1.3)
        perfect = filters.TransferPair(1.0, 1.0 + 0j, 0j)
        out = filters.filtered_amplified_stats(perfect, rho_a, rho_c, 5, b_env)
        exact = abs(out.variance - noise.var_single_mode(5, rho_a.number_stats(), b_env))
        half = filters.lorentzian_transfer(1.0, 0.0, 2.0)  # detuning = gamma/2: |T|^2 = 1/2
        out_half = filters.filtered_amplified_stats(half, rho_a, rho_c, 2, NumberStats(0.0, 0.0))
        bernoulli = abs(out_half.variance - 4.0 * 0.25)
        err = max(exact, bernoulli)
        return err <= 1e-10, f"max |pipeline - oracle| = {err:.2e}"

    @check("reflected internal noise amplifies the background")
    def _():
        sa, sc = FockSpace(8), FockSpace(30)
        rho_a = fock_state(sa, 1)
        b_env = NumberStats(0.1, 0.2)
        perfect = filters.filtered_amplified_stats(
            filters.TransferPair(1.0, 1.0 + 0j, 0j), rho_a, fock_state(sc, 0), 6, b_env
        )
        tp = filters.lorentzian_transfer(1.0, 0.0, 2.0)
        leaky = filters.filtered_amplified_stats(tp, rho_a, thermal_state(sc, 0.8), 6, b_env)
        return leaky.variance > perfect.variance, (
            f"variance {leaky.variance:.3f} (thermal internal mode) > {perfect.variance:.3f} (perfect filter)"
        )

    results = []
    for name, fn in checks:
        try:
            passed, detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(passed), detail))
    return results
