import json
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_overdriven_config
from zndevans.errors import ChapmanJouguetError, ConfigError, InvalidIgnitionWindowError
from zndevans.znd import (
    GasWaveConfig,
    StateW,
    UpstreamState,
    build_wave,
    config_from_json,
    config_to_json,
    default_config,
    fluxes,
    nonreactive_config,
    profile_at,
    profile_deriv,
    sigma,
    sonic_heat_release,
    thermo,
    x_of_y,
)


def rh_residuals(wave, state):
    """Independent check of the three reaction-zone invariants."""
    cfg = wave.config
    rho, u, e, Y = state.rho, state.u, state.e, float(state.Y[0])
    r1 = (rho * u + wave.m) / wave.m
    r2 = (u + cfg.Gamma * e / u - wave.rh_b) / abs(wave.rh_b)
    r3 = (0.5 * u * u + (cfg.Gamma + 1.0) * e + cfg.q * Y - wave.rh_c) / abs(wave.rh_c)
    return max(abs(r1), abs(r2), abs(r3))


class TestThermo:
    def test_direct_substitution(self):
        cfg = replace(default_config(), Gamma=0.4)
        st_ = StateW(1.0, -1.0, 1.0, np.array([0.5]))
        p, T, c_s, p_rho, p_e = thermo(st_, cfg)
        assert p == pytest.approx(0.4)
        assert p_rho == pytest.approx(0.4)
        assert p_e == pytest.approx(0.4)
        assert c_s == pytest.approx(math.sqrt(0.56))
        assert T == pytest.approx(1.0)

    def test_pressure_depends_on_rho_e_product(self):
        cfg = replace(default_config(), Gamma=0.4)
        p1 = thermo(StateW(2.0, 0.0, 0.5, np.array([0.0])), cfg)[0]
        assert p1 == pytest.approx(0.4)

    @given(
        st.floats(min_value=0.05, max_value=20.0),
        st.floats(min_value=0.05, max_value=20.0),
        st.floats(min_value=-5.0, max_value=5.0),
        st.floats(min_value=0.05, max_value=1.5),
    )
    @settings(max_examples=50, deadline=None)
    def test_sound_speed_identity(self, rho, e, u, Gamma):
        # c_s^2 = p_rho + p * p_e / rho^2 for the ideal gas
        cfg = replace(default_config(), Gamma=Gamma)
        p, _, c_s, p_rho, p_e = thermo(StateW(rho, u, e, np.array([0.0])), cfg)
        assert c_s**2 == pytest.approx(p_rho + p * p_e / rho**2, rel=1e-12)


class TestFluxes:
    def test_quiescent_burned_gas(self):
        cfg = default_config()
        st_ = StateW(1.3, 0.0, 2.0, np.array([0.0]))
        p = thermo(st_, cfg)[0]
        F0, F1, R = fluxes(st_, cfg)
        assert np.allclose(F1, [0.0, p, 0.0, 0.0])
        assert np.all(R == 0.0)

    def test_source_structure(self, rng):
        cfg = default_config()
        for _ in range(10):
            st_ = StateW(rng.uniform(0.5, 5), rng.uniform(-3, 0), rng.uniform(1, 9),
                         np.array([rng.uniform(0, 1)]))
            _, _, R = fluxes(st_, cfg)
            assert R[0] == 0.0 and R[1] == 0.0
            assert R[2] == pytest.approx(-cfg.q * R[3], rel=1e-14)

    def test_nonreactive_euler_flux_oracle(self, rng):
        # independent textbook Euler flux at Y = 0
        cfg = default_config()
        for _ in range(10):
            rho, u, e = rng.uniform(0.5, 5), rng.uniform(-3, 3), rng.uniform(0.5, 9)
            p = cfg.Gamma * rho * e
            expected = np.array([rho * u, rho * u * u + p, (rho * (e + 0.5 * u * u) + p) * u])
            F1 = fluxes(StateW(rho, u, e, np.array([0.0])), cfg)[1]
            assert np.allclose(F1[:3], expected, rtol=1e-14)


class TestBuildWave:
    def test_rh_residual_oracle_random_configs(self, rng):
        for _ in range(5):
            cfg = random_overdriven_config(rng)
            wave = build_wave(cfg)
            ys = -np.logspace(-3, math.log10(40.0 / cfg.K), 100)
            worst = max(rh_residuals(wave, profile_at(wave, y)) for y in ys)
            assert worst < 1e-12

    def test_nonreactive_limit_constant_profile(self, shock):
        states = [profile_at(shock, y) for y in (-0.0, -1.0, -4.0)]
        for s in states[1:]:
            assert s.rho == states[0].rho
            assert s.u == states[0].u
            assert s.e == states[0].e

    def test_q_zero_branches_recover_both_roots(self):
        # with q = 0 the quadratic is Y-independent; its roots are the
        # upstream and Neumann velocities of the plain gas shock
        cfg = nonreactive_config()
        wave = build_wave(cfg)
        G, b = cfg.Gamma, wave.rh_b
        center = (G + 1.0) / (G + 2.0) * b
        disc = center**2 + 2.0 * G * (0.0 - wave.rh_c) / (G + 2.0)
        lo, hi = center - math.sqrt(disc), center + math.sqrt(disc)
        assert lo == pytest.approx(cfg.upstream.u, rel=1e-12)
        assert hi == pytest.approx(wave.neumann.u, rel=1e-12)

    def test_compression(self, wave):
        assert wave.neumann.rho > wave.config.upstream.rho
        assert wave.neumann.u > wave.config.upstream.u  # |u| drops behind the shock

    def test_cj_bisection_matches_analytic_qmax(self):
        base = default_config()
        q_analytic = sonic_heat_release(base)

        def overdriven(q):
            try:
                build_wave(replace(base, q=q, Ti_low=1.5, Ti_high=1.5))
                return True
            except ChapmanJouguetError:
                return False

        lo, hi = 0.1, 20.0
        assert overdriven(lo) and not overdriven(hi)
        while hi - lo > 1e-9:
            mid = 0.5 * (lo + hi)
            if overdriven(mid):
                lo = mid
            else:
                hi = mid
        assert abs(0.5 * (lo + hi) - q_analytic) < 1e-8 + 1e-9 * q_analytic

    def test_discriminant_crossing_monotone(self):
        base = default_config()
        qs = np.linspace(0.5, 9.5, 12)
        discs = []
        for q in qs:
            wave = build_wave(replace(base, q=q, Ti_low=1.5, Ti_high=1.5))
            discs.append(wave.discriminant_min)
        assert np.all(np.diff(discs) < 0.0)

    def test_ignition_window_violations(self):
        base = default_config()
        with pytest.raises(InvalidIgnitionWindowError):
            build_wave(replace(base, Ti_low=0.5, Ti_high=0.5))  # upstream would react
        with pytest.raises(InvalidIgnitionWindowError):
            build_wave(replace(base, Ti_high=6.0))  # reaction zone would quench

    def test_config_validation(self):
        base = default_config()
        with pytest.raises(ConfigError):
            replace(base, Gamma=-0.1)
        with pytest.raises(ConfigError):
            replace(base, Y0=1.5)
        with pytest.raises(ConfigError):
            replace(base, upstream=UpstreamState(rho=1.0, u=0.5, e=1.0))
        with pytest.raises(ConfigError):
            replace(base, Ti_low=5.0, Ti_high=4.0)


class TestProfile:
    def test_anchor_equals_neumann(self, wave):
        st0 = profile_at(wave, 0.0)
        assert st0.rho == wave.neumann.rho
        assert st0.u == wave.neumann.u
        assert st0.e == wave.neumann.e
        assert st0.Y[0] == wave.neumann.Y[0]

    def test_reactant_exponential(self):
        cfg = replace(default_config(), K=1.0)
        wave = build_wave(cfg)
        st_ = profile_at(wave, -math.log(2.0))
        assert st_.Y[0] == pytest.approx(0.5, rel=1e-14)

    def test_deep_tail_matches_burned(self, wave):
        st_ = profile_at(wave, -40.0 / wave.config.K)
        b = wave.burned
        for got, want in ((st_.rho, b.rho), (st_.u, b.u), (st_.e, b.e)):
            assert abs(got - want) <= 1e-12 * max(1.0, abs(want))
        assert st_.Y[0] <= 1e-12

    def test_positive_y_rejected(self, wave):
        with pytest.raises(ValueError):
            profile_at(wave, 0.5)

    def test_momentum_invariant_constant(self, wave):
        # -m*u + p is one of the integrated conservation laws
        vals = []
        for y in np.linspace(-9.0, 0.0, 50):
            st_ = profile_at(wave, y)
            p = thermo(st_, wave.config)[0]
            vals.append(-wave.m * st_.u + p)
        vals = np.array(vals)
        assert np.max(np.abs(vals - vals[0])) < 1e-10 * abs(vals[0])

    def test_branch_continuity_monotone(self, wave):
        us = [profile_at(wave, y).u for y in np.linspace(-12.0, 0.0, 200)]
        assert np.all(np.diff(us) > 0.0)  # u rises monotonically toward the shock

    def test_profile_deriv_matches_finite_differences(self, wave):
        for y in (-0.3, -2.0, -6.0):
            h = 1e-5
            fd = (profile_at(wave, y + h).as_vector() - profile_at(wave, y - h).as_vector()) / (2 * h)
            an = profile_deriv(wave, y)
            # FD differences of the ~O(1) state floor out near 1e-10 absolute
            assert np.allclose(an, fd, rtol=1e-5, atol=1e-10)


class TestXofY:
    def test_anchor(self, wave):
        assert x_of_y(wave, [0.0]) == pytest.approx([0.0])

    def test_constant_coefficient_exact(self, shock):
        s = sigma(shock, 0.0)
        ys = np.array([0.0, -1.0, -2.5, -7.0])
        xs = x_of_y(shock, ys)
        assert np.allclose(xs, s * ys, rtol=1e-10)

    def test_strictly_decreasing(self, wave):
        ys = -np.linspace(0.0, 9.0, 40)
        xs = x_of_y(wave, ys)
        assert np.all(np.diff(xs) < 0.0)

    def test_bad_grid_rejected(self, wave):
        with pytest.raises(ValueError):
            x_of_y(wave, [0.0, 1.0])
        with pytest.raises(ValueError):
            x_of_y(wave, [-2.0, -1.0])


class TestConfigIO:
    def test_round_trip(self):
        cfg = default_config()
        again = config_from_json(config_to_json(cfg))
        assert again == cfg
        assert again.digest() == cfg.digest()

    def test_missing_field_message(self):
        raw = json.loads(config_to_json(default_config()))
        del raw["EA"]
        with pytest.raises(ConfigError, match="EA"):
            config_from_json(json.dumps(raw))

    def test_missing_upstream(self):
        with pytest.raises(ConfigError, match="upstream"):
            config_from_json('{"Gamma": 0.2}')

    def test_invalid_json(self):
        with pytest.raises(ConfigError):
            config_from_json("{not json")
