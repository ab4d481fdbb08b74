import numpy as np
import pytest

from zndevans.znd import (
    GasWaveConfig,
    UpstreamState,
    build_wave,
    default_config,
    nonreactive_config,
    sonic_heat_release,
)


@pytest.fixture(scope="session")
def wave():
    """Default overdriven reactive wave."""
    return build_wave(default_config())


@pytest.fixture(scope="session")
def shock():
    """Nonreactive gas shock (q = 0, Y0 = 0): constant profile."""
    return build_wave(nonreactive_config())


def random_overdriven_config(rng: np.random.Generator) -> GasWaveConfig:
    """Sample an admissible overdriven configuration.

    Strategy: fix the upstream thermodynamic state, draw the Gruneisen
    coefficient and shock Mach number, then place q a safe fraction below
    the sonic value and the ignition window inside the realized profile
    temperatures.
    """
    Gamma = rng.uniform(0.15, 0.6)
    e_plus = 1.0
    c_plus = np.sqrt(Gamma * (Gamma + 1.0) * e_plus)
    mach = rng.uniform(2.5, 6.0)
    upstream = UpstreamState(rho=1.0, u=-mach * c_plus, e=e_plus)
    probe = GasWaveConfig(
        Gamma=Gamma, Cv=1.0, q=0.0, EA=0.0, Ti_low=10.0, Ti_high=10.0,
        K=1.0, Y0=1.0, upstream=upstream,
    )
    q = rng.uniform(0.2, 0.7) * sonic_heat_release(probe)
    T_plus = e_plus / 1.0
    # provisional window just above the unburned temperature; any compressive
    # shock clears it, and the realized Neumann temperature then fixes it
    trial = GasWaveConfig(
        Gamma=Gamma, Cv=1.0, q=q, EA=0.0,
        Ti_low=1.0001 * T_plus, Ti_high=1.0001 * T_plus,
        K=float(rng.uniform(0.5, 4.0)), Y0=1.0, upstream=upstream,
    )
    wave = build_wave(trial)
    T_neumann = wave.neumann.e / trial.Cv
    cfg = GasWaveConfig(
        Gamma=Gamma,
        Cv=1.0,
        q=q,
        EA=float(rng.uniform(1.0, 8.0)),
        Ti_low=1.05 * T_plus,
        Ti_high=0.95 * T_neumann,
        K=trial.K,
        Y0=1.0,
        upstream=upstream,
    )
    return cfg


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
