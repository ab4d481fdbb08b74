"""Ideal-gas reactive Euler model and the steady detonation profile.

Convention: steady frame (front speed 0), detonation running to the right,
so the gas moves left through the front: ``u < 0`` on both sides and the
mass flux ``m = -rho*u > 0``.  The unburned state sits ahead (x > 0) where
the ignition cutoff switches the reaction off; behind the Neumann shock the
cutoff is identically one.

The reaction progress coordinate ``y <= 0`` is defined by
``dx/dy = m / (rho * phi(T))``; in it the reactant fraction is exactly
``Y(y) = exp(K*y) * Y0`` and the gas state follows from the ideal-gas
Rankine-Hugoniot relations in closed form (a quadratic in u), so profile
evaluation at arbitrary y needs no ODE solve.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, replace
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from .errors import (
    ChapmanJouguetError,
    ConfigError,
    InvalidIgnitionWindowError,
    InvalidWaveError,
)

_EPS_CJ = 1e-10  # sonic-rejection threshold on the discriminant
_CONSISTENCY_TOL = 1e-12


@dataclass(frozen=True)
class UpstreamState:
    rho: float
    u: float
    e: float


@dataclass(frozen=True)
class GasWaveConfig:
    """Physical parameters of one detonation problem.

    Gamma    Gruneisen coefficient (p = Gamma*rho*e), gamma = Gamma + 1
    Cv       specific heat (T = e/Cv); gas constant R = gamma*Cv
    q        heat release per unit reactant mass (scalar, single species)
    EA       activation energy of the Arrhenius rate
    Ti_low   ignition temperature below which the reaction is off
    Ti_high  cutoff temperature above which the rate is exactly Arrhenius
    K        reaction rate constant (> 0, single species)
    Y0       unburned reactant mass fraction
    upstream unburned state (rho, u, e) ahead of the shock, u < 0
    """

    Gamma: float
    Cv: float
    q: float
    EA: float
    Ti_low: float
    Ti_high: float
    K: float
    Y0: float
    upstream: UpstreamState
    tol: float = 1e-5
    eps_Y: float = 1e-8

    def __post_init__(self):
        _validate_config(self)

    @property
    def gas_constant(self) -> float:
        return (self.Gamma + 1.0) * self.Cv

    def digest(self) -> str:
        """Stable content hash of the configuration."""
        payload = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _validate_config(cfg: GasWaveConfig) -> None:
    def positive(name, value):
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise ConfigError(f"{name} must be a positive finite number, got {value!r}")

    positive("Gamma", cfg.Gamma)
    positive("Cv", cfg.Cv)
    positive("K", cfg.K)
    positive("upstream.rho", cfg.upstream.rho)
    positive("upstream.e", cfg.upstream.e)
    positive("tol", cfg.tol)
    positive("eps_Y", cfg.eps_Y)
    if cfg.q < 0:
        raise ConfigError(f"q must be nonnegative, got {cfg.q!r}")
    if cfg.EA < 0:
        raise ConfigError(f"EA must be nonnegative, got {cfg.EA!r}")
    if not 0.0 <= cfg.Y0 <= 1.0:
        raise ConfigError(f"Y0 must lie in [0, 1], got {cfg.Y0!r}")
    if not cfg.upstream.u < 0:
        raise ConfigError(
            f"upstream.u must be negative (right-moving front, steady frame), "
            f"got {cfg.upstream.u!r}"
        )
    if not cfg.Ti_low <= cfg.Ti_high:
        raise ConfigError(
            f"need Ti_low <= Ti_high, got {cfg.Ti_low!r} > {cfg.Ti_high!r}"
        )


def config_from_json(text: str) -> GasWaveConfig:
    """Parse a configuration document; see config_to_json for the schema."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    up = raw.get("upstream")
    if not isinstance(up, dict):
        raise ConfigError("config needs an 'upstream' object with rho, u, e")
    try:
        upstream = UpstreamState(rho=float(up["rho"]), u=float(up["u"]), e=float(up["e"]))
    except KeyError as exc:
        raise ConfigError(f"upstream is missing field {exc}") from exc
    kwargs = {}
    for name in ("Gamma", "Cv", "q", "EA", "Ti_low", "Ti_high", "K", "Y0"):
        if name not in raw:
            raise ConfigError(f"config is missing field '{name}'")
        kwargs[name] = float(raw[name])
    for name in ("tol", "eps_Y"):
        if name in raw:
            kwargs[name] = float(raw[name])
    return GasWaveConfig(upstream=upstream, **kwargs)


def config_to_json(cfg: GasWaveConfig) -> str:
    return json.dumps(asdict(cfg), indent=2, sort_keys=True)


@dataclass(frozen=True)
class StateW:
    """Primitive state (rho, u, e, Y); Y is a vector of reactant fractions."""

    rho: float
    u: float
    e: float
    Y: np.ndarray

    def __post_init__(self):
        Y = np.atleast_1d(np.asarray(self.Y, dtype=float))
        object.__setattr__(self, "Y", Y)
        if not (self.rho > 0 and self.e > 0):
            raise InvalidWaveError(f"state needs rho, e > 0: rho={self.rho}, e={self.e}")

    @property
    def r(self) -> int:
        return self.Y.size

    def as_vector(self) -> np.ndarray:
        return np.concatenate([[self.rho, self.u, self.e], self.Y])


def thermo(state: StateW, cfg: GasWaveConfig) -> tuple[float, float, float, float, float]:
    """Ideal-gas pointwise thermodynamics: (p, T, c_s, p_rho, p_e)."""
    rho, e, G = state.rho, state.e, cfg.Gamma
    p = G * rho * e
    T = e / cfg.Cv
    c_s = math.sqrt(G * (G + 1.0) * e)
    return p, T, c_s, G * e, G * rho


def arrhenius(T: float, cfg: GasWaveConfig) -> float:
    """Rate factor exp(-EA/(R*T)) on the ignited side (cutoff identically 1)."""
    return math.exp(-cfg.EA / (cfg.gas_constant * T))


def reaction_psi(state: StateW, cfg: GasWaveConfig) -> float:
    """psi = rho * phi(T), the density-weighted ignited rate factor."""
    return state.rho * arrhenius(state.e / cfg.Cv, cfg)


def fluxes(state: StateW, cfg: GasWaveConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Conserved densities F0, fluxes F1, and reaction source R at a state.

    The source is evaluated on the ignited branch (cutoff = 1); callers on
    the unburned side must not request it.  Its energy and reactant rows
    satisfy R_energy = -q . R_Y exactly.
    """
    rho, u, e, Y = state.rho, state.u, state.e, state.Y
    p, _, _, _, _ = thermo(state, cfg)
    Etot = rho * (e + 0.5 * u * u)
    F0 = np.concatenate([[rho, rho * u, Etot], rho * Y])
    F1 = np.concatenate([[rho * u, rho * u * u + p, (Etot + p) * u], rho * u * Y])
    rate = cfg.K * Y * reaction_psi(state, cfg)  # K Y psi, single-species K
    R = np.concatenate([[0.0, 0.0, cfg.q * float(np.sum(rate))], -rate])
    return F0, F1, R


@dataclass(frozen=True)
class SteadyWave:
    """Steady strong-detonation wave: front-frame constants plus end states.

    m, rh_b, rh_c are the three Rankine-Hugoniot invariants of the reaction
    zone; the gas state along the profile solves

        (Gamma+2) u^2 - 2 (Gamma+1) rh_b u + 2 Gamma (rh_c - q Y) = 0

    on the subsonic (compressive) branch.  discriminant_min is the minimum
    over Y in [0, Y0] of the square-root argument; it vanishing means the
    burned state is sonic (Chapman-Jouguet), which is rejected.
    """

    config: GasWaveConfig
    m: float
    rh_b: float
    rh_c: float
    neumann: StateW
    burned: StateW
    discriminant_min: float

    @property
    def M_y(self) -> float:
        """Truncation depth: exp(K*(-M_y))*Y0 <= eps_Y."""
        cfg = self.config
        if cfg.Y0 == 0.0:
            return 0.0
        return math.log(cfg.Y0 / cfg.eps_Y) / cfg.K

    @property
    def default_M(self) -> float:
        return max(self.M_y, 5.0)


def _branch_center(cfg: GasWaveConfig, b: float) -> float:
    return (cfg.Gamma + 1.0) / (cfg.Gamma + 2.0) * b


def _discriminant(cfg: GasWaveConfig, b: float, c: float, Ybar: float) -> float:
    center = _branch_center(cfg, b)
    return center * center + 2.0 * cfg.Gamma * (cfg.q * Ybar - c) / (cfg.Gamma + 2.0)


def _gas_state(cfg: GasWaveConfig, m: float, b: float, c: float, Ybar: float) -> tuple[float, float, float]:
    """Subsonic-branch (rho, u, e) of the profile quadratic at reactant Ybar."""
    disc = _discriminant(cfg, b, c, Ybar)
    if disc <= 0.0:
        raise ChapmanJouguetError(
            f"square-root argument {disc:.3e} <= 0 at Y={Ybar:.6g}; wave not overdriven"
        )
    u = _branch_center(cfg, b) + math.sqrt(disc)
    rho = -m / u
    e = (b * u - u * u) / cfg.Gamma
    return rho, u, e


def sonic_heat_release(cfg: GasWaveConfig) -> float:
    """Largest q for which the configured Neumann shock stays overdriven.

    The discriminant at the burned end is linear and decreasing in q; this
    is its root.  Requires Y0 > 0.
    """
    if cfg.Y0 <= 0.0:
        raise ConfigError("sonic_heat_release needs Y0 > 0")
    up = cfg.upstream
    b = up.u + cfg.Gamma * up.e / up.u
    center = _branch_center(cfg, b)
    c0 = 0.5 * up.u ** 2 + (cfg.Gamma + 1.0) * up.e  # rh_c without the q Y0 term
    G = cfg.Gamma
    return (center * center - 2.0 * G * c0 / (G + 2.0)) * (G + 2.0) / (2.0 * G * cfg.Y0)


def build_wave(config: GasWaveConfig) -> SteadyWave:
    """Solve the Rankine-Hugoniot relations and assemble the steady wave.

    Raises :class:`ChapmanJouguetError` for sonic/underdriven data and
    :class:`InvalidIgnitionWindowError` when the profile temperatures do not
    respect the cutoff window (T ahead must not ignite, T behind must be
    fully ignited).
    """
    up = config.upstream
    m = -up.rho * up.u
    b = up.u + config.Gamma * up.e / up.u
    c = 0.5 * up.u ** 2 + (config.Gamma + 1.0) * up.e + config.q * config.Y0

    disc_min = _discriminant(config, b, c, 0.0)
    if disc_min <= _EPS_CJ:
        raise ChapmanJouguetError(
            f"discriminant at the burned state is {disc_min:.3e} <= {_EPS_CJ:g}: "
            "Chapman-Jouguet or underdriven; only overdriven waves are supported"
        )

    rho_n, u_n, e_n = _gas_state(config, m, b, c, config.Y0)
    rho_b, u_b, e_b = _gas_state(config, m, b, c, 0.0)
    neumann = StateW(rho_n, u_n, e_n, np.array([config.Y0]))
    burned = StateW(rho_b, u_b, e_b, np.array([0.0]))

    # the same three invariants recomputed from the Neumann state must agree
    m2 = -rho_n * u_n
    b2 = u_n + config.Gamma * e_n / u_n
    c2 = 0.5 * u_n ** 2 + (config.Gamma + 1.0) * e_n + config.q * config.Y0
    for name, v1, v2 in (("m", m, m2), ("b", b, b2), ("c", c, c2)):
        if abs(v1 - v2) > _CONSISTENCY_TOL * max(1.0, abs(v1)):
            raise InvalidWaveError(
                f"Rankine-Hugoniot constant {name} inconsistent: {v1!r} vs {v2!r}"
            )

    c_plus = math.sqrt(config.Gamma * (config.Gamma + 1.0) * up.e)
    if not abs(up.u) > c_plus:
        raise InvalidWaveError(
            f"upstream flow must be supersonic: |u+|={abs(up.u):.6g} <= c+={c_plus:.6g}"
        )
    c_minus = math.sqrt(config.Gamma * (config.Gamma + 1.0) * e_b)
    if not abs(u_b) < c_minus:
        raise InvalidWaveError(
            f"burned flow must be subsonic: |u-|={abs(u_b):.6g} >= c-={c_minus:.6g}"
        )
    # compression: density jumps up through the shock, so u rises toward 0
    if not u_n > up.u:
        raise InvalidWaveError("Neumann state is not compressive")

    T_plus = up.e / config.Cv
    if T_plus > config.Ti_low:
        raise InvalidIgnitionWindowError(
            f"unburned temperature {T_plus:.6g} exceeds ignition threshold "
            f"{config.Ti_low:.6g}; the upstream gas would react"
        )
    if config.Y0 > 0.0:
        ygrid = np.linspace(0.0, config.Y0, 64)
        T_min = min(_gas_state(config, m, b, c, Y)[2] / config.Cv for Y in ygrid)
        if T_min < config.Ti_high:
            raise InvalidIgnitionWindowError(
                f"profile temperature falls to {T_min:.6g} < cutoff "
                f"{config.Ti_high:.6g}; the reaction zone would quench"
            )

    return SteadyWave(
        config=config,
        m=m,
        rh_b=b,
        rh_c=c,
        neumann=neumann,
        burned=burned,
        discriminant_min=disc_min,
    )


def profile_at(wave: SteadyWave, y: float) -> StateW:
    """Closed-form profile state at reaction coordinate y <= 0."""
    if y > 0.0:
        raise ValueError(f"profile is defined for y <= 0, got {y!r}")
    cfg = wave.config
    Ybar = math.exp(cfg.K * y) * cfg.Y0
    rho, u, e = _gas_state(cfg, wave.m, wave.rh_b, wave.rh_c, Ybar)
    return StateW(rho, u, e, np.array([Ybar]))


def profile_deriv(wave: SteadyWave, y: float) -> np.ndarray:
    """d/dy of the primitive profile (rho, u, e, Y), differentiated through
    the quadratic-formula branch (no finite differences)."""
    cfg = wave.config
    Ybar = math.exp(cfg.K * y) * cfg.Y0
    dY = cfg.K * Ybar
    disc = _discriminant(cfg, wave.rh_b, wave.rh_c, Ybar)
    if disc <= 0.0:
        raise ChapmanJouguetError(f"sonic profile point at y={y!r}")
    u = _branch_center(cfg, wave.rh_b) + math.sqrt(disc)
    du_dY = cfg.Gamma * cfg.q / ((cfg.Gamma + 2.0) * math.sqrt(disc))
    du = du_dY * dY
    drho = wave.m / (u * u) * du
    de = (wave.rh_b - 2.0 * u) / cfg.Gamma * du
    return np.array([drho, du, de, dY])


def sigma(wave: SteadyWave, y: float) -> float:
    """dx/dy = m / (rho * phi(T)) along the profile; uniformly positive."""
    state = profile_at(wave, y)
    return wave.m / reaction_psi(state, wave.config)


def x_of_y(wave: SteadyWave, y_grid: Sequence[float]) -> np.ndarray:
    """Cumulative physical coordinate x on a descending y grid, x(0) = 0."""
    ys = np.asarray(y_grid, dtype=float)
    if ys.size == 0:
        return np.zeros(0)
    if np.any(ys > 0.0) or np.any(np.diff(ys) > 0.0):
        raise ValueError("y_grid must be nonpositive and sorted descending from 0")
    out = np.empty_like(ys)
    integrand = lambda s: sigma(wave, s)
    prev_y, prev_x = 0.0, 0.0
    for i, y in enumerate(ys):
        if y != prev_y:
            seg, _ = quad(integrand, prev_y, y, epsabs=1e-13, epsrel=1e-11, limit=200)
            prev_x += seg
            prev_y = y
        out[i] = prev_x
    return out


def profile_table(wave: SteadyWave, n: int = 200) -> dict[str, np.ndarray]:
    """Profile on a log-spaced y grid down to -max(M_y, 5); plot-ready columns."""
    depth = wave.default_M
    ys = np.concatenate([[0.0], -np.geomspace(depth * 1e-4, depth, n - 1)])
    xs = x_of_y(wave, ys)
    cols = {k: np.empty(n) for k in ("y", "x", "rho", "u", "e", "Y", "p", "T")}
    for i, y in enumerate(ys):
        st = profile_at(wave, y)
        p, T, _, _, _ = thermo(st, wave.config)
        cols["y"][i] = y
        cols["x"][i] = xs[i]
        cols["rho"][i] = st.rho
        cols["u"][i] = st.u
        cols["e"][i] = st.e
        cols["Y"][i] = st.Y[0]
        cols["p"][i] = p
        cols["T"][i] = T
    return cols


def read_profile_csv(path) -> dict[str, np.ndarray]:
    """Parse a profile dump written by the command-line tool."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header != ["y", "x", "rho", "u", "e", "Y", "p", "T"]:
            raise ConfigError(f"{path} is not a profile dump (header {header})")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return {name: data[:, i] for i, name in enumerate(header)}


def default_config() -> GasWaveConfig:
    """A comfortably overdriven single-species wave used by tests and demos."""
    return GasWaveConfig(
        Gamma=0.2,
        Cv=1.0,
        q=5.0,
        EA=10.0,
        Ti_low=2.0,
        Ti_high=4.0,
        K=2.0,
        Y0=1.0,
        upstream=UpstreamState(rho=1.0, u=-3.0, e=1.0),
    )


def nonreactive_config() -> GasWaveConfig:
    """Same shock with the reaction removed (Y0 = 0): a plain gas shock."""
    return replace(default_config(), q=0.0, Y0=0.0)
