"""Three evaluation algorithms for the detonation stability determinant.

All integrations run in the reaction coordinate y (profile closed-form, no
interpolation error) with the measure factor sigma(y) = dx/dy.  Internally
the adjoint is propagated as the transpose system

    dZ/dy = -sigma(y) * G(lambda, y)^T Z,

whose solution is the componentwise conjugate of the conjugate-transpose
formulation; pairings are then plain bilinear dots.  This keeps every
quantity analytic in lambda, which the winding-number machinery requires.

Methods:

* ``evans_neutral``   forward from y = -M with the asymptotic decay rate
  factored out, so the tracked solution is neutral and error modes are
  damped.  The well-conditioned default.
* ``evans_erpenbeck`` forward without factoring, augmented with a running
  quadrature of the profile-derivative term so one adaptive controller
  governs both the ODE and the quadrature.
* ``evans_lee_stewart`` backward from the boundary jump; error modes grow,
  which is the classical conditioning weakness near roots.

Normalizations are chosen so neutral and Erpenbeck values coincide up to
truncation error; the Lee-Stewart value differs by the recorded analytic
scalar ``kappa_to_neutral``.
"""

from __future__ import annotations

import cmath
import json
from dataclasses import dataclass

import numpy as np

from .errors import EvansOverflowError, MisselectedModeError, NumericalDomainError
from .numerics import OdeField, SolveStats, integrate_adaptive
from .spectral import SpectralFrame, jacobians, make_frame
from .znd import SteadyWave, profile_at, profile_deriv, reaction_psi, x_of_y

_EXP_GUARD = 690.0  # |exponent| beyond which doubles over/underflow

METHOD_NEUTRAL = "neutral"
METHOD_ERPENBECK = "erpenbeck"
METHOD_LEE_STEWART = "lee_stewart"
METHODS = (METHOD_NEUTRAL, METHOD_ERPENBECK, METHOD_LEE_STEWART)


@dataclass(frozen=True)
class EvansResult:
    """Determinant value at one frequency plus solver accounting.

    ``kappa_to_neutral`` is the analytic scalar with
    ``kappa_to_neutral * D == D_neutral`` up to truncation error.
    """

    lam: complex
    D: complex
    method: str
    M: float
    stats: SolveStats
    kappa_to_neutral: complex = 1.0 + 0j

    def to_json_dict(self) -> dict:
        return {
            "lambda": [self.lam.real, self.lam.imag],
            "D": [self.D.real, self.D.imag],
            "method": self.method,
            "M": self.M,
            "accepted_steps": self.stats.accepted_steps,
            "rejected_steps": self.stats.rejected_steps,
            "rhs_evaluations": self.stats.rhs_evaluations,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, rec: dict) -> "EvansResult":
        span = (0.0, -rec["M"]) if rec["method"] == METHOD_LEE_STEWART else (-rec["M"], 0.0)
        stats = SolveStats(
            accepted_steps=rec["accepted_steps"],
            rejected_steps=rec["rejected_steps"],
            rhs_evaluations=rec["rhs_evaluations"],
            span=span,
        )
        return cls(
            lam=complex(*rec["lambda"]),
            D=complex(*rec["D"]),
            method=rec["method"],
            M=rec["M"],
            stats=stats,
        )


def _sigma_and_G(wave: SteadyWave, lam: complex, y: float):
    """(sigma, -lam*A0 + C, A1) at the profile point; G is applied via A1 solves."""
    state = profile_at(wave, y)
    A0, A1, C = jacobians(state, wave.config)
    sig = wave.m / reaction_psi(state, wave.config)
    return sig, (-lam) * A0 + C, A1


def _resolve_M(wave: SteadyWave, M: float | None) -> float:
    return wave.default_M if M is None else float(M)


def _adjoint_rhs(wave: SteadyWave, lam: complex, shift: complex):
    """dZ/dy = -sigma * ((G - shift I)^T) Z without forming G explicitly."""

    def rhs(y: float, z: np.ndarray) -> np.ndarray:
        sig, M, A1 = _sigma_and_G(wave, lam, y)
        # G^T z = A1^{-T} M^T z
        w = np.linalg.solve(A1.T.astype(complex), M.T @ z)
        return -sig * (w - shift * z)

    return rhs


def evans_neutral(
    wave: SteadyWave,
    lam: complex,
    M: float | None = None,
    tol: float = 1e-5,
    abs_tol: float | None = None,
) -> EvansResult:
    """Forward adjoint shooting with the asymptotic decay factored out.

    Integrates dZ/dy = -sigma(y) (G(y) - g_minus I)^T Z from y=-M with
    Z(-M) = ell(lambda); the factoring makes the tracked solution neutral at
    the burned end, so the value at y=0 is O(1) and independent of M up to
    truncation error.  Returns D = Z(0) . jump.
    """
    M = _resolve_M(wave, M)
    frame = make_frame(wave, lam)
    field = OdeField(dimension=3 + wave.burned.r, eval=_adjoint_rhs(wave, lam, frame.g_minus))
    z, stats = integrate_adaptive(
        field, (-M, 0.0), frame.ell, rel_tol=tol, abs_tol=abs_tol if abs_tol is not None else tol
    )
    growth = float(np.linalg.norm(z) / np.linalg.norm(frame.ell))
    if not 1e-6 < growth < 1e6:
        raise MisselectedModeError(
            f"factored adjoint magnitude changed by {growth:.3e}: either the "
            "decay rate g_minus is misselected, or the profile transition "
            "out-scales the absolute-tolerance floor (tighten abs_tol)"
        )
    D = complex(z @ frame.jump)
    return EvansResult(lam=complex(lam), D=D, method=METHOD_NEUTRAL, M=M, stats=stats)


def _edge_prefactor(wave: SteadyWave, frame: SpectralFrame, M: float) -> complex:
    """exp(-g_minus * x(-M)): relates unfactored data at y=-M to the neutral
    normalization.  Tiny for large |lambda| M; raises on double-range exit."""
    x_M = float(x_of_y(wave, [-M])[0])
    exponent = -frame.g_minus * x_M
    if abs(exponent.real) > _EXP_GUARD:
        raise EvansOverflowError(
            f"unfactored mode spans e^{abs(exponent.real):.0f} over the domain; "
            "out of double range -- use the neutral method"
        )
    return cmath.exp(exponent)


def evans_erpenbeck(
    wave: SteadyWave,
    lam: complex,
    M: float | None = None,
    tol: float = 1e-5,
    abs_tol: float | None = None,
) -> EvansResult:
    """Forward adjoint shooting without factoring, plus a running quadrature.

    The state is augmented with the integral of lambda * Z . (F0 o profile)'
    so the one adaptive controller bounds ODE and quadrature error together;
    the determinant is that integral plus the pure-jump boundary term.  The
    initial data carry the prefactor exp(-g_minus x(-M)), which makes the
    returned value coincide with the neutral one (kappa = 1).
    """
    M = _resolve_M(wave, M)
    frame = make_frame(wave, lam)
    prefactor = _edge_prefactor(wave, frame, M)
    n = 3 + wave.burned.r
    adjoint = _adjoint_rhs(wave, lam, 0.0)

    def rhs(y: float, z: np.ndarray) -> np.ndarray:
        dz = adjoint(y, z[:n])
        A0 = jacobians(profile_at(wave, y), wave.config)[0]
        dquad = lam * (z[:n] @ (A0 @ profile_deriv(wave, y)))
        return np.concatenate([dz, [dquad]])

    base = tol if abs_tol is None else abs_tol
    atol = np.full(n + 1, base)
    atol[:n] *= max(abs(prefactor), 1e-280)  # keep the tiny start under relative control
    init = np.concatenate([prefactor * frame.ell, [0.0]])
    z, stats = integrate_adaptive(
        OdeField(dimension=n + 1, eval=rhs), (-M, 0.0), init, rel_tol=tol, abs_tol=atol
    )
    jump_F0_only = frame.jump - _neumann_source(wave)  # lam * [F0], no source term
    D = complex(z[n] + z[:n] @ jump_F0_only)
    return EvansResult(lam=complex(lam), D=D, method=METHOD_ERPENBECK, M=M, stats=stats)


def _neumann_source(wave: SteadyWave) -> np.ndarray:
    from .znd import fluxes

    return fluxes(wave.neumann, wave.config)[2]


def evans_lee_stewart(
    wave: SteadyWave,
    lam: complex,
    M: float | None = None,
    tol: float = 1e-5,
    abs_tol: float | None = None,
) -> EvansResult:
    """Backward shooting of the forward eigenvalue system from the jump data.

    Integrates dZ0/dy = sigma(y) G(y) Z0 from Z0(0) = jump down to y=-M and
    pairs with the analytic left mode: D = ell . Z0(-M).  Error modes grow
    along the way, which is this method's classical weakness; the value
    relates to the neutral one through kappa_to_neutral = exp(-g_minus x(-M)).
    """
    M = _resolve_M(wave, M)
    frame = make_frame(wave, lam)
    kappa = _edge_prefactor(wave, frame, M)

    def rhs(y: float, z: np.ndarray) -> np.ndarray:
        sig, Mmat, A1 = _sigma_and_G(wave, lam, y)
        return sig * (Mmat @ np.linalg.solve(A1.astype(complex), z))

    field = OdeField(dimension=3 + wave.burned.r, eval=rhs)
    z, stats = integrate_adaptive(
        field, (0.0, -M), frame.jump, rel_tol=tol, abs_tol=abs_tol if abs_tol is not None else tol
    )
    D = complex(frame.ell @ z)
    return EvansResult(
        lam=complex(lam),
        D=D,
        method=METHOD_LEE_STEWART,
        M=M,
        stats=stats,
        kappa_to_neutral=kappa,
    )


_EVALUATORS = {
    METHOD_NEUTRAL: evans_neutral,
    METHOD_ERPENBECK: evans_erpenbeck,
    METHOD_LEE_STEWART: evans_lee_stewart,
}


def evaluate(wave: SteadyWave, lam: complex, method: str = METHOD_NEUTRAL, **kw) -> EvansResult:
    try:
        fn = _EVALUATORS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}") from None
    return fn(wave, lam, **kw)


def duality_check(
    wave: SteadyWave,
    lam: complex,
    M: float | None = None,
    n_grid: int = 9,
    tol: float = 1e-8,
) -> float:
    """Constancy test of the adjoint/forward pairing along the profile.

    The product Z_adjoint(y) . Z0(y) is independent of y in exact arithmetic;
    returns the maximum relative deviation from its median over an n_grid
    point mesh.  Deviation tracks the integration tolerance.
    """
    if complex(lam).real <= 0.0:
        raise NumericalDomainError("duality check needs Re(lambda) > 0")
    if n_grid < 3:
        raise ValueError("n_grid must be at least 3")
    M = _resolve_M(wave, M)
    frame = make_frame(wave, lam)
    prefactor = _edge_prefactor(wave, frame, M)
    grid = np.linspace(-M, 0.0, n_grid)
    n = 3 + wave.burned.r

    adjoint_field = OdeField(dimension=n, eval=_adjoint_rhs(wave, lam, 0.0))
    atol = tol * max(abs(prefactor), 1e-280)
    z_adj = np.empty((n_grid, n), dtype=complex)
    z = prefactor * frame.ell
    z_adj[0] = z
    for i in range(n_grid - 1):
        z, _ = integrate_adaptive(adjoint_field, (grid[i], grid[i + 1]), z, rel_tol=tol, abs_tol=atol)
        z_adj[i + 1] = z

    def fwd_rhs(y: float, zz: np.ndarray) -> np.ndarray:
        sig, Mmat, A1 = _sigma_and_G(wave, lam, y)
        return sig * (Mmat @ np.linalg.solve(A1.astype(complex), zz))

    fwd_field = OdeField(dimension=n, eval=fwd_rhs)
    z_fwd = np.empty((n_grid, n), dtype=complex)
    z = frame.jump.astype(complex)
    z_fwd[n_grid - 1] = z
    for i in range(n_grid - 1, 0, -1):
        z, _ = integrate_adaptive(fwd_field, (grid[i], grid[i - 1]), z, rel_tol=tol, abs_tol=tol)
        z_fwd[i - 1] = z

    products = np.einsum("ij,ij->i", z_adj, z_fwd)
    center = complex(np.median(products.real), np.median(products.imag))
    if center == 0.0:
        raise NumericalDomainError("duality products vanish; lambda sits on a root")
    return float(np.max(np.abs(products - center)) / abs(center))
