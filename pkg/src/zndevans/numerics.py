"""Complex-valued adaptive Runge-Kutta integration and contour utilities.

The integrator is an embedded Dormand-Prince 5(4) pair with a proportional
step controller and per-step mixed absolute/relative error norm.  Everything
downstream (profile-coordinate shooting, the model benchmark) runs through
:func:`integrate_adaptive`, so mesh-point accounting lives here too.

Also here: winding numbers by the argument principle, adaptive contour
refinement, and complex Newton iteration with finite-difference derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ContourRefinementError,
    ContourThroughRootError,
    DegenerateRootError,
    NewtonError,
    NonFiniteStateError,
    StepSizeUnderflowError,
    UnderSampledContourError,
)

Evaluator = Callable[[complex], complex]

# Dormand-Prince 5(4) tableau.  Fifth-order propagating solution, fourth-order
# embedded error estimate, FSAL (last stage of an accepted step is the first
# stage of the next).
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# b5 - b4: weights of the embedded error estimate
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])

_SAFETY = 0.8
_MAX_FACTOR = 5.0
_HMAX_FRACTION = 0.1
_UNDERFLOW_FRACTION = 1e-14
_STAGES = 6  # marginal evaluations per attempted step (FSAL)

# Renormalization bounds for linear fields whose solutions outgrow doubles.
_RENORM_LIMIT = 1e200
_RENORM_TARGET = 1e100


@dataclass(frozen=True)
class OdeField:
    """First-order complex ODE system z' = eval(x, z) of fixed dimension."""

    dimension: int
    eval: Callable[[float, np.ndarray], np.ndarray]

    def __post_init__(self):
        if self.dimension <= 0:
            raise ValueError("OdeField dimension must be positive")


@dataclass
class SolveStats:
    """Step accounting for one adaptive integration."""

    accepted_steps: int
    rejected_steps: int
    rhs_evaluations: int
    span: tuple[float, float]

    @property
    def mesh_points(self) -> int:
        """Accepted nodes including both endpoints."""
        return self.accepted_steps + 1


def _integrate(
    field: OdeField,
    span: tuple[float, float],
    init: Sequence[complex],
    rel_tol: float,
    abs_tol,
    renormalize: bool,
    max_steps: int,
) -> tuple[np.ndarray, SolveStats, int]:
    x0, x1 = float(span[0]), float(span[1])
    if x0 == x1:
        raise ValueError("integration span endpoints must be distinct")
    if rel_tol <= 0.0:
        raise ValueError("rel_tol must be positive")
    atol = np.asarray(abs_tol, dtype=float)
    if np.any(atol <= 0.0):
        raise ValueError("abs_tol must be positive")
    z = np.array(init, dtype=complex)
    if z.shape != (field.dimension,):
        raise ValueError(f"initial state must have {field.dimension} entries")

    width = abs(x1 - x0)
    direction = 1.0 if x1 > x0 else -1.0
    h_floor = _UNDERFLOW_FRACTION * width
    h_max = _HMAX_FRACTION * width
    threshold = atol / rel_tol

    x = x0
    accepted = rejected = 0
    pow2 = 0
    k = np.empty((7, field.dimension), dtype=complex)
    k[0] = field.eval(x, z)
    nfev = 1
    if not np.all(np.isfinite(k[0])):
        raise NonFiniteStateError(x)

    # initial step from the scaled size of the first slope
    absh = h_max
    rh = float(np.max(np.abs(k[0]) / np.maximum(np.abs(z), threshold)))
    rh /= _SAFETY * rel_tol ** 0.2
    if absh * rh > 1.0:
        absh = max(1.0 / rh, h_floor)

    while True:
        failed_this_step = False
        while True:
            h = direction * absh
            at_end = False
            if direction * (x + h - x1) >= 0.0:
                h = x1 - x
                absh = abs(h)
                at_end = True

            for i in range(1, 7):
                zi = z + h * sum(a * k[j] for j, a in enumerate(_A[i]))
                k[i] = field.eval(x + _C[i] * h, zi)
            nfev += 6

            z_new = z + h * (_B5 @ k)
            err_vec = h * (_E @ k)
            with np.errstate(invalid="ignore", over="ignore"):
                scale = np.maximum(np.maximum(np.abs(z), np.abs(z_new)), threshold)
                err = float(np.max(np.abs(err_vec) / scale))

            if math.isfinite(err) and err <= rel_tol:
                break
            rejected += 1
            if not math.isfinite(err):
                absh *= 0.5
            elif not failed_this_step:
                absh *= max(0.1, _SAFETY * (rel_tol / err) ** 0.2)
            else:
                absh *= 0.5
            failed_this_step = True
            if absh < h_floor:
                if not math.isfinite(err):
                    raise NonFiniteStateError(x)
                raise StepSizeUnderflowError(x, h)
            if accepted + rejected >= max_steps:
                raise StepSizeUnderflowError(x, h)

        accepted += 1
        x = x1 if at_end else x + h
        z = z_new
        k[0] = k[6]
        if renormalize:
            zmax = float(np.max(np.abs(z)))
            if zmax > _RENORM_LIMIT:
                shift = int(math.ceil(math.log2(zmax / _RENORM_TARGET)))
                factor = math.ldexp(1.0, -shift)
                z = z * factor
                k[0] = k[0] * factor  # valid for linear fields only
                pow2 += shift
        if x == x1:
            return z, SolveStats(accepted, rejected, nfev, (x0, x1)), pow2
        if not failed_this_step:
            # grow only if this step went through on the first try
            if err == 0.0:
                absh = min(h_max, _MAX_FACTOR * absh)
            else:
                absh = min(
                    h_max, absh * min(_MAX_FACTOR, _SAFETY * (rel_tol / err) ** 0.2)
                )
        if accepted + rejected >= max_steps:
            raise StepSizeUnderflowError(x, h)


def integrate_adaptive(
    field: OdeField,
    span: tuple[float, float],
    init: Sequence[complex],
    rel_tol: float = 1e-5,
    abs_tol=1e-5,
    max_steps: int = 2_000_000,
) -> tuple[np.ndarray, SolveStats]:
    """Integrate a complex ODE system over ``span`` (either direction).

    ``abs_tol`` may be a scalar or a per-component array.  A step is accepted
    when ``max_i |err_i| / max(|z_i|, |z_new_i|, abs_tol_i/rel_tol) <= rel_tol``
    (the weighting of the solver class the reference mesh counts come from);
    on success the step grows by ``0.8 * (rel_tol/err)**(1/5)`` capped at 5
    and at one tenth of the span, and growth is suppressed entirely after an
    in-step rejection.

    Returns the final state and step statistics.  Raises
    :class:`StepSizeUnderflowError` on stiffness/blow-up and
    :class:`NonFiniteStateError` on overflow.
    """
    z, stats, _ = _integrate(field, span, init, rel_tol, abs_tol, False, max_steps)
    return z, stats


def integrate_adaptive_scaled(
    field: OdeField,
    span: tuple[float, float],
    init: Sequence[complex],
    rel_tol: float = 1e-5,
    abs_tol=1e-5,
    max_steps: int = 2_000_000,
) -> tuple[np.ndarray, int, SolveStats]:
    """Like :func:`integrate_adaptive` but for *linear* fields whose solution
    may exceed double range: the state is renormalized by exact powers of two
    on the fly.  Returns ``(mantissa, pow2, stats)`` with the final state equal
    to ``mantissa * 2**pow2``.
    """
    z, stats, pow2 = _integrate(field, span, init, rel_tol, abs_tol, True, max_steps)
    return z, pow2, stats


# ---------------------------------------------------------------------------
# contours and the argument principle


@dataclass(frozen=True)
class Contour:
    """Closed positively oriented polyline in the complex plane.

    ``nodes[0] == nodes[-1]`` and there are at least 8 distinct nodes.
    """

    nodes: np.ndarray
    description: str = "polyline"

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=complex)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size < 9:
            raise ValueError("contour needs at least 8 distinct nodes plus closure")
        if nodes[0] != nodes[-1]:
            raise ValueError("contour must be closed (first node == last node)")

    @classmethod
    def circle(cls, center: complex, radius: float, n: int = 32) -> "Contour":
        if radius <= 0.0:
            raise ValueError("radius must be positive")
        theta = np.linspace(0.0, 2.0 * np.pi, n + 1)
        nodes = center + radius * np.exp(1j * theta)
        nodes[-1] = nodes[0]
        return cls(nodes, f"circle(center={center}, radius={radius})")

    @classmethod
    def semicircle(
        cls, radius: float, axis_offset: float, n_arc: int = 32, n_side: int = 16
    ) -> "Contour":
        """Boundary of the right half-disk of given radius, its flat side
        shifted to ``Re = axis_offset`` to stay clear of the imaginary axis.
        Positively oriented: up the arc, down the flat side."""
        if radius <= 0.0 or not 0.0 < axis_offset < radius:
            raise ValueError("need radius > 0 and 0 < axis_offset < radius")
        theta_max = math.acos(axis_offset / radius)
        theta = np.linspace(-theta_max, theta_max, n_arc + 1)
        arc = radius * np.exp(1j * theta)
        side = np.linspace(arc[-1], arc[0], n_side + 1)[1:-1]
        nodes = np.concatenate([arc, side, arc[:1]])
        return cls(nodes, f"semicircle(radius={radius}, axis_offset={axis_offset})")


def winding_number(samples: Sequence[complex]) -> int:
    """Winding number about the origin of a closed loop of samples.

    The samples are treated cyclically (a duplicated final sample is
    tolerated).  Raises :class:`ContourThroughRootError` on an exactly zero
    sample and :class:`UnderSampledContourError` when any consecutive phase
    difference reaches pi/2, in which case the caller should refine.
    """
    s = np.asarray(samples, dtype=complex)
    if s.size < 3:
        raise ValueError("need at least 3 samples")
    if s[0] == s[-1]:
        s = s[:-1]
    if np.any(s == 0.0) or not np.all(np.isfinite(s)):
        raise ContourThroughRootError("zero or non-finite sample on contour")
    ratio = np.roll(s, -1) / s
    steps = np.angle(ratio)
    worst = float(np.max(np.abs(steps)))
    if worst >= np.pi / 2:
        raise UnderSampledContourError(
            f"phase step {worst:.3f} rad >= pi/2; refine the contour"
        )
    total = float(np.sum(steps)) / (2.0 * np.pi)
    nearest = round(total)
    if abs(total - nearest) > 1e-6:
        raise UnderSampledContourError(
            f"accumulated argument {total:.3e} turns is not an integer"
        )
    return int(nearest)


def refine_contour(
    evaluator: Evaluator,
    contour: Contour,
    max_phase_step: float = np.pi / 4,
    max_depth: int = 12,
    map_fn: Callable = map,
) -> tuple[np.ndarray, np.ndarray]:
    """Sample ``evaluator`` on the contour, bisecting edges until every
    consecutive phase difference is below ``max_phase_step``.

    Returns ``(nodes, values)``, both closed (first == last).  ``map_fn``
    lets callers evaluate batches of new midpoints concurrently.  Exceeding
    ``max_depth`` bisections on one original edge means a zero sits on or
    near the contour and raises :class:`ContourRefinementError`.
    """
    if not 0.0 < max_phase_step <= np.pi / 2:
        raise ValueError("max_phase_step must lie in (0, pi/2]")
    nodes = list(contour.nodes)
    values = list(map_fn(evaluator, nodes))
    depths = [0] * (len(nodes) - 1)

    while True:
        for v in values:
            if v == 0.0 or not np.isfinite(v):
                raise ContourThroughRootError("zero or non-finite value on contour")
        jumps = [
            abs(np.angle(values[i + 1] / values[i])) for i in range(len(nodes) - 1)
        ]
        bad = [i for i, j in enumerate(jumps) if j >= max_phase_step]
        if not bad:
            break
        if any(depths[i] >= max_depth for i in bad):
            raise ContourRefinementError(
                f"refinement depth cap {max_depth} exceeded; "
                "a root lies on or near the contour"
            )
        midpoints = [0.5 * (nodes[i] + nodes[i + 1]) for i in bad]
        midvalues = list(map_fn(evaluator, midpoints))
        for i, zm, vm in sorted(zip(bad, midpoints, midvalues), reverse=True):
            nodes.insert(i + 1, zm)
            values.insert(i + 1, vm)
            depths[i : i + 1] = [depths[i] + 1, depths[i] + 1]
    return np.asarray(nodes, dtype=complex), np.asarray(values, dtype=complex)


def newton_root(
    evaluator: Evaluator,
    seed: complex,
    tol: float = 1e-10,
    max_iter: int = 30,
) -> complex:
    """Newton iteration for a zero of an analytic map.

    The derivative is approximated by a centered difference along the real
    direction with step ``1e-6 * max(1, |lambda|)`` (legitimate for analytic
    evaluators).  Convergence means the Newton step dropped below ``tol``.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    lam = complex(seed)
    for _ in range(max_iter):
        f = evaluator(lam)
        if f == 0.0:
            return lam
        h = 1e-6 * max(1.0, abs(lam))
        deriv = (evaluator(lam + h) - evaluator(lam - h)) / (2.0 * h)
        if abs(deriv) < 1e-14:
            raise DegenerateRootError(
                f"|derivative| = {abs(deriv):.3e} at lambda={lam:.6g}; "
                "degenerate or multiple root"
            )
        step = f / deriv
        lam -= step
        if abs(step) < tol:
            return lam
    raise NewtonError(f"no convergence within {max_iter} iterations from seed {seed}")
