"""Riemannian gradient norm of the diastasis and its supremum.

The gradient-norm convention is

    |grad_y D_z|^2 = 4 * sum_ij g^(i jbar)(y) d_i D  d_jbar D,

the factor 4 fixed so that the model metric gives |grad_y D_0| = 2|y| and a
supremum of exactly 2 (curvature -4 normalization; any other factor would
contradict the closed-form oracle).

The supremum search exploits rotation invariance: D depends on a pair (y, z)
only through (|y|, |z|, y . zbar), so the search runs on the slice
z = (s, 0, ..., 0), y = (r e^{i theta}, 0, ..., 0), exact for this family.
When the maximizing sequence runs to the boundary r -> 1 the limit is
extrapolated geometrically in 1 - r (Aitken), never reported as the raw grid
maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import diastasis as dia
from . import specs
from .errors import DomainError, Unconverged
from .specs import MetricSpec


@dataclass(frozen=True)
class SearchGrid:
    """Lattice for the slice search; r levels approach the boundary dyadically.

    The z-radius grid includes s = 1: for |y| < 1 the gradient of D_z(y)
    depends on z only through the pairing y . zbar, which stays inside the
    unit disc, so the s -> 1 limit is a plain evaluation.
    """

    n_s: int = 21
    s_max: float = 1.0
    n_theta: int = 32
    r_levels: int = 40
    interior_r: int = 12

    def s_values(self) -> np.ndarray:
        return np.linspace(0.0, self.s_max, self.n_s)

    def theta_values(self) -> np.ndarray:
        return np.linspace(0.0, 2.0 * math.pi, self.n_theta, endpoint=False)

    def omr_values(self) -> np.ndarray:
        """1 - r on the lattice, exact for the dyadic boundary levels."""
        interior = np.linspace(0.05, 0.5, self.interior_r, endpoint=False)
        dyadic = np.exp2(-np.arange(1, self.r_levels + 1, dtype=float))
        return np.concatenate([1.0 - interior, dyadic])

    def r_values(self) -> np.ndarray:
        return 1.0 - self.omr_values()


@dataclass(frozen=True)
class CalibrationEstimate:
    value: float
    attained_at: tuple | None
    boundary_limit: bool
    extrapolation_residual: float
    error: float
    grid: dict = field(default_factory=dict)


def grad_norm(spec: MetricSpec, kernel, y, z) -> float:
    """|grad_y D_z| by analytic differentiation of the polarized kernel."""
    y, z = dia._check_ball(spec, y, z)
    t = float(np.vdot(y, y).real)
    p = complex(np.vdot(z, y))  # y . zbar
    d1 = float(specs.phi_d1(spec, t))
    a = d1 * np.conj(y) - kernel_deriv_at(kernel, p) * np.conj(z)
    ginv = specs.metric_tensor(spec, y).inverse
    val = 4.0 * float(np.real(np.vdot(a, ginv @ a)))
    return math.sqrt(max(0.0, val))


def kernel_deriv_at(kernel, p):
    return complex(dia.kernel_deriv(kernel, p))


def _slice_grad_sq(spec: MetricSpec, kernel, r, theta, s, omr=None):
    """Squared gradient norm on the slice; broadcasts over numpy grids.

    Pass omr = 1 - r where known exactly (dyadic boundary levels) so that
    1 - r^2 = omr (2 - omr) carries no cancellation.
    """
    omr = 1.0 - r if omr is None else omr
    omt = omr * (2.0 - omr)
    t = 1.0 - omt
    d1 = specs.phi_d1(spec, t, omt)
    d2 = specs.phi_d2(spec, t, omt)
    p = r * s * np.exp(1j * theta)
    a1 = d1 * r * np.exp(-1j * theta) - dia.kernel_deriv(kernel, p) * s
    return 4.0 * np.abs(a1) ** 2 / (d1 + t * d2)


def _refine_peak(spec, kernel, r0, th0, s0, s_max, rounds: int = 24):
    """Coordinate-wise parabolic polish of an interior lattice maximum."""

    def value_at(r, th, s):
        return float(np.sqrt(_slice_grad_sq(spec, kernel, np.float64(r), np.float64(th), np.float64(s))))

    point = [r0, th0, s0]
    bounds = [(1e-6, 1.0 - 1e-9), (-math.pi, 3.0 * math.pi), (0.0, s_max)]
    steps = [0.02, 0.1, 0.02]
    best = value_at(*point)
    last_move = 0.0
    for _ in range(rounds):
        last_move = 0.0
        for i in range(3):
            h = steps[i]
            lo, hi = bounds[i]
            x0 = point[i]
            xs = [max(lo, x0 - h), x0, min(hi, x0 + h)]
            vals = []
            for x in xs:
                point[i] = x
                vals.append(value_at(*point))
            denom = vals[0] - 2.0 * vals[1] + vals[2]
            if denom < 0.0 and xs[0] < xs[1] < xs[2]:
                shift = 0.5 * (vals[0] - vals[2]) / denom * h
                cand = min(hi, max(lo, x0 + shift))
            else:
                cand = xs[int(np.argmax(vals))]
            point[i] = cand
            new = value_at(*point)
            if new < best:
                point[i] = xs[int(np.argmax(vals))]
                new = max(vals)
            last_move = max(last_move, abs(new - best))
            best = max(best, new)
            steps[i] = max(h * 0.5, 1e-7)
    at = {"y_radius": float(point[0]), "y_angle": float(point[1]) % (2.0 * math.pi), "z_radius": float(point[2])}
    return best, at, last_move


def _aitken(seq: np.ndarray) -> tuple[float, float, float]:
    """Geometric-limit extrapolation; returns (limit, residual, ratio)."""
    f2, f1, f0 = seq[-1], seq[-2], seq[-3]
    d1 = f1 - f0
    d2 = f2 - f1
    if abs(d2) <= 1e-13 * max(1.0, abs(f2)):
        # plateau at machine precision: the limit is reached
        return float(f2), abs(float(d2)), 0.0
    q = d2 / d1 if d1 != 0.0 else 0.0
    if not (0.0 <= q < 0.995):
        # not a geometric approach; fall back to the raw trend
        return float(f2), abs(float(d2)), float(q)
    limit = f2 + d2 * q / (1.0 - q)
    return float(limit), abs(float(limit - f2)), float(q)


def calibration_constant(
    spec: MetricSpec,
    kernel=None,
    search: SearchGrid | None = None,
    tol: float = 0.02,
) -> CalibrationEstimate:
    """sup over pairs of |grad_y D_z| with boundary extrapolation.

    Raises Unconverged when the boundary trend is not geometric within tol.
    """
    specs.ensure_complete(spec)
    specs.ensure_positive(spec)
    if kernel is None:
        kernel = dia.polarize_radial(spec)
    search = search or SearchGrid()

    s = search.s_values()[None, None, :]
    theta = search.theta_values()[None, :, None]
    omr = search.omr_values()[:, None, None]
    vals = np.sqrt(_slice_grad_sq(spec, kernel, 1.0 - omr, theta, s, omr=omr))

    raw_max = float(vals.max())
    # deterministic tie-break: smallest |y|, then smallest s, theta
    ties = np.argwhere(vals >= raw_max - 1e-12)
    idx = min((tuple(ix) for ix in ties), key=lambda ix: (ix[0], ix[2], ix[1]))
    i_r, i_th, i_s = idx
    r_flat = search.r_values()
    at = {
        "y_radius": float(r_flat[i_r]),
        "y_angle": float(search.theta_values()[i_th]),
        "z_radius": float(search.s_values()[i_s]),
    }
    grid_desc = {
        "n_s": search.n_s,
        "s_max": search.s_max,
        "n_theta": search.n_theta,
        "r_levels": search.r_levels,
    }

    per_level = vals.max(axis=(1, 2))
    tail = per_level[search.interior_r:]
    argmax_level = int(np.argmax(per_level))
    interior_peak = (
        argmax_level < len(per_level) - 5 and tail[-1] - tail[-5] < 0.0
    )

    if interior_peak:
        # attained inside the lattice: polish the peak coordinate-wise
        value, refined_at, move = _refine_peak(
            spec,
            kernel,
            at["y_radius"],
            at["y_angle"],
            at["z_radius"],
            s_max=search.s_max,
        )
        return CalibrationEstimate(
            value=max(value, raw_max),
            attained_at=refined_at,
            boundary_limit=refined_at["z_radius"] >= 1.0,
            extrapolation_residual=0.0,
            error=float(max(1e-4, move)),
            grid=grid_desc,
        )

    limit, resid, q = _aitken(tail)
    limit_prev, _, _ = _aitken(tail[:-2])
    consistency = abs(limit - limit_prev)
    residual = max(resid, consistency)
    if q >= 0.995 or residual > tol * max(1.0, abs(limit)):
        raise Unconverged(
            f"calibration boundary extrapolation residual {residual:.3g} above tolerance "
            f"(ratio {q:.3f}) for {spec.name}"
        )
    value = max(limit, raw_max)  # extrapolation may only increase the estimate
    return CalibrationEstimate(
        value=value,
        attained_at=at,
        boundary_limit=True,
        extrapolation_residual=residual,
        error=float(max(residual, 1e-4)),
        grid=grid_desc,
    )
