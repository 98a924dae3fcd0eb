"""Polarized kernels and the Calabi diastasis.

For a rotation-invariant potential Phi = phi(|z|^2) the polarization replaces
|z|^2 by the Hermitian pairing p = z . wbar, giving

    kernel(p) = -log_coeff * log(1 - p) + sum_k c_k p^k,

holomorphic in z and antiholomorphic in w on |p| < 1 (Cauchy-Schwarz keeps
1 - p off the branch cut).  The diastasis is

    D(z, w) = Phi(z) + Phi(w) - kernel(z . wbar) - kernel(w . zbar).

The two cross terms are exact complex conjugates (real series coefficients,
principal log), so D is evaluated as Phi(z) + Phi(w) - 2 Re kernel(z . wbar)
and is real by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specs
from .errors import DomainError
from .quadrature import cumulative_radial_integral
from .specs import MetricSpec, potential_radial


@dataclass(frozen=True)
class PolarizedKernel:
    """Analytic continuation of the radial potential in the pairing p."""

    spec: MetricSpec
    log_coeff: float
    coeffs: tuple[float, ...]
    truncation: int


def polarize_radial(spec: MetricSpec, r_max: float = 0.95) -> PolarizedKernel:
    """Kernel with log_coeff = scale*alpha and c_k = scale*a_k.

    ``truncation`` is the term count needed for series-mode evaluation
    (validation and cross-checks) at radii up to r_max; the production
    evaluator uses the closed-form log.
    """
    return PolarizedKernel(
        spec=spec,
        log_coeff=spec.scale * spec.alpha,
        coeffs=tuple(spec.scale * a for a in spec.poly),
        truncation=specs.k_int_for(spec, r_max),
    )


def kernel_value(kernel: PolarizedKernel, p):
    """kernel(p) for complex pairing p, |p| < 1, principal branch."""
    p = np.asarray(p)
    val = -kernel.log_coeff * np.log(1.0 - p)
    if kernel.coeffs:
        val = val + np.polyval(list(reversed(kernel.coeffs)) + [0.0], p)
    return val


def kernel_deriv(kernel: PolarizedKernel, p):
    """d kernel / d p, by analytic differentiation of the series."""
    p = np.asarray(p)
    val = kernel.log_coeff / (1.0 - p)
    if kernel.coeffs:
        coeffs = [k * c for k, c in enumerate(kernel.coeffs, start=1)]
        val = val + np.polyval(list(reversed(coeffs)), p)
    return val


def kernel_series_value(kernel: PolarizedKernel, p, terms: int | None = None):
    """Partial-sum evaluation with the log expanded; cross-check path only."""
    p = np.asarray(p)
    k = np.arange(1, (terms or kernel.truncation) + 1)
    powers = p[..., None] ** k
    log_part = kernel.log_coeff * np.sum(powers / k, axis=-1)
    val = log_part
    if kernel.coeffs:
        val = val + np.polyval(list(reversed(kernel.coeffs)) + [0.0], p)
    return val


def _pairing(z, w) -> complex:
    # z . wbar = sum_i z_i conj(w_i)
    return complex(np.vdot(np.asarray(w, dtype=complex), np.asarray(z, dtype=complex)))


def _check_ball(spec, *points):
    out = []
    for v in points:
        v = np.asarray(v, dtype=complex).reshape(-1)
        if v.shape != (spec.dim,):
            raise DomainError(f"point has {v.shape[0]} components, expected {spec.dim}")
        if np.vdot(v, v).real >= 1.0:
            raise DomainError(f"|z| >= 1: {v}")
        out.append(v)
    return out


def diastasis_eval(kernel: PolarizedKernel, z, w) -> float:
    """D(z, w) = Phi(z) + Phi(w) - 2 Re kernel(z . wbar)."""
    spec = kernel.spec
    z, w = _check_ball(spec, z, w)
    tz = np.vdot(z, z).real
    tw = np.vdot(w, w).real
    cross = kernel_value(kernel, _pairing(z, w))
    return float(
        potential_radial(spec, tz) + potential_radial(spec, tw) - 2.0 * np.real(cross)
    )


def diastasis_from_center(spec: MetricSpec, t, omt=None):
    """D(z, 0) as a function of t = |z|^2; equals the potential itself."""
    return potential_radial(spec, t, omt)


def hyperbolic_closed_forms(z, w) -> tuple[float, float]:
    """Closed-form diastasis and geodesic distance of the model metric.

    D = -log[(1-|z|^2)(1-|w|^2) / |1 - z.wbar|^2], rho = arccosh(e^{D/2})
    (curvature -4 normalization, so rho(0, r) = arctanh r).
    """
    z = np.asarray(z, dtype=complex).reshape(-1)
    w = np.asarray(w, dtype=complex).reshape(-1)
    tz = np.vdot(z, z).real
    tw = np.vdot(w, w).real
    if tz >= 1.0 or tw >= 1.0:
        raise DomainError("points must lie in the open unit ball")
    p = _pairing(z, w)
    diastasis = float(-np.log((1.0 - tz) * (1.0 - tw) / abs(1.0 - p) ** 2))
    distance = float(np.arccosh(max(1.0, math.exp(diastasis / 2.0))))
    return diastasis, distance


def radial_distance(spec: MetricSpec, radii, nodes: int = 24) -> np.ndarray:
    """Geodesic distance rho(0, r) along a radial line, by quadrature.

    Rotation invariance makes radial lines geodesics; the length element is
    sqrt(phi' + t phi'') dr, normalized so the model case gives arctanh r.
    """
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    if np.any(radii < 0) or np.any(radii >= 1):
        raise DomainError("radii must lie in [0, 1)")
    order = np.argsort(radii)
    sorted_r = radii[order]

    def integrand(r, omr):
        omt = omr * (2.0 - omr)
        return specs.radial_length_density(spec, 1.0 - omt, omt)

    vals = cumulative_radial_integral(integrand, sorted_r, nodes=nodes)
    out = np.empty_like(vals)
    out[order] = vals
    return out


def distance(spec: MetricSpec, z, w) -> float | None:
    """Geodesic distance where the artifact defines one.

    Poly-free specs are scaled copies of the model metric (factor
    scale*alpha), so the closed form applies with a sqrt factor.  Otherwise
    only radial distances from the origin are defined; returns None for
    general off-origin pairs.
    """
    z, w = _check_ball(spec, z, w)
    if not spec.poly:
        lam = spec.scale * spec.alpha
        _, rho = hyperbolic_closed_forms(z, w)
        return math.sqrt(lam) * rho
    tw = np.vdot(w, w).real
    tz = np.vdot(z, z).real
    if tw == 0.0:
        return float(radial_distance(spec, [math.sqrt(tz)])[0])
    if tz == 0.0:
        return float(radial_distance(spec, [math.sqrt(tw)])[0])
    return None
