"""Rotation-invariant Kahler potentials on the unit ball and their metrics.

A spec describes the potential

    Phi(z) = scale * ( -alpha * log(1 - |z|^2) + sum_{k=1..K} poly[k-1] * |z|^{2k} )

on B^n = { z in C^n : |z| < 1 }.  Writing t = |z|^2 and Phi = phi(t), the
Hermitian metric it induces is

    g_{i jbar} = phi'(t) delta_ij + phi''(t) zbar_i z_j,

with eigenvalue phi'(t) (multiplicity n-1, tangential) and
phi'(t) + t phi''(t) (radial), hence

    det g = phi'(t)^(n-1) * (phi'(t) + t phi''(t)).

Real lengths use the convention |v|_g^2 = sum_ij g_{i jbar} v_i vbar_j, so the
squared length of the unit radial direction is phi' + t phi''.  For the model
potential -log(1 - t) this makes the radial distance from the origin equal to
arctanh(r) (holomorphic sectional curvature -4).

Everything here is pure and the dataclasses are immutable; concurrent use is
safe.  Radial evaluators accept ``omt`` = 1 - t alongside t so that callers
working close to the boundary can supply 1 - t without catastrophic
cancellation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import (
    DomainError,
    IncompleteMetric,
    InvalidSpec,
    NonPositiveMetric,
    TailTooLarge,
)

SPEC_KEYS = {"name", "dim", "alpha", "poly", "scale"}

_TAIL_TOL = 1e-12
_KINT_CAP = 2_000_000


@dataclass(frozen=True)
class MetricSpec:
    """Declarative description of a rotation-invariant potential.

    dim >= 1, scale > 0, alpha >= 0.  alpha > 0 is required for any entropy
    operation (logarithmic boundary blow-up as completeness proxy).
    """

    name: str
    dim: int
    alpha: float
    poly: tuple[float, ...] = ()
    scale: float = 1.0

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise InvalidSpec("spec name must be a nonempty string")
        if not isinstance(self.dim, int) or self.dim < 1:
            raise InvalidSpec(f"dim must be a positive integer, got {self.dim!r}")
        if not math.isfinite(self.alpha) or self.alpha < 0:
            raise InvalidSpec(f"alpha must be a nonnegative real, got {self.alpha!r}")
        if not math.isfinite(self.scale) or self.scale <= 0:
            raise InvalidSpec(f"scale must be a positive real, got {self.scale!r}")
        object.__setattr__(self, "poly", tuple(float(a) for a in self.poly))
        if any(not math.isfinite(a) for a in self.poly):
            raise InvalidSpec("poly coefficients must be finite reals")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "scale", float(self.scale))

    @property
    def complete(self) -> bool:
        return self.alpha > 0

    def scaled(self, lam: float) -> "MetricSpec":
        if not (lam > 0 and math.isfinite(lam)):
            raise InvalidSpec(f"scale factor must be positive, got {lam!r}")
        return replace(self, scale=self.scale * lam)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "alpha": self.alpha,
            "poly": list(self.poly),
            "scale": self.scale,
        }


def hyperbolic_spec(dim: int, name: str | None = None) -> MetricSpec:
    """The model case: alpha = 1, no polynomial tail, unit scale."""
    return MetricSpec(name=name or f"hyperbolic-{dim}", dim=dim, alpha=1.0, poly=(), scale=1.0)


def spec_from_dict(data: dict) -> MetricSpec:
    if not isinstance(data, dict):
        raise InvalidSpec("spec document must be a JSON object")
    unknown = set(data) - SPEC_KEYS
    if unknown:
        raise InvalidSpec(f"unknown spec keys: {sorted(unknown)}")
    missing = SPEC_KEYS - set(data)
    if missing:
        raise InvalidSpec(f"missing spec keys: {sorted(missing)}")
    if not isinstance(data["dim"], int) or isinstance(data["dim"], bool):
        raise InvalidSpec("dim must be a JSON integer")
    if not isinstance(data["poly"], list):
        raise InvalidSpec("poly must be a JSON array of numbers")
    return MetricSpec(
        name=data["name"],
        dim=data["dim"],
        alpha=float(data["alpha"]),
        poly=tuple(float(a) for a in data["poly"]),
        scale=float(data["scale"]),
    )


def load_spec(path: str | Path) -> MetricSpec:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidSpec(f"cannot read spec file {path}: {exc}") from exc
    return spec_from_dict(data)


# -- radial derivatives of the potential ------------------------------------

def _split_t(t, omt):
    t = np.asarray(t, dtype=float)
    omt = np.asarray(1.0 - t, dtype=float) if omt is None else np.asarray(omt, dtype=float)
    return t, omt


def potential_radial(spec: MetricSpec, t, omt=None):
    """phi(t), evaluated as scale * (alpha * u + poly(t)) with u = -log(1-t)."""
    t, omt = _split_t(t, omt)
    val = spec.alpha * (-np.log(omt))
    if spec.poly:
        val = val + np.polyval(list(reversed(spec.poly)) + [0.0], t)
    return spec.scale * val


def phi_d1(spec: MetricSpec, t, omt=None):
    """phi'(t) = scale * (alpha/(1-t) + sum k a_k t^(k-1))."""
    t, omt = _split_t(t, omt)
    val = spec.alpha / omt
    if spec.poly:
        coeffs = [k * a for k, a in enumerate(spec.poly, start=1)]
        val = val + np.polyval(list(reversed(coeffs)), t)
    return spec.scale * val


def phi_d2(spec: MetricSpec, t, omt=None):
    """phi''(t) = scale * (alpha/(1-t)^2 + sum k(k-1) a_k t^(k-2))."""
    t, omt = _split_t(t, omt)
    val = spec.alpha / omt**2
    if len(spec.poly) > 1:
        coeffs = [k * (k - 1) * a for k, a in enumerate(spec.poly, start=1)][1:]
        val = val + np.polyval(list(reversed(coeffs)), t)
    return spec.scale * val


def metric_eigenvalues(spec: MetricSpec, t, omt=None):
    """(tangential, radial) = (phi', phi' + t phi''), vectorized over t."""
    t, omt = _split_t(t, omt)
    d1 = phi_d1(spec, t, omt)
    return d1, d1 + t * phi_d2(spec, t, omt)


def log_volume_density(spec: MetricSpec, t, omt=None):
    """log det g as a function of t; requires a positive-definite metric."""
    tang, rad = metric_eigenvalues(spec, t, omt)
    if np.any(tang <= 0) or np.any(rad <= 0):
        raise NonPositiveMetric(f"metric of {spec.name} degenerate inside the requested radii")
    return (spec.dim - 1) * np.log(tang) + np.log(rad)


def radial_length_density(spec: MetricSpec, t, omt=None):
    """sqrt of the squared metric length of the unit radial vector."""
    _, rad = metric_eigenvalues(spec, t, omt)
    if np.any(rad <= 0):
        raise NonPositiveMetric(f"metric of {spec.name} degenerate inside the requested radii")
    return np.sqrt(rad)


# -- pointwise tensors -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HermitianMetric:
    """g_{i jbar} at a point, with volume density and inverse."""

    point: np.ndarray
    matrix: np.ndarray
    det: float
    inverse: np.ndarray


def _check_point(spec: MetricSpec, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.shape != (spec.dim,):
        raise DomainError(f"point has {z.shape[0]} components, spec {spec.name} has dim {spec.dim}")
    if np.vdot(z, z).real >= 1.0:
        raise DomainError(f"|z| >= 1: {z}")
    return z


def metric_tensor(spec: MetricSpec, z) -> HermitianMetric:
    """g_{i jbar}(z) = phi' delta_ij + phi'' zbar_i z_j with det and inverse.

    The inverse uses the Sherman-Morrison form
    (1/phi') (I - phi'' zbar z^T / (phi' + t phi'')).
    """
    z = _check_point(spec, z)
    t = float(np.vdot(z, z).real)
    d1 = float(phi_d1(spec, t))
    d2 = float(phi_d2(spec, t))
    n = spec.dim
    rank1 = np.outer(np.conj(z), z)
    matrix = d1 * np.eye(n, dtype=complex) + d2 * rank1
    radial = d1 + t * d2
    det = d1 ** (n - 1) * radial
    if d1 == 0.0 or radial == 0.0:
        raise NonPositiveMetric(f"metric of {spec.name} singular at |z|^2 = {t}")
    inverse = (np.eye(n, dtype=complex) - (d2 / radial) * rank1) / d1
    return HermitianMetric(point=z, matrix=matrix, det=det, inverse=inverse)


def volume_density(spec: MetricSpec, z) -> float:
    """det g_{i jbar}(z); the density of the volume form against Lebesgue."""
    return metric_tensor(spec, z).det


# -- validation ---------------------------------------------------------------

@dataclass(frozen=True)
class ValidationReport:
    spec_name: str
    passed: bool
    first_failing_radius: float | None
    reason: str | None
    k_int: int
    tail_bound: float


def k_int_for(spec: MetricSpec, r_max: float) -> int:
    """Truncation for the internal log expansion at radii up to r_max.

    Smallest K with r_max^(2K)/K < 1e-14, then grown until the series tail
    bound  scale*alpha*t^(K+1) / ((K+1)(1-t))  drops below 1e-12.
    """
    if not 0 < r_max < 1:
        raise DomainError(f"r_max must be in (0,1), got {r_max}")
    t = r_max * r_max
    if spec.alpha == 0:
        return max(len(spec.poly), 1)
    a = -math.log(t)
    k = 8
    for _ in range(200):
        new = (math.log(1e14) + math.log(max(k, 1))) / a
        new = max(8, int(math.ceil(new)))
        if new == k:
            break
        k = new
        if k > _KINT_CAP:
            raise TailTooLarge(f"truncation beyond {_KINT_CAP} needed for r_max={r_max}")

    def tail(kk: int) -> float:
        log_tail = math.log(spec.scale * spec.alpha) + (kk + 1) * math.log(t) - math.log(kk + 1) - math.log(1 - t)
        return math.exp(log_tail)

    while tail(k) >= _TAIL_TOL:
        k = int(k * 1.25) + 1
        if k > _KINT_CAP:
            raise TailTooLarge(f"series tail cannot reach {_TAIL_TOL} below K={_KINT_CAP} at r_max={r_max}")
    return k


def validate_spec(spec: MetricSpec, grid=None) -> ValidationReport:
    """Positive-definiteness on a radial grid plus the truncation tail bound.

    Returns a report; see ``ensure_positive`` for the raising variant used by
    the computational pipelines.
    """
    if grid is None:
        grid = np.linspace(0.05, 0.99, 48)
    grid = np.sort(np.asarray(grid, dtype=float))
    if grid.size == 0 or grid[0] <= 0 or grid[-1] >= 1:
        raise DomainError("validation grid radii must lie in (0, 1)")
    t = grid**2
    tang, rad = metric_eigenvalues(spec, t)
    bad = (tang <= 0) | (rad <= 0)
    if np.any(bad):
        first = float(grid[np.argmax(bad)])
        return ValidationReport(
            spec_name=spec.name,
            passed=False,
            first_failing_radius=first,
            reason=f"metric not positive definite at r = {first:.6g}",
            k_int=0,
            tail_bound=math.inf,
        )
    r_max = float(grid[-1])
    k = k_int_for(spec, r_max)
    if spec.alpha > 0:
        tmax = r_max * r_max
        tail = math.exp(
            math.log(spec.scale * spec.alpha)
            + (k + 1) * math.log(tmax)
            - math.log(k + 1)
            - math.log(1 - tmax)
        )
    else:
        tail = 0.0
    return ValidationReport(
        spec_name=spec.name,
        passed=True,
        first_failing_radius=None,
        reason=None,
        k_int=k,
        tail_bound=tail,
    )


def ensure_positive(spec: MetricSpec, grid=None) -> ValidationReport:
    report = validate_spec(spec, grid)
    if not report.passed:
        raise NonPositiveMetric(report.reason)
    return report


def ensure_complete(spec: MetricSpec) -> None:
    if not spec.complete:
        raise IncompleteMetric(
            f"spec {spec.name} has alpha = 0; entropy quantities need a complete metric"
        )
