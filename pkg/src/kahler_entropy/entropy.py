"""Critical exponents and entropy estimates.

Both entropies are thresholds of improper integrals over the ball,

    integral  exp(-c * profile(r)) * det g(r^2) * r^(2n-1) dr,

with profile = D_0(r) (diastasis from the origin) in diastatic mode and
profile = rho(0, r) (radial geodesic distance) in volume mode.  Writing
u = -log(1 - r^2), admissible specs have

    det g * r^(2n-1)  ~  (1 - r^2)^sigma_h         (density power)
    profile           ~  sigma_D * u + const       (decay slope)

so the integrand behaves like (1 - r^2)^(sigma_h + c sigma_D) and the
critical exponent is c* = (-1 - sigma_h) / sigma_D.  Two independent routes
estimate c*: a boundary log-log regression (asymptotic_exponent_fit +
critical_exponent) and a convergence bisection on nested cutoff integrals
(cutoff_bisection); production entropies cross-check the two.

The diastatic entropy is the calibration constant times the diastatic c*;
the volume entropy is the volume-mode c* itself, with the geodesic-ball
growth slope as a third, equivalent route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import calibration as calib
from . import diastasis as dia
from . import specs
from .errors import (
    DegenerateDecay,
    DomainError,
    FitRejected,
    NoBracket,
    QuadratureFailure,
    Unconverged,
    WindowTooShort,
)
from .quadrature import LN2, fsum, gauss_rule, radial_mesh, segment_sums
from .specs import MetricSpec

DEFAULT_WINDOW = (0.99, 1.0 - 1e-9)
DEFAULT_SAMPLES = 64
DEFAULT_JMAX = 44
DEFAULT_NODES = 24

# tail-ratio thresholds (per halving of 1 - r): below RATIO_CONVERGENT the
# tail sums decrease geometrically; at RATIO_PLATEAU and above they plateau
# or increase and the integral is classified divergent.
RATIO_CONVERGENT = 0.9
RATIO_PLATEAU = 0.999
TAIL_SEGMENTS = 6


def surface_area(n: int) -> float:
    """Area of the unit sphere S^(2n-1) in C^n."""
    return 2.0 * math.pi**n / math.gamma(n)


@dataclass(frozen=True)
class ExponentFit:
    slope_density: float
    slope_decay: float
    window: tuple[float, float]
    residual: float
    samples: int
    mode: str = "diastatic"
    spec_name: str = "manual"
    err_density: float = 0.0
    err_decay: float = 0.0
    intercept_density: float = 0.0
    intercept_decay: float = 0.0
    diagnostics: tuple = ()


@dataclass(frozen=True)
class EntropyEstimate:
    quantity: str  # diastatic_exponent | diastatic_entropy | volume_entropy
    value: float
    error: float
    method: str  # asymptotic_fit | cutoff_bisection | growth_fit
    spec_name: str
    details: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "spec": self.spec_name,
            "quantity": self.quantity,
            "value": self.value,
            "error": self.error,
            "method": self.method,
        }


_fit_cache: dict = {}
_bisect_cache: dict = {}
_growth_cache: dict = {}
_calibration_cache: dict = {}
_mesh_profile_cache: dict = {}


def clear_caches() -> None:
    for cache in (_fit_cache, _bisect_cache, _growth_cache, _calibration_cache, _mesh_profile_cache):
        cache.clear()


def cached_calibration(spec: MetricSpec) -> calib.CalibrationEstimate:
    if spec not in _calibration_cache:
        _calibration_cache[spec] = calib.calibration_constant(spec)
    return _calibration_cache[spec]


def _profile_values(spec: MetricSpec, mode: str, t, omt, radii):
    if mode == "diastatic":
        return dia.diastasis_from_center(spec, t, omt)
    if mode == "volume":
        return dia.radial_distance(spec, radii)
    raise ValueError(f"unknown mode {mode!r}")


def _log_density_values(spec: MetricSpec, t, omt):
    n = spec.dim
    return specs.log_volume_density(spec, t, omt) + (2 * n - 1) * 0.5 * np.log1p(-omt)


def _linear_fit(x, y):
    """Least squares y = m x + b with slope stderr and max residual."""
    m, b = np.polyfit(x, y, 1)
    resid = y - (m * x + b)
    max_resid = float(np.max(np.abs(resid)))
    dof = max(len(x) - 2, 1)
    se = math.sqrt(float(np.sum(resid**2)) / dof / float(np.sum((x - x.mean()) ** 2)))
    return float(m), float(b), se, max_resid


def asymptotic_exponent_fit(
    spec: MetricSpec,
    kernel=None,
    mode: str = "diastatic",
    window: tuple[float, float] = DEFAULT_WINDOW,
    samples: int = DEFAULT_SAMPLES,
    residual_tol: float = 0.05,
) -> ExponentFit:
    """Boundary log-log regression for (sigma_h, sigma_D).

    Regresses log[det g * r^(2n-1)] and the decay profile against
    u = -log(1 - r^2) over the window; slopes are reported with the density
    one converted to the (1-r^2) power convention (sigma_h = -slope).
    """
    specs.ensure_complete(spec)
    specs.ensure_positive(spec)
    r_lo, r_hi = window
    if not (0.9 <= r_lo < r_hi < 1.0):
        raise DomainError(f"fit window must satisfy 0.9 <= r_lo < r_hi < 1, got {window}")
    if samples < 16:
        raise DomainError("fit needs at least 16 samples")
    omr = np.exp(np.linspace(math.log(1.0 - r_lo), math.log(1.0 - r_hi), samples))
    radii = 1.0 - omr
    omt = omr * (2.0 - omr)
    t = 1.0 - omt
    u = -np.log(omt)

    log_density = _log_density_values(spec, t, omt)
    profile = _profile_values(spec, mode, t, omt, radii)

    m_den, b_den, se_den, resid_den = _linear_fit(u, log_density)
    m_prof, b_prof, se_prof, resid_prof = _linear_fit(u, profile)
    residual = max(resid_den, resid_prof)
    if residual > residual_tol:
        raise FitRejected(
            f"boundary behavior of {spec.name} ({mode}) is not log-linear: "
            f"max regression deviation {residual:.3g} > {residual_tol}"
        )
    u_range = float(u[-1] - u[0])
    rows = tuple(
        (float(r), float(uu), float(ld), float(pf))
        for r, uu, ld, pf in zip(radii, u, log_density, profile)
    )
    return ExponentFit(
        slope_density=-m_den,
        slope_decay=m_prof,
        window=(r_lo, r_hi),
        residual=residual,
        samples=samples,
        mode=mode,
        spec_name=spec.name,
        err_density=max(se_den, resid_den / u_range) + 1e-6,
        err_decay=max(se_prof, resid_prof / u_range) + 1e-6,
        intercept_density=b_den,
        intercept_decay=b_prof,
        diagnostics=rows,
    )


def critical_exponent(fit: ExponentFit) -> EntropyEstimate:
    """c* = (-1 - sigma_h) / sigma_D from an accepted fit.

    The integrand is ~ (1-r^2)^(sigma_h + c sigma_D); convergence of the
    radial integral needs that power above -1.
    """
    if fit.slope_decay <= 1e-9:
        if fit.slope_density > -1.0:
            diag = "decay profile flat and density integrable: converges for every c (exponent 0)"
        else:
            diag = "decay profile flat and density non-integrable: diverges for every c (exponent infinite)"
        raise DegenerateDecay(f"sigma_D = {fit.slope_decay:.3g} <= 0 for {fit.spec_name}: {diag}")
    value = (-1.0 - fit.slope_density) / fit.slope_decay
    error = (fit.err_density + abs(value) * fit.err_decay) / fit.slope_decay
    quantity = "diastatic_exponent" if fit.mode == "diastatic" else "volume_entropy"
    return EntropyEstimate(
        quantity=quantity,
        value=value,
        error=error,
        method="asymptotic_fit",
        spec_name=fit.spec_name,
        details={"sigma_h": fit.slope_density, "sigma_D": fit.slope_decay},
    )


# -- cutoff integrals ---------------------------------------------------------

def _mesh_profiles(spec: MetricSpec, mode: str, j_max: int, nodes: int):
    """Per-node log density and decay profile on the dyadic mesh, cached."""
    key = (spec, mode, j_max, nodes)
    if key in _mesh_profile_cache:
        return _mesh_profile_cache[key]
    mesh = radial_mesh(j_max, nodes)
    log_density = _log_density_values(spec, mesh.t, mesh.omt)
    if mode == "diastatic":
        profile = dia.diastasis_from_center(spec, mesh.t, mesh.omt)
    else:
        profile = _rho_at_mesh_nodes(spec, mesh)
    log_weights = np.log(mesh.dr_weights)
    _mesh_profile_cache[key] = (mesh, log_density, profile, log_weights)
    return _mesh_profile_cache[key]


def _rho_at_mesh_nodes(spec: MetricSpec, mesh, sub_nodes: int = 16) -> np.ndarray:
    """Radial distance at every mesh node via nested segment quadrature."""
    x, gw = gauss_rule(mesh.nodes)
    xs, gws = gauss_rule(sub_nodes)
    j_idx = np.arange(mesh.j_max)[:, None]
    w_node = j_idx + (x[None, :] + 1.0) / 2.0

    def speed(omr):
        omt = omr * (2.0 - omr)
        return specs.radial_length_density(spec, 1.0 - omt, omt)

    # distance across each full segment
    seg_len = segment_sums(speed(mesh.omr), mesh)
    rho_boundary = np.concatenate([[0.0], np.cumsum(seg_len)])
    # partial distance from the segment edge to each node
    half = (w_node - j_idx) / 2.0
    w_sub = j_idx[..., None] + half[..., None] * (xs + 1.0)
    omr_sub = np.exp2(-w_sub)
    vals = speed(omr_sub) * omr_sub * LN2
    partial = np.einsum("jks,s->jk", vals, gws) * half
    return rho_boundary[:-1, None] + partial


def _tail_log_integrals(spec, mode, c, j_max, nodes):
    """log of the per-segment cutoff integrals T_j(c), overflow-free."""
    mesh, log_density, profile, log_weights = _mesh_profiles(spec, mode, j_max, nodes)
    log_vals = -c * profile + log_density + log_weights
    m = log_vals.max(axis=1, keepdims=True)
    out = m[:, 0] + np.log(np.sum(np.exp(log_vals - m), axis=1))
    if not np.all(np.isfinite(out)):
        raise QuadratureFailure(f"non-finite cutoff integrand for {spec.name} at c={c}")
    return out


def classify_tail(log_tails: np.ndarray, tail_segments: int = TAIL_SEGMENTS) -> str:
    """convergent / slowly_convergent / divergent from the last tail ratios.

    Tail sums decreasing geometrically (ratio < 0.9) classify as convergent;
    a plateau or increase classifies as divergent; ratios in between indicate
    slow but genuine convergence.
    """
    log_q = np.diff(log_tails[-(tail_segments + 1):])
    q = math.exp(float(np.median(log_q)))
    if q < RATIO_CONVERGENT:
        return "convergent"
    if q >= RATIO_PLATEAU:
        return "divergent"
    return "slowly_convergent"


def _default_c_range(spec: MetricSpec, mode: str) -> tuple[float, float]:
    lam = spec.scale * max(spec.alpha, 1e-12)
    base = spec.dim / lam if mode == "diastatic" else 2.0 * spec.dim / math.sqrt(lam)
    return (base / 6.0, base * 6.0)


def cutoff_bisection(
    spec: MetricSpec,
    kernel=None,
    mode: str = "diastatic",
    c_range: tuple[float, float] | None = None,
    tol: float = 0.0075,
    j_max: int = DEFAULT_JMAX,
    nodes: int = DEFAULT_NODES,
) -> EntropyEstimate:
    """Critical exponent by bisection on cutoff-integral convergence.

    For each candidate c the nested integrals I(c, R_j), R_j = 1 - 2^-j, are
    accumulated per dyadic segment and the tail trend classified; the bracket
    shrinks on the convergent/divergent boundary.  Independent of the
    regression route.
    """
    specs.ensure_complete(spec)
    specs.ensure_positive(spec)
    lo, hi = c_range if c_range is not None else _default_c_range(spec, mode)
    if not (0 < lo < hi):
        raise DomainError(f"bad bisection range {lo, hi}")

    def cls(c):
        return classify_tail(_tail_log_integrals(spec, mode, c, j_max, nodes))

    cls_lo, cls_hi = cls(lo), cls(hi)
    if cls_lo != "divergent" or cls_hi != "convergent":
        raise NoBracket(
            f"range endpoints classify as {cls_lo}/{cls_hi} for {spec.name} ({mode}); "
            "no convergence transition inside the range"
        )
    steps = 0
    while hi - lo > 2.0 * tol and steps < 80:
        mid = 0.5 * (lo + hi)
        if cls(mid) == "divergent":
            lo = mid
        else:
            hi = mid
        steps += 1
    value = 0.5 * (lo + hi)
    # plateau-threshold bias allowance on top of the bracket half-width
    error = 0.5 * (hi - lo) + 0.005 * max(1.0, value)
    quantity = "diastatic_exponent" if mode == "diastatic" else "volume_entropy"
    return EntropyEstimate(
        quantity=quantity,
        value=value,
        error=error,
        method="cutoff_bisection",
        spec_name=spec.name,
        details={"bracket": (lo, hi), "steps": steps, "boundary_case": "indeterminate"},
    )


def _cached_fit(spec: MetricSpec, mode: str) -> ExponentFit:
    key = (spec, mode)
    if key not in _fit_cache:
        _fit_cache[key] = asymptotic_exponent_fit(spec, mode=mode)
    return _fit_cache[key]


def _cached_bisection(spec: MetricSpec, mode: str) -> EntropyEstimate:
    key = (spec, mode)
    if key not in _bisect_cache:
        _bisect_cache[key] = cutoff_bisection(spec, mode=mode)
    return _bisect_cache[key]


def _crosscheck(primary: EntropyEstimate, secondary: EntropyEstimate, what: str) -> None:
    gap = abs(primary.value - secondary.value)
    budget = primary.error + secondary.error
    if gap > budget:
        raise Unconverged(
            f"{what}: asymptotic and bisection estimates disagree "
            f"({primary.value:.6g} vs {secondary.value:.6g}, gap {gap:.3g} > {budget:.3g})"
        )


def diastatic_exponent(spec: MetricSpec) -> tuple[EntropyEstimate, EntropyEstimate]:
    """(asymptotic, bisection) estimates of the diastatic critical exponent."""
    est_fit = critical_exponent(_cached_fit(spec, "diastatic"))
    est_bis = _cached_bisection(spec, "diastatic")
    _crosscheck(est_fit, est_bis, f"diastatic exponent of {spec.name}")
    return est_fit, est_bis


def diastatic_entropy(spec: MetricSpec) -> EntropyEstimate:
    """Calibration constant times the diastatic critical exponent."""
    est_fit, est_bis = diastatic_exponent(spec)
    cal = cached_calibration(spec)
    value = cal.value * est_fit.value
    error = math.hypot(cal.error * est_fit.value, cal.value * est_fit.error)
    return EntropyEstimate(
        quantity="diastatic_entropy",
        value=value,
        error=error,
        method="asymptotic_fit",
        spec_name=spec.name,
        details={
            "calibration": cal.value,
            "calibration_error": cal.error,
            "exponent_fit": est_fit.value,
            "exponent_bisection": est_bis.value,
            "boundary_case": "indeterminate",
        },
    )


def volume_entropy_integral(spec: MetricSpec) -> EntropyEstimate:
    """Volume entropy as the critical exponent of the distance integral."""
    est_fit = critical_exponent(_cached_fit(spec, "volume"))
    est_bis = _cached_bisection(spec, "volume")
    _crosscheck(est_fit, est_bis, f"volume entropy of {spec.name}")
    return EntropyEstimate(
        quantity="volume_entropy",
        value=est_fit.value,
        error=est_fit.error,
        method="asymptotic_fit",
        spec_name=spec.name,
        details={
            "exponent_bisection": est_bis.value,
            "boundary_case": "indeterminate",
        },
    )


def volume_entropy_growth(
    spec: MetricSpec,
    j_max: int = DEFAULT_JMAX,
    nodes: int = DEFAULT_NODES,
    window_segments: int = 20,
) -> EntropyEstimate:
    """Volume entropy as the geodesic-ball growth slope.

    Computes t_j = rho(0, R_j) and Vol B(0, t_j) on the dyadic mesh, fits
    log Vol against t over a late window, and checks the fitted slope against
    the windowed liminf/limsup estimates of (1/t) log Vol.  The sandwich
    tolerance absorbs the O(intercept/t) finite-range bias of those
    estimates.
    """
    specs.ensure_complete(spec)
    specs.ensure_positive(spec)
    key = (spec, j_max, nodes, window_segments)
    if key in _growth_cache:
        return _growth_cache[key]
    mesh = radial_mesh(j_max, nodes)

    speed = specs.radial_length_density(spec, mesh.t, mesh.omt)
    seg_len = segment_sums(speed, mesh)
    t_boundary = np.cumsum(seg_len)

    density = np.exp(_log_density_values(spec, mesh.t, mesh.omt))
    seg_vol = segment_sums(density, mesh) * surface_area(spec.dim)
    v_boundary = np.array([fsum(seg_vol[: j + 1]) for j in range(j_max)])

    usable = np.isfinite(t_boundary) & np.isfinite(v_boundary) & (v_boundary > 0)
    if usable.sum() < max(8, window_segments // 2):
        raise WindowTooShort(f"only {int(usable.sum())} usable growth samples for {spec.name}")
    t = t_boundary[usable][-window_segments:]
    logv = np.log(v_boundary[usable][-window_segments:])
    if len(t) < 8:
        raise WindowTooShort(f"growth window for {spec.name} has {len(t)} points")

    m, b, se, resid = _linear_fit(t, logv)
    half = len(t) // 2
    m1, _, _, _ = _linear_fit(t[:half], logv[:half])
    m2, _, _, _ = _linear_fit(t[half:], logv[half:])
    error = max(se, abs(m2 - m1), 1e-4)

    ratios = logv / t
    l_lower, l_upper = float(ratios.min()), float(ratios.max())
    sandwich_tol = (abs(b) + 1.0) / float(t[0])
    if not (l_lower - sandwich_tol <= m <= l_upper + sandwich_tol):
        raise Unconverged(
            f"growth slope {m:.6g} of {spec.name} escapes the liminf/limsup sandwich "
            f"[{l_lower:.6g}, {l_upper:.6g}] +/- {sandwich_tol:.3g}"
        )
    est = EntropyEstimate(
        quantity="volume_entropy",
        value=float(m),
        error=float(error),
        method="growth_fit",
        spec_name=spec.name,
        details={
            "L_lower": l_lower,
            "L_upper": l_upper,
            "sandwich_tol": sandwich_tol,
            "window_t": (float(t[0]), float(t[-1])),
            "intercept": float(b),
            "fit_residual": float(resid),
        },
    )
    _growth_cache[key] = est
    return est


# -- base-point independence --------------------------------------------------

@dataclass(frozen=True)
class SandwichRow:
    r_cutoff: float
    integral_w1: float
    integral_w2: float
    ratio: float
    bound: float
    ok: bool


@dataclass(frozen=True)
class SandwichReport:
    spec_name: str
    w1: complex
    w2: complex
    c: float
    rho: float
    calibration: float
    rows: tuple[SandwichRow, ...]
    passed: bool


def disc_integral(
    spec: MetricSpec,
    kernel,
    w: complex,
    c: float,
    r_cutoff: float,
    n_phi: int = 256,
    nodes: int = DEFAULT_NODES,
) -> float:
    """I_w(c, R) = integral over |z| <= R of exp(-c D_w) det g dA, n = 1."""
    if spec.dim != 1:
        raise DomainError("disc integrals are defined for dim 1 only")
    if not 0.0 < r_cutoff < 1.0:
        raise DomainError(f"cutoff radius must be in (0,1), got {r_cutoff}")
    w = complex(w)
    tw = abs(w) ** 2
    phi_w = float(specs.potential_radial(spec, tw))
    phis = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
    ring = np.exp(1j * phis) * np.conj(w)

    j_star = int(math.floor(-math.log2(1.0 - r_cutoff)))
    x, gw = gauss_rule(nodes)
    pieces = []
    for j in range(j_star + 1):
        w_lo = float(j)
        w_hi = min(float(j + 1), -math.log2(1.0 - r_cutoff))
        if w_hi <= w_lo:
            continue
        ww = w_lo + (x + 1.0) / 2.0 * (w_hi - w_lo)
        omr = np.exp2(-ww)
        r = 1.0 - omr
        omt = omr * (2.0 - omr)
        t = 1.0 - omt
        dens = np.exp(specs.log_volume_density(spec, t, omt))
        phi_r = specs.potential_radial(spec, t, omt)
        cross = dia.kernel_value(kernel, r[:, None] * ring[None, :])
        d_w = phi_r[:, None] + phi_w - 2.0 * np.real(cross)
        with np.errstate(over="ignore"):  # overflow surfaces as QuadratureFailure
            vals = np.exp(-c * d_w) * dens[:, None] * r[:, None]
            angular = vals.mean(axis=1) * 2.0 * math.pi
        piece = float(np.sum(angular * gw * omr) * (w_hi - w_lo) / 2.0 * LN2)
        pieces.append(piece)
    total = fsum(pieces)
    if not math.isfinite(total) or total <= 0:
        raise QuadratureFailure(f"disc integral failed for {spec.name} at R={r_cutoff}")
    return total


def basepoint_sandwich_check(
    spec: MetricSpec,
    kernel=None,
    w1: complex = 0.0,
    w2: complex = 0.3,
    c: float = 1.5,
    r_list=(0.9, 0.99, 0.999),
    n_phi: int = 256,
    nodes: int = DEFAULT_NODES,
    calibration_estimate: calib.CalibrationEstimate | None = None,
) -> SandwichReport:
    """Checks exp(-c X rho) I_w1 <= I_w2 <= exp(c X rho) I_w1 per cutoff.

    The pointwise bound |D_w1 - D_w2| <= X rho(w1, w2) holds on every region,
    so the sandwich is asserted for each cutoff radius separately.  rho uses
    the closed form for poly-free specs and the conservative radial triangle
    bound through the origin otherwise.
    """
    specs.ensure_complete(spec)
    specs.ensure_positive(spec)
    if spec.dim != 1:
        raise DomainError("base-point checks use two-real-dimensional quadrature (dim 1)")
    w1, w2 = complex(w1), complex(w2)
    if abs(w1) > 0.5 or abs(w2) > 0.5:
        raise DomainError("base points must satisfy |w| <= 0.5")
    if c <= 0:
        raise DomainError("c must be positive")
    if kernel is None:
        kernel = dia.polarize_radial(spec)
    cal = calibration_estimate or cached_calibration(spec)
    if not spec.poly:
        lam = spec.scale * spec.alpha
        _, rho_h = dia.hyperbolic_closed_forms(np.array([w1]), np.array([w2]))
        rho = math.sqrt(lam) * rho_h
    else:
        rho = float(
            dia.radial_distance(spec, [abs(w1)])[0] + dia.radial_distance(spec, [abs(w2)])[0]
        )
    x_upper = cal.value + cal.error
    bound = math.exp(c * x_upper * rho)
    rows = []
    for r_cut in r_list:
        i1 = disc_integral(spec, kernel, w1, c, r_cut, n_phi=n_phi, nodes=nodes)
        i2 = disc_integral(spec, kernel, w2, c, r_cut, n_phi=n_phi, nodes=nodes)
        ratio = i2 / i1
        ok = (ratio <= bound * (1.0 + 1e-10)) and (ratio >= (1.0 - 1e-10) / bound)
        rows.append(
            SandwichRow(
                r_cutoff=float(r_cut),
                integral_w1=i1,
                integral_w2=i2,
                ratio=ratio,
                bound=bound,
                ok=bool(ok),
            )
        )
    return SandwichReport(
        spec_name=spec.name,
        w1=w1,
        w2=w2,
        c=c,
        rho=rho,
        calibration=cal.value,
        rows=tuple(rows),
        passed=all(row.ok for row in rows),
    )
