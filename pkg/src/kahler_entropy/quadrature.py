"""Radial quadrature against the unit-ball boundary.

Boundary integrals use a dyadic mesh: segment j covers
r in [1 - 2^-j, 1 - 2^-(j+1)], parametrized by w = log2(1/(1-r)) so that
1 - r = 2^-w is computed exactly and power-law integrands become smooth
exponentials in w.  Each segment gets a fixed Gauss-Legendre rule; segment
values are combined with math.fsum, so totals are independent of how the work
is partitioned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

LN2 = math.log(2.0)


@lru_cache(maxsize=16)
def gauss_rule(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


@dataclass(frozen=True, eq=False)
class RadialMesh:
    """Per-segment nodes for integrals d r on [0, 1 - 2^-j_max].

    Arrays are shaped (segments, nodes).  ``omr`` is 1 - r at the nodes and
    ``dr_weights`` are the Gauss weights already multiplied by dr/dw.
    """

    j_max: int
    nodes: int
    r: np.ndarray
    omr: np.ndarray
    omt: np.ndarray
    t: np.ndarray
    dr_weights: np.ndarray
    boundaries_omr: np.ndarray  # shape (j_max + 1,), omr at segment edges


@lru_cache(maxsize=64)
def radial_mesh(j_max: int, nodes: int = 24) -> RadialMesh:
    x, gw = gauss_rule(nodes)
    j = np.arange(j_max)[:, None]
    w = j + (x[None, :] + 1.0) / 2.0
    omr = np.exp2(-w)
    r = 1.0 - omr
    omt = omr * (2.0 - omr)  # 1 - r^2 without cancellation
    t = 1.0 - omt
    dr_weights = gw[None, :] / 2.0 * LN2 * omr
    boundaries = np.exp2(-np.arange(j_max + 1, dtype=float))
    return RadialMesh(
        j_max=j_max,
        nodes=nodes,
        r=r,
        omr=omr,
        omt=omt,
        t=t,
        dr_weights=dr_weights,
        boundaries_omr=boundaries,
    )


def segment_sums(values: np.ndarray, mesh: RadialMesh) -> np.ndarray:
    """Integral of the sampled integrand over each dyadic segment."""
    return np.einsum("jk,jk->j", values, mesh.dr_weights)


def fsum(values) -> float:
    return math.fsum(float(v) for v in values)


def segment_partial_integral(f, omr_hi: float, omr_lo: float, nodes: int = 24) -> float:
    """Integral of f(r, omr) dr over omr in [omr_lo, omr_hi], dyadic param."""
    if omr_lo >= omr_hi:
        return 0.0
    w_lo = -math.log2(omr_hi)
    w_hi = -math.log2(omr_lo)
    x, gw = gauss_rule(nodes)
    w = w_lo + (x + 1.0) / 2.0 * (w_hi - w_lo)
    omr = np.exp2(-w)
    vals = f(1.0 - omr, omr)
    return float(np.sum(vals * gw * omr) * (w_hi - w_lo) / 2.0 * LN2)


def integral_on_interval(f, a: float, b: float, nodes: int = 32) -> float:
    """Plain Gauss-Legendre for f(r, omr) dr on [a, b], away from r = 1."""
    if b <= a:
        return 0.0
    x, gw = gauss_rule(nodes)
    r = a + (x + 1.0) / 2.0 * (b - a)
    vals = f(r, 1.0 - r)
    return float(np.sum(vals * gw) * (b - a) / 2.0)


def cumulative_radial_integral(f, radii, nodes: int = 24) -> np.ndarray:
    """Cumulative integral of f(r, omr) dr from 0 to each radius.

    ``radii`` must be sorted ascending in (0, 1).  Intervals touching the
    boundary are integrated in the dyadic parametrization; the inner part in
    plain r.  Suitable for radial distance and ball-volume profiles.
    """
    radii = np.asarray(radii, dtype=float)
    out = np.empty_like(radii)
    total = []
    prev_r = 0.0
    prev_omr = 1.0
    for i, r in enumerate(radii):
        omr = 1.0 - r
        if r <= 0.75:
            piece = integral_on_interval(f, prev_r, r, nodes=nodes)
        else:
            if prev_r < 0.75:
                piece = integral_on_interval(f, prev_r, 0.75, nodes=nodes)
                piece += segment_partial_integral(f, 0.25, omr, nodes=nodes)
            else:
                piece = segment_partial_integral(f, prev_omr, omr, nodes=nodes)
        total.append(piece)
        out[i] = math.fsum(total)
        prev_r, prev_omr = r, omr
    return out
