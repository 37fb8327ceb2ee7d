"""Polygonal thickness: vertex turning radii, doubly-critical self-distance,
and the ropelength window feasibility checks.

The tube-radius surrogate is min(min_rad, dcsd/2). min_rad is the smallest
inscribed corner radius min(l_prev, l_next)/2 / tan(turn/2). dcsd scans
non-adjacent segment pairs but keeps only locally minimal chords (interior
closest points are perpendicular by construction; endpoint chords must not
shrink when sliding along either emanating edge), which makes it a function
of the image alone: subdivision vertices on straight edges behave exactly
like interior points. Convex curves have no locally minimal self-chord, so
dcsd may be +inf and the corner radii govern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curve import (PolygonalCurve, length, require_embedded, transform,
                    turning_angles, _nonadjacent_pairs)
from .geometry import segment_segment_distance

CUSP_ANGLE = math.pi - 1e-9
STRAIGHT_ANGLE = 1e-12     # vertices turning less than this add no constraint
PARAM_EDGE_TOL = 1e-9      # closest-point parameter within this of 0/1 = vertex
CRITICALITY_TOL = 1e-8     # slack in the sliding test u . w <= tol


@dataclass(frozen=True)
class ThicknessReport:
    min_rad: float
    dcsd: float
    thickness: float
    ropelength: float


@dataclass(frozen=True)
class WindowConfig:
    lam: float
    rop_reference: float

    def __post_init__(self):
        if self.lam < 1.0:
            raise ValueError(f"window lambda must be >= 1, got {self.lam}")
        if self.rop_reference <= 0:
            raise ValueError("rop_reference must be positive")


def min_turning_radius(curve: PolygonalCurve) -> float:
    """Smallest corner radius min(run_prev, run_next)/2 / tan(turn/2) over
    geometric corners, where runs are the straight arc lengths between
    consecutive corners. Measuring runs (not raw edge lengths) makes the
    radius a function of the image, so subdivision cannot change it."""
    ang = turning_angles(curve)
    if np.any(ang >= CUSP_ANGLE):
        k = int(np.argmax(ang))
        raise ValueError(f"cusp: turning angle {ang[k]:.6g} rad at vertex {k}")
    corners = np.nonzero(ang > STRAIGHT_ANGLE)[0]
    if corners.size == 0:
        return math.inf
    lens = curve.edge_lengths
    csum = np.concatenate(([0.0], np.cumsum(lens)))  # arc position of vertex i
    pos = csum[corners]
    runs = np.diff(np.concatenate((pos, [csum[-1] + pos[0]])))
    r = 0.5 * np.minimum(np.roll(runs, 1), runs) / np.tan(0.5 * ang[corners])
    return float(r.min())


def doubly_critical_self_distance(curve: PolygonalCurve) -> float:
    """Minimum length over locally minimal chords between non-adjacent
    segments; +inf when no chord is locally minimal (e.g. convex curves)."""
    n = curve.n
    i_all, j_all = _nonadjacent_pairs(n)
    if i_all.size == 0:
        return math.inf
    starts, ends = curve.edge_starts, curve.edge_ends
    dirs = curve.edge_directions

    def end_critical(param, edge_idx, w_out):
        """w_out points away from this end toward the other chord end."""
        interior = (param > PARAM_EDGE_TOL) & (param < 1.0 - PARAM_EDGE_TOL)
        at_start = param <= PARAM_EDGE_TOL
        # emanating directions along the curve at the touched vertex
        fwd = np.where(at_start[:, None], dirs[edge_idx], dirs[(edge_idx + 1) % n])
        back = np.where(at_start[:, None], -dirs[(edge_idx - 1) % n], -dirs[edge_idx])
        slide1 = np.einsum("ij,ij->i", fwd, w_out)
        slide2 = np.einsum("ij,ij->i", back, w_out)
        vertex_min = (slide1 <= CRITICALITY_TOL) & (slide2 <= CRITICALITY_TOL)
        return interior | vertex_min

    best = math.inf
    step = 400_000
    for lo in range(0, i_all.size, step):
        i = i_all[lo:lo + step]
        j = j_all[lo:lo + step]
        d, s, t = segment_segment_distance(starts[i], ends[i], starts[j], ends[j],
                                           with_parameters=True)
        x = starts[i] + s[:, None] * (ends[i] - starts[i])
        y = starts[j] + t[:, None] * (ends[j] - starts[j])
        w = y - x
        with np.errstate(invalid="ignore", divide="ignore"):
            w = w / np.where(d > 0, d, 1.0)[:, None]
        ok = end_critical(s, i, w) & end_critical(t, j, -w) & (d > 0)
        if np.any(ok):
            best = min(best, float(d[ok].min()))
    return best


def thickness(curve: PolygonalCurve) -> ThicknessReport:
    """Thickness report; requires an embedded curve without cusps."""
    require_embedded(curve)
    mr = min_turning_radius(curve)
    dc = doubly_critical_self_distance(curve)
    thi = min(mr, dc / 2.0)
    if not math.isfinite(thi) or thi <= 0:
        raise ValueError(f"degenerate thickness {thi!r}")
    return ThicknessReport(mr, dc, thi, length(curve) / thi)


def window_feasible(curve: PolygonalCurve, window: WindowConfig):
    """Membership in the ropelength window: thickness >= 1, length <= lambda
    times the ropelength reference, with 1e-9 numerical slack."""
    rep = thickness(curve)
    L = length(curve)
    cap = window.lam * window.rop_reference
    feasible = (rep.thickness >= 1.0 - 1e-9) and (L <= cap + 1e-9)
    return {"feasible": feasible,
            "thi_slack": rep.thickness - 1.0,
            "len_slack": cap - L}


def normalize_to_unit_thickness(curve: PolygonalCurve) -> PolygonalCurve:
    """Rescale so thickness = 1; the density ratio is unchanged."""
    thi = thickness(curve).thickness
    return transform(curve, scale=1.0 / thi)
