"""The p-spread functional D_p on embedded polygonal curves.

D_p is the L^p mean of pairwise distances along the curve, normalized by
squared length; the log regime is the geometric mean (continuous extension
at p = 0) and the diameter regime is the set diameter. The density ratio
length / D_p is the scale-invariant quantity minimized over knot classes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .curve import PolygonalCurve, diameter, length, nonadjacent_gaps, require_embedded
from .errors import QuadratureError, SingularityError
from .exponent import Exponent
from .quadrature import PairGeometry, PairIntegrator

MIN_CORNER_ANGLE = 1e-6  # rad between segments leaving a shared vertex


@dataclass(frozen=True)
class QuadratureConfig:
    base_nodes: int = 8
    max_depth: int = 24
    rel_tol: float = 1e-7
    deterministic: bool = True

    def __post_init__(self):
        if self.base_nodes < 2:
            raise ValueError("base_nodes must be >= 2")
        if not 0 < self.rel_tol < 1:
            raise ValueError("rel_tol must lie in (0, 1)")
        if self.max_depth > 40:
            raise ValueError("max_depth must be <= 40")


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class SpreadValue:
    value: float
    raw_moment: float
    err_estimate: float
    method: str  # "exact-p2" | "closed-form" | "quadrature" | "diameter"


class PairIntegral(NamedTuple):
    value: float
    err_estimate: float


def chord_integral_same_segment(edge_length: float, exponent) -> float:
    """Closed form of the self-pair integral on one straight edge, where
    |x - y| = |s - t|: 2 l^(p+2) / ((p+1)(p+2)) for finite p, and
    l^2 (ln l - 3/2) for the log kernel."""
    l = float(edge_length)
    if l <= 0:
        raise ValueError(f"edge length must be positive, got {l}")
    e = Exponent.coerce(exponent)
    if e.is_diameter:
        raise ValueError("same-segment integral is undefined in the diameter regime")
    if e.is_log:
        return l * l * (math.log(l) - 1.5)
    p = e.p
    return 2.0 * l ** (p + 2.0) / ((p + 1.0) * (p + 2.0))


def _p2_pair_integrals(A0, dA, B0, dB):
    """Exact polynomial integrals of |x - y|^2 over segment pairs."""
    w = A0 - B0
    lal = np.linalg.norm(dA, axis=1) * np.linalg.norm(dB, axis=1)
    val = (np.einsum("ij,ij->i", w, w)
           + np.einsum("ij,ij->i", dA, dA) / 3.0
           + np.einsum("ij,ij->i", dB, dB) / 3.0
           + np.einsum("ij,ij->i", w, dA)
           - np.einsum("ij,ij->i", w, dB)
           - 0.5 * np.einsum("ij,ij->i", dA, dB))
    return lal * val


def _corner_angles(dA, dB):
    ua = dA / np.linalg.norm(dA, axis=1)[:, None]
    ub = dB / np.linalg.norm(dB, axis=1)[:, None]
    return np.arctan2(np.linalg.norm(np.cross(ua, ub), axis=1),
                      np.einsum("ij,ij->i", ua, ub))


def _shared_vertex_layout(a0, a1, b0, b1, scale):
    """Detect a shared endpoint and reparametrize both segments so the
    shared vertex sits at parameter 0. Returns None when disjoint."""
    tol = 1e-12 * scale
    for flip_a, pa in ((False, a0), (True, a1)):
        for flip_b, pb in ((False, b0), (True, b1)):
            if np.linalg.norm(pa - pb) <= tol:
                A0 = a1 if flip_a else a0
                Aend = a0 if flip_a else a1
                B0 = b1 if flip_b else b0
                Bend = b0 if flip_b else b1
                # parameter 0 at the shared vertex
                return (np.asarray(pa), Aend if not flip_a else A0, flip_a,
                        np.asarray(pb), Bend if not flip_b else B0, flip_b)
    return None


def chord_integral_pair(seg_a, seg_b, exponent, cfg: QuadratureConfig = DEFAULT_CONFIG) -> PairIntegral:
    """integral_A integral_B k(|x - y|) ds ds for one pair of segments.

    Identical segments route to the same-segment closed form; segments
    sharing a vertex get corner-graded panels; disjoint pairs get plain
    adaptive quadrature. The error estimate is absolute.
    """
    e = Exponent.coerce(exponent)
    if e.is_diameter:
        raise ValueError("pair integral is undefined in the diameter regime")
    a0, a1 = (np.asarray(p, dtype=float) for p in seg_a)
    b0, b1 = (np.asarray(p, dtype=float) for p in seg_b)
    la = float(np.linalg.norm(a1 - a0))
    lb = float(np.linalg.norm(b1 - b0))
    if la <= 0 or lb <= 0:
        raise ValueError("segments must have positive length")
    scale = max(la, lb)

    same = (np.linalg.norm(a0 - b0) <= 1e-12 * scale and np.linalg.norm(a1 - b1) <= 1e-12 * scale)
    same_rev = (np.linalg.norm(a0 - b1) <= 1e-12 * scale and np.linalg.norm(a1 - b0) <= 1e-12 * scale)
    if same or same_rev:
        return PairIntegral(chord_integral_same_segment(la, e), 0.0)

    kind = "log" if e.is_log else "pow"
    p = 0.0 if e.is_log else e.p

    shared = _shared_vertex_layout(a0, a1, b0, b1, scale)
    if shared is not None:
        v = shared[0]
        a_far = a0 if np.linalg.norm(a0 - v) > np.linalg.norm(a1 - v) else a1
        b_far = b0 if np.linalg.norm(b0 - v) > np.linalg.norm(b1 - v) else b1
        dA = (a_far - v)[None, :]
        dB = (b_far - v)[None, :]
        ang = float(_corner_angles(dA, dB)[0])
        if ang < MIN_CORNER_ANGLE:
            raise SingularityError(
                f"shared-vertex angle {ang:.3g} rad below {MIN_CORNER_ANGLE}; "
                "kernel singularity too strong for reliable quadrature")
        geo = PairGeometry(v[None, :], dA, v[None, :], dB)
        integ = PairIntegrator(geo, kind, p, cfg, corner=True)
    else:
        geo = PairGeometry(a0[None, :], (a1 - a0)[None, :], b0[None, :], (b1 - b0)[None, :])
        from .geometry import segment_segment_distance
        dist = segment_segment_distance(a0[None, :], a1[None, :], b0[None, :], b1[None, :])
        integ = PairIntegrator(geo, kind, p, cfg, corner=False, pair_dist=dist)

    total, total_abs = integ.coarse_pass()
    budget = cfg.rel_tol * np.maximum(np.abs(total_abs), (la * lb) * 1e-300)
    res = integ.refine(budget)
    return PairIntegral(float(res.values[0]), float(res.errors[0]))


def _raw_moment_quadrature(curve: PolygonalCurve, e: Exponent, cfg: QuadratureConfig):
    """Assemble M = sum over ordered edge pairs of the chord integral."""
    n = curve.n
    L = length(curve)
    kind = "log" if e.is_log else "pow"
    p = 0.0 if e.is_log else e.p

    lens = curve.edge_lengths
    if e.is_log:
        same = (lens * lens * (np.log(lens) - 1.5)).sum()
    else:
        same = (2.0 * lens ** (p + 2.0) / ((p + 1.0) * (p + 2.0))).sum()

    # adjacent pairs: parameter 0 at the shared vertex (end of edge i)
    starts = curve.edge_starts
    vecs = curve.edge_vectors
    shared = np.roll(starts, -1, axis=0)  # vertex i+1
    dA = -vecs                            # edge i reversed
    dB = np.roll(vecs, -1, axis=0)        # edge i+1 forward
    angles = _corner_angles(dA, dB)
    bad = np.nonzero(angles < MIN_CORNER_ANGLE)[0]
    if bad.size:
        raise SingularityError(
            f"vertex angle {angles[bad[0]]:.3g} rad at vertex {(bad[0] + 1) % n} "
            f"below {MIN_CORNER_ANGLE}")
    adj = PairIntegrator(PairGeometry(shared, dA, shared, dB), kind, p, cfg, corner=True)
    adj_total, adj_abs = adj.coarse_pass()

    # non-adjacent pairs
    i, j, dist = nonadjacent_gaps(curve)
    non = None
    non_total = non_abs = np.zeros(0)
    if i.size:
        geo = PairGeometry(starts[i], vecs[i], starts[j], vecs[j])
        non = PairIntegrator(geo, kind, p, cfg, corner=False, pair_dist=dist)
        non_total, non_abs = non.coarse_pass()

    M_est = same + 2.0 * (adj_total.sum() + non_total.sum())
    abs_mass = abs(same) + 2.0 * (adj_abs.sum() + non_abs.sum())

    # absolute tolerance on M chosen so the relative error of the spread
    # value is ~rel_tol: dD/D = dM/(pM) for finite p, dM/L^2 for log
    if e.is_log:
        tol_M = cfg.rel_tol * L * L
    else:
        tol_M = cfg.rel_tol * abs(p) * max(abs(M_est), 1e-300)

    # unordered-pair budgets; doubling doubles value and error alike
    measures = np.concatenate([lens * np.roll(lens, -1),
                               lens[i] * lens[j] if i.size else np.zeros(0)])
    masses = np.concatenate([adj_abs, non_abs])
    share = 0.5 * masses / max(abs_mass, 1e-300) + 0.5 * measures / measures.sum()
    budgets = 0.45 * tol_M * share

    adj_res = adj.refine(budgets[:n])
    value = same + 2.0 * adj_res.values.sum()
    err = 2.0 * adj_res.errors.sum()
    if non is not None:
        non_res = non.refine(budgets[n:])
        value += 2.0 * non_res.values.sum()
        err += 2.0 * non_res.errors.sum()
    if err > tol_M:
        raise QuadratureError(
            f"pair quadrature error {err:.3g} exceeds tolerance {tol_M:.3g} "
            f"after depth {cfg.max_depth}")
    return value, err, tol_M


def _raw_moment_p2_exact(curve: PolygonalCurve):
    """Exact second moment from per-edge-pair polynomial integrals."""
    n = curve.n
    starts = curve.edge_starts
    vecs = curve.edge_vectors
    lens = curve.edge_lengths
    total = (lens ** 4).sum() / 6.0  # same-edge closed form at p = 2
    i, j = np.triu_indices(n, k=1)
    # chunk the O(n^2) pair list
    step = max(1, int(2e6) // max(n, 1))
    for lo in range(0, i.size, step):
        sl = slice(lo, lo + step)
        total += 2.0 * _p2_pair_integrals(starts[i[sl]], vecs[i[sl]],
                                          starts[j[sl]], vecs[j[sl]]).sum()
    return total


def spread(curve: PolygonalCurve, exponent, cfg: QuadratureConfig = DEFAULT_CONFIG,
           force_quadrature: bool = False) -> SpreadValue:
    """D_p of an embedded polygonal curve.

    p = 2 uses the exact polynomial path unless force_quadrature is set
    (the generic path then serves as a cross-check of the engine itself).
    """
    e = Exponent.coerce(exponent)
    require_embedded(curve)
    if e.is_diameter:
        d = diameter(curve)
        return SpreadValue(d, d, 0.0, "diameter")
    L = length(curve)
    if e.is_finite and e.p == 2.0 and not force_quadrature:
        M = _raw_moment_p2_exact(curve)
        mean = M / (L * L)
        return SpreadValue(math.sqrt(mean), mean, 1e-14 * math.sqrt(mean), "exact-p2")
    M, err_M, _ = _raw_moment_quadrature(curve, e, cfg)
    if e.is_log:
        mean = M / (L * L)
        value = math.exp(mean)
        return SpreadValue(value, mean, value * err_M / (L * L), "quadrature")
    p = e.p
    mean = M / (L * L)
    if mean <= 0:
        raise QuadratureError(f"non-positive raw moment {mean!r} at p={p}")
    value = mean ** (1.0 / p)
    err_val = value * err_M / (abs(p) * abs(M))
    return SpreadValue(value, mean, err_val, "quadrature")


def density_ratio(curve: PolygonalCurve, exponent, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Scale-invariant density length / D_p."""
    return length(curve) / spread(curve, exponent, cfg).value


def spread_p_limit_check(curve: PolygonalCurve, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Spreads at p = +1e-3, -1e-3 and the log value, for continuity checks
    of the p -> 0 extension."""
    d_plus = spread(curve, Exponent.finite(1e-3), cfg).value
    d_minus = spread(curve, Exponent.finite(-1e-3), cfg).value
    d_zero = spread(curve, Exponent.log(), cfg).value
    return {"d_plus": d_plus, "d_minus": d_minus, "d_zero": d_zero}
