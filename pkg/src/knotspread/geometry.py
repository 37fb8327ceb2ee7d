"""Low-level vectorized 3D geometry: segment distances, triangle piercing, rotations.

All batched routines take arrays of shape (m, 3) per endpoint and return
per-row results; they are the shared workhorses for embeddedness sweeps,
thickness, and the optimizer's move admissibility checks.
"""

from __future__ import annotations

import numpy as np


def segment_closest_parameters(p0, p1, q0, q1):
    """Closest-approach parameters (s, t) in [0,1] between segment batches.

    Standard clamped quadratic minimization (Eberly). Robust for parallel
    and degenerate segments: ties resolve to an arbitrary minimizing point.
    """
    p0 = np.atleast_2d(p0)
    d1 = p1 - p0
    d2 = q1 - q0
    r = p0 - q0
    a = np.einsum("ij,ij->i", d1, d1)
    e = np.einsum("ij,ij->i", d2, d2)
    f = np.einsum("ij,ij->i", d2, r)
    c = np.einsum("ij,ij->i", d1, r)
    b = np.einsum("ij,ij->i", d1, d2)
    denom = a * e - b * b

    # Unclamped line-line solution where well-conditioned.
    tiny = np.finfo(float).tiny
    parallel = denom <= 1e-12 * np.maximum(a * e, tiny)
    s = np.where(~parallel, (b * f - c * e), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(denom > 0, s / np.where(denom > 0, denom, 1.0), 0.0)
    s = np.clip(s, 0.0, 1.0)
    if np.any(parallel):
        # flat valley: pick the midpoint of the projection overlap so that
        # interior minimizers are reported as interior (not clamped to ends)
        idx = np.nonzero(parallel)[0]
        with np.errstate(divide="ignore", invalid="ignore"):
            pa = np.where(a[idx] > 0, -c[idx] / np.where(a[idx] > 0, a[idx], 1.0), 0.0)
            pb = np.where(a[idx] > 0, (np.einsum("ij,ij->i", d1[idx], (q1 - p0)[idx]))
                          / np.where(a[idx] > 0, a[idx], 1.0), 0.0)
        lo = np.minimum(pa, pb)
        hi = np.maximum(pa, pb)
        olo = np.maximum(lo, 0.0)
        ohi = np.minimum(hi, 1.0)
        s[idx] = np.where(olo <= ohi, 0.5 * (olo + ohi), np.where(hi < 0.0, 0.0, 1.0))

    # t from s, then re-clamp s from t (one Gauss-Seidel pass is exact for
    # the clamped quadratic).
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(e > 0, (b * s + f) / np.where(e > 0, e, 1.0), 0.0)
    t_clamped = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(a > 0, (b * t_clamped - c) / np.where(a > 0, a, 1.0), 0.0)
    s = np.clip(s, 0.0, 1.0)
    return s, t_clamped


def segment_segment_distance(p0, p1, q0, q1, with_parameters=False):
    """Minimum Euclidean distance between two batches of 3D segments."""
    s, t = segment_closest_parameters(p0, p1, q0, q1)
    x = p0 + s[:, None] * (p1 - p0)
    y = q0 + t[:, None] * (q1 - q0)
    d = np.linalg.norm(x - y, axis=1)
    if with_parameters:
        return d, s, t
    return d


def segment_triangle_pierce(seg_a, seg_b, tri0, tri1, tri2, tol=1e-12):
    """True where segment (seg_a, seg_b) meets triangle (tri0, tri1, tri2).

    Batched Moller-Trumbore with inclusive tolerances; degenerate (near
    zero area) triangles fall back to a segment-segment proximity test
    against the triangle's longest edge.
    """
    seg_a = np.atleast_2d(seg_a)
    d = seg_b - seg_a
    e1 = tri1 - tri0
    e2 = tri2 - tri0
    h = np.cross(d, e2)
    det = np.einsum("ij,ij->i", e1, h)
    scale = np.linalg.norm(e1, axis=1) * np.linalg.norm(e2, axis=1) + np.finfo(float).tiny
    ok = np.abs(det) > 1e-14 * scale * (np.linalg.norm(d, axis=1) + 1.0)

    inv = np.where(ok, det, 1.0)
    sv = seg_a - tri0
    u = np.einsum("ij,ij->i", sv, h) / inv
    q = np.cross(sv, e1)
    v = np.einsum("ij,ij->i", d, q) / inv
    t = np.einsum("ij,ij->i", e2, q) / inv
    hit = ok & (u >= -tol) & (v >= -tol) & (u + v <= 1.0 + tol) & (t >= -tol) & (t <= 1.0 + tol)

    # Degenerate triangles: the sweep collapsed to (almost) a segment.
    degen = ~ok
    if np.any(degen):
        idx = np.nonzero(degen)[0]
        l01 = np.linalg.norm((tri1 - tri0)[idx], axis=1)
        l02 = np.linalg.norm((tri2 - tri0)[idx], axis=1)
        l12 = np.linalg.norm((tri2 - tri1)[idx], axis=1)
        # longest edge endpoints
        a = np.where((l01 >= l02)[:, None] & (l01 >= l12)[:, None], tri0[idx],
                     np.where((l02 >= l12)[:, None], tri0[idx], tri1[idx]))
        b = np.where((l01 >= l02)[:, None] & (l01 >= l12)[:, None], tri1[idx],
                     tri2[idx])
        dd = segment_segment_distance(seg_a[idx], seg_b[idx], a, b)
        size = np.maximum(l01, np.maximum(l02, l12)) + np.linalg.norm(d[idx], axis=1)
        hit[idx] = dd <= 1e-9 * np.maximum(size, 1.0)
    return hit


def rotation_matrix(axis, angle):
    """Proper rotation about `axis` by `angle` (Rodrigues)."""
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if n == 0:
        raise ValueError("rotation axis must be nonzero")
    x, y, z = axis / n
    c, s = np.cos(angle), np.sin(angle)
    C = 1.0 - c
    return np.array([
        [c + x * x * C, x * y * C - z * s, x * z * C + y * s],
        [y * x * C + z * s, c + y * y * C, y * z * C - x * s],
        [z * x * C - y * s, z * y * C + x * s, c + z * z * C],
    ])


def rotation_between(u, v):
    """Proper rotation taking unit direction u onto unit direction v."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    c = float(np.dot(u, v))
    w = np.cross(u, v)
    s = np.linalg.norm(w)
    if s < 1e-14:
        if c > 0:
            return np.eye(3)
        # antipodal: rotate by pi about any perpendicular axis
        return rotation_matrix(perpendicular_unit(u), np.pi)
    return rotation_matrix(w, np.arctan2(s, c))


def perpendicular_unit(u):
    """A deterministic unit vector perpendicular to u."""
    u = np.asarray(u, dtype=float)
    probe = np.array([1.0, 0.0, 0.0]) if abs(u[0]) <= 0.9 else np.array([0.0, 1.0, 0.0])
    w = np.cross(u, probe)
    return w / np.linalg.norm(w)


def orthonormal_frame(axis):
    """Right-handed frame (e1, e2, axis_hat) with axis_hat = axis/|axis|."""
    axis = np.asarray(axis, dtype=float)
    a = axis / np.linalg.norm(axis)
    e1 = perpendicular_unit(a)
    e2 = np.cross(a, e1)
    return e1, e2, a
