"""Closed polygonal curves in R^3: the universal curve representation.

A curve is an ordered vertex list; edge i joins vertex i to vertex i+1 mod n.
All functionals (length, diameter, moments, spread) act on the image with
uniform arc-length measure, so subdivision vertices are permitted and
harmless.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import CurveParseError, NotEmbeddedError
from .geometry import segment_segment_distance

# Edges shorter than this fraction of total length are rejected at
# construction; non-adjacent segments closer than this fraction are
# flagged non-embedded.
DEGENERATE_EDGE_FRACTION = 1e-12
EMBEDDING_GAP_FRACTION = 1e-12
ADJACENT_FOLD_ANGLE = 1e-9  # rad; adjacent edges folding back onto each other


@dataclass(frozen=True)
class EmbeddingReport:
    is_embedded: bool
    min_nonadjacent_gap: float
    offending_pair: tuple[int, int] | None = None


class PolygonalCurve:
    """Embeddable closed polygon; vertices is an (n, 3) float array.

    Construction validates shape, finiteness, and positive edge lengths.
    Embeddedness is checked separately (``validate_embedded``) because some
    workflows need to inspect non-embedded candidates.
    """

    __slots__ = ("vertices", "__dict__")

    def __init__(self, vertices):
        v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3:
            raise CurveParseError(f"expected (n, 3) vertex array, got shape {v.shape}")
        if v.shape[0] < 3:
            raise CurveParseError("a closed polygon needs at least 3 vertices")
        if not np.all(np.isfinite(v)):
            raise CurveParseError("vertex coordinates must be finite")
        edge_len = np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)
        total = float(edge_len.sum())
        if total <= 0 or np.any(edge_len < DEGENERATE_EDGE_FRACTION * total):
            raise CurveParseError("degenerate (near zero-length) edge")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def n(self) -> int:
        """Edge count (= vertex count for a closed polygon)."""
        return self.vertices.shape[0]

    @cached_property
    def edge_starts(self):
        return self.vertices

    @cached_property
    def edge_ends(self):
        return np.roll(self.vertices, -1, axis=0)

    @cached_property
    def edge_vectors(self):
        return self.edge_ends - self.edge_starts

    @cached_property
    def edge_lengths(self):
        return np.linalg.norm(self.edge_vectors, axis=1)

    @cached_property
    def edge_directions(self):
        return self.edge_vectors / self.edge_lengths[:, None]

    def __repr__(self):
        return f"PolygonalCurve(n={self.n}, length={length(self):.6g})"


def length(curve: PolygonalCurve) -> float:
    """Total Euclidean length of the closed polygon."""
    return float(curve.edge_lengths.sum())


def diameter(curve: PolygonalCurve) -> float:
    """Maximum pairwise distance; attained at vertices (distance is convex
    along segments), so the vertex-pair maximum is exact."""
    v = curve.vertices
    n = v.shape[0]
    best = 0.0
    # chunked O(n^2) scan keeps memory bounded for large n
    step = max(1, int(4e6) // max(n, 1))
    for i0 in range(0, n, step):
        block = v[i0:i0 + step]
        d2 = ((block[:, None, :] - v[None, :, :]) ** 2).sum(axis=2)
        best = max(best, float(d2.max()))
    return float(np.sqrt(best))


def center_of_mass(curve: PolygonalCurve):
    """Arc-length-weighted barycenter (exact for uniform measure on edges)."""
    mid = 0.5 * (curve.edge_starts + curve.edge_ends)
    w = curve.edge_lengths
    return (mid * w[:, None]).sum(axis=0) / w.sum()


def radius_of_gyration(curve: PolygonalCurve) -> float:
    """R_g = sqrt((1/L) * integral |x - c|^2 ds), per-edge closed form."""
    c = center_of_mass(curve)
    a = curve.edge_starts - c
    d = curve.edge_vectors
    # integral over one edge of |a + t d|^2 dt for t in [0,1]:
    per_edge = (np.einsum("ij,ij->i", a, a)
                + np.einsum("ij,ij->i", a, d)
                + np.einsum("ij,ij->i", d, d) / 3.0)
    w = curve.edge_lengths
    return float(np.sqrt((per_edge * w).sum() / w.sum()))


def _nonadjacent_pairs(n: int):
    """Index arrays (i, j), i < j, of non-adjacent edge pairs."""
    i, j = np.triu_indices(n, k=2)
    wrap = (i == 0) & (j == n - 1)
    return i[~wrap], j[~wrap]


def nonadjacent_gaps(curve: PolygonalCurve):
    """(i, j, distance) arrays over all non-adjacent edge pairs."""
    i, j = _nonadjacent_pairs(curve.n)
    if i.size == 0:
        return i, j, np.empty(0)
    d = np.empty(i.size)
    step = 400_000  # bound the solver's temporaries
    for lo in range(0, i.size, step):
        sl = slice(lo, lo + step)
        d[sl] = segment_segment_distance(
            curve.edge_starts[i[sl]], curve.edge_ends[i[sl]],
            curve.edge_starts[j[sl]], curve.edge_ends[j[sl]])
    return i, j, d


def turning_angles(curve: PolygonalCurve):
    """Turning angle at each vertex i between edges i-1 and i, in [0, pi]."""
    e = curve.edge_directions
    prev = np.roll(e, 1, axis=0)
    dots = np.einsum("ij,ij->i", prev, e)
    crosses = np.linalg.norm(np.cross(prev, e), axis=1)
    return np.arctan2(crosses, dots)


def validate_embedded(curve: PolygonalCurve) -> EmbeddingReport:
    """Exact minimum-distance sweep over non-adjacent segment pairs plus a
    fold-back check at each vertex."""
    tol = EMBEDDING_GAP_FRACTION * length(curve)
    i, j, d = nonadjacent_gaps(curve)
    if d.size:
        k = int(np.argmin(d))
        min_gap = float(d[k])
        worst = (int(i[k]), int(j[k]))
    else:  # triangle: all edge pairs adjacent
        min_gap = float("inf")
        worst = None
    if min_gap <= tol:
        return EmbeddingReport(False, min_gap, worst)
    # adjacent edges may meet only at the shared vertex: reject fold-backs
    ang = turning_angles(curve)
    folded = np.nonzero(ang >= np.pi - ADJACENT_FOLD_ANGLE)[0]
    if folded.size:
        k = int(folded[0])
        return EmbeddingReport(False, 0.0, ((k - 1) % curve.n, k))
    return EmbeddingReport(True, min_gap, None)


def require_embedded(curve: PolygonalCurve) -> EmbeddingReport:
    report = validate_embedded(curve)
    if not report.is_embedded:
        raise NotEmbeddedError(
            f"curve is not embedded (gap {report.min_nonadjacent_gap:.3g}, "
            f"pair {report.offending_pair})", report)
    return report


def transform(curve: PolygonalCurve, scale: float = 1.0, rotation=None,
              translation=None) -> PolygonalCurve:
    """Apply the similarity x -> scale * R x + t vertexwise."""
    if scale <= 0:
        raise ValueError(f"scale must be positive, got {scale}")
    v = curve.vertices * scale
    if rotation is not None:
        R = np.asarray(rotation, dtype=float)
        if R.shape != (3, 3) or not np.allclose(R @ R.T, np.eye(3), atol=1e-9):
            raise ValueError("rotation must be a 3x3 orthogonal matrix")
        v = v @ R.T
    if translation is not None:
        v = v + np.asarray(translation, dtype=float)
    return PolygonalCurve(v)


def subdivide(curve: PolygonalCurve, per_edge_splits: int) -> PolygonalCurve:
    """Split every edge into `per_edge_splits` equal parts; image unchanged."""
    k = int(per_edge_splits)
    if k < 1:
        raise ValueError("per_edge_splits must be >= 1")
    if k == 1:
        return curve
    t = np.arange(k) / k
    a = curve.edge_starts
    d = curve.edge_vectors
    pts = a[:, None, :] + t[None, :, None] * d[:, None, :]
    return PolygonalCurve(pts.reshape(-1, 3))


def read_curve_file(path) -> PolygonalCurve:
    """Parse the shared line-oriented curve format: '#' comments, data lines
    of three whitespace-separated reals, vertices in cyclic order."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split()
            if len(parts) != 3:
                raise CurveParseError(f"{path}:{lineno}: expected 3 fields, got {len(parts)}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise CurveParseError(f"{path}:{lineno}: {exc}") from exc
    if len(rows) < 3:
        raise CurveParseError(f"{path}: need at least 3 data lines, found {len(rows)}")
    return PolygonalCurve(np.array(rows))


def write_curve_file(path, curve: PolygonalCurve, header_lines=()):
    """Write the curve format; header_lines are emitted as '#' comments."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        for x, y, z in curve.vertices:
            fh.write(f"{x!r} {y!r} {z!r}\n")
