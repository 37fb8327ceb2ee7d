"""Adaptive tensor Gauss quadrature for pairwise chord integrals.

Evaluates integral_A integral_B k(|x - y|) ds ds over batches of segment
pairs, with k(r) = r^p or log r. Disjoint pairs start from the unit
parameter box; pairs sharing a vertex start from dyadic panels halving
toward the shared corner (grading ratio 1/2), where the kernel is singular
for p < 0 and log. Refinement compares each panel's tensor Gauss value
against the sum over its 2x2 children and bisects until per-pair error
budgets are met or the depth cap is reached.

Well-separated panels skip refinement: a Bernstein-ellipse factor bounds
the Gauss error a priori from the separation/size ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_gauss_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss01(n: int):
    if n not in _gauss_cache:
        x, w = np.polynomial.legendre.leggauss(int(n))
        _gauss_cache[n] = ((x + 1.0) / 2.0, w / 2.0)
    return _gauss_cache[n]


@dataclass
class PairGeometry:
    """Physical segment pairs: x(s) = A0 + s*dA, y(t) = B0 + t*dB, s,t in [0,1]."""

    A0: np.ndarray
    dA: np.ndarray
    B0: np.ndarray
    dB: np.ndarray

    @property
    def count(self):
        return self.A0.shape[0]

    @property
    def len_a(self):
        return np.linalg.norm(self.dA, axis=1)

    @property
    def len_b(self):
        return np.linalg.norm(self.dB, axis=1)


def _eval_boxes(geo: PairGeometry, pid, sa0, ha, sb0, hb, kind, p, nodes,
                want_abs=False, chunk=150_000):
    """Tensor Gauss over parameter boxes; returns physical integrals.

    pid indexes into geo; boxes are [sa0, sa0+ha] x [sb0, sb0+hb].
    """
    x, w = gauss01(nodes)
    half = 0.5 * p
    m = pid.shape[0]
    out = np.empty(m)
    out_abs = np.empty(m) if want_abs else None
    jac = (np.linalg.norm(geo.dA, axis=1) * np.linalg.norm(geo.dB, axis=1))[pid] * ha * hb
    ww = np.outer(w, w).ravel()
    for lo in range(0, m, chunk):
        hi = min(lo + chunk, m)
        sl = slice(lo, hi)
        q = pid[sl]
        sa = sa0[sl, None] + ha[sl, None] * x[None, :]
        sb = sb0[sl, None] + hb[sl, None] * x[None, :]
        r2 = None
        for k in range(3):
            xa = geo.A0[q, k, None] + sa * geo.dA[q, k, None]
            xb = geo.B0[q, k, None] + sb * geo.dB[q, k, None]
            dk = xa[:, :, None] - xb[:, None, :]
            np.multiply(dk, dk, out=dk)
            r2 = dk if r2 is None else np.add(r2, dk, out=r2)
        if kind == "log":
            K = np.log(r2, out=r2)
            K *= 0.5
        else:
            K = np.power(r2, half, out=r2)
        flat = K.reshape(hi - lo, -1)
        if want_abs:
            out_abs[sl] = np.abs(flat) @ ww * jac[sl]
        out[sl] = flat @ ww * jac[sl]
    if want_abs:
        return out, out_abs
    return out


def _children(sa0, ha, sb0, hb):
    """2x2 bisection of each box; returns stacked child boxes (4m rows)."""
    h2a = 0.5 * ha
    h2b = 0.5 * hb
    csa = np.concatenate([sa0, sa0 + h2a, sa0, sa0 + h2a])
    csb = np.concatenate([sb0, sb0, sb0 + h2b, sb0 + h2b])
    return csa, np.tile(h2a, 4), csb, np.tile(h2b, 4)


def bernstein_factor(sigma, nodes):
    """Gauss-Legendre convergence factor for a singularity at separation
    sigma times the panel size: rho^(-2 nodes) with the Bernstein ellipse
    parameter rho = 1 + 2 sigma + 2 sqrt(sigma (sigma + 1))."""
    sigma = np.maximum(sigma, 0.0)
    rho = 1.0 + 2.0 * sigma + 2.0 * np.sqrt(sigma * (sigma + 1.0))
    with np.errstate(over="ignore"):
        return rho ** (-2.0 * nodes)


def corner_depth(p_eff: float, rel_tol: float, max_depth: int) -> int:
    """Dyadic grading depth toward a shared-vertex corner so the innermost
    panel's contribution sits well below the tolerance."""
    d = math.ceil(math.log2(1.0 / rel_tol) / (p_eff + 2.0)) + 2
    return int(min(max(d, 4), max_depth))


def corner_seed_boxes(depth: int):
    """Dyadic L-shaped panels of [0,1]^2 halving toward the corner (0,0).

    Level k contributes three panels of size 2^-(k+1); the innermost square
    [0, 2^-depth]^2 closes the family. 3*depth + 1 panels total.
    """
    sa, ha, sb, hb = [], [], [], []
    for k in range(depth):
        h = 2.0 ** (-(k + 1))
        sa += [h, h, 0.0]
        sb += [h, 0.0, h]
        ha += [h, h, h]
        hb += [h, h, h]
    h = 2.0 ** (-depth)
    sa.append(0.0)
    sb.append(0.0)
    ha.append(h)
    hb.append(h)
    return (np.array(sa), np.array(ha), np.array(sb), np.array(hb))


@dataclass
class PairResult:
    values: np.ndarray
    errors: np.ndarray
    budgets: np.ndarray

    @property
    def failed(self):
        return self.errors > self.budgets


class PairIntegrator:
    """Two-phase driver: a coarse pass exposes per-pair magnitudes so the
    caller can set budgets; refine() then runs the adaptive loop."""

    def __init__(self, geo: PairGeometry, kind: str, p: float, cfg,
                 corner: bool = False, pair_dist=None):
        self.geo = geo
        self.kind = kind
        self.p = float(p) if kind == "pow" else 0.0
        self.cfg = cfg
        self.corner = corner
        m = geo.count
        if corner:
            p_eff = min(self.p, 0.0) if kind == "pow" else 0.0
            depth = corner_depth(p_eff, cfg.rel_tol, cfg.max_depth)
            bsa, bha, bsb, bhb = corner_seed_boxes(depth)
            nb = bsa.shape[0]
            self.pid = np.repeat(np.arange(m), nb)
            self.sa0 = np.tile(bsa, m)
            self.ha = np.tile(bha, m)
            self.sb0 = np.tile(bsb, m)
            self.hb = np.tile(bhb, m)
            # separation of each panel from the corner, in panel sizes
            self.sigma_seed = np.tile(np.where(bsa + bsb > 0, 1.0, 0.0), m)
            # a fold-back corner puts near-singular mass along the panel
            # diagonals too; only wide corner angles get the a priori accept
            ua = geo.dA / np.linalg.norm(geo.dA, axis=1)[:, None]
            ub = geo.dB / np.linalg.norm(geo.dB, axis=1)[:, None]
            cosang = np.einsum("ij,ij->i", ua, ub)
            benign = cosang <= 0.05  # angle >= ~pi/2
            self.sigma_seed = np.where(benign[self.pid], self.sigma_seed, 0.0)
        else:
            self.pid = np.arange(m)
            self.sa0 = np.zeros(m)
            self.ha = np.ones(m)
            self.sb0 = np.zeros(m)
            self.hb = np.ones(m)
            if pair_dist is None:
                pair_dist = np.zeros(m)
            size = np.maximum(geo.len_a, geo.len_b)
            self.sigma_seed = pair_dist / np.maximum(size, np.finfo(float).tiny)
        self.depth = np.zeros(self.pid.shape[0], dtype=np.int32)
        self._coarse_done = False

    def coarse_pass(self):
        """Evaluate all seed panels; returns per-pair (signed, absolute)
        coarse totals for budget construction."""
        cfg = self.cfg
        if self.kind == "log":
            self.I0, self.I0_abs = _eval_boxes(
                self.geo, self.pid, self.sa0, self.ha, self.sb0, self.hb,
                self.kind, self.p, cfg.base_nodes, want_abs=True)
        else:
            self.I0 = _eval_boxes(
                self.geo, self.pid, self.sa0, self.ha, self.sb0, self.hb,
                self.kind, self.p, cfg.base_nodes)
            self.I0_abs = np.abs(self.I0)
        m = self.geo.count
        self.pair_total = np.bincount(self.pid, weights=self.I0, minlength=m)
        self.pair_total_abs = np.bincount(self.pid, weights=self.I0_abs, minlength=m)
        self._coarse_done = True
        return self.pair_total, self.pair_total_abs

    def refine(self, budgets) -> PairResult:
        """Adaptive loop to per-pair absolute error budgets."""
        assert self._coarse_done
        cfg = self.cfg
        budgets = np.asarray(budgets, dtype=float)
        m = self.geo.count

        apriori = 16.0 * self.I0_abs * bernstein_factor(self.sigma_seed, cfg.base_nodes)
        box_budget = budgets[self.pid] * np.maximum(
            self.I0_abs / np.maximum(self.pair_total_abs[self.pid], np.finfo(float).tiny),
            self.ha * self.hb * 0.05)
        accept = apriori <= box_budget

        # accepted leaves: value = coarse, error = a priori bound
        acc = [(self.pid[accept], self.I0[accept], apriori[accept])]

        # the rest get true child-comparison estimates
        pid = self.pid[~accept]
        sa0, ha = self.sa0[~accept], self.ha[~accept]
        sb0, hb = self.sb0[~accept], self.hb[~accept]
        I0 = self.I0[~accept]
        depth = self.depth[~accept]

        leaves_pid, leaves_val, leaves_err = [], [], []
        guard = 0
        while pid.size:
            csa, cha, csb, chb = _children(sa0, ha, sb0, hb)
            cI0 = _eval_boxes(self.geo, np.tile(pid, 4), csa, cha, csb, chb,
                              self.kind, self.p, cfg.base_nodes)
            k = pid.size
            val = cI0[:k] + cI0[k:2 * k] + cI0[2 * k:3 * k] + cI0[3 * k:]
            err = np.abs(val - I0)

            # per-pair error totals across current leaves + settled ones
            err_pair = np.bincount(pid, weights=err, minlength=m)
            for ap, _, ae in acc:
                err_pair += np.bincount(ap, weights=ae, minlength=m)
            for lp, _, le in zip(leaves_pid, leaves_val, leaves_err):
                err_pair += np.bincount(lp, weights=le, minlength=m)
            over = err_pair > budgets

            worst = np.zeros(m)
            np.maximum.at(worst, pid, err)
            refinable = (over[pid] & (depth < cfg.max_depth)
                         & (err >= 0.25 * worst[pid])
                         & (err > 0.01 * budgets[pid]))

            settled = ~refinable
            leaves_pid.append(pid[settled])
            leaves_val.append(val[settled])
            leaves_err.append(err[settled])

            if not np.any(refinable):
                break
            sel = np.nonzero(refinable)[0]
            reorder = np.concatenate([sel, sel + k, sel + 2 * k, sel + 3 * k])
            pid = np.tile(pid[sel], 4)
            sa0, ha = csa[reorder], cha[reorder]
            sb0, hb = csb[reorder], chb[reorder]
            I0 = cI0[reorder]
            depth = np.tile(depth[sel] + 1, 4)
            guard += 1
            if guard > 4 * cfg.max_depth:  # safety; depth cap should fire first
                leaves_pid.append(pid)
                leaves_val.append(I0)
                leaves_err.append(np.abs(I0))
                break

        values = np.zeros(m)
        errors = np.zeros(m)
        for ap, av, ae in acc:
            values += np.bincount(ap, weights=av, minlength=m)
            errors += np.bincount(ap, weights=ae, minlength=m)
        for lp, lv, le in zip(leaves_pid, leaves_val, leaves_err):
            values += np.bincount(lp, weights=lv, minlength=m)
            errors += np.bincount(lp, weights=le, minlength=m)
        return PairResult(values, errors, budgets)
