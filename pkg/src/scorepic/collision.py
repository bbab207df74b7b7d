"""Cell-localized discrete collision force and the collision velocity push.

The force on particle p is

    U_p = sum_q w_q psi_eta(x_p - x_q) A(v_p - v_q) [s_p - s_q],

a pairwise sum that the hat kernel's one-cell support localizes to the
particle's own and adjacent cells. Binning makes the cost O(n * n_cell)
instead of O(n^2) while remaining exact.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .kernels import EPS_Z
from .pic import Grid
from .state import ParticleEnsemble


@dataclass
class CellIndex:
    """Per-cell particle index lists; bin of particle p is floor(x_p / eta)."""

    bins: list  # list of (k_c,) int64 arrays
    M: int

    def neighbors(self, c: int) -> np.ndarray:
        """Indices in the periodic stencil {c-1, c, c+1}, deduplicated for tiny M."""
        cells = []
        for d in (-1, 0, 1):
            cd = (c + d) % self.M
            if cd not in cells:
                cells.append(cd)
        return np.concatenate([self.bins[cd] for cd in cells])


def build_cell_index(particles: ParticleEnsemble, grid: Grid) -> CellIndex:
    cell = grid.cell_of(particles.x)
    order = np.argsort(cell, kind="stable")
    sorted_cells = cell[order]
    starts = np.searchsorted(sorted_cells, np.arange(grid.M))
    ends = np.searchsorted(sorted_cells, np.arange(grid.M), side="right")
    bins = [order[s:e] for s, e in zip(starts, ends)]
    return CellIndex(bins=bins, M=grid.M)


@njit(cache=True)
def _collision_cell(xt, vt, st, xn, vn, sn, wn, eta, L, half_pow, eps2, out):
    """Accumulate U for target particles against a neighbor list.

    half_pow = (gamma + 2) / 2, so the kernel magnitude is (|z|^2)^half_pow.
    Pairs with |z|^2 <= eps2 contribute nothing (regularized singularity;
    this also covers the p = q self term).
    """
    nt = xt.shape[0]
    nn = xn.shape[0]
    dv = vt.shape[1]
    for i in range(nt):
        for j in range(nn):
            dx = xt[i] - xn[j]
            if dx > 0.5 * L:
                dx -= L
            elif dx < -0.5 * L:
                dx += L
            adx = abs(dx)
            if adx >= eta:
                continue
            psi = (1.0 - adx / eta) / eta
            z2 = 0.0
            zu = 0.0
            for k in range(dv):
                d = vt[i, k] - vn[j, k]
                u = st[i, k] - sn[j, k]
                z2 += d * d
                zu += d * u
            if z2 <= eps2:
                continue
            if half_pow == 0.0:
                coef = 1.0
            elif half_pow == -0.5:
                coef = 1.0 / np.sqrt(z2)
            else:
                coef = z2 ** half_pow
            cw = wn[j] * psi * coef
            proj = cw * zu / z2
            for k in range(dv):
                out[i, k] += cw * (st[i, k] - sn[j, k]) - proj * (vt[i, k] - vn[j, k])


def collision_force(particles: ParticleEnsemble, scores: np.ndarray,
                    cell_index: CellIndex, grid: Grid, gamma: float) -> np.ndarray:
    """Evaluate U at every particle; exact restriction of the double sum to the stencil."""
    if not np.all(np.isfinite(scores)):
        raise ValueError("invalid score input")
    x, v, w = particles.x, particles.v, particles.w
    U = np.zeros_like(v)
    half_pow = (gamma + 2.0) / 2.0
    eps2 = EPS_Z * EPS_Z
    for c in range(cell_index.M):
        tgt = cell_index.bins[c]
        if tgt.size == 0:
            continue
        nbr = cell_index.neighbors(c)
        out = np.zeros((tgt.size, v.shape[1]))
        _collision_cell(x[tgt], v[tgt], scores[tgt], x[nbr], v[nbr], scores[nbr],
                        w[nbr], grid.eta, grid.L, half_pow, eps2, out)
        U[tgt] = out
    return U


def collision_push(particles: ParticleEnsemble, U: np.ndarray, nu: float,
                   dt: float) -> None:
    """v <- v - dt * nu * U."""
    particles.v -= (dt * nu) * U
