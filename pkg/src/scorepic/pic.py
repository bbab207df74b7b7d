"""Particle-grid transfer, particle pushes, and the field solvers.

All grid quantities live at cell centers x_j = (j - 1/2) * eta on a periodic
domain [0, L); field derivatives use centered second-order differences.
"""

from dataclasses import dataclass

import numpy as np

from .state import FieldState, ParticleEnsemble, wrap_position


@dataclass(frozen=True)
class Grid:
    M: int
    eta: float

    @property
    def L(self) -> float:
        return self.M * self.eta

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(self.M) + 0.5) * self.eta

    def cell_of(self, x: np.ndarray) -> np.ndarray:
        """floor(x / eta), clipped so x just below L cannot round into cell M."""
        idx = np.floor(np.asarray(x) / self.eta).astype(np.int64)
        return np.minimum(idx % self.M, self.M - 1)


def _hat_weights(x: np.ndarray, grid: Grid):
    """Indices and weights of the two cell centers inside each particle's hat support."""
    g = x / grid.eta - 0.5
    i0f = np.floor(g)
    f = g - i0f
    i0 = i0f.astype(np.int64) % grid.M
    i1 = (i0 + 1) % grid.M
    return i0, i1, 1.0 - f, f


def deposit(particles: ParticleEnsemble, grid: Grid):
    """Charge and current densities: rho_j = sum_p w_p psi(x_j - x_p), J_ij likewise with v_ip.

    Each particle touches exactly the two centers within hat support; the
    periodic minimum-image distance is implicit in the wrapped indexing.
    """
    i0, i1, f0, f1 = _hat_weights(particles.x, grid)
    w0 = particles.w * f0
    w1 = particles.w * f1
    rho = (np.bincount(i0, weights=w0, minlength=grid.M)
           + np.bincount(i1, weights=w1, minlength=grid.M)) / grid.eta
    J = np.empty((particles.dv, grid.M))
    for i in range(particles.dv):
        J[i] = (np.bincount(i0, weights=w0 * particles.v[:, i], minlength=grid.M)
                + np.bincount(i1, weights=w1 * particles.v[:, i], minlength=grid.M)) / grid.eta
    return rho, J


def interpolate_fields(particles: ParticleEnsemble, fields: FieldState, grid: Grid):
    """Fields at particles: E(x_p) = eta * sum_j psi(x_p - x_j) E_j, likewise B.

    Returns (E_p, B_p) with E_p of shape (n, dv) holding (E1, E2, 0...) and
    B_p of shape (n, 3) holding (0, 0, B3).
    """
    i0, i1, f0, f1 = _hat_weights(particles.x, grid)
    n, dv = particles.n, particles.dv
    E_p = np.zeros((n, dv))
    E_p[:, 0] = f0 * fields.E1[i0] + f1 * fields.E1[i1]
    E_p[:, 1] = f0 * fields.E2[i0] + f1 * fields.E2[i1]
    B_p = np.zeros((n, 3))
    B_p[:, 2] = f0 * fields.B3[i0] + f1 * fields.B3[i1]
    return E_p, B_p


def lorentz_push(particles: ParticleEnsemble, E_p: np.ndarray, B_p: np.ndarray,
                 dt: float) -> None:
    """Forward Euler v <- v + dt (E + v x B) with B = (0, 0, B3).

    v x B = (v2 B3, -v1 B3, 0); for dv = 2 the third component is dropped.
    """
    b3 = B_p[:, 2]
    v = particles.v
    dvx = E_p.copy()
    dvx[:, 0] += v[:, 1] * b3
    dvx[:, 1] -= v[:, 0] * b3
    v += dt * dvx


def advance_positions(particles: ParticleEnsemble, dt: float, L: float) -> None:
    """x <- (x + dt * v1) mod L."""
    particles.x = wrap_position(particles.x + dt * particles.v[:, 0], L)


def maxwell_step(fields: FieldState, J: np.ndarray, dt: float, grid: Grid) -> None:
    """One forward-Euler step of the reduced Maxwell system (VML mode):

        E1 -= dt * J1
        E2 -= dt * ((B3_{j+1} - B3_{j-1}) / (2 eta) + J2)
        B3 -= dt * (E2_{j+1} - E2_{j-1}) / (2 eta)

    applied sequentially, so the B3 update reads the freshly updated E2.
    """
    two_eta = 2.0 * grid.eta
    fields.E1 -= dt * J[0]
    dB3 = (np.roll(fields.B3, -1) - np.roll(fields.B3, 1)) / two_eta
    fields.E2 -= dt * (dB3 + J[1])
    dE2 = (np.roll(fields.E2, -1) - np.roll(fields.E2, 1)) / two_eta
    fields.B3 -= dt * dE2


def vpl_field_step(fields: FieldState, J: np.ndarray, dt: float) -> None:
    """Electrostatic update E1 -= dt * J1; E2 and B3 stay zero."""
    fields.E1 -= dt * J[0]


def poisson_solve(rho: np.ndarray, rho_ion: float, grid: Grid) -> np.ndarray:
    """Periodic spectral solve of -phi'' = rho - rho_ion; returns E1 = -phi'.

    The source must be neutral (its mean vanishes); the zero mode is dropped
    after that check, so the returned field has zero spatial mean. Used only to
    initialize E1 at t = 0 in VPL mode.
    """
    src = np.asarray(rho, dtype=np.float64) - rho_ion
    if abs(src.sum() * grid.eta) > 1e-8:
        raise ValueError("non-neutral plasma")
    src_hat = np.fft.rfft(src)
    k = 2.0 * np.pi * np.fft.rfftfreq(grid.M, d=grid.eta)
    E_hat = np.zeros_like(src_hat)
    E_hat[1:] = -1j * src_hat[1:] / k[1:]
    if grid.M % 2 == 0:
        E_hat[-1] = 0.0  # Nyquist derivative is sign-ambiguous; drop it
    return np.fft.irfft(E_hat, n=grid.M)
