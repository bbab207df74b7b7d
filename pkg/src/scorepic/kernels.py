"""Analytic kernels: the hat (degree-1 B-spline) kernel and the Coulomb collision kernel."""

import numpy as np

# pair distances in velocity below this are treated as coincident: the kernel
# matrix is defined to be zero there (the p = q term vanishes identically anyway)
EPS_Z = 1e-12


def psi_eta(r, eta: float):
    """Hat kernel psi_eta(r) = (1 - |r|/eta)_+ / eta; support [-eta, eta], unit integral."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    r = np.asarray(r, dtype=np.float64)
    out = np.maximum(0.0, 1.0 - np.abs(r) / eta) / eta
    return float(out) if out.ndim == 0 else out


def min_image(dx, L: float):
    """Signed periodic distance folded into [-L/2, L/2)."""
    return np.mod(np.asarray(dx, dtype=np.float64) + 0.5 * L, L) - 0.5 * L


def landau_A(z, gamma: float) -> np.ndarray:
    """Collision kernel A(z) = |z|^(gamma+2) * (I - z z^T / |z|^2).

    Symmetric PSD with A(z) z = 0. The Coulomb singularity at z = 0 is
    regularized to the zero matrix for |z| < EPS_Z.
    """
    z = np.asarray(z, dtype=np.float64)
    d = z.shape[0]
    z2 = float(z @ z)
    if z2 < EPS_Z * EPS_Z:
        return np.zeros((d, d))
    coef = z2 ** ((gamma + 2.0) / 2.0)
    return coef * (np.eye(d) - np.outer(z, z) / z2)


def landau_apply(z, u, gamma: float) -> np.ndarray:
    """A(z) @ u without forming the matrix: |z|^(gamma+2) (u - (z.u/|z|^2) z)."""
    z = np.asarray(z, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    z2 = float(z @ z)
    if z2 < EPS_Z * EPS_Z:
        return np.zeros_like(u)
    coef = z2 ** ((gamma + 2.0) / 2.0)
    return coef * (u - (float(z @ u) / z2) * z)
