"""Initial-condition sampling: positions from the spatial marginal of f_0,
velocities from the velocity marginal, equal weights w_p = L/n."""

import numpy as np

from .config import SimConfig
from .pic import Grid, poisson_solve
from .state import FieldState, ParticleEnsemble


def sample_positions(n: int, alpha: float, k: float, L: float,
                     rng: np.random.Generator) -> np.ndarray:
    """iid samples with density proportional to 1 + alpha*cos(k x) on [0, L).

    Inverse CDF of F(x) = (x + (alpha/k) sin(k x)) / L by Newton iteration to
    residual 1e-12, with a bisection fallback (F is strictly increasing for
    |alpha| < 1, so bisection always converges).
    """
    if not abs(alpha) < 1:
        raise ValueError("need |alpha| < 1")
    u = rng.random(n)
    x = L * u
    for _ in range(100):
        resid = (x + (alpha / k) * np.sin(k * x)) / L - u
        if np.all(np.abs(resid) <= 1e-12):
            break
        x = x - resid * L / (1.0 + alpha * np.cos(k * x))
    resid = (x + (alpha / k) * np.sin(k * x)) / L - u
    bad = np.abs(resid) > 1e-12
    if np.any(bad):
        lo = np.zeros(bad.sum())
        hi = np.full(bad.sum(), L)
        ub = u[bad]
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            high = (mid + (alpha / k) * np.sin(k * mid)) / L > ub
            hi = np.where(high, mid, hi)
            lo = np.where(high, lo, mid)
        x[bad] = 0.5 * (lo + hi)
    return np.clip(x, 0.0, np.nextafter(L, 0.0))


def sample_velocities(n: int, preset: str, rng: np.random.Generator, *,
                      dv: int, c: float = 0.0, beta: float = 1.0) -> np.ndarray:
    """Per-preset velocity marginals (component draw order is fixed for determinism):

    landau_damping: standard normal per component.
    two_stream: v1 from the equal mixture of N(+-c, 1) (fair coin, then
        Gaussian), other components standard normal.
    weibel: components 1 and 3 from N(0, beta/2); component 2 from the equal
        mixture of N(+-c, beta/2).
    """
    v = np.empty((n, dv))
    if preset == "landau_damping":
        for i in range(dv):
            v[:, i] = rng.normal(size=n)
    elif preset == "two_stream":
        signs = np.where(rng.random(n) < 0.5, c, -c)
        v[:, 0] = signs + rng.normal(size=n)
        for i in range(1, dv):
            v[:, i] = rng.normal(size=n)
    elif preset == "weibel":
        sd = np.sqrt(beta / 2.0)
        v[:, 0] = sd * rng.normal(size=n)
        signs = np.where(rng.random(n) < 0.5, c, -c)
        v[:, 1] = signs + sd * rng.normal(size=n)
        for i in range(2, dv):
            v[:, i] = sd * rng.normal(size=n)
    else:
        raise ValueError(f"unknown preset: {preset!r}")
    return v


def sample_ensemble(config: SimConfig, rng: np.random.Generator) -> ParticleEnsemble:
    """Positions first, then velocities, then equal weights L/n.

    The custom preset samples a perturbed-Maxwellian initial condition
    (spatial density 1 + alpha*cos(k x), standard-normal velocities); weibel
    is spatially uniform, its perturbation lives in the seed magnetic field.
    """
    preset = config.preset if config.preset != "custom" else "landau_damping"
    alpha = config.alpha if config.preset != "weibel" else 0.0
    x = sample_positions(config.n, alpha, config.k, config.L, rng)
    v = sample_velocities(config.n, preset, rng, dv=config.dv, c=config.c,
                          beta=config.beta)
    w = np.full(config.n, config.L / config.n)
    return ParticleEnsemble(x=x, v=v, w=w)


def initial_fields(config: SimConfig, grid: Grid, rho: np.ndarray,
                   J: np.ndarray) -> FieldState:
    """Initial grid fields.

    VPL starts from the electrostatic solve of the deposited charge; VML
    starts with E = 0 and the seeded magnetic perturbation
    B3 = alpha_B * sin(k x_j). rho_ion comes from the total particle weight,
    which enforces exact discrete neutrality.
    """
    rho_ion = float(rho.sum() * grid.eta / grid.L)
    fields = FieldState.zeros(grid.M, J.shape[0], rho_ion=rho_ion)
    fields.rho = rho.copy()
    fields.J = J.copy()
    if config.mode == "VML":
        fields.B3 = config.alpha_B * np.sin(config.k * grid.centers)
    else:
        fields.E1 = poisson_solve(rho, rho_ion, grid)
    return fields
