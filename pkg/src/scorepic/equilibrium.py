"""Analytic long-time oracles and initial-condition scores.

The unique collisional steady state is a spatially uniform Maxwellian whose
temperature (and, in the electrostatic case, drift) follows from conserved
quantities of the initial data. Stated for dv = 3; for reduced-dimension runs
the equipartition factor 3/2 generalizes to dv/2.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class EquilibriumState:
    T_inf: float
    u_inf: np.ndarray   # (dv,)
    B_inf: np.ndarray   # (3,)
    rho_ion: float


def vml_equilibrium(initial_energy: float, B_init_mean, rho_ion: float,
                    volume: float, dv: int = 3) -> EquilibriumState:
    """Electromagnetic steady state: zero drift, B_inf = spatial mean of B(0),

        T_inf = 2 / (dv * rho_ion * |Omega|) * (E_0 - |B_inf|^2 / 2 * |Omega|).
    """
    B_inf = np.asarray(B_init_mean, dtype=np.float64).reshape(3)
    T_inf = 2.0 / (dv * rho_ion * volume) * (
        initial_energy - 0.5 * float(B_inf @ B_inf) * volume)
    if not T_inf > 0:
        raise ValueError("inconsistent energy accounting")
    return EquilibriumState(T_inf=T_inf, u_inf=np.zeros(dv), B_inf=B_inf,
                            rho_ion=rho_ion)


def vpl_equilibrium(initial_energy: float, initial_momentum,
                    rho_ion: float, volume: float) -> EquilibriumState:
    """Electrostatic steady state: the drift is the conserved mean velocity,

        u_inf = P_0 / (rho_ion * |Omega|),
        T_inf = 2 / (dv * rho_ion * |Omega|) * (E_0 - rho_ion |u_inf|^2 |Omega| / 2).
    """
    P0 = np.asarray(initial_momentum, dtype=np.float64)
    dv = P0.shape[0]
    u_inf = P0 / (rho_ion * volume)
    T_inf = 2.0 / (dv * rho_ion * volume) * (
        initial_energy - 0.5 * rho_ion * float(u_inf @ u_inf) * volume)
    if not T_inf > 0:
        raise ValueError("inconsistent energy accounting")
    return EquilibriumState(T_inf=T_inf, u_inf=u_inf, B_inf=np.zeros(3),
                            rho_ion=rho_ion)


def _mixture_score(u, c: float, var: float):
    """grad_u log of the equal-weight mixture of N(+c, var) and N(-c, var).

    Stable closed form: (-u + c * tanh(u c / var)) / var.
    """
    return (-u + c * np.tanh(u * c / var)) / var


def analytic_initial_score(preset: str, x, v, *, c: float = 0.0,
                           beta: float = 1.0) -> np.ndarray:
    """Closed-form grad_v log f_0; the spatial factor contributes nothing."""
    v_in = np.asarray(v, dtype=np.float64)
    v = np.atleast_2d(v_in)
    if preset == "landau_damping":
        s = -v
    elif preset == "two_stream":
        s = -v.copy()
        s[:, 0] = _mixture_score(v[:, 0], c, 1.0)
    elif preset == "weibel":
        var = beta / 2.0
        s = -v / var
        s[:, 1] = _mixture_score(v[:, 1], c, var)
    else:
        raise ValueError(f"unknown preset: {preset!r}")
    return s[0] if v_in.ndim == 1 else s


def maxwellian_l2_distance(particles, component: int, T: float, u_comp: float,
                           bins: int = 200, v_range=None) -> float:
    """L2 distance of a velocity-component marginal to the N(u, T) density.

    Histogram density estimate on `bins` bins; returns
    sqrt(sum_b dv_bin * (f_hat_b - g_b)^2) with g the Gaussian pdf at bin centers.
    """
    if particles.n == 0:
        raise ValueError("empty particle set")
    if bins < 16:
        raise ValueError("need bins >= 16")
    sd = np.sqrt(T)
    if v_range is None:
        v_range = (u_comp - 6.0 * sd, u_comp + 6.0 * sd)
    lo, hi = v_range
    if lo > u_comp - 5.0 * sd or hi < u_comp + 5.0 * sd:
        raise ValueError("v_range must cover at least 5*sqrt(T) on each side")
    vals = particles.v[:, component]
    f_hat, edges = np.histogram(vals, bins=bins, range=(lo, hi),
                                weights=particles.w, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    width = edges[1] - edges[0]
    g = np.exp(-0.5 * (centers - u_comp) ** 2 / T) / np.sqrt(2.0 * np.pi * T)
    return float(np.sqrt(np.sum(width * (f_hat - g) ** 2)))


def fit_damping_rate(times, E_l2, window=None):
    """Decay/growth rate of the field norm from the peaks of log ||E||.

    Detects strict local maxima of log E_l2 and least-squares fits log(peak)
    against time. Signals with no extrema at all (constant or monotone, e.g.
    pure exponential growth) are fitted over every sample instead; one or two
    peaks means the oscillation is under-resolved and is an error.

    Returns (rate, (t_start, t_end)) of the fitted window.
    """
    times = np.asarray(times, dtype=np.float64)
    E = np.asarray(E_l2, dtype=np.float64)
    if times.shape != E.shape or times.size < 3:
        raise ValueError("need matching series with at least 3 samples")
    if np.any(E <= 0):
        raise ValueError("E_l2 must be positive to fit a log-linear rate")
    y = np.log(E)
    interior = np.arange(1, y.size - 1)
    peak_idx = interior[(y[interior] > y[interior - 1]) & (y[interior] > y[interior + 1])]
    if peak_idx.size >= 3:
        ts, ys = times[peak_idx], y[peak_idx]
    elif peak_idx.size == 0:
        ts, ys = times, y
    else:
        raise ValueError("insufficient oscillations")
    if window is not None:
        lo, hi = window
        keep = (ts >= lo) & (ts <= hi)
        if keep.sum() < 2:
            raise ValueError("fit window keeps fewer than 2 points")
        ts, ys = ts[keep], ys[keep]
    rate = float(np.polyfit(ts, ys, 1)[0])
    return rate, (float(ts[0]), float(ts[-1]))
