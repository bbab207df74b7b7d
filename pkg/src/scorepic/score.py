"""Velocity-score estimation.

Two interchangeable estimators behind a common estimate/update interface:

* blob: per-cell Gaussian kernel density estimate of grad_v log f, localized in
  space by the hat kernel; stateless, recomputed from the current particles.
* sbtm: a two-layer softsign MLP trained on-the-fly by implicit score matching,

      loss(theta) = sum_p w_p [ |s(x_p,v_p)|^2 + 2 div_v s(x_p,v_p) ],

  with the divergence taken either exactly (closed form for this architecture)
  or via Hutchinson's estimator z^T (grad_v s) z with Rademacher z. Gradients
  are closed-form backpropagation, including the second-order divergence term.
"""

import struct
from dataclasses import dataclass

import numpy as np
from numba import njit

from .collision import CellIndex, build_cell_index
from .pic import Grid
from .state import ParticleEnsemble

CHECKPOINT_MAGIC = b"SBTM"
CHECKPOINT_VERSION = 1

# ---------------------------------------------------------------------------
# network
# ---------------------------------------------------------------------------


def softsign(z):
    return z / (1.0 + np.abs(z))


class MlpScoreNet:
    """s(u) = W2 softsign(W1 u + b1) + b2 with u = [x; v] in R^(1+dv)."""

    def __init__(self, dv: int, hidden: int):
        self.dv = dv
        self.hidden = hidden
        d_in = 1 + dv
        self.W1 = np.zeros((hidden, d_in))
        self.b1 = np.zeros(hidden)
        self.W2 = np.zeros((dv, hidden))
        self.b2 = np.zeros(dv)

    @classmethod
    def init_glorot(cls, dv: int, hidden: int, rng: np.random.Generator) -> "MlpScoreNet":
        net = cls(dv, hidden)
        d_in = 1 + dv
        lim1 = np.sqrt(6.0 / (d_in + hidden))
        lim2 = np.sqrt(6.0 / (hidden + dv))
        net.W1 = rng.uniform(-lim1, lim1, size=(hidden, d_in))
        net.W2 = rng.uniform(-lim2, lim2, size=(dv, hidden))
        return net

    def params(self) -> list:
        return [self.W1, self.b1, self.W2, self.b2]

    def copy_params(self) -> list:
        return [p.copy() for p in self.params()]

    def set_params(self, params: list) -> None:
        self.W1[...], self.b1[...], self.W2[...], self.b2[...] = params

    @property
    def n_params(self) -> int:
        return sum(p.size for p in self.params())


def _stack_inputs(x, v) -> np.ndarray:
    v = np.atleast_2d(np.asarray(v, dtype=np.float64))
    x = np.broadcast_to(np.asarray(x, dtype=np.float64), (v.shape[0],))
    return np.column_stack([x, v])


def mlp_forward(net: MlpScoreNet, x, v) -> np.ndarray:
    """Evaluate the network at (x, v); accepts single points or arrays."""
    U = _stack_inputs(x, v)
    Z = U @ net.W1.T + net.b1
    A = softsign(Z)
    S = A @ net.W2.T + net.b2
    return S[0] if np.ndim(v) == 1 else S


def _sigma_prime(Z):
    inv = 1.0 / (1.0 + np.abs(Z))
    return inv * inv


def exact_divergence(net: MlpScoreNet, x, v):
    """Exact div_v s = sum_h sigma'(z_h) * sum_i W2[i,h] W1[h,1+i]."""
    U = _stack_inputs(x, v)
    SP = _sigma_prime(U @ net.W1.T + net.b1)
    g = np.einsum("ih,hi->h", net.W2, net.W1[:, 1:])
    out = SP @ g
    return float(out[0]) if np.ndim(v) == 1 else out


def hutchinson_divergence(net: MlpScoreNet, x, v, z):
    """z^T (grad_v s) z from one forward-mode pass; z has entries in {-1, +1}.

    For this architecture the Jacobian-vector product is
    (grad_v s) z = W2 [sigma'(Z) * (W1_v z)], so the estimate reduces to
    sum_h (W2^T z)_h (W1_v z)_h sigma'(z_h). A (n, dv) z gives per-particle probes.
    """
    U = _stack_inputs(x, v)
    SP = _sigma_prime(U @ net.W1.T + net.b1)
    z = np.asarray(z, dtype=np.float64)
    if z.ndim == 1:
        coef = (net.W2.T @ z) * (net.W1[:, 1:] @ z)
        out = SP @ coef
    else:
        t = z @ net.W1[:, 1:].T
        r = z @ net.W2
        out = np.einsum("ph,ph,ph->p", SP, r, t)
    return float(out[0]) if np.ndim(v) == 1 else out


# ---------------------------------------------------------------------------
# fused loss/gradient kernels (single pass over particles, no big temporaries)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _ism_kernel_shared(X, V, w, W1, b1, W2, b2, coef):
    """ISM loss and gradients for a divergence term sum_h coef_h sigma'(z_ph).

    Returns the through-activation gradients plus Phi_h = sum_p w_p sigma'(z_ph);
    the caller adds the coef-dependence (exact or shared-probe Hutchinson).
    """
    n, dvd = V.shape
    H = W1.shape[0]
    gW1 = np.zeros_like(W1)
    gb1 = np.zeros_like(b1)
    gW2 = np.zeros_like(W2)
    gb2 = np.zeros_like(b2)
    Phi = np.zeros(H)
    loss = 0.0
    z = np.empty(H)
    a = np.empty(H)
    sp = np.empty(H)
    s = np.empty(dvd)
    gs = np.empty(dvd)
    for p in range(n):
        xp = X[p]
        wp = w[p]
        for h in range(H):
            acc = b1[h] + W1[h, 0] * xp
            for k in range(dvd):
                acc += W1[h, 1 + k] * V[p, k]
            z[h] = acc
            inv = 1.0 / (1.0 + abs(acc))
            a[h] = acc * inv
            sp[h] = inv * inv
        s2 = 0.0
        for i in range(dvd):
            acc = b2[i]
            for h in range(H):
                acc += W2[i, h] * a[h]
            s[i] = acc
            s2 += acc * acc
            gs[i] = 2.0 * wp * acc
        div = 0.0
        for h in range(H):
            div += coef[h] * sp[h]
        loss += wp * (s2 + 2.0 * div)
        for i in range(dvd):
            gb2[i] += gs[i]
        for h in range(H):
            da = 0.0
            for i in range(dvd):
                da += gs[i] * W2[i, h]
                gW2[i, h] += gs[i] * a[h]
            zh = z[h]
            inv = 1.0 / (1.0 + abs(zh))
            spp = -2.0 * np.sign(zh) * inv * inv * inv
            d = da * sp[h] + 2.0 * wp * coef[h] * spp
            Phi[h] += wp * sp[h]
            gb1[h] += d
            gW1[h, 0] += d * xp
            for k in range(dvd):
                gW1[h, 1 + k] += d * V[p, k]
    return loss, gW1, gb1, gW2, gb2, Phi


@njit(cache=True)
def _ism_kernel_perparticle(X, V, w, W1, b1, W2, b2, Zr):
    """ISM loss and full gradients with one Rademacher probe per particle."""
    n, dvd = V.shape
    H = W1.shape[0]
    gW1 = np.zeros_like(W1)
    gb1 = np.zeros_like(b1)
    gW2 = np.zeros_like(W2)
    gb2 = np.zeros_like(b2)
    loss = 0.0
    z = np.empty(H)
    a = np.empty(H)
    sp = np.empty(H)
    t = np.empty(H)
    r = np.empty(H)
    s = np.empty(dvd)
    gs = np.empty(dvd)
    for p in range(n):
        xp = X[p]
        wp = w[p]
        for h in range(H):
            acc = b1[h] + W1[h, 0] * xp
            th = 0.0
            rh = 0.0
            for k in range(dvd):
                acc += W1[h, 1 + k] * V[p, k]
                th += W1[h, 1 + k] * Zr[p, k]
                rh += W2[k, h] * Zr[p, k]
            z[h] = acc
            t[h] = th
            r[h] = rh
            inv = 1.0 / (1.0 + abs(acc))
            a[h] = acc * inv
            sp[h] = inv * inv
        s2 = 0.0
        for i in range(dvd):
            acc = b2[i]
            for h in range(H):
                acc += W2[i, h] * a[h]
            s[i] = acc
            s2 += acc * acc
            gs[i] = 2.0 * wp * acc
        div = 0.0
        for h in range(H):
            div += r[h] * t[h] * sp[h]
        loss += wp * (s2 + 2.0 * div)
        for i in range(dvd):
            gb2[i] += gs[i]
        for h in range(H):
            da = 0.0
            for i in range(dvd):
                da += gs[i] * W2[i, h]
                gW2[i, h] += gs[i] * a[h] + 2.0 * wp * sp[h] * t[h] * Zr[p, i]
            zh = z[h]
            inv = 1.0 / (1.0 + abs(zh))
            spp = -2.0 * np.sign(zh) * inv * inv * inv
            d = da * sp[h] + 2.0 * wp * r[h] * t[h] * spp
            gb1[h] += d
            gW1[h, 0] += d * xp
            for k in range(dvd):
                gW1[h, 1 + k] += d * V[p, k] + 2.0 * wp * sp[h] * r[h] * Zr[p, k]
    return loss, gW1, gb1, gW2, gb2


@njit(cache=True)
def _mse_kernel(X, V, w, W1, b1, W2, b2, target, inv_wsum):
    """Weighted score MSE sum_p w_p |s_p - y_p|^2 / sum_p w_p and its gradients."""
    n, dvd = V.shape
    H = W1.shape[0]
    gW1 = np.zeros_like(W1)
    gb1 = np.zeros_like(b1)
    gW2 = np.zeros_like(W2)
    gb2 = np.zeros_like(b2)
    loss = 0.0
    z = np.empty(H)
    a = np.empty(H)
    sp = np.empty(H)
    gs = np.empty(dvd)
    for p in range(n):
        xp = X[p]
        wp = w[p] * inv_wsum
        for h in range(H):
            acc = b1[h] + W1[h, 0] * xp
            for k in range(dvd):
                acc += W1[h, 1 + k] * V[p, k]
            z[h] = acc
            inv = 1.0 / (1.0 + abs(acc))
            a[h] = acc * inv
            sp[h] = inv * inv
        err2 = 0.0
        for i in range(dvd):
            acc = b2[i]
            for h in range(H):
                acc += W2[i, h] * a[h]
            e = acc - target[p, i]
            err2 += e * e
            gs[i] = 2.0 * wp * e
        loss += wp * err2
        for i in range(dvd):
            gb2[i] += gs[i]
        for h in range(H):
            da = 0.0
            for i in range(dvd):
                da += gs[i] * W2[i, h]
                gW2[i, h] += gs[i] * a[h]
            d = da * sp[h]
            gb1[h] += d
            gW1[h, 0] += d * xp
            for k in range(dvd):
                gW1[h, 1 + k] += d * V[p, k]
    return loss, gW1, gb1, gW2, gb2


def ism_loss_and_grad(net: MlpScoreNet, x, v, w, *, divergence: str = "hutchinson",
                      z=None):
    """Loss sum_p w_p [|s_p|^2 + 2 div_p] and its gradient in every parameter.

    divergence "exact" uses the closed-form trace; "hutchinson" needs z, either
    one shared (dv,) probe or per-particle (n, dv) probes.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    v = np.ascontiguousarray(v, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    if divergence == "exact":
        coef = np.einsum("ih,hi->h", net.W2, net.W1[:, 1:])
        loss, gW1, gb1, gW2, gb2, Phi = _ism_kernel_shared(
            x, v, w, net.W1, net.b1, net.W2, net.b2, coef)
        gW2 += 2.0 * Phi[None, :] * net.W1[:, 1:].T
        gW1[:, 1:] += 2.0 * Phi[:, None] * net.W2.T
    elif divergence == "hutchinson":
        if z is None:
            raise ValueError("hutchinson divergence needs a Rademacher draw z")
        z = np.asarray(z, dtype=np.float64)
        if z.ndim == 1:
            t = net.W1[:, 1:] @ z
            r = net.W2.T @ z
            loss, gW1, gb1, gW2, gb2, Phi = _ism_kernel_shared(
                x, v, w, net.W1, net.b1, net.W2, net.b2, r * t)
            gW2 += 2.0 * np.outer(z, t * Phi)
            gW1[:, 1:] += 2.0 * np.outer(r * Phi, z)
        else:
            loss, gW1, gb1, gW2, gb2 = _ism_kernel_perparticle(
                x, v, w, net.W1, net.b1, net.W2, net.b2,
                np.ascontiguousarray(z, dtype=np.float64))
    else:
        raise ValueError(f"unknown divergence mode: {divergence!r}")
    if not np.isfinite(loss):
        raise RuntimeError("training divergence")
    return loss, [gW1, gb1, gW2, gb2]


def mse_loss_and_grad(net: MlpScoreNet, x, v, w, target):
    x = np.ascontiguousarray(x, dtype=np.float64)
    v = np.ascontiguousarray(v, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    target = np.ascontiguousarray(target, dtype=np.float64)
    loss, gW1, gb1, gW2, gb2 = _mse_kernel(
        x, v, w, net.W1, net.b1, net.W2, net.b2, target, 1.0 / w.sum())
    if not np.isfinite(loss):
        raise RuntimeError("training divergence")
    return loss, [gW1, gb1, gW2, gb2]


# ---------------------------------------------------------------------------
# optimizer
# ---------------------------------------------------------------------------


class AdamW:
    """Adam with decoupled weight decay and bias correction."""

    def __init__(self, lr: float = 2e-4, betas=(0.9, 0.999), eps: float = 1e-8,
                 weight_decay: float = 1e-4):
        self.lr = lr
        self.betas = betas
        self.eps = eps
        self.weight_decay = weight_decay
        self.m = None
        self.v = None
        self.t = 0

    def step(self, params: list, grads: list) -> None:
        if self.m is None:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]
        b1, b2 = self.betas
        self.t += 1
        bc1 = 1.0 - b1 ** self.t
        bc2 = 1.0 - b2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            if self.weight_decay:
                p -= self.lr * self.weight_decay * p
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            p -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


# ---------------------------------------------------------------------------
# pretraining on the analytic score of the initial condition
# ---------------------------------------------------------------------------


@dataclass
class PretrainResult:
    final_mse: float
    steps: int
    converged: bool
    tol: float


def pretrain(net: MlpScoreNet, particles: ParticleEnsemble, analytic_score,
             *, L: float, rng: np.random.Generator, budget: int = 10000,
             batch: int = 4096, lr: float = 1e-3, weight_decay: float = 1e-4,
             tol: float | None = None, eval_every: int = 100) -> PretrainResult:
    """Minibatch-AdamW fit of the network to a known score until the weighted
    MSE falls below tol = 1e-3 * mean|s*|^2 or the step budget runs out.

    Budget exhaustion is not fatal; the caller logs the warning.
    """
    xn = particles.x / L
    v = particles.v
    w = particles.w
    target = np.asarray(analytic_score(particles.x, particles.v), dtype=np.float64)
    wsum = w.sum()
    if tol is None:
        tol = 1e-3 * float(np.sum(w * np.einsum("ij,ij->i", target, target)) / wsum)
    opt = AdamW(lr=lr, weight_decay=weight_decay)

    def full_mse() -> float:
        err = mlp_forward(net, xn, v) - target
        return float(np.sum(w * np.einsum("ij,ij->i", err, err)) / wsum)

    mse = full_mse()
    steps = 0
    n = particles.n
    while mse >= tol and steps < budget:
        for lo in range(0, n, batch):
            if steps >= budget:
                break
            if lo == 0:
                perm = rng.permutation(n)
            sl = perm[lo:lo + batch]
            _, grads = mse_loss_and_grad(net, xn[sl], v[sl], w[sl], target[sl])
            opt.step(net.params(), grads)
            steps += 1
            if steps % eval_every == 0:
                mse = full_mse()
                if mse < tol:
                    break
        else:
            continue
        break
    mse = full_mse()
    return PretrainResult(final_mse=mse, steps=steps, converged=mse < tol, tol=tol)


# ---------------------------------------------------------------------------
# blob (KDE) estimator
# ---------------------------------------------------------------------------


@njit(cache=True)
def _blob_cell(xt, vt, xn, vn, wn, eta, L, h, out, den_out):
    """Localized Gaussian-KDE score for targets against a neighbor list.

    score_i = (mu_i - v_i) / h^2 with mu_i the psi*K_h-weighted neighbor mean;
    the Gaussian normalization constant cancels in the ratio.
    """
    nt = xt.shape[0]
    nn = xn.shape[0]
    dv = vt.shape[1]
    inv2h2 = 0.5 / (h * h)
    mu = np.empty(dv)
    for i in range(nt):
        den = 0.0
        for k in range(dv):
            mu[k] = 0.0
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
            q2 = 0.0
            for k in range(dv):
                d = vt[i, k] - vn[j, k]
                q2 += d * d
            kw = wn[j] * psi * np.exp(-q2 * inv2h2)
            den += kw
            for k in range(dv):
                mu[k] += kw * vn[j, k]
        den_out[i] = den
        if den > 0.0:
            for k in range(dv):
                out[i, k] = (mu[k] / den - vt[i, k]) / (h * h)


def silverman_bandwidth(v: np.ndarray) -> float:
    """h = sigma_hat * (4 / ((dv + 2) m))^(1 / (dv + 4)) with the per-component
    sample std averaged over components; falls back to 1.0 when degenerate
    (a degenerate neighborhood yields zero score for any bandwidth)."""
    m, dv = v.shape
    sigma = float(np.mean(np.std(v, axis=0, ddof=1))) if m > 1 else 0.0
    h = sigma * (4.0 / ((dv + 2) * m)) ** (1.0 / (dv + 4))
    return h if h > 0 and np.isfinite(h) else 1.0


def blob_score(particles: ParticleEnsemble, cell_index: CellIndex, grid: Grid,
               bandwidth: float | None = None) -> np.ndarray:
    """KDE score at every particle; bandwidth=None applies Silverman's rule per cell."""
    x, v, w = particles.x, particles.v, particles.w
    scores = np.zeros_like(v)
    for c in range(cell_index.M):
        tgt = cell_index.bins[c]
        if tgt.size == 0:
            continue
        nbr = cell_index.neighbors(c)
        h = silverman_bandwidth(v[nbr]) if bandwidth is None else float(bandwidth)
        out = np.zeros((tgt.size, v.shape[1]))
        den = np.zeros(tgt.size)
        _blob_cell(x[tgt], v[tgt], x[nbr], v[nbr], w[nbr], grid.eta, grid.L, h,
                   out, den)
        bad = ~(den > 0.0) | ~np.all(np.isfinite(out), axis=1)
        if np.any(bad):
            idx = int(tgt[np.argmax(bad)])
            raise ValueError(f"isolated particle in velocity space (particle {idx})")
        scores[tgt] = out
    return scores


class BlobEstimator:
    """Stateless KDE score provider; update() is a no-op, estimate() recomputes."""

    def __init__(self, grid: Grid, bandwidth: float | None = None):
        self.grid = grid
        self.bandwidth = bandwidth

    def estimate(self, particles: ParticleEnsemble, cell_index: CellIndex | None = None):
        if cell_index is None:
            cell_index = build_cell_index(particles, self.grid)
        return blob_score(particles, cell_index, self.grid, self.bandwidth)

    def update(self, particles: ParticleEnsemble, cell_index: CellIndex | None = None):
        pass


# ---------------------------------------------------------------------------
# SBTM estimator
# ---------------------------------------------------------------------------


def sbtm_update(net: MlpScoreNet, optimizer: AdamW, particles: ParticleEnsemble,
                K: int, *, L: float, rng: np.random.Generator,
                divergence: str = "hutchinson", rademacher: str = "shared",
                warnings: list | None = None) -> list:
    """K full-batch ISM gradient steps, one fresh Rademacher draw per step.

    A non-finite loss restores the pre-step parameters and halves the learning
    rate for the remainder of this update; repeated failure past a floor is a
    hard training-divergence error. Returns the per-step losses.
    """
    xn = particles.x / L
    base_lr = optimizer.lr
    losses = []
    try:
        for _ in range(K):
            if divergence == "hutchinson":
                size = (particles.dv,) if rademacher == "shared" \
                    else (particles.n, particles.dv)
                z = rng.integers(0, 2, size=size).astype(np.float64) * 2.0 - 1.0
            else:
                z = None
            while True:
                saved = net.copy_params()
                try:
                    loss, grads = ism_loss_and_grad(net, xn, particles.v, particles.w,
                                                    divergence=divergence, z=z)
                    optimizer.step(net.params(), grads)
                    if all(np.all(np.isfinite(p)) for p in net.params()):
                        losses.append(loss)
                        break
                    raise RuntimeError("training divergence")
                except RuntimeError:
                    net.set_params(saved)
                    optimizer.lr *= 0.5
                    if warnings is not None:
                        warnings.append(
                            f"training divergence: learning rate halved to {optimizer.lr:g}")
                    if optimizer.lr < 1e-12:
                        raise
    finally:
        optimizer.lr = base_lr
    return losses


class SbtmEstimator:
    """Neural score provider: estimate() is a forward pass, update() trains."""

    def __init__(self, net: MlpScoreNet, L: float, K: int, rng: np.random.Generator,
                 *, lr: float = 2e-4, weight_decay: float = 1e-4,
                 divergence: str = "hutchinson", rademacher: str = "shared"):
        self.net = net
        self.L = L
        self.K = K
        self.rng = rng
        self.divergence = divergence
        self.rademacher = rademacher
        self.optimizer = AdamW(lr=lr, weight_decay=weight_decay)
        self.warnings: list[str] = []

    def estimate(self, particles: ParticleEnsemble, cell_index=None) -> np.ndarray:
        return mlp_forward(self.net, particles.x / self.L, particles.v)

    def update(self, particles: ParticleEnsemble, cell_index=None) -> None:
        sbtm_update(self.net, self.optimizer, particles, self.K, L=self.L,
                    rng=self.rng, divergence=self.divergence,
                    rademacher=self.rademacher, warnings=self.warnings)

    def pretrain(self, particles: ParticleEnsemble, analytic_score, *,
                 budget: int = 10000, batch: int = 4096, lr: float = 1e-3) -> PretrainResult:
        result = pretrain(self.net, particles, analytic_score, L=self.L,
                          rng=self.rng, budget=budget, batch=batch, lr=lr,
                          weight_decay=self.optimizer.weight_decay)
        if not result.converged:
            self.warnings.append(
                f"pretraining budget exhausted: mse {result.final_mse:.3e} "
                f"above tol {result.tol:.3e} after {result.steps} steps")
        return result


# ---------------------------------------------------------------------------
# checkpoint I/O (flat binary, little-endian)
# ---------------------------------------------------------------------------


def save_checkpoint(net: MlpScoreNet, path: str) -> None:
    """Layout: magic "SBTM", version u32, H u32, dv u32, then W1 (row-major),
    b1, W2 (row-major), b2 as little-endian float64."""
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<III", CHECKPOINT_VERSION, net.hidden, net.dv))
        for p in net.params():
            fh.write(np.ascontiguousarray(p, dtype="<f8").tobytes())


def load_checkpoint(path: str) -> MlpScoreNet:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != CHECKPOINT_MAGIC:
            raise ValueError(f"bad checkpoint magic: {magic!r}")
        version, hidden, dv = struct.unpack("<III", fh.read(12))
        if version != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version: {version}")
        net = MlpScoreNet(dv, hidden)
        for p in net.params():
            buf = fh.read(p.size * 8)
            if len(buf) != p.size * 8:
                raise ValueError("truncated checkpoint")
            p[...] = np.frombuffer(buf, dtype="<f8").reshape(p.shape)
        if fh.read(1):
            raise ValueError("trailing bytes in checkpoint")
    return net
