"""Continuous-time random walk realizing the fractional transport dynamics.

Walkers wait for Mittag-Leffler distributed times (survival
E_alpha(-(t/tau)^alpha), the heavy-tailed law whose Laplace transform is
exactly 1/(1 + (tau s)^alpha)), then scatter, jump, or get absorbed with
probabilities (xi_s, 1 - xi_t, xi_a).  Scattering off a truncated kernel
column that dips negative samples |p| and carries a signed weight, so
weighted histograms converge to the signed-kernel transport solution.

Simulation is deterministic for a fixed seed regardless of how work is
chunked: every block of walkers owns a counter-based Philox stream keyed
by (seed, block index).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, ScaleError
from .legendre import phase_sample_batch
from .transport import DensityField

__all__ = [
    "CTRWParams",
    "WalkerState",
    "CTRWResult",
    "map_params",
    "sample_waiting_time",
    "step",
    "simulate_density",
]

_BLOCK = 1 << 17


@dataclass(frozen=True)
class CTRWParams:
    """Per-event probabilities, step length, and waiting-time law."""

    tau: float
    xi_t: float
    xi_s: float
    r: float
    alpha: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.xi_s <= self.xi_t < 1.0):
            raise DomainError(
                f"require 0 < xi_s <= xi_t < 1, got xi_s={self.xi_s}, xi_t={self.xi_t}"
            )
        if self.r <= 0 or self.tau <= 0:
            raise DomainError("jump length r and time scale tau must be positive")
        if not (0.0 < self.alpha <= 1.0):
            raise DomainError(f"alpha must be in (0, 1], got {self.alpha}")

    @property
    def xi_a(self):
        return self.xi_t - self.xi_s


def map_params(params, tau):
    """CTRW constants reproducing a medium's rates at time scale tau.

    xi_t = sigma_t tau^alpha, xi_s = sigma_s tau^alpha,
    r = v tau^alpha / (1 - xi_t).
    """
    xi_t = params.sigma_t * tau**params.alpha
    if xi_t >= 1.0:
        raise ScaleError(
            f"sigma_t * tau^alpha = {xi_t:.3f} >= 1; decrease the time scale tau"
        )
    xi_s = params.sigma_s * tau**params.alpha
    r = params.v * tau**params.alpha / (1.0 - xi_t)
    return CTRWParams(tau=float(tau), xi_t=float(xi_t), xi_s=float(xi_s),
                      r=float(r), alpha=params.alpha)


def sample_waiting_time(alpha, tau, rng, n=None):
    """Draw Mittag-Leffler waiting times with survival E_alpha(-(t/tau)^alpha).

    Uses the exact inversion T = -tau ln(U) [sin(a pi)/tan(a pi V)
    - cos(a pi)]^(1/a) with independent uniforms U, V; alpha = 1
    degenerates to Exponential(mean tau).
    """
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must be in (0, 1], got {alpha}")
    if tau <= 0:
        raise DomainError("tau must be positive")
    squeeze = n is None
    size = 1 if squeeze else int(n)
    u = rng.random(size)
    u[u == 0.0] = np.finfo(float).tiny
    if alpha == 1.0:
        t = -tau * np.log(u)
    else:
        v = np.clip(rng.random(size), 1e-300, 1.0 - 1e-16)
        factor = np.sin(alpha * np.pi) / np.tan(alpha * np.pi * v) - np.cos(alpha * np.pi)
        t = -tau * np.log(u) * factor ** (1.0 / alpha)
    return float(t[0]) if squeeze else t


@dataclass(frozen=True)
class WalkerState:
    """One walker: position, direction, elapsed clock, alive flag.

    ``weight`` carries the signed importance factor accumulated by
    scattering off kernel columns with negative lobes; it stays exactly 1
    while the sampled columns are non-negative.
    """

    x: float
    mu: float
    clock: float
    alive: bool = True
    weight: float = 1.0


def step(w, cp, pf, rng):
    """Advance a walker by one renewal event.

    The clock advances by a sampled waiting time, then exactly one of
    three things happens: with probability xi_s the direction is resampled
    from the kernel column (position unchanged), with probability
    1 - xi_t the walker moves by mu * r (direction unchanged), and with
    probability xi_a it is absorbed.
    """
    if not w.alive:
        raise DomainError("cannot step a dead walker")
    wait = sample_waiting_time(cp.alpha, cp.tau, rng)
    clock = w.clock + wait
    u = rng.random()
    if u < cp.xi_s:
        mu_new, wfac = phase_sample_batch(pf, np.array([w.mu]), rng)
        return replace(w, mu=float(mu_new[0]), clock=clock,
                       weight=w.weight * float(wfac[0]))
    if u < cp.xi_t:
        return replace(w, clock=clock, alive=False)
    return replace(w, x=w.x + w.mu * cp.r, clock=clock)


@dataclass(frozen=True)
class CTRWResult:
    """Histogram estimate plus survival fractions and per-bin errors."""

    field: DensityField
    survival: np.ndarray
    stderr: np.ndarray


def simulate_density(n_walkers, t_obs, x_grid, params, tau, seed, pf=None):
    """Monte Carlo estimate of the energy density on a bin grid.

    Walkers start at the origin with isotropic direction and evolve by the
    renewal dynamics; a walker's position at an observation time is its
    position after the last event at or before that time.  Returned values
    are weighted bin densities (weights over n_walkers times bin width),
    directly comparable to the deterministic energy density; ``survival``
    estimates E_alpha(-sigma_a t^alpha).

    Parameters
    ----------
    n_walkers : int
    t_obs : sequence of float
        Increasing observation times.
    x_grid : array_like
        Uniform bin centers.
    params : MediumParams
    tau : float
        Renewal time scale; sigma_t tau^alpha must stay below 1.
    seed : int
        Stream seed; output is bit-reproducible for fixed
        (seed, n_walkers, grid) regardless of chunking or thread count.
    pf : PhaseFunction, optional
        Defaults to the medium's kernel.
    """
    if n_walkers < 1:
        raise DomainError("need at least one walker")
    cp = map_params(params, tau)
    pf = pf or params.phase
    t_obs = np.atleast_1d(np.asarray(t_obs, dtype=float))
    if np.any(t_obs <= 0) or np.any(np.diff(t_obs) <= 0):
        raise DomainError("observation times must be positive and increasing")
    centers = np.asarray(x_grid, dtype=float)
    dx = centers[1] - centers[0]
    edges = np.concatenate((centers - 0.5 * dx, [centers[-1] + 0.5 * dx]))

    hist_w = np.zeros((t_obs.size, centers.size))
    hist_w2 = np.zeros_like(hist_w)
    alive_w = np.zeros(t_obs.size)

    n_blocks = (n_walkers + _BLOCK - 1) // _BLOCK
    for block in range(n_blocks):
        m = min(_BLOCK, n_walkers - block * _BLOCK)
        rng = np.random.Generator(np.random.Philox(key=[seed, block]))
        snap_x, snap_w, snap_alive = _run_block(m, t_obs, cp, pf, rng)
        for it in range(t_obs.size):
            live = snap_alive[it]
            if np.any(live):
                idx = np.searchsorted(edges, snap_x[it][live], side="right") - 1
                ok = (idx >= 0) & (idx < centers.size)
                np.add.at(hist_w[it], idx[ok], snap_w[it][live][ok])
                np.add.at(hist_w2[it], idx[ok], snap_w[it][live][ok] ** 2)
                alive_w[it] += live.sum()

    norm = n_walkers * dx
    field = DensityField(
        x_grid=centers,
        times=tuple(t_obs),
        values=hist_w / norm,
        method="ctrw",
        params_fingerprint=params.fingerprint(None),
    )
    return CTRWResult(field=field, survival=alive_w / n_walkers,
                      stderr=np.sqrt(hist_w2) / norm)


def _run_block(m, t_obs, cp, pf, rng):
    """Vectorized renewal loop for one walker block."""
    x = np.zeros(m)
    mu = rng.uniform(-1.0, 1.0, size=m)
    w = np.ones(m)
    clock = np.zeros(m)
    alive = np.ones(m, dtype=bool)
    t_end = float(t_obs[-1])

    n_t = t_obs.size
    snap_x = np.zeros((n_t, m))
    snap_w = np.zeros((n_t, m))
    snap_alive = np.zeros((n_t, m), dtype=bool)

    active = alive & (clock <= t_end)
    while np.any(active):
        idx = np.flatnonzero(active)
        wait = sample_waiting_time(cp.alpha, cp.tau, rng, n=idx.size)
        new_clock = clock[idx] + wait
        # snapshot observation times crossed by this waiting interval;
        # the recorded position is the pre-event (frozen) state
        for it, t_o in enumerate(t_obs):
            cidx = idx[(clock[idx] <= t_o) & (new_clock > t_o)]
            snap_x[it, cidx] = x[cidx]
            snap_w[it, cidx] = w[cidx]
            snap_alive[it, cidx] = True
        clock[idx] = new_clock

        u = rng.random(idx.size)
        scatter = u < cp.xi_s
        absorb = (u >= cp.xi_s) & (u < cp.xi_t)
        sc_idx = idx[scatter]
        if sc_idx.size:
            mu_new, wfac = phase_sample_batch(pf, mu[sc_idx], rng)
            mu[sc_idx] = mu_new
            w[sc_idx] *= wfac
        mv_idx = idx[~scatter & ~absorb]
        x[mv_idx] += mu[mv_idx] * cp.r
        alive[idx[absorb]] = False
        active = alive & (clock <= t_end)
    return snap_x, snap_w, snap_alive
