"""Independent pseudospectral integrator for the dispersive flow.

Modewise the equation reads

    d/dt u_hat(n) = i n |n| u_hat(n) - i n (u^2)_hat(n),

and the linear phase is integrated exactly (integrating factor), so the
only discretization errors are the RK4 step on the slow nonlinear part and
the dealiasing cut.  This module never touches the coordinate pipeline;
it exists to cross-validate it.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure
from .hardy import Potential
from .lax import spectrum

PHASE_BUDGET = 50.0


@dataclass
class IntegratorConfig:
    grid_size: int = 256
    dt: float = 1e-3
    T: float = 1.0
    dealias_fraction: float = 2.0 / 3.0
    store_every: int = 1

    def __post_init__(self):
        g = int(self.grid_size)
        if g < 4 or g & (g - 1):
            raise ValueError("grid_size must be a power of two >= 4")
        if not 0 < self.dealias_fraction <= 1:
            raise ValueError("dealias_fraction must lie in (0, 1]")
        if self.dt <= 0 or self.T < 0:
            raise ValueError("need dt > 0 and T >= 0")
        if int(self.store_every) < 1:
            raise ValueError("store_every must be >= 1")


class Trajectory:
    """Sampled spectral states: times[i] pairs with coeffs[i] in np.fft layout."""

    def __init__(self, times, coeffs, s, band):
        self.times = np.asarray(times, dtype=float)
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.s = float(s)
        self.band = int(band)

    def __len__(self):
        return len(self.times)

    def potential_at(self, i, N=None, drop_tol=1e-13):
        """The i-th sample as a real potential on the band |n| <= N.

        With N omitted the dealias band is scanned and the declared width
        shrinks to the retained support, so downstream truncation checks
        see the actual content rather than the grid.
        """
        trim = N is None
        N = self.band if trim else int(N)
        c = self.coeffs[i]
        grid = len(c)
        coeffs = {}
        for n in range(1, N + 1):
            v = complex(c[n % grid])
            if abs(v) > drop_tol:
                coeffs[n] = v
        if trim:
            N = max(coeffs) if coeffs else 1
        return Potential(self.s, max(N, 1), coeffs, real=True)


def _dealias_mask(grid, fraction):
    n = np.fft.fftfreq(grid, d=1.0 / grid).astype(int)
    keep = int(np.floor((grid // 2) * fraction))
    return np.abs(n) <= keep, n, keep


def integrate(u0, cfg=None):
    """Integrating-factor RK4 trajectory from a real mean-zero potential.

    The grid must resolve the quadratic interactions of the retained band
    (grid_size >= 4N); the mean mode has zero right-hand side and is pinned
    to 0.  A warning flags steps asking the top retained mode to rotate
    through more than PHASE_BUDGET radians, where the RK4 treatment of the
    nonlinear term loses accuracy even though the linear phase is exact.
    """
    if cfg is None:
        cfg = IntegratorConfig()
    if not u0.real:
        raise ValueError("direct integration needs a real potential")
    grid = int(cfg.grid_size)
    if grid < 4 * u0.N:
        raise ValueError("grid %d cannot dealias band N=%d (need >= 4N)" % (grid, u0.N))
    mask, n, keep = _dealias_mask(grid, cfg.dealias_fraction)
    if cfg.dt * (grid // 2) ** 2 > PHASE_BUDGET:
        warnings.warn("dt=%g spins the top mode %.0f radians per step"
                      % (cfg.dt, cfg.dt * (grid // 2) ** 2), stacklevel=2)

    c = np.zeros(grid, dtype=complex)
    for m, v in u0.nonzero_coeffs().items():
        c[m % grid] = v

    lin = 1j * n * np.abs(n)

    def rhs(state):
        phys = np.fft.ifft(state * grid)
        sq = np.fft.fft(np.real(phys) ** 2) / grid
        sq *= mask
        out = -1j * n * sq
        out[0] = 0.0
        return out

    steps = int(round(cfg.T / cfg.dt))
    dt = cfg.T / steps if steps else cfg.dt
    E = np.exp(lin * dt / 2.0)
    E2 = E * E
    times = [0.0]
    stored = [c.copy()]
    for step in range(steps):
        k1 = rhs(c)
        k2 = rhs(E * (c + dt / 2.0 * k1))
        k3 = rhs(E * c + dt / 2.0 * k2)
        k4 = rhs(E2 * c + dt * E * k3)
        c = E2 * c + dt / 6.0 * (E2 * k1 + 2.0 * E * (k2 + k3) + k4)
        c[0] = 0.0
        if (step + 1) % cfg.store_every == 0 or step == steps - 1:
            if not np.all(np.isfinite(c)):
                raise NumericalFailure("non-finite state at t=%.6f" % ((step + 1) * dt))
            times.append((step + 1) * dt)
            stored.append(c.copy())
    return Trajectory(times, stored, u0.s, keep)


def isospectral_audit(traj, M, k_max=None):
    """Largest eigenvalue drift along the trajectory.

    Returns max over stored samples and n <= k_max (default K_use) of
    |lambda_n(u(t)) - lambda_n(u(0))|.  Conservation of the whole spectrum
    is the structural identity the integrator never imposes, which makes
    this the strongest independent check available.
    """
    sd0 = spectrum(traj.potential_at(0), M, k_use=k_max)
    k_top = sd0.K_use
    lam0 = sd0.lambdas[:k_top + 1]
    drift = 0.0
    for i in range(1, len(traj)):
        sd = spectrum(traj.potential_at(i), M, k_use=k_top)
        drift = max(drift, float(np.max(np.abs(sd.lambdas[:k_top + 1] - lam0))))
    return drift


def residual(traj):
    """Defect of the stored samples in the equation, in the H^{s-2} norm.

    Central differences in time at interior samples against
    i n |n| u_hat(n) - i n (u^2)_hat(n); the quadratic term is evaluated on
    the trajectory's own dealiased band.  Returns the max over interior
    samples; at least 3 samples are required.
    """
    if len(traj) < 3:
        raise ValueError("need at least 3 samples for a central difference")
    grid = traj.coeffs.shape[1]
    mask, n, _ = _dealias_mask(grid, 1.0)
    band_mask = np.abs(n) <= traj.band
    weight = np.maximum(1.0, np.abs(n)) ** (traj.s - 2.0)
    worst = 0.0
    for i in range(1, len(traj) - 1):
        dt_back = traj.times[i] - traj.times[i - 1]
        dt_fwd = traj.times[i + 1] - traj.times[i]
        if abs(dt_fwd - dt_back) > 1e-12 * max(dt_fwd, dt_back):
            raise ValueError("residual needs uniformly spaced samples")
        du = (traj.coeffs[i + 1] - traj.coeffs[i - 1]) / (dt_back + dt_fwd)
        c = traj.coeffs[i]
        phys = np.fft.ifft(c * grid)
        sq = np.fft.fft(np.real(phys) ** 2) / grid * band_mask
        field = 1j * n * np.abs(n) * c - 1j * n * sq
        defect = (du - field) * band_mask
        worst = max(worst, float(np.sqrt(np.sum(weight ** 2 * np.abs(defect) ** 2))))
    return worst
