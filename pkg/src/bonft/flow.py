"""Linear evolution in the transformed coordinates and numerical inversion.

The flow in coordinates is exactly solvable: every zeta_n spins at the
constant rate omega_n determined by the initial actions, so a trajectory is
one forward transform, a phase multiplication per sample time, and one
Newton inversion per sample back to a potential.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InversionFailure
from .birkhoff import BirkhoffState, birkhoff_forward
from .hardy import Potential, sobolev_norm


@dataclass
class FlowConfig:
    t_grid: tuple = (0.0, 0.5, 1.0)
    newton: dict = field(default_factory=lambda: {
        "max_iter": 25, "tol": 1e-12, "fd_step": 1e-6})
    lax: dict = field(default_factory=dict)  # {"M": ..., "K_use": ...}
    warm_start: bool = False

    def __post_init__(self):
        self.t_grid = tuple(float(t) for t in self.t_grid)
        if not all(np.isfinite(self.t_grid)):
            raise ValueError("non-finite sample times")
        if not self.newton.get("tol", 1e-12) > 0:
            raise ValueError("Newton tolerance must be positive")


def frequency_shifts(z):
    """The affine parts (Omega_n)_{n>=1} and (Omega_{-n})_{n>=1} of the frequencies.

    Omega_n = -2 sum_{k<=n} k zeta_{-k} zeta_k - 2n sum_{k>n} zeta_{-k} zeta_k
    and Omega_{-n} = -Omega_n.  Kept separate from the n^2 parts so that
    frequency differences of nearby states can be formed without cancelling
    large integers against each other.
    """
    prod = z.minus * z.plus  # zeta_{-k} zeta_k, k = 1..n_modes
    n_modes = z.n_modes
    ks = np.arange(1, n_modes + 1, dtype=float)
    weighted = np.cumsum(ks * prod)
    tails = np.concatenate((np.cumsum(prod[::-1])[::-1][1:], [0.0]))
    omega_plus = -2.0 * weighted - 2.0 * ks * tails
    if z.real_flag:
        omega_plus = omega_plus.real
    return omega_plus, -omega_plus


def frequencies(z):
    """Two-sided frequencies omega_n = sign(n) n^2 + Omega_n(z).

    Returns (omega at indices 1..n_modes, omega at indices -1..-n_modes).
    Real states give real arrays; the modulus-preserving rotation of the
    flow needs exactly these numbers.
    """
    shift_plus, shift_minus = frequency_shifts(z)
    ns = np.arange(1, z.n_modes + 1, dtype=float)
    return ns ** 2 + shift_plus, -(ns ** 2) + shift_minus


def evolve(z0, t):
    """Flow for time t: zeta_n(t) = zeta_n(0) exp(i t omega_n(z0)), both sides."""
    om_plus, om_minus = frequencies(z0)
    t = float(t)
    plus = z0.plus * np.exp(1j * t * om_plus)
    minus = z0.minus * np.exp(1j * t * om_minus)
    out = BirkhoffState(z0.s, plus, minus, real_flag=z0.real_flag)
    out.diagnostics = z0.diagnostics
    return out


def _coords_to_potential(x, s, n_modes):
    coeffs = {n: x[2 * (n - 1)] + 1j * x[2 * (n - 1) + 1] for n in range(1, n_modes + 1)}
    coeffs = {n: v for n, v in coeffs.items() if v != 0}
    return Potential(s, n_modes, coeffs, real=True)


def _residual(u, target, M, n_modes):
    z = birkhoff_forward(u, M=M, k_use=n_modes)
    diff = z.plus - target.plus
    out = np.empty(2 * n_modes)
    out[0::2] = diff.real
    out[1::2] = diff.imag
    return out


def invert(target, cfg=None, initial=None):
    """Recover the real potential mapping to the target coordinates.

    Newton iteration on the truncated forward map over the 2 N_b real
    degrees of freedom u_hat(1..N_b), Jacobian by central differences with
    per-coordinate step fd_step * max(1, |x_j|); the starting point inverts
    the differential at zero, u_hat(n) = -sqrt(n) zeta_n, unless an
    explicit initial potential is handed in.  Residuals are measured in the
    weighted sequence norm of the coordinate space.  A residual that stops
    decreasing above tolerance or a singular Jacobian raises
    InversionFailure carrying the residual history.
    """
    if cfg is None:
        cfg = FlowConfig()
    if not target.real_flag:
        raise ValueError("inversion is defined for real-flagged targets")
    n_modes = target.n_modes
    newton = cfg.newton
    max_iter = int(newton.get("max_iter", 25))
    tol = float(newton.get("tol", 1e-12))
    fd_step = float(newton.get("fd_step", 1e-6))
    M = cfg.lax.get("M", max(4 * n_modes, 32))
    weights = np.repeat(np.arange(1, n_modes + 1, dtype=float) ** (0.5 + target.s), 2)

    if initial is not None:
        x = np.empty(2 * n_modes)
        for n in range(1, n_modes + 1):
            c = initial.coeff(n) if n <= initial.N else 0.0
            x[2 * (n - 1)] = np.real(c)
            x[2 * (n - 1) + 1] = np.imag(c)
    else:
        guess = -np.sqrt(np.arange(1, n_modes + 1)) * target.plus
        x = np.empty(2 * n_modes)
        x[0::2] = guess.real
        x[1::2] = guess.imag

    history = []
    r = _residual(_coords_to_potential(x, target.s, n_modes), target, M, n_modes)
    res = float(np.linalg.norm(weights * r))
    history.append(res)
    for _ in range(max_iter):
        if res < tol:
            return _coords_to_potential(x, target.s, n_modes)
        J = np.empty((2 * n_modes, 2 * n_modes))
        for j in range(2 * n_modes):
            step = fd_step * max(1.0, abs(x[j]))
            xp = x.copy(); xp[j] += step
            xm = x.copy(); xm[j] -= step
            J[:, j] = (_residual(_coords_to_potential(xp, target.s, n_modes), target, M, n_modes)
                       - _residual(_coords_to_potential(xm, target.s, n_modes), target, M, n_modes)) / (2 * step)
        try:
            dx = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError as exc:
            raise InversionFailure("singular Jacobian: %s" % exc, history) from exc
        x = x + dx
        r = _residual(_coords_to_potential(x, target.s, n_modes), target, M, n_modes)
        new_res = float(np.linalg.norm(weights * r))
        history.append(new_res)
        if new_res >= res and new_res > tol:
            raise InversionFailure(
                "Newton stagnated at residual %.3e" % new_res, history)
        res = new_res
    if res < tol:
        return _coords_to_potential(x, target.s, n_modes)
    raise InversionFailure(
        "no convergence in %d iterations (residual %.3e)" % (max_iter, res), history)


def solve_trajectory(u0, cfg=None):
    """The composed solution map: transform once, rotate and invert per sample.

    Returns (samples, diagnostics): samples is a list of (t, Potential);
    diagnostics holds per-sample inversion residuals, the largest action
    drift of the re-transformed samples against the initial state, and the
    adjacent-sample increments of t -> u(t) in the H^s norm as a continuity
    monitor.  With cfg.warm_start the previous sample seeds the next Newton
    solve; by default every sample starts from the linearized guess.
    """
    if cfg is None:
        cfg = FlowConfig()
    if not u0.real:
        raise ValueError("trajectory evolution needs a real potential")
    n_modes_cfg = cfg.lax.get("K_use")
    M = cfg.lax.get("M", max(4 * u0.N, 32))
    z0 = birkhoff_forward(u0, M=M, k_use=n_modes_cfg)
    samples = []
    residuals = []
    action_drift = 0.0
    I0 = 0.5 * np.abs(z0.plus) ** 2
    prev_u = None
    for t in cfg.t_grid:
        zt = evolve(z0, t)
        u_t = invert(zt, cfg, initial=prev_u if cfg.warm_start else None)
        z_back = birkhoff_forward(u_t, M=M, k_use=z0.n_modes)
        action_drift = max(action_drift, float(np.max(
            np.abs(0.5 * np.abs(z_back.plus) ** 2 - I0))))
        diff = z_back.plus - zt.plus
        weights = np.arange(1, z0.n_modes + 1, dtype=float) ** (0.5 + u0.s)
        residuals.append(float(np.linalg.norm(weights * diff)))
        samples.append((t, u_t))
        prev_u = u_t
    increments = []
    for (t0, ua), (t1, ub) in zip(samples, samples[1:]):
        band = max(ua.N, ub.N)
        merged = {n: ub.coeff(n) - ua.coeff(n) for n in range(1, band + 1)}
        merged = {n: v for n, v in merged.items() if v != 0}
        d = Potential(u0.s, band, merged, real=True)
        increments.append(sobolev_norm(d, u0.s))
    diagnostics = {
        "residuals": residuals,
        "action_drift": action_drift,
        "increments": increments,
    }
    return samples, diagnostics
