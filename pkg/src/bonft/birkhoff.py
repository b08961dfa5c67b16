"""Norming constants, the eigenfunction chain, and the coordinate map.

The coordinates are assembled from truncated spectral data in three layers:

  1. scaling_constants: products over the gaps give kappa_n and mu_n;
  2. eigen_chain: the normalized eigenvectors f_n, built inductively as
     f_n = P_n(S f_{n-1}) / sqrt(mu_n) from f_0 = a_0 h_0, together with the
     projector couplings alpha_n, beta_n and the derived delta_n, nu_n, a_n;
  3. birkhoff_forward: the coordinate of index n is <1|f_n> / sqrt(kappa_n)
     on real potentials, with a complex extension obtained by running the
     same pipeline on the conjugated potential where conjugation-symmetry
     no longer supplies the second half of the data.

Principal square roots throughout, with the branch cut treated as an error.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (BranchCutError, DegenerateProduct, DegenerateProjector,
                     DivergenceError, NumericalFailure, OutOfNeighborhood)
from .hardy import HardyVector, Potential, SeqState, involute, pair, shift, synthesize
from .lax import spectrum
from .residues import psi_series

DEGENERATE_TOL = 1e-12
NEIGHBORHOOD_MU = 0.5
NEIGHBORHOOD_ALPHA = 0.5
CROSS_ASSERT_TOL = 1e-9


def default_lax_dim(u):
    """Truncation heuristic: several bands of headroom, never tiny."""
    return max(4 * u.N, 32)


def sqrt_plus(z):
    """Principal square root, Re > 0 off the cut; the cut (-inf, 0] is an error."""
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0:
        raise BranchCutError("square root argument %r on the branch cut" % (z,))
    return complex(np.sqrt(z))


@dataclass
class ScalingData:
    """Chain constants, index-aligned: slot n holds the n-th value.

    kappa[0..K] and a[0..K] are fully populated; mu, alpha, beta, delta and
    nu start at n = 1, their slot 0 is NaN by convention.
    """

    kappa: np.ndarray
    mu: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    delta: np.ndarray
    nu: np.ndarray
    a: np.ndarray
    kappa_tail: float
    mu_tail: float


def scaling_constants(sd):
    """Norming constants kappa_n and scaling factors mu_n from the spectrum.

    kappa_0 = prod_{k>=1} (1 - gamma_k/(lambda_k - lambda_0)),
    kappa_n = (lambda_n - lambda_0)^{-1} prod_{k != n} (1 - gamma_k/(lambda_k - lambda_n)),
    mu_n    = (1 - gamma_n/(lambda_n - lambda_0)) *
              prod_{k != n} (1 - gamma_n gamma_k /
                             ((lambda_{k-1} - lambda_{n-1})(lambda_k - lambda_n))),
    with products over k = 1..K_use.  Returns (kappa, mu, tails): the tail
    dict reports the largest deviation from 1 among the last retained
    factors, an estimate of what truncating the products discards.
    """
    K = sd.K_use
    lam = sd.lambdas[:K + 1]
    if sd.hermitian:
        lam = lam.real
    gam = lam[1:] - lam[:-1] - 1.0  # gam[k-1] = gamma_k
    kappa = np.empty(K + 1, dtype=complex)
    mu = np.full(K + 1, np.nan, dtype=complex)
    kappa_tail = 0.0
    mu_tail = 0.0
    for n in range(K + 1):
        factors = np.ones(0, dtype=complex)
        if n == 0:
            factors = 1.0 - gam / (lam[1:] - lam[0])
            value = np.prod(factors)
        else:
            ks = np.array([k for k in range(1, K + 1) if k != n])
            if len(ks):
                factors = 1.0 - gam[ks - 1] / (lam[ks] - lam[n])
            value = np.prod(factors) / (lam[n] - lam[0])
        if len(factors):
            small = float(np.min(np.abs(factors)))
            if small < DEGENERATE_TOL:
                raise DegenerateProduct(
                    "kappa_%d product factor of size %.3e" % (n, small))
            kappa_tail = max(kappa_tail, float(abs(factors[-1] - 1.0)))
        kappa[n] = value
    for n in range(1, K + 1):
        lead = 1.0 - gam[n - 1] / (lam[n] - lam[0])
        if abs(lead) < DEGENERATE_TOL:
            raise DegenerateProduct("mu_%d leading factor of size %.3e"
                                    % (n, abs(lead)))
        value = lead
        last = None
        for k in range(1, K + 1):
            if k == n:
                continue
            f = 1.0 - gam[n - 1] * gam[k - 1] / ((lam[k - 1] - lam[n - 1]) * (lam[k] - lam[n]))
            if abs(f) < DEGENERATE_TOL:
                raise DegenerateProduct("mu_%d product factor of size %.3e at k=%d"
                                        % (n, abs(f), k))
            value *= f
            last = f
        if last is not None:
            mu_tail = max(mu_tail, float(abs(last - 1.0)))
        mu[n] = value
    return kappa, mu, {"kappa_tail": kappa_tail, "mu_tail": mu_tail}


def eigen_chain(u, sd):
    """The normalized chain f_0..f_K with all its scaling constants.

    f_0 = a_0 h_0 with a_0 = sqrt(kappa_0) / <h_0, 1> (bilinear pairing),
    then f_n = P_n(S f_{n-1}) / sqrt(mu_n).  Along the way the projector
    couplings

        alpha_n = <P_n e_n | e_n>,
        beta_n  = <P_n S P_{n-1} e_{n-1} | e_n>,

    fill delta_n = beta_n - alpha_n, nu_n = beta_n / alpha_n and the
    cumulative a_n = a_0 prod_{k<=n} nu_k / sqrt(mu_k).  The admissibility
    guards |mu_n - 1| < 1/2 and |alpha_n| >= 1/2 delimit the neighborhood
    where the construction is trusted; leaving it raises OutOfNeighborhood.
    """
    K = sd.K_use
    kappa, mu, tails = scaling_constants(sd)
    h0_zero = complex(sd.h[0].coeffs[0])  # bilinear <h_0, 1>
    if abs(h0_zero) < DEGENERATE_TOL:
        raise DegenerateProjector("projected vacuum has zero mean component")
    a0 = sqrt_plus(kappa[0]) / h0_zero
    f = [HardyVector(a0 * sd.h[0].coeffs)]
    alpha = np.full(K + 1, np.nan, dtype=complex)
    beta = np.full(K + 1, np.nan, dtype=complex)
    nu = np.full(K + 1, np.nan, dtype=complex)
    a = np.empty(K + 1, dtype=complex)
    a[0] = a0
    for n in range(1, K + 1):
        if abs(mu[n] - 1.0) >= NEIGHBORHOOD_MU:
            raise OutOfNeighborhood("|mu_%d - 1| = %.3f >= %.1f"
                                    % (n, abs(mu[n] - 1.0), NEIGHBORHOOD_MU))
        alpha[n] = complex(sd.h[n].coeffs[n])
        if abs(alpha[n]) < NEIGHBORHOOD_ALPHA:
            raise OutOfNeighborhood("|alpha_%d| = %.3f < %.1f"
                                    % (n, abs(alpha[n]), NEIGHBORHOOD_ALPHA))
        beta[n] = complex(sd.project(n, shift(sd.h[n - 1]).coeffs)[n])
        nu[n] = beta[n] / alpha[n]
        root = sqrt_plus(mu[n])
        a[n] = a[n - 1] * nu[n] / root
        f.append(HardyVector(sd.project(n, shift(f[n - 1]).coeffs) / root))
    delta = beta - alpha
    scaling = ScalingData(kappa=kappa, mu=mu, alpha=alpha, beta=beta,
                          delta=delta, nu=nu, a=a,
                          kappa_tail=tails["kappa_tail"], mu_tail=tails["mu_tail"])
    return f, scaling


def pre_birkhoff(u, sd):
    """The sequence Psi_n = <1, h_n> (bilinear), n = 1..K_use.

    Only the zero-mode coefficient of h_n survives the bilinear pairing
    against the constant, so this reads a single entry per index.
    """
    entries = {n: complex(sd.h[n].coeffs[0]) for n in range(1, sd.K_use + 1)}
    return SeqState(1.0 + u.s, entries)


def series_validate(u, d_max, M=None, k_use=None):
    """Compare spectral Psi_n against its explicit Taylor multi-sums.

    Recomputes every Psi_n, n = 1..K_use, as the finite sum of residue
    terms up to total degree d_max and returns max_n of the absolute
    difference from the spectral value.  Raises DivergenceError when the
    per-degree magnitudes fail to decay, since then the truncation says
    nothing.
    """
    if M is None:
        M = default_lax_dim(u)
    sd = spectrum(u, M, k_use=k_use)
    psi = pre_birkhoff(u, sd)
    worst = 0.0
    for n in range(1, sd.K_use + 1):
        value, per_degree = psi_series(u, n, d_max)
        sizes = [m for m in per_degree if m > 0.0]
        for lo, hi in zip(sizes, sizes[1:]):
            if hi >= lo:
                raise DivergenceError(
                    "series terms for n=%d grew from %.3e to %.3e" % (n, lo, hi))
        worst = max(worst, abs(value - psi.entries[n]))
    return worst


class BirkhoffState:
    """Coordinates (zeta_n)_{1<=|n|<=N_b} with the potential's exponent s.

    plus[j] holds zeta_{j+1}, minus[j] holds zeta_{-(j+1)}.  real_flag
    asserts the conjugation symmetry zeta_{-n} = conj(zeta_n), the image of
    a real potential.
    """

    __slots__ = ("s", "plus", "minus", "real_flag", "diagnostics")

    def __init__(self, s, plus, minus, real_flag=False):
        self.diagnostics = None
        plus = np.asarray(plus, dtype=complex)
        minus = np.asarray(minus, dtype=complex)
        if plus.shape != minus.shape or plus.ndim != 1:
            raise ValueError("plus and minus sides must be 1-d of equal length")
        if not (np.all(np.isfinite(plus)) and np.all(np.isfinite(minus))):
            raise ValueError("non-finite coordinates")
        if real_flag:
            dev = float(np.max(np.abs(minus - np.conj(plus)))) if len(plus) else 0.0
            if dev > 1e-8:
                raise ValueError("real_flag set but conjugation symmetry off by %.3e" % dev)
            minus = np.conj(plus)
        self.s = float(s)
        self.plus = plus
        self.minus = minus
        self.real_flag = bool(real_flag)

    @property
    def n_modes(self):
        return len(self.plus)

    def coord(self, n):
        """zeta_n for a signed nonzero index n."""
        n = int(n)
        if n == 0 or abs(n) > self.n_modes:
            raise IndexError("index %d outside 1..%d in absolute value" % (n, self.n_modes))
        return complex(self.plus[n - 1]) if n > 0 else complex(self.minus[-n - 1])

    def __repr__(self):
        return "BirkhoffState(s=%g, n_modes=%d, real=%s)" % (
            self.s, self.n_modes, self.real_flag)


def state_to_json(state, diagnostics=None):
    obj = {
        "s": state.s,
        "N_b": state.n_modes,
        "plus": [{"n": j + 1, "re": float(z.real), "im": float(z.imag)}
                 for j, z in enumerate(state.plus)],
        "minus": [{"n": -(j + 1), "re": float(z.real), "im": float(z.imag)}
                  for j, z in enumerate(state.minus)],
        "real": state.real_flag,
    }
    if diagnostics is not None:
        obj["diagnostics"] = diagnostics
    return obj


def state_from_json(obj):
    n_modes = int(obj["N_b"])
    plus = np.zeros(n_modes, dtype=complex)
    minus = np.zeros(n_modes, dtype=complex)
    for item in obj["plus"]:
        n = int(item["n"])
        if not 1 <= n <= n_modes:
            raise ValueError("plus index %d outside 1..%d" % (n, n_modes))
        plus[n - 1] = float(item["re"]) + 1j * float(item["im"])
    for item in obj["minus"]:
        n = int(item["n"])
        if not 1 <= -n <= n_modes:
            raise ValueError("minus index %d outside -1..-%d" % (n, n_modes))
        minus[-n - 1] = float(item["re"]) + 1j * float(item["im"])
    return BirkhoffState(float(obj["s"]), plus, minus, bool(obj.get("real", False)))


def _assemble_plus(n_range, kappa_u, a_conj, psi_conj):
    out = np.empty(len(n_range), dtype=complex)
    for j, n in enumerate(n_range):
        out[j] = np.sqrt(n) * np.conj(a_conj[n] * psi_conj[n]) / sqrt_plus(n * kappa_u[n])
    return out


def _assemble_minus(n_range, kappa_conj, a_u, psi_u):
    out = np.empty(len(n_range), dtype=complex)
    for j, n in enumerate(n_range):
        out[j] = np.sqrt(n) * a_u[n] * psi_u[n] / sqrt_plus(n * np.conj(kappa_conj[n]))
    return out


def birkhoff_forward(u, M=None, k_use=None):
    """The coordinate map on a trig-polynomial potential.

    Real u: one chain gives zeta_n = <1|f_n> / sqrt(kappa_n) and the minus
    side by conjugation; the equivalent product form
    sqrt(n) conj(a_n Psi_n) / sqrt(n kappa_n) is evaluated from the same
    chain and the two are cross-checked, which exercises every constant the
    complex extension relies on.

    Complex u: the pipeline runs on both u and conj(u); index n > 0 takes
    sqrt(n) conj(a_n(u-) Psi_n(u-)) / sqrt(n kappa_n(u)) with u- = conj(u),
    index -n takes sqrt(n) a_n(u) Psi_n(u) / sqrt(n conj(kappa_n(u-))).

    Attaches .diagnostics with the product tails and the chain norm drift.
    """
    if M is None:
        M = default_lax_dim(u)
    sd = spectrum(u, M, k_use=k_use)
    f, scaling = eigen_chain(u, sd)
    K = sd.K_use
    ns = range(1, K + 1)
    psi_u = np.concatenate(([np.nan], [complex(sd.h[n].coeffs[0]) for n in ns]))
    norm_drift = max(abs(float(np.linalg.norm(fv.coeffs)) - 1.0) for fv in f)
    if u.real:
        plus = np.array([np.conj(f[n].coeffs[0]) / sqrt_plus(scaling.kappa[n]) for n in ns])
        check = _assemble_plus(ns, scaling.kappa, scaling.a, psi_u)
        dev = float(np.max(np.abs(plus - check))) if K else 0.0
        if dev > CROSS_ASSERT_TOL:
            raise NumericalFailure(
                "shortcut and product coordinates disagree by %.3e" % dev)
        state = BirkhoffState(u.s, plus, np.conj(plus), real_flag=True)
    else:
        uc = involute(u, "conj")
        sd_c = spectrum(uc, M, k_use=k_use)
        _, scaling_c = eigen_chain(uc, sd_c)
        psi_c = np.concatenate(([np.nan], [complex(sd_c.h[n].coeffs[0]) for n in ns]))
        plus = _assemble_plus(ns, scaling.kappa, scaling_c.a, psi_c)
        minus = _assemble_minus(ns, scaling_c.kappa, scaling.a, psi_u)
        state = BirkhoffState(u.s, plus, minus, real_flag=False)
    state_diag = {
        "kappa_tail": scaling.kappa_tail,
        "mu_tail": scaling.mu_tail,
        "norm_drift": float(norm_drift),
    }
    state.diagnostics = state_diag
    return state


def d0_phi(u):
    """Differential of the coordinate map at zero: n -> -u_hat(n)/sqrt(|n|)."""
    ns = np.arange(1, u.N + 1)
    plus = np.array([-u.coeff(n) / np.sqrt(n) for n in ns], dtype=complex)
    minus = np.array([-u.coeff(-n) / np.sqrt(n) for n in ns], dtype=complex)
    return BirkhoffState(u.s, plus, minus, real_flag=False)


def actions(state):
    """I_n = |zeta_n|^2 / 2 from the plus side."""
    return 0.5 * np.abs(state.plus) ** 2


def observables(x):
    """Actions and Hamiltonians readable from the given object.

    BirkhoffState: {"actions", "H_B"} with

        H_B = sum n^2 |zeta_n|^2 - sum_n (sum_{k>=n} |zeta_k|^2)^2,

    the normalization whose derivative in |zeta_n|^2 reproduces the flow
    frequencies and whose quadratic part matches the physical energy of
    the linearized coordinates.
    Real Potential: {"H_phys"} computed spectrally,
        H_phys = (1/2) sum_{n != 0} |n| |u_hat(n)|^2 - (1/3) (u^3)_hat(0).
    """
    if isinstance(x, BirkhoffState):
        q = np.abs(x.plus) ** 2
        ns = np.arange(1, len(q) + 1, dtype=float)
        tail_sums = np.cumsum(q[::-1])[::-1]
        return {"actions": 0.5 * q, "H_B": float(np.sum(ns ** 2 * q) - np.sum(tail_sums ** 2))}
    if isinstance(x, Potential):
        if not x.is_real_valued(1e-12):
            raise ValueError("physical energy needs a real potential")
        quad = 0.0
        for n, v in x.nonzero_coeffs().items():
            quad += abs(n) * abs(v) ** 2
        grid = max(3 * x.N + 1, 8)
        samples = synthesize(x, grid)
        cubic_zero = float(np.mean(np.real(samples) ** 3))
        return {"H_phys": 0.5 * quad - cubic_zero / 3.0}
    raise TypeError("unsupported type for observables: %r" % type(x).__name__)


def _perturbed(u, k, step):
    coeffs = u.nonzero_coeffs()
    coeffs[k] = coeffs.get(k, 0.0) + step
    return Potential(u.s, max(u.N, abs(k)), coeffs, real=False)


def gardner_bracket(F, G, u, h=1e-5, k_max=None):
    """{F, G}(u) = sum_{k != 0} i k (dF/du_hat(-k)) (dG/du_hat(k)).

    The partials are central differences of the functional along single
    Fourier coefficient directions; this coefficient form of the bracket is
    the derivative of the integral definition and is certified against an
    analytic monomial value in the test suite.  k ranges over 1..k_max on
    both signs, default the band of u.
    """
    if not u.real:
        raise ValueError("bracket evaluation point must be a real potential")
    if k_max is None:
        k_max = max(u.N, 1)
    h = float(h)
    if h < 1e-8:
        warnings.warn("step %.1e likely round-off dominated; expect error ~%.1e"
                      % (h, 2.2e-16 / h), stacklevel=2)
    total = 0.0 + 0.0j
    for k in range(-k_max, k_max + 1):
        if k == 0:
            continue
        dF = (F(_perturbed(u, -k, h)) - F(_perturbed(u, -k, -h))) / (2.0 * h)
        dG = (G(_perturbed(u, k, h)) - G(_perturbed(u, k, -h))) / (2.0 * h)
        total += 1j * k * dF * dG
    return total


def canonical_bracket_table(u, n_max, h=1e-5, k_max=None, M=None):
    """Brackets among the coordinate functionals, sharing the transforms.

    Returns (plus_minus, plus_plus) where plus_minus[i, j] approximates
    {zeta_{i+1}, zeta_{-(j+1)}}(u) (target -i delta_ij) and plus_plus[i, j]
    approximates {zeta_{i+1}, zeta_{j+1}}(u) (target 0).  The minus-index
    functional is the analytic extension's minus component, which on real
    potentials coincides with conj(zeta).  Each perturbed potential is
    transformed once and every partial is read from that table.
    """
    if not u.real:
        raise ValueError("bracket evaluation point must be a real potential")
    if k_max is None:
        k_max = u.N + n_max + 2
    if M is None:
        M = max(4 * (u.N + k_max), 32)
    # the scaling products at index n carry factors from every open gap, so
    # the chain must run well past n_max or the partials inherit O(u^2) bias
    depth = min(M // 2, n_max + 2 * u.N + 8)
    dplus = {}
    dminus = {}
    for k in [k for k in range(-k_max, k_max + 1) if k != 0]:
        hi = birkhoff_forward(_perturbed(u, k, h), M=M, k_use=depth)
        lo = birkhoff_forward(_perturbed(u, k, -h), M=M, k_use=depth)
        dplus[k] = (hi.plus[:n_max] - lo.plus[:n_max]) / (2.0 * h)
        dminus[k] = (hi.minus[:n_max] - lo.minus[:n_max]) / (2.0 * h)
    plus_minus = np.zeros((n_max, n_max), dtype=complex)
    plus_plus = np.zeros((n_max, n_max), dtype=complex)
    for k in dplus:
        plus_minus += 1j * k * np.outer(dplus[-k], dminus[k])
        plus_plus += 1j * k * np.outer(dplus[-k], dplus[k])
    return plus_minus, plus_plus
