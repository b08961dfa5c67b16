"""Truncated Lax operator on the Hardy space.

The operator acts on nonnegative Fourier modes as multiplication by the
mode index minus a Toeplitz part built from the potential:

    (L)_{jk} = j delta_{jk} - u_hat(j - k),   0 <= j, k <= M.

Everything downstream (gaps, norming constants, the coordinate map) reads
off this one matrix, so this module owns assembly, the eigensolve with its
simplicity guard, the rank-one spectral projectors, a Neumann-series
resolvent used as an independent validator, and the symmetry audit.
"""

import warnings

import numpy as np
import scipy.linalg

from .errors import (DivergenceError, NumericalFailure, PropertyViolation,
                     TruncationWarning)
from .hardy import HardyVector, involute

SIMPLICITY_TOL = 1e-8
GAP_TOL = 1e-10
CONTOUR_RADIUS = 1.0 / 3.0
CONTOUR_NODES = 64


class LaxMatrix:
    """Dense truncation of the Lax operator to modes 0..M."""

    def __init__(self, entries, M, hermitian):
        self.entries = entries
        self.M = M
        self.hermitian = hermitian

    def toeplitz_part(self):
        """The matrix j*delta_{jk} - (L)_{jk}, i.e. the coefficient table u_hat(j-k)."""
        return np.diag(np.arange(self.M + 1.0)) - self.entries


def assemble_lax(u, M):
    """Build the (M+1) x (M+1) truncation of D - T_u.

    M must at least cover the band of u (M >= N); truncations below 2N are
    accepted with a warning since the top rows then clip the Toeplitz band.
    """
    M = int(M)
    if M < u.N:
        raise ValueError("truncation M=%d cannot hold a band of width N=%d" % (M, u.N))
    if M < 2 * u.N:
        warnings.warn("truncation M=%d below 2N=%d; band only partially resolved"
                      % (M, 2 * u.N), TruncationWarning, stacklevel=2)
    j = np.arange(M + 1)
    diff = j[:, None] - j[None, :]
    coeffs = np.zeros(2 * M + 1, dtype=complex)
    for n, v in u.nonzero_coeffs().items():
        if abs(n) <= M:
            coeffs[n + M] = v
    entries = np.diag(j.astype(complex)) - coeffs[diff + M]
    hermitian = bool(u.real)
    return LaxMatrix(entries, M, hermitian)


class SpectralData:
    """Sorted truncated spectrum with rank-one projector data.

    lambdas are sorted by increasing real part; right_vecs and left_vecs
    store eigenvectors columnwise (left vectors w satisfy w^H L = lambda w^H,
    so for a Hermitian matrix they coincide with the right ones); h[n] is
    the projected basis vector P_n e_n for n <= K_use.
    """

    def __init__(self, lambdas, right_vecs, left_vecs, h, K_use, M, hermitian,
                 min_separation):
        self.lambdas = lambdas
        self.right_vecs = right_vecs
        self.left_vecs = left_vecs
        self.h = h
        self.K_use = K_use
        self.M = M
        self.hermitian = hermitian
        self.min_separation = min_separation

    def project(self, n, x):
        """Apply the Riesz projector P_n to a coefficient vector."""
        v = self.right_vecs[:, n]
        w = self.left_vecs[:, n]
        denom = np.vdot(w, v)
        return v * (np.vdot(w, np.asarray(x, dtype=complex)) / denom)


def spectrum(u, M, k_use=None, tol_simple=SIMPLICITY_TOL):
    """Eigendecomposition of the truncated Lax matrix with projector data.

    Labels follow increasing real part.  A pair of eigenvalues closer than
    tol_simple leaves the labeling (and every rank-one projector) undefined,
    so that raises NumericalFailure rather than picking an order.  K_use
    defaults to M/2: the upper half of a truncated spectrum is polluted by
    the cut.
    """
    lax = assemble_lax(u, M)
    if lax.hermitian:
        lam, V = np.linalg.eigh(lax.entries)
        lam = lam.astype(complex)
        W = V
    else:
        lam, WL, V = scipy.linalg.eig(lax.entries, left=True, right=True)
        order = np.lexsort((lam.imag, lam.real))
        lam = lam[order]
        V = V[:, order]
        W = WL[:, order]
    sep = np.abs(lam[:, None] - lam[None, :])
    np.fill_diagonal(sep, np.inf)
    min_separation = float(sep.min())
    if min_separation <= tol_simple:
        raise NumericalFailure(
            "eigenvalue cluster: min separation %.3e <= %.1e; potential outside "
            "the simple-spectrum regime or truncation too small"
            % (min_separation, tol_simple))
    if lax.hermitian:
        imax = float(np.max(np.abs(lam.imag)))
        if imax > GAP_TOL:
            raise NumericalFailure("Hermitian solve returned Im(lambda) up to %.3e" % imax)
    K_use = M // 2 if k_use is None else int(k_use)
    if not 0 <= K_use <= M:
        raise ValueError("k_use must lie in 0..M")
    h = []
    for n in range(K_use + 1):
        v = V[:, n]
        w = W[:, n]
        denom = np.vdot(w, v)
        if abs(denom) < 1e-12:
            raise NumericalFailure("left/right eigenvectors nearly orthogonal at n=%d" % n)
        h.append(HardyVector(v * (np.conj(w[n]) / denom)))
    return SpectralData(lam, V, W, h, K_use, M, lax.hermitian, min_separation)


def gaps(sd):
    """Spectral gaps gamma_n = lambda_n - lambda_{n-1} - 1 for n = 1..K_use.

    For a Hermitian truncation the gaps must be nonnegative; below -1e-10
    that is a property violation, not a tolerance issue.
    """
    lam = sd.lambdas[:sd.K_use + 1]
    g = lam[1:] - lam[:-1] - 1.0
    if sd.hermitian:
        g = g.real
        worst = float(g.min()) if len(g) else 0.0
        if worst < -GAP_TOL:
            raise PropertyViolation("negative spectral gap %.3e for a real potential" % worst)
    return g


def neumann_resolvent(u, lam, rhs, m_max, safety_dist=CONTOUR_RADIUS):
    """Resolvent applied to rhs through the truncated Neumann series.

    Returns (result, certificate): the vector

        (D - lam)^{-1} sum_{m=0..m_max} [T_u (D - lam)^{-1}]^m rhs

    together with the norm of the last added increment.  Serves as a
    validator for the dense solve; it only converges when the Toeplitz part
    contracts against the free resolvent.
    """
    x = np.asarray(rhs.coeffs, dtype=complex)
    M = len(x) - 1
    dist = np.min(np.abs(lam - np.arange(M + 1)))
    if dist < safety_dist:
        raise ValueError("lambda within %.3f of the free spectrum (dist %.3e)"
                         % (safety_dist, dist))
    lax = assemble_lax(u, M)
    T = lax.toeplitz_part()
    free = 1.0 / (np.arange(M + 1) - lam)
    term = x.copy()
    acc = free * term
    prev_inc = None
    last_inc = 0.0
    for _ in range(int(m_max)):
        term = T @ (free * term)
        inc = free * term
        last_inc = float(np.linalg.norm(inc))
        if last_inc == 0.0:
            break
        if prev_inc is not None and last_inc >= prev_inc:
            raise DivergenceError(
                "Neumann increment grew from %.3e to %.3e; no contraction"
                % (prev_inc, last_inc))
        acc += inc
        prev_inc = last_inc
    return HardyVector(acc), last_inc


def _sorted_eigvals(entries, hermitian):
    if hermitian:
        return np.sort(np.linalg.eigvalsh(entries)).astype(complex)
    lam = np.linalg.eigvals(entries)
    return lam[np.lexsort((lam.imag, lam.real))]


def symmetry_audit(u, M):
    """Deviations from the reflection and conjugation symmetries of the spectrum.

    Checks, each as a max absolute difference of sorted spectra:
      minus_vs_star:  the reflected-space operator (entries j delta - u_hat(k-j))
                      against the operator of u_*(x) = u(-x);
      conj_equivariance:  conj(lambda_n(conj u)) against lambda_n(u);
      imag_real_u:  max |Im lambda_n(u)| for a real potential, else None.
    Report-only: nothing here raises.
    """
    base = assemble_lax(u, M)
    lam_u = _sorted_eigvals(base.entries, base.hermitian)

    minus_entries = np.diag(np.arange(M + 1.0)) - base.toeplitz_part().T
    lam_minus = _sorted_eigvals(minus_entries, base.hermitian)
    star = involute(u, "star")
    lam_star = _sorted_eigvals(assemble_lax(star, M).entries, star.real)

    uc = involute(u, "conj")
    lam_conj = _sorted_eigvals(assemble_lax(uc, M).entries, uc.real)
    lam_conj = np.conj(lam_conj)
    lam_conj = lam_conj[np.lexsort((lam_conj.imag, lam_conj.real))]

    report = {
        "minus_vs_star": float(np.max(np.abs(lam_minus - lam_star))),
        "conj_equivariance": float(np.max(np.abs(lam_conj - lam_u))),
        "imag_real_u": float(np.max(np.abs(lam_u.imag))) if u.real else None,
    }
    return report


def riesz_validator(u, M, n, radius=CONTOUR_RADIUS, nodes=CONTOUR_NODES):
    """h_n recomputed as -(1/2pi i) oint (L - lambda)^{-1} e_n d lambda.

    Trapezoid rule on the circle |lambda - n| = radius.  Exact-projector
    arithmetic never touches this; it exists to cross-check the eigenvector
    route.
    """
    lax = assemble_lax(u, M)
    e_n = np.zeros(M + 1, dtype=complex)
    e_n[n] = 1.0
    acc = np.zeros(M + 1, dtype=complex)
    eye = np.eye(M + 1)
    for theta in 2.0 * np.pi * np.arange(nodes) / nodes:
        lam = n + radius * np.exp(1j * theta)
        x = np.linalg.solve(lax.entries - lam * eye, e_n)
        acc += x * (lam - n)
    return HardyVector(-acc / nodes)
