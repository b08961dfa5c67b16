"""Value types and basic operations for truncated Fourier data.

Conventions, used everywhere downstream:

* a potential u on the torus is stored by its Fourier coefficients u_hat(n),
  0 < |n| <= N, with u_hat(0) identically zero (mean-free normalization);
* the sesquilinear pairing is <f|g> = sum f_hat(n) conj(g_hat(n)) and the
  bilinear pairing is <f,g> = sum f_hat(n) g_hat(-n), matching the
  normalized integrals (1/2pi) int f conj(g) dx and (1/2pi) int f g dx;
* weights <n> = max(1, |n|), so beta-norms are defined at n = 0 too.

Storage is dense over the declared cutoff: downstream linear algebra is
dense anyway and predictable indexing beats sparse maps here.
"""

import json
import warnings

import numpy as np

from .errors import AliasingError, TruncationWarning

SHIFT_DROP_THRESHOLD = 1e-10


class Potential:
    """Truncated mean-zero Fourier data of a potential, with Sobolev exponent s.

    Parameters
    ----------
    s : float
        Sobolev exponent, must be > -1/2.
    N : int
        Mode cutoff, >= 1; coefficients live on 0 < |n| <= N.
    coeffs : mapping int -> complex
        For real=True only keys n >= 1 are accepted and u_hat(-n) = conj(u_hat(n))
        is implied; otherwise keys of both signs are accepted.
    real : bool
        Marks the real subspace.
    """

    __slots__ = ("s", "N", "real", "_c")

    def __init__(self, s, N, coeffs=None, real=False):
        s = float(s)
        if not s > -0.5:
            raise ValueError("Sobolev exponent must be > -1/2, got %r" % s)
        N = int(N)
        if N < 1:
            raise ValueError("mode cutoff must be >= 1, got %r" % N)
        self.s = s
        self.N = N
        self.real = bool(real)
        c = np.zeros(2 * N + 1, dtype=complex)
        for n, v in (coeffs or {}).items():
            n = int(n)
            v = complex(v)
            if n == 0:
                raise ValueError("the mean coefficient n=0 is fixed at zero")
            if abs(n) > N:
                raise ValueError("coefficient index %d outside cutoff N=%d" % (n, N))
            if self.real and n < 0:
                raise ValueError("real potentials store n >= 1 only; the reflection is implied")
            if not np.isfinite(v.real) or not np.isfinite(v.imag):
                raise ValueError("coefficient at n=%d is not finite" % n)
            c[N + n] = v
        if self.real:
            c[:N] = np.conj(c[N + 1:][::-1])
        self._c = c
        self._c.setflags(write=False)

    def coeff(self, n):
        """u_hat(n); zero outside the stored band."""
        n = int(n)
        if abs(n) > self.N:
            return 0.0 + 0.0j
        return complex(self._c[self.N + n])

    def band(self):
        """Dense coefficient array over n = -N..N (read-only view)."""
        return self._c

    def support(self):
        """Sorted indices n with u_hat(n) != 0."""
        return [int(n) - self.N for n in np.flatnonzero(self._c)]

    def nonzero_coeffs(self):
        return {int(n) - self.N: complex(self._c[n]) for n in np.flatnonzero(self._c)}

    def is_real_valued(self, tol=0.0):
        if self.real:
            return True
        diff = self._c - np.conj(self._c[::-1])
        return float(np.max(np.abs(diff))) <= tol

    def __eq__(self, other):
        return (isinstance(other, Potential) and self.s == other.s and self.N == other.N
                and self.real == other.real and bool(np.array_equal(self._c, other._c)))

    def __repr__(self):
        return "Potential(s=%g, N=%d, real=%s, %d nonzero modes)" % (
            self.s, self.N, self.real, int(np.count_nonzero(self._c)))


class HardyVector:
    """Truncated nonnegative-frequency coefficient vector f_hat(0..M)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.asarray(coeffs, dtype=complex)
        if c.ndim != 1 or c.shape[0] < 1:
            raise ValueError("need a one-dimensional coefficient vector of length >= 1")
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite Hardy coefficients")
        self.coeffs = c

    @property
    def dim(self):
        return self.coeffs.shape[0]

    @classmethod
    def basis(cls, n, M):
        """e_n = e^{inx} truncated at M."""
        c = np.zeros(M + 1, dtype=complex)
        c[n] = 1.0
        return cls(c)

    def coeff(self, n):
        if 0 <= n < self.dim:
            return complex(self.coeffs[n])
        return 0.0 + 0.0j

    def __repr__(self):
        return "HardyVector(dim=%d)" % self.dim


class SeqState:
    """Finitely supported two-sided sequence (z_n), n != 0, with weight exponent beta."""

    __slots__ = ("beta", "entries")

    def __init__(self, beta, entries):
        self.beta = float(beta)
        self.entries = {}
        for n, v in dict(entries).items():
            n = int(n)
            if n == 0:
                raise ValueError("index 0 is excluded from sequence states")
            v = complex(v)
            if not np.isfinite(v.real) or not np.isfinite(v.imag):
                raise ValueError("non-finite entry at n=%d" % n)
            self.entries[n] = v

    def __repr__(self):
        return "SeqState(beta=%g, support=%d)" % (self.beta, len(self.entries))


def _weight(n):
    return max(1.0, abs(float(n)))


def sobolev_norm(v, beta):
    """(sum <n>^{2 beta} |coef|^2)^{1/2} over the stored support of v."""
    beta = float(beta)
    if isinstance(v, Potential):
        N = v.N
        idx = np.arange(-N, N + 1, dtype=float)
        w = np.maximum(1.0, np.abs(idx)) ** (2.0 * beta)
        return float(np.sqrt(np.sum(w * np.abs(v.band()) ** 2)))
    if isinstance(v, HardyVector):
        idx = np.arange(v.dim, dtype=float)
        w = np.maximum(1.0, idx) ** (2.0 * beta)
        return float(np.sqrt(np.sum(w * np.abs(v.coeffs) ** 2)))
    if isinstance(v, SeqState):
        acc = 0.0
        for n, z in v.entries.items():
            acc += _weight(n) ** (2.0 * beta) * abs(z) ** 2
        return float(np.sqrt(acc))
    raise TypeError("unsupported type for sobolev_norm: %r" % type(v).__name__)


def pair(f, g, kind="sesquilinear"):
    """Pairing of two Hardy vectors.

    sesquilinear: sum f_hat(n) conj(g_hat(n)).
    bilinear:     sum f_hat(n) g_hat(-n); for two Hardy vectors only the
                  n = 0 term can survive.
    """
    if kind == "sesquilinear":
        m = min(f.dim, g.dim)
        return complex(np.sum(f.coeffs[:m] * np.conj(g.coeffs[:m])))
    if kind == "bilinear":
        return complex(f.coeffs[0] * g.coeffs[0])
    raise ValueError("kind must be 'sesquilinear' or 'bilinear', got %r" % kind)


def shift(f, drop_threshold=SHIFT_DROP_THRESHOLD):
    """Multiplication by e^{ix}: (Sf)_hat(n+1) = f_hat(n), the top mode dropped.

    Dropping a relatively large top coefficient warns: truncation is an
    artifact of the finite representation, not of the operator.
    """
    c = f.coeffs
    top = abs(c[-1])
    scale = float(np.max(np.abs(c))) if c.size else 0.0
    if scale > 0.0 and top > drop_threshold * scale:
        warnings.warn(
            "shift dropped top coefficient of relative size %.3e" % (top / scale),
            TruncationWarning, stacklevel=2)
    out = np.zeros_like(c)
    out[1:] = c[:-1]
    return HardyVector(out)


def project_hardy(u, sign, M):
    """Szego-type projection of a potential onto M+1 one-sided modes.

    sign '+' keeps u_hat(0..M); sign '-' keeps u_hat(0..-M), stored reflected
    (index j holds u_hat(-j)).
    """
    M = int(M)
    if M < 1:
        raise ValueError("M must be >= 1")
    c = np.zeros(M + 1, dtype=complex)
    if sign == "+":
        for j in range(min(M, u.N) + 1):
            c[j] = u.coeff(j)
    elif sign == "-":
        for j in range(min(M, u.N) + 1):
            c[j] = u.coeff(-j)
    else:
        raise ValueError("sign must be '+' or '-', got %r" % sign)
    return HardyVector(c)


def involute(u, kind):
    """The two involutions on potentials.

    star: u_*(x) = u(-x), so u_hat(k) -> u_hat(-k).
    conj: u(x) -> conj(u(x)), so u_hat(k) -> conj(u_hat(-k)).
    """
    if kind not in ("star", "conj"):
        raise ValueError("kind must be 'star' or 'conj', got %r" % kind)
    if u.real:
        # Both involutions preserve the real subspace: conj fixes u, star
        # reflects it, and u(-x) is again real valued.
        if kind == "conj":
            keep = {n: v for n, v in u.nonzero_coeffs().items() if n >= 1}
            return Potential(u.s, u.N, keep, real=True)
        refl = {n: np.conj(v) for n, v in u.nonzero_coeffs().items() if n >= 1}
        return Potential(u.s, u.N, refl, real=True)
    out = {}
    for n, v in u.nonzero_coeffs().items():
        out[-n] = v if kind == "star" else np.conj(v)
    return Potential(u.s, u.N, out, real=False)


def synthesize(u, grid):
    """Sample u on a uniform grid of the given size (real array for real u)."""
    grid = int(grid)
    if grid < 2 * u.N + 1:
        raise AliasingError("grid %d too small for degree-%d data (need >= %d)"
                            % (grid, u.N, 2 * u.N + 1))
    spec = np.zeros(grid, dtype=complex)
    for n, v in u.nonzero_coeffs().items():
        spec[n % grid] = v
    samples = np.fft.ifft(spec) * grid
    if u.real:
        return samples.real
    return samples


def analyze(samples, N, s, real=False, alias_tol=1e-10):
    """Inverse of synthesize: recover a Potential with cutoff N from grid samples.

    Rejects grids that cannot hold the band, and reports aliasing when
    energy is found beyond the cutoff (relative to the in-band energy).
    """
    samples = np.asarray(samples)
    grid = samples.shape[0]
    if grid < 2 * N + 1:
        raise AliasingError("grid %d too small to resolve modes up to %d" % (grid, N))
    spec = np.fft.fft(samples.astype(complex)) / grid
    inband_sq = sum(abs(spec[n % grid]) ** 2 for n in range(-N, N + 1))
    inband = np.sqrt(inband_sq)
    beyond = np.sqrt(max(0.0, float(np.sum(np.abs(spec) ** 2)) - inband_sq))
    if inband > 0 and beyond > alias_tol * inband:
        warnings.warn("energy beyond cutoff N=%d: relative %.3e" % (N, beyond / inband),
                      TruncationWarning, stacklevel=2)
    if real:
        coeffs = {n: spec[n % grid] for n in range(1, N + 1)}
    else:
        coeffs = {n: spec[n % grid] for n in range(-N, N + 1) if n != 0}
    return Potential(s, N, coeffs, real=real)


def potential_to_json(u):
    """Serialize to the documented schema (real potentials store n >= 1 only)."""
    items = []
    for n in sorted(u.nonzero_coeffs()):
        if u.real and n < 0:
            continue
        v = u.coeff(n)
        items.append({"n": n, "re": v.real, "im": v.imag})
    return {"s": u.s, "N": u.N, "real": u.real, "coeffs": items}


def potential_from_json(obj):
    """Read the documented schema; n = 0 entries are rejected."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        s = obj["s"]
        N = obj["N"]
        real = bool(obj.get("real", False))
        raw = obj["coeffs"]
    except (KeyError, TypeError) as exc:
        raise ValueError("malformed potential object: %s" % exc) from exc
    coeffs = {}
    for item in raw:
        n = int(item["n"])
        if n == 0:
            raise ValueError("n=0 entries are rejected (mean is fixed at zero)")
        coeffs[n] = complex(float(item["re"]), float(item.get("im", 0.0)))
    return Potential(s, N, coeffs, real=real)
