"""Exact residue calculus and the combinatorial identity behind it.

All contour integrals here run counterclockwise around the circle of radius
1/3 about 0, so the only enclosed pole sits at mu = 0: nonzero integer
factors (l - mu)^-1 are analytic inside.  A factor with l = 0 contributes
-1/mu, raising the pole order by one and flipping the sign once.  The
residue is therefore a single Taylor coefficient of the product of the
nonzero factors, computed in exact big-integer rationals:

    (1/2pi i) oint mu^-(1+extra) prod_j (l_j - mu)^-1 dmu
        = (-1)^z [mu^(extra + z)] prod_{l_j != 0} (l_j - mu)^-1,

with z the number of zero entries.  Truncated rational Taylor series of the
product (never partial fractions) handle repeated factors uniformly.
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import DivergenceError


def _series_inv_linear(l, order):
    """Taylor coefficients of (l - mu)^-1 at mu = 0 up to the given order."""
    inv = Fraction(1, l)
    out = [inv]
    for _ in range(order):
        inv *= Fraction(1, l)
        out.append(inv)
    return out


def _series_mul(a, b, order):
    out = [Fraction(0)] * (order + 1)
    for i, ai in enumerate(a):
        if i > order or ai == 0:
            continue
        top = min(order - i, len(b) - 1)
        for j in range(top + 1):
            out[i + j] += ai * b[j]
    return out


def _product_series(ls, order):
    series = [Fraction(1)] + [Fraction(0)] * order
    for l in ls:
        series = _series_mul(series, _series_inv_linear(l, order), order)
    return series


def residue_A(ls, extra_mu_power=0):
    """Exact value of (1/2pi i) oint mu^-(1+extra) prod (l_j - mu)^-1 dmu.

    ls is a nonempty sequence of integers; extra_mu_power 0 gives the plain
    quantity, 1 the mu^-2 variant.
    """
    ls = tuple(int(l) for l in ls)
    if len(ls) == 0:
        raise ValueError("need a nonempty tuple")
    if extra_mu_power not in (0, 1):
        raise ValueError("extra_mu_power must be 0 or 1")
    return _residue_A_cached(ls, extra_mu_power)


@lru_cache(maxsize=None)
def _residue_A_cached(ls, extra_mu_power):
    zeros = sum(1 for l in ls if l == 0)
    nonzero = tuple(l for l in ls if l != 0)
    order = extra_mu_power + zeros
    series = _product_series(nonzero, order)
    value = series[order]
    return -value if zeros % 2 else value


def vanishing_D(ls):
    """The residue combination that the exact sweep certifies to vanish.

    D(l_1..l_d) = sum_{m=1..d} A(l_1..l_m) A(l_m..l_d)
                  - (1/2pi i) oint mu^-2 prod (l_j - mu)^-1 dmu,
    evaluated exactly.
    """
    ls = tuple(int(l) for l in ls)
    d = len(ls)
    if d == 0:
        raise ValueError("need a nonempty tuple")
    total = Fraction(0)
    for m in range(1, d + 1):
        total += residue_A(ls[:m]) * residue_A(ls[m - 1:])
    return total - residue_A(ls, extra_mu_power=1)


@dataclass(frozen=True)
class PartitionInstance:
    """An instance (J, K, q) of the counting identity at size d.

    J and K partition {1..d} with K nonempty, and q maps K to nonnegative
    integers summing to |J| + 1.
    """

    d: int
    J: frozenset = field()
    K: frozenset = field()
    q: tuple = field()  # pairs (k, q_k), sorted by k

    def __post_init__(self):
        full = frozenset(range(1, self.d + 1))
        if self.J | self.K != full or self.J & self.K:
            raise ValueError("J and K must partition {1..d}")
        if not self.K:
            raise ValueError("K must be nonempty")
        qmap = dict(self.q)
        if set(qmap) != set(self.K):
            raise ValueError("q must be indexed exactly by K")
        if any(v < 0 for v in qmap.values()):
            raise ValueError("q entries must be >= 0")
        if sum(qmap.values()) != len(self.J) + 1:
            raise ValueError("q must sum to |J| + 1")


def combi_check(p):
    """Count the two admissible sets of a PartitionInstance.

    J_ad(q) = { m in J : S(K_m) = |J_m| } and
    K_ad(q) = { m in K : S(K_m \\ {m}) <= |J_m| and S(K'_m \\ {m}) <= |J'_m| },
    with J_m = J cap [1, m], J'_m = J cap [m, d], likewise for K, and
    S(E) = sum of q over E.  Returns (|J_ad|, |K_ad|, ok) with
    ok <=> |K_ad| = |J_ad| + 1.
    """
    qmap = dict(p.q)

    def S(E):
        return sum(qmap[k] for k in E)

    j_ad = 0
    for m in p.J:
        K_m = {k for k in p.K if k <= m}
        J_m = {j for j in p.J if j <= m}
        if S(K_m) == len(J_m):
            j_ad += 1
    k_ad = 0
    for m in p.K:
        K_m = {k for k in p.K if k <= m}
        J_m = {j for j in p.J if j <= m}
        K_pm = {k for k in p.K if k >= m}
        J_pm = {j for j in p.J if j >= m}
        if S(K_m - {m}) <= len(J_m) and S(K_pm - {m}) <= len(J_pm):
            k_ad += 1
    return j_ad, k_ad, k_ad == j_ad + 1


def compositions(total, parts):
    """All tuples of `parts` nonnegative integers summing to `total`."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def iter_partition_instances(d):
    """All PartitionInstance values at size d."""
    indices = list(range(1, d + 1))
    for j_size in range(0, d):
        for J in itertools.combinations(indices, j_size):
            Jset = frozenset(J)
            K = sorted(set(indices) - Jset)
            for q in compositions(j_size + 1, len(K)):
                yield PartitionInstance(d=d, J=Jset, K=frozenset(K),
                                        q=tuple(zip(K, q)))


def _violating_tuple(ls):
    return ls if vanishing_D(ls) != 0 else None


def sweep_vanishing(max_d, l_bound, random_count=0, rng=None, workers=1):
    """Exhaustive + random exact sweep of vanishing_D.

    Returns (counts per d, violations); violations lists offending tuples.
    Exhaustive part: every tuple with d <= max_d, |l_j| <= l_bound.
    Random part: random_count tuples with d <= 6, |l_j| <= 50 from rng.
    """
    counts = {}
    violations = []
    values = range(-l_bound, l_bound + 1)
    for d in range(1, max_d + 1):
        n = 0
        tuples = itertools.product(values, repeat=d)
        if workers > 1:
            from multiprocessing import Pool
            with Pool(workers) as pool:
                for bad in pool.imap(_violating_tuple, tuples, chunksize=1024):
                    n += 1
                    if bad is not None:
                        violations.append(bad)
        else:
            for ls in tuples:
                n += 1
                if vanishing_D(ls) != 0:
                    violations.append(ls)
        counts[d] = n
    random_checked = 0
    if random_count:
        if rng is None:
            raise ValueError("random sweep needs an rng")
        for _ in range(random_count):
            d = int(rng.integers(1, 7))
            ls = tuple(int(v) for v in rng.integers(-50, 51, size=d))
            random_checked += 1
            if vanishing_D(ls) != 0:
                violations.append(ls)
    return counts, random_checked, violations


def sweep_combi(max_d, workers=1):
    """Exhaustive check of the counting identity for all instances with d <= max_d."""
    counts = {}
    violations = []
    for d in range(1, max_d + 1):
        n = 0
        for inst in iter_partition_instances(d):
            n += 1
            j_ad, k_ad, ok = combi_check(inst)
            if not ok:
                violations.append((inst, j_ad, k_ad))
        counts[d] = n
    return counts, violations


def delta_series(u, n, d_max, tol=None):
    """Truncated series for the chain defect delta_n of a trig-polynomial potential.

    Evaluates, literally, the remainder sum

        sum_{d >= 2} sum_{1 <= m <= d-1} sum_{k = m+1..d}
        sum over integer tuples (l_1..l_d) with
            l_j >= -n+1 for 1 <= j <= m and for m+1 <= j < k,
            l_k  = -n,
            l_j >= -n   for k < j <= d,
        of A(l_1..l_m) A(l_m..l_d) E_u(l_1..l_d),

    truncated at d <= d_max.  The l-sums are finite because
    E_u(l) = u_hat(l_1) u_hat(l_2-l_1) ... u_hat(l_d-l_{d-1}) u_hat(-l_d)
    vanishes unless consecutive differences lie in the support of u_hat.

    Returns (value, tail_estimate); the estimate is the geometric bound
    (5 ||u||_s)^(d_max+1).  With tol given, a tail estimate at or above tol
    raises DivergenceError (reported as unconverged).
    """
    from .hardy import sobolev_norm

    if d_max < 2:
        raise ValueError("d_max must be >= 2")
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    coef = u.nonzero_coeffs()
    if not coef:
        return 0.0 + 0.0j, 0.0
    supp = sorted(coef)
    total = 0.0 + 0.0j
    for d in range(2, d_max + 1):
        for m in range(1, d):
            for k in range(m + 1, d + 1):
                total += _remainder_block(coef, supp, n, d, m, k)
    tail = (5.0 * sobolev_norm(u, u.s)) ** (d_max + 1)
    if tol is not None and tail >= tol:
        raise DivergenceError("tail estimate %.3e not below tolerance %.3e" % (tail, tol))
    return total, tail


def _remainder_block(coef, supp, n, d, m, k):
    """Sum over tuples for fixed (d, m, k) with l_k = -n pinned."""
    lower_strict = -n + 1  # positions 1..m and m+1..k-1
    lower_loose = -n       # positions k+1..d
    acc = 0.0 + 0.0j

    def extend(pos, prev, weight, prefix):
        nonlocal acc
        if pos > d:
            # close the chain: E_u carries a final factor u_hat(-l_d)
            w = weight * coef.get(-prev, 0.0)
            if w == 0.0:
                return
            a1 = float(residue_A(prefix[:m]))
            a2 = float(residue_A(prefix[m - 1:]))
            acc += a1 * a2 * w
            return
        if pos == k:
            l = -n
            step = coef.get(l - prev, 0.0) if pos > 1 else coef.get(l, 0.0)
            if step != 0.0:
                extend(pos + 1, l, weight * step, prefix + (l,))
            return
        lo = lower_strict if pos < k else lower_loose
        if pos == 1:
            choices = [l for l in supp if l >= lo]
        else:
            choices = [prev + s for s in supp if prev + s >= lo]
        for l in choices:
            step = coef.get(l - prev, 0.0) if pos > 1 else coef.get(l, 0.0)
            extend(pos + 1, l, weight * step, prefix + (l,))

    extend(1, 0, 1.0 + 0.0j, ())
    return acc


@lru_cache(maxsize=None)
def _residue_with_pole_shift(ls, n):
    """Exact (1/2pi i) oint (1/(n+mu)) mu^-1 prod (l_j - mu)^-1 dmu.

    The factor 1/(n+mu) is analytic inside the contour for n >= 1 and is
    expanded as sum (-1)^k mu^k / n^(k+1).
    """
    zeros = sum(1 for l in ls if l == 0)
    nonzero = tuple(l for l in ls if l != 0)
    order = zeros
    series = _product_series(nonzero, order)
    shift = [Fraction((-1) ** k, n ** (k + 1)) for k in range(order + 1)]
    series = _series_mul(series, shift, order)
    value = series[order]
    return -value if zeros % 2 else value


def psi_series(u, n, d_max):
    """Taylor sum of the zero-mode component of the projected basis vector.

    First-order term -u_hat(-n)/n, plus for each m >= 1 (degree m+1 <= d_max)
    the finite sum over tuples (l_1..l_m), l_j >= -n, of

        - (1/2pi i) oint (1/(n+mu)) (1/mu)
              u_hat(-n-l_m)/(l_m-mu) ... u_hat(l_2-l_1)/(l_1-mu) u_hat(l_1) dmu.

    Returns (value, per-degree magnitudes); the magnitudes let the caller
    verify contraction.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    coef = u.nonzero_coeffs()
    supp = sorted(coef)
    value = -coef.get(-n, 0.0) / n
    per_degree = [abs(value)]
    for m in range(1, d_max):
        term = 0.0 + 0.0j

        def extend(pos, prev, weight, prefix):
            nonlocal term
            if pos > m:
                w = weight * coef.get(-n - prev, 0.0)
                if w == 0.0:
                    return
                term += -float(_residue_with_pole_shift(prefix, n)) * w
                return
            if pos == 1:
                choices = [l for l in supp if l >= -n]
            else:
                choices = [prev + s for s in supp if prev + s >= -n]
            for l in choices:
                step = coef.get(l - prev, 0.0) if pos > 1 else coef.get(l, 0.0)
                extend(pos + 1, l, weight * step, prefix + (l,))

        extend(1, 0, 1.0 + 0.0j, ())
        value += term
        per_degree.append(abs(term))
    return value, per_degree
