"""Special-function kernels: log-gamma, Gegenbauer evaluation, Gauss-Jacobi rules.

Everything downstream (spectral sequences, quadrature on the sphere,
kernel eigenvalues) reduces to three primitives kept here: a Lanczos
log-gamma on the positive half line, Gegenbauer polynomials by their
three-term recurrence, and Gauss-Jacobi nodes/weights found by Newton
iteration on the Jacobi recurrence.
"""

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

# Lanczos approximation, g = 7, 9 terms.  Relative error below 1e-14 on
# the positive real axis, which is the only domain we use.
_LANCZOS_G = 7.0
_LANCZOS_C = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])


def log_gamma(x):
    """Natural log of the gamma function for real x > 0.

    Accepts scalars or arrays.  Values outside the domain raise rather
    than propagate NaNs, since a negative argument here always means a
    parameter bug upstream.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("log_gamma requires x > 0")
    z = x - 1.0
    acc = np.full(np.shape(z), _LANCZOS_C[0])
    for i in range(1, len(_LANCZOS_C)):
        acc = acc + _LANCZOS_C[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    out = 0.5 * np.log(TWO_PI) + (z + 0.5) * np.log(t) - t + np.log(acc)
    return out if out.ndim else float(out)


def gamma_ratio(a, b):
    """Gamma(a)/Gamma(b) for positive a, b, computed in log space.

    Stable for arguments where the individual gamma values would
    overflow (a, b up to ~1e300 in principle; we only ever need a few
    hundred).
    """
    return np.exp(log_gamma(a) - log_gamma(b))


def gegenbauer(k, alpha, z):
    """Evaluate the Gegenbauer polynomial C_k^(alpha) at z.

    alpha = 0 uses the Chebyshev normalization cos(k arccos z), which is
    the correct degenerate limit for the circle; the standard recurrence
    collapses to zero there and is useless.
    """
    row = gegenbauer_all(k, alpha, z)[k]
    return row if np.ndim(z) else float(row[0])


def gegenbauer_all(kmax, alpha, z):
    """All Gegenbauer polynomials C_0 .. C_kmax at z, shape (kmax+1, len(z)).

    Three-term recurrence; for alpha = 0 the Chebyshev recurrence is used
    instead (same recursion, different first-degree seed and meaning).
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(np.abs(z) > 1.0):
        raise ValueError("Gegenbauer argument must lie in [-1, 1]")
    out = np.empty((kmax + 1, z.size))
    out[0] = 1.0
    if kmax == 0:
        return out
    if alpha == 0.0:
        out[1] = z
        for k in range(2, kmax + 1):
            out[k] = 2.0 * z * out[k - 1] - out[k - 2]
        return out
    out[1] = 2.0 * alpha * z
    for k in range(2, kmax + 1):
        out[k] = (2.0 * z * (k + alpha - 1.0) * out[k - 1]
                  - (k + 2.0 * alpha - 2.0) * out[k - 2]) / k
    return out


def gegenbauer_at_one(k, alpha):
    """C_k^(alpha)(1) = Gamma(k + 2 alpha) / (k! Gamma(2 alpha)); 1 if alpha = 0."""
    if alpha == 0.0:
        return 1.0
    return float(np.exp(log_gamma(k + 2.0 * alpha)
                        - log_gamma(k + 1.0) - log_gamma(2.0 * alpha)))


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Jacobi rule for the weight (1-z)^a (1+z)^b on [-1, 1].

    nodes are ascending, weights are the raw Jacobi weights;
    normalization is 1 / mu0 with mu0 the exact total mass, so
    weights * normalization is a probability measure.
    """

    a: float
    b: float
    nodes: np.ndarray
    weights: np.ndarray
    normalization: float

    @property
    def prob_weights(self):
        return self.weights * self.normalization

    def __len__(self):
        return self.nodes.size


def _jacobi_eval(m, a, b, x):
    """P_m^(a,b)(x) together with P_{m-1}; vectorized in x.

    Runs in whatever float dtype x carries, so the final polishing pass
    can call it with extended precision.
    """
    x = np.asarray(x)
    pm1 = np.ones_like(x)
    if m == 0:
        return pm1, np.zeros_like(x)
    pm = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x
    for j in range(2, m + 1):
        # j = 1 is seeded explicitly: the generic recurrence degenerates
        # when a + b = 0 or -1.
        c1 = 2.0 * j * (j + a + b) * (2.0 * j + a + b - 2.0)
        c2 = (2.0 * j + a + b - 1.0) * (a * a - b * b)
        c3 = (2.0 * j + a + b - 1.0) * (2.0 * j + a + b) * (2.0 * j + a + b - 2.0)
        c4 = 2.0 * (j + a - 1.0) * (j + b - 1.0) * (2.0 * j + a + b)
        pm, pm1 = ((c2 + c3 * x) * pm - c4 * pm1) / c1, pm
    return pm, pm1


def _jacobi_deriv(m, a, b, x, pm, pm1):
    # valid only at interior points (1 - x^2 != 0)
    return (m * (a - b - (2.0 * m + a + b) * x) * pm
            + 2.0 * (m + a) * (m + b) * pm1) / ((2.0 * m + a + b) * (1.0 - x * x))


def gauss_jacobi(m, a, b):
    """m-point Gauss-Jacobi rule for the weight (1-z)^a (1+z)^b, a, b > -1.

    Roots are bracketed by a sign scan on a fine Chebyshev-angle grid and
    then polished with safeguarded Newton steps on the Jacobi recurrence.
    The last Newton step and the weight formula

        w_i = 2^(a+b+1) * Gamma(m+a+1) Gamma(m+b+1)
              / (Gamma(m+a+b+1) m! (1 - x_i^2) P_m'(x_i)^2)

    run in extended precision: at the extreme roots the recurrence value
    feeding P' is small against the oscillation envelope, which costs
    about m^2 ulps of relative accuracy in double and would push the
    integration error of large rules above 1e-12.  (On platforms where
    long double is an alias for double this protection degrades
    gracefully to roughly that level.)  Weights are then rescaled so the
    total mass matches the closed-form moment exactly.
    """
    if m < 1:
        raise ValueError("need at least one node")
    if a <= -1.0 or b <= -1.0:
        raise ValueError("Jacobi exponents must exceed -1")

    # offset Chebyshev-angle scan grid: an aligned grid would land exactly
    # on roots for half-integer exponents and defeat the sign test
    theta = (np.arange(8 * m) + 0.3183098861837907) * np.pi / (8 * m)
    grid = np.concatenate([[-1.0], np.cos(theta)[::-1], [1.0]])
    vals, _ = _jacobi_eval(m, a, b, grid)
    vals = np.where(vals == 0.0, 1e-300, vals)
    sgn = np.sign(vals)
    idx = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
    if idx.size != m:
        raise RuntimeError(f"bracketing found {idx.size} roots, expected {m}")

    lo, hi = grid[idx].copy(), grid[idx + 1].copy()
    flo = vals[idx].copy()
    x = 0.5 * (lo + hi)
    for _ in range(60):
        pm, pm1 = _jacobi_eval(m, a, b, x)
        dp = _jacobi_deriv(m, a, b, x, pm, pm1)
        # an exact zero is a converged root: pin the bracket there, since
        # carrying flo = 0 forward would disable the sign test
        exact = pm == 0.0
        shrink_hi = pm * flo < 0
        hi = np.where(exact, x, np.where(shrink_hi, x, hi))
        lo = np.where(exact, x, np.where(shrink_hi, lo, x))
        flo = np.where(exact | shrink_hi, flo, pm)
        xn = np.where(exact, x, x - pm / dp)
        bad = (xn <= lo) | (xn >= hi) | ~np.isfinite(xn)
        xn = np.where(bad & ~exact, 0.5 * (lo + hi), xn)
        done = np.abs(xn - x) <= 1e-16 * (1.0 + np.abs(xn))
        x = xn
        if done.all():
            break

    # extended-precision polish: two more Newton steps, then the weights
    xe = x.astype(np.longdouble)
    for _ in range(2):
        pm, pm1 = _jacobi_eval(m, a, b, xe)
        dp = _jacobi_deriv(m, a, b, xe, pm, pm1)
        xe = xe - pm / dp
    pm, pm1 = _jacobi_eval(m, a, b, xe)
    dp = _jacobi_deriv(m, a, b, xe, pm, pm1)
    logc = (log_gamma(m + a + 1.0) + log_gamma(m + b + 1.0)
            - log_gamma(m + a + b + 1.0) - log_gamma(m + 1.0)
            + (a + b + 1.0) * np.log(2.0))
    w = np.exp(np.longdouble(logc)) / ((1.0 - xe * xe) * dp * dp)

    mu0 = np.exp((a + b + 1.0) * np.log(2.0) + log_gamma(a + 1.0)
                 + log_gamma(b + 1.0) - log_gamma(a + b + 2.0))
    w *= np.longdouble(mu0) / w.sum()
    return QuadratureRule(a=a, b=b, nodes=xe.astype(float),
                          weights=w.astype(float), normalization=1.0 / mu0)


def sphere_rule(n, m):
    """Quadrature in the latitude variable z for the uniform probability
    measure on the n-sphere: weight (1-z^2)^((n-2)/2), normalized mass 1.
    """
    e = 0.5 * (n - 2.0)
    return gauss_jacobi(m, e, e)
