"""Self-contained special functions used by the spectral solver.

Everything here is evaluated by elementary recurrences or short power
series, on the restricted parameter ranges the solver actually needs.
No calls into gamma functions with large arguments, so nothing can
overflow for basis sizes up to ~1024.
"""

import math

import numpy as np

__all__ = [
    "ipow",
    "laguerre",
    "laguerre_table",
    "pochhammer_seq",
    "bessel_j",
    "bessel_j_seq",
    "terminating_2f1",
]

_I_POWERS = np.array([1.0 + 0.0j, 0.0 + 1.0j, -1.0 + 0.0j, 0.0 - 1.0j])


def ipow(k):
    """Exact i^k for integer k (scalar or array).

    Floating-point complex powers like (1j)**3 carry ~1e-16 dirt in the
    real part; a period-4 table keeps basis phases bit-exact.
    """
    return _I_POWERS[np.mod(k, 4)]


def laguerre(n, alpha, x):
    """Generalized Laguerre polynomial L_n^(alpha)(x) by forward recurrence.

    The recurrence (k+1) L_{k+1} = (2k+1+alpha-x) L_k - (k+alpha) L_{k-1}
    is stable on the (n, x) ranges used here (n <= ~1024, x in [0, ~300]).

    Parameters
    ----------
    n : int
        Degree, n >= 0.
    alpha : float
        Order, alpha > -1.
    x : float or ndarray
        Argument(s).
    """
    if n < 0:
        raise ValueError(f"degree must be nonnegative, got {n}")
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p = 1.0 + alpha - x
    for k in range(1, n):
        p, p_prev = ((2 * k + 1 + alpha - x) * p - (k + alpha) * p_prev) / (k + 1), p
    return p if p.ndim else float(p)


def laguerre_table(n_max, alpha, x):
    """All L_n^(alpha)(x) for n = 0..n_max, stacked along the first axis.

    Shares the forward recurrence across the whole x array; used by the
    quadrature oracle for the stiffness matrix.
    """
    if n_max < 0:
        raise ValueError(f"degree must be nonnegative, got {n_max}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 + alpha - x
    for k in range(1, n_max):
        out[k + 1] = ((2 * k + 1 + alpha - x) * out[k] - (k + alpha) * out[k - 1]) / (k + 1)
    return out


def pochhammer_seq(z, n_max):
    """Rising factorials (z)_0, ..., (z)_{n_max} by the product recurrence.

    (z)_n = (z)_{n-1} (z + n - 1), (z)_0 = 1.  Incremental products avoid
    gamma-function poles at nonpositive arguments: (-alpha)_m with
    alpha in (0, 2) passes through zero exactly when it should.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be nonnegative, got {n_max}")
    out = np.empty(n_max + 1)
    out[0] = 1.0
    for n in range(1, n_max + 1):
        out[n] = out[n - 1] * (z + n - 1)
    return out


_BESSEL_X_MAX = 3.0


def bessel_j(k, x):
    """Bessel function J_k(x) for integer k >= 0 and 0 <= x <= 3.

    Ascending power series; 25 terms put the truncation error far below
    1e-15 on this range.  Arguments beyond 3 are rejected: the matrix
    exponential caps its Chebyshev argument at 2.212 by scaling and
    squaring, so nothing larger is ever needed.
    """
    if k < 0:
        raise ValueError(f"order must be nonnegative, got {k}")
    if not 0.0 <= x <= _BESSEL_X_MAX:
        raise ValueError(f"argument {x} outside [0, {_BESSEL_X_MAX}]")
    # J_k(x) = sum_m (-1)^m (x/2)^(2m+k) / (m! (m+k)!)
    q = 0.25 * x * x
    term = (0.5 * x) ** k / math.factorial(k) if k < 21 else _half_pow_over_fact(0.5 * x, k)
    total = term
    for m in range(1, 25):
        term *= -q / (m * (m + k))
        total += term
    return total


def _half_pow_over_fact(h, k):
    # h^k / k! without overflow for large k
    val = 1.0
    for i in range(1, k + 1):
        val *= h / i
    return val


def bessel_j_seq(k_max, x):
    """J_0(x), ..., J_{k_max}(x) on the series-validated range [0, 3]."""
    return np.array([bessel_j(k, x) for k in range(k_max + 1)])


def terminating_2f1(n, a, z):
    """Terminating Gauss hypergeometric sum 2F1(-n, a; 1; z).

    Equals sum_{m=0}^{n} (-n)_m (a)_m / ((1)_m m!) z^m, a polynomial of
    degree n in z; computed by the incremental term ratio.
    """
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    z = complex(z)
    total = 1.0 + 0j
    term = 1.0 + 0j
    for m in range(n):
        term *= (m - n) * (a + m) * z / ((1 + m) * (m + 1))
        total += term
    return total
