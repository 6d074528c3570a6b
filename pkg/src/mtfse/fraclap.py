"""Galerkin matrix of the fractional Laplacian in the Malmquist-Takenaka basis.

The Fourier transform carries phi_n to (-i)^n Psi_n, where Psi_n are
one-sided Laguerre functions, so the stiffness entries

    A_{j,k} = ( |xi|^alpha F[phi_k], F[phi_j] )
            = i^(j-k) int_0^inf xi^alpha e^(-xi) L_{k'} L_{j'} dxi

split into two decoupled blocks by the sign of the Laurent index
(k' = k for k >= 0, k' = -k-1 for k < 0).  Expanding the Laguerre
polynomials in the alpha-weighted family evaluates the integral in
closed form: with

    beta_{l,n} = ((-alpha)_{n-l} / (n-l)!) sqrt((alpha+1)_l / l!),

the nonnegative block is C = Gamma(alpha+1) * (i^(j-k))_{j,k} o (B B^T),
B lower triangular with B[n, l] = beta_{l,n} (o = entrywise product).
The Gamma(alpha+1) factor comes from the alpha-weighted norms
Gamma(l+alpha+1)/l! = Gamma(alpha+1) (alpha+1)_l / l!; it is invisible at
alpha = 1 and is pinned down here by the quadrature oracle.

The negative-index block is the entrywise conjugate of the
order-reversed core: A_{-j-1,-k-1} = conj(C_{j,k}).  (This follows from
phi_{-n-1} = -i conj(phi_n) and is confirmed by the oracle; the
order-reversal alone, without the conjugation, is not Hermitian-consistent
with the defining integral.)

Dilating the basis by nu rescales the whole matrix by nu^(-alpha).
"""

from dataclasses import dataclass
from math import gamma as _gamma

import numpy as np

from .special import ipow, laguerre_table, pochhammer_seq, terminating_2f1

__all__ = [
    "FracLapOperator",
    "beta_coeff",
    "beta_matrix",
    "assemble_core",
    "assemble_core_alpha1",
    "assemble_full",
    "frac_laplacian_mtf",
    "oracle_entry",
    "oracle_core",
]


def beta_coeff(l: int, n: int, alpha: float) -> float:
    """Triangular factor beta_{l,n} = ((-alpha)_{n-l}/(n-l)!) sqrt((alpha+1)_l / l!).

    Vanishes for alpha = 1 whenever n - l > 1, which is what collapses the
    core matrix to tridiagonal form in that case.
    """
    if l < 0 or l > n:
        raise ValueError(f"need 0 <= l <= n, got l={l}, n={n}")
    m = n - l
    num = pochhammer_seq(-alpha, m)[m] / _factorial(m)
    inner = pochhammer_seq(alpha + 1.0, l)[l] / _factorial(l)
    return num * np.sqrt(inner)


def _factorial(m: int) -> float:
    return float(_gamma(m + 1.0))


def beta_matrix(N: int, alpha: float) -> np.ndarray:
    """Lower-triangular B with B[n, l] = beta_{l,n}, built by running products."""
    ratios_neg = np.empty(N)  # (-alpha)_m / m!
    ratios_pos = np.empty(N)  # (alpha+1)_l / l!
    ratios_neg[0] = 1.0
    ratios_pos[0] = 1.0
    for m in range(1, N):
        ratios_neg[m] = ratios_neg[m - 1] * (-alpha + m - 1) / m
        ratios_pos[m] = ratios_pos[m - 1] * (alpha + m) / m
    sqrt_pos = np.sqrt(ratios_pos)
    B = np.zeros((N, N))
    for n in range(N):
        B[n, : n + 1] = ratios_neg[n::-1] * sqrt_pos[: n + 1]
    return B


def assemble_core(N: int, alpha: float) -> np.ndarray:
    """Hermitian core block C for Laurent indices 0..N-1 at scaling 1.

    C = Gamma(alpha+1) * phase o (B B^T) with phase[j,k] = i^(j-k); building
    the lower triangle and mirroring keeps Hermiticity exact.
    """
    if N < 1:
        raise ValueError(f"need at least one mode, got N = {N}")
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"alpha must lie in (0, 2), got {alpha}")
    B = beta_matrix(N, alpha)
    G = _gamma(alpha + 1.0) * (B @ B.T)
    jk = np.arange(N)
    phase = ipow(jk[:, None] - jk[None, :])
    C = phase * G
    lower = np.tril(C)
    return lower + np.conj(np.tril(C, -1)).T


def assemble_core_alpha1(N: int) -> np.ndarray:
    """Closed tridiagonal core at alpha = 1: entries j(-i), 2j+1, (j+1)i."""
    if N < 1:
        raise ValueError(f"need at least one mode, got N = {N}")
    j = np.arange(N)
    C = np.zeros((N, N), dtype=complex)
    C[j, j] = 2 * j + 1
    C[j[:-1], j[:-1] + 1] = (j[:-1] + 1) * 1j
    C[j[:-1] + 1, j[:-1]] = -(j[:-1] + 1) * 1j
    return C


@dataclass(frozen=True)
class FracLapOperator:
    """Assembled fractional-Laplacian operator for a 2N-mode expansion.

    ``core`` is the unscaled nonnegative-index block; the full matrix
    carries the nu^(-alpha) dilation factor.  ``bounds`` encloses the
    spectrum of nu^(-alpha) core (and hence of the full matrix, whose two
    blocks are spectrally identical).
    """

    alpha: float
    n_modes: int
    scaling: float
    core: np.ndarray
    bounds: tuple

    @property
    def size(self) -> int:
        return 2 * self.n_modes

    def full_matrix(self) -> np.ndarray:
        """Dense 2N x 2N block-diagonal matrix including the scaling factor."""
        N = self.n_modes
        A = np.zeros((2 * N, 2 * N), dtype=complex)
        scale = self.scaling ** (-self.alpha)
        A[N:, N:] = scale * self.core
        # row r <-> Laurent -N+r <-> core index N-1-r, conjugated
        A[:N, :N] = scale * np.conj(self.core[::-1, ::-1])
        return A


def spectral_bounds(C: np.ndarray, mode: str = "psd") -> tuple:
    """Interval [zeta, eta] enclosing the spectrum of a Hermitian matrix.

    "psd": zeta = 0 (valid for the positive-semidefinite core), eta the
    smaller of the Gershgorin row bound and the 1-norm.  "one_norm": the
    symmetric fallback eta = -zeta = ||C||_1.
    """
    one_norm = float(np.max(np.sum(np.abs(C), axis=0)))
    if mode == "one_norm":
        return (-one_norm, one_norm)
    if mode != "psd":
        raise ValueError(f"unknown bounds mode {mode!r}")
    radii = np.sum(np.abs(C), axis=1) - np.abs(np.diag(C))
    gersh_hi = float(np.max(np.real(np.diag(C)) + radii))
    return (0.0, min(gersh_hi, one_norm))


def assemble_full(N: int, alpha: float, nu: float = 1.0, bounds_mode: str = "psd") -> FracLapOperator:
    """Assemble the operator for Laurent indices -N..N-1 at scaling nu."""
    if not nu > 0:
        raise ValueError(f"scaling must be positive, got {nu}")
    core = assemble_core(N, alpha)
    scale = nu ** (-alpha)
    zeta, eta = spectral_bounds(core, bounds_mode)
    return FracLapOperator(alpha, N, nu, core, (scale * zeta, scale * eta))


def frac_laplacian_mtf(n: int, alpha: float, x) -> complex:
    """Pointwise fractional Laplacian of phi_n (unscaled basis).

    Terminating-hypergeometric closed form; the two branches mirror each
    other through Psi_n(x) = -Psi_{-n-1}(-x).  Principal branch of the
    complex power.
    """
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"alpha must lie in (0, 2), got {alpha}")
    x = np.asarray(x, dtype=float)
    pref = _gamma(alpha + 1.0) / np.sqrt(2.0 * np.pi)
    phase = np.conj(ipow(n))
    if n >= 0:
        w = 0.5 - 1j * x
        f21 = np.vectorize(lambda ww: terminating_2f1(n, alpha + 1.0, 1.0 / ww))(w)
        val = pref * phase / w ** (alpha + 1.0) * f21
    else:
        m = -n - 1
        w = 0.5 + 1j * x
        f21 = np.vectorize(lambda ww: terminating_2f1(m, alpha + 1.0, 1.0 / ww))(w)
        val = -pref * phase / w ** (alpha + 1.0) * f21
    return val if val.ndim else complex(val)


# -- brute-force quadrature oracle ------------------------------------------

def laguerre_weight_rule(x_max: float, points_per_panel: int = 12):
    """Composite Gauss-Legendre rule on [0, x_max], geometrically graded at 0.

    The grading handles the xi^alpha endpoint derivative singularity for
    fractional alpha; unit panels elsewhere resolve the Laguerre
    oscillations for degrees up to a few hundred.
    """
    edges = np.concatenate(
        [
            [0.0],
            2.0 ** np.arange(-42.0, 0.0),
            np.arange(1.0, np.ceil(x_max) + 1.0),
        ]
    )
    edges = edges[edges <= x_max]
    if edges[-1] < x_max:
        edges = np.append(edges, x_max)
    nodes, weights = np.polynomial.legendre.leggauss(points_per_panel)
    a = edges[:-1]
    b = edges[1:]
    xq = (0.5 * (b - a)[:, None] * nodes[None, :] + 0.5 * (a + b)[:, None]).ravel()
    wq = (0.5 * (b - a)[:, None] * weights[None, :]).ravel()
    return xq, wq


def oracle_core(N: int, alpha: float) -> np.ndarray:
    """All core entries by quadrature of i^(j-k) int xi^alpha e^-xi L_k L_j.

    Independent of the closed-form assembly.  The weighted Laguerre
    functions e^(-xi/2) L_n(xi) are tabulated to keep the integrand
    bounded; the domain extends past the oscillatory region ~4N.
    """
    x_max = 4.0 * N + 90.0
    xq, wq = laguerre_weight_rule(x_max)
    tab = _weighted_laguerre_table(N - 1, xq)
    gram = (tab * (wq * xq**alpha)) @ tab.T
    jk = np.arange(N)
    phase = ipow(jk[:, None] - jk[None, :])
    return phase * gram


def oracle_entry(j: int, k: int, alpha: float) -> complex:
    """Single quadrature entry i^(j-k) int xi^alpha e^-xi L_k L_j dxi, j, k >= 0."""
    if j < 0 or k < 0:
        raise ValueError("oracle covers the nonnegative-index core block")
    n = max(j, k)
    x_max = 4.0 * (n + 1) + 90.0
    xq, wq = laguerre_weight_rule(x_max)
    tab = _weighted_laguerre_table(n, xq)
    val = np.sum(wq * xq**alpha * tab[j] * tab[k])
    return complex(ipow(j - k) * val)


def _weighted_laguerre_table(n_max: int, x: np.ndarray) -> np.ndarray:
    # e^(-x/2) L_n(x) obeys the plain Laguerre recurrence with a bounded seed
    tab = laguerre_table(n_max, 0.0, x)
    tab *= np.exp(-0.5 * x)[None, :]
    return tab
