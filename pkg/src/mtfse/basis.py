"""Malmquist-Takenaka basis on the real line: evaluation and FFT transforms.

The basis functions are the rational orthonormal system

    phi_n(x) = i^n sqrt(2/pi) (1 + 2ix)^n / (1 - 2ix)^(n+1),    n in Z,

optionally dilated by a scaling parameter nu > 0,
phi_n^S(x) = nu^(-1/2) phi_n(x/nu).  Under the angle substitution
x = nu tan(theta/2) / 2 they collapse to weighted complex exponentials,

    phi_n^S(x(theta)) = nu^(-1/2) sqrt(2/pi) cos(theta/2) e^(i(2n+1)theta/2),

which is what makes single-FFT analysis and synthesis possible and is
also the numerically stable way to evaluate phi_n pointwise.

Index conventions (fixed, bit-exact)
------------------------------------
A coefficient vector of length 2N stores Laurent index k = j - N in
array slot j, k = -N..N-1.  The uniform angle grid is
theta_j = -pi + pi*j/N, j = 0..2N-1; theta_0 = -pi maps to x = -inf.
With F = numpy.fft.fft (negative exponent, unnormalized),

    analyze:     a_k = i^k  sqrt(pi/2) sqrt(nu) / (2N) * F[g][k mod 2N],
                 g_j = f(x_j) (1 - i tan(theta_j/2)),  g_0 = f.value_at_infinity
    synthesize:  s_j = 2N * IFFT[d][j],  d[k mod 2N] = zeta_k (-i)^k,
                 psi(x_j) = nu^(-1/2) sqrt(2/pi) cos(theta_j/2) e^(i theta_j/2) s_j

The i^k / (-i)^k phases absorb e^(-ik theta_j) = (-1)^k e^(-2 pi i jk / 2N).

A comparison family of mapped Chebyshev functions
T_k(x) = T_k(x/sqrt(1+x^2)) / (sqrt(c_k pi/2) sqrt(1+x^2)) is provided
for approximation benchmarks only; it plays no role in the solver.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .special import ipow

__all__ = [
    "SpectralState",
    "ThetaGrid",
    "SampledFunction",
    "eval_mtf",
    "analyze",
    "synthesize",
    "synthesize_at_nodes",
    "pad_state",
    "diff_matrix",
    "mcf_eval",
    "mcf_analyze",
    "mcf_synthesize",
]

_SQRT_2_OVER_PI = np.sqrt(2.0 / np.pi)


@dataclass(frozen=True)
class SpectralState:
    """Coefficient vector of a truncated expansion, with its basis size and scaling.

    coeffs[j] holds the coefficient of phi_k^S with k = j - n_modes.
    By orthonormality the L2 norm of the represented function equals the
    Euclidean norm of ``coeffs``.
    """

    coeffs: np.ndarray
    n_modes: int
    scaling: float = 1.0

    def __post_init__(self):
        c = np.ascontiguousarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size != 2 * self.n_modes:
            raise ValueError(
                f"coefficient vector must have length 2N = {2 * self.n_modes}, got {c.shape}"
            )
        if not self.scaling > 0:
            raise ValueError(f"scaling must be positive, got {self.scaling}")
        object.__setattr__(self, "coeffs", c)

    @property
    def laurent_indices(self):
        return np.arange(-self.n_modes, self.n_modes)

    def norm(self):
        return float(np.linalg.norm(self.coeffs))


@dataclass(frozen=True)
class ThetaGrid:
    """The 2N-point uniform angle grid and its image on the real line.

    nodes[0] = -pi maps to x = -inf (stored as -inf); the remaining
    mapped nodes are finite and strictly increasing.
    """

    n_modes: int
    scaling: float = 1.0
    nodes: np.ndarray = field(init=False)
    mapped_nodes: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError(f"need at least one mode, got N = {self.n_modes}")
        if not self.scaling > 0:
            raise ValueError(f"scaling must be positive, got {self.scaling}")
        N = self.n_modes
        j = np.arange(2 * N)
        theta = -np.pi + np.pi * j / N
        x = np.empty(2 * N)
        x[0] = -np.inf
        x[1:] = self.scaling * np.tan(theta[1:] / 2.0) / 2.0
        object.__setattr__(self, "nodes", theta)
        object.__setattr__(self, "mapped_nodes", x)

    @property
    def finite_nodes(self):
        return self.mapped_nodes[1:]


@dataclass(frozen=True)
class SampledFunction:
    """A function of x together with its angle-endpoint limit.

    ``value_at_infinity`` is the limit of f(x) (1 - 2ix/nu) as |x| -> inf
    for the scaling nu the function will be analyzed with (it is the
    sample the transforms use at theta = -pi).  Zero for anything that
    decays faster than 1/x, which is every function used here except the
    rational wave packet (ix+10)/(x^2+4).
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    value_at_infinity: complex = 0.0

    def __post_init__(self):
        if not np.isfinite(self.value_at_infinity):
            raise ValueError("value_at_infinity must be finite")

    def __call__(self, x):
        return np.asarray(self.evaluator(x), dtype=complex)


def _as_sampled(f) -> SampledFunction:
    return f if isinstance(f, SampledFunction) else SampledFunction(f)


def eval_mtf(n: int, x, nu: float = 1.0):
    """Evaluate the scaled basis function phi_n^S(x) = nu^(-1/2) phi_n(x/nu).

    Uses the angle form phi_n = i^n sqrt(2/pi) cos(theta/2) e^(i(2n+1)theta/2)
    with theta = 2 arctan(2x/nu), which is stable for any n (both the
    direct numerator and denominator powers would overflow around
    |n| ~ 500 for moderate x).
    """
    if not nu > 0:
        raise ValueError(f"scaling must be positive, got {nu}")
    x = np.asarray(x, dtype=float)
    theta = 2.0 * np.arctan(2.0 * x / nu)
    val = (
        ipow(n)
        * _SQRT_2_OVER_PI
        / np.sqrt(nu)
        * np.cos(theta / 2.0)
        * np.exp(1j * (2 * n + 1) * theta / 2.0)
    )
    return val if val.ndim else complex(val)


def analyze(f, N: int, nu: float = 1.0) -> SpectralState:
    """Expansion coefficients a_k, k = -N..N-1, by one FFT of length 2N.

    The trapezoidal rule on the angle grid is exact (to roundoff) for any
    f already in the span of phi_k^S, k = -N..N-1, and spectrally accurate
    otherwise.  ``f`` may be a plain callable or a SampledFunction; the
    sample at theta = -pi is the declared value at infinity.
    """
    if N < 1:
        raise ValueError(f"need at least one mode, got N = {N}")
    if not nu > 0:
        raise ValueError(f"scaling must be positive, got {nu}")
    f = _as_sampled(f)
    grid = ThetaGrid(N, nu)
    theta = grid.nodes
    g = np.empty(2 * N, dtype=complex)
    g[0] = f.value_at_infinity
    g[1:] = f(grid.mapped_nodes[1:]) * (1.0 - 1j * np.tan(theta[1:] / 2.0))
    F = np.fft.fft(g)
    k = np.arange(-N, N)
    coeffs = ipow(k) * (np.sqrt(np.pi / 2.0) * np.sqrt(nu) / (2 * N)) * F[np.mod(k, 2 * N)]
    return SpectralState(coeffs, N, nu)


def synthesize(state: SpectralState, xs) -> np.ndarray:
    """Pointwise values of the expansion at arbitrary finite points."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    N, nu = state.n_modes, state.scaling
    theta = 2.0 * np.arctan(2.0 * xs / nu)
    k = state.laurent_indices
    phases = np.exp(1j * np.outer(theta, k))
    weighted = state.coeffs * ipow(k)
    s = phases @ weighted
    return _SQRT_2_OVER_PI / np.sqrt(nu) * np.cos(theta / 2.0) * np.exp(1j * theta / 2.0) * s


def synthesize_at_nodes(state: SpectralState) -> np.ndarray:
    """Values at the 2N mapped grid nodes via one inverse FFT.

    The node at theta = -pi (x = -inf) gets the limit value 0: every
    basis function vanishes there.
    """
    N, nu = state.n_modes, state.scaling
    s = _envelope_sum_at_nodes(state)
    theta = ThetaGrid(N, nu).nodes
    out = _SQRT_2_OVER_PI / np.sqrt(nu) * np.cos(theta / 2.0) * np.exp(1j * theta / 2.0) * s
    out[0] = 0.0  # cos(-pi/2) dirt; the basis vanishes at infinity exactly
    return out


def _envelope_sum_at_nodes(state: SpectralState) -> np.ndarray:
    """The inner sum s(theta_j) = sum_k zeta_k i^k e^(ik theta_j), by inverse FFT."""
    N = state.n_modes
    k = state.laurent_indices
    d = np.zeros(2 * N, dtype=complex)
    d[np.mod(k, 2 * N)] = state.coeffs * np.conj(ipow(k))
    return 2 * N * np.fft.ifft(d)


def pad_state(state: SpectralState, n_modes: int) -> SpectralState:
    """Zero-pad (in Laurent index) to a larger basis size."""
    if n_modes < state.n_modes:
        raise ValueError("can only pad to a larger basis")
    if n_modes == state.n_modes:
        return state
    shift = n_modes - state.n_modes
    c = np.zeros(2 * n_modes, dtype=complex)
    c[shift : shift + 2 * state.n_modes] = state.coeffs
    return SpectralState(c, n_modes, state.scaling)


def diff_matrix(N: int) -> np.ndarray:
    """Differentiation matrix on coefficients, Laurent indices -N..N-1.

    Columns hold the three-term derivative recurrence
    d/dx phi_n = -n phi_{n-1} + i(2n+1) phi_n + (n+1) phi_{n+1},
    truncated at the block edges.  Skew-Hermitian and tridiagonal; for a
    scaled basis the matrix is this divided by nu.
    """
    if N < 1:
        raise ValueError(f"need at least one mode, got N = {N}")
    n = np.arange(-N, N)
    D = np.zeros((2 * N, 2 * N), dtype=complex)
    D[np.arange(2 * N), np.arange(2 * N)] = 1j * (2 * n + 1)
    # column n, row n-1 gets -n; column n, row n+1 gets n+1
    D[np.arange(2 * N - 1), np.arange(1, 2 * N)] = -n[1:]
    D[np.arange(1, 2 * N), np.arange(2 * N - 1)] = n[:-1] + 1
    return D


# -- mapped Chebyshev comparison family ------------------------------------

def mcf_eval(k: int, x, nu: float = 1.0):
    """Mapped Chebyshev function T_k at x/nu, orthonormalized, times nu^(-1/2)."""
    if k < 0:
        raise ValueError(f"index must be nonnegative, got {k}")
    if not nu > 0:
        raise ValueError(f"scaling must be positive, got {nu}")
    x = np.asarray(x, dtype=float) / nu
    c_k = 2.0 if k == 0 else 1.0
    t = x / np.sqrt(1.0 + x * x)
    return np.cos(k * np.arccos(t)) / (np.sqrt(c_k * np.pi / 2.0) * np.sqrt(1.0 + x * x) * np.sqrt(nu))


def mcf_analyze(f, n_terms: int, nu: float = 1.0, n_quad: int = None,
                xf_limits: tuple = None) -> np.ndarray:
    """Mapped Chebyshev coefficients by the trapezoidal rule in the angle.

    Substituting x/nu = cot(theta) turns the coefficient integrals into
    cosine integrals over (0, pi).  The two endpoints sit at x = +inf
    (theta = 0) and x = -inf (theta = pi), where the integrand limits to
    (1/nu) lim x f(x); pass those limits as ``xf_limits = (L+, L-)`` when
    they differ, otherwise both are derived from the declared value at
    infinity (zero for anything decaying faster than 1/x).  Comparison
    use only.
    """
    if n_terms < 1:
        raise ValueError(f"need at least one term, got {n_terms}")
    f = _as_sampled(f)
    if xf_limits is None:
        # value_at_infinity = -(2i/nu) lim x f(x), assumed equal on both sides
        lim = 0.5j * nu * f.value_at_infinity
        xf_limits = (lim, lim)
    M = 2 * n_terms if n_quad is None else n_quad
    theta = np.pi * np.arange(M + 1) / M
    vals = np.empty(M + 1, dtype=complex)
    interior = theta[1:-1]
    vals[1:-1] = f(nu / np.tan(interior)) / np.sin(interior)
    vals[0] = xf_limits[0] / nu
    vals[-1] = -xf_limits[1] / nu
    w = np.full(M + 1, np.pi / M)
    w[0] *= 0.5
    w[-1] *= 0.5
    k = np.arange(n_terms)
    c_k = np.where(k == 0, 2.0, 1.0)
    cosines = np.cos(np.outer(k, theta))
    return np.sqrt(nu) / np.sqrt(c_k * np.pi / 2.0) * (cosines @ (w * vals))


def mcf_synthesize(coeffs: np.ndarray, xs, nu: float = 1.0) -> np.ndarray:
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    out = np.zeros(xs.shape, dtype=complex)
    for k, a in enumerate(coeffs):
        out += a * mcf_eval(k, xs, nu)
    return out
