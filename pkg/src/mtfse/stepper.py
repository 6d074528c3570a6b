"""Time integration: exact propagator, symmetric splittings, Krogstad-P22.

The semi-discrete system is U'(t) = -i (gamma A + M) U for the linear
equation and U' = -i gamma A U - i N(U, t) for the nonlinear one, with A
the fractional-Laplacian matrix, M a potential matrix and N the cubic
Galerkin term.

Splitting advances with an ordered product of unitary factors

    U_n = [prod_j exp(-i a_j gamma tau A) exp(-i b_j tau M)] U_{n-1},

the rightmost factor acting first; the coefficient tables below give the
classical orders 2 (Strang), 4 and 6 (Yoshida compositions).  All
propagators are built once per (scheme, tau) and reused every step.

Krogstad-P22 is a four-stage exponential integrator whose matrix
functions are replaced by (2,2) Pade rationals in tau L, L = i gamma A;
every rational shares one of two denominators, so two dense solves per
step size build all seven operator matrices.  Its linearized one-step
growth factor r(x, y) and the induced stability regions are also here.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .basis import SpectralState
from .expm import HermitianPropagator, cheb_expm
from .fraclap import FracLapOperator
from .nonlinear import apply_nonlinear
from .potential import ToeplitzOperator

__all__ = [
    "SplittingScheme",
    "SM1",
    "SM2",
    "SM3",
    "SPLITTING_SCHEMES",
    "SplittingPropagators",
    "exact_propagate",
    "KrogstadTables",
    "krogstad_p22_step",
    "amplification_coefficients",
    "amplification_factor",
    "stability_region",
    "BlowUpError",
    "evolve_linear",
    "evolve_nonlinear",
    "focusing_cubic",
]


@dataclass(frozen=True)
class SplittingScheme:
    name: str
    a: tuple
    b: tuple
    order: int

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise ValueError("coefficient lists must have equal length")
        if abs(sum(self.a) - 1.0) > 1e-14 or abs(sum(self.b) - 1.0) > 1e-14:
            raise ValueError(f"scheme {self.name} is not consistent")

    @property
    def stages(self) -> int:
        return len(self.a)


SM1 = SplittingScheme("SM1", a=(0.5, 0.5), b=(1.0, 0.0), order=2)

_KAPPA1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
_KAPPA0 = -(2.0 ** (1.0 / 3.0)) * _KAPPA1
SM2 = SplittingScheme(
    "SM2",
    a=(_KAPPA1 / 2, (_KAPPA0 + _KAPPA1) / 2, (_KAPPA0 + _KAPPA1) / 2, _KAPPA1 / 2),
    b=(_KAPPA1, _KAPPA0, _KAPPA1, 0.0),
    order=4,
)

# printed composition constants; w0 balances the sum to 1
_W1 = -1.17767998417887
_W2 = 0.235573213359
_W3 = 0.784513610477
_W0 = 1.0 - 2.0 * (_W1 + _W2 + _W3)
SM3 = SplittingScheme(
    "SM3",
    a=(
        _W3 / 2,
        (_W2 + _W3) / 2,
        (_W1 + _W2) / 2,
        (_W0 + _W1) / 2,
        (_W0 + _W1) / 2,
        (_W1 + _W2) / 2,
        (_W2 + _W3) / 2,
        _W3 / 2,
    ),
    b=(_W3, _W2, _W1, _W0, _W1, _W2, _W3, 0.0),
    order=6,
)

SPLITTING_SCHEMES = {"sm1": SM1, "sm2": SM2, "sm3": SM3}


def _dense_potential(M) -> np.ndarray:
    if M is None:
        return None
    if isinstance(M, ToeplitzOperator):
        return M.dense()
    return np.asarray(M)


def exact_propagate(A: FracLapOperator, M, gamma: float, t: float, U0: SpectralState) -> SpectralState:
    """Reference path: one dense exponential of gamma A + M applied to U0.

    Gershgorin bounds of the assembled sum feed the Chebyshev
    exponential; M may be a ToeplitzOperator, a dense array, or None.
    """
    H = gamma * A.full_matrix()
    Md = _dense_potential(M)
    if Md is not None:
        if Md.shape != H.shape:
            raise ValueError(f"operator sizes differ: {H.shape} vs {Md.shape}")
        H = H + Md
    if U0.coeffs.size != H.shape[0]:
        raise ValueError("state length does not match operator size")
    radii = np.sum(np.abs(H), axis=1) - np.abs(np.diag(H))
    d = np.real(np.diag(H))
    lo = float(np.min(d - radii))
    hi = float(np.max(d + radii))
    P = cheb_expm(H, t, lo, hi) if t != 0.0 else None
    out = U0.coeffs if P is None else P.apply(U0.coeffs)
    return SpectralState(out, U0.n_modes, U0.scaling)


class SplittingPropagators:
    """Stage propagators for one (scheme, tau), shared across all steps.

    Zero stage coefficients map to ``None`` (skipped identity factors);
    distinct coefficients each cost one Chebyshev exponential, of which a
    symmetric scheme has very few.
    """

    def __init__(self, scheme: SplittingScheme, A: FracLapOperator, M, gamma: float, tau: float):
        self.scheme = scheme
        self.tau = tau
        Ad = A.full_matrix()
        zeta, eta = A.bounds
        za, ea = min(gamma * zeta, gamma * eta), max(gamma * zeta, gamma * eta)
        if za == ea:
            ea = za + 1.0
        Md = _dense_potential(M)
        if Md is not None and Md.shape != Ad.shape:
            raise ValueError(f"operator sizes differ: {Ad.shape} vs {Md.shape}")
        if isinstance(M, ToeplitzOperator):
            zm, em = M.gershgorin_bounds()
        elif Md is not None:
            radii = np.sum(np.abs(Md), axis=1) - np.abs(np.diag(Md))
            dm = np.real(np.diag(Md))
            zm, em = float(np.min(dm - radii)), float(np.max(dm + radii))
        cache_a, cache_b = {}, {}
        self.props_a = []
        self.props_b = []
        for aj, bj in zip(scheme.a, scheme.b):
            if aj == 0.0:
                self.props_a.append(None)
            else:
                if aj not in cache_a:
                    cache_a[aj] = cheb_expm(gamma * Ad, aj * tau, za, ea)
                self.props_a.append(cache_a[aj])
            if bj == 0.0 or Md is None:
                self.props_b.append(None)
            else:
                if bj not in cache_b:
                    cache_b[bj] = cheb_expm(Md, bj * tau, zm, em)
                self.props_b.append(cache_b[bj])

    def step(self, U: SpectralState) -> SpectralState:
        v = U.coeffs
        # rightmost product factor first: stage m down to 1, M before A
        for pa, pb in zip(reversed(self.props_a), reversed(self.props_b)):
            if pb is not None:
                v = pb.apply(v)
            if pa is not None:
                v = pa.apply(v)
        return SpectralState(v, U.n_modes, U.scaling)


def splitting_step(props: SplittingPropagators, U: SpectralState) -> SpectralState:
    return props.step(U)


class KrogstadTables:
    """Dense stage matrices of the Krogstad-P22 scheme for fixed tau L.

    R22  = (12 I - 6 tau L + (tau L)^2) D^-1,   D = 12 I + 6 tau L + (tau L)^2
    P1   = 12 tau D^-1
    P2   = tau (6 I + tau L) D^-1
    P3   = 2 tau (4 I + tau L) D^-1
    Rt22 = (48 I - 12 tau L + (tau L)^2) Dt^-1, Dt = 48 I + 12 tau L + (tau L)^2
    Pt1  = 24 tau Dt^-1
    Pt2  = 2 tau (12 I + tau L) Dt^-1

    For skew-Hermitian tau L both denominators are invertible (their roots
    lie off the imaginary axis) and R22 is unitary.  One LU per
    denominator builds all seven matrices.
    """

    def __init__(self, A: FracLapOperator, gamma: float, tau: float):
        L = 1j * gamma * A.full_matrix()
        n = L.shape[0]
        self.tau = tau
        tl = tau * L
        tl2 = tl @ tl
        eye = np.eye(n, dtype=complex)
        D = 12.0 * eye + 6.0 * tl + tl2
        Dt = 48.0 * eye + 12.0 * tl + tl2
        lu_d = scipy.linalg.lu_factor(D)
        lu_dt = scipy.linalg.lu_factor(Dt)
        # numerators and D^-1 are polynomials in tau L and commute, so the
        # left-inverse forms below equal the printed right-inverse ones
        self.R22 = scipy.linalg.lu_solve(lu_d, 12.0 * eye - 6.0 * tl + tl2)
        self.P1 = scipy.linalg.lu_solve(lu_d, 12.0 * tau * eye)
        self.P2 = scipy.linalg.lu_solve(lu_d, tau * (6.0 * eye + tl))
        self.P3 = scipy.linalg.lu_solve(lu_d, 2.0 * tau * (4.0 * eye + tl))
        self.Rt22 = scipy.linalg.lu_solve(lu_dt, 48.0 * eye - 12.0 * tl + tl2)
        self.Pt1 = scipy.linalg.lu_solve(lu_dt, 24.0 * tau * eye)
        self.Pt2 = scipy.linalg.lu_solve(lu_dt, 2.0 * tau * (12.0 * eye + tl))


def krogstad_p22_step(tables: KrogstadTables, nonlin, state: SpectralState, t_n: float,
                      tau: float) -> SpectralState:
    """One four-stage step; ``nonlin(U, t)`` returns the coefficient vector N(U, t)."""
    if tau != tables.tau:
        raise ValueError(f"tables were built for tau = {tables.tau}, got {tau}")
    N, nu = state.n_modes, state.scaling
    u = state.coeffs
    n0 = nonlin(state, t_n)
    half = t_n + 0.5 * tau

    a_n = tables.Rt22 @ u - 1j * (tables.Pt1 @ n0)
    na = nonlin(SpectralState(a_n, N, nu), half)

    b_n = a_n - 1j * (tables.Pt2 @ (na - n0))
    nb = nonlin(SpectralState(b_n, N, nu), half)

    c_n = tables.R22 @ u - 1j * (tables.P1 @ n0) - 2j * (tables.P2 @ (nb - n0))
    nc = nonlin(SpectralState(c_n, N, nu), t_n + tau)

    out = (
        tables.R22 @ u
        - 1j * (tables.P1 @ n0)
        - 1j * (tables.P2 @ (-3.0 * n0 + 2.0 * na + 2.0 * nb - nc))
        - 1j * (tables.P3 @ (n0 - na - nb + nc))
    )
    return SpectralState(out, N, nu)


def focusing_cubic(state: SpectralState, t: float) -> np.ndarray:
    """Nonlinear term of the focusing equation: N(U, t) = -B(U) U."""
    return -apply_nonlinear(state, t)


def amplification_coefficients(y: complex) -> tuple:
    """Quartic coefficients (c_0..c_4) of the growth factor at a given y.

    At y = 0 they reduce to 1, 1, 1/2, 1/6, 1/24 (the quartic Taylor
    polynomial of the exponential).
    """
    d1 = 12.0 - 6.0 * y + y * y
    d2 = 48.0 - 12.0 * y + y * y
    if d1 == 0 or d2 == 0:
        raise ZeroDivisionError("y is a pole of the coefficient rationals")
    c0 = (12.0 + 6.0 * y + y * y) / d1
    c1 = (144.0 * y**3 - 432.0 * y**2 - 1728.0 * y + 6912.0) / (d1 * d1 * d2)
    c2 = (36.0 * y**5 - 648.0 * y**4 + 4032.0 * y**3 + 3456.0 * y**2 - 82944.0 * y + 165888.0) / (
        d1 * d1 * d2 * d2
    )
    c3 = (-48.0 * y**4 + 768.0 * y**3 + 576.0 * y**2 - 27648.0 * y + 55296.0) / (d1 * d1 * d2 * d2)
    c4 = (-96.0 * y**3 + 1920.0 * y**2 - 10368.0 * y + 13824.0) / (d1 * d1 * d2 * d2)
    return (c0, c1, c2, c3, c4)


def amplification_factor(x: complex, y: complex) -> complex:
    """One-step growth factor r(x, y) of the scheme on U' = -lambda U - i c U.

    x = -i c tau, y = -lambda tau.
    """
    c0, c1, c2, c3, c4 = amplification_coefficients(y)
    return c0 + c1 * x + c2 * x**2 + c3 * x**3 + c4 * x**4


def stability_region(y: complex, x_grid: np.ndarray) -> np.ndarray:
    """Boolean mask |r(x, y)| <= 1 over a complex grid of x values."""
    x_grid = np.asarray(x_grid, dtype=complex)
    out = np.empty(x_grid.shape, dtype=bool)
    flat = x_grid.ravel()
    res = np.array([abs(amplification_factor(x, y)) <= 1.0 for x in flat])
    out.ravel()[:] = res
    return out


class BlowUpError(RuntimeError):
    """Raised when the coefficient vector leaves the trust region."""

    def __init__(self, time: float, magnitude: float):
        super().__init__(f"blow-up detected at t = {time:.6g} (sup-norm {magnitude:.3e})")
        self.time = time
        self.magnitude = magnitude


BLOWUP_THRESHOLD = 1e8


def _check_finite(coeffs: np.ndarray, t: float):
    sup = float(np.max(np.abs(coeffs)))
    if not np.isfinite(sup) or sup > BLOWUP_THRESHOLD:
        raise BlowUpError(t, sup)


def evolve_linear(A: FracLapOperator, M, gamma: float, scheme: SplittingScheme, tau: float,
                  n_steps: int, U0: SpectralState, callback=None) -> SpectralState:
    """March the linear equation n_steps times with a splitting scheme.

    ``callback(step_index, t, state)`` runs after every step when given.
    """
    props = SplittingPropagators(scheme, A, M, gamma, tau)
    U = U0
    for n in range(1, n_steps + 1):
        U = props.step(U)
        if callback is not None:
            callback(n, n * tau, U)
    return U


def evolve_nonlinear(A: FracLapOperator, gamma: float, tau: float, n_steps: int,
                     U0: SpectralState, nonlin=focusing_cubic, callback=None,
                     amplitude_guard: float = None) -> SpectralState:
    """March the nonlinear equation with Krogstad-P22 and the blow-up guards.

    The coefficient guard trips on overflow or sup-norm beyond 1e8.  The
    scheme is close enough to unitary that focusing singularities scatter
    instead of overflowing, so ``amplitude_guard`` adds the physical
    detector: raise once max_x |psi_N| exceeds the given level (the
    conserved mass bounds the coefficients, not the amplitude).
    """
    from .basis import synthesize_at_nodes

    tables = KrogstadTables(A, gamma, tau)
    U = U0
    for n in range(1, n_steps + 1):
        U = krogstad_p22_step(tables, nonlin, U, (n - 1) * tau, tau)
        _check_finite(U.coeffs, n * tau)
        if amplitude_guard is not None:
            peak = float(np.max(np.abs(synthesize_at_nodes(U))))
            if peak > amplitude_guard:
                raise BlowUpError(n * tau, peak)
        if callback is not None:
            callback(n, n * tau, U)
    return U
