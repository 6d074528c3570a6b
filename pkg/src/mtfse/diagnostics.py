"""Mass, error norms, tail-decay slopes and convergence-order fits."""

from dataclasses import dataclass

import numpy as np

from .basis import SpectralState, ThetaGrid, _envelope_sum_at_nodes, pad_state, synthesize

__all__ = [
    "mass",
    "mass_via_grid",
    "max_error",
    "default_probe",
    "decay_slope",
    "fit_order",
    "ConvergenceReport",
]


def mass(state: SpectralState) -> float:
    """Squared L2 norm of the represented function (Parseval shortcut)."""
    return float(np.sum(np.abs(state.coeffs) ** 2))


def mass_via_grid(state: SpectralState) -> float:
    """Cross-check path: (1/2 pi) int |sum zeta_k i^k e^(ik theta)|^2 dtheta.

    The integrand has bandwidth 2N - 1, so the 2N-point trapezoidal value
    is exact and must agree with mass() to roundoff.
    """
    s = _envelope_sum_at_nodes(state)
    return float(np.sum(np.abs(s) ** 2) / (2 * state.n_modes))


def max_error(state: SpectralState, ref: SpectralState, probe: np.ndarray = None) -> float:
    """Max pointwise difference over the probe grid.

    States of unequal basis size are compared by zero-padding the shorter
    in Laurent index; the scalings must match.  The default probe is the
    finer mapped grid, infinity node excluded, clipped to |x| <= 50 nu.
    """
    if state.scaling != ref.scaling:
        raise ValueError(
            f"scaling mismatch: {state.scaling} vs {ref.scaling}"
        )
    n = max(state.n_modes, ref.n_modes)
    a = pad_state(state, n)
    b = pad_state(ref, n)
    if probe is None:
        probe = default_probe(n, state.scaling)
    return float(np.max(np.abs(synthesize(a, probe) - synthesize(b, probe))))


def default_probe(n_modes: int, nu: float) -> np.ndarray:
    x = ThetaGrid(n_modes, nu).finite_nodes
    return x[np.abs(x) <= 50.0 * nu]


def resolved_limit(state: SpectralState) -> float:
    """Largest |x| the grid resolves: the outermost finite mapped node."""
    N = state.n_modes
    return state.scaling * np.tan((np.pi - np.pi / N) / 2.0) / 2.0


def decay_slope(state: SpectralState, x_window: tuple, n_samples: int = 60) -> float:
    """Least-squares slope of log |psi_N(x)| against log x over a window.

    The window must sit inside the resolved region of the grid.  Samples
    are log-spaced; points below 1e-300 are guarded against the log.
    """
    lo, hi = x_window
    if not 0 < lo < hi:
        raise ValueError(f"window must satisfy 0 < lo < hi, got {x_window}")
    if hi > resolved_limit(state):
        raise ValueError(
            f"window extends to {hi:g}, beyond the resolved region "
            f"|x| <= {resolved_limit(state):g}"
        )
    xs = np.geomspace(lo, hi, n_samples)
    vals = np.abs(synthesize(state, xs))
    vals = np.maximum(vals, 1e-300)
    coef = np.polyfit(np.log(xs), np.log(vals), 1)
    return float(coef[0])


@dataclass(frozen=True)
class ConvergenceReport:
    params: np.ndarray
    errors: np.ndarray
    slope: float
    residual: float


def fit_order(param, err, saturation: float = 1e-13) -> ConvergenceReport:
    """Log-log slope of error against parameter, discarding saturated points.

    Points at or below the saturation floor sit in roundoff and would
    flatten the fit; at least three usable points are required.
    """
    param = np.asarray(param, dtype=float)
    err = np.asarray(err, dtype=float)
    if param.shape != err.shape:
        raise ValueError("parameter and error vectors must align")
    keep = err > saturation
    if np.count_nonzero(keep) < 3:
        raise ValueError(
            f"need at least 3 points above the saturation floor, have {np.count_nonzero(keep)}"
        )
    lp = np.log(param[keep])
    le = np.log(err[keep])
    A = np.vstack([np.ones_like(lp), lp]).T
    coef, *_ = np.linalg.lstsq(A, le, rcond=None)
    fitted = A @ coef
    residual = float(np.sqrt(np.mean((le - fitted) ** 2)))
    return ConvergenceReport(param[keep], err[keep], float(coef[1]), residual)
