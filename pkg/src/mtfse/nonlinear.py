"""Galerkin action of the cubic nonlinearity in coefficient space.

Multiplication by |psi_N|^2 is, like any multiplication operator, a
Hermitian Toeplitz matrix in this basis.  Its generators come from the
squared modulus of the angle-space envelope:

    rho_m = (i^(-m) / (nu pi^2)) int_-pi^pi |cos(theta/2) s(theta)|^2
            e^(-im theta) dtheta,
    s(theta) = sum_k zeta_k i^k e^(ik theta).

The integrand is a trigonometric polynomial of bandwidth at most 2N, so
an oversampled FFT (length >= 8N, power of two) computes every generator
exactly.  apply_nonlinear returns B(U) U with the positive-density
convention; the focusing equation carries the minus sign at the stepper
boundary.

The 1/nu prefactor follows from substituting the dilated basis into the
Galerkin integral (the envelope itself is scale-free, the measure is not).
"""

from dataclasses import dataclass

import numpy as np

from .basis import SpectralState
from .potential import ToeplitzOperator, assemble_toeplitz
from .special import ipow

__all__ = ["NonlinearAction", "rho_coeffs", "build_action", "apply_nonlinear"]


@dataclass(frozen=True)
class NonlinearAction:
    """Density generators rho_m and the Toeplitz operator they define."""

    rho: np.ndarray
    operator: ToeplitzOperator


def rho_coeffs(state: SpectralState) -> np.ndarray:
    """All 4N-1 generators rho_m, m = 1-2N..2N-1 (entry [m + 2N - 1])."""
    N, nu = state.n_modes, state.scaling
    L = 1 << int(np.ceil(np.log2(max(8 * N, 8))))
    k = state.laurent_indices
    d = np.zeros(L, dtype=complex)
    # s(theta_l) on theta_l = -pi + 2 pi l / L via zero-padded inverse FFT
    d[np.mod(k, L)] = state.coeffs * ipow(k) * (-1.0) ** np.mod(k, 2)
    s = L * np.fft.ifft(d)
    theta = -np.pi + 2.0 * np.pi * np.arange(L) / L
    g = (np.cos(theta / 2.0) * np.abs(s)) ** 2
    F = np.fft.fft(g)
    m = np.arange(-(2 * N - 1), 2 * N)
    # (i^-m / (nu pi^2)) (2 pi / L) (-1)^m F[m]
    return np.conj(ipow(m)) * (-1.0) ** np.mod(m, 2) * (2.0 / (nu * np.pi * L)) * F[np.mod(m, L)]


def build_action(state: SpectralState) -> NonlinearAction:
    rho = rho_coeffs(state)
    return NonlinearAction(rho, assemble_toeplitz(rho))


def apply_nonlinear(state: SpectralState, t: float = 0.0) -> np.ndarray:
    """Coefficients of |psi_N|^2 psi_N projected onto the basis, B(U) U.

    Autonomous; ``t`` is accepted for stepper-facing uniformity.  The
    focusing equation uses the negated value.
    """
    action = build_action(state)
    return action.operator.matvec(state.coeffs)
