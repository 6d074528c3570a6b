"""Toeplitz Galerkin matrices for multiplication operators.

In the angle variable the basis functions are weighted exponentials, so
the Galerkin matrix of pointwise multiplication by V(x) has entries
depending only on the index difference:

    M[j, k] = mu_{j-k},
    mu_m = (i^(-m) / 2 pi) int_-pi^pi V(nu tan(theta/2)/2) e^(-im theta) dtheta.

All 4N-1 generators come from one FFT; the operator is applied to
vectors by circulant embedding (three FFTs).  Real potentials give
Hermitian operators through mu_{-m} = conj(mu_m) exactly.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .basis import SampledFunction, _as_sampled
from .special import ipow

__all__ = ["ToeplitzOperator", "mu_coeffs", "assemble_toeplitz", "toeplitz_matvec"]


@dataclass(frozen=True)
class ToeplitzOperator:
    """Hermitian-or-general Toeplitz matrix stored by first column and row.

    first_col[m] = t_m for m >= 0 and first_row[m] = t_{-m}; matvecs run
    through a circulant embedding of length >= 2 size - 1.
    """

    first_col: np.ndarray
    first_row: np.ndarray
    size: int

    def __post_init__(self):
        col = np.ascontiguousarray(self.first_col, dtype=complex)
        row = np.ascontiguousarray(self.first_row, dtype=complex)
        if col.shape != (self.size,) or row.shape != (self.size,):
            raise ValueError("first column/row must both have length equal to size")
        if col[0] != row[0]:
            raise ValueError("corner entry mismatch between first column and row")
        object.__setattr__(self, "first_col", col)
        object.__setattr__(self, "first_row", row)
        n = self.size
        L = 1 << int(np.ceil(np.log2(max(2 * n - 1, 2))))
        gen = np.zeros(L, dtype=complex)
        gen[:n] = col
        gen[L - n + 1 :] = row[1:][::-1]
        object.__setattr__(self, "_circulant_fft", np.fft.fft(gen))

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        if v.shape != (self.size,):
            raise ValueError(f"vector length {v.shape} does not match size {self.size}")
        L = len(self._circulant_fft)
        out = np.fft.ifft(self._circulant_fft * np.fft.fft(v, n=L))
        return out[: self.size]

    def dense(self) -> np.ndarray:
        return scipy.linalg.toeplitz(self.first_col, self.first_row)

    def is_hermitian(self, tol: float = 0.0) -> bool:
        return bool(
            np.max(np.abs(self.first_row - np.conj(self.first_col))) <= tol
            and abs(self.first_col[0].imag) <= tol
        )

    def gershgorin_bounds(self) -> tuple:
        """Spectral enclosure for the Hermitian case: one radius serves all rows."""
        center = float(np.real(self.first_col[0]))
        radius = float(np.sum(np.abs(self.first_col[1:])) + np.sum(np.abs(self.first_row[1:])))
        return (center - radius, center + radius)


def mu_coeffs(V, N: int, nu: float = 1.0, fft_length: int = None) -> np.ndarray:
    """Toeplitz generators mu_m, m = 1-2N..2N-1, by one long FFT.

    The sampling length defaults to the smallest power of two >= 8N, which
    resolves all 4N-1 required modes with aliasing margin for potentials
    that are not band-limited in the angle.  Indexing of the returned
    vector: entry [m + 2N - 1] holds mu_m.

    Potentials must decay: a nonzero declared value at infinity is
    rejected (confining potentials fall outside the decaying-coefficient
    regime this basis targets).
    """
    if N < 1:
        raise ValueError(f"need at least one mode, got N = {N}")
    if not nu > 0:
        raise ValueError(f"scaling must be positive, got {nu}")
    V = _as_sampled(V)
    if V.value_at_infinity != 0.0:
        raise ValueError("potential must vanish at infinity")
    L = fft_length if fft_length is not None else 1 << int(np.ceil(np.log2(8 * N)))
    if L < 4 * N - 1:
        raise ValueError(f"FFT length {L} cannot resolve {4 * N - 1} generators")
    j = np.arange(L)
    theta = -np.pi + 2.0 * np.pi * j / L
    samples = np.empty(L, dtype=complex)
    samples[0] = 0.0  # theta = -pi maps to x = -inf where V vanishes
    samples[1:] = V(nu * np.tan(theta[1:] / 2.0) / 2.0)
    F = np.fft.fft(samples)
    m = np.arange(-(2 * N - 1), 2 * N)
    # e^(-im theta_j) = (-1)^m e^(-2 pi i jm / L)
    return np.conj(ipow(m)) * (-1.0) ** np.mod(m, 2) / L * F[np.mod(m, L)]


def assemble_toeplitz(mu: np.ndarray) -> ToeplitzOperator:
    """Operator with M[j, k] = mu_{j-k} from the generator vector of odd length 4N-1."""
    mu = np.asarray(mu, dtype=complex)
    if mu.ndim != 1 or mu.size % 4 != 3:
        raise ValueError(f"generator vector must have length 4N-1, got {mu.size}")
    n = (mu.size + 1) // 2
    center = mu.size // 2
    first_col = mu[center : center + n]
    first_row = mu[center :: -1][:n]
    return ToeplitzOperator(first_col, first_row, n)


def toeplitz_matvec(op: ToeplitzOperator, v: np.ndarray) -> np.ndarray:
    return op.matvec(v)


def potential_operator(V, N: int, nu: float = 1.0) -> ToeplitzOperator:
    """Convenience: Galerkin operator of multiplication by V on 2N modes."""
    return assemble_toeplitz(mu_coeffs(V, N, nu))
