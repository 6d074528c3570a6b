"""Unitary exponentials exp(-i lambda H) of Hermitian matrices.

The propagator is expanded in Chebyshev matrix polynomials with Bessel
coefficients.  After shifting the spectrum of H from the certified
interval [zeta, eta] onto [-1, 1],

    exp(-i omega Hhat) ~= c_0 I + 2 sum_{k=1}^{m} c_k T_k(Hhat),
    c_k = (-i)^k J_k(omega),   omega = lambda (eta - zeta) / 2,

which at m = 18 is accurate to less than 2^-53 whenever |omega| <= 2.212
(the tail satisfies 2 sum_{k>18} J_k(2.212) <= 2^-53, checked in the
tests).  Larger steps are halved s times until admissible and the result
squared s times.

Two evaluation paths for the Chebyshev sum are kept: the plain two-term
recurrence (reference), and a Paterson-Stockmeyer evaluation of the
equivalent power-series form, which lowers the count to 7 matrix-matrix
products.  (The conversion to powers is benign here: the sum represents
e^(-i omega x) with |omega| <= 2.212, whose power coefficients stay
O(1).)  Both paths agree to ~1e-13 and the grouped one is the default.
"""

from dataclasses import dataclass

import numpy as np

from .special import bessel_j_seq, ipow

__all__ = [
    "HermitianPropagator",
    "cheb_expm",
    "propagator_error_budget",
    "CHEB_ORDER",
    "OMEGA_MAX",
]

CHEB_ORDER = 18
OMEGA_MAX = 2.212
_HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class HermitianPropagator:
    """Dense unitary matrix exp(-i lambda H) with its construction record."""

    matrix: np.ndarray
    lam: float
    bounds_used: tuple
    squarings: int

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ v

    def unitarity_defect(self) -> float:
        n = self.size
        return float(np.max(np.abs(self.matrix @ np.conj(self.matrix).T - np.eye(n))))


def propagator_error_budget(lam: float, zeta: float, eta: float):
    """Number of halvings s and the certified per-step truncation bound.

    s is the smallest integer with |lam| (eta - zeta) / 2^(s+1) <= 2.212;
    the bound 2 sum_{k > 18} J_k(2.212) is returned alongside (it sits just
    below 2^-53, which is why 2.212 is the admissibility threshold).
    """
    if not eta > zeta:
        raise ValueError(f"need eta > zeta, got [{zeta}, {eta}]")
    omega = abs(lam) * (eta - zeta) / 2.0
    s = 0
    while omega / 2.0**s > OMEGA_MAX:
        s += 1
    tail = 2.0 * float(np.sum(bessel_j_seq(60, OMEGA_MAX)[CHEB_ORDER + 1 :]))
    return s, tail


def cheb_expm(H: np.ndarray, lam: float, zeta: float, eta: float,
              order: int = CHEB_ORDER, evaluation: str = "grouped") -> HermitianPropagator:
    """Unitary propagator exp(-i lam H) for Hermitian H with spectrum in [zeta, eta].

    The enclosure is caller-certified (Gershgorin bounds are cheap and
    sufficient).  ``evaluation`` selects the Chebyshev-sum path: "grouped"
    (Paterson-Stockmeyer on the power form, 7 products) or "recurrence"
    (plain two-term recurrence, the correctness reference).
    """
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"H must be square, got {H.shape}")
    if not eta > zeta:
        raise ValueError(f"need eta > zeta, got [{zeta}, {eta}]")
    defect = np.max(np.abs(H - np.conj(H).T))
    if defect > _HERMITIAN_TOL:
        raise ValueError(f"H is not Hermitian (defect {defect:.2e})")
    if evaluation not in ("grouped", "recurrence"):
        raise ValueError(f"unknown evaluation scheme {evaluation!r}")

    n = H.shape[0]
    if lam == 0.0:
        return HermitianPropagator(np.eye(n, dtype=complex), 0.0, (zeta, eta), 0)

    s, _ = propagator_error_budget(lam, zeta, eta)
    lam_small = lam / 2.0**s
    center = 0.5 * (zeta + eta)
    halfwidth = 0.5 * (eta - zeta)
    omega = lam_small * halfwidth

    Hhat = (H - center * np.eye(n)) / halfwidth
    coeffs = _cheb_coeffs(omega, order)
    if evaluation == "recurrence":
        U = _cheb_sum_recurrence(Hhat, coeffs)
    else:
        U = _cheb_sum_grouped(Hhat, coeffs)
    U *= np.exp(-1j * lam_small * center)

    for _ in range(s):
        U = U @ U
    return HermitianPropagator(U, lam, (zeta, eta), s)


def _cheb_coeffs(omega: float, order: int) -> np.ndarray:
    """c_0 and the doubled c_k = 2 (-i)^k J_k(omega), signed for omega < 0."""
    js = bessel_j_seq(order, abs(omega))
    k = np.arange(order + 1)
    base = np.conj(ipow(k)) if omega >= 0 else ipow(k)  # J_k(-x) = (-1)^k J_k(x)
    c = base * js
    c[1:] *= 2.0
    return c


def _cheb_sum_recurrence(X: np.ndarray, c: np.ndarray) -> np.ndarray:
    n = X.shape[0]
    T_prev = np.eye(n, dtype=complex)
    T_cur = X.astype(complex)
    acc = c[0] * T_prev + c[1] * T_cur
    for k in range(2, len(c)):
        T_next = 2.0 * X @ T_cur - T_prev
        acc += c[k] * T_next
        T_prev, T_cur = T_cur, T_next
    return acc


def _cheb_to_power(c: np.ndarray) -> np.ndarray:
    """Power-basis coefficients of sum c_k T_k via the polynomial module."""
    return np.polynomial.chebyshev.cheb2poly(c)


def _cheb_sum_grouped(X: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Paterson-Stockmeyer evaluation of the power form, 7 products at degree 18.

    Powers X^2..X^q for q = 5, then a Horner sweep over coefficient
    blocks: (q - 1) + (ceil(19/q) - 1) = 7 multiplications.
    """
    p = _cheb_to_power(c)
    m = len(p) - 1
    n = X.shape[0]
    q = 5
    powers = [np.eye(n, dtype=complex), X.astype(complex)]
    for _ in range(q - 1):
        powers.append(powers[-1] @ X)
    n_blocks = -(-(m + 1) // q)
    acc = None
    for b in reversed(range(n_blocks)):
        block = sum(
            p[b * q + r] * powers[r]
            for r in range(q)
            if b * q + r <= m
        )
        acc = block if acc is None else block + acc @ powers[q]
    return acc
