"""Named initial data and potentials used by the experiments.

Each form is registered with its angle-endpoint limit (the value of
f(x)(1 - 2ix/nu) at infinity, which only the slowly decaying rational
wave packet needs) and, where a closed form exists, its exact squared
L2 norm for mass bookkeeping.
"""

import numpy as np

from .basis import SampledFunction

__all__ = ["initial_data", "potential", "INITIAL_FORMS", "POTENTIAL_FORMS"]


def _sech(x):
    # overflow-safe for large |x|
    e = np.exp(-np.abs(x))
    return 2.0 * e / (1.0 + e * e)


def initial_data(name: str, nu: float, chirp: float = 10.0) -> SampledFunction:
    """Build an initial wave function by name, scaled-basis aware.

    chirp sets the phase wavenumber of ``gaussian_chirp`` only.
    """
    if name == "sech":
        return SampledFunction(_sech)
    if name == "gaussian":
        return SampledFunction(lambda x: np.exp(-(x**2)))
    if name == "gaussian_chirp":
        return SampledFunction(lambda x: np.exp(-(x**2)) * np.exp(-1j * chirp * x))
    if name == "rational":
        # (ix + 10)/(x^2 + 4) ~ i/x, so f (1 - 2ix/nu) limits to 2/nu
        return SampledFunction(
            lambda x: (1j * x + 10.0) / (x**2 + 4.0), value_at_infinity=2.0 / nu
        )
    if name == "rational2":
        return SampledFunction(lambda x: 1.0 / (1.0 + x + x**2))
    raise ValueError(f"unknown initial form {name!r}; choose from {sorted(INITIAL_FORMS)}")


def exact_mass(name: str) -> float:
    """Closed-form int |psi_0|^2 dx for the named form."""
    if name in ("gaussian", "gaussian_chirp"):
        return float(np.sqrt(np.pi / 2.0))
    if name == "sech":
        return 2.0
    if name == "rational":
        # int (x^2 + 100)/(x^2 + 4)^2 = pi/2 + 96 pi/16
        return float(np.pi / 2.0 + 6.0 * np.pi)
    if name == "rational2":
        return float(4.0 * np.pi / (3.0 * np.sqrt(3.0)))
    raise ValueError(f"no closed-form mass for {name!r}")


def potential(name: str, height: float = 100.0, center: float = 10.0) -> SampledFunction:
    """Build a potential by name; all forms decay at infinity.

    height and center parametrize the double gaussian barrier only.
    """
    if name == "none":
        return None
    if name == "inverse_quadratic":
        return SampledFunction(lambda x: 1.0 / (1.0 + x**2))
    if name == "gaussian_barrier":
        return SampledFunction(
            lambda x: height * (np.exp(-((x - center) ** 2)) + np.exp(-((x + center) ** 2)))
        )
    raise ValueError(f"unknown potential form {name!r}; choose from {sorted(POTENTIAL_FORMS)}")


INITIAL_FORMS = {"sech", "gaussian", "gaussian_chirp", "rational", "rational2"}
POTENTIAL_FORMS = {"none", "inverse_quadratic", "gaussian_barrier"}
