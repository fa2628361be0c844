"""Heisenberg dynamics of the triad (alpha_q, alpha_{-q}^dag, c^dag).

The triad obeys dX/dtau = i M X with tau = omega_q^B t, so the evolved
operators are X(tau) = S(tau) X(0) with S = exp(i M tau).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

# J = diag(+1, -1, -1) encodes [X_i, X_j^dag] for the triad.
COMMUTATOR_METRIC = np.diag([1.0, -1.0, -1.0])

IMAG_TOL = 1e-10
DISCRIMINANT_TOL = 1e-12
EIGVEC_COND_LIMIT = 1e3


class NumericalError(RuntimeError):
    """Raised when a propagator cannot be computed reliably."""


class Regime(enum.Enum):
    OSCILLATORY = "Oscillatory"
    HYPERBOLIC = "Hyperbolic"


@dataclass(frozen=True)
class TriadModel:
    eta: float
    delta: float
    matrix: np.ndarray = field(repr=False, compare=False)


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple
    regime: Regime


@dataclass(frozen=True)
class Propagator:
    tau: float
    s: np.ndarray = field(repr=False)


def coupling_matrix(eta: float, delta: float) -> np.ndarray:
    return np.array(
        [
            [-1.0, 0.0, -eta],
            [0.0, 1.0, eta],
            [eta, eta, -delta],
        ],
        dtype=complex,
    )


def build_model(eta: float, delta: float) -> TriadModel:
    if not eta >= 0:
        raise ValueError(f"eta must be >= 0, got {eta}")
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    return TriadModel(eta=float(eta), delta=float(delta), matrix=coupling_matrix(eta, delta))


def characteristic_coefficients(eta: float, delta: float):
    """(a, b, c) of det(lambda - M) = lambda^3 + a lambda^2 + b lambda + c."""
    return delta, -1.0, -(delta + 2.0 * eta * eta)


def _ordered(eigs):
    """Descending real part; near-equal real parts ordered by descending imaginary part."""
    eigs = sorted((complex(z) for z in eigs), key=lambda z: -z.real)
    for i in range(len(eigs) - 1):
        a, b = eigs[i], eigs[i + 1]
        if abs(a.real - b.real) <= 1e-9 * max(1.0, abs(a)) and b.imag > a.imag:
            eigs[i], eigs[i + 1] = b, a
    return eigs


def spectrum(model: TriadModel) -> Spectrum:
    eigs = _ordered(np.linalg.eigvals(model.matrix))
    regime = Regime.HYPERBOLIC if any(abs(z.imag) > IMAG_TOL for z in eigs) else Regime.OSCILLATORY
    return Spectrum(eigenvalues=tuple(eigs), regime=regime)


def discriminant(eta: float, delta: float) -> float:
    """Cubic discriminant; positive means three distinct real eigenvalues."""
    a, b, c = characteristic_coefficients(eta, delta)
    return 18 * a * b * c - 4 * a**3 * c + a**2 * b**2 - 4 * b**3 - 27 * c**2


def threshold(delta: float, tol: float = 1e-10) -> float:
    """Smallest coupling at which the spectrum turns complex, by bisection.

    The discriminant is positive at eta = 0 (for delta < 1) and falls
    monotonically through zero on (0, 1].
    """
    if not 0 <= delta <= 1:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    lo, hi = 0.0, 1.0
    if abs(discriminant(lo, delta)) <= DISCRIMINANT_TOL:
        return lo
    if discriminant(hi, delta) > 0:
        raise NumericalError(f"no threshold in (0, 1] for delta={delta}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        d = discriminant(mid, delta)
        if abs(d) <= DISCRIMINANT_TOL:
            return mid
        if d > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def threshold_curve(x_grid):
    """[(x, eta_th)] for each x, with delta = x / sqrt(x^2 + 2)."""
    from .condensate import detuning_ratio

    out = []
    for x in x_grid:
        if not x > 0:
            raise ValueError(f"x must be > 0, got {x}")
        out.append((float(x), threshold(detuning_ratio(x))))
    return out


def propagator(model: TriadModel, tau: float) -> Propagator:
    """S(tau) = exp(i M tau).

    Uses the eigendecomposition when the eigenvector basis is well
    conditioned and Pade scaling-and-squaring otherwise (near the
    threshold the eigenvalues coalesce).
    """
    if not np.isfinite(tau) or tau < 0:
        raise ValueError(f"tau must be finite and >= 0, got {tau}")
    if tau == 0:
        return Propagator(tau=0.0, s=np.eye(3, dtype=complex))
    eigvals, vecs = np.linalg.eig(model.matrix)
    if np.linalg.cond(vecs) < EIGVEC_COND_LIMIT:
        s = (vecs * np.exp(1j * eigvals * tau)) @ np.linalg.inv(vecs)
    else:
        s = scipy.linalg.expm(1j * tau * model.matrix)
    if not np.all(np.isfinite(s)):
        raise NumericalError(f"non-finite propagator at tau={tau}")
    return Propagator(tau=float(tau), s=s)


def pseudo_unitarity_defect(s: np.ndarray) -> float:
    """max |S J S^dag - J|; zero when bosonic commutators are preserved."""
    return float(np.max(np.abs(s @ COMMUTATOR_METRIC @ s.conj().T - COMMUTATOR_METRIC)))
