"""Condensate parameters and Bogoliubov quantities.

Everything downstream works in units of the quasiparticle frequency
``omega_b`` at the Bragg momentum; this module is the only place laboratory
units appear. ``x`` is the Bragg momentum in units of the inverse healing
length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import constants

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CondensateParams:
    """Laboratory inputs for one Bragg configuration.

    ``chem_potential`` is mu/hbar in rad/s. ``rabi`` is the two-photon Rabi
    frequency in s^-1, taken without a 2*pi factor.
    """

    atom_count: float
    chem_potential: float
    momentum_x: float
    rabi: float

    def __post_init__(self):
        if not self.atom_count >= 1:
            raise ValueError(f"atom_count must be >= 1, got {self.atom_count}")
        if not self.chem_potential > 0:
            raise ValueError(f"chem_potential must be > 0, got {self.chem_potential}")
        if not self.momentum_x > 0:
            raise ValueError(f"momentum_x must be > 0, got {self.momentum_x}")
        if not self.rabi >= 0:
            raise ValueError(f"rabi must be >= 0, got {self.rabi}")

    @classmethod
    def from_lab(cls, atom_count, density, scattering_length, atomic_mass, q, rabi):
        """Build from density n0 [m^-3], a_s [m], mass [kg] and wavenumber q [1/m]."""
        xi = healing_length(density, scattering_length)
        return cls(
            atom_count=atom_count,
            chem_potential=chem_potential_from_healing(xi, atomic_mass),
            momentum_x=xi * q,
            rabi=rabi,
        )


@dataclass(frozen=True)
class ModeCoefficients:
    u: float
    v: float

    @property
    def f(self) -> float:
        return self.u - self.v


@dataclass(frozen=True)
class DerivedScales:
    omega_b: float
    delta_tilde: float
    eta_tilde: float


def healing_length(density: float, scattering_length: float) -> float:
    """xi = (8 pi n0 a_s)^(-1/2)."""
    if density <= 0 or scattering_length <= 0:
        raise ValueError("density and scattering_length must be positive")
    return (8.0 * math.pi * density * scattering_length) ** -0.5


def chem_potential_from_healing(xi: float, atomic_mass: float) -> float:
    """mu/hbar in rad/s from mu = hbar^2 / (2 m xi^2)."""
    if xi <= 0 or atomic_mass <= 0:
        raise ValueError("xi and atomic_mass must be positive")
    return constants.hbar / (2.0 * atomic_mass * xi**2)


def bragg_wavenumber(wavelength: float, angle: float) -> float:
    """Momentum transfer |k1 - k2| = 2 k sin(angle/2) for equal-wavelength beams.

    ``angle`` is the full crossing angle in radians.
    """
    return 2.0 * (TWO_PI / wavelength) * math.sin(angle / 2.0)


def free_frequency(x: float, chem_potential: float) -> float:
    """Free-particle recoil frequency omega_q = (mu/hbar) x^2."""
    return chem_potential * x * x


def dispersion(x: float, chem_potential: float) -> float:
    """Bogoliubov frequency omega_q^B = (mu/hbar) x sqrt(x^2 + 2)."""
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if chem_potential <= 0:
        raise ValueError(f"chem_potential must be > 0, got {chem_potential}")
    return chem_potential * x * math.sqrt(x * x + 2.0)


def detuning_ratio(x: float) -> float:
    """omega_q / omega_q^B = x / sqrt(x^2 + 2), the Bragg-resonant detuning."""
    return x / math.sqrt(x * x + 2.0)


def mode_coefficients(x: float) -> ModeCoefficients:
    if not x > 0:
        raise ValueError(f"mode_coefficients needs x > 0, got {x}")
    root = math.sqrt(x * x + 2.0)
    # (x^2+1)/(x*root) - 1 cancels badly for large x; use the exact rewrite
    # ((x^2+1)^2 - x^2 (x^2+2)) / (x root (x^2+1 + x root)) = 1 / (...).
    v2 = 0.5 / (x * root * (x * x + 1.0 + x * root))
    return ModeCoefficients(u=math.sqrt(1.0 + v2), v=math.sqrt(v2))


def effective_coupling(params: CondensateParams) -> DerivedScales:
    x = params.momentum_x
    omega_b = dispersion(x, params.chem_potential)
    f = mode_coefficients(x).f
    eta = math.sqrt(params.atom_count) * f * params.rabi
    return DerivedScales(omega_b=omega_b, delta_tilde=detuning_ratio(x), eta_tilde=eta / omega_b)


def rabi_for_eta(params: CondensateParams, eta_tilde: float) -> float:
    """Rabi frequency that yields the requested dimensionless coupling."""
    omega_b = dispersion(params.momentum_x, params.chem_potential)
    f = mode_coefficients(params.momentum_x).f
    return eta_tilde * omega_b / (math.sqrt(params.atom_count) * f)
