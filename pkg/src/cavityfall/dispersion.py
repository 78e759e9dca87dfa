"""Relativistic in-plane dispersion of light standing in a planar cavity.

A photon confined between mirrors spaced by L (longitudinal order j,
background index n_s) has zero group velocity along the cavity axis and is
free in the mirror plane.  Its exact in-plane dispersion is that of a
relativistic particle,

    (hbar*omega)**2 = (m * cm**2)**2 + (hbar * cm * k_par)**2,

with a reduced light speed cm = c/n_s and a rest mass m fixed by the rest
energy E0 = hbar*pi*j*c/(L*n_s) through m = E0/cm**2.  For vacuum this is
m = hbar*pi*j/(c*L); filling the spacer at fixed rest energy multiplies the
mass by n_s**2.  No effective-mass approximation is involved: the identity
is exact for all k_par, and the plane-wave residual of the associated 2D
wave equation vanishes exactly on shell (see kg_residual).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .units import c, hbar


@dataclass(frozen=True)
class CavitySpec:
    """Geometry and material of a planar (or cylinder-equivalent) cavity.

    L: mirror spacing [m]; j: longitudinal mode order; n_s: background
    refractive index; Q: quality factor (optional, used by interferometry
    only and ignored by the dispersion operations).
    """

    L: float
    j: int
    n_s: float = 1.0
    Q: float | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.L) and self.L > 0.0):
            raise ValidationError(f"cavity thickness L must be positive, got {self.L!r}")
        if not (isinstance(self.j, int) and self.j >= 1):
            raise ValidationError(f"mode order j must be an integer >= 1, got {self.j!r}")
        if not (math.isfinite(self.n_s) and self.n_s >= 1.0):
            raise ValidationError(f"background index n_s must be >= 1, got {self.n_s!r}")
        if self.Q is not None and not (math.isfinite(self.Q) and self.Q > 0.0):
            raise ValidationError(f"quality factor Q must be positive when given, got {self.Q!r}")

    @classmethod
    def from_rest_wavelength(cls, lambda0: float, n_s: float = 1.0, Q: float | None = None) -> "CavitySpec":
        """Cavity with rest energy 2*pi*hbar*c/lambda0, i.e. the j=1 half-wave
        geometry L = lambda0/(2*n_s) for the medium at hand.

        Specifying the rest energy directly (through its vacuum wavelength)
        removes the ambiguity of holding (L, j) fixed while changing n_s,
        which would change the rest energy itself.
        """
        if not (isinstance(lambda0, (int, float)) and math.isfinite(lambda0) and lambda0 > 0.0):
            raise ValidationError(f"lambda0 must be positive, got {lambda0!r}")
        return cls(L=lambda0 / (2.0 * n_s), j=1, n_s=n_s, Q=Q)

    @property
    def c_medium(self) -> float:
        """In-plane light speed c/n_s [m/s]."""
        return c / self.n_s

    @property
    def omega0(self) -> float:
        """Rest angular frequency pi*j*c/(L*n_s) [rad/s]."""
        return math.pi * self.j * c / (self.L * self.n_s)

    @property
    def rest_energy(self) -> float:
        """Rest energy E0 = hbar*omega0 [J]; derived from omega0 so that
        E0/hbar and omega0 stay consistent to the last ulp."""
        return hbar * self.omega0


@dataclass(frozen=True)
class DispersionPoint:
    """One sample (k_par, omega, v_g) of the in-plane dispersion."""

    k_par: float
    omega: float
    v_g: float


def effective_mass(cavity: CavitySpec) -> float:
    """Rest mass of the confined photon [kg].

    Defined by m = E0 / c_medium**2, which equals hbar*pi*j/(c*L) in vacuum
    and n_s * hbar*pi*j/(c*L) in a dielectric; at fixed rest energy the
    dielectric mass is n_s**2 times the vacuum one.
    """
    return cavity.rest_energy / cavity.c_medium**2


def photon_energy(cavity: CavitySpec, k_par):
    """Photon energy hbar*omega at in-plane wavenumber k_par [J].

    Exact relativistic branch sqrt(E0**2 + (hbar*cm*k)**2); even in k_par.
    """
    return np.hypot(cavity.rest_energy, hbar * cavity.c_medium * np.asarray(k_par, dtype=float))


def group_velocity(cavity: CavitySpec, k_par):
    """In-plane group velocity d(omega)/dk [m/s].

    v_g = cm**2 * hbar * k / E(k); odd in k_par, bounded by cm, and equal to
    hbar*k/m in the non-relativistic regime hbar*cm*k << E0.
    """
    k = np.asarray(k_par, dtype=float)
    return cavity.c_medium**2 * hbar * k / photon_energy(cavity, k)


def kg_residual(cavity: CavitySpec, k_par, omega):
    """Plane-wave residual of the 2D massive wave equation [1/m^2].

    For u = exp(i k.r) the operator reduces to
        -k**2 + (omega**2 - omega0**2) / cm**2,
    which vanishes exactly when (k, omega) lies on the dispersion branch.
    The difference-of-squares form keeps the evaluation well conditioned at
    small k, where omega**2 and omega0**2 cancel to ~16 digits.
    """
    k = np.asarray(k_par, dtype=float)
    w = np.asarray(omega, dtype=float)
    w0 = cavity.omega0
    return -k * k + (w - w0) * (w + w0) / cavity.c_medium**2


def dispersion_table(cavity: CavitySpec, k_values) -> list[DispersionPoint]:
    """Evaluate (k, omega, v_g) over a wavenumber grid."""
    k = np.asarray(k_values, dtype=float)
    omega = photon_energy(cavity, k) / hbar
    v_g = group_velocity(cavity, k)
    return [DispersionPoint(float(ki), float(wi), float(vi)) for ki, wi, vi in zip(k, omega, v_g)]
