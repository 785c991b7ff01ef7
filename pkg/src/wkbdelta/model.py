"""Even polynomial oscillators and the amplitude/energy change of variables.

Three families are supported::

    harmonic  V(x) = m w^2 x^2 / 2
    quartic   V(x) = m w^2 x^2 / 2 + mu  x^4 / 4
    sextic    V(x) = m w^2 x^2 / 2 + rho x^6 / 6

For the anharmonic families the dimensionless variable

    zeta = m w^2 / (g A^(2p-2)),    p = 2 (quartic), p = 3 (sextic)

measures how harmonic the motion at turning point A is (g is the coupling).
zeta -> infinity is the harmonic regime, zeta -> 0 the pure anharmonic one.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedMapError


class Family(str, enum.Enum):
    HARMONIC = "harmonic"
    QUARTIC = "quartic"
    SEXTIC = "sextic"


# anharmonic term is coupling * x^(2p) / (2p)
_POWER = {Family.QUARTIC: 2, Family.SEXTIC: 3}


@dataclass(frozen=True)
class PotentialSpec:
    """Physical parameters of an even polynomial oscillator.

    ``coupling`` is mu for the quartic family and rho for the sextic one. The
    harmonic family is the separate exact branch; its coupling must be 0.
    """

    family: Family
    hbar: float = 1.0
    mass: float = 1.0
    omega: float = 1.0
    coupling: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not (self.hbar > 0 and self.mass > 0):
            raise DomainError("hbar and mass must be positive")
        if not self.omega >= 0:
            raise DomainError("omega must be nonnegative")
        if self.family is Family.HARMONIC:
            if self.coupling != 0:
                raise DomainError("the harmonic branch carries no coupling")
            if self.omega == 0:
                raise DomainError("harmonic branch needs omega > 0")
        else:
            if not self.coupling > 0:
                raise DomainError("coupling must be positive")
            if self.omega == 0 and self.family is not Family.QUARTIC:
                raise DomainError("omega = 0 is only allowed for the quartic family")

    @classmethod
    def quartic(cls, mu=1.0, *, hbar=1.0, mass=1.0, omega=1.0):
        return cls(Family.QUARTIC, hbar, mass, omega, mu)

    @classmethod
    def sextic(cls, rho=1.0, *, hbar=1.0, mass=1.0, omega=1.0):
        return cls(Family.SEXTIC, hbar, mass, omega, rho)

    @classmethod
    def harmonic(cls, *, hbar=1.0, mass=1.0, omega=1.0):
        return cls(Family.HARMONIC, hbar, mass, omega, 0.0)

    @property
    def power(self):
        """p such that the anharmonic term is x^(2p); None for harmonic."""
        return _POWER.get(self.family)

    @property
    def spring(self):
        """m w^2."""
        return self.mass * self.omega**2

    def even_coefficients(self):
        """Coefficients ``c`` with V(x) = sum_j c[j] x^(2j)."""
        c = [0.0, 0.5 * self.spring]
        if self.power is not None:
            c += [0.0] * (self.power - 1)
            c[self.power] = self.coupling / (2 * self.power)
        return np.array(c, dtype=float)


@dataclass(frozen=True)
class TurningData:
    energy: float
    amplitude: float
    zeta: float


def evaluate_potential(spec, x):
    x2 = np.asarray(x, dtype=float) ** 2
    return np.polynomial.polynomial.polyval(x2, spec.even_coefficients())


def potential_derivative(spec, x, order):
    """d^k V / dx^k for k = 0..3, vectorized over x."""
    x = np.asarray(x, dtype=float)
    c = np.zeros(2 * len(spec.even_coefficients()) - 1)
    c[::2] = spec.even_coefficients()
    return np.polynomial.polynomial.polyval(x, np.polynomial.polynomial.polyder(c, order))


def _amplitude_squared(spec, energy):
    k = 0.5 * spec.spring
    if spec.family is Family.HARMONIC:
        return energy / k
    if spec.family is Family.QUARTIC:
        a = spec.coupling / 4
        # root of a y^2 + k y - E written without cancellation
        return 2 * energy / (k + math.sqrt(k * k + 4 * a * energy))
    # sextic: rho y^3 / 6 + k y = E, convex and increasing in y
    a = spec.coupling / 6
    y = (energy / a) ** (1 / 3)
    if k > 0:
        y = min(y, energy / k)
    for _ in range(200):
        f = (a * y * y + k) * y - energy
        step = f / (3 * a * y * y + k)
        y -= step
        if abs(step) <= 1e-16 * y:
            break
    return y


def turning_amplitude(spec, energy):
    """Positive turning point A with V(A) = E, plus the matching zeta."""
    if not energy > 0:
        raise DomainError(f"energy must be positive, got {energy}")
    y = _amplitude_squared(spec, energy)
    A = math.sqrt(y)
    if spec.family is Family.HARMONIC:
        zeta = math.inf
    else:
        zeta = spec.spring / (spec.coupling * y ** (spec.power - 1))
    return TurningData(energy=float(energy), amplitude=A, zeta=zeta)


def _require_zeta_map(spec):
    if spec.family is not Family.QUARTIC or spec.omega == 0:
        raise UnsupportedMapError(
            "the closed-form zeta(E) map needs the quartic family with omega > 0"
        )


def zeta_from_energy(spec, energy):
    _require_zeta_map(spec)
    if not energy > 0:
        raise DomainError(f"energy must be positive, got {energy}")
    s = spec.spring**2 / (4 * spec.coupling * energy)
    return s * (1 + math.sqrt(1 + 1 / s))


def energy_from_zeta(spec, zeta):
    _require_zeta_map(spec)
    if not zeta > 0:
        raise DomainError(f"zeta must be positive, got {zeta}")
    return spec.spring**2 / (4 * spec.coupling) * (2 / zeta + 1 / zeta**2)


def anharmonic_energy(spec, zeta):
    """E(zeta) for either anharmonic family (omega > 0)."""
    if spec.power is None or spec.omega == 0:
        raise UnsupportedMapError("zeta is defined for anharmonic families with omega > 0")
    if not zeta > 0:
        raise DomainError(f"zeta must be positive, got {zeta}")
    p = spec.power
    y = (spec.spring / (spec.coupling * zeta)) ** (1 / (p - 1))
    return 0.5 * spec.spring * y + spec.coupling * y**p / (2 * p)


def anharmonic_zeta(spec, energy):
    """zeta(E) for either anharmonic family (omega > 0)."""
    if spec.power is None or spec.omega == 0:
        raise UnsupportedMapError("zeta is defined for anharmonic families with omega > 0")
    return turning_amplitude(spec, energy).zeta


@dataclass(frozen=True)
class HarmonicReference:
    """Exact results for V = m w^2 x^2 / 2, where WKB is exact."""

    hbar: float = 1.0
    mass: float = 1.0
    omega: float = 1.0

    @classmethod
    def from_spec(cls, spec):
        return cls(spec.hbar, spec.mass, spec.omega)

    def energy(self, n):
        return self.hbar * self.omega * (np.asarray(n) + 0.5)

    def j1(self, energy):
        return math.pi * energy / (self.omega * math.sqrt(2 * self.mass))

    def j2(self, energy=None):
        return math.pi * self.omega * math.sqrt(2 * self.mass)

    def j3(self, energy=None):
        # 7 V''^2 / sqrt(E - V) with V'' = m w^2 and V''' = 0
        return 7 * self.mass**2 * self.omega**4 * math.pi * math.sqrt(2 / (self.mass * self.omega**2))
