"""Analytic WKB spectra of anharmonic oscillators from the linear delta expansion."""

from .delta import InterpolationConfig, RadicalSeries, build_expansion, expand_integral
from .model import Family, PotentialSpec, turning_amplitude
from .oracle import BasisConfig, exact_spectrum
from .quadrature import IntegralKind, integral_exact
from .wkb import (QuantizationConfig, lambda_of_energy, quartic_closed_form, quartic_energy_closed_form,
                  sextic_closed_form, sextic_energy_closed_form, solve_level)
from .zeta import exact_quartic_z1, zeta_hybrid

__all__ = [
    "BasisConfig", "Family", "IntegralKind", "InterpolationConfig", "PotentialSpec", "QuantizationConfig",
    "RadicalSeries", "build_expansion", "exact_quartic_z1", "exact_spectrum", "expand_integral", "integral_exact",
    "lambda_of_energy", "quartic_closed_form", "quartic_energy_closed_form", "sextic_closed_form",
    "sextic_energy_closed_form", "solve_level", "turning_amplitude", "zeta_hybrid",
]
