"""Spectral zeta function Z(s) = sum_n E_n^-s.

The first ``k`` levels come from the diagonalization oracle. The remaining
ones use the closed-form spectrum, summed by Euler-Maclaurin:

    sum_{n>=k} f(n) = int_k^inf f + f(k)/2 - sum_j B_2j/(2j)! f^(2j-1)(k)

For the quartic, E(N) = N^(4/3) (e1 + e2 t^2 + e3 t^4 + e4 t^6) with
N = n + 1/2 and t = N^(-1/3), which turns the tail integral into a smooth
integral over t with an algebraic weight at t = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import bernoulli, gamma

from .errors import AccuracyError, DivergenceError, UnsupportedMapError
from .model import Family, HarmonicReference
from .oracle import exact_spectrum
from .series import Series
from .wkb import quartic_closed_form

CORRECTIONS = 4
_B = bernoulli(2 * CORRECTIONS + 2)


@dataclass(frozen=True)
class ZetaEstimate:
    s: float
    k_numeric: int
    value: float
    tail_bound: float
    head: float
    tail: float


def exact_quartic_z1(spec):
    """Z(1) of the pure quartic (omega = 0), scaled from hbar = m = 1, mu = 4."""
    base = 3 ** (2 / 3) * gamma(1 / 3) ** 5 / (8 * math.pi**2)
    # E scales as (mu hbar^4 / m^2)^(1/3)
    return base * (4 * spec.mass**2 / (spec.coupling * spec.hbar**4)) ** (1 / 3)


def _power_terms(spec):
    """E(N) = sum_i c_i N^q_i for the closed-form spectrum."""
    if spec.family is Family.HARMONIC:
        return [(spec.hbar * spec.omega, 1.0)], 1.0
    if spec.family is Family.QUARTIC:
        cf = quartic_closed_form(spec)
        terms = [(cf.e1, 4 / 3), (cf.e2, 2 / 3), (cf.e3, 0.0), (cf.e4, -2 / 3)]
        return [(c, q) for c, q in terms if c != 0], 4 / 3
    raise UnsupportedMapError("zeta_hybrid supports the quartic and harmonic families")


def _jet(terms, s, N0, order):
    """Taylor coefficients of f(N) = E(N)^-s around N0."""
    E = Series([0.0] * order)
    for c, q in terms:
        # (N0 + h)^q = N0^q (1 + h/N0)^q
        unit = Series([1.0, 1.0 / N0] + [0.0] * (order - 2))
        E = E + unit.power(q) * (c * N0**q)
    lead = E[0]
    return (E * (1 / lead)).power(-s) * lead ** (-s)


def _tail_integral(terms, lead_power, s, N0):
    if lead_power == 1.0:
        (c, _), = terms
        return c ** (-s) * N0 ** (1 - s) / (s - 1)
    # N = t^-3, dN = -3 t^-4 dt, E = t^-4 P(t)
    coeffs = {round(3 * (4 / 3 - q)): c for c, q in terms}

    def P(t):
        return sum(c * t**k for k, c in coeffs.items())

    t0 = N0 ** (-1 / 3)
    val, err = quad(lambda t: 3 * P(t) ** (-s), 0.0, t0, weight="alg", wvar=(4 * s - 4, 0.0),
                    epsabs=0, epsrel=1e-13, limit=200)
    return val


def tail_sum(spec, s, k, corrections=CORRECTIONS):
    """Euler-Maclaurin sum of E_n^-s over n >= k; returns (value, bound)."""
    terms, lead_power = _power_terms(spec)
    N0 = k + 0.5
    jet = _jet(terms, s, N0, 2 * corrections + 3)
    deriv = [jet[j] * math.factorial(j) for j in range(jet.order)]
    total = _tail_integral(terms, lead_power, s, N0) + 0.5 * deriv[0]
    for j in range(1, corrections + 1):
        total -= _B[2 * j] / math.factorial(2 * j) * deriv[2 * j - 1]
    j = corrections + 1
    bound = abs(_B[2 * j] / math.factorial(2 * j) * deriv[2 * j - 1])
    return float(total), float(bound)


def zeta_hybrid(spec, s, k_numeric, tol=1e-6):
    """Z(s) with oracle energies for n < k_numeric and the closed form beyond."""
    if k_numeric < 1:
        raise ValueError("k_numeric must be >= 1")
    _, lead_power = _power_terms(spec)
    if not s * lead_power > 1:
        raise DivergenceError(f"Z(s) diverges for s <= {1 / lead_power:g}")
    if spec.family is Family.HARMONIC:
        head_energies = HarmonicReference.from_spec(spec).energy(np.arange(k_numeric))
    else:
        head_energies = np.array(exact_spectrum(spec, k_numeric - 1, tol=1e-10).energies)
    head = float(np.sum(head_energies ** (-s)))
    tail, bound = tail_sum(spec, s, k_numeric)
    if not bound < tol:
        raise AccuracyError(f"Euler-Maclaurin tail bound {bound:.3g} above tol", head + tail, bound)
    return ZetaEstimate(s=s, k_numeric=k_numeric, value=head + tail, tail_bound=bound, head=head, tail=tail)
