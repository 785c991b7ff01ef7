"""Reference values of the WKB integrals by singularity-free quadrature.

    J1(E) = int sqrt(E - V) dx
    J2(E) = int V'' / sqrt(E - V) dx
    J3(E) = int (7 V''^2 - 5 V' V''') / sqrt(E - V) dx

all taken between the turning points -A and A. Writing E - V(x) =
(A^2 - x^2) W(x) with W a polynomial that stays positive on [-A, A], and
substituting x = A sin(theta), the square-root endpoint singularities cancel
against the Jacobian A cos(theta) and every integrand becomes an analytic
function of theta.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import AccuracyError, DomainError
from .model import potential_derivative, turning_amplitude

DEFAULT_TOL = 1e-12
MAX_LEVELS = 20


class IntegralKind(str, enum.Enum):
    J1 = "J1"
    J2 = "J2"
    J3 = "J3"


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    levels: int


def reduced_width(spec, amplitude, x):
    """W(x) = (E - V(x)) / (A^2 - x^2) with E = V(A), without cancellation."""
    c = spec.even_coefficients()
    A2 = amplitude * amplitude
    x2 = np.asarray(x, dtype=float) ** 2
    W = np.zeros_like(x2)
    # (A^2j - x^2j) / (A^2 - x^2) = sum_i A^2i x^2(j-1-i)
    for j in range(1, len(c)):
        term = np.zeros_like(x2)
        for i in range(j):
            term = term + A2**i * x2 ** (j - 1 - i)
        W = W + c[j] * term
    return W


def integrand(kind, spec, amplitude, theta):
    """Integrand in theta after x = A sin(theta); smooth on [-pi/2, pi/2]."""
    kind = IntegralKind(kind)
    x = amplitude * np.sin(theta)
    W = reduced_width(spec, amplitude, x)
    if kind is IntegralKind.J1:
        return amplitude**2 * np.cos(theta) ** 2 * np.sqrt(W)
    d2 = potential_derivative(spec, x, 2)
    if kind is IntegralKind.J2:
        num = d2
    else:
        num = 7 * d2**2 - 5 * potential_derivative(spec, x, 1) * potential_derivative(spec, x, 3)
    return num / np.sqrt(W)


@lru_cache(maxsize=None)
def _gauss(order):
    return np.polynomial.legendre.leggauss(order)


def _composite(f, a, b, panels, order):
    nodes, weights = _gauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    return float(np.sum(np.repeat(half, order) * np.tile(weights, panels) * f(pts)))


def integrate(kind, spec, energy, tol=DEFAULT_TOL, order=20, max_levels=MAX_LEVELS):
    """Composite Gauss-Legendre with panel bisection until successive levels agree."""
    if not energy > 0:
        raise DomainError(f"energy must be positive, got {energy}")
    if not 1e-14 <= tol <= 1e-6:
        raise DomainError("tol must lie in [1e-14, 1e-6]")
    A = turning_amplitude(spec, energy).amplitude

    def f(theta):
        return integrand(kind, spec, A, theta)

    # the integrand is even in theta
    prev = 2 * _composite(f, 0.0, math.pi / 2, 1, order)
    err = math.inf
    for level in range(1, max_levels + 1):
        cur = 2 * _composite(f, 0.0, math.pi / 2, 2**level, order)
        err = abs(cur - prev)
        if err <= tol * abs(cur):
            return QuadratureResult(cur, err, level)
        prev = cur
    raise AccuracyError(f"{kind} quadrature did not reach tol={tol}", estimate=prev, error=err)


def integral_exact(kind, spec, energy, tol=DEFAULT_TOL):
    return integrate(kind, spec, energy, tol).value


# derivative order -> (5-point central weights, power of h, leading error order)
_STENCILS = {
    1: (np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0, 1, 4),
    2: (np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0, 2, 4),
    3: (np.array([-1.0, 2.0, 0.0, -2.0, 1.0]) / 2.0, 3, 2),
}


def finite_difference(f, x, order, step, levels=4):
    """Central 5-point difference with Richardson extrapolation over halved steps.

    Returns (estimate, error) where error is the last change in the table.
    """
    weights, power, lead = _STENCILS[order]
    offsets = np.array([-2, -1, 0, 1, 2])
    row = []
    h = step
    for _ in range(levels):
        vals = [f(x + k * h) if w != 0 else 0.0 for k, w in zip(offsets, weights)]
        row.append(float(np.dot(weights, vals)) / h**power)
        h /= 2
    err = math.inf
    # error expansion in h^lead, h^(lead+2), ...
    table = [row]
    k = lead
    while len(table[-1]) > 1:
        prev = table[-1]
        fac = 2.0**k
        nxt = [(fac * prev[i + 1] - prev[i]) / (fac - 1) for i in range(len(prev) - 1)]
        err = abs(nxt[-1] - prev[-1])
        table.append(nxt)
        k += 2
    return table[-1][0], err


def integral_exact_derivatives(kind, spec, energy, order, tol=DEFAULT_TOL, step=None, levels=4):
    """d^k J / dE^k by Richardson-extrapolated central differences of integral_exact.

    Returns (value, error_estimate). The default step is 1e-3 E for first
    derivatives and 0.05 E for third derivatives, where the h^-3 roundoff of
    the smaller step would swamp the extrapolation.
    """
    if order not in _STENCILS:
        raise ValueError("order must be 1, 2 or 3")
    if step is None:
        step = (1e-3 if order == 1 else 5e-2) * energy
    if not 2 * step < energy:
        raise AccuracyError("finite-difference step leaves the energy domain", estimate=None, error=None)
    if step < 1e-300:
        raise AccuracyError("finite-difference step underflow")
    return finite_difference(lambda e: integral_exact(kind, spec, e, tol), energy, order, step, levels)
