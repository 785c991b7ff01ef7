"""WKB quantization to order hbar^4 and closed-form spectra.

The quantization condition is

    Lambda(E) = J1 - hbar^2/(48 m) dJ2/dE + hbar^4/(11520 m^2) d^3J3/dE^3
              = pi hbar (n + 1/2) / sqrt(2 m).

With the delta-expansion approximants every term is a RadicalSeries in
zeta, and d/dE = (dE/dzeta)^-1 d/dzeta keeps that form, so Lambda and all
its energy derivatives stay exact up to the final floating-point evaluation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy
from scipy.special import beta

from . import quadrature
from .delta import COUPLING_NAME, InterpolationConfig, RadicalSeries, _param_tuple, build_expansion
from .errors import FormulaRangeError, SolverError, UnsupportedMapError
from .model import Family, HarmonicReference, anharmonic_zeta
from .quadrature import IntegralKind
from .series import Dual, Poly, Series


class HbarOrder(str, enum.Enum):
    H0 = "h0"
    H2 = "h2"
    H4 = "h4"


class IntegralSource(str, enum.Enum):
    SERIES = "series"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class QuantizationConfig:
    hbar_order: HbarOrder = HbarOrder.H4
    delta_order: int = 10
    integral_source: IntegralSource = IntegralSource.SERIES
    lambda_mode: str = "pms"

    def __post_init__(self):
        object.__setattr__(self, "hbar_order", HbarOrder(self.hbar_order))
        object.__setattr__(self, "integral_source", IntegralSource(self.integral_source))
        if int(self.delta_order) < 1:
            raise ValueError("delta_order must be >= 1")

    @property
    def interpolation(self):
        return InterpolationConfig(self.delta_order, self.lambda_mode)


@dataclass(frozen=True)
class LevelResult:
    n: int
    energy: float
    method: str
    residual: float
    iterations: int


# ---------------------------------------------------------------------------
# Lambda(E) from the series approximants

def inverse_energy_slope(family):
    """(dE/dzeta)^-1 as a RadicalSeries for the anharmonic family."""
    p = {Family.QUARTIC: 2, Family.SEXTIC: 3}[Family(family)]
    e = Fraction(1, p - 1)
    return RadicalSeries(
        coeffs=(Fraction(-2 * (p - 1)),),
        zeta_power=p * e + 1,
        factors=(((1, 1), Fraction(-1)),),
        param_exponents=_param_tuple({"m": -p * e, "omega": -2 * p * e, COUPLING_NAME[Family(family)]: e}),
    )


def energy_derivative(series, family, order=1):
    inv = inverse_energy_slope(family)
    out = series
    for _ in range(order):
        out = out.derivative().times(inv)
    return out


@lru_cache(maxsize=None)
def _lambda_terms(family, hbar_order, delta_order, lambda_mode):
    from .model import PotentialSpec

    spec = PotentialSpec(family, coupling=1.0)
    cfg = InterpolationConfig(delta_order, lambda_mode)
    terms = [build_expansion(IntegralKind.J1, spec, cfg).series]
    if hbar_order in (HbarOrder.H2, HbarOrder.H4):
        j2 = build_expansion(IntegralKind.J2, spec, cfg).series
        terms.append(energy_derivative(j2, family, 1).scaled(Fraction(-1, 48), hbar=2, m=-1))
    if hbar_order is HbarOrder.H4:
        j3 = build_expansion(IntegralKind.J3, spec, cfg).series
        terms.append(energy_derivative(j3, family, 3).scaled(Fraction(1, 11520), hbar=4, m=-2))
    slopes = [energy_derivative(t, family, 1) for t in terms]
    return tuple(terms), tuple(slopes)


def lambda_series_terms(spec, config=QuantizationConfig()):
    """Lambda(zeta) and dLambda/dE as tuples of RadicalSeries."""
    return _lambda_terms(Family(spec.family), config.hbar_order, int(config.delta_order), config.lambda_mode)


def _series_zeta(spec, energy):
    if spec.omega == 0:
        raise UnsupportedMapError("series approximants need omega > 0")
    return anharmonic_zeta(spec, energy)


def lambda_of_energy(spec, energy, config=QuantizationConfig()):
    return _lambda_and_slope(spec, energy, config)[0]


def lambda_slope(spec, energy, config=QuantizationConfig()):
    """dLambda/dE: analytic for the series source, finite differences otherwise."""
    value = _lambda_and_slope(spec, energy, config)[1]
    if value is None:
        value, _ = quadrature.finite_difference(
            lambda e: lambda_of_energy(spec, e, config), energy, 1, 1e-3 * energy)
    return value


def _lambda_and_slope(spec, energy, config):
    if spec.family is Family.HARMONIC:
        ref = HarmonicReference.from_spec(spec)
        # J2 and J3 do not depend on E: the hbar corrections vanish identically
        return ref.j1(energy), ref.j1(1.0)
    if config.integral_source is IntegralSource.SERIES:
        zeta = _series_zeta(spec, energy)
        terms, slopes = lambda_series_terms(spec, config)
        return (sum(t.evaluate(spec, zeta) for t in terms),
                sum(t.evaluate(spec, zeta) for t in slopes))
    value = quadrature.integral_exact(IntegralKind.J1, spec, energy)
    m, hbar = spec.mass, spec.hbar
    if config.hbar_order in (HbarOrder.H2, HbarOrder.H4):
        d1, _ = quadrature.integral_exact_derivatives(IntegralKind.J2, spec, energy, 1)
        value -= hbar**2 / (48 * m) * d1
    if config.hbar_order is HbarOrder.H4:
        d3, _ = quadrature.integral_exact_derivatives(IntegralKind.J3, spec, energy, 3)
        value += hbar**4 / (11520 * m**2) * d3
    return value, None


# ---------------------------------------------------------------------------

def quantum_target(spec, n):
    return math.pi * spec.hbar * (n + 0.5) / math.sqrt(2 * spec.mass)


def leading_seed(spec, n):
    """Lower estimates of E_n from the harmonic and the pure anharmonic parts."""
    K = quantum_target(spec, n)
    seeds = []
    if spec.omega > 0:
        seeds.append(spec.hbar * spec.omega * (n + 0.5))
    if spec.power is not None:
        p = spec.power
        # int sqrt(E - c x^2p / 2p) dx = B (2p/c)^(1/2p) E^(1/2 + 1/2p)
        B = beta(1 / (2 * p), 1.5) / p
        seeds.append((K / (B * (2 * p / spec.coupling) ** (1 / (2 * p)))) ** (1 / (0.5 + 0.5 / p)))
    return max(seeds)


def _safeguarded_newton(f, lo, hi, x0, xtol=1e-12, maxiter=200):
    """Newton on an increasing function, falling back to bisection outside [lo, hi]."""
    flo, _ = f(lo)
    fhi, _ = f(hi)
    if flo > 0 or fhi < 0:
        raise SolverError("root not bracketed", {"lo": lo, "hi": hi, "f_lo": flo, "f_hi": fhi})
    x = x0
    for it in range(1, maxiter + 1):
        fx, dfx = f(x)
        if fx == 0:
            return x, it
        if fx < 0:
            lo = x
        else:
            hi = x
        if dfx is not None and dfx > 0:
            step = fx / dfx
            nxt = x - step
        else:
            nxt = None
        if nxt is None or not (lo < nxt < hi):
            nxt = 0.5 * (lo + hi)
        if abs(nxt - x) <= xtol * abs(nxt):
            return nxt, it
        if hi - lo <= xtol * abs(hi):
            return 0.5 * (lo + hi), it
        x = nxt
    raise SolverError("Newton iteration did not converge", {"lo": lo, "hi": hi, "x": x})


def solve_level(spec, n, config=QuantizationConfig()):
    """Energy of level n from Lambda(E) = pi hbar (n + 1/2) / sqrt(2m)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    K = quantum_target(spec, n)
    exact_slope = spec.family is Family.HARMONIC or config.integral_source is IntegralSource.SERIES

    def f(E):
        value, slope = _lambda_and_slope(spec, E, config)
        if slope is None:
            # dJ1/dE dominates the slope; good enough to steer Newton
            slope = quadrature.integral_exact_derivatives(IntegralKind.J1, spec, E, 1)[0]
        return value - K, slope

    seed = leading_seed(spec, n)
    lo, hi = 0.5 * seed, 2.0 * seed
    for _ in range(60):
        if f(lo)[0] <= 0:
            break
        lo *= 0.5
    for _ in range(60):
        if f(hi)[0] >= 0:
            break
        hi *= 2.0
    E, iterations = _safeguarded_newton(f, lo, hi, seed if lo < seed < hi else 0.5 * (lo + hi))
    residual = abs(f(E)[0])
    # finite-difference derivatives of quadrature integrals jitter near 1e-10
    if residual > (1e-11 if exact_slope else 1e-9) * K:
        raise SolverError("quantization residual above tolerance",
                          {"n": n, "energy": E, "residual": residual, "exact_slope": exact_slope})
    method = f"wkb-{config.hbar_order.value}-{config.integral_source.value}"
    return LevelResult(n=n, energy=float(E), method=method, residual=float(residual), iterations=iterations)


def solve_spectrum(spec, n_max, config=QuantizationConfig()):
    return [solve_level(spec, n, config) for n in range(n_max + 1)]


# ---------------------------------------------------------------------------
# closed forms by series reversion around zeta = 0

_SYMBOLS = {name: sympy.Symbol(name, positive=True) for name in ("hbar", "m", "omega", "mu", "rho")}


def _symbolic_prefactor(series):
    out = sympy.Rational(series.prefactor_rational.numerator, series.prefactor_rational.denominator)
    for name, e in series.param_exponents:
        base = sympy.pi if name == "pi" else _SYMBOLS.get(name) or sympy.Integer(int(name))
        out *= base ** sympy.Rational(e.numerator, e.denominator)
    return out


def _sym(x):
    x = Fraction(x)
    return sympy.Rational(x.numerator, x.denominator)


def _taylor(series, order):
    """Split a RadicalSeries as sigma * zeta^a * T(zeta) with T a rational Taylor series.

    Returns (sigma, a, T) where sigma is a sympy number times parameters.
    """
    sigma = _symbolic_prefactor(series)
    T = Series.from_poly(series.poly, order)
    for base, e in series.factors:
        b = Poly(base)
        b0 = b[0]
        sigma *= sympy.Integer(int(b0)) ** _sym(e)
        T = T * Series.from_poly(b * (1 / b0), order).power(e)
    return sigma, series.zeta_power, T


def _to_params(expr, spec):
    subs = {_SYMBOLS["hbar"]: spec.hbar, _SYMBOLS["m"]: spec.mass, _SYMBOLS["omega"]: spec.omega,
            _SYMBOLS["mu"]: spec.coupling, _SYMBOLS["rho"]: spec.coupling}
    return float(sympy.N(expr.subs(subs), 30))


@dataclass(frozen=True)
class ClosedFormQuartic:
    """Coefficients of E_n ~ e1 N^(4/3) + e2 N^(2/3) + e3 + e4 N^(-2/3), N = n + 1/2.

    ``e4`` is the sum of the hbar^2 correction term ``e4_terms[0]`` and the
    classical term ``e4_terms[1]``. ``exact`` maps each coefficient to its
    symbolic form in hbar, m, omega, mu.
    """

    e1: float
    e2: float
    e3: float
    e4: float
    e4_terms: tuple
    exact: dict = field(repr=False, compare=False)


@lru_cache(maxsize=None)
def _quartic_symbolic(delta_order, lambda_mode):
    terms, _ = _lambda_terms(Family.QUARTIC, HbarOrder.H2, delta_order, lambda_mode)
    M = 5  # zeta through zeta^4 reaches the N^(-2/3) term of the energy
    sigma0, a0, T0 = _taylor(terms[0], M)
    t00 = T0[0]
    sigma0 = sigma0 * _sym(t00)
    sigma1, a1, T1 = _taylor(terms[1], M)
    k = a1 - a0
    if k.denominator != 1 or k < 0:
        raise ArithmeticError("hbar correction is not an integer power of zeta beyond J1")
    eta = sympy.simplify(sigma1 / sigma0)
    # Phi(zeta) = T0/t00 + eta zeta^k T1, with eta = sigma1 / (sigma0 t00) with eta kept to first order
    Phi = Series([Dual(T0[j] / t00, T1[j - int(k)] if j >= k else Fraction(0)) for j in range(M)])
    r = -a0  # Lambda = sigma0 zeta^(-r) Phi(zeta)
    z = Series.variable(M, Dual(Fraction(1)))
    for _ in range(M):
        z = Phi.compose(z).power(1 / r).shift(1)
    # a(tau) = z / tau with a(0) = 1
    a = Series(z.c[1:] + [Dual(Fraction(0))])
    inv1, inv2 = a.power(-1), a.power(-2)
    N = sympy.Symbol("N", positive=True)
    m, w, mu, hbar = (_SYMBOLS[s] for s in ("m", "omega", "mu", "hbar"))
    K = sympy.pi * hbar * N / sympy.sqrt(2 * m)
    tau = (sigma0 / K) ** (1 / _sym(r))
    pref = m**2 * w**4 / (4 * mu)
    # E = pref (zeta^-2 + 2 zeta^-1) = pref (tau^-2 a^-2 + 2 tau^-1 a^-1)
    coeffs = {}
    for j in (-2, -1, 0, 1):
        c = inv2[j + 2] + (inv1[j + 1] * 2 if j + 1 >= 0 else Dual(Fraction(0)))
        coeffs[j] = c
    out = {}
    names = {-2: "e1", -1: "e2", 0: "e3"}
    for j, c in coeffs.items():
        base = sympy.powsimp(sympy.expand_power_base(pref * tau**j * N ** (sympy.Rational(2 * j, 3)), force=True), force=True)
        if j < 1:
            if c.b != 0:
                raise ArithmeticError("hbar^2 term leaked below the N^(-2/3) order")
            out[names[j]] = sympy.nsimplify(_sym(c.a)) * base
        else:
            out["e4_classical"] = _sym(c.a) * base
            out["e4_quantum"] = sympy.powsimp(sympy.expand_power_base(_sym(c.b) * eta * base, force=True), force=True)
    return {k: sympy.simplify(v) for k, v in out.items()}


def quartic_closed_form(spec, delta_order=10, lambda_mode="pms"):
    if spec.family is not Family.QUARTIC:
        raise ValueError("quartic_closed_form needs the quartic family")
    exact = _quartic_symbolic(int(delta_order), lambda_mode)
    vals = {k: _to_params(v, spec) for k, v in exact.items()}
    return ClosedFormQuartic(
        e1=vals["e1"], e2=vals["e2"], e3=vals["e3"],
        e4=vals["e4_quantum"] + vals["e4_classical"],
        e4_terms=(vals["e4_quantum"], vals["e4_classical"]),
        exact=exact,
    )


def quartic_energy_closed_form(coeffs, n):
    N = np.asarray(n, dtype=float) + 0.5
    out = coeffs.e1 * N ** (4 / 3) + coeffs.e2 * N ** (2 / 3) + coeffs.e3 + coeffs.e4 * N ** (-2 / 3)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ClosedFormSextic:
    """E_n = (alpha1 N + alpha2 - sqrt(beta1 N^2 + beta2 N + beta3))^(-3/2), N = n + 1/2."""

    alpha1: float
    alpha2: float
    beta1: float
    beta2: float
    beta3: float
    exact: dict = field(repr=False, compare=False)


@lru_cache(maxsize=None)
def _sextic_symbolic(delta_order, lambda_mode):
    from .model import PotentialSpec

    series = build_expansion(IntegralKind.J1, PotentialSpec.sextic(),
                             InterpolationConfig(delta_order, lambda_mode)).series
    M = 4
    sigma0, a0, T = _taylor(series, M)
    if a0 != -1:
        raise ArithmeticError("unexpected zeta power in the sextic J1 approximant")
    # X = E^(-2/3) = kappa Y with Y = zeta (1 + 3 zeta)^(-2/3); invert zeta = zeta(Y)
    three_z = Series([Fraction(1), Fraction(3)], M)
    z = Series.variable(M)
    for _ in range(M):
        z = three_z.compose(z).power(Fraction(2, 3)).shift(1)
    # J1 = sigma0 zeta^-1 T(zeta) = sigma0 Y^-1 * (T(zeta(Y)) / (zeta / Y))
    ratio = Series(z.c[1:] + [Fraction(0)])
    t = T.compose(z) * ratio.power(-1)
    t0, t1, t2 = (_sym(t[j]) for j in range(3))
    m, w, rho, hbar = (_SYMBOLS[s] for s in ("m", "omega", "rho", "hbar"))
    kappa = 6 ** sympy.Rational(2, 3) * rho ** sympy.Rational(1, 3) / (m * w**2)
    alpha1 = sympy.pi * hbar * kappa / (2 * sympy.sqrt(2 * m) * sigma0 * t2)
    alpha2 = -t1 * kappa / (2 * t2)
    out = {
        "alpha1": alpha1,
        "alpha2": alpha2,
        "beta1": alpha1**2,
        "beta2": 2 * alpha1 * alpha2,
        "beta3": alpha2**2 - t0 * kappa**2 / t2,
    }
    return {k: sympy.simplify(v) for k, v in out.items()}


def sextic_closed_form(spec, delta_order=10, lambda_mode="pms"):
    if spec.family is not Family.SEXTIC:
        raise ValueError("sextic_closed_form needs the sextic family")
    exact = _sextic_symbolic(int(delta_order), lambda_mode)
    vals = {k: _to_params(v, spec) for k, v in exact.items()}
    return ClosedFormSextic(exact=exact, **vals)


def sextic_energy_closed_form(coeffs, n):
    N = n + 0.5
    disc = coeffs.beta1 * N * N + coeffs.beta2 * N + coeffs.beta3
    if disc < 0:
        raise FormulaRangeError(f"negative discriminant at n={n}", n=n)
    base = coeffs.alpha1 * N + coeffs.alpha2 - math.sqrt(disc)
    if not base > 0:
        raise FormulaRangeError(f"nonpositive base at n={n}", n=n)
    return base ** (-1.5)
