"""Linear delta expansion of the WKB integrals with exact rational coefficients.

The potential is interpolated between a harmonic trial potential
V0 = (m w^2 + lambda^2) x^2 / 2, tuned to share the turning points of V, and
V itself. With x = A u, g = coupling * A^(2p-2) and zeta = m w^2 / g, the
ratio

    Delta(u) = (E - E0 - V + V0) / (E0 - V0) = (h(u) - l) / (zeta + l)

has h(u) = (1 + u^2 + ... + u^(2p-2)) / p and l = lambda^2 / g. Expanding
(1 + Delta)^(+-1/2) binomially, each term is a polynomial in u^2 integrated
exactly against sqrt(1 - u^2)^(+-1) (Wallis moments). Fixing l by first-order
stationarity in lambda gives l = <F h> / <F> with <.> the weighted moment, so
l is a rational function of zeta and the whole truncated expansion collapses
to

    const * zeta^a * Q(zeta)^(s - N) * I(zeta)^b * sum_n c_n zeta^n

with Q = zeta <F> + <F h>, I = <F> and exact rational c_n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy

from .errors import DomainError, PMSFailure
from .model import Family, PotentialSpec
from .quadrature import IntegralKind
from .series import Poly

HALF = Fraction(1, 2)

COUPLING_NAME = {Family.QUARTIC: "mu", Family.SEXTIC: "rho"}


# ---------------------------------------------------------------------------
# polynomials in u^2 with coefficients in Q[zeta]

def _umul(a, b):
    out = [Poly() for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = out[i + j] + x * y
    return out


def _uadd(a, b):
    n = max(len(a), len(b))
    return [(a[k] if k < len(a) else Poly()) + (b[k] if k < len(b) else Poly()) for k in range(n)]


def _uscale(a, p):
    return [x * p for x in a]


def _double_factorial(n):
    return math.prod(range(n, 0, -2)) if n > 0 else 1


@lru_cache(maxsize=None)
def wallis_moment(j, weight):
    """int_{-1}^{1} u^(2j) (1 - u^2)^(weight/2) du / pi for weight = +1 or -1."""
    if weight == 1:
        return Fraction(_double_factorial(2 * j - 1), _double_factorial(2 * j + 2))
    return Fraction(_double_factorial(2 * j - 1), _double_factorial(2 * j))


def _integrate(upoly, weight):
    total = Poly()
    for j, coeff in enumerate(upoly):
        if coeff:
            total = total + coeff * wallis_moment(j, weight)
    return total


@dataclass(frozen=True)
class _KindData:
    weight: int  # +1: sqrt(1-u^2), -1: 1/sqrt(1-u^2)
    s: Fraction  # exponent of (1 + Delta)
    F: list  # numerator polynomial in u^2
    root2: Fraction  # power of 2 in front
    dims: dict  # powers of m, omega, coupling
    zeta_dim: Fraction


def _kind_data(kind, p):
    zeta = Poly([0, 1])
    one = Poly([1])
    # v'' = zeta + (2p-1) u^(2p-2)
    v2 = [zeta] + [Poly()] * (p - 1)
    v2[p - 1] = v2[p - 1] + (2 * p - 1)
    if kind is IntegralKind.J1:
        e = Fraction(1, p - 1)
        return _KindData(1, HALF, [one], -HALF,
                         {"m": e + HALF, "omega": 2 * e + 1, "coupling": -e}, -e - HALF)
    if kind is IntegralKind.J2:
        return _KindData(-1, -HALF, v2, HALF, {"m": HALF, "omega": Fraction(1)}, -HALF)
    # 7 v''^2 - 5 v' v''' with v' v''' = (2p-1)(2p-2) (zeta u^(2p-2) + u^(4p-4))
    k = (2 * p - 1) * (2 * p - 2)
    vv = [Poly()] * (2 * p - 1)
    vv[p - 1] = vv[p - 1] + zeta * k
    vv[2 * p - 2] = vv[2 * p - 2] + k
    F = _uadd(_uscale(_umul(v2, v2), Poly([7])), _uscale(vv, Poly([-5])))
    return _KindData(-1, -HALF, F, HALF, {"m": Fraction(3, 2), "omega": Fraction(3)}, Fraction(-3, 2))


def _h(p):
    return [Poly([Fraction(1, p)]) for _ in range(p)]


def _family_power(family):
    family = Family(family)
    if family is Family.QUARTIC:
        return 2
    if family is Family.SEXTIC:
        return 3
    raise NotImplementedError(f"no delta expansion for the {family.value} family")


# ---------------------------------------------------------------------------
# exact radicals: rational * sqrt(rational)

def _split_sqrt(r):
    """sqrt(r) = q * S^(-1/2) with q rational and S a squarefree integer."""
    if r <= 0:
        raise ArithmeticError("square root of a nonpositive constant")
    a, b = r.numerator, r.denominator
    # sqrt(a/b) = a / sqrt(a b)
    n = a * b
    square, free = 1, 1
    for prime, e in sympy.factorint(n).items():
        square *= prime ** (e // 2)
        free *= prime ** (e % 2)
    return Fraction(a, square), free


def _rational_power(c, q):
    """c**q for rational c > 0 and half-integer q, as (rational, radicand)."""
    whole = math.floor(q)
    rat = c**whole
    if q - whole == 0:
        return rat, Fraction(1)
    return rat, c


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadicalSeries:
    """prefactor * zeta^zeta_power * prod_i B_i(zeta)^e_i * sum_n c_n zeta^n.

    ``factors`` holds (integer coefficient tuple of B_i, exponent e_i); the
    first entry is the radical base carrying the expansion order. The
    prefactor is ``prefactor_rational`` times a product of named powers:
    "pi", physical parameters ("m", "omega", "mu", "rho", "hbar") and bare
    integers written as strings (e.g. "2": -1/2 for 1/sqrt(2)).
    """

    coeffs: tuple
    zeta_power: Fraction
    factors: tuple = ()
    param_exponents: tuple = ()
    prefactor_rational: Fraction = Fraction(1)

    @property
    def params(self):
        return dict(self.param_exponents)

    @property
    def poly(self):
        return Poly(self.coeffs)

    @property
    def radical_base(self):
        return self.factors[0][0] if self.factors else (1,)

    @property
    def radical_power(self):
        return self.factors[0][1] if self.factors else Fraction(0)

    def __len__(self):
        return len(self.coeffs)

    # -- numeric evaluation -------------------------------------------------

    def prefactor_value(self, spec):
        values = {"pi": math.pi, "m": spec.mass, "omega": spec.omega, "hbar": spec.hbar,
                  "mu": spec.coupling, "rho": spec.coupling}
        out = float(self.prefactor_rational)
        for name, e in self.param_exponents:
            base = values[name] if name in values else float(int(name))
            out *= base ** float(e)
        return out

    def shape(self, zeta):
        """Everything except the prefactor, evaluated at zeta (scalar or array)."""
        z = np.asarray(zeta, dtype=float)
        P = np.array(self.coeffs, dtype=float)
        out = np.empty_like(z)
        small = z <= 1
        # direct evaluation for zeta <= 1
        zs = z[small]
        val = zs ** float(self.zeta_power) * np.polynomial.polynomial.polyval(zs, P)
        for base, e in self.factors:
            val = val * np.polynomial.polynomial.polyval(zs, np.array(base, dtype=float)) ** float(e)
        out[small] = val
        # reversed polynomials in 1/zeta for zeta > 1 to avoid overflow
        zl = z[~small]
        w = 1 / zl
        total = float(self.zeta_power) + (len(P) - 1)
        val = np.polynomial.polynomial.polyval(w, P[::-1])
        for base, e in self.factors:
            b = np.array(base, dtype=float)
            total += (len(b) - 1) * float(e)
            val = val * np.polynomial.polynomial.polyval(w, b[::-1]) ** float(e)
        out[~small] = val * zl**total
        return out if out.ndim else float(out)

    def evaluate(self, spec, zeta):
        return self.prefactor_value(spec) * self.shape(zeta)

    # -- exact calculus -----------------------------------------------------

    def derivative(self):
        """d/dzeta as a single RadicalSeries (product rule on every factor)."""
        P = self.poly
        bases = [Poly(b) for b, _ in self.factors]
        prod_all = Poly([1])
        for b in bases:
            prod_all = prod_all * b
        zeta = Poly([0, 1])
        T = P * prod_all * self.zeta_power + zeta * P.derivative() * prod_all
        for i, (b, (_, e)) in enumerate(zip(bases, self.factors)):
            others = Poly([1])
            for j, c in enumerate(bases):
                if j != i:
                    others = others * c
            T = T + zeta * P * b.derivative() * others * e
        T, k = T.shift_down()
        factors = [(b, e - 1) for b, e in self.factors]
        # undo exponent drops where the new numerator still carries the base
        for i, (b, e) in enumerate(factors):
            B = Poly(b)
            if B.degree > 0:
                q, r = T.divmod(B)
                if not r:
                    T = q
                    factors[i] = (b, e + 1)
        return RadicalSeries(tuple(T.coeffs) or (Fraction(0),), self.zeta_power - 1 + k,
                             tuple(factors), self.param_exponents, self.prefactor_rational)._tidy()

    def nth_derivative(self, order):
        out = self
        for _ in range(order):
            out = out.derivative()
        return out

    def times(self, other):
        """Product of two RadicalSeries, merging equal bases and parameters."""
        merged = dict()
        for b, e in self.factors + other.factors:
            merged[b] = merged.get(b, Fraction(0)) + e
        params = dict(self.param_exponents)
        for k, e in other.param_exponents:
            params[k] = params.get(k, Fraction(0)) + e
        P = self.poly * other.poly
        return RadicalSeries(tuple(P.coeffs), self.zeta_power + other.zeta_power,
                             tuple(merged.items()), _param_tuple(params),
                             self.prefactor_rational * other.prefactor_rational)._tidy()

    def scaled(self, rational=1, **params):
        merged = dict(self.param_exponents)
        for k, e in params.items():
            merged[k] = merged.get(k, Fraction(0)) + Fraction(e)
        return RadicalSeries(self.coeffs, self.zeta_power, self.factors, _param_tuple(merged),
                             self.prefactor_rational * Fraction(rational))

    def _tidy(self):
        P = self.poly
        factors = []
        for b, e in self.factors:
            if e == 0:
                continue
            if e.denominator == 1 and e > 0:
                P = P * Poly(b) ** int(e)
                continue
            factors.append((b, e))
        coeffs = tuple(P.coeffs) or (Fraction(0),)
        return RadicalSeries(coeffs, self.zeta_power, tuple(factors), self.param_exponents,
                             self.prefactor_rational)

    # -- serialization --------------------------------------------------------

    def to_json(self):
        def frac(x):
            x = Fraction(x)
            return [x.numerator, x.denominator]

        main, extra = (self.factors[0], self.factors[1:]) if self.factors else (((1,), Fraction(0)), ())
        return {
            "prefactor_rational": frac(self.prefactor_rational),
            "param_exponents": {k: frac(e) for k, e in self.param_exponents},
            "zeta_power": frac(self.zeta_power),
            "radical_base": list(main[0]),
            "radical_power": frac(main[1]),
            "extra_factors": [{"base": list(b), "power": frac(e)} for b, e in extra],
            "coeffs": [frac(c) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data):
        def frac(x):
            return Fraction(int(x[0]), int(x[1]))

        factors = []
        if frac(data["radical_power"]) != 0 or tuple(data["radical_base"]) != (1,):
            factors.append((tuple(int(c) for c in data["radical_base"]), frac(data["radical_power"])))
        for item in data.get("extra_factors", []):
            factors.append((tuple(int(c) for c in item["base"]), frac(item["power"])))
        return cls(
            coeffs=tuple(frac(c) for c in data["coeffs"]),
            zeta_power=frac(data["zeta_power"]),
            factors=tuple(factors),
            param_exponents=_param_tuple({k: frac(v) for k, v in data["param_exponents"].items()}),
            prefactor_rational=frac(data["prefactor_rational"]),
        )


def _param_tuple(params):
    order = {"pi": 0, "hbar": 1, "m": 2, "omega": 3, "mu": 4, "rho": 5}
    items = [(k, Fraction(e)) for k, e in params.items() if e != 0]
    return tuple(sorted(items, key=lambda kv: (order.get(kv[0], 10), kv[0])))


def evaluate_series(series, spec, zeta):
    if np.any(np.asarray(zeta) <= 0):
        raise DomainError("zeta must be positive")
    return series.evaluate(spec, zeta)


def differentiate_series(series, order=1):
    if order < 1:
        raise ValueError("order must be >= 1")
    return series.nth_derivative(order)


def evaluate_sum(terms, spec, zeta):
    return sum(t.evaluate(spec, zeta) for t in terms)


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InterpolationConfig:
    """delta_order N and the interpolating frequency shift.

    ``lambda_squared`` is a number >= 0, "pms" (first-order stationarity per
    integral) or "pms-shared" (the J1 stationary point used for every
    integral).
    """

    delta_order: int = 10
    lambda_squared: object = "pms"

    def __post_init__(self):
        if int(self.delta_order) < 1:
            raise DomainError("delta_order must be >= 1")
        if isinstance(self.lambda_squared, str):
            if self.lambda_squared not in ("pms", "pms-shared"):
                raise DomainError(f"unknown lambda mode {self.lambda_squared!r}")
        elif not self.lambda_squared >= 0:
            raise DomainError("lambda_squared must be nonnegative")


@dataclass(frozen=True)
class DeltaPolynomial:
    """Delta(x) = sum_k coeffs[k] x^(2k) at a fixed amplitude and lambda^2."""

    coeffs: tuple
    amplitude: float
    lambda_squared: float
    spec: PotentialSpec = field(repr=False)

    def __call__(self, x):
        x2 = np.asarray(x, dtype=float) ** 2
        return np.polynomial.polynomial.polyval(x2, np.array(self.coeffs, dtype=float))

    def defining_ratio(self, x):
        """(E - E0 - V + V0) / (E0 - V0) computed from the potentials directly."""
        from .model import evaluate_potential

        A = float(self.amplitude)
        k0 = float(self.spec.spring + self.lambda_squared)
        E = float(evaluate_potential(self.spec, A))
        E0 = 0.5 * k0 * A * A
        V = evaluate_potential(self.spec, x)
        V0 = 0.5 * k0 * np.asarray(x, dtype=float) ** 2
        return (E - E0 - V + V0) / (E0 - V0)

    def sup_abs(self, npts=200):
        A = float(self.amplitude)
        x = np.linspace(-A, A, npts)
        return float(np.max(np.abs(self(x))))


def build_delta(spec, amplitude, lambda_squared):
    if not amplitude > 0:
        raise DomainError("amplitude must be positive")
    if not lambda_squared >= 0:
        raise DomainError("lambda_squared must be nonnegative")
    c = list(spec.even_coefficients()) if not _exact(spec) else _exact_coefficients(spec)
    A2 = amplitude * amplitude
    k0 = spec.spring + lambda_squared
    # W(x) = (E - V)/(A^2 - x^2) = sum_j c_j sum_i A^2i x^2(j-1-i); Delta = 2W/k0 - 1
    W = [0] * max(len(c) - 1, 1)
    for j in range(1, len(c)):
        for i in range(j):
            W[j - 1 - i] = W[j - 1 - i] + c[j] * A2**i
    coeffs = [2 * w / k0 for w in W]
    coeffs[0] = coeffs[0] - 1
    return DeltaPolynomial(tuple(coeffs), amplitude, lambda_squared, spec)


def _exact(spec):
    return all(isinstance(v, Fraction) for v in (spec.mass, spec.omega, spec.coupling))


def _exact_coefficients(spec):
    c = [Fraction(0), spec.mass * spec.omega**2 / 2]
    p = spec.power
    if p is not None:
        c += [Fraction(0)] * (p - 1)
        c[p] = spec.coupling / (2 * p)
    return c


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PmsResult:
    lambda_squared: float
    ratio: tuple  # (numerator, denominator) Poly in zeta: lambda^2 / g
    residual: float
    order_used: int = 1


def _moments(kind, p):
    d = _kind_data(kind, p)
    I0 = _integrate(d.F, d.weight)
    Hb = _integrate(_umul(d.F, _h(p)), d.weight)
    return d, I0, Hb


def pms_ratio(kind, family):
    """lambda^2 / g = <F h> / <F> as a pair of polynomials in zeta."""
    p = _family_power(family)
    _, I0, Hb = _moments(IntegralKind(kind), p)
    return Hb, I0


def _scale(spec, amplitude):
    g = spec.coupling * amplitude ** (2 * spec.power - 2)
    return g, spec.spring / g


def first_order_value(kind, spec, amplitude, lambda_squared):
    """First-order delta expansion of J_kind at arbitrary lambda^2."""
    kind = IntegralKind(kind)
    p = _family_power(spec.family)
    d, I0, Hb = _moments(kind, p)
    g, z = _scale(spec, amplitude)
    ell = lambda_squared / g
    pre = _dim_factor(d, amplitude, g) * math.pi * 2.0 ** float(d.root2)
    i0, hb = float(I0(z)), float(Hb(z))
    s = float(d.s)
    return pre * (z + ell) ** s * (i0 + s * (hb - ell * i0) / (z + ell))


def _dim_factor(d, amplitude, g):
    if d.weight == 1:
        return amplitude**2 * math.sqrt(g)
    return g ** (float(-d.zeta_dim))


def pms_first_order(kind, spec, amplitude):
    if not amplitude > 0:
        raise DomainError("amplitude must be positive")
    kind = IntegralKind(kind)
    p = _family_power(spec.family)
    d, I0, Hb = _moments(kind, p)
    g, z = _scale(spec, amplitude)
    ell = float(Hb(z)) / float(I0(z))
    if not ell >= 0:
        raise PMSFailure(f"stationary lambda^2 < 0 for {kind.value}")
    lam2 = ell * g
    # d/d(lambda^2) of the first-order value: s (s-1) (Hb - l I0)(z + l)^(s-2) / g
    s = float(d.s)
    pre = _dim_factor(d, amplitude, g) * math.pi * 2.0 ** float(d.root2)
    residual = pre * s * (s - 1) * (float(Hb(z)) - ell * float(I0(z))) * (z + ell) ** (s - 2) / g
    return PmsResult(lam2, (Hb, I0), residual)


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Expansion:
    """Truncated expansion of one integral together with its Delta data."""

    kind: IntegralKind
    family: Family
    order: int
    ell: tuple  # (num, den) polynomials: lambda^2 / g
    Q: Poly  # zeta * den + num
    R: tuple  # Delta numerator: polynomial in u^2 with Q[zeta] coefficients
    series: RadicalSeries

    def delta_values(self, zeta, u):
        """Delta(u) at the given zeta for u in [-1, 1]."""
        u2 = np.asarray(u, dtype=float) ** 2
        num = sum(float(c(zeta)) * u2**j for j, c in enumerate(self.R))
        return num / float(self.Q(zeta))

    def max_abs_delta(self, zeta, npts=200):
        return float(np.max(np.abs(self.delta_values(zeta, np.linspace(-1, 1, npts)))))


@lru_cache(maxsize=None)
def _build(kind, family, order, ell_key):
    p = _family_power(family)
    d, I0, Hb = _moments(kind, p)
    if ell_key == "pms":
        num, den = Hb, I0
    elif ell_key == "pms-shared":
        num, den = pms_ratio(IntegralKind.J1, family)
    else:
        # fixed lambda^2: l = lambda^2 zeta / (m w^2) = kappa * zeta
        num, den = Poly([0, ell_key]), Poly([1])
    zeta = Poly([0, 1])
    Q = zeta * den + num
    R = _uadd(_uscale(_h(p), den), [-num])
    s = d.s
    N = order

    total = Poly()
    Rk = [Poly([1])]
    Qpow = [Poly([1])]
    for _ in range(N):
        Qpow.append(Qpow[-1] * Q)
    binom = Fraction(1)
    for k in range(N + 1):
        total = total + Qpow[N - k] * _integrate(_umul(d.F, Rk), d.weight) * binom
        binom = binom * (s - k) / (k + 1)
        Rk = _umul(Rk, R)

    # const * pi * 2^root2 * zeta^zeta_dim * Q^(s-N) * den^(-s) * total
    factors = [(Q, s - N), (den, -s)]
    if den.degree > 0:
        q, r = total.divmod(den)
        if not r:
            total = q
            factors[1] = (den, 1 - s)
    zeta_power = d.zeta_dim
    rational = Fraction(1)
    radicand = Fraction(2) if d.root2 > 0 else Fraction(1, 2)
    out_factors = []
    for poly, e in factors:
        poly, shift = poly.shift_down()
        zeta_power += shift * e
        content, prim = poly.primitive()
        r, rad = _rational_power(content, e)
        rational *= r
        radicand *= rad
        if prim.degree > 0:
            out_factors.append((tuple(int(c) for c in prim.coeffs), e))
    q, free = _split_sqrt(radicand)
    rational *= q
    coeffs = tuple(c * rational for c in total.coeffs)
    params = {"pi": Fraction(1)}
    for k, e in d.dims.items():
        params[COUPLING_NAME[family] if k == "coupling" else k] = e
    if free > 1:
        params[str(free)] = Fraction(-1, 2)
    series = RadicalSeries(coeffs, zeta_power, tuple(out_factors), _param_tuple(params))
    return Expansion(kind, family, N, (num, den), Q, tuple(R), series)


def build_expansion(kind, spec, config=InterpolationConfig()):
    kind = IntegralKind(kind)
    lam = config.lambda_squared
    if isinstance(lam, str):
        key = lam
    else:
        if spec.omega == 0:
            raise DomainError("a fixed lambda^2 needs omega > 0")
        key = Fraction(lam) / Fraction(spec.spring)
    return _build(kind, Family(spec.family), int(config.delta_order), key)


def expand_integral(kind, spec, amplitude=None, config=InterpolationConfig()):
    """Closed-form approximant of J_kind as a RadicalSeries in zeta.

    With PMS the series depends on the amplitude only through zeta, so
    ``amplitude`` is accepted for symmetry with the other operations and
    only validated.
    """
    if amplitude is not None and not amplitude > 0:
        raise DomainError("amplitude must be positive")
    return build_expansion(kind, spec, config).series


def convergence_gate(kind, spec, zeta, config=InterpolationConfig(), npts=200):
    """max |Delta| over a u-grid; the expansion converges uniformly when it is < 1."""
    return build_expansion(kind, spec, config).max_abs_delta(zeta, npts)
