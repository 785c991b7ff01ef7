import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import binom

from wkbdelta.delta import (InterpolationConfig, RadicalSeries, build_delta, build_expansion, convergence_gate,
                            differentiate_series, evaluate_series, expand_integral, first_order_value,
                            pms_first_order, pms_ratio, wallis_moment)
from wkbdelta.errors import DomainError
from wkbdelta.model import HarmonicReference, PotentialSpec, potential_derivative, turning_amplitude
from wkbdelta.quadrature import IntegralKind, integral_exact, finite_difference

UNIT = PotentialSpec.quartic()
J1, J2, J3 = IntegralKind


F = Fraction


def test_structure_of_quartic_approximants():
    s1 = expand_integral(J1, UNIT)
    assert s1.zeta_power == F(-3) / 2
    assert s1.factors == (((5, 8), F(-19) / 2),)
    assert s1.params == {"pi": 1, "m": F(3, 2), "omega": 3, "mu": -1}
    assert len(s1) == 11
    s2 = expand_integral(J2, UNIT)
    assert dict(s2.factors) == {(21, 36, 16): F(-21, 2), (3, 2): F(3, 2)}
    assert len(s2) == 21
    s3 = expand_integral(J3, UNIT)
    assert dict(s3.factors) == {(363, 564, 360, 224): F(-21, 2), (99, 48, 56): F(3, 2)}
    assert len(s3) == 31
    assert all(isinstance(c, Fraction) for s in (s1, s2, s3) for c in s.coeffs)


def test_construction_is_deterministic():
    from wkbdelta.delta import _build

    a = build_expansion(J3, UNIT, InterpolationConfig(7)).series
    _build.cache_clear()
    b = build_expansion(J3, UNIT, InterpolationConfig(7)).series
    assert a == b and a is not b


def test_wallis_moments_against_quadrature():
    for j in range(6):
        plus = quad(lambda u: u ** (2 * j) * math.sqrt(1 - u * u), -1, 1, epsabs=0, epsrel=1e-13)[0]
        minus = quad(lambda u: u ** (2 * j), -1, 1, weight="alg", wvar=(-0.5, -0.5), epsabs=0, epsrel=1e-13)[0]
        assert float(wallis_moment(j, 1)) == pytest.approx(plus / math.pi, rel=1e-11)
        assert float(wallis_moment(j, -1)) == pytest.approx(minus / math.pi, rel=1e-11)


def test_build_delta_example():
    spec = PotentialSpec(UNIT.family, F(1), F(1), F(1), F(1))
    d = build_delta(spec, F(1), F(5, 8))
    assert d.coeffs == (F(-1, 8) / F(13, 8), F(1, 2) / F(13, 8))
    assert d.sup_abs() == pytest.approx(3 / 13, abs=1e-3)
    assert max(abs(d(np.linspace(-1, 1, 100001)))) == pytest.approx(3 / 13, rel=1e-9)
    rng = np.random.default_rng(3)
    x = rng.uniform(-0.999, 0.999, 10)
    np.testing.assert_allclose(d(x), d.defining_ratio(x), rtol=1e-12, atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(family=st.sampled_from(["quartic", "sextic"]), A=st.floats(0.1, 5), lam=st.floats(0, 10))
def test_delta_matches_defining_ratio(family, A, lam):
    spec = PotentialSpec(family, 1.0, 1.3, 0.7, 2.1)
    d = build_delta(spec, A, lam)
    x = np.linspace(-0.99 * A, 0.99 * A, 10)
    np.testing.assert_allclose(d(x), d.defining_ratio(x), rtol=1e-10, atol=1e-12)
    assert len(d.coeffs) == spec.power


def test_vanishing_coupling_gives_zero_delta():
    d = build_delta(PotentialSpec.quartic(1e-15), 1.0, 0.0)
    assert d.sup_abs() < 1e-14


@settings(max_examples=30, deadline=None)
@given(m=st.floats(0.1, 5), w=st.floats(0.1, 5), mu=st.floats(0.1, 5), A=st.floats(0.1, 5))
def test_pms_j1_closed_form(m, w, mu, A):
    spec = PotentialSpec.quartic(mu, mass=m, omega=w)
    res = pms_first_order(J1, spec, A)
    assert res.lambda_squared == pytest.approx(5 * mu * A * A / 8, rel=1e-14)
    value = first_order_value(J1, spec, A, res.lambda_squared)
    assert abs(res.residual) <= 1e-10 * value
    expected = math.pi * A * A * math.sqrt(m * w * w + 5 * mu * A * A / 8) / (2 * math.sqrt(2))
    assert value == pytest.approx(expected, rel=1e-13)
    t = turning_amplitude(spec, float(spec.mass * w * w * A * A / 2 + mu * A**4 / 4))
    n1 = evaluate_series(build_expansion(J1, spec, InterpolationConfig(1)).series, spec, t.zeta)
    assert n1 == pytest.approx(expected, rel=1e-12)


def test_pms_vanishes_with_coupling():
    assert pms_first_order(J1, PotentialSpec.quartic(1e-12), 1.0).lambda_squared < 1e-12


def test_pms_j2_matches_numeric_stationary_point():
    res = pms_first_order(J2, UNIT, 1.0)
    value = first_order_value(J2, UNIT, 1.0, res.lambda_squared)
    assert abs(res.residual) < 1e-10 * abs(value)

    def slope(lam):
        h = 1e-6
        return (first_order_value(J2, UNIT, 1.0, lam + h) - first_order_value(J2, UNIT, 1.0, lam - h)) / (2 * h)

    numeric = brentq(slope, 0.1, 3.0, xtol=1e-13)
    assert numeric == pytest.approx(res.lambda_squared, rel=1e-6)


@pytest.mark.parametrize("kind", list(IntegralKind))
def test_pms_response_is_quadratic(kind):
    res = pms_first_order(kind, UNIT, 1.3)
    base = first_order_value(kind, UNIT, 1.3, res.lambda_squared)
    changes = []
    for eps in (1e-2, 5e-3):
        up = first_order_value(kind, UNIT, 1.3, res.lambda_squared * (1 + eps))
        changes.append(abs(up - base))
    # halving the perturbation quarters the change
    assert changes[0] / changes[1] == pytest.approx(4.0, rel=0.02)


def test_pms_ratio_is_rational_in_zeta():
    num, den = pms_ratio(J1, "quartic")
    assert (num.coeffs, den.coeffs) == ((F(5, 16),), (F(1, 2),))
    num, den = pms_ratio(J1, "sextic")
    assert float(num(F(0)) / den(F(0))) == pytest.approx(11 / 24)


def test_derivative_examples():
    base = RadicalSeries((F(1),), F(0), (((5, 8), F(-19, 2)),))
    d = differentiate_series(base)
    assert d.factors == (((5, 8), F(-21, 2)),) and d.coeffs == (F(-76),)
    mono = RadicalSeries((F(3), F(2)), F(5, 2))
    dm = mono.derivative()
    assert dm.zeta_power == F(3, 2) and dm.coeffs == (F(15, 2), F(7))


def mp_shape(series, z):
    """Series shape at zeta = z in 40-digit arithmetic."""
    def mp(q):
        return mpmath.mpf(q.numerator) / q.denominator

    out = mpmath.mpf(z) ** mp(series.zeta_power)
    out *= mpmath.polyval([mp(c) for c in reversed(series.coeffs)], z)
    for base, e in series.factors:
        out *= mpmath.polyval([mpmath.mpf(c) for c in reversed(base)], z) ** mp(e)
    return out


@pytest.mark.parametrize("kind", list(IntegralKind))
def test_third_derivative_against_finite_differences(kind):
    s = expand_integral(kind, UNIT)
    exact = differentiate_series(s, 3).shape(1.0)
    with mpmath.workdps(40):
        # high-precision central differences
        fd = mpmath.diff(lambda z: mp_shape(s, z), 1, 3)
    assert exact == pytest.approx(float(fd), rel=1e-8)
    # double precision 5-point stencil with Richardson, as a coarser check
    fd64, _ = finite_difference(s.shape, 1.0, 3, 0.05, levels=3)
    assert exact == pytest.approx(fd64, rel=1e-5)


def test_json_round_trip():
    for kind in IntegralKind:
        for spec in (UNIT, PotentialSpec.sextic()):
            s = expand_integral(kind, spec)
            data = s.to_json()
            assert RadicalSeries.from_json(data) == s
            assert set(data) >= {"prefactor_rational", "param_exponents", "zeta_power", "radical_base",
                                 "radical_power", "coeffs"}


def numeric_delta_expansion(kind, spec, E, N, npts=400):
    """Sum of binomial terms integrated numerically from build_delta."""
    A = turning_amplitude(spec, E).amplitude
    g = spec.coupling * A ** (2 * spec.power - 2)
    num, den = pms_ratio(kind, spec.family)
    z = spec.spring / g
    lam = float(num(F(z)) / den(F(z))) * g
    d = build_delta(spec, A, lam)
    half_k0 = 0.5 * (spec.spring + lam)
    nodes, weights = np.polynomial.legendre.leggauss(npts)
    theta = nodes * math.pi / 2
    w = weights * math.pi / 2
    x = A * np.sin(theta)
    D = d(x)
    if kind is J1:
        body, s = math.sqrt(half_k0) * A * A * np.cos(theta) ** 2, 0.5
    else:
        v1, v2, v3 = (potential_derivative(spec, x, k) for k in (1, 2, 3))
        top = v2 if kind is J2 else 7 * v2**2 - 5 * v1 * v3
        body, s = top / math.sqrt(half_k0), -0.5
    return sum(binom(s, k) * np.sum(w * body * D**k) for k in range(N + 1))


@pytest.mark.parametrize("seed", range(4))
def test_brute_force_equivalence(seed):
    rng = np.random.default_rng(seed)
    for _ in range(5):
        family = rng.choice(["quartic", "sextic"])
        spec = PotentialSpec(family, 1.0, rng.uniform(0.3, 3), rng.uniform(0.3, 3), rng.uniform(0.3, 3))
        E = float(np.exp(rng.uniform(np.log(0.1), np.log(100))))
        z = turning_amplitude(spec, E).zeta
        for kind in IntegralKind:
            series = build_expansion(kind, spec, InterpolationConfig(10)).series
            assert series.evaluate(spec, z) == pytest.approx(numeric_delta_expansion(kind, spec, E, 10), rel=1e-12)


def test_accuracy_against_quadrature():
    z = turning_amplitude(UNIT, 10.0).zeta
    for kind in IntegralKind:
        approx = expand_integral(kind, UNIT).evaluate(UNIT, z)
        assert approx == pytest.approx(integral_exact(kind, UNIT, 10.0), rel=1e-6)


def test_harmonic_limit():
    ref = HarmonicReference()
    s = expand_integral(J1, UNIT)
    for E in (1e-4, 1e-6):
        z = turning_amplitude(UNIT, E).zeta
        assert s.evaluate(UNIT, z) / ref.j1(E) == pytest.approx(1.0, rel=1e-3 * E ** 0.5 * 10)


def test_order_monotonicity():
    grid = np.geomspace(0.1, 1000, 25)
    exact = [integral_exact(J1, UNIT, E) for E in grid]
    zetas = [turning_amplitude(UNIT, E).zeta for E in grid]
    worst = []
    for N in (2, 4, 6, 8, 10):
        s = build_expansion(J1, UNIT, InterpolationConfig(N)).series
        worst.append(max(abs(s.evaluate(UNIT, z) / e - 1) for z, e in zip(zetas, exact)))
    assert all(b <= a for a, b in zip(worst, worst[1:]))


@pytest.mark.parametrize("kind", list(IntegralKind))
def test_uniform_convergence_gate_quartic(kind):
    for z in np.geomspace(1e-6, 1e6, 60):
        assert convergence_gate(kind, UNIT, z) < 1


def test_gate_value_matches_example():
    assert convergence_gate(J1, UNIT, 1.0) == pytest.approx(3 / 13, rel=1e-12)


def test_alternative_lambda_modes():
    z = turning_amplitude(UNIT, 5.0).zeta
    exact = integral_exact(J2, UNIT, 5.0)
    shared = build_expansion(J2, UNIT, InterpolationConfig(10, "pms-shared")).series.evaluate(UNIT, z)
    fixed = build_expansion(J2, UNIT, InterpolationConfig(10, 1.0)).series.evaluate(UNIT, z)
    assert shared == pytest.approx(exact, rel=1e-3)
    assert math.isfinite(fixed)
    with pytest.raises(DomainError):
        InterpolationConfig(0)
    with pytest.raises(DomainError):
        InterpolationConfig(3, "nope")
