"""End-to-end checks; each prints one PASS/FAIL line."""

import math
from fractions import Fraction

import numpy as np
import pytest

from wkbdelta.delta import (InterpolationConfig, build_expansion, convergence_gate, expand_integral,
                            first_order_value, pms_first_order)
from wkbdelta.model import PotentialSpec, turning_amplitude
from wkbdelta.oracle import _lowest, default_scale_frequency, exact_spectrum
from wkbdelta.quadrature import IntegralKind, finite_difference, integral_exact
from wkbdelta.wkb import (QuantizationConfig, lambda_of_energy, lambda_slope, quartic_closed_form,
                          quartic_energy_closed_form, sextic_closed_form, solve_level)
from wkbdelta.zeta import exact_quartic_z1, zeta_hybrid

J1, J2, J3 = IntegralKind
UNIT = PotentialSpec.quartic()


@pytest.fixture
def report(capsys):
    def emit(label, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        assert ok, detail
    return emit


def rel(a, b):
    return abs(a / b - 1)


def test_quartic_coefficients(report):
    cf = quartic_closed_form(UNIT)
    checks = [
        ("e1", cf.e1, rel(cf.e1, 0.867146) < 5e-6),
        ("e2", cf.e2, abs(cf.e2 - 0.42551) <= 5e-6),
        ("e3", cf.e3, abs(cf.e3 + 0.0466914) <= 5e-8),
        ("e4 quantum", cf.e4_terms[0], abs(cf.e4_terms[0] - 0.030669) <= 5e-7),
        ("e4 classical", cf.e4_terms[1], abs(cf.e4_terms[1] - 0.00424238) <= 5e-9),
    ]
    report("1 quartic coefficients", all(ok for *_, ok in checks),
           ", ".join(f"{n}={v:.10g}" for n, v, _ in checks))


def test_sextic_coefficients(report):
    cf = sextic_closed_form(PotentialSpec.sextic())
    printed = dict(alpha1=18.46505979, alpha2=5.307778611, beta1=340.9584332, beta2=196.0168989,
                   beta3=-12.64038572)
    worst = max(rel(getattr(cf, k), v) for k, v in printed.items())
    report("2 sextic coefficients", worst < 5e-10, f"max relative deviation {worst:.2e}")


def test_series_structure(report):
    s1, s2, s3 = (expand_integral(k, UNIT) for k in IntegralKind)
    ok = (s1.zeta_power == Fraction(-3, 2) and s1.factors == (((5, 8), Fraction(-19, 2)),) and len(s1) == 11
          and dict(s2.factors) == {(3, 2): Fraction(3, 2), (21, 36, 16): Fraction(-21, 2)} and len(s2) == 21
          and dict(s3.factors) == {(99, 48, 56): Fraction(3, 2), (363, 564, 360, 224): Fraction(-21, 2)}
          and len(s3) == 31)
    report("3 series structure", ok, f"coefficient counts {len(s1)}/{len(s2)}/{len(s3)}")


def test_quartic_j1_error_profile(report):
    grid = np.geomspace(0.1, 1000, 50)
    s = expand_integral(J1, UNIT)
    err = np.array([rel(s.evaluate(UNIT, turning_amplitude(UNIT, E).zeta), integral_exact(J1, UNIT, E))
                    for E in grid])
    # walking down in E the error may not grow beyond double-precision noise
    growth = np.diff(err[::-1])
    ok = err.max() < 1e-6 and np.all(growth <= 1e-15)
    report("4 quartic J1 error profile", ok, f"max {err.max():.3g}, at E=0.1 {err[0]:.3g}")


def test_sextic_j1_error_profile(report):
    spec = PotentialSpec.sextic()
    s = expand_integral(J1, spec)
    grid = np.geomspace(0.5, 500, 40)
    err = [rel(s.evaluate(spec, turning_amplitude(spec, E).zeta), integral_exact(J1, spec, E)) for E in grid]
    worst = int(np.argmax(err))
    report("5 sextic J1 error profile", max(err) < 1e-4, f"max {max(err):.3g} at E={grid[worst]:.4g}")


def test_zeta_benchmark(report):
    spec = PotentialSpec.quartic(4.0, omega=0.0)
    est = zeta_hybrid(spec, 1.0, 4)
    exact = exact_quartic_z1(spec)
    ok = abs(est.value - 3.635002) < 1e-6 and abs(exact - 3.63500364488) < 1e-10
    report("6 zeta benchmark", ok, f"Z(1)={est.value:.10f}, exact {exact:.11f}, tail bound {est.tail_bound:.2g}")


def spectrum_errors(spec, n_lo, n_hi):
    ref = exact_spectrum(spec, n_hi, tol=1e-10).energies
    cf = quartic_closed_form(spec)
    return [rel(quartic_energy_closed_form(cf, n), ref[n]) for n in range(n_lo, n_hi + 1)]


@pytest.mark.parametrize("label,spec,n_hi", [
    ("set 1 m=1/2 omega=2 mu=8000", PotentialSpec.quartic(8000.0, mass=0.5, omega=2.0), 25),
    ("set 2 unit mu=4", PotentialSpec.quartic(4.0), 40),
])
def test_spectrum_accuracy(report, label, spec, n_hi):
    err = spectrum_errors(spec, 5, n_hi)
    accurate = max(err) < 1e-3
    decreasing = all(b < a for a, b in zip(err, err[1:]))
    turn = next((5 + i + 1 for i, (a, b) in enumerate(zip(err, err[1:])) if b >= a), None)
    detail = f"max {max(err):.3g}, decreasing {decreasing}" + (f" (first rise at n={turn})" if turn else "")
    report(f"7 spectrum accuracy {label}", accurate and decreasing, detail)


def test_property_suite(report):
    failures = []
    for n in range(51):
        for order in ("h0", "h2", "h4"):
            if rel(solve_level(PotentialSpec.harmonic(), n, QuantizationConfig(hbar_order=order)).energy, n + 0.5) > 1e-12:
                failures.append(f"harmonic n={n} {order}")

    for kind in IntegralKind:
        res = pms_first_order(kind, UNIT, 1.3)
        base = first_order_value(kind, UNIT, 1.3, res.lambda_squared)
        ch = [abs(first_order_value(kind, UNIT, 1.3, res.lambda_squared * (1 + e)) - base) for e in (1e-2, 5e-3)]
        if abs(ch[0] / ch[1] - 4) > 0.08:
            failures.append(f"PMS response {kind.value}")

    zetas = np.geomspace(1e-6, 1e6, 40)
    for family, spec in (("quartic", UNIT), ("sextic", PotentialSpec.sextic())):
        for kind in IntegralKind:
            gate = max(convergence_gate(kind, spec, z) for z in zetas)
            if not gate < 1:
                failures.append(f"gate {family} {kind.value} max|Delta|={gate:.3g}")

    grid = np.geomspace(0.1, 1000, 25)
    exact = [integral_exact(J1, UNIT, E) for E in grid]
    zs = [turning_amplitude(UNIT, E).zeta for E in grid]
    worst = [max(rel(build_expansion(J1, UNIT, InterpolationConfig(N)).series.evaluate(UNIT, z), e)
                 for z, e in zip(zs, exact)) for N in (2, 4, 6, 8, 10)]
    if not all(b < a for a, b in zip(worst, worst[1:])):
        failures.append("delta-order monotonicity")

    for spec in (UNIT, PotentialSpec.sextic()):
        for E in (0.75, 10.0, 300.0):
            fd, _ = finite_difference(lambda e: lambda_of_energy(spec, e), E, 1, 1e-2 * E)
            if rel(lambda_slope(spec, E), fd) > 1e-8:
                failures.append(f"Lambda slope {spec.family.value} E={E}")

    spec = PotentialSpec.quartic(4.0)
    prev = None
    for size in (16, 32, 64, 128, 256):
        cur, norm = _lowest(spec, size, 1.5, 10)
        if prev is not None and np.any(cur > prev + 100 * np.finfo(float).eps * norm):
            failures.append(f"variational size={size}")
        prev = cur
    a = exact_spectrum(spec, 20, 1e-10).energies
    b = exact_spectrum(spec, 20, 1e-10, scale_frequency=2 * default_scale_frequency(spec)).energies
    if max(rel(x, y) for x, y in zip(a, b)) > 2e-10:
        failures.append("basis-scale independence")

    report("8 property suite", not failures, "; ".join(failures) or "all properties hold")
