import math

import pytest
from scipy.special import zeta as riemann

from wkbdelta.errors import AccuracyError, DivergenceError, UnsupportedMapError
from wkbdelta.model import PotentialSpec
from wkbdelta.zeta import exact_quartic_z1, tail_sum, zeta_hybrid

PURE = PotentialSpec.quartic(4.0, omega=0.0)


def test_benchmark_value():
    est = zeta_hybrid(PURE, 1.0, 4)
    assert est.value == pytest.approx(3.635002, abs=1e-6)
    assert est.tail_bound < 1e-6 and est.value > 0
    assert exact_quartic_z1(PURE) == pytest.approx(3.63500364488, abs=1e-10)


def test_exact_target_closed_form():
    assert exact_quartic_z1(PURE) == pytest.approx(3 ** (2 / 3) * math.gamma(1 / 3) ** 5 / (8 * math.pi**2))


def test_split_point_independence():
    tol = 1e-6
    for k in (4, 8, 16):
        a = zeta_hybrid(PURE, 1.0, k, tol).value
        b = zeta_hybrid(PURE, 1.0, 2 * k, tol).value
        assert abs(a - b) < 2 * tol


def test_head_moves_toward_exact_value():
    target = exact_quartic_z1(PURE)
    gaps = [abs(zeta_hybrid(PURE, 1.0, k).value - target) for k in (2, 4, 8, 16, 32)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


@pytest.mark.parametrize("s", [2.0, 3.0])
def test_harmonic_sums(s):
    est = zeta_hybrid(PotentialSpec.harmonic(), s, 16, tol=1e-10)
    assert est.value == pytest.approx((2**s - 1) * riemann(s), abs=1e-10)
    assert zeta_hybrid(PotentialSpec.harmonic(), 2.0, 4).value == pytest.approx(math.pi**2 / 2, abs=1e-6)


def test_euler_maclaurin_tail_on_known_sum():
    # sum_{n >= 5} (n + 1/2)^-3 from the Hurwitz zeta function
    value, bound = tail_sum(PotentialSpec.harmonic(), 3.0, 5)
    assert value == pytest.approx(riemann(3.0, 5.5), abs=bound * 10 + 1e-15)


def test_errors():
    with pytest.raises(DivergenceError):
        zeta_hybrid(PURE, 0.75, 4)
    with pytest.raises(DivergenceError):
        zeta_hybrid(PotentialSpec.harmonic(), 1.0, 4)
    with pytest.raises(AccuracyError):
        zeta_hybrid(PURE, 1.0, 1, tol=1e-9)
    with pytest.raises(UnsupportedMapError):
        zeta_hybrid(PotentialSpec.sextic(), 1.0, 4)
    with pytest.raises(ValueError):
        zeta_hybrid(PURE, 1.0, 0)
