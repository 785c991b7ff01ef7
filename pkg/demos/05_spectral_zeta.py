"""Spectral zeta function of the pure quartic, Z(1) = sum_n 1/E_n.

The first k levels are diagonalized exactly; the rest follow the closed
form and are summed with Euler-Maclaurin.
"""
from wkbdelta import PotentialSpec, exact_quartic_z1, zeta_hybrid
from wkbdelta.errors import AccuracyError

spec = PotentialSpec.quartic(4.0, omega=0.0)
print("exact Z(1):", exact_quartic_z1(spec))
for k in (2, 4, 8, 16):
    est = zeta_hybrid(spec, 1.0, k)
    print(f"k={k:2d}  Z={est.value:.10f}  head={est.head:.6f}  tail={est.tail:.6f}  bound={est.tail_bound:.1e}")

#%% Splitting too early leaves an Euler-Maclaurin remainder that is too large
try:
    zeta_hybrid(spec, 1.0, 1, tol=1e-9)
except AccuracyError as exc:
    print("k=1:", exc)
