"""Solving the quantization condition at increasing orders in hbar.

Lambda(E) = J1 - hbar^2/(48 m) dJ2/dE + hbar^4/(11520 m^2) d3J3/dE3
is set equal to pi hbar (n + 1/2) / sqrt(2m) and solved for E.
"""
from wkbdelta import PotentialSpec, QuantizationConfig, exact_spectrum, solve_level

spec = PotentialSpec.quartic(4.0)
ref = exact_spectrum(spec, 10, tol=1e-10).energies

print(" n   order  source        E_wkb         E_exact      rel.err")
for n in (0, 1, 5, 10):
    for order in ("h0", "h2", "h4"):
        for source in ("series", "quadrature"):
            r = solve_level(spec, n, QuantizationConfig(hbar_order=order, integral_source=source))
            print(f"{n:2d}   {order}    {source:10s} {r.energy:13.9f} {ref[n]:13.9f} {abs(r.energy / ref[n] - 1):9.2e}")

# The hbar^2 term buys an order of magnitude at low n. At n = 0 the WKB
# series itself is the limit, a few percent off, whichever order is used.

#%% Harmonic oscillator: exact at every order
h = PotentialSpec.harmonic(hbar=0.7, mass=1.9, omega=2.3)
print("\nharmonic n=7:", solve_level(h, 7).energy, "expected", 0.7 * 2.3 * 7.5)
