"""Sextic oscillator: the square-root closed form and its range."""
from wkbdelta import PotentialSpec, exact_spectrum, sextic_closed_form, sextic_energy_closed_form

spec = PotentialSpec.sextic()
cf = sextic_closed_form(spec)
print("alpha:", cf.alpha1, cf.alpha2)
print("beta: ", cf.beta1, cf.beta2, cf.beta3)

ref = exact_spectrum(spec, 30, tol=1e-9).energies
print("\n n    closed form       oracle       rel.err")
for n in (0, 1, 2, 5, 10, 20, 30):
    E = sextic_energy_closed_form(cf, n)
    print(f"{n:2d} {E:14.8f} {ref[n]:14.8f} {abs(E / ref[n] - 1):10.2e}")
