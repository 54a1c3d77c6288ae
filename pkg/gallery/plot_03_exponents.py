"""
Exponents of infinitely divisible laws
======================================

A triplet (drift, diffusion, jump measure) determines psi(t, y) = exp(t g(y)).
The compensated and the ball-split forms give the same exponent, and the
particular cases have closed forms.
"""

import cmath
from fractions import Fraction

from padic_levy import charfn as cf
from padic_levy.field import FieldSpec
from padic_levy.measure import StepMeasure

q2 = FieldSpec(2)
half = q2.vector(Fraction(1, 2))
ys = [q2.vector(v) for v in (1, 2, Fraction(1, 2), 3)]

# %%
# single jump size: the two forms agree
split = cf.poisson_triplet(half, 1.0, mode="T7")
comp = cf.poisson_triplet(half, 1.0, mode="T5")
for y in ys:
    print(y.coords[0].to_fraction(), cf.g(split, y), cf.g(comp, y))

# %%
# compound Poisson: psi against the Poisson series of the jump transform
lam = StepMeasure.uniform_ball(q2.vector(0), 1)
params = {"w": 1.5, "lam": lam}
tr = cf.particular_triplet("compound_poisson", params)
for y in ys:
    print(abs(cf.psi(tr, 2.0, y) - cf.particular_closed_form("compound_poisson", params, 2.0, y)))

# %%
# the A and B functionals of a jump measure, and their finite-difference check
rep = cf.derivative_check(StepMeasure.dirac(half), q2.vector(1))
print("A", rep.A, "from differences", rep.A_fd)
print("B", rep.B, "from differences", rep.B_fd)

# %%
# Haar-type unit-ball jump measure: finite sphere sums
for v in (1, Fraction(1, 2), Fraction(1, 4)):
    A, B = cf.unit_ball_closed_form(1.0, q2.vector(v), "weighted_haar")
    print(v, A, B, cmath.exp(1j * A - B / 2))
