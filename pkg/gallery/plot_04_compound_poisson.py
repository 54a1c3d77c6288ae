"""
Sampling compound Poisson paths
===============================

Paths jump at Poisson times by draws from a step measure. The empirical
characteristic function of the endpoint is compared with the exact one.
"""

import cmath
import math
from fractions import Fraction

import numpy as np

from padic_levy import charfn as cf
from padic_levy import process as pr
from padic_levy.field import FieldKind, FieldSpec, vector_to_text
from padic_levy.measure import StepMeasure

q2 = FieldSpec(2)
lam = StepMeasure.dirac(q2.vector(Fraction(1, 2)))

# %%
path = pr.sample_compound_poisson(2.0, lam, 3.0, pr.RngStream(1))
for s, x in zip(path.times, path.values):
    print(f"{s:.3f}  {vector_to_text(x)}")

# %%
n = 20_000
xs, counts = pr.sample_compound_poisson_endpoints(1.0, lam, 1.0, pr.RngStream(2), n)
print("mean number of jumps", counts.mean())
tr = cf.compound_poisson_triplet(1.0, lam)
for y in (q2.vector(1), q2.vector(2), q2.vector(4)):
    est = pr.empirical_charfn(xs, y)
    print(est.estimate, cmath.exp(cf.g(tr, y)), "+-", 4 * est.std_error)

# %%
# in characteristic two a unit jump is its own inverse, so only parity matters
f2 = FieldSpec(2, FieldKind.FPTHETA)
xs, _ = pr.sample_compound_poisson_endpoints(2.0, StepMeasure.dirac(f2.vector(1)), 1.0, pr.RngStream(3), n)
print("P(X = 0)", np.mean([x.is_zero for x in xs]), "exact", (1 + math.exp(-4.0)) / 2)
