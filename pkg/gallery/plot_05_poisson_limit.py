"""
Triangular arrays and the Poisson limit
=======================================

Sums of m thinned Bernoulli jumps approach the compound Poisson law. The
gap in characteristic functions is bounded by a constant over m.
"""

from fractions import Fraction

from padic_levy import process as pr
from padic_levy.field import FieldSpec
from padic_levy.measure import Atom, StepMeasure

q2 = FieldSpec(2)
lam = StepMeasure([Atom(q2.vector(Fraction(1, 2)), 0.5), Atom(q2.vector(Fraction(1, 4)), 0.5)])
grid = [q2.vector(v) for v in (1, 2, 4)]

rep = pr.triangular_array_experiment(1.0, lam, 1.0, [1, 4, 16, 64, 256], grid, 20_000, pr.RngStream(5))
print(" m  empirical  analytic  bound")
for r in rep.rows:
    print(f"{r.m:4d}  {r.gap_empirical:.4f}  {r.gap_analytic:.4f}  {r.bound:.4f}")
print("non-increasing:", rep.non_increasing)
