"""
Independence and uniqueness
===========================

A joint characteristic function factorizes exactly for independent pairs.
Distinct atomic laws on a finite lattice are told apart by a finite grid
of characters.
"""

from fractions import Fraction

from padic_levy import process as pr
from padic_levy.field import FieldSpec
from padic_levy.measure import Atom, StepMeasure

q2 = FieldSpec(2)
coin = StepMeasure([Atom(q2.vector(0), 0.5), Atom(q2.vector(Fraction(1, 2)), 0.5)])
grid = [(q2.vector(1), q2.vector(1)), (q2.vector(2), q2.vector(1))]


def independent(gen, n):
    return pr.sample_step_measure(coin, gen, n), pr.sample_step_measure(coin, gen, n)


def copied(gen, n):
    xs = pr.sample_step_measure(coin, gen, n)
    return xs, list(xs)


for name, sampler in (("independent", independent), ("copied", copied)):
    rep = pr.independence_test(sampler, grid, 20_000, pr.RngStream(7))
    print(name, rep.max_discrepancy, "passed" if rep.passed else "rejected")

# %%
gen = pr.RngStream(8).generator
lattice = pr.dual_grid(q2, 2)
P = pr.random_atomic_measure(q2, gen, 2, 3)
Q = pr.random_atomic_measure(q2, gen, 2, 3)
diff, s = pr.cf_difference_witness(P, Q, lattice)
print("largest transform gap", diff, "at", s.coords[0].to_fraction())
