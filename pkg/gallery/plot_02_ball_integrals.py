"""
Character integrals over balls
==============================

Integrating a character over B(0, p^k) gives either the Haar mass p^{kn}
or zero. The closed form is compared with an explicit coset sum.
"""

from fractions import Fraction

from padic_levy.field import FieldSpec
from padic_levy.measure import ball_character_integral, ball_integral_closed_form

# %%
spec = FieldSpec(3)
for k in (-1, 0, 1):
    for s in (Fraction(1, 9), Fraction(1, 3), Fraction(1), Fraction(3)):
        y = spec.vector(s)
        j = ball_character_integral(y, k)
        print(f"k={k:2d} s={str(s):4s} integral={float(j.real): .6f} closed form={float(ball_integral_closed_form(y, k))}")

# %%
# in dimension two the mass is p^{2k}
spec2 = FieldSpec(2)
y = spec2.vector(0, Fraction(1, 2))
for k in (-3, -2, -1, 0):
    print(k, ball_character_integral(y, k), ball_integral_closed_form(y, k))
