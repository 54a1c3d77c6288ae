"""
Exact arithmetic in Q_p and F_p((theta))
========================================

Elements carry a fixed number of digits. Q_p carries between digits,
F_p((theta)) does not, and the fractional part drives every character.
"""

from fractions import Fraction

from padic_levy.field import FieldKind, FieldSpec, char_angle, element_to_text, frac_part

q2 = FieldSpec(2)
f2 = FieldSpec(2, FieldKind.FPTHETA)

# %%
# 1 + 1 carries in Q_2 but vanishes in F_2((theta))
one_q, one_f = q2.one(), f2.one()
print("Q_2:", element_to_text(one_q + one_q))
print("F_2((theta)):", element_to_text(one_f + one_f))

# %%
# fractional parts of a few rationals
for r in (Fraction(1, 2), Fraction(3, 4), Fraction(5, 8), Fraction(-1, 2)):
    print(r, "->", frac_part(q2.from_fraction(r)).as_fraction())

# %%
# the character angle of s.z is an exact rational number of turns
s = q2.vector(Fraction(1, 4))
z = q2.vector(3)
print("angle in turns:", char_angle(s, z).as_fraction())

# %%
# inverses are exact up to the working precision
x = q2.from_fraction(Fraction(7, 12))
print(element_to_text(x), "| inverse:", element_to_text(x.invert()))
print("x * x^-1 == 1:", x * x.invert() == q2.one())
