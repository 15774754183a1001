"""The normalized total complex of the integer-translation action on the line.

Run:  python3 demos/03_total_complex_products.py
"""

from fractions import Fraction

from totconn.forms import PolyForm
from totconn.totalcomplex import (GroupCochain, GroupCochainBackend,
                                  TotalComplexAlgebra, TotElement,
                                  tot_differential, tot_product_degree1,
                                  tot_window_cohomology)

# Level-p cochains are polynomial maps from p integer arguments to
# polynomial forms on the line; equality is polynomial identity.
be = GroupCochainBackend(1)
alg = TotalComplexAlgebra(be, level_cap=3, arity_cap=5)

# The coordinate function x is a (0,0) element; its differential has a
# (0,1) part dx and a (1,0) part recording the translation cocycle g:
x = TotElement(be, {(0, 0): GroupCochain.from_form(
    1, PolyForm.var(1, 0, varname="z", ndiff=1))})
Dx = tot_differential(x)
print("D(x) =", Dx)
print("D^2(x) =", tot_differential(Dx))

# Degree-1 elements multiply through the transferred simplex structures;
# the closed-form expressions agree with the general formula:
b = TotElement(be, {(1, 0): GroupCochain(
    1, 1, PolyForm.var(2, 1, varname="z", ndiff=1))})   # the cocycle g
c = TotElement(be, {(0, 1): GroupCochain.from_form(
    1, PolyForm.var(1, 0, varname="z", ndiff=1).wedge(
        PolyForm.dvar(1, 0, varname="z", ndiff=1)))})    # x dx
a1 = b + c
b2 = TotElement(be, {(1, 0): GroupCochain(
    1, 1, PolyForm.var(2, 1, varname="z", ndiff=1).wedge(
        PolyForm.var(2, 1, varname="z", ndiff=1)))})     # the cochain g^2
a2 = b2 + c
print("m2(a1, a2)          =", alg.m(2, [a1, a2]))
print("closed-form matches :",
      tot_product_degree1(alg, [a1, a2]) == alg.m(2, [a1, a2]))
print("m3(a1, a2, a1) (0,2) part is zero:",
      be.is_zero(alg.m(3, [a1, a2, a1]).component(0, 2)))

# The window cohomology recovers the circle:
print("betti numbers:", tot_window_cohomology(be, max_degree=1,
                                              level_cap=2, poly_cap=2))
