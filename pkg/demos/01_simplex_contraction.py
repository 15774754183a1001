"""Polynomial forms on simplices and the contraction onto elementary forms.

Run:  python3 demos/01_simplex_contraction.py
"""

from fractions import Fraction

from totconn.dupont import (NCElement, dupont_E, dupont_Int, dupont_s,
                            elementary_form, verify_side_conditions)
from totconn.forms import integrate_over_simplex, simplex_dt, simplex_t

# Forms on the standard 2-simplex live in the coordinates t1, t2 with
# t0 = 1 - t1 - t2 eliminated, so every identity is literal equality.
n = 2
t0, t1, t2 = (simplex_t(n, i) for i in range(3))
print("t0 + t1 + t2 =", t0 + t1 + t2)

# The elementary form attached to the edge {0,1}:
w01 = elementary_form((0, 1), n)
print("w_01 =", w01)

# Integration over faces packages a form into face data.  For the top
# form on the triangle the factorial formula gives exact rationals:
top = t1.wedge(t2).wedge(simplex_dt(n, 1)).wedge(simplex_dt(n, 2))
print("integral of t1 t2 dt1 dt2 =", integrate_over_simplex(top, 2))

# The contraction data: E (extend face data to a form), Int (integrate
# over faces) and the homotopy s.  Int o E is the identity:
lam = NCElement.basis(n, (0, 2))
print("Int(E(lambda_02)) =", dupont_Int(dupont_E(lam), n))

# and d s + s d = E Int - Id, exactly, on any polynomial form:
w = t1.wedge(t1).wedge(simplex_dt(n, 2))
lhs = dupont_s(w, n).d() + dupont_s(w.d(), n)
rhs = dupont_E(dupont_Int(w, n)) - w
print("homotopy identity holds:", lhs == rhs)

# The full identity suite (side conditions, exhaustive over monomials):
print("side-condition failures on the triangle:",
      verify_side_conditions(2, max_poly_deg=3))
