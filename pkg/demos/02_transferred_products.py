"""Homotopy transfer onto simplex cochains: the Bernoulli products.

Run:  python3 demos/02_transferred_products.py
"""

from fractions import Fraction
from math import factorial

from totconn.scalars import bernoulli
from totconn.structures import check_shuffle_vanishing, check_stasheff
from totconn.transfer import nc_structure

# Transfer the wedge-and-d structure of interval forms onto the span of
# 1, t, dt.  The products m_n pick up Bernoulli coefficients:
res = nc_structure(1, 6)
alg = res.algebra
t = {(0, "v1"): Fraction(1)}
dt = alg.m(1, [t])

print("m2(t, t)      =", alg.m(2, [t, t]))
for n in range(1, 6):
    got = alg.m(n + 1, [t] + [dt] * n)
    print("m%d(t, dt^%d) = %-28r  B_%d/%d! = %s"
          % (n + 1, n, got, n, n, bernoulli(n) / factorial(n)))

# The transferred structure satisfies the full structure relations and
# kills shuffle products (it is commutative up to coherent homotopy):
probes = []
for k in (2, 3, 4):
    probes.extend(alg.basis_words(k))
print("structure relation failures:", check_stasheff(alg, probes))
print("shuffle-vanishing failures: ", check_shuffle_vanishing(alg, 4))

# On the triangle, the three edge products share one sixth:
res2 = nc_structure(2, 3)
L01 = {(1, "L01"): Fraction(1)}
L02 = {(1, "L02"): Fraction(1)}
L12 = {(1, "L12"): Fraction(1)}
for a, b, label in ((L01, L02, "01,02"), (L01, L12, "01,12"), (L02, L12, "02,12")):
    print("m2(lambda_%s) =" % label, res2.algebra.m(2, [a, b]))
