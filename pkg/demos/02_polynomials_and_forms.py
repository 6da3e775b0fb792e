"""Sparse polynomials: finite differences, the symmetric multilinear form,
restriction along affine maps, and full-grid interpolation.
"""

import random

from rankforge import (
    AffineMap,
    MultiPoly,
    PrimeField,
    alternating_sum_eval,
    interpolate,
    multilinear_form,
    restrict,
)

F5 = PrimeField(5)

P = MultiPoly.from_terms(F5, 2, [(1, (1, 1))])  # x0 * x1
print("P =", P)

print()
print("one finite difference drops the degree:")
print("  D_(1,2) P =", P.delta((1, 2)))

print()
print("two differences of a quadratic give its symmetric bilinear form,")
print("a polynomial in two blocks of direction variables:")
form = multilinear_form(P)
print("  form =", form.poly, " (blocks of size 2)")

print()
print("the signed cube sum computes the same form, up to the sign (-1)^d,")
print("independently of the base point:")
rng = random.Random(0)
h = [(1, 0), (0, 1)]
for _ in range(3):
    x = (rng.randrange(5), rng.randrange(5))
    print(f"  base {x}: signed sum = {alternating_sum_eval(P, x, h)}  form = {form.eval(h)}")

print()
print("restriction along an affine map is exact symbolic composition:")
phi = AffineMap.make(F5, [[1], [1]], [0, 0])  # t -> (t, t)
print("  P restricted to the diagonal:", restrict(P, phi))

print()
print("interpolation on the full line recovers reduced polynomials exactly:")
vals = [(t * t) % 5 for t in range(5)]
Q, fits = interpolate(F5, 1, vals, 3)
print("  values", vals, "->", Q, " degree within 3:", fits)
vals4 = [pow(t, 4, 5) for t in range(5)]
_, fits4 = interpolate(F5, 1, vals4, 3)
print("  the fourth-power values exceed degree 3:", not fits4)
