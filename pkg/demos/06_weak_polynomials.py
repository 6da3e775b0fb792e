"""Weak polynomiality and extension: the cubic counterexample.

On the union of three lines xy(x-y) = 0 in the F_5 plane, the function that
vanishes on the axes and equals x on the diagonal is linear on every line
inside the variety, yet no global linear polynomial restricts to it.  The
solver proves this with a dual certificate; the level-set pipeline reports
the level at which it gets stuck.
"""

from rankforge.catalog import counterexample_function, counterexample_variety
from rankforge.errors import VerificationError
from rankforge.weakpoly import (
    extend_by_slices,
    extend_by_solve,
    is_weakly_polynomial,
    restriction_space,
    star_check,
    weak_space,
)

X = counterexample_variety()
f = counterexample_function(X)
print("variety points:", len(X))
print("f weakly linear:", is_weakly_polynomial(f, 1)[0])

ws, rs = weak_space(X, 1), restriction_space(X, 1)
print("weakly-linear function space dimension:", ws.dim)
print("restrictions of linear polynomials:    ", rs.dim)
rep = star_check(X, 1)
print("every weakly linear function extends:", rep.holds, f"(gap {rep.gap})")

res = extend_by_solve(f, 1)
print()
print("exact solve for a linear extension feasible:", res.feasible)
print("dual certificate (a point-evaluation combination no linear")
print("polynomial can satisfy):", list(map(int, res.dual_certificate)))

print()
print("the level-set pipeline fails honestly, naming the stuck level:")
try:
    extend_by_slices(f, (1, 0), 1)
except VerificationError as exc:
    print("  ", exc)
