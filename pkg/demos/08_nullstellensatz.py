"""Bounded-degree ideal membership and the rough point-count bound.

Membership is a finite linear problem once cofactor degrees are capped.  The
classic obstruction: x vanishes wherever x^2 does, but x never lies in the
ideal (x^2) because membership is about formal polynomials.  On a high-rank
quadric, by contrast, everything of small degree that vanishes on the points
already lies in the capped ideal part.
"""

from rankforge import MultiPoly, PolyFamily, PrimeField
from rankforge.explicit import ExplicitVariety
from rankforge.nullsatz import ideal_membership, rough_bound_check, vanishing_vs_ideal_dims

F5, F7 = PrimeField(5), PrimeField(7)

fam = PolyFamily([MultiPoly.from_terms(F5, 1, [(1, (2,))])])
print("the non-reduced obstruction over F_5:")
for e in (1, 2, 3):
    rep = vanishing_vs_ideal_dims(fam, e)
    print(f"  degree <= {e}: vanishing dim {rep.vanishing_dim}, ideal dim {rep.ideal_dim}")
res = ideal_membership(MultiPoly.variable(F5, 1, 0), fam, 3)
print("  x in (x^2)?", res.member, " dual certificate:", list(map(int, res.dual_certificate)))

print()
print("the 2-block quadric over F_7 (a high-rank instance): equality")
fam7 = ExplicitVariety(2, 2, F7).family()
for e in (1, 2):
    rep = vanishing_vs_ideal_dims(fam7, e)
    print(f"  degree <= {e}: vanishing dim {rep.vanishing_dim} = ideal dim {rep.ideal_dim}")

print()
print("a genuine member with its cofactor certificate:")
P = fam7.polys[0]
cof = MultiPoly.from_terms(F7, 4, [(1, (1, 0, 0, 0)), (2, (0, 0, 0, 0))])
R = cof * P
res = ideal_membership(R, fam7, 3)
print("  member:", res.member, " cofactor:", res.certificate.cofactors[0])

print()
print("rough point-count bound q^(n-c) * prod(d_i) on complete intersections:")
plane = rough_bound_check(PolyFamily([MultiPoly.variable(F5, 3, 0)]))
print(f"  coordinate plane in F_5^3: {plane.count} <= {plane.bound} (equality)")
F3 = PrimeField(3)
quad = rough_bound_check(PolyFamily([ExplicitVariety(2, 2, F3).polynomial()]))
print(f"  quadric over F_3: {quad.count} <= {quad.bound}")
