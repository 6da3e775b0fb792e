"""Points, subspaces, the extension census, and composition fibers.

The census classifies lines inside a hyperplane slice of a variety by
whether they extend to a plane of the variety that leaves the slice; the
fraction of dead ends shrinks as the number of blocks grows.
"""

from fractions import Fraction

from rankforge import PolyFamily, PrimeField
from rankforge.catalog import degenerate_census_family
from rankforge.explicit import ExplicitVariety
from rankforge.geometry import (
    Hyperplane,
    census_extension,
    enumerate_points,
    enumerate_subspaces_in,
    kappa_fibers,
)

F3 = PrimeField(3)

for n in (2, 3):
    xn = ExplicitVariety(2, n, F3)
    X = xn.points()
    W = Hyperplane(tuple([1] + [0] * (xn.nvars - 1)), 0)
    cen = census_extension(X, W, 1)
    print(
        f"n={n}: |X| = {len(X)}, lines in the slice: {len(cen.Z)}, "
        f"dead ends: {len(cen.Y)}, ratio = {cen.ratio}"
    )

print()
print("a high-rank hypersurface can still have dead-end lines:")
fam, wcoef = degenerate_census_family()
X = enumerate_points(fam)
cen = census_extension(X, Hyperplane(wcoef, 0), 1)
print(f"  x1^2+x2^2+x3^2+x4 over F_3, slice x4=0: |Z| = {len(cen.Z)}, |Y| = {len(cen.Y)}")
print("  one dead end:", cen.Y[0].base, cen.Y[0].basis)

print()
print("fibers of composing the 2-block quadratic with every affine line map:")
for n in (2, 3):
    fam = PolyFamily([ExplicitVariety(2, n, F3).polynomial()])
    stats = kappa_fibers(fam, 1)
    nmin, nmax = stats.min_max()
    print(
        f"  n={n}: {stats.attained}/{stats.total_targets} targets attained, "
        f"fiber sizes in [{nmin}, {nmax}], deviation {stats.max_ratio_deviation()}"
    )
print("the deviation shrinks as n grows: the composition map equidistributes.")
