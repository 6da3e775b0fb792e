"""Exhaustive rank decisions with certificates, and the bias-derived lower
bound on partition rank.

The searches enumerate only normalized left factors; the right factors come
out of an exact linear solve.  Every certificate re-expands symbolically.
"""

from rankforge import MultiPoly, PrimeField, multilinear_form
from rankforge.catalog import char2_quartic
from rankforge.poly import MultilinearForm
from rankforge.rank import (
    invariant_factor_dictionary,
    nc_rank,
    partition_rank,
    prank_lower_bound_from_bias,
    schmidt_rank,
)

F2 = PrimeField(2)

P = MultiPoly.from_terms(F2, 4, [(1, (1, 1, 0, 0)), (1, (0, 0, 1, 1))])
print("P = x0x1 + x2x3 over F_2")
res = schmidt_rank(P, 3)
print("  rank decision:", res.display(), " per-r log:", res.per_r)
for Q, R in res.certificate.pairs:
    print("   factor pair:", Q, "|", R)

print()
print("nc-rank of x0x1: the 2-fold difference form needs two products")
print("  ", nc_rank(MultiPoly.from_terms(F2, 2, [(1, (1, 1))]), 3).display())

print()
print("bias-derived lower bound, on the same tensor over the same domain:")
form = multilinear_form(P)
bound = prank_lower_bound_from_bias(form)
pr = partition_rank(form, 4)
print(f"  bias of the polarization = {bound.bias_value} -> bound: {bound.guarantees}")
print(f"  exhaustive partition rank = {pr.value} (consistent)")

print()
print("upper-bound certificate for the degree-4 symmetric quartic in 5")
print("variables over F_2: its difference form decomposes into 3 products")
quartic = char2_quartic(5)
qform = multilinear_form(quartic)
dictionary = [(J, Q) for J, Q in invariant_factor_dictionary(qform) if len(J) == 2]
upper = partition_rank(qform, 3, factor_dictionary=dictionary)
print("  dictionary search:", upper.display(), " exhaustive:", upper.exhaustive)
print("  certificate bipartitions:", [tuple(J) for J, _, _ in upper.certificate.pairs])
