"""Prime fields, additive character indices, and multiplicative subgroups.

Everything downstream stores character sums as integer histograms over the
character index, so this demo starts with the three primitives: exact mod-p
arithmetic, the index map, and subgroups of prescribed order.
"""

from rankforge import PrimeField

F7 = PrimeField(7)

print("arithmetic in F_7:")
print("  3 + 5 =", F7.add(3, 5))
print("  inverse of 4 =", F7.inv(4), "(check: 4 *", F7.inv(4), "=", F7.mul(4, F7.inv(4)), ")")
print("  3^6 =", F7.pow(3, 6), " (little Fermat)")

print()
print("the additive character e_7(x) = exp(2 pi i x / 7) is kept symbolic:")
print("  char_index(5 + 4) =", F7.char_index(F7.add(5, 4)))
print("summing the unit vectors over all of F_7 gives the flat histogram:")
hist = [0] * 7
for x in F7.elements():
    hist[F7.char_index(x)] += 1
print("  ", hist, " (orthogonality: the full character sum cancels)")

print()
print("multiplicative subgroups exist exactly for orders dividing p - 1:")
sub = F7.delta_subgroup(3)
print("  order-3 subgroup of F_7^*:", sub.elements, "generator", sub.generator)
print("  closed under products:", all(F7.mul(a, b) in sub for a in sub for b in sub))
try:
    PrimeField(5).delta_subgroup(3)
except Exception as exc:
    print("  F_5 has no order-3 subgroup:", exc)
