"""Bohr sets as approximate subgroups: size, regularity and the chain of generated subgroups.

Run with ``python demos/02_bohr_sets.py``.
"""

from fractions import Fraction

from bohr_forge import CharacterSet, GroupSpec, bohr_set, is_regular, regular_delta
from bohr_forge.bohr import measure_profile, subgroup_chain

G = GroupSpec.cyclic(1000)
gamma = CharacterSet(G, (1, 7))

# Measure against the radius, next to the delta^d lower bound.
for delta in (Fraction(1, 100), Fraction(1, 20), Fraction(1, 10), Fraction(1, 4)):
    B = bohr_set(gamma, delta)
    print(f"delta = {str(delta):6s} |B| = {len(B):4d}  mu = {float(B.measure):.4f}  "
          f">= delta^2 = {float(delta ** 2):.4f}")

# A regular radius is one where the measure grows at most linearly under dilation.
delta = regular_delta(gamma, Fraction(1, 10))
ok, slope = is_regular(gamma, delta)
print(f"\nregular radius chosen from [1/20, 1/10): {delta} (slope {float(slope):.3f}, regular={ok})")
print("first measure breakpoints:", [(str(t), str(mu)) for t, mu in measure_profile(gamma)[:5]])

# As the radius grows, <B(Gamma, kappa)> runs through at most d + 1 subgroups.
Z60 = GroupSpec.cyclic(60)
chain = subgroup_chain(CharacterSet(Z60, (6, 10)), 0)
print("\nsubgroups generated by B({6, 10}, kappa) in Z60:")
for link in chain:
    print(f"  kappa in [{link.lo}, {link.hi}): subgroup of order {link.subgroup.order}")
