"""Wiener norms of indicator functions: cosets sit at 1, everything else is larger.

Run with ``python demos/01_wiener_norms.py``.
"""

from fractions import Fraction

from bohr_forge import GroupSpec, a_norm, indicator
from bohr_forge.groups import all_subgroups
from bohr_forge.search import brute_force_min_anorm, obstruction_at_least

# Every coset of every subgroup of Z_4 x Z_6 has norm exactly 1.
G = GroupSpec((4, 6))
for H in all_subgroups(G):
    coset = G.add(5, H.array)
    print(f"|H| = {H.order:2d}   ||1_(5+H)||_A = {a_norm(G, indicator(G, coset)):.12f}")

# Intervals in Z_256: the norm grows with the length up to a quarter of the
# group, then falls back as the interval approaches its own complement.
Z256 = GroupSpec.cyclic(256)
print()
for j in range(1, 8):
    print(f"interval of length {2 ** j:3d}: {a_norm(Z256, indicator(Z256, range(2 ** j))):.4f}")

# Exhaustive search: minimum over nonempty proper subsets is 1 (a coset);
# forbidding densities compatible with small subgroups pushes it up.
print()
for N in (8, 12, 16):
    ZN = GroupSpec.cyclic(N)
    free = brute_force_min_anorm(ZN, lambda k, N=N: 0 < k < N)
    filt = obstruction_at_least(ZN, Fraction(1, 10), N - 1)
    blocked = brute_force_min_anorm(ZN, lambda k, filt=filt: k >= 2 and filt(k))
    print(f"Z{N}: min over all {free.value:.4f} at {free.indices}; "
          f"with obstruction >= 1/10 at M = {N - 1}: {blocked.value:.4f} at {blocked.indices}")
