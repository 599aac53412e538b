"""Random instance generators shared by the property and acceptance tests."""

from fractions import Fraction

from bohr_forge.bohr import bohr_set, cutoff
from bohr_forge.fourier import convolve_measure
from bohr_forge.groups import CharacterSet, GroupSpec, abelian_groups, generated_subgroup


def random_group(rng, max_order, min_order=2) -> GroupSpec:
    n = int(rng.integers(min_order, max_order + 1))
    choices = abelian_groups(n)
    return choices[int(rng.integers(len(choices)))]


def ivt_instance(rng, N):
    """Smoothed random function, step set, endpoints in one coset and a target between."""
    G = GroupSpec.cyclic(N)
    gamma = CharacterSet(G, (int(rng.integers(1, N)),))
    smooth = bohr_set(gamma, Fraction(int(rng.integers(5, 40)), 100))
    g = convolve_measure(G, (rng.random(N) < 0.5).astype(float), cutoff(smooth))
    steps = bohr_set(gamma, Fraction(int(rng.integers(1, 10)), 100))
    H = generated_subgroup(G, steps.indices)
    x0 = int(rng.integers(N))
    x1 = int(G.add(x0, H.indices[int(rng.integers(H.order))]))
    osc = max(abs(g[(x + s) % N] - g[x]) for x in range(N) for s in steps.indices)
    eta = osc + 1e-9 if osc > 0 else 0.1
    lo, hi = sorted((g[x0], g[x1]))
    c = lo + (hi - lo) * rng.random()
    return G, g, steps, x0, x1, c, eta
