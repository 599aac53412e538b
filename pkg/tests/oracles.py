"""Slow, obviously-correct reference implementations used by the tests.

Nothing here imports the library's numerical code; only the group's
coordinate bookkeeping is shared.
"""

import cmath
import itertools
import math
from fractions import Fraction


def coords(factors, i):
    out = []
    for n in reversed(factors):
        out.append(i % n)
        i //= n
    return tuple(reversed(out))


def flat(factors, x):
    i = 0
    for n, c in zip(factors, x):
        i = i * n + c % n
    return i


def add(factors, a, b):
    return flat(factors, [p + q for p, q in zip(coords(factors, a), coords(factors, b))])


def neg(factors, a):
    return flat(factors, [-p for p in coords(factors, a)])


def order(factors):
    return math.prod(factors)


def char(factors, g, x):
    gc, xc = coords(factors, g), coords(factors, x)
    return cmath.exp(2j * cmath.pi * sum(Fraction(a * b, n) for a, b, n in zip(gc, xc, factors)))


def arc(factors, g, x) -> Fraction:
    """Exact normalised distance of the phase of gamma_g(x) from 0."""
    gc, xc = coords(factors, g), coords(factors, x)
    theta = sum(Fraction(a * b, n) for a, b, n in zip(gc, xc, factors)) % 1
    return min(theta, 1 - theta)


def dft(factors, f):
    N = order(factors)
    return [sum(f[x] * char(factors, g, x).conjugate() for x in range(N)) / N for g in range(N)]


def a_norm(factors, f):
    return sum(abs(c) for c in dft(factors, f))


def closure(factors, seed):
    """Breadth-first closure under adding seed elements and their negatives."""
    steps = set(seed) | {neg(factors, s) for s in seed}
    seen, frontier = {0}, [0]
    while frontier:
        nxt = []
        for x in frontier:
            for s in steps:
                y = add(factors, x, s)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(seen)


def bohr(factors, gamma, delta):
    delta = Fraction(delta)
    return [x for x in range(order(factors)) if all(arc(factors, g, x) <= delta for g in gamma)]


def dissociated(factors, S):
    """Brute force over all {-1, 0, 1} coefficient vectors."""
    S = list(S)
    for eps in itertools.product((-1, 0, 1), repeat=len(S)):
        if not any(eps):
            continue
        total = 0
        for e, s in zip(eps, S):
            if e == 1:
                total = add(factors, total, s)
            elif e == -1:
                total = add(factors, total, neg(factors, s))
        if total == 0:
            return False
    return True


def frac_obstruction(alpha: Fraction, N: int, M: int) -> Fraction:
    vals = []
    for v in range(1, M + 1):
        if N % v == 0:
            t = (alpha * v) % 1
            vals.append(t * (1 - t))
    return min(vals)
