"""Finite Abelian groups as products of cyclic factors.

A group ``Z_{n_1} x ... x Z_{n_r}`` is enumerated in C (row-major) order of
its coordinate tuples, so element ``i`` has coordinates
``np.unravel_index(i, factors)``.  Characters use the same coordinates: the
character with coordinates ``g`` evaluates as

    gamma_g(x) = exp(2 pi i sum_j g_j x_j / n_j).

Everything exact (annihilators, Bohr membership) is decided on the integer
phase ``sum_j g_j x_j (N / n_j) mod N`` where ``N`` is the group order, so the
character value is ``exp(2 pi i phase / N)``.

Enumerating operations are ``O(|G|)`` or ``O(|G|^2)``; the order is capped by
``BOHR_FORGE_MAX_ORDER`` (default ``2**20``).
"""

from __future__ import annotations

import itertools
import math
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import GroupSpecError, MismatchedGroupError, NotASubgroupError

DEFAULT_MAX_ORDER = 2**20
# dense phase / character tables are only built below this order
DENSE_TABLE_LIMIT = 4096

_SPEC_RE = re.compile(r"Z(\d+)")


def max_order() -> int:
    value = os.environ.get("BOHR_FORGE_MAX_ORDER")
    if value is None:
        return DEFAULT_MAX_ORDER
    try:
        return int(value)
    except ValueError:
        raise GroupSpecError(f"BOHR_FORGE_MAX_ORDER is not an integer: {value!r}")


def as_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction, "p/q" string or float.

    Floats go through their shortest repr, so ``0.26`` becomes ``13/50``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise ValueError(f"not a finite number: {x!r}")
        return Fraction(repr(float(x)))
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def format_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class GroupSpec:
    """``Z_{n_1} x ... x Z_{n_r}``; immutable and hashable."""

    factors: tuple[int, ...]

    def __post_init__(self):
        factors = tuple(int(n) for n in self.factors)
        object.__setattr__(self, "factors", factors)
        if not factors:
            raise GroupSpecError("a group needs at least one cyclic factor")
        for n in factors:
            if n < 2:
                raise GroupSpecError(f"cyclic factor Z{n} has order < 2")
        cap = max_order()
        if math.prod(factors) > cap:
            raise GroupSpecError(
                f"group order {math.prod(factors)} exceeds configured maximum {cap}")

    @classmethod
    def cyclic(cls, n: int) -> GroupSpec:
        return cls((n,))

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    @property
    def rank(self) -> int:
        return len(self.factors)

    def __len__(self):
        return self.order

    def __str__(self):
        return "x".join(f"Z{n}" for n in self.factors)

    @cached_property
    def coords(self) -> np.ndarray:
        """``(order, rank)`` array of coordinates in enumeration order."""
        grids = np.unravel_index(np.arange(self.order), self.factors)
        return np.stack(grids, axis=1).astype(np.int64)

    @cached_property
    def _weights(self) -> np.ndarray:
        return np.array([self.order // n for n in self.factors], dtype=np.int64)

    @cached_property
    def _radix(self) -> np.ndarray:
        # index = sum coords * radix (C order)
        radix = np.ones(self.rank, dtype=np.int64)
        for j in range(self.rank - 2, -1, -1):
            radix[j] = radix[j + 1] * self.factors[j + 1]
        return radix

    # -- elements ---------------------------------------------------------

    def index(self, x) -> int:
        """Flat index of an element given as a coordinate tuple or flat index."""
        if isinstance(x, (int, np.integer)):
            i = int(x)
            if not 0 <= i < self.order:
                raise MismatchedGroupError(f"index {i} outside {self}")
            return i
        coords = tuple(int(c) for c in x)
        if len(coords) != self.rank:
            raise MismatchedGroupError(
                f"element {coords} has {len(coords)} coordinates, {self} has rank {self.rank}")
        for c, n in zip(coords, self.factors):
            if not 0 <= c < n:
                raise MismatchedGroupError(f"coordinate {c} out of range for Z{n}")
        return int(np.dot(coords, self._radix))

    def indices(self, xs: Iterable) -> np.ndarray:
        return np.array(sorted({self.index(x) for x in xs}), dtype=np.int64)

    def element(self, i: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.coords[i])

    def _ravel(self, coords: np.ndarray) -> np.ndarray:
        return (coords % np.array(self.factors)) @ self._radix

    def add(self, a, b) -> np.ndarray:
        """Sum of elements given by flat indices (broadcasting)."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.rank == 1:
            return (a + b) % self.order
        return self._ravel(self.coords[a] + self.coords[b])

    def neg(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.rank == 1:
            return (-a) % self.order
        return self._ravel(-self.coords[a])

    def sub(self, a, b) -> np.ndarray:
        return self.add(a, self.neg(b))

    def element_order(self, i: int) -> int:
        return math.lcm(*(n // math.gcd(n, int(c)) for c, n in zip(self.coords[i], self.factors)))

    def multiples(self, i: int) -> np.ndarray:
        """``0, x, 2x, ...`` up to the order of ``x``, as flat indices."""
        k = np.arange(self.element_order(i), dtype=np.int64)
        return self._ravel(np.outer(k, self.coords[i]))

    # -- characters -------------------------------------------------------

    def phase(self, g, x) -> np.ndarray:
        """Integer phase of characters ``g`` on elements ``x`` (outer product).

        ``gamma_g(x) = exp(2 pi i phase / order)``.
        """
        g = np.atleast_1d(np.asarray(g, dtype=np.int64))
        x = np.atleast_1d(np.asarray(x, dtype=np.int64))
        return ((self.coords[g] * self._weights) @ self.coords[x].T) % self.order

    @cached_property
    def phase_matrix(self) -> np.ndarray:
        """``phase_matrix[g, x]``; built only for small groups."""
        if self.order > DENSE_TABLE_LIMIT:
            raise GroupSpecError(f"dense phase table refused for order {self.order}")
        everything = np.arange(self.order)
        return self.phase(everything, everything)

    @cached_property
    def valuation_matrix(self) -> np.ndarray:
        """Numerator of ``||gamma_g(x)||`` over ``order``: ``min(p, order - p)``."""
        p = self.phase_matrix
        return np.minimum(p, self.order - p)

    @cached_property
    def character_table(self) -> np.ndarray:
        """``character_table[g, x] = gamma_g(x)`` as complex128."""
        return np.exp(2j * np.pi * self.phase_matrix / self.order)


def parse_group_spec(text: str) -> GroupSpec:
    """Parse ``"Z4xZ6"`` style group specs."""
    text = text.strip()
    parts = text.split("x")
    factors = []
    pos = 0
    for part in parts:
        m = _SPEC_RE.fullmatch(part)
        if m is None:
            raise GroupSpecError(f"malformed group spec {text!r} at position {pos}: {part!r}")
        factors.append(int(m.group(1)))
        pos += len(part) + 1
    return GroupSpec(tuple(factors))


def _check_same(G: GroupSpec, *others) -> None:
    for other in others:
        if other.group != G:
            raise MismatchedGroupError(f"{other.group} does not match {G}")


def char_eval(G: GroupSpec, gamma, x) -> complex:
    """``gamma(x)`` for a character and element of ``G``."""
    p = int(G.phase(G.index(gamma), G.index(x))[0, 0])
    return complex(np.exp(2j * np.pi * p / G.order))


# -- index sets --------------------------------------------------------------


@dataclass(frozen=True)
class _IndexSet:
    group: GroupSpec
    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(sorted({int(i) for i in self.indices}))
        if idx and (idx[0] < 0 or idx[-1] >= self.group.order):
            raise MismatchedGroupError(f"index outside {self.group}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_mask(cls, G: GroupSpec, mask: np.ndarray, **kw):
        return cls(G, tuple(np.flatnonzero(mask).tolist()), **kw)

    @classmethod
    def from_elements(cls, G: GroupSpec, xs: Iterable, **kw):
        return cls(G, tuple(G.index(x) for x in xs), **kw)

    @property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.group.order, dtype=bool)
        m[list(self.indices)] = True
        return m

    @property
    def array(self) -> np.ndarray:
        return np.array(self.indices, dtype=np.int64)

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, x):
        try:
            return self.group.index(x) in set(self.indices)
        except MismatchedGroupError:
            return False

    def elements(self) -> list[tuple[int, ...]]:
        return [self.group.element(i) for i in self.indices]

    def issubset(self, other: _IndexSet) -> bool:
        return set(self.indices) <= set(other.indices)


@dataclass(frozen=True)
class Subgroup(_IndexSet):
    """A subgroup of G stored by member indices."""

    @property
    def order(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class CharacterSet(_IndexSet):
    """Finite set of characters; ``role`` is a free-form tag."""

    role: str = field(default="", compare=False)

    def union(self, other: CharacterSet, role: str = "") -> CharacterSet:
        _check_same(self.group, other)
        return CharacterSet(self.group, self.indices + other.indices, role=role or self.role)

    def difference(self, other: CharacterSet) -> CharacterSet:
        _check_same(self.group, other)
        return CharacterSet(self.group, tuple(set(self.indices) - set(other.indices)), role=self.role)


def trivial_character_set(G: GroupSpec) -> CharacterSet:
    return CharacterSet(G, (0,), role="frequency")


# -- subgroups ---------------------------------------------------------------


def _join_cyclic(G: GroupSpec, mask: np.ndarray, x: int) -> np.ndarray:
    """Mask of ``H + <x>`` for a subgroup mask ``H``."""
    members = np.flatnonzero(mask)
    mult = G.multiples(x)
    out = np.zeros_like(mask)
    out[G.add(members[:, None], mult[None, :]).ravel()] = True
    return out


def generated_subgroup(G: GroupSpec, seed: Iterable) -> Subgroup:
    """Smallest subgroup containing ``seed`` (elements or flat indices).

    Built by successive joins ``H <- H + <s>``; each nontrivial join at least
    doubles ``H`` so there are at most ``log2 |G|`` of them.
    """
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    for s in seed:
        i = G.index(s)
        if not mask[i]:
            mask = _join_cyclic(G, mask, i)
    return Subgroup.from_mask(G, mask)


def annihilator(H: _IndexSet) -> CharacterSet:
    """``H^perp``: characters trivial on every element of ``H`` (exact test)."""
    G = H.group
    chars = np.arange(G.order)
    ok = np.all(G.phase(chars, H.array) == 0, axis=1)
    return CharacterSet.from_mask(G, ok, role="annihilator")


def is_subgroup(S: _IndexSet) -> bool:
    if 0 not in S.indices:
        return False
    idx = S.array
    sums = S.group.add(idx[:, None], idx[None, :])
    return bool(np.all(S.mask[sums]))


def perp_of_character_set(V: CharacterSet) -> Subgroup:
    """``V^perp``: elements on which every character of ``V`` is 1."""
    if not is_subgroup(V):
        raise NotASubgroupError("character set is not closed under the dual group law")
    G = V.group
    ok = np.all(G.phase(V.array, np.arange(G.order)) == 0, axis=0)
    return Subgroup.from_mask(G, ok)


def divisors(n: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def subgroup_orders_up_to(G: GroupSpec, M: int) -> list[int]:
    """Orders of subgroups of the dual that are at most ``M``.

    A finite Abelian group has a subgroup of every order dividing its order.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    return [d for d in divisors(G.order) if d <= M]


def frac_product(t: Fraction) -> Fraction:
    """``{t}(1 - {t})`` in exact arithmetic."""
    frac = t - math.floor(t)
    return frac * (1 - frac)


def fractional_obstruction(alpha, G: GroupSpec, M: int) -> Fraction:
    """``min_{v <= M, v | |G|} {alpha v}(1 - {alpha v})`` computed exactly."""
    alpha = as_fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ValueError("density must lie in [0, 1]")
    return min(frac_product(alpha * v) for v in subgroup_orders_up_to(G, M))


# -- enumeration helpers (tests, scans) --------------------------------------


def _partitions(n: int, largest: int | None = None):
    if n == 0:
        yield ()
        return
    largest = n if largest is None else largest
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def abelian_groups(order: int) -> list[GroupSpec]:
    """All Abelian groups of the given order up to isomorphism (invariant factors)."""
    if order < 2:
        return []
    per_prime = []
    for p, e in _factorize(order).items():
        per_prime.append([[p**k for k in part] for part in _partitions(e)])
    groups = []
    for combo in itertools.product(*per_prime):
        width = max(len(c) for c in combo)
        # invariant factors n_1 | n_2 | ..., largest last
        factors = [1] * width
        for powers in combo:
            for j, q in enumerate(powers):
                factors[width - 1 - j] *= q
        groups.append(GroupSpec(tuple(f for f in factors if f > 1)))
    return groups


def all_subgroups(G: GroupSpec) -> list[Subgroup]:
    """Every subgroup of ``G`` by closure over cyclic joins (small groups only)."""
    seen = {}
    start = np.zeros(G.order, dtype=bool)
    start[0] = True
    frontier = [start]
    seen[start.tobytes()] = start
    while frontier:
        nxt = []
        for mask in frontier:
            for x in range(G.order):
                if mask[x]:
                    continue
                joined = _join_cyclic(G, mask, x)
                key = joined.tobytes()
                if key not in seen:
                    seen[key] = joined
                    nxt.append(joined)
        frontier = nxt
    subs = [Subgroup.from_mask(G, m) for m in seen.values()]
    return sorted(subs, key=lambda H: (H.order, H.indices))


# -- serialization -----------------------------------------------------------


def format_element(coords: Sequence[int]) -> str:
    return "(" + ",".join(str(int(c)) for c in coords) + ")"


def parse_element(G: GroupSpec, text: str) -> int:
    """``"(a,b)"`` coordinates or a bare flat index."""
    text = text.strip()
    if text.startswith("(") or text.endswith(")"):
        if not (text.startswith("(") and text.endswith(")")):
            raise GroupSpecError(f"unbalanced parentheses in element {text!r}")
        try:
            coords = tuple(int(p) for p in text[1:-1].split(","))
        except ValueError:
            raise GroupSpecError(f"malformed element {text!r}")
        return G.index(coords)
    try:
        return G.index(int(text))
    except ValueError:
        raise GroupSpecError(f"malformed element {text!r}")


def set_to_json(G: GroupSpec, indices: Iterable[int]) -> list[list[int]]:
    return [list(G.element(i)) for i in sorted(indices)]


def set_from_json(G: GroupSpec, data) -> tuple[int, ...]:
    if isinstance(data, str):
        return hex_to_set(G, data)
    return tuple(sorted(G.index(tuple(x)) for x in data))


def set_to_hex(indices: Iterable[int]) -> str:
    bits = 0
    for i in indices:
        bits |= 1 << int(i)
    return hex(bits)


def hex_to_set(G: GroupSpec, text: str) -> tuple[int, ...]:
    bits = int(text, 16)
    if bits >> G.order:
        raise GroupSpecError(f"bitmask {text} has bits beyond order {G.order}")
    return tuple(i for i in range(G.order) if bits >> i & 1)
