"""Bohr sets, normalised cutoffs and regularity on finite Abelian groups.

For a frequency set Gamma every element x has a *radius numerator*

    r(x) = max_{gamma in Gamma} min(p, N - p),   p = phase(gamma, x),

so that ``||gamma(x)|| <= r(x)/N`` for all gamma with equality for some.
``B(Gamma, t) = {x : r(x) <= floor(t N)}`` is therefore decided in exact
integer arithmetic, and the measure profile ``t -> mu(B(Gamma, t))`` is a step
function with breakpoints ``r/N``.

Regularity is an explicit predicate: a radius ``delta'`` is regular when

    |mu(B((1 + kappa) delta')) / mu(B(delta')) - 1| <= C_R |kappa| d

for every tested ``|kappa| d <= c_R``.  The tested kappas are a uniform grid
plus every kappa where the profile jumps (left limits included for
``kappa < 0``), which makes the check exact over the whole kappa interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import NoRegularRadius
from .fourier import Measure, convolve_measure, oscillation_on_bohr_translates
from .groups import (
    CharacterSet,
    GroupSpec,
    Subgroup,
    _join_cyclic,
    annihilator,
    as_fraction,
    format_fraction,
    generated_subgroup,
    set_to_hex,
    set_to_json,
)

TV_TARGET = Fraction(1, 4)


@dataclass(frozen=True)
class RegularityConfig:
    c_R: Fraction = Fraction(1, 16)
    C_R: Fraction = Fraction(4)
    samples: int = 32

    def __post_init__(self):
        object.__setattr__(self, "c_R", as_fraction(self.c_R))
        object.__setattr__(self, "C_R", as_fraction(self.C_R))
        if self.c_R <= 0 or self.C_R <= 0:
            raise ValueError("regularity constants must be positive")
        if self.samples < 2 or self.samples % 2:
            raise ValueError("samples must be a positive even integer")


DEFAULT_REGULARITY = RegularityConfig()


def valuation(z: complex) -> float:
    """Distance of ``arg(z)/2pi`` to the nearest integer, in ``[0, 1/2]``."""
    if abs(abs(z) - 1.0) > 1e-9:
        raise ValueError(f"valuation needs a unit complex number, got |z| = {abs(z)}")
    theta = np.angle(z) / (2 * np.pi)
    return float(abs(theta - round(theta)))


@lru_cache(maxsize=256)
def _radius_numerators(G: GroupSpec, gamma: tuple[int, ...]) -> np.ndarray:
    if not gamma:
        r = np.zeros(G.order, dtype=np.int64)
    else:
        p = G.phase(np.array(gamma), np.arange(G.order))
        r = np.minimum(p, G.order - p).max(axis=0)
    r.setflags(write=False)
    return r


def radius_numerators(gamma: CharacterSet) -> np.ndarray:
    """``r(x)`` for every x; ``x in B(Gamma, t)`` iff ``r(x) <= floor(t |G|)``."""
    return _radius_numerators(gamma.group, gamma.indices)


@lru_cache(maxsize=256)
def _sorted_radii(G: GroupSpec, gamma: tuple[int, ...]) -> np.ndarray:
    r = np.sort(_radius_numerators(G, gamma))
    r.setflags(write=False)
    return r


def _cut(t: Fraction, N: int) -> int:
    """``floor(t N)`` for nonnegative rational t."""
    return (t.numerator * N) // t.denominator


def _count(rs_sorted: np.ndarray, t: Fraction, N: int) -> int:
    return int(np.searchsorted(rs_sorted, _cut(t, N), side="right"))


@dataclass(frozen=True, eq=False)
class BohrSet:
    """``B(Gamma, delta)`` with exact membership; ``regular`` is None if untested."""

    gamma: CharacterSet
    delta: Fraction
    indices: tuple[int, ...]
    regular: bool | None = None
    slope: Fraction | None = None
    config: RegularityConfig | None = field(default=None, repr=False)

    @property
    def group(self) -> GroupSpec:
        return self.gamma.group

    @property
    def d(self) -> int:
        return len(self.gamma)

    @property
    def measure(self) -> Fraction:
        return Fraction(len(self.indices), self.group.order)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.indices, dtype=np.int64)

    @property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.group.order, dtype=bool)
        m[list(self.indices)] = True
        return m

    def __len__(self):
        return len(self.indices)

    def __contains__(self, x):
        return self.group.index(x) in set(self.indices)

    def to_json(self) -> dict:
        G = self.group
        members = set_to_hex(self.indices) if G.rank == 1 else set_to_json(G, self.indices)
        cfg = self.config or DEFAULT_REGULARITY
        return {
            "group": str(G),
            "gamma": set_to_json(G, self.gamma.indices),
            "delta": format_fraction(self.delta),
            "members": members,
            "measure": format_fraction(self.measure),
            "regular": self.regular,
            "slope": None if self.slope is None else format_fraction(self.slope),
            "cR": format_fraction(cfg.c_R),
            "CR": format_fraction(cfg.C_R),
        }


def bohr_set(gamma: CharacterSet, delta, cfg: RegularityConfig | None = None) -> BohrSet:
    """``{x : ||gamma(x)|| <= delta for all gamma}``, compared as rationals.

    With a config the regularity predicate is evaluated and recorded.
    """
    delta = as_fraction(delta)
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    G = gamma.group
    r = radius_numerators(gamma)
    members = np.flatnonzero(r <= _cut(delta, G.order))
    regular = slope = None
    if cfg is not None:
        regular, slope = is_regular(gamma, delta, cfg)
    return BohrSet(gamma, delta, tuple(members.tolist()), regular, slope, cfg)


class CutoffMeasure(Measure):
    """Uniform probability measure on a Bohr set."""

    def __init__(self, bohr: BohrSet):
        w = np.zeros(bohr.group.order)
        w[list(bohr.indices)] = 1.0 / len(bohr.indices)
        super().__init__(bohr.group, w)
        object.__setattr__(self, "bohr", bohr)


def cutoff(bohr: BohrSet) -> CutoffMeasure:
    return CutoffMeasure(bohr)


def measure_profile(gamma: CharacterSet) -> list[tuple[Fraction, Fraction]]:
    """Breakpoints ``(t, mu(B(Gamma, t)))`` of the measure step function."""
    G = gamma.group
    rs = _sorted_radii(G, gamma.indices)
    values, counts = np.unique(rs, return_counts=True)
    cum = np.cumsum(counts)
    return [(Fraction(int(v), G.order), Fraction(int(c), G.order)) for v, c in zip(values, cum)]


# -- regularity --------------------------------------------------------------


def regularity_slope(gamma: CharacterSet, delta, cfg: RegularityConfig = DEFAULT_REGULARITY,
                     samples: int | None = None) -> Fraction:
    """Worst ``|ratio - 1| / (|kappa| d)`` over the tested kappas (exact)."""
    delta = as_fraction(delta)
    G = gamma.group
    N = G.order
    rs = _sorted_radii(G, gamma.indices)
    d = max(len(gamma), 1)
    kmax = cfg.c_R / d
    half = (samples or cfg.samples) // 2
    base = _count(rs, delta, N)

    worst = Fraction(0)

    def consider(kappa: Fraction, count: int):
        nonlocal worst
        s = abs(Fraction(count, base) - 1) / (abs(kappa) * d)
        if s > worst:
            worst = s

    for j in range(-half, half + 1):
        if j:
            kappa = kmax * Fraction(j, half)
            consider(kappa, _count(rs, (1 + kappa) * delta, N))
    for v in np.unique(rs).tolist():
        b = Fraction(v, N)
        kappa = b / delta - 1
        if kappa == 0 or abs(kappa) > kmax:
            continue
        if kappa > 0:
            consider(kappa, int(np.searchsorted(rs, v, side="right")))
        else:
            # the profile drops just below b: use the left limit
            consider(kappa, int(np.searchsorted(rs, v, side="left")))
    return worst


def is_regular(gamma: CharacterSet, delta, cfg: RegularityConfig = DEFAULT_REGULARITY,
               samples: int | None = None) -> tuple[bool, Fraction]:
    slope = regularity_slope(gamma, delta, cfg, samples)
    return slope <= cfg.C_R, slope


def regular_candidates(gamma: CharacterSet, delta) -> list[Fraction]:
    """Midpoints of the profile's constancy intervals inside ``[delta/2, delta)``."""
    delta = as_fraction(delta)
    G = gamma.group
    values = np.unique(_sorted_radii(G, gamma.indices)).tolist()
    edges = [Fraction(v, G.order) for v in values] + [None]
    lo_all, hi_all = delta / 2, delta
    out = []
    for a, b in zip(edges[:-1], edges[1:]):
        lo = max(a, lo_all)
        hi = hi_all if b is None else min(b, hi_all)
        if lo < hi:
            out.append((lo + hi) / 2)
    if not out:
        # every breakpoint lies above delta: [delta/2, delta) sits inside [0, first)
        out.append(3 * delta / 4)
    return out


def regular_delta(gamma: CharacterSet, delta, cfg: RegularityConfig = DEFAULT_REGULARITY) -> Fraction:
    """A regular ``delta' in [delta/2, delta)`` minimising the worst ratio slope.

    Ties go to the larger radius.  Raises NoRegularRadius when no candidate
    passes; the diagnostics carry the best slope seen.
    """
    delta = as_fraction(delta)
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    best = None
    scored = []
    for cand in regular_candidates(gamma, delta):
        slope = regularity_slope(gamma, cand, cfg)
        scored.append((cand, slope))
        if slope <= cfg.C_R and (best is None or slope < best[1]
                                 or (slope == best[1] and cand > best[0])):
            best = (cand, slope)
    if best is None:
        least = min(scored, key=lambda cs: cs[1])
        raise NoRegularRadius(
            f"no regular radius in [{delta / 2}, {delta}) for |Gamma| = {len(gamma)}",
            {"delta": delta, "best_candidate": least[0], "best_slope": least[1],
             "C_R": cfg.C_R, "c_R": cfg.c_R})
    return best[0]


# -- approximate Haar measure ------------------------------------------------


def translation_defect(beta: Measure, y: int) -> float:
    """Total variation ``sum_x |beta(x - y) - beta(x)|``."""
    G = beta.group
    w = beta.weights
    shifted = w[G.sub(np.arange(G.order), y)]
    return float(np.abs(shifted - w).sum())


def translation_defect_numerators(bohr: BohrSet) -> np.ndarray:
    """Exact ``|B| * TV(y)`` for the uniform cutoff on B, for every y.

    ``TV(y) = |B Δ (B + y)| / |B| = 2 (|B| - |B ∩ (B + y)|) / |B|``.
    """
    G = bohr.group
    mask = bohr.mask
    members = bohr.array
    overlap = mask[G.add(np.arange(G.order)[:, None], members[None, :])].sum(axis=1)
    return 2 * (len(members) - overlap)


def smoothing_defect(f, beta: CutoffMeasure, delta_small) -> float:
    """``max |f*beta(y) - f*beta(x)|`` over ``y - x in B(Gamma, delta_small)``."""
    G = beta.group
    smoothed = convolve_measure(G, f, beta)
    inner = bohr_set(beta.bohr.gamma, delta_small)
    return oscillation_on_bohr_translates(G, smoothed, inner)


def approx_annihilator_dual(bohr: BohrSet, eps: float) -> CharacterSet:
    """``{gamma : |1 - gamma(x)| <= eps for all x in B}`` (double precision)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    G = bohr.group
    p = G.phase(np.arange(G.order), bohr.array)
    worst = np.minimum(p, G.order - p).max(axis=1)
    chord = np.abs(1 - np.exp(2j * np.pi * worst / G.order))
    return CharacterSet.from_mask(G, chord <= eps, role="annihilator")


# -- subgroup chains ---------------------------------------------------------


@dataclass(frozen=True)
class ChainLink:
    lo: Fraction
    hi: Fraction
    subgroup: Subgroup


def subgroup_chain(gamma: CharacterSet, kappa0) -> list[ChainLink]:
    """The subgroups ``<B(Gamma, kappa)>`` for kappa in ``(kappa0, 1]``.

    Each link covers ``[lo, hi)`` (the first is open at ``kappa0``).  The
    subgroup is grown incrementally as the sweep passes each breakpoint,
    which equals generating from ``B(Gamma, kappa)`` afresh.
    """
    kappa0 = as_fraction(kappa0)
    if not 0 <= kappa0 <= 1:
        raise ValueError("kappa0 must lie in [0, 1]")
    G = gamma.group
    N = G.order
    r = radius_numerators(gamma)
    start = _cut(kappa0, N)
    mask = np.zeros(N, dtype=bool)
    mask[0] = True
    for x in np.flatnonzero(r <= start):
        if not mask[x]:
            mask = _join_cyclic(G, mask, int(x))
    links = [[kappa0, mask]]
    for v in np.unique(r[r > start]).tolist():
        grown = mask
        for x in np.flatnonzero(r == v):
            if not grown[x]:
                grown = _join_cyclic(G, grown, int(x))
        if grown is not mask:
            links.append([Fraction(v, N), grown])
            mask = grown
    out = []
    for k, (lo, m) in enumerate(links):
        hi = links[k + 1][0] if k + 1 < len(links) else Fraction(1)
        out.append(ChainLink(lo, hi, Subgroup.from_mask(G, m)))
    return out


def chain_within_claim(gamma: CharacterSet, chain: list[ChainLink]) -> bool:
    """At most ``d + 1`` distinct subgroups along the chain."""
    return len({link.subgroup.indices for link in chain}) <= len(gamma) + 1


# -- stabilised pair ---------------------------------------------------------


@dataclass(frozen=True)
class StabilizedPair:
    delta1: Fraction          # delta'
    delta3: Fraction          # delta''' (finer, same generated subgroup)
    V: CharacterSet           # <B(Gamma, delta')>^perp
    H: Subgroup               # <B(Gamma, delta')>
    radii: tuple[Fraction, ...]
    rounds: int
    within_claim: bool
    max_tv: Fraction          # worst translation defect of beta' over B(Gamma, delta''')


def _largest_smoothing_radius(bohr: BohrSet, target: Fraction) -> Fraction:
    """Largest t <= delta with TV(beta, y) <= target on B(Gamma, t), as a bound.

    Every radius strictly below the returned value (and the value itself if it
    equals ``bohr.delta``) is admissible.
    """
    G = bohr.group
    size = len(bohr)
    tv = translation_defect_numerators(bohr)
    bad = tv * target.denominator > target.numerator * size
    if not np.any(bad):
        return bohr.delta
    r = radius_numerators(bohr.gamma)
    first_bad = int(r[bad].min())
    return min(bohr.delta, Fraction(first_bad, G.order))


def stabilized_pair(gamma: CharacterSet, delta, cfg: RegularityConfig = DEFAULT_REGULARITY) -> StabilizedPair:
    """Regular ``delta' <= delta`` and ``delta''' < delta'`` generating the same subgroup.

    Descent: ``delta_0`` regular below delta; ``delta_{i+1}`` is regular and
    small enough that every translate by ``B(Gamma, delta_{i+1})`` moves
    ``beta_i`` by at most 1/4 in total variation, which bounds
    ``|f*beta_i(y) - f*beta_i(x)| <= ||f||_inf / 4`` for every f.  Stops at the
    first i with ``<B_i> = <B_{i+1}>``.
    """
    delta = as_fraction(delta)
    radii = [regular_delta(gamma, delta, cfg)]
    B = bohr_set(gamma, radii[0])
    H = generated_subgroup(gamma.group, B.indices)
    while True:
        bound = _largest_smoothing_radius(B, TV_TARGET)
        nxt = regular_delta(gamma, bound, cfg)
        B_next = bohr_set(gamma, nxt)
        H_next = generated_subgroup(gamma.group, B_next.indices)
        radii.append(nxt)
        if H_next == H:
            break
        B, H = B_next, H_next
    delta1, delta3 = radii[-2], radii[-1]
    B1 = bohr_set(gamma, delta1)
    tv = translation_defect_numerators(B1)
    inner = radius_numerators(gamma) <= _cut(delta3, gamma.group.order)
    max_tv = Fraction(int(tv[inner].max()), len(B1))
    rounds = len(radii) - 1
    return StabilizedPair(
        delta1=delta1,
        delta3=delta3,
        V=annihilator(H),
        H=H,
        radii=tuple(radii),
        rounds=rounds,
        within_claim=rounds <= len(gamma) + 1,
        max_tv=max_tv,
    )


def bohr_size_holds(bohr: BohrSet) -> bool:
    """``mu(B(Gamma, delta)) >= delta^d`` in exact arithmetic."""
    return bohr.measure >= bohr.delta ** bohr.d


def log_scale(d: int, delta: Fraction) -> float:
    """``d (log(1/delta) + d log d)``, the scale appearing in the size bounds."""
    return d * (math.log(1 / float(delta)) + d * math.log(max(d, 1)))
