"""Local large spectra and a verified Chang-type cover.

The cover postcondition is checked exhaustively: every large-spectrum
character is within ``eta`` of 1 on the whole refined Bohr set.  The
refined radius starts from the usual ``delta * eta * eps^2 / d^2 log`` shape
and is halved until the check passes, falling back to putting the whole
spectrum into the frequency set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bohr import BohrSet, bohr_set, cutoff
from .config import IterationConfig
from .errors import CoverageFailure, SizeTooLarge, ZeroMass
from .fourier import local_l2_squared, local_norm, local_transform
from .groups import CharacterSet, GroupSpec, as_fraction, format_fraction, set_to_json

DISSOCIATION_LIMIT = 20
MAX_HALVINGS = 20
SLACK = 1e-12


@dataclass(frozen=True)
class LargeSpectrum:
    eps: Fraction
    l1: float                  # ||f||_{L^1(translate + beta)}
    members: CharacterSet
    coefficients: np.ndarray   # local coefficients of the members, same order

    def __len__(self):
        return len(self.members)


def large_spectrum(G: GroupSpec, f, beta, eps, translate: int = 0) -> LargeSpectrum:
    """``{gamma : |(f d(x + beta))^(gamma)| >= eps ||f||_{L^1(x + beta)}}``."""
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    l1 = local_norm(G, f, beta, translate, 1)
    if l1 <= 0:
        raise ZeroMass("f vanishes on the support of the cutoff")
    coef = local_transform(G, f, beta, translate)
    keep = np.abs(coef) >= float(eps) * l1 - SLACK
    members = CharacterSet.from_mask(G, keep, role="large_spectrum")
    return LargeSpectrum(eps, l1, members, coef[members.array])


def _sums_mask(G: GroupSpec, chars) -> tuple[np.ndarray, int | None]:
    """Mask of all ``sum eps_i s_i`` with ``eps_i in {-1, 0, 1}``.

    Also returns the position of the first character already lying in the
    sums of its predecessors (None when the sequence is dissociated).
    """
    sums = np.zeros(G.order, dtype=bool)
    sums[0] = True
    first_bad = None
    for k, s in enumerate(chars):
        if first_bad is None and sums[s]:
            first_bad = k
        idx = np.flatnonzero(sums)
        sums = sums.copy()
        sums[G.add(idx, s)] = True
        sums[G.sub(idx, s)] = True
    return sums, first_bad


def is_dissociated(S: CharacterSet) -> bool:
    """No nontrivial ``{-1, 0, 1}`` combination of S is the trivial character."""
    if len(S) > DISSOCIATION_LIMIT:
        raise SizeTooLarge(f"|S| = {len(S)} exceeds {DISSOCIATION_LIMIT}")
    _, bad = _sums_mask(S.group, S.indices)
    return bad is None


def greedy_dissociated(G: GroupSpec, order) -> tuple[list[int], bool]:
    """Greedy maximal dissociated subsequence; flags overflow past the cap."""
    chosen: list[int] = []
    sums = np.zeros(G.order, dtype=bool)
    sums[0] = True
    for g in order:
        if sums[g]:
            continue
        if len(chosen) == DISSOCIATION_LIMIT:
            return chosen, True
        chosen.append(int(g))
        idx = np.flatnonzero(sums)
        sums[G.add(idx, g)] = True
        sums[G.sub(idx, g)] = True
    return chosen, False


def worst_chord(G: GroupSpec, chars, elements) -> np.ndarray:
    """``max_x |1 - gamma(x)|`` over the given elements, for each character."""
    chars = np.asarray(chars, dtype=np.int64)
    if len(chars) == 0:
        return np.zeros(0)
    p = G.phase(chars, np.asarray(elements, dtype=np.int64))
    worst = np.minimum(p, G.order - p).max(axis=1)
    return 2 * np.sin(np.pi * worst / G.order)


@dataclass(frozen=True)
class ChangCover:
    Lambda: CharacterSet
    delta2: Fraction
    covered: LargeSpectrum
    eta: Fraction
    verified: bool
    fallback: bool
    halvings: int
    worst: float               # largest |1 - gamma(x)| seen in the final check
    l1: float
    l2_sq: float
    log_term: float            # max(1, log(||f||_2^2 / ||f||_1^2))
    cardinality_ratio: float   # |Lambda| / (eps^-2 log_term)

    def to_json(self) -> dict:
        G = self.Lambda.group
        return {
            "lambda": set_to_json(G, self.Lambda.indices),
            "delta2": format_fraction(self.delta2),
            "verified": self.verified,
            "fallback": self.fallback,
            "cardinality_ratio": self.cardinality_ratio,
        }


def _covers(G, covered: CharacterSet, frequencies: CharacterSet, delta2, eta) -> tuple[bool, float]:
    B = bohr_set(frequencies, delta2)
    chords = worst_chord(G, covered.array, B.array)
    worst = float(chords.max()) if len(chords) else 0.0
    return worst <= float(eta) + SLACK, worst


def local_chang_cover(G: GroupSpec, f, B: BohrSet, eps, eta,
                      cfg: IterationConfig = IterationConfig(), translate: int = 0) -> ChangCover:
    """Frequencies Lambda and a radius delta'' whose Bohr set annihilates L to within eta."""
    eps, eta = as_fraction(eps), as_fraction(eta)
    beta = cutoff(B)
    spec = large_spectrum(G, f, beta, eps, translate)
    l1 = spec.l1
    l2 = local_l2_squared(G, f, beta, translate)
    log_term = max(1.0, math.log(l2 / (l1 * l1)))
    d = max(B.d, 1)

    mags = np.abs(spec.coefficients)
    order = spec.members.array[np.lexsort((spec.members.array, -mags))]
    chosen, overflow = greedy_dissociated(G, order)
    gamma = B.gamma

    base = cfg.c_chang * B.delta * eta * eps ** 2 / (d * d)
    if log_term > 1:
        base /= Fraction(log_term).limit_denominator(1000)

    lam = CharacterSet(G, tuple(chosen), role="chang")
    delta2, halvings, ok, worst = base, 0, False, 0.0
    if not overflow:
        while True:
            ok, worst = _covers(G, spec.members, gamma.union(lam, "frequency"), delta2, eta)
            if ok or halvings == MAX_HALVINGS:
                break
            delta2 /= 2
            halvings += 1
    fallback = not ok
    if fallback:
        lam = CharacterSet(G, spec.members.indices, role="chang")
        delta2 = min(delta2, eta / 7)
        ok, worst = _covers(G, spec.members, gamma.union(lam, "frequency"), delta2, eta)
        if not ok:
            raise CoverageFailure(f"fallback cover fails: worst chord {worst} > eta = {eta}")
    ratio = len(lam) / (float(eps) ** -2 * log_term)
    return ChangCover(lam, delta2, spec, eta, ok, fallback, halvings, worst,
                      l1, l2, log_term, ratio)
