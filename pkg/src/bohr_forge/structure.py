"""Physical-space structure: intermediate values, coset structure, split cosets,
and the case analysis that produces a centre with comparable local norms.

Values of ``chi_A * beta`` for uniform Bohr cutoffs are rationals with
denominator ``|B|``; case decisions and the norm comparisons are made on the
integer numerators so that ties (e.g. a value of exactly 1/2) are routed
deterministically.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .bohr import (
    BohrSet,
    StabilizedPair,
    bohr_set,
    log_scale,
    radius_numerators,
    regular_delta,
    stabilized_pair,
)
from .config import IterationConfig
from .errors import HypothesisFailed, PreconditionViolated, WitnessNotFound
from .fourier import a_norm, count_convolve, oscillation_on_bohr_translates, spectral_truncation
from .groups import (
    CharacterSet,
    GroupSpec,
    Subgroup,
    annihilator,
    as_fraction,
    format_fraction,
    frac_product,
    fractional_obstruction,
    generated_subgroup,
    perp_of_character_set,
)

SLACK = 1e-12

SMALL_M = "SmallM"
CASE_BOUNDARY = "CaseBoundaryCoset"
CASE_SPARSE = "CaseSparse"
CASE_DENSE = "CaseDense"


def _mask(G: GroupSpec, A) -> np.ndarray:
    if isinstance(A, np.ndarray) and A.dtype == bool:
        return A
    m = np.zeros(G.order, dtype=bool)
    m[[G.index(a) for a in A]] = True
    return m


# -- discrete intermediate value theorem -------------------------------------


@dataclass(frozen=True)
class IvtWitness:
    x2: int
    value: float
    target: float
    bound: float
    path: tuple[int, ...]


def discrete_ivt(G: GroupSpec, g, B: BohrSet, x0, x1, c: float, eta: float) -> IvtWitness:
    """Find ``x2`` in ``x0 + <B>`` with ``|g(x2) - c| <= eta/2``.

    Breadth-first search from x0 in steps from B; the first visited point
    within ``eta/2`` of ``c`` is returned together with the path to it.
    """
    g = np.asarray(g, dtype=float)
    x0, x1 = G.index(x0), G.index(x1)
    osc = oscillation_on_bohr_translates(G, g, B)
    if osc > eta + SLACK:
        raise PreconditionViolated(f"oscillation {osc} exceeds eta = {eta}")
    lo, hi = sorted((g[x0], g[x1]))
    if not lo - SLACK <= c <= hi + SLACK:
        raise PreconditionViolated(f"target {c} outside [{lo}, {hi}]")
    H = generated_subgroup(G, B.indices)
    if int(G.sub(x0, x1)) not in set(H.indices):
        raise PreconditionViolated("x0 - x1 is not in the subgroup generated by B")

    half = eta / 2 + SLACK
    steps = np.array([s for s in B.indices if s != 0], dtype=np.int64)
    parent = {x0: None}
    queue = deque([x0])
    while queue:
        x = queue.popleft()
        if abs(g[x] - c) <= half:
            path = []
            node = x
            while node is not None:
                path.append(node)
                node = parent[node]
            return IvtWitness(x, float(g[x]), float(c), eta / 2, tuple(reversed(path)))
        for y in G.add(x, steps).tolist():
            if y not in parent:
                parent[y] = x
                queue.append(y)
    raise WitnessNotFound("BFS exhausted the coset without a witness")


# -- qualitative structure ---------------------------------------------------


@dataclass(frozen=True)
class CosetStructure:
    V: CharacterSet
    H: Subgroup
    gamma: CharacterSet
    radius: Fraction
    pattern: dict            # coset representative -> density of A in the coset
    defect: float
    structured: bool
    witness_coset: Optional[int]


def _coset_reps(G: GroupSpec, H: Subgroup) -> tuple[np.ndarray, np.ndarray]:
    """Representative (least index) of the H-coset of every element."""
    cosets = G.add(np.arange(G.order)[:, None], H.array[None, :])
    return cosets.min(axis=1), cosets


def coset_structure(G: GroupSpec, A, eta=Fraction(1, 4)) -> CosetStructure:
    """Extract ``V`` with ``chi_A`` (nearly) constant on cosets of ``V^perp``.

    Truncates the spectrum to ``Gamma`` with tail ``<= eta/3``, takes
    ``H = <B(Gamma, eta / 3 ||chi_A||_A)>`` and ``V = H^perp``, then measures
    ``max |chi_A - chi_A * mu_H|`` exactly.
    """
    mask = _mask(G, A)
    if not 0 < mask.sum() < G.order:
        raise PreconditionViolated("A must be a nonempty proper subset")
    eta = as_fraction(eta)
    chi = mask.astype(float)
    gamma, _ = spectral_truncation(G, chi, float(eta))
    radius = eta / (3 * Fraction(float(a_norm(G, chi))))
    if not gamma.indices:
        gamma = CharacterSet(G, (0,), role="frequency")
    B = bohr_set(gamma, min(radius, Fraction(1)))
    H = generated_subgroup(G, B.indices)
    V = annihilator(H)
    counts = count_convolve(G, mask, H.array)
    reps, _ = _coset_reps(G, H)
    pattern = {}
    worst, worst_x = Fraction(0), None
    for x in range(G.order):
        avg = Fraction(int(counts[x]), H.order)
        pattern.setdefault(int(reps[x]), avg)
        dev = abs(int(mask[x]) - avg)
        if dev > worst:
            worst, worst_x = dev, x
    structured = worst == 0
    return CosetStructure(
        V=V, H=H, gamma=gamma, radius=radius, pattern=pattern, defect=float(worst),
        structured=structured, witness_coset=None if structured else int(reps[worst_x]))


@dataclass(frozen=True)
class CohenVerdict:
    alpha: Fraction
    M: int
    obstruction: Fraction
    degenerate: bool
    structure: Optional[CosetStructure]
    V_order: Optional[int]
    alpha_V: Optional[Fraction]
    frac_product: Optional[Fraction]
    contradiction: bool


def cohen_verdict(G: GroupSpec, A, M: int) -> CohenVerdict:
    mask = _mask(G, A)
    alpha = Fraction(int(mask.sum()), G.order)
    obstruction = fractional_obstruction(alpha, G, M)
    if alpha in (0, 1):
        return CohenVerdict(alpha, M, obstruction, True, None, None, None, None, False)
    st = coset_structure(G, mask)
    v = len(st.V)
    aV = alpha * v
    prod = frac_product(aV)
    contradiction = st.structured and v <= M and obstruction > 0
    return CohenVerdict(alpha, M, obstruction, False, st, v, aV, prod, contradiction)


# -- split coset -------------------------------------------------------------


@dataclass(frozen=True)
class SplitCoset:
    x: int
    inside: object           # f * mu_{V^perp}(x)
    outside: object          # (1 - f) * mu_{V^perp}(x)
    product: Fraction        # {||f||_1 |V|}(1 - {||f||_1 |V|})
    coset_mass: Fraction     # mu_G(V^perp) = 1/|V|
    bound: object            # product * coset_mass


def split_coset(G: GroupSpec, f, V: CharacterSet, c_split) -> SplitCoset:
    """A coset of ``V^perp`` on which both f and 1 - f carry mass.

    ``f`` may be a float array or an object array of Fractions (exact path).
    Returns the x maximising ``min(f*mu, (1-f)*mu)``, lowest index on ties;
    both sides are at least ``product / |V|``.
    """
    f = np.asarray(f)
    exact = f.dtype == object
    perp = perp_of_character_set(V)
    cosets = G.add(np.arange(G.order)[:, None], perp.array[None, :])
    if exact:
        mean = sum(f.tolist(), Fraction(0)) / G.order
        avg = [sum(f[row].tolist(), Fraction(0)) / perp.order for row in cosets]
    else:
        if np.any(f < -SLACK) or np.any(f > 1 + SLACK):
            raise PreconditionViolated("f must map into [0, 1]")
        mean = as_fraction(float(f.mean()))
        avg = f[cosets].mean(axis=1).tolist()
    product = frac_product(mean * len(V))
    if product < as_fraction(c_split):
        raise HypothesisFailed(
            f"fractional-part product {product} below c_split = {c_split}")
    best_x, best = 0, None
    for x, a in enumerate(avg):
        score = min(a, 1 - a)
        if best is None or score > best:
            best_x, best = x, score
    mass = Fraction(1, len(V))
    bound = product * mass if exact else float(product * mass)
    inside, outside = avg[best_x], 1 - avg[best_x]
    tol = 0 if exact else SLACK
    if inside < bound - tol or outside < bound - tol:
        raise WitnessNotFound("no coset attains the guaranteed split")
    return SplitCoset(best_x, inside, outside, product, mass, bound)


# -- physical estimate -------------------------------------------------------


@dataclass(frozen=True)
class PhysicalEstimate:
    tag: str
    delta: Fraction
    pair: StabilizedPair
    M: int
    d: int
    x: Optional[int] = None               # x''
    delta2: Optional[Fraction] = None     # delta''
    split: Optional[SplitCoset] = None
    alpha_prime: Optional[Fraction] = None
    l2_sq: Optional[Fraction] = None
    l1: Optional[Fraction] = None
    lower_bound: Optional[Fraction] = None
    C_cmp: Optional[Fraction] = None
    ivt: Optional[IvtWitness] = None

    @property
    def delta1(self) -> Fraction:
        return self.pair.delta1

    @property
    def delta3(self) -> Fraction:
        return self.pair.delta3

    @property
    def V(self) -> CharacterSet:
        return self.pair.V

    @property
    def ratio(self) -> Optional[Fraction]:
        if self.l2_sq is None:
            return None
        return self.l2_sq / self.l1

    @property
    def setlike_ok(self) -> bool:
        r = self.ratio
        return r is not None and 1 / self.C_cmp <= r <= self.C_cmp

    @property
    def lwrbd_ok(self) -> bool:
        return self.l2_sq is not None and self.l2_sq >= self.lower_bound

    @property
    def scale(self) -> float:
        return log_scale(self.d, self.delta)

    def to_json(self) -> dict:
        G = self.V.group
        q = lambda v: None if v is None else format_fraction(v)
        out = {
            "case": self.tag,
            "delta": q(self.delta),
            "delta1": q(self.delta1),
            "delta3": q(self.delta3),
            "V_order": len(self.V),
            "M": self.M,
            "d": self.d,
            "descent_rounds": self.pair.rounds,
            "scale": self.scale,
        }
        if self.tag == SMALL_M:
            out["log_M"] = math.log(self.M)
            out["small_m_constant"] = math.log(self.M) / self.scale if self.scale > 0 else None
            return out
        out.update({
            "x": list(G.element(self.x)),
            "delta2": q(self.delta2),
            "split_x": list(G.element(self.split.x)),
            "split_product": q(self.split.product),
            "alpha_prime": q(self.alpha_prime),
            "l2_sq": q(self.l2_sq),
            "l1": q(self.l1),
            "ratio": q(self.ratio),
            "C_cmp": q(self.C_cmp),
            "lower_bound": q(self.lower_bound),
            "setlike_ok": self.setlike_ok,
            "lwrbd_ok": self.lwrbd_ok,
            "lwrbd_exponent": math.log(1 / float(self.l2_sq)),
        })
        return out


def _local_norms(G, mask, counts, n1, center, inner: BohrSet) -> tuple[Fraction, Fraction]:
    """Exact L1 and squared L2 of ``chi_A - counts/n1`` on ``center + inner``."""
    pts = G.add(center, inner.array)
    h = n1 * mask[pts].astype(np.int64) - counts[pts]
    size = len(inner)
    l1 = Fraction(int(np.abs(h).sum()), n1 * size)
    l2 = Fraction(int((h * h).sum()), n1 * n1 * size)
    return l1, l2


def _oscillation_numerators(G: GroupSpec, counts: np.ndarray) -> np.ndarray:
    """``max_x |counts(x + y) - counts(x)|`` for every y."""
    xs = np.arange(G.order)
    moved = counts[G.add(xs[:, None], xs[None, :])]
    return np.abs(moved - counts[:, None]).max(axis=0)


def physical_estimate(G: GroupSpec, A, gamma: CharacterSet, delta, M: int,
                      cfg: IterationConfig = IterationConfig()) -> PhysicalEstimate:
    """Run the three-case argument and return a centre with comparable norms.

    ``SmallM`` when the stabilised annihilator already has ``|V| >= M``.
    Otherwise the split coset decides between a boundary coset (the smoothed
    indicator crosses 1/2; ties go here), a sparse coset (below 1/2
    throughout) and a dense coset (above 1/2; run on the complement).
    """
    mask = _mask(G, A)
    if not 0 < mask.sum() < G.order:
        raise PreconditionViolated("A must be a nonempty proper subset")
    delta = as_fraction(delta)
    d = len(gamma)
    pair = stabilized_pair(gamma, delta, cfg.regularity)
    if len(pair.V) >= M:
        return PhysicalEstimate(SMALL_M, delta, pair, M, d)

    B1 = bohr_set(gamma, pair.delta1)
    n1 = len(B1)
    counts = count_convolve(G, mask, B1.array)
    exact = np.array([Fraction(int(c), n1) for c in counts], dtype=object)
    split = split_coset(G, exact, pair.V, cfg.c_split)
    perp = perp_of_character_set(pair.V)
    coset = G.add(split.x, perp.array)
    vals = counts[coset]
    hi_pts = coset[2 * vals >= n1]
    lo_pts = coset[2 * vals <= n1]

    if len(hi_pts) and len(lo_pts):
        B3 = bohr_set(gamma, pair.delta3)
        witness = discrete_ivt(G, counts / n1, B3, int(lo_pts[0]), int(hi_pts[0]), 0.5, 0.25)
        l1, l2 = _local_norms(G, mask, counts, n1, witness.x2, B3)
        return PhysicalEstimate(
            CASE_BOUNDARY, delta, pair, M, d, x=witness.x2, delta2=pair.delta3, split=split,
            l2_sq=l2, l1=l1, lower_bound=Fraction(1, 64), C_cmp=cfg.C_cmp, ivt=witness)

    if len(lo_pts):
        tag, work_mask, work_counts = CASE_SPARSE, mask, counts
    else:
        tag, work_mask, work_counts = CASE_DENSE, ~mask, n1 - counts
    alpha_prime = Fraction(int(work_counts[coset].sum()), n1 * len(coset))

    # delta'': oscillation of the smoothed indicator over B(Gamma, delta'') at most alpha'
    osc = _oscillation_numerators(G, work_counts)
    bad = osc * alpha_prime.denominator > alpha_prime.numerator * n1
    bound = pair.delta1
    if np.any(bad):
        first_bad = int(radius_numerators(gamma)[bad].min())
        bound = min(bound, Fraction(first_bad, G.order))
    delta2 = regular_delta(gamma, bound, cfg.regularity)
    B2 = bohr_set(gamma, delta2)
    n2 = len(B2)
    counts2 = count_convolve(G, work_mask, B2.array)

    best = None
    for x in coset.tolist():
        c1, c2 = int(work_counts[x]), int(counts2[x])
        in_L = Fraction(c2, n2) >= alpha_prime / 2
        if not in_L or 4 * c2 * n1 < c1 * n2:
            continue
        l1, l2 = _local_norms(G, mask, counts, n1, x, B2)
        if l1 == 0:
            continue
        if best is None or l2 / l1 > best[1] / best[2]:
            best = (x, l2, l1)
    if best is None:
        raise WitnessNotFound("no centre with chi_A * beta'' >= chi_A * beta' / 4 in L")
    x, l2, l1 = best
    return PhysicalEstimate(
        tag, delta, pair, M, d, x=x, delta2=delta2, split=split, alpha_prime=alpha_prime,
        l2_sq=l2, l1=l1, lower_bound=cfg.c_lw * alpha_prime, C_cmp=cfg.C_cmp)
