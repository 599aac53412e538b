"""The Fourier-space iteration and its driver.

Each round takes a centre and radii from :func:`physical_estimate`, then
runs :func:`iteration_step` on ``f = chi_A - chi_A * beta'`` localised to
``x + B(Gamma, delta'')``.  A step either produces direct evidence that
``||chi_A||_A`` is large, or a new frequency set whose approximate
annihilator gains at least ``c_mass`` of Fourier mass.  Gains in different
rounds live on disjoint annuli ``L_{k+1} minus L_k``, so they add up.

Every bound recorded here is derived from quantities that the certificate
checker recomputes, and each is at most ``||chi_A||_A``:

* tail evidence: ``sum_{not in L} |f^||g^| <= eps ||f||_1 ||f||_A`` and
  ``||f||_A <= 2 ||chi_A||_A``;
* annihilator evidence: ``|f^(gamma)| <= eps |chi_A^(gamma)|`` on O.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .bohr import approx_annihilator_dual, bohr_set, cutoff, regular_delta
from .chang import ChangCover, local_chang_cover
from .config import IterationConfig
from .errors import (
    ComparabilityFailed,
    CoverageFailure,
    HypothesisFailed,
    MassBelowThreshold,
    NoRegularRadius,
    PreconditionViolated,
    ZeroL2Mass,
)
from .fourier import a_norm, convolve_measure, dft, local_l2_squared, local_norm, local_transform
from .groups import (
    CharacterSet,
    GroupSpec,
    as_fraction,
    format_fraction,
    fractional_obstruction,
    set_to_json,
    trivial_character_set,
)
from .structure import SMALL_M, PhysicalEstimate, _mask, physical_estimate

SCHEMA = "bohr-forge/cert/v1"
PLANCHEREL_TOL = 1e-9

TAIL = "TailDominates"
ANNIHILATOR = "AnnihilatorDominates"


# -- single step -------------------------------------------------------------


@dataclass(frozen=True)
class NormEvidence:
    branch: str
    mass: float        # the measured sum the bound is built from
    bound: float       # implied lower bound on ||chi_A||_A
    eps: Fraction


@dataclass(frozen=True)
class StepOutput:
    Lambda: CharacterSet
    gamma_next: CharacterSet
    delta_next: Fraction
    N: CharacterSet
    O: CharacterSet
    annulus_mass: float
    cover: ChangCover


@dataclass(frozen=True)
class LocalData:
    f: np.ndarray
    f_hat: np.ndarray
    g_hat: np.ndarray      # transform of f d(x + beta_local)
    l1: float
    l2_sq: float
    pairing: complex


def smoothed_difference(G: GroupSpec, mask, gamma: CharacterSet, delta) -> np.ndarray:
    """``chi_A - chi_A * beta`` for the uniform cutoff on ``B(Gamma, delta)``."""
    beta = cutoff(bohr_set(gamma, delta))
    chi = np.asarray(mask, dtype=float)
    return chi - convolve_measure(G, chi, beta)


def local_data(G: GroupSpec, mask, gamma, delta, delta1, x: int) -> LocalData:
    f = smoothed_difference(G, mask, gamma, delta)
    beta1 = cutoff(bohr_set(gamma, delta1))
    f_hat = dft(G, f)
    g_hat = local_transform(G, f, beta1, x)
    l1 = local_norm(G, f, beta1, x, 1)
    l2 = local_l2_squared(G, f, beta1, x)
    pairing = complex(np.sum(f_hat * np.conj(g_hat)))
    return LocalData(f, f_hat, g_hat, l1, l2, pairing)


def tail_evidence(data: LocalData, L: CharacterSet, eps) -> NormEvidence:
    outside = ~L.mask
    mass = float(np.sum(np.abs(data.f_hat[outside]) * np.abs(data.g_hat[outside])))
    return NormEvidence(TAIL, mass, mass / (2 * float(eps) * data.l1), as_fraction(eps))


def annihilator_evidence(data: LocalData, O: CharacterSet, eps) -> NormEvidence:
    mass = float(np.abs(data.f_hat[O.array]).sum())
    return NormEvidence(ANNIHILATOR, mass, mass / float(eps), as_fraction(eps))


def iteration_step(G: GroupSpec, A, gamma: CharacterSet, delta, delta1, x: int,
                   cfg: IterationConfig = IterationConfig()):
    """One step of the Fourier-space iteration.

    ``f = chi_A - chi_A * beta_delta`` with norms on ``x + B(Gamma, delta1)``.
    Returns :class:`NormEvidence` or :class:`StepOutput`.
    """
    mask = _mask(G, A)
    delta, delta1 = as_fraction(delta), as_fraction(delta1)
    eps = cfg.eps
    data = local_data(G, mask, gamma, delta, delta1, x)
    if data.l2_sq <= 0:
        raise ZeroL2Mass("f vanishes on the local Bohr set")
    ratio = data.l2_sq / data.l1
    if not 1 / float(cfg.C_cmp) <= ratio <= float(cfg.C_cmp):
        raise ComparabilityFailed(f"L2^2/L1 = {ratio:.6g} outside [1/{cfg.C_cmp}, {cfg.C_cmp}]")
    if abs(data.pairing - data.l2_sq) > PLANCHEREL_TOL:
        raise RuntimeError(f"Plancherel pairing {data.pairing} != {data.l2_sq}")

    L = CharacterSet.from_mask(G, np.abs(data.g_hat) >= float(eps) * data.l1 - 1e-12)
    tail_pairing = float(np.sum(data.f_hat[~L.mask] * np.conj(data.g_hat[~L.mask])).real)
    if tail_pairing >= data.l2_sq / 2:
        return tail_evidence(data, L, eps)

    B1 = bohr_set(gamma, delta1)
    cover = local_chang_cover(G, data.f, B1, eps, eps, cfg, x)
    gamma_next = gamma.union(cover.Lambda, "frequency")
    delta_next = regular_delta(gamma_next, min(cover.delta2, delta1), cfg.regularity)
    N = approx_annihilator_dual(bohr_set(gamma_next, delta_next), float(eps))
    O = approx_annihilator_dual(bohr_set(gamma, delta), float(eps))
    if not O.issubset(N):
        # cannot happen when B(gamma_next, delta_next) lies inside B(gamma, delta)
        raise RuntimeError("approximate annihilators are not nested")
    n_mass = float(np.abs(data.f_hat[N.array]).sum())
    evidence = annihilator_evidence(data, O, eps)
    if evidence.mass >= n_mass / 2:
        return evidence
    chi_hat = np.abs(dft(G, mask.astype(float)))
    annulus = N.difference(O)
    mass = float(chi_hat[annulus.array].sum())
    if mass < float(cfg.c_mass):
        raise MassBelowThreshold(f"annulus mass {mass:.6g} below c_mass = {cfg.c_mass}")
    return StepOutput(cover.Lambda, gamma_next, delta_next, N, O, mass, cover)


# -- driver ------------------------------------------------------------------


@dataclass
class Round:
    k: int
    gamma: CharacterSet
    delta: Fraction
    estimate: PhysicalEstimate
    L: CharacterSet
    step: StepOutput
    L_next: CharacterSet
    mass: float            # sum of |chi_A^| over L_next minus L


@dataclass
class IterationResult:
    group: GroupSpec
    A: tuple[int, ...]
    M: int
    cfg: IterationConfig
    alpha: Fraction
    obstruction: Fraction
    rounds: list[Round]
    gamma: CharacterSet
    delta: Optional[Fraction]
    L: Optional[CharacterSet]
    reason: str
    detail: str = ""
    evidence: Optional[NormEvidence] = None
    evidence_inputs: Optional[dict] = None
    final_estimate: Optional[PhysicalEstimate] = None
    warnings: list[str] = field(default_factory=list)

    @property
    def claimed_bound(self) -> float:
        bound = float(self.cfg.c_mass * len(self.rounds))
        if self.evidence is not None:
            bound = max(bound, self.evidence.bound)
        return bound

    def to_certificate(self) -> dict:
        return certificate_json(self)


def run_iteration(G: GroupSpec, A, M: int, cfg: IterationConfig = IterationConfig()) -> IterationResult:
    """Drive rounds until a termination condition; never raises on failure modes."""
    mask = _mask(G, A)
    size = int(mask.sum())
    if not 0 < size < G.order:
        raise PreconditionViolated("A must be a nonempty proper subset")
    alpha = Fraction(size, G.order)
    obstruction = fractional_obstruction(alpha, G, M)
    notes = []
    if obstruction < cfg.obstruction_threshold:
        msg = f"fractional obstruction {obstruction} below threshold {cfg.obstruction_threshold}"
        warnings.warn(msg, stacklevel=2)
        notes.append(msg)

    gamma = trivial_character_set(G)
    rounds: list[Round] = []
    result = dict(group=G, A=tuple(np.flatnonzero(mask).tolist()), M=M, cfg=cfg, alpha=alpha,
                  obstruction=obstruction, rounds=rounds, warnings=notes)
    try:
        delta = regular_delta(gamma, Fraction(1), cfg.regularity)
    except NoRegularRadius as exc:
        return IterationResult(gamma=gamma, delta=None, L=None, reason="NoRegularRadius",
                               detail=str(exc), **result)

    def stop(reason, detail="", **kw):
        L = approx_annihilator_dual(bohr_set(gamma, delta), float(cfg.eps))
        return IterationResult(gamma=gamma, delta=delta, L=L, reason=reason, detail=detail,
                               **kw, **result)

    for k in range(cfg.round_cap + 1):
        if k == cfg.round_cap:
            return stop("RoundCap", f"stopped after {k} rounds")
        try:
            est = physical_estimate(G, mask, gamma, delta, M, cfg)
        except (HypothesisFailed, NoRegularRadius) as exc:
            return stop(type(exc).__name__, str(exc))
        if est.tag == SMALL_M:
            return stop("SmallM", f"|V| = {len(est.V)} >= M = {M}", final_estimate=est)
        try:
            step = iteration_step(G, mask, gamma, est.delta1, est.delta2, est.x, cfg)
        except (ZeroL2Mass, ComparabilityFailed, MassBelowThreshold, CoverageFailure,
                NoRegularRadius) as exc:
            return stop(type(exc).__name__, str(exc), final_estimate=est)
        if isinstance(step, NormEvidence):
            inputs = {"gamma": gamma, "delta1": est.delta1, "delta2": est.delta2, "x": est.x}
            return stop("NormEvidence", step.branch, evidence=step, evidence_inputs=inputs,
                        final_estimate=est)
        L = approx_annihilator_dual(bohr_set(gamma, delta), float(cfg.eps))
        L_next = step.N
        chi_hat = np.abs(dft(G, mask.astype(float)))
        mass = float(chi_hat[L_next.difference(L).array].sum())
        rounds.append(Round(k, gamma, delta, est, L, step, L_next, mass))
        gamma, delta = step.gamma_next, step.delta_next
    raise AssertionError("unreachable")


# -- certificate serialisation -------------------------------------------------


def _q(v) -> Optional[str]:
    return None if v is None else format_fraction(as_fraction(v))


def certificate_json(res: IterationResult) -> dict:
    G = res.group
    rounds = []
    for r in res.rounds:
        est = r.estimate
        rounds.append({
            "k": r.k,
            "gamma": set_to_json(G, r.gamma.indices),
            "delta": _q(r.delta),
            "delta1": _q(est.delta1),
            "delta2": _q(est.delta2),
            "x": list(G.element(est.x)),
            "case": est.tag,
            "L": set_to_json(G, r.L.indices),
            "m": r.mass,
            "lambda": set_to_json(G, r.step.Lambda.indices),
            "step_annulus_mass": r.step.annulus_mass,
            "telemetry": {
                "d": len(r.gamma),
                "log_inv_delta": math.log(1 / float(r.delta)),
                "ratio": _q(est.ratio),
                "lwrbd_ok": est.lwrbd_ok,
                "setlike_ok": est.setlike_ok,
                "chang_fallback": r.step.cover.fallback,
                "chang_cardinality_ratio": r.step.cover.cardinality_ratio,
            },
        })
    evidence = None
    if res.evidence is not None:
        inp = res.evidence_inputs
        evidence = {
            "branch": res.evidence.branch,
            "gamma": set_to_json(G, inp["gamma"].indices),
            "delta1": _q(inp["delta1"]),
            "delta2": _q(inp["delta2"]),
            "x": list(G.element(inp["x"])),
            "mass": res.evidence.mass,
            "bound": res.evidence.bound,
        }
    final = None
    if res.delta is not None:
        final = {
            "gamma": set_to_json(G, res.gamma.indices),
            "delta": _q(res.delta),
            "L": set_to_json(G, res.L.indices),
        }
    return {
        "schema": SCHEMA,
        "group": str(G),
        "A": set_to_json(G, res.A),
        "M": res.M,
        "config": res.cfg.to_json(),
        "alpha": _q(res.alpha),
        "obstruction": _q(res.obstruction),
        "rounds": rounds,
        "final": final,
        "termination": {"reason": res.reason, "detail": res.detail, "evidence": evidence},
        "claimed_bound": res.claimed_bound,
        "warnings": list(res.warnings),
        "a_norm": float(a_norm(G, np.isin(np.arange(G.order), res.A).astype(float))),
    }
