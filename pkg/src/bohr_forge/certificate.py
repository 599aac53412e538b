"""Independent checking of iteration certificates.

The checker trusts nothing but the group, the set and the configuration.
Everything else (annihilator sets, annulus masses, regularity flags and the
evidence bound) is recomputed and compared with the recorded values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .bohr import approx_annihilator_dual, bohr_set, is_regular
from .config import IterationConfig
from .errors import InvalidCertificate
from .fourier import dft
from .groups import CharacterSet, parse_group_spec, set_from_json
from .iteration import ANNIHILATOR, SCHEMA, TAIL, annihilator_evidence, local_data, tail_evidence

TOL = 1e-9
REASONS = {
    "SmallM", "NormEvidence", "RoundCap", "ZeroL2Mass", "HypothesisFailed", "NoRegularRadius",
    "ComparabilityFailed", "MassBelowThreshold", "CoverageFailure",
}


@dataclass(frozen=True)
class CheckReport:
    valid: bool
    clause: Optional[str] = None      # first failing clause
    detail: str = ""
    a_norm: Optional[float] = None
    bound: Optional[float] = None

    @property
    def verdict(self) -> str:
        return "VALID" if self.valid else "INVALID"

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "clause": self.clause, "detail": self.detail,
                "a_norm": self.a_norm, "bound": self.bound}


class _Fail(Exception):
    def __init__(self, clause, detail=""):
        super().__init__(detail)
        self.clause = clause
        self.detail = detail


def _require(cond, clause, detail=""):
    if not cond:
        raise _Fail(clause, detail)


def _chars(G, data) -> CharacterSet:
    return CharacterSet(G, set_from_json(G, data))


def _check(cert: dict, A) -> tuple[float, float]:
    _require(cert.get("schema") == SCHEMA, "schema", f"expected {SCHEMA}")
    G = parse_group_spec(cert["group"])
    members = set_from_json(G, cert["A"])
    if A is not None:
        given = sorted(G.index(a) for a in A)
        _require(given == sorted(members), "set", "certificate is for a different set")
    cfg = IterationConfig.from_json(cert["config"])
    eps = float(cfg.eps)
    mask = np.zeros(G.order, dtype=bool)
    mask[list(members)] = True
    chi_hat = np.abs(dft(G, mask.astype(float)))
    norm = float(chi_hat.sum())

    rounds = cert["rounds"]
    final = cert["final"]
    reason = cert["termination"]["reason"]
    _require(reason in REASONS, "termination", f"unknown reason {reason!r}")
    _require(len(rounds) <= cfg.round_cap, "termination", "more rounds than the cap")
    if reason == "RoundCap":
        _require(len(rounds) == cfg.round_cap, "termination", "RoundCap before the cap")

    states = [(r["gamma"], r["delta"], r["L"]) for r in rounds]
    if final is not None:
        states.append((final["gamma"], final["delta"], final["L"]))
    _require(final is not None or not rounds, "final", "rounds recorded without a final state")

    Ls = []
    for k, (gamma_json, delta_text, L_json) in enumerate(states):
        gamma = _chars(G, gamma_json)
        delta = Fraction(delta_text)
        _require(0 < delta <= 1, "radius", f"state {k}: delta out of range")
        _require(is_regular(gamma, delta, cfg.regularity)[0], "regularity", f"state {k}: delta")
        L = approx_annihilator_dual(bohr_set(gamma, delta), eps)
        _require(L.indices == set_from_json(G, L_json), "annihilator", f"state {k}")
        Ls.append(L)
    for k, r in enumerate(rounds):
        gamma = _chars(G, r["gamma"])
        for key in ("delta1", "delta2"):
            _require(is_regular(gamma, Fraction(r[key]), cfg.regularity)[0],
                     "regularity", f"round {k}: {key}")
        nxt = _chars(G, states[k + 1][0])
        _require(gamma.issubset(nxt), "frequencies", f"round {k}: Gamma not nested")

    for k in range(len(Ls) - 1):
        _require(Ls[k].issubset(Ls[k + 1]), "nesting", f"L_{k} not inside L_{k + 1}")
    annuli = [Ls[k + 1].difference(Ls[k]) for k in range(len(Ls) - 1)]
    seen = np.zeros(G.order, dtype=bool)
    for k, ann in enumerate(annuli):
        _require(not np.any(seen[ann.array]), "disjointness", f"annulus {k}")
        seen[ann.array] = True

    total = 0.0
    for k, (r, ann) in enumerate(zip(rounds, annuli)):
        m = float(chi_hat[ann.array].sum())
        _require(abs(m - float(r["m"])) <= TOL, "mass", f"round {k}: recorded {r['m']}, recomputed {m}")
        _require(m >= float(cfg.c_mass) - TOL, "mass", f"round {k}: {m} below c_mass")
        total += m
    _require(total <= norm + TOL, "total mass", f"{total} exceeds a_norm {norm}")

    bound = float(cfg.c_mass * len(rounds))
    ev = cert["termination"].get("evidence")
    if reason == "NormEvidence":
        _require(ev is not None, "evidence", "NormEvidence without evidence data")
    if ev is not None:
        _require(reason == "NormEvidence", "evidence", "evidence attached to another reason")
        gamma = _chars(G, ev["gamma"])
        d1, d2 = Fraction(ev["delta1"]), Fraction(ev["delta2"])
        _require(final is not None and gamma.indices == set_from_json(G, final["gamma"]),
                 "evidence", "evidence frequencies differ from the final state")
        x = G.index(tuple(ev["x"]))
        data = local_data(G, mask, gamma, d1, d2, x)
        _require(data.l1 > 0, "evidence", "vanishing local L1 norm")
        if ev["branch"] == TAIL:
            L = CharacterSet.from_mask(G, np.abs(data.g_hat) >= eps * data.l1 - 1e-12)
            got = tail_evidence(data, L, cfg.eps)
        elif ev["branch"] == ANNIHILATOR:
            O = approx_annihilator_dual(bohr_set(gamma, d1), eps)
            got = annihilator_evidence(data, O, cfg.eps)
        else:
            raise _Fail("evidence", f"unknown branch {ev['branch']!r}")
        _require(abs(got.bound - float(ev["bound"])) <= TOL * max(1.0, got.bound), "evidence",
                 f"recorded {ev['bound']}, recomputed {got.bound}")
        bound = max(bound, got.bound)
    _require(abs(bound - float(cert["claimed_bound"])) <= TOL * max(1.0, bound), "claimed bound",
             f"recorded {cert['claimed_bound']}, recomputed {bound}")
    return norm, bound


def check_certificate(cert, A=None) -> CheckReport:
    """Recompute every clause; the report names the first one that fails."""
    if isinstance(cert, str):
        cert = json.loads(cert)
    try:
        norm, bound = _check(cert, A)
    except _Fail as exc:
        return CheckReport(False, exc.clause, exc.detail)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        return CheckReport(False, "format", f"{type(exc).__name__}: {exc}")
    return CheckReport(True, a_norm=norm, bound=bound)


def lower_bound_from_certificate(cert, A=None) -> float:
    report = check_certificate(cert, A)
    if not report.valid:
        raise InvalidCertificate(f"{report.clause}: {report.detail}")
    return report.bound


def dumps(cert: dict) -> str:
    """Canonical text form: sorted keys, fixed indentation."""
    return json.dumps(cert, sort_keys=True, indent=2) + "\n"
