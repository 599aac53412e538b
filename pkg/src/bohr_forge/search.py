"""Exhaustive oracles and scan experiments over families of subsets."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional

import numpy as np

from .certificate import check_certificate
from .config import IterationConfig
from .errors import GroupTooLarge
from .fourier import a_norm, dft
from .groups import GroupSpec, fractional_obstruction, set_to_hex
from .iteration import run_iteration

BRUTE_FORCE_LIMIT = 20
CHUNK = 1 << 12
TIE_TOL = 1e-12


@dataclass(frozen=True)
class SearchResult:
    indices: tuple[int, ...]
    value: float
    bitmask: int
    candidates: int         # subsets that passed the filter


def _masks(G: GroupSpec, lo: int, hi: int) -> np.ndarray:
    codes = np.arange(lo, hi, dtype=np.int64)
    return ((codes[:, None] >> np.arange(G.order)) & 1).astype(bool)


def brute_force_min_anorm(G: GroupSpec, size_filter: Optional[Callable[[int], bool]] = None,
                          predicate: Optional[Callable[[np.ndarray], bool]] = None) -> SearchResult:
    """Minimise ``||chi_A||_A`` over all subsets passing the filters.

    ``size_filter`` sees ``|A|`` and is applied vectorised; ``predicate`` sees
    the boolean mask.  Ties within 1e-12 go to the smallest bitmask (bit i is
    element i).
    """
    if G.order > BRUTE_FORCE_LIMIT:
        raise GroupTooLarge(f"|G| = {G.order} exceeds the exhaustive limit {BRUTE_FORCE_LIMIT}")
    size_ok = np.array([size_filter(k) if size_filter else True for k in range(G.order + 1)])
    best_code, best_val, count = None, np.inf, 0
    total = 1 << G.order
    for lo in range(0, total, CHUNK):
        hi = min(total, lo + CHUNK)
        masks = _masks(G, lo, hi)
        keep = size_ok[masks.sum(axis=1)]
        if predicate is not None:
            keep &= np.array([bool(predicate(m)) for m in masks])
        if not keep.any():
            continue
        codes = np.arange(lo, hi)[keep]
        vals = np.abs(dft(G, masks[keep].astype(float))).sum(axis=1)
        count += len(codes)
        j = int(np.argmin(vals))
        # codes increase within a chunk, so argmin already prefers the smaller mask
        if vals[j] < best_val - TIE_TOL:
            best_code, best_val = int(codes[j]), float(vals[j])
    if best_code is None:
        # minimum over an empty family
        return SearchResult((), float("inf"), -1, 0)
    idx = tuple(i for i in range(G.order) if best_code >> i & 1)
    return SearchResult(idx, best_val, best_code, count)


def nonempty_proper(G: GroupSpec) -> Callable[[int], bool]:
    return lambda k: 0 < k < G.order


def obstruction_at_least(G: GroupSpec, threshold, M: int) -> Callable[[int], bool]:
    """Nonempty proper sizes whose fractional obstruction is at least threshold."""
    threshold = Fraction(threshold)
    return lambda k: 0 < k < G.order and fractional_obstruction(Fraction(k, G.order), G, M) >= threshold


# -- scans -------------------------------------------------------------------


@dataclass(frozen=True)
class ScanRow:
    set_id: str
    size: int
    density: Fraction
    obstruction: Fraction
    a_norm: float
    bound: float
    reason: str

    def as_list(self) -> list:
        return [self.set_id, self.size, f"{self.density.numerator}/{self.density.denominator}",
                f"{self.obstruction.numerator}/{self.obstruction.denominator}",
                self.a_norm, self.bound, self.reason]


SCAN_HEADER = ["set_id", "size", "density", "obstruction", "a_norm", "bound", "reason"]


def family(G: GroupSpec, descriptor: str) -> Iterator[tuple[int, ...]]:
    """Subsets named by ``all-subsets``, ``random:k:count:seed``,
    ``intervals:lo:hi`` (lengths lo..hi starting at 0) or ``none``."""
    kind, *args = descriptor.split(":")
    if kind == "none":
        return
    if kind == "all-subsets":
        if args:
            raise ValueError("all-subsets takes no arguments")
        if G.order > BRUTE_FORCE_LIMIT:
            raise GroupTooLarge(f"all-subsets needs |G| <= {BRUTE_FORCE_LIMIT}")
        for code in range(1 << G.order):
            yield tuple(i for i in range(G.order) if code >> i & 1)
    elif kind == "random":
        k, count, seed = (int(a) for a in args)
        if not 0 <= k <= G.order:
            raise ValueError(f"random subset size {k} out of range")
        rng = np.random.default_rng(seed)
        for _ in range(count):
            yield tuple(sorted(rng.choice(G.order, size=k, replace=False).tolist()))
    elif kind == "intervals":
        lo, hi = (int(a) for a in args)
        if not 0 <= lo <= hi <= G.order:
            raise ValueError(f"interval lengths {lo}..{hi} out of range")
        for length in range(lo, hi + 1):
            yield tuple(range(length))
    else:
        raise ValueError(f"unknown family {kind!r}")


def scan_row(G: GroupSpec, members: tuple[int, ...], M: int, cfg: IterationConfig) -> ScanRow:
    mask = np.zeros(G.order, dtype=bool)
    mask[list(members)] = True
    size = int(mask.sum())
    density = Fraction(size, G.order)
    obstruction = fractional_obstruction(density, G, M)
    norm = float(a_norm(G, mask.astype(float)))
    if 0 < size < G.order:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            cert = run_iteration(G, mask, M, cfg).to_certificate()
        report = check_certificate(cert)
        bound = report.bound if report.valid else float("nan")
        reason = cert["termination"]["reason"] if report.valid else "INVALID"
    else:
        bound, reason = 0.0, "Degenerate"
    return ScanRow(set_to_hex(members), size, density, obstruction, norm, bound, reason)


def scan(G: GroupSpec, descriptor: str, M: int, cfg: IterationConfig = IterationConfig(),
         certify: bool = True) -> list[ScanRow]:
    rows = []
    for members in family(G, descriptor):
        if certify:
            rows.append(scan_row(G, members, M, cfg))
        else:
            mask = np.zeros(G.order, dtype=bool)
            mask[list(members)] = True
            density = Fraction(int(mask.sum()), G.order)
            rows.append(ScanRow(set_to_hex(members), int(mask.sum()), density,
                                fractional_obstruction(density, G, M),
                                float(a_norm(G, mask.astype(float))), 0.0, "Skipped"))
    return rows
