"""Discrete Fourier analysis on a finite Abelian group.

Functions on ``G`` are plain numpy arrays of length ``|G|`` in enumeration
order (leading batch axes are allowed where noted).  The transform carries
the ``1/|G|`` normalisation and inversion carries none:

    f_hat(gamma) = |G|^{-1} sum_x f(x) conj(gamma(x)),
    f(x)         = sum_gamma f_hat(gamma) gamma(x).

The direct path multiplies by the ``O(|G|^2)`` character table; the ``"fft"``
path runs ``numpy.fft.fftn`` over the cyclic factors.  ``"auto"`` picks the
direct path whenever the dense table is allowed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MismatchedGroupError, UnnormalizedMeasureError
from .groups import DENSE_TABLE_LIMIT, CharacterSet, GroupSpec

MASS_TOL = 1e-12


def _method(G: GroupSpec, method: str) -> str:
    if method == "auto":
        return "direct" if G.order <= DENSE_TABLE_LIMIT else "fft"
    if method not in ("direct", "fft"):
        raise ValueError(f"unknown transform method {method!r}")
    return method


def _check_len(G: GroupSpec, f: np.ndarray) -> None:
    if f.shape[-1] != G.order:
        raise MismatchedGroupError(f"function has length {f.shape[-1]}, {G} has order {G.order}")


def dft(G: GroupSpec, f, method: str = "auto") -> np.ndarray:
    """Fourier transform along the last axis."""
    f = np.asarray(f)
    _check_len(G, f)
    if _method(G, method) == "direct":
        # the character table is symmetric in (gamma, x)
        return (f @ G.character_table.conj()) / G.order
    shape = f.shape[:-1] + G.factors
    axes = tuple(range(-G.rank, 0))
    out = np.fft.fftn(f.reshape(shape), axes=axes) / G.order
    return out.reshape(f.shape)


def idft(G: GroupSpec, S, method: str = "auto") -> np.ndarray:
    """Inverse transform: ``f(x) = sum_gamma S(gamma) gamma(x)``."""
    S = np.asarray(S)
    _check_len(G, S)
    if _method(G, method) == "direct":
        return S @ G.character_table
    shape = S.shape[:-1] + G.factors
    axes = tuple(range(-G.rank, 0))
    out = np.fft.ifftn(S.reshape(shape), axes=axes) * G.order
    return out.reshape(S.shape)


def a_norm(G: GroupSpec, f, method: str = "auto"):
    """Wiener norm ``sum_gamma |f_hat(gamma)|`` (batched over leading axes)."""
    return np.abs(dft(G, f, method)).sum(axis=-1)


def indicator(G: GroupSpec, members) -> np.ndarray:
    f = np.zeros(G.order)
    f[np.asarray(list(members), dtype=np.int64)] = 1.0
    return f


def difference_table(G: GroupSpec, support=None) -> np.ndarray:
    """``table[x, k] = x - support[k]``; full ``|G| x |G|`` when support is None."""
    xs = np.arange(G.order)
    ys = xs if support is None else np.asarray(support, dtype=np.int64)
    return G.sub(xs[:, None], ys[None, :])


def convolve(G: GroupSpec, f, g, method: str = "auto") -> np.ndarray:
    """``(f * g)(x) = |G|^{-1} sum_y f(y) g(x - y)`` for functions."""
    f = np.asarray(f)
    g = np.asarray(g)
    _check_len(G, f)
    _check_len(G, g)
    if _method(G, method) == "direct":
        # (f*g)(x) = |G|^{-1} sum_y g(y) f(x - y)
        return f[difference_table(G)] @ g / G.order
    return idft(G, dft(G, f, "fft") * dft(G, g, "fft"), "fft")


@dataclass(frozen=True, eq=False)
class Measure:
    """Nonnegative weights on ``G``; ``f * mu (x) = sum_y f(x - y) mu(y)``."""

    group: GroupSpec
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.group.order,):
            raise MismatchedGroupError("measure weights do not match group order")
        if np.any(w < 0):
            raise ValueError("measure weights must be nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, G: GroupSpec, members=None) -> Measure:
        """Normalised counting measure on ``members`` (all of G by default)."""
        w = np.zeros(G.order)
        if members is None:
            w[:] = 1.0 / G.order
        else:
            idx = np.asarray(list(members), dtype=np.int64)
            w[idx] = 1.0 / len(idx)
        return cls(G, w)

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.weights)

    def is_normalized(self, tol: float = MASS_TOL) -> bool:
        return abs(self.mass - 1.0) <= tol


def _weights_of(beta) -> tuple[GroupSpec | None, np.ndarray]:
    if isinstance(beta, Measure):
        return beta.group, beta.weights
    return None, np.asarray(beta, dtype=float)


def convolve_measure(G: GroupSpec, f, beta) -> np.ndarray:
    """``(f * beta)(x) = sum_y f(x - y) beta(y)``, summed over the support of beta."""
    _, w = _weights_of(beta)
    f = np.asarray(f)
    _check_len(G, f)
    supp = np.flatnonzero(w)
    return f[difference_table(G, supp)] @ w[supp]


def count_convolve(G: GroupSpec, mask, support) -> np.ndarray:
    """``|A ∩ (x - S)|`` for every x, as exact integers.

    With ``S`` symmetric this is the numerator of ``chi_A * beta_S``.
    """
    mask = np.asarray(mask, dtype=bool)
    return mask[difference_table(G, support)].sum(axis=1)


def translate_weights(G: GroupSpec, beta, translate: int = 0) -> np.ndarray:
    """Weights of ``translate + beta``: ``x -> beta(x - translate)``."""
    _, w = _weights_of(beta)
    if translate == 0:
        return w
    return w[G.sub(np.arange(G.order), translate)]


def local_transform(G: GroupSpec, f, beta, translate: int = 0, method: str = "auto") -> np.ndarray:
    """Fourier transform of ``f d(translate + beta)``.

    Coefficient at gamma is ``sum_x f(x) conj(gamma(x)) beta(x - translate)``.
    """
    g, w = _weights_of(beta)
    if g is not None and g != G:
        raise MismatchedGroupError("measure lives on a different group")
    if abs(w.sum() - 1.0) > MASS_TOL:
        raise UnnormalizedMeasureError(f"cutoff has mass {w.sum()!r}, expected 1")
    shifted = translate_weights(G, w, translate)
    return dft(G, np.asarray(f) * shifted, method) * G.order


def local_norm(G: GroupSpec, f, beta, translate: int = 0, p: float = 1) -> float:
    """``(integral |f|^p d(translate + beta))^{1/p}``."""
    w = translate_weights(G, beta, translate)
    return float((np.abs(f) ** p @ w) ** (1.0 / p))


def local_l2_squared(G: GroupSpec, f, beta, translate: int = 0) -> float:
    w = translate_weights(G, beta, translate)
    return float(np.abs(f) ** 2 @ w)


def spectral_truncation(G: GroupSpec, f, eta: float) -> tuple[CharacterSet, float]:
    """Smallest set of largest coefficients whose complement has l1 mass <= eta/3.

    Coefficients are taken in decreasing modulus, ties in enumeration order.
    The returned tail is the complement mass summed in enumeration order.
    """
    if not 0 < eta <= 1:
        raise ValueError("eta must lie in (0, 1]")
    mags = np.abs(dft(G, f))
    order = np.argsort(-mags, kind="stable")
    target = eta / 3
    # suffix[k] = mass outside the first k coefficients
    suffix = np.concatenate([np.cumsum(mags[order][::-1])[::-1], [0.0]])
    k = int(np.argmax(suffix <= target))
    while True:
        keep = np.zeros(G.order, dtype=bool)
        keep[order[:k]] = True
        tail = float(mags[~keep].sum())
        if tail <= target or k == G.order:
            break
        k += 1
    return CharacterSet.from_mask(G, keep, role="frequency"), tail


def oscillation_on_bohr_translates(G: GroupSpec, g, bohr) -> float:
    """``max |g(x) - g(y)|`` over pairs with ``x - y`` in the Bohr set."""
    steps = np.asarray(bohr.array if hasattr(bohr, "array") else bohr, dtype=np.int64)
    g = np.asarray(g)
    xs = np.arange(G.order)
    moved = g[G.add(xs[:, None], steps[None, :])]
    return float(np.max(np.abs(moved - g[:, None])))


def to_pairs(values) -> list[list[float]]:
    """JSON-ready ``[re, im]`` pairs in enumeration order."""
    values = np.asarray(values, dtype=complex)
    return [[float(z.real), float(z.imag)] for z in values]


def from_pairs(pairs) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs])
