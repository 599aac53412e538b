import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from bohr_forge.bohr import bohr_set, cutoff
from bohr_forge.errors import MismatchedGroupError, UnnormalizedMeasureError
from bohr_forge.fourier import (
    Measure,
    a_norm,
    convolve,
    convolve_measure,
    dft,
    from_pairs,
    idft,
    indicator,
    local_l2_squared,
    local_transform,
    oscillation_on_bohr_translates,
    spectral_truncation,
    to_pairs,
)
from bohr_forge.groups import CharacterSet, GroupSpec, all_subgroups

Z4 = GroupSpec.cyclic(4)


def rand_complex(rng, n):
    return rng.normal(size=n) + 1j * rng.normal(size=n)


class TestDft:
    def test_constant(self):
        G = GroupSpec.cyclic(8)
        S = dft(G, np.ones(8))
        assert S[0] == pytest.approx(1)
        assert np.allclose(S[1:], 0, atol=1e-12)

    @pytest.mark.parametrize("N", [3, 8, 13])
    def test_point_mass(self, N):
        G = GroupSpec.cyclic(N)
        assert np.allclose(dft(G, indicator(G, [0])), 1 / N, atol=1e-12)

    def test_z4_pair(self):
        S = np.abs(dft(Z4, indicator(Z4, [0, 1])))
        assert np.allclose(S, [0.5, math.sqrt(2) / 4, 0, math.sqrt(2) / 4], atol=1e-12)

    @pytest.mark.parametrize("factors", [(6,), (2, 3), (3, 4), (2, 2, 2)])
    def test_matches_loop_oracle(self, factors):
        G = GroupSpec(factors)
        f = rand_complex(np.random.default_rng(0), G.order)
        assert np.allclose(dft(G, f), oracles.dft(factors, list(f)), atol=1e-12)

    @pytest.mark.parametrize("factors", [(64,), (8, 8), (3, 5, 7), (2, 2, 16)])
    def test_fft_path_agrees(self, factors):
        G = GroupSpec(factors)
        f = rand_complex(np.random.default_rng(1), (5, G.order))
        assert np.allclose(dft(G, f, "direct"), dft(G, f, "fft"), atol=1e-10)
        S = dft(G, f[0])
        assert np.allclose(idft(G, S, "direct"), idft(G, S, "fft"), atol=1e-10)

    def test_bad_method_and_length(self):
        with pytest.raises(ValueError):
            dft(Z4, np.zeros(4), "magic")
        with pytest.raises(MismatchedGroupError):
            dft(Z4, np.zeros(5))

    @given(st.lists(st.integers(2, 8), min_size=1, max_size=3), st.integers(0, 2**31))
    @settings(max_examples=40, deadline=None)
    def test_parseval_and_inversion(self, factors, seed):
        G = GroupSpec(tuple(factors))
        f = rand_complex(np.random.default_rng(seed), G.order)
        S = dft(G, f)
        assert np.sum(np.abs(S) ** 2) == pytest.approx(np.mean(np.abs(f) ** 2), rel=1e-9)
        assert np.allclose(idft(G, S), f, atol=1e-10)
        assert np.max(np.abs(f)) <= np.sum(np.abs(S)) + 1e-10

    def test_conjugate_symmetry(self):
        G = GroupSpec((4, 6))
        f = np.random.default_rng(2).random(G.order)
        S = dft(G, f)
        for g in range(G.order):
            assert S[int(G.neg(g))] == pytest.approx(np.conj(S[g]), abs=1e-10)


class TestIdft:
    def test_zero(self):
        assert np.allclose(idft(Z4, np.zeros(4)), 0)

    def test_round_trip_pair(self):
        assert np.allclose(idft(Z4, dft(Z4, indicator(Z4, [0, 1]))), [1, 1, 0, 0], atol=1e-10)

    def test_constant(self):
        S = np.zeros(4, dtype=complex)
        S[0] = 2.5
        assert np.allclose(idft(Z4, S), 2.5)


class TestANorm:
    def test_z4_pair(self):
        assert a_norm(Z4, indicator(Z4, [0, 1])) == pytest.approx((1 + math.sqrt(2)) / 2, abs=1e-12)
        assert a_norm(Z4, indicator(Z4, [0, 1])) == pytest.approx(oracles.a_norm((4,), [1, 1, 0, 0]))

    def test_zero(self):
        assert a_norm(Z4, np.zeros(4)) == 0

    @pytest.mark.parametrize("factors", [(12,), (2, 6), (3, 3)])
    def test_cosets(self, factors):
        G = GroupSpec(factors)
        for H in all_subgroups(G):
            for x in range(G.order):
                coset = G.add(x, H.array)
                assert a_norm(G, indicator(G, coset)) == pytest.approx(1, abs=1e-10)

    @given(st.integers(0, 2**31))
    @settings(max_examples=30, deadline=None)
    def test_banach_algebra(self, seed):
        G = GroupSpec((3, 5))
        rng = np.random.default_rng(seed)
        f, g = (rng.random(G.order) < 0.5).astype(float), (rng.random(G.order) < 0.5).astype(float)
        assert a_norm(G, convolve(G, f, g)) <= a_norm(G, f) * a_norm(G, g) + 1e-9


class TestConvolution:
    def test_point_mass_identity(self):
        f = np.array([1.0, 2.0, 3.0, 4.0])
        assert np.allclose(convolve_measure(Z4, f, Measure.uniform(Z4, [0])), f)

    def test_subgroup_idempotent(self):
        G = GroupSpec.cyclic(12)
        H = [0, 3, 6, 9]
        chi = indicator(G, H)
        assert np.allclose(convolve_measure(G, chi, Measure.uniform(G, H)), chi)

    def test_z4_example(self):
        out = convolve_measure(Z4, indicator(Z4, [0, 1]), Measure.uniform(Z4, [0, 2]))
        assert np.allclose(out, [0.5, 0.5, 0.5, 0.5])

    @given(st.integers(0, 2**31))
    @settings(max_examples=30, deadline=None)
    def test_multiplicativity_and_paths(self, seed):
        G = GroupSpec((4, 6))
        rng = np.random.default_rng(seed)
        f, g = rand_complex(rng, G.order), rand_complex(rng, G.order)
        h = convolve(G, f, g)
        assert np.allclose(dft(G, h), dft(G, f) * dft(G, g), atol=1e-10)
        assert np.allclose(h, convolve(G, f, g, "fft"), atol=1e-10)
        # loop oracle
        x = int(rng.integers(G.order))
        ref = sum(f[y] * g[int(G.sub(x, y))] for y in range(G.order)) / G.order
        assert h[x] == pytest.approx(ref, abs=1e-10)

    def test_measure_validation(self):
        with pytest.raises(ValueError):
            Measure(Z4, np.array([-1.0, 1, 0, 1]))
        with pytest.raises(MismatchedGroupError):
            Measure(Z4, np.ones(5))
        assert Measure.uniform(Z4).is_normalized()


class TestLocal:
    def test_global_cutoff_is_dft(self):
        G = GroupSpec.cyclic(12)
        f = np.random.default_rng(3).random(12)
        assert np.allclose(local_transform(G, f, Measure.uniform(G)), dft(G, f), atol=1e-12)

    def test_constant_function(self):
        G = GroupSpec.cyclic(12)
        beta = cutoff(bohr_set(CharacterSet(G, (1,)), 0.26))
        S = local_transform(G, np.ones(12), beta, 5)
        assert S[0] == pytest.approx(1)

    def test_z12_direct_summation(self):
        G = GroupSpec.cyclic(12)
        B = bohr_set(CharacterSet(G, (1,)), Fraction(1, 6))
        assert B.indices == (0, 1, 2, 10, 11)
        beta = cutoff(B)
        f = indicator(G, [0, 1, 2])
        for t in (0, 4):
            S = local_transform(G, f, beta, t)
            for g in range(12):
                ref = sum(f[x] * oracles.char((12,), g, x).conjugate() * beta.weights[(x - t) % 12]
                          for x in range(12))
                assert S[g] == pytest.approx(ref, abs=1e-12)

    def test_unnormalized(self):
        with pytest.raises(UnnormalizedMeasureError):
            local_transform(Z4, np.ones(4), Measure(Z4, np.array([1.0, 1, 0, 0])))

    @given(st.integers(0, 2**31), st.integers(1, 5), st.sampled_from([0.05, 0.1, 0.2, 0.3]))
    @settings(max_examples=30, deadline=None)
    def test_plancherel_pairing(self, seed, g, delta):
        G = GroupSpec.cyclic(30)
        rng = np.random.default_rng(seed)
        f = rand_complex(rng, G.order)
        beta = cutoff(bohr_set(CharacterSet(G, (g,)), delta))
        t = int(rng.integers(G.order))
        pairing = np.sum(dft(G, f) * np.conj(local_transform(G, f, beta, t)))
        assert pairing == pytest.approx(local_l2_squared(G, f, beta, t), abs=1e-9)


class TestTruncation:
    def test_single_coefficient(self):
        G = GroupSpec.cyclic(8)
        gamma, tail = spectral_truncation(G, np.exp(2j * np.pi * 3 * np.arange(8) / 8), 0.5)
        assert len(gamma) <= 1 and tail <= 0.5 / 3

    def test_z4_pair(self):
        gamma, tail = spectral_truncation(Z4, indicator(Z4, [0, 1]), 0.3)
        assert gamma.indices == (0, 1, 3)
        assert tail <= 0.1

    def test_whole_norm_fits(self):
        G = GroupSpec.cyclic(16)
        f = 0.01 * indicator(G, [0])
        gamma, tail = spectral_truncation(G, f, 3 * a_norm(G, f) + 1e-3)
        assert len(gamma) == 0

    @given(st.integers(0, 2**31), st.floats(0.01, 1.0))
    @settings(max_examples=40, deadline=None)
    def test_tail_contract(self, seed, eta):
        G = GroupSpec((2, 9))
        f = (np.random.default_rng(seed).random(G.order) < 0.4).astype(float)
        gamma, tail = spectral_truncation(G, f, eta)
        mags = np.abs(dft(G, f))
        assert tail == float(mags[~gamma.mask].sum())
        assert tail <= eta / 3
        # minimality: dropping the smallest kept coefficient breaks the contract
        if len(gamma):
            smallest = min(mags[gamma.array])
            assert tail + smallest > eta / 3 - 1e-15

    def test_eta_range(self):
        with pytest.raises(ValueError):
            spectral_truncation(Z4, np.ones(4), 0)


class TestOscillation:
    def test_constant(self):
        assert oscillation_on_bohr_translates(Z4, np.ones(4), [0, 1, 3]) == 0

    def test_only_zero(self):
        assert oscillation_on_bohr_translates(Z4, np.arange(4.0), [0]) == 0

    def test_sawtooth(self):
        G = GroupSpec.cyclic(8)
        assert oscillation_on_bohr_translates(G, np.arange(8) / 8, [0, 1, 7]) == pytest.approx(7 / 8)


def test_pairs_roundtrip():
    v = np.array([1 + 2j, -0.5j, 3.0])
    assert np.allclose(from_pairs(to_pairs(v)), v)
