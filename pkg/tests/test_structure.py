from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import ivt_instance
from bohr_forge.bohr import bohr_set, cutoff, is_regular
from bohr_forge.config import IterationConfig
from bohr_forge.errors import HypothesisFailed, PreconditionViolated
from bohr_forge.fourier import convolve_measure, indicator, local_l2_squared, local_norm
from bohr_forge.groups import (
    CharacterSet,
    GroupSpec,
    Subgroup,
    annihilator,
    frac_product,
    generated_subgroup,
    perp_of_character_set,
    trivial_character_set,
)
from bohr_forge.structure import (
    CASE_BOUNDARY,
    CASE_DENSE,
    CASE_SPARSE,
    SMALL_M,
    cohen_verdict,
    coset_structure,
    discrete_ivt,
    physical_estimate,
    split_coset,
)

Z8 = GroupSpec.cyclic(8)
Z12 = GroupSpec.cyclic(12)
Z16 = GroupSpec.cyclic(16)


class TestIvt:
    def test_constant(self):
        w = discrete_ivt(Z8, np.full(8, 0.3), bohr_set(CharacterSet(Z8, (1,)), Fraction(1, 8)), 2, 5, 0.3, 0.25)
        assert w.x2 == 2 and w.path == (2,)

    def test_z8_tent(self):
        g = np.abs(np.arange(8) - 4) / 4
        B = bohr_set(CharacterSet(Z8, (1,)), Fraction(1, 8))
        assert B.indices == (0, 1, 7)
        w = discrete_ivt(Z8, g, B, 4, 0, 0.5, 0.25)
        assert w.x2 in (2, 6) and w.value == 0.5
        assert w.bound == 0.125

    def test_endpoint_target(self):
        g = np.abs(np.arange(8) - 4) / 4
        B = bohr_set(CharacterSet(Z8, (1,)), Fraction(1, 8))
        assert discrete_ivt(Z8, g, B, 4, 0, 0.0, 0.25).x2 == 4

    def test_preconditions(self):
        g = np.abs(np.arange(8) - 4) / 4
        B = bohr_set(CharacterSet(Z8, (1,)), Fraction(1, 8))
        with pytest.raises(PreconditionViolated):
            discrete_ivt(Z8, g, B, 4, 0, 0.5, 0.1)      # oscillation 1/4 > eta
        with pytest.raises(PreconditionViolated):
            discrete_ivt(Z8, g, B, 4, 0, 1.5, 0.25)     # target outside
        B2 = bohr_set(CharacterSet(Z8, (4,)), Fraction(1, 100))  # <B2> = {0,2,4,6}
        with pytest.raises(PreconditionViolated):
            discrete_ivt(Z8, np.zeros(8), B2, 0, 1, 0.0, 0.25)

    @given(st.integers(0, 2**31), st.sampled_from([16, 30, 64, 100]))
    @settings(max_examples=60, deadline=None)
    def test_fuzz(self, seed, N):
        G, g, steps, x0, x1, c, eta = ivt_instance(np.random.default_rng(seed), N)
        w = discrete_ivt(G, g, steps, x0, x1, c, eta)
        assert abs(g[w.x2] - c) <= eta / 2 + 1e-12
        assert w.path[0] == x0 and w.path[-1] == w.x2
        for a, b in zip(w.path, w.path[1:]):
            assert int(G.sub(b, a)) in steps.indices


class TestCosetStructure:
    def test_subgroup(self):
        H = (0, 3, 6, 9)
        st_ = coset_structure(Z12, H)
        assert st_.defect == 0 and st_.structured
        assert st_.V == annihilator(Subgroup(Z12, H))
        assert st_.pattern == {0: 1, 1: 0, 2: 0}

    def test_z4_pair_direct_defect(self):
        G = GroupSpec.cyclic(4)
        st_ = coset_structure(G, [0, 1])
        perp = perp_of_character_set(st_.V)
        chi = indicator(G, [0, 1])
        avg = np.array([np.mean([chi[(x + h) % 4] for h in perp.indices]) for x in range(4)])
        assert st_.defect == pytest.approx(np.max(np.abs(chi - avg)))
        assert st_.structured == (st_.defect == 0)

    def test_precondition(self):
        with pytest.raises(PreconditionViolated):
            coset_structure(Z12, range(12))
        with pytest.raises(PreconditionViolated):
            coset_structure(Z12, [])

    @given(st.integers(0, 2**31))
    @settings(max_examples=30, deadline=None)
    def test_defect_zero_iff_union_of_cosets(self, seed):
        G = GroupSpec((2, 6))
        mask = np.random.default_rng(seed).random(G.order) < 0.5
        if not 0 < mask.sum() < G.order:
            return
        st_ = coset_structure(G, np.flatnonzero(mask))
        perp = perp_of_character_set(st_.V)
        union = all(mask[int(G.add(x, h))] == mask[x] for x in range(G.order) for h in perp.indices)
        assert (st_.defect == 0) == union


class TestCohen:
    def test_evens(self):
        v = cohen_verdict(Z12, range(0, 12, 2), 12)
        assert v.structure.structured and v.V_order == 2
        assert v.alpha_V == 1 and v.frac_product == 0
        assert not v.contradiction

    def test_empty(self):
        v = cohen_verdict(Z12, [], 12)
        assert v.degenerate and v.alpha == 0 and v.obstruction == 0

    @pytest.mark.slow
    def test_soundness_exhaustive_z12(self):
        for code in range(1, (1 << 12) - 1):
            A = [i for i in range(12) if code >> i & 1]
            for M in (4, 6, 12):
                v = cohen_verdict(Z12, A, M)
                assert not v.contradiction
                if v.structure.structured and v.V_order <= M:
                    assert v.frac_product == 0


class TestSplitCoset:
    def test_z6(self):
        G = GroupSpec.cyclic(6)
        V = annihilator(Subgroup(G, (0, 3)))
        assert len(V) == 3
        f = np.array([Fraction(1)] * 3 + [Fraction(0)] * 3, dtype=object)
        s = split_coset(G, f, V, Fraction(1, 64))
        assert s.x == 0
        assert s.inside == Fraction(1, 2) and s.outside == Fraction(1, 2)
        assert s.product == Fraction(1, 4) and s.bound == Fraction(1, 12)

    def test_constant_half(self):
        G = GroupSpec.cyclic(6)
        V = annihilator(Subgroup(G, (0, 3)))
        s = split_coset(G, np.full(6, 0.5), V, Fraction(1, 64))
        assert s.inside == pytest.approx(0.5) and s.outside == pytest.approx(0.5)

    def test_subgroup_hypothesis_fails(self):
        H = (0, 4, 8)
        V = annihilator(Subgroup(Z12, H))
        with pytest.raises(HypothesisFailed):
            split_coset(Z12, indicator(Z12, H), V, Fraction(1, 64))

    def test_range_check(self):
        V = CharacterSet(Z12, (0,))
        with pytest.raises(PreconditionViolated):
            split_coset(Z12, np.full(12, 1.5), V, Fraction(1, 64))

    @given(st.integers(0, 2**31))
    @settings(max_examples=60, deadline=None)
    def test_exact_inequalities(self, seed):
        rng = np.random.default_rng(seed)
        G = GroupSpec((2, 12))
        V = annihilator(generated_subgroup(G, [int(rng.integers(G.order))]))
        den = int(rng.integers(1, 9))
        f = np.array([Fraction(int(rng.integers(0, den + 1)), den) for _ in range(G.order)], dtype=object)
        P = frac_product(sum(f, Fraction(0)) / G.order * len(V))
        if P < Fraction(1, 64):
            with pytest.raises(HypothesisFailed):
                split_coset(G, f, V, Fraction(1, 64))
            return
        s = split_coset(G, f, V, Fraction(1, 64))
        perp = perp_of_character_set(V)
        inside = sum((f[int(G.add(s.x, h))] for h in perp.indices), Fraction(0)) / perp.order
        mass = Fraction(perp.order, G.order)
        assert mass == Fraction(1, len(V))
        assert inside >= P * mass and 1 - inside >= P * mass
        assert s.inside == inside


def _recompute_norms(G, A, gamma, est):
    """L1 and squared L2 of chi_A - chi_A * beta' on x'' + B(Gamma, delta''), float path."""
    chi = indicator(G, A)
    h = chi - convolve_measure(G, chi, cutoff(bohr_set(gamma, est.delta1)))
    beta2 = cutoff(bohr_set(gamma, est.delta2))
    return local_norm(G, h, beta2, est.x, 1), local_l2_squared(G, h, beta2, est.x)


class TestPhysicalEstimate:
    def test_small_m(self):
        est = physical_estimate(Z16, range(5), CharacterSet(Z16, (4,)), Fraction(1, 8), 4)
        assert est.tag == SMALL_M and len(est.V) >= 4
        data = est.to_json()
        assert data["log_M"] <= data["small_m_constant"] * data["scale"] + 1e-12

    def test_z16_fixture(self):
        gamma = trivial_character_set(Z16)
        est = physical_estimate(Z16, range(5), gamma, Fraction(1, 2), 8)
        assert est.tag in (CASE_BOUNDARY, CASE_SPARSE, CASE_DENSE)
        assert is_regular(gamma, est.delta1)[0] and is_regular(gamma, est.delta2)[0]
        l1, l2 = _recompute_norms(Z16, range(5), gamma, est)
        assert l1 == pytest.approx(float(est.l1)) and l2 == pytest.approx(float(est.l2_sq))
        assert 1 / 16 <= l2 / l1 <= 16
        assert est.setlike_ok and est.lwrbd_ok
        assert l2 >= float(est.lower_bound)

    @pytest.mark.parametrize("A, tag", [([0, 1], CASE_SPARSE), ([0, 1, 2, 3, 4, 5], CASE_DENSE),
                                        ([0, 1, 2, 3], CASE_BOUNDARY)])
    def test_constant_smoothing_fixtures(self, A, tag):
        # trivial Gamma: chi_A * beta' is the constant |A|/8 on the single coset
        est = physical_estimate(Z8, A, trivial_character_set(Z8), Fraction(1, 2), 8)
        assert est.tag == tag
        assert est.setlike_ok and est.lwrbd_ok

    def test_hypothesis_failed(self):
        with pytest.raises(HypothesisFailed):
            physical_estimate(Z12, [0, 1, 2, 3, 4, 5], CharacterSet(Z12, (6,)), Fraction(1, 2), 12)

    def test_json_exact(self):
        est = physical_estimate(Z16, range(5), trivial_character_set(Z16), Fraction(1, 2), 8)
        data = est.to_json()
        assert data["case"] == est.tag
        for key in ("delta", "delta1", "delta2", "delta3", "ratio", "l1", "l2_sq"):
            assert "/" in data[key]

    @given(st.integers(0, 2**31), st.sampled_from([24, 32, 45, 60]))
    @settings(max_examples=40, deadline=None)
    def test_recorded_norms_recompute(self, seed, N):
        rng = np.random.default_rng(seed)
        G = GroupSpec.cyclic(N)
        A = np.flatnonzero(rng.random(N) < rng.uniform(0.1, 0.9))
        if not 0 < len(A) < N:
            return
        gamma = CharacterSet(G, (int(rng.integers(1, N)),))
        try:
            est = physical_estimate(G, A, gamma, Fraction(int(rng.integers(10, 50)), 100), N, IterationConfig())
        except HypothesisFailed:
            return
        if est.tag == SMALL_M:
            return
        l1, l2 = _recompute_norms(G, A, gamma, est)
        assert l1 == pytest.approx(float(est.l1), abs=1e-12)
        assert l2 == pytest.approx(float(est.l2_sq), abs=1e-12)
        assert est.lwrbd_ok
        assert est.delta2 <= est.delta1 <= Fraction(1)
        assert all(is_regular(gamma, r)[0] for r in (est.delta1, est.delta2))
