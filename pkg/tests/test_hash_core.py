import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oamhash.hash_core import (
    HashParams, QuantumHash, bounds_report, example1_encode, example2_properties,
    fidelity, fidelity_profile, hash as qhash, inner_product, one_way_delta,
    overlap_magnitude, test_error_bounds as error_bounds, worst_case_x,
)

from conftest import explicit_fidelity


@st.composite
def params_and_inputs(draw, max_q=1024, max_s=8):
    q = draw(st.integers(2, max_q))
    s = draw(st.integers(1, min(max_s, q - 1)))
    B = draw(st.lists(st.integers(1, q - 1), min_size=s, max_size=s, unique=True))
    x1 = draw(st.integers(0, q - 1))
    x2 = draw(st.integers(0, q - 1))
    return HashParams(q, tuple(B)), x1, x2


class TestHashParams:
    def test_sorted_and_sized(self):
        p = HashParams(16, (9, 3, 5))
        assert p.B == (3, 5, 9)
        assert p.s == 3

    @pytest.mark.parametrize("q, B", [(8, (0, 1)), (8, (8,)), (8, (2, 2)), (1, (1,)), (8, ())])
    def test_rejects_invalid(self, q, B):
        with pytest.raises(ValueError):
            HashParams(q, B)

    def test_explicit_s_must_match(self):
        with pytest.raises(ValueError):
            HashParams(16, (1, 2), s=3)

    def test_json_round_trip(self):
        p = HashParams(512, (7, 136))
        assert p.to_json() == '{"q": 512, "s": 2, "B": [7, 136]}'
        assert HashParams.from_json(p.to_json()) == p


class TestHash:
    def test_quarter_turn(self):
        h = qhash(HashParams(4, (1,)), 1)
        assert h.phases == pytest.approx((math.pi / 2,), abs=1e-15)

    def test_zero_input(self):
        assert qhash(HashParams(512, (3, 77, 200)), 0).phases == (0.0, 0.0, 0.0)

    def test_q512_direct(self):
        B = (7, 136)
        h = qhash(HashParams(512, B), 18)
        expected = [(2 * math.pi * b * 18 / 512) % (2 * math.pi) for b in B]
        assert h.phases == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("x", [-1, 4, 100])
    def test_out_of_range_rejected(self, x):
        with pytest.raises(ValueError):
            qhash(HashParams(4, (1,)), x)

    def test_non_integer_rejected(self):
        with pytest.raises(TypeError):
            qhash(HashParams(4, (1,)), 1.0)

    def test_phases_reduced(self):
        h = QuantumHash((2 * math.pi + 0.5, -0.5))
        assert h.phases[0] == pytest.approx(0.5)
        assert 0 <= h.phases[1] < 2 * math.pi

    def test_json_17_digits(self):
        h = qhash(HashParams(8, (1, 3)), 1)
        text = h.to_json()
        assert text.startswith('{"phases": [')
        assert QuantumHash.from_json(text).phases == h.phases
        assert "0.78539816339744828" in text

    def test_isclose_is_circular(self):
        assert QuantumHash((0.0,)).isclose(QuantumHash((2 * math.pi - 1e-13,)))


class TestFidelity:
    def test_identical(self):
        assert fidelity(HashParams(512, (3, 99)), 17, 17) == 1.0

    def test_orthogonal(self):
        assert fidelity(HashParams(2, (1,)), 0, 1) == 0.0

    def test_eighth_turn(self):
        # oracle: explicit inner product of the two single-qubit states
        oracle = explicit_fidelity(8, (1,), 0, 1)
        assert oracle == pytest.approx(0.8535533905932737, abs=1e-15)
        assert fidelity(HashParams(8, (1,)), 0, 1) == pytest.approx(oracle, abs=1e-12)

    def test_overlap_magnitude(self):
        p = HashParams(8, (1,))
        assert overlap_magnitude(p, 3, 3) == 1.0
        assert overlap_magnitude(HashParams(2, (1,)), 0, 1) == 0.0
        assert overlap_magnitude(p, 0, 1) == pytest.approx(math.cos(math.pi / 8), abs=1e-12)
        assert overlap_magnitude(p, 0, 1) == pytest.approx(0.92388, abs=1e-5)

    def test_inner_product_matches(self):
        p = HashParams(64, (5, 11, 40))
        assert abs(inner_product(p, 3, 50)) ** 2 == pytest.approx(fidelity(p, 3, 50), abs=1e-12)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            fidelity(HashParams(8, (1,)), 0, 8)

    @settings(max_examples=300, deadline=None)
    @given(params_and_inputs())
    def test_product_formula_matches_explicit(self, pxx):
        p, x1, x2 = pxx
        assert fidelity(p, x1, x2) == pytest.approx(explicit_fidelity(p.q, p.B, x1, x2), abs=1e-12)

    @settings(max_examples=300, deadline=None)
    @given(params_and_inputs())
    def test_shift_invariance_exact(self, pxx):
        p, x1, x2 = pxx
        assert fidelity(p, x1, x2) == fidelity(p, 0, (x2 - x1) % p.q)

    @settings(max_examples=300, deadline=None)
    @given(params_and_inputs())
    def test_symmetry_exact(self, pxx):
        p, x1, x2 = pxx
        assert fidelity(p, x1, x2) == fidelity(p, x2, x1)

    @settings(max_examples=300, deadline=None)
    @given(params_and_inputs(max_q=256))
    def test_range_and_unit_condition(self, pxx):
        p, x1, x2 = pxx
        f = fidelity(p, x1, x2)
        assert 0.0 <= f <= 1.0
        trivial = all(((x2 - x1) * b) % p.q == 0 for b in p.B)
        assert (f == 1.0) == trivial


class TestWorstCase:
    def test_eighth_turn_tie_broken_down(self):
        # exhaustive scan x = 1..7
        scan = [explicit_fidelity(8, (1,), 0, x) for x in range(1, 8)]
        assert scan[0] == pytest.approx(scan[6])
        x, f = worst_case_x(HashParams(8, (1,)))
        assert x == 1
        assert f == pytest.approx(max(scan), abs=1e-12)

    def test_single_candidate(self):
        assert worst_case_x(HashParams(2, (1,))) == (1, 0.0)

    @pytest.mark.parametrize("seed", range(20))
    def test_agrees_with_full_scan(self, seed):
        rng = np.random.default_rng(seed)
        q = int(rng.integers(2, 4097))
        s = int(rng.integers(1, min(8, q - 1) + 1))
        B = tuple(int(b) for b in rng.choice(np.arange(1, q), s, replace=False))
        p = HashParams(q, B)
        scan = [math.prod((1 + math.cos(2 * math.pi * b * x / q)) / 2 for b in B) for x in range(1, q)]
        top = max(scan)
        first = 1 + next(i for i, v in enumerate(scan) if v >= top - 1e-12)
        x, f = worst_case_x(p)
        assert f == pytest.approx(top, abs=1e-12)
        assert fidelity_profile(p, [x])[0] >= top - 1e-12
        assert x == first

    def test_profile_symmetric(self):
        p = HashParams(512, (7, 136, 200))
        prof = fidelity_profile(p)
        assert np.array_equal(prof[1:], prof[1:][::-1])


class TestBounds:
    def test_one_way_reference_value(self):
        assert one_way_delta(5, 512) == 1 / 16

    def test_one_way_clamped(self):
        assert one_way_delta(9, 512) == 1.0
        assert one_way_delta(1, 2) == 1.0

    @pytest.mark.parametrize("eps, swap, rev", [(0.0, 0.5, 0.0), (1.0, 1.0, 1.0), (0.5, 0.625, 0.25)])
    def test_error_bounds(self, eps, swap, rev):
        assert error_bounds(eps) == (swap, rev)

    @pytest.mark.parametrize("eps", [-0.1, 1.1])
    def test_error_bounds_domain(self, eps):
        with pytest.raises(ValueError):
            error_bounds(eps)

    @pytest.mark.parametrize("B", [(1,), (7, 136), (3, 50, 101, 200)])
    def test_report_consistent(self, B):
        r = bounds_report(HashParams(512, B))
        assert abs(r.worst_fidelity - r.epsilon**2) < 1e-12
        assert r.swap_error == pytest.approx((1 + r.epsilon**2) / 2, abs=1e-15)
        assert r.reverse_error == pytest.approx(r.epsilon**2, abs=1e-15)
        assert r.delta == one_way_delta(len(B), 512)
        assert "fidelity" in r.assumption


class TestReferenceEncodings:
    def test_example1_zero(self):
        state, delta, eps = example1_encode(0, 1)
        assert np.allclose(state, [1, 0])
        assert eps == pytest.approx(0.0, abs=1e-15)
        assert delta == 1.0

    def test_example1_quarter(self):
        state, _, _ = example1_encode(4, 3)
        assert np.allclose(state, [0, 1], atol=1e-15)

    def test_example1_k8(self):
        _, delta, eps = example1_encode(3, 8)
        assert eps == pytest.approx(0.999925, abs=1e-6)
        assert delta == 2 / 256

    def test_example1_domain(self):
        with pytest.raises(ValueError):
            example1_encode(8, 3)

    @pytest.mark.parametrize("k", [1, 2, 8])
    def test_example2(self, k):
        delta, eps = example2_properties(k)
        assert (delta, eps) == (1.0, 0.0)
        assert delta * eps == 0
