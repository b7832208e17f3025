import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oamhash.photonics import OAMQubit
from oamhash.tomography import (
    DensityMatrix2, TomoSettings, entry_uncertainty, extract_phase, phase_step_resolution,
    probabilities, project_psd, reconstruct, simulate_tomo_counts, trace_distance,
)


def ideal_counts(state, s):
    return s.shots_per_setting * probabilities(state, s)


class TestDensityMatrix:
    def test_phase_layout(self):
        rho = DensityMatrix2.from_phase(math.pi / 3)
        assert rho[0, 0] == pytest.approx(0.5)
        assert rho[0, 1] == pytest.approx(0.5 * np.exp(1j * math.pi / 3))

    def test_validation(self):
        with pytest.raises(ValueError):
            DensityMatrix2(np.eye(2))
        with pytest.raises(ValueError):
            DensityMatrix2(np.array([[1.5, 0], [0, -0.5]]))
        with pytest.raises(ValueError):
            DensityMatrix2(np.array([[0.5, 1], [0, 0.5]]))

    def test_bloch_round_trip(self):
        r = np.array([0.3, -0.4, 0.5])
        assert np.allclose(DensityMatrix2.from_bloch(r).bloch(), r)

    def test_format(self):
        txt = DensityMatrix2.from_phase(0.0).format(np.full((2, 2), 0.01 + 0.01j))
        assert "±" in txt and txt.count("\n") == 1

    def test_json(self):
        d = DensityMatrix2.from_phase(0.0).to_dict()
        assert d["entries"][0][1] == pytest.approx([0.5, 0.0], abs=1e-15)


class TestCounts:
    def test_expected_probabilities(self):
        # |l>, |-l>, then phi_m = 0, 90, 180, 270 degrees
        phi = 2 * math.pi / 3
        p = probabilities(OAMQubit(2, phi), TomoSettings())
        expected = [0.5, 0.5] + [math.cos((phi - t) / 2) ** 2
                                 for t in (0, math.pi / 2, math.pi, 3 * math.pi / 2)]
        assert np.allclose(p, expected, atol=1e-12)

    def test_seeded(self):
        s = TomoSettings(shots_per_setting=1000, seed=5)
        assert np.array_equal(simulate_tomo_counts(OAMQubit(1, 1.0), s),
                              simulate_tomo_counts(OAMQubit(1, 1.0), s))


class TestReconstruction:
    def test_infinite_statistics(self):
        s = TomoSettings()
        phi = 2 * math.pi / 3
        rho = reconstruct(ideal_counts(OAMQubit(2, phi), s), s)
        expected = 0.5 * np.array([[1, np.exp(1j * phi)], [np.exp(-1j * phi), 1]])
        assert np.abs(rho.matrix - expected).max() < 1e-3

    def test_pure_basis_state(self):
        s = TomoSettings()
        state = DensityMatrix2(np.diag([0.0, 1.0]))  # |l> sits in the second slot
        rho = reconstruct(ideal_counts(state, s), s)
        assert np.allclose(rho.matrix, np.diag([0, 1]), atol=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0, math.pi), st.floats(0, 2 * math.pi), st.integers(0, 2**32 - 1))
    def test_round_trip_random_pure(self, theta, az, seed):
        r = [math.sin(theta) * math.cos(az), math.sin(theta) * math.sin(az), math.cos(theta)]
        truth = DensityMatrix2.from_bloch(r)
        s = TomoSettings(seed=seed)
        rho = reconstruct(simulate_tomo_counts(truth, s), s)
        assert trace_distance(rho, truth) <= 0.01

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 50))
    def test_output_physical(self, seed, shots):
        s = TomoSettings(shots_per_setting=shots, seed=seed)
        rho = reconstruct(simulate_tomo_counts(OAMQubit(1, 0.7), s), s).matrix
        assert np.allclose(rho, rho.conj().T)
        assert np.trace(rho).real == pytest.approx(1.0)
        assert np.linalg.eigvalsh(rho).min() >= -1e-12

    def test_psd_projection(self):
        m = project_psd(np.array([[1.2, 0], [0, -0.2]], dtype=complex))
        assert np.allclose(m, np.diag([1.0, 0.0]))

    @pytest.mark.parametrize("phi", [0.1, 1.0, 2.5, 4.0])
    @pytest.mark.parametrize("theta", [0.3, -1.2])
    def test_phase_equivariance(self, phi, theta):
        # shifting the prepared phase rotates the coherence by the same angle
        s = TomoSettings()
        a = reconstruct(ideal_counts(OAMQubit(1, phi), s), s)
        b = reconstruct(ideal_counts(OAMQubit(1, phi + theta), s), s)
        assert b[0, 1] == pytest.approx(a[0, 1] * np.exp(1j * theta), abs=1e-12)

    def test_incomplete_settings(self):
        full = TomoSettings()
        keep = [0, 1, 2, 4]  # z and x directions only
        s = TomoSettings(projectors=tuple(full.projectors[i] for i in keep))
        with pytest.raises(ValueError, match="not informationally complete"):
            reconstruct(np.zeros(4), s)

    def test_wrong_count_length(self):
        with pytest.raises(ValueError):
            reconstruct(np.zeros(5), TomoSettings())


class TestPhase:
    @pytest.mark.parametrize("deg", [0.0, 45.0, 120.0, 300.0])
    def test_extract_exact(self, deg):
        phi, _ = extract_phase(DensityMatrix2.from_phase(math.radians(deg)))
        assert (phi - deg + 180) % 360 - 180 == pytest.approx(0.0, abs=1e-9)

    def test_no_coherence(self):
        with pytest.raises(ValueError, match="no coherence"):
            extract_phase(DensityMatrix2(np.eye(2) / 2))

    def test_uncertainty_scales_as_inverse_sqrt(self):
        shots = np.array([1e3, 4e3, 1.6e4, 6.4e4]).astype(int)
        errs = []
        for n in shots:
            s = TomoSettings(shots_per_setting=int(n), seed=11)
            counts = simulate_tomo_counts(OAMQubit(2, 2.0), s)
            errs.append(np.abs(entry_uncertainty(counts, s, n_boot=400, seed=3)[0, 1]))
        slope = np.polyfit(np.log(shots), np.log(errs), 1)[0]
        assert slope == pytest.approx(-0.5, abs=0.1)

    def test_step_detected(self):
        delta, err, _ = phase_step_resolution(seed=2, n_boot=100)
        assert delta == pytest.approx(180 / 256, abs=max(0.3, 3 * err))
