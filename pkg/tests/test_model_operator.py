import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from maggaps.errors import CutoffExceeded, DomainError, ResolutionError
from maggaps.model_operator import (ModelSpectrum, OscillatorWell, build_wells, central_weights, counting_function,
                                    counting_function_array, discretize_model, enumerate_spectrum, model_levels)
from maggaps.potential import MorsePotential, find_zeros

PI = math.pi


def well(G, Q, loc=None):
    return OscillatorWell.from_matrices(G, Q, loc)


class TestFrequencies:
    def test_one_d(self):
        assert well([[1]], [[PI ** 2]]).frequencies == pytest.approx([PI])

    def test_isotropic(self):
        assert well(np.eye(2), np.diag([PI ** 2] * 2)).frequencies == pytest.approx([PI, PI])

    def test_metric(self):
        assert well([[4]], [[1]]).frequencies == pytest.approx([2.0])

    def test_from_potential(self):
        ws = build_wells(find_zeros(MorsePotential.sin2(2)))
        assert len(ws) == 1 and ws[0].frequencies == pytest.approx([PI, PI])

    @pytest.mark.parametrize("G,Q", [([[1]], [[-1]]), ([[0]], [[1]]), ([[1, 2], [0, 1]], np.eye(2))])
    def test_rejects_bad_matrices(self, G, Q):
        with pytest.raises(DomainError):
            well(G, Q)

    def test_rotation_invariance(self, rng):
        G = np.array([[2.0, 0.3], [0.3, 1.0]])
        Q = np.array([[1.5, -0.4], [-0.4, 0.7]])
        w0 = well(G, Q).frequencies
        for _ in range(10):
            O, _ = np.linalg.qr(rng.normal(size=(2, 2)))
            w = well(O @ G @ O.T, O @ Q @ O.T).frequencies
            assert np.max(np.abs(w - w0)) < 1e-10

    def test_against_symmetrised_matrix(self, rng):
        # omega^2 = eig(G^1/2 Q G^1/2), computed through an independent square root
        A = rng.normal(size=(2, 2))
        G = A @ A.T + np.eye(2)
        B = rng.normal(size=(2, 2))
        Q = B @ B.T + 0.5 * np.eye(2)
        e, V = np.linalg.eigh(G)
        Gh = V @ np.diag(np.sqrt(e)) @ V.T
        ref = np.sqrt(np.linalg.eigvalsh(Gh @ Q @ Gh))
        assert well(G, Q).frequencies == pytest.approx(ref, rel=1e-12)


class TestEnumerate:
    def test_one_d(self):
        s = enumerate_spectrum([well([[1]], [[PI ** 2]])], 20)
        assert np.allclose(s.alphas, [PI, 3 * PI, 5 * PI], atol=1e-14)
        assert s.mults.tolist() == [1, 1, 1]

    def test_isotropic(self):
        s = enumerate_spectrum([well(np.eye(2), np.diag([PI ** 2] * 2))], 22)
        assert np.allclose(s.alphas, [2 * PI, 4 * PI, 6 * PI], atol=1e-13)
        assert s.mults.tolist() == [1, 2, 3]

    def test_two_wells(self):
        w = well([[1]], [[PI ** 2]])
        s = enumerate_spectrum([w, w], 11)
        assert np.allclose(s.alphas, [PI, 3 * PI]) and s.mults.tolist() == [2, 2]

    @given(n=st.integers(0, 12))
    def test_isotropic_multiplicity(self, n):
        omega = 1.3
        s = enumerate_spectrum([well(np.eye(2), np.diag([omega ** 2] * 2))], 2 * omega * (n + 1) + 0.1)
        assert s.mults.tolist() == list(range(1, n + 2))

    def test_anisotropic_brute_force(self):
        w = well(np.eye(2), np.diag([1.0, 2.25]))  # omega = (1, 1.5)
        R = 12.0
        ref = sorted(1.0 * (2 * a + 1) + 1.5 * (2 * b + 1) for a in range(10) for b in range(10))
        ref = [e for e in ref if e <= R]
        s = enumerate_spectrum([w], R)
        flat = np.repeat(s.alphas, s.mults)
        assert np.allclose(flat, ref)

    def test_ground_level_is_first(self):
        ws = [well([[1]], [[4.0]]), well([[1]], [[1.0]])]
        s = enumerate_spectrum(ws, 10)
        assert s.alphas[0] == pytest.approx(min(w.ground_level for w in ws))

    def test_empty(self):
        with pytest.raises(DomainError):
            enumerate_spectrum([well([[1]], [[PI ** 2]])], 1.0)

    def test_json_roundtrip(self):
        s = enumerate_spectrum([well(np.eye(2), np.diag([PI ** 2] * 2))], 22)
        data = json.loads(s.to_json())
        assert set(data) == {"levels", "cutoff"} and data["levels"][1] == {"alpha": 4 * PI, "mult": 2}
        t = ModelSpectrum.from_json(s.to_json())
        assert np.array_equal(t.alphas, s.alphas) and np.array_equal(t.mults, s.mults)


class TestCounting:
    spec = enumerate_spectrum([OscillatorWell.from_matrices([[1]], [[PI ** 2]])], 20)

    def test_values(self):
        assert counting_function(self.spec, 10) == 2
        assert counting_function(self.spec, 1.0) == 0
        assert counting_function(self.spec, 3 * PI) == 2

    def test_beyond_cutoff(self):
        with pytest.raises(CutoffExceeded):
            counting_function(self.spec, 25)

    @given(st.lists(st.floats(0, 20), min_size=1, max_size=30))
    def test_array_matches_scalar_and_monotone(self, lams):
        arr = counting_function_array(self.spec, lams)
        assert arr.tolist() == [counting_function(self.spec, l) for l in lams]
        order = np.argsort(lams)
        assert np.all(np.diff(arr[order]) >= 0)


class TestDiscretisation:
    w1 = OscillatorWell.from_matrices([[1]], [[PI ** 2]])

    def test_weights(self):
        assert central_weights(2, 2) == pytest.approx([1, -2, 1])
        assert central_weights(1, 2) == pytest.approx([-0.5, 0, 0.5])

    def test_one_d_levels(self):
        vals, _ = model_levels(self.w1, 1.0, 3, L=6, m=400)
        assert np.max(np.abs(vals - [PI, 3 * PI, 5 * PI])) < 1e-4

    @pytest.mark.parametrize("mu", [1.0, 0.1, 0.01])
    def test_mu_independence(self, mu):
        vals, _ = model_levels(self.w1, mu, 3, L=6 * math.sqrt(mu), m=400)
        ref, _ = model_levels(self.w1, 1.0, 3, L=6, m=400)
        assert np.max(np.abs(vals - ref)) < 1e-4

    def test_quadruple_q_doubles_levels(self):
        a, _ = model_levels(self.w1, 1.0, 3, L=6, m=400)
        b, _ = model_levels(OscillatorWell.from_matrices([[1]], [[4 * PI ** 2]]), 1.0, 3, L=6, m=400)
        assert np.max(np.abs(b - 2 * a)) < 2e-4

    def test_metric_well(self):
        vals, _ = model_levels(well([[4]], [[1]]), 1.0, 3, L=12, m=400)
        assert np.max(np.abs(vals - [2, 6, 10])) < 1e-4

    def test_two_d(self):
        w = well(np.eye(2), np.diag([PI ** 2] * 2))
        vals, _ = model_levels(w, 0.1, 6, L=4.5 * math.sqrt(0.1), m=60)
        assert np.max(np.abs(vals - np.array([2, 4, 4, 6, 6, 6]) * PI)) < 1e-3

    def test_mixed_metric_two_d(self):
        G = np.array([[1.0, 0.3], [0.3, 0.8]])
        Q = np.array([[2.0, 0.2], [0.2, 1.0]])
        w = well(G, Q)
        vals, _ = model_levels(w, 1.0, 3, L=7, m=70)
        ref = np.repeat(*(lambda s: (s.alphas, s.mults))(enumerate_spectrum([w], 12)))[:3]
        assert np.max(np.abs(vals - ref)) < 1e-3

    def test_ground_state_positive(self):
        _, vecs = model_levels(self.w1, 1.0, 1, L=6, m=300)
        v = vecs[:, 0] * np.sign(vecs[np.argmax(np.abs(vecs[:, 0])), 0])
        assert np.all(v > -1e-10)

    def test_box_too_small(self):
        with pytest.raises(ResolutionError):
            model_levels(self.w1, 1.0, 1, L=1.0, m=200)

    def test_hermitian(self):
        H = discretize_model(well(np.eye(2), np.diag([1.0, 2.0])), 0.5, m=20)
        assert abs(H - H.T).max() < 1e-14

    def test_bad_mu(self):
        with pytest.raises(DomainError):
            discretize_model(self.w1, 0.0)
