import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from maggaps.errors import DomainError
from maggaps.reference_models import (comtet_houston, harper_bloch_matrix, harper_gap_table, harper_spectrum)


def hofstadter_torus(p, q, coupling, N1, N2):
    """Real-space Harper operator on an N1 x N2 torus; dense eigenvalues."""
    N = N1 * N2
    H = np.zeros((N, N), complex)
    site = lambda x, y: (x % N1) * N2 + (y % N2)
    for x in range(N1):
        for y in range(N2):
            i = site(x, y)
            H[site(x + 1, y), i] += 1.0
            H[site(x, y + 1), i] += 0.5 * coupling * np.exp(2j * np.pi * p * x / q)
    H = H + H.conj().T
    return np.linalg.eigvalsh(H)


class TestComtetHouston:
    def test_theta_two(self):
        s = comtet_houston(2)
        assert s.eigenvalues == (2, 4)
        assert s.format() == "2, 4 | continuum ≥ 4.25"

    def test_empty(self):
        s = comtet_houston(Fraction(1, 2))
        assert s.eigenvalues == ()
        assert s.format() == "(none) | continuum ≥ 0.5"

    def test_exact_fraction(self):
        s = comtet_houston(Fraction(5, 2))
        assert s.eigenvalues == (Fraction(5, 2), Fraction(11, 2))
        assert s.continuum_threshold == Fraction(13, 2)

    def test_float(self):
        s = comtet_houston(1.25)
        assert s.eigenvalues == pytest.approx((1.25,))
        assert s.continuum_threshold == pytest.approx(0.25 + 1.25 ** 2)

    @pytest.mark.parametrize("theta", [0, -1, -0.5])
    def test_nonpositive(self, theta):
        with pytest.raises(DomainError):
            comtet_houston(theta)

    @given(st.fractions(min_value=Fraction(1, 50), max_value=50, max_denominator=50))
    def test_invariants(self, theta):
        s = comtet_houston(theta)
        ev = list(s.eigenvalues)
        # k ranges over 0 <= k < theta - 1/2
        assert len(ev) == max(0, math.ceil(theta - Fraction(1, 2)))
        assert all(b > a for a, b in zip(ev, ev[1:]))
        assert all(e < s.continuum_threshold for e in ev)
        assert all(ev[k + 1] - ev[k] == 2 * (theta - k - 1) for k in range(len(ev) - 1))


class TestHarper:
    def test_bloch_matrix_hermitian(self):
        M = harper_bloch_matrix(2, 5, 2.0, 0.3, 1.1)
        assert np.allclose(M, M.conj().T)

    def test_trivial_flux(self):
        r = harper_spectrum(0, 1, k_points=16)
        assert r.bands == [pytest.approx((-4.0, 4.0))] and r.gap_count == 0

    def test_one_third(self):
        r = harper_spectrum(1, 3)
        s = math.sqrt(3)
        expected = [(-1 - s, -2), (1 - s, s - 1), (2, 1 + s)]
        for (a, b), (ea, eb) in zip(r.bands, expected):
            assert a == pytest.approx(ea, abs=1e-9) and b == pytest.approx(eb, abs=1e-9)
        assert r.gap_count == 2

    def test_half_flux_touching(self):
        r = harper_spectrum(1, 2)
        assert r.bands[0][1] == pytest.approx(0, abs=1e-12) == r.bands[1][0]
        assert r.gap_count == 0

    def test_two_fifths(self):
        assert harper_spectrum(2, 5).gap_count == 4

    @pytest.mark.parametrize("p,q", [(1, 3), (2, 5), (1, 4)])
    def test_torus_oracle(self, p, q):
        K = 12
        E = hofstadter_torus(p, q, 2.0, q * K, K)
        groups = np.sort(E).reshape(q, -1)
        r = harper_spectrum(p, q, k_points=K)
        for (a, b), g in zip(r.bands, groups):
            assert abs(a - g[0]) < 1e-9 and abs(b - g[-1]) < 1e-9

    @pytest.mark.parametrize("p,q", [(1, 3), (2, 5), (3, 7), (1, 6)])
    def test_reflection(self, p, q):
        a = harper_spectrum(p, q, k_points=16)
        b = harper_spectrum(q - p, q, k_points=16)
        assert np.max(np.abs(np.array(a.bands) - np.array(b.bands))) < 1e-10

    @pytest.mark.parametrize("p,q", [(1, 3), (2, 5), (1, 4), (3, 8)])
    def test_chiral_symmetry(self, p, q):
        B = np.array(harper_spectrum(p, q, k_points=16).bands)
        assert np.max(np.abs(B + B[::-1, ::-1])) < 1e-10

    @given(st.integers(1, 12).flatmap(lambda q: st.tuples(st.integers(0, q), st.just(q))),
           st.floats(0.1, 4.0))
    def test_gershgorin(self, pq, coupling):
        p, q = pq
        if math.gcd(p, q) != 1:
            return
        B = np.array(harper_spectrum(p, q, coupling, k_points=8).bands)
        assert np.abs(B).max() <= 2 + coupling + 1e-12

    def test_not_reduced(self):
        with pytest.raises(DomainError):
            harper_spectrum(2, 4)
        with pytest.raises(DomainError):
            harper_spectrum(1, 0)

    def test_gap_table(self):
        rows = harper_gap_table(3, k_points=16)
        assert rows == [(0, 1, 0), (1, 2, 0), (1, 3, 2), (2, 3, 2)]
        with pytest.raises(DomainError):
            harper_gap_table(31)

    def test_jobs(self):
        assert harper_spectrum(2, 7, k_points=16, jobs=3).bands == harper_spectrum(2, 7, k_points=16).bands

    def test_csv(self):
        lines = harper_spectrum(1, 3, k_points=8).to_csv().splitlines()
        assert lines[0] == "flux_p,flux_q,band_index,lower,upper"
        assert len(lines) == 4 and lines[1].startswith("1,3,0,")
