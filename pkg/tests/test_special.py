import numpy as np
import pytest
from scipy import integrate
from scipy import special as sps

from mtfse.special import (
    bessel_j,
    bessel_j_seq,
    laguerre,
    laguerre_table,
    pochhammer_seq,
    terminating_2f1,
)


class TestLaguerre:
    def test_degree_zero_is_one(self):
        for x in (0.0, 1.5, 100.0):
            assert laguerre(0, 0.0, x) == 1.0

    def test_degree_one_seed(self):
        assert laguerre(1, 0.0, 2.0) == -1.0

    def test_hand_expanded_degree_two(self):
        # L_2(x) = 1 - 2x + x^2/2
        assert laguerre(2, 0.0, 1.0) == pytest.approx(-0.5, abs=1e-15)

    def test_recurrence_consistency(self):
        # (k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}, relative 1e-12
        xs = np.linspace(0.0, 100.0, 23)
        for n in (5, 50, 199):
            lhs = (n + 1) * laguerre(n + 1, 0.0, xs)
            rhs = (2 * n + 1 - xs) * laguerre(n, 0.0, xs) - n * laguerre(n - 1, 0.0, xs)
            scale = np.maximum(np.abs(lhs), 1.0)
            assert np.max(np.abs(lhs - rhs) / scale) < 1e-12

    def test_against_scipy(self):
        xs = np.linspace(0.0, 60.0, 17)
        for n, alpha in [(3, 0.0), (12, 0.6), (25, 1.4), (40, 1.0)]:
            ours = laguerre(n, alpha, xs)
            ref = sps.eval_genlaguerre(n, alpha, xs)
            assert np.allclose(ours, ref, rtol=1e-11, atol=1e-11)

    def test_table_matches_single(self):
        xs = np.linspace(0.0, 30.0, 9)
        tab = laguerre_table(20, 0.6, xs)
        for n in (0, 7, 20):
            assert np.allclose(tab[n], laguerre(n, 0.6, xs), rtol=1e-13)

    def test_rejects_negative_degree(self):
        with pytest.raises(ValueError):
            laguerre(-1, 0.0, 1.0)

    @pytest.mark.parametrize("alpha", [0.0, 0.6, 1.0, 1.4])
    def test_orthogonality(self, alpha):
        # int L_n L_m w_alpha = Gamma(n+alpha+1)/n! delta_nm on [0, 200];
        # composite rule graded toward 0 to absorb the x^alpha kink
        from mtfse.fraclap import laguerre_weight_rule

        xq, wq = laguerre_weight_rule(200.0)
        w_alpha = xq**alpha * np.exp(-xq)
        tab = laguerre_table(20, alpha, xq)
        gram = (tab * (wq * w_alpha)) @ tab.T
        for n in range(21):
            gamma_n = sps.gamma(n + alpha + 1) / sps.gamma(n + 1.0)
            assert abs(gram[n, n] - gamma_n) / gamma_n < 1e-9
        off = gram - np.diag(np.diag(gram))
        assert np.max(np.abs(off)) < 1e-9 * np.max(np.diag(gram))


class TestPochhammer:
    def test_terminates_for_negative_integers(self):
        seq = pochhammer_seq(-1.0, 3)
        assert seq[2] == 0.0 and seq[3] == 0.0

    def test_integer_product(self):
        assert pochhammer_seq(2.0, 3)[3] == 24.0

    def test_hand_product(self):
        assert pochhammer_seq(-0.6, 2)[2] == pytest.approx(-0.24, abs=1e-15)

    def test_gamma_agreement_where_positive(self):
        for z in (0.3, 1.7, 2.4):
            seq = pochhammer_seq(z, 12)
            for n in range(13):
                ref = sps.gamma(z + n) / sps.gamma(z)
                assert seq[n] == pytest.approx(ref, rel=1e-12)

    def test_rejects_negative_length(self):
        with pytest.raises(ValueError):
            pochhammer_seq(1.0, -1)


class TestBesselJ:
    def test_values_at_zero(self):
        assert bessel_j(0, 0.0) == 1.0
        for k in (1, 5, 18):
            assert bessel_j(k, 0.0) == 0.0

    def test_against_independent_oracle(self):
        # scipy's implementation is an independent route to the same values
        for k in range(0, 30):
            for x in (0.3, 1.0, 2.0, 2.212, 3.0):
                assert bessel_j(k, x) == pytest.approx(sps.jv(k, x), abs=1e-14)

    def test_normalization_identity(self):
        # J_0^2 + 2 sum_{k>=1} J_k^2 = 1
        x = 2.0
        js = bessel_j_seq(40, x)
        total = js[0] ** 2 + 2.0 * np.sum(js[1:] ** 2)
        assert total == pytest.approx(1.0, abs=1e-13)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            bessel_j(0, 3.5)
        with pytest.raises(ValueError):
            bessel_j(0, -0.1)
        with pytest.raises(ValueError):
            bessel_j(-1, 1.0)


class TestTerminating2F1:
    def test_n_zero_is_one(self):
        assert terminating_2f1(0, 3.7, 2.0 + 1j) == 1.0

    def test_one_term_hand_sum(self):
        assert terminating_2f1(1, 2.0, 0.5) == pytest.approx(0.0, abs=1e-15)

    def test_against_term_by_term_oracle(self):
        # brute-force sum with explicit Pochhammer products
        rng = np.random.default_rng(7)
        for n in (2, 5, 9):
            for a in (1.5, 0.25, 2.6):
                z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
                total = 0j
                for m in range(n + 1):
                    num = pochhammer_seq(-n, m)[m] * pochhammer_seq(a, m)[m]
                    den = pochhammer_seq(1.0, m)[m] * sps.gamma(m + 1.0)
                    total += num / den * z**m
                assert terminating_2f1(n, a, z) == pytest.approx(total, abs=1e-13)

    def test_polynomial_degree(self):
        # 2F1(-n, a; 1; z) is a degree-n polynomial: reproduce by Horner on
        # coefficients extracted from the recurrence
        n, a = 4, 1.3
        coeffs = []
        term = 1.0
        for m in range(n + 1):
            coeffs.append(term)
            if m < n:
                term *= (m - n) * (a + m) / ((1 + m) * (m + 1))
        for z in (0.5, -1.2, 2.0 + 0.3j):
            horner = 0j
            for c in reversed(coeffs):
                horner = horner * z + c
            assert terminating_2f1(n, a, z) == pytest.approx(horner, rel=1e-13, abs=1e-13)

    def test_rejects_negative_n(self):
        with pytest.raises(ValueError):
            terminating_2f1(-2, 1.0, 0.5)


def test_truncation_bound_at_threshold():
    # tail bound used by the matrix exponential: 2 sum_{k>18} J_k(2.212) <= 2^-53
    tail = 2.0 * sum(bessel_j(k, 2.212) for k in range(19, 60))
    assert 0 < tail <= 2.0**-53


def test_bessel_high_accuracy_at_threshold():
    # dual-route check at the scaling threshold via adaptive quadrature of the
    # integral representation J_0(x) = (1/pi) int_0^pi cos(x sin t) dt
    x = 2.212
    ref, _ = integrate.quad(lambda t: np.cos(x * np.sin(t)) / np.pi, 0.0, np.pi, epsabs=1e-15)
    assert bessel_j(0, x) == pytest.approx(ref, abs=1e-14)
