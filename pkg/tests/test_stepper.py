import numpy as np
import pytest

from mtfse.basis import SpectralState, analyze
from mtfse.fraclap import assemble_full
from mtfse.potential import potential_operator
from mtfse.stepper import (
    SM1,
    SM2,
    SM3,
    BlowUpError,
    KrogstadTables,
    SplittingPropagators,
    amplification_factor,
    evolve_linear,
    evolve_nonlinear,
    exact_propagate,
    focusing_cubic,
    krogstad_p22_step,
    stability_region,
)


def random_state(N, seed, nu=1.0, norm=1.0):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(2 * N) + 1j * rng.standard_normal(2 * N)
    c *= norm / np.linalg.norm(c)
    return SpectralState(c, N, nu)


class TestSchemeTables:
    def test_sm1_is_strang(self):
        assert SM1.a == (0.5, 0.5) and SM1.b == (1.0, 0.0) and SM1.order == 2

    def test_sm2_consistency(self):
        k1 = 1.0 / (2.0 - 2.0 ** (1 / 3))
        k0 = -(2.0 ** (1 / 3)) * k1
        assert SM2.b[1] == pytest.approx(k0, abs=1e-15)
        assert sum(SM2.a) == pytest.approx(1.0, abs=1e-15)
        assert sum(SM2.b) == pytest.approx(1.0, abs=1e-15)

    def test_sm3_consistency(self):
        assert SM3.order == 6 and SM3.stages == 8
        assert sum(SM3.a) == pytest.approx(1.0, abs=1e-14)
        assert sum(SM3.b) == pytest.approx(1.0, abs=1e-14)
        # palindromic layout
        assert SM3.a == tuple(reversed(SM3.a))
        assert SM3.b[:3] == tuple(reversed(SM3.b[4:7]))


class TestExactPropagate:
    def test_time_zero_identity(self):
        A = assemble_full(8, 1.0, 2.0)
        U0 = random_state(8, 1, nu=2.0)
        out = exact_propagate(A, None, 0.5, 0.0, U0)
        assert np.array_equal(out.coeffs, U0.coeffs)

    def test_norm_preserved(self):
        A = assemble_full(12, 0.6, 4.0)
        M = potential_operator(lambda x: 1.0 / (1.0 + x * x), 12, 4.0)
        U0 = random_state(12, 2, nu=4.0)
        out = exact_propagate(A, M, 0.5, 1.0, U0)
        assert abs(out.norm() - U0.norm()) < 1e-12

    def test_matches_eigensolver(self):
        A = assemble_full(8, 1.0, 1.0)
        M = potential_operator(lambda x: np.exp(-(x**2)), 8)
        gamma, t = 0.5, 0.7
        H = gamma * A.full_matrix() + M.dense()
        w, V = np.linalg.eigh(H)
        expect = (V * np.exp(-1j * t * w)) @ np.conj(V).T
        U0 = random_state(8, 3)
        out = exact_propagate(A, M, gamma, t, U0)
        assert np.max(np.abs(out.coeffs - expect @ U0.coeffs)) < 1e-12

    def test_size_mismatch_rejected(self):
        A = assemble_full(8, 1.0, 1.0)
        M = potential_operator(lambda x: np.exp(-(x**2)), 4)
        with pytest.raises(ValueError):
            exact_propagate(A, M, 0.5, 1.0, random_state(8, 1))


class TestSplitting:
    def test_pure_kinetic_degenerates_to_single_exponential(self):
        A = assemble_full(10, 1.0, 1.0)
        gamma, tau = 0.5, 0.05
        U0 = random_state(10, 4)
        props = SplittingPropagators(SM1, A, None, gamma, tau)
        split = props.step(U0)
        exact = exact_propagate(A, None, gamma, tau, U0)
        assert np.max(np.abs(split.coeffs - exact.coeffs)) < 1e-13

    def test_unitarity_over_many_steps(self):
        A = assemble_full(12, 0.6, 2.0)
        M = potential_operator(lambda x: 1.0 / (1.0 + x * x), 12, 2.0)
        U = random_state(12, 5, nu=2.0)
        n_steps = 200
        out = evolve_linear(A, M, 0.5, SM2, 0.01, n_steps, U)
        assert abs(out.norm() - U.norm()) < 1e-12 * n_steps

    def test_time_symmetry(self):
        A = assemble_full(10, 1.4, 1.0)
        M = potential_operator(lambda x: np.exp(-(x**2)), 10)
        U0 = random_state(10, 6)
        fwd = SplittingPropagators(SM1, A, M, 0.5, 0.1)
        bwd = SplittingPropagators(SM1, A, M, 0.5, -0.1)
        back = bwd.step(fwd.step(U0))
        assert np.max(np.abs(back.coeffs - U0.coeffs)) < 1e-11

    @pytest.mark.parametrize("scheme,expected,window", [
        (SM1, 2.0, 0.2),
        (SM2, 4.0, 0.3),
        (SM3, 6.0, 0.5),
    ])
    def test_measured_order(self, scheme, expected, window):
        # reduced-size version of the order study: N = 32, reference = exact
        N, nu, gamma = 32, 4.0, 0.5
        A = assemble_full(N, 1.0, nu)
        M = potential_operator(lambda x: 1.0 / (1.0 + x * x), N, nu)
        U0 = analyze(lambda x: 1.0 / (1.0 + x + x * x), N, nu)
        t_final = 1.0
        ref = exact_propagate(A, M, gamma, t_final, U0)
        taus = [2.0**-p for p in range(3, 8)]
        errs = []
        for tau in taus:
            n_steps = round(t_final / tau)
            out = evolve_linear(A, M, gamma, scheme, tau, n_steps, U0)
            errs.append(np.max(np.abs(out.coeffs - ref.coeffs)))
        errs = np.array(errs)
        keep = errs > 1e-13
        slope = np.polyfit(np.log(np.array(taus)[keep]), np.log(errs[keep]), 1)[0]
        assert abs(slope - expected) < window


class TestKrogstad:
    def test_zero_nonlinearity_is_pade_step(self):
        A = assemble_full(8, 1.0, 1.0)
        tables = KrogstadTables(A, 0.5, 0.02)
        U0 = random_state(8, 7)
        out = krogstad_p22_step(tables, lambda s, t: np.zeros_like(s.coeffs), U0, 0.0, 0.02)
        assert np.max(np.abs(out.coeffs - tables.R22 @ U0.coeffs)) < 1e-14

    def test_r22_unitary_for_skew_hermitian_argument(self):
        A = assemble_full(10, 0.6, 2.0)
        tables = KrogstadTables(A, 0.5, 0.1)
        defect = np.max(np.abs(tables.R22 @ np.conj(tables.R22).T - np.eye(20)))
        assert defect < 1e-11

    def test_scalar_constant_coefficient_step(self):
        # U' = -iU - 0.1iU via a 1x1 system; one step lands within the
        # order-four local error of the exact phase
        class ScalarOp:
            def __init__(self):
                self.alpha, self.n_modes, self.scaling = 1.0, 0.5, 1.0

            def full_matrix(self):
                return np.array([[1.0 + 0j]])

        tables = KrogstadTables(ScalarOp(), 1.0, 0.1)
        # drive the stage algebra directly on the 1x1 system
        u = np.array([1.0 + 0j])
        n0 = 0.1 * u
        a_n = tables.Rt22 @ u - 1j * (tables.Pt1 @ n0)
        na = 0.1 * a_n
        b_n = a_n - 1j * (tables.Pt2 @ (na - n0))
        nb = 0.1 * b_n
        c_n = tables.R22 @ u - 1j * (tables.P1 @ n0) - 2j * (tables.P2 @ (nb - n0))
        nc = 0.1 * c_n
        out = (tables.R22 @ u - 1j * (tables.P1 @ n0)
               - 1j * (tables.P2 @ (-3 * n0 + 2 * na + 2 * nb - nc))
               - 1j * (tables.P3 @ (n0 - na - nb + nc)))
        assert abs(out[0] - np.exp(-1.1j * 0.1)) < 1e-7

    def test_reproduces_amplification_factor(self):
        # linearized scalar problem: one step equals r(-ic tau, -lambda tau)
        lam, c, tau = 0.3j, 0.25, 0.05

        class ScalarOp:
            alpha, n_modes, scaling = 1.0, 1, 1.0

            def full_matrix(self):
                # L = i gamma A = lam requires A = lam / (i gamma); gamma = 1
                return np.array([[lam / 1j]])

        tables = KrogstadTables(ScalarOp(), 1.0, tau)
        u = np.array([1.0 + 0j])
        n0 = c * u
        a_n = tables.Rt22 @ u - 1j * (tables.Pt1 @ n0)
        na = c * a_n
        b_n = a_n - 1j * (tables.Pt2 @ (na - n0))
        nb = c * b_n
        c_n = tables.R22 @ u - 1j * (tables.P1 @ n0) - 2j * (tables.P2 @ (nb - n0))
        nc = c * c_n
        out = (tables.R22 @ u - 1j * (tables.P1 @ n0)
               - 1j * (tables.P2 @ (-3 * n0 + 2 * na + 2 * nb - nc))
               - 1j * (tables.P3 @ (n0 - na - nb + nc)))
        r = amplification_factor(-1j * c * tau, -lam * tau)
        assert abs(out[0] - r) < 1e-13

    def test_tau_mismatch_rejected(self):
        A = assemble_full(4, 1.0, 1.0)
        tables = KrogstadTables(A, 0.5, 0.1)
        with pytest.raises(ValueError):
            krogstad_p22_step(tables, focusing_cubic, random_state(4, 8), 0.0, 0.2)

    def test_temporal_order_four_small(self):
        # focusing equation at N = 24: slope 4 against a tau-refined reference
        N, nu, gamma = 24, 4.0, 0.5
        A = assemble_full(N, 1.0, nu)
        U0 = analyze(lambda x: np.exp(-(x**2)), N, nu)
        t_final = 0.5
        tau_ref = 2.0**-10
        ref = evolve_nonlinear(A, gamma, tau_ref, round(t_final / tau_ref), U0)
        taus = [2.0**-p for p in range(3, 7)]
        errs = []
        for tau in taus:
            out = evolve_nonlinear(A, gamma, tau, round(t_final / tau), U0)
            errs.append(np.max(np.abs(out.coeffs - ref.coeffs)))
        slope = np.polyfit(np.log(taus), np.log(errs), 1)[0]
        assert abs(slope - 4.0) < 0.25


class TestAmplificationFactor:
    def test_taylor_coefficients_at_y_zero(self):
        # r(x, 0) = 1 + x + x^2/2 + x^3/6 + x^4/24
        for x in (0.3, -1.0, 0.5j):
            expect = 1 + x + x**2 / 2 + x**3 / 6 + x**4 / 24
            assert amplification_factor(x, 0.0) == pytest.approx(expect, abs=1e-15)

    def test_x_zero_is_pade_stability_function(self):
        y = 0.4 + 0.1j
        expect = (12 + 6 * y + y * y) / (12 - 6 * y + y * y)
        assert amplification_factor(0.0, y) == expect

    def test_real_axis_membership(self):
        assert abs(amplification_factor(-1.0, 0.0)) == pytest.approx(0.375, abs=1e-15)
        assert abs(amplification_factor(1.0, 0.0)) > 1.0

    def test_pole_rejected(self):
        # roots of 12 - 6y + y^2 are 3 +- i sqrt(3)
        y = 3.0 + 1j * np.sqrt(3.0)
        with pytest.raises(ZeroDivisionError):
            amplification_factor(1.0, y)


class TestStabilityRegion:
    def test_origin_always_inside_for_imaginary_y(self):
        for y in (2j, 5j, 10j):
            mask = stability_region(y, np.array([0.0 + 0j]))
            assert mask[0]

    def test_real_axis_examples(self):
        mask = stability_region(0.0, np.array([-1.0 + 0j, 1.0 + 0j]))
        assert mask[0] and not mask[1]

    def test_grid_shape(self):
        xs = (np.linspace(-2, 2, 5)[None, :] + 1j * np.linspace(-2, 2, 4)[:, None])
        mask = stability_region(2j, xs)
        assert mask.shape == xs.shape


class TestBlowUpGuard:
    def test_triggers_on_manufactured_growth(self):
        A = assemble_full(6, 1.0, 1.0)

        def explode(state, t):
            return -1e6j * state.coeffs  # anti-damping pump

        U0 = random_state(6, 9, norm=1.0)
        with pytest.raises(BlowUpError) as info:
            evolve_nonlinear(A, 0.5, 0.01, 2000, U0, nonlin=explode)
        assert info.value.time > 0.0

    def test_clean_run_returns_state(self):
        A = assemble_full(8, 1.99, 4.0)
        U0 = analyze(lambda x: np.exp(-(x**2)), 8, 4.0)
        out = evolve_nonlinear(A, 0.5, 0.01, 50, U0)
        assert np.all(np.isfinite(out.coeffs))
