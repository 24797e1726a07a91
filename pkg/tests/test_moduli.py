import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special
from scipy.integrate import quad

from elastica_obstacle.elliptic import EllipticDomainError, complete_E, complete_K
from elastica_obstacle.moduli import (
    SQRT_HALF,
    Branch,
    NoSolutionError,
    Q_of,
    alpha0,
    dh_dq,
    f_of,
    g_of,
    h_lambda,
    h_of,
    invert_g,
    n_lambda,
    solve_thresholds,
)

TH = solve_thresholds()


def quad_KE(q):
    K = quad(lambda t: 1 / math.sqrt(1 - (q * math.sin(t)) ** 2), 0, math.pi / 2, epsabs=1e-14)[0]
    E = quad(lambda t: math.sqrt(1 - (q * math.sin(t)) ** 2), 0, math.pi / 2, epsabs=1e-14)[0]
    return K, E


class TestThresholds:
    def test_published_constants(self):
        assert TH.q_hat == pytest.approx(0.79257, abs=5e-5)
        assert TH.q_star == pytest.approx(0.90891, abs=5e-5)
        assert TH.lambda_hat == pytest.approx(0.70107, abs=5e-5)
        assert TH.h_star == pytest.approx(0.83463, abs=5e-5)

    def test_intervals(self):
        assert 0.79 < TH.q_hat < 0.80
        assert 0.90 < TH.q_star < 0.91

    def test_h_star_beta_identity(self):
        assert TH.h_star == pytest.approx(2 / special.beta(0.75, 0.5), rel=1e-13)
        assert TH.h_star == pytest.approx(math.sqrt(2) / alpha0(), rel=1e-15)

    def test_alpha0_beta_identity(self):
        assert alpha0() == pytest.approx(special.beta(0.75, 0.5) / math.sqrt(2), rel=1e-13)

    def test_roots(self):
        assert abs(f_of(TH.q_hat)) < 1e-8
        assert abs(Q_of(TH.q_star)) < 1e-12
        assert TH.lambda_hat == g_of(TH.q_hat)

    def test_as_dict(self):
        d = TH.as_dict()
        assert set(d) == {"q_hat", "q_star", "lambda_hat", "h_star"}


class TestScalarFunctions:
    def test_f_at_left_end(self):
        K, E = quad_KE(SQRT_HALF)
        assert f_of(SQRT_HALF) == pytest.approx(-0.5 * K + E, abs=1e-12)
        assert f_of(SQRT_HALF) == pytest.approx(0.4236, abs=1e-4)

    def test_f_brackets_root(self):
        assert f_of(0.75) > 0 > f_of(0.85)

    def test_g_zeros(self):
        assert g_of(SQRT_HALF) == 0.0
        assert g_of(TH.q_star) == pytest.approx(0.0, abs=1e-20)

    def test_g_nonnegative(self):
        q = np.linspace(SQRT_HALF, 0.999, 400)
        assert np.all(g_of(q) >= 0)

    def test_g_monotonicity_pattern(self):
        for lo, hi, sign in ((SQRT_HALF, TH.q_hat, 1), (TH.q_hat, TH.q_star, -1), (TH.q_star, 0.999, 1)):
            q = np.linspace(lo, hi, 100)[1:-1]
            assert np.all(sign * np.diff(g_of(q)) > 0)

    def test_g_matches_quadrature(self):
        for q in (0.72, 0.8, 0.88, 0.95):
            K, E = quad_KE(q)
            assert g_of(q) == pytest.approx(8 * (2 * E - K) ** 2 * (2 * q * q - 1), rel=1e-12)

    def test_h_at_q_star(self):
        q = TH.q_star
        assert h_of(q) == pytest.approx(2 * math.sqrt(2 * q * q - 1) * complete_K(q), abs=1e-10)

    def test_h_increasing_after_q_hat(self):
        q = np.linspace(TH.q_hat, 0.999, 200)[1:]
        assert np.all(np.diff(h_of(q)) > 0)
        assert h_of(TH.q_hat) < h_of(TH.q_star)

    def test_h_singular_at_left_end(self):
        with pytest.raises(EllipticDomainError):
            h_of(SQRT_HALF)
        assert h_of(SQRT_HALF + 1e-10) > 1e3

    @pytest.mark.parametrize("q", np.linspace(0.75, 0.95, 9))
    def test_dh_identity(self, q):
        step = 1e-6
        fd = (h_of(q + step) - h_of(q - step)) / (2 * step)
        assert dh_dq(q) == pytest.approx(fd, rel=1e-5)

    def test_domains(self):
        for fn in (f_of, g_of):
            with pytest.raises(EllipticDomainError):
                fn(0.5)
            with pytest.raises(EllipticDomainError):
                fn(1.0)

    def test_vectorized(self):
        q = np.array([0.75, 0.8, 0.9])
        assert g_of(q).shape == (3,)
        np.testing.assert_allclose(g_of(q), [g_of(x) for x in q])


class TestInvertG:
    def test_boundary_value(self):
        assert invert_g(TH.lambda_hat, Branch.Branch1) == TH.q_hat
        assert invert_g(TH.lambda_hat, Branch.Branch2) == TH.q_hat

    def test_branch2_example(self):
        q = invert_g(0.3, Branch.Branch2)
        assert TH.q_hat < q < TH.q_star
        assert g_of(q) == pytest.approx(0.3, abs=1e-10)

    def test_no_solution(self):
        with pytest.raises(NoSolutionError):
            invert_g(0.8, Branch.Branch1)
        with pytest.raises(NoSolutionError):
            invert_g(0.8, Branch.Branch2)

    def test_bad_values(self):
        for bad in (0.0, -1.0, float("nan")):
            with pytest.raises(EllipticDomainError):
                invert_g(bad, Branch.Branch3)

    def test_branch3_large(self):
        q = invert_g(50.0, Branch.Branch3)
        assert g_of(q) == pytest.approx(50.0, rel=1e-9)

    @given(c=st.floats(1e-4, 0.7010))
    def test_round_trip_and_order_low(self, c):
        q1 = invert_g(c, Branch.Branch1)
        q2 = invert_g(c, Branch.Branch2)
        q3 = invert_g(c, Branch.Branch3)
        for q in (q1, q2, q3):
            assert g_of(q) == pytest.approx(c, abs=1e-9)
        assert q1 <= TH.q_hat <= q2 < TH.q_star < q3

    @given(c=st.floats(1e-3, 30.0))
    def test_round_trip_branch3(self, c):
        q = invert_g(c, Branch.Branch3)
        assert TH.q_star < q < 1
        assert g_of(q) == pytest.approx(c, abs=1e-9, rel=1e-11)


class TestNLambdaHLambda:
    def test_examples(self):
        assert n_lambda(TH.lambda_hat) == 1
        assert n_lambda(4 * TH.lambda_hat) == 2
        assert n_lambda(2.0) == 2
        assert n_lambda(0.01) == 1

    @given(lam=st.floats(1e-3, 50.0))
    def test_smallest_integer(self, lam):
        n = n_lambda(lam)
        r = math.sqrt(lam / TH.lambda_hat)
        assert n >= r - 1e-12 and n - 1 < r

    def test_domain(self):
        with pytest.raises(EllipticDomainError):
            n_lambda(0.0)
        with pytest.raises(EllipticDomainError):
            h_lambda(-1.0)
        with pytest.raises(EllipticDomainError):
            h_lambda(0.8)

    def test_at_lambda_hat(self):
        q = TH.q_hat
        assert h_lambda(TH.lambda_hat) == pytest.approx(q / (2 * complete_E(q) - complete_K(q)), rel=1e-12)

    def test_divergence(self):
        assert h_lambda(0.01) > h_lambda(0.1) > h_lambda(0.5)
        lams = [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7]
        assert all(h_lambda(x) > 0 for x in lams)
