import math

import pytest

from psicm import divided_diff as dd
from psicm.cm_checker import (
    CMCertificate,
    check_alternating_signs,
    check_step_identities,
    finite_difference_oracle,
    geometric_grid,
    probe_phi_lcm_conjecture,
)
from psicm.divided_diff import ShiftPair
from psicm.special import DomainError, UnsupportedOrderError


class TestGrid:
    def test_endpoints_and_monotone(self):
        g = geometric_grid(-0.4, 50, 30, alpha=0.5)
        assert g[0] == pytest.approx(-0.4) and g[-1] == pytest.approx(50)
        assert all(a < b for a, b in zip(g, g[1:]))

    def test_denser_near_pole(self):
        g = geometric_grid(0.1, 50, 50)
        assert g[1] - g[0] < g[-1] - g[-2]

    def test_rejects_interval_outside_domain(self):
        with pytest.raises(ValueError):
            geometric_grid(-1, 5, 10, alpha=0.5)


class TestCertificates:
    @pytest.mark.parametrize("pair,sign", [((0, 0.5), 1), ((0, 2), -1), ((0.3, 2.9), -1),
                                           ((1.2, 0.1), -1), ((0.25, 0.75), 1)])
    def test_theta_pass(self, pair, sign):
        cert = check_alternating_signs("theta", pair, k_max=6, grid_points=200)
        assert isinstance(cert, CMCertificate)
        assert cert.verdict == "pass" and cert.passed
        assert cert.expected_sign == sign
        assert len(cert.worst_margin) == 7

    def test_coincident_delta_order_zero(self):
        cert = check_alternating_signs("delta", (0, 0), k_max=0, grid_points=200)
        assert cert.verdict == "pass"
        assert cert.worst_margin[0] > 0

    def test_coincident_delta_higher_orders(self):
        cert = check_alternating_signs("delta", (0.5, 0.5), k_max=6, grid_points=100)
        assert cert.verdict == "pass"

    def test_critical_pair_is_indeterminate(self):
        cert = check_alternating_signs("theta", (0, 1), k_max=3, grid_points=50)
        assert cert.verdict == "indeterminate"
        assert cert.expected_sign == 0

    def test_refinement_stable(self):
        coarse = check_alternating_signs("theta", (0, 0.5), k_max=5, grid_points=100)
        fine = check_alternating_signs("theta", (0, 0.5), k_max=4, grid_points=200)
        assert coarse.verdict == fine.verdict == "pass"

    def test_extended_margins_strict_in_sub_regime(self, ext30):
        cert = check_alternating_signs("theta", (0, 0.5), interval=(0.1, 20), k_max=6,
                                       grid_points=40, precision=ext30)
        assert cert.verdict == "pass"
        assert all(m > 0 for m in cert.worst_margin)

    def test_errors(self):
        with pytest.raises(ValueError):
            check_alternating_signs("lambda", (0, 0.5))
        with pytest.raises(DomainError):
            check_alternating_signs("theta", (0.5, 1), interval=(-0.6, 3))
        with pytest.raises(UnsupportedOrderError):
            check_alternating_signs("theta", (0, 0.5), k_max=16)

    def test_serialisable(self):
        d = check_alternating_signs("theta", (0, 2), k_max=1, grid_points=5).to_dict()
        assert d["pair"] == (0, 2) and d["kind"] == "certificate"


class TestFiniteDifferences:
    def test_constant_function(self):
        for k in range(1, 5):
            assert finite_difference_oracle(lambda x: 3.0, 1.0, k, 1e-2) == 0

    def test_polynomial_exact(self):
        f = lambda x: x**3 - 2 * x
        assert finite_difference_oracle(f, 2.0, 1, 1e-3) == pytest.approx(10, rel=1e-6)
        assert finite_difference_oracle(f, 2.0, 3, 1e-2) == pytest.approx(6, rel=1e-6)

    def test_z_second_derivative(self):
        pair = ShiftPair(0.5, 1)
        fd = finite_difference_oracle(lambda y: dd.z_eval(pair, y).z, 2.0, 2, 1e-3)
        assert fd == pytest.approx(dd.z_eval(pair, 2.0).z2, abs=1e-5)

    def test_rejects_high_order(self):
        with pytest.raises(ValueError):
            finite_difference_oracle(math.exp, 0.0, 5, 1e-2)


class TestStepIdentities:
    @pytest.mark.parametrize("pair", [(0, 0.5), (0, 2), (0.3, 1.1)])
    def test_pass_in_extended(self, pair, ext30):
        rep = check_step_identities(pair, sample_count=30, precision=ext30)
        assert rep.passed
        assert rep.lambda_residual < 1e-10 and rep.theta_residual < 1e-10
        assert all(v < 1e-5 for v in rep.decay_values)

    def test_unit_gap(self):
        rep = check_step_identities((0, 1), sample_count=30)
        assert rep.lambda_step_is_zero
        assert rep.lambda_residual < 1e-10

    def test_coincident_rejected(self):
        with pytest.raises(ValueError):
            check_step_identities((0.2, 0.2))

    def test_deterministic(self):
        a = check_step_identities((0, 2), sample_count=10, seed=3)
        b = check_step_identities((0, 2), sample_count=10, seed=3)
        assert a == b


class TestConjectureProbe:
    @pytest.mark.parametrize("pair", [(0, 0.5), (0, 2)])
    def test_no_violation(self, pair):
        cert = probe_phi_lcm_conjecture(pair, interval=(-ShiftPair(*pair).alpha + 0.1, 20),
                                        k_max=3, grid_points=12)
        assert cert.kind == "conjecture-probe"
        assert cert.verdict == "pass"

    def test_critical_indeterminate(self):
        cert = probe_phi_lcm_conjecture((0, 1), k_max=1, grid_points=4)
        assert cert.verdict == "indeterminate"
