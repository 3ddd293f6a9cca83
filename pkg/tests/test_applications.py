import math
from fractions import Fraction

import pytest
from scipy import integrate as sp_integrate

from psicm import applications as ap
from psicm import divided_diff as dd
from psicm.special import DomainError, find_psi_root, polygamma


def by_claim(records, claim):
    return [r for r in records if r.claim_id == claim]


def test_double_factorial():
    assert ap.double_factorial(0) == 1
    assert ap.double_factorial(-1) == 1
    assert ap.double_factorial(1) == 1
    assert ap.double_factorial(6) == 48
    assert ap.double_factorial(7) == 105
    assert ap.double_factorial(41) == math.prod(range(1, 42, 2))
    with pytest.raises(ValueError):
        ap.double_factorial(-2)


class TestWallis:
    def test_ratios_exact(self):
        for n, r1, r2 in ap.wallis_ratios(12):
            assert r1 == Fraction(ap.double_factorial(2 * n - 1), ap.double_factorial(2 * n))
            assert r2 == Fraction(ap.double_factorial(2 * n), ap.double_factorial(2 * n + 1))

    def test_equality_at_one(self):
        recs = ap.wallis_bounds_check(1)
        assert len(recs) == 2
        odd, even = recs
        assert odd.value == Fraction(1, 2) and even.value == Fraction(2, 3)
        for r in recs:
            assert r.passed
            assert abs(r.margin_lower) < 1e-25
            assert r.margin_upper > 0

    def test_second_term(self):
        odd = by_claim(ap.wallis_bounds_check(2), "wallis-odd-even")[1]
        theta1 = 64 / (9 * math.pi) - 2
        assert float(odd.note.split("=")[1]) == pytest.approx(theta1, rel=1e-14)
        assert 0.25 < theta1 <= 4 / math.pi - 1
        assert theta1 == pytest.approx(0.2635369684, abs=1e-10)

    def test_all_pass_and_strict_after_one(self):
        recs = ap.wallis_bounds_check(300)
        assert all(r.passed for r in recs)
        assert all(r.margin_lower > 0 and r.margin_upper > 0 for r in recs[2:])

    def test_invalid(self):
        with pytest.raises(ValueError):
            ap.wallis_bounds_check(0)

    def test_record_serialises_fraction(self):
        d = ap.wallis_bounds_check(1)[0].to_dict()
        assert d["value"] == "1/2"

    @pytest.mark.parametrize("n", range(1, 31))
    def test_integral_closed_form(self, n):
        if n % 2:
            exact = Fraction(ap.double_factorial(n - 1), ap.double_factorial(n))
            expected = float(exact)
        else:
            exact = Fraction(ap.double_factorial(n - 1), ap.double_factorial(n))
            expected = float(exact) * math.pi / 2
        assert ap.wallis_integral(n) == pytest.approx(expected, abs=1e-10)
        quad, _ = sp_integrate.quad(lambda u: math.sin(u) ** n, 0, math.pi / 2,
                                    epsabs=1e-13, epsrel=1e-13)
        assert ap.wallis_integral(n) == pytest.approx(quad, abs=1e-9)


class TestThetaSequences:
    def test_values(self):
        t1, _ = ap.theta_sequences(1)
        assert t1 == pytest.approx(4 / math.pi - 1, abs=1e-14)
        _, t2 = ap.theta_sequences(1)
        assert t2 == pytest.approx(9 * math.pi / 16 - 1, abs=1e-14)

    def test_limits(self):
        t1, t2 = ap.theta_sequences(1e6)
        assert t1 == pytest.approx(0.25, abs=1e-6)
        assert t2 == pytest.approx(0.75, abs=1e-6)

    def test_domain(self):
        with pytest.raises(DomainError):
            ap.theta_sequences(-0.5)

    def test_strictly_decreasing_over_integers(self, ext30):
        seq = [ap.theta_sequences(n, ext30) for n in range(1, 1001)]
        for (a1, a2), (b1, b2) in zip(seq, seq[1:]):
            assert b1 < a1 and b2 < a2


class TestErf:
    def test_first_term(self):
        rec = ap.erf_bounds_check(1)[0]
        assert rec.passed
        assert rec.value == pytest.approx(math.sqrt(math.pi) * math.erf(1), abs=1e-12)
        assert rec.value == pytest.approx(1.493648, abs=1e-6)
        assert rec.lower == pytest.approx(4 / 3, rel=1e-14)
        assert rec.upper == pytest.approx(2 * math.sqrt(math.pi), rel=1e-14)

    def test_large_n(self):
        value, err = ap.gaussian_integral(100)
        sp = math.sqrt(math.pi)
        assert value == pytest.approx(sp, abs=1e-9)
        rec = ap.erf_bounds_check(100)[-1]
        assert rec.passed
        assert abs(rec.lower - sp) < 0.004 * sp and abs(rec.upper - sp) < 0.004 * sp

    def test_all_pass(self):
        assert all(r.passed for r in ap.erf_bounds_check(60))


class TestBall:
    def test_low_dimensions(self):
        assert float(ap.ball_volume(0)) == pytest.approx(1)
        assert float(ap.ball_volume(1)) == pytest.approx(2)
        assert float(ap.ball_volume(2)) == pytest.approx(math.pi)
        assert float(ap.ball_volume(3)) == pytest.approx(4 * math.pi / 3)

    def test_equality_at_one(self):
        rec = ap.ball_ratio_check(1)[0]
        assert rec.value == pytest.approx(0.5, abs=1e-15)
        assert rec.upper == pytest.approx(0.5, abs=1e-15)
        assert rec.passed and abs(rec.margin_upper) < 1e-25

    def test_second(self):
        rec = ap.ball_ratio_check(2)[1]
        assert rec.value == pytest.approx(2 / math.pi, rel=1e-14)
        assert rec.lower == pytest.approx(0.63078, abs=1e-5)
        assert rec.upper == pytest.approx(0.63966, abs=1e-5)
        assert rec.margin_lower > 0 and rec.margin_upper > 0

    def test_all_pass(self):
        recs = ap.ball_ratio_check(200)
        assert all(r.passed for r in recs)
        assert all(r.margin_lower > 0 and r.margin_upper > 0 for r in recs[1:])

    @pytest.mark.parametrize("n", range(1, 101))
    def test_rearrangement_identity(self, n):
        z = dd.z_eval((1, 0.5), n / 2).z
        assert float(ap.ball_ratio(n)) == pytest.approx(
            math.sqrt((n + 2 * z) / (2 * math.pi)), abs=1e-10)


class TestKershaw:
    def test_half_at_one(self):
        ratio, rearr = ap.kershaw_check([0.5], [1])
        assert ratio.lower == pytest.approx(1.11803, abs=1e-5)
        assert ratio.value == pytest.approx(2 / math.sqrt(math.pi), rel=1e-14)
        assert ratio.upper == pytest.approx(1.16877, abs=1e-5)
        assert ratio.passed and rearr.passed
        assert rearr.value == pytest.approx(dd.z_eval((0.5, 1), 1.0).z, abs=1e-14)

    def test_near_one(self):
        recs = ap.kershaw_check([0.999], [1, 10])
        for r in recs[::2]:
            assert r.value == pytest.approx(1, abs=5e-3)
            assert r.passed

    def test_default_grid_strict(self):
        recs = ap.kershaw_check()
        assert len(recs) == 2 * 19 * 50
        assert all(r.passed and r.margin_lower > 0 and r.margin_upper > 0 for r in recs)

    def test_domain(self):
        with pytest.raises(DomainError):
            ap.kershaw_check([1.0], [1])
        with pytest.raises(DomainError):
            ap.kershaw_check([0.5], [0.5])


class TestGammaPsi:
    def test_energy_vanishes_at_root(self):
        assert abs(ap.psi_energy(find_psi_root())) < 1e-15

    def test_at_root_equality(self):
        x_star = find_psi_root()
        rec = ap.gamma_psi_bounds_check(1, 3, x_grid=[x_star])[0]
        assert rec.passed
        assert abs(rec.value) < 1e-15 and abs(rec.lower) < 1e-15 and abs(rec.upper) < 1e-15

    def test_finite_interval(self):
        rec = ap.gamma_psi_bounds_check(1, 3, x_grid=[2.0])[0]
        assert rec.passed and rec.margin_lower > 0 and rec.margin_upper > 0
        assert rec.value == pytest.approx(-math.lgamma(find_psi_root()), rel=1e-13)

    def test_default_grids(self):
        for b in (3, ap.INFINITY):
            recs = ap.gamma_psi_bounds_check(1, b)
            assert all(r.passed for r in recs)
            assert recs[-1].claim_id == "q-decreasing"

    def test_q_decreasing(self):
        assert ap.q_decreasing_check(1, 5) > 0

    def test_f_monotone(self):
        assert ap.f_monotonicity_check((0, 0.5), 1.0, (0.2, 30)).passed
        assert ap.f_monotonicity_check((0, 2), 1.0, (0.2, 30)).passed
        assert ap.f_monotonicity_check((0, 1), 1.0, (0.2, 30)).verdict == "indeterminate"

    def test_domain(self):
        with pytest.raises(DomainError):
            ap.gamma_psi_bounds_check(3, 1)


class TestAuxiliary:
    def test_gamma_ratio_example(self):
        psi3 = 1.5 - 0.5772156649015329
        assert polygamma(0, 3) == pytest.approx(psi3, abs=1e-15)
        assert math.exp(2 * psi3) == pytest.approx(6.33, abs=0.01)
        recs = ap.auxiliary_inequality_checks(x_grid=[1.0, 2.0], pair_grid=[(0, 0.5), (0, 2)])
        first = by_claim(recs, "gamma-ratio-exp")[0]
        assert first.parameter == {"s": 2.0, "r": 1.0}
        assert first.passed

    def test_pair_examples(self):
        recs = ap.auxiliary_inequality_checks(x_grid=[1.0], pair_grid=[(0, 0.5), (0, 2)])
        sub, sup = by_claim(recs, "z-divided-difference")
        direct = math.gamma(1.5) ** 2 < 0.5 / (polygamma(0, 1.5) - polygamma(0, 1))
        assert direct and sub.passed
        lhs = (math.gamma(3) / math.gamma(1)) ** 0.5
        assert lhs > 2 / (polygamma(0, 3) - polygamma(0, 1))
        assert sup.passed

    def test_random_samples(self):
        recs = ap.auxiliary_inequality_checks(samples=200, seed=5)
        for claim in ("gamma-ratio-exp", "z-divided-difference", "psi-prime-exp-psi"):
            group = by_claim(recs, claim)
            assert len(group) == 200
            assert all(r.passed for r in group)

    def test_reproducible(self):
        a = ap.auxiliary_inequality_checks(samples=20, seed=1)
        b = ap.auxiliary_inequality_checks(samples=20, seed=1)
        assert [r.to_dict() for r in a] == [r.to_dict() for r in b]


class TestThetaMonotonicity:
    def test_theta1(self):
        assert ap.theta_monotonicity_check("theta1", (-0.4, 50)).passed

    def test_theta2(self):
        assert ap.theta_monotonicity_check("theta2").passed

    def test_super_pair(self):
        assert ap.theta_monotonicity_check((0, 2), (0.1, 50)).passed

    def test_critical(self):
        assert ap.theta_monotonicity_check((0, 1)).verdict == "indeterminate"

    def test_tail_slope(self):
        assert abs(dd.z_eval((0.5, 1), 1e6).z1) < 1e-5
