import math

import numpy as np
import pytest

from oracles import exp_coefficient, geometric_tail_reference, random_interior
from polydisc.cauchy import sample_boundary, taylor_coefficients
from polydisc.core import CPoint, MultiIndex, Polydisc, SpaceDescriptor
from polydisc.errors import DomainError
from polydisc.expr import parse
from polydisc.series import TaylorSeries, evaluate, geometric_tail, liouville_test, tail_bound


def exp_series(degree=12, radii=(1.0, 1.0)):
    coeffs = {b: exp_coefficient(b) for b in np.ndindex(*(degree + 1,) * 2) if sum(b) <= degree}
    return TaylorSeries(CPoint((0, 0)), radii, degree, coeffs, SpaceDescriptor(),
                        {"sup": math.e ** 2, "euclid": math.e ** 2})


class TestEvaluate:
    def test_center_returns_constant_term(self):
        s = exp_series()
        assert evaluate(s, (0, 0)).scalar() == s.coefficient((0, 0)).scalar()

    def test_exponential(self):
        val = evaluate(exp_series(), (0.5, 0.5), 12).scalar()
        assert abs(val - math.e) < 1e-9

    def test_single_monomial_exact(self):
        s = TaylorSeries(CPoint((0, 0)), (1, 1), 3, {(3, 0): 1.0}, SpaceDescriptor())
        assert evaluate(s, (0.4, 0.9)).scalar() == 0.4 ** 3

    def test_outside_rejected(self):
        with pytest.raises(DomainError):
            evaluate(exp_series(), (1.0, 0))

    def test_degree_above_stored(self):
        with pytest.raises(DomainError):
            evaluate(exp_series(4), (0.1, 0.1), 5)

    def test_missing_coefficients_are_zero(self):
        s = TaylorSeries(CPoint((0,)), (1,), 4, {}, SpaceDescriptor())
        assert s.coefficient((2,)).scalar() == 0
        assert s.coefficient((9,)).scalar() == 0

    def test_truncation_monotone(self, rng):
        s = exp_series(14)
        for w in random_interior(rng, 10, 2, 0.9):
            exact = np.exp(w.sum())
            errs = [abs(evaluate(s, w, n).scalar() - exact) for n in range(15)]
            assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))

    def test_bit_reproducible(self, rng):
        s = exp_series()
        w = random_interior(rng, 30, 2)
        np.testing.assert_array_equal(s.evaluate_many(w), s.evaluate_many(w.copy()))


class TestTailBound:
    def test_center_is_zero(self):
        assert tail_bound(exp_series(), (0, 0), 0) == 0

    def test_geometric_arithmetic(self):
        # 2 - (1 + 1/2 + 1/4 + 1/8)
        assert geometric_tail([0.5], 3) == 0.125

    def test_against_direct_sum(self, rng):
        for _ in range(20):
            t = rng.uniform(0, 0.8, 3)
            n = int(rng.integers(0, 8))
            assert geometric_tail(t, n) == pytest.approx(geometric_tail_reference(t, n), rel=1e-9, abs=1e-13)

    def test_dominates_true_error(self):
        s = exp_series(10)
        w = (0.3, 0.3)
        err = abs(evaluate(s, w, 10).scalar() - math.exp(0.6))
        assert err <= tail_bound(s, w, 10)

    def test_rejects_offsets_at_one(self):
        with pytest.raises(DomainError):
            geometric_tail([1.0, 0.2], 3)
        with pytest.raises(DomainError):
            tail_bound(exp_series(), (1, 0), 3)


class TestSeriesObject:
    def test_json_round_trip(self):
        s = taylor_coefficients(sample_boundary(parse("[exp(z1), z2^2]", 2), Polydisc(CPoint((0.5, 1j)), (1, 2)), 32), 5)
        back = TaylorSeries.from_json(s.to_json())
        assert back.to_json() == s.to_json()

    def test_cauchy_inequality_holds(self):
        s = taylor_coefficients(sample_boundary(parse("1/((z1-2)*(z2+3))", 2), Polydisc(CPoint((0, 0)), (1, 1)), 64), 10)
        assert s.cauchy_violations() == []

    def test_scaling_equivariance(self, rng):
        disc = Polydisc(CPoint((0, 0)), (1, 1))
        f = lambda z: np.exp(z[:, 0] + 2 * z[:, 1]) / (z[:, 0] - 3)
        base = taylor_coefficients(sample_boundary(lambda z: f(z), disc, 64), 6)
        for _ in range(3):
            c = 0.9 * rng.uniform() ** 0.5 * np.exp(2j * np.pi * rng.uniform(size=2))
            scaled = taylor_coefficients(sample_boundary(lambda z: f(z * c), disc, 64), 6)
            for beta, a in scaled.items():
                want = base.coefficient(beta).scalar() * beta.power(c)
                assert abs(a[0] - want) <= 1e-11 * max(1, abs(want))

    def test_expression_export_round_trip(self):
        s = taylor_coefficients(sample_boundary(parse("exp(z1)*z2", 2), Polydisc(CPoint((0.5, 0)), (1, 1)), 32), 6)
        e = parse(s.to_expression(), 2)
        w = np.array([[0.7, 0.3j]])
        assert abs(e(w)[0] - s.evaluate_many(w)[0, 0]) < 1e-13


class TestLiouville:
    def test_polynomial_true(self):
        assert liouville_test(parse("z1^2+z2", 2), 2).is_poly_deg_k

    def test_polynomial_false_with_witness(self):
        r = liouville_test(parse("z1^2+z2", 2), 1)
        assert not r.is_poly_deg_k
        assert r.witness["beta"] == [2, 0]
        assert r.witness["value"] == pytest.approx(1)

    def test_exp_not_polynomial(self):
        r = liouville_test(parse("exp(z1)", 2), 5)
        assert not r.is_poly_deg_k
        sixth = [c for c in r.checked if c["beta"] == [6, 0]]
        assert all(c["value"] == pytest.approx(1 / 720) for c in sixth)

    @pytest.mark.parametrize("radii", [[2], [4, 2], [2, 3]])
    def test_radii_validation(self, radii):
        with pytest.raises(DomainError):
            liouville_test(parse("z", 1), 1, radii)

    def test_matrix_valued(self):
        f = parse("[[z1^3, 1], [z2, z1*z2]]", 2)
        assert liouville_test(f, 3)
        assert not liouville_test(f, 2)

    def test_high_degree_uses_enough_nodes(self):
        f = parse("z^20", 1)
        assert liouville_test(f, 20)
        assert not liouville_test(f, 19)


def test_multi_index_lookup_accepts_tuples():
    s = exp_series(3)
    assert s.coefficient(MultiIndex((1, 2))).scalar() == s.coefficient((1, 2)).scalar() == 0.5
