import math

import numpy as np
import pytest

from oracles import random_interior
from polydisc.analysis import (
    ThinSetSpec,
    approx_polynomial,
    closed_disc_points,
    extended_function,
    identity_certify,
    modulus_of_continuity,
    riemann_extend,
    validation_points,
)
from polydisc.cauchy import sample_boundary, taylor_coefficients
from polydisc.core import CPoint, Polydisc
from polydisc.errors import DegreeCapError, DomainError, ExtensionError, ResolutionError
from polydisc.expr import parse
from polydisc.holomorphy import negative_spectrum_check
from polydisc.quadrature import Integrand

UNIT2 = Polydisc(CPoint((0, 0)), (1, 1))


def sinc_product(z):
    u = z[:, 0] * z[:, 1]
    return np.sin(u) / u


def difference_quotient(z):
    return (z[:, 0] ** 2 - z[:, 1] ** 2) / (z[:, 0] - z[:, 1])


PRODUCT_ZERO = ThinSetSpec(parse("z1*z2", 2), 2)
DIAGONAL = ThinSetSpec(parse("z1-z2", 2), 2)


class TestThinSet:
    def test_zero_polynomial_rejected(self):
        with pytest.raises(DomainError):
            ThinSetSpec(parse("z1 - z1", 2), 2)

    def test_hits(self):
        pts = np.array([[0, 0.5], [0.1, 0.5], [1e-12, 1]])
        np.testing.assert_array_equal(PRODUCT_ZERO.hits(pts), [True, False, True])

    def test_explicit_tau(self):
        thin = ThinSetSpec(parse("z1", 1), 1, tau=0.2)
        np.testing.assert_array_equal(thin.hits(np.array([[0.1], [0.3]])), [True, False])


class TestRiemannExtend:
    def test_sinc(self):
        disc = Polydisc(CPoint((0, 0.5)), (0.5, 0.3))
        val = riemann_extend(Integrand(sinc_product, 2), PRODUCT_ZERO, (0, 0.5), [disc])
        assert abs(val.scalar() - 1) <= 1e-10

    def test_difference_quotient(self):
        disc = Polydisc(CPoint((0.3, 0.3)), (0.5, 0.5))
        val = riemann_extend(Integrand(difference_quotient, 2), DIAGONAL, (0.3, 0.3), [disc])
        assert abs(val.scalar() - 0.6) <= 1e-10
        assert any(flag.startswith("perturbed:") for flag in val.flags)

    def test_nothing_to_remove(self, rng):
        f = parse("exp(z1)*cos(z2)", 2)
        thin = ThinSetSpec(parse("z1-2", 2), 2)
        for z in random_interior(rng, 5, 2, 0.5):
            val = riemann_extend(f, thin, z, [UNIT2]).scalar()
            assert abs(val - f(z[None, :])[0]) <= 1e-11

    def test_outside_every_disc(self):
        with pytest.raises(DomainError):
            riemann_extend(Integrand(sinc_product, 2), PRODUCT_ZERO, (2, 0), [UNIT2])

    def test_blocked_discs_listed(self):
        # every radius of the first axis hits z1 = 0.5 eventually
        thin = ThinSetSpec(parse("z1^2 - 0.25", 2), 2, tau=0.5)
        with pytest.raises(ExtensionError) as info:
            riemann_extend(parse("z1", 2), thin, (0, 0), [Polydisc(CPoint((0, 0)), (0.5, 0.5))])
        assert len(info.value.blocked) == 1

    def test_consistency_off_the_thin_set(self, rng):
        f = Integrand(sinc_product, 2)
        for z in random_interior(rng, 10, 2, 0.3):
            z = z + np.array([0.4, 0.4])
            disc = Polydisc(CPoint(tuple(z)), (0.3, 0.3))
            assert abs(riemann_extend(f, PRODUCT_ZERO, z, [disc]).scalar() - f(z[None, :])[0]) <= 1e-10

    def test_extension_is_holomorphic(self):
        g = extended_function(Integrand(difference_quotient, 2), DIAGONAL, 0.25)
        samples = sample_boundary(g, UNIT2, 16)
        assert negative_spectrum_check(samples).passed


class TestIdentity:
    def test_identical(self):
        f = parse("exp(z1)*sin(z2)", 2)
        r = identity_certify(f, f, UNIT2, 8)
        assert r.equal_on_disc
        assert r.max_coeff_gap <= 1e-13

    def test_truncated_exponential(self):
        f = parse("exp(z)", 1)
        poly = Integrand(lambda z: sum(z[:, 0] ** k / math.factorial(k) for k in range(11)), 1)
        r = identity_certify(f, poly, Polydisc(CPoint((0,)), (1,)), 12)
        assert not r
        assert r.witness.exponents == (11,)
        assert r.max_coeff_gap == pytest.approx(1 / math.factorial(11), rel=0.1)

    def test_commuted_product(self):
        assert identity_certify(parse("z1*z2", 2), parse("z2*z1", 2), UNIT2, 4)

    def test_symmetric(self):
        f, g = parse("exp(z1+z2)", 2), parse("1 + z1 + z2", 2)
        a, b = identity_certify(f, g, UNIT2, 5), identity_certify(g, f, UNIT2, 5)
        assert a.equal_on_disc == b.equal_on_disc
        assert a.witness == b.witness
        assert a.max_coeff_gap == pytest.approx(b.max_coeff_gap)

    def test_degree_validated(self):
        with pytest.raises(DomainError):
            identity_certify(parse("z", 1), parse("z", 1), Polydisc(CPoint((0,)), (1,)), 0)

    def test_json(self):
        doc = identity_certify(parse("z1", 2), parse("z2", 2), UNIT2, 2).to_json()
        assert doc["equal_on_disc"] is False
        assert doc["witness"] == [1, 0]


class TestApprox:
    def test_exponential(self):
        r = approx_polynomial(parse("exp(z1)", 2), UNIT2, 1e-3)
        assert r.certified_error <= 2e-3
        assert r.degree_used <= 10
        assert 0 < r.r_used < 1

    def test_monotone_in_eps(self):
        f = parse("exp(z1)", 2)
        errs = [approx_polynomial(f, UNIT2, eps).certified_error for eps in (1e-2, 5e-3, 2.5e-3, 1.25e-3)]
        assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))

    def test_cubic(self):
        eps = 1e-3
        r = approx_polynomial(parse("z1^3 - 2*z1*z2 + 1", 2), UNIT2, eps)
        assert r.degree_used <= 3
        assert r.certified_error <= 2 * eps

    def test_constant(self):
        r = approx_polynomial(parse("3 - 4i", 2), UNIT2, 1e-6)
        assert r.certified_error <= 1e-12
        assert r.degree_used == 0

    def test_polynomial_output_is_fixed_point(self):
        r = approx_polynomial(parse("exp(z1)*z2", 2), UNIT2, 1e-2)
        p = r.polynomial
        again = taylor_coefficients(sample_boundary(p.evaluate_many, UNIT2, 64), p.degree)
        for beta, a in p.items():
            assert abs(again.coefficient(beta).entries - a).max() <= 1e-12

    def test_expression_export(self):
        r = approx_polynomial(parse("exp(z1)", 2), UNIT2, 1e-2)
        e = parse(r.to_json()["expression"], 2)
        w = validation_points(UNIT2)[::97]
        np.testing.assert_allclose(e(w), r.polynomial.evaluate_many(w)[:, 0], atol=1e-13)

    def test_off_center_disc(self):
        disc = Polydisc(CPoint((1 + 1j,)), (0.5,))
        r = approx_polynomial(parse("exp(z)", 1), disc, 1e-3)
        assert r.certified_error <= 2e-3

    def test_bad_eps(self):
        with pytest.raises(DomainError):
            approx_polynomial(parse("z", 1), Polydisc(CPoint((0,)), (1,)), 0)

    def test_degree_cap(self):
        with pytest.raises(DegreeCapError):
            approx_polynomial(parse("1/(z-1.05)", 1), Polydisc(CPoint((0,)), (1,)), 1e-6, degree_cap=4)

    def test_unresolved_modulus(self):
        f = Integrand(lambda z: np.exp(1e14j * z[:, 0].real), 1)
        with pytest.raises(ResolutionError):
            modulus_of_continuity(f, Polydisc(CPoint((0,)), (1,)), 1e-3)


def test_grids_cover_closed_disc():
    disc = Polydisc(CPoint((0.5, -1j)), (0.5, 2))
    pts = closed_disc_points(disc, 4, 8, True)
    off = np.abs(pts - disc.center.array()) / np.asarray(disc.radii)
    assert off.max() == pytest.approx(1)
    assert off.min() == 0
    assert validation_points(disc).shape == (33 ** 2, 2)
