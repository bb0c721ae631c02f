"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

The lines also appear in the pytest terminal summary.  Executing the file
directly prints them with a total.
"""

import cmath
import io
import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import TEST_SET, random_interior  # noqa: E402
from polydisc.analysis import (  # noqa: E402
    ThinSetSpec,
    approx_polynomial,
    extended_function,
    identity_certify,
    riemann_extend,
)
from polydisc.cauchy import cauchy_derivative, sample_boundary, taylor_coefficients  # noqa: E402
from polydisc.cli import run  # noqa: E402
from polydisc.core import (  # noqa: E402
    Arc,
    Circle,
    CPoint,
    CurveC1,
    Polydisc,
    Segment,
    graded_indices,
)
from polydisc.expr import parse  # noqa: E402
from polydisc.holomorphy import (  # noqa: E402
    cr_operator,
    cr_residual,
    interior_points,
    negative_spectrum_check,
    real_partial,
    separate_holomorphy_check,
    weak_holomorphy_probe,
)
from polydisc.quadrature import (  # noqa: E402
    Integrand,
    differentiate_parametric_integral,
    ftc_check,
    integrate_curve,
    integrate_rectangle,
)
from polydisc.series import evaluate, liouville_test, tail_bound  # noqa: E402

SEED = 20240611
UNIT2 = Polydisc(CPoint((0, 0)), (1, 1))
UNIT_CIRCLE = CurveC1((Circle(0, 1),))


def max_rel_error(fn, nodes, points):
    s = sample_boundary(parse(fn.source, 2), UNIT2, nodes)
    worst = 0.0
    for z in points:
        want = fn(z)
        got = cauchy_derivative(s, z, (0, 0)).scalar()
        worst = max(worst, abs(got - want) / abs(want))
    return worst


def criterion_1():
    pts = random_interior(np.random.default_rng(SEED), 20, 2, 0.7)
    worst = max(max_rel_error(fn, 64, pts) for fn in TEST_SET)
    return worst <= 1e-10, f"max relative error {worst:.2e} (tol 1e-10)"


def criterion_2():
    worst = 0.0
    for fn in TEST_SET:
        s = sample_boundary(parse(fn.source, 2), UNIT2, 64)
        for beta in graded_indices(2, 6):
            want = fn.derivative((0, 0), beta.exponents)
            got = cauchy_derivative(s, (0, 0), beta).scalar()
            worst = max(worst, abs(got - want) / max(1.0, abs(want)))
    return worst <= 1e-9, f"max relative error {worst:.2e} over |beta|<=6 (tol 1e-9)"


def criterion_3():
    rational = TEST_SET[2]
    pts = random_interior(np.random.default_rng(SEED), 20, 2, 0.7)
    coarse = max_rel_error(rational, 16, pts)
    fine = max(max_rel_error(rational, 64, pts), np.finfo(float).eps)
    ratio = coarse / fine
    return ratio >= 1e4, f"error N=16 {coarse:.2e}, N=64 {fine:.2e}, ratio {ratio:.1e} (need >= 1e4)"


def criterion_4():
    # radius-4 expansion, evaluated where every |w_j| <= 0.5 (offset 1/8)
    disc = Polydisc(CPoint((0, 0)), (4, 4))
    series = taylor_coefficients(sample_boundary(parse("exp(z1+z2)", 2), disc, 64), 12)
    pts = random_interior(np.random.default_rng(SEED), 50, 2, 0.5)
    excess, worst_tail = -np.inf, 0.0
    for w in pts:
        err = abs(evaluate(series, w, 12).scalar() - np.exp(w.sum()))
        tb = tail_bound(series, w, 12)
        excess = max(excess, err - tb - 1e-9)
        worst_tail = max(worst_tail, tb)
    edge = tail_bound(series, (0.5, 0.5), 12)
    ok = excess <= 0 and edge <= 1e-6
    return ok, f"error within bound (max excess {excess:.1e}); tail_bound at |w|=0.5 is {edge:.2e} (tol 1e-6)"


def criterion_5():
    violations = 0
    count = 0
    for fn in TEST_SET:
        f = parse(f"[{fn.source}, z1*({fn.source}), 2i*({fn.source})]", 2)
        s = sample_boundary(f, UNIT2, 64)
        for name in ("sup", "euclid", "coord[1]"):
            sn = s.space.seminorm(name)
            M = float(np.max(sn(s.values, 1)))
            for beta in graded_indices(2, 6):
                value = float(sn(cauchy_derivative(s, (0, 0), beta).entries, 1))
                count += 1
                if value > beta.factorial() * M + 1e-9:
                    violations += 1
    return violations == 0, f"{violations} violations in {count} checks"


def criterion_6():
    rng = np.random.default_rng(SEED)
    funcs = [
        lambda x: np.exp(x[:, 0] * x[:, 1]),
        lambda x: np.sin(x[:, 0]) * np.cos(2 * x[:, 1]),
        lambda x: 1 / (1 + x[:, 0] ** 2 + x[:, 1] ** 2),
        lambda x: np.exp(1j * (x[:, 0] + 3 * x[:, 1])),
        lambda x: np.stack([x[:, 0] ** 5 * x[:, 1], np.log(2 + x[:, 0] + x[:, 1] ** 2)], -1),
    ]
    worst = 0.0
    for f in funcs:
        a, c = rng.uniform(-1, 0, 2)
        b, d = a + rng.uniform(0.5, 1.5), c + rng.uniform(0.5, 1.5)
        vals = [integrate_rectangle(f, (a, b, c, d), order).entries
                for order in ("tensor", "x-then-y", "y-then-x")]
        worst = max(worst, max(float(np.max(np.abs(v - vals[0]))) for v in vals[1:]))
    return worst <= 1e-10, f"max disagreement {worst:.2e} (tol 1e-10)"


def criterion_7():
    s = lambda g: Integrand(g, 1)
    pairs = [
        (lambda z: 2 * z[:, 0], lambda z: z[:, 0] ** 2, CurveC1((Segment(0, 1 + 1j),))),
        (lambda z: np.exp(z[:, 0]), lambda z: np.exp(z[:, 0]), CurveC1((Arc(0, 1, 0, np.pi / 2),))),
        (lambda z: 1 / z[:, 0], lambda z: np.log(z[:, 0]), CurveC1((Arc(0, 1, -np.pi / 2, np.pi / 2),))),
    ]
    ftc = max(ftc_check(s(f), s(F), curve) for f, F, curve in pairs)
    closed = max(
        abs(integrate_curve(s(g), curve, 64).scalar())
        for g in (lambda z: np.exp(z[:, 0]), lambda z: z[:, 0] ** 7 - 3 * z[:, 0], lambda z: np.sin(z[:, 0]) ** 2)
        for curve in (UNIT_CIRCLE, CurveC1((Circle(0.5j, 0.75),)))
    )
    ok = ftc <= 1e-11 and closed <= 1e-12
    return ok, f"FTC residual {ftc:.2e} (tol 1e-11); closed integrals {closed:.2e} (tol 1e-12)"


def criterion_8():
    a = 0.3 - 0.2j
    cases = [
        # G(lam) = 2 pi i exp(lam a), so G'(lam) = 2 pi i a exp(lam a)
        (lambda z, lam: np.exp(lam[0] * z[:, 0]) / (z[:, 0] - a),
         lambda z, lam: z[:, 0] * np.exp(lam[0] * z[:, 0]) / (z[:, 0] - a),
         CPoint((0.7 + 0.1j,)), lambda lam: 2j * np.pi * a * cmath.exp(lam * a)),
        # only the pole z = 0 lies inside for |lam| < 1, so G(lam) = 2 pi i lam^3
        (lambda z, lam: lam[0] ** 3 / (z[:, 0] * (1 - lam[0] * z[:, 0])),
         lambda z, lam: (3 * lam[0] ** 2 * (1 - lam[0] * z[:, 0]) + lam[0] ** 3 * z[:, 0])
         / (z[:, 0] * (1 - lam[0] * z[:, 0]) ** 2),
         CPoint((0.4j,)), lambda lam: 2j * np.pi * 3 * lam ** 2),
    ]
    exact_gap = fd_gap = 0.0
    for f, df, lam, ref in cases:
        want = ref(lam[0])
        exact = differentiate_parametric_integral(f, UNIT_CIRCLE, lam, 0, df).scalar()
        fd = differentiate_parametric_integral(f, UNIT_CIRCLE, lam, 0).scalar()
        exact_gap = max(exact_gap, abs(exact - want))
        fd_gap = max(fd_gap, abs(fd - exact))
    ok = exact_gap <= 1e-10 and fd_gap <= 1e-7
    return ok, f"exact mode vs closed form {exact_gap:.2e} (tol 1e-10); finite difference {fd_gap:.2e} (tol 1e-7)"


HOLOMORPHIC = ["z1^2*z2", "exp(z1+z2)", "1/((z1-2)*(z2+3))", "sin(z1)*cos(z2)", "[z1, exp(z2)]",
               "[[1, z1], [z2^3, sqrt(z1 + 4)]]"]
TAINTED = ["conj(z1)", "z1*conj(z2)", "exp(conj(z1)) + z2", "[z1, conj(z1) + conj(z2)]"]


def diagnostics(src):
    f = parse(src, 2)
    return [
        cr_residual(f, interior_points(UNIT2), domain=UNIT2).verdict,
        negative_spectrum_check(sample_boundary(f, UNIT2)).verdict,
        separate_holomorphy_check(f, domain=UNIT2).verdict,
        weak_holomorphy_probe(f, boundary=UNIT2).verdict,
    ]


def criterion_9():
    bad = [src for src in HOLOMORPHIC if diagnostics(src) != ["pass"] * 4]
    bad += [src for src in TAINTED if diagnostics(src) != ["fail"] * 4]
    # truncation error of the difference operator on a mixed expression
    f = parse("exp(2*z1) + exp(conj(z2))", 2)
    pts = interior_points(UNIT2, 0.5)
    exact = np.stack([np.zeros(len(pts)), np.exp(np.conj(pts[:, 1]))], -1)
    err = [float(np.max(np.abs(cr_operator(f, pts, h)[..., 0] - exact))) for h in (1e-2, 5e-3)]
    ratio = err[1] / err[0]
    ok = not bad and ratio <= 0.35
    return ok, f"non-unanimous: {bad or 'none'}; residual(h/2)/residual(h) = {ratio:.3f} (need <= 0.35)"


def criterion_10():
    h = 1e-3
    cases = [
        ("z^2", 1, (0.2 - 0.1j,), (0, 2), lambda z: -2),
        ("z", 1, (0.1j,), (0, 1), lambda z: 1j),
        ("exp(z1)", 2, (0.3 - 0.2j, 0.1), (1, 1, 0, 0), lambda z: 1j * cmath.exp(z[0])),
    ]
    worst = 0.0
    for src, d, z, beta, want in cases:
        got = complex(np.ravel(real_partial(parse(src, d), z, beta, h))[0])
        worst = max(worst, abs(got - want(z)))
    tol = max(1e-6, h ** 2)
    return worst <= tol, f"max error {worst:.2e} (tol {tol:.0e})"


def random_matrix_polynomial(rng, degree):
    """2x2 matrix of polynomials in z1, z2 with exact total degree ``degree``."""
    entries = []
    for i in range(4):
        terms = []
        top = degree if i == 0 else int(rng.integers(0, degree + 1))
        for beta in graded_indices(2, top):
            c = complex(rng.normal(), rng.normal())
            terms.append(f"({c.real!r} + {c.imag!r}i)*z1^{beta[0]}*z2^{beta[1]}")
        entries.append(" + ".join(terms))
    return parse(f"[[{entries[0]}, {entries[1]}], [{entries[2]}, {entries[3]}]]", 2)


def criterion_11():
    rng = np.random.default_rng(SEED)
    wrong = 0
    for _ in range(10):
        deg = int(rng.integers(1, 5))
        f = random_matrix_polynomial(rng, deg)
        wrong += (not liouville_test(f, deg).is_poly_deg_k) + liouville_test(f, deg - 1).is_poly_deg_k
    exp_wrong = sum(liouville_test(parse("exp(z1)", 2), k).is_poly_deg_k for k in range(7))
    ok = wrong == 0 and exp_wrong == 0
    return ok, f"{wrong} misclassified polynomials, {exp_wrong} misclassified exp tests"


def sinc_product(z):
    u = z[:, 0] * z[:, 1]
    return np.sin(u) / u


def difference_quotient(z):
    return (z[:, 0] ** 2 - z[:, 1] ** 2) / (z[:, 0] - z[:, 1])


def criterion_12():
    rng = np.random.default_rng(SEED)
    product_zero = ThinSetSpec(parse("z1*z2", 2), 2)
    diagonal = ThinSetSpec(parse("z1-z2", 2), 2)
    worst = 0.0
    for k in range(10):
        t = complex(*rng.uniform(-0.5, 0.5, 2))
        target = (0, t) if k % 2 else (t, 0)
        disc = Polydisc(CPoint(target), (0.3, 0.3))
        val = riemann_extend(Integrand(sinc_product, 2), product_zero, target, [disc]).scalar()
        worst = max(worst, abs(val - 1))
        disc = Polydisc(CPoint((t, t)), (0.3, 0.3))
        val = riemann_extend(Integrand(difference_quotient, 2), diagonal, (t, t), [disc]).scalar()
        worst = max(worst, abs(val - 2 * t))
    # boundary grids that run through the thin sets
    g1 = extended_function(Integrand(sinc_product, 2), product_zero, 0.25)
    g2 = extended_function(Integrand(difference_quotient, 2), diagonal, 0.25)
    spectra = [
        negative_spectrum_check(sample_boundary(g1, Polydisc(CPoint((0.5, 0.5)), (0.5, 0.5)), 16)).verdict,
        negative_spectrum_check(sample_boundary(g2, UNIT2, 16)).verdict,
    ]
    ok = worst <= 1e-9 and spectra == ["pass", "pass"]
    return ok, f"max extension error {worst:.2e} (tol 1e-9); spectrum verdicts {spectra}"


def criterion_13():
    f = parse("exp(z)", 1)
    poly = parse(" + ".join(f"{1 / math.factorial(k)!r}*z^{k}" for k in range(11)), 1)
    r = identity_certify(f, poly, Polydisc(CPoint((0,)), (1,)), 12)
    want = 1 / math.factorial(11)
    rel = abs(r.max_coeff_gap - want) / want
    ok = (not r.equal_on_disc) and r.witness is not None and r.witness.exponents == (11,) and rel <= 0.1
    witness = None if r.witness is None else list(r.witness.exponents)
    return ok, f"witness {witness}, gap {r.max_coeff_gap:.4e} vs 1/11! {want:.4e} ({rel:.1%} off)"


def criterion_14():
    f = parse("exp(z1)", 2)
    results = {eps: approx_polynomial(f, UNIT2, eps) for eps in (1e-2, 1e-3)}
    within = all(r.certified_error <= 2 * eps for eps, r in results.items())
    monotone = results[1e-3].certified_error <= results[1e-2].certified_error + 1e-12
    detail = ", ".join(f"eps={eps:g}: error {r.certified_error:.2e} deg {r.degree_used}" for eps, r in results.items())
    return within and monotone, f"{detail}; monotone {monotone}"


def criterion_15():
    commands = [
        ["taylor", "--expr", "exp(z1+z2)", "--d", "2", "--radii", "1,1", "--max-degree", "6"],
        ["check-holo", "--expr", "exp(z1)*conj(z2)", "--d", "2", "--radii", "1,1", "--nodes", "32"],
        ["approx", "--expr", "exp(z1)", "--d", "2", "--radii", "1,1", "--eps", "1e-2"],
        ["extend", "--expr", "(z1^2-z2^2)/(z1-z2)", "--d", "2", "--thin", "z1-z2", "--target", "0.3,0.3",
         "--format", "json"],
    ]
    differing = []
    for argv in commands:
        outs = []
        for _ in range(2):
            buf = io.StringIO()
            assert run(argv, buf, io.StringIO()) == 0
            outs.append(buf.getvalue().encode())
        if outs[0] != outs[1]:
            differing.append(argv[0])
    return not differing, f"{len(commands)} commands, differing outputs: {differing or 'none'}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8, criterion_9, criterion_10, criterion_11, criterion_12, criterion_13, criterion_14,
            criterion_15]


RESULT_LINES = {}


def report(number):
    ok, detail = CRITERIA[number - 1]()
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    RESULT_LINES[number] = line
    print(line)
    return ok, line


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1))
def test_criterion(number):
    ok, line = report(number)
    assert ok, line


if __name__ == "__main__":
    results = [report(n)[0] for n in range(1, len(CRITERIA) + 1)]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
