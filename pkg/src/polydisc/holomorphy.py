"""Finite-resolution holomorphy diagnostics.

Every verdict means "pass at the stated resolution": a sampled check can
falsify holomorphy but never prove it.  The checks are

* ``cr_residual``: the Cauchy-Riemann operator
  ``dbar_j f = (d/dx_j + i d/dy_j) f / 2`` by real central differences;
* ``negative_spectrum_check``: boundary DFT mass at negative frequencies,
  which must vanish for a power series;
* ``separate_holomorphy_check``: the same spectral test on every
  one-variable slice through a set of base points;
* ``weak_holomorphy_probe``: the spectral test after composing with linear
  functionals, plus a local-boundedness sweep;
* ``real_complex_relation_check``: real partial derivatives of ``f o phi^-1``
  against ``i^(sum of imaginary orders)`` times the complex derivative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .cauchy import BoundarySamples, boundary_spectrum, cauchy_derivative, sample_boundary
from .core import (
    CPoint,
    MultiIndex,
    Polydisc,
    SpaceDescriptor,
    complexify,
    coordinate_probes,
    probes_span,
    realify,
)
from .errors import DomainError, EvaluationError
from .quadrature import as_integrand

CR_STEP = 1e-3
FD_FLOOR = 1e-6
FIT_SLACK = 1.1
SPECTRAL_TOL = 1e-10
SPECTRAL_NODES = 64
HARTOGS_POINTS = 8
SLICE_FRACTION = 0.45
BASE_FRACTION = 0.5


@dataclass
class DiagnosticReport:
    check: str
    verdict: str
    residuals: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    resolution: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if self.verdict not in ("pass", "fail", "inconclusive"):
            raise ValueError(f"unknown verdict {self.verdict!r}")

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "verdict": self.verdict,
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "thresholds": {k: float(v) for k, v in self.thresholds.items()},
            "resolution": self.resolution,
            "witnesses": self.witnesses,
            "notes": self.notes,
        }


def merge_reports(reports, check: str = "holomorphy") -> DiagnosticReport:
    """Combine reports in input order; any fail wins, then any inconclusive."""
    verdicts = [r.verdict for r in reports]
    verdict = "fail" if "fail" in verdicts else "inconclusive" if "inconclusive" in verdicts else "pass"
    merged = DiagnosticReport(check, verdict)
    for r in reports:
        for k, v in r.residuals.items():
            merged.residuals[f"{r.check}.{k}"] = v
        for k, v in r.thresholds.items():
            merged.thresholds[f"{r.check}.{k}"] = v
        merged.resolution[r.check] = r.resolution
        merged.witnesses.extend(dict(w, check=r.check) for w in r.witnesses)
        merged.notes.extend(f"{r.check}: {n}" for n in r.notes)
    return merged


def _pt(z) -> list:
    return [[float(c.real), float(c.imag)] for c in np.atleast_1d(z)]


def interior_points(disc: Polydisc, fraction: float = 0.5, rings: int = 2, angles: int = 4) -> np.ndarray:
    """Tensor grid of interior points: the center plus rings per axis."""
    per_axis = []
    for w, r in zip(disc.center.coords, disc.radii):
        pts = [w]
        for k in range(1, rings + 1):
            rad = fraction * r * k / rings
            pts.extend(w + rad * np.exp(2j * np.pi * (np.arange(angles) + 0.5 * k) / angles))
        per_axis.append(np.array(pts, dtype=complex))
    return np.stack(np.meshgrid(*per_axis, indexing="ij"), axis=-1).reshape(-1, disc.d)


def _fd_threshold(r_fine: float, r_coarse: float, h_fine: float, h_coarse: float, floor: float) -> tuple[float, float]:
    """Fit ``r = A + C h^2`` through two step sizes; threshold ``max(floor, slack C h^2)``."""
    denom = h_coarse**2 - h_fine**2
    C = max(0.0, r_coarse - r_fine) / denom
    return max(floor, FIT_SLACK * C * h_fine**2), C


# ---------------------------------------------------------------------------
# Cauchy-Riemann


def cr_operator(f, points, h: float = CR_STEP) -> np.ndarray:
    """``dbar_j f`` at each point by central differences in realified coordinates.

    Returns an array of shape ``(n, d, *value_shape)``.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    f = as_integrand(f, pts.shape[1])
    d = f.d
    x = realify(pts)
    out = []
    for j in range(d):
        ex = np.zeros(2 * d)
        ey = np.zeros(2 * d)
        ex[2 * j] = h
        ey[2 * j + 1] = h
        stencil = np.stack([x + ex, x - ex, x + ey, x - ey], axis=1)
        vals = f(complexify(stencil))
        dx = (vals[:, 0] - vals[:, 1]) / (2 * h)
        dy = (vals[:, 2] - vals[:, 3]) / (2 * h)
        out.append(0.5 * (dx + 1j * dy))
    return np.stack(out, axis=1)


def _check_neighbourhoods(points: np.ndarray, domain: Polydisc | None, reach: float) -> None:
    if domain is None:
        return
    off = np.abs(points - domain.center.array()) + reach
    bad = np.any(off >= np.asarray(domain.radii), axis=1)
    if np.any(bad):
        p = points[np.argmax(bad)]
        raise DomainError(f"point {tuple(p)} has no {reach:g}-neighbourhood inside the domain")


def cr_residual(f, points=None, h: float = CR_STEP, domain: Polydisc | None = None,
                seminorm=None, floor: float = FD_FLOOR) -> DiagnosticReport:
    """Cauchy-Riemann residual ``max_j,z p(dbar_j f(z))``.

    Residuals at steps ``h`` and ``2h`` fit ``r = A + C h^2``; the verdict is
    pass when ``r(h) <= max(floor, 1.1 C h^2)``, i.e. when the residual is
    explained by truncation error alone.
    """
    if domain is not None:
        d = domain.d
    elif points is not None:
        d = np.atleast_2d(np.asarray(points)).shape[1]
    else:
        d = None
    f = as_integrand(f, d)
    if points is None:
        if domain is None:
            domain = Polydisc(CPoint((0j,) * f.d), (1.0,) * f.d)
        points = interior_points(domain)
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    _check_neighbourhoods(pts, domain, 2 * 2 * h)
    s = f.space.seminorm(seminorm)
    vdim = len(f.space.shape)

    def residual(step):
        dbar = cr_operator(f, pts, step)
        return s(dbar, vdim)  # (n, d)

    fine = residual(h)
    coarse = residual(2 * h)
    r_fine, r_coarse = float(fine.max()), float(coarse.max())
    threshold, C = _fd_threshold(r_fine, r_coarse, h, 2 * h, floor)
    verdict = "pass" if r_fine <= threshold else "fail"
    report = DiagnosticReport(
        "cr_residual", verdict,
        residuals={"cr": r_fine, "cr_coarse": r_coarse},
        thresholds={"cr": threshold, "fitted_C": C},
        resolution={"h": h, "points": len(pts), "seminorm": s.name},
    )
    if verdict == "fail":
        n, j = np.unravel_index(np.argmax(fine), fine.shape)
        report.witnesses.append({"point": _pt(pts[n]), "axis": int(j), "residual": float(fine[n, j])})
    return report


# ---------------------------------------------------------------------------
# spectral tests


def signed_frequencies(nodes) -> list[np.ndarray]:
    """DFT bin ``k`` as a signed frequency; the ambiguous Nyquist bin counts as positive."""
    return [np.where(np.arange(n) <= n // 2, np.arange(n), np.arange(n) - n) for n in nodes]


def negative_spectrum_check(samples: BoundarySamples, tol: float = SPECTRAL_TOL,
                            seminorm=None) -> DiagnosticReport:
    """Pass when every DFT coefficient with a negative frequency index is negligible.

    Negligible means ``p(c_k) <= tol * (1 + M)``, with ``M`` the boundary
    maximum of the seminorm.
    """
    s = samples.space.seminorm(seminorm)
    spec = boundary_spectrum(samples)
    mags = s(spec, len(samples.space.shape))
    freqs = signed_frequencies(samples.nodes)
    mesh = np.meshgrid(*freqs, indexing="ij")
    negative = np.zeros(samples.nodes, dtype=bool)
    for m in mesh:
        negative |= m < 0
    masked = np.where(negative, mags, 0.0)
    worst = float(masked.max())
    M = samples.max_seminorm(s.name)
    threshold = tol * (1 + M)
    verdict = "pass" if worst <= threshold else "fail"
    report = DiagnosticReport(
        "negative_spectrum", verdict,
        residuals={"negative_mass": worst},
        thresholds={"negative_mass": threshold},
        resolution={"nodes": list(samples.nodes), "tol": tol, "seminorm": s.name},
    )
    if verdict == "fail":
        ix = np.unravel_index(np.argmax(masked), masked.shape)
        report.witnesses.append({
            "frequency": [int(m[ix]) for m in mesh],
            "magnitude": worst,
        })
    return report


def halton(n: int, dim: int, skip: int = 1) -> np.ndarray:
    """First ``n`` points of the Halton sequence in ``[0, 1)^dim``."""
    primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53]
    if dim > len(primes):
        raise DomainError(f"Halton points are limited to {len(primes)} dimensions")
    out = np.empty((n, dim))
    for k in range(dim):
        base = primes[k]
        for i in range(n):
            f, r, x = 1.0, 0.0, i + skip
            while x:
                f /= base
                r += f * (x % base)
                x //= base
            out[i, k] = r
    return out


def default_base_points(disc: Polydisc, count: int = HARTOGS_POINTS,
                        fraction: float = BASE_FRACTION) -> np.ndarray:
    """Low-discrepancy interior points with ``|z_j - w_j| <= fraction * rho_j``."""
    u = halton(count, 2 * disc.d)
    radius = fraction * np.sqrt(u[:, 0::2]) * np.asarray(disc.radii)
    angle = 2 * np.pi * u[:, 1::2]
    return disc.center.array() + radius * np.exp(1j * angle)


def separate_holomorphy_check(f, base_points=None, radii=None, tol: float = SPECTRAL_TOL,
                              nodes: int = SPECTRAL_NODES, domain: Polydisc | None = None,
                              seminorm=None) -> DiagnosticReport:
    """Spectral test on every one-variable slice ``zeta -> f(z_1, .., zeta, .., z_d)``.

    ``radii[j]`` is the slice radius on axis ``j``; defaults put eight
    low-discrepancy base points in the inner half of ``domain`` and use
    slices of radius ``0.45 rho_j``.
    """
    d = domain.d if domain is not None else None
    f = as_integrand(f, d)
    if domain is None:
        domain = Polydisc(CPoint((0j,) * f.d), (1.0,) * f.d)
    if base_points is None:
        base_points = default_base_points(domain)
    if radii is None:
        radii = tuple(SLICE_FRACTION * r for r in domain.radii)
    radii = tuple(np.broadcast_to(np.asarray(radii, dtype=float), (f.d,)))
    base = np.atleast_2d(np.asarray(base_points, dtype=complex))
    report = DiagnosticReport("separate_holomorphy", "pass",
                              resolution={"nodes": nodes, "tol": tol, "base_points": len(base),
                                          "slice_radii": list(radii)})
    theta_pts = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    for j in range(f.d):
        worst = 0.0
        for z in base:
            reach = abs(z[j] - domain.center[j]) + radii[j]
            if reach >= domain.radii[j]:
                raise DomainError(f"slice disc around {tuple(z)} on axis {j} escapes the domain")
            pts = np.repeat(z[None, :], nodes, axis=0)
            pts[:, j] = z[j] + radii[j] * theta_pts
            vals = f(pts)
            sl = BoundarySamples(Polydisc(CPoint((z[j],)), (radii[j],)), (nodes,), vals, f.space)
            sub = negative_spectrum_check(sl, tol, seminorm)
            worst = max(worst, sub.residuals["negative_mass"])
            report.thresholds[f"axis{j}"] = max(report.thresholds.get(f"axis{j}", 0.0),
                                                sub.thresholds["negative_mass"])
            if not sub.passed:
                report.verdict = "fail"
                report.witnesses.append({"axis": j, "base_point": _pt(z), **sub.witnesses[0]})
        report.residuals[f"axis{j}"] = worst
    return report


def weak_holomorphy_probe(f, probes=None, boundary: Polydisc | None = None,
                          tol: float = SPECTRAL_TOL, nodes: int = SPECTRAL_NODES,
                          sweep_points=None) -> DiagnosticReport:
    """Spectral test of each scalar composition ``probe o f`` on the boundary grid.

    A spanning probe set determines boundedness (the weak-holomorphy
    clause applies); the local-boundedness clause additionally needs the
    sweep over interior neighbourhoods to find only finite values.  When
    every probe passes but the probes do not span the dual, the verdict is
    ``inconclusive``.
    """
    f = as_integrand(f, boundary.d if boundary is not None else None)
    if boundary is None:
        boundary = Polydisc(CPoint((0j,) * f.d), (1.0,) * f.d)
    if probes is None:
        probes = coordinate_probes(f.space)
    probes = list(probes)
    if not probes:
        raise DomainError("at least one probe is required")
    samples = sample_boundary(f, boundary, nodes)
    spanning = probes_span(probes)
    scalar = SpaceDescriptor.scalar()
    report = DiagnosticReport("weak_holomorphy", "pass",
                              resolution={"nodes": list(samples.nodes), "tol": tol, "probes": len(probes),
                                          "spanning": spanning})
    for i, probe in enumerate(probes):
        sub = negative_spectrum_check(samples.map(probe.apply, scalar), tol)
        report.residuals[f"probe{i}"] = sub.residuals["negative_mass"]
        report.thresholds[f"probe{i}"] = sub.thresholds["negative_mass"]
        if not sub.passed:
            report.verdict = "fail"
            report.witnesses.append({"probe": i, **sub.witnesses[0]})

    if sweep_points is None:
        sweep_points = interior_points(boundary, fraction=0.9)
    sweep = np.atleast_2d(np.asarray(sweep_points, dtype=complex))
    eps = 1e-3 * min(boundary.radii)
    offsets = np.array([0] + [eps * np.exp(2j * np.pi * k / 4) for k in range(4)])
    bounded = True
    worst = 0.0
    for z in sweep:
        hood = np.repeat(z[None, :], len(offsets) * f.d, axis=0)
        for j in range(f.d):
            hood[j * len(offsets):(j + 1) * len(offsets), j] += offsets
        try:
            worst = max(worst, float(np.max(f.space.norm_values(f(hood)))))
        except EvaluationError as exc:
            bounded = False
            report.witnesses.append({"unbounded_near": _pt(z), "error": str(exc)})
    report.residuals["local_sup"] = worst
    report.resolution["sweep_neighbourhoods"] = len(sweep)
    if not bounded:
        report.verdict = "fail"

    clauses = []
    if spanning:
        clauses.append("e: spanning probe set determines boundedness")
        if bounded:
            clauses.append("f: separating probe set with locally bounded sweep")
    else:
        report.notes.append("probe set not spanning - condition e) not instantiated")
        if report.verdict == "pass":
            report.verdict = "inconclusive"
    report.resolution["clauses"] = clauses
    return report


# ---------------------------------------------------------------------------
# real versus complex derivatives

_STENCILS = {
    0: {0: 1.0},
    1: {1: 0.5, -1: -0.5},
    2: {1: 1.0, 0: -2.0, -1: 1.0},
    3: {2: 0.5, 1: -1.0, -1: 1.0, -2: -0.5},
}


def real_partial(f, z, beta, h: float) -> np.ndarray:
    """``d^beta_R (f o phi^-1)`` at ``phi(z)`` by iterated central differences."""
    z = CPoint.of(z)
    beta = tuple(int(b) for b in beta)
    f = as_integrand(f, z.d)
    if len(beta) != 2 * z.d:
        raise DomainError(f"real multi-index must have length {2 * z.d}")
    if any(b not in _STENCILS for b in beta):
        raise DomainError("real derivative orders above 3 per direction are not supported")
    x0 = realify(z)
    offsets, weights = [], []
    for combo in product(*[_STENCILS[b].items() for b in beta]):
        offsets.append([o for o, _ in combo])
        weights.append(np.prod([w for _, w in combo]))
    pts = complexify(x0 + h * np.asarray(offsets, dtype=float))
    vals = f(pts)
    w = np.asarray(weights) / h ** sum(beta)
    return np.tensordot(w, vals, axes=(0, 0))


def real_complex_relation_check(f, z, beta, h: float = CR_STEP, radii=0.5,
                                nodes: int = SPECTRAL_NODES, domain: Polydisc | None = None,
                                seminorm=None, floor: float = FD_FLOOR) -> DiagnosticReport:
    """Compare ``d^beta_R (f o phi^-1)(phi(z))`` with ``i^(beta_2 + beta_4 + ...) d^gamma f(z)``.

    ``beta`` indexes the real directions ``(x_1, y_1, ..., x_d, y_d)`` and
    ``gamma_j = beta_{2j-1} + beta_{2j}``.  The complex side is a Cauchy
    integral on the polydisc of ``radii`` around ``z``.
    """
    z = CPoint.of(z)
    f = as_integrand(f, z.d)
    beta = tuple(int(b) for b in beta)
    if len(beta) != 2 * z.d:
        raise DomainError(f"real multi-index must have length {2 * z.d}")
    if sum(beta) > 3:
        raise DomainError("the relation check supports |beta| <= 3")
    reach = 2 * 2 * h
    _check_neighbourhoods(z.array()[None, :], domain, reach)
    disc = Polydisc(z, radii)
    if domain is not None:
        _check_neighbourhoods(z.array()[None, :], domain, max(disc.radii))
    gamma = MultiIndex(tuple(beta[2 * j] + beta[2 * j + 1] for j in range(z.d)))
    power = sum(beta[1::2])
    samples = sample_boundary(f, disc, nodes)
    rhs = (1j ** power) * cauchy_derivative(samples, z, gamma).entries
    s = f.space.seminorm(seminorm)
    vdim = len(f.space.shape)
    r_fine = float(s(real_partial(f, z, beta, h) - rhs, vdim))
    r_coarse = float(s(real_partial(f, z, beta, 2 * h) - rhs, vdim))
    threshold, C = _fd_threshold(r_fine, r_coarse, h, 2 * h, floor)
    verdict = "pass" if r_fine <= threshold else "fail"
    report = DiagnosticReport(
        "real_complex_relation", verdict,
        residuals={"relation": r_fine, "relation_coarse": r_coarse},
        thresholds={"relation": threshold, "fitted_C": C},
        resolution={"h": h, "nodes": nodes, "radii": list(disc.radii), "beta": list(beta),
                    "complex_beta": list(gamma.exponents), "i_power": power},
    )
    report.resolution["complex_side"] = [[float(v.real), float(v.imag)] for v in np.ravel(rhs)]
    if verdict == "fail":
        report.witnesses.append({"point": _pt(z.array()), "beta": list(beta), "residual": r_fine})
    return report


def holomorphy_report(f, disc: Polydisc, nodes: int = SPECTRAL_NODES, h: float = CR_STEP,
                      tol: float = SPECTRAL_TOL) -> DiagnosticReport:
    """Run the four holomorphy diagnostics on ``disc`` and merge them."""
    f = as_integrand(f, disc.d)
    reports = [
        cr_residual(f, interior_points(disc), h, domain=disc),
        negative_spectrum_check(sample_boundary(f, disc, nodes), tol),
        separate_holomorphy_check(f, tol=tol, nodes=nodes, domain=disc),
        weak_holomorphy_probe(f, boundary=disc, tol=tol, nodes=nodes),
    ]
    return merge_reports(reports)


__all__ = [
    "DiagnosticReport",
    "cr_operator",
    "cr_residual",
    "negative_spectrum_check",
    "separate_holomorphy_check",
    "weak_holomorphy_probe",
    "real_complex_relation_check",
    "real_partial",
    "holomorphy_report",
    "merge_reports",
    "interior_points",
    "default_base_points",
    "halton",
    "signed_frequencies",
]
