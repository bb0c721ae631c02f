"""Removable singularities, identity certification and polynomial approximation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cauchy import cauchy_derivative, sample_boundary, taylor_coefficients
from .core import (
    CPoint,
    MultiIndex,
    Polydisc,
    VectorValue,
    boundary_grid,
    complexify,
    realify,
)
from .errors import (
    DegreeCapError,
    DomainError,
    EvaluationError,
    ExtensionError,
    ResolutionError,
)
from .quadrature import Integrand, as_integrand
from .series import TaylorSeries, geometric_tail

EXTENSION_NODES = 64
PERTURB_FRACTION = 0.05
PERTURB_STEPS = 8
THIN_TAU = 1e-8
IDENTITY_TOL = 1e-10
DEGREE_CAP = 64
MODULUS_RINGS = 4
MODULUS_ANGLES = 8
MODULUS_LEVELS = 42
MODULUS_SEED = 20240611


# ---------------------------------------------------------------------------
# thin sets and removable singularities


@dataclass(frozen=True)
class ThinSetSpec:
    """Zero set of a polynomial ``p``; points with ``|p| <= tau`` count as on the set.

    ``tau=None`` means ``1e-8 * (1 + max |p|)`` over whichever grid is tested.
    """

    polynomial: object
    d: int
    tau: float | None = None

    def __post_init__(self):
        p = as_integrand(self.polynomial, self.d)
        object.__setattr__(self, "polynomial", p)
        rng = np.random.default_rng(0)
        probe = rng.uniform(-2, 2, (32, self.d)) + 1j * rng.uniform(-2, 2, (32, self.d))
        try:
            vals = p(probe)
        except EvaluationError:
            vals = np.ones(1)
        if np.all(vals == 0):
            raise DomainError("the defining polynomial of a thin set must not vanish identically")

    def values(self, points) -> np.ndarray:
        return np.abs(np.asarray(self.polynomial(points)).reshape(len(points), -1)[:, 0])

    def threshold(self, values) -> float:
        if self.tau is not None:
            return self.tau
        return THIN_TAU * (1 + float(np.max(values, initial=0.0)))

    def hits(self, points) -> np.ndarray:
        vals = self.values(points)
        return vals <= self.threshold(vals)


def _perturbations(disc: Polydisc):
    """The disc itself, then up to 8 shrunken copies with unequal per-axis factors."""
    yield disc, 0
    d = disc.d
    for k in range(1, PERTURB_STEPS + 1):
        factors = [1 - PERTURB_FRACTION * (k / PERTURB_STEPS) * (j + 1) / d for j in range(d)]
        yield disc.scaled(factors), k


def admissible_disc(f: Integrand, thin: ThinSetSpec, target: CPoint, disc: Polydisc,
                    nodes=EXTENSION_NODES):
    """First perturbation of ``disc`` whose boundary grid avoids the thin set.

    Returns ``(samples, attempt)`` or ``None``.
    """
    for candidate, attempt in _perturbations(disc):
        if not candidate.contains(target):
            continue
        grid = boundary_grid(candidate, nodes).points().reshape(-1, disc.d)
        if np.any(thin.hits(grid)):
            continue
        try:
            samples = sample_boundary(f, candidate, nodes)
        except EvaluationError:
            continue
        return samples, attempt
    return None


def riemann_extend(f, thin: ThinSetSpec, target, search_discs, nodes=EXTENSION_NODES) -> VectorValue:
    """Value at ``target`` of the holomorphic extension of ``f`` across a thin set.

    Takes the first search disc containing ``target`` whose distinguished
    boundary (possibly shrunk by up to 5% per axis) stays off the thin
    set, and evaluates Cauchy's formula with ``beta = 0`` there.  The caller
    asserts that ``f`` is bounded near the thin set.
    """
    target = CPoint.of(target)
    f = as_integrand(f, target.d)
    discs = list(search_discs)
    if not any(disc.contains(target) for disc in discs):
        raise DomainError(f"target {target.coords} lies outside every search disc")
    blocked = []
    for disc in discs:
        if not disc.contains(target):
            continue
        found = admissible_disc(f, thin, target, disc, nodes)
        if found is None:
            blocked.append(disc)
            continue
        samples, attempt = found
        value = cauchy_derivative(samples, target, MultiIndex.zero(target.d))
        flags = value.flags + ((f"perturbed:{attempt}",) if attempt else ())
        return VectorValue(value.space, value.entries, flags)
    raise ExtensionError(
        "no search disc has a distinguished boundary clear of the thin set: "
        + "; ".join(f"center={b.center.coords} radii={b.radii}" for b in blocked),
        blocked,
    )


def extended_function(f, thin: ThinSetSpec, search_radii, nodes=EXTENSION_NODES) -> Integrand:
    """``f`` off the thin set, its Riemann extension on it.

    Points on the thin set are extended from the polydisc of ``search_radii``
    centred at the point itself.
    """
    f = as_integrand(f, thin.d)
    radii = tuple(np.broadcast_to(np.asarray(search_radii, dtype=float), (thin.d,)))

    def func(points):
        pts = np.asarray(points, dtype=complex)
        on = thin.hits(pts)
        out = np.empty((len(pts),) + f.space.shape, dtype=complex)
        if np.any(~on):
            out[~on] = f(pts[~on])
        for i in np.flatnonzero(on):
            disc = Polydisc(CPoint(tuple(pts[i])), radii)
            out[i] = riemann_extend(f, thin, pts[i], [disc], nodes).entries
        return out

    return Integrand(func, thin.d, f.space, name=f"extension of {f.name}")


# ---------------------------------------------------------------------------
# identity theorem


@dataclass
class IdentityResult:
    equal_on_disc: bool
    max_coeff_gap: float
    witness: MultiIndex | None
    degree: int
    tol: float

    def __bool__(self):
        return self.equal_on_disc

    def to_json(self) -> dict:
        return {
            "equal_on_disc": self.equal_on_disc,
            "max_coeff_gap": self.max_coeff_gap,
            "witness": None if self.witness is None else list(self.witness.exponents),
            "degree": self.degree,
            "tol": self.tol,
        }


def identity_certify(f, g, disc: Polydisc, degree: int, tol: float = IDENTITY_TOL,
                     nodes=None, seminorm=None) -> IdentityResult:
    """Compare the Taylor coefficients of ``f - g`` at the disc center with zero.

    If every derivative of ``f - g`` vanishes at one point of a connected
    domain where both are holomorphic, then ``f = g`` there; this checks
    the derivatives up to ``degree`` at resolution ``tol``.
    """
    if degree < 1:
        raise DomainError("degree must be at least 1")
    f = as_integrand(f, disc.d)
    g = as_integrand(g, disc.d, f.space)
    if nodes is None:
        nodes = max(64, 2 * (degree + 1))
    diff = Integrand(lambda z: f(z) - g(z), disc.d, f.space, name=f"{f.name} - {g.name}")
    series = taylor_coefficients(sample_boundary(diff, disc, nodes), degree)
    s = f.space.seminorm(seminorm)
    vdim = len(f.space.shape)
    gap, witness = 0.0, None
    for beta, coeff in series.items():
        value = float(s(coeff, vdim))
        gap = max(gap, value)
        if witness is None and value > tol:
            witness = beta
    return IdentityResult(witness is None, gap, witness, degree, tol)


# ---------------------------------------------------------------------------
# polynomial approximation in the polydisc algebra


@dataclass
class ApproxResult:
    polynomial: TaylorSeries
    certified_error: float
    r_used: float
    degree_used: int
    delta: float
    eps: float
    remainder_estimate: float
    tail_bound: float
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "polynomial": self.polynomial.to_json(),
            "expression": self.polynomial.to_expression(),
            "certified_error": self.certified_error,
            "r_used": self.r_used,
            "degree_used": self.degree_used,
            "delta": self.delta,
            "eps": self.eps,
            "remainder_estimate": self.remainder_estimate,
            "tail_bound": self.tail_bound,
            "notes": self.notes,
        }


def closed_disc_points(disc: Polydisc, rings: int, angles: int, center: bool) -> np.ndarray:
    """Tensor grid of the closed polydisc: rings at ``rho k / rings`` per axis."""
    per_axis = []
    for w, r in zip(disc.center.coords, disc.radii):
        pts = [w] if center else []
        for k in range(1, rings + 1):
            pts.extend(w + r * k / rings * np.exp(2j * np.pi * np.arange(angles) / angles))
        per_axis.append(np.array(pts, dtype=complex))
    return np.stack(np.meshgrid(*per_axis, indexing="ij"), axis=-1).reshape(-1, disc.d)


def validation_points(disc: Polydisc) -> np.ndarray:
    """33 points per axis (center plus 4 rings of 8), tensorised."""
    return closed_disc_points(disc, 4, 8, center=True)


def _clip_to_disc(points: np.ndarray, disc: Polydisc) -> np.ndarray:
    w = disc.center.array()
    off = points - w
    mag = np.abs(off)
    rho = np.asarray(disc.radii)
    scale = np.where(mag > rho, rho / np.where(mag == 0, 1, mag), 1.0)
    return w + off * scale


def modulus_of_continuity(f: Integrand, disc: Polydisc, eps: float, seminorm=None,
                          seed: int = MODULUS_SEED) -> float:
    """Largest sampled step ``delta`` with ``p(f(x) - f(y)) < eps`` whenever ``|x - y| <= delta``.

    Base points form a 32-per-axis grid of the closed disc; partners are
    displaced along every real coordinate direction and four random ones,
    then clipped back into the disc.  Steps halve from the diameter.
    """
    d = disc.d
    base = closed_disc_points(disc, MODULUS_RINGS, MODULUS_ANGLES, center=False)
    rng = np.random.default_rng(seed)
    dirs = [s * e for e in np.eye(2 * d) for s in (1.0, -1.0)]
    extra = rng.normal(size=(4, 2 * d))
    dirs.extend(extra / np.linalg.norm(extra, axis=1, keepdims=True))
    dirs = np.asarray(dirs)
    s = f.space.seminorm(seminorm)
    vdim = len(f.space.shape)
    f_base = f(base)
    x = realify(base)
    diameter = 2 * math.sqrt(sum(r * r for r in disc.radii))
    for level in range(MODULUS_LEVELS):
        delta = diameter * 2.0 ** -level
        partners = complexify(x[:, None, :] + delta * dirs[None, :, :])
        partners = _clip_to_disc(partners, disc)
        vals = f(partners)
        gaps = s(vals - f_base[:, None], vdim)
        if np.max(gaps) < eps:
            return delta
    raise ResolutionError(
        f"modulus of continuity not resolved: gaps stay above {eps:g} down to step "
        f"{diameter * 2.0 ** -(MODULUS_LEVELS - 1):.3g}"
    )


def approx_polynomial(f, disc: Polydisc, eps: float, seminorm=None, degree_cap: int = DEGREE_CAP,
                      nodes=None, seed: int = MODULUS_SEED) -> ApproxResult:
    """Polynomial within ``2 eps`` of ``f`` on the closed polydisc.

    1. estimate the modulus of continuity ``delta`` for ``eps``;
    2. take ``r`` at the midpoint of ``(1 - delta / (sqrt(d) max_j(R_j + |z_j|)), 1)``
       (clipped below at 0);
    3. Taylor-expand the dilation ``g(w) = f(z + r (w - z))``, holomorphic on
       the ``1/r``-enlarged polydisc, on radii between ``R`` and ``R / r``, and
       truncate at the first degree whose remainder over ``D_R`` is at most ``eps``;
    4. measure ``p(f - T_N)`` on a 33-per-axis validation grid.
    """
    if not eps > 0:
        raise DomainError("eps must be positive")
    f = as_integrand(f, disc.d)
    d = disc.d
    s = f.space.seminorm(seminorm)
    vdim = len(f.space.shape)
    center = disc.center.array()
    R = np.asarray(disc.radii)

    delta = modulus_of_continuity(f, disc, eps, s.name, seed)
    scale = math.sqrt(d) * float(np.max(R + np.abs(center)))
    lower = max(1 - delta / scale, 0.0)
    r = 0.5 * (lower + 1)

    g = Integrand(lambda w: f(center + r * (w - center)), d, f.space, name=f"{f.name} dilated by {r:.6g}")
    stretch = 0.5 * (1 + 1 / r)
    outer = disc.scaled(stretch)
    if nodes is None:
        nodes = 2 * (degree_cap + 1)
    series = taylor_coefficients(sample_boundary(g, outer, nodes), degree_cap)

    # remainder of g - T_N over the closed polydisc, read off its distinguished boundary
    check = boundary_grid(disc, nodes).points().reshape(-1, d)
    g_check = g(check)
    shift = check - center
    partial = np.zeros_like(g_check)
    pad = (slice(None),) + (None,) * vdim
    by_degree: dict[int, list] = {}
    for beta, coeff in series.items():
        by_degree.setdefault(beta.order, []).append((beta, coeff))
    t_corner = np.full(d, 1 / stretch)
    M = series.boundary_max[s.name] if s.name in series.boundary_max else float(
        np.max(s(sample_boundary(g, outer, nodes).values, vdim)))
    chosen = None
    for n in range(degree_cap + 1):
        for beta, coeff in by_degree.get(n, []):
            partial = partial + beta.power(shift)[pad] * coeff
        remainder = float(np.max(s(g_check - partial, vdim)))
        tail = M * geometric_tail(t_corner, n)
        if min(remainder, tail) <= eps:
            chosen = (n, remainder, tail)
            break
    if chosen is None:
        raise DegreeCapError(f"truncation remainder stays above {eps:g} up to degree {degree_cap}")
    n, remainder, tail = chosen
    poly = series.truncated(n)

    valid = validation_points(disc)
    err = s(f(valid) - poly.evaluate_many(valid, check=False), vdim)
    return ApproxResult(poly, float(np.max(err)), r, n, delta, eps, remainder, tail)
