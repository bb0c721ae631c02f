"""Cauchy's integral formula on polydiscs from distinguished-boundary samples.

For ``zeta`` inside ``D_rho(w)``

    d^beta f(zeta) = beta! / (2 pi i)^d  int_{boundary} f(z) / (z - zeta)^(beta + 1) dz.

With the boundary parametrised by ``z_k = w_k + rho_k exp(i theta_k)`` and
the trapezoidal rule on ``N_k`` equispaced angles, each axis contributes
the kernel ``(z_k - w_k) / (N_k (z_k - zeta_k)^(beta_k + 1))``, normalised
so that the rule is exact on constants away from the center.

Taylor coefficients at the center come from one forward DFT of the grid,
``a_beta = rho^-beta / prod(N) * sum f exp(-i beta . theta)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import (
    BoundaryGrid,
    CPoint,
    MultiIndex,
    Polydisc,
    SpaceDescriptor,
    VectorValue,
    boundary_grid,
    complex_from_json,
    complex_to_json,
    graded_indices,
    normalize_nodes,
)
from .errors import AccuracyWarning, AliasingError, DomainError
from .quadrature import as_integrand, tensor_contract
from .series import TaylorSeries

MARGIN_WARNING = 0.9
DEFAULT_NODES = 64


@dataclass(frozen=True, eq=False)
class BoundarySamples:
    """Values of ``f`` on the distinguished-boundary grid of ``disc``.

    ``values`` has shape ``(*nodes, *space.shape)``, indexed by the angle
    numbers ``j_k`` of ``theta_k = 2 pi j_k / N_k``.
    """

    disc: Polydisc
    nodes: tuple[int, ...]
    values: np.ndarray
    space: SpaceDescriptor
    provenance: str = "sampled-from-function"
    _max: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        nodes = normalize_nodes(self.nodes, self.disc.d)
        values = np.array(self.space.coerce(self.values), dtype=complex)
        if values.shape != nodes + self.space.shape:
            raise DomainError(
                f"value grid of shape {values.shape[:len(nodes)]} does not match nodes {nodes}"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("boundary samples must be finite")
        if self.provenance not in ("sampled-from-function", "loaded-from-file"):
            raise DomainError(f"unknown provenance {self.provenance!r}")
        values.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    @property
    def d(self) -> int:
        return self.disc.d

    @property
    def grid(self) -> BoundaryGrid:
        return boundary_grid(self.disc, self.nodes)

    def max_seminorm(self, name=None) -> float:
        s = self.space.seminorm(name)
        if s.name not in self._max:
            self._max[s.name] = float(np.max(s(self.values, len(self.space.shape))))
        return self._max[s.name]

    def boundary_max(self) -> dict[str, float]:
        return {s.name: self.max_seminorm(s.name) for s in self.space.seminorms}

    def map(self, func, space: SpaceDescriptor | None = None) -> "BoundarySamples":
        """Apply ``func`` to the value array (e.g. a functional probe)."""
        vals = np.asarray(func(self.values), dtype=complex)
        if space is None:
            space = SpaceDescriptor.for_shape(vals.shape[self.d:])
        return BoundarySamples(self.disc, self.nodes, vals, space, self.provenance)

    def to_json(self) -> dict:
        flat = self.values.reshape((-1,) + self.space.shape)
        return {
            "d": self.d,
            "center": complex_to_json(self.disc.center.array()),
            "radii": list(self.disc.radii),
            "nodes": list(self.nodes),
            "space": self.space.to_json(),
            "values": [complex_to_json(v) for v in flat],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "BoundarySamples":
        center = CPoint(tuple(complex_from_json(doc["center"])))
        if "d" in doc and int(doc["d"]) != center.d:
            raise DomainError(f"document declares d={doc['d']} but the center has {center.d} coordinates")
        disc = Polydisc(center, tuple(doc["radii"]))
        nodes = tuple(int(n) for n in doc["nodes"])
        space = SpaceDescriptor.from_json(doc.get("space", {}))
        vals = complex_from_json(doc["values"])
        vals = vals.reshape(nodes + space.shape)
        return cls(disc, nodes, vals, space, "loaded-from-file")


def sample_boundary(f, disc: Polydisc, nodes=DEFAULT_NODES, space: SpaceDescriptor | None = None) -> BoundarySamples:
    """Evaluate ``f`` on the distinguished-boundary grid of ``disc``."""
    f = as_integrand(f, disc.d, space)
    grid = boundary_grid(disc, nodes)
    vals = f(grid.points())
    return BoundarySamples(disc, grid.nodes, vals, f.space)


def _check_interior(disc: Polydisc, zeta: CPoint) -> np.ndarray:
    if zeta.d != disc.d:
        raise DomainError(f"point of dimension {zeta.d} for a disc in C^{disc.d}")
    t = disc.relative_offsets(zeta)
    if not np.all(t < 1):
        raise DomainError(f"{zeta.coords} is not strictly inside the polydisc")
    return t


def cauchy_derivative(samples: BoundarySamples, zeta, beta, margin: float = MARGIN_WARNING) -> VectorValue:
    """``d^beta f(zeta)`` by the trapezoidal Cauchy integral over the boundary grid.

    Raises DomainError when ``zeta`` is not strictly inside the disc.  When
    some ``|zeta_j - w_j| > margin * rho_j`` an :class:`AccuracyWarning` is
    issued and the result carries the ``accuracy-margin`` flag.
    """
    disc = samples.disc
    zeta = CPoint.of(zeta)
    beta = MultiIndex.of(beta)
    if beta.d != disc.d:
        raise DomainError(f"multi-index of length {beta.d} for a disc in C^{disc.d}")
    t = _check_interior(disc, zeta)
    flags = ()
    if np.any(t > margin):
        warnings.warn(
            f"point {zeta.coords} is closer to the boundary than {margin} of the radius; "
            "trapezoidal accuracy degrades",
            AccuracyWarning,
            stacklevel=2,
        )
        flags = ("accuracy-margin",)
    grid = samples.grid
    kernels = [
        _axis_kernel(grid.axis_points[k], disc.center[k], samples.nodes[k], zeta[k], beta[k])
        for k in range(disc.d)
    ]
    total = tensor_contract(samples.values, kernels)
    return VectorValue(samples.space, total, flags)


def _axis_kernel(z: np.ndarray, w: complex, n: int, zeta: complex, order: int) -> np.ndarray:
    """Trapezoidal Cauchy weights for the ``order``-th derivative on one axis.

    The raw rule returns the derivatives of ``g q`` with
    ``q = 1 / (1 - ((zeta - w) / rho)^n)``, and applied to ``g = 1`` it
    returns those of ``q`` exactly.  Undoing the Leibniz expansion with
    these sums removes the factor (the barycentric form for ``order = 0``).
    """
    raw = [math.factorial(m) * (z - w) / (n * (z - zeta) ** (m + 1)) for m in range(order + 1)]
    q = [complex(np.sum(k)) for k in raw]
    fixed = []
    for m in range(order + 1):
        acc = raw[m] - sum(math.comb(m, k) * q[m - k] * fixed[k] for k in range(m))
        fixed.append(acc / q[0])
    return fixed[order]


def _check_aliasing(nodes, degree: int) -> None:
    for k, n in enumerate(nodes):
        if n < 2 * (degree + 1):
            raise AliasingError(
                f"axis {k}: {n} nodes cannot resolve degree {degree}; need at least {2 * (degree + 1)}",
                axis=k,
            )


def boundary_spectrum(samples: BoundarySamples) -> np.ndarray:
    """Normalised forward DFT over the grid axes (``exp(-i k theta)``, ``1/prod N``)."""
    axes = tuple(range(samples.d))
    return np.fft.fftn(samples.values, axes=axes) / math.prod(samples.nodes)


def taylor_coefficients(samples: BoundarySamples, max_total_degree: int, method: str = "auto") -> TaylorSeries:
    """All ``a_beta = d^beta f(w) / beta!`` with ``|beta| <= max_total_degree``.

    ``method='fft'`` uses one multidimensional DFT; ``'direct'`` evaluates
    each trapezoidal sum separately (cheaper for a handful of indices).
    ``'auto'`` picks direct sums only for degree 0 or 1.
    """
    n = int(max_total_degree)
    if n < 0:
        raise DomainError("degree must be non-negative")
    _check_aliasing(samples.nodes, n)
    if method == "auto":
        method = "direct" if n <= 1 else "fft"
    rho = np.asarray(samples.disc.radii)
    coeffs = {}
    if method == "fft":
        spectrum = boundary_spectrum(samples)
        for beta in graded_indices(samples.d, n):
            scale = float(np.prod(rho ** -np.asarray(beta.exponents, dtype=float)))
            coeffs[beta] = spectrum[beta.exponents] * scale
    elif method == "direct":
        for beta in graded_indices(samples.d, n):
            coeffs[beta] = direct_coefficient(samples, beta)
    else:
        raise DomainError(f"unknown extraction method {method!r}")
    return TaylorSeries(samples.disc.center, samples.disc.radii, n, coeffs, samples.space,
                        samples.boundary_max())


def direct_coefficient(samples: BoundarySamples, beta) -> np.ndarray:
    """One coefficient ``a_beta`` by its own trapezoidal sum."""
    beta = MultiIndex.of(beta)
    grid = samples.grid
    kernels = []
    for k in range(samples.d):
        rho = samples.disc.radii[k]
        kernels.append(np.exp(-1j * beta[k] * grid.angles[k]) / (samples.nodes[k] * rho ** beta[k]))
    return tensor_contract(samples.values, kernels)


def cauchy_bound(samples: BoundarySamples, beta, zeta, seminorm=None) -> float:
    """Upper bound for ``p(d^beta f(zeta))`` from the boundary maximum.

    ``beta! * M * rho^(1,...,1) / delta^(beta + 1)`` with
    ``delta_j = rho_j - |zeta_j - w_j|``; at the center this is
    ``beta! * M / rho^beta``.
    """
    disc = samples.disc
    zeta = CPoint.of(zeta)
    beta = MultiIndex.of(beta)
    _check_interior(disc, zeta)
    rho = np.asarray(disc.radii)
    delta = rho - disc.offsets(zeta)
    M = samples.max_seminorm(seminorm)
    exps = np.asarray(beta.exponents, dtype=float)
    return float(beta.factorial() * M * np.prod(rho / delta ** (exps + 1)))


def cauchy_constant(outer: Polydisc, inner: Polydisc, beta) -> float:
    """Constant C with ``sup_inner p(d^beta f) <= C max_{boundary of outer} p(f)``.

    The worst point of the closed ``inner`` polydisc is its far corner.
    """
    beta = MultiIndex.of(beta)
    reach = outer.offsets(inner.center) + np.asarray(inner.radii)
    rho = np.asarray(outer.radii)
    delta = rho - reach
    if np.any(delta <= 0):
        raise DomainError("the inner polydisc is not compactly contained in the outer one")
    exps = np.asarray(beta.exponents, dtype=float)
    return float(beta.factorial() * np.prod(rho / delta ** (exps + 1)))


def partial_derivative(f, points, axis: int, order: int = 1, radius: float = 0.5,
                       nodes: int = DEFAULT_NODES) -> np.ndarray:
    """``d^order f / d z_axis^order`` at each point by a 1-D Cauchy integral.

    The circle of ``radius`` around ``z_axis`` is sampled with ``nodes``
    points; the other coordinates are held fixed.  ``points`` is ``(n, d)``.
    """
    pts = np.asarray(points, dtype=complex)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    f = as_integrand(f, pts.shape[1])
    if nodes < 4:
        raise DomainError("at least 4 nodes are required")
    theta = 2 * np.pi * np.arange(nodes) / nodes
    ring = np.repeat(pts[:, None, :], nodes, axis=1)
    ring[:, :, axis] += radius * np.exp(1j * theta)
    vals = f(ring)
    ker = np.exp(-1j * order * theta) * math.factorial(order) / (nodes * radius ** order)
    out = np.einsum("nj...,j->n...", vals, ker)
    return out[0] if single else out
