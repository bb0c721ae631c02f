"""Domain types: points in C^d, multi-indices, polydiscs, value spaces and curves.

Values of E-valued functions are carried as numpy arrays whose trailing
axes are the value shape of the space (``(m,)`` for C^m, ``(m, m)`` for
matrices).  Vectorised callables therefore map an ``(n, d)`` complex array
of points to an ``(n, *value_shape)`` array.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DomainError, ResourceError

DEFAULT_MAX_GRID = 2**24
MAX_FACTORIAL_ARG = 20
BOUNDARY_RTOL = 1e-12


def max_grid_points() -> int:
    """Grid-size cap, overridable through ``POLYDISC_MAX_GRID``."""
    raw = os.environ.get("POLYDISC_MAX_GRID")
    if raw is None:
        return DEFAULT_MAX_GRID
    try:
        cap = int(raw)
    except ValueError as exc:
        raise DomainError(f"POLYDISC_MAX_GRID must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise DomainError("POLYDISC_MAX_GRID must be positive")
    return cap


def check_grid_budget(sizes: Sequence[int]) -> int:
    total = math.prod(int(s) for s in sizes)
    cap = max_grid_points()
    if total > cap:
        raise ResourceError(f"grid of {total} points exceeds the cap of {cap} points")
    return total


# ---------------------------------------------------------------------------
# points


@dataclass(frozen=True)
class CPoint:
    """A point of C^d stored as a tuple of Python complex numbers."""

    coords: tuple[complex, ...]

    def __post_init__(self):
        coords = tuple(complex(c) for c in self.coords)
        if not coords:
            raise DomainError("a point needs at least one coordinate")
        if not all(math.isfinite(c.real) and math.isfinite(c.imag) for c in coords):
            raise DomainError(f"non-finite coordinate in {coords}")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, value) -> "CPoint":
        if isinstance(value, CPoint):
            return value
        if np.isscalar(value):
            return cls((complex(value),))
        return cls(tuple(np.asarray(value, dtype=complex).ravel()))

    @property
    def d(self) -> int:
        return len(self.coords)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, j):
        return self.coords[j]

    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=complex)

    def realify(self) -> np.ndarray:
        return realify(self)

    def __sub__(self, other) -> "CPoint":
        other = CPoint.of(other)
        return CPoint(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __add__(self, other) -> "CPoint":
        other = CPoint.of(other)
        return CPoint(tuple(a + b for a, b in zip(self.coords, other.coords)))


def realify(z) -> np.ndarray:
    """Map C^d to R^2d as ``(Re z1, Im z1, ..., Re zd, Im zd)``.

    Works on a single point or on an array whose last axis has length d.
    """
    arr = z.array() if isinstance(z, CPoint) else np.asarray(z, dtype=complex)
    out = np.empty(arr.shape[:-1] + (2 * arr.shape[-1],), dtype=float) if arr.ndim else None
    if out is None:
        return np.array([arr.real, arr.imag])
    out[..., 0::2] = arr.real
    out[..., 1::2] = arr.imag
    return out


def complexify(x) -> np.ndarray:
    """Inverse of :func:`realify`; the last axis must have even length."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] % 2:
        raise DomainError("realified coordinates must come in (re, im) pairs")
    return x[..., 0::2] + 1j * x[..., 1::2]


# ---------------------------------------------------------------------------
# multi-indices


@dataclass(frozen=True, order=True)
class MultiIndex:
    exponents: tuple[int, ...]

    def __post_init__(self):
        exps = tuple(int(b) for b in self.exponents)
        if not exps:
            raise DomainError("multi-index needs at least one entry")
        if any(b < 0 for b in exps):
            raise DomainError(f"negative exponent in multi-index {exps}")
        object.__setattr__(self, "exponents", exps)

    @classmethod
    def of(cls, value) -> "MultiIndex":
        if isinstance(value, MultiIndex):
            return value
        if isinstance(value, (int, np.integer)):
            return cls((int(value),))
        return cls(tuple(value))

    @classmethod
    def zero(cls, d: int) -> "MultiIndex":
        return cls((0,) * d)

    @classmethod
    def unit(cls, d: int, j: int) -> "MultiIndex":
        return cls(tuple(int(k == j) for k in range(d)))

    @property
    def d(self) -> int:
        return len(self.exponents)

    def __len__(self):
        return len(self.exponents)

    def __iter__(self):
        return iter(self.exponents)

    def __getitem__(self, j):
        return self.exponents[j]

    def __add__(self, other) -> "MultiIndex":
        other = MultiIndex.of(other)
        if other.d != self.d:
            raise DomainError("multi-index dimensions differ")
        return MultiIndex(tuple(a + b for a, b in zip(self, other)))

    @property
    def order(self) -> int:
        """Total degree |beta|."""
        return sum(self.exponents)

    def factorial(self) -> int:
        """beta! as an exact integer; entries above 20 are rejected."""
        if max(self.exponents) > MAX_FACTORIAL_ARG:
            raise DomainError(
                f"factorial of multi-index {self.exponents} needs an entry above {MAX_FACTORIAL_ARG}"
            )
        return math.prod(math.factorial(b) for b in self.exponents)

    def power(self, z, zeta=None):
        """Monomial ``(z - zeta)^beta``, vectorised over leading axes of ``z``.

        ``0**0`` is 1.
        """
        z = z.array() if isinstance(z, CPoint) else np.asarray(z, dtype=complex)
        if zeta is not None:
            zeta = zeta.array() if isinstance(zeta, CPoint) else np.asarray(zeta, dtype=complex)
            z = z - zeta
        if z.shape[-1] != self.d:
            raise DomainError(f"point dimension {z.shape[-1]} does not match multi-index {self.d}")
        out = np.ones(z.shape[:-1], dtype=complex)
        for j, b in enumerate(self.exponents):
            if b:
                out = out * z[..., j] ** b
        return out if out.ndim else complex(out)

    def __str__(self):
        return "(" + ",".join(str(b) for b in self.exponents) + ")"


def graded_indices(d: int, max_degree: int, min_degree: int = 0) -> Iterator[MultiIndex]:
    """Multi-indices with ``min_degree <= |beta| <= max_degree`` in graded-lex order.

    Within one total degree the first coordinate varies slowest and is
    largest first, e.g. (2,0), (1,1), (0,2).
    """
    if d < 1:
        raise DomainError("dimension must be at least 1")
    for n in range(max(min_degree, 0), max_degree + 1):
        yield from (MultiIndex(b) for b in _compositions(n, d))


def _compositions(n: int, d: int) -> Iterator[tuple[int, ...]]:
    if d == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, d - 1):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# polydiscs


@dataclass(frozen=True)
class Polydisc:
    center: CPoint
    radii: tuple[float, ...]

    def __post_init__(self):
        center = CPoint.of(self.center)
        radii = tuple(float(r) for r in np.atleast_1d(self.radii))
        if len(radii) == 1 and center.d > 1:
            radii = radii * center.d
        if len(radii) != center.d:
            raise DomainError(f"{len(radii)} radii given for a {center.d}-dimensional center")
        if not all(math.isfinite(r) and r > 0 for r in radii):
            raise DomainError(f"radii must be positive and finite, got {radii}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radii", radii)

    @property
    def d(self) -> int:
        return self.center.d

    def offsets(self, zeta) -> np.ndarray:
        zeta = CPoint.of(zeta)
        if zeta.d != self.d:
            raise DomainError(f"point of dimension {zeta.d} tested against a {self.d}-dimensional disc")
        return np.abs(zeta.array() - self.center.array())

    def contains(self, zeta) -> bool:
        return bool(np.all(self.offsets(zeta) < np.asarray(self.radii)))

    def contains_closed(self, zeta) -> bool:
        rho = np.asarray(self.radii)
        return bool(np.all(self.offsets(zeta) <= rho * (1 + BOUNDARY_RTOL)))

    def on_distinguished_boundary(self, z) -> bool:
        rho = np.asarray(self.radii)
        return bool(np.all(np.abs(self.offsets(z) - rho) <= BOUNDARY_RTOL * rho))

    def relative_offsets(self, zeta) -> np.ndarray:
        """``|zeta_j - w_j| / rho_j`` per axis."""
        return self.offsets(zeta) / np.asarray(self.radii)

    def __lt__(self, other: "Polydisc") -> bool:
        """Componentwise ``rho < R`` for discs sharing a center."""
        return all(a < b for a, b in zip(self.radii, other.radii))

    def scaled(self, factors) -> "Polydisc":
        factors = np.broadcast_to(np.asarray(factors, dtype=float), (self.d,))
        return Polydisc(self.center, tuple(r * s for r, s in zip(self.radii, factors)))


@dataclass(frozen=True)
class BoundaryGrid:
    """Tensor grid on the distinguished boundary with trapezoidal weights."""

    disc: Polydisc
    nodes: tuple[int, ...]
    angles: tuple[np.ndarray, ...]
    axis_points: tuple[np.ndarray, ...]
    weights: tuple[float, ...]

    @property
    def shape(self) -> tuple[int, ...]:
        return self.nodes

    @property
    def size(self) -> int:
        return math.prod(self.nodes)

    def points(self) -> np.ndarray:
        """All grid points, shape ``(*nodes, d)``."""
        mesh = np.meshgrid(*self.axis_points, indexing="ij")
        return np.stack(mesh, axis=-1)


def normalize_nodes(nodes, d: int) -> tuple[int, ...]:
    if isinstance(nodes, (int, np.integer)):
        nodes = (int(nodes),) * d
    nodes = tuple(int(n) for n in nodes)
    if len(nodes) == 1 and d > 1:
        nodes = nodes * d
    if len(nodes) != d:
        raise DomainError(f"{len(nodes)} node counts given for dimension {d}")
    return nodes


def boundary_grid(disc: Polydisc, nodes) -> BoundaryGrid:
    """Sample ``z_k = w_k + rho_k exp(2 pi i j / N_k)`` on the distinguished boundary."""
    nodes = normalize_nodes(nodes, disc.d)
    for k, n in enumerate(nodes):
        if n < 4:
            raise DomainError(f"axis {k}: at least 4 boundary nodes are required, got {n}")
        if n % 2:
            raise DomainError(f"axis {k}: node count must be even, got {n}")
    check_grid_budget(nodes)
    angles = tuple(2 * np.pi * np.arange(n) / n for n in nodes)
    pts = tuple(
        w + r * _unit_roots(n)
        for w, r, n in zip(disc.center.coords, disc.radii, nodes)
    )
    weights = tuple(2 * np.pi / n for n in nodes)
    return BoundaryGrid(disc, nodes, angles, pts, weights)


def _unit_roots(n: int) -> np.ndarray:
    # exact values at the quarter turns so that e.g. N=4 gives {1, i, -1, -i}
    roots = np.exp(2j * np.pi * np.arange(n) / n)
    if n % 4 == 0:
        q = n // 4
        roots[0], roots[q], roots[2 * q], roots[3 * q] = 1, 1j, -1, -1j
    elif n % 2 == 0:
        roots[0], roots[n // 2] = 1, -1
    return roots


# ---------------------------------------------------------------------------
# value spaces and seminorms

_SEMINORM_RE = re.compile(r"^(sup|euclid|op|coord)(?:\[(\d+)(?:,(\d+))?\])?$")


@dataclass(frozen=True)
class Seminorm:
    """One seminorm from the fixed catalogue.

    ``sup`` is the coordinate maximum, ``euclid`` the Euclidean (Frobenius)
    norm, ``coord[i]`` / ``coord[i,j]`` a single-entry magnitude and ``op``
    the spectral norm of a matrix.
    """

    kind: str
    index: tuple[int, ...] = ()

    @classmethod
    def parse(cls, name: str) -> "Seminorm":
        if isinstance(name, Seminorm):
            return name
        m = _SEMINORM_RE.match(name.replace(" ", ""))
        if not m:
            raise DomainError(f"unknown seminorm {name!r}")
        kind = m.group(1)
        index = tuple(int(g) for g in m.groups()[1:] if g is not None)
        if kind == "coord" and not index:
            raise DomainError("coord seminorm needs an index, e.g. coord[0]")
        if kind != "coord" and index:
            raise DomainError(f"seminorm {kind} takes no index")
        return cls(kind, index)

    @property
    def name(self) -> str:
        if self.kind == "coord":
            return "coord[" + ",".join(map(str, self.index)) + "]"
        return self.kind

    @property
    def is_norm(self) -> bool:
        return self.kind != "coord"

    def __call__(self, values, value_ndim: int) -> np.ndarray:
        """Evaluate on an array whose last ``value_ndim`` axes are the value."""
        v = np.asarray(values)
        if value_ndim == 0:
            return np.abs(v)
        axes = tuple(range(v.ndim - value_ndim, v.ndim))
        if self.kind == "sup":
            return np.max(np.abs(v), axis=axes)
        if self.kind == "euclid":
            return np.sqrt(np.sum(np.abs(v) ** 2, axis=axes))
        if self.kind == "coord":
            return np.abs(v[(Ellipsis,) + self.index])
        if self.kind == "op":
            return np.linalg.norm(v, ord=2, axis=(-2, -1))
        raise DomainError(f"unknown seminorm kind {self.kind}")


@dataclass(frozen=True)
class SpaceDescriptor:
    """E = C^m (``kind='vector'``) or m x m matrices (``kind='matrix'``)."""

    kind: str = "vector"
    m: int = 1
    seminorms: tuple[Seminorm, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in ("vector", "matrix"):
            raise DomainError(f"space kind must be 'vector' or 'matrix', got {self.kind!r}")
        if self.m < 1:
            raise DomainError("space dimension must be positive")
        norms = tuple(Seminorm.parse(s) for s in (self.seminorms or ("sup", "euclid")))
        for s in norms:
            self._check_seminorm(s)
        if not self._separating(norms):
            raise DomainError("seminorm family does not separate points; include a norm")
        object.__setattr__(self, "seminorms", norms)

    def _separating(self, norms) -> bool:
        if any(s.is_norm for s in norms):
            return True
        covered = {s.index for s in norms}
        return covered == {tuple(ix) for ix in np.ndindex(self.shape)}

    @classmethod
    def scalar(cls) -> "SpaceDescriptor":
        return cls("vector", 1)

    @classmethod
    def for_shape(cls, shape, seminorms=()) -> "SpaceDescriptor":
        shape = tuple(shape)
        if shape in ((), (1,)):
            return cls("vector", 1, tuple(seminorms))
        if len(shape) == 1:
            return cls("vector", shape[0], tuple(seminorms))
        if len(shape) == 2 and shape[0] == shape[1]:
            return cls("matrix", shape[0], tuple(seminorms))
        raise DomainError(f"value shape {shape} is neither a vector nor a square matrix")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.m,) if self.kind == "vector" else (self.m, self.m)

    @property
    def dim(self) -> int:
        return math.prod(self.shape)

    def describe(self) -> str:
        return f"C^{self.m}" if self.kind == "vector" else f"C^({self.m}x{self.m})"

    def seminorm(self, name=None) -> Seminorm:
        """Look up a catalogue seminorm; it need not be in the declared family."""
        if name is None:
            return self.seminorms[0]
        s = Seminorm.parse(name)
        self._check_seminorm(s)
        return s

    def _check_seminorm(self, s: Seminorm) -> None:
        if s.kind == "op" and self.kind != "matrix":
            raise DomainError("operator norm is only defined on matrix spaces")
        if s.kind == "coord":
            want = 2 if self.kind == "matrix" else 1
            if len(s.index) != want or any(i >= self.m for i in s.index):
                raise DomainError(f"seminorm {s.name} does not address an entry of {self.describe()}")

    def norm_values(self, values, name=None) -> np.ndarray:
        """Seminorm of each value in an ``(..., *shape)`` array."""
        return self.seminorm(name)(self.coerce(values), len(self.shape))

    def coerce(self, values) -> np.ndarray:
        """Reshape raw function output so its trailing axes match ``shape``."""
        v = np.asarray(values, dtype=complex)
        if self.shape == (1,) and (v.ndim == 0 or v.shape[-1:] != (1,)):
            return v[..., None]
        if v.shape[v.ndim - len(self.shape):] != self.shape:
            raise DomainError(f"value shape {v.shape} does not match space {self.describe()}")
        return v

    def to_json(self) -> dict:
        return {"kind": self.kind, "m": self.m, "seminorms": [s.name for s in self.seminorms]}

    @classmethod
    def from_json(cls, doc) -> "SpaceDescriptor":
        return cls(doc.get("kind", "vector"), int(doc.get("m", 1)), tuple(doc.get("seminorms", ())))


@dataclass(frozen=True, eq=False)
class VectorValue:
    """An element of E together with its space.

    ``flags`` carries non-fatal notes attached by the operation that
    produced the value (accuracy warnings, degenerate curves).
    """

    space: SpaceDescriptor
    entries: np.ndarray
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        entries = np.array(self.space.coerce(self.entries), dtype=complex)
        if entries.shape != self.space.shape:
            raise DomainError(f"entries of shape {entries.shape} do not fit {self.space.describe()}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def zeros(cls, space: SpaceDescriptor, flags=()) -> "VectorValue":
        return cls(space, np.zeros(space.shape, dtype=complex), tuple(flags))

    def _other(self, other) -> np.ndarray:
        if isinstance(other, VectorValue):
            return other.entries
        return self.space.coerce(other)

    def __add__(self, other) -> "VectorValue":
        return VectorValue(self.space, self.entries + self._other(other))

    def __sub__(self, other) -> "VectorValue":
        return VectorValue(self.space, self.entries - self._other(other))

    def __neg__(self) -> "VectorValue":
        return VectorValue(self.space, -self.entries)

    def __mul__(self, scalar) -> "VectorValue":
        return VectorValue(self.space, self.entries * complex(scalar))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, VectorValue):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.entries, other.entries)

    def norm(self, name=None) -> float:
        return float(self.space.norm_values(self.entries, name))

    def norms(self) -> dict[str, float]:
        return {s.name: float(s(self.entries, len(self.space.shape))) for s in self.space.seminorms}

    def scalar(self) -> complex:
        if self.space.dim != 1:
            raise DomainError(f"value in {self.space.describe()} is not a scalar")
        return complex(self.entries.ravel()[0])

    def to_json(self) -> list:
        return complex_to_json(self.entries)


@dataclass(frozen=True, eq=False)
class Functional:
    """Bilinear (conjugation-free) pairing ``x -> sum(weights * x)``."""

    space: SpaceDescriptor
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=complex).reshape(self.space.shape)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def apply(self, x) -> complex | np.ndarray:
        """Apply to a VectorValue or to an ``(..., *shape)`` array of values."""
        v = x.entries if isinstance(x, VectorValue) else self.space.coerce(x)
        axes = tuple(range(v.ndim - self.weights.ndim, v.ndim))
        out = np.sum(v * self.weights, axis=axes)
        return complex(out) if np.ndim(out) == 0 else out

    __call__ = apply


def coordinate_probes(space: SpaceDescriptor) -> list[Functional]:
    """Unit-weight single-entry functionals; they separate the points of E."""
    probes = []
    for ix in np.ndindex(space.shape):
        w = np.zeros(space.shape, dtype=complex)
        w[ix] = 1
        probes.append(Functional(space, w))
    return probes


def probes_span(probes: Sequence[Functional]) -> bool:
    """True when the probe weights span the whole dual of E."""
    if not probes:
        return False
    space = probes[0].space
    mat = np.array([p.weights.ravel() for p in probes])
    return int(np.linalg.matrix_rank(mat)) == space.dim


# ---------------------------------------------------------------------------
# curves

GL_PANEL_POINTS = 16
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_PANEL_POINTS)


def gauss_legendre(a: float, b: float, panels: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite 16-point Gauss-Legendre nodes and weights on ``[a, b]``."""
    if panels < 1:
        raise DomainError("at least one panel is required")
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return t, w


class CurveComponent:
    """One axis of a tensor-product C^1 curve ``[a, b] -> C``."""

    a: float = 0.0
    b: float = 1.0
    periodic = False

    def point(self, t):
        raise NotImplementedError

    def derivative(self, t):
        raise NotImplementedError

    def length(self) -> float:
        raise NotImplementedError

    def rule(self, nodes: int) -> tuple[np.ndarray, np.ndarray]:
        """Quadrature nodes and weights in the parameter."""
        return gauss_legendre(self.a, self.b, nodes)

    @property
    def default_nodes(self) -> int:
        return 8

    def start(self) -> complex:
        return complex(self.point(np.array([self.a]))[0])

    def end(self) -> complex:
        return complex(self.point(np.array([self.b]))[0])


@dataclass(frozen=True)
class Circle(CurveComponent):
    """``t -> c + r exp(it)`` on ``[0, 2 pi]``; integrated with the periodic trapezoidal rule."""

    center: complex
    radius: float

    a = 0.0
    b = 2 * np.pi
    periodic = True

    def point(self, t):
        return self.center + self.radius * np.exp(1j * np.asarray(t))

    def derivative(self, t):
        return 1j * self.radius * np.exp(1j * np.asarray(t))

    def length(self) -> float:
        return 2 * np.pi * abs(self.radius)

    def rule(self, nodes: int):
        if nodes < 4:
            raise DomainError(f"at least 4 trapezoidal nodes are required, got {nodes}")
        t = 2 * np.pi * np.arange(nodes) / nodes
        return t, np.full(nodes, 2 * np.pi / nodes)

    @property
    def default_nodes(self) -> int:
        return 64


@dataclass(frozen=True)
class Arc(CurveComponent):
    """``t -> c + r exp(it)`` on ``[t0, t1]``; Gauss-Legendre panels."""

    center: complex
    radius: float
    t0: float
    t1: float

    @property
    def a(self):
        return self.t0

    @property
    def b(self):
        return self.t1

    def point(self, t):
        return self.center + self.radius * np.exp(1j * np.asarray(t))

    def derivative(self, t):
        return 1j * self.radius * np.exp(1j * np.asarray(t))

    def length(self) -> float:
        return abs(self.radius) * abs(self.t1 - self.t0)


@dataclass(frozen=True)
class Segment(CurveComponent):
    """``t -> p + (q - p) t`` on ``[0, 1]``."""

    p: complex
    q: complex

    def point(self, t):
        return self.p + (self.q - self.p) * np.asarray(t)

    def derivative(self, t):
        return np.full(np.shape(t), complex(self.q - self.p))

    def length(self) -> float:
        return abs(self.q - self.p)


class SampledComponent(CurveComponent):
    """Curve given by point and derivative tables on a uniform parameter grid.

    Quadrature uses the trapezoidal rule on the stored grid (periodic when
    the first and last samples coincide); the ``nodes`` argument is ignored.
    """

    def __init__(self, points, derivatives, a: float = 0.0, b: float = 1.0):
        self.points = np.asarray(points, dtype=complex)
        self.derivatives = np.asarray(derivatives, dtype=complex)
        if self.points.shape != self.derivatives.shape or self.points.ndim != 1:
            raise DomainError("point and derivative tables must be 1-D and of equal length")
        if len(self.points) < 4:
            raise DomainError("a sampled curve needs at least 4 samples")
        self.a, self.b = float(a), float(b)
        self.grid = np.linspace(self.a, self.b, len(self.points))
        self.periodic = bool(np.isclose(self.points[0], self.points[-1], rtol=0, atol=1e-14))

    def _lookup(self, table, t):
        t = np.asarray(t, dtype=float)
        idx = np.rint((t - self.a) / (self.b - self.a) * (len(table) - 1)).astype(int)
        if np.any(np.abs(self.grid[np.clip(idx, 0, len(table) - 1)] - t) > 1e-12 * (self.b - self.a)):
            raise DomainError("sampled curves can only be evaluated on their parameter grid")
        return table[idx]

    def point(self, t):
        return self._lookup(self.points, t)

    def derivative(self, t):
        return self._lookup(self.derivatives, t)

    def rule(self, nodes: int):
        n = len(self.points)
        h = (self.b - self.a) / (n - 1)
        if self.periodic:
            return self.grid[:-1], np.full(n - 1, h)
        w = np.full(n, h)
        w[0] = w[-1] = h / 2
        return self.grid, w

    def length(self) -> float:
        t, w = self.rule(0)
        return float(np.sum(w * np.abs(self.derivative(t))))

    @property
    def default_nodes(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class CurveC1:
    """Tensor-product curve ``gamma(t) = (gamma_1(t_1), ..., gamma_d(t_d))``."""

    components: tuple[CurveComponent, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise DomainError("a curve needs at least one component")
        object.__setattr__(self, "components", comps)

    @classmethod
    def torus(cls, disc: Polydisc) -> "CurveC1":
        """The distinguished boundary of ``disc`` traversed once."""
        return cls(tuple(Circle(w, r) for w, r in zip(disc.center.coords, disc.radii)))

    @classmethod
    def segment(cls, p, q) -> "CurveC1":
        p, q = CPoint.of(p), CPoint.of(q)
        return cls(tuple(Segment(a, b) for a, b in zip(p.coords, q.coords)))

    @property
    def d(self) -> int:
        return len(self.components)

    def length(self) -> float:
        """Product of the component lengths."""
        return math.prod(c.length() for c in self.components)

    def default_nodes(self) -> tuple[int, ...]:
        return tuple(c.default_nodes for c in self.components)

    def start(self) -> CPoint:
        return CPoint(tuple(c.start() for c in self.components))

    def end(self) -> CPoint:
        return CPoint(tuple(c.end() for c in self.components))


# ---------------------------------------------------------------------------
# JSON helpers


def complex_to_json(values) -> list:
    """Nested lists of ``[re, im]`` pairs."""
    arr = np.asarray(values, dtype=complex)
    if arr.ndim == 0:
        return [float(arr.real), float(arr.imag)]
    return [complex_to_json(v) for v in arr]


def complex_from_json(doc) -> np.ndarray:
    arr = np.asarray(doc, dtype=float)
    if arr.shape[-1:] != (2,):
        raise DomainError("complex JSON arrays must end in [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def as_points(z, d: int | None = None) -> np.ndarray:
    """Coerce a CPoint, sequence or array to an ``(n, d)`` complex array."""
    if isinstance(z, CPoint):
        arr = z.array()[None, :]
    else:
        arr = np.asarray(z, dtype=complex)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        elif arr.ndim == 1:
            arr = arr[None, :] if d is None or arr.shape[0] == d else arr[:, None]
    if d is not None and arr.shape[-1] != d:
        raise DomainError(f"expected points of dimension {d}, got {arr.shape[-1]}")
    return arr


def iter_points(points: Iterable) -> list[CPoint]:
    return [CPoint.of(p) for p in points]
