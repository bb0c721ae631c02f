"""Taylor series on polydiscs: evaluation, geometric tail bounds and the Liouville test."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    CPoint,
    MultiIndex,
    Polydisc,
    SpaceDescriptor,
    VectorValue,
    as_points,
    complex_from_json,
    complex_to_json,
    graded_indices,
)
from .errors import DomainError

LIOUVILLE_TOL = 1e-8
LIOUVILLE_RADII = (2.0, 8.0)


@dataclass(frozen=True, eq=False)
class TaylorSeries:
    """Coefficients ``a_beta = d^beta f(center) / beta!`` for ``|beta| <= degree``.

    ``radii`` are the radii of the distinguished boundary the coefficients
    were extracted from; ``boundary_max`` holds the maximum of each
    seminorm over that boundary.
    """

    center: CPoint
    radii: tuple[float, ...]
    degree: int
    coefficients: dict
    space: SpaceDescriptor
    boundary_max: dict = field(default_factory=dict)

    def __post_init__(self):
        center = CPoint.of(self.center)
        if center.d < 1:
            raise DomainError("series need at least one variable")
        disc = Polydisc(center, self.radii)
        coeffs = {}
        for beta in graded_indices(center.d, self.degree):
            raw = self.coefficients.get(beta, self.coefficients.get(beta.exponents))
            value = np.zeros(self.space.shape, complex) if raw is None else self.space.coerce(raw)
            value = np.array(value, dtype=complex).reshape(self.space.shape)
            value.setflags(write=False)
            coeffs[beta] = value
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radii", disc.radii)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "boundary_max", {str(k): float(v) for k, v in self.boundary_max.items()})

    @property
    def d(self) -> int:
        return self.center.d

    @property
    def disc(self) -> Polydisc:
        return Polydisc(self.center, self.radii)

    def coefficient(self, beta) -> VectorValue:
        beta = MultiIndex.of(beta)
        if beta.order > self.degree:
            return VectorValue.zeros(self.space)
        return VectorValue(self.space, self.coefficients[beta])

    def items(self):
        """``(beta, a_beta)`` pairs in graded-lex order."""
        return self.coefficients.items()

    def evaluate(self, w, degree: int | None = None) -> VectorValue:
        return evaluate(self, w, degree)

    def evaluate_many(self, points, degree: int | None = None, check: bool = True) -> np.ndarray:
        """Partial sums at an ``(n, d)`` array of points; returns ``(n, *shape)``."""
        n = self.degree if degree is None else int(degree)
        if n > self.degree:
            raise DomainError(f"degree {n} exceeds the stored degree {self.degree}")
        if n < 0:
            raise DomainError("degree must be non-negative")
        pts = as_points(points, self.d)
        shift = pts - self.center.array()
        if check:
            t = np.abs(shift) / np.asarray(self.radii)
            if not np.all(t < 1):
                bad = pts[np.argmax(np.max(t, axis=1))]
                raise DomainError(f"point {tuple(bad)} lies outside the open polydisc of validity")
        acc = np.zeros((len(pts),) + self.space.shape, dtype=complex)
        tail = (slice(None),) + (None,) * len(self.space.shape)
        for beta, coeff in self.coefficients.items():
            if beta.order > n:
                break
            acc = acc + beta.power(shift)[tail] * coeff
        return acc

    def truncated(self, degree: int) -> "TaylorSeries":
        if degree > self.degree:
            raise DomainError(f"cannot truncate a degree-{self.degree} series at {degree}")
        coeffs = {b: v for b, v in self.coefficients.items() if b.order <= degree}
        return TaylorSeries(self.center, self.radii, degree, coeffs, self.space, self.boundary_max)

    def max_coefficient_gap(self) -> float:
        return max(float(np.max(np.abs(v))) for v in self.coefficients.values())

    def cauchy_violations(self, slack: float = 1e-9) -> list[tuple[MultiIndex, str, float, float]]:
        """Coefficients breaking ``p(a_beta) <= M / rho^beta + slack``."""
        out = []
        rho = np.asarray(self.radii)
        for name, M in self.boundary_max.items():
            s = self.space.seminorm(name)
            for beta, coeff in self.coefficients.items():
                value = float(s(coeff, len(self.space.shape)))
                limit = M / float(np.prod(rho ** np.asarray(beta.exponents))) + slack
                if value > limit:
                    out.append((beta, name, value, limit))
        return out

    def to_json(self) -> dict:
        return {
            "center": complex_to_json(self.center.array()),
            "radii": list(self.radii),
            "degree": self.degree,
            "space": self.space.to_json(),
            "coefficients": [
                {"beta": list(beta.exponents), "value": complex_to_json(value)}
                for beta, value in self.coefficients.items()
            ],
            "boundary_max": dict(sorted(self.boundary_max.items())),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "TaylorSeries":
        space = SpaceDescriptor.from_json(doc.get("space", {}))
        coeffs = {
            MultiIndex(tuple(c["beta"])): complex_from_json(c["value"])
            for c in doc["coefficients"]
        }
        degree = doc.get("degree", max((b.order for b in coeffs), default=0))
        center = CPoint(tuple(complex_from_json(doc["center"])))
        return cls(center, tuple(doc["radii"]), int(degree), coeffs, space, doc.get("boundary_max", {}))

    def to_expression(self, digits: int = 17) -> str:
        """The polynomial as an expression string understood by :mod:`polydisc.expr`."""
        from .expr import polynomial_source

        return polynomial_source(self, digits)


def evaluate(series: TaylorSeries, w, degree: int | None = None) -> VectorValue:
    """``sum_{|beta| <= n} a_beta (w - center)^beta``.

    Terms are added in increasing total degree and graded-lex order inside
    each degree, so results are bit-reproducible.
    """
    w = CPoint.of(w)
    if w.d != series.d:
        raise DomainError(f"point of dimension {w.d} for a series in {series.d} variables")
    if not series.disc.contains(w):
        raise DomainError(f"{w.coords} lies outside the open polydisc of validity")
    return VectorValue(series.space, series.evaluate_many(w.array()[None, :], degree)[0])


def geometric_tail(t, degree: int) -> float:
    """``prod 1/(1 - t_j) - sum_{|beta| <= degree} t^beta`` for ``0 <= t_j < 1``."""
    t = np.asarray(t, dtype=float)
    if np.any(t >= 1) or np.any(t < 0):
        raise DomainError(f"relative offsets {t.tolist()} must lie in [0, 1)")
    # complete homogeneous sums h_k(t) via the product of geometric series
    h = np.zeros(degree + 1)
    h[0] = 1.0
    for tj in t:
        for k in range(1, degree + 1):
            h[k] += tj * h[k - 1]
    total = float(np.prod(1.0 / (1.0 - t)))
    return max(total - float(np.sum(h)), 0.0)


def tail_bound(series: TaylorSeries, w, degree: int, seminorm=None) -> float:
    """Bound for ``p(f(w) - evaluate(series, w, degree))``.

    Uses the Cauchy-inequality majorant ``p(a_beta) <= M / rho^beta``, whose
    tail is ``M * (prod 1/(1 - t_j) - sum_{|beta| <= n} t^beta)`` with
    ``t_j = |w_j - z_j| / rho_j``.
    """
    w = CPoint.of(w)
    name = series.space.seminorm(seminorm).name
    if name not in series.boundary_max:
        raise DomainError(f"no boundary maximum recorded for seminorm {name}")
    t = series.disc.relative_offsets(w)
    if np.any(t >= 1):
        raise DomainError(f"{w.coords} is not inside the open polydisc of validity")
    return series.boundary_max[name] * geometric_tail(t, degree)


@dataclass
class LiouvilleResult:
    is_poly_deg_k: bool
    degree: int
    witness: dict | None
    checked: list = field(default_factory=list)

    def __bool__(self):
        return self.is_poly_deg_k

    def to_json(self) -> dict:
        return {"is_poly_deg_k": self.is_poly_deg_k, "degree": self.degree,
                "witness": self.witness, "checked": self.checked}


def liouville_test(f, k: int, radii_sequence=LIOUVILLE_RADII, seminorm=None,
                   tol: float = LIOUVILLE_TOL, center=None, nodes=None, d: int | None = None) -> LiouvilleResult:
    """Decide whether an entire ``f`` is a polynomial of degree ``<= k``.

    At every radius the coefficients with ``k < |beta| <= k + d`` are
    extracted; ``f`` is declared a polynomial of degree ``<= k`` when each
    has ``p(a_beta) <= tol * (1 + M / rho^beta)`` at every radius.
    """
    from .cauchy import sample_boundary, taylor_coefficients
    from .quadrature import as_integrand

    if k < 0:
        raise DomainError("degree k must be non-negative")
    f = as_integrand(f, d)
    d = f.d
    radii = [float(r) for r in radii_sequence]
    if len(radii) < 2:
        raise DomainError("at least two radii are required")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise DomainError(f"radii must increase strictly, got {radii}")
    if radii[-1] / radii[0] < 4:
        raise DomainError("largest radius must be at least 4 times the smallest")
    top = k + d
    if nodes is None:
        nodes = max(32, 2 * (top + 1) + (2 * (top + 1)) % 2)
    center = CPoint((0j,) * d) if center is None else CPoint.of(center)
    s = f.space.seminorm(seminorm)
    checked = []
    witness = None
    worst = 0.0
    for rho in radii:
        samples = sample_boundary(f, Polydisc(center, (rho,) * d), nodes)
        series = taylor_coefficients(samples, top)
        M = series.boundary_max.get(s.name)
        if M is None:
            M = samples.max_seminorm(s.name)
        for beta, coeff in series.items():
            if beta.order <= k:
                continue
            value = float(s(coeff, len(f.space.shape)))
            limit = tol * (1 + M / rho ** beta.order)
            checked.append({"radius": rho, "beta": list(beta.exponents), "value": value, "limit": limit})
            if value > limit and value / limit > worst:
                worst = value / limit
                witness = {"radius": rho, "beta": list(beta.exponents), "value": value, "limit": limit}
    return LiouvilleResult(witness is None, k, witness, checked)
