"""Curve integrals of E-valued functions along tensor-product C^1 curves.

The curve integral of ``f`` along ``gamma`` is

    int_gamma f(z) dz = int_{[a,b]^d} f(gamma(t)) prod_k gamma_k'(t_k) dt,

computed componentwise over E.  Circles use the periodic trapezoidal rule,
segments and arcs composite 16-point Gauss-Legendre panels.
"""

from __future__ import annotations

import warnings
from typing import Callable

import numpy as np

from .core import (
    CPoint,
    CurveC1,
    SpaceDescriptor,
    VectorValue,
    check_grid_budget,
    gauss_legendre,
)
from .errors import (
    DegenerateCurveWarning,
    DomainError,
    EvaluationError,
    IntegrationError,
    StepUnderflowError,
)

EVAL_CHUNK = 1 << 16
FD_STEP = 1e-5
MIN_FD_STEP = 1e-12


class Integrand:
    """A vectorised E-valued function of ``d`` complex variables.

    ``func`` receives an ``(n, d)`` complex array and returns an array of
    shape ``(n,)`` (scalars) or ``(n, *space.shape)``.  With
    ``vectorized=False`` it is called once per point with a 1-D array.

    Parameters
    ----------
    func : callable
    d : int
        Number of complex variables.
    space : SpaceDescriptor, optional
        Inferred from the first evaluation when omitted.
    domain : callable, optional
        Predicate on an ``(n, d)`` array returning a boolean mask of points
        where ``func`` is defined.
    smoothness : {'analytic', 'continuous'}
    holomorphic : bool or None
        Caller hint; expressions set it from their taint flag.
    """

    def __init__(self, func: Callable, d: int, space: SpaceDescriptor | None = None,
                 vectorized: bool = True, domain: Callable | None = None,
                 smoothness: str = "analytic", holomorphic: bool | None = None,
                 name: str | None = None):
        if d < 1:
            raise DomainError("dimension must be at least 1")
        if smoothness not in ("analytic", "continuous"):
            raise DomainError(f"unknown smoothness class {smoothness!r}")
        self.func = func
        self.d = int(d)
        self._space = space
        self.vectorized = vectorized
        self.domain = domain
        self.smoothness = smoothness
        self.holomorphic = holomorphic
        self.name = name or getattr(func, "__name__", "f")

    def __repr__(self):
        return f"Integrand({self.name}, d={self.d})"

    @property
    def space(self) -> SpaceDescriptor:
        if self._space is None:
            probe = np.array([[0.1234 + 0.0567j] * self.d], dtype=complex)
            with np.errstate(all="ignore"):
                self._infer_space(self._raw(probe))
        return self._space

    def _infer_space(self, raw: np.ndarray) -> None:
        if self._space is None:
            self._space = SpaceDescriptor.for_shape(np.shape(raw)[1:])

    def _raw(self, pts: np.ndarray) -> np.ndarray:
        if self.vectorized:
            out = np.asarray(self.func(pts), dtype=complex)
            if out.ndim == 0:
                out = np.broadcast_to(out, (len(pts),))
            elif out.shape[0] != len(pts):
                out = np.broadcast_to(out, (len(pts),) + out.shape)
            return out
        return np.array([np.asarray(self.func(p), dtype=complex) for p in pts])

    def __call__(self, points) -> np.ndarray:
        """Evaluate on ``(..., d)`` points; returns ``(..., *space.shape)``."""
        pts = np.asarray(points, dtype=complex)
        if pts.shape[-1] != self.d:
            raise DomainError(f"{self.name} expects points of dimension {self.d}, got {pts.shape[-1]}")
        lead = pts.shape[:-1]
        flat = pts.reshape(-1, self.d)
        if self.domain is not None:
            ok = np.asarray(self.domain(flat), dtype=bool)
            if not np.all(ok):
                bad = flat[np.argmin(ok)]
                raise EvaluationError(f"{self.name} is not defined at {tuple(bad)}", tuple(bad))
        chunks = []
        for start in range(0, len(flat), EVAL_CHUNK):
            block = flat[start:start + EVAL_CHUNK]
            with np.errstate(all="ignore"):
                try:
                    raw = self._raw(block)
                    self._infer_space(raw)
                    vals = self._space.coerce(raw)
                except EvaluationError:
                    raise
                except (ArithmeticError, ValueError) as exc:
                    raise EvaluationError(f"{self.name} failed: {exc}") from exc
            finite = np.isfinite(vals).reshape(len(block), -1).all(axis=1)
            if not finite.all():
                bad = block[np.argmin(finite)]
                raise EvaluationError(f"{self.name} is not finite at {tuple(bad)}", tuple(bad))
            chunks.append(vals)
        space = self.space
        vals = np.concatenate(chunks, axis=0) if chunks else np.zeros((0,) + space.shape, complex)
        return vals.reshape(lead + space.shape)

    def at(self, z) -> VectorValue:
        z = CPoint.of(z)
        return VectorValue(self.space, self(z.array()[None, :])[0])


def as_integrand(f, d: int | None = None, space: SpaceDescriptor | None = None) -> Integrand:
    """Wrap an expression, callable or Integrand as an :class:`Integrand`."""
    if isinstance(f, Integrand):
        return f
    to_integrand = getattr(f, "to_integrand", None)
    if to_integrand is not None:
        return to_integrand(d, space)
    if callable(f):
        if d is None:
            raise DomainError("dimension d is required to wrap a plain callable")
        return Integrand(f, d, space)
    raise DomainError(f"cannot use {f!r} as an integrand")


def _axis_rules(curve: CurveC1, nodes) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per-axis (points, weighted derivative) pairs."""
    if nodes is None:
        nodes = curve.default_nodes()
    elif isinstance(nodes, (int, np.integer)):
        nodes = (int(nodes),) * curve.d
    nodes = tuple(nodes)
    if len(nodes) != curve.d:
        raise DomainError(f"{len(nodes)} node counts for a curve in C^{curve.d}")
    rules = []
    sizes = []
    for comp, n in zip(curve.components, nodes):
        if comp.periodic and n < 4:
            raise DomainError(f"at least 4 nodes per periodic axis are required, got {n}")
        t, w = comp.rule(int(n))
        rules.append((np.asarray(comp.point(t), dtype=complex),
                      np.asarray(comp.derivative(t), dtype=complex) * w))
        sizes.append(len(t))
    check_grid_budget(sizes)
    return rules


def tensor_contract(values: np.ndarray, kernels) -> np.ndarray:
    """Contract the leading grid axes of ``values`` with per-axis kernels.

    Axes are reduced in order 0, 1, ..., so the summation tree is fixed.
    """
    out = values
    for ker in kernels:
        out = np.tensordot(ker, out, axes=(0, 0))
    return out


def integrate_curve(f, curve: CurveC1, nodes=None) -> VectorValue:
    """Tensor-product quadrature of ``int_gamma f(z) dz``.

    ``nodes`` gives, per axis, the number of trapezoidal points for circles
    or the number of Gauss-Legendre panels for segments and arcs.
    """
    f = as_integrand(f, curve.d)
    if f.d != curve.d:
        raise DomainError(f"integrand in {f.d} variables on a curve in C^{curve.d}")
    if curve.length() == 0:
        warnings.warn("curve has zero length; integral is zero", DegenerateCurveWarning, stacklevel=2)
        return VectorValue.zeros(f.space, flags=("degenerate-curve",))
    rules = _axis_rules(curve, nodes)
    mesh = np.stack(np.meshgrid(*[p for p, _ in rules], indexing="ij"), axis=-1)
    try:
        vals = f(mesh)
    except EvaluationError as exc:
        raise IntegrationError(f"integrand failed at quadrature node {exc.point}: {exc}", exc.point) from exc
    return VectorValue(f.space, tensor_contract(vals, [j for _, j in rules]))


def _rect_rule(a, b, panels):
    return gauss_legendre(float(a), float(b), int(panels))


def integrate_rectangle(f: Callable, rect, order: str = "tensor", nodes=(8, 8),
                        space: SpaceDescriptor | None = None) -> VectorValue:
    """Integrate ``f`` over ``[a, b] x [c, d]``.

    ``f`` maps an ``(n, 2)`` real array to values.  ``order`` is one of
    ``'tensor'`` (one 2-D product rule), ``'x-then-y'`` (inner integral
    over the first variable) or ``'y-then-x'``.  ``nodes`` are
    Gauss-Legendre panel counts per variable.
    """
    a, b, c, d = (float(v) for v in rect)
    if isinstance(nodes, (int, np.integer)):
        nodes = (int(nodes), int(nodes))
    tx, wx = _rect_rule(a, b, nodes[0])
    ty, wy = _rect_rule(c, d, nodes[1])
    check_grid_budget((len(tx), len(ty)))

    def call(x1, x2):
        pts = np.stack(np.broadcast_arrays(x1, x2), axis=-1).reshape(-1, 2)
        try:
            out = np.asarray(f(pts), dtype=complex)
        except (ArithmeticError, ValueError) as exc:
            raise IntegrationError(f"integrand failed on the rectangle: {exc}") from exc
        if out.ndim == 0:
            out = np.broadcast_to(out, (len(pts),))
        return out

    if space is None:
        space = SpaceDescriptor.for_shape(call(np.array([a]), np.array([c])).shape[1:])

    def values(x1, x2):
        v = space.coerce(call(x1, x2))
        if not np.all(np.isfinite(v)):
            raise IntegrationError("integrand is not finite at a quadrature node")
        return v

    if order == "tensor":
        X, Y = np.meshgrid(tx, ty, indexing="ij")
        vals = values(X.ravel(), Y.ravel()).reshape((len(tx), len(ty)) + space.shape)
        total = tensor_contract(vals, [wx.astype(complex), wy.astype(complex)])
    elif order == "x-then-y":
        inner = np.array([tensor_contract(values(tx, np.full_like(tx, y)), [wx]) for y in ty])
        total = tensor_contract(inner, [wy])
    elif order == "y-then-x":
        inner = np.array([tensor_contract(values(np.full_like(ty, x), ty), [wy]) for x in tx])
        total = tensor_contract(inner, [wx])
    else:
        raise DomainError(f"unknown integration order {order!r}")
    return VectorValue(space, total)


def ftc_check(f, F, curve: CurveC1, nodes=None) -> float:
    """Largest seminorm of ``int_gamma f - (F(gamma(b)) - F(gamma(a)))``.

    The caller asserts that ``F' = f`` near the image of the curve.
    """
    if curve.d != 1:
        raise DomainError("the primitive check is defined for curves in C (d = 1)")
    f = as_integrand(f, 1)
    F = as_integrand(F, 1, f.space)
    integral = integrate_curve(f, curve, nodes)
    ends = np.array([[curve.end()[0]], [curve.start()[0]]])
    vals = F(ends)
    gap = integral - (vals[0] - vals[1])
    return max(gap.norms().values())


def differentiate_parametric_integral(f: Callable, curve: CurveC1, lam, j: int,
                                      df: Callable | None = None, nodes=None,
                                      h: float = FD_STEP,
                                      space: SpaceDescriptor | None = None) -> VectorValue:
    """``d/d lambda_j`` of ``G(lambda) = int_gamma f(z, lambda) dz``.

    Differentiation under the integral sign: returns
    ``int_gamma (d f / d lambda_j)(z, lambda) dz``.  ``f(z, lam)`` and
    ``df(z, lam)`` take an ``(n, d)`` array ``z`` and a :class:`CPoint`.
    Without ``df`` the derivative is the central difference with step
    ``h * max(1, |lambda_j|)``, accurate to O(h^2).
    """
    lam = CPoint.of(lam)
    if not 0 <= j < lam.d:
        raise DomainError(f"axis {j} out of range for a parameter in C^{lam.d}")
    if df is not None:
        g = Integrand(lambda z: df(z, lam), curve.d, space, name="d_lambda f")
        return integrate_curve(g, curve, nodes)
    step = h * max(1.0, abs(lam[j]))
    if not step >= MIN_FD_STEP:
        raise StepUnderflowError(f"finite-difference step {step:g} is below {MIN_FD_STEP:g}")
    e = np.zeros(lam.d, dtype=complex)
    e[j] = step
    up = CPoint(tuple(lam.array() + e))
    down = CPoint(tuple(lam.array() - e))
    g = Integrand(lambda z: (np.asarray(f(z, up)) - np.asarray(f(z, down))) / (2 * step),
                  curve.d, space, name="central difference of f")
    out = integrate_curve(g, curve, nodes)
    return VectorValue(out.space, out.entries, out.flags + ("finite-difference",))


def curve_length(curve: CurveC1) -> float:
    """Product of the lengths of the curve's components."""
    return curve.length()


def sup_bound(f, curve: CurveC1, nodes=None, seminorm=None) -> float:
    """``l(gamma) * max |f|`` over the quadrature nodes, a bound for the integral."""
    f = as_integrand(f, curve.d)
    rules = _axis_rules(curve, nodes)
    mesh = np.stack(np.meshgrid(*[p for p, _ in rules], indexing="ij"), axis=-1)
    vals = f(mesh)
    return curve.length() * float(np.max(f.space.norm_values(vals, seminorm)))


__all__ = [
    "Integrand",
    "as_integrand",
    "integrate_curve",
    "integrate_rectangle",
    "ftc_check",
    "differentiate_parametric_integral",
    "curve_length",
    "sup_bound",
    "tensor_contract",
]
