"""Independent reference values used by the tests.

Nothing here imports the library.  Derivatives come from closed-form
rules for separable functions ``f(z) = c * prod_j g_j(z_j)`` where each
factor is ``exp(a z)`` or ``(z - s)^k`` with integer ``k`` (possibly
negative), so ``d^beta f = c * prod_j g_j^(beta_j)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from itertools import product

import numpy as np


def falling(k: int, n: int) -> float:
    """``k (k-1) ... (k-n+1)``, valid for negative ``k``."""
    out = 1.0
    for i in range(n):
        out *= k - i
    return out


@dataclass(frozen=True)
class ExpFactor:
    a: complex = 1.0

    def value(self, z, n=0):
        return self.a ** n * cmath.exp(self.a * z)


@dataclass(frozen=True)
class PowerFactor:
    k: int
    shift: complex = 0.0

    def value(self, z, n=0):
        if self.k >= 0 and n > self.k:
            return 0.0
        return falling(self.k, n) * (z - self.shift) ** (self.k - n)


@dataclass(frozen=True)
class Separable:
    """``coeff * prod_j factors[j](z_j)`` together with an expression string."""

    factors: tuple
    source: str
    coeff: complex = 1.0

    @property
    def d(self):
        return len(self.factors)

    def derivative(self, z, beta):
        out = self.coeff
        for g, zj, bj in zip(self.factors, z, beta):
            out *= g.value(zj, bj)
        return complex(out)

    def __call__(self, z):
        return self.derivative(z, (0,) * self.d)


# the analytic test set shared by several criteria
EXP_SUM = Separable((ExpFactor(), ExpFactor()), "exp(z1+z2)")
CUBIC = Separable((PowerFactor(3), PowerFactor(1)), "z1^3*z2")
RATIONAL = Separable((PowerFactor(-1, 2.0), PowerFactor(-1, -3.0)), "1/((z1-2)*(z2+3))")
TEST_SET = (EXP_SUM, CUBIC, RATIONAL)


def exp_coefficient(beta) -> float:
    """Taylor coefficient of ``exp(z_1 + ... + z_d)`` at the origin: ``1/beta!``."""
    return 1.0 / math.prod(math.factorial(b) for b in beta)


def multi_indices(d: int, max_degree: int):
    for beta in product(range(max_degree + 1), repeat=d):
        if sum(beta) <= max_degree:
            yield beta


def geometric_tail_reference(t, n: int) -> float:
    """Tail of ``prod 1/(1 - t_j)`` after all monomials of degree ``<= n``, summed directly."""
    total = math.prod(1 / (1 - tj) for tj in t)
    head = sum(math.prod(tj ** bj for tj, bj in zip(t, beta)) for beta in multi_indices(len(t), n))
    return total - head


def random_interior(rng, n, d, margin=0.7):
    """``n`` points with every ``|z_j| < margin``, uniform in area per axis."""
    r = margin * np.sqrt(rng.uniform(0, 1, (n, d)))
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, (n, d)))
