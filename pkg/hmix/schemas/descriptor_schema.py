"""Named analytic forms used in problem configs.

Points are real coordinates (..., 2n) ordered x^1..x^n, y^1..y^n. Every
descriptor returns values and the real Hessian in those coordinates; the
complex Hessian is derived from the real one by the geometry module.
"""

from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, Field


class _Descriptor(BaseModel):
    def values(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def real_hessian(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError


def _zero_hessian(points: np.ndarray) -> np.ndarray:
    dim = points.shape[-1]
    return np.zeros(points.shape[:-1] + (dim, dim))


class ConstantDescriptor(_Descriptor):
    kind: Literal["constant"] = "constant"
    value: float

    def values(self, points):
        return np.full(points.shape[:-1], self.value)

    def real_hessian(self, points):
        return _zero_hessian(points)


class AffineDescriptor(_Descriptor):
    """c0 + g . t  (pluriharmonic)."""

    kind: Literal["affine"] = "affine"
    c0: float = 0.0
    gradient: list[float]

    def values(self, points):
        return self.c0 + points @ np.asarray(self.gradient, dtype=float)

    def real_hessian(self, points):
        return _zero_hessian(points)


class ExponentialDescriptor(_Descriptor):
    """scale * exp(rate . t)."""

    kind: Literal["exponential"] = "exponential"
    scale: float = 1.0
    rate: list[float]

    def values(self, points):
        return self.scale * np.exp(points @ np.asarray(self.rate, dtype=float))

    def real_hessian(self, points):
        r = np.asarray(self.rate, dtype=float)
        return self.values(points)[..., None, None] * np.outer(r, r)


class RadialQuadraticDescriptor(_Descriptor):
    """a * |z - center|^2 + b."""

    kind: Literal["radial_quadratic"] = "radial_quadratic"
    a: float = 1.0
    b: float = 0.0
    center: list[float] | None = None

    def _shifted(self, points):
        if self.center is None:
            return points
        return points - np.asarray(self.center, dtype=float)

    def values(self, points):
        return self.a * np.sum(self._shifted(points) ** 2, axis=-1) + self.b

    def real_hessian(self, points):
        dim = points.shape[-1]
        return np.broadcast_to(2.0 * self.a * np.eye(dim), points.shape[:-1] + (dim, dim)).copy()


class QuarticDescriptor(_Descriptor):
    """coeff * |z_m|^4 for the complex coordinate m (0-based)."""

    kind: Literal["quartic"] = "quartic"
    coeff: float = 1.0
    component: int = 0

    def _xy(self, points):
        n = points.shape[-1] // 2
        return points[..., self.component], points[..., n + self.component], n

    def values(self, points):
        x, y, _ = self._xy(points)
        return self.coeff * (x**2 + y**2) ** 2

    def real_hessian(self, points):
        x, y, n = self._xy(points)
        a, b = self.component, n + self.component
        hess = _zero_hessian(points)
        hess[..., a, a] = self.coeff * (12 * x**2 + 4 * y**2)
        hess[..., b, b] = self.coeff * (4 * x**2 + 12 * y**2)
        hess[..., a, b] = hess[..., b, a] = self.coeff * 8 * x * y
        return hess


class ReSquareDescriptor(_Descriptor):
    """coeff * Re(z_m^2) = coeff * (x_m^2 - y_m^2)  (pluriharmonic)."""

    kind: Literal["re_square"] = "re_square"
    coeff: float = 1.0
    component: int = 0

    def values(self, points):
        n = points.shape[-1] // 2
        x, y = points[..., self.component], points[..., n + self.component]
        return self.coeff * (x**2 - y**2)

    def real_hessian(self, points):
        n = points.shape[-1] // 2
        hess = _zero_hessian(points)
        hess[..., self.component, self.component] = 2 * self.coeff
        hess[..., n + self.component, n + self.component] = -2 * self.coeff
        return hess


class SumDescriptor(_Descriptor):
    kind: Literal["sum"] = "sum"
    terms: list["ScalarDescriptor"]

    def values(self, points):
        return sum((t.values(points) for t in self.terms), np.zeros(points.shape[:-1]))

    def real_hessian(self, points):
        return sum((t.real_hessian(points) for t in self.terms), _zero_hessian(points))


ScalarDescriptor = Annotated[
    Union[
        ConstantDescriptor,
        AffineDescriptor,
        ExponentialDescriptor,
        RadialQuadraticDescriptor,
        QuarticDescriptor,
        ReSquareDescriptor,
        SumDescriptor,
    ],
    Field(discriminator="kind"),
]

SumDescriptor.model_rebuild()


class BumpDescriptor(BaseModel):
    """prod_a sin(pi (t_a - lo_a) / (hi_a - lo_a)): positive inside, zero on the box faces."""

    kind: Literal["sine_product"] = "sine_product"

    @staticmethod
    def _factors(points, lo, hi):
        lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
        omega = np.pi / (hi - lo)
        phase = omega * (points - lo)
        return np.sin(phase), np.cos(phase), omega

    def values(self, points, lo, hi):
        s, _, _ = self._factors(points, lo, hi)
        return np.prod(s, axis=-1)

    def real_hessian(self, points, lo, hi):
        s, c, omega = self._factors(points, lo, hi)
        dim = points.shape[-1]
        eta = np.prod(s, axis=-1)
        hess = _zero_hessian(points)
        for a in range(dim):
            hess[..., a, a] = -(omega[a] ** 2) * eta
            for b in range(a + 1, dim):
                rest = np.prod(np.delete(s, [a, b], axis=-1), axis=-1)
                hess[..., a, b] = hess[..., b, a] = omega[a] * omega[b] * c[..., a] * c[..., b] * rest
        return hess
