"""Minkowski norms and the strongly convex domains they bound.

A Minkowski norm is positively 1-homogeneous, smooth away from the origin,
and strongly convex (its angular Hessian form is positive definite).  A
strongly convex domain is the unit sublevel set of such a norm translated to
a base point.  Norm evaluators accept jet-valued coordinates so the rest of
the package can differentiate straight through them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .jets import lead_float, sqrt_
from .polyjet import jet_space

__all__ = [
    "UndefinedAtOrigin",
    "MinkowskiNorm",
    "EuclideanNorm",
    "EllipsoidNorm",
    "RandersNorm",
    "QuarticNorm",
    "NormCheckReport",
    "check_minkowski",
    "ConvexDomain",
    "unit_ball",
    "ellipsoid_domain",
    "randers_domain",
    "quartic_domain",
    "norm_from_spec",
    "domain_from_spec",
]


class UndefinedAtOrigin(ValueError):
    """A Minkowski norm was evaluated at the origin, where it is not smooth."""


def _is_origin(y):
    return all(lead_float(c) == 0.0 for c in y)


class MinkowskiNorm:
    """Base class; subclasses implement ``_value`` on nonzero vectors."""

    kind = "abstract"

    def __init__(self, dim):
        self.dim = int(dim)
        if self.dim < 2:
            raise ValueError("norms here live on R^n with n >= 2")

    def value(self, y):
        """phi(y) for a sequence of ring scalars, positive for y != 0."""
        if len(y) != self.dim:
            raise ValueError(f"expected {self.dim} components, got {len(y)}")
        if _is_origin(y):
            raise UndefinedAtOrigin(f"{self.kind} norm evaluated at the origin")
        return self._value(y)

    def _value(self, y):
        raise NotImplementedError

    def __call__(self, y):
        return self.value(y)

    def to_spec(self):
        raise NotImplementedError


class EuclideanNorm(MinkowskiNorm):
    kind = "euclidean"

    def _value(self, y):
        acc = y[0] * y[0]
        for c in y[1:]:
            acc = acc + c * c
        return sqrt_(acc)

    def to_spec(self):
        return {"kind": self.kind}


class EllipsoidNorm(MinkowskiNorm):
    """sqrt(y^T A y) for a symmetric positive definite matrix A."""

    kind = "ellipsoid"

    def __init__(self, matrix):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("ellipsoid matrix must be square")
        if not np.allclose(matrix, matrix.T, atol=1e-12):
            raise ValueError("ellipsoid matrix must be symmetric")
        try:
            np.linalg.cholesky(matrix)
        except np.linalg.LinAlgError:
            raise ValueError("ellipsoid matrix must be positive definite")
        super().__init__(matrix.shape[0])
        self.matrix = matrix

    def _value(self, y):
        A = self.matrix
        n = self.dim
        acc = None
        for i in range(n):
            term = A[i, i] * (y[i] * y[i])
            acc = term if acc is None else acc + term
            for j in range(i + 1, n):
                if A[i, j] != 0.0:
                    acc = acc + (2.0 * A[i, j]) * (y[i] * y[j])
        return sqrt_(acc)

    def to_spec(self):
        return {"kind": self.kind, "A": self.matrix.tolist()}


class RandersNorm(MinkowskiNorm):
    """|y| + <b, y> with |b| < 1; non-reversible."""

    kind = "randers"

    def __init__(self, drift):
        drift = np.asarray(drift, dtype=float)
        if np.linalg.norm(drift) >= 1.0:
            raise ValueError("randers drift must satisfy |b| < 1")
        super().__init__(drift.shape[0])
        self.drift = drift

    def _value(self, y):
        acc = y[0] * y[0]
        for c in y[1:]:
            acc = acc + c * c
        val = sqrt_(acc)
        for bi, c in zip(self.drift, y):
            if bi != 0.0:
                val = val + bi * c
        return val

    def to_spec(self):
        return {"kind": self.kind, "b": self.drift.tolist()}


class QuarticNorm(MinkowskiNorm):
    """(|y|^4 + eps * sum_i y_i^4)^(1/4), a genuinely non-quadratic norm.

    Positivity needs eps > -1; strong convexity holds for moderate eps and is
    verified by sampling (see :func:`check_minkowski`), not certified.
    """

    kind = "quartic"

    def __init__(self, dim, eps=0.3):
        super().__init__(dim)
        if eps <= -1.0:
            raise ValueError("quartic perturbation needs eps > -1")
        self.eps = float(eps)

    def _value(self, y):
        sq = [c * c for c in y]
        s2 = sq[0]
        for c in sq[1:]:
            s2 = s2 + c
        s4 = sq[0] * sq[0]
        for c in sq[1:]:
            s4 = s4 + c * c
        return sqrt_(sqrt_(s2 * s2 + self.eps * s4))

    def to_spec(self):
        return {"kind": self.kind, "eps": self.eps}


@dataclass
class NormCheckReport:
    """Sampled validation of the norm axioms."""

    homogeneity_residual: float
    min_hessian_eigenvalue: float
    samples: int
    strongly_convex: bool = field(init=False)

    def __post_init__(self):
        self.strongly_convex = self.min_hessian_eigenvalue > 0.0


def angular_hessian(norm, y):
    """The bilinear form g_y: half the Hessian of phi^2 at y (floats)."""
    n = norm.dim
    space = jet_space(n, 2)
    jets = space.variables([float(c) for c in y])
    sq = norm.value(jets)
    sq = sq * sq
    g = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            alpha = [0] * n
            alpha[i] += 1
            alpha[j] += 1
            g[i, j] = g[j, i] = 0.5 * sq.partial(alpha)
    return g


def check_minkowski(norm, samples, lambdas=(0.5, 2.0, 7.0)):
    """Check homogeneity and strong convexity of a norm on sample directions.

    A non-positive Hessian eigenvalue is reported, not raised: the caller
    decides whether a convexity failure is fatal.
    """
    worst_h = 0.0
    min_eig = math.inf
    count = 0
    for y in samples:
        y = [float(c) for c in y]
        base = norm.value(y)
        for lam in lambdas:
            scaled = norm.value([lam * c for c in y])
            worst_h = max(worst_h, abs(scaled - lam * base))
        eigs = np.linalg.eigvalsh(angular_hessian(norm, y))
        min_eig = min(min_eig, float(eigs[0]))
        count += 1
    return NormCheckReport(worst_h, min_eig, count)


class ConvexDomain:
    """Strongly convex domain: boundary is ``x_o + phi^{-1}(1)``."""

    def __init__(self, norm, base_point=None):
        self.norm = norm
        if base_point is None:
            base_point = [0.0] * norm.dim
        self.base_point = np.asarray(base_point, dtype=float)
        if self.base_point.shape != (norm.dim,):
            raise ValueError("base point dimension mismatch")

    @property
    def dim(self):
        return self.norm.dim

    def gauge(self, x):
        """phi(x - x_o); zero at the base point."""
        z = [xi - oi for xi, oi in zip(x, self.base_point)]
        if _is_origin(z):
            return 0.0
        return self.norm.value(z)

    def contains(self, x):
        """(membership, margin); margin = 1 - phi(x - x_o)."""
        margin = 1.0 - lead_float(self.gauge(x))
        return margin > 0.0, margin

    def is_unit_ball(self):
        return self.is_euclidean_ball() and not self.base_point.any()

    def is_euclidean_ball(self):
        return isinstance(self.norm, EuclideanNorm)

    def to_spec(self):
        return {"norm": self.norm.to_spec(), "x_o": self.base_point.tolist()}


def unit_ball(dim=2):
    return ConvexDomain(EuclideanNorm(dim))


def ellipsoid_domain(matrix, base_point=None):
    return ConvexDomain(EllipsoidNorm(matrix), base_point)


def randers_domain(drift, base_point=None):
    return ConvexDomain(RandersNorm(drift), base_point)


def quartic_domain(dim=2, eps=0.3, base_point=None):
    return ConvexDomain(QuarticNorm(dim, eps), base_point)


def norm_from_spec(spec, dim):
    """Build a norm from the config grammar: a table with a ``kind`` key."""
    if not isinstance(spec, dict):
        raise ValueError("norm spec must be a table")
    kind = spec.get("kind")
    if kind == "euclidean":
        return EuclideanNorm(dim)
    if kind == "ellipsoid":
        if "A" not in spec:
            raise ValueError("ellipsoid norm needs a matrix 'A'")
        norm = EllipsoidNorm(spec["A"])
        if norm.dim != dim:
            raise ValueError("ellipsoid matrix dimension mismatch")
        return norm
    if kind == "randers":
        if "b" not in spec:
            raise ValueError("randers norm needs a drift vector 'b'")
        norm = RandersNorm(spec["b"])
        if norm.dim != dim:
            raise ValueError("randers drift dimension mismatch")
        return norm
    if kind == "quartic":
        return QuarticNorm(dim, float(spec.get("eps", 0.3)))
    raise ValueError(f"unknown norm kind {kind!r}")


def domain_from_spec(spec, dim):
    if not isinstance(spec, dict):
        raise ValueError("domain spec must be a table")
    if "norm" not in spec:
        raise ValueError("domain spec needs a 'norm' table")
    norm = norm_from_spec(spec["norm"], dim)
    return ConvexDomain(norm, spec.get("x_o"))
