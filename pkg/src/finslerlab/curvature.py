"""Fundamental tensor, sprays, Riemann and flag curvature, identity checks.

The Riemann operator of a spray is

    R^i_k = 2 dG^i/dx^k - y^j d2G^i/dx^j dy^k
            + 2 G^j d2G^i/dy^j dy^k - dG^i/dy^j dG^j/dy^k

and every derivative of G here is obtained by running the spray-coefficient
pipeline on jet-valued coordinates: one multivariate jet pass over all 2n
coordinates supplies the first and second partials at once, with the inner
metric derivatives (for metric-induced sprays) flowing through nested
univariate passes.  Nothing is differentiated symbolically.
"""

from __future__ import annotations

import numbers
import warnings
from dataclasses import dataclass, field

import numpy as np

from .jets import lead_float, mixed_partial, taylor_directional
from .polyjet import MultiJet, jet_space

__all__ = [
    "DegenerateFlagError",
    "FundamentalTensor",
    "fundamental_tensor",
    "spray_coeffs",
    "Spray",
    "MetricSpray",
    "ProjectiveSpray",
    "ZeroSpray",
    "funk_spray",
    "RiemannOperator",
    "riemann",
    "FlagCurvatureSample",
    "flag_curvature",
    "flag_curvatures",
    "const_curvature_residual",
    "RapcsakReport",
    "check_rapcsak",
    "check_inverse_pde",
    "check_gradient_identity",
    "check_self_adjoint",
]


class DegenerateFlagError(ValueError):
    """Flag vector is (numerically) parallel to the pole vector."""


def _all_numbers(seq):
    return all(isinstance(v, numbers.Real) for v in seq)


def _fsq_field(metric):
    n = metric.dim
    def fsq(xy):
        v = metric.value(xy[:n], xy[n:])
        return v * v
    return fsq


def _metric_field(metric):
    n = metric.dim
    return lambda xy: metric.value(xy[:n], xy[n:])


def _unit(n, i):
    d = [0.0] * n
    d[i] = 1.0
    return d


# -- fundamental tensor -------------------------------------------------------


@dataclass
class FundamentalTensor:
    """g_ij(x, y) = half the y-Hessian of F^2 at a base point."""

    matrix: np.ndarray
    x: np.ndarray
    y: np.ndarray
    min_eigenvalue: float = field(init=False)

    def __post_init__(self):
        self.min_eigenvalue = float(np.linalg.eigvalsh(self.matrix)[0])

    def inner(self, u, v):
        return float(np.asarray(u) @ self.matrix @ np.asarray(v))


def _g_matrix(metric, x, y):
    """Fundamental tensor entries at float coordinates."""
    n = metric.dim
    space = jet_space(n, 2)
    jets = space.variables([float(c) for c in y])
    v = metric.value([float(c) for c in x], jets)
    fsq = v * v
    g = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            alpha = [0] * n
            alpha[i] += 1
            alpha[j] += 1
            g[i, j] = g[j, i] = 0.5 * fsq.partial(alpha)
    return g


def fundamental_tensor(metric, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    g = _g_matrix(metric, x, y)
    if not np.isfinite(g).all():
        raise ArithmeticError("fundamental tensor has non-finite entries")
    return FundamentalTensor(g, x, y)


# -- spray coefficients -------------------------------------------------------


def spray_coeffs(metric, x, y):
    """Spray coefficients G^i = 1/4 g^{il} {2 dg_jl/dx^k - dg_jk/dx^l} y^j y^k.

    Accepts jet-valued coordinates; the needed metric derivatives are taken
    by jet passes of F^2 (never symbolically), and the small linear system is
    solved with partial pivoting.
    """
    n = metric.dim
    x = list(x)
    y = list(y)
    if _all_numbers(x) and _all_numbers(y):
        return _spray_float(metric, [float(c) for c in x],
                            [float(c) for c in y])
    return _spray_ring(metric, x, y)


def _spray_float(metric, x, y):
    n = metric.dim
    space = jet_space(2 * n, 3)
    jets = space.variables(x + y)
    v = metric.value(jets[:n], jets[n:])
    fsq = v * v
    g = np.empty((n, n))
    dgx = np.empty((n, n, n))  # dgx[j, l, k] = dg_jl / dx^k
    for j in range(n):
        for l in range(j, n):
            alpha = [0] * (2 * n)
            alpha[n + j] += 1
            alpha[n + l] += 1
            g[j, l] = g[l, j] = 0.5 * fsq.partial(alpha)
            for k in range(n):
                alpha[k] += 1
                dgx[j, l, k] = dgx[l, j, k] = 0.5 * fsq.partial(alpha)
                alpha[k] -= 1
    yv = np.asarray(y)
    b = np.empty(n)
    for l in range(n):
        b[l] = yv @ (2.0 * dgx[:, l, :] @ yv) - yv @ dgx[:, :, l] @ yv
    cond = np.linalg.cond(g)
    if cond > 1e8:
        warnings.warn(f"fundamental tensor condition number {cond:.2e}",
                      RuntimeWarning, stacklevel=2)
    return np.linalg.solve(g, b) / 4.0


def _spray_ring(metric, x, y):
    n = metric.dim
    fsq = _fsq_field(metric)
    xy = x + y
    two_n = 2 * n
    # Directional derivative along (y, 0) in the x-slots gives the contraction
    # sum_k y^k dg_jl/dx^k in one pass per (j, l); the remaining contraction
    # sum_jk dg_jk/dx^l y^j y^k equals d(F^2)/dx^l by Euler homogeneity.
    dvec = list(y) + [0.0] * n
    g = [[None] * n for _ in range(n)]
    dg_along = [[None] * n for _ in range(n)]
    for j in range(n):
        for l in range(j, n):
            alpha = [0] * two_n
            alpha[n + j] += 1
            alpha[n + l] += 1

            def gfun(q, _a=tuple(alpha)):
                return 0.5 * mixed_partial(fsq, q, _a)

            ts = taylor_directional(gfun, xy, dvec, 1)
            g[j][l] = g[l][j] = ts.coefficient(0)
            dg_along[j][l] = dg_along[l][j] = ts.coefficient(1)
    b = []
    for l in range(n):
        hx = taylor_directional(fsq, xy, _unit(two_n, l), 1).coefficient(1)
        acc = -1.0 * hx
        for j in range(n):
            acc = acc + 2.0 * (y[j] * dg_along[j][l])
        b.append(acc)
    w = _ring_solve(g, b)
    return [wi * 0.25 for wi in w]


def _ring_solve(a, b):
    """Gauss elimination with partial pivoting over jet-valued entries."""
    n = len(b)
    m = [list(a[i]) + [b[i]] for i in range(n)]
    for col in range(n):
        piv_row = max(range(col, n), key=lambda r: abs(lead_float(m[r][col])))
        if abs(lead_float(m[piv_row][col])) < 1e-12:
            raise ArithmeticError("singular fundamental tensor in spray solve")
        if piv_row != col:
            m[col], m[piv_row] = m[piv_row], m[col]
        piv = m[col][col]
        for r in range(col + 1, n):
            factor = m[r][col] / piv
            for c in range(col + 1, n + 1):
                m[r][c] = m[r][c] - factor * m[col][c]
    out = [None] * n
    for r in range(n - 1, -1, -1):
        acc = m[r][n]
        for c in range(r + 1, n):
            acc = acc - m[r][c] * out[c]
        out[r] = acc / m[r][r]
    return out


# -- spray objects ------------------------------------------------------------


class Spray:
    """Second-order field with 2-homogeneous coefficients G^i(x, y)."""

    kind = "abstract"

    def __init__(self, dim, domain=None):
        self.dim = dim
        self.domain = domain

    def coeffs(self, x, y):
        raise NotImplementedError


class MetricSpray(Spray):
    """The spray induced by a Finsler metric through its fundamental tensor."""

    kind = "metric-induced"

    def __init__(self, metric):
        super().__init__(metric.dim, metric.domain)
        self.metric = metric

    def coeffs(self, x, y):
        return spray_coeffs(self.metric, x, y)


class ProjectiveSpray(Spray):
    """G^i = P(x, y) y^i for a scalar projective factor field P."""

    kind = "projective"

    def __init__(self, factor, dim, domain=None, kind=None):
        super().__init__(dim, domain)
        self.factor = factor
        if kind is not None:
            self.kind = kind

    def coeffs(self, x, y):
        p = self.factor(x, y)
        return [p * yi for yi in y]


class ZeroSpray(Spray):
    kind = "flat"

    def coeffs(self, x, y):
        return [0.0] * self.dim


def funk_spray(funk_metric):
    """The spray G^i = F y^i built from a Funk metric (R-flat by design)."""
    if not funk_metric.kind.startswith("funk-"):
        raise ValueError("funk_spray needs a Funk metric, got "
                         f"{funk_metric.kind!r}")
    return ProjectiveSpray(funk_metric.value, funk_metric.dim,
                           funk_metric.domain, kind="funk-spray")


# -- Riemann curvature --------------------------------------------------------


@dataclass
class RiemannOperator:
    """R^i_k at a base point, with the R_y(y) = 0 contraction residual."""

    matrix: np.ndarray
    x: np.ndarray
    y: np.ndarray
    ry_residual: float

    def apply(self, u):
        return self.matrix @ np.asarray(u)


def _extract(value, alpha, space):
    if isinstance(value, MultiJet):
        return value.partial(alpha)
    return float(value) if not any(alpha) else 0.0


def riemann(spray, x, y, contraction_tol=1e-6):
    """Riemann operator of a spray at float coordinates.

    One multivariate jet pass of the spray pipeline over all 2n coordinates
    supplies every derivative in the formula.
    """
    n = spray.dim
    xf = [float(c) for c in x]
    yf = [float(c) for c in y]
    space = jet_space(2 * n, 2)
    jets = space.variables(xf + yf)
    G = spray.coeffs(jets[:n], jets[n:])

    def e2(i, j):
        alpha = [0] * (2 * n)
        alpha[i] += 1
        alpha[j] += 1
        return alpha

    gv = np.array([_extract(G[i], [0] * (2 * n), space) for i in range(n)])
    dgx = np.empty((n, n))
    dgy = np.empty((n, n))
    d2xy = np.empty((n, n, n))
    d2yy = np.empty((n, n, n))
    for i in range(n):
        for k in range(n):
            alpha = [0] * (2 * n)
            alpha[k] = 1
            dgx[i, k] = _extract(G[i], alpha, space)
            alpha = [0] * (2 * n)
            alpha[n + k] = 1
            dgy[i, k] = _extract(G[i], alpha, space)
            for j in range(n):
                d2xy[i, j, k] = _extract(G[i], e2(j, n + k), space)
                d2yy[i, j, k] = _extract(G[i], e2(n + j, n + k), space)
    yv = np.asarray(yf)
    r = np.empty((n, n))
    for i in range(n):
        for k in range(n):
            r[i, k] = (2.0 * dgx[i, k]
                       - yv @ d2xy[i, :, k]
                       + 2.0 * gv @ d2yy[i, :, k]
                       - dgy[i, :] @ dgy[:, k])
    ry = r @ yv
    ymax = float(np.abs(yv).max())
    scale = ymax * max(float(np.abs(r).max()),
                       (float(np.abs(gv).max()) / ymax) ** 2, 1e-300)
    ry_residual = float(np.abs(ry).max()) / scale
    if ry_residual > contraction_tol:
        raise ArithmeticError(
            f"R_y(y) contraction residual {ry_residual:.3e} exceeds "
            f"{contraction_tol:.1e}; spray coefficients are inconsistent")
    return RiemannOperator(r, np.asarray(xf), yv, ry_residual)


# -- flag curvature -----------------------------------------------------------


@dataclass
class FlagCurvatureSample:
    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    value: float
    denominator: float


def flag_curvatures(metric, x, y, flag_vectors, degeneracy_tol=1e-12):
    """Flag curvatures K(span{y,u}, y) for several flag vectors at one base.

    The Riemann operator and fundamental tensor are computed once per base
    point and reused across flag vectors.
    """
    g = _g_matrix(metric, x, y)
    rop = riemann(MetricSpray(metric), x, y)
    yv = np.asarray(y, dtype=float)
    gy = g @ yv
    yy = float(yv @ gy)
    out = []
    for u in flag_vectors:
        uv = np.asarray(u, dtype=float)
        gu = g @ uv
        uu = float(uv @ gu)
        yu = float(yv @ gu)
        den = yy * uu - yu * yu
        if den <= degeneracy_tol * yy * uu:
            raise DegenerateFlagError(
                "flag vector is numerically parallel to the pole vector")
        num = float((rop.matrix @ uv) @ g @ uv)
        out.append(FlagCurvatureSample(np.asarray(x, dtype=float), yv, uv,
                                       num / den, den))
    return out


def flag_curvature(metric, x, y, u, degeneracy_tol=1e-12):
    return flag_curvatures(metric, x, y, [u], degeneracy_tol)[0]


def const_curvature_residual(metric, x, y, lam):
    """Normalized residual of R_y(u) = lam (g(y,y) u - g(y,u) y) over basis u."""
    n = metric.dim
    g = _g_matrix(metric, x, y)
    rop = riemann(MetricSpray(metric), x, y)
    yv = np.asarray(y, dtype=float)
    gy = g @ yv
    yy = float(yv @ gy)
    fval = lead_float(metric.value([float(c) for c in x], [float(c) for c in y]))
    worst = 0.0
    for k in range(n):
        u = np.zeros(n)
        u[k] = 1.0
        diff = rop.matrix @ u - lam * (yy * u - gy[k] * yv)
        worst = max(worst, float(np.abs(diff).max()))
    return worst / (fval * fval)


# -- identity checks ----------------------------------------------------------


@dataclass
class RapcsakReport:
    """Residuals of the straight-geodesic identity and the projective factor.

    A metric has straight-line geodesics iff F_{x^k y^l} y^k = F_{x^l} for
    every l; the projective factor is then P = F_{x^k} y^k / (2F).
    """

    residual: float
    components: tuple
    projective_factor: float


def check_rapcsak(metric, x, y):
    n = metric.dim
    ff = _metric_field(metric)
    xy = [float(c) for c in x] + [float(c) for c in y]
    yv = [float(c) for c in y]
    dvec = yv + [0.0] * n  # x-directional derivative along the fixed vector y

    def contracted(q):
        return taylor_directional(ff, q, dvec, 1).coefficient(1)

    fval = lead_float(metric.value(xy[:n], xy[n:]))
    comps = []
    for l in range(n):
        lhs = taylor_directional(contracted, xy, _unit(2 * n, n + l), 1
                                 ).derivative(1)
        rhs = taylor_directional(ff, xy, _unit(2 * n, l), 1).derivative(1)
        comps.append(abs(lhs - rhs) / fval)
    factor = contracted(xy) / (2.0 * fval)
    return RapcsakReport(max(comps), tuple(comps), factor)


def check_inverse_pde(base_metric, candidate, x, y):
    """Residual of d(candidate)/dx^k = d(base * candidate)/dy^k, normalized.

    Vanishing residual certifies that the candidate metric induces the spray
    G^i = base(x, y) y^i.
    """
    n = base_metric.dim
    tf = _metric_field(candidate)
    xy = [float(c) for c in x] + [float(c) for c in y]

    def product(q):
        return (base_metric.value(q[:n], q[n:])
                * candidate.value(q[:n], q[n:]))

    scale = (lead_float(base_metric.value(xy[:n], xy[n:]))
             * lead_float(candidate.value(xy[:n], xy[n:])))
    worst = 0.0
    for k in range(n):
        lhs = taylor_directional(tf, xy, _unit(2 * n, k), 1).derivative(1)
        rhs = taylor_directional(product, xy, _unit(2 * n, n + k), 1
                                 ).derivative(1)
        worst = max(worst, abs(lhs - rhs))
    return worst / scale


def check_gradient_identity(metric, x, y):
    """Residual of F_{x^i} = F F_{y^i}, normalized by F^2.

    This is the defining first-order system of the Funk metric; it holds for
    the implicit evaluator up to solver tolerance.
    """
    n = metric.dim
    ff = _metric_field(metric)
    xy = [float(c) for c in x] + [float(c) for c in y]
    fval = lead_float(metric.value(xy[:n], xy[n:]))
    worst = 0.0
    for i in range(n):
        fx = taylor_directional(ff, xy, _unit(2 * n, i), 1).derivative(1)
        fy = taylor_directional(ff, xy, _unit(2 * n, n + i), 1).derivative(1)
        worst = max(worst, abs(fx - fval * fy))
    return worst / (fval * fval)


def check_self_adjoint(metric, x, y):
    """Asymmetry of g(R_y(u), v) for the metric-induced spray, normalized."""
    g = _g_matrix(metric, x, y)
    rop = riemann(MetricSpray(metric), x, y)
    a = g @ rop.matrix
    asym = float(np.abs(a - a.T).max())
    fval = lead_float(metric.value([float(c) for c in x],
                                   [float(c) for c in y]))
    scale = max(fval * fval * float(np.abs(g).max()), 1e-300)
    return asym / scale
