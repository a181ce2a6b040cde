"""The projectively flat metric family on a strongly convex domain.

Every metric here is an evaluatable scalar field ``F(x, y)`` on
(interior point, nonzero vector), written so that jet-valued coordinates
flow through unchanged.  The Funk metric is the root object: ``F`` is the
unique positive solution of ``phi(x - x_o + y/F) = 1``.  Derived from it are
the Hilbert symmetrization, the zero-curvature correction
``F + F_{x^i}(x^i - a^i)``, the Randers-type perturbation on the ball, and
truncated power-series solutions of the induced-spray equation.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass

import numpy as np

from .jets import (directional_variables, lead_float, max_abs, sin_, sqrt_,
                   taylor_directional)
from .norms import ConvexDomain, MinkowskiNorm, unit_ball

__all__ = [
    "MetricDomainError",
    "FunkSolverError",
    "PositivityError",
    "NewtonSolveTrace",
    "FinslerMetric",
    "FunkMetric",
    "HilbertMetric",
    "ZeroCurvatureMetric",
    "ZeroCurvatureBallMetric",
    "RandersFunkMetric",
    "SeriesMetric",
    "SineWarpMetric",
    "funk_eval",
    "funk_ball_eval",
    "hilbert_eval",
    "zero_curvature_eval",
    "zero_curvature_ball_eval",
    "randers_funk_eval",
    "series_metric_eval",
]

_SOLVE_TOL = 1e-13
_MAX_NEWTON = 60
_MAX_POLISH = 16  # jet Newton squares the error's nilpotent degree per step


class MetricDomainError(ValueError):
    """Base point on or outside the domain boundary."""


class FunkSolverError(RuntimeError):
    """The implicit solve failed to converge; carries the solve trace."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class PositivityError(ArithmeticError):
    """A metric evaluation produced a non-positive value."""


@dataclass
class NewtonSolveTrace:
    iterations: int
    residual: float
    bracket: tuple

    @property
    def converged(self):
        return self.residual <= _SOLVE_TOL


def _is_number(v):
    return isinstance(v, numbers.Real)


def _all_numbers(seq):
    return all(_is_number(v) for v in seq)


class FinslerMetric:
    """Scalar field F(x, y), positively 1-homogeneous in y."""

    kind = "abstract"

    def __init__(self, domain):
        self.domain = domain

    @property
    def dim(self):
        return self.domain.dim

    def value(self, x, y):
        raise NotImplementedError

    def __call__(self, x, y):
        return self.value(x, y)


def _ball_funk(x, y):
    """Closed form on the euclidean unit ball (x relative to the center)."""
    xx = x[0] * x[0]
    xy = x[0] * y[0]
    yy = y[0] * y[0]
    for xi, yi in zip(x[1:], y[1:]):
        xx = xx + xi * xi
        xy = xy + xi * yi
        yy = yy + yi * yi
    one_m_xx = 1.0 - xx
    if lead_float(one_m_xx) <= 0.0:
        raise MetricDomainError("point not interior to the unit ball")
    rad = yy - (xx * yy - xy * xy)
    return (sqrt_(rad) + xy) / one_m_xx


def funk_ball_eval(x, y):
    """Funk metric of the euclidean unit ball, |x| < 1, y != 0."""
    return _ball_funk(list(x), list(y))


class FunkMetric(FinslerMetric):
    """Funk metric of a strongly convex domain.

    ``method``:
      * ``"auto"``     -- closed form on the euclidean unit ball, implicit solve
                          elsewhere
      * ``"implicit"`` -- always solve ``phi(x - x_o + y/F) = 1`` (oracle path)
      * ``"closed"``   -- closed form only (requires a euclidean ball)

    The implicit evaluator substitutes ``s = 1/F``, brackets the root of the
    monotone-past-the-root map ``s -> phi(z + s y) - 1``, applies safeguarded
    Newton on leading coefficients, and then re-runs Newton updates in full
    jet arithmetic so that derivative coefficients of any order are
    propagated through the solve.
    """

    def __init__(self, domain, method="auto"):
        super().__init__(domain)
        if method not in ("auto", "implicit", "closed"):
            raise ValueError(f"unknown funk method {method!r}")
        if method == "closed" and not domain.is_euclidean_ball():
            raise ValueError("closed-form Funk needs a euclidean ball domain")
        self._closed = (method == "closed"
                        or (method == "auto" and domain.is_euclidean_ball()))
        self.kind = "funk-ball" if self._closed else "funk-implicit"

    def value(self, x, y):
        if self._closed:
            xo = self.domain.base_point
            if xo.any():
                x = [xi - oi for xi, oi in zip(x, xo)]
            return _ball_funk(list(x), list(y))
        return self._implicit_value(list(x), list(y))

    # -- implicit path -------------------------------------------------------

    def _edge(self, zf, yf, s):
        """phi(z + s y) - 1 and its s-derivative at float arguments."""
        phi = self.domain.norm
        pt = [zi + s * yi for zi, yi in zip(zf, yf)]
        ts = taylor_directional(phi.value, pt, yf, 1)
        return ts.coefficient(0) - 1.0, ts.coefficient(1)

    def _solve_float(self, zf, yf):
        """Root s* of phi(z + s y) = 1 with bracket + safeguarded Newton."""
        phi = self.domain.norm
        gz = 0.0 if all(c == 0.0 for c in zf) else phi.value(zf)
        margin = 1.0 - gz
        if margin <= 1e-12:
            raise MetricDomainError(
                f"base point is not interior (margin {margin:.3e})")
        gy = phi.value(yf)
        s_lo = margin / gy
        gneg = 0.0 if all(c == 0.0 for c in zf) else phi.value([-c for c in zf])
        s_hi = (1.0 + gneg) / gy
        h_hi, _ = self._edge(zf, yf, s_hi)
        widen = 0
        while h_hi < 0.0 and widen < 60:
            s_hi *= 2.0
            h_hi, _ = self._edge(zf, yf, s_hi)
            widen += 1
        bracket = (s_lo, s_hi)
        s = s_hi
        h, dh = h_hi, None
        iterations = 0
        converged = False
        for iterations in range(1, _MAX_NEWTON + 1):
            h, dh = self._edge(zf, yf, s)
            if abs(h) <= _SOLVE_TOL:
                if converged:
                    break
                # one Newton step past the tolerance lands on the rounding
                # floor, keeping F smooth to machine precision in (x, y)
                converged = True
            else:
                converged = False
            if h > 0.0:
                s_hi = min(s_hi, s)
            else:
                s_lo = max(s_lo, s)
            if dh > 0.0:
                step = s - h / dh
            else:
                step = s_lo - 1.0  # force bisection
            if not (s_lo < step < s_hi) and not converged:
                step = 0.5 * (s_lo + s_hi)
            if step == s:
                break
            s = step
        trace = NewtonSolveTrace(iterations, abs(h), bracket)
        if abs(h) > _SOLVE_TOL:
            raise FunkSolverError(
                f"funk solve stalled at residual {abs(h):.3e}", trace)
        if dh is None or dh <= 0.0:
            _, dh = self._edge(zf, yf, s)
        return s, dh, trace

    def _implicit_value(self, x, y):
        xo = self.domain.base_point
        z = [xi - oi for xi, oi in zip(x, xo)]
        zf = [lead_float(c) for c in z]
        yf = [lead_float(c) for c in y]
        s0, _, _ = self._solve_float(zf, yf)
        if _all_numbers(z) and _all_numbers(y):
            return 1.0 / s0
        # Newton in full jet arithmetic: starting from the exact float root,
        # each step squares the nilpotent degree of the error, so all
        # derivative coefficients converge in a handful of iterations.
        phi = self.domain.norm
        s = s0
        m = scale = None
        for _ in range(_MAX_POLISH):
            pt = [zi + s * yi for zi, yi in zip(z, y)]
            along = taylor_directional(phi.value, pt, y, 1)
            val = along.coefficient(0) - 1.0
            m = max_abs(val)
            scale = 1.0 + max(max_abs(c) for c in pt)
            if m <= _SOLVE_TOL * scale:
                return 1.0 / s
            s = s - val / along.coefficient(1)
        if m <= 1e-9 * scale:
            return 1.0 / s  # rounding floor above the formal tolerance
        raise FunkSolverError(
            f"jet Newton did not converge (residual {m:.3e})",
            NewtonSolveTrace(_MAX_POLISH, float(m), (s0, s0)))

    def solve_trace(self, x, y):
        """Float evaluation plus the Newton trace, for diagnostics."""
        xo = self.domain.base_point
        zf = [float(xi) - oi for xi, oi in zip(x, xo)]
        yf = [float(c) for c in y]
        s, _, trace = self._solve_float(zf, yf)
        return 1.0 / s, trace


class HilbertMetric(FinslerMetric):
    """Symmetrization (F(x,y) + F(x,-y))/2 of the Funk metric; reversible."""

    kind = "hilbert"

    def __init__(self, funk):
        super().__init__(funk.domain)
        self.funk = funk

    def value(self, x, y):
        forward = self.funk.value(x, y)
        backward = self.funk.value(x, [-c for c in y])
        return 0.5 * (forward + backward)


class ZeroCurvatureMetric(FinslerMetric):
    """The corrected metric F * (1 + F_{y^i} (x^i - a^i)) anchored at a.

    Equal to F + F_{x^i}(x^i - a^i) by the Funk gradient identity
    F_{x^i} = F F_{y^i}; the y-derivative form is used because y-derivatives
    through the implicit solve are cheaper and better conditioned than
    x-derivatives.  Its induced spray has coefficients F y^i, making it flat.
    """

    kind = "funk-k0"

    def __init__(self, funk, anchor):
        super().__init__(funk.domain)
        self.funk = funk
        anchor = np.asarray(anchor, dtype=float)
        inside, margin = funk.domain.contains(anchor)
        if not inside:
            raise MetricDomainError(
                f"anchor must be interior to the domain (margin {margin:.3e})")
        self.anchor = anchor

    def value(self, x, y):
        funk = self.funk
        x = list(x)
        y = list(y)
        f = funk.value(x, y)
        correction = 1.0
        for i in range(self.dim):
            d = [0.0] * self.dim
            d[i] = 1.0
            f_yi = taylor_directional(
                lambda q: funk.value(x, q), y, d, 1, ambient=x).coefficient(1)
            correction = correction + f_yi * (x[i] - self.anchor[i])
        val = f * correction
        if lead_float(val) <= 0.0:
            raise PositivityError(
                f"corrected metric non-positive ({lead_float(val):.3e}); "
                "anchored construction violated positivity here")
        return val


class ZeroCurvatureBallMetric(FinslerMetric):
    """Closed form of the corrected metric on the euclidean unit ball:

        ((1 - <a,x>) F^2 - <a,y> F) / sqrt(|y|^2 - (|x|^2|y|^2 - <x,y>^2))

    with F the ball Funk metric; reduces to F^2 / sqrt(...) at a = 0.
    """

    kind = "funk-k0-ball"

    def __init__(self, anchor, dim=None):
        anchor = np.asarray(anchor, dtype=float)
        if dim is None:
            dim = anchor.shape[0]
        if anchor.shape != (dim,):
            raise ValueError("anchor dimension mismatch")
        if np.linalg.norm(anchor) >= 1.0:
            raise MetricDomainError("anchor must satisfy |a| < 1")
        super().__init__(unit_ball(dim))
        self.anchor = anchor

    def value(self, x, y):
        a = self.anchor
        xx = x[0] * x[0]
        xy = x[0] * y[0]
        yy = y[0] * y[0]
        ax = a[0] * x[0]
        ay = a[0] * y[0]
        for i in range(1, self.dim):
            xx = xx + x[i] * x[i]
            xy = xy + x[i] * y[i]
            yy = yy + y[i] * y[i]
            ax = ax + a[i] * x[i]
            ay = ay + a[i] * y[i]
        if lead_float(xx) >= 1.0:
            raise MetricDomainError("point not interior to the unit ball")
        rad = yy - (xx * yy - xy * xy)
        root = sqrt_(rad)
        f = (root + xy) / (1.0 - xx)
        val = ((1.0 - ax) * (f * f) - ay * f) / root
        if lead_float(val) <= 0.0:
            raise PositivityError(
                f"corrected metric non-positive ({lead_float(val):.3e})")
        return val


class RandersFunkMetric(FinslerMetric):
    """Ball Funk metric plus the closed 1-form <a,y>/(1 + <a,x>), |a| < 1."""

    kind = "randers-funk"

    def __init__(self, drift, dim=None):
        drift = np.asarray(drift, dtype=float)
        if dim is None:
            dim = drift.shape[0]
        if drift.shape != (dim,):
            raise ValueError("drift dimension mismatch")
        if np.linalg.norm(drift) >= 1.0:
            raise MetricDomainError("drift must satisfy |a| < 1")
        super().__init__(unit_ball(dim))
        self.drift = drift

    def value(self, x, y):
        a = self.drift
        base = _ball_funk(list(x), list(y))
        ax = a[0] * x[0]
        ay = a[0] * y[0]
        for i in range(1, self.dim):
            ax = ax + a[i] * x[i]
            ay = ay + a[i] * y[i]
        return base + ay / (1.0 + ax)


class SeriesMetric(FinslerMetric):
    """Truncated power-series solution of the induced-spray equation.

    The full series is sum_m (1/m!) d^m/dt^m [phi^m(y+tx) psi(y+tx)] at t=0;
    this evaluator keeps terms through m = M and reports the magnitude of the
    last kept term as a tail estimate.  One directional jet pass of order M
    supplies every term: the m-th term is the m-th Taylor coefficient of
    phi^m * psi along t.
    """

    kind = "series"

    def __init__(self, phi, psi, truncation):
        if not isinstance(phi, MinkowskiNorm) or not isinstance(psi, MinkowskiNorm):
            raise TypeError("phi and psi must be Minkowski norms")
        if phi.dim != psi.dim:
            raise ValueError("phi and psi dimensions differ")
        if truncation < 0:
            raise ValueError("truncation order must be >= 0")
        super().__init__(ConvexDomain(phi))
        self.phi = phi
        self.psi = psi
        self.truncation = int(truncation)

    def value(self, x, y):
        return self.value_with_tail(x, y)[0]

    def value_with_tail(self, x, y):
        m_max = self.truncation
        if m_max == 0:
            val = self.psi.value(list(y))
            return val, abs(lead_float(val))
        # One set of jet coordinates along t -> y + t x serves both norms.
        coords, _ = directional_variables(list(y), list(x), m_max)
        phi_jet = self.phi.value(coords)
        psi_jet = self.psi.value(coords)
        total = psi_jet.coefficient(0)
        power = psi_jet
        term = total
        for m in range(1, m_max + 1):
            power = power * phi_jet
            term = power.coefficient(m)
            total = total + term
        return total, max_abs(term)

    def partial_sums(self, x, y):
        """(m, term, running sum) rows at float coordinates."""
        m_max = self.truncation
        coords, _ = directional_variables(
            [float(c) for c in y], [float(c) for c in x], max(m_max, 1))
        phi_jet = self.phi.value(coords)
        psi_jet = self.psi.value(coords)
        total = psi_jet.coefficient(0)
        rows = [(0, total, total)]
        power = psi_jet
        for m in range(1, m_max + 1):
            power = power * phi_jet
            term = power.coefficient(m)
            total = total + term
            rows.append((m, term, total))
        return rows


class SineWarpMetric(FinslerMetric):
    """|y| * (1 + amplitude * sin x^1): a deliberately non-projectively-flat
    fixture used as the negative control in verification suites."""

    kind = "sine-warp"

    def __init__(self, dim=2, amplitude=0.3):
        super().__init__(unit_ball(dim))
        self.amplitude = float(amplitude)

    def value(self, x, y):
        acc = y[0] * y[0]
        for c in y[1:]:
            acc = acc + c * c
        return sqrt_(acc) * (1.0 + self.amplitude * sin_(x[0]))


# -- operation-style wrappers -------------------------------------------------


def funk_eval(domain, x, y):
    """Implicit Funk metric value on an arbitrary strongly convex domain."""
    return FunkMetric(domain, method="implicit").value(x, y)


def hilbert_eval(domain, x, y):
    return HilbertMetric(FunkMetric(domain)).value(x, y)


def zero_curvature_eval(domain, anchor, x, y):
    """Corrected metric built from the domain's Funk metric by jets."""
    return ZeroCurvatureMetric(FunkMetric(domain), anchor).value(x, y)


def zero_curvature_ball_eval(anchor, x, y):
    return ZeroCurvatureBallMetric(anchor, dim=len(x)).value(x, y)


def randers_funk_eval(drift, x, y):
    return RandersFunkMetric(drift, dim=len(x)).value(x, y)


def series_metric_eval(phi, psi, truncation, x, y):
    """Partial sum and tail estimate of the power-series metric."""
    return SeriesMetric(phi, psi, truncation).value_with_tail(x, y)
