"""Truncated univariate Taylor arithmetic, nestable to any depth.

A :class:`TaylorScalar` carries the coefficients ``c_0..c_m`` of a function
``t -> f(p + t d)`` expanded at ``t = 0``.  Coefficient entries form a ring:
they may be plain floats, :class:`~finslerlab.polyjet.MultiJet` values, or
TaylorScalars from an enclosing differentiation pass.  That last case is what
makes the engine nestable -- a field that internally differentiates (e.g.
spray coefficients built from second derivatives of a metric) can itself be
differentiated by an outer pass, with no symbolic manipulation anywhere.

Nesting levels disambiguate jets from different passes: each directional pass
runs at level ``1 + max(level of any value in scope)``, and arithmetic between
jets of different levels treats the lower-level operand as a constant
coefficient.  Plain numbers and MultiJets sit at level 0.
"""

from __future__ import annotations

import math

__all__ = [
    "JetDomainError",
    "TaylorScalar",
    "taylor_directional",
    "directional_variables",
    "mixed_partial",
    "fd_partial",
    "level_of",
    "lead_float",
    "max_abs",
    "sqrt_",
    "sin_",
    "cos_",
    "exp_",
]

# Leading coefficients smaller than this are treated as singular in division
# and square roots; the metrics evaluated through the engine are bounded away
# from zero on valid inputs.
LEAD_EPS = 1e-14

_FACTORIALS = [float(math.factorial(k)) for k in range(32)]


class JetDomainError(ArithmeticError):
    """Evaluation left the domain of a jet operation (e.g. sqrt of a
    non-positive leading coefficient, division by a vanishing jet)."""


def level_of(value):
    """Nesting level of a ring element (0 for numbers and MultiJets)."""
    return value.level if isinstance(value, TaylorScalar) else 0


def lead_float(value):
    """Recursively extract the order-zero float of a ring element."""
    while hasattr(value, "lead"):
        value = value.lead()
    return float(value)


def max_abs(value):
    """Largest coefficient magnitude across all nesting levels."""
    if hasattr(value, "max_abs"):
        return value.max_abs()
    return abs(float(value))


def sqrt_(value):
    """Square root dispatching on ring type."""
    if hasattr(value, "sqrt"):
        return value.sqrt()
    if value < 0.0:
        raise JetDomainError(f"sqrt of negative value {value}")
    return math.sqrt(value)


def sin_(value):
    return value.sin() if hasattr(value, "sin") else math.sin(value)


def cos_(value):
    return value.cos() if hasattr(value, "cos") else math.cos(value)


def exp_(value):
    return value.exp() if hasattr(value, "exp") else math.exp(value)


class TaylorScalar:
    """Coefficients of a truncated Taylor expansion along one direction.

    ``coeffs[k]`` is the k-th Taylor coefficient, so the k-th derivative is
    ``k! * coeffs[k]``.  Arithmetic is exact through the stored order for
    inputs that are polynomials of matching degree.
    """

    __slots__ = ("coeffs", "level")

    __array_ufunc__ = None  # keep numpy from elementwise-hijacking operators

    def __init__(self, coeffs, level=1):
        self.coeffs = tuple(coeffs)
        self.level = level
        if not self.coeffs:
            raise ValueError("TaylorScalar needs at least one coefficient")

    @property
    def order(self):
        return len(self.coeffs) - 1

    def coefficient(self, k):
        return self.coeffs[k] if k < len(self.coeffs) else 0.0

    def derivative(self, k):
        """k-th derivative along the pass direction: k! * c_k."""
        fact = _FACTORIALS[k] if k < len(_FACTORIALS) else float(math.factorial(k))
        return fact * self.coefficient(k)

    def lead(self):
        return self.coeffs[0]

    def max_abs(self):
        return max(max_abs(c) for c in self.coeffs)

    def __repr__(self):
        return f"TaylorScalar(level={self.level}, coeffs={self.coeffs!r})"

    def __float__(self):
        raise TypeError("refusing to demote a TaylorScalar to float; "
                        "use lead_float() if the truncation is intentional")

    def __bool__(self):
        raise TypeError("TaylorScalar has no truth value")

    # -- arithmetic ---------------------------------------------------------

    # Reflected dunders never fire between two TaylorScalars (same type), so
    # cross-level combinations delegate explicitly: the higher-level jet
    # treats the lower-level one as a constant coefficient.

    def _classify(self, other):
        """Return 'same', 'coeff', or 'defer' for a binary operand."""
        if isinstance(other, TaylorScalar):
            if other.level == self.level:
                return "same"
            if other.level < self.level:
                return "coeff"
            return "defer"
        return "coeff"

    def __add__(self, other):
        kind = self._classify(other)
        if kind == "defer":
            return other.__add__(self)
        if kind == "coeff":
            cs = list(self.coeffs)
            cs[0] = cs[0] + other
            return TaylorScalar(cs, self.level)
        a, b = self.coeffs, other.coeffs
        la, lb = len(a), len(b)
        lo = min(la, lb)
        cs = [a[k] + b[k] for k in range(lo)]
        cs.extend(a[lo:] if la > lb else b[lo:])
        return TaylorScalar(cs, self.level)

    __radd__ = __add__

    def __neg__(self):
        return TaylorScalar([-c for c in self.coeffs], self.level)

    def __sub__(self, other):
        if self._classify(other) == "defer":
            return (-other).__add__(self)
        return self.__add__(-other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        kind = self._classify(other)
        if kind == "defer":
            return other.__mul__(self)
        if kind == "coeff":
            return TaylorScalar([c * other for c in self.coeffs], self.level)
        la, lb = len(self.coeffs), len(other.coeffs)
        n = max(la, lb)
        a, b = self.coeffs, other.coeffs
        cs = []
        for k in range(n):
            acc = None
            jlo = max(0, k - lb + 1)
            for j in range(jlo, min(k, la - 1) + 1):
                term = a[j] * b[k - j]
                acc = term if acc is None else acc + term
            cs.append(0.0 if acc is None else acc)
        return TaylorScalar(cs, self.level)

    __rmul__ = __mul__

    def __truediv__(self, other):
        kind = self._classify(other)
        if kind == "defer":
            return _jet_divide((self,), other.coeffs, other.level)
        if kind == "coeff":
            return TaylorScalar([c / other for c in self.coeffs], self.level)
        return _jet_divide(self.coeffs, other.coeffs, self.level)

    def __rtruediv__(self, other):
        return _jet_divide((other,), self.coeffs, self.level)

    def __pow__(self, exponent):
        if isinstance(exponent, float):
            if exponent == 0.5:
                return self.sqrt()
            if exponent.is_integer():
                exponent = int(exponent)
            else:
                raise TypeError("TaylorScalar powers must be integers or 0.5")
        if exponent < 0:
            return 1.0 / self.__pow__(-exponent)
        result = 1.0
        base = self
        e = exponent
        while e:
            if e & 1:
                result = base * result
            base = base * base
            e >>= 1
        return result

    # -- analytic functions (standard power-series recurrences) -------------

    def sqrt(self):
        a = self.coeffs
        lead = lead_float(a[0])
        if lead < LEAD_EPS:
            raise JetDomainError(
                f"jet sqrt needs a positive leading coefficient, got {lead}")
        s0 = sqrt_(a[0])
        cs = [s0]
        inv2s0 = 0.5 / s0 if isinstance(s0, float) else None
        for k in range(1, len(a)):
            acc = a[k]
            for j in range(1, k):
                acc = acc - cs[j] * cs[k - j]
            if inv2s0 is not None:
                cs.append(acc * inv2s0)
            else:
                cs.append(acc / (2.0 * s0))
        return TaylorScalar(cs, self.level)

    def exp(self):
        a = self.coeffs
        e0 = exp_(a[0])
        cs = [e0]
        for k in range(1, len(a)):
            acc = None
            for j in range(1, k + 1):
                term = (j * a[j]) * cs[k - j]
                acc = term if acc is None else acc + term
            cs.append(acc * (1.0 / k))
        return TaylorScalar(cs, self.level)

    def _sincos(self):
        a = self.coeffs
        s = [sin_(a[0])]
        c = [cos_(a[0])]
        for k in range(1, len(a)):
            sa = None
            ca = None
            for j in range(1, k + 1):
                ja = j * a[j]
                ts = ja * c[k - j]
                tc = ja * s[k - j]
                sa = ts if sa is None else sa + ts
                ca = tc if ca is None else ca + tc
            s.append(sa * (1.0 / k))
            c.append(ca * (-1.0 / k))
        return TaylorScalar(s, self.level), TaylorScalar(c, self.level)

    def sin(self):
        return self._sincos()[0]

    def cos(self):
        return self._sincos()[1]


def _jet_divide(acoeffs, bcoeffs, level):
    """Taylor coefficients of a/b via the standard division recurrence."""
    b0 = bcoeffs[0]
    if abs(lead_float(b0)) < LEAD_EPS:
        raise JetDomainError("jet division by a vanishing leading coefficient")
    la, lb = len(acoeffs), len(bcoeffs)
    n = max(la, lb)
    cs = [acoeffs[0] / b0]
    for k in range(1, n):
        acc = acoeffs[k] if k < la else 0.0
        for j in range(1, min(k, lb - 1) + 1):
            acc = acc - bcoeffs[j] * cs[k - j]
        cs.append(acc / b0)
    return TaylorScalar(cs, level)


# -- differentiation passes --------------------------------------------------


def _scope_level(values):
    lv = 0
    for v in values:
        l = level_of(v)
        if l > lv:
            lv = l
    return lv


def directional_variables(p, d, m, ambient=()):
    """Jet coordinates for a directional pass ``t -> p + t d``.

    Returns ``(coords, level)``.  ``ambient`` lists extra values the evaluated
    field will touch (e.g. closure captures); the pass level is raised above
    them so their jets are treated as constants.
    """
    p = list(p)
    d = list(d)
    if len(p) != len(d):
        raise ValueError("point and direction dimensions differ")
    lv = 1 + max(_scope_level(p), _scope_level(d), _scope_level(ambient))
    tail = (0.0,) * (m - 1)
    coords = [TaylorScalar((pi, di) + tail, lv) for pi, di in zip(p, d)]
    return coords, lv


def taylor_directional(f, p, d, m, ambient=()):
    """Taylor coefficients of ``t -> f(p + t d)`` through order ``m``.

    ``f`` maps a sequence of ring scalars to a ring scalar.  ``p`` and ``d``
    may contain jets from enclosing passes; the pass then runs one nesting
    level above them and its coefficients are values at the enclosing level.
    If ``f`` additionally captures jet values not present in ``p`` or ``d``,
    pass them in ``ambient``.  The k-th derivative along ``d`` is
    ``k! * result.coefficient(k)``.
    """
    if m == 0:
        lv = 1 + max(_scope_level(p), _scope_level(d), _scope_level(ambient))
        return TaylorScalar((f(list(p)),), lv)
    coords, lv = directional_variables(p, d, m, ambient)
    val = f(coords)
    if isinstance(val, TaylorScalar) and val.level == lv:
        if len(val.coeffs) < m + 1:
            val = TaylorScalar(val.coeffs + (0.0,) * (m + 1 - len(val.coeffs)), lv)
        return val
    if level_of(val) > lv:
        raise RuntimeError("jet from an inner pass leaked outward")
    # f ignored the direction entirely (constant field along it)
    return TaylorScalar((val,) + (0.0,) * m, lv)


def _partial_wrapper(g, i, a):
    fact = _FACTORIALS[a]

    def dg(q):
        d = [0.0] * len(q)
        d[i] = 1.0
        return fact * taylor_directional(g, q, d, a).coefficient(a)

    return dg


def mixed_partial(f, p, alpha):
    """Mixed partial derivative of ``f`` at ``p`` for multi-index ``alpha``.

    Computed by nesting one directional pass per coordinate carrying a
    nonzero exponent.  ``alpha`` is a sequence of non-negative integers,
    one per coordinate of ``p``.
    """
    p = list(p)
    if len(alpha) != len(p):
        raise ValueError("multi-index length must match point dimension")
    g = f
    for i, a in enumerate(alpha):
        if a < 0:
            raise ValueError("negative exponent in multi-index")
        if a > 0:
            g = _partial_wrapper(g, i, a)
    return g(p)


# Central difference stencils: offset -> weight (per unit h**order).
_STENCILS = {
    1: ((1, 0.5), (-1, -0.5)),
    2: ((1, 1.0), (0, -2.0), (-1, 1.0)),
    3: ((2, 0.5), (1, -1.0), (-1, 1.0), (-2, -0.5)),
}


def fd_partial(f, p, alpha, h=None):
    """Central finite-difference estimate of a mixed partial of ``f``.

    Independent of the jet engine; used as a cross-check oracle.  Default
    step: 1e-5 for total order <= 2, 1e-3 for order 3 (truncation/round-off
    balance in double precision).
    """
    p = [float(v) for v in p]
    if len(alpha) != len(p):
        raise ValueError("multi-index length must match point dimension")
    total = sum(alpha)
    if total > 3:
        raise ValueError("fd_partial supports total order <= 3 "
                         "(noise grows too fast beyond)")
    if h is None:
        h = 1e-5 if total <= 2 else 1e-3
    active = [(i, a) for i, a in enumerate(alpha) if a > 0]

    def rec(q, k):
        if k == len(active):
            return float(f(list(q)))
        i, a = active[k]
        acc = 0.0
        for off, w in _STENCILS[a]:
            q2 = list(q)
            q2[i] += off * h
            acc += w * rec(q2, k + 1)
        return acc / h ** a

    return rec(p, 0)
