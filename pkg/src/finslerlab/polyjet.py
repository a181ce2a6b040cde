"""Multivariate truncated Taylor jets on dense numpy coefficient vectors.

A :class:`MultiJet` is the total-degree-truncated Taylor expansion of a
scalar quantity in several displacement variables at once.  It is the
workhorse for curvature sweeps: one evaluation of a field with MultiJet
coordinates yields every mixed partial up to the space's order, which is
mathematically identical to nesting univariate passes but runs on numpy
convolution tables instead of recursive Python arithmetic.

MultiJets occupy nesting level 0 of the jet hierarchy, so univariate
:class:`~finslerlab.jets.TaylorScalar` passes can run on top of them (the
metric evaluators that differentiate internally rely on this).
"""

from __future__ import annotations

import math

import numpy as np

from .jets import LEAD_EPS, JetDomainError, TaylorScalar

__all__ = ["JetSpace", "MultiJet", "jet_space"]


def _monomials(nvars, order):
    """All exponent tuples with total degree <= order, graded order."""
    out = []

    def fill(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for e in range(remaining + 1):
            fill(prefix + (e,), remaining - e, slots - 1)

    for deg in range(order + 1):
        fill((), deg, nvars)
    return out


class JetSpace:
    """Shared algebra tables for MultiJets in ``nvars`` variables.

    Products are truncated at total degree ``order``.  Construction cost is
    quadratic in the number of monomials; spaces are cached via
    :func:`jet_space`.
    """

    __slots__ = ("nvars", "order", "monomials", "index", "npos",
                 "_mul_i", "_mul_j", "_mul_k", "_fact", "_degrees")

    def __init__(self, nvars, order):
        self.nvars = nvars
        self.order = order
        self.monomials = _monomials(nvars, order)
        self.npos = len(self.monomials)
        self.index = {m: i for i, m in enumerate(self.monomials)}
        self._degrees = np.array([sum(m) for m in self.monomials])
        self._fact = np.array(
            [math.prod(math.factorial(e) for e in m) for m in self.monomials],
            dtype=float,
        )
        mi, mj, mk = [], [], []
        by_degree = {}
        for i, m in enumerate(self.monomials):
            by_degree.setdefault(sum(m), []).append(i)
        for da, ia in by_degree.items():
            for db, ib in by_degree.items():
                if da + db > order:
                    continue
                for i in ia:
                    a = self.monomials[i]
                    for j in ib:
                        b = self.monomials[j]
                        s = tuple(x + y for x, y in zip(a, b))
                        mi.append(i)
                        mj.append(j)
                        mk.append(self.index[s])
        self._mul_i = np.array(mi)
        self._mul_j = np.array(mj)
        self._mul_k = np.array(mk)

    # -- constructors --------------------------------------------------------

    def constant(self, value):
        c = np.zeros(self.npos)
        c[0] = value
        return MultiJet(self, c)

    def variable(self, i, base):
        """Jet of ``base + displacement_i``."""
        c = np.zeros(self.npos)
        c[0] = base
        ei = tuple(1 if k == i else 0 for k in range(self.nvars))
        c[self.index[ei]] = 1.0
        return MultiJet(self, c)

    def variables(self, base_values):
        return [self.variable(i, v) for i, v in enumerate(base_values)]

    def _convolve(self, a, b):
        prod = a[self._mul_i] * b[self._mul_j]
        return np.bincount(self._mul_k, weights=prod, minlength=self.npos)


_SPACE_CACHE = {}


def jet_space(nvars, order):
    """Cached JetSpace for the given variable count and truncation order."""
    key = (nvars, order)
    space = _SPACE_CACHE.get(key)
    if space is None:
        space = JetSpace(nvars, order)
        _SPACE_CACHE[key] = space
    return space


class MultiJet:
    """Element of a truncated multivariate Taylor algebra."""

    __slots__ = ("space", "c")

    __array_ufunc__ = None

    def __init__(self, space, coeffs):
        self.space = space
        self.c = coeffs

    def lead(self):
        return float(self.c[0])

    def max_abs(self):
        return float(np.abs(self.c).max())

    def partial(self, alpha):
        """Mixed partial at the expansion point: coefficient times alpha!."""
        alpha = tuple(alpha)
        pos = self.space.index[alpha]
        return float(self.c[pos] * self.space._fact[pos])

    def __repr__(self):
        return (f"MultiJet(nvars={self.space.nvars}, order={self.space.order}, "
                f"lead={self.c[0]!r})")

    def __float__(self):
        raise TypeError("refusing to demote a MultiJet to float; "
                        "use lead() if the truncation is intentional")

    # -- ring operations -----------------------------------------------------

    def _check(self, other):
        if other.space is not self.space:
            raise ValueError("MultiJets from different JetSpaces")

    def __add__(self, other):
        if isinstance(other, MultiJet):
            self._check(other)
            return MultiJet(self.space, self.c + other.c)
        if isinstance(other, TaylorScalar):
            return NotImplemented
        c = self.c.copy()
        c[0] += other
        return MultiJet(self.space, c)

    __radd__ = __add__

    def __neg__(self):
        return MultiJet(self.space, -self.c)

    def __sub__(self, other):
        if isinstance(other, TaylorScalar):
            return NotImplemented
        return self.__add__(-other)

    def __rsub__(self, other):
        if isinstance(other, TaylorScalar):
            return NotImplemented
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, MultiJet):
            self._check(other)
            return MultiJet(self.space, self.space._convolve(self.c, other.c))
        if isinstance(other, TaylorScalar):
            return NotImplemented
        return MultiJet(self.space, self.c * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, MultiJet):
            return self.__mul__(other.reciprocal())
        if isinstance(other, TaylorScalar):
            return NotImplemented
        return MultiJet(self.space, self.c / other)

    def __rtruediv__(self, other):
        if isinstance(other, TaylorScalar):
            return NotImplemented
        return self.reciprocal().__mul__(other)

    def __pow__(self, exponent):
        if isinstance(exponent, float):
            if exponent == 0.5:
                return self.sqrt()
            if exponent.is_integer():
                exponent = int(exponent)
            else:
                raise TypeError("MultiJet powers must be integers or 0.5")
        if exponent < 0:
            return self.reciprocal().__pow__(-exponent)
        result = self.space.constant(1.0)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- analytic functions --------------------------------------------------

    def _compose(self, derivs):
        """Horner evaluation of sum_k derivs[k] * nilpotent^k."""
        nil = self.c.copy()
        nil[0] = 0.0
        niljet = MultiJet(self.space, nil)
        acc = self.space.constant(derivs[-1])
        for k in range(len(derivs) - 2, -1, -1):
            acc = acc * niljet + derivs[k]
        return acc

    def reciprocal(self):
        c0 = self.lead()
        if abs(c0) < LEAD_EPS:
            raise JetDomainError("jet reciprocal of a vanishing leading coefficient")
        derivs = []
        v = 1.0 / c0
        for _ in range(self.space.order + 1):
            derivs.append(v)
            v = -v / c0
        return self._compose(derivs)

    def sqrt(self):
        c0 = self.lead()
        if c0 < LEAD_EPS:
            raise JetDomainError(
                f"jet sqrt needs a positive leading coefficient, got {c0}")
        derivs = [math.sqrt(c0)]
        for k in range(1, self.space.order + 1):
            derivs.append(derivs[-1] * (1.5 - k) / (k * c0))
        return self._compose(derivs)

    def exp(self):
        e0 = math.exp(self.lead())
        derivs = [e0 / math.factorial(k) for k in range(self.space.order + 1)]
        return self._compose(derivs)

    def sin(self):
        c0 = self.lead()
        cycle = (math.sin(c0), math.cos(c0), -math.sin(c0), -math.cos(c0))
        derivs = [cycle[k % 4] / math.factorial(k)
                  for k in range(self.space.order + 1)]
        return self._compose(derivs)

    def cos(self):
        c0 = self.lead()
        cycle = (math.cos(c0), -math.sin(c0), -math.cos(c0), math.sin(c0))
        derivs = [cycle[k % 4] / math.factorial(k)
                  for k in range(self.space.order + 1)]
        return self._compose(derivs)
