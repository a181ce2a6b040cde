"""Deterministic grids and seeded random samples over convex domains.

Verification sweeps avoid the boundary (default gauge cap 0.7) because the
implicit solve conditions degrade there, and avoid flag vectors parallel to
the pole vector, which degenerate the curvature denominator.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "flag_grid",
    "base_grid",
    "interior_samples",
    "geodesic_starts",
]


def _circle(angle):
    return [math.cos(angle), math.sin(angle)]


def flag_grid(radii, y_count, u_count):
    """Deterministic (x, y, u) triples on the plane.

    Base points sit on circles of the given radii (one azimuth per radius),
    pole vectors are unit vectors at evenly spread angles, and flag vectors
    are offset from the pole by odd multiples of pi/(2 u_count), so no flag
    is ever parallel to its pole.
    """
    out = []
    for i, r in enumerate(radii):
        xa = 0.9 + 1.7 * i
        x = [r * math.cos(xa), r * math.sin(xa)]
        for j in range(y_count):
            ya = 2.0 * math.pi * j / y_count + 0.15
            y = _circle(ya)
            for k in range(u_count):
                u = _circle(ya + math.pi * (k + 0.5) / u_count)
                out.append((x, y, u))
    return out


def base_grid(radii, y_count):
    """Deterministic (x, y) pairs on the plane, same layout as flag_grid."""
    out = []
    for i, r in enumerate(radii):
        xa = 0.9 + 1.7 * i
        x = [r * math.cos(xa), r * math.sin(xa)]
        for j in range(y_count):
            ya = 2.0 * math.pi * j / y_count + 0.15
            out.append((x, _circle(ya)))
    return out


def interior_samples(domain, count, seed, max_gauge=0.7, min_gauge=0.0):
    """Seeded random (x, y) samples with phi(x - x_o) <= max_gauge, |y| = 1."""
    rng = np.random.default_rng(seed)
    n = domain.dim
    out = []
    while len(out) < count:
        d = rng.standard_normal(n)
        if np.linalg.norm(d) < 1e-9:
            continue
        gauge = float(domain.norm.value(list(d)))
        r = rng.uniform(min_gauge, max_gauge)
        x = domain.base_point + r * d / gauge
        y = rng.standard_normal(n)
        ny = np.linalg.norm(y)
        if ny < 1e-9:
            continue
        out.append((x.tolist(), (y / ny).tolist()))
    return out


def geodesic_starts(domain, count, seed, max_gauge=0.45):
    """Seeded random starts (x0, y0) comfortably inside the domain."""
    return interior_samples(domain, count, seed, max_gauge=max_gauge)
