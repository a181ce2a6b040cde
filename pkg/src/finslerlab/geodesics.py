"""Spray geodesics: adaptive Runge-Kutta integration and straightness.

Integral curves of a spray satisfy x'' = -2 G(x, x').  The integrator is the
Dormand-Prince 5(4) embedded pair with FSAL and standard step control; it is
written out here (rather than delegated) so that trajectories carry accepted
and rejected step counts and the largest local error estimate, and so that
integration can stop early, flagged and without error, when the orbit comes
within a configurable margin of the domain boundary -- forward Funk geodesics
reach the boundary in finite ODE time even though they are metrically
complete.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "StiffnessError",
    "Trajectory",
    "integrate",
    "straightness_residual",
    "trajectory_csv",
]

# Dormand-Prince 5(4) tableau.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_ERR = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200,
                 22 / 525, -1 / 40])


class StiffnessError(RuntimeError):
    """Step size underflowed; carries the partial trajectory."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


@dataclass
class Trajectory:
    """Samples (t, x(t), x'(t)) at accepted steps, plus integrator stats."""

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    accepted: int
    rejected: int
    max_error_estimate: float
    stopped_early: bool
    reason: str

    def __len__(self):
        return len(self.t)


def _rhs(spray, state, n):
    x = state[:n]
    y = state[n:]
    g = spray.coeffs(list(x), list(y))
    out = np.empty(2 * n)
    out[:n] = y
    for i in range(n):
        out[n + i] = -2.0 * float(g[i])
    return out


def integrate(spray, x0, y0, t_end, tol=1e-10, domain=None,
              margin_stop=1e-3, max_steps=1_000_000):
    """Integrate x'' = -2 G(x, x') from (x0, y0) over [0, t_end].

    Stops early (flagged, not an error) once the domain margin drops below
    ``margin_stop``.  ``domain`` defaults to the spray's own domain when it
    has one.  Raises :class:`StiffnessError` on step-size underflow.
    """
    n = spray.dim
    if domain is None:
        domain = spray.domain
    x0 = np.asarray(x0, dtype=float)
    y0 = np.asarray(y0, dtype=float)
    if domain is not None:
        inside, margin = domain.contains(x0)
        if not inside or margin <= margin_stop:
            raise ValueError(f"start point margin {margin:.3e} too small")
    if not y0.any():
        raise ValueError("initial velocity must be nonzero")
    u = np.concatenate([x0, y0])
    f = _rhs(spray, u, n)
    # standard initial-step heuristic
    scale = tol + tol * np.abs(u)
    d0 = float(np.sqrt(np.mean((u / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f / scale) ** 2)))
    h = min(t_end, 0.01 * d0 / d1 if d1 > 0 else 1e-6)
    h = max(h, 1e-10 * t_end)

    ts = [0.0]
    xs = [u[:n].copy()]
    vs = [u[n:].copy()]
    t = 0.0
    accepted = rejected = 0
    max_err = 0.0
    stopped_early = False
    reason = "completed"
    k = np.empty((7, 2 * n))
    k[0] = f
    while t < t_end:
        if accepted + rejected >= max_steps:
            reason = "step-budget"
            stopped_early = True
            break
        h = min(h, t_end - t)
        if h < 1e-14 * max(1.0, abs(t)):
            raise StiffnessError(
                f"step size underflow at t={t:.6g}",
                Trajectory(np.array(ts), np.array(xs), np.array(vs),
                           accepted, rejected, max_err, True, "stiffness"))
        for i in range(1, 7):
            ui = u + h * (_A[i] @ k[:i])
            k[i] = _rhs(spray, ui, n)
        u_new = u + h * (_B5 @ k)
        err_vec = h * (_ERR @ k)
        sc = tol + tol * np.maximum(np.abs(u), np.abs(u_new))
        err = float(np.sqrt(np.mean((err_vec / sc) ** 2)))
        if err <= 1.0:
            if domain is not None:
                _, margin = domain.contains(u_new[:n])
                if margin < margin_stop:
                    # shrink toward the boundary rather than stepping past it
                    if h <= 1e-12:
                        stopped_early = True
                        reason = "boundary-approach"
                        break
                    h *= 0.5
                    continue
            t += h
            u = u_new
            k[0] = k[6]  # FSAL
            ts.append(t)
            xs.append(u[:n].copy())
            vs.append(u[n:].copy())
            accepted += 1
            max_err = max(max_err, err)
            factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            rejected += 1  # k[0] still holds f(t, u); only stages 1..6 redo
            factor = max(0.2, 0.9 * err ** -0.2)
        h *= factor
    return Trajectory(np.array(ts), np.array(xs), np.array(vs),
                      accepted, rejected, max_err, stopped_early, reason)


def straightness_residual(trajectory):
    """Largest distance from the path to its initial line, per unit length.

    Zero exactly when the trajectory traces the straight line through x(0)
    with direction x'(0).
    """
    if len(trajectory) < 3:
        raise ValueError("need at least 3 samples to measure straightness")
    x0 = trajectory.x[0]
    d = trajectory.v[0]
    d = d / np.linalg.norm(d)
    rel = trajectory.x - x0
    dev = rel - np.outer(rel @ d, d)
    dist = float(np.linalg.norm(dev, axis=1).max())
    length = float(np.linalg.norm(np.diff(trajectory.x, axis=0), axis=1).sum())
    return dist / max(length, 1e-300)


def trajectory_csv(trajectory):
    """CSV text with columns t, x^1..x^n, y^1..y^n at 17 significant digits."""
    n = trajectory.x.shape[1]
    header = ["t"] + [f"x{i + 1}" for i in range(n)] + [f"y{i + 1}" for i in range(n)]
    lines = [",".join(header)]
    for t, x, v in zip(trajectory.t, trajectory.x, trajectory.v):
        row = [f"{t:.17g}"] + [f"{c:.17g}" for c in x] + [f"{c:.17g}" for c in v]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
