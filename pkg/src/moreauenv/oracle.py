"""Brute-force proximal points and envelopes, used only to cross-check closed forms.

Nothing here imports the closed-form code.  The 1D oracle bisects on the
monotone optimality map ``y -> df(y) + r (y - x)``; the 2D routines minimize
by nested golden-section search (outer coordinate over the partial minimum of
the inner one), vectorized over many centres at once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .piecewise import PiecewiseCubic

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class NoBracket(RuntimeError):
    pass


class MaxIterExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleSettings:
    tol: float = 1e-10
    max_iter: int = 200
    bracket_growth: float = 2.0
    max_evals: int = 10_000

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.bracket_growth > 1:
            raise ValueError("bracket_growth must be > 1")


def _sign(f, r, x, y):
    # -1: optimality map entirely below 0 at y (minimizer is right of y),
    # +1: entirely above 0, 0: y is optimal.
    g = f.subgradient(y)
    t = r * (y - x)
    if g.hi + t < 0:
        return -1
    if g.lo + t > 0:
        return 1
    return 0


def prox_oracle_1d(f: PiecewiseCubic, cfg, x: float, s: OracleSettings = OracleSettings()):
    """Return ``(prox, envelope)`` of ``f`` at ``x`` by bracketing and bisection."""
    r = cfg.r if hasattr(cfg, "r") else float(cfg)
    x = float(x)
    lo_b, hi_b = f.bounds
    step = 1.0
    a = min(max(x - step, lo_b), hi_b)
    b = max(min(x + step, hi_b), lo_b)
    sa, sb = _sign(f, r, x, a), _sign(f, r, x, b)
    while sa > 0 or sb < 0:
        step *= s.bracket_growth
        if step > 1e12:
            raise NoBracket(f"no sign change within 1e12 of x={x}")
        if sa > 0:
            b, sb = a, sa
            a = min(max(x - step, lo_b), hi_b)
            sa = _sign(f, r, x, a)
        else:
            a, sa = b, sb
            b = max(min(x + step, hi_b), lo_b)
            sb = _sign(f, r, x, b)
    if sa == 0:
        y = a
    elif sb == 0:
        y = b
    else:
        y = None
        for _ in range(s.max_iter):
            mid = 0.5 * (a + b)
            if b - a < s.tol or not a < mid < b:
                break
            sm = _sign(f, r, x, mid)
            if sm == 0:
                y = mid
                break
            if sm < 0:
                a = mid
            else:
                b = mid
        if y is None:
            # Pick the best of the final bracket.
            cands = (a, 0.5 * (a + b), b)
            y = min(cands, key=lambda t: f(t) + 0.5 * r * (t - x) ** 2)
    return y, f(y) + 0.5 * r * (y - x) ** 2


# -- 2D ------------------------------------------------------------------------

def _golden(phi, a, b, n):
    """Vectorized golden-section search of ``phi`` on brackets ``[a, b]`` for ``n`` steps.

    Returns ``(argmin, min)`` arrays.  ``phi`` maps an array of abscissae to
    ``(values, payload)`` where payload is carried along for the best point.
    """
    a = a.copy()
    b = b.copy()
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, pc = phi(c)
    fd, pd = phi(d)
    for _ in range(n):
        left = fc < fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new = np.where(left, b - INVPHI * (b - a), a + INVPHI * (b - a))
        fn, pn = phi(new)
        c, d = np.where(left, new, d), np.where(left, c, new)
        fc, fd = np.where(left, fn, fd), np.where(left, fc, fn)
        pc, pd = np.where(left, pn, pd), np.where(left, pc, pn)
    best = fc <= fd
    return np.where(best, c, d), np.where(best, fc, fd), np.where(best, pc, pd)


def _steps(width, tol):
    width = float(np.max(width)) if np.size(width) else 0.0
    if width <= tol:
        return 1
    return int(math.ceil(math.log(width / tol) / -math.log(INVPHI))) + 1


def minimize_2d(objective, centers, radius, s: OracleSettings = OracleSettings(), trace=None):
    """Minimize ``objective(y1, y2)`` over the box of half-width ``radius`` around each centre.

    ``objective`` receives coordinate arrays and returns values, one problem
    per row of ``centers``.  The objective must be jointly convex so that the
    partial minimum over the inner coordinate is convex in the outer one.
    Returns ``(values, argmins)``.  When ``trace`` is a list, the best outer
    value after every outer step is appended to it.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    radius = np.broadcast_to(np.asarray(radius, dtype=float), centers.shape[:1]).copy()
    # Slack so that a minimizer exactly on the box edge is still interior.
    radius = radius * (1 + 1e-9) + 1e-300
    cx, cy = centers[:, 0], centers[:, 1]
    n_out = _steps(2 * radius, s.tol)
    n_in = _steps(2 * radius, s.tol / 10)
    evals = (n_out + 2) * (n_in + 2)
    if evals > s.max_evals:
        raise MaxIterExceeded(f"needs {evals} objective evaluations, budget {s.max_evals}")

    def inner(y2):
        def phi(y1):
            return objective(y1, y2), y1
        y1, val, _ = _golden(phi, cx - radius, cx + radius, n_in)
        return val, y1

    def outer(y2):
        val, y1 = inner(y2)
        if trace is not None:
            prev = trace[-1] if trace else np.full_like(val, np.inf)
            trace.append(np.minimum(prev, val))
        return val, y1

    y2, val, y1 = _golden(outer, cy - radius, cy + radius, n_out)
    # The centre itself is a valid candidate (e.g. a kernel point).
    at_center = objective(cx, cy)
    use_c = at_center <= val
    val = np.where(use_c, at_center, val)
    arg = np.stack([np.where(use_c, cx, y1), np.where(use_c, cy, y2)], axis=-1)
    return val, arg


def _as_points(point):
    pts = np.asarray(point, dtype=float)
    scalar = pts.ndim == 1
    return np.atleast_2d(pts), scalar


def envelope_oracle_2d_full(f2, cfg, point, s: OracleSettings = OracleSettings(), trace=None):
    """Moreau envelope of a nonnegative convex ``f2`` on R^2 and its minimizer.

    ``f2(y1, y2)`` must accept numpy arrays.  ``point`` is one ``(x, y)`` pair
    or an array of shape ``(n, 2)``.
    """
    r = cfg.r if hasattr(cfg, "r") else float(cfg)
    pts, scalar = _as_points(point)
    cx, cy = pts[:, 0], pts[:, 1]
    # f2(y) + r/2 |y - p|^2 <= f2(p) bounds |y - p| by sqrt(2 f2(p) / r).
    radius = np.sqrt(2.0 * np.maximum(f2(cx, cy), 0.0) / r)

    def objective(y1, y2):
        return f2(y1, y2) + 0.5 * r * ((y1 - cx) ** 2 + (y2 - cy) ** 2)

    val, arg = minimize_2d(objective, pts, radius, s, trace)
    if scalar:
        return float(val[0]), (float(arg[0, 0]), float(arg[0, 1]))
    return val, arg


def envelope_oracle_2d(f2, cfg, point, s: OracleSettings = OracleSettings()):
    return envelope_oracle_2d_full(f2, cfg, point, s)[0]
