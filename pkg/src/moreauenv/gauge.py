"""Smoothing 2D gauges with ``h_r = sqrt(e_r(f^2))``.

Closed forms are provided for the max-norm and the l1-norm (four regions
each); any other gauge goes through the brute-force 2D oracle.  All
functions take a point ``p = (x, y)`` whose coordinates may be floats or
numpy arrays of a common shape; results follow the input shape.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .oracle import OracleSettings, envelope_oracle_2d_full, minimize_2d

TIE_RTOL = 1e-12


class DegenerateRay(ValueError):
    """``h_r`` vanishes along a sampled direction (the gauge has a nontrivial kernel)."""


class InvalidGauge(ValueError):
    pass


class RegionLabel(enum.IntEnum):
    R1 = 1
    R2 = 2
    R3 = 3
    R4 = 4


def _max_norm(x, y):
    return np.maximum(np.abs(x), np.abs(y))


def _l1_norm(x, y):
    return np.abs(x) + np.abs(y)


@dataclass(frozen=True)
class Gauge2D:
    """A gauge on R^2: ``max``, ``l1``, ``euclid`` (scaled) or ``custom``.

    Custom evaluators must accept numpy arrays and are checked by sampling
    (zero at the origin, nonnegative, positively homogeneous, convex along
    random segments) when constructed.
    """

    kind: str
    scale: float = 1.0
    evaluator: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("max", "l1", "euclid", "custom"):
            raise InvalidGauge(f"unknown gauge kind {self.kind!r}")
        if self.kind == "euclid" and not (math.isfinite(self.scale) and self.scale > 0):
            raise InvalidGauge(f"scale must be > 0, got {self.scale}")
        if self.kind == "custom":
            if self.evaluator is None:
                raise InvalidGauge("custom gauge needs an evaluator")
            _check_gauge(self.evaluator)

    @classmethod
    def max_norm(cls):
        return cls("max")

    @classmethod
    def l1_norm(cls):
        return cls("l1")

    @classmethod
    def scaled_euclidean(cls, scale=1.0):
        return cls("euclid", float(scale))

    @classmethod
    def custom(cls, evaluator):
        return cls("custom", evaluator=evaluator)

    def __call__(self, x, y):
        if self.kind == "max":
            return _max_norm(x, y)
        if self.kind == "l1":
            return _l1_norm(x, y)
        if self.kind == "euclid":
            return self.scale * np.hypot(x, y)
        return self.evaluator(x, y)

    def squared(self, x, y):
        v = self(x, y)
        return v * v


def _check_gauge(fn, n=100, seed=0):
    rng = np.random.default_rng(seed)
    if abs(float(fn(np.zeros(1), np.zeros(1))[0])) > 1e-12:
        raise InvalidGauge("gauge must vanish at the origin")
    v = rng.normal(size=(2, n))
    base = np.asarray(fn(v[0], v[1]), dtype=float)
    if base.shape != (n,):
        raise InvalidGauge("evaluator must map coordinate arrays to an array of values")
    if np.any(base < 0):
        raise InvalidGauge("gauge must be nonnegative")
    for alpha in (0.5, 2.0):
        scaled = fn(alpha * v[0], alpha * v[1])
        if np.any(np.abs(scaled - alpha * base) > 1e-9 * np.maximum(1.0, alpha * base)):
            raise InvalidGauge(f"gauge is not positively homogeneous (alpha={alpha})")
    w = rng.normal(size=(2, n))
    mid = fn(0.5 * (v[0] + w[0]), 0.5 * (v[1] + w[1]))
    if np.any(mid > 0.5 * (base + fn(w[0], w[1])) + 1e-9):
        raise InvalidGauge("gauge is not convex along a sampled segment")


def _out(v, scalar):
    return float(v) if scalar else v


def _xy(p):
    x, y = p
    scalar = np.ndim(x) == 0 and np.ndim(y) == 0
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return x, y, scalar


def _check_r(r):
    r = float(r)
    if not (math.isfinite(r) and r > 0):
        raise ValueError(f"r must be finite and > 0, got {r}")
    return r


# -- max-norm ---------------------------------------------------------------------

def _max_region(r, x, y):
    k = r / (r + 2.0)
    return np.select(
        [np.abs(y) <= k * np.abs(x), np.abs(x) <= k * np.abs(y), x * y >= 0],
        [1, 2, 3],
        default=4,
    )


def _max_branches(r, x, y):
    """(g, prox_x, prox_y) of every region formula, stacked on a leading axis."""
    s = r / (r + 2.0)
    q = r / (2.0 * (r + 1.0))
    g = np.stack([
        s * x * x,
        s * y * y,
        (r * r * (x - y) ** 2 + 2 * r * (x * x + y * y)) / (4 * (r + 1)),
        (r * r * (x + y) ** 2 + 2 * r * (x * x + y * y)) / (4 * (r + 1)),
    ])
    px = np.stack([s * x, x, q * (x + y), q * (x - y)])
    py = np.stack([y, s * y, q * (x + y), -q * (x - y)])
    return g, px, py


def _pick(branches, region):
    idx = (region - 1)[None, ...]
    return tuple(np.take_along_axis(b, idx, axis=0)[0] for b in branches)


def classify_max(r, p):
    """Region of the max-norm partition containing ``p`` (ties go to the lower label)."""
    r = _check_r(r)
    x, y, scalar = _xy(p)
    reg = _max_region(r, x, y)
    return RegionLabel(int(reg)) if scalar else reg


def smooth_max(r, p):
    """``(h_r(p), prox(p))`` for ``f = max(|x|, |y|)``."""
    r = _check_r(r)
    x, y, scalar = _xy(p)
    g, px, py = _pick(_max_branches(r, x, y), _max_region(r, x, y))
    h = np.sqrt(g)
    return _out(h, scalar), (_out(px, scalar), _out(py, scalar))


# -- l1-norm --------------------------------------------------------------------

def _l1_branches(r, x, y):
    t = r + 4.0
    s = r / (r + 2.0)
    g = np.stack([
        r * (x + y) ** 2 / t,
        r * (x - y) ** 2 / t,
        (2 * r * x * x + r * (r + 2) * y * y) / (2 * (r + 2)),
        (r * (r + 2) * x * x + 2 * r * y * y) / (2 * (r + 2)),
    ])
    px = np.stack([((r + 2) * x - 2 * y) / t, ((r + 2) * x + 2 * y) / t, s * x, np.zeros_like(x)])
    py = np.stack([(-2 * x + (r + 2) * y) / t, (2 * x + (r + 2) * y) / t, np.zeros_like(y), s * y])
    return g, px, py


def _candidate_region(g, px, py, valid):
    # Smallest admissible candidate value; near-ties resolved by label order.
    vals = np.where(valid, g, np.inf)
    best = np.min(vals, axis=0)
    close = vals <= best + TIE_RTOL * np.maximum(1.0, np.abs(best))
    return np.argmax(close, axis=0) + 1


def _l1_region(r, x, y):
    g, px, py = _l1_branches(r, x, y)
    # Quadrant formulas are only attained when their minimizer stays in the quadrant pair.
    valid = np.stack([px[0] * py[0] >= 0, px[1] * py[1] <= 0,
                      np.ones_like(x, bool), np.ones_like(x, bool)])
    return _candidate_region(g, px, py, valid)


def classify_l1(r, p):
    """Region of the l1 partition containing ``p``, chosen by smallest admissible candidate."""
    r = _check_r(r)
    x, y, scalar = _xy(p)
    reg = _l1_region(r, x, y)
    return RegionLabel(int(reg)) if scalar else reg


def smooth_l1(r, p):
    """``(h_r(p), prox(p))`` for ``f = |x| + |y|``."""
    r = _check_r(r)
    x, y, scalar = _xy(p)
    g, px, py = _pick(_l1_branches(r, x, y), _l1_region(r, x, y))
    h = np.sqrt(g)
    return _out(h, scalar), (_out(px, scalar), _out(py, scalar))


def max_region_by_candidates(r, p):
    """Max-norm region from the smallest admissible candidate, as a cross-check of the inequalities."""
    r = _check_r(r)
    x, y, scalar = _xy(p)
    g, px, py = _max_branches(r, x, y)
    valid = np.stack([np.abs(px[0]) >= np.abs(py[0]), np.abs(px[1]) <= np.abs(py[1]),
                      np.ones_like(x, bool), np.ones_like(x, bool)])
    reg = _candidate_region(g, px, py, valid)
    return RegionLabel(int(reg)) if scalar else reg


# -- generic gauges ---------------------------------------------------------------

def _smooth_euclid(scale, r, x, y):
    s2 = scale * scale
    k = r / (r + 2 * s2)
    return np.sqrt(s2 * k) * np.hypot(x, y), k * x, k * y


def smooth_custom_full(g: Gauge2D, r, p, s: OracleSettings = OracleSettings()):
    """``(h_r(p), prox(p))`` through the 2D oracle; no closed form is used."""
    r = _check_r(r)
    x, y, scalar = _xy(p)
    pts = np.stack([x.ravel(), y.ravel()], axis=-1)
    val, arg = envelope_oracle_2d_full(g.squared, r, pts, s)
    h = np.sqrt(np.maximum(val, 0.0)).reshape(x.shape)
    px, py = arg[:, 0].reshape(x.shape), arg[:, 1].reshape(x.shape)
    return _out(h, scalar), (_out(px, scalar), _out(py, scalar))


def smooth_custom(g: Gauge2D, r, p, s: OracleSettings = OracleSettings()):
    return smooth_custom_full(g, r, p, s)[0]


def pasch_hausdorff(g: Gauge2D, r, p, s: OracleSettings = OracleSettings()):
    """``inf_y g(y) + r |y - p|`` computed numerically."""
    r = _check_r(r)
    x, y, scalar = _xy(p)
    cx, cy = x.ravel(), y.ravel()
    # g(y) + r|y - p| <= g(p) bounds |y - p| by g(p) / r.
    radius = np.asarray(g(cx, cy), dtype=float) / r

    def objective(y1, y2):
        return g(y1, y2) + r * np.hypot(y1 - cx, y2 - cy)

    val, _ = minimize_2d(objective, np.stack([cx, cy], axis=-1), radius, s)
    return _out(val.reshape(x.shape), scalar)


@dataclass(frozen=True)
class SmoothedGauge:
    """``h_r = sqrt(e_r(base^2))`` for a fixed base gauge and ``r``."""

    base: Gauge2D
    r: float
    settings: OracleSettings = OracleSettings()

    def __post_init__(self):
        object.__setattr__(self, "r", _check_r(self.r))

    def evaluate(self, p):
        """``(h_r, prox)`` at ``p``."""
        kind = self.base.kind
        if kind == "max":
            return smooth_max(self.r, p)
        if kind == "l1":
            return smooth_l1(self.r, p)
        if kind == "euclid":
            x, y, scalar = _xy(p)
            h, px, py = _smooth_euclid(self.base.scale, self.r, x, y)
            return _out(h, scalar), (_out(px, scalar), _out(py, scalar))
        return smooth_custom_full(self.base, self.r, p, self.settings)

    def __call__(self, p):
        return self.evaluate(p)[0]

    def region(self, p):
        if self.base.kind == "max":
            return classify_max(self.r, p)
        if self.base.kind == "l1":
            return classify_l1(self.r, p)
        return None

    def gradient(self, p):
        """Gradient of ``h_r`` at a single point, or ``None`` on the kernel."""
        h, (px, py) = self.evaluate((float(p[0]), float(p[1])))
        if h <= 0:
            return None
        k = self.r / (2.0 * h)
        return (k * (p[0] - px), k * (p[1] - py))


def unit_circle(sg: SmoothedGauge, samples: int):
    """Points of ``{h_r = 1}`` on ``samples`` equally spaced rays (angle 0 first)."""
    samples = int(samples)
    if samples < 8:
        raise ValueError("unit_circle needs at least 8 samples")
    theta = 2 * np.pi * np.arange(samples) / samples
    c, s = np.cos(theta), np.sin(theta)
    h = np.asarray(sg((c, s)), dtype=float)
    # Relative threshold: cos(pi/2) is 6e-17, not 0, so a kernel ray gives a tiny h.
    bad = ~(h > 1e-12 * max(float(np.max(h)), 1e-300))
    if np.any(bad):
        raise DegenerateRay(f"h_r vanishes along theta={theta[np.argmax(bad)]:.6g}")
    t = 1.0 / h
    return [(float(a), float(b)) for a, b in zip(t * c, t * s)]


def unit_circle_angles(samples: int):
    return [float(v) for v in 2 * np.pi * np.arange(int(samples)) / int(samples)]
