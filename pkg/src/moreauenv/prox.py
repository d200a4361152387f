"""Closed-form proximal points and Moreau envelopes of convex piecewise cubics.

For ``f`` convex and ``r > 0``

    e_r f(x) = min_y  f(y) + (r/2) (y - x)^2,      P_r f(x) = argmin of the same,

and the prox-centre axis splits into ``2m + 1`` cells: on a piece cell the
proximal point is the positive-branch root of the stationarity quadratic of
that piece, on a breakpoint cell it is pinned at the breakpoint, and on a
bound cell (restricted domains) it is pinned at the bound.
"""
from __future__ import annotations

import enum
import math
from bisect import bisect_left
from dataclasses import dataclass
from functools import lru_cache

from .piecewise import (
    INF,
    CubicPiece,
    EmptyDomain,
    PiecewiseCubic,
    validate,
)

ZERO_CUBIC_RTOL = 1e-14
DISCRIMINANT_RTOL = 1e-10


class BadParam(ValueError):
    pass


class NegativeDiscriminant(ArithmeticError):
    """The stationarity quadratic has no real root: the prox-centre is outside the piece's cell."""


@dataclass(frozen=True)
class ProxConfig:
    r: float

    def __post_init__(self):
        r = float(self.r)
        if not (math.isfinite(r) and r > 0):
            raise BadParam(f"prox-parameter r must be finite and > 0, got {self.r}")
        object.__setattr__(self, "r", r)


def _r(cfg):
    return cfg.r if isinstance(cfg, ProxConfig) else ProxConfig(cfg).r


class CellKind(enum.Enum):
    PIECE = "piece"
    BREAKPOINT = "breakpoint"
    BOUND = "bound"


@dataclass(frozen=True)
class Cell:
    """One subdomain of prox-centres.

    Piece cells are open intervals, breakpoint and bound cells are closed.
    ``index`` is the piece index for piece cells and the 1-based breakpoint
    index for breakpoint cells; ``point`` is where the proximal point is
    pinned for breakpoint and bound cells.
    """

    lo: float
    hi: float
    kind: CellKind
    index: int
    point: float | None = None

    def contains(self, x):
        if self.kind is CellKind.PIECE:
            return self.lo < x < self.hi
        return self.lo <= x <= self.hi


@dataclass(frozen=True)
class ProxResult:
    prox: float
    envelope: float
    gradient: float
    cell: int


@dataclass(frozen=True)
class EnvelopePartition:
    f: PiecewiseCubic
    r: float
    cells: tuple[Cell, ...]

    @property
    def boundaries(self):
        return tuple(c.hi for c in self.cells[:-1])

    def locate(self, x):
        """Index of the cell containing ``x``; shared endpoints go to the closed cell."""
        bounds = self.boundaries
        k = bisect_left(bounds, x)
        if k < len(bounds) and bounds[k] == x and self.cells[k].kind is CellKind.PIECE:
            k += 1
        return k

    def render(self):
        return "\n".join(_render_cell(self.f, self.r, c) for c in self.cells)


# -- single-piece formulas ---------------------------------------------------

def _stationary_root(a, b, c, r, x):
    # Root of 3a y^2 + (2b + r) y + (c - r x) = 0 on the "+sqrt" branch,
    # written so neither a -> 0 nor a < 0 loses precision.
    B = 2.0 * b + r
    C = c - r * x
    if abs(a) <= ZERO_CUBIC_RTOL * max(1.0, abs(b), abs(c)):
        if B <= 0:
            raise NegativeDiscriminant(f"degenerate quadratic prox: 2b + r = {B} <= 0")
        return -C / B
    disc = B * B - 12.0 * a * C
    if disc < 0:
        if disc < -DISCRIMINANT_RTOL * (B * B + abs(12.0 * a * C)):
            raise NegativeDiscriminant(
                f"discriminant {disc} < 0 for piece ({a}, {b}, {c}) at x={x}, r={r}"
            )
        disc = 0.0
    sq = math.sqrt(disc)
    if B >= 0 and B + sq > 0:
        return -2.0 * C / (B + sq)
    return (sq - B) / (6.0 * a)


def prox_piece_candidate(piece: CubicPiece, cfg, x: float) -> float:
    """Proximal point of the full-domain cubic ``piece`` at ``x``.

    Valid whenever ``x`` lies in the piece's cell of the partition; outside of
    it the positive-root branch may not be the minimizer, or may not exist
    (:class:`NegativeDiscriminant`).
    """
    return _stationary_root(piece.a, piece.b, piece.c, _r(cfg), float(x))


def prox_symmetric_cubic(a, b, c, d, cfg, x) -> ProxResult:
    """Prox and envelope of ``a|x|^3 + b x^2 + c x + d`` with ``a, b >= 0``.

    ``cell`` is 0 for the left branch (``x < c/r``) and 1 otherwise.
    """
    if not (a >= 0 and b >= 0):
        raise BadParam(f"need a >= 0 and b >= 0, got a={a}, b={b}")
    r = _r(cfg)
    x = float(x)
    if x < c / r:
        piece, cell = CubicPiece(-a, b, c, d), 0
    else:
        piece, cell = CubicPiece(a, b, c, d), 1
    p = _stationary_root(piece.a, piece.b, piece.c, r, x)
    return ProxResult(p, piece(p) + 0.5 * r * (p - x) ** 2, r * (x - p), cell)


# -- partition and prox ------------------------------------------------------

@lru_cache(maxsize=512)
def _partition(f: PiecewiseCubic, r: float) -> EnvelopePartition:
    cells = []
    lo, hi = f.bounds
    edge = -INF
    if lo > -INF:
        t = lo + f.pieces[0].derivative(lo) / r
        cells.append(Cell(-INF, t, CellKind.BOUND, 0, lo))
        edge = t
    for i, xi in enumerate(f.breakpoints, start=1):
        left = xi + f.pieces[i - 1].derivative(xi) / r
        right = xi + f.pieces[i].derivative(xi) / r
        # Slopes may decrease by up to the validation tolerance.
        right = max(left, right)
        cells.append(Cell(edge, left, CellKind.PIECE, i - 1))
        cells.append(Cell(left, right, CellKind.BREAKPOINT, i, xi))
        edge = right
    if hi < INF:
        t = hi + f.pieces[-1].derivative(hi) / r
        cells.append(Cell(edge, t, CellKind.PIECE, f.m - 1))
        cells.append(Cell(t, INF, CellKind.BOUND, 1, hi))
    else:
        cells.append(Cell(edge, INF, CellKind.PIECE, f.m - 1))
    return EnvelopePartition(f, r, tuple(cells))


def partition(f: PiecewiseCubic, cfg) -> EnvelopePartition:
    """Split the prox-centre axis into piece, breakpoint and bound cells (O(m))."""
    return _partition(f, _r(cfg))


def prox(f: PiecewiseCubic, cfg, x: float) -> ProxResult:
    r = _r(cfg)
    x = float(x)
    part = _partition(f, r)
    k = part.locate(x)
    cell = part.cells[k]
    if cell.kind is CellKind.PIECE:
        piece = f.pieces[cell.index]
        p = _stationary_root(piece.a, piece.b, piece.c, r, x)
        left, right = f.piece_domain(cell.index)
        p = min(max(p, left), right)
    else:
        p = cell.point
        piece = f.pieces[f.piece_index(p)]
    p += 0.0  # no negative zero in reports
    env = piece(p) + 0.5 * r * (p - x) ** 2
    return ProxResult(p, env, r * (x - p) + 0.0, k)


def envelope(f: PiecewiseCubic, cfg, x: float) -> float:
    return prox(f, cfg, x).envelope


def gradient(f: PiecewiseCubic, cfg, x: float) -> float:
    return prox(f, cfg, x).gradient


# -- transforms --------------------------------------------------------------

def affine_tilt(f: PiecewiseCubic, slope: float) -> PiecewiseCubic:
    """Return ``g(x) = f(x) - slope * x``.

    Envelopes are related by ``e_r g(x) = e_r f(x + slope/r) - slope*x - slope^2/(2r)``.
    """
    slope = float(slope)
    return validate([p.tilted(slope) for p in f.pieces], f.breakpoints, f.bounds)


def restrict(f: PiecewiseCubic, lo: float, hi: float) -> PiecewiseCubic:
    """Restrict ``f`` to ``[lo, hi]`` (``+inf`` elsewhere), dropping pieces left outside."""
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        raise EmptyDomain(f"restriction interval [{lo}, {hi}] is empty")
    flo, fhi = f.bounds
    lo, hi = max(lo, flo), min(hi, fhi)
    if not lo < hi:
        raise EmptyDomain(f"restriction does not meet the domain {f.bounds}")
    keep = []
    for k in range(f.m):
        left, right = f.piece_domain(k)
        if left < hi and right > lo:
            keep.append(k)
    pieces = [f.pieces[k] for k in keep]
    bps = [f.breakpoints[k] for k in keep[:-1]]
    return validate(pieces, bps, (lo, hi))


# -- text rendering ------------------------------------------------------------

def _num(v):
    if v == INF:
        return "+inf"
    if v == -INF:
        return "-inf"
    return f"{v:.12g}"


def _term(v):
    # " + v" or " - |v|"; empty for zero.
    if v == 0:
        return ""
    return f" + {_num(v)}" if v > 0 else f" - {_num(-v)}"


def _shift(v):
    # "(x - v)" with the sign folded in.
    if v == 0:
        return "x"
    return f"(x - {_num(v)})" if v > 0 else f"(x + {_num(-v)})"


def _render_cell(f, r, cell: Cell):
    open_ = cell.kind is CellKind.PIECE
    lb = "(" if open_ or cell.lo == -INF else "["
    rb = ")" if open_ or cell.hi == INF else "]"
    interval = f"{lb}{_num(cell.lo)},{_num(cell.hi)}{rb}"
    if cell.kind is CellKind.PIECE:
        p = f.pieces[cell.index]
        B = 2 * p.b + r
        if p.a == 0:
            formula = f"prox=({_num(r)}*x{_term(-p.c)})/{_num(B)}"
        else:
            formula = (
                f"prox=({_num(-B)} + sqrt({_num(B * B)}{_term(12 * p.a * r)}*x{_term(-12 * p.a * p.c)}))"
                f"/{_num(6 * p.a)}"
            )
        formula += f" envelope=f_{cell.index}(prox) + {_num(r / 2)}*(prox - x)^2"
        return f"{interval} piece {cell.index} {formula}"
    v = cell.point
    formula = f"prox={_num(v)} envelope={_num(f(v))} + {_num(r / 2)}*{_shift(v)}^2"
    label = "breakpoint" if cell.kind is CellKind.BREAKPOINT else "bound"
    return f"{interval} {label} {cell.index} {formula}"
