"""Convex piecewise-cubic functions on the real line.

A function is stored as ``m`` cubic pieces ``a x^3 + b x^2 + c x + d`` glued at
``m - 1`` strictly increasing breakpoints, optionally restricted to an interval
``[lo, hi]`` (outside of which it is ``+inf``).  Every :class:`PiecewiseCubic`
is validated on construction: continuity at the breakpoints, convexity of each
piece on its own subdomain and nondecreasing slopes across breakpoints.

Piece indices are 0-based in code.  Validation errors use 1-based positions:
breakpoint ``x_i`` (1-based) separates pieces
``f_i`` and ``f_{i+1}`` (also 1-based).
"""
from __future__ import annotations

import json
import math
from bisect import bisect_left
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

INF = math.inf

CONTINUITY_RTOL = 1e-9
CONVEXITY_TOL = 1e-12
SLOPE_TOL = 1e-12


class InvalidFunction(ValueError):
    """Base class for rejected piecewise-cubic inputs."""


class BadBreakpoints(InvalidFunction):
    pass


class NotContinuous(InvalidFunction):
    def __init__(self, index, x, left, right):
        self.index = index
        super().__init__(
            f"NotContinuous at x_{index}={_fmt(x)}: "
            f"f_{index}({_fmt(x)})={_fmt(left)} != f_{index + 1}({_fmt(x)})={_fmt(right)}"
        )


class NotConvexPiece(InvalidFunction):
    def __init__(self, index, where, value):
        self.index = index
        super().__init__(
            f"NotConvexPiece f_{index}: second derivative {_fmt(value)} < 0 at {where}"
        )


class SlopeDecrease(InvalidFunction):
    def __init__(self, index, x, left, right):
        self.index = index
        super().__init__(
            f"SlopeDecrease at x_{index}={_fmt(x)}: "
            f"f_{index}'({_fmt(x)})={_fmt(left)} > f_{index + 1}'({_fmt(x)})={_fmt(right)}"
        )


class EmptyDomain(InvalidFunction):
    pass


class OutOfDomain(ValueError):
    pass


class SpecParseError(ValueError):
    """Malformed function-spec document (not a convexity problem)."""


def _fmt(v):
    return f"{v:.12g}"


@dataclass(frozen=True)
class CubicPiece:
    """One cubic ``a x^3 + b x^2 + c x + d``."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise InvalidFunction(f"coefficient {name}={v} is not finite")
            object.__setattr__(self, name, v)

    def __call__(self, x):
        return ((self.a * x + self.b) * x + self.c) * x + self.d

    def derivative(self, x):
        return (3.0 * self.a * x + 2.0 * self.b) * x + self.c

    def second_derivative(self, x):
        return 6.0 * self.a * x + 2.0 * self.b

    def tilted(self, slope):
        return CubicPiece(self.a, self.b, self.c - slope, self.d)


@dataclass(frozen=True)
class SubgradientInterval:
    """Closed interval ``[lo, hi]`` of slopes; ``-inf``/``+inf`` encode a normal-cone ray."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"empty subgradient interval [{self.lo}, {self.hi}]")

    def __contains__(self, g):
        return self.lo <= g <= self.hi

    def shifted(self, t):
        return SubgradientInterval(self.lo + t, self.hi + t)


@dataclass(frozen=True)
class PiecewiseCubic:
    """A validated convex piecewise-cubic function.

    ``pieces[k]`` is active on ``[breakpoints[k-1], breakpoints[k]]`` (with the
    domain bounds standing in at both ends).  Construction runs the full
    validation; use :func:`validate` for list inputs.
    """

    pieces: tuple[CubicPiece, ...]
    breakpoints: tuple[float, ...] = ()
    bounds: tuple[float, float] = (-INF, INF)

    def __post_init__(self):
        pieces = tuple(p if isinstance(p, CubicPiece) else CubicPiece(*p) for p in self.pieces)
        breakpoints = tuple(float(x) for x in self.breakpoints)
        lo, hi = self.bounds
        lo = -INF if lo is None else float(lo)
        hi = INF if hi is None else float(hi)
        object.__setattr__(self, "pieces", pieces)
        object.__setattr__(self, "breakpoints", breakpoints)
        object.__setattr__(self, "bounds", (lo, hi))
        self._check()

    # -- validation -------------------------------------------------------

    def _check(self):
        pieces, bps = self.pieces, self.breakpoints
        lo, hi = self.bounds
        if len(pieces) < 1:
            raise BadBreakpoints("at least one piece is required")
        if len(bps) != len(pieces) - 1:
            raise BadBreakpoints(
                f"{len(pieces)} pieces need {len(pieces) - 1} breakpoints, got {len(bps)}"
            )
        if math.isnan(lo) or math.isnan(hi) or lo == INF or hi == -INF:
            raise BadBreakpoints(f"invalid bounds ({lo}, {hi})")
        if not lo < hi:
            raise EmptyDomain(f"bounds ({lo}, {hi}) leave an empty domain")
        for i, x in enumerate(bps):
            if not math.isfinite(x):
                raise BadBreakpoints(f"breakpoint x_{i + 1}={x} is not finite")
            if i and not bps[i - 1] < x:
                raise BadBreakpoints(
                    f"breakpoints not strictly increasing at x_{i + 1}={_fmt(x)}"
                )
            if not lo < x < hi:
                raise BadBreakpoints(
                    f"breakpoint x_{i + 1}={_fmt(x)} is not inside the bounds ({lo}, {hi})"
                )

        for i, x in enumerate(bps, start=1):
            left, right = pieces[i - 1](x), pieces[i](x)
            scale = max(1.0, abs(left), abs(right))
            if abs(left - right) > CONTINUITY_RTOL * scale:
                raise NotContinuous(i, x, left, right)

        for k, piece in enumerate(pieces):
            self._check_piece_convex(k, piece)

        for i, x in enumerate(bps, start=1):
            left, right = pieces[i - 1].derivative(x), pieces[i].derivative(x)
            if left > right + SLOPE_TOL * max(1.0, abs(left), abs(right)):
                raise SlopeDecrease(i, x, left, right)

    def _check_piece_convex(self, k, piece):
        left, right = self.piece_domain(k)
        a, b = piece.a, piece.b
        for end in (left, right):
            if math.isfinite(end):
                s = piece.second_derivative(end)
                if s < -CONVEXITY_TOL * (1.0 + abs(6.0 * a * end) + abs(2.0 * b)):
                    raise NotConvexPiece(k + 1, f"x={_fmt(end)}", s)
        # 6 a x + 2 b is linear: on an unbounded end it must not head to -inf.
        if left == -INF and a > 0:
            raise NotConvexPiece(k + 1, "x -> -inf", -INF)
        if right == INF and a < 0:
            raise NotConvexPiece(k + 1, "x -> +inf", -INF)
        if left == -INF and right == INF and b < 0:
            raise NotConvexPiece(k + 1, "every x", 2.0 * b)

    # -- evaluation -------------------------------------------------------

    @property
    def m(self):
        return len(self.pieces)

    def piece_domain(self, k):
        lo, hi = self.bounds
        left = self.breakpoints[k - 1] if k > 0 else lo
        right = self.breakpoints[k] if k < len(self.breakpoints) else hi
        return left, right

    def in_domain(self, x):
        lo, hi = self.bounds
        return lo <= x <= hi

    def _require(self, x):
        if not self.in_domain(x):
            raise OutOfDomain(f"x={x} outside the domain {self.bounds}")

    def piece_index(self, x):
        """Index of the piece used at ``x``; a breakpoint belongs to its left piece."""
        return bisect_left(self.breakpoints, x)

    def __call__(self, x):
        x = float(x)
        self._require(x)
        return self.pieces[self.piece_index(x)](x)

    def value_or_inf(self, x):
        """Extended-value evaluation: ``+inf`` outside the bounds."""
        return self(x) if self.in_domain(x) else INF

    def subgradient(self, x) -> SubgradientInterval:
        x = float(x)
        self._require(x)
        k = self.piece_index(x)
        lo_g = hi_g = self.pieces[k].derivative(x)
        if k < len(self.breakpoints) and self.breakpoints[k] == x:
            hi_g = self.pieces[k + 1].derivative(x)
        lo, hi = self.bounds
        if x == lo:
            lo_g = -INF
        if x == hi:
            hi_g = INF
        return SubgradientInterval(lo_g, hi_g)

    # -- transforms / serialization --------------------------------------

    def is_affine(self):
        return all(p.a == 0 and p.b == 0 for p in self.pieces) and len(
            {(p.c, p.d) for p in self.pieces}
        ) == 1

    def to_dict(self):
        lo, hi = self.bounds
        return {
            "pieces": [{"a": p.a, "b": p.b, "c": p.c, "d": p.d} for p in self.pieces],
            "breakpoints": list(self.breakpoints),
            "bounds": [None if lo == -INF else lo, None if hi == INF else hi],
        }

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict):
            raise SpecParseError("function spec must be a JSON object")
        raw_pieces = doc.get("pieces")
        if not isinstance(raw_pieces, list) or not raw_pieces:
            raise SpecParseError("'pieces' must be a non-empty list")
        pieces = []
        for i, item in enumerate(raw_pieces):
            if not isinstance(item, dict):
                raise SpecParseError(f"pieces[{i}] must be an object with keys a, b, c, d")
            try:
                pieces.append(tuple(_number(item[k], f"pieces[{i}].{k}") for k in "abcd"))
            except KeyError as exc:
                raise SpecParseError(f"pieces[{i}] is missing coefficient {exc.args[0]!r}") from None
        raw_bps = doc.get("breakpoints", [])
        if not isinstance(raw_bps, list):
            raise SpecParseError("'breakpoints' must be a list")
        bps = [_number(v, f"breakpoints[{i}]") for i, v in enumerate(raw_bps)]
        raw_bounds = doc.get("bounds", [None, None])
        if raw_bounds is None:
            raw_bounds = [None, None]
        if not isinstance(raw_bounds, list) or len(raw_bounds) != 2:
            raise SpecParseError("'bounds' must be a two-element list")
        bounds = tuple(None if v is None else _number(v, "bounds") for v in raw_bounds)
        return validate([CubicPiece(*p) for p in pieces], bps, bounds)

    def dumps(self):
        return json.dumps(self.to_dict())


def _number(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SpecParseError(f"{where} must be a number, got {v!r}")
    return float(v)


def validate(
    pieces: Sequence[CubicPiece | Sequence[float]],
    breakpoints: Iterable[float] = (),
    bounds: tuple[float | None, float | None] | None = None,
) -> PiecewiseCubic:
    """Build a :class:`PiecewiseCubic`, raising an :class:`InvalidFunction` subclass on failure."""
    if bounds is None:
        bounds = (None, None)
    return PiecewiseCubic(tuple(pieces), tuple(breakpoints), tuple(bounds))


def evaluate(f: PiecewiseCubic, x: float) -> float:
    return f(x)


def subgradient(f: PiecewiseCubic, x: float) -> SubgradientInterval:
    return f.subgradient(x)


def loads(text: str) -> PiecewiseCubic:
    """Parse a JSON function spec.  Syntax errors carry line and column."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return PiecewiseCubic.from_dict(doc)


def load(path) -> PiecewiseCubic:
    return loads(Path(path).read_text(encoding="utf-8"))
