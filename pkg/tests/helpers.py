"""Shared fixtures: golden functions and a random convex piecewise-cubic generator."""
import numpy as np

from moreauenv.piecewise import CubicPiece, InvalidFunction, validate

THREE_PIECE = dict(pieces=[(0, 0, -5, -2), (0, 1, -2, 0), (1, 0, 0, 0)], breakpoints=[-1, 0])
SQUARE_CUBE = dict(pieces=[(0, 1, 0, 0), (1, 0, 0, 0)], breakpoints=[0])
ABS_CUBE = dict(pieces=[(-1, 0, 0, 0), (1, 0, 0, 0)], breakpoints=[0])
FOUR_THREE = dict(
    pieces=[(-2, 2, 2, 3), (1, 3, -1, 2), (3, 2, 2, -2)], breakpoints=[-1, 1]
)


def make(spec):
    return validate(spec["pieces"], spec["breakpoints"], spec.get("bounds"))


def three_piece():
    return make(THREE_PIECE)


def square_cube():
    return make(SQUARE_CUBE)


def abs_cube():
    return make(ABS_CUBE)


def identity_on_interval():
    return validate([(0, 0, 1, 0)], [], (-1, 2))


def random_convex_cubic(rng, m, coef=5.0, span=3.0, max_restarts=200):
    """Rejection-sample a convex piecewise cubic with ``m`` pieces.

    Pieces are drawn left to right with coefficients uniform in
    ``[-coef, coef]``; ``d`` is then shifted for continuity and the draw is
    rejected until the piece is convex on its subdomain with a nondecreasing
    slope at its left breakpoint.
    """
    for _ in range(max_restarts):
        bps = np.sort(rng.uniform(-span, span, size=m - 1))
        if m > 1 and np.min(np.diff(bps), initial=1.0) < 1e-3:
            continue
        pieces = []
        ok = True
        for k in range(m):
            for _ in range(2000):
                a, b, c, d = rng.uniform(-coef, coef, size=4)
                if rng.random() < 0.2:
                    a = 0.0
                if m == 1:
                    a = 0.0
                    b = abs(b)
                if k > 0:
                    x = bps[k - 1]
                    prev = pieces[-1]
                    d += prev(x) - CubicPiece(a, b, c, d)(x)
                cand = CubicPiece(a, b, c, d)
                try:
                    validate(pieces + [cand], bps[:k], None) if k == m - 1 else _partial_ok(
                        pieces + [cand], bps[: k + 1]
                    )
                except InvalidFunction:
                    continue
                pieces.append(cand)
                break
            else:
                ok = False
                break
        if ok:
            return validate(pieces, bps)
    raise RuntimeError("could not sample a convex piecewise cubic")


def _partial_ok(pieces, bps):
    # Validate a prefix: the last piece is treated as ending at the next breakpoint.
    return validate(pieces, bps[:-1], (None, float(bps[-1])))


def random_convex_pwl(rng, m, slope=5.0, span=3.0):
    slopes = np.sort(rng.uniform(-slope, slope, size=m))
    bps = np.sort(rng.uniform(-span, span, size=m - 1))
    d0 = rng.uniform(-slope, slope)
    pieces = [CubicPiece(0, 0, slopes[0], d0)]
    for k in range(1, m):
        x = bps[k - 1]
        d = pieces[-1](x) - slopes[k] * x
        pieces.append(CubicPiece(0, 0, slopes[k], d))
    return validate(pieces, bps)


def sample_centres(part, rng, n):
    """Prox-centres spread over every cell plus a margin beyond the outer ones."""
    b = [v for v in part.boundaries]
    if b:
        lo, hi = min(b), max(b)
        w = max(hi - lo, 1.0)
    else:
        lo, hi, w = -1.0, 1.0, 2.0
    return rng.uniform(lo - w, hi + w, size=n)
