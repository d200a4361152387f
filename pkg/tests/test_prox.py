import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from moreauenv.oracle import prox_oracle_1d
from moreauenv.piecewise import EmptyDomain, validate
from moreauenv.prox import (
    BadParam,
    CellKind,
    ProxConfig,
    affine_tilt,
    envelope,
    gradient,
    partition,
    prox,
    prox_piece_candidate,
    prox_symmetric_cubic,
    restrict,
)

import worked_examples as pf
from helpers import (
    FOUR_THREE,
    abs_cube,
    identity_on_interval,
    make,
    random_convex_cubic,
    random_convex_pwl,
    sample_centres,
    square_cube,
    three_piece,
)


def test_config_rejects_bad_r():
    for r in (0, -1, math.inf, math.nan):
        with pytest.raises(BadParam):
            ProxConfig(r)


# -- worked examples ---------------------------------------------------------------

def test_symmetric_cubic_abs_cube():
    res = prox_symmetric_cubic(1, 0, 0, 0, ProxConfig(1), 1)
    assert res.prox == pytest.approx((-1 + math.sqrt(13)) / 6, abs=1e-15)
    assert res.envelope == pytest.approx(0.2419, abs=1e-4)
    assert res.cell == 1


def test_symmetric_cubic_quadratic():
    res = prox_symmetric_cubic(0, 1, 0, 0, ProxConfig(2), 3)
    assert res.prox == 1.5 and res.envelope == 4.5


def test_symmetric_cubic_rejects_negative_coefficients():
    with pytest.raises(BadParam):
        prox_symmetric_cubic(-1, 0, 0, 0, 1, 0)


@pytest.mark.parametrize("a,b,c,d", [(1, 0, 0, 0), (2, 0.5, 0, 1), (0.3, 2, -1.5, 0), (1, 0, 2, 0)])
@pytest.mark.parametrize("r", [0.1, 1, 10])
def test_symmetric_cubic_matches_oracle(a, b, c, d, r):
    f = validate([(-a, b, c, d), (a, b, c, d)], [0])
    for x in np.linspace(-5, 5, 41):
        res = prox_symmetric_cubic(a, b, c, d, r, x)
        p, e = prox_oracle_1d(f, r, x)
        assert res.prox == pytest.approx(p, abs=1e-8)
        assert res.envelope == pytest.approx(e, rel=1e-9, abs=1e-9)


def test_piece_candidate_negative_cubic():
    p = prox_piece_candidate(make(FOUR_THREE).pieces[1], 1, 0)
    assert p == pytest.approx((-7 + math.sqrt(61)) / 6, abs=1e-15)


def test_piece_candidate_near_zero_cubic_is_continuous():
    piece = make(dict(pieces=[(0, 1, 0, 0)], breakpoints=[])).pieces[0]
    from moreauenv.piecewise import CubicPiece

    for x in (-3.0, 0.5, 7.0):
        q = prox_piece_candidate(piece, 2, x)
        tiny = prox_piece_candidate(CubicPiece(1e-12, 1, 0, 0), 2, x)
        assert abs(q - tiny) < 1e-9


def test_three_piece_partition():
    part = partition(three_piece(), 1)
    assert part.boundaries == (-6, -5, -2, 0)
    kinds = [c.kind for c in part.cells]
    assert kinds == [CellKind.PIECE, CellKind.BREAKPOINT, CellKind.PIECE, CellKind.BREAKPOINT, CellKind.PIECE]
    assert [c.index for c in part.cells] == [0, 1, 1, 2, 2]
    assert part.cells[1].point == -1 and part.cells[3].point == 0


def test_partition_tiles_line():
    for seed in range(20):
        f = random_convex_cubic(np.random.default_rng(seed), 1 + seed % 5)
        for r in (0.1, 1, 10):
            cells = partition(f, r).cells
            assert cells[0].lo == -math.inf and cells[-1].hi == math.inf
            assert len(cells) == 2 * f.m - 1
            for u, v in zip(cells, cells[1:]):
                assert u.hi == v.lo
                assert u.lo <= u.hi


def test_partition_breakpoint_width():
    f = three_piece()
    for r in (0.5, 2):
        for cell in partition(f, r).cells:
            if cell.kind is CellKind.BREAKPOINT:
                g = f.subgradient(cell.point)
                assert cell.hi - cell.lo == pytest.approx((g.hi - g.lo) / r, abs=1e-15)


def test_partition_restricted_example():
    part = partition(identity_on_interval(), 1)
    assert part.boundaries == (0, 3)
    assert [c.kind for c in part.cells] == [CellKind.BOUND, CellKind.PIECE, CellKind.BOUND]
    assert part.cells[0].point == -1 and part.cells[2].point == 2


def test_partition_render():
    lines = partition(three_piece(), 1).render().splitlines()
    assert len(lines) == 5
    assert lines[0].startswith("(-inf,-6) piece 0 ")
    assert lines[1] == "[-6,-5] breakpoint 1 prox=-1 envelope=3 + 0.5*(x + 1)^2"
    assert lines[3] == "[-2,0] breakpoint 2 prox=0 envelope=0 + 0.5*x^2"


def test_prox_examples():
    f = three_piece()
    res = prox(f, 1, -10)
    assert (res.prox, res.envelope) == (-5, 35.5)
    res = prox(f, 1, -5.5)
    assert (res.prox, res.envelope) == (-1, 13.125)
    assert res.cell == 1


def test_boundary_ties_go_to_closed_cell():
    f = three_piece()
    assert prox(f, 1, -6).cell == 1
    assert prox(f, 1, -5).cell == 1
    assert prox(f, 1, 0).cell == 3


def test_envelope_examples():
    assert envelope(square_cube(), 1, -2) == pytest.approx(4 / 3, abs=1e-15)
    affine = validate([(0, 0, 3, 1)])
    assert envelope(affine, 2, 0) == -1.25


def test_gradient_is_r_times_displacement():
    f = three_piece()
    for x in np.linspace(-8, 3, 23):
        res = prox(f, 2.5, x)
        assert res.gradient == 2.5 * (x - res.prox)
        assert gradient(f, 2.5, x) == res.gradient


def test_restricted_examples():
    g = identity_on_interval()
    res = prox(g, 1, 0)
    assert res.prox == -1 and res.envelope == -0.5
    res = prox(g, 1, 5)
    assert res.prox == 2 and res.envelope == 6.5
    h = restrict(validate([(0, 1, 0, 0)]), -1, 1)
    res = prox(h, 1, 0)
    assert res.prox == 0 and res.envelope == 0


def test_restrict_drops_outside_pieces():
    h = restrict(three_piece(), -0.5, 2)
    assert h.m == 2 and h.breakpoints == (0,) and h.bounds == (-0.5, 2)
    with pytest.raises(EmptyDomain):
        restrict(three_piece(), 1, 1)
    with pytest.raises(EmptyDomain):
        restrict(identity_on_interval(), 3, 4)


@pytest.mark.parametrize("r", [0.5, 1, 3])
def test_restricted_matches_worked_example(r):
    g = identity_on_interval()
    for x in np.linspace(-4, 6, 61):
        p, e = pf.identity_on_interval(r, x)
        res = prox(g, r, x)
        assert res.prox == pytest.approx(p, abs=1e-12)
        assert res.envelope == pytest.approx(e, rel=1e-12, abs=1e-12)


def test_tilt_identity():
    f = abs_cube()
    for a in (-2.0, 1.0):
        g = affine_tilt(f, -a)  # |x|^3 + a x
        for r in (0.5, 1, 4):
            for x in np.linspace(-3, 3, 25):
                lhs = envelope(g, r, x)
                rhs = envelope(f, r, x - a / r) + a * x - a * a / (2 * r)
                assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


# -- properties ----------------------------------------------------------------------

RNG = np.random.default_rng(1234)
FUNCS = [random_convex_cubic(RNG, 1 + k % 6) for k in range(30)]
R_VALUES = (0.1, 1.0, 10.0)


@pytest.mark.parametrize("k", range(len(FUNCS)))
def test_oracle_equivalence_sample(k):
    f = FUNCS[k]
    rng = np.random.default_rng(k)
    for r in R_VALUES:
        for x in sample_centres(partition(f, r), rng, 20):
            res = prox(f, r, x)
            p, e = prox_oracle_1d(f, r, x)
            assert abs(res.prox - p) <= 1e-7
            assert abs(res.envelope - e) <= 1e-9 * (1 + abs(e))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, len(FUNCS) - 1), st.sampled_from(R_VALUES), st.floats(-20, 20))
def test_sandwich(k, r, x):
    f = FUNCS[k]
    e = envelope(f, r, x)
    assert e <= f(x) + 1e-12 * (1 + abs(f(x)))
    # e >= f(prox) >= inf f; random functions may be unbounded below.
    assert e >= f(prox(f, r, x).prox) - 1e-12 * (1 + abs(e))


def test_sandwich_lower_bound_on_coercive_functions():
    f = three_piece()
    inf_f = min(f(t) for t in np.linspace(-1, 1, 20001))
    for r in (0.1, 1, 10):
        for x in np.linspace(-5, 5, 101):
            assert envelope(f, r, x) >= inf_f - 1e-12


@settings(max_examples=300, deadline=None)
@given(
    st.integers(0, len(FUNCS) - 1),
    st.sampled_from(R_VALUES),
    st.floats(-20, 20),
    st.floats(-20, 20),
)
def test_prox_monotone_nonexpansive(k, r, x, y):
    f = FUNCS[k]
    x, y = min(x, y), max(x, y)
    px, py = prox(f, r, x).prox, prox(f, r, y).prox
    assert px <= py + 1e-12
    assert abs(px - py) <= abs(x - y) + 1e-12


@settings(max_examples=300, deadline=None)
@given(st.integers(0, len(FUNCS) - 1), st.sampled_from(R_VALUES), st.floats(-20, 20))
def test_optimality_certificate(k, r, x):
    f = FUNCS[k]
    p = prox(f, r, x).prox
    g = f.subgradient(p)
    t = r * (p - x)
    assert g.lo + t - 1e-8 * (1 + abs(t)) <= 0 <= g.hi + t + 1e-8 * (1 + abs(t))


@pytest.mark.parametrize("k", range(0, len(FUNCS), 3))
def test_gradient_matches_finite_differences(k):
    f = FUNCS[k]
    h = 1e-6
    rng = np.random.default_rng(k)
    for r in R_VALUES:
        part = partition(f, r)
        bnd = np.array(part.boundaries)
        for x in sample_centres(part, rng, 40):
            if bnd.size and np.min(np.abs(bnd - x)) < 1e-3:
                continue
            g = gradient(f, r, x)
            fd = (envelope(f, r, x + h) - envelope(f, r, x - h)) / (2 * h)
            assert abs(g - fd) <= 1e-5 * (1 + abs(g))


@settings(max_examples=300, deadline=None)
@given(
    st.integers(0, len(FUNCS) - 1),
    st.sampled_from(R_VALUES),
    st.floats(-20, 20),
    st.floats(-20, 20),
)
def test_gradient_r_lipschitz(k, r, x, y):
    f = FUNCS[k]
    assert abs(gradient(f, r, x) - gradient(f, r, y)) <= r * abs(x - y) + 1e-9


@pytest.mark.parametrize("a,b", [(1, 0), (0.5, 2), (3, 0.1)])
def test_evenness(a, b):
    f = validate([(-a, b, 0, 1), (a, b, 0, 1)], [0])
    for r in (0.1, 1, 10):
        for x in np.linspace(0, 6, 31):
            assert abs(envelope(f, r, x) - envelope(f, r, -x)) <= 1e-12 * (1 + abs(envelope(f, r, x)))


@pytest.mark.parametrize("slope,icpt", [(3, 1), (-2.5, 0), (0, 4)])
def test_affine_gap_is_constant(slope, icpt):
    f = validate([(0, 0, slope, icpt)])
    for r in (0.1, 1, 10):
        for x in np.linspace(-10, 10, 41):
            gap = f(x) - envelope(f, r, x)
            assert abs(gap - slope * slope / (2 * r)) <= 1e-12 * (1 + abs(f(x)))


def test_nonaffine_gap_is_not_constant():
    for f in (three_piece(), abs_cube(), square_cube(), *FUNCS[:5]):
        xs = np.linspace(-3, 3, 61)
        gaps = [f(x) - envelope(f, 1, x) for x in xs]
        assert max(gaps) - min(gaps) > 1e-6


@pytest.mark.parametrize("seed", range(8))
def test_lipschitz_gap_bound(seed):
    f = random_convex_pwl(np.random.default_rng(seed), 1 + seed % 5)
    L = max(abs(p.c) for p in f.pieces)
    for r in (0.1, 1, 10):
        for x in np.linspace(-6, 6, 121):
            gap = f(x) - envelope(f, r, x)
            assert -1e-12 <= gap <= L * L / (2 * r) + 1e-12


def test_strict_convexity_transfer():
    f = abs_cube()
    rng = np.random.default_rng(7)
    count = 0
    while count < 100:
        x, y = rng.uniform(-4, 4, 2)
        if abs(x - y) < 0.1:
            continue
        count += 1
        mid = envelope(f, 1, 0.5 * (x + y))
        avg = 0.5 * (envelope(f, 1, x) + envelope(f, 1, y))
        assert avg - mid > 1e-6


@pytest.mark.parametrize("k", range(0, len(FUNCS), 5))
def test_monotone_in_r(k):
    f = FUNCS[k]
    rs = [1, 10, 100, 1000, 10000]
    for x in np.linspace(-3, 3, 13):
        es = [envelope(f, r, x) for r in rs]
        for u, v in zip(es, es[1:]):
            assert u <= v + 1e-12 * (1 + abs(v))
        assert es[-1] <= f(x) + 1e-12 * (1 + abs(f(x)))


@pytest.mark.parametrize("seed", range(4))
def test_converges_to_f_for_lipschitz(seed):
    f = random_convex_pwl(np.random.default_rng(seed), 3)
    for x in np.linspace(-3, 3, 13):
        assert f(x) - envelope(f, 1e4, x) < 1e-2 * (1 + abs(f(x)))
