import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from petal import Circle, count_zeros, integrate_circle, locate_single_zero, member, rouche_check, sum_fixed_points
from petal.contour import central_difference, fixed_point_power_sum, integrate_circle_report
from petal.errors import NonFiniteSample, NonIntegerWinding, WrongZeroCount, ZeroOnContour


@pytest.mark.parametrize(
    "g,nodes,want",
    [(lambda w: 1 / w, 64, 1), (lambda w: np.ones_like(w), 64, 0), (lambda w: 1 / (w - 0.3), 128, 1)],
)
def test_integrate_examples(g, nodes, want):
    assert abs(integrate_circle(g, Circle(0j, 1.0, nodes)) - want) < 1e-12


def test_integrate_nonfinite():
    with pytest.raises(NonFiniteSample), np.errstate(divide="ignore", invalid="ignore"):
        integrate_circle(lambda w: 1 / (w - 1), Circle(0j, 1.0, 64))


def test_circle_validation():
    with pytest.raises(Exception):
        Circle(0j, 1.0, 48)
    with pytest.raises(Exception):
        Circle(0j, -1.0, 64)


@pytest.mark.parametrize(
    "f,fp,want",
    [
        (lambda z: z**2, lambda z: 2 * z, 2),
        (lambda z: z - 2, lambda z: np.ones_like(z), 0),
        (lambda z: (z - 0.3) * (z - 0.7j), lambda z: 2 * z - 0.3 - 0.7j, 2),
    ],
)
def test_count_zeros_examples(f, fp, want):
    assert count_zeros(f, fp, Circle(0j, 1.0, 256)) == want


def test_zero_on_contour():
    with pytest.raises(ZeroOnContour):
        count_zeros(lambda z: z - 1, lambda z: np.ones_like(z), Circle(0j, 1.0, 256))


def test_non_integer_winding_on_coarse_grid():
    # a zero a hair inside the contour with a fixed coarse rule
    f = lambda z: z - 0.999
    fp = lambda z: np.ones_like(z)
    from petal.config import Tolerances

    with pytest.raises((NonIntegerWinding, ZeroOnContour)):
        count_zeros(f, fp, Circle(0j, 1.0, 16), Tolerances(node_cap=16))


def test_locate_examples():
    C = Circle(0j, 1.0, 256)
    z = locate_single_zero(lambda z: z - (0.3 + 0.1j), lambda z: np.ones_like(z), C)
    assert abs(z - (0.3 + 0.1j)) < 1e-10
    z = locate_single_zero(lambda z: np.exp(z) - 1, np.exp, C)
    assert abs(z) < 1e-10
    m = member("normalized", 0.05j)
    z = locate_single_zero(lambda z: m.eval(z) - z, lambda z: m.deriv(z) - 1, Circle(-0.1j, 0.05, 256))
    assert abs(z + 0.1j) < 1e-8


def test_locate_wrong_count():
    with pytest.raises(WrongZeroCount):
        locate_single_zero(lambda z: z * z, lambda z: 2 * z, Circle(0j, 1.0, 256))


def test_sum_fixed_points_examples():
    assert abs(sum_fixed_points(member("normalized", 0.1), Circle(0j, 0.5, 256)) + 0.2) < 1e-10
    assert abs(sum_fixed_points(member("quadratic", 0.2), Circle(0.5, 0.6, 256)) - 1) < 1e-10
    assert abs(sum_fixed_points(member("normalized", 0), Circle(0j, 0.5, 256))) < 1e-10


def test_power_sum_matches_roots():
    m = member("quadratic", 0.2 + 0.05j)
    r = np.roots([1, -1, 0.2 + 0.05j])
    assert abs(fixed_point_power_sum(m, Circle(0.5, 0.6, 256), 2) - np.sum(r**2)) < 1e-10


def test_rouche_examples():
    C = Circle(0j, 1.0, 64)
    assert rouche_check(lambda z: z + 0.01, lambda z: z, C)
    assert not rouche_check(lambda z: z + 2, lambda z: z, C)
    assert not rouche_check(lambda z: np.full_like(z, np.nan), lambda z: z, C)


def test_central_difference():
    d = central_difference(np.sin, 1e-5)
    assert abs(d(0.3) - np.cos(0.3)) < 1e-9


def test_node_doubling_stable():
    g = lambda w: np.exp(w) / (w - 0.2)
    a = integrate_circle_report(g, Circle(0j, 1.0, 256), adaptive=False)[0]
    b = integrate_circle_report(g, Circle(0j, 1.0, 512), adaptive=False)[0]
    assert abs(a - b) <= 1e-10


@settings(max_examples=20, deadline=None)
@given(st.lists(st.tuples(st.floats(-1.8, 1.8), st.floats(-1.8, 1.8)), min_size=1, max_size=6))
def test_zero_count_random_polynomials(pts):
    roots = np.array([complex(a, b) for a, b in pts])
    roots = roots[np.abs(np.abs(roots) - 1) > 0.05]
    if len(roots) == 0:
        return
    c = np.poly(roots)
    got = count_zeros(lambda z: np.polyval(c, z), lambda z: np.polyval(np.polyder(c), z), Circle(0j, 1.0, 64))
    assert got == int(np.sum(np.abs(roots) < 1))
