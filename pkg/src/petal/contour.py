"""Argument-principle numerics on circles (trapezoid rule)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import NonFiniteSample, NonIntegerWinding, WrongZeroCount, ZeroOnContour


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float
    nodes: int = 64

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if self.nodes < 16 or self.nodes & (self.nodes - 1):
            raise ValueError("nodes must be a power of two >= 16")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))

    def points(self, nodes=None):
        n = nodes or self.nodes
        return self.center + self.radius * np.exp(2j * np.pi * np.arange(n) / n)

    def with_nodes(self, nodes):
        return Circle(self.center, self.radius, nodes)


def _sample(g, w):
    vals = np.fromiter((complex(g(x)) for x in w), dtype=np.complex128, count=len(w))
    if not np.all(np.isfinite(vals)):
        raise NonFiniteSample("integrand is not finite at a contour node")
    return vals


def _rule(vals, w, center):
    # (1/2 pi i) \oint g dw  ==  mean(g(w_k) (w_k - c)) for equispaced nodes
    return complex(np.mean(vals * (w - center)))


def integrate_circle_report(g, C: Circle, tol: Tolerances = DEFAULT, adaptive: bool = True):
    """Return ``(value, nodes_used, converged)``.

    With ``adaptive`` the node count doubles from ``C.nodes`` until two
    successive estimates differ by less than the quadrature gate or the cap
    is reached.  Samples are reused across doublings.
    """
    n = C.nodes
    w = C.points(n)
    vals = _sample(g, w)
    value = _rule(vals, w, C.center)
    if not adaptive:
        return value, n, True
    while n < tol.node_cap:
        # the new nodes interleave the old ones
        w_new = C.center + C.radius * np.exp(2j * np.pi * (np.arange(n) + 0.5) / n)
        v_new = _sample(g, w_new)
        w2 = np.empty(2 * n, dtype=np.complex128)
        v2 = np.empty(2 * n, dtype=np.complex128)
        w2[0::2], w2[1::2] = w, w_new
        v2[0::2], v2[1::2] = vals, v_new
        w, vals, n = w2, v2, 2 * n
        new = _rule(vals, w, C.center)
        if abs(new - value) < tol.quadrature_gate * max(1.0, abs(new)):
            return new, n, True
        value = new
    return value, n, False


def integrate_circle(g, C: Circle, tol: Tolerances = DEFAULT, adaptive: bool = True) -> complex:
    return integrate_circle_report(g, C, tol, adaptive)[0]


def central_difference(f, step):
    def fprime(z):
        return (f(z + step) - f(z - step)) / (2 * step)

    return fprime


def _log_derivative(f, fprime, C, tol):
    if fprime is None:
        fprime = central_difference(f, C.radius * 1e-6)
    floor = tol.contour_floor

    def g(w):
        fw = complex(f(w))
        if abs(fw) < floor:
            raise ZeroOnContour(f"|f| = {abs(fw):.3g} below floor {floor:g} at {w}")
        return complex(fprime(w)) / fw

    return g


def winding_value(f, fprime, C: Circle, tol: Tolerances = DEFAULT) -> complex:
    return integrate_circle(_log_derivative(f, fprime, C, tol), C, tol)


def count_zeros(f, fprime, C: Circle, tol: Tolerances = DEFAULT) -> int:
    v = winding_value(f, fprime, C, tol)
    k = round(v.real)
    if abs(v - k) > tol.winding_residual:
        raise NonIntegerWinding(f"winding integral {v:.6g} is not within {tol.winding_residual} of an integer")
    return int(k)


def locate_single_zero(f, fprime, C: Circle, tol: Tolerances = DEFAULT) -> complex:
    count = count_zeros(f, fprime, C, tol)
    if count != 1:
        raise WrongZeroCount(f"expected exactly one zero inside the circle, found {count}")
    g = _log_derivative(f, fprime, C, tol)
    return integrate_circle(lambda w: w * g(w), C, tol)


def _fixed_point_moment(m, C, power, tol):
    floor = tol.contour_floor

    def g(w):
        d = complex(m.eval(w)) - w
        if abs(d) < floor:
            raise ZeroOnContour(f"f(w) - w vanishes on the contour at {w}")
        return w**power * (complex(m.deriv(w)) - 1) / d

    return integrate_circle(g, C, tol)


def sum_fixed_points(m, C: Circle, tol: Tolerances = DEFAULT) -> complex:
    """Multiplicity-weighted sum of the fixed points of ``m`` inside ``C``."""
    return _fixed_point_moment(m, C, 1, tol)


def fixed_point_power_sum(m, C: Circle, power: int, tol: Tolerances = DEFAULT) -> complex:
    return _fixed_point_moment(m, C, power, tol)


def rouche_check(f, g, C: Circle) -> bool:
    w = C.points()
    try:
        fv = np.array([complex(f(x)) for x in w])
        gv = np.array([complex(g(x)) for x in w])
    except (ArithmeticError, ValueError):
        return False
    if not (np.all(np.isfinite(fv)) and np.all(np.isfinite(gv))):
        return False
    return bool(np.max(np.abs(fv - gv)) < np.min(np.abs(gv)))
