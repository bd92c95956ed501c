"""The bifurcating fixed-point pair, its multipliers and the lambda-coordinate."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .contour import Circle, count_zeros, fixed_point_power_sum, sum_fixed_points
from .errors import (
    CoalescedPair,
    DegenerateQuadraticTerm,
    DegreeTwoCover,
    NoConvergence,
    NotAFixedPoint,
    ParabolicInput,
    SectorViolation,
    WrongZeroCount,
)


@dataclass(frozen=True)
class FixedPair:
    z1: complex
    z2: complex
    mu1: complex
    mu2: complex
    disk: Circle


@dataclass(frozen=True)
class LambdaCoordinate:
    lam: complex
    n: int
    branch: int


def newton_fixed_point(m, z, tol: Tolerances = DEFAULT) -> complex:
    z = complex(z)
    for _ in range(tol.newton_iters):
        step = (complex(m.eval(z)) - z) / (complex(m.deriv(z)) - 1)
        z -= step
        if abs(step) <= tol.newton_tol * max(1.0, abs(z)):
            break
    return z


def _order(m, za, zb):
    """Put the fixed point continued from ``z0`` first.

    The normalized family keeps ``z1 = 0``.  The quadratic and exponential
    families pick, from the two roots ``z0 -+ sqrt(a0 - a)``-like branches,
    the one with the minus sign (principal square root), matching
    ``(1 - sqrt(1 - 4c)) / 2`` for ``z**2 + c``.
    """
    if m.name == "normalized":
        return (za, zb) if abs(za) <= abs(zb) else (zb, za)
    root = cmath.sqrt(m.id.a0 - m.a)
    if root == 0:
        return za, zb
    proj = ((za - m.id.z0) * root.conjugate()).real
    return (za, zb) if proj <= 0 else (zb, za)


def find_pair(m, disk: Circle, tol: Tolerances = DEFAULT, distinct: bool = False) -> FixedPair:
    count = count_zeros(lambda z: m.eval(z) - z, lambda z: m.deriv(z) - 1, disk, tol)
    if count != 2:
        raise WrongZeroCount(f"disk contains {count} fixed points, expected 2")
    s1 = sum_fixed_points(m, disk, tol)
    s2 = fixed_point_power_sum(m, disk, 2, tol)
    e2 = (s1 * s1 - s2) / 2
    d2 = s1 * s1 - 4 * e2
    # the power sums carry ~eps relative error, which sqrt would inflate to ~1e-8
    if abs(d2) < 64 * 2.2e-16 * max(1.0, abs(s1) ** 2, disk.radius**2):
        d2 = 0j
    disc = cmath.sqrt(d2)
    za, zb = (s1 + disc) / 2, (s1 - disc) / 2
    if m.name == "normalized" and abs(za) > abs(zb):
        za, zb = zb, za
    # polish; a double root only polishes linearly, so keep the estimate then
    pa, pb = newton_fixed_point(m, za, tol), newton_fixed_point(m, zb, tol)
    if abs(pa - pb) > 1e-12 and math.isfinite(abs(pa)) and math.isfinite(abs(pb)):
        za, zb = pa, pb
    if m.name == "normalized":
        # 0 is an exact fixed point of every member
        za = 0j if abs(za) < 1e-9 else za
    z1, z2 = _order(m, za, zb)
    if distinct and abs(z1 - z2) < tol.coalesced:
        raise CoalescedPair(f"fixed points coincide: |z1 - z2| = {abs(z1 - z2):.3g}")
    for z in (z1, z2):
        if abs(complex(m.eval(z)) - z) > tol.fixed_residual and abs(z1 - z2) > 1e-6:
            raise NoConvergence(f"Newton polish left residual {abs(complex(m.eval(z)) - z):.3g}")
    return FixedPair(z1, z2, complex(m.deriv(z1)), complex(m.deriv(z2)), disk)


def default_disk(m, tol: Tolerances = DEFAULT) -> Circle:
    """A disk around ``z0`` containing the pair for moderately perturbed members."""
    spread = 2 * abs(cmath.sqrt(m.a - m.id.a0))
    if m.name == "normalized":
        spread = 2 * abs(m.a) ** m.id.n
    if m.name == "exponential":
        spread *= math.e
    return Circle(m.id.z0, max(0.5, 1.5 * spread), 256)


def multiplier_at(m, z, tol: Tolerances = DEFAULT) -> complex:
    if abs(complex(m.eval(z)) - z) > 1e-8:
        raise NotAFixedPoint(f"{z} is not a fixed point (residual {abs(complex(m.eval(z)) - z):.3g})")
    return complex(m.deriv(z))


def lambda_coordinate(mu1: complex, n: int = 1, sector=(-0.25, 0.25)) -> LambdaCoordinate:
    th1, th2 = sector
    if not n * (th2 - th1) < 1:
        raise SectorViolation(f"n*(theta2 - theta1) = {n * (th2 - th1)} must be < 1")
    base = (complex(mu1) - 1) / 2
    if abs(base) == 0:
        raise ParabolicInput("mu1 = 1 has no lambda-coordinate")
    r = abs(base) ** (1.0 / n)
    arg0 = cmath.phase(base) / n
    for k in range(n):
        ang = arg0 + 2 * math.pi * k / n
        # bring into the sector's window
        turns = ang / (2 * math.pi)
        shift = math.floor(th2 - turns)
        turns += shift
        # the sector is closed, so mu1 = 1 + 0.2i maps to lambda = 0.1i
        if th1 - 1e-12 <= turns <= th2 + 1e-12:
            return LambdaCoordinate(r * cmath.exp(2j * math.pi * turns), n, k)
    raise SectorViolation(f"no {n}-th root of {base} has argument in 2*pi*({th1}, {th2})")


def normalize_to_parabolic_form(m, pair: FixedPair):
    """Affine ``w = alpha*z + beta`` with ``z1 -> 0`` and unit quadratic coefficient."""
    a2 = m.taylor(pair.z1, 2)[2]
    if abs(a2) < 1e-14:
        raise DegenerateQuadraticTerm("second Taylor coefficient vanishes at z1")
    return a2, -a2 * pair.z1


def parabolic_normal_coefficients(m, order: int = 14):
    """Taylor coefficients ``[1, 1, a3, ...]`` of the conjugate ``w + w**2 + ...``
    at the base point, together with the chart ``(alpha, beta)``."""
    coeffs = m.taylor(m.id.z0, order)
    alpha = coeffs[2]
    if abs(alpha) < 1e-14:
        raise DegenerateQuadraticTerm("second Taylor coefficient vanishes at z0")
    normal = [coeffs[k] / alpha ** (k - 1) for k in range(1, order + 1)]
    return normal, alpha, -alpha * m.id.z0


def detect_case(fid, radius: float = 1e-3, steps: int = 256, tol: Tolerances = DEFAULT) -> str:
    """Continue the pair around a loop of parameters about ``a0``.

    Returns ``"i"`` when each fixed point returns to itself and raises
    ``DegreeTwoCover`` when the loop swaps them.
    """
    a0 = fid.a0
    m = fid.member(a0 + radius, tol)
    pair = find_pair(m, default_disk(m, tol), tol)
    z1 = pair.z1
    for k in range(1, steps + 1):
        m = fid.member(a0 + radius * cmath.exp(2j * math.pi * k / steps), tol)
        z1 = newton_fixed_point(m, z1, tol)
    if abs(z1 - pair.z1) > abs(pair.z1 - pair.z2) / 2:
        raise DegreeTwoCover(f"{fid.name}: fixed points swap around the base parameter")
    return "i"


def injectivity_proxy(n: int = 1, sector=(-0.125, 0.125), rmax: float = 0.1, size: int = 20) -> bool:
    r = np.linspace(rmax / size, rmax, size)
    th = np.linspace(sector[0], sector[1], size + 2)[1:-1] * 2 * np.pi
    lam = (r[:, None] * np.exp(1j * th[None, :])).ravel()
    img = 1 + 2 * lam**n
    dz = np.abs(img[:, None] - img[None, :])
    dl = np.abs(lam[:, None] - lam[None, :])
    return bool(np.all((dz >= 1e-9) | (dl < 1e-9)))
