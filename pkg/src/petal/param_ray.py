"""Parameter rays: the curve of parameters whose singular value sits on the
dynamic ray at potential ``t``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .config import DEFAULT, Tolerances
from .contour import Circle, count_zeros, locate_single_zero, winding_value
from .errors import (
    BranchLoss,
    ContinuationStalled,
    DomainError,
    MultipleZeros,
    NoConvergence,
    NoZeroInTrustRegion,
    OverflowGuard,
    PetalError,
    RayLost,
    SingularHit,
    TooFewSamples,
)
from .family import FamilyId
from .rays import Combinatorics, extrapolate, ray_point


def defect(fid: FamilyId, comb: Combinatorics, a, t: float, tol: Tolerances = DEFAULT) -> complex:
    """``s(a) - gamma_a(t)``: zero exactly when ``a`` lies on the parameter ray."""
    m = fid.member(a, tol)
    try:
        return m.singular_value() - ray_point(m, comb, t, tol)
    except (ArithmeticError, ValueError, NoConvergence, SingularHit, BranchLoss, OverflowGuard) as exc:
        raise RayLost(f"ray at a = {complex(a)} could not be followed to potential {t}: {exc}") from None


def _safe_defect(fid, comb, t, tol):
    def f(a):
        return defect(fid, comb, a, t, tol)

    return f


def trust_radius(fid, a_seed) -> float:
    return 0.1 * abs(complex(a_seed) - fid.a0) + 1e-3


def _derivative(f, a, tol):
    h = tol.fd_step * max(1.0, abs(a))
    return (f(a + h) - f(a - h)) / (2 * h)


def _newton(f, a, radius, tol, iters=30):
    a0 = a = complex(a)
    val = f(a)
    for _ in range(iters):
        if abs(val) <= tol.defect_tol * 1e-3:
            break
        step = val / _derivative(f, a, tol)
        a -= step
        if abs(a - a0) > radius:
            raise NoConvergence("Newton left the trust region")
        val = f(a)
        if abs(step) <= 1e-15 * max(1.0, abs(a)):
            break
    if not abs(val) <= tol.defect_tol:
        raise NoConvergence(f"Newton stopped at residual {abs(val):.3g}")
    return a, abs(val)


def _winding(f, a_seed, radius, tol):
    r = radius / 16
    while r <= radius * (1 + 1e-12):
        C = Circle(a_seed, r, 32)
        n = count_zeros(f, None, C, tol)
        if n >= 2:
            raise MultipleZeros(f"{n} zeros of the defect within {r:.3g} of {a_seed}")
        if n == 1:
            return locate_single_zero(f, None, C, tol), r
        r *= 2
    raise NoZeroInTrustRegion(f"no zero of the defect within {radius:.3g} of {a_seed}")


def solve_at_potential(fid, comb, t, a_seed, tol: Tolerances = DEFAULT, method: str = "auto"):
    """Parameter with zero defect at potential ``t`` near ``a_seed``.

    Returns ``(a, residual, method)``.  ``method`` forces ``"newton"`` or
    ``"winding"``; ``"auto"`` tries Newton and falls back to the winding count.
    """
    f = _safe_defect(fid, comb, t, tol)
    radius = trust_radius(fid, a_seed)
    if method in ("auto", "newton"):
        try:
            a, res = _newton(f, a_seed, radius, tol)
            return a, res, "newton"
        except (NoConvergence, RayLost, ZeroDivisionError):
            if method == "newton":
                raise
    est, _ = _winding(f, complex(a_seed), radius, tol)
    a, res = _newton(f, est, radius, tol)
    return a, res, "winding"


def winding_estimate(fid, comb, t, a_seed, tol: Tolerances = DEFAULT) -> complex:
    """The unpolished contour-integral location of the zero (for cross-checks)."""
    f = _safe_defect(fid, comb, t, tol)
    return _winding(f, complex(a_seed), trust_radius(fid, a_seed), tol)[0]


def real_seed(fid, comb, t, tol: Tolerances = DEFAULT, upper: float = 3.5) -> complex:
    """Bracket and bisect the real parameter on the ray (real-symmetric combinatorics)."""
    if not ((comb.kind == "angle" and comb.angle == 0) or (comb.kind == "address" and comb.entry == 0)):
        raise DomainError("real-axis seeding needs angle 0 or address 0")
    a0 = fid.a0.real

    def g(x):
        try:
            d = defect(fid, comb, x, t, tol)
        except PetalError:
            return math.nan
        return d.real if abs(d.imag) < 1e-9 * max(1.0, abs(d)) else math.nan

    xs = a0 + upper * np.geomspace(1e-6, 1, 200)
    vals = [g(x) for x in xs]
    for (x1, v1), (x2, v2) in zip(zip(xs, vals), zip(xs[1:], vals[1:])):
        if np.isfinite(v1) and np.isfinite(v2) and v1 * v2 <= 0:
            return complex(brentq(g, x1, x2, xtol=1e-15, rtol=1e-15))
    raise NoZeroInTrustRegion(f"no real parameter on the ray at potential {t}")


@dataclass
class ParameterRay:
    family: FamilyId
    comb: Combinatorics
    t: list = field(default_factory=list)
    a: list = field(default_factory=list)
    residual: list = field(default_factory=list)
    method: list = field(default_factory=list)
    landing: tuple = (complex("nan"), math.inf)

    def to_rows(self):
        return [
            (float(t), float(a.real), float(a.imag), float(r), m)
            for t, a, r, m in zip(self.t, self.a, self.residual, self.method)
        ]

    def sidecar(self):
        fid = self.family
        return {
            "kind": "param-ray",
            "family": {"family": fid.name, "n": fid.n},
            "comb": self.comb.to_json(),
            "samples": len(self.t),
            "landing": [self.landing[0].real, self.landing[0].imag],
            "landing_uncertainty": self.landing[1],
            "max_residual": max(self.residual) if self.residual else 0.0,
        }


def trace_parameter_ray(fid, comb, t_start, t_end, step=1.0, seed=None, tol: Tolerances = DEFAULT,
                        progress=None) -> ParameterRay:
    if not t_start > t_end:
        raise DomainError("t_start must exceed t_end")
    if not step > 0:
        raise DomainError("step must be positive")
    a = complex(seed) if seed is not None else real_seed(fid, comb, t_start, tol)
    a, res, how = solve_at_potential(fid, comb, t_start, a, tol)
    pr = ParameterRay(fid, comb, [float(t_start)], [a], [res], [how])
    count = int(math.floor((t_start - t_end) / step + 1e-9))
    prev_t, prev_a = None, None
    t_cur, a_cur = float(t_start), a
    for k in range(1, count + 1):
        target = t_start - k * step
        h = target - t_cur  # negative
        while t_cur > target + 1e-12:
            t_next = max(t_cur + h, target)
            if prev_t is not None:
                guess = a_cur + (a_cur - prev_a) * (t_next - t_cur) / (t_cur - prev_t)
            else:
                guess = a_cur
            try:
                a_next, res, how = solve_at_potential(fid, comb, t_next, guess, tol)
            except PetalError:
                h /= 2
                if abs(h) < tol.min_step:
                    raise ContinuationStalled(f"step fell below {tol.min_step} near t = {t_cur}") from None
                continue
            prev_t, prev_a = t_cur, a_cur
            t_cur, a_cur = t_next, a_next
        pr.t.append(float(target))
        pr.a.append(a_cur)
        pr.residual.append(res)
        pr.method.append(how)
        if progress:
            progress(target, a_cur)
    if len(pr.t) >= 9:
        land, unc, _ = extrapolate(pr.t, pr.a)
        pr.landing = (land, unc)
    return pr


def landing_report(pr: ParameterRay, a0: complex, window: int = 10) -> dict:
    if len(pr.t) < window:
        raise TooFewSamples(f"need {window} samples, have {len(pr.t)}")
    a = np.asarray(pr.a, dtype=np.complex128)
    dist = np.abs(a - a0)
    last = dist[-window:]
    monotone = bool(np.all(np.diff(last) <= 0))
    if np.all(dist == 0):
        limit, unc = complex(a0), 0.0
    else:
        limit, unc, _ = extrapolate(pr.t, a)
    return {
        "distances": [float(x) for x in dist],
        "monotone": monotone,
        "limit": [limit.real, limit.imag],
        "uncertainty": unc,
        "limit_error": float(abs(limit - a0)),
    }
