"""Fixed dynamic rays and their landing points.

Potentials are normalized so that one unit of potential is one iterate,
``f(gamma(t)) = gamma(t + 1)``:

* quadratic: ``t = 1 + log2 G`` where ``G`` is the Green function, so the
  angle-0 ray of ``z**2`` is ``gamma(t) = exp(2**(t - 1))`` and ``gamma(1) = e``;
* exponential: ``t = A(tau)`` where ``tau`` is the standard ray potential
  (``g(F(tau)) = f(g(tau))`` with ``F(x) = exp(x) - 1`` and tail
  ``g(tau) ~ tau - Log(lam) + 2 pi i s``) and ``A`` is the Abel function of
  ``F`` with ``A(1) = 1``.
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq, least_squares

from . import _kernels as K
from .config import DEFAULT, Tolerances
from .errors import (
    BranchLoss,
    CombNotFixed,
    DomainError,
    Diverging,
    NoConvergence,
    NonEscaping,
    NoUnitPairs,
    OverflowGuard,
    SingularHit,
    TooFewSamples,
)
from .family import base_member


# ---------------------------------------------------------------------------
# combinatorics


@dataclass(frozen=True)
class Combinatorics:
    kind: str  # "angle" or "address"
    angle: Fraction = Fraction(0)
    address: tuple = ()

    @classmethod
    def external_angle(cls, theta) -> "Combinatorics":
        return cls("angle", Fraction(theta).limit_denominator(10**9))

    @classmethod
    def external_address(cls, entries, tol: Tolerances = DEFAULT) -> "Combinatorics":
        entries = tuple(int(e) for e in entries)
        if not entries:
            raise DomainError("empty external address")
        if any(abs(e) > tol.address_bound for e in entries):
            raise DomainError(f"address entries must satisfy |s| <= {tol.address_bound}")
        return cls("address", address=entries)

    def is_fixed(self) -> bool:
        if self.kind == "angle":
            return (2 * self.angle - self.angle) % 1 == 0
        return len(set(self.address)) == 1

    @property
    def entry(self) -> int:
        return self.address[0]

    def label(self) -> str:
        if self.kind == "angle":
            return f"angle {self.angle}"
        return "address " + ",".join(str(e) for e in self.address)

    def to_json(self):
        if self.kind == "angle":
            return {"angle": str(self.angle)}
        return {"address": list(self.address)}


def _check_comb(m, comb):
    if m.name == "quadratic" and comb.kind != "angle":
        raise DomainError("quadratic rays take an external angle")
    if m.name == "exponential" and comb.kind != "address":
        raise DomainError("exponential rays take an external address")
    if m.name not in ("quadratic", "exponential"):
        raise DomainError(f"no ray model for family {m.name!r}")
    if not comb.is_fixed():
        raise CombNotFixed(f"{comb.label()} is not fixed under the shift")


# ---------------------------------------------------------------------------
# potentials


def boettcher_potential(m, z, tol: Tolerances = DEFAULT) -> float:
    """Green function ``lim 2**-n log|f^n(z)|`` of ``z**2 + c``."""
    if m.name != "quadratic":
        raise DomainError("the Boettcher potential is defined for the quadratic family")
    z = complex(z)
    c = m.a
    g, n, escaped = K.green_escape(z, c, tol.escape_radius, tol.escape_iter)
    if not escaped:
        raise NonEscaping(f"orbit of {z} stayed below {tol.escape_radius:g} for {tol.escape_iter} iterations")
    zn = z
    for _ in range(n):
        zn = zn * zn + c
    # first-order tail: log|z_{n+1}| = 2 log|z_n| + log|1 + c/z_n^2|
    return g + math.log(abs(1 + c / (zn * zn))) / 2 ** (n + 1)


def boettcher_potentials(m, zs, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Vectorised escape potential; 0 marks points that did not escape."""
    if m.name != "quadratic":
        raise DomainError("Boettcher potential is defined for the quadratic family")
    zs = np.ascontiguousarray(zs, dtype=np.complex128).ravel()
    return K.green_escape_many(zs, complex(m.a), tol.escape_radius, tol.escape_iter)


@functools.lru_cache(maxsize=1)
def _exp_chart():
    from .fatou import parabolic_chart

    return parabolic_chart(base_member("exponential"), "outgoing")


@functools.lru_cache(maxsize=1)
def _abel_shift():
    return 1.0 - _exp_chart().raw(2.0).real


def unit_potential(tau: float) -> float:
    """``A(tau)``: unit potential of the standard exponential potential ``tau > 0``."""
    tau = float(tau)
    if not tau > 0:
        raise DomainError("standard potentials are positive")
    # A(F(x)) = A(x) + 1 with the chart coordinate z = 1 + tau
    return _exp_chart().raw(1.0 + tau).real + _abel_shift()


_BASE_TAU = 0.2


@functools.lru_cache(maxsize=1)
def _base_window():
    lo = _BASE_TAU
    return lo, math.expm1(lo), unit_potential(lo)


@functools.lru_cache(maxsize=4096)
def standard_potential(t: float) -> float:
    """``A^-1(t)``; raises ``OverflowGuard`` past double range."""
    lo, hi, t_lo = _base_window()
    n = math.floor(t - t_lo)
    target = t - n
    x = brentq(lambda x: unit_potential(x) - target, lo, hi, xtol=1e-17, rtol=1e-15, maxiter=200)
    try:
        if n >= 0:
            for _ in range(n):
                x = math.expm1(x)
        else:
            for _ in range(-n):
                x = math.log1p(x)
    except OverflowError:
        raise OverflowGuard(f"standard potential at unit potential {t} exceeds double range") from None
    return x


# ---------------------------------------------------------------------------
# ray curves


@dataclass
class RayCurve:
    member: object
    comb: Combinatorics
    t: np.ndarray
    z: np.ndarray
    invariance_residual: float = 0.0
    step: float = 0.0

    def to_rows(self):
        return [(float(t), float(z.real), float(z.imag)) for t, z in zip(self.t, self.z)]

    def sidecar(self):
        return {
            "kind": "ray",
            "member": self.member.to_json(),
            "comb": self.comb.to_json(),
            "step": self.step,
            "invariance_residual": self.invariance_residual,
            "samples": len(self.t),
        }


def _grid(t_hi, t_lo, step):
    if not t_hi > t_lo:
        raise DomainError("t_hi must exceed t_lo")
    if not step > 0:
        raise DomainError("step must be positive")
    per = round(1 / step)
    if abs(per * step - 1) > 1e-9:
        raise DomainError("step must divide 1 (1/step an integer)")
    count = int(math.floor((t_hi - t_lo) * per + 1e-9)) + 1
    return per, np.array([t_hi - j / per for j in range(count)])


def _quadratic_ray(m, comb, t_hi, per, count, tol):
    c = m.a
    # lift the top of the grid by whole units until G = 2**(t-1) >= 16
    lift = max(0, math.ceil(5 - t_hi))
    top = t_hi + lift
    theta = float(comb.angle)
    ts = top - np.arange(per) / per
    G = 2.0 ** (ts - 1)
    w = np.exp(G + 2j * math.pi * theta)
    seeds = w - c / (2 * w)
    total = lift * per + count
    z, hit = K.quadratic_pullback(seeds.astype(np.complex128), complex(c), total, tol.critical_gap)
    if hit >= 0:
        t_hit = top - hit / per
        raise SingularHit(f"ray meets the critical point near potential {t_hit:.6g}")
    return z[lift * per :]


def _exp_sample(m, s, t, tol):
    lam_log = cmath.log(m.a)
    shift = 2j * math.pi * s

    def pull(n):
        tau = standard_potential(t + n)
        w = complex(tau) - lam_log + shift
        for _ in range(n):
            if w.real <= 0 and abs(w.imag) <= tol.critical_gap * abs(w):
                raise SingularHit(f"ray at potential {t} passes through the asymptotic value")
            w = cmath.log(w) - lam_log + shift
        return w, tau

    n = 0
    while True:
        try:
            w, tau = pull(n)
        except OverflowGuard:
            if n == 0:
                raise
            return prev
        if tau >= 40:
            try:
                w2, _ = pull(n + 1)
            except OverflowGuard:
                return w
            if abs(w2 - w) <= 1e-9 * max(1.0, abs(w)):
                return w2
        prev = w
        n += 1
        if n > 64:
            raise NoConvergence(f"exponential tail did not settle at potential {t}")


def trace_ray(m, comb: Combinatorics, t_hi: float, t_lo: float, step: float = None,
              tol: Tolerances = DEFAULT) -> RayCurve:
    _check_comb(m, comb)
    step = tol.ray_step if step is None else step
    per, ts = _grid(t_hi, t_lo, step)
    if m.name == "quadratic":
        zs = _quadratic_ray(m, comb, t_hi, per, len(ts), tol)
    else:
        zs = np.array([_exp_sample(m, comb.entry, t, tol) for t in ts], dtype=np.complex128)
        jumps = np.abs(np.diff(zs.imag))
        if len(jumps) and jumps.max() > math.pi / 2:
            k = int(np.argmax(jumps))
            raise BranchLoss(f"ray jumps across a logarithm branch between potentials {ts[k]} and {ts[k + 1]}")
    curve = RayCurve(m, comb, ts, zs, 0.0, step)
    try:
        curve.invariance_residual = invariance_residual(curve)
    except NoUnitPairs:
        curve.invariance_residual = 0.0
    return curve


def ray_point(m, comb, t, tol: Tolerances = DEFAULT) -> complex:
    """``gamma(t)`` alone (the cheapest route to a single sample)."""
    _check_comb(m, comb)
    if m.name == "quadratic":
        return complex(_quadratic_ray(m, comb, t, 8, 1, tol)[0])
    return _exp_sample(m, comb.entry, t, tol)


def invariance_residual(r: RayCurve) -> float:
    """Max of ``|f(gamma(t)) - gamma(t+1)|`` over unit-separated sample pairs.

    Exponential rays reach astronomically large values, so there the defect
    is measured relative to ``max(1, |gamma(t+1)|)``.
    """
    index = {round(float(t) * 2**20): k for k, t in enumerate(r.t)}
    worst, pairs = 0.0, 0
    relative = r.member.name == "exponential"
    for k, t in enumerate(r.t):
        j = index.get(round((float(t) + 1) * 2**20))
        if j is None:
            continue
        z = complex(r.z[k])
        if relative and z.real > r.member.tol.exp_overflow:
            continue
        d = abs(complex(r.member.eval(z)) - complex(r.z[j]))
        if relative:
            d /= max(1.0, abs(complex(r.z[j])))
        worst = max(worst, d)
        pairs += 1
    if pairs == 0:
        raise NoUnitPairs("no sample pair is one potential unit apart")
    return worst


# ---------------------------------------------------------------------------
# landing


def _fit(x, z, model):
    """Least-squares fit of complex samples ``z`` at abscissae ``x`` (increasing depth)."""
    zr = np.concatenate([z.real, z.imag])
    L0 = z[-1]

    if model == "algebraic":
        def resid(p):
            L = p[0] + 1j * p[1]
            A = p[2] + 1j * p[3]
            shift, q = p[4], p[5]
            v = L + A * np.abs(x + shift) ** (-q)
            return np.concatenate([v.real, v.imag]) - zr

        best = None
        for q0 in (0.5, 1.0, 2.0):
            for s0 in (1.0, 5.0, 20.0):
                A0 = (z[0] - L0) * s0**q0
                p0 = [L0.real, L0.imag, A0.real, A0.imag, s0 - x[0], q0]
                sol = least_squares(resid, p0, method="lm", max_nfev=4000, xtol=1e-15, ftol=1e-15)
                if best is None or sol.cost < best.cost:
                    best = sol
        p = best.x
        return p[0] + 1j * p[1], float(np.sqrt(2 * best.cost / len(x)))

    def resid(p):
        L = p[0] + 1j * p[1]
        A = p[2] + 1j * p[3]
        q = p[4] + 1j * p[5]
        v = L + A * q ** (x - x[0])
        return np.concatenate([v.real, v.imag]) - zr

    d = np.diff(z)
    q0 = d[-1] / d[-2] if abs(d[-2]) > 0 else 0.5
    if not np.isfinite(q0) or abs(q0) >= 1:
        q0 = 0.5
    A0 = z[0] - L0
    sol = least_squares(resid, [L0.real, L0.imag, A0.real, A0.imag, q0.real, q0.imag],
                        method="lm", max_nfev=4000, xtol=1e-15, ftol=1e-15)
    p = sol.x
    if abs(p[4] + 1j * p[5]) >= 1:
        return complex(np.nan, np.nan), math.inf
    return p[0] + 1j * p[1], float(np.sqrt(2 * sol.cost / len(x)))


def extrapolate(t, z, window: int = 10):
    """Limit of ``z(t)`` as ``t -> -inf`` from unit-spaced samples.

    Fits an algebraic model ``L + A (x + x0)**-q`` (parabolic approach) and a
    geometric model ``L + A q**x`` (hyperbolic approach) on the deepest
    ``window`` samples, keeps the better fit, and measures the uncertainty
    as the discrepancy against the same fit one sample shallower.
    """
    order = np.argsort(-np.asarray(t, dtype=float))
    t = np.asarray(t, dtype=float)[order]
    z = np.asarray(z, dtype=np.complex128)[order]
    if len(t) < 9:
        raise NoConvergence("landing extrapolation needs at least 9 unit-spaced samples")
    d = np.abs(np.diff(z))
    tail = d[-min(len(d), window):]
    if tail[-1] > tail[0] * 1.0001 and tail[-1] > 1e-14:
        raise Diverging("ray samples are not contracting")
    x = -t
    k = min(len(t), window)
    results = {}
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for model in ("algebraic", "geometric"):
            L1, r1 = _fit(x[-k:], z[-k:], model)
            results[model] = (r1, L1)
        model = min(results, key=lambda key: results[key][0])
        r1, L1 = results[model]
        L2, _ = _fit(x[-k - 1 : -1], z[-k - 1 : -1], model) if len(t) > k else (L1, 0)
    unc = abs(L1 - L2) if np.isfinite(abs(L2)) else math.inf
    return complex(L1), float(unc), model


def landing_estimate(r: RayCurve, window: int = 10):
    """``(z_land, uncertainty)`` from the unit-spaced samples of ``r``."""
    t = np.asarray(r.t, dtype=float)
    t0 = t[0]
    mask = np.abs((t0 - t) - np.round(t0 - t)) < 1e-9
    if mask.sum() <= window:
        raise TooFewSamples(f"need {window + 1} unit-spaced samples, have {int(mask.sum())}")
    z_land, unc, _ = extrapolate(t[mask], np.asarray(r.z)[mask], window)
    return z_land, unc
