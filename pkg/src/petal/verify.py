"""Self-check suites run by ``petal verify``.

Each suite returns a list of ``Check`` records; a suite passes when every
check does.  ``replay`` re-validates a CSV previously written by the CLI.
"""

from __future__ import annotations

import cmath
import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .contour import Circle, count_zeros, integrate_circle_report, locate_single_zero, sum_fixed_points
from .errors import ContractViolation, DomainError, PetalError
from .family import FamilyId, FamilyMember, Model, base_member, member
from .fatou import DouadyFatou, _petal_samples, parabolic_chart, phase_B
from .fixed_points import default_disk
from .io import PARAM_HEADER, RAY_HEADER, read_csv
from .param_ray import defect
from .rays import Combinatorics, RayCurve, invariance_residual, ray_point, trace_ray


@dataclass
class Check:
    name: str
    value: float
    bound: float
    ok: bool = None
    note: str = ""

    def __post_init__(self):
        if self.ok is None:
            self.ok = bool(math.isfinite(self.value) and self.value <= self.bound)

    def to_json(self):
        return {"name": self.name, "value": self.value, "bound": self.bound, "ok": self.ok, "note": self.note}


def _guarded(name, bound, fn):
    try:
        return fn()
    except PetalError as exc:
        return Check(name, math.inf, bound, False, f"{exc.code}: {exc}")


MULTIPLIER_GRID = [r * cmath.exp(1j * math.pi / k) for r in (0.02, 0.05, 0.1) for k in (6, 4, 3)]


def multiplier_phase(tol: Tolerances = DEFAULT):
    out = []
    for lam in MULTIPLIER_GRID:
        name = f"mu-phase lambda={lam:.6g}"

        def one(lam=lam, name=name):
            pb = phase_B(member("normalized", lam, tol=tol), tol)
            err = abs(cmath.exp(-2j * math.pi / pb.value) - (1 + 2 * lam))
            ok = err <= tol.mu_tol and pb.value.real < 0
            return Check(name, err, tol.mu_tol, ok, f"B={pb.value:.12g}")

        out.append(_guarded(name, tol.mu_tol, one))
    return out


def contour_suite(tol: Tolerances = DEFAULT, seed: int = 20240601):
    rng = np.random.default_rng(seed)
    out = []
    C = Circle(0j, 1.0, 64)
    bad = 0
    for k in range(20):
        deg = int(rng.integers(1, 7))
        roots = rng.uniform(-1.6, 1.6, deg) + 1j * rng.uniform(-1.6, 1.6, deg)
        # keep roots off the contour so the count is well posed
        roots = np.where(np.abs(np.abs(roots) - 1) < 0.05, roots * 0.8, roots)
        coef = np.poly(roots)
        f = lambda z, c=coef: np.polyval(c, z)
        fp = lambda z, c=np.polyder(coef): np.polyval(c, z)
        want = int(np.sum(np.abs(roots) < 1))
        got = count_zeros(f, fp, C, tol)
        bad += got != want
    out.append(Check("zero counts on 20 random polynomials", float(bad), 0.0))
    z_star = 0.3 - 0.2j
    f = lambda z: (z - z_star) * (z + 2.5)
    fp = lambda z: 2 * z + 2.5 - z_star
    got = locate_single_zero(f, fp, Circle(0j, 1.0, 64), tol)
    out.append(Check("single-zero location", abs(got - z_star), 1e-8))
    g = lambda w: np.exp(w) / (w - 0.2)
    v1 = integrate_circle_report(g, Circle(0j, 1.0, 256), tol, adaptive=False)[0]
    v2 = integrate_circle_report(g, Circle(0j, 1.0, 512), tol, adaptive=False)[0]
    out.append(Check("node-doubling stability", abs(v1 - v2), tol.quadrature_gate))
    return out


SIGMA_LAMBDAS = [r * cmath.exp(2j * math.pi * th) for r in (0.01, 0.05) for th in (-0.2, -0.1, 0.0, 0.1, 0.2)]


def sigma_suite(tol: Tolerances = DEFAULT):
    out = []
    for lam in SIGMA_LAMBDAS:
        m = member("normalized", lam, tol=tol)
        s = sum_fixed_points(m, default_disk(m, tol), tol)
        out.append(Check(f"sigma lambda={lam:.6g}", abs(s + 2 * lam), 1e-10))
    for c in (0.2, 0.24 + 0.01j, 0.3 - 0.05j):
        m = member("quadratic", c, tol=tol)
        s = sum_fixed_points(m, default_disk(m, tol), tol)
        out.append(Check(f"vieta c={c}", abs(s - 1), 1e-10))
    return out


def abel_suite(tol: Tolerances = DEFAULT):
    out = []
    for name in ("normalized", "quadratic", "exponential"):
        m = base_member(name, tol=tol)
        for side in ("incoming", "outgoing"):
            label = f"abel {name} {side}"

            def one(m=m, side=side, label=label):
                ch = parabolic_chart(m, side, tol)
                return Check(label, ch.abel_residual(_petal_samples(ch, 50)), tol.abel_tol)

            out.append(_guarded(label, tol.abel_tol, one))
    mob = Model("mobius", tol=tol)
    err = 0.0
    for side in ("incoming", "outgoing"):
        ch = parabolic_chart(mob, side, tol)
        err = max(err, max(abs(ch(w) + 1 / w) for w in _petal_samples(ch, 50)))
    out.append(Check("mobius exact", err, 1e-10))
    label = "gate constancy lambda=0.05+0.05i"

    def gate():
        df = DouadyFatou(member("normalized", 0.05 + 0.05j, tol=tol), tol)
        spread, _ = df.gate_constancy()
        return Check(label, spread, tol.constancy_tol)

    out.append(_guarded(label, tol.constancy_tol, gate))
    for side in ("outgoing", "incoming"):
        lab = f"douady abel {side} lambda=0.05+0.05i"

        def dres(side=side, lab=lab):
            df = DouadyFatou(member("normalized", 0.05 + 0.05j, tol=tol), tol)
            return Check(lab, df.abel_residual(side), tol.abel_tol)

        out.append(_guarded(lab, tol.abel_tol, dres))
    return out


def ray_invariance_suite(tol: Tolerances = DEFAULT):
    out = []
    zero = Combinatorics.external_angle(0)
    # |gamma| <= e**4 here; above t = 3 float64 rounding of gamma itself exceeds 1e-12
    r0 = trace_ray(member("quadratic", 0, tol=tol), zero, 3, -5, tol.ray_step, tol)
    out.append(Check("invariance c=0", r0.invariance_residual, 1e-12))
    ident = max(abs(z - cmath.exp(2 ** (t - 1))) for t, z in zip(r0.t, r0.z) if t <= 3)
    out.append(Check("potential identity c=0", ident, 1e-12))
    cases = [
        ("quadratic", 0.25, zero),
        ("quadratic", -0.5 + 0.3j, zero),
        ("exponential", 0.2, Combinatorics.external_address([0])),
        ("exponential", math.exp(-1), Combinatorics.external_address([0])),
    ]
    for name, a, comb in cases:
        lab = f"invariance {name} a={a:.6g}"

        def one(name=name, a=a, comb=comb, lab=lab):
            r = trace_ray(member(name, a, tol=tol), comb, 5, -5, tol.ray_step, tol)
            return Check(lab, r.invariance_residual, tol.invariance_tol)

        out.append(_guarded(lab, tol.invariance_tol, one))
    return out


def landing_suite(tol: Tolerances = DEFAULT):
    out = []
    cases = [("quadratic", Combinatorics.external_angle(0)), ("exponential", Combinatorics.external_address([0]))]
    for name, comb in cases:
        m = base_member(name, tol=tol)
        z0 = m.id.z0
        ts = [float(t) for t in range(-5, -16, -1)]
        d = [abs(ray_point(m, comb, t, tol) - z0) for t in ts]
        mono = all(b < a for a, b in zip(d, d[1:]))
        out.append(Check(f"landing {name} monotone", 0.0 if mono else 1.0, 0.0))
        out.append(Check(f"landing {name} |gamma(-15)-z0|", d[-1], 5e-2))
    return out


SUITES = {
    "multiplier-phase": multiplier_phase,
    "contour": contour_suite,
    "sigma": sigma_suite,
    "abel": abel_suite,
    "ray-invariance": ray_invariance_suite,
    "landing": landing_suite,
}


def run_suite(name: str, tol: Tolerances = DEFAULT):
    if name == "all":
        return [c for key in SUITES for c in SUITES[key](tol)]
    if name not in SUITES:
        raise DomainError(f"unknown suite {name!r}")
    return SUITES[name](tol)


def _sidecar(path):
    side = os.path.splitext(path)[0] + ".json"
    if not os.path.exists(side):
        raise ContractViolation(f"missing sidecar {side}")
    with open(side, encoding="utf-8") as fh:
        return json.load(fh)


def _comb_from_json(data):
    if "angle" in data:
        return Combinatorics.external_angle(__import__("fractions").Fraction(data["angle"]))
    return Combinatorics.external_address(data["address"])


def replay(path, tol: Tolerances = DEFAULT):
    """Re-parse an emitted CSV and re-check its module invariants."""
    header, rows = read_csv(path)
    meta = _sidecar(path)
    comb = _comb_from_json(meta["comb"])
    if header == RAY_HEADER:
        m = FamilyMember.from_json(meta["member"], tol)
        t = np.array([float(r[0]) for r in rows])
        z = np.array([complex(float(r[1]), float(r[2])) for r in rows])
        curve = RayCurve(m, comb, t, z, step=meta.get("step", 0.0))
        res = invariance_residual(curve)
        bound = 1e-12 if m.name == "quadratic" and m.a == 0 else tol.invariance_tol
        return [Check("replay invariance", res, bound)]
    if header == PARAM_HEADER:
        fid = FamilyId(meta["family"]["family"], meta["family"].get("n", 1))
        worst = 0.0
        for r in rows:
            a = complex(float(r[1]), float(r[2]))
            worst = max(worst, abs(defect(fid, comb, a, float(r[0]), tol)))
        return [Check("replay defect", worst, tol.defect_tol)]
    raise ContractViolation(f"unrecognized CSV header {header}")
