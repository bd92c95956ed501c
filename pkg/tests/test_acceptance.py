"""Acceptance criteria 1-8.

Each test prints a single ``[PASS]``/``[FAIL]`` line for its criterion before
asserting, so ``pytest -v -s`` (or running this file directly) gives a one
line verdict per criterion.  Oracles come from ``tests/oracles.py``.
"""

import cmath
import math
import time

import numpy as np
import pytest

import oracles
from petal import (
    Circle,
    Combinatorics,
    DouadyFatou,
    FamilyId,
    Model,
    base_member,
    count_zeros,
    locate_single_zero,
    member,
    parabolic_chart,
    phase_B,
    ray_point,
    sum_fixed_points,
    trace_parameter_ray,
    trace_ray,
)
from petal.contour import integrate_circle_report
from petal.fatou import _petal_samples
from petal.fixed_points import default_disk
from petal.param_ray import landing_report

ZERO = Combinatorics.external_angle(0)
ADDR0 = Combinatorics.external_address([0])


def report(n, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}"
    print(line, flush=True)
    return line


@pytest.fixture
def say(capsys):
    def _say(n, ok, detail):
        with capsys.disabled():
            print()
            report(n, ok, detail)

    return _say


def _param_ray_criterion(fid, comb, oracle, a0, budget):
    t0 = time.perf_counter()
    pr = trace_parameter_ray(fid, comb, 1, -12, 1.0)
    elapsed = time.perf_counter() - t0
    a = np.array(pr.a)
    want = np.array([oracle(t) for t in pr.t])
    rep = landing_report(pr, a0)
    facts = {
        "samples": len(a) >= 13,
        "real": bool(np.all(np.abs(a.imag) <= 1e-8)),
        "decreasing": bool(np.all(np.diff(a.real) < 0)),
        "residual": max(pr.residual) <= 1e-8,
        "oracle": float(np.max(np.abs(a - want))) <= 1e-8,
        "landing": rep["limit_error"] <= 1e-2,
        "runtime": elapsed < budget,
    }
    detail = (
        f"{len(a)} samples, oracle err {np.max(np.abs(a - want)):.2e}, max residual {max(pr.residual):.2e}, "
        f"landing err {rep['limit_error']:.2e}, {elapsed:.1f}s"
    )
    failed = [k for k, v in facts.items() if not v]
    return not failed, detail + (f" (failed: {', '.join(failed)})" if failed else "")


def test_criterion_1_quadratic_parameter_ray(say):
    ok, detail = _param_ray_criterion(FamilyId("quadratic"), ZERO, oracles.quadratic_parameter, 0.25, 60)
    say(1, ok, "quadratic angle-0 parameter ray: " + detail)
    assert ok, detail


def test_criterion_2_exponential_parameter_ray(say):
    ok, detail = _param_ray_criterion(FamilyId("exponential"), ADDR0, oracles.exponential_parameter, math.exp(-1), 120)
    say(2, ok, "exponential address-0 parameter ray: " + detail)
    assert ok, detail


def test_criterion_3_multiplier_phase(say):
    t0 = time.perf_counter()
    worst, all_neg = 0.0, True
    for r in (0.02, 0.05, 0.1):
        for k in (6, 4, 3):
            lam = r * cmath.exp(1j * math.pi / k)
            B = phase_B(member("normalized", lam)).value
            worst = max(worst, abs(cmath.exp(-2j * math.pi / B) - (1 + 2 * lam)))
            all_neg &= B.real < 0
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-3 and all_neg and elapsed < 60
    say(3, ok, f"max |exp(-2 pi i/B) - (1+2 lambda)| = {worst:.2e}, Re B < 0: {all_neg}, {elapsed:.1f}s")
    assert ok


def test_criterion_4_abel_contracts(say):
    worst = 0.0
    for name in ("normalized", "quadratic", "exponential"):
        for side in ("incoming", "outgoing"):
            ch = parabolic_chart(base_member(name), side)
            worst = max(worst, ch.abel_residual(_petal_samples(ch, 50)))
    df = DouadyFatou(member("normalized", 0.05 + 0.05j))
    spread, diffs = df.gate_constancy()
    douady = max(df.abel_residual("outgoing"), df.abel_residual("incoming"))
    mob = Model("mobius")
    exact = 0.0
    for side in ("incoming", "outgoing"):
        ch = parabolic_chart(mob, side)
        exact = max(exact, max(abs(ch(w) + 1 / w) for w in _petal_samples(ch, 50)))
    ok = worst <= 1e-7 and douady <= 1e-7 and spread <= 1e-6 and len(diffs) == 20 and exact <= 1e-10
    say(
        4,
        ok,
        f"parabolic Abel residual {worst:.2e}, perturbed {douady:.2e}, gate spread {spread:.2e}, Moebius {exact:.2e}",
    )
    assert ok


def test_criterion_5_sigma_integral(say):
    worst = 0.0
    lams = [r * cmath.exp(2j * math.pi * th) for r in (0.01, 0.05) for th in (-0.2, -0.1, 0.0, 0.1, 0.2)]
    for lam in lams:
        m = member("normalized", lam)
        worst = max(worst, abs(sum_fixed_points(m, default_disk(m)) + 2 * lam))
    vieta = 0.0
    for c in (0.2, 0.24 + 0.01j, 0.3 - 0.05j):
        m = member("quadratic", c)
        vieta = max(vieta, abs(sum_fixed_points(m, default_disk(m)) - 1))
    ok = worst <= 1e-10 and vieta <= 1e-10 and len(lams) == 10
    say(5, ok, f"sigma + 2 lambda over 10 lambdas {worst:.2e}, Vieta {vieta:.2e}")
    assert ok


def test_criterion_6_contour_suite(say):
    rng = np.random.default_rng(7)
    C = Circle(0j, 1.0, 64)
    wrong = 0
    for _ in range(20):
        deg = int(rng.integers(1, 8))
        coef = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        roots = np.roots(coef)
        if np.any(np.abs(np.abs(roots) - 1) < 0.02):
            coef = np.poly(roots * 0.9)
            roots = np.roots(coef)
        want = int(np.sum(np.abs(roots) < 1))
        got = count_zeros(lambda z, c=coef: np.polyval(c, z), lambda z, c=np.polyder(coef): np.polyval(c, z), C)
        wrong += got != want
    z_star = -0.25 + 0.4j
    loc = locate_single_zero(lambda z: (z - z_star) * (z - 3), lambda z: 2 * z - 3 - z_star, Circle(0j, 1.0, 256))
    g = lambda w: np.cos(w) / (w + 0.1j)
    v1 = integrate_circle_report(g, Circle(0j, 1.0, 256), adaptive=False)[0]
    v2 = integrate_circle_report(g, Circle(0j, 1.0, 512), adaptive=False)[0]
    ok = wrong == 0 and abs(loc - z_star) <= 1e-8 and abs(v1 - v2) <= 1e-10
    say(6, ok, f"{20 - wrong}/20 counts exact, location err {abs(loc - z_star):.2e}, doubling {abs(v1 - v2):.2e}")
    assert ok


def test_criterion_7_ray_invariance(say):
    curves = [
        (trace_ray(member("quadratic", 0), ZERO, 3, -5, 0.125), 1e-12),
        (trace_ray(member("quadratic", 0), ZERO, 3, 0.1, 0.1), 1e-12),
        (trace_ray(member("quadratic", 0.25), ZERO, 4, -10, 0.25), 1e-8),
        (trace_ray(member("quadratic", -0.5 + 0.3j), ZERO, 4, -10, 0.25), 1e-8),
        (trace_ray(member("exponential", 0.2), ADDR0, 5, -5, 0.125), 1e-8),
        (trace_ray(member("exponential", math.exp(-1)), ADDR0, 5, -10, 0.25), 1e-8),
    ]
    inv_ok = all(r.invariance_residual <= b for r, b in curves)
    worst = max(r.invariance_residual for r, _ in curves)
    r0 = curves[0][0]
    # potential normalization: gamma(t) = exp(2**(t-1)), equal to e**t at t = 1, 2
    ident = max(abs(z - oracles.c0_ray(t)) for t, z in zip(r0.t, r0.z))
    e_t = max(abs(r0.z[list(r0.t).index(t)] - math.exp(t)) for t in (1.0, 2.0))
    ok = inv_ok and ident <= 1e-12 and e_t <= 1e-12
    say(7, ok, f"max invariance residual {worst:.2e}, c=0 identity {ident:.2e}, gamma(t)=e^t at t=1,2 {e_t:.2e}")
    assert ok


def test_criterion_8_dynamic_ray_landing(say):
    parts, ok = [], True
    for m, comb in ((base_member("quadratic"), ZERO), (base_member("exponential"), ADDR0)):
        d = [abs(ray_point(m, comb, float(t)) - m.id.z0) for t in range(-5, -16, -1)]
        mono = all(b < a for a, b in zip(d, d[1:]))
        ok &= mono and d[-1] <= 5e-2
        parts.append(f"{m.name}: monotone {mono}, |gamma(-15) - z0| = {d[-1]:.3g}")
    say(8, ok, "; ".join(parts) + " (bound 5e-2)")
    assert ok


if __name__ == "__main__":
    import inspect
    import sys

    def plain(n, ok, detail):
        report(n, ok, detail)

    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_") and inspect.isfunction(fn):
            try:
                fn(plain)
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
