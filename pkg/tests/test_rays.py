import cmath
import math

import numpy as np
import pytest

import oracles
from petal import Combinatorics, base_member, invariance_residual, landing_estimate, member, ray_point, trace_ray
from petal.errors import BranchLoss, CombNotFixed, SingularHit, Diverging, DomainError, NonEscaping, NoUnitPairs, TooFewSamples
from petal.rays import RayCurve, boettcher_potential, extrapolate, standard_potential

ZERO = Combinatorics.external_angle(0)
ADDR0 = Combinatorics.external_address([0])


def test_boettcher_examples():
    m = member("quadratic", 0)
    assert abs(boettcher_potential(m, math.e) - 1) < 1e-14
    assert abs(boettcher_potential(m, math.exp(0.5)) - 0.5) < 1e-14
    with pytest.raises(NonEscaping):
        boettcher_potential(m, 0.5)


def test_boettcher_matches_escape_oracle():
    m = member("quadratic", -0.4 + 0.6j)
    for z in (1.1, 0.3 + 1.2j, -2.0):
        assert abs(boettcher_potential(m, z) - oracles.green(m.a, z)) < 1e-12


def test_c0_ray_closed_form():
    r = trace_ray(member("quadratic", 0), ZERO, 3, -5, 0.125)
    assert abs(r.z[r.t.tolist().index(1.0)] - math.e) < 1e-12
    for t, z in zip(r.t, r.z):
        assert abs(z - oracles.c0_ray(t)) < 1e-12
    assert r.invariance_residual <= 1e-12
    r = trace_ray(member("quadratic", 0), ZERO, 3, 0.1, 0.1)
    assert r.invariance_residual < 1e-12


@pytest.mark.parametrize("c", [0.25, -0.5 + 0.3j, 0.1 - 0.2j])
def test_quadratic_ray_potentials(c):
    m = member("quadratic", c)
    r = trace_ray(m, ZERO, 4, -3, 0.25)
    assert r.invariance_residual <= 1e-8
    for t, z in list(zip(r.t, r.z))[::4]:
        assert abs(oracles.green(c, complex(z)) - 2.0 ** (t - 1)) < 1e-10 * max(1, 2.0 ** (t - 1))


@pytest.mark.parametrize("lam", [0.2, math.exp(-1), 0.3])
def test_exponential_ray_potentials(lam):
    m = member("exponential", lam)
    r = trace_ray(m, ADDR0, 3, -4, 0.5)
    assert r.invariance_residual <= 1e-8
    for t, z in zip(r.t, r.z):
        assert abs(z.imag) < 1e-12
        assert abs(oracles.exponential_point_potential(lam, z.real) - t) < 1e-8


def test_exponential_other_address_is_invariant():
    r = trace_ray(member("exponential", 0.3), Combinatorics.external_address([1]), 3, -2, 0.5)
    assert r.invariance_residual <= 1e-8
    assert all(z.imag > 0 for z in r.z)


def test_standard_potential_identities():
    assert abs(standard_potential(1.0) - 1.0) < 1e-13
    for t in (-6.0, -0.5, 0.3, 1.4):
        assert abs(standard_potential(t + 1) - math.expm1(standard_potential(t))) < 1e-12 * max(
            1, standard_potential(t + 1)
        )
        assert abs(oracles.abel(standard_potential(t)) - t) < 1e-9


def test_corruption_detected():
    r = trace_ray(member("quadratic", 0.1), ZERO, 3, -3, 0.25)
    z = r.z.copy()
    z[8] += 1e-3
    bad = RayCurve(r.member, r.comb, r.t, z)
    assert invariance_residual(bad) >= 9e-4


def test_no_unit_pairs():
    r = RayCurve(member("quadratic", 0), ZERO, np.array([1.0, 0.5]), np.array([math.e, 1.3]))
    with pytest.raises(NoUnitPairs):
        invariance_residual(r)


def test_combinatorics_checks():
    with pytest.raises(CombNotFixed):
        trace_ray(member("quadratic", 0), Combinatorics.external_angle(1 / 3), 2, 0)
    with pytest.raises(CombNotFixed):
        trace_ray(member("exponential", 0.3), Combinatorics.external_address([0, 1]), 2, 0)
    with pytest.raises(DomainError):
        trace_ray(member("quadratic", 0), ADDR0, 2, 0)
    with pytest.raises(DomainError):
        Combinatorics.external_address([11])
    with pytest.raises(DomainError):
        trace_ray(member("quadratic", 0), ZERO, 2, 0, 0.3)


def test_landing_c0():
    r = trace_ray(member("quadratic", 0), ZERO, 3, -15, 0.5)
    z, unc = landing_estimate(r)
    assert abs(z - 1) < 1e-6


def test_landing_parabolic():
    r = trace_ray(base_member("quadratic"), ZERO, 2, -20, 0.5)
    z, _ = landing_estimate(r)
    assert abs(z - 0.5) < 1e-2
    r = trace_ray(base_member("exponential"), ADDR0, 2, -20, 0.5)
    z, _ = landing_estimate(r)
    assert abs(z - 1) < 1e-2


def test_landing_repelling_fixed_point():
    m = member("quadratic", -0.5 + 0.3j)
    beta = (1 + cmath.sqrt(1 - 4 * m.a)) / 2
    z, unc = landing_estimate(trace_ray(m, ZERO, 2, -15, 0.5))
    assert abs(z - beta) < 1e-6


def test_landing_errors():
    with pytest.raises(TooFewSamples):
        landing_estimate(trace_ray(member("quadratic", 0), ZERO, 3, -3, 0.5))
    t = -np.arange(12.0)
    with pytest.raises(Diverging):
        extrapolate(t, 1.5 ** np.arange(12.0) + 0j)


def test_ray_point_consistent():
    m = member("exponential", 0.3)
    r = trace_ray(m, ADDR0, 2, -2, 0.5)
    assert abs(ray_point(m, ADDR0, -1.0) - r.z[list(r.t).index(-1.0)]) < 1e-12


def test_monotone_approach_to_parabolic_point():
    for m, comb in ((base_member("quadratic"), ZERO), (base_member("exponential"), ADDR0)):
        d = [abs(ray_point(m, comb, float(t)) - m.id.z0) for t in range(-5, -16, -1)]
        assert all(b < a for a, b in zip(d, d[1:]))


def test_sidecar_fields():
    r = trace_ray(member("quadratic", 0), ZERO, 2, 0, 0.5)
    side = r.sidecar()
    assert side["samples"] == 5 and side["comb"] == {"angle": "0"}
    assert r.to_rows()[0] == (2.0, math.exp(2.0), 0.0)


def test_ray_through_singular_value():
    # for these parameters the singular value escapes along the ray itself
    with pytest.raises(SingularHit):
        trace_ray(member("quadratic", 0.5), ZERO, 3, -6, 0.125)
    with pytest.raises(SingularHit):
        trace_ray(member("exponential", 0.9), ADDR0, 3, -4, 0.5)
    with pytest.raises(BranchLoss):
        trace_ray(member("exponential", 0.9 + 0.05j), ADDR0, 3, -4, 0.5)
    # above the singular value's potential the ray is fine
    r = trace_ray(member("exponential", 0.9), ADDR0, 3, -0.5, 0.5)
    assert r.invariance_residual <= 1e-8


@pytest.mark.parametrize("m,comb", [(member("quadratic", 0.2 + 0.1j), ZERO), (member("exponential", 0.3), ADDR0)])
def test_reparametrization_consistency(m, comb):
    coarse = trace_ray(m, comb, 3, -3, 0.25)
    fine = trace_ray(m, comb, 3, -3, 0.125)
    lookup = dict(zip(np.round(fine.t, 9), fine.z))
    for t, z in zip(coarse.t, coarse.z):
        assert abs(lookup[round(t, 9)] - z) <= 1e-9 * max(1.0, abs(z))
