import math

import numpy as np
import pytest

import oracles
from petal import Circle, Combinatorics, FamilyId, defect, landing_report, rouche_check, solve_at_potential
from petal.errors import DomainError, NoZeroInTrustRegion, TooFewSamples
from petal.param_ray import ParameterRay, _derivative, real_seed, trace_parameter_ray, winding_estimate
from petal.config import DEFAULT

QUAD = FamilyId("quadratic")
EXP = FamilyId("exponential")
ZERO = Combinatorics.external_angle(0)
ADDR0 = Combinatorics.external_address([0])


def test_defect_zero_on_ray_and_signed_off_it():
    t = -2.0
    a = oracles.quadratic_parameter(t)
    assert abs(defect(QUAD, ZERO, a, t)) < 1e-8
    d = defect(QUAD, ZERO, a + 0.05, t)
    assert abs(d.imag) < 1e-12 and abs(d.real) > 1e-4


@pytest.mark.parametrize("t", [1.0, -1.5, -4.0])
def test_solver_matches_quadratic_oracle(t):
    want = oracles.quadratic_parameter(t)
    a, res, how = solve_at_potential(QUAD, ZERO, t, want * (1 + 1e-3))
    assert abs(a - want) < 1e-8 and res <= 1e-8 and how == "newton"


@pytest.mark.parametrize("t", [0.5, -3.0])
def test_solver_matches_exponential_oracle(t):
    want = oracles.exponential_parameter(t)
    a, res, _ = solve_at_potential(EXP, ADDR0, t, want + 1e-3)
    assert abs(a - want) < 1e-8 and res <= 1e-8


def test_winding_and_newton_agree():
    t = -1.0
    seed = oracles.quadratic_parameter(t) + 0.002 + 0.001j
    a_n, _, _ = solve_at_potential(QUAD, ZERO, t, seed, method="newton")
    a_w, _, how = solve_at_potential(QUAD, ZERO, t, seed, method="winding")
    assert how == "winding" and abs(a_n - a_w) < 1e-10
    assert abs(winding_estimate(QUAD, ZERO, t, seed) - a_n) < 1e-6


def test_no_zero_in_trust_region():
    # Gamma(-1) is near 0.76; the trust disk around 0.5 holds no solution
    with pytest.raises(NoZeroInTrustRegion):
        solve_at_potential(QUAD, ZERO, -1.0, 0.5, method="winding")


def test_ray_lost_beyond_parameter_ray():
    from petal.errors import RayLost

    # for c = 2.5 the dynamic ray breaks at the critical point above potential -1
    with pytest.raises(RayLost):
        defect(QUAD, ZERO, 2.5, -1.0)


def test_rouche_at_accepted_step():
    # the defect and its linearization at the solution bound each other on a small circle
    t = -1.0
    a, _, _ = solve_at_potential(QUAD, ZERO, t, oracles.quadratic_parameter(t))
    f = lambda x: defect(QUAD, ZERO, complex(x), t)
    slope = _derivative(f, a, DEFAULT)
    g = lambda x: slope * (x - a)
    assert rouche_check(f, g, Circle(a, 1e-3, 32))


def test_real_seed():
    assert abs(real_seed(QUAD, ZERO, 0.0) - oracles.quadratic_parameter(0.0)) < 1e-9
    with pytest.raises(DomainError):
        real_seed(QUAD, Combinatorics.external_angle(0.5), 0.0)


def test_short_trace_quadratic():
    pr = trace_parameter_ray(QUAD, ZERO, 1, -3, 0.5)
    assert len(pr.t) == 9
    for t, a in zip(pr.t, pr.a):
        assert abs(a - oracles.quadratic_parameter(t)) < 1e-8
    assert all(np.diff(np.real(pr.a)) < 0)
    rows = pr.to_rows()
    assert rows[0][4] in ("newton", "winding") and len(rows[0]) == 5


def test_trace_validation():
    with pytest.raises(DomainError):
        trace_parameter_ray(QUAD, ZERO, -1, 1)
    with pytest.raises(DomainError):
        trace_parameter_ray(QUAD, ZERO, 1, -1, 0)


def test_landing_report_constant_ray():
    pr = ParameterRay(QUAD, ZERO, [float(-k) for k in range(12)], [0.25 + 0j] * 12, [0.0] * 12, ["newton"] * 12)
    rep = landing_report(pr, 0.25)
    assert rep["monotone"] and rep["limit"] == [0.25, 0.0] and max(rep["distances"]) == 0


def test_landing_report_too_few():
    pr = ParameterRay(QUAD, ZERO, [0.0, -1.0], [0.3 + 0j, 0.28 + 0j], [0, 0], ["newton"] * 2)
    with pytest.raises(TooFewSamples):
        landing_report(pr, 0.25)
