"""Numerical toolkit for parabolic bifurcations and landing of parameter rays."""

from . import errors
from .config import DEFAULT, Tolerances
from .contour import (
    Circle,
    count_zeros,
    fixed_point_power_sum,
    integrate_circle,
    locate_single_zero,
    rouche_check,
    sum_fixed_points,
    winding_value,
)
from .family import FamilyId, FamilyMember, Model, base_member, member
from .fatou import (
    DouadyFatou,
    FatouChart,
    KoenigsChart,
    PhaseB,
    douady_fatou,
    horn_normalize,
    incoming_fatou,
    koenigs,
    outgoing_fatou,
    parabolic_chart,
    phase_B,
)
from .fixed_points import (
    FixedPair,
    LambdaCoordinate,
    default_disk,
    detect_case,
    find_pair,
    lambda_coordinate,
    multiplier_at,
    normalize_to_parabolic_form,
)
from .param_ray import ParameterRay, defect, landing_report, solve_at_potential, trace_parameter_ray
from .rays import (
    Combinatorics,
    RayCurve,
    boettcher_potential,
    boettcher_potentials,
    invariance_residual,
    landing_estimate,
    ray_point,
    standard_potential,
    trace_ray,
)

__version__ = "0.1.0"
