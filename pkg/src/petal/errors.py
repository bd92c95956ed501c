"""Exception hierarchy shared by every module.

Each error carries a short machine-readable ``code`` so the CLI can emit
structured diagnostics without string matching.
"""


class PetalError(Exception):
    code = "petal_error"

    def to_dict(self):
        return {"error": self.code, "message": str(self)}


class OverflowGuard(PetalError):
    code = "overflow_guard"


class DomainError(PetalError):
    code = "domain_error"


class NonFiniteSample(PetalError):
    code = "non_finite_sample"


class ZeroOnContour(PetalError):
    code = "zero_on_contour"


class NonIntegerWinding(PetalError):
    code = "non_integer_winding"


class WrongZeroCount(PetalError):
    code = "wrong_zero_count"


class CoalescedPair(PetalError):
    code = "coalesced_pair"


class NotAFixedPoint(PetalError):
    code = "not_a_fixed_point"


class SectorViolation(PetalError):
    code = "sector_violation"


class ParabolicInput(PetalError):
    code = "parabolic_input"


class DegenerateQuadraticTerm(PetalError):
    code = "degenerate_quadratic_term"


class DegreeTwoCover(PetalError):
    """Fixed points swap along a loop around the base parameter."""

    code = "degree_two_cover"


class NotNormalized(PetalError):
    code = "not_normalized"


class NotInPetal(PetalError):
    code = "not_in_petal"


class NoConvergence(PetalError):
    code = "no_convergence"


class BranchLoss(PetalError):
    code = "branch_loss"


class IndifferentMultiplier(PetalError):
    code = "indifferent_multiplier"


class HornDomainMiss(PetalError):
    code = "horn_domain_miss"


class NonEscaping(PetalError):
    code = "non_escaping"


class CombNotFixed(PetalError):
    code = "comb_not_fixed"


class SingularHit(PetalError):
    code = "singular_hit"


class NoUnitPairs(PetalError):
    code = "no_unit_pairs"


class Diverging(PetalError):
    code = "diverging"


class RayLost(PetalError):
    code = "ray_lost"


class NoZeroInTrustRegion(PetalError):
    code = "no_zero_in_trust_region"


class MultipleZeros(PetalError):
    code = "multiple_zeros"


class ContinuationStalled(PetalError):
    code = "continuation_stalled"


class TooFewSamples(PetalError):
    code = "too_few_samples"


class ContractViolation(PetalError):
    """An emitted artifact breaks one of its invariants."""

    code = "contract_violation"
