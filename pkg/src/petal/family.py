"""The closed catalog of one-parameter families.

Three variants, each with a parabolic base parameter ``a0`` whose map has a
fixed point ``z0`` of multiplier 1:

* ``normalized``: ``(1 + 2 lam**n) z + z**2`` at ``lam = 0``, ``z0 = 0``
* ``quadratic``: ``z**2 + c`` at ``c = 1/4``, ``z0 = 1/2``
* ``exponential``: ``lam * exp(z)`` at ``lam = 1/e``, ``z0 = 1``
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .config import DEFAULT, Tolerances
from .errors import DomainError, OverflowGuard

FAMILIES = ("normalized", "quadratic", "exponential")

_BASE = {
    "normalized": (0j, 0j),
    "quadratic": (0.25 + 0j, 0.5 + 0j),
    "exponential": (complex(math.exp(-1.0)), 1 + 0j),
}


@dataclass(frozen=True)
class FamilyId:
    name: str
    n: int = 1

    def __post_init__(self):
        if self.name not in FAMILIES:
            raise DomainError(f"unknown family {self.name!r}; expected one of {FAMILIES}")
        if self.name == "normalized" and self.n != 1:
            raise DomainError("only n = 1 is supported for the normalized family")
        if self.n < 1:
            raise DomainError("n must be a positive integer")

    @property
    def a0(self) -> complex:
        return _BASE[self.name][0]

    @property
    def z0(self) -> complex:
        return _BASE[self.name][1]

    def member(self, a, tol: Tolerances = DEFAULT) -> "FamilyMember":
        return FamilyMember(self, complex(a), tol)


@dataclass(frozen=True)
class FamilyMember:
    id: FamilyId
    a: complex
    tol: Tolerances = DEFAULT

    def __post_init__(self):
        a = complex(self.a)
        if not (math.isfinite(a.real) and math.isfinite(a.imag)):
            raise DomainError("parameter must be finite")
        if abs(a - self.id.a0) > self.tol.parameter_radius:
            raise DomainError(
                f"parameter {a} outside the disk of radius "
                f"{self.tol.parameter_radius} around {self.id.a0}"
            )
        if self.id.name == "exponential" and a == 0:
            raise DomainError("lambda = 0 is not a transcendental map")
        object.__setattr__(self, "a", a)

    # -- map spec understood by the kernels --------------------------------
    @property
    def kernel_spec(self):
        """``(kind, p0, p1)`` for the compiled orbit kernels."""
        name, a = self.id.name, self.a
        if name == "quadratic":
            return K.QUADRATIC, 0j, a
        if name == "exponential":
            return K.EXPONENTIAL, a, 0j
        return K.QUADRATIC, 1 + 2 * a ** self.id.n, 0j

    @property
    def name(self):
        return self.id.name

    def _guard(self, z):
        if self.id.name == "exponential":
            re = np.real(z)
            if np.any(re > self.tol.exp_overflow):
                raise OverflowGuard(
                    f"Re z = {np.max(re):.6g} exceeds the exponential guard {self.tol.exp_overflow}"
                )

    def eval(self, z):
        self._guard(z)
        name, a = self.id.name, self.a
        if name == "quadratic":
            return z * z + a
        if name == "exponential":
            return a * np.exp(z)
        return (1 + 2 * a ** self.id.n) * z + z * z

    def deriv(self, z):
        self._guard(z)
        name, a = self.id.name, self.a
        if name == "quadratic":
            return 2 * z
        if name == "exponential":
            return a * np.exp(z)
        return (1 + 2 * a ** self.id.n) + 2 * z

    def taylor(self, z: complex, order: int) -> list:
        """``[f(z), f'(z), f''(z)/2!, ...]`` up to ``order``."""
        z = complex(z)
        name = self.id.name
        if name == "exponential":
            self._guard(z)
            v = self.a * cmath.exp(z)
            return [v / math.factorial(k) for k in range(order + 1)]
        out = [complex(self.eval(z)), complex(self.deriv(z)), 1 + 0j]
        out += [0j] * (order - 2)
        return out[: order + 1]

    def singular_value(self) -> complex:
        name, a = self.id.name, self.a
        if name == "quadratic":
            return a
        if name == "exponential":
            return 0j
        return -((1 + 2 * a ** self.id.n) ** 2) / 4

    def inverse_branch(self, z_fixed: complex):
        """Kernel branch index of the inverse that fixes ``z_fixed``."""
        kind, p0, p1 = self.kernel_spec
        if kind == K.QUADRATIC:
            r = cmath.sqrt(p0 * p0 - 4 * p1 + 4 * z_fixed)
            return 1 + 0j if abs(r - (2 * z_fixed + p0)) <= abs(r + (2 * z_fixed + p0)) else -1 + 0j
        # exponential: z = Log(z/lam) + 2 pi i k
        k = round(((z_fixed - cmath.log(z_fixed / p0)) / (2j * math.pi)).real)
        return complex(k)

    def to_json(self) -> dict:
        return {"family": self.id.name, "n": self.id.n, "a_re": self.a.real, "a_im": self.a.imag}

    @classmethod
    def from_json(cls, data: dict, tol: Tolerances = DEFAULT) -> "FamilyMember":
        try:
            fid = FamilyId(data["family"], int(data.get("n", 1)))
            return fid.member(complex(float(data["a_re"]), float(data.get("a_im", 0.0))), tol)
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed family member: {exc}") from None


def member(name: str, a, n: int = 1, tol: Tolerances = DEFAULT) -> FamilyMember:
    return FamilyId(name, n).member(a, tol)


def base_member(name: str, n: int = 1, tol: Tolerances = DEFAULT) -> FamilyMember:
    fid = FamilyId(name, n)
    return fid.member(fid.a0, tol)


class Model:
    """A map outside the catalog with the same interface as ``FamilyMember``.

    Used for exactly solvable reference dynamics: the Moebius map
    ``w/(1-w)`` (exact Fatou coordinate ``-1/w``) and linear maps ``mu*z``.
    """

    def __init__(self, kind: str, mu: complex = 1.0, tol: Tolerances = DEFAULT):
        if kind not in ("mobius", "linear"):
            raise DomainError(f"unknown model {kind!r}")
        self.kind = kind
        self.mu = complex(mu)
        self.tol = tol
        self.a = self.mu
        self.id = FamilyId("normalized")  # base point 0, only z0 is used

    name = property(lambda self: self.kind)

    @property
    def kernel_spec(self):
        if self.kind == "mobius":
            return K.MOBIUS, 0j, 0j
        return K.LINEAR, self.mu, 0j

    def eval(self, z):
        return z / (1 - z) if self.kind == "mobius" else self.mu * z

    def deriv(self, z):
        return 1 / (1 - z) ** 2 if self.kind == "mobius" else self.mu + 0 * z

    def taylor(self, z, order):
        z = complex(z)
        if self.kind == "linear":
            return ([self.mu * z, self.mu] + [0j] * order)[: order + 1]
        # w/(1-w) = -1 + 1/(1-w); derivatives k!/(1-w)^{k+1}
        out = [z / (1 - z)] + [1 / (1 - z) ** (k + 1) for k in range(1, order + 1)]
        return out

    def singular_value(self):
        return -1 + 0j if self.kind == "mobius" else 0j

    def inverse_branch(self, z_fixed):
        return 1 + 0j

    def to_json(self):
        return {"model": self.kind, "mu_re": self.mu.real, "mu_im": self.mu.imag}
