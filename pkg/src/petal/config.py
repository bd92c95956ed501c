"""Tolerance profile and runtime switches.

Every numeric threshold used by the library lives here so a run can be
reproduced from one JSON document.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field


def use_numba() -> bool:
    """Numba kernels are on unless ``PETAL_NO_NUMBA`` is set to a truthy value."""
    flag = os.environ.get("PETAL_NO_NUMBA", "").strip().lower()
    return flag not in ("1", "true", "yes", "on")


def threads() -> int:
    try:
        n = int(os.environ.get("PETAL_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


@dataclass
class Tolerances:
    # family
    exp_overflow: float = 700.0
    parameter_radius: float = 4.0
    # contour
    contour_floor: float = 1e-12
    winding_residual: float = 0.01
    node_cap: int = 4096
    quadrature_gate: float = 1e-10
    # fixed points
    newton_iters: int = 50
    newton_tol: float = 1e-13
    fixed_residual: float = 1e-10
    coalesced: float = 1e-12
    # fatou
    petal_scale: float = 10.0
    series_terms: int = 12
    fatou_tol: float = 1e-12
    abel_tol: float = 1e-7
    max_iter: int = 1_000_000
    koenigs_radius: float = 0.05
    koenigs_order: int = 10
    horn_samples: int = 8
    horn_height: float = 20.0
    horn_anchor: float = 0.5
    gate_samples: int = 20
    constancy_tol: float = 1e-6
    horn_refine_tol: float = 1e-4
    mu_tol: float = 1e-3
    # rays
    escape_radius: float = 1e8
    escape_iter: int = 10_000
    ray_step: float = 0.125
    invariance_tol: float = 1e-8
    critical_gap: float = 1e-6
    address_bound: int = 10
    # parameter rays
    defect_tol: float = 1e-8
    min_step: float = 1e-3
    fd_step: float = 1e-7

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "Tolerances":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown tolerance keys: {sorted(unknown)}")
        tol = cls(**data)
        for f in dataclasses.fields(tol):
            if getattr(tol, f.name) <= 0:
                raise ValueError(f"tolerance {f.name} must be positive")
        return tol


DEFAULT = Tolerances()
