"""Isoperimetric ratio, Tong inradius, elasticity, and homogeneity verdicts.

A one-parameter family is homogeneous exactly when its isoperimetric ratio
Q = A^d / V^(d-1) is constant; equivalently the change-of-variable curve
equals d V/A plus a constant, and V, A are powers of a common linear
dimension.  ``classify`` tests all three characterizations numerically.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict
from typing import Sequence

import numpy as np

from .calculus import InradiusCurve, inradius_by_quadrature
from .errors import DomainError
from .families import FamilySpec
from .inequalities import kappa


def isoperimetric_ratio(d: int, v: float, a: float) -> float:
    """Q = A^d / V^(d-1); scale-invariant, minimized by balls at d^d * kappa_d."""
    if d < 2:
        raise DomainError("d must be >= 2")
    if v <= 0 or a <= 0:
        raise DomainError("V and A must be positive")
    return a**d / v ** (d - 1)


def tong_inradius(d: int, v: float, a: float) -> float:
    """r = d V / A, the distinguished linear dimension of a homogeneous family."""
    if v <= 0 or a <= 0:
        raise DomainError("V and A must be positive")
    return d * v / a


@dataclass(frozen=True)
class HomogeneityReport:
    family_id: str
    grid: tuple[float, ...]
    q_values: tuple[float, ...]
    q_center: float
    q_rel_spread: float
    verdict: str  # "homogeneous" | "not_homogeneous"
    criterion_i_residual: float
    criterion_ii_residual: float
    criterion_iii_residual: float
    k_constant: float
    rtol: float

    @property
    def homogeneous(self) -> bool:
        return self.verdict == "homogeneous"

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def classify(family: FamilySpec, grid: Sequence[float], rtol: float = 1e-8) -> HomogeneityReport:
    """Three-way homogeneity classification over a sample grid.

    The verdict is driven by the relative spread of Q about its median.  The
    other two characterizations are evaluated as cross-check residuals:
    (i) the quadrature curve minus d V/A is constant (offset fitted as the
    median), (ii) A^d is proportional to V^(d-1) with the fitted constant,
    (iii) A / V^((d-1)/d) is constant.
    """
    grid = np.asarray(grid, dtype=float)
    if len(grid) < 32:
        raise DomainError("classification grid must have at least 32 points")
    if rtol <= 0:
        raise DomainError("rtol must be positive")
    for g in grid:
        family.require_inside(g)

    d = family.dimension
    v = np.array([family.volume(s) for s in grid])
    a = np.array([family.area(s) for s in grid])
    q = a**d / v ** (d - 1)
    q_center = float(np.median(q))
    q_rel_spread = float(np.max(np.abs(q - q_center)) / q_center)

    # (i) r_quad(s) - d V/A constant
    curve = inradius_by_quadrature(family, float(grid[0]), 0.0, grid)
    r_tong = d * v / a
    offsets = curve.r - r_tong
    c_star = float(np.median(offsets))
    res_i = float(np.max(np.abs(offsets - c_star)))

    # (ii) A^d = k V^(d-1) with k the fitted Q center
    res_ii = float(np.max(np.abs(a**d - q_center * v ** (d - 1)) / (q_center * v ** (d - 1))))

    # (iii) phi = V^(1/d); A / phi^(d-1) constant
    k2 = a / v ** ((d - 1) / d)
    k2c = float(np.median(k2))
    res_iii = float(np.max(np.abs(k2 - k2c)) / k2c)

    verdict = "homogeneous" if q_rel_spread <= rtol else "not_homogeneous"
    report = HomogeneityReport(
        family_id=family.id,
        grid=tuple(float(g) for g in grid),
        q_values=tuple(float(x) for x in q),
        q_center=q_center,
        q_rel_spread=q_rel_spread,
        verdict=verdict,
        criterion_i_residual=res_i,
        criterion_ii_residual=res_ii,
        criterion_iii_residual=res_iii,
        k_constant=q_center,
        rtol=float(rtol),
    )
    floor = d**d * kappa(d)
    if q_center < floor * (1.0 - 1e-9):
        raise DomainError(
            f"isoperimetric ratio {q_center} below the ball floor {floor}; "
            "volume/area evaluators are inconsistent"
        )
    return report


def elasticity(family: FamilySpec, curve: InradiusCurve, s: float) -> float:
    """Proportional volume change per proportional change of the curve variable.

    e = r(s) A(s) / V(s) with r taken from the supplied (anchored) curve;
    equals the dimension d exactly for homogeneous families, but is
    anchor-dependent for non-homogeneous ones.
    """
    family.require_inside(s)
    r = curve.interpolate(s)
    if r <= 0:
        raise DomainError(
            f"r({s}) = {r} <= 0 for anchor C={curve.anchor_value_C}; "
            "elasticity is anchor-dependent, pick an anchor with positive r"
        )
    return r * family.area(s) / family.volume(s)


def constant_area_check(family: FamilySpec, grid: Sequence[float], rtol: float = 1e-10) -> bool:
    """True iff A is constant on the grid; then r - V/A must also be constant."""
    grid = np.asarray(grid, dtype=float)
    if len(grid) < 32:
        raise DomainError("grid must have at least 32 points")
    a = np.array([family.area(s) for s in grid])
    ac = float(np.median(a))
    if np.max(np.abs(a - ac)) / ac > rtol:
        return False
    curve = inradius_by_quadrature(family, float(grid[0]), 0.0, grid)
    v = np.array([family.volume(s) for s in grid])
    diff = curve.r - v / a
    spread = float(np.max(diff) - np.min(diff))
    scale = float(np.max(np.abs(curve.r))) + 1e-30
    if spread > max(1e-8, 100.0 * rtol) * scale:
        raise DomainError(
            "A is constant but r - V/A failed to be constant; quadrature inconsistency"
        )
    return True
