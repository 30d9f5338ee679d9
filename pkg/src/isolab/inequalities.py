"""Isoperimetric deficit and Bonnesen-type inequalities with the Tong inradius.

All rows are pure arithmetic in (d, V, A): the deficit A^d - d^d kappa_d
V^(d-1) is nonnegative with equality only for balls, and each Bonnesen row
bounds it from below (or, in the Osserman form, bounds r A from below).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict

from scipy.special import gammaln

from .errors import DomainError

# hybrid comparison tolerance; rows can be exact zeros at equality cases
HOLD_TOL = 1e-12


def kappa(d: int) -> float:
    """Volume of the d-dimensional unit ball, pi^(d/2) / Gamma(d/2 + 1)."""
    if d < 1:
        raise DomainError("d must be >= 1")
    return math.exp(0.5 * d * math.log(math.pi) - gammaln(0.5 * d + 1.0))


def deficit(d: int, v: float, a: float) -> float:
    """Isoperimetric deficit A^d - d^d kappa_d V^(d-1) (2D: P^2 - 4 pi A)."""
    if d < 2:
        raise DomainError("d must be >= 2")
    if v <= 0 or a <= 0:
        raise DomainError("V and A must be positive")
    return a**d - d**d * kappa(d) * v ** (d - 1)


@dataclass(frozen=True)
class InequalityRow:
    name: str
    lhs: float
    rhs: float
    holds: bool
    slack: float


@dataclass(frozen=True)
class InequalityReport:
    dimension: int
    V: float
    A: float
    r_tong: float
    kappa_d: float
    deficit: float
    rows: tuple[InequalityRow, ...]

    @property
    def all_hold(self) -> bool:
        return all(row.holds for row in self.rows)

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def _row(name: str, lhs: float, rhs: float, scale: float = 1.0) -> InequalityRow:
    # scale covers cancellation noise at equality cases (e.g. A^d for deficits)
    tol = HOLD_TOL * max(abs(lhs), abs(rhs), abs(scale), 1.0)
    return InequalityRow(name=name, lhs=lhs, rhs=rhs, holds=lhs >= rhs - tol, slack=lhs - rhs)


def bonnesen_general(d: int, v: float, a: float) -> InequalityReport:
    """The three general-d Bonnesen rows with r the Tong inradius d V / A."""
    if d < 2:
        raise DomainError("d must be >= 2")
    if v <= 0 or a <= 0:
        raise DomainError("V and A must be positive")
    kd = kappa(d)
    r = d * v / a
    dfc = a**d - d**d * kd * v ** (d - 1)
    rows = (
        _row("deficit_vs_area_gap", dfc, (a - d * kd * r ** (d - 1)) ** d, scale=a**d),
        _row("deficit_vs_volume_gap", dfc, (v / r - kd * r ** (d - 1)) ** d, scale=a**d),
        _row("osserman", r * a, v + (d - 1) * kd * r**d, scale=r * a),
    )
    return InequalityReport(
        dimension=d, V=v, A=a, r_tong=r, kappa_d=kd, deficit=dfc, rows=rows
    )


def bonnesen_2d(p: float, a: float, r_inscribed: float) -> InequalityReport:
    """Classical 2D Bonnesen/Osserman rows for any inscribed-circle radius.

    The caller asserts r is the radius of some circle inscribed in the
    figure (or the Tong inradius 2A/P, for which the rows also hold); the
    only sanity bound enforced is r <= P / (2 pi).
    """
    if p <= 0 or a <= 0 or r_inscribed <= 0:
        raise DomainError("P, A, r must be positive")
    if r_inscribed > p / (2.0 * math.pi) * (1.0 + 1e-12):
        raise DomainError("inscribed radius exceeds the isoperimetric radius P/(2 pi)")
    r = r_inscribed
    dfc = p**2 - 4.0 * math.pi * a
    rows = (
        _row("bonnesen_perimeter", dfc, (p - 2.0 * math.pi * r) ** 2, scale=p**2),
        _row("bonnesen_area", dfc, (a / r - math.pi * r) ** 2, scale=p**2),
        _row("osserman", r * p, a + math.pi * r**2, scale=r * p),
    )
    return InequalityReport(
        dimension=2, V=a, A=p, r_tong=2.0 * a / p, kappa_d=math.pi, deficit=dfc, rows=rows
    )
