"""Catalog of parametric region families with closed-form volume/area functions.

One-parameter families are :class:`FamilySpec` instances: a dimension ``d``,
an open interval of parameters, and evaluators for volume and surface area
(for plane figures: area and perimeter, which play the roles of volume and
area throughout).  Multi-parameter shape classes are
:class:`NParamFamilySpec` instances over a product of open intervals.

Built-in families carry analytic derivatives of the volume function where
available, so downstream quadrature is not polluted by differentiation error.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import DomainError

Interval = tuple[float, float]

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class FamilySpec:
    """A one-parameter smooth family of compact regions.

    ``volume`` must be strictly monotone on ``domain`` (split non-monotone
    families with :func:`isolab.calculus.monotone_partition` first) and both
    evaluators must be finite and positive strictly inside the interval.
    For ``dimension == 2`` the evaluators are the area and the perimeter.
    """

    id: str
    dimension: int
    domain: Interval
    volume: Callable[[float], float]
    area: Callable[[float], float]
    params: Mapping[str, float] = field(default_factory=dict)
    dvolume: Callable[[float], float] | None = None  # analytic V'(s), optional

    def __post_init__(self):
        if self.dimension < 2:
            raise DomainError(f"dimension must be >= 2, got {self.dimension}")
        lo, hi = self.domain
        if not lo < hi:
            raise DomainError(f"empty domain ({lo}, {hi})")

    def contains(self, s: float) -> bool:
        lo, hi = self.domain
        return lo < s < hi

    def require_inside(self, s: float) -> None:
        if not self.contains(s):
            raise DomainError(
                f"parameter {s} outside open domain {self.domain} of family {self.id!r}"
            )

    def catalog_entry(self) -> dict:
        return {
            "id": self.id,
            "dimension": self.dimension,
            "domain": [self.domain[0], self.domain[1]],
            "params": dict(self.params),
        }


def evaluate(family: FamilySpec, s: float) -> tuple[float, float]:
    """Return (V, A) at parameter ``s`` strictly inside the family's domain."""
    family.require_inside(s)
    return family.volume(s), family.area(s)


@dataclass(frozen=True)
class NParamFamilySpec:
    """An n-parameter smooth family over a product of open intervals.

    ``homogeneous_prefix_m`` marks that V and A are homogeneous of degrees
    d and d-1 in the first m coordinates.  ``feasible`` encodes extra open
    constraints beyond the box (e.g. the ring torus needs center radius
    strictly larger than tube radius); ``boundary_distance`` is a scale-free
    distance to the domain boundary used to classify boundary infima, and
    ``sample_box`` is a finite box used to draw multistart points.
    """

    id: str
    dimension: int
    domain: tuple[Interval, ...]
    volume: Callable[[np.ndarray], float]
    area: Callable[[np.ndarray], float]
    params: Mapping[str, float] = field(default_factory=dict)
    homogeneous_prefix_m: int | None = None
    feasible: Callable[[np.ndarray], bool] | None = None
    boundary_distance: Callable[[np.ndarray], float] | None = None
    sample_box: tuple[Interval, ...] | None = None

    @property
    def nparams(self) -> int:
        return len(self.domain)

    def contains(self, x: np.ndarray) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.nparams,):
            return False
        for xi, (lo, hi) in zip(x, self.domain):
            if not lo < xi < hi:
                return False
        if self.feasible is not None and not self.feasible(x):
            return False
        return True

    def require_inside(self, x: np.ndarray) -> None:
        if not self.contains(np.asarray(x, dtype=float)):
            raise DomainError(
                f"point {np.asarray(x).tolist()} outside domain of class {self.id!r}"
            )

    def distance_to_boundary(self, x: np.ndarray) -> float:
        """Scale-free distance from ``x`` to the domain boundary."""
        x = np.asarray(x, dtype=float)
        if self.boundary_distance is not None:
            return float(self.boundary_distance(x))
        dists = []
        for xi, (lo, hi) in zip(x, self.domain):
            scale = abs(xi) + 1.0
            if math.isfinite(lo):
                dists.append((xi - lo) / scale)
            if math.isfinite(hi):
                dists.append((hi - xi) / scale)
        return float(min(dists)) if dists else math.inf

    def catalog_entry(self) -> dict:
        return {
            "id": self.id,
            "dimension": self.dimension,
            "domain": [[lo, hi] for lo, hi in self.domain],
            "params": dict(self.params),
        }


def as_nparam(family: FamilySpec) -> NParamFamilySpec:
    """View a one-parameter family as a 1-dimensional shape class."""
    lo, hi = family.domain
    width = (hi - lo) if math.isfinite(hi) else 10.0
    return NParamFamilySpec(
        id=family.id,
        dimension=family.dimension,
        domain=(family.domain,),
        volume=lambda x: family.volume(float(x[0])),
        area=lambda x: family.area(float(x[0])),
        params=family.params,
        sample_box=((lo + 0.05 * width, lo + 0.95 * width),),
    )


# ------------------------------------------------------------------ #
# Built-in one-parameter families
# ------------------------------------------------------------------ #


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise DomainError(msg)


def _cube() -> FamilySpec:
    return FamilySpec(
        id="cube",
        dimension=3,
        domain=(0.0, math.inf),
        volume=lambda s: s**3,
        area=lambda s: 6.0 * s**2,
        dvolume=lambda s: 3.0 * s**2,
    )


def _disk() -> FamilySpec:
    return FamilySpec(
        id="disk",
        dimension=2,
        domain=(0.0, math.inf),
        volume=lambda s: math.pi * s**2,
        area=lambda s: 2.0 * math.pi * s,
        dvolume=lambda s: 2.0 * math.pi * s,
    )


def _ball() -> FamilySpec:
    return FamilySpec(
        id="ball",
        dimension=3,
        domain=(0.0, math.inf),
        volume=lambda s: 4.0 / 3.0 * math.pi * s**3,
        area=lambda s: 4.0 * math.pi * s**2,
        dvolume=lambda s: 4.0 * math.pi * s**2,
    )


def _rect_fixed_length(a: float = 1.0) -> FamilySpec:
    _require(a > 0, "rect_fixed_length needs a > 0")
    return FamilySpec(
        id="rect_fixed_length",
        dimension=2,
        domain=(0.0, math.inf),
        volume=lambda s: a * s,
        area=lambda s: 2.0 * s + 2.0 * a,
        params={"a": a},
        dvolume=lambda s: a,
    )


def _rect_similar(k: float = 0.5) -> FamilySpec:
    _require(0.0 < k < 1.0, "rect_similar needs k in (0, 1)")
    return FamilySpec(
        id="rect_similar",
        dimension=2,
        domain=(0.0, math.inf),
        volume=lambda s: k * s**2,
        area=lambda s: 2.0 * s + 2.0 * k * s,
        params={"k": k},
        dvolume=lambda s: 2.0 * k * s,
    )


def _rhombus_area(a: float, s: float) -> float:
    return s * math.sqrt(a**2 - s**2 / 4.0)


def _rhombus_darea(a: float, s: float) -> float:
    return (a**2 - s**2 / 2.0) / math.sqrt(a**2 - s**2 / 4.0)


def _rhombus(a: float = 1.0, branch: str | None = None) -> FamilySpec:
    _require(a > 0, "rhombus needs side a > 0")
    if branch not in ("increasing", "decreasing"):
        raise DomainError(
            "rhombus is monotone only on its two branches; pass "
            "branch='increasing' (diagonal in (0, sqrt(2)a)) or "
            "branch='decreasing' (diagonal in (sqrt(2)a, 2a))"
        )
    dom = (0.0, SQRT2 * a) if branch == "increasing" else (SQRT2 * a, 2.0 * a)
    return FamilySpec(
        id=f"rhombus_{branch}",
        dimension=2,
        domain=dom,
        volume=lambda s: _rhombus_area(a, s),
        area=lambda s: 4.0 * a,
        params={"a": a},
        dvolume=lambda s: _rhombus_darea(a, s),
    )


def rhombus_branches(a: float = 1.0) -> tuple[FamilySpec, FamilySpec]:
    """The two monotone branches of the fixed-side rhombus family."""
    return _rhombus(a, "increasing"), _rhombus(a, "decreasing")


def _hexagon_sides(s: float) -> tuple[float, float, float]:
    return 1.0, s**2, (s + 1.0) ** 2


def _hexagon_120() -> FamilySpec:
    # hexagon with all inner angles 2*pi/3 and side lengths a, b, c, a, b, c
    def area(s: float) -> float:
        a, b, c = _hexagon_sides(s)
        return SQRT3 / 2.0 * (a * b + b * c + c * a)

    def perim(s: float) -> float:
        a, b, c = _hexagon_sides(s)
        return 2.0 * (a + b + c)

    def darea(s: float) -> float:
        # A(s) = (sqrt(3)/2) (s^2 + s + 1)^2
        return SQRT3 * (s**2 + s + 1.0) * (2.0 * s + 1.0)

    return FamilySpec(
        id="hexagon_120",
        dimension=2,
        domain=(0.0, math.inf),
        volume=area,
        area=perim,
        dvolume=darea,
    )


def _ngon(n: int = 6) -> FamilySpec:
    n = int(n)
    _require(n >= 3, "ngon needs n >= 3")
    half = math.pi / n
    return FamilySpec(
        id=f"ngon_{n}",
        dimension=2,
        domain=(0.0, math.inf),  # circumradius
        volume=lambda s: 0.5 * n * math.sin(2.0 * half) * s**2,
        area=lambda s: 2.0 * n * math.sin(half) * s,
        params={"n": float(n)},
        dvolume=lambda s: n * math.sin(2.0 * half) * s,
    )


# ------------------------------------------------------------------ #
# Built-in n-parameter shape classes
# ------------------------------------------------------------------ #

RPLUS: Interval = (0.0, math.inf)


def _triangle_sides() -> NParamFamilySpec:
    def area(x):
        a, b, c = x
        p = 0.5 * (a + b + c)
        return math.sqrt(max(p * (p - a) * (p - b) * (p - c), 0.0))

    def feasible(x):
        a, b, c = x
        return a + b > c and b + c > a and a + c > b

    def bdist(x):
        a, b, c = x
        scale = a + b + c
        return min(a + b - c, b + c - a, a + c - b, a, b, c) / scale

    return NParamFamilySpec(
        id="triangle_sides",
        dimension=2,
        domain=(RPLUS, RPLUS, RPLUS),
        volume=area,
        area=lambda x: float(x[0] + x[1] + x[2]),
        feasible=feasible,
        boundary_distance=bdist,
        sample_box=((0.3, 3.0),) * 3,
    )


def _right_triangle() -> NParamFamilySpec:
    return NParamFamilySpec(
        id="right_triangle",
        dimension=2,
        domain=(RPLUS, RPLUS),
        volume=lambda x: 0.5 * x[0] * x[1],
        area=lambda x: x[0] + x[1] + math.hypot(x[0], x[1]),
        sample_box=((0.3, 3.0),) * 2,
    )


def _box3() -> NParamFamilySpec:
    return NParamFamilySpec(
        id="box3",
        dimension=3,
        domain=(RPLUS, RPLUS, RPLUS),
        volume=lambda x: x[0] * x[1] * x[2],
        area=lambda x: 2.0 * (x[0] * x[1] + x[1] * x[2] + x[2] * x[0]),
        homogeneous_prefix_m=3,
        sample_box=((0.3, 3.0),) * 3,
    )


def _cylinder() -> NParamFamilySpec:
    return NParamFamilySpec(
        id="cylinder",
        dimension=3,
        domain=(RPLUS, RPLUS),  # (radius, height)
        volume=lambda x: math.pi * x[0] ** 2 * x[1],
        area=lambda x: 2.0 * math.pi * x[0] ** 2 + 2.0 * math.pi * x[0] * x[1],
        homogeneous_prefix_m=2,
        sample_box=((0.3, 3.0),) * 2,
    )


def _cone() -> NParamFamilySpec:
    # total surface area: lateral plus base disk
    return NParamFamilySpec(
        id="cone",
        dimension=3,
        domain=(RPLUS, RPLUS),  # (base radius, height)
        volume=lambda x: math.pi / 3.0 * x[0] ** 2 * x[1],
        area=lambda x: math.pi * x[0] ** 2
        + math.pi * x[0] * math.hypot(x[0], x[1]),
        homogeneous_prefix_m=2,
        sample_box=((0.3, 3.0),) * 2,
    )


def _square_pyramid() -> NParamFamilySpec:
    # total surface area: four slant faces plus square base
    return NParamFamilySpec(
        id="square_pyramid",
        dimension=3,
        domain=(RPLUS, RPLUS),  # (base side, height)
        volume=lambda x: x[0] ** 2 * x[1] / 3.0,
        area=lambda x: x[0] ** 2
        + 2.0 * x[0] * math.sqrt(x[1] ** 2 + x[0] ** 2 / 4.0),
        homogeneous_prefix_m=2,
        sample_box=((0.3, 3.0),) * 2,
    )


def _ring_torus() -> NParamFamilySpec:
    # x = (tube radius rho1, center radius rho2); formulas valid for rho2 > rho1
    def bdist(x):
        return (x[1] - x[0]) / x[1]

    return NParamFamilySpec(
        id="ring_torus",
        dimension=3,
        domain=(RPLUS, RPLUS),
        volume=lambda x: 2.0 * math.pi**2 * x[0] ** 2 * x[1],
        area=lambda x: 4.0 * math.pi**2 * x[0] * x[1],
        homogeneous_prefix_m=2,
        feasible=lambda x: x[1] > x[0],
        boundary_distance=bdist,
        sample_box=((0.3, 1.0), (1.1, 3.0)),
    )


def _parallelogram3() -> NParamFamilySpec:
    return NParamFamilySpec(
        id="parallelogram3",
        dimension=2,
        domain=(RPLUS, RPLUS, (0.0, math.pi)),  # (side, side, angle)
        volume=lambda x: x[0] * x[1] * math.sin(x[2]),
        area=lambda x: 2.0 * x[0] + 2.0 * x[1],
        homogeneous_prefix_m=2,
        sample_box=((0.3, 3.0), (0.3, 3.0), (0.2, math.pi - 0.2)),
    )


def _rect2() -> NParamFamilySpec:
    return NParamFamilySpec(
        id="rect2",
        dimension=2,
        domain=(RPLUS, RPLUS),  # (length, width)
        volume=lambda x: x[0] * x[1],
        area=lambda x: 2.0 * x[0] + 2.0 * x[1],
        homogeneous_prefix_m=2,
        sample_box=((0.3, 3.0),) * 2,
    )


_ONE_PARAM_BUILTINS: dict[str, Callable[..., FamilySpec]] = {
    "cube": _cube,
    "disk": _disk,
    "ball": _ball,
    "rect_fixed_length": _rect_fixed_length,
    "rect_similar": _rect_similar,
    "rhombus": _rhombus,
    "hexagon_120": _hexagon_120,
    "ngon": _ngon,
}

_NPARAM_BUILTINS: dict[str, Callable[[], NParamFamilySpec]] = {
    "triangle_sides": _triangle_sides,
    "right_triangle": _right_triangle,
    "box3": _box3,
    "cylinder": _cylinder,
    "cone": _cone,
    "square_pyramid": _square_pyramid,
    "ring_torus": _ring_torus,
    "parallelogram3": _parallelogram3,
    "rect2": _rect2,
}

_REGISTRY: dict[str, FamilySpec | NParamFamilySpec] = {}


def builtin(id: str, **params) -> FamilySpec | NParamFamilySpec:
    """Construct a built-in family or shape class by id.

    Raises :class:`DomainError` for unknown ids or parameters out of range.
    """
    if id in _ONE_PARAM_BUILTINS:
        return _ONE_PARAM_BUILTINS[id](**params)
    if id in _NPARAM_BUILTINS:
        if params:
            raise DomainError(f"class {id!r} takes no parameters")
        return _NPARAM_BUILTINS[id]()
    raise DomainError(f"unknown built-in family {id!r}")


def builtin_ids() -> list[str]:
    return sorted(_ONE_PARAM_BUILTINS) + sorted(_NPARAM_BUILTINS)


def register(spec: FamilySpec | NParamFamilySpec) -> None:
    """Register a user-defined family; setup-time only, not thread-safe."""
    _REGISTRY[spec.id] = spec


def lookup(id: str, **params) -> FamilySpec | NParamFamilySpec:
    """Resolve a registered family, falling back to the built-in catalog."""
    if id in _REGISTRY:
        return _REGISTRY[id]
    return builtin(id, **params)


def catalog_json(extra: Sequence[FamilySpec | NParamFamilySpec] = ()) -> str:
    """The family catalog as a JSON array of ``{id, dimension, domain, params}``."""
    default_params = {
        "rect_fixed_length": {"a": 1.0},
        "rect_similar": {"k": 0.5},
        "rhombus": {"a": 1.0, "branch": "increasing"},
        "ngon": {"n": 6},
    }
    entries = []
    for fid in sorted(_ONE_PARAM_BUILTINS):
        entries.append(builtin(fid, **default_params.get(fid, {})).catalog_entry())
    for fid in sorted(_NPARAM_BUILTINS):
        entries.append(builtin(fid).catalog_entry())
    for spec in extra:
        entries.append(spec.catalog_entry())
    return json.dumps(entries, indent=2)
