"""Star-like polyhedra: pyramid decompositions, weighted-mean identities,
support-function volume, circumscribing checks, cylinder lifting, and outer
parallel bodies.

A :class:`StarPolyhedron` is a 2D polygon or 3D polyhedron whose facets all
subtend positive-altitude pyramids from an interior apex.  Decomposing into
those pyramids shows that d V / A is simultaneously the area-weighted
arithmetic mean and the volume-weighted harmonic mean of the pyramid
altitudes, independent of the apex choice.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, GeometryError
from .families import FamilySpec

PLANARITY_RTOL = 1e-9
CONVEXITY_RTOL = 1e-9


def _bbox_diagonal(vertices: np.ndarray) -> float:
    return float(np.linalg.norm(vertices.max(axis=0) - vertices.min(axis=0)))


def _polygon_area_2d(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _newell_normal(pts: np.ndarray) -> np.ndarray:
    n = np.zeros(3)
    for i in range(len(pts)):
        a, b = pts[i], pts[(i + 1) % len(pts)]
        n += np.cross(a, b)
    return n


def _fan_area_3d(pts: np.ndarray) -> float:
    area = 0.0
    for i in range(1, len(pts) - 1):
        area += 0.5 * float(np.linalg.norm(np.cross(pts[i] - pts[0], pts[i + 1] - pts[0])))
    return area


@dataclass(frozen=True)
class StarPolyhedron:
    """Polygon (d=2) or polyhedron (d=3) star-like with respect to ``apex``.

    Facets list vertex indices; in 2D each facet is an edge, in 3D a planar
    polygon with vertices counterclockwise viewed from outside.  Validation
    checks planarity, positive facet measure, outward orientation, and that
    the apex lies strictly on the inner side of every facet hyperplane.
    """

    dimension: int
    vertices: np.ndarray
    facets: tuple[tuple[int, ...], ...]
    apex: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vertices", np.asarray(self.vertices, dtype=float))
        object.__setattr__(self, "apex", np.asarray(self.apex, dtype=float))
        object.__setattr__(self, "facets", tuple(tuple(int(i) for i in f) for f in self.facets))
        if self.dimension not in (2, 3):
            raise GeometryError("only dimensions 2 and 3 are supported")
        if self.vertices.ndim != 2 or self.vertices.shape[1] != self.dimension:
            raise GeometryError("vertex array shape does not match dimension")
        if self.apex.shape != (self.dimension,):
            raise GeometryError("apex shape does not match dimension")
        if not self.facets:
            raise GeometryError("polyhedron has no facets")
        self._validate()

    # facet plane data: unit outward normal and offset c with n.x = c on the plane
    def facet_planes(self) -> list[tuple[np.ndarray, float]]:
        planes = []
        for idx, facet in enumerate(self.facets):
            pts = self.vertices[list(facet)]
            if self.dimension == 2:
                if len(facet) != 2:
                    raise GeometryError(f"facet {idx}: 2D facets are edges of 2 vertices")
                e = pts[1] - pts[0]
                length = np.linalg.norm(e)
                if length <= 0:
                    raise GeometryError(f"facet {idx}: zero-length edge")
                n = np.array([e[1], -e[0]]) / length
            else:
                if len(facet) < 3:
                    raise GeometryError(f"facet {idx}: 3D facets need >= 3 vertices")
                n = _newell_normal(pts)
                nn = np.linalg.norm(n)
                if nn <= 0:
                    raise GeometryError(f"facet {idx}: degenerate facet")
                n = n / nn
            planes.append((n, float(n @ pts[0])))
        return planes

    def _validate(self) -> None:
        diag = _bbox_diagonal(self.vertices)
        if diag <= 0:
            raise GeometryError("degenerate vertex set")
        tol = PLANARITY_RTOL * diag
        for idx, (facet, (n, c)) in enumerate(zip(self.facets, self.facet_planes())):
            pts = self.vertices[list(facet)]
            if self.dimension == 3:
                worst = float(np.max(np.abs(pts @ n - c)))
                if worst > tol:
                    raise GeometryError(
                        f"facet {idx}: non-planar (max deviation {worst:.3e} > {tol:.3e})"
                    )
                if _fan_area_3d(pts) <= tol * diag:
                    raise GeometryError(f"facet {idx}: vanishing area")
            # star-likeness: apex strictly on the inner side
            dist = c - float(n @ self.apex)
            if dist <= tol:
                raise GeometryError(
                    f"facet {idx}: apex is not strictly interior "
                    f"(signed distance {dist:.3e})"
                )

    def facet_measures(self) -> np.ndarray:
        out = []
        for facet in self.facets:
            pts = self.vertices[list(facet)]
            if self.dimension == 2:
                out.append(float(np.linalg.norm(pts[1] - pts[0])))
            else:
                out.append(_fan_area_3d(pts))
        return np.array(out)

    def with_apex(self, apex: Sequence[float]) -> "StarPolyhedron":
        return StarPolyhedron(self.dimension, self.vertices, self.facets, np.asarray(apex))

    def to_json(self) -> str:
        return json.dumps(
            {
                "dimension": self.dimension,
                "vertices": self.vertices.tolist(),
                "facets": [list(f) for f in self.facets],
                "apex": self.apex.tolist(),
            }
        )


def from_json(text: str) -> StarPolyhedron:
    """Parse and validate the polyhedron JSON format."""
    try:
        doc = json.loads(text)
        return StarPolyhedron(
            dimension=int(doc["dimension"]),
            vertices=np.asarray(doc["vertices"], dtype=float),
            facets=tuple(tuple(f) for f in doc["facets"]),
            apex=np.asarray(doc["apex"], dtype=float),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, GeometryError):
            raise
        raise GeometryError(f"malformed polyhedron document: {exc}") from exc


@dataclass(frozen=True)
class PyramidDecomposition:
    """Per-facet pyramid records (A_i, r_i, V_i = A_i r_i / d) and totals."""

    dimension: int
    facet_measures: np.ndarray  # A_i
    altitudes: np.ndarray  # r_i, apex to facet hyperplane
    pyramid_volumes: np.ndarray  # V_i
    total_area: float
    total_volume: float


def decompose(p: StarPolyhedron) -> PyramidDecomposition:
    """Decompose into pyramids over the facets with apex at p.apex."""
    a_i = p.facet_measures()
    r_i = np.array([c - float(n @ p.apex) for n, c in p.facet_planes()])
    if np.any(r_i <= 0):
        raise GeometryError("apex outside: some pyramid altitude is nonpositive")
    v_i = a_i * r_i / p.dimension
    return PyramidDecomposition(
        dimension=p.dimension,
        facet_measures=a_i,
        altitudes=r_i,
        pyramid_volumes=v_i,
        total_area=float(a_i.sum()),
        total_volume=float(v_i.sum()),
    )


def mean_altitudes(dec: PyramidDecomposition) -> tuple[float, float]:
    """Area-weighted arithmetic and volume-weighted harmonic means of r_i.

    Both equal d V / A for any valid decomposition, whatever the apex.
    """
    a, v = dec.total_area, dec.total_volume
    arith = float(np.sum(dec.facet_measures / a * dec.altitudes))
    harm = 1.0 / float(np.sum(dec.pyramid_volumes / v / dec.altitudes))
    return arith, harm


def support_function(vertices: np.ndarray, u: np.ndarray) -> float:
    """h(u) = max over the vertex set of x . u, for unit u."""
    vertices = np.asarray(vertices, dtype=float)
    u = np.asarray(u, dtype=float)
    if vertices.size == 0:
        raise DomainError("empty vertex set")
    if abs(np.linalg.norm(u) - 1.0) > 1e-12:
        raise DomainError("u must be a unit vector")
    return float(np.max(vertices @ u))


def _check_convex(p: StarPolyhedron) -> None:
    diag = _bbox_diagonal(p.vertices)
    for idx, (n, c) in enumerate(p.facet_planes()):
        excess = float(np.max(p.vertices @ n - c))
        if excess > CONVEXITY_RTOL * diag:
            raise GeometryError(
                f"facet {idx}: vertices beyond the facet plane by {excess:.3e}; not convex"
            )


def volume_from_support(p: StarPolyhedron) -> float:
    """V = (1/d) sum A_i h(u_i) over facet unit normals, for convex p.

    Translation-covariant: the identity holds wherever the origin sits.
    """
    _check_convex(p)
    a_i = p.facet_measures()
    total = 0.0
    for ai, (n, _) in zip(a_i, p.facet_planes()):
        total += ai * support_function(p.vertices, n)
    return total / p.dimension


def cohen_check(p: StarPolyhedron, r: float, incenter: Sequence[float] | None = None) -> float:
    """Relative residual of V = (r/d) A for a circumscribing polytope.

    Every facet hyperplane must lie at distance r from the incenter
    (default: the apex); otherwise the precondition is rejected.
    """
    if r <= 0:
        raise DomainError("inradius r must be positive")
    _check_convex(p)
    center = np.asarray(incenter, dtype=float) if incenter is not None else p.apex
    diag = _bbox_diagonal(p.vertices)
    for idx, (n, c) in enumerate(p.facet_planes()):
        dist = c - float(n @ center)
        if abs(dist - r) > 1e-9 * max(diag, r):
            raise GeometryError(
                f"facet {idx}: hyperplane distance {dist} != claimed inradius {r}; "
                "polytope is not circumscribing"
            )
    dec = decompose(p)
    return abs(dec.total_volume - r / p.dimension * dec.total_area) / dec.total_volume


# ------------------------------------------------------------------ #
# Cylinder lifting
# ------------------------------------------------------------------ #


def lift_cylinder(
    base_family: FamilySpec,
    rho: Callable[[float], float],
    drho: Callable[[float], float] | None = None,
    rtol: float = 1e-8,
    grid_points: int = 48,
) -> FamilySpec:
    """Right cylinders over a homogeneous base family, height 2 rho(s).

    V_d = 2 V_{d-1} rho and A_d = 2 V_{d-1} + 2 A_{d-1} rho; the Tong
    inradius of the result is the (d)-variable symmetric harmonic mean of
    d-1 copies of the base inradius and rho.
    """
    from .homogeneity import classify

    lo, hi = base_family.domain
    width = min(hi - lo, 10.0) if math.isfinite(hi) else 10.0
    grid = np.linspace(lo + 0.05 * width, lo + 0.95 * width, grid_points)
    report = classify(base_family, grid, rtol=rtol)
    if not report.homogeneous:
        raise DomainError(
            f"base family {base_family.id!r} is not homogeneous at rtol={rtol} "
            f"(Q spread {report.q_rel_spread:.3e})"
        )

    vb, ab = base_family.volume, base_family.area
    new_dv = None
    if base_family.dvolume is not None and drho is not None:
        dvb = base_family.dvolume
        new_dv = lambda s: 2.0 * (dvb(s) * rho(s) + vb(s) * drho(s))
    return FamilySpec(
        id=f"{base_family.id}@cylinder",
        dimension=base_family.dimension + 1,
        domain=base_family.domain,
        volume=lambda s: 2.0 * vb(s) * rho(s),
        area=lambda s: 2.0 * vb(s) + 2.0 * ab(s) * rho(s),
        params=base_family.params,
        dvolume=new_dv,
    )


def symmetric_harmonic_mean(values: Sequence[float]) -> float:
    values = np.asarray(values, dtype=float)
    if np.any(values <= 0):
        raise DomainError("harmonic mean needs positive values")
    return len(values) / float(np.sum(1.0 / values))


# ------------------------------------------------------------------ #
# Steiner outer parallel bodies
# ------------------------------------------------------------------ #


def _require_convex_polygon(pts: np.ndarray) -> None:
    if len(pts) < 3:
        raise GeometryError("polygon needs at least 3 vertices")
    if _polygon_area_2d(pts) <= 0:
        raise GeometryError("polygon must be counterclockwise with positive area")
    diag = _bbox_diagonal(pts)
    n = len(pts)
    for i in range(n):
        a, b, c = pts[i], pts[(i + 1) % n], pts[(i + 2) % n]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if cross < -CONVEXITY_RTOL * diag**2:
            raise GeometryError(f"reflex vertex at index {(i + 1) % n}; polygon not convex")


def steiner_coefficients(
    shape: np.ndarray | Sequence[float],
) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Ascending polynomial coefficients of V(s) and A(s) for the parallel body.

    ``shape`` is a convex CCW polygon (N x 2 vertex array) or a 3-tuple of
    box edge lengths.  The coefficient lists satisfy dV/ds = A(s) exactly.
    """
    shape_arr = np.asarray(shape, dtype=float)
    if shape_arr.ndim == 2 and shape_arr.shape[1] == 2:
        _require_convex_polygon(shape_arr)
        area = _polygon_area_2d(shape_arr)
        perim = float(np.sum(np.linalg.norm(np.roll(shape_arr, -1, axis=0) - shape_arr, axis=1)))
        return (area, perim, math.pi), (perim, 2.0 * math.pi)
    if shape_arr.shape == (3,):
        a, b, c = shape_arr
        if min(a, b, c) <= 0:
            raise DomainError("box edge lengths must be positive")
        v = (a * b * c, 2.0 * (a * b + b * c + c * a), math.pi * (a + b + c), 4.0 * math.pi / 3.0)
        da = (2.0 * (a * b + b * c + c * a), 2.0 * math.pi * (a + b + c), 4.0 * math.pi)
        return v, da
    raise DomainError("shape must be an Nx2 polygon vertex array or 3 box edge lengths")


def steiner_parallel_body(shape, s: float) -> tuple[float, float]:
    """(V(s), A(s)) of the outer parallel body at distance s >= 0."""
    if s < 0:
        raise DomainError("parallel-body distance s must be nonnegative")
    vc, ac = steiner_coefficients(shape)
    v = sum(coef * s**i for i, coef in enumerate(vc))
    a = sum(coef * s**i for i, coef in enumerate(ac))
    return float(v), float(a)


# ------------------------------------------------------------------ #
# Constructors and random instances
# ------------------------------------------------------------------ #


def cube_polyhedron(edge: float = 1.0, origin: Sequence[float] = (0.0, 0.0, 0.0)) -> StarPolyhedron:
    o = np.asarray(origin, dtype=float)
    e = float(edge)
    verts = o + e * np.array(
        [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]],
        dtype=float,
    )
    facets = (
        (0, 3, 2, 1),  # bottom, z = 0
        (4, 5, 6, 7),  # top, z = e
        (0, 1, 5, 4),  # y = 0
        (2, 3, 7, 6),  # y = e
        (0, 4, 7, 3),  # x = 0
        (1, 2, 6, 5),  # x = e
    )
    return StarPolyhedron(3, verts, facets, o + e / 2.0)


def regular_tetrahedron(edge: float = 1.0) -> StarPolyhedron:
    # vertices of a regular tetrahedron inscribed in a cube, scaled to the edge
    raw = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    verts = raw * (edge / (2.0 * math.sqrt(2.0)))
    facets = []
    for k in range(4):
        tri = [i for i in range(4) if i != k]
        n = np.cross(verts[tri[1]] - verts[tri[0]], verts[tri[2]] - verts[tri[0]])
        if n @ (verts[k] - verts[tri[0]]) > 0:  # normal must point away from the 4th vertex
            tri[1], tri[2] = tri[2], tri[1]
        facets.append(tuple(tri))
    return StarPolyhedron(3, verts, tuple(facets), np.zeros(3))


def regular_polygon(n: int, circumradius: float = 1.0) -> StarPolyhedron:
    ang = 2.0 * math.pi * np.arange(n) / n
    verts = circumradius * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    facets = tuple((i, (i + 1) % n) for i in range(n))
    return StarPolyhedron(2, verts, facets, np.zeros(2))


def square_polygon(side: float = 1.0) -> StarPolyhedron:
    verts = side * np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    facets = ((0, 1), (1, 2), (2, 3), (3, 0))
    return StarPolyhedron(2, verts, facets, np.array([side / 2.0, side / 2.0]))


def random_interior_point(p: StarPolyhedron, rng: np.random.Generator) -> np.ndarray:
    """A strictly interior point: a random convex combination of the vertices."""
    w = rng.dirichlet(np.ones(len(p.vertices)))
    return w @ p.vertices


def random_convex_polytope(rng: np.random.Generator, npoints: int = 12) -> StarPolyhedron:
    """Convex hull of uniform points in the unit ball, apex at the centroid."""
    from scipy.spatial import ConvexHull

    if npoints < 8:
        raise DomainError("need at least 8 points")
    g = rng.standard_normal((npoints, 3))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    pts = g * rng.uniform(0.0, 1.0, (npoints, 1)) ** (1.0 / 3.0)
    hull = ConvexHull(pts)
    verts = pts[hull.vertices]
    remap = {old: new for new, old in enumerate(hull.vertices)}
    centroid = verts.mean(axis=0)
    facets = []
    for simplex, eq in zip(hull.simplices, hull.equations):
        tri = [remap[i] for i in simplex]
        a, b, c = (pts[i] for i in simplex)
        n = np.cross(b - a, c - a)
        if n @ eq[:3] < 0:  # orient counterclockwise seen from outside
            tri[1], tri[2] = tri[2], tri[1]
        facets.append(tuple(tri))
    return StarPolyhedron(3, verts, tuple(facets), centroid)


def random_convex_polygon(rng: np.random.Generator, npoints: int = 10) -> np.ndarray:
    """CCW vertex array of the hull of uniform points in the unit disk."""
    from scipy.spatial import ConvexHull

    ang = rng.uniform(0.0, 2.0 * math.pi, npoints)
    rad = np.sqrt(rng.uniform(0.0, 1.0, npoints))
    pts = np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)
    hull = ConvexHull(pts)
    return pts[hull.vertices]  # scipy returns 2D hull vertices in CCW order
