"""Minimizing the isoperimetric ratio over shape classes and tracing its level sets.

Each shape class exposes Q(x) = A(x)^d / V(x)^(d-1) over a box of parameters.
``kmin`` estimates inf Q by multistart simplex search (reporting boundary
infima as unattained), ``trace_level_set`` follows a curve on the
hypersurface Q(x) = k by predictor-corrector continuation (every such curve
is a homogeneous one-parameter family), and ``reduce_homogeneous_prefix``
normalizes away scaling coordinates.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, asdict
from typing import Callable, Mapping

import numpy as np
from scipy import optimize
from scipy.stats import qmc

from .errors import ConvergenceError, DomainError
from .families import FamilySpec, NParamFamilySpec, as_nparam, builtin

_SQRT_EPS = float(np.finfo(float).eps) ** 0.5

BOUNDARY_REL_TOL = 1e-6
STEP_MIN = 1e-6
STEP_MAX = 1e-1


def ratio_function(nfamily: NParamFamilySpec) -> Callable[[np.ndarray], float]:
    """Q over the class domain, +inf outside (so simplex search stays feasible)."""
    d = nfamily.dimension

    def q(x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        if not nfamily.contains(x):
            return math.inf
        v = nfamily.volume(x)
        a = nfamily.area(x)
        if not (math.isfinite(v) and math.isfinite(a) and v > 0 and a > 0):
            return math.inf
        return a**d / v ** (d - 1)

    return q


@dataclass(frozen=True)
class KminResult:
    class_id: str
    kmin: float
    argmin: tuple[float, ...]
    attained: bool
    multistart_count: int

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def _sample_box(nfamily: NParamFamilySpec) -> tuple[tuple[float, float], ...]:
    if nfamily.sample_box is not None:
        return nfamily.sample_box
    box = []
    for lo, hi in nfamily.domain:
        if math.isfinite(hi):
            w = hi - lo
            box.append((lo + 0.05 * w, hi - 0.05 * w))
        else:
            box.append((lo + 0.1, lo + 10.0))
    return tuple(box)


def kmin(nfamily: NParamFamilySpec, starts: int = 16, tol: float = 1e-9, seed: int = 0) -> KminResult:
    """Multistart derivative-free minimization of Q over the class domain."""
    if starts < 8:
        raise DomainError("starts must be >= 8")
    q = ratio_function(nfamily)
    box = _sample_box(nfamily)
    n = nfamily.nparams
    sampler = qmc.LatinHypercube(d=n, seed=seed)
    unit = sampler.random(starts)
    lows = np.array([b[0] for b in box])
    highs = np.array([b[1] for b in box])
    points = lows + unit * (highs - lows)

    best_x, best_f = None, math.inf
    n_failed = 0
    for x0 in points:
        if not nfamily.contains(x0):
            n_failed += 1
            continue
        res = optimize.minimize(
            q, x0, method="Nelder-Mead",
            options={
                "xatol": tol, "fatol": tol * max(abs(q(x0)), 1.0),
                "maxiter": 20000, "maxfev": 20000,
            },
        )
        if not math.isfinite(res.fun):
            n_failed += 1
            continue
        if res.fun < best_f:
            best_f, best_x = float(res.fun), np.asarray(res.x, dtype=float)
    if best_x is None:
        raise ConvergenceError(f"all {starts} starts failed for class {nfamily.id!r}")

    attained = nfamily.distance_to_boundary(best_x) > BOUNDARY_REL_TOL
    return KminResult(
        class_id=nfamily.id,
        kmin=best_f,
        argmin=tuple(float(v) for v in best_x),
        attained=attained,
        multistart_count=starts,
    )


def kmin_table(starts: int = 16, tol: float = 1e-10, seed: int = 0) -> list[dict]:
    """Reproduce the isoperimetric-ratio table over all built-in shape classes."""
    rows: list[tuple[str, NParamFamilySpec, float]] = [
        ("triangles", builtin("triangle_sides"), 12.0 * math.sqrt(3.0)),
        ("right_triangles", builtin("right_triangle"), 2.0 * (2.0 + math.sqrt(2.0)) ** 2),
    ]
    for n in range(3, 13):
        rows.append((f"ngon_{n}", as_nparam(builtin("ngon", n=n)), 4.0 * n * math.tan(math.pi / n)))
    rows += [
        ("boxes", builtin("box3"), 216.0),
        ("cylinders", builtin("cylinder"), 54.0 * math.pi),
        ("cones", builtin("cone"), 72.0 * math.pi),
        ("square_pyramids", builtin("square_pyramid"), 288.0),
        ("ring_tori", builtin("ring_torus"), 16.0 * math.pi**2),
    ]
    out = []
    for class_id, nfam, analytic in rows:
        try:
            result = kmin(nfam, starts=starts, tol=tol, seed=seed)
            out.append(
                {
                    "class_id": class_id,
                    "analytic_kmin": analytic,
                    "computed_kmin": result.kmin,
                    "attained": result.attained,
                    "argmin": list(result.argmin),
                    "error": None,
                }
            )
        except ConvergenceError as exc:
            out.append(
                {
                    "class_id": class_id,
                    "analytic_kmin": analytic,
                    "computed_kmin": None,
                    "attained": None,
                    "argmin": None,
                    "error": str(exc),
                }
            )
    return out


def solve_coordinate(
    nfamily: NParamFamilySpec,
    k: float,
    fixed: Mapping[int, Callable[[float], float]],
    j: int,
    s: float,
    prev: float | None = None,
    scan_points: int = 512,
) -> float:
    """Solve Q(x) = k for coordinate j, the others given as functions of s.

    Brackets are located by a sign scan over the coordinate interval and the
    root refined with Brent's method.  With several roots, the one nearest
    ``prev`` is returned (curve continuity); without ``prev``, the smallest.
    """
    n = nfamily.nparams
    if not 0 <= j < n:
        raise DomainError(f"coordinate index {j} out of range for {n}-parameter class")
    missing = set(range(n)) - {j} - set(fixed)
    if missing:
        raise DomainError(f"no functions given for coordinates {sorted(missing)}")
    q = ratio_function(nfamily)
    base = np.empty(n)
    for i, fn in fixed.items():
        base[i] = fn(s)

    def g(t: float) -> float:
        x = base.copy()
        x[j] = t
        val = q(x)
        return val - k if math.isfinite(val) else math.nan

    lo, hi = nfamily.domain[j]
    if not math.isfinite(hi):
        sb = _sample_box(nfamily)[j]
        hi = max(100.0, 100.0 * sb[1])
    width = hi - lo
    ts = np.linspace(lo + 1e-9 * width, hi - 1e-9 * width, scan_points)
    vals = np.array([g(t) for t in ts])

    roots = []
    for i in range(len(ts) - 1):
        a, b = vals[i], vals[i + 1]
        if math.isnan(a) or math.isnan(b):
            continue
        if a == 0.0:
            roots.append(float(ts[i]))
        elif a * b < 0:
            roots.append(float(optimize.brentq(g, ts[i], ts[i + 1], xtol=1e-15, rtol=8.9e-16)))
    if not roots:
        raise DomainError(
            f"no root of Q=k for coordinate {j} at s={s}; scanned ({ts[0]}, {ts[-1]}) "
            "(s may be outside the feasible parameter interval)"
        )
    if prev is not None:
        return min(roots, key=lambda t: abs(t - prev))
    return min(roots)


@dataclass(frozen=True)
class LevelSetCurve:
    class_id: str
    k: float
    points: tuple[tuple[float, tuple[float, ...]], ...]  # (arclength s, x)
    q_values: tuple[float, ...]
    residuals: tuple[float, ...]

    def to_csv(self) -> str:
        n = len(self.points[0][1])
        buf = io.StringIO()
        buf.write("s," + ",".join(f"x{i+1}" for i in range(n)) + ",Q\n")
        for (s, x), qv in zip(self.points, self.q_values):
            cells = [f"{s:.17g}"] + [f"{xi:.17g}" for xi in x] + [f"{qv:.17g}"]
            buf.write(",".join(cells) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "class_id": self.class_id,
                "k": self.k,
                "points": [[s, list(x)] for s, x in self.points],
                "q_values": list(self.q_values),
                "residuals": list(self.residuals),
            }
        )


def _gradient(q: Callable, x: np.ndarray, scales: np.ndarray) -> np.ndarray:
    g = np.empty(len(x))
    for i in range(len(x)):
        h = _SQRT_EPS * (abs(x[i]) + scales[i])
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        fp, fm = q(xp), q(xm)
        if not (math.isfinite(fp) and math.isfinite(fm)):
            # one-sided fallback at the domain edge
            f0 = q(x)
            if math.isfinite(fp):
                g[i] = (fp - f0) / h
            elif math.isfinite(fm):
                g[i] = (f0 - fm) / h
            else:
                raise ConvergenceError("gradient stencil left the domain")
        else:
            g[i] = (fp - fm) / (2.0 * h)
    return g


def trace_level_set(
    nfamily: NParamFamilySpec,
    k: float,
    x_start: np.ndarray,
    steps: int,
    step_size: float = 1e-2,
    corrector_tol: float = 1e-10,
) -> LevelSetCurve:
    """Predictor-corrector continuation along the hypersurface Q(x) = k.

    The predictor moves along a unit tangent (kept direction-continuous with
    the previous step); the corrector is Newton iteration on Q(x) = k
    projected along the numerically estimated gradient.  The step is halved
    on corrector failure and doubled after 4 easy successes, capped to
    [1e-6, 1e-1].  Stops at the domain boundary or after ``steps`` steps.
    """
    x = np.asarray(x_start, dtype=float).copy()
    nfamily.require_inside(x)
    q = ratio_function(nfamily)
    if abs(q(x) - k) / k > 1e-2:
        raise DomainError(f"start point has Q={q(x)}, far from the level k={k}")
    box = _sample_box(nfamily)
    scales = np.array([b[1] - b[0] for b in box])

    def grad(xx: np.ndarray) -> np.ndarray:
        g = _gradient(q, xx, scales)
        if np.linalg.norm(g) * float(np.max(scales)) < 1e-6 * k:
            raise ConvergenceError(
                "gradient of Q numerically zero (near a critical point of Q); "
                "the level set has no unique tangent here"
            )
        return g

    def correct(xx: np.ndarray) -> np.ndarray | None:
        for _ in range(25):
            val = q(xx)
            if not math.isfinite(val):
                return None
            if abs(val - k) <= corrector_tol * k:
                return xx
            g = grad(xx)
            xx = xx - (val - k) / float(g @ g) * g
            if not nfamily.contains(xx):
                return None
        return None

    corrected = correct(x.copy())
    if corrected is None:
        raise ConvergenceError("corrector failed to land on the level set at the start")
    x = corrected

    g = grad(x)
    ghat = g / np.linalg.norm(g)
    # deterministic initial tangent: coordinate axis least aligned with the gradient
    axis = int(np.argmin(np.abs(ghat)))
    t = np.zeros(len(x))
    t[axis] = 1.0
    t -= (t @ ghat) * ghat
    t /= np.linalg.norm(t)

    points = [(0.0, tuple(float(v) for v in x))]
    q_values = [q(x)]
    residuals = [abs(q_values[-1] - k) / k]
    arclen = 0.0
    h = float(step_size)
    easy = 0
    for _ in range(steps):
        try:
            g = grad(x)
        except ConvergenceError:
            break
        ghat = g / np.linalg.norm(g)
        tt = t - (t @ ghat) * ghat
        nrm = np.linalg.norm(tt)
        if nrm < 1e-12:
            break
        tt /= nrm
        moved = False
        while h >= STEP_MIN:
            x_pred = x + h * tt
            if not nfamily.contains(x_pred):
                h *= 0.5
                continue
            x_new = correct(x_pred.copy())
            if x_new is None:
                h *= 0.5
                easy = 0
                continue
            arclen += float(np.linalg.norm(x_new - x))
            x = x_new
            t = tt
            points.append((arclen, tuple(float(v) for v in x)))
            q_values.append(q(x))
            residuals.append(abs(q_values[-1] - k) / k)
            easy += 1
            if easy >= 4:
                h = min(2.0 * h, STEP_MAX)
                easy = 0
            moved = True
            break
        if not moved:
            break  # boundary or persistent corrector failure at minimal step

    return LevelSetCurve(
        class_id=nfamily.id,
        k=float(k),
        points=tuple(points),
        q_values=tuple(float(v) for v in q_values),
        residuals=tuple(residuals),
    )


def reduce_homogeneous_prefix(
    nfamily: NParamFamilySpec,
    n_checks: int = 32,
    tol: float = 1e-9,
    seed: int = 0,
) -> NParamFamilySpec:
    """Normalize the declared scaling coordinates to z1 = 1.

    Verifies by random sampling that V and A are homogeneous of degrees d
    and d-1 in the first m coordinates, then returns the reduced class over
    (z2, ..., zn) with z_i = x_i / x_1 for i <= m.  Q is invariant under the
    reduction.
    """
    m = nfamily.homogeneous_prefix_m
    if m is None or not 1 <= m <= nfamily.nparams:
        raise DomainError("class declares no valid homogeneous prefix m")
    d = nfamily.dimension
    rng = np.random.default_rng(seed)
    box = _sample_box(nfamily)
    for _ in range(n_checks):
        x = np.array([rng.uniform(lo, hi) for lo, hi in box])
        if not nfamily.contains(x):
            continue
        t = rng.uniform(0.5, 2.0)
        tx = x.copy()
        tx[:m] *= t
        if not nfamily.contains(tx):
            continue
        v, a = nfamily.volume(x), nfamily.area(x)
        vt, at = nfamily.volume(tx), nfamily.area(tx)
        if abs(vt - t**d * v) > tol * abs(vt) or abs(at - t ** (d - 1) * a) > tol * abs(at):
            raise DomainError(
                f"declared prefix m={m} rejected: V or A is not homogeneous in the "
                f"first {m} coordinates (checked at t={t}, x={x.tolist()})"
            )

    def embed(z: np.ndarray) -> np.ndarray:
        return np.concatenate([[1.0], np.asarray(z, dtype=float)])

    new_domain = tuple(
        ((0.0, math.inf) if i <= m - 1 else nfamily.domain[i])
        for i in range(1, nfamily.nparams)
    )
    new_box = tuple(
        ((0.3, 3.0) if i <= m - 1 else box[i]) for i in range(1, nfamily.nparams)
    )
    feas = None
    if nfamily.feasible is not None:
        feas = lambda z: nfamily.feasible(embed(z))
    return NParamFamilySpec(
        id=f"{nfamily.id}@reduced",
        dimension=d,
        domain=new_domain,
        volume=lambda z: nfamily.volume(embed(z)),
        area=lambda z: nfamily.area(embed(z)),
        params=nfamily.params,
        homogeneous_prefix_m=None,
        feasible=feas,
        sample_box=new_box,
    )
