import math

import numpy as np
import pytest

from isolab import families, homogeneity, search
from isolab.errors import ConvergenceError, DomainError

SQRT2 = math.sqrt(2.0)


class TestKmin:
    def test_box3_cubes(self):
        result = search.kmin(families.builtin("box3"), starts=8)
        assert result.kmin == pytest.approx(216.0, rel=1e-9)
        assert result.attained
        a, b, c = result.argmin
        assert b == pytest.approx(a, rel=1e-4)
        assert c == pytest.approx(a, rel=1e-4)

    def test_cone_optimal_shape(self):
        result = search.kmin(families.builtin("cone"), starts=8)
        assert result.kmin == pytest.approx(72 * math.pi, rel=1e-9)
        assert result.attained
        rho, h = result.argmin
        assert h == pytest.approx(2 * SQRT2 * rho, rel=1e-4)

    def test_ring_torus_boundary_infimum(self):
        result = search.kmin(families.builtin("ring_torus"), starts=8)
        assert result.kmin == pytest.approx(16 * math.pi**2, rel=1e-4)
        assert not result.attained

    def test_starts_precondition(self):
        with pytest.raises(DomainError):
            search.kmin(families.builtin("box3"), starts=4)

    def test_parameterization_invariance(self):
        # the same class of boxes under a smooth bijection of coordinates
        box = families.builtin("box3")
        warped = families.NParamFamilySpec(
            id="box3_warped",
            dimension=3,
            domain=box.domain,
            volume=lambda x: box.volume(np.array([x[0] ** 2, math.exp(x[1]) - 1, x[2]])),
            area=lambda x: box.area(np.array([x[0] ** 2, math.exp(x[1]) - 1, x[2]])),
            sample_box=((0.5, 1.8), (0.3, 1.5), (0.3, 3.0)),
        )
        r1 = search.kmin(box, starts=8)
        r2 = search.kmin(warped, starts=8)
        assert abs(r1.kmin - r2.kmin) / r1.kmin < 1e-6


class TestKminTable:
    def test_all_rows_match_analytic(self):
        rows = search.kmin_table(starts=8)
        assert len(rows) == 17
        for row in rows:
            assert row["error"] is None
            rel = abs(row["computed_kmin"] - row["analytic_kmin"]) / row["analytic_kmin"]
            tol = 1e-4 if row["class_id"] == "ring_tori" else 1e-6
            assert rel <= tol, row

    def test_selected_analytic_values(self):
        rows = {r["class_id"]: r for r in search.kmin_table(starts=8)}
        assert rows["triangles"]["analytic_kmin"] == pytest.approx(12 * math.sqrt(3))
        assert rows["ngon_4"]["analytic_kmin"] == pytest.approx(16.0)
        assert rows["cylinders"]["analytic_kmin"] == pytest.approx(54 * math.pi)
        assert not rows["ring_tori"]["attained"]

    def test_cylinder_optimum_height_equals_diameter(self):
        result = search.kmin(families.builtin("cylinder"), starts=8)
        rho, h = result.argmin
        assert h == pytest.approx(2 * rho, rel=1e-4)


def _parallelogram_x3(s: float) -> float:
    return math.asin((s / 8) / (math.sqrt(s) - 1))


class TestSolveCoordinate:
    FIXED = {0: lambda s: math.sqrt(s), 1: lambda s: s - math.sqrt(s)}

    def test_example_value_at_two(self):
        par = families.builtin("parallelogram3")
        root = search.solve_coordinate(par, 32.0, self.FIXED, 2, 2.0)
        assert root == pytest.approx(math.asin(0.25 / (SQRT2 - 1)), abs=1e-12)

    def test_arcsin_branch_across_interval(self):
        par = families.builtin("parallelogram3")
        lo, hi = 24 - 16 * SQRT2, 24 + 16 * SQRT2
        prev = None
        for s in np.linspace(lo + 0.2, hi - 0.2, 25):
            root = search.solve_coordinate(par, 32.0, self.FIXED, 2, float(s), prev=prev)
            assert root == pytest.approx(_parallelogram_x3(float(s)), abs=1e-9)
            prev = root

    def test_outside_feasible_interval(self):
        par = families.builtin("parallelogram3")
        with pytest.raises(DomainError, match="no root"):
            search.solve_coordinate(par, 32.0, self.FIXED, 2, 60.0)

    def test_below_isoperimetric_floor(self):
        par = families.builtin("parallelogram3")
        with pytest.raises(DomainError, match="no root"):
            search.solve_coordinate(par, 10.0, self.FIXED, 2, 2.0)  # 10 < 4 pi


class TestTraceLevelSet:
    def _start_point(self, s: float) -> np.ndarray:
        return np.array([math.sqrt(s), s - math.sqrt(s), _parallelogram_x3(s)])

    def test_parallelogram_level_32(self):
        par = families.builtin("parallelogram3")
        curve = search.trace_level_set(par, 32.0, self._start_point(4.0), steps=100)
        assert len(curve.points) == 101
        assert max(curve.residuals) <= 1e-9
        # every level point satisfies A = (P/2)^2 / 8 and P = 2s in the
        # parameterization s = P/2
        for _, x in curve.points:
            a = par.volume(np.asarray(x))
            p = par.area(np.asarray(x))
            s = p / 2
            assert a == pytest.approx(s**2 / 8, rel=1e-6)

    def test_traced_curve_is_homogeneous_family(self):
        from scipy.interpolate import CubicSpline

        par = families.builtin("parallelogram3")
        curve = search.trace_level_set(par, 32.0, self._start_point(4.0), steps=120)
        arclen = np.array([s for s, _ in curve.points])
        coords = np.array([x for _, x in curve.points])
        splines = [CubicSpline(arclen, coords[:, i]) for i in range(3)]

        def at(s):
            return np.array([sp(s) for sp in splines])

        fam = families.FamilySpec(
            id="traced_level_32",
            dimension=2,
            domain=(float(arclen[0]), float(arclen[-1])),
            volume=lambda s: par.volume(at(s)),
            area=lambda s: par.area(at(s)),
        )
        lo, hi = arclen[2], arclen[-3]
        report = homogeneity.classify(fam, np.linspace(lo, hi, 40), rtol=1e-6)
        assert report.verdict == "homogeneous"
        assert report.k_constant == pytest.approx(32.0, rel=1e-6)

    def test_gradient_zero_at_minimum(self):
        box = families.builtin("box3")
        with pytest.raises(ConvergenceError, match="gradient"):
            search.trace_level_set(box, 216.0, np.array([1.0, 1.0, 1.0]), steps=10)

    def test_start_far_from_level_rejected(self):
        par = families.builtin("parallelogram3")
        with pytest.raises(DomainError, match="far from"):
            search.trace_level_set(par, 32.0, np.array([1.0, 1.0, math.pi / 2]), steps=10)

    def test_csv_export(self):
        par = families.builtin("parallelogram3")
        curve = search.trace_level_set(par, 32.0, self._start_point(4.0), steps=5)
        lines = curve.to_csv().strip().split("\n")
        assert lines[0] == "s,x1,x2,x3,Q"
        assert len(lines) == len(curve.points) + 1


class TestReduceHomogeneousPrefix:
    def test_parallelogram_q_invariance(self):
        par = families.builtin("parallelogram3")
        reduced = search.reduce_homogeneous_prefix(par)
        q_full = search.ratio_function(par)
        q_red = search.ratio_function(reduced)
        rng = np.random.default_rng(7)
        for _ in range(20):
            x = rng.uniform([0.3, 0.3, 0.2], [3.0, 3.0, math.pi - 0.2])
            assert q_red(np.array([x[1] / x[0], x[2]])) == pytest.approx(q_full(x), rel=1e-10)

    def test_rectangles_reduce_to_similar(self):
        # Q(1, z2) = k has finitely many roots z2; each root is an aspect ratio,
        # so homogeneous subfamilies are similar rectangles
        rect = families.builtin("rect2")
        reduced = search.reduce_homogeneous_prefix(rect)
        q = search.ratio_function(reduced)
        k = 18.0  # above the square minimum 16
        zs = np.linspace(0.05, 20.0, 4000)
        vals = np.array([q(np.array([z])) - k for z in zs])
        crossings = np.sum(vals[:-1] * vals[1:] < 0)
        assert crossings == 2  # one aspect ratio and its reciprocal

    def test_angle_declared_as_scaling_variable_rejected(self):
        par = families.builtin("parallelogram3")
        bad = families.NParamFamilySpec(
            id="parallelogram3_bad",
            dimension=2,
            domain=par.domain,
            volume=par.volume,
            area=par.area,
            homogeneous_prefix_m=3,
            sample_box=par.sample_box,
        )
        with pytest.raises(DomainError, match="rejected"):
            search.reduce_homogeneous_prefix(bad)

    def test_missing_declaration_rejected(self):
        with pytest.raises(DomainError):
            search.reduce_homogeneous_prefix(families.builtin("triangle_sides"))
