import math

import numpy as np
import pytest

from isolab import calculus, families, homogeneity
from isolab.errors import DomainError
from isolab.inequalities import kappa

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)


class TestIsoperimetricRatio:
    def test_circle(self):
        rho = 1.7
        assert homogeneity.isoperimetric_ratio(
            2, math.pi * rho**2, 2 * math.pi * rho
        ) == pytest.approx(4 * math.pi, rel=1e-14)

    def test_sphere(self):
        rho = 0.8
        v = 4 / 3 * math.pi * rho**3
        a = 4 * math.pi * rho**2
        assert homogeneity.isoperimetric_ratio(3, v, a) == pytest.approx(36 * math.pi, rel=1e-14)

    def test_cube(self):
        assert homogeneity.isoperimetric_ratio(3, 1.0, 6.0) == pytest.approx(216.0)

    def test_nonpositive_rejected(self):
        with pytest.raises(DomainError):
            homogeneity.isoperimetric_ratio(3, -1.0, 6.0)
        with pytest.raises(DomainError):
            homogeneity.isoperimetric_ratio(3, 1.0, 0.0)


class TestTongInradius:
    def test_cube_half_edge(self):
        assert homogeneity.tong_inradius(3, 8.0, 24.0) == pytest.approx(1.0)

    def test_unit_disk(self):
        assert homogeneity.tong_inradius(2, math.pi, 2 * math.pi) == pytest.approx(1.0)

    def test_similar_rectangle_harmonic_mean(self):
        # r = k s / (k + 1), the harmonic mean of half-length and half-width
        k, s = 0.4, 3.0
        r = homogeneity.tong_inradius(2, k * s**2, 2 * s + 2 * k * s)
        harm = 2.0 / (1.0 / (s / 2) + 1.0 / (k * s / 2))
        assert r == pytest.approx(k * s / (k + 1), rel=1e-14)
        assert r == pytest.approx(harm, rel=1e-14)


class TestClassify:
    def test_hexagon_homogeneous(self):
        hexf = families.builtin("hexagon_120")
        report = homogeneity.classify(hexf, np.linspace(0.1, 5, 64))
        assert report.verdict == "homogeneous"
        assert report.k_constant == pytest.approx(32 / SQRT3, rel=1e-9)

    def test_rect_fixed_length_not_homogeneous(self):
        fam = families.builtin("rect_fixed_length", a=1.0)
        # Q = (2s+2)^2 / s differs at s=1 (16) and s=4 (25): non-constant
        report = homogeneity.classify(fam, np.linspace(0.5, 4, 40))
        assert report.verdict == "not_homogeneous"

    def test_cube_homogeneous_216(self):
        report = homogeneity.classify(families.builtin("cube"), np.linspace(0.5, 4, 40))
        assert report.verdict == "homogeneous"
        assert report.k_constant == pytest.approx(216.0, rel=1e-12)

    def test_grid_too_small(self):
        with pytest.raises(DomainError):
            homogeneity.classify(families.builtin("cube"), np.linspace(0.5, 4, 20))

    @pytest.mark.parametrize(
        "fid,params",
        [("cube", {}), ("disk", {}), ("ball", {}), ("rect_similar", {"k": 0.7}), ("ngon", {"n": 9})],
    )
    def test_similar_families_homogeneous(self, fid, params):
        fam = families.builtin(fid, **params)
        report = homogeneity.classify(fam, np.linspace(0.5, 4, 40))
        assert report.verdict == "homogeneous"

    @pytest.mark.parametrize(
        "fid,params,grid",
        [
            ("cube", {}, np.linspace(0.5, 4, 40)),
            ("hexagon_120", {}, np.linspace(0.2, 3, 40)),
            ("rect_fixed_length", {"a": 1.0}, np.linspace(0.5, 4, 40)),
            ("rect_similar", {"k": 0.5}, np.linspace(0.5, 4, 40)),
        ],
    )
    def test_three_criteria_agree(self, fid, params, grid):
        # all three characterizations pass or fail together at matched tolerances
        fam = families.builtin(fid, **params)
        report = homogeneity.classify(fam, grid, rtol=1e-7)
        r_scale = float(np.median([fam.dimension * fam.volume(s) / fam.area(s) for s in grid]))
        crit_i = report.criterion_i_residual / r_scale <= 1e-6
        crit_ii = report.criterion_ii_residual <= 1e-6
        crit_iii = report.criterion_iii_residual <= 1e-6
        assert crit_i == crit_ii == crit_iii == report.homogeneous

    def test_k_floor(self):
        for fid, grid in [("cube", np.linspace(0.5, 4, 40)), ("hexagon_120", np.linspace(0.2, 3, 40))]:
            fam = families.builtin(fid)
            report = homogeneity.classify(fam, grid)
            d = fam.dimension
            assert report.k_constant >= d**d * kappa(d) * (1 - 1e-12)

    def test_ball_equality(self):
        for fid in ("disk", "ball"):
            fam = families.builtin(fid)
            report = homogeneity.classify(fam, np.linspace(0.5, 4, 40))
            d = fam.dimension
            assert report.k_constant == pytest.approx(d**d * kappa(d), rel=1e-10)

    def test_json_export(self):
        import json

        report = homogeneity.classify(families.builtin("cube"), np.linspace(0.5, 4, 40))
        doc = json.loads(report.to_json())
        assert doc["verdict"] == "homogeneous"
        assert len(doc["q_values"]) == 40


class TestElasticity:
    def test_cube_is_three(self):
        cube = families.builtin("cube")
        grid = np.linspace(0.5, 4, 32)
        curve = calculus.inradius_by_quadrature(cube, 0.0, 0.0, grid)
        for s in (0.7, 1.5, 3.1):
            assert homogeneity.elasticity(cube, curve, s) == pytest.approx(3.0, rel=1e-6)

    def test_rhombus_unit_area_elasticity(self):
        a = 1.0
        inc = families.rhombus_branches(a)[0]
        grid = np.linspace(0.1, SQRT2 - 0.1, 32)
        s0 = float(grid[0])
        # anchor C = A(s0)/(4a) makes r = A/(4a), the C=0 antiderivative
        curve = calculus.inradius_by_quadrature(inc, s0, inc.volume(s0) / (4 * a), grid)
        for s in (0.3, 0.8, 1.2):
            assert homogeneity.elasticity(inc, curve, s) == pytest.approx(1.0, rel=1e-8)

    def test_hexagon_tong_anchor_gives_dimension(self):
        hexf = families.builtin("hexagon_120")
        grid = np.linspace(0.2, 3, 32)
        s0 = float(grid[0])
        c = 2 * hexf.volume(s0) / hexf.area(s0)
        curve = calculus.inradius_by_quadrature(hexf, s0, c, grid)
        for s in (0.5, 1.0, 2.5):
            assert homogeneity.elasticity(hexf, curve, s) == pytest.approx(2.0, rel=1e-6)

    def test_negative_r_rejected(self):
        cube = families.builtin("cube")
        grid = np.linspace(0.5, 4, 32)
        curve = calculus.inradius_by_quadrature(cube, 2.0, -10.0, grid)
        with pytest.raises(DomainError):
            homogeneity.elasticity(cube, curve, 1.0)


class TestConstantAreaCheck:
    def test_rhombus_true(self):
        inc = families.rhombus_branches(1.0)[0]
        assert homogeneity.constant_area_check(inc, np.linspace(0.1, SQRT2 - 0.1, 40)) is True

    def test_cube_false(self):
        assert homogeneity.constant_area_check(families.builtin("cube"), np.linspace(0.5, 4, 40)) is False

    def test_rect_fixed_false(self):
        fam = families.builtin("rect_fixed_length", a=1.0)
        assert homogeneity.constant_area_check(fam, np.linspace(0.5, 4, 40)) is False
