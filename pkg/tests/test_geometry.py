"""Chart, differential form and numerics-layer tests."""

import numpy as np
import pytest

from pathtrans import numerics
from pathtrans.errors import OutOfChart
from pathtrans.geometry import (curvature, default_chart, exterior_derivative,
                                form_preset_1, form_preset_2, zero_one_form,
                                zero_two_form)
from pathtrans.lie import SO3, TRANSL1

E1 = np.array([1.0, 0.0])
E2 = np.array([0.0, 1.0])


class TestForms:
    def test_exterior_derivative_x1dx2(self):
        # hand value: d(x1 dx2) = dx1 ^ dx2, so evaluating on (e1, e2)
        # returns the generator exactly
        chart = default_chart()
        A = form_preset_1("x1dx2:0", SO3, chart)
        x = np.array([0.3, -0.2])
        got = exterior_derivative(A, x, E1, E2)
        assert np.allclose(got, SO3.basis[0], atol=1e-8)

    def test_exterior_derivative_antisymmetry(self):
        chart = default_chart()
        A = form_preset_1("gauss:1:0.5:1.2", SO3, chart)
        x = np.array([0.4, 0.1])
        d12 = exterior_derivative(A, x, E1, E2)
        d21 = exterior_derivative(A, x, E2, E1)
        assert np.max(np.abs(d12 + d21)) < 1e-9

    def test_curvature_single_generator(self):
        # A valued in one generator commutes with itself, so F = dA
        chart = default_chart()
        A = form_preset_1("x1dx2:2", SO3, chart)
        F = curvature(A, np.array([0.7, 0.2]), E1, E2)
        assert np.allclose(F, SO3.basis[2], atol=1e-7)

    def test_zero_forms(self):
        chart = default_chart()
        assert zero_one_form(SO3, chart).is_zero
        assert zero_two_form(SO3, chart).is_zero
        assert not form_preset_1("x1dx2:0", SO3, chart).is_zero

    def test_preset_parsing(self):
        chart = default_chart()
        a = form_preset_1("const:0:2", TRANSL1, chart)
        v = a(np.array([0.0, 0.0]), np.array([0.5, 2.0]))
        assert np.allclose(v, 2.0 * TRANSL1.basis[0])
        b = form_preset_2("dx1dx2:0", TRANSL1, chart)
        v2 = b(np.array([0.1, 0.1]), E1, 3.0 * E2)
        assert np.allclose(v2, 3.0 * TRANSL1.basis[0])
        with pytest.raises(Exception):
            form_preset_1("whirl:0", SO3, chart)

    def test_out_of_chart(self):
        chart = default_chart(half=1.0)
        chart.require(np.array([0.5, 0.5]))
        with pytest.raises(OutOfChart):
            chart.require(np.array([5.0, 0.0]))


class TestNumerics:
    def test_deriv_grid_order4_exact_on_quartic(self):
        n = 40
        t = np.linspace(0.0, 1.0, n + 1)
        f = t ** 4 - 2 * t ** 3 + t
        df = 4 * t ** 3 - 6 * t ** 2 + 1
        got = numerics.deriv_grid(f, t[1] - t[0], axis=0)
        assert np.max(np.abs(got - df)) < 1e-11

    def test_deriv_grid_o2_order(self):
        errs = []
        for n in (40, 80):
            t = np.linspace(0.0, 1.0, n + 1)
            f = np.sin(3 * t)
            got = numerics.deriv_grid_o2(f, t[1] - t[0], axis=0)
            errs.append(np.max(np.abs(got[1:-1] - 3 * np.cos(3 * t)[1:-1])))
        assert errs[0] / errs[1] > 3.5  # order 2 halving

    def test_simpson_exact_on_cubics(self):
        n = 10
        t = np.linspace(0.0, 1.0, n + 1)
        f = t ** 3 - t
        got = numerics.integrate(f, t[1] - t[0], axis=0)
        assert abs(got - (-0.25)) < 1e-14

    def test_sitting_reparam_flat_margins(self):
        u = np.linspace(0.0, 1.0, 201)
        r = numerics.sitting_reparam(u, 0.05)
        assert r[0] == 0.0 and r[-1] == 1.0
        assert np.all(np.diff(r) >= 0)
        # exactly constant on the margins
        assert np.all(r[u <= 0.05] == 0.0)
        assert np.all(r[u >= 0.95] == 1.0)

    def test_smoothstep_values(self):
        s = numerics.smoothstep(np.array([0.0, 0.5, 1.0]))
        assert np.allclose(s, [0.0, 0.5, 1.0])
        # high-order flatness at the ends
        eps = 1e-3
        assert numerics.smoothstep(np.array([eps]))[0] < eps ** 5

    def test_loglog_slope(self):
        hs = np.array([0.1, 0.05, 0.025])
        errs = 7.0 * hs ** 3
        assert abs(numerics.loglog_slope(hs, errs) - 3.0) < 1e-12

    def test_midpoints_order4(self):
        n = 40
        t = np.linspace(0.0, 1.0, n + 1)
        f = t ** 3
        mids = numerics.midpoints(f, axis=0)
        exact = ((t[:-1] + t[1:]) / 2) ** 3
        assert np.max(np.abs(mids - exact)) < 1e-12
