"""Decorated-bundle connection, decoration and reduction tests."""

import numpy as np
import pytest

from pathtrans import verify
from pathtrans.decorated import (DecoratedPoint, Omega_eval, Omega_split,
                                 Omega_transport, decoration_hstar,
                                 hatOmega_transport, higher_decoration_kstar,
                                 make_formset, nonabelian_stokes_residual,
                                 reduction_residual, vertical_vector)
from pathtrans.geometry import (default_chart, form_preset_1, form_preset_2,
                                zero_one_form)
from pathtrans.lie import higher_module_by_id, module_by_id
from pathtrans.paths import horizontal_lift, segment_path, sheet_family

CHART = default_chart()


class TestFlatCollapse:
    def test_all_transports_collapse(self):
        # zero auxiliary forms: every transported quantity stays at identity
        mod = module_by_id("conj:so3")
        abar = form_preset_1("gauss:0:0.5:1.5", mod.G, CHART)
        fs = make_formset(mod, CHART, abar=abar, a=abar)
        fam = sheet_family((0.0, 0.0), (1.0, 1.0), 61, 61)
        ovg = horizontal_lift(fs.abar, fam.row(0), mod.G.identity(), mod.G)
        init = DecoratedPoint(mod, ovg, mod.H.identity())
        dec = Omega_transport(fs, fam, init)
        hat = hatOmega_transport(fs, fam, init)
        assert np.max(mod.H.norm(dec.h_s - mod.H.identity())) < 1e-12
        assert np.max(mod.H.norm(hat.x_s - mod.H.identity())) < 1e-12


class TestAbelianOracles:
    def test_closed_forms_at_101(self):
        err_a, err_h, err_dec, err_k = verify._abelian_errors(101)
        assert err_a < 1e-6
        assert err_h < 1e-6
        assert err_dec < 1e-6
        assert err_k < 1e-6

    def test_kstar_frozen_values(self):
        # hand values over the unit sheet with the sitting reparametrization:
        # c2R = x1 dx2 integrates to -1, D = dx1^dx2 integrates to +1
        mod, chart, fs, fam, rho = verify._abelian_setup(101)
        ovg = horizontal_lift(fs.abar, fam.row(0), mod.G.identity(), mod.G)
        dec = Omega_transport(fs, fam, DecoratedPoint(mod, ovg,
                                                      mod.H.identity()))
        hm = higher_module_by_id("k:r1", mod)
        zero1 = zero_one_form(hm.K, chart)
        from pathtrans.geometry import zero_two_form
        c2R = form_preset_1("x1dx2:0", hm.K, chart)
        Dform = form_preset_2("dx1dx2:0", hm.K, chart)
        _, k1 = higher_decoration_kstar(hm, zero1, c2R,
                                        zero_two_form(hm.K, chart), dec)
        _, k2 = higher_decoration_kstar(hm, zero1, zero1, Dform, dec)
        assert abs(float(k1[0]) + 1.0) < 1e-6
        assert abs(float(k2[0]) - 1.0) < 1e-6


class TestConnectionAxioms:
    def test_vertical_reproduction(self):
        # Omega applied to a vertical vector returns its generator
        rng = np.random.default_rng(7)
        mod = module_by_id("conj:so3")
        fs = verify.random_formset(mod, CHART, rng)
        path = verify.random_path(CHART, rng, 80)
        ovg = horizontal_lift(fs.abar, path, mod.G.random_group(rng), mod.G)
        pt = DecoratedPoint(mod, ovg, mod.H.random_group(rng))
        Y = (mod.H.random_algebra(rng), mod.G.random_algebra(rng))
        vv = vertical_vector(pt, Y)
        got = Omega_eval(fs, pt, vv).raw
        assert np.max(np.abs(got[0] - Y[0])) < 1e-10
        assert np.max(np.abs(got[1] - Y[1])) < 1e-10

    def test_split_reassembles(self):
        rng = np.random.default_rng(11)
        mod = module_by_id("vec:so2x2")
        fs = verify.random_formset(mod, CHART, rng)
        path = verify.random_path(CHART, rng, 80)
        ovg = horizontal_lift(fs.abar, path, mod.G.random_group(rng), mod.G)
        pt = DecoratedPoint(mod, ovg, mod.H.random_group(rng))
        from pathtrans.decorated import DecoratedTangent
        from pathtrans.paths import omega_vector_lift
        v = verify.random_base_field(path, rng)
        tan = DecoratedTangent(omega_vector_lift(fs, ovg, v),
                               mod.H.random_algebra(rng))
        tan = tan + vertical_vector(pt, (mod.H.random_algebra(rng, 0.3),
                                         mod.G.random_algebra(rng, 0.3)))
        hor, ver = Omega_split(fs, pt, tan)
        back = hor + ver
        assert np.max(np.abs(back.vbar.v - tan.vbar.v)) < 1e-12
        assert np.max(np.abs(back.vbar.W - tan.vbar.W)) < 1e-12
        assert np.max(np.abs(back.X - tan.X)) < 1e-12
        # the horizontal part is annihilated
        got = Omega_eval(fs, pt, hor).raw
        assert np.max(np.abs(got[0])) < 1e-9
        assert np.max(np.abs(got[1])) < 1e-9


class TestDecoration:
    def test_zero_c1_gives_identity(self):
        mod = module_by_id("conj:so3")
        abar = form_preset_1("gauss:0:0.5:1.5", mod.G, CHART)
        path = segment_path((-0.5, -0.2), (0.7, 0.3), 80)
        ovg = horizontal_lift(abar, path, mod.G.identity(), mod.G)
        _, h_star, g_star = decoration_hstar(mod, zero_one_form(mod.H, CHART),
                                             ovg)
        assert np.max(np.abs(h_star - np.eye(3))) == 0.0
        assert np.max(np.abs(g_star - np.eye(3))) == 0.0


class TestReduction:
    def test_vec_pullback_small_grid(self):
        chart, vec, conj = verify._reduction_scenarios()
        mod, abar, c1 = vec
        res, _ = reduction_residual(mod, chart, abar, c1,
                                    verify._reduction_family(101),
                                    mode="pullback")
        assert res < 1e-5

    def test_sign_flip_is_large(self):
        chart, vec, conj = verify._reduction_scenarios()
        mod, abar, c1 = vec
        res, _ = reduction_residual(mod, chart, abar, c1,
                                    verify._reduction_family(101),
                                    mode="pullback", sign=-1.0)
        assert res > 1e-2

    def test_so3_pullback_converges(self):
        chart, vec, conj = verify._reduction_scenarios()
        mod, abar, c1 = conj
        r1, _ = reduction_residual(mod, chart, abar, c1,
                                   verify._reduction_family(51),
                                   mode="pullback")
        r2, _ = reduction_residual(mod, chart, abar, c1,
                                   verify._reduction_family(101),
                                   mode="pullback")
        assert r2 < r1 / 3.0


class TestStokes:
    def test_abelian_specialization_exact(self):
        from pathtrans.lie import TRANSL2
        E = verify._stokes_field(TRANSL2, 101)
        res = nonabelian_stokes_residual(E, TRANSL2, 1.0 / 100, 1.0 / 100)
        assert res < 1e-9

    def test_so3_residual_converges(self):
        from pathtrans.lie import SO3
        r1 = verify._stokes_residual(SO3, 51)
        r2 = verify._stokes_residual(SO3, 101)
        assert r2 < r1 / 2.5
