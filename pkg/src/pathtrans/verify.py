"""Verification suites: every invariant and acceptance-style check lives
here once, shared by the test suite and the CLI `verify`/`converge`
commands."""
import time
from dataclasses import dataclass, field

import numpy as np

from . import geometry, numerics
from .categorical import (DecoratedMorphism, Morphism2G, decorated_compose,
                          exchange_residual, identity_morphism,
                          morphism_endpoints, target_coherence_residual,
                          vertical_compose)
from .decorated import (Cdec_eval, DecoratedPoint, DecoratedTangent,
                        Omega_eval, Omega_split, Omega_transport,
                        decoration_hstar, decoration_variation,
                        dec_pushforward, dec_right_action, dec_trivialization,
                        dec_trivialization_inverse, endpoint_shift_residual,
                        higher_decoration_kstar, hatOmega_transport,
                        make_formset, nonabelian_stokes_residual,
                        reduction_residual, vertical_vector)
from .geometry import BaseOneForm, BaseTwoForm, default_chart, form_preset_1, \
    form_preset_2, map_one_form, add_one_forms
from .lie import (SO2, SO3, TRANSL1, AbelianModule, ConjugationModule,
                  VectorModule, broken_vector_module, crossed_module_residual,
                  derivative_identity_residual, higher_module_by_id,
                  sd_adjoint, sd_adjoint_fd, sd_bracket, sd_inv, sd_mul)
from .paths import (BundlePath, PathTangent, SampledPath, compose_paths,
                    connection_change, horizontal_lift, local_trivialization,
                    local_trivialization_inverse, loop_holonomy, omega_eval,
                    omega_transport, omega_vector_lift, path_from_map,
                    family_from_map, segment_path, sheet_family, square_loop,
                    tangent_from_map,
                    tangent_lift, tangency_residual)


@dataclass
class Check:
    name: str
    value: float
    tol: float
    passed: bool
    kind: str = "max"  # "max": value < tol; "min": value > tol; "info"
    info: str = ""


def _lt(name, value, tol, info=""):
    return Check(name, float(value), float(tol), float(value) < float(tol),
                 "max", info)


def _gt(name, value, tol, info=""):
    return Check(name, float(value), float(tol), float(value) > float(tol),
                 "min", info)


def _range(name, value, lo, hi, info=""):
    ok = lo <= float(value) <= hi
    return Check(name, float(value), hi, ok, "range",
                 info or "expected in [%g, %g]" % (lo, hi))


def _info(name, value, info=""):
    return Check(name, float(value), float("nan"), True, "info", info)


def checks_pass(checks):
    return all(c.passed for c in checks)


def checks_report(checks):
    return [
        {"name": c.name, "value": c.value, "tol": c.tol, "passed": c.passed,
         "kind": c.kind, "info": c.info}
        for c in checks
    ]


def _pair_norm(p1, p2):
    return float(np.linalg.norm(np.asarray(p1[0]) - np.asarray(p2[0]))
                 + np.linalg.norm(np.asarray(p1[1]) - np.asarray(p2[1])))


# ---------------------------------------------------------------------------
# randomized scenario ingredients


def random_one_form(target, chart, rng, scale=0.3):
    coeff = rng.normal(size=(chart.dim, target.algebra_dim)) * scale
    freq = rng.normal(size=chart.dim)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    basis = target.basis

    def ev(x, v):
        s = 1.0 + 0.5 * np.sin(np.tensordot(x, freq, axes=(-1, -1)) + phase)
        comp = np.einsum("...d,dk->...k", v, coeff)
        return np.tensordot(comp * s[..., None], basis, axes=(-1, 0))

    return BaseOneForm(ev, target, chart, name="rand1")


def random_two_form(target, chart, rng, scale=0.3):
    xi = target.random_algebra(rng, scale)
    freq = rng.normal(size=chart.dim)
    phase = rng.uniform(0.0, 2.0 * np.pi)

    def ev(x, v, w):
        area = v[..., 0] * w[..., 1] - v[..., 1] * w[..., 0]
        s = 1.0 + 0.5 * np.cos(np.tensordot(x, freq, axes=(-1, -1)) + phase)
        c = area * s
        return c.reshape(c.shape + (1,) * xi.ndim) * xi

    return BaseTwoForm(ev, target, chart, name="rand2")


def random_formset(mod, chart, rng, scale=0.35):
    return make_formset(
        mod, chart,
        abar=random_one_form(mod.G, chart, rng, scale),
        a=random_one_form(mod.G, chart, rng, scale),
        b0=random_two_form(mod.G, chart, rng, scale),
        b1=random_two_form(mod.H, chart, rng, scale),
        c0L=random_one_form(mod.G, chart, rng, scale),
        c0R=random_one_form(mod.G, chart, rng, scale),
        c1L=random_one_form(mod.H, chart, rng, scale),
        c1R=random_one_form(mod.H, chart, rng, scale),
        c1=random_one_form(mod.H, chart, rng, scale))


def random_path(chart, rng, n, margin=0.05):
    p0 = rng.uniform(-0.6, 0.0, size=2)
    p1 = p0 + rng.uniform(0.4, 1.1, size=2)
    bow = rng.normal(size=2) * 0.25

    def fn(r):
        return p0 + r[:, None] * (p1 - p0) + np.sin(np.pi * r)[:, None] * bow

    return path_from_map(fn, n, margin)


def random_base_field(path, rng, scale=0.6):
    c0 = rng.normal(size=2) * scale
    c1 = rng.normal(size=2) * scale
    c2 = rng.normal(size=2) * scale

    def fn(r):
        return c0 + r[:, None] * c1 + np.sin(np.pi * r)[:, None] * c2

    return tangent_from_map(fn, path)


def _curved_path(n, margin=0.05):
    p0 = np.array([-0.6, -0.3])
    p1 = np.array([0.9, 0.6])
    bow = np.array([0.25, -0.35])

    def fn(r):
        return p0 + r[:, None] * (p1 - p0) + np.sin(np.pi * r)[:, None] * bow

    return path_from_map(fn, n, margin)


def random_tangent(fs, ovg, rng):
    """A tangency-respecting random path tangent plus vertical drift."""
    G = fs.G
    v = random_base_field(ovg.base, rng)
    W0 = G.random_algebra(rng, 0.4)
    vbar = tangent_lift(fs.abar, ovg, v, (v[0], W0))
    Y = G.random_algebra(rng, 0.4)
    vert = np.broadcast_to(Y, (ovg.n_nodes,) + G.value_shape)
    return PathTangent(vbar.v, vbar.W + vert)


# ---------------------------------------------------------------------------
# suites


def suite_lie(seed=42, samples=100):
    rng = np.random.default_rng(seed)
    checks = []
    for mod in (ConjugationModule(SO3), VectorModule(SO2)):
        r1m = r2m = rdm = 0.0
        for _ in range(samples):
            g = mod.G.random_group(rng)
            h = mod.H.random_group(rng)
            h2 = mod.H.random_group(rng)
            r1, r2 = crossed_module_residual(mod, g, h, h2)
            rd = derivative_identity_residual(mod, g, mod.H.random_algebra(rng))
            r1m, r2m, rdm = max(r1m, r1), max(r2m, r2), max(rdm, rd)
        checks.append(_lt("lie/axiom1/%s" % mod.name, r1m, 1e-9))
        checks.append(_lt("lie/axiom2/%s" % mod.name, r2m, 1e-9))
        checks.append(_lt("lie/dtau-identity/%s" % mod.name, rdm, 1e-9))
    broken = broken_vector_module()
    rb = 0.0
    for _ in range(20):
        g = broken.G.random_group(rng)
        h = broken.H.random_group(rng)
        rb = max(rb, crossed_module_residual(broken, g, h,
                                             broken.H.random_group(rng))[0])
    checks.append(_gt("lie/broken-control", rb, 0.05))
    # semidirect adjoint against finite differences, and Ad homomorphism
    rfd = rhom = 0.0
    for mod in (ConjugationModule(SO3), VectorModule(SO2)):
        for _ in range(10):
            a = (mod.H.random_group(rng), mod.G.random_group(rng))
            b = (mod.H.random_group(rng), mod.G.random_group(rng))
            xi = (mod.H.random_algebra(rng), mod.G.random_algebra(rng))
            rfd = max(rfd, _pair_norm(sd_adjoint(mod, a, xi),
                                      sd_adjoint_fd(mod, a, xi)))
            lhs = sd_adjoint(mod, sd_mul(mod, a, b), xi)
            rhs = sd_adjoint(mod, a, sd_adjoint(mod, b, xi))
            rhom = max(rhom, _pair_norm(lhs, rhs))
    checks.append(_lt("lie/adjoint-vs-fd", rfd, 1e-5))
    checks.append(_lt("lie/adjoint-homomorphism", rhom, 1e-9))
    return checks


def suite_omega(seed=42, n=201, n_scen=20, method="rk4mk"):
    chart = default_chart()
    checks = []
    r_vert = r_eqv = r_lift = r_hleqv = r_tan = 0.0
    for k in range(n_scen):
        rng = np.random.default_rng(seed + 1000 + k)
        G = SO3 if k % 2 == 0 else SO2
        mod = ConjugationModule(G)
        fs = random_formset(mod, chart, rng)
        gamma = random_path(chart, rng, n)
        g0 = G.random_group(rng)
        ovg = horizontal_lift(fs.abar, gamma, g0, G, method=method)
        # vertical normalization
        Y = G.random_algebra(rng)
        vert = PathTangent(np.zeros((n + 1, 2)),
                           np.broadcast_to(Y, (n + 1,) + G.value_shape))
        r_vert = max(r_vert, float(np.max(G.norm(
            omega_eval(fs, ovg, vert) - Y))))
        # equivariance
        vbar = random_tangent(fs, ovg, rng)
        g1 = G.random_group(rng)
        lhs = omega_eval(fs, ovg.right_translate(g1),
                         vbar.right_translate(G, g1))
        rhs = G.adjoint(G.inv(g1), omega_eval(fs, ovg, vbar))
        r_eqv = max(r_eqv, float(np.max(G.norm(lhs - rhs))))
        # the omega-horizontal lift is annihilated and tangency holds
        v = random_base_field(gamma, rng)
        vlift = omega_vector_lift(fs, ovg, v)
        r_lift = max(r_lift, float(np.max(G.norm(omega_eval(fs, ovg, vlift)))))
        r_tan = max(r_tan, tangency_residual(fs.abar, ovg, vlift))
        # horizontal lift equivariance
        lift2 = horizontal_lift(fs.abar, gamma, G.mul(g0, g1), G, method=method)
        r_hleqv = max(r_hleqv, float(np.max(G.norm(
            lift2.fiber - G.mul(ovg.fiber, g1)))))
    checks.append(_lt("omega/vertical", r_vert, 1e-10))
    checks.append(_lt("omega/equivariance", r_eqv, 1e-10))
    checks.append(_lt("omega/lift-annihilation", r_lift, 1e-9))
    checks.append(_lt("omega/lift-tangency", r_tan, 1e-4))
    checks.append(_lt("omega/hl-equivariance", r_hleqv, 1e-11))
    return checks


def suite_Omega(seed=42, n=101, n_scen=20, method="rk4mk"):
    chart = default_chart()
    checks = []
    r_vert = r_eqv = r_reasm = r_ann = r_vv = 0.0
    for k in range(n_scen):
        rng = np.random.default_rng(seed + 2000 + k)
        mod = ConjugationModule(SO3) if k % 2 == 0 else VectorModule(SO2)
        G, H = mod.G, mod.H
        fs = random_formset(mod, chart, rng)
        gamma = random_path(chart, rng, n)
        ovg = horizontal_lift(fs.abar, gamma, G.random_group(rng), G,
                              method=method)
        p = DecoratedPoint(mod, ovg, H.random_group(rng))
        # vertical normalization
        xi = (H.random_algebra(rng), G.random_algebra(rng))
        out = Omega_eval(fs, p, vertical_vector(p, xi)).raw
        r_vert = max(r_vert, _pair_norm(out, xi))
        # a generic tangent: omega-lift plus vertical plus random X
        v = random_base_field(gamma, rng)
        t = DecoratedTangent(omega_vector_lift(fs, ovg, v),
                             H.random_algebra(rng))
        t = t + vertical_vector(p, (H.random_algebra(rng, 0.3),
                                    G.random_algebra(rng, 0.3)))
        # equivariance under the decorated right action
        elem = (H.random_group(rng), G.random_group(rng))
        p2 = dec_right_action(p, elem)
        t2 = dec_pushforward(p, t, elem)
        lhs = Omega_eval(fs, p2, t2).raw
        rhs = sd_adjoint(mod, sd_inv(mod, elem), Omega_eval(fs, p, t).raw)
        r_eqv = max(r_eqv, _pair_norm(lhs, rhs))
        # splitting
        vH, vV = Omega_split(fs, p, t)
        back = vH + vV
        r_reasm = max(r_reasm, float(np.max(np.abs(back.vbar.v - t.vbar.v)))
                      + float(np.max(np.abs(back.vbar.W - t.vbar.W)))
                      + float(np.max(np.abs(back.X - t.X))))
        ann = Omega_eval(fs, p, vH).raw
        r_ann = max(r_ann, float(np.linalg.norm(ann[0]))
                    + float(np.linalg.norm(ann[1])))
        vv2 = vertical_vector(p, Omega_eval(fs, p, t).raw)
        r_vv = max(r_vv, float(np.max(np.abs(vV.vbar.W - vv2.vbar.W)))
                   + float(np.max(np.abs(vV.X - vv2.X))))
    checks.append(_lt("Omega/vertical", r_vert, 1e-10))
    checks.append(_lt("Omega/equivariance", r_eqv, 1e-10))
    checks.append(_lt("Omega/split-reassembly", r_reasm, 1e-12))
    checks.append(_lt("Omega/split-annihilation", r_ann, 1e-9))
    checks.append(_lt("Omega/split-vertical-match", r_vv, 1e-9))
    return checks


def suite_flat(n=101, method="rk4mk"):
    """All-zero auxiliary forms: every transport output is the identity."""
    checks = []
    mod = ConjugationModule(SO3)
    G, H = mod.G, mod.H
    chart = default_chart()
    abar = form_preset_1("gauss:0:0.5:1.5", G, chart)
    fs = make_formset(mod, chart, abar=abar)
    fam = sheet_family((-0.4, -0.4), (1.0, 1.0), n, n)
    ovg = horizontal_lift(abar, fam.row(0), G.identity(), G, method=method)
    base = omega_transport(fs, fam, ovg, method=method)
    checks.append(_lt("flat/a_s", float(np.max(np.abs(
        base.a_s - G.identity()))), 1e-12))
    h0 = H.random_group(np.random.default_rng(7))
    dec = Omega_transport(fs, fam, DecoratedPoint(mod, ovg, h0), method=method)
    checks.append(_lt("flat/h_s", float(np.max(np.abs(dec.h_s - h0))), 1e-12))
    hat = hatOmega_transport(fs, fam, DecoratedPoint(mod, ovg, h0),
                             method=method)
    checks.append(_lt("flat/x_s", float(np.max(np.abs(hat.x_s - h0))), 1e-12))
    hm = higher_module_by_id("k:r1", mod)
    zero1 = geometry.zero_one_form(hm.K, chart)
    zero2 = geometry.zero_two_form(hm.K, chart)
    _, kstar = higher_decoration_kstar(hm, zero1, zero1, zero2, dec,
                                       method=method)
    checks.append(_lt("flat/k_star", float(np.max(np.abs(kstar))), 1e-12))
    return checks


def _abelian_setup(n, margin=0.05):
    mod = AbelianModule()
    chart = default_chart()
    fs = make_formset(
        mod, chart,
        b0=form_preset_2("dx1dx2:0", mod.G, chart),
        c1R=form_preset_1("x1dx2:0", mod.H, chart),
        b1=form_preset_2("dx1dx2:1", mod.H, chart))
    fam = sheet_family((0.0, 0.0), (1.0, 1.0), n, n, margin)
    rho = numerics.sitting_reparam(np.linspace(0.0, 1.0, n + 1), margin)
    return mod, chart, fs, fam, rho


def _abelian_errors(n, method="rk4mk"):
    """Relative errors of the four transports against closed forms."""
    mod, chart, fs, fam, rho = _abelian_setup(n)
    G, H = mod.G, mod.H
    ovg = horizontal_lift(fs.abar, fam.row(0), G.identity(), G, method=method)
    base = omega_transport(fs, fam, ovg, method=method)
    # closed form: a_s = rho(s) (enclosed-area rate of the sheet)
    err_a = float(np.max(np.abs(base.a_s[:, 0] - rho)))
    dec = Omega_transport(fs, fam, DecoratedPoint(mod, ovg, H.identity()),
                          method=method)
    # closed form: h_s = rho(s) (-1, 1)
    h_oracle = rho[:, None] * np.array([-1.0, 1.0])
    err_h = float(np.max(np.abs(dec.h_s - h_oracle)))
    # decoration: c1 = e1 dx1 over the segment (0,0)->(1,0): h* = (-1, 0)
    seg = segment_path((0.0, 0.0), (1.0, 0.0), n)
    ovg_seg = horizontal_lift(fs.abar, seg, G.identity(), G, method=method)
    c1 = form_preset_1("const:0:1", H, chart)
    _, h_star, _ = decoration_hstar(mod, c1, ovg_seg, method=method)
    err_dec = float(np.max(np.abs(h_star - np.array([-1.0, 0.0]))))
    # higher decoration: c2R = x1 dx2 gives k* = -1; D = dx1^dx2 gives k* = +1
    hm = higher_module_by_id("k:r1", mod)
    zero1 = geometry.zero_one_form(hm.K, chart)
    zero2 = geometry.zero_two_form(hm.K, chart)
    c2R = form_preset_1("x1dx2:0", hm.K, chart)
    Dform = form_preset_2("dx1dx2:0", hm.K, chart)
    _, k1 = higher_decoration_kstar(hm, zero1, c2R, zero2, dec, method=method)
    _, k2 = higher_decoration_kstar(hm, zero1, zero1, Dform, dec, method=method)
    err_k = max(abs(float(k1[0]) + 1.0), abs(float(k2[0]) - 1.0))
    return err_a, err_h, err_dec, err_k


def suite_abelian(n=201, refinements=(51, 101, 201), method="rk4mk"):
    checks = []
    errs = _abelian_errors(n, method=method)
    names = ("omega-transport", "Omega-transport", "decoration", "k-star")
    for name, err in zip(names, errs):
        checks.append(_lt("abelian/%s" % name, err, 1e-6,
                          info="relative error vs closed form"))
    hs = 1.0 / np.asarray(refinements, dtype=float)
    tracked = np.array([_abelian_errors(m, method=method)[:2]
                        for m in refinements])
    slope_a = numerics.loglog_slope(hs, tracked[:, 0])
    slope_h = numerics.loglog_slope(hs, tracked[:, 1])
    checks.append(_gt("abelian/order/omega-transport", slope_a, 2.0))
    checks.append(_gt("abelian/order/Omega-transport", slope_h, 2.0))
    return checks


def _stokes_field(group, n):
    u = np.linspace(0.0, 1.0, n + 1)
    S, T = np.meshgrid(u, u, indexing="ij")
    f1 = np.sin(np.pi * T + 0.4) * np.cos(np.pi * S)
    f2 = np.cos(0.5 * np.pi * T) * np.sin(np.pi * S + 0.2)
    f3 = np.exp(-((T - 0.4) ** 2 + (S - 0.6) ** 2))
    fs = (f1, f2, f3)
    E = np.zeros((n + 1, n + 1) + group.value_shape)
    for i in range(group.algebra_dim):
        f = fs[i % 3]
        E = E + f.reshape(f.shape + (1,) * group.basis[i].ndim) * group.basis[i]
    return E


def _stokes_residual(group, n, method="rk4mk"):
    E = _stokes_field(group, n)
    return nonabelian_stokes_residual(E, group, 1.0 / n, 1.0 / n,
                                      method=method)


def suite_stokes(n=201, refinements=(51, 101, 201), method="rk4mk"):
    checks = []
    res = _stokes_residual(SO3, n, method=method)
    checks.append(_lt("stokes/so3", res, 1e-3))
    hs = 1.0 / np.asarray(refinements, dtype=float)
    errs = [_stokes_residual(SO3, m, method=method) for m in refinements]
    slope = numerics.loglog_slope(hs, errs)
    checks.append(_range("stokes/order", slope, 1.6, 2.4))
    res_ab = _stokes_residual(TRANSL1, n, method=method)
    checks.append(_lt("stokes/abelian", res_ab, 1e-9))
    return checks


def _endpoint_scenario():
    mod = ConjugationModule(SO3)
    chart = default_chart()
    abar = form_preset_1("gauss:0:0.4:1.5", mod.G, chart)
    c1 = form_preset_1("gauss:1:0.35:1.2", mod.H, chart)
    return mod, abar, c1


def suite_endpoint(n=401, refinements=(101, 201, 401), method="rk4mk"):
    checks = []
    mod, abar, c1 = _endpoint_scenario()
    res = endpoint_shift_residual(mod, abar, c1, _curved_path(n),
                                  mod.G.identity(), method=method)
    checks.append(_lt("endpoint/residual", res, 1e-6))
    hs = 1.0 / np.asarray(refinements, dtype=float)
    errs = [endpoint_shift_residual(mod, abar, c1, _curved_path(m),
                                    mod.G.identity(), method=method)
            for m in refinements]
    slope = numerics.loglog_slope(hs, errs)
    checks.append(_range("endpoint/order", slope, 3.4, 4.6))
    return checks


def _reduction_scenarios():
    chart = default_chart()
    mod_v = VectorModule(SO2)
    abar_v = form_preset_1("gauss:0:0.4:1.5", mod_v.G, chart)
    c1_v = add_one_forms(form_preset_1("x1dx2:0", mod_v.H, chart),
                         form_preset_1("gauss:1:0.3:1.2", mod_v.H, chart))
    mod_c = ConjugationModule(SO3)
    abar_c = form_preset_1("gauss:0:0.5:1.4", mod_c.G, chart)
    c1_c = add_one_forms(
        map_one_form(form_preset_1("x1dx2:1", mod_c.H, chart),
                     lambda v: 0.4 * v, mod_c.H, name="0.4*x1dx2:1"),
        form_preset_1("gauss:2:0.4:1.2", mod_c.H, chart))
    return chart, (mod_v, abar_v, c1_v), (mod_c, abar_c, c1_c)


def _reduction_family(n):
    # curved sheet: the t-rows must pick up dx2 components or the running
    # decorations stay trivial and the check is vacuous
    def fn(T, S):
        x1 = -0.5 + T + 0.2 * np.sin(np.pi * S) * T * (1.0 - T)
        x2 = -0.5 + S + 0.35 * np.sin(np.pi * T) * (0.3 + 0.7 * S)
        return np.stack([x1, x2], axis=-1)

    return family_from_map(fn, n, n)


def suite_reduction(n=401, refinements=(101, 201, 401), method="rk4mk",
                    side_modes=True):
    checks = []
    chart, vec, conj = _reduction_scenarios()
    mod_v, abar_v, c1_v = vec
    mod_c, abar_c, c1_c = conj
    res_v, _ = reduction_residual(mod_v, chart, abar_v, c1_v,
                                  _reduction_family(n), mode="pullback",
                                  method=method)
    checks.append(_lt("reduction/vec-pullback", res_v, 1e-4))
    res_flip, _ = reduction_residual(mod_v, chart, abar_v, c1_v,
                                     _reduction_family(n), mode="pullback",
                                     method=method, sign=-1.0)
    checks.append(_gt("reduction/sign-flip-control",
                      res_flip / max(res_v, 1e-300), 1e2,
                      info="flipped-B1 residual over intact residual"))
    errs = [reduction_residual(mod_c, chart, abar_c, c1_c,
                               _reduction_family(m), mode="pullback",
                               method=method)[0] for m in refinements]
    hs = 1.0 / np.asarray(refinements, dtype=float)
    slope = numerics.loglog_slope(hs, errs)
    checks.append(_gt("reduction/so3-order", slope, 1.6))
    checks.append(_lt("reduction/so3-finest", errs[-1], 1e-2,
                      info="pullback-mode residual at the finest grid"))
    if side_modes:
        m_side = refinements[len(refinements) // 2]
        for mode in ("full", "proj"):
            r, _ = reduction_residual(mod_v, chart, abar_v, c1_v,
                                      _reduction_family(m_side), mode=mode,
                                      method=method)
            checks.append(_info("reduction/vec-%s" % mode, r,
                                info="reported for comparison, no pass/fail"))
    return checks


def suite_holonomy(method="rk4mk", eps_list=(0.1, 0.05, 0.025),
                   n_per_side=128):
    checks = []
    G = SO3
    chart = default_chart()
    abar = add_one_forms(
        form_preset_1("gauss:0:0.6:1.0", G, chart),
        form_preset_1("gauss:1:0.4:1.3:1", G, chart))
    corner = np.array([0.15, 0.25])
    e1 = np.array([1.0, 0.0])
    e2 = np.array([0.0, 1.0])
    F = geometry.curvature(abar, corner, e1, e2)
    ratios = []
    for eps in eps_list:
        loop = square_loop(eps, n_per_side, corner=corner)
        hol = loop_holonomy(abar, loop, G.identity(), G, method=method)
        ratios.append(float(np.linalg.norm(G.log(hol) + eps ** 2 * F))
                      / eps ** 2)
    checks.append(_lt("holonomy/ratio-finest", ratios[-1], ratios[0] * 0.51,
                      info="ratios %s" % ratios))
    checks.append(_lt("holonomy/monotone",
                      0.0 if ratios[0] > ratios[1] > ratios[2] else 1.0, 0.5,
                      info="ratio sequence must decrease"))
    # holonomy of a composed loop equals the chained holonomies
    l1 = square_loop(0.4, 64, corner=corner)
    l2 = square_loop(0.25, 64, corner=corner)
    comp = compose_paths(l1, l2)
    g0 = G.random_group(np.random.default_rng(3))
    h_comp = loop_holonomy(abar, comp, g0, G, method=method)
    h_chain = loop_holonomy(abar, l2,
                            loop_holonomy(abar, l1, g0, G, method=method),
                            G, method=method)
    checks.append(_lt("holonomy/composition",
                      float(np.linalg.norm(h_comp - h_chain)), 1e-9))
    return checks


def _composable_quad(mod, rng):
    """(f1', f1, f2', f2) with both vertical composites defined."""
    def pair(h1, g1, h2):
        m1 = Morphism2G(mod, h1, g1)
        m2 = Morphism2G(mod, h2, mod.G.mul(mod.tau(h1), g1))
        return m1, m2
    f1, f2 = pair(mod.H.random_group(rng), mod.G.random_group(rng),
                  mod.H.random_group(rng))
    f1p, f2p = pair(mod.H.random_group(rng), mod.G.random_group(rng),
                    mod.H.random_group(rng))
    return f1p, f1, f2p, f2


def suite_categorical(seed=42, count=100, n=40, method="rk4mk"):
    checks = []
    chart = default_chart()
    r_ex = r_assoc = r_hom = r_coh = 0.0
    mods = (ConjugationModule(SO3), VectorModule(SO2))
    rng = np.random.default_rng(seed + 4000)
    for k in range(count):
        mod = mods[k % 2]
        G, H = mod.G, mod.H
        f1p, f1, f2p, f2 = _composable_quad(mod, rng)
        r_ex = max(r_ex, exchange_residual(f1p, f1, f2p, f2))
        # associativity of vertical composition
        h1, h2, h3 = (H.random_group(rng) for _ in range(3))
        g1 = G.random_group(rng)
        m1 = Morphism2G(mod, h1, g1)
        m2 = Morphism2G(mod, h2, G.mul(mod.tau(h1), g1))
        m3 = Morphism2G(mod, h3, G.mul(mod.tau(h2), m2.g))
        left = vertical_compose(m3, vertical_compose(m2, m1))
        right = vertical_compose(vertical_compose(m3, m2), m1)
        r_assoc = max(r_assoc, _pair_norm(left.raw, right.raw))
        # endpoint homomorphism
        ma = Morphism2G(mod, H.random_group(rng), G.random_group(rng))
        mb = Morphism2G(mod, H.random_group(rng), G.random_group(rng))
        sab, tab = morphism_endpoints(ma.multiply(mb))
        sa, ta = morphism_endpoints(ma)
        sb, tb = morphism_endpoints(mb)
        r_hom = max(r_hom,
                    float(np.linalg.norm(sab - G.mul(sa, sb)))
                    + float(np.linalg.norm(tab - G.mul(ta, tb))))
    # decorated composition, target coherence
    mod = ConjugationModule(SO3)
    G, H = mod.G, mod.H
    abar = form_preset_1("gauss:0:0.5:1.5", G, chart)
    rng = np.random.default_rng(seed + 5000)
    for _ in range(count):
        p0 = rng.uniform(-0.8, 0.0, size=2)
        p1 = p0 + rng.uniform(0.3, 0.8, size=2)
        p2 = p1 + rng.uniform(0.3, 0.8, size=2)
        ovg1 = horizontal_lift(abar, segment_path(p0, p1, n),
                               G.random_group(rng), G, method=method)
        h1 = H.random_group(rng)
        h2 = H.random_group(rng)
        g2start = G.mul(ovg1.fiber[-1], mod.tau(h1))
        ovg2 = horizontal_lift(abar, segment_path(p1, p2, n), g2start, G,
                               method=method)
        m1 = DecoratedMorphism(DecoratedPoint(mod, ovg1, h1))
        m2 = DecoratedMorphism(DecoratedPoint(mod, ovg2, h2))
        comp = decorated_compose(m2, m1)
        r_coh = max(r_coh, target_coherence_residual(m2, m1, comp))
    checks.append(_lt("categorical/exchange", r_ex, 1e-9))
    checks.append(_lt("categorical/associativity", r_assoc, 1e-9))
    checks.append(_lt("categorical/endpoint-homomorphism", r_hom, 1e-9))
    checks.append(_lt("categorical/target-coherence", r_coh, 1e-9))
    return checks


def suite_roundtrip(seed=42, n=201, method="rk4mk"):
    checks = []
    chart = default_chart()
    rng = np.random.default_rng(seed + 6000)
    mod = ConjugationModule(SO3)
    G, H = mod.G, mod.H
    fs = random_formset(mod, chart, rng)
    gamma = random_path(chart, rng, n)
    g0 = G.random_group(rng)
    # local trivialization round trip and equivariance
    ovg = local_trivialization(fs.abar, gamma, g0, G, method=method)
    gamma_b, g_b = local_trivialization_inverse(ovg)
    ovg2 = local_trivialization(fs.abar, gamma_b, g_b, G, method=method)
    r_triv = float(np.max(np.abs(ovg2.fiber - ovg.fiber)))
    g1 = G.random_group(rng)
    r_eqv = float(np.max(np.abs(
        local_trivialization(fs.abar, gamma, G.mul(g0, g1), G,
                             method=method).fiber
        - G.mul(ovg.fiber, g1))))
    checks.append(_lt("roundtrip/local-trivialization", r_triv, 1e-8))
    checks.append(_lt("roundtrip/lift-equivariance", r_eqv, 1e-8))
    # decorated trivialization round trip
    pair = (H.random_group(rng), G.random_group(rng))
    p = dec_trivialization(fs, gamma, pair, method=method)
    _, pair_b = dec_trivialization_inverse(p)
    checks.append(_lt("roundtrip/dec-trivialization",
                      _pair_norm(pair, pair_b), 1e-8))
    # connection change is a bijection
    abar2 = random_one_form(G, chart, rng, 0.35)
    lift2, _ = connection_change(fs.abar, abar2, ovg, method=method)
    lift3, _ = connection_change(abar2, fs.abar, lift2, method=method)
    checks.append(_lt("roundtrip/connection-change",
                      float(np.max(np.abs(lift3.fiber - ovg.fiber))), 1e-8))
    # mu: horizontal lift from (gamma, p0) closes on itself
    mu = horizontal_lift(fs.abar, ovg.base, ovg.fiber[0], G, method=method)
    checks.append(_lt("roundtrip/mu",
                      float(np.max(np.abs(mu.fiber - ovg.fiber))), 1e-8))
    return checks


def suite_variation(n=161, method="rk4mk"):
    """decoration_variation against the fd derivative of h* over a family."""
    checks = []
    chart, vec, conj = _reduction_scenarios()
    for (mod, abar, c1), tol in ((vec, 1e-9), (conj, 1e-6)):
        fam = _reduction_family(n)
        q = horizontal_lift(abar, SampledPath(fam.points[:, 0, :],
                                              fam.margin_s),
                            mod.G.identity(), mod.G, method=method).fiber
        from .paths import horizontal_lift_rows
        fibers = horizontal_lift_rows(abar, fam, q, mod.G, method=method)
        rhs, h_star = decoration_variation(mod, c1, fam, fibers, method=method)
        dh = numerics.deriv_grid(h_star, fam.ds, axis=0)
        if mod.H.kind == "translation":
            lhs = dh
        else:
            lhs = dh @ mod.H.inv(h_star)
        res = float(np.max(mod.H.norm(lhs - rhs)))
        checks.append(_lt("variation/%s" % mod.name, res, tol))
    return checks


SUITES = {
    "lie": suite_lie,
    "omega": suite_omega,
    "Omega": suite_Omega,
    "flat": suite_flat,
    "abelian": suite_abelian,
    "stokes": suite_stokes,
    "endpoint": suite_endpoint,
    "reduction": suite_reduction,
    "holonomy": suite_holonomy,
    "categorical": suite_categorical,
    "roundtrip": suite_roundtrip,
    "variation": suite_variation,
}

ALL_ORDER = ("lie", "omega", "Omega", "flat", "abelian", "stokes",
             "endpoint", "reduction", "holonomy", "categorical",
             "roundtrip", "variation")


def run_suite(name, **kwargs):
    """Run one suite (or 'all'); returns (checks, report dict).

    Keyword arguments are forwarded to each suite where its signature
    accepts them (e.g. seed/method apply broadly, grid sizes do not).
    """
    import inspect

    names = ALL_ORDER if name == "all" else (name,)
    checks = []
    timings = {}
    for nm in names:
        if nm not in SUITES:
            raise KeyError("unknown suite %r" % nm)
        fn = SUITES[nm]
        accepted = set(inspect.signature(fn).parameters)
        kw = {k: v for k, v in kwargs.items() if k in accepted}
        t0 = time.perf_counter()
        checks.extend(fn(**kw))
        timings[nm] = time.perf_counter() - t0
    report = {
        "suite": name,
        "checks": checks_report(checks),
        "passed": checks_pass(checks),
        "timings_s": timings,
    }
    return checks, report


CONVERGENCE_TARGETS = {
    "stokes": (lambda m, method: _stokes_residual(SO3, m, method=method),
               (51, 101, 201)),
    "endpoint": (lambda m, method: endpoint_shift_residual(
        _endpoint_scenario()[0], _endpoint_scenario()[1],
        _endpoint_scenario()[2], _curved_path(m),
        _endpoint_scenario()[0].G.identity(), method=method),
        (101, 201, 401)),
    "abelian": (lambda m, method: _abelian_errors(m, method=method)[1],
                (51, 101, 201)),
    "reduction": (lambda m, method: reduction_residual(
        _reduction_scenarios()[2][0], _reduction_scenarios()[0],
        _reduction_scenarios()[2][1], _reduction_scenarios()[2][2],
        _reduction_family(m), mode="pullback", method=method)[0],
        (101, 201, 401)),
}

FLOOR = 1e-13


def convergence_study(check_id, refinements=3, method="rk4mk", base_n=None):
    """Residuals at geometrically refined grids plus the observed slope."""
    if check_id not in CONVERGENCE_TARGETS:
        raise KeyError("unknown convergence check %r" % check_id)
    fn, default_ns = CONVERGENCE_TARGETS[check_id]
    if base_n is None:
        ns = list(default_ns)
        while len(ns) < refinements:
            ns.append(ns[-1] * 2)
        ns = ns[:max(refinements, 3)]
    else:
        ns = [base_n * 2 ** i for i in range(max(refinements, 3))]
    errs = [float(fn(m, method)) for m in ns]
    hs = [1.0 / m for m in ns]
    floored = min(errs) < FLOOR
    return {
        "check": check_id,
        "grids": ns,
        "residuals": errs,
        "slope": None if floored else numerics.loglog_slope(hs, errs),
        "floor_reached": floored,
    }
