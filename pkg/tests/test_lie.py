"""Group, crossed-module and semidirect-product algebra tests."""

import numpy as np
import pytest

from pathtrans.lie import (SO2, SO3, TRANSL2, AbelianModule, ConjugationModule,
                           VectorModule, broken_vector_module,
                           crossed_module_residual, group_by_id,
                           higher_module_by_id, module_by_id, sd_adjoint,
                           sd_adjoint_fd, sd_bracket, sd_identity, sd_inv,
                           sd_mul, translation_group)

RNG = np.random.default_rng(1234)


class TestGroups:
    def test_so2_exp_quarter_turn(self):
        # hand value: exp of the skew matrix with angle pi/2 is the
        # quarter-turn rotation
        X = np.array([[0.0, -np.pi / 2], [np.pi / 2, 0.0]])
        expected = np.array([[0.0, -1.0], [1.0, 0.0]])
        assert np.allclose(SO2.exp(X), expected, atol=1e-14)

    def test_so3_exp_log_roundtrip(self):
        X = SO3.random_algebra(RNG, scale=0.4)
        assert np.allclose(SO3.log(SO3.exp(X)), X, atol=1e-12)

    def test_exp_log_batched(self):
        X = np.stack([SO3.random_algebra(RNG, 0.2) for _ in range(7)])
        X = X.reshape(7, 1, 3, 3)
        g = SO3.exp(X)
        assert g.shape == (7, 1, 3, 3)
        assert np.allclose(SO3.log(g), X, atol=1e-12)

    def test_group_axioms(self):
        for G in (SO2, SO3, TRANSL2):
            a = G.random_group(RNG)
            b = G.random_group(RNG)
            assert G.distance(G.mul(a, G.inv(a)), G.identity()) < 1e-13
            assert G.distance(G.mul(G.mul(a, b), G.inv(b)), a) < 1e-13

    def test_adjoint_bracket_compatibility(self):
        # Ad(exp(tX))Y agrees with Y + t[X,Y] to first order
        X = SO3.random_algebra(RNG, scale=0.5)
        Y = SO3.random_algebra(RNG, scale=0.5)
        t = 1e-6
        lhs = SO3.adjoint(SO3.exp(t * X), Y)
        rhs = Y + t * SO3.bracket(X, Y)
        assert np.max(np.abs(lhs - rhs)) < 1e-10

    def test_algebra_projection(self):
        M = RNG.normal(size=(3, 3))
        P = SO3.algebra_project(M)
        assert np.allclose(P, -P.T)
        assert SO3.algebra_residual(P) < 1e-14

    def test_project_group_orthogonalizes(self):
        g = SO3.random_group(RNG) + 1e-4 * RNG.normal(size=(3, 3))
        q = SO3.project_group(g)
        assert SO3.group_residual(q) < 1e-12

    def test_group_by_id(self):
        assert group_by_id("so3") is SO3
        assert group_by_id("transl2").name == translation_group(2).name
        with pytest.raises(Exception):
            group_by_id("nope")


class TestCrossedModules:
    @pytest.mark.parametrize("mod", [ConjugationModule(SO3),
                                     VectorModule(SO2), AbelianModule()])
    def test_axioms(self, mod):
        for _ in range(20):
            g = mod.G.random_group(RNG)
            h = mod.H.random_group(RNG)
            h2 = mod.H.random_group(RNG)
            r1, r2 = crossed_module_residual(mod, g, h, h2)
            assert r1 < 1e-9 and r2 < 1e-9

    def test_broken_module_fails_axioms(self):
        bad = broken_vector_module()
        worst = 0.0
        for _ in range(20):
            g = bad.G.random_group(RNG)
            h = bad.H.random_group(RNG)
            h2 = bad.H.random_group(RNG)
            worst = max(worst, max(crossed_module_residual(bad, g, h, h2)))
        assert worst > 0.05

    def test_module_by_id(self):
        assert module_by_id("conj:so3").G is SO3
        assert module_by_id("vec:so2x2").H.name == "transl2"
        assert module_by_id("ab:tr1xtr2").G.name == "transl1"
        with pytest.raises(Exception):
            module_by_id("conj:so17")

    def test_higher_module(self):
        mod = module_by_id("conj:so3")
        hm = higher_module_by_id("k:r1", mod)
        k = hm.K.random_group(RNG)
        # trivial second-level action and map
        assert np.allclose(hm.act((mod.H.identity(), mod.G.identity()), k), k)


class TestSemidirect:
    @pytest.mark.parametrize("mid", ["conj:so3", "vec:so2x2", "ab:tr1xtr2"])
    def test_group_laws(self, mid):
        mod = module_by_id(mid)
        a = (mod.H.random_group(RNG), mod.G.random_group(RNG))
        b = (mod.H.random_group(RNG), mod.G.random_group(RNG))
        e = sd_identity(mod)
        ab = sd_mul(mod, a, b)
        back = sd_mul(mod, ab, sd_inv(mod, b))
        assert np.max(np.abs(back[0] - a[0])) < 1e-12
        assert np.max(np.abs(back[1] - a[1])) < 1e-12
        ae = sd_mul(mod, a, e)
        assert np.max(np.abs(ae[0] - a[0])) < 1e-14

    def test_adjoint_matches_fd(self):
        mod = module_by_id("conj:so3")
        a = (mod.H.random_group(RNG), mod.G.random_group(RNG))
        xi = (mod.H.random_algebra(RNG, 0.4), mod.G.random_algebra(RNG, 0.4))
        exact = sd_adjoint(mod, a, xi)
        fd = sd_adjoint_fd(mod, a, xi)
        assert np.max(np.abs(exact[0] - fd[0])) < 1e-5
        assert np.max(np.abs(exact[1] - fd[1])) < 1e-5

    def test_adjoint_homomorphism(self):
        mod = module_by_id("vec:so2x2")
        a = (mod.H.random_group(RNG), mod.G.random_group(RNG))
        b = (mod.H.random_group(RNG), mod.G.random_group(RNG))
        xi = (mod.H.random_algebra(RNG), mod.G.random_algebra(RNG))
        lhs = sd_adjoint(mod, sd_mul(mod, a, b), xi)
        rhs = sd_adjoint(mod, a, sd_adjoint(mod, b, xi))
        assert np.max(np.abs(lhs[0] - rhs[0])) < 1e-12
        assert np.max(np.abs(lhs[1] - rhs[1])) < 1e-12

    def test_bracket_antisymmetry(self):
        mod = module_by_id("conj:so3")
        x1 = (mod.H.random_algebra(RNG), mod.G.random_algebra(RNG))
        x2 = (mod.H.random_algebra(RNG), mod.G.random_algebra(RNG))
        b12 = sd_bracket(mod, x1, x2)
        b21 = sd_bracket(mod, x2, x1)
        assert np.max(np.abs(b12[0] + b21[0])) < 1e-12
        assert np.max(np.abs(b12[1] + b21[1])) < 1e-12
