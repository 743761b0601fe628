"""2-group morphism layer and decorated composition tests."""

import numpy as np
import pytest

from pathtrans.categorical import (DecoratedMorphism, Morphism2G,
                                   decorated_compose, decorated_source,
                                   decorated_target, exchange_residual,
                                   identity_morphism, morphism_endpoints,
                                   vertical_compose)
from pathtrans.decorated import DecoratedPoint
from pathtrans.errors import NotComposable
from pathtrans.geometry import default_chart, form_preset_1
from pathtrans.lie import module_by_id
from pathtrans.paths import BundlePath, horizontal_lift, segment_path

RNG = np.random.default_rng(99)
MOD = module_by_id("conj:so3")


def _random_morphism():
    return Morphism2G(MOD, MOD.H.random_group(RNG), MOD.G.random_group(RNG))


class TestMorphisms:
    def test_endpoints(self):
        m = _random_morphism()
        s, t = morphism_endpoints(m)
        # source is the base element, target is tau(h) times it
        assert np.allclose(s, m.g)
        assert np.allclose(t, MOD.tau(m.h) @ m.g)

    def test_identity_neutral(self):
        m = _random_morphism()
        e = identity_morphism(MOD, m.g)
        c = vertical_compose(m, e)
        assert np.max(np.abs(c.h - m.h)) < 1e-12
        assert np.max(np.abs(c.g - m.g)) < 1e-12

    def test_vertical_compose_endpoint_chain(self):
        m1 = _random_morphism()
        _, t1 = morphism_endpoints(m1)
        m2 = Morphism2G(MOD, MOD.H.random_group(RNG), t1)
        c = vertical_compose(m2, m1)
        s, t = morphism_endpoints(c)
        assert np.allclose(s, morphism_endpoints(m1)[0])
        assert np.allclose(t, morphism_endpoints(m2)[1])

    def test_vertical_compose_rejects_mismatch(self):
        m1 = _random_morphism()
        m2 = _random_morphism()  # target(m1) != source(m2) generically
        with pytest.raises(NotComposable):
            vertical_compose(m2, m1)

    def test_exchange_law(self):
        from pathtrans.verify import _composable_quad
        for _ in range(10):
            f1p, f1, f2p, f2 = _composable_quad(MOD, RNG)
            assert exchange_residual(f1p, f1, f2p, f2) < 1e-9

    def test_inverse(self):
        m = _random_morphism()
        c = m.multiply(m.inverse())
        assert np.max(np.abs(c.h - MOD.H.identity())) < 1e-12
        assert np.max(np.abs(c.g - MOD.G.identity())) < 1e-12


def _decorated(chart, abar, seg, h):
    ovg = horizontal_lift(abar, seg, MOD.G.identity(), MOD.G)
    return DecoratedMorphism(DecoratedPoint(MOD, ovg, h))


class TestDecoratedComposition:
    def test_target_coherence(self):
        chart = default_chart()
        abar = form_preset_1("gauss:0:0.5:1.5", MOD.G, chart)
        seg1 = segment_path((0.0, 0.0), (0.8, 0.2), 40)
        h1 = MOD.H.random_group(RNG)
        m1 = _decorated(chart, abar, seg1, h1)
        t1 = decorated_target(m1)
        # start the second path over the first one's decorated target fiber
        seg2 = segment_path((0.8, 0.2), (0.3, 0.9), 40)
        ovg2 = horizontal_lift(abar, seg2, t1[1], MOD.G)
        m2 = DecoratedMorphism(DecoratedPoint(MOD, ovg2,
                                              MOD.H.random_group(RNG)))
        comp = decorated_compose(m2, m1)
        s = decorated_source(comp)
        t = decorated_target(comp)
        s1 = decorated_source(m1)
        t2 = decorated_target(m2)
        assert np.linalg.norm(s[0] - s1[0]) < 1e-9
        assert np.max(np.abs(s[1] - s1[1])) < 1e-9
        assert np.linalg.norm(t[0] - t2[0]) < 1e-9
        assert np.max(np.abs(t[1] - t2[1])) < 1e-9

    def test_compose_rejects_disjoint_paths(self):
        chart = default_chart()
        abar = form_preset_1("gauss:0:0.5:1.5", MOD.G, chart)
        m1 = _decorated(chart, abar, segment_path((0, 0), (1, 0), 40),
                        MOD.H.identity())
        m2 = _decorated(chart, abar, segment_path((2, 2), (2, 3), 40),
                        MOD.H.identity())
        with pytest.raises(NotComposable):
            decorated_compose(m2, m1)
