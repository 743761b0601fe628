"""The categorical-group layer: morphism endpoints, vertical composition,
the exchange law, and composition of decorated paths."""
from dataclasses import dataclass

import numpy as np

from .decorated import DecoratedPoint
from .errors import GridMismatch, ModuleMismatch, NotComposable
from .lie import sd_distance, sd_identity, sd_inv, sd_mul
from .paths import BundlePath, compose_bundle_paths

COMPOSE_TOL = 1e-9


@dataclass(frozen=True)
class Morphism2G:
    """A morphism of the categorical group, i.e. a semidirect pair (h, g)."""
    module: object
    h: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "h", np.asarray(self.h, dtype=float))
        object.__setattr__(self, "g", np.asarray(self.g, dtype=float))

    @property
    def raw(self):
        return (self.h, self.g)

    def multiply(self, other):
        _same_module(self, other)
        h, g = sd_mul(self.module, self.raw, other.raw)
        return Morphism2G(self.module, h, g)

    def inverse(self):
        h, g = sd_inv(self.module, self.raw)
        return Morphism2G(self.module, h, g)


def identity_morphism(mod, g):
    return Morphism2G(mod, mod.H.identity(), g)


def morphism_endpoints(m):
    """source s(h, g) = g, target t(h, g) = tau(h) g."""
    mod = m.module
    return m.g, mod.G.mul(mod.tau(m.h), m.g)


def vertical_compose(m2, m1):
    """(h2, g2) o (h1, g1) = (h2 h1, g1), defined when tau(h1) g1 = g2."""
    _same_module(m2, m1)
    mod = m1.module
    _, t1 = morphism_endpoints(m1)
    if mod.G.distance(t1, m2.g) > COMPOSE_TOL:
        raise NotComposable("target of m1 does not match source of m2")
    return Morphism2G(mod, mod.H.mul(m2.h, m1.h), m1.g)


def exchange_residual(f1p, f1, f2p, f2):
    """Distance between (f2' o f1')(f2 o f1) and (f2' f2) o (f1' f1)."""
    mod = f1.module
    left = vertical_compose(f2p, f1p).multiply(vertical_compose(f2, f1))
    right = vertical_compose(f2p.multiply(f2), f1p.multiply(f1))
    return sd_distance(mod, left.raw, right.raw)


def _same_module(a, b):
    if a.module.name != b.module.name:
        raise ModuleMismatch(
            "mixed modules %r and %r" % (a.module.name, b.module.name))


# ---------------------------------------------------------------------------
# decorated morphisms


@dataclass(frozen=True)
class DecoratedMorphism:
    point: DecoratedPoint

    @property
    def module(self):
        return self.point.module

    @property
    def ovg(self):
        return self.point.ovg

    @property
    def h(self):
        return self.point.h


def decorated_source(m):
    """Source: the initial bundle point of ovg."""
    x, g = m.ovg.initial()
    return x, g


def decorated_target(m):
    """Target: terminal point of ovg shifted by tau(h).

    With this convention the composability condition terminal(ovg1) =
    ovg2(t0) tau(h1)^-1 is exactly t(m1) = s(m2), and the target of a
    composite equals the target of its second factor.
    """
    mod = m.module
    x, g = m.ovg.terminal()
    return x, mod.G.mul(g, mod.tau(m.h))


def decorated_compose(m2, m1):
    """(ovg2, h2) o (ovg1, h1) = (ovg2 tau(h1)^-1 concat ovg1, h1 h2)."""
    mod = m1.module
    if mod.name != m2.module.name:
        raise ModuleMismatch("mixed modules in decorated composition")
    G, H = mod.G, mod.H
    shift = G.inv(mod.tau(m1.h))
    ov2_shifted = m2.ovg.right_translate(shift)
    x_t, g_t = m1.ovg.terminal()
    x_s, g_s = ov2_shifted.initial()
    if np.linalg.norm(x_t - x_s) > COMPOSE_TOL or G.distance(g_t, g_s) > COMPOSE_TOL:
        raise NotComposable("target of m1 does not match shifted source of m2")
    ov3 = compose_bundle_paths(m1.ovg, ov2_shifted)
    return DecoratedMorphism(DecoratedPoint(mod, ov3, H.mul(m1.h, m2.h)))


def target_coherence_residual(m2, m1, composed=None):
    """Distance between t(m2 o m1) and t(m2)."""
    mod = m1.module
    if composed is None:
        composed = decorated_compose(m2, m1)
    x_a, g_a = decorated_target(composed)
    x_b, g_b = decorated_target(m2)
    return float(np.linalg.norm(x_a - x_b)) + mod.G.distance(g_a, g_b)
