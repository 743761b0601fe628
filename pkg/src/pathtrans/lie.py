"""Matrix Lie groups, translation groups, crossed modules and H x| G arithmetic.

Conventions used throughout the library:
  * matrix group/algebra values occupy the last two array axes; translation
    group values are plain vectors on the last axis. Leading axes are batch
    axes and every operation broadcasts over them.
  * semidirect elements are (h, g) pairs, semidirect algebra elements are
    (Y, Z) pairs with Y in L(H), Z in L(G); the helper functions sd_* work on
    raw pairs, the dataclass wrappers are the user-facing API.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import _kernels
from .errors import DimensionMismatch, ModuleMismatch, SingularLog

LOG_RADIUS = 1.5  # Frobenius ||g - I|| below which log_map is trusted


class LieGroup:
    """Descriptor for a matrix subgroup or a translation group R^m."""

    def __init__(self, name, kind, dim, basis, orthogonal=False):
        self.name = name
        self.kind = kind  # "matrix" | "translation"
        self.dim = dim  # ambient matrix size n, or vector length m
        self.basis = np.asarray(basis, dtype=float)
        self.orthogonal = orthogonal
        if kind == "matrix":
            flat = self.basis.reshape(len(self.basis), -1)
            # least-squares projector onto span(basis)
            self._proj = flat.T @ np.linalg.pinv(flat.T)
        else:
            self._proj = None

    # -- shapes ---------------------------------------------------------
    @property
    def algebra_dim(self):
        return len(self.basis)

    @property
    def value_shape(self):
        if self.kind == "matrix":
            return (self.dim, self.dim)
        return (self.dim,)

    def identity(self):
        if self.kind == "matrix":
            return np.eye(self.dim)
        return np.zeros(self.dim)

    def zero(self):
        return np.zeros(self.value_shape)

    # -- group / algebra arithmetic -------------------------------------
    def exp(self, X):
        X = np.asarray(X, dtype=float)
        if self.kind == "matrix":
            return _kernels.expm(X)
        return X.copy()

    def log(self, g):
        g = np.asarray(g, dtype=float)
        if self.kind != "matrix":
            return g.copy()
        flat = g.reshape(-1, self.dim, self.dim)
        out = np.empty_like(flat)
        eye = np.eye(self.dim)
        for i, m in enumerate(flat):
            if np.linalg.norm(m - eye) >= LOG_RADIUS:
                raise SingularLog(
                    "element outside the log injectivity radius %.2f" % LOG_RADIUS
                )
            out[i] = np.real(scipy.linalg.logm(m))
        return self.algebra_project(out.reshape(g.shape))

    def mul(self, a, b):
        if self.kind == "matrix":
            return np.asarray(a) @ np.asarray(b)
        return np.asarray(a) + np.asarray(b)

    def inv(self, a):
        a = np.asarray(a, dtype=float)
        if self.kind != "matrix":
            return -a
        if self.orthogonal:
            return np.swapaxes(a, -1, -2)
        return np.linalg.inv(a)

    def adjoint(self, g, X):
        if self.kind != "matrix":
            return np.asarray(X, dtype=float).copy()
        g = np.asarray(g)
        return g @ np.asarray(X) @ self.inv(g)

    def bracket(self, X, Y):
        if self.kind != "matrix":
            return np.zeros(np.broadcast_shapes(np.shape(X), np.shape(Y)))
        X = np.asarray(X)
        Y = np.asarray(Y)
        return X @ Y - Y @ X

    # -- constraint handling ---------------------------------------------
    def algebra_project(self, X):
        X = np.asarray(X, dtype=float)
        if self.kind != "matrix":
            return X.copy()
        flat = X.reshape(-1, self.dim * self.dim)
        return (flat @ self._proj.T).reshape(X.shape)

    def algebra_residual(self, X):
        X = np.asarray(X, dtype=float)
        return float(np.max(np.abs(X - self.algebra_project(X))))

    def project_group(self, m):
        m = np.asarray(m, dtype=float)
        if self.kind != "matrix":
            return m.copy()
        u, _, vt = np.linalg.svd(m)
        r = u @ vt
        if self.orthogonal:
            # keep determinant +1 for rotation groups
            det = np.linalg.det(r)
            u2 = u.copy()
            u2[..., :, -1] *= np.where(det < 0, -1.0, 1.0)[..., None]
            r = u2 @ vt
        return r

    def group_residual(self, g):
        g = np.asarray(g, dtype=float)
        if self.kind != "matrix":
            return 0.0
        if self.orthogonal:
            gtg = np.swapaxes(g, -1, -2) @ g
            return float(np.max(np.abs(gtg - np.eye(self.dim))))
        return float(np.max(np.abs(g - self.project_group(g))))

    # -- metrics / sampling ----------------------------------------------
    def norm(self, X):
        X = np.asarray(X, dtype=float)
        axes = tuple(range(X.ndim - len(self.value_shape), X.ndim))
        return np.sqrt(np.sum(X * X, axis=axes))

    def distance(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if self.kind != "matrix":
            return float(np.linalg.norm(a - b))
        try:
            return float(self.norm(self.log(self.mul(self.inv(a), b))))
        except SingularLog:
            return float(np.linalg.norm(a - b))

    def random_algebra(self, rng, scale=1.0):
        c = rng.normal(size=self.algebra_dim) * scale
        return np.tensordot(c, self.basis, axes=1)

    def random_group(self, rng, scale=1.0):
        return self.exp(self.random_algebra(rng, scale))


def _so_basis(n):
    basis = []
    if n == 2:
        basis.append(np.array([[0.0, -1.0], [1.0, 0.0]]))
    elif n == 3:
        e1 = np.zeros((3, 3))
        e1[2, 1], e1[1, 2] = 1.0, -1.0
        e2 = np.zeros((3, 3))
        e2[0, 2], e2[2, 0] = 1.0, -1.0
        e3 = np.zeros((3, 3))
        e3[1, 0], e3[0, 1] = 1.0, -1.0
        basis = [e1, e2, e3]
    else:
        raise DimensionMismatch("so(n) shipped only for n in {2,3}")
    return np.array(basis)


SO2 = LieGroup("so2", "matrix", 2, _so_basis(2), orthogonal=True)
SO3 = LieGroup("so3", "matrix", 3, _so_basis(3), orthogonal=True)


def translation_group(m):
    return LieGroup("transl%d" % m, "translation", m, np.eye(m))


TRANSL1 = translation_group(1)
TRANSL2 = translation_group(2)
TRANSL3 = translation_group(3)

_GROUPS = {g.name: g for g in (SO2, SO3, TRANSL1, TRANSL2, TRANSL3)}


def group_by_id(name):
    try:
        return _GROUPS[name]
    except KeyError:
        raise DimensionMismatch("unknown group id %r" % name) from None


# ---------------------------------------------------------------------------
# element wrappers


@dataclass(frozen=True)
class AlgebraElement:
    group: LieGroup
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", np.asarray(self.entries, dtype=float))

    @property
    def group_id(self):
        return self.group.name

    def exp(self):
        return GroupElement(self.group, self.group.exp(self.entries))

    def bracket(self, other):
        _same_group(self, other)
        return AlgebraElement(self.group, self.group.bracket(self.entries, other.entries))

    def __add__(self, other):
        _same_group(self, other)
        return AlgebraElement(self.group, self.entries + other.entries)

    def __sub__(self, other):
        _same_group(self, other)
        return AlgebraElement(self.group, self.entries - other.entries)

    def __rmul__(self, c):
        return AlgebraElement(self.group, float(c) * self.entries)

    def norm(self):
        return float(self.group.norm(self.entries))


@dataclass(frozen=True)
class GroupElement:
    group: LieGroup
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", np.asarray(self.entries, dtype=float))

    @property
    def group_id(self):
        return self.group.name

    def __mul__(self, other):
        _same_group(self, other)
        return GroupElement(self.group, self.group.mul(self.entries, other.entries))

    def inverse(self):
        return GroupElement(self.group, self.group.inv(self.entries))

    def adjoint(self, X):
        _same_group(self, X)
        return AlgebraElement(self.group, self.group.adjoint(self.entries, X.entries))

    def log(self):
        return AlgebraElement(self.group, self.group.log(self.entries))


def _same_group(a, b):
    if a.group is not b.group and a.group.name != b.group.name:
        raise DimensionMismatch(
            "mixed groups %r and %r" % (a.group.name, b.group.name)
        )


def exp_map(X: AlgebraElement) -> GroupElement:
    return X.exp()


def log_map(g: GroupElement) -> AlgebraElement:
    return g.log()


def algebra_bracket(X, Y):
    return X.bracket(Y)


def adjoint(g: GroupElement, X: AlgebraElement) -> AlgebraElement:
    return g.adjoint(X)


def group_distance(a, b) -> float:
    _same_group(a, b)
    return a.group.distance(a.entries, b.entries)


# ---------------------------------------------------------------------------
# crossed modules


class CrossedModule:
    """Lie crossed module (G, H, alpha, tau) with derivative data.

    tau(h)->g and dtau(Y)->Z are the homomorphism and its derivative;
    alpha(g,h)->h the action with derivative-at-identity dalpha(g,Y)->Y and
    infinitesimal action dalpha_inf(Z,Y)->Y; orbit_correction(h,Z) is the
    derivative at 0 of t -> h * alpha(exp(tZ))(h^-1), the (Ad(h)-1)Z piece of
    the semidirect adjoint. Missing derivatives fall back to central finite
    differences of the group-level maps (step 1e-6).
    """

    FD_STEP = 1e-6

    def __init__(self, name, G, H, tau, dtau, alpha, dalpha,
                 dalpha_inf=None, orbit_correction=None):
        self.name = name
        self.G = G
        self.H = H
        self.tau = tau
        self.dtau = dtau
        self.alpha = alpha
        self.dalpha = dalpha
        self._dalpha_inf = dalpha_inf
        self._orbit_correction = orbit_correction

    def dalpha_inf(self, Z, Y):
        if self._dalpha_inf is not None:
            return self._dalpha_inf(Z, Y)
        e = self.FD_STEP
        gp = self.G.exp(e * np.asarray(Z))
        gm = self.G.exp(-e * np.asarray(Z))
        return (self.dalpha(gp, Y) - self.dalpha(gm, Y)) / (2 * e)

    def orbit_correction(self, h, Z):
        if self._orbit_correction is not None:
            return self._orbit_correction(h, Z)
        e = self.FD_STEP
        H, G = self.H, self.G
        hinv = H.inv(h)

        def curve(t):
            return H.mul(h, self.alpha(G.exp(t * np.asarray(Z)), hinv))

        return (H.log(curve(e)) - H.log(curve(-e))) / (2 * e)


def ConjugationModule(G):
    """H = G, tau = id, alpha = conjugation."""

    def oc(h, Z):
        return G.adjoint(h, Z) - np.asarray(Z, dtype=float)

    return CrossedModule(
        "conj:%s" % G.name, G, G,
        tau=lambda h: np.asarray(h, dtype=float).copy(),
        dtau=lambda Y: np.asarray(Y, dtype=float).copy(),
        alpha=lambda g, h: G.adjoint(g, h),
        dalpha=lambda g, Y: G.adjoint(g, Y),
        dalpha_inf=lambda Z, Y: G.bracket(Z, Y),
        orbit_correction=oc,
    )


def VectorModule(G, rep=None, drep=None, m=None):
    """H = (R^m, +), tau trivial, alpha = linear representation rho.

    Default representation: the matrix group acting on R^n by its own
    matrices (rep(g) = g), the "vec:so2x2" configuration.
    """
    if rep is None:
        rep = lambda g: np.asarray(g, dtype=float)
        drep = lambda Z: np.asarray(Z, dtype=float)
        m = G.dim
    H = translation_group(m)

    def mv(mat, vec):
        return np.einsum("...ij,...j->...i", mat, np.asarray(vec, dtype=float))

    return CrossedModule(
        "vec:%sx%d" % (G.name, m), G, H,
        tau=lambda h: np.broadcast_to(
            np.eye(G.dim), np.shape(h)[:-1] + (G.dim, G.dim)).copy(),
        dtau=lambda Y: np.zeros(np.shape(Y)[:-1] + (G.dim, G.dim)),
        alpha=lambda g, h: mv(rep(g), h),
        dalpha=lambda g, Y: mv(rep(g), Y),
        dalpha_inf=lambda Z, Y: mv(drep(Z), Y),
        orbit_correction=lambda h, Z: -mv(drep(Z), h),
    )


def AbelianModule():
    """G = (R, +), H = (R^2, +), trivial action and trivial tau.

    The all-translation configuration used by the abelian oracle checks.
    """
    G = TRANSL1
    H = TRANSL2
    return CrossedModule(
        "ab:tr1xtr2", G, H,
        tau=lambda h: np.zeros(np.shape(h)[:-1] + (1,)),
        dtau=lambda Y: np.zeros(np.shape(Y)[:-1] + (1,)),
        alpha=lambda g, h: np.asarray(h, dtype=float).copy(),
        dalpha=lambda g, Y: np.asarray(Y, dtype=float).copy(),
        dalpha_inf=lambda Z, Y: np.zeros(np.shape(Y)),
        orbit_correction=lambda h, Z: np.zeros(np.shape(h)),
    )


def broken_vector_module():
    """VectorModule(SO(2), R^2) with a deliberately wrong tau.

    tau(u) = exp(u_1 J) breaks the first crossed-module axiom; used as the
    negative control in the axiom checks.
    """
    mod = VectorModule(SO2)
    J = SO2.basis[0]

    def tau_bad(h):
        h = np.asarray(h, dtype=float)
        return SO2.exp(h[..., 0, None, None] * J)

    return CrossedModule(
        "broken:" + mod.name, mod.G, mod.H,
        tau=tau_bad,
        dtau=lambda Y: np.asarray(Y, dtype=float)[..., 0, None, None] * J,
        alpha=mod.alpha, dalpha=mod.dalpha,
        dalpha_inf=mod._dalpha_inf, orbit_correction=mod._orbit_correction,
    )


_MODULE_FACTORIES = {
    "conj:so2": lambda: ConjugationModule(SO2),
    "conj:so3": lambda: ConjugationModule(SO3),
    "vec:so2x2": lambda: VectorModule(SO2),
    "ab:tr1xtr2": AbelianModule,
}


def module_by_id(name):
    try:
        return _MODULE_FACTORIES[name]()
    except KeyError:
        raise ModuleMismatch("unknown crossed-module id %r" % name) from None


# ---------------------------------------------------------------------------
# semidirect product helpers on raw (h, g) / (Y, Z) pairs


def sd_identity(mod):
    return (mod.H.identity(), mod.G.identity())


def sd_mul(mod, a, b):
    h1, g1 = a
    h2, g2 = b
    return (mod.H.mul(h1, mod.alpha(g1, h2)), mod.G.mul(g1, g2))


def sd_inv(mod, a):
    h, g = a
    ginv = mod.G.inv(g)
    return (mod.alpha(ginv, mod.H.inv(h)), ginv)


def sd_adjoint(mod, a, xi):
    h, g = a
    Y, Z = xi
    Z1 = mod.G.adjoint(g, Z)
    Y1 = mod.H.adjoint(h, mod.dalpha(g, Y)) + mod.orbit_correction(h, Z1)
    return (Y1, Z1)


def sd_adjoint_fd(mod, a, xi, step=1e-6):
    """Semidirect Ad by central differences of the conjugation curve."""
    Y, Z = xi

    def conj(t):
        b = (mod.H.exp(t * np.asarray(Y)), mod.G.exp(t * np.asarray(Z)))
        return sd_mul(mod, sd_mul(mod, a, b), sd_inv(mod, a))

    hp, gp = conj(step)
    hm, gm = conj(-step)
    return (
        (mod.H.log(hp) - mod.H.log(hm)) / (2 * step),
        (mod.G.log(gp) - mod.G.log(gm)) / (2 * step),
    )


def sd_bracket(mod, xi1, xi2):
    Y1, Z1 = xi1
    Y2, Z2 = xi2
    return (
        mod.H.bracket(Y1, Y2) + mod.dalpha_inf(Z1, Y2) - mod.dalpha_inf(Z2, Y1),
        mod.G.bracket(Z1, Z2),
    )


def sd_distance(mod, a, b):
    return mod.H.distance(a[0], b[0]) + mod.G.distance(a[1], b[1])


def crossed_module_residual(mod, g, h, h2):
    """Residuals of the two crossed-module axioms at (g, h, h2)."""
    g = _raw(g)
    h = _raw(h)
    h2 = _raw(h2)
    r1 = np.linalg.norm(mod.tau(mod.alpha(g, h)) - mod.G.adjoint(g, mod.tau(h)))
    r2 = np.linalg.norm(
        mod.alpha(mod.tau(h), h2) - mod.H.mul(mod.H.mul(h, h2), mod.H.inv(h))
    )
    return float(r1), float(r2)


def derivative_identity_residual(mod, g, Y):
    """|| tau[dalpha(g)Y] - Ad(g) dtau(Y) ||."""
    g = _raw(g)
    Y = _raw(Y)
    return float(np.linalg.norm(
        mod.dtau(mod.dalpha(g, Y)) - mod.G.adjoint(g, mod.dtau(Y))
    ))


def _raw(x):
    if isinstance(x, (GroupElement, AlgebraElement)):
        return x.entries
    return np.asarray(x, dtype=float)


# ---------------------------------------------------------------------------
# semidirect wrappers


@dataclass(frozen=True)
class SemidirectElement:
    module: CrossedModule
    h: GroupElement
    g: GroupElement

    @classmethod
    def from_raw(cls, mod, pair):
        return cls(mod, GroupElement(mod.H, pair[0]), GroupElement(mod.G, pair[1]))

    @property
    def raw(self):
        return (self.h.entries, self.g.entries)

    def multiply(self, other):
        _same_module(self, other)
        return SemidirectElement.from_raw(
            self.module, sd_mul(self.module, self.raw, other.raw))

    def inverse(self):
        return SemidirectElement.from_raw(self.module, sd_inv(self.module, self.raw))

    def adjoint(self, xi):
        _same_module(self, xi)
        Y, Z = sd_adjoint(self.module, self.raw, xi.raw)
        return SemidirectAlgebraElement.from_raw(self.module, (Y, Z))


@dataclass(frozen=True)
class SemidirectAlgebraElement:
    module: CrossedModule
    Y: AlgebraElement
    Z: AlgebraElement

    @classmethod
    def from_raw(cls, mod, pair):
        return cls(mod, AlgebraElement(mod.H, pair[0]), AlgebraElement(mod.G, pair[1]))

    @property
    def raw(self):
        return (self.Y.entries, self.Z.entries)

    def bracket(self, other):
        _same_module(self, other)
        return SemidirectAlgebraElement.from_raw(
            self.module, sd_bracket(self.module, self.raw, other.raw))


def _same_module(a, b):
    if a.module.name != b.module.name:
        raise ModuleMismatch(
            "mixed modules %r and %r" % (a.module.name, b.module.name)
        )


def semidirect_multiply(a, b):
    return a.multiply(b)


def semidirect_inverse(a):
    return a.inverse()


def semidirect_adjoint(a, xi):
    return a.adjoint(xi)


# ---------------------------------------------------------------------------
# second-level module for the higher decoration


@dataclass(frozen=True)
class HigherModule:
    """Crossed module (H x| G, K, alpha2, tau2) on top of a base module."""

    name: str
    base: CrossedModule
    K: LieGroup
    alpha2: callable = None
    dalpha2: callable = None
    tau2: callable = None
    dtau2: callable = None

    def act(self, sd_elem, k):
        if self.alpha2 is None:
            return np.asarray(k, dtype=float).copy()
        return self.alpha2(sd_elem, k)

    def dact(self, sd_elem, Yk):
        if self.dalpha2 is None:
            return np.asarray(Yk, dtype=float).copy()
        return self.dalpha2(sd_elem, Yk)

    def tau2_map(self, k):
        if self.tau2 is None:
            return sd_identity(self.base)
        return self.tau2(k)

    def dtau2_map(self, Yk):
        if self.dtau2 is None:
            return (np.zeros(self.base.H.value_shape),
                    np.zeros(self.base.G.value_shape))
        return self.dtau2(Yk)


def higher_module_by_id(name, base):
    if name == "k:r1":
        return HigherModule("k:r1", base, TRANSL1)
    raise ModuleMismatch("unknown higher-module id %r" % name)
