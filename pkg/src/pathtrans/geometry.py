"""Chart domains, algebra-valued forms on the base, finite-difference
exterior calculus, and equivariant lifts to the trivialized bundle M x G.

Form evaluators are vectorized: x, v, w carry any common batch shape on the
leading axes and the returned algebra values carry the same batch shape.
"""
from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import DimensionMismatch, OutOfChart

FD_REL_STEP = 1e-5  # times chart diameter, per the fd design choice


@dataclass(frozen=True)
class ChartDomain:
    dim: int
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", np.asarray(self.lo, dtype=float))
        object.__setattr__(self, "hi", np.asarray(self.hi, dtype=float))
        if not np.all(self.hi > self.lo):
            raise DimensionMismatch("chart box must have nonempty interior")

    @property
    def diameter(self):
        return float(np.linalg.norm(self.hi - self.lo))

    @property
    def fd_step(self):
        return FD_REL_STEP * self.diameter

    def contains(self, x, slack=0.0):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo - slack) and np.all(x <= self.hi + slack))

    def require(self, x, slack=None):
        if slack is None:
            slack = 2 * self.fd_step
        if not self.contains(x, slack=-slack if slack < 0 else slack):
            raise OutOfChart("point outside chart domain")


def default_chart(dim=2, half=3.0):
    return ChartDomain(dim, -half * np.ones(dim), half * np.ones(dim))


class BaseOneForm:
    """Algebra-valued 1-form on the chart: evaluator (x, v) -> value."""

    def __init__(self, evaluator, target, chart, name="custom", is_zero=False):
        self.evaluator = evaluator
        self.target = target  # LieGroup whose algebra holds the values
        self.chart = chart
        self.name = name
        self.is_zero = is_zero

    def __call__(self, x, v):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.is_zero:
            return np.zeros(x.shape[:-1] + self.target.value_shape)
        return self.evaluator(x, v)


class BaseTwoForm:
    """Algebra-valued 2-form on the chart: evaluator (x, v, w) -> value."""

    def __init__(self, evaluator, target, chart, name="custom", is_zero=False):
        self.evaluator = evaluator
        self.target = target
        self.chart = chart
        self.name = name
        self.is_zero = is_zero

    def __call__(self, x, v, w):
        x = np.asarray(x, dtype=float)
        if self.is_zero:
            return np.zeros(x.shape[:-1] + self.target.value_shape)
        return self.evaluator(x, np.asarray(v, dtype=float), np.asarray(w, dtype=float))


def zero_one_form(target, chart):
    return BaseOneForm(None, target, chart, name="zero", is_zero=True)


def zero_two_form(target, chart):
    return BaseTwoForm(None, target, chart, name="zero", is_zero=True)


# ---------------------------------------------------------------------------
# finite-difference exterior calculus


def exterior_derivative(c, x, v, w, step=None):
    """dC(v, w) = v[C(w)] - w[C(v)] for constant-extended v, w."""
    if step is None:
        step = c.chart.fd_step
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    dv = (c(x + step * v, w) - c(x - step * v, w)) / (2 * step)
    dw = (c(x + step * w, v) - c(x - step * w, v)) / (2 * step)
    return dv - dw


def wedge_bracket(c, x, v, w):
    """[C wedge C]/2 contracted on (v, w): [C(v), C(w)]."""
    return c.target.bracket(c(x, v), c(x, w))


def curvature(a, x, v, w, step=None):
    """F = da + [a, a] contracted on (v, w)."""
    return exterior_derivative(a, x, v, w, step=step) + wedge_bracket(a, x, v, w)


def curvature_two_form(a):
    return BaseTwoForm(lambda x, v, w: curvature(a, x, v, w), a.target, a.chart,
                       name="curv(%s)" % a.name, is_zero=a.is_zero)


# ---------------------------------------------------------------------------
# equivariant lifts to M x G
#
# act(g, val) applies the structure-group action on algebra values: Ad for
# L(G)-valued forms, the alpha-action derivative for L(H)-valued forms.


class BundleOneForm:
    """1-form on M x G: evaluator (x, g, v, W) -> algebra value."""

    def __init__(self, evaluator, target, name="custom", is_zero=False):
        self.evaluator = evaluator
        self.target = target
        self.name = name
        self.is_zero = is_zero

    def __call__(self, x, g, v, W):
        if self.is_zero:
            return np.zeros(np.asarray(x).shape[:-1] + self.target.value_shape)
        return self.evaluator(x, g, v, W)


class BundleTwoForm:
    """2-form on M x G: evaluator (x, g, v, W, w, W2) -> algebra value."""

    def __init__(self, evaluator, target, name="custom", is_zero=False):
        self.evaluator = evaluator
        self.target = target
        self.name = name
        self.is_zero = is_zero

    def __call__(self, x, g, v, W, w, W2):
        if self.is_zero:
            return np.zeros(np.asarray(x).shape[:-1] + self.target.value_shape)
        return self.evaluator(x, g, v, W, w, W2)


def equivariant_lift_1(c, act, inv):
    """Lift a base 1-form: (x, g, (v, W)) -> act(g^-1, c_x(v)).

    Exactly zero on vertical tangents and exactly equivariant. act is the
    action of a group element on target-algebra values, inv the group inverse.
    """
    def ev(x, g, v, W):
        return act(inv(g), c(x, v))

    return BundleOneForm(ev, c.target, name="lift(%s)" % c.name, is_zero=c.is_zero)


def equivariant_lift_2(b, act, inv):
    def ev(x, g, v, W, w, W2):
        return act(inv(g), b(x, v, w))

    return BundleTwoForm(ev, b.target, name="lift(%s)" % b.name, is_zero=b.is_zero)


def connection_eval(a, x, g, v, W, adjoint, inv):
    """Trivialized connection value Ad(g^-1) a_x(v) + W."""
    return adjoint(inv(g), a(x, v)) + np.asarray(W, dtype=float)


# ---------------------------------------------------------------------------
# preset library


def _parse_gen(group, token):
    k = int(token)
    if not 0 <= k < group.algebra_dim:
        raise DimensionMismatch("generator index %d out of range" % k)
    return group.basis[k]


def form_preset_1(spec, target, chart):
    """Named 1-form presets.

    zero                      the zero form
    const:<k>[:<i>]           basis[k] * dx_i          (i 1-based, default 1)
    x1dx2:<k>                 x_1 * basis[k] * dx_2
    gauss:<k>:<amp>:<width>[:<i>]   amp * exp(-|x|^2/width^2) * basis[k] * dx_i
                                    (default dx_2)
    """
    parts = str(spec).split(":")
    head = parts[0]
    if head == "zero":
        return zero_one_form(target, chart)
    if head == "const":
        gen = _parse_gen(target, parts[1])
        i = int(parts[2]) - 1 if len(parts) > 2 else 0
        return BaseOneForm(lambda x, v: _scal(v[..., i], gen), target, chart,
                           name=str(spec))
    if head == "x1dx2":
        gen = _parse_gen(target, parts[1])
        return BaseOneForm(lambda x, v: _scal(x[..., 0] * v[..., 1], gen),
                           target, chart, name=str(spec))
    if head == "gauss":
        gen = _parse_gen(target, parts[1])
        amp = float(parts[2])
        width = float(parts[3])
        i = int(parts[4]) - 1 if len(parts) > 4 else 1

        def ev(x, v):
            r2 = np.sum(x * x, axis=-1)
            return _scal(amp * np.exp(-r2 / width ** 2) * v[..., i], gen)

        return BaseOneForm(ev, target, chart, name=str(spec))
    raise DimensionMismatch("unknown 1-form preset %r" % spec)


def form_preset_2(spec, target, chart):
    """Named 2-form presets.

    zero                      the zero form
    dx1dx2:<k>                basis[k] * dx_1 ^ dx_2
    gauss2:<k>:<amp>:<width>  amp * exp(-|x|^2/width^2) * basis[k] * dx_1 ^ dx_2
    """
    parts = str(spec).split(":")
    head = parts[0]
    if head == "zero":
        return zero_two_form(target, chart)
    if head == "dx1dx2":
        gen = _parse_gen(target, parts[1])

        def ev(x, v, w):
            area = v[..., 0] * w[..., 1] - v[..., 1] * w[..., 0]
            return _scal(area, gen)

        return BaseTwoForm(ev, target, chart, name=str(spec))
    if head == "gauss2":
        gen = _parse_gen(target, parts[1])
        amp = float(parts[2])
        width = float(parts[3])

        def ev(x, v, w):
            area = v[..., 0] * w[..., 1] - v[..., 1] * w[..., 0]
            r2 = np.sum(x * x, axis=-1)
            return _scal(amp * np.exp(-r2 / width ** 2) * area, gen)

        return BaseTwoForm(ev, target, chart, name=str(spec))
    raise DimensionMismatch("unknown 2-form preset %r" % spec)


def _scal(coeff, gen):
    coeff = np.asarray(coeff, dtype=float)
    return coeff.reshape(coeff.shape + (1,) * gen.ndim) * gen


def add_one_forms(c1, c2, name=None):
    if c1.is_zero:
        return c2
    if c2.is_zero:
        return c1
    return BaseOneForm(lambda x, v: c1(x, v) + c2(x, v), c1.target, c1.chart,
                       name=name or "%s+%s" % (c1.name, c2.name))


def scale_two_form(b, factor):
    if b.is_zero:
        return b
    return BaseTwoForm(lambda x, v, w: factor * b(x, v, w), b.target, b.chart,
                       name="%g*%s" % (factor, b.name))


def map_one_form(c, fn, target, name=None):
    """Post-compose the values of a 1-form with a linear map fn."""
    if c.is_zero:
        return zero_one_form(target, c.chart)
    return BaseOneForm(lambda x, v: fn(c(x, v)), target, c.chart,
                       name=name or "map(%s)" % c.name)
