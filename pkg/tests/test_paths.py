"""Path containers, lifts, transports and holonomy tests."""

import numpy as np
import pytest

from pathtrans.errors import GridMismatch, NonComposable, NotALoop
from pathtrans.geometry import (default_chart, form_preset_1, zero_one_form)
from pathtrans.lie import SO3, TRANSL1
from pathtrans.paths import (SampledPath, compose_paths, connection_change,
                             horizontal_lift, loop_holonomy, normalize_path,
                             path_from_map, segment_path, sheet_family,
                             square_loop, tangency_residual)

CHART = default_chart()


class TestContainers:
    def test_segment_endpoints(self):
        p = segment_path((0.0, 0.0), (1.0, 2.0), 50)
        assert np.allclose(p.points[0], [0, 0])
        assert np.allclose(p.points[-1], [1, 2])
        assert p.n_nodes == 51

    def test_sitting_margins(self):
        # derivatives vanish identically near both parameter ends
        p = segment_path((0.0, 0.0), (1.0, 0.0), 100)
        d = p.derivative()
        assert np.max(np.abs(d[:3])) < 1e-12
        assert np.max(np.abs(d[-3:])) < 1e-12

    def test_square_loop_closed(self):
        p = square_loop(0.5, 32)
        assert np.allclose(p.points[0], p.points[-1])
        assert p.n_nodes == 4 * 32 + 1

    def test_compose_grid_mismatch(self):
        p1 = segment_path((0.0, 0.0), (1.0, 0.0), 40)
        p2 = segment_path((1.0, 0.0), (1.0, 1.0), 50)
        with pytest.raises(GridMismatch):
            compose_paths(p1, p2)

    def test_compose_endpoint_mismatch(self):
        p1 = segment_path((0.0, 0.0), (1.0, 0.0), 40)
        p2 = segment_path((2.0, 0.0), (2.0, 1.0), 40)
        with pytest.raises(NonComposable):
            compose_paths(p1, p2)

    def test_compose_concatenates(self):
        p1 = segment_path((0.0, 0.0), (1.0, 0.0), 40)
        p2 = segment_path((1.0, 0.0), (1.0, 1.0), 40)
        p = compose_paths(p1, p2)
        assert p.n_nodes == 81
        assert np.allclose(p.points[-1], [1, 1])

    def test_normalize(self):
        p = SampledPath(segment_path((0, 0), (1, 0), 40).points, 0.05,
                        t0=2.0, t1=4.0)
        q = normalize_path(p)
        assert q.t0 == 0.0 and q.t1 == 1.0

    def test_family_rows(self):
        fam = sheet_family((0.0, 0.0), (1.0, 1.0), 30, 20)
        assert fam.points.shape == (21, 31, 2)
        assert np.allclose(fam.row(0).points[:, 1], 0.0)


class TestLifts:
    def test_flat_lift_is_constant(self):
        abar = zero_one_form(SO3, CHART)
        p = segment_path((0.0, 0.0), (1.0, 0.0), 60)
        lift = horizontal_lift(abar, p, SO3.identity(), SO3)
        assert np.max(np.abs(lift.fiber - np.eye(3))) == 0.0

    def test_lift_stays_on_group(self):
        abar = form_preset_1("gauss:0:0.5:1.5", SO3, CHART)
        p = path_from_map(lambda r: np.stack(
            [r - 0.5, 0.4 * np.sin(np.pi * r)], axis=-1), 80)
        lift = horizontal_lift(abar, p, SO3.identity(), SO3)
        assert SO3.group_residual(lift.fiber) < 1e-12

    def test_lift_tangency(self):
        from pathtrans.paths import tangent_lift, tangent_from_map
        abar = form_preset_1("gauss:0:0.5:1.5", SO3, CHART)
        p = path_from_map(lambda r: np.stack(
            [r - 0.5, 0.4 * np.sin(np.pi * r)], axis=-1), 201)
        lift = horizontal_lift(abar, p, SO3.identity(), SO3)
        v = tangent_from_map(lambda r: np.stack(
            [0.3 * np.sin(np.pi * r), 0.2 * r * (1 - r)], axis=-1), p)
        vbar = tangent_lift(abar, lift, v, (v[0], SO3.zero()))
        assert tangency_residual(abar, lift, vbar) < 1e-4

    def test_connection_change_roundtrip(self):
        abar1 = form_preset_1("gauss:0:0.5:1.5", SO3, CHART)
        abar2 = form_preset_1("gauss:1:0.3:1.2", SO3, CHART)
        p = segment_path((-0.5, -0.2), (0.8, 0.4), 100)
        lift1 = horizontal_lift(abar1, p, SO3.identity(), SO3)
        lift2, ratio = connection_change(abar1, abar2, lift1)
        rebuilt = lift1.fiber @ ratio
        assert np.max(np.abs(rebuilt - lift2.fiber)) < 1e-12


class TestHolonomy:
    def test_translation_holonomy_closed_form(self):
        # hand value: for the connection x1 dx2 on a translation bundle the
        # lift solves gdot = -A(gamma'), so the loop holonomy equals minus
        # the enclosed area (Green's theorem), here -(0.6)^2
        abar = form_preset_1("x1dx2:0", TRANSL1, CHART)
        loop = square_loop(0.6, 64)
        hol = loop_holonomy(abar, loop, TRANSL1.identity(), TRANSL1)
        assert abs(float(hol[0]) + 0.36) < 1e-9

    def test_not_a_loop(self):
        abar = zero_one_form(SO3, CHART)
        p = segment_path((0.0, 0.0), (1.0, 0.0), 40)
        with pytest.raises(NotALoop):
            loop_holonomy(abar, p, SO3.identity(), SO3)

    def test_flat_holonomy_trivial(self):
        abar = zero_one_form(SO3, CHART)
        loop = square_loop(0.5, 32)
        hol = loop_holonomy(abar, loop, SO3.identity(), SO3)
        assert np.max(np.abs(hol - np.eye(3))) == 0.0
