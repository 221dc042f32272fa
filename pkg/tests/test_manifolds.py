"""Embedded manifolds: projectors, geodesics, transport, local additions.

The integrated routes (RK4 with reprojection) are checked against the
closed-form maps, and the closed forms against independently coded oracles
(great-circle formulas, rotation matrices, angle arithmetic).
"""

import numpy as np
import pytest

from loopspace_lab.errors import (
    IntegrationDiverged,
    OffManifold,
    OutOfInjectivityDomain,
    OutOfV,
    OutsideTube,
    ShootingFailed,
)
from loopspace_lab.manifolds import (
    Flat,
    FlatTorus2,
    LocalAdditionSpec,
    Sphere2,
    TangentAtPoint,
    exp_map,
    integrate_geodesic,
    local_addition,
    local_addition_inv,
    log_by_shooting,
    log_map,
    manifold_from_tag,
    parallel_transport,
    project_tangent,
    random_tangent,
    tubular_projection,
)

SPHERE = Sphere2()
TORUS = FlatTorus2()
NORTH = np.array([0.0, 0.0, 1.0])


def great_circle_exp(p, v):
    """Independent oracle: exp on the round sphere by the geodesic formula."""
    theta = np.linalg.norm(v)
    if theta == 0:
        return p.copy()
    return np.cos(theta) * p + np.sin(theta) * v / theta


def rotation_about_axis(axis, angle):
    axis = axis / np.linalg.norm(axis)
    K = np.array([[0, -axis[2], axis[1]],
                  [axis[2], 0, -axis[0]],
                  [-axis[1], axis[0], 0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * (K @ K)


class TestProjectors:
    @pytest.mark.parametrize("manifold", [Flat(3), SPHERE, TORUS])
    def test_projector_symmetric_idempotent_trace(self, manifold):
        rng = np.random.default_rng(0)
        for _ in range(10):
            p = manifold.random_point(rng)
            lam = manifold.tangent_projector(p)
            assert np.max(np.abs(lam - lam.T)) < 1e-12
            assert np.max(np.abs(lam @ lam - lam)) < 1e-10
            assert abs(np.trace(lam) - manifold.intrinsic_dim) < 1e-10
            assert manifold.constraint_residual(p) < 1e-10

    def test_project_tangent_closed_form(self):
        out = project_tangent(SPHERE, NORTH, np.array([1.0, 2.0, 3.0]))
        assert np.max(np.abs(out.vector - [1.0, 2.0, 0.0])) < 1e-14

    def test_normal_direction_killed(self):
        rng = np.random.default_rng(1)
        p = SPHERE.random_point(rng)
        out = project_tangent(SPHERE, p, 2.7 * p)
        assert np.max(np.abs(out.vector)) < 1e-12

    def test_flat_projection_is_identity(self):
        flat = Flat(4)
        w = np.arange(4.0)
        out = project_tangent(flat, np.zeros(4), w)
        assert np.array_equal(out.vector, w)

    def test_off_manifold_rejected(self):
        with pytest.raises(OffManifold):
            project_tangent(SPHERE, np.array([0.0, 0.0, 1.5]), np.ones(3))

    def test_projector_derivative_matches_finite_differences(self):
        rng = np.random.default_rng(2)
        for manifold in (SPHERE, TORUS):
            p = manifold.random_point(rng)
            w = random_tangent(manifold, rng, p).vector
            h = 1e-6
            fd = (manifold.tangent_projector(p + h * w)
                  - manifold.tangent_projector(p - h * w)) / (2 * h)
            exact = manifold.projector_derivative(p, w)
            assert np.max(np.abs(fd - exact)) < 1e-7


class TestExpMap:
    def test_quarter_circle(self):
        v = TangentAtPoint(SPHERE, NORTH, np.array([np.pi / 2, 0.0, 0.0]))
        out = exp_map(SPHERE, v, steps=200)
        assert np.max(np.abs(out - [1.0, 0.0, 0.0])) < 1e-8

    def test_zero_vector(self):
        p = SPHERE.random_point(np.random.default_rng(3))
        out = exp_map(SPHERE, TangentAtPoint(SPHERE, p, np.zeros(3)))
        assert np.max(np.abs(out - p)) < 1e-14

    def test_flat_is_translation(self):
        flat = Flat(3)
        p, v = np.ones(3), np.array([1.0, -2.0, 0.5])
        out = exp_map(flat, TangentAtPoint(flat, p, v), steps=10)
        assert np.max(np.abs(out - (p + v))) < 1e-12

    def test_integrated_matches_oracle(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            p = SPHERE.random_point(rng)
            v = random_tangent(SPHERE, rng, p)
            v = TangentAtPoint(SPHERE, p, v.vector / max(v.norm, 1e-9)
                               * rng.uniform(0.1, np.pi - 0.1))
            out = exp_map(SPHERE, v, steps=200)
            assert np.max(np.abs(out - great_circle_exp(p, v.vector))) < 1e-7

    def test_closed_form_matches_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            p = SPHERE.random_point(rng)
            v = random_tangent(SPHERE, rng, p, 1.2)
            assert np.max(np.abs(SPHERE.exp(p, v.vector)
                                 - great_circle_exp(p, v.vector))) < 1e-13

    def test_constant_speed(self):
        rng = np.random.default_rng(6)
        p = SPHERE.random_point(rng)
        v = random_tangent(SPHERE, rng, p, 0.8)
        for t in (0.25, 0.5, 0.75, 1.0):
            _, vel = integrate_geodesic(SPHERE, p, v.vector, t, 200)
            assert abs(np.linalg.norm(vel) - v.norm) < 1e-7

    def test_wild_velocity_diverges(self):
        v = TangentAtPoint(SPHERE, NORTH, np.array([40.0, 0.0, 0.0]))
        with pytest.raises(IntegrationDiverged):
            exp_map(SPHERE, v, steps=8)

    def test_torus_wraps_each_circle(self):
        p = TORUS.random_point(np.random.default_rng(7))
        f1, f2 = TORUS._frame(p)
        v = TangentAtPoint(TORUS, p, 0.7 * f1 - 0.3 * f2)
        out = exp_map(TORUS, v, steps=200)
        assert np.max(np.abs(out - TORUS.exp(p, v.vector))) < 1e-8


class TestLogMap:
    def test_sphere_quarter(self):
        out = log_map(SPHERE, NORTH, np.array([1.0, 0.0, 0.0]))
        assert np.max(np.abs(out.vector - [np.pi / 2, 0.0, 0.0])) < 1e-12

    def test_same_point(self):
        p = SPHERE.random_point(np.random.default_rng(8))
        assert np.max(np.abs(log_map(SPHERE, p, p).vector)) < 1e-12

    def test_flat_difference(self):
        flat = Flat(2)
        out = log_map(flat, np.array([1.0, 1.0]), np.array([4.0, -1.0]))
        assert np.array_equal(out.vector, [3.0, -2.0])

    def test_inverse_of_exp(self):
        rng = np.random.default_rng(9)
        for manifold in (SPHERE, TORUS, Flat(3)):
            for _ in range(10):
                p = manifold.random_point(rng)
                v = random_tangent(manifold, rng, p, 0.8)
                q = manifold.exp(p, v.vector)
                back = log_map(manifold, p, q)
                assert np.max(np.abs(back.vector - v.vector)) < 1e-10

    def test_antipodes_rejected(self):
        with pytest.raises(OutOfInjectivityDomain):
            log_map(SPHERE, NORTH, -NORTH)
        p = TORUS.random_point(np.random.default_rng(10))
        f1, _ = TORUS._frame(p)
        q = TORUS.exp(p, np.pi * f1)
        with pytest.raises(OutOfInjectivityDomain):
            log_map(TORUS, p, q)

    def test_shooting_agrees_with_closed_form(self):
        # independent route: iterate the integrated exponential
        rng = np.random.default_rng(11)
        for _ in range(5):
            p = SPHERE.random_point(rng)
            v = random_tangent(SPHERE, rng, p)
            v = TangentAtPoint(SPHERE, p, v.vector / max(v.norm, 1e-9)
                               * rng.uniform(0.2, 1.4))
            q = great_circle_exp(p, v.vector)
            shot = log_by_shooting(SPHERE, p, q, steps=100)
            assert np.max(np.abs(shot.vector - v.vector)) < 1e-7

    def test_shooting_gives_up(self):
        with pytest.raises(ShootingFailed):
            log_by_shooting(SPHERE, NORTH, np.array([1.0, 0.0, 0.0]), max_iter=1)


class TestParallelTransport:
    def quarter_circle_path(self, steps=200):
        th = np.linspace(0, np.pi / 2, steps + 1)
        return np.stack([np.sin(th), np.zeros_like(th), np.cos(th)], axis=-1)

    def test_flat_transport_fixes_vectors(self):
        flat = Flat(3)
        path = np.linspace([0, 0, 0], [3.0, 1.0, -2.0], 50)
        v = TangentAtPoint(flat, path[0], np.array([1.0, 2.0, 3.0]))
        out = parallel_transport(flat, path, v)
        assert np.max(np.abs(out.vector - v.vector)) < 1e-12

    def test_normal_vector_is_fixed(self):
        path = self.quarter_circle_path()
        v = TangentAtPoint(SPHERE, path[0], np.array([0.0, 1.0, 0.0]))
        out = parallel_transport(SPHERE, path, v)
        assert np.max(np.abs(out.vector - [0.0, 1.0, 0.0])) < 1e-8

    def test_rotation_oracle(self):
        # transport along the xz great circle is rotation about the y axis
        path = self.quarter_circle_path()
        v = TangentAtPoint(SPHERE, path[0], np.array([1.0, 0.0, 0.0]))
        out = parallel_transport(SPHERE, path, v)
        expected = rotation_about_axis(np.array([0.0, 1.0, 0.0]), np.pi / 2) @ v.vector
        assert np.max(np.abs(out.vector - expected)) < 1e-8
        assert np.max(np.abs(out.vector - [0.0, 0.0, -1.0])) < 1e-8

    def test_isometry_of_pairs(self):
        rng = np.random.default_rng(12)
        p = NORTH
        traj = integrate_geodesic(SPHERE, p, np.array([0.9, 0.4, 0.0]), 1.0, 200,
                                  record=True)
        v = random_tangent(SPHERE, rng, p)
        w = random_tangent(SPHERE, rng, p)
        pv = parallel_transport(SPHERE, traj, v)
        pw = parallel_transport(SPHERE, traj, w)
        assert abs(pv.vector @ pw.vector - v.vector @ w.vector) < 1e-8

    def test_closed_form_transport_matches_integrated(self):
        rng = np.random.default_rng(13)
        for manifold in (SPHERE, TORUS):
            p = manifold.random_point(rng)
            u = random_tangent(manifold, rng, p, 0.9)
            w = random_tangent(manifold, rng, p, 1.1)
            traj = integrate_geodesic(manifold, p, u.vector, 1.0, 200, record=True)
            integrated = parallel_transport(manifold, traj, w)
            closed = manifold.geodesic_transport(p, u.vector, w.vector)
            assert np.max(np.abs(integrated.vector - closed)) < 1e-7

    def test_diverging_path_rejected(self):
        path = self.quarter_circle_path(20)
        path[7] *= 1.5  # push one node off the sphere
        v = TangentAtPoint(SPHERE, path[0], np.array([0.0, 1.0, 0.0]))
        with pytest.raises(IntegrationDiverged):
            parallel_transport(SPHERE, path, v)


class TestLocalAddition:
    def test_zero_section_identity(self):
        rng = np.random.default_rng(14)
        for manifold in (Flat(2), SPHERE, TORUS):
            spec = LocalAdditionSpec(manifold)
            p = manifold.random_point(rng)
            v = TangentAtPoint(manifold, p, np.zeros(manifold.ambient_dim))
            assert np.max(np.abs(local_addition(spec, v) - p)) == 0.0

    def test_flat_line_compression_value(self):
        flat = Flat(1)
        spec = LocalAdditionSpec(flat, 1.0)
        v = TangentAtPoint(flat, np.zeros(1), np.ones(1))
        out = local_addition(spec, v)
        assert abs(out[0] - 0.70710678) < 1e-8
        assert abs(out[0] - 1 / np.sqrt(2)) < 1e-12

    def test_roundtrip_large_vectors(self):
        rng = np.random.default_rng(15)
        for manifold in (Flat(3), SPHERE):
            spec = LocalAdditionSpec(manifold)
            for _ in range(50):
                p = manifold.random_point(rng)
                v = random_tangent(manifold, rng, p)
                v = TangentAtPoint(manifold, p,
                                   v.vector / max(v.norm, 1e-9) * rng.uniform(0, 10))
                q = local_addition(spec, v)
                back = local_addition_inv(spec, p, q)
                assert np.max(np.abs(back.vector - v.vector)) < 1e-7

    def test_compressed_radius_bound(self):
        spec = LocalAdditionSpec(SPHERE)
        rng = np.random.default_rng(16)
        for _ in range(20):
            v = rng.normal(size=3) * rng.uniform(0, 100)
            assert np.linalg.norm(spec.compress(v)) < spec.epsilon

    def test_injective_per_fiber(self):
        rng = np.random.default_rng(17)
        for manifold in (Flat(2), SPHERE):
            spec = LocalAdditionSpec(manifold)
            p = manifold.random_point(rng)
            for _ in range(1000):
                v = random_tangent(manifold, rng, p, 2.0).vector
                w = random_tangent(manifold, rng, p, 2.0).vector
                if np.linalg.norm(v - w) < 1e-3:
                    continue
                dq = np.linalg.norm(spec.forward(p, v) - spec.forward(p, w))
                assert dq >= 1e-6

    def test_out_of_reach_rejected(self):
        spec = LocalAdditionSpec(SPHERE)
        with pytest.raises(OutOfV):
            local_addition_inv(spec, NORTH, np.array([0.0, 0.0, -1.0]))


class TestTubularProjection:
    def test_sphere_radial(self):
        out = tubular_projection(SPHERE, np.array([0.0, 0.0, 2.0]))
        assert np.max(np.abs(out - NORTH)) < 1e-14

    def test_already_on_manifold(self):
        p = SPHERE.random_point(np.random.default_rng(18))
        assert np.max(np.abs(tubular_projection(SPHERE, p) - p)) < 1e-14

    def test_flat_identity(self):
        x = np.array([3.0, -1.0])
        assert np.array_equal(tubular_projection(Flat(2), x), x)

    def test_residual_is_orthogonal(self):
        rng = np.random.default_rng(19)
        for manifold in (SPHERE, TORUS):
            p = manifold.random_point(rng)
            x = p + 0.3 * rng.normal(size=manifold.ambient_dim)
            q = tubular_projection(manifold, x)
            residual = x - q
            assert np.max(np.abs(manifold.project_tangent_vector(q, residual))) < 1e-8

    def test_outside_tube_rejected(self):
        with pytest.raises(OutsideTube):
            tubular_projection(SPHERE, np.array([0.0, 0.0, 0.05]))
        with pytest.raises(OutsideTube):
            tubular_projection(TORUS, np.zeros(4))


class TestTags:
    def test_round_trip_tags(self):
        for tag in ("flat:5", "sphere2", "torus2"):
            assert manifold_from_tag(tag).kind == tag

    def test_unknown_tag(self):
        with pytest.raises(ValueError):
            manifold_from_tag("hyperbolic3")
