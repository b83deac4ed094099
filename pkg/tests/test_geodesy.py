import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghar import geodesy as g
from ghar.errors import DomainError

A = 6378137.0
F = 1 / 298.257223563
E2 = F * (2 - F)


def identity_pose(lat, lon, alt):
    return g.GeoPose(lat, lon, alt, g.UnitQuaternion.identity())


class TestGeodeticEcef:
    def test_equator_prime_meridian(self):
        p = g.geodetic_to_ecef(0, 0, 0)
        assert (p.x, p.y, p.z) == pytest.approx((A, 0, 0), abs=1e-9)

    def test_equator_lon90(self):
        p = g.geodetic_to_ecef(0, 90, 0)
        assert (p.x, p.y, p.z) == pytest.approx((0, A, 0), abs=1e-6)

    def test_north_pole(self):
        # b = a (1 - f), evaluated independently
        b = A * (1 - F)
        p = g.geodetic_to_ecef(90, 0, 0)
        assert (p.x, p.y, p.z) == pytest.approx((0, 0, b), abs=1e-6)

    def test_out_of_range_latitude(self):
        with pytest.raises(DomainError):
            g.geodetic_to_ecef(91, 0, 0)

    def test_inverse_identity_case(self):
        lat, lon, alt = g.ecef_to_geodetic(g.EcefPoint(A, 0, 0))
        assert (lat, lon, alt) == pytest.approx((0, 0, 0), abs=1e-9)

    def test_inverse_round_trip(self):
        p = g.geodetic_to_ecef(47.1, 8.6, 450)
        lat, lon, alt = g.ecef_to_geodetic(p)
        assert lat == pytest.approx(47.1, abs=1e-6)
        assert lon == pytest.approx(8.6, abs=1e-6)
        assert alt == pytest.approx(450, abs=1e-6)

    def test_polar_inverse(self):
        lat, lon, alt = g.ecef_to_geodetic(g.EcefPoint(0, 0, 6356752.314245))
        assert lat == pytest.approx(90.0, abs=1e-9)
        assert lon == 0.0  # convention for the undefined polar longitude
        assert alt == pytest.approx(0.0, abs=1e-6)

    def test_near_center_rejected(self):
        with pytest.raises(DomainError):
            g.ecef_to_geodetic(g.EcefPoint(0, 0, 0))

    def test_round_trip_10k_samples(self):
        rng = np.random.default_rng(42)
        worst = 0.0
        for _ in range(10000):
            lat = rng.uniform(-90, 90)
            lon = rng.uniform(-179.999, 180)
            alt = rng.uniform(-10e3, 10e3)
            p = g.geodetic_to_ecef(lat, lon, alt)
            p2 = g.geodetic_to_ecef(*g.ecef_to_geodetic(p))
            worst = max(worst, math.dist((p.x, p.y, p.z), (p2.x, p2.y, p2.z)))
        assert worst < 1e-6


class TestEnu:
    def test_basis_at_origin(self):
        r = g.enu_rotation_at(identity_pose(0, 0, 0))
        assert np.allclose(r[0], (0, 1, 0), atol=1e-12)
        assert np.allclose(r[1], (0, 0, 1), atol=1e-12)
        assert np.allclose(r[2], (1, 0, 0), atol=1e-12)

    def test_orthonormal_everywhere(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            r = np.array(g.enu_rotation_at(identity_pose(rng.uniform(-90, 90), rng.uniform(-179, 180), 0)))
            assert np.abs(r @ r.T - np.eye(3)).max() < 1e-12

    def test_up_at_poles(self):
        up_n = g.enu_rotation_at(identity_pose(90, 0, 0))[2]
        up_s = g.enu_rotation_at(identity_pose(-90, 0, 0))[2]
        assert np.allclose(up_n, (0, 0, 1), atol=1e-12)
        assert np.allclose(up_s, (0, 0, -1), atol=1e-12)

    def test_identity_point(self):
        o = identity_pose(12.3, 45.6, 78.9)
        v = g.geodetic_to_enu(o, o)
        assert (v.east, v.north, v.up) == pytest.approx((0, 0, 0), abs=1e-9)

    def test_pure_altitude_offset(self):
        o = identity_pose(0, 0, 0)
        p = identity_pose(0, 0, 100)
        v = g.geodetic_to_enu(p, o)
        assert (v.east, v.north, v.up) == pytest.approx((0, 0, 100), abs=1e-9)

    def test_small_northward_offset(self):
        # oracle: meridian radius of curvature M = a(1-e^2)/(1-e^2 sin^2)^1.5
        m = A * (1 - E2)  # at the equator
        expected_north = m * math.radians(1e-4)
        o = identity_pose(0, 0, 0)
        p = identity_pose(1e-4, 0, 0)
        v = g.geodetic_to_enu(p, o)
        assert v.north == pytest.approx(expected_north, rel=1e-6)
        assert abs(v.east) < 1e-9

    def test_enu_inverse(self):
        o = identity_pose(31.2, 121.5, 20)
        lat, lon, alt = g.enu_to_geodetic(g.EnuVector(100, -200, 50), o)
        v = g.geodetic_to_enu(identity_pose(lat, lon, alt), o)
        assert (v.east, v.north, v.up) == pytest.approx((100, -200, 50), abs=1e-6)


class TestQuaternion:
    def test_heading_180_is_identity(self):
        q = g.heading_to_quaternion(180)
        assert q.approx_equal(g.UnitQuaternion.identity())

    def test_heading_0_is_half_turn(self):
        q = g.heading_to_quaternion(0).canonical()
        assert abs(q.w) < 1e-12
        assert abs(abs(q.z) - 1) < 1e-12

    def test_heading_90_is_quarter_turn(self):
        q = g.heading_to_quaternion(90)
        expected = g.UnitQuaternion.from_axis_angle((0, 0, 1), math.radians(90))
        assert q.approx_equal(expected)

    def test_heading_round_trip(self):
        for theta in (0, 37.5, 90, 180, 271.25, 359.9):
            assert g.quaternion_to_heading(g.heading_to_quaternion(theta)) == pytest.approx(
                theta % 360, abs=1e-9
            )

    def test_compose_identity(self):
        rng = np.random.default_rng(3)
        v = rng.normal(size=4)
        q = g.UnitQuaternion.normalized(*v)
        assert g.quat_compose(q, g.UnitQuaternion.identity()).approx_equal(q)

    def test_rotate_identity(self):
        assert g.quat_rotate(g.UnitQuaternion.identity(), (1.0, 2.0, 3.0)) == pytest.approx(
            (1.0, 2.0, 3.0)
        )

    def test_yaw_rotates_east_to_north(self):
        # oracle: the equivalent rotation matrix applied to east
        q = g.UnitQuaternion.from_axis_angle((0, 0, 1), math.radians(90))
        r = np.array(g.quat_to_matrix(q))
        expected = r @ np.array([1.0, 0.0, 0.0])
        got = g.quat_rotate(q, (1.0, 0.0, 0.0))
        assert np.allclose(got, expected, atol=1e-12)
        assert np.allclose(got, (0, 1, 0), atol=1e-12)

    def test_heading_quaternion_matches_matrix_on_north(self):
        for theta in (0.0, 45.0, 123.4, 300.0):
            q = g.heading_to_quaternion(theta)
            ang = math.radians(180 - theta)
            expected = (-math.sin(ang), math.cos(ang), 0.0)
            assert np.allclose(g.quat_rotate(q, (0, 1, 0)), expected, atol=1e-12)

    @given(st.lists(st.floats(-1, 1), min_size=12, max_size=12))
    @settings(max_examples=200, deadline=None)
    def test_composition_associative(self, comps):
        try:
            qs = [g.UnitQuaternion.normalized(*comps[i : i + 4]) for i in (0, 4, 8)]
        except DomainError:
            return  # degenerate all-zero draw
        a, b, c = qs
        lhs = g.quat_compose(g.quat_compose(a, b), c)
        rhs = g.quat_compose(a, g.quat_compose(b, c))
        assert lhs.approx_equal(rhs, tol=1e-12)

    def test_matrix_round_trip(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            q = g.UnitQuaternion.normalized(*rng.normal(size=4))
            assert g.quat_from_matrix(g.quat_to_matrix(q)).approx_equal(q, tol=1e-9)

    def test_serialization_emits_nonnegative_w(self):
        q = g.UnitQuaternion.normalized(-0.5, 0.5, 0.5, 0.5)
        assert q.as_list()[0] >= 0

    def test_geopose_json_round_trip(self):
        pose = g.GeoPose(24.5, 54.4, 3.0, g.heading_to_quaternion(90))
        d = pose.to_json_dict()
        assert list(d.keys()) == ["lat", "lon", "alt", "q"]
        back = g.GeoPose.from_json_dict(d)
        assert back == g.GeoPose(pose.lat_deg, pose.lon_deg, pose.alt_m, pose.orientation.canonical())
