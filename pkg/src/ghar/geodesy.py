"""WGS84 earth-model math: geodetic/ECEF/ENU conversions and quaternions.

Conventions used throughout the engine:

* ENU frame: x = east, y = north, z = up, at a declared geodetic origin.
* Quaternions are Hamilton, stored as (w, x, y, z); ``q`` and ``-q``
  denote the same rotation and comparison helpers honor that.
* Compass heading is degrees clockwise from north.  The anchor-orientation
  rule maps a heading of 180 to the identity rotation, so
  ``heading_to_quaternion(theta)`` yaws by ``180 - theta`` degrees about up.

All functions are pure; no hidden state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

# WGS84 ellipsoid (assumed; the positioning service being modeled is WGS84-based)
WGS84_A = 6378137.0
WGS84_F = 1.0 / 298.257223563
WGS84_B = WGS84_A * (1.0 - WGS84_F)
WGS84_E2 = WGS84_F * (2.0 - WGS84_F)


@dataclass(frozen=True)
class EcefPoint:
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class EnuVector:
    east: float
    north: float
    up: float

    def __iter__(self):
        return iter((self.east, self.north, self.up))


@dataclass(frozen=True)
class UnitQuaternion:
    """Unit quaternion (w, x, y, z), Hamilton convention."""

    w: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        n = math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)
        if abs(n - 1.0) > 1e-9:
            raise DomainError(f"quaternion norm {n} not unit")

    @staticmethod
    def identity() -> "UnitQuaternion":
        return UnitQuaternion(1.0, 0.0, 0.0, 0.0)

    @staticmethod
    def normalized(w, x, y, z) -> "UnitQuaternion":
        n = math.sqrt(w * w + x * x + y * y + z * z)
        if n < 1e-12:
            raise DomainError("cannot normalize near-zero quaternion")
        return UnitQuaternion(w / n, x / n, y / n, z / n)

    @staticmethod
    def from_axis_angle(axis, angle_rad: float) -> "UnitQuaternion":
        ax, ay, az = axis
        n = math.sqrt(ax * ax + ay * ay + az * az)
        if n < 1e-12:
            raise DomainError("zero rotation axis")
        h = 0.5 * angle_rad
        s = math.sin(h) / n
        return UnitQuaternion.normalized(math.cos(h), ax * s, ay * s, az * s)

    def conjugate(self) -> "UnitQuaternion":
        return UnitQuaternion(self.w, -self.x, -self.y, -self.z)

    inverse = conjugate

    def canonical(self) -> "UnitQuaternion":
        """Sign-normalized representative: w >= 0 (w == 0: first nonzero
        component positive).  Used for serialization and comparison."""
        for c in (self.w, self.x, self.y, self.z):
            if c > 0.0:
                return self
            if c < 0.0:
                return UnitQuaternion(-self.w, -self.x, -self.y, -self.z)
        return self

    def approx_equal(self, other: "UnitQuaternion", tol: float = 1e-9) -> bool:
        """Rotation equality up to the q / -q double cover."""
        a, b = self.canonical(), other.canonical()
        return (
            abs(a.w - b.w) <= tol
            and abs(a.x - b.x) <= tol
            and abs(a.y - b.y) <= tol
            and abs(a.z - b.z) <= tol
        )

    def as_list(self):
        q = self.canonical()
        return [q.w, q.x, q.y, q.z]


def quat_compose(a: UnitQuaternion, b: UnitQuaternion) -> UnitQuaternion:
    """Hamilton product a*b (apply b first, then a), renormalized."""
    w = a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z
    x = a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y
    y = a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x
    z = a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w
    return UnitQuaternion.normalized(w, x, y, z)


def quat_rotate(q: UnitQuaternion, v):
    """Rotate 3-vector v by q (active rotation)."""
    vx, vy, vz = v
    # t = 2 q_vec x v
    tx = 2.0 * (q.y * vz - q.z * vy)
    ty = 2.0 * (q.z * vx - q.x * vz)
    tz = 2.0 * (q.x * vy - q.y * vx)
    return (
        vx + q.w * tx + (q.y * tz - q.z * ty),
        vy + q.w * ty + (q.z * tx - q.x * tz),
        vz + q.w * tz + (q.x * ty - q.y * tx),
    )


def quat_to_matrix(q: UnitQuaternion):
    """3x3 rotation matrix (row-major nested tuples) equivalent to q."""
    w, x, y, z = q.w, q.x, q.y, q.z
    return (
        (1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)),
        (2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)),
        (2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)),
    )


def quat_from_matrix(m) -> UnitQuaternion:
    """Unit quaternion from a 3x3 rotation matrix (Shepperd's method)."""
    t = m[0][0] + m[1][1] + m[2][2]
    if t > 0:
        s = math.sqrt(t + 1.0) * 2.0
        return UnitQuaternion.normalized(
            0.25 * s, (m[2][1] - m[1][2]) / s, (m[0][2] - m[2][0]) / s, (m[1][0] - m[0][1]) / s
        )
    if m[0][0] >= m[1][1] and m[0][0] >= m[2][2]:
        s = math.sqrt(1.0 + m[0][0] - m[1][1] - m[2][2]) * 2.0
        return UnitQuaternion.normalized(
            (m[2][1] - m[1][2]) / s, 0.25 * s, (m[0][1] + m[1][0]) / s, (m[0][2] + m[2][0]) / s
        )
    if m[1][1] >= m[2][2]:
        s = math.sqrt(1.0 + m[1][1] - m[0][0] - m[2][2]) * 2.0
        return UnitQuaternion.normalized(
            (m[0][2] - m[2][0]) / s, (m[0][1] + m[1][0]) / s, 0.25 * s, (m[1][2] + m[2][1]) / s
        )
    s = math.sqrt(1.0 + m[2][2] - m[0][0] - m[1][1]) * 2.0
    return UnitQuaternion.normalized(
        (m[1][0] - m[0][1]) / s, (m[0][2] + m[2][0]) / s, (m[1][2] + m[2][1]) / s, 0.25 * s
    )


@dataclass(frozen=True)
class GeoPose:
    """Earth-referenced pose: geodetic position plus orientation.

    ``orientation`` rotates local-ENU vectors; a pure yaw built with
    :func:`heading_to_quaternion` encodes the device compass heading.
    """

    lat_deg: float
    lon_deg: float
    alt_m: float
    orientation: UnitQuaternion

    def __post_init__(self):
        if not (-90.0 <= self.lat_deg <= 90.0):
            raise DomainError(f"latitude {self.lat_deg} out of [-90, 90]")
        if not (-180.0 < self.lon_deg <= 180.0):
            raise DomainError(f"longitude {self.lon_deg} out of (-180, 180]")

    def to_json_dict(self) -> dict:
        # Field order fixed for trace reproducibility.
        return {
            "lat": self.lat_deg,
            "lon": self.lon_deg,
            "alt": self.alt_m,
            "q": self.orientation.as_list(),
        }

    @staticmethod
    def from_json_dict(d: dict) -> "GeoPose":
        w, x, y, z = d["q"]
        return GeoPose(d["lat"], d["lon"], d["alt"], UnitQuaternion.normalized(w, x, y, z))


def geodetic_to_ecef(lat_deg: float, lon_deg: float, alt_m: float) -> EcefPoint:
    """Closed-form WGS84 geodetic -> ECEF."""
    if not (-90.0 <= lat_deg <= 90.0):
        raise DomainError(f"latitude {lat_deg} out of range")
    if not (-180.0 <= lon_deg <= 360.0):
        raise DomainError(f"longitude {lon_deg} out of range")
    lat = math.radians(lat_deg)
    lon = math.radians(lon_deg)
    sin_lat, cos_lat = math.sin(lat), math.cos(lat)
    n = WGS84_A / math.sqrt(1.0 - WGS84_E2 * sin_lat * sin_lat)
    return EcefPoint(
        (n + alt_m) * cos_lat * math.cos(lon),
        (n + alt_m) * cos_lat * math.sin(lon),
        (n * (1.0 - WGS84_E2) + alt_m) * sin_lat,
    )


def ecef_to_geodetic(p: EcefPoint) -> tuple[float, float, float]:
    """ECEF -> geodetic via fixed-point iteration on latitude.

    Converges below 1e-12 rad for |alt| < 100 km.  Longitude of an exactly
    polar point is conventionally 0.
    """
    r2 = p.x * p.x + p.y * p.y + p.z * p.z
    if r2 < 1.0:
        raise DomainError("ECEF point too close to Earth's center")
    rho = math.hypot(p.x, p.y)
    lon = math.atan2(p.y, p.x) if rho > 1e-12 else 0.0
    lat = math.atan2(p.z, rho * (1.0 - WGS84_E2))
    for _ in range(100):
        sin_lat = math.sin(lat)
        n = WGS84_A / math.sqrt(1.0 - WGS84_E2 * sin_lat * sin_lat)
        lat_next = math.atan2(p.z + WGS84_E2 * n * sin_lat, rho)
        if abs(lat_next - lat) < 1e-15:
            lat = lat_next
            break
        lat = lat_next
    sin_lat, cos_lat = math.sin(lat), math.cos(lat)
    n = WGS84_A / math.sqrt(1.0 - WGS84_E2 * sin_lat * sin_lat)
    if abs(cos_lat) > 1e-10:
        alt = rho / cos_lat - n
    else:
        alt = abs(p.z) - WGS84_B
    return math.degrees(lat), math.degrees(lon), alt


def enu_rotation_at(origin: GeoPose):
    """ECEF->ENU rotation at origin; rows are the east/north/up unit vectors."""
    lat = math.radians(origin.lat_deg)
    lon = math.radians(origin.lon_deg)
    sl, cl = math.sin(lat), math.cos(lat)
    so, co = math.sin(lon), math.cos(lon)
    return (
        (-so, co, 0.0),
        (-sl * co, -sl * so, cl),
        (cl * co, cl * so, sl),
    )


def geodetic_to_enu(point: GeoPose, origin: GeoPose) -> EnuVector:
    """ENU coordinates of ``point`` relative to ``origin``."""
    p = geodetic_to_ecef(point.lat_deg, point.lon_deg, point.alt_m)
    o = geodetic_to_ecef(origin.lat_deg, origin.lon_deg, origin.alt_m)
    d = (p.x - o.x, p.y - o.y, p.z - o.z)
    r = enu_rotation_at(origin)
    return EnuVector(
        r[0][0] * d[0] + r[0][1] * d[1] + r[0][2] * d[2],
        r[1][0] * d[0] + r[1][1] * d[1] + r[1][2] * d[2],
        r[2][0] * d[0] + r[2][1] * d[1] + r[2][2] * d[2],
    )


def enu_to_geodetic(v: EnuVector, origin: GeoPose) -> tuple[float, float, float]:
    """Inverse of geodetic_to_enu for the same origin."""
    o = geodetic_to_ecef(origin.lat_deg, origin.lon_deg, origin.alt_m)
    r = enu_rotation_at(origin)
    # ENU -> ECEF uses the transpose (columns of r)
    e, n, u = v.east, v.north, v.up
    p = EcefPoint(
        o.x + r[0][0] * e + r[1][0] * n + r[2][0] * u,
        o.y + r[0][1] * e + r[1][1] * n + r[2][1] * u,
        o.z + r[0][2] * e + r[1][2] * n + r[2][2] * u,
    )
    return ecef_to_geodetic(p)


def heading_to_quaternion(theta_deg: float) -> UnitQuaternion:
    """Anchor orientation from compass heading: yaw of (180 - theta) degrees
    about local up.  theta = 180 is the identity."""
    return UnitQuaternion.from_axis_angle((0.0, 0.0, 1.0), math.radians(180.0 - theta_deg))


def quaternion_to_heading(q: UnitQuaternion) -> float:
    """Compass heading (degrees clockwise from north, in [0, 360)) encoded by
    the yaw component of q.  Inverse of heading_to_quaternion for pure yaws."""
    e, n, _ = quat_rotate(q, (0.0, 1.0, 0.0))
    yaw_deg = math.degrees(math.atan2(-e, n))
    return (180.0 - yaw_deg) % 360.0


def yaw_quaternion(q: UnitQuaternion) -> UnitQuaternion:
    """Project q onto its yaw-about-up component (gravity alignment)."""
    return heading_to_quaternion(quaternion_to_heading(q))
