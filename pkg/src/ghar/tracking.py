"""Tracking simulation: localization noise profiles and a synthetic
fiducial-marker pipeline.

``localize`` stands in for the visual-positioning / GPS stack: it perturbs a
ground-truth GeoPose with configurable Gaussian noise and reports the
configured sigmas as accuracies.  The marker half projects a square fiducial
through a pinhole camera and recovers its pose again from the four corners
via a planar homography (DLT with Hartley normalization).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EstimationDegenerate, NotVisible
from .geodesy import (
    EnuVector,
    GeoPose,
    UnitQuaternion,
    enu_to_geodetic,
    heading_to_quaternion,
    quat_to_matrix,
    quaternion_to_heading,
)


@dataclass(frozen=True)
class DevicePoseEstimate:
    pose: GeoPose
    horizontal_accuracy_m: float
    heading_accuracy_deg: float
    timestamp_ms: int
    localized: bool


@dataclass(frozen=True)
class LocalizationProfile:
    name: str  # "geospatial" | "gps"
    sigma_pos_m: float  # per horizontal axis
    sigma_alt_m: float
    sigma_heading_deg: float
    localization_delay_frames: int = 30

    def __post_init__(self):
        if min(self.sigma_pos_m, self.sigma_alt_m, self.sigma_heading_deg) < 0:
            raise DomainError("profile sigmas must be >= 0")

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "sigma_pos_m": self.sigma_pos_m,
            "sigma_alt_m": self.sigma_alt_m,
            "sigma_heading_deg": self.sigma_heading_deg,
            "localization_delay_frames": self.localization_delay_frames,
        }

    @staticmethod
    def from_json_dict(d: dict) -> "LocalizationProfile":
        return LocalizationProfile(
            name=d["name"],
            sigma_pos_m=d["sigma_pos_m"],
            sigma_alt_m=d["sigma_alt_m"],
            sigma_heading_deg=d["sigma_heading_deg"],
            localization_delay_frames=d.get("localization_delay_frames", 30),
        )


# Defaults sit inside the qualitative accuracy ranges of VPS-grade vs
# plain-GPS anchoring ("within a few centimeters" vs "3-10 meters").
GEOSPATIAL_PROFILE = LocalizationProfile("geospatial", 0.05, 0.10, 1.0)
GPS_PROFILE = LocalizationProfile("gps", 4.0, 8.0, 15.0)

PROFILES = {"geospatial": GEOSPATIAL_PROFILE, "gps": GPS_PROFILE}


def load_profile(path) -> LocalizationProfile:
    with open(path) as f:
        return LocalizationProfile.from_json_dict(json.load(f))


def localize(
    truth: GeoPose,
    profile: LocalizationProfile,
    rng_seed: int,
    timestamp_ms: int = 0,
    frames_elapsed: int | None = None,
) -> DevicePoseEstimate:
    """One noisy pose measurement; deterministic for a given seed.

    ``frames_elapsed`` models the scan-the-surroundings warm-up: the estimate
    is flagged unlocalized until the profile's delay has passed.  ``None``
    means warmed up.
    """
    rng = np.random.default_rng(rng_seed)
    de, dn = rng.normal(0.0, profile.sigma_pos_m, size=2)
    du = rng.normal(0.0, profile.sigma_alt_m)
    dh = rng.normal(0.0, profile.sigma_heading_deg)

    lat, lon, alt = enu_to_geodetic(EnuVector(de, dn, du), truth)
    heading = (quaternion_to_heading(truth.orientation) + dh) % 360.0
    pose = GeoPose(lat, lon, alt, heading_to_quaternion(heading))
    localized = frames_elapsed is None or frames_elapsed >= profile.localization_delay_frames
    return DevicePoseEstimate(
        pose=pose,
        horizontal_accuracy_m=profile.sigma_pos_m,
        heading_accuracy_deg=profile.sigma_heading_deg,
        timestamp_ms=timestamp_ms,
        localized=localized,
    )


class Localizer:
    """Stateful per-session wrapper: counts frames for the warm-up gate and
    derives one child seed per frame so streams are reproducible."""

    def __init__(self, profile: LocalizationProfile, seed: int):
        self.profile = profile
        self.seed = seed
        self.frames = 0

    def measure(self, truth: GeoPose, timestamp_ms: int = 0) -> DevicePoseEstimate:
        frame_seed = np.random.SeedSequence((self.seed, self.frames)).generate_state(1)[0]
        est = localize(
            truth,
            self.profile,
            int(frame_seed),
            timestamp_ms=timestamp_ms,
            frames_elapsed=self.frames,
        )
        self.frames += 1
        return est


# --- synthetic fiducial-marker pipeline -----------------------------------


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise DomainError("focal lengths must be positive")
        if not (0 <= self.cx <= self.width and 0 <= self.cy <= self.height):
            raise DomainError("principal point outside image")


DEFAULT_INTRINSICS = CameraIntrinsics(fx=500.0, fy=500.0, cx=320.0, cy=240.0, width=640, height=480)


@dataclass(frozen=True)
class CameraPose:
    """Camera pose in the world ENU frame.

    ``orientation`` maps camera-frame vectors into world coordinates; camera
    axes are x right, y down, z forward (optical axis).
    """

    position: EnuVector
    orientation: UnitQuaternion

    def rotation(self) -> np.ndarray:
        return np.array(quat_to_matrix(self.orientation))


@dataclass(frozen=True)
class Fiducial:
    """Square marker of edge ``side_m`` centered at ``position`` with
    ``orientation`` mapping marker-frame vectors (x right, y up, z = outward
    normal) into the world frame."""

    side_m: float
    position: EnuVector
    orientation: UnitQuaternion

    def __post_init__(self):
        if self.side_m <= 0:
            raise DomainError("marker side must be positive")

    def corners_local(self) -> np.ndarray:
        """4x3 corners, counterclockwise from top-left in the marker frame."""
        h = self.side_m / 2.0
        return np.array(
            [
                [-h, h, 0.0],
                [-h, -h, 0.0],
                [h, -h, 0.0],
                [h, h, 0.0],
            ]
        )

    def corners_world(self) -> np.ndarray:
        r = np.array(quat_to_matrix(self.orientation))
        c = np.array(list(self.position))
        return self.corners_local() @ r.T + c


def project_point(cam: CameraPose, intr: CameraIntrinsics, p_world) -> tuple[float, float]:
    r = cam.rotation()
    d = np.asarray(p_world, dtype=float) - np.array(list(cam.position))
    pc = r.T @ d
    if pc[2] <= 1e-9:
        raise NotVisible("point behind camera")
    u = intr.fx * pc[0] / pc[2] + intr.cx
    v = intr.fy * pc[1] / pc[2] + intr.cy
    return float(u), float(v)


def project_marker(cam: CameraPose, intr: CameraIntrinsics, fid: Fiducial) -> np.ndarray:
    """4x2 pixel corners, counterclockwise from top-left in the marker frame.

    Raises NotVisible if any corner falls behind the camera or outside the
    image bounds.
    """
    pts = []
    for corner in fid.corners_world():
        u, v = project_point(cam, intr, corner)
        if not (0.0 <= u <= intr.width and 0.0 <= v <= intr.height):
            raise NotVisible(f"corner projects outside image at ({u:.1f}, {v:.1f})")
        pts.append((u, v))
    return np.array(pts)


def _homography_dlt(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Homography mapping src (Nx2) to dst (Nx2) via normalized DLT."""

    def normalize(pts):
        c = pts.mean(axis=0)
        d = np.sqrt(((pts - c) ** 2).sum(axis=1)).mean()
        if d < 1e-12:
            raise EstimationDegenerate("coincident points")
        s = math.sqrt(2.0) / d
        t = np.array([[s, 0, -s * c[0]], [0, s, -s * c[1]], [0, 0, 1]])
        return t, (pts - c) * s

    ts, sn = normalize(src)
    td, dn = normalize(dst)
    a = []
    for (x, y), (u, v) in zip(sn, dn):
        a.append([-x, -y, -1, 0, 0, 0, u * x, u * y, u])
        a.append([0, 0, 0, -x, -y, -1, v * x, v * y, v])
    a = np.array(a)
    _, s, vt = np.linalg.svd(a)
    if s[-2] < 1e-10 * s[0]:
        raise EstimationDegenerate("degenerate point configuration")
    h = vt[-1].reshape(3, 3)
    h = np.linalg.inv(td) @ h @ ts
    return h / h[2, 2]


@dataclass(frozen=True)
class MarkerPoseEstimate:
    """Marker pose in the camera frame: R maps marker-frame vectors to the
    camera frame, t is the marker center in camera coordinates (meters)."""

    rotation: np.ndarray  # 3x3
    translation: np.ndarray  # 3,


def estimate_marker_pose(
    image_points: np.ndarray, intr: CameraIntrinsics, side_m: float
) -> MarkerPoseEstimate:
    """Recover camera-frame marker pose from the 4 projected corners.

    Homography decomposition: H ~ K [r1 r2 t] for points on the marker plane;
    r3 = r1 x r2, with the rotation snapped to the nearest orthonormal matrix
    and the sign fixed so the marker sits in front of the camera.
    """
    pts = np.asarray(image_points, dtype=float)
    if pts.shape != (4, 2):
        raise EstimationDegenerate("need exactly 4 image points")
    h = side_m / 2.0
    obj = np.array([[-h, h], [-h, -h], [h, -h], [h, h]])

    hom = _homography_dlt(obj, pts)
    sv = np.linalg.svd(hom, compute_uv=False)
    if sv[-1] < 1e-9 * sv[0]:
        raise EstimationDegenerate("image points are (near-)collinear")
    k_inv = np.array(
        [[1.0 / intr.fx, 0.0, -intr.cx / intr.fx], [0.0, 1.0 / intr.fy, -intr.cy / intr.fy], [0.0, 0.0, 1.0]]
    )
    b = k_inv @ hom
    scale = 2.0 / (np.linalg.norm(b[:, 0]) + np.linalg.norm(b[:, 1]))
    b = b * scale
    if b[2, 2] < 0:  # marker must be in front of the camera
        b = -b
    r1, r2, t = b[:, 0], b[:, 1], b[:, 2]
    r3 = np.cross(r1, r2)
    r_approx = np.column_stack([r1, r2, r3])
    u, _, vt = np.linalg.svd(r_approx)
    r = u @ np.diag([1.0, 1.0, np.sign(np.linalg.det(u @ vt))]) @ vt
    return MarkerPoseEstimate(rotation=r, translation=t)


def marker_visible(
    cam: CameraPose,
    intr: CameraIntrinsics,
    fid: Fiducial,
    max_range_m: float = 20.0,
    max_incidence_deg: float = 80.0,
) -> bool:
    """True iff all corners project in-frame, within range, and the viewing
    angle off the marker normal is below the incidence limit."""
    try:
        project_marker(cam, intr, fid)
    except NotVisible:
        return False
    to_cam = np.array(list(cam.position)) - np.array(list(fid.position))
    rng = np.linalg.norm(to_cam)
    if rng > max_range_m or rng < 1e-9:
        return False
    normal = np.array(quat_to_matrix(fid.orientation)) @ np.array([0.0, 0.0, 1.0])
    cos_inc = float(normal @ (to_cam / rng))
    if cos_inc <= 0.0:  # camera behind the marker plane
        return False
    return math.degrees(math.acos(min(1.0, cos_inc))) <= max_incidence_deg
