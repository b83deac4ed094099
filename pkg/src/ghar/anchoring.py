"""Earth-anchored poses: create, resolve, and persist anchors.

An anchor freezes the device's geodetic position with a gravity-aligned
orientation derived from its compass heading.  Resolution expresses the
anchor in the session frame, defined as the ENU frame at the device's
current pose estimate; re-localization shifts resolved coordinates instead
of rewriting stored anchors.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field

from .errors import AnchorFileError, AnchorRejected, DuplicateId
from .geodesy import (
    EnuVector,
    GeoPose,
    UnitQuaternion,
    geodetic_to_enu,
    heading_to_quaternion,
    quat_compose,
    quaternion_to_heading,
)

ANCHOR_FILE_VERSION = 1


@dataclass(frozen=True)
class Anchor:
    id: str
    pose: GeoPose
    created_at: int  # ms since epoch
    label: str = ""

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "pose": self.pose.to_json_dict(),
            "created_at": self.created_at,
            "label": self.label,
        }

    @staticmethod
    def from_json_dict(d: dict) -> "Anchor":
        return Anchor(
            id=d["id"],
            pose=GeoPose.from_json_dict(d["pose"]),
            created_at=d["created_at"],
            label=d.get("label", ""),
        )


@dataclass(frozen=True)
class ResolvedPose:
    """Anchor pose expressed in the device's session (ENU) frame."""

    position: EnuVector
    orientation: UnitQuaternion


@dataclass
class AnchorStore:
    anchors: dict[str, Anchor] = field(default_factory=dict)

    def add(self, anchor: Anchor) -> None:
        if anchor.id in self.anchors:
            raise DuplicateId(f"anchor id {anchor.id!r} already stored")
        self.anchors[anchor.id] = anchor

    def __len__(self) -> int:
        return len(self.anchors)

    def __eq__(self, other) -> bool:
        return isinstance(other, AnchorStore) and self.anchors == other.anchors


def anchor_at(pose: GeoPose, created_at: int = 0, label: str = "") -> Anchor:
    """Anchor at an arbitrary GeoPose (replay/test extension).

    The orientation is gravity-aligned: only the heading survives.
    """
    heading = quaternion_to_heading(pose.orientation)
    aligned = GeoPose(pose.lat_deg, pose.lon_deg, pose.alt_m, heading_to_quaternion(heading))
    return Anchor(id=str(uuid.uuid4()), pose=aligned, created_at=created_at, label=label)


def create_anchor(device, store: AnchorStore | None = None, label: str = "") -> Anchor:
    """Anchor at the device's own estimated pose.

    Orientation is the heading-derived yaw quaternion (pitch/roll zeroed).
    Rejected while the device has not localized yet.
    """
    if not device.localized:
        raise AnchorRejected("device not localized; scan the environment first")
    anchor = anchor_at(device.pose, created_at=device.timestamp_ms)
    if label:
        anchor = Anchor(anchor.id, anchor.pose, anchor.created_at, label)
    if store is not None:
        store.add(anchor)
    return anchor


def resolve_anchor(anchor: Anchor, device) -> ResolvedPose:
    """Anchor pose in the session frame anchored at the device estimate."""
    position = geodetic_to_enu(anchor.pose, device.pose)
    orientation = quat_compose(device.pose.orientation.inverse(), anchor.pose.orientation)
    return ResolvedPose(position, orientation)


def save_anchors(store: AnchorStore, path) -> None:
    doc = {
        "version": ANCHOR_FILE_VERSION,
        "anchors": [a.to_json_dict() for a in store.anchors.values()],
    }
    with open(path, "w") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")


def load_anchors(path) -> AnchorStore:
    with open(path) as f:
        text = f.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise AnchorFileError(f"{path}: malformed JSON at line {e.lineno}: {e.msg}") from e
    if not isinstance(doc, dict) or doc.get("version") != ANCHOR_FILE_VERSION:
        raise AnchorFileError(f"{path}: unsupported anchor file version")
    store = AnchorStore()
    for entry in doc.get("anchors", []):
        try:
            anchor = Anchor.from_json_dict(entry)
        except (KeyError, TypeError) as e:
            raise AnchorFileError(f"{path}: bad anchor entry: {e}") from e
        store.add(anchor)
    return store
