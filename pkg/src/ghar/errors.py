"""Engine error hierarchy.

Every engine-level failure raises a subclass of :class:`GharError` carrying a
stable ``code`` string, so the session layer can wrap any of them into a
protocol ErrorReport without a big isinstance ladder.
"""


class GharError(Exception):
    code = "EngineError"


class DomainError(GharError):
    """Input outside the mathematical domain of an operation."""

    code = "DomainError"


class AnchorRejected(GharError):
    """Anchor creation attempted before the device localized."""

    code = "AnchorRejected"


class DuplicateId(GharError):
    code = "DuplicateId"


class AnchorFileError(GharError):
    """Malformed anchor file; message names the offending line."""

    code = "AnchorFileError"


class NotVisible(GharError):
    """Marker projection requested while a corner is behind the camera or
    outside the image."""

    code = "NotVisible"


class EstimationDegenerate(GharError):
    """Pose estimation from a collinear / degenerate corner configuration."""

    code = "EstimationDegenerate"


class UnsupportedGesture(GharError):
    """More simultaneous pointers than the gesture set supports."""

    code = "UnsupportedGesture"


class NoIntersection(GharError):
    """Screen ray parallel to (or pointing away from) the drag plane."""

    code = "NoIntersection"


class DegenerateGesture(GharError):
    code = "DegenerateGesture"


class NoAnchor(GharError):
    code = "NoAnchor"


class NoVisibleMarker(GharError):
    code = "NoVisibleMarker"


class MustClearFirst(GharError):
    code = "MustClearFirst"


class ValidationError(GharError):
    code = "ValidationError"


class EmptyGroup(GharError):
    code = "EmptyGroup"


class DegenerateVariance(GharError):
    code = "DegenerateVariance"


class ProtocolError(GharError):
    code = "ProtocolError"


class OutOfOrder(GharError):
    code = "OutOfOrder"


class TraceParseError(GharError):
    """Malformed trace line; message carries the 1-based line number."""

    code = "TraceParseError"
