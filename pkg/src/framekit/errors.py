"""Exception types and the shared failure-category vocabulary."""

from __future__ import annotations

from enum import Enum


class ErrorCategory(str, Enum):
    """Buckets used when classifying why a generated model or script is wrong."""

    ELEMENT_DEFINITION = "element definition"
    NODE_DEFINITION = "node definition"
    SUPPORT_CONDITIONS = "support conditions"
    MATERIAL_PROPERTIES = "material properties"
    LOAD_APPLICATION = "load application"
    GEOMETRY_TOPOLOGY = "geometry/topology"
    OTHER = "other"


class FrameKitError(Exception):
    """Base class for every error raised by this package."""


class ProblemSyntaxError(FrameKitError):
    """Malformed problem description text or JSON."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        locus = ""
        if line is not None:
            locus += f" (line {line})"
        if field is not None:
            locus += f" (field {field!r})"
        super().__init__(message + locus)
        self.line = line
        self.field = field


class SemanticError(FrameKitError):
    """Well-formed input that violates a model invariant."""


class InternalError(FrameKitError):
    """Invariant broken inside the toolchain itself; indicates a bug, not bad input."""


class DanglingReference(FrameKitError):
    """An element or support cites a node id that does not exist."""


class UnresolvedLocator(FrameKitError):
    """A load names a coordinate with no matching node."""


class DegenerateElement(FrameKitError):
    """Element of (near) zero length."""


class SingularSystem(FrameKitError):
    """Stiffness matrix is singular after applying supports (mechanism)."""


class MissingResult(FrameKitError):
    """A render kind needs analysis results that were not supplied."""


class ScriptSyntaxError(FrameKitError):
    """Analysis-script text that cannot be parsed back into the model IR."""

    def __init__(self, message: str, line: int | None = None,
                 category: ErrorCategory = ErrorCategory.OTHER):
        locus = f" (line {line})" if line is not None else ""
        super().__init__(message + locus)
        self.line = line
        self.category = category


class RemoteError(FrameKitError):
    """Remote generation endpoint unreachable or returned an unusable reply."""


class StageFailure(FrameKitError):
    """A pipeline stage failed; carries the classified outcome and partial artifacts."""

    def __init__(self, stage: str, outcome, partial=None):
        super().__init__(f"stage {stage!r} failed: {outcome.detail or outcome.category}")
        self.stage = stage
        self.outcome = outcome
        self.partial = partial
