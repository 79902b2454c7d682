"""Error types for the canvas runtime.

Every error carries a stable kebab-case ``code`` that is used verbatim in
protocol error events, so clients can match on it without parsing messages.
"""

from __future__ import annotations


class GenCanvasError(Exception):
    """Base class; ``code`` is the wire-level error identifier."""

    code = "error"

    def __init__(self, message: str = "", **details):
        super().__init__(message or self.code)
        self.details = details


class InvalidRectError(GenCanvasError):
    code = "invalid-rect"


class MalformedPayloadError(GenCanvasError):
    code = "malformed-payload"


class UnknownIdError(GenCanvasError):
    code = "unknown-id"


class UnknownAssetError(GenCanvasError):
    code = "unknown-asset"


class UnknownTargetError(GenCanvasError):
    code = "unknown-target"


class UnsupportedPairError(GenCanvasError):
    """Drop pair not in the dispatch table; carries the offending pair."""

    code = "unsupported-pair"

    def __init__(self, source_kind: str, target_kind: str):
        super().__init__(f"no drop rule for ({source_kind}, {target_kind})")
        self.pair = (source_kind, target_kind)


class UnsupportedKindError(GenCanvasError):
    code = "unsupported-kind"


class DanglingAssetError(GenCanvasError):
    code = "dangling-asset"


class VersionMismatchError(GenCanvasError):
    code = "version-mismatch"


class CorruptPayloadError(GenCanvasError):
    code = "corrupt-payload"


class EmptyPromptError(GenCanvasError):
    code = "empty-prompt"


class AdapterFailure(GenCanvasError):
    code = "adapter-failure"


class NoMoreTypesError(GenCanvasError):
    code = "no-more-types"


class RemoveOfAbsentFragmentError(GenCanvasError):
    code = "remove-of-absent-fragment"


class ReplaceTypeMismatchError(GenCanvasError):
    code = "replace-type-mismatch"


class SchedulerRejectedError(GenCanvasError):
    code = "scheduler-rejected"


class ShutdownError(GenCanvasError):
    code = "shutdown"


class InvalidRequestError(GenCanvasError):
    code = "invalid-request"


class BlankLensNoPromptError(GenCanvasError):
    code = "blank-lens-no-prompt"


class UnresolvableSourceError(GenCanvasError):
    code = "unresolvable-source"


class EmptyContainerError(GenCanvasError):
    code = "empty-container"


class EmptyCellError(GenCanvasError):
    code = "empty-cell"


class BadIndexError(GenCanvasError):
    code = "bad-index"


class ExtractionEmptyError(GenCanvasError):
    code = "extraction-empty"


class DegenerateStrokeError(GenCanvasError):
    code = "degenerate-stroke"


class UnfilledBrushError(GenCanvasError):
    code = "unfilled-brush"


class SegmentationEmptyError(GenCanvasError):
    code = "segmentation-empty"


class NoSceneError(GenCanvasError):
    code = "no-scene"


class MaskMismatchError(GenCanvasError):
    code = "mask-mismatch"


class SchemaError(GenCanvasError):
    code = "schema-error"


class UnknownCommandError(GenCanvasError):
    code = "unknown-command"


class ScriptParseError(GenCanvasError):
    code = "script-parse-error"


class RemoteAdapterError(AdapterFailure):
    """Network / auth / rate-limit / malformed-response from a remote model."""

    code = "adapter-failure"

    def __init__(self, reason: str, message: str = ""):
        super().__init__(message or reason)
        self.reason = reason
