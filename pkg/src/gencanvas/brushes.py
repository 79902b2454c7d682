"""Fillable brushes: prompt-bearing brushes applied by stroke -> control
points -> segmentation -> masked inpaint."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .controls import GenerationControls
from .document import BrushPayload, CanvasDocument, Element
from .errors import (
    DegenerateStrokeError,
    EmptyPromptError,
    MalformedPayloadError,
    UnfilledBrushError,
    UnknownAssetError,
)
from .fragments import canon_text
from .geometry import Rect

MIN_CONTROL_POINTS = 4
MAX_CONTROL_POINTS = 32
ARC_PX_PER_POINT = 32

EMPHASIS_STEP = 0.25
EMPHASIS_CAP = 2.0

STYLE_WEIGHTS = {"style": (0.3, 0.8), "content": (0.8, 0.3)}  # (content_w, style_w)


@dataclass(frozen=True)
class Stroke:
    points: tuple[tuple[float, float], ...]
    width: float = 8.0

    def __post_init__(self):
        if len(self.points) < 2:
            raise MalformedPayloadError("a stroke needs at least two points")

    def to_dict(self) -> dict:
        return {"points": [[x, y] for x, y in self.points], "width": self.width}

    @classmethod
    def from_dict(cls, d: dict) -> "Stroke":
        return cls(points=tuple((p[0], p[1]) for p in d["points"]), width=d.get("width", 8.0))


def emphasis_weight(applications: int) -> float:
    """Monotone in the application count, capped."""
    return min(1.0 + EMPHASIS_STEP * (applications - 1), EMPHASIS_CAP)


def brush_controls(mode: str, applications: int) -> GenerationControls:
    content_w, style_w = STYLE_WEIGHTS[mode]
    return GenerationControls(
        content_weight=content_w,
        style_weight=style_w,
        emphasis_weight=emphasis_weight(applications),
        op_kind="inpaint",
    )


def _brush(doc: CanvasDocument, brush_id: str) -> Element:
    el = doc.element(brush_id)
    if el.kind != "brush":
        raise MalformedPayloadError(f"{brush_id} is not a brush")
    return el


def fill_brush_from_text(doc: CanvasDocument, brush_id: str, prompt: str, mode: str) -> None:
    el = _brush(doc, brush_id)
    text = canon_text(prompt)
    if not text:
        raise EmptyPromptError("brush fill needs a non-empty prompt")
    payload: BrushPayload = el.payload
    payload.prompt = text
    payload.mode = mode
    payload.applications = {}
    doc.revision += 1


def fill_brush_from_example(
    doc: CanvasDocument,
    brush_id: str,
    asset_id: str,
    region: Rect | None,
    mode: str,
    language,
) -> str:
    el = _brush(doc, brush_id)
    if asset_id not in doc.assets:
        raise UnknownAssetError(f"no asset {asset_id!r}")
    extracted = language.extract(doc.assets[asset_id], region, mode)
    payload: BrushPayload = el.payload
    payload.prompt = canon_text(extracted)
    payload.mode = mode
    payload.applications = {}
    doc.revision += 1
    return extracted


def resample_stroke(stroke: Stroke, width: int, height: int) -> list[tuple[float, float]]:
    """Uniform arc-length resampling, endpoints included; point count is
    clamp(floor(length / 32), 4, 32). Points are clamped into bounds."""
    pts = [(_clamp(x, width), _clamp(y, height)) for x, y in stroke.points]
    seg_lengths = [math.dist(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]
    total = sum(seg_lengths)
    if total <= 0:
        raise DegenerateStrokeError("stroke has zero length")
    count = max(MIN_CONTROL_POINTS, min(MAX_CONTROL_POINTS, int(total // ARC_PX_PER_POINT)))

    out: list[tuple[float, float]] = []
    for j in range(count):
        target = total * j / (count - 1)
        out.append(_point_at(pts, seg_lengths, target))
    return out


def _clamp(v: float, size: int) -> float:
    return min(max(v, 0.0), float(size - 1))


def _point_at(pts, seg_lengths, target: float) -> tuple[float, float]:
    walked = 0.0
    for i, seg in enumerate(seg_lengths):
        if walked + seg >= target or i == len(seg_lengths) - 1:
            if seg == 0:
                return pts[i]
            t = (target - walked) / seg
            t = min(max(t, 0.0), 1.0)
            (x0, y0), (x1, y1) = pts[i], pts[i + 1]
            return (x0 + (x1 - x0) * t, y0 + (y1 - y0) * t)
        walked += seg
    return pts[-1]


def bump_applications(payload: BrushPayload, target_id: str) -> int:
    n = payload.applications.get(target_id, 0) + 1
    payload.applications[target_id] = n
    return n


def require_filled(el: Element) -> BrushPayload:
    payload: BrushPayload = el.payload
    if not payload.filled:
        raise UnfilledBrushError(f"brush {el.id} has no prompt")
    return payload


def combined_prompt_tokens(*prompts: str) -> str:
    """Comma-join with token dedup, first occurrence wins."""
    tokens: list[str] = []
    for prompt in prompts:
        for chunk in prompt.split(","):
            token = canon_text(chunk)
            if token and token not in tokens:
                tokens.append(token)
    return ", ".join(tokens)
