"""Mock image metadata: labeled regions plus tag sets, and the fixed rules
that turn a scene into RGBA bytes.

The raster rule is fully specified so outputs are byte-identical across
processes: every color is derived with 64-bit FNV-1a over a canonical
serialization of (render seed, label, first style tag).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import MalformedPayloadError
from .lexicon import fnv1a64


def _dedup(values: list[str]) -> list[str]:
    return list(dict.fromkeys(values))


@dataclass(frozen=True)
class NormRect:
    """Rect in normalized [0,1]² image coordinates."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if not (0 <= self.x <= 1 and 0 <= self.y <= 1):
            raise MalformedPayloadError("scene region origin outside [0,1]")
        if not (self.w > 0 and self.h > 0 and self.x + self.w <= 1 + 1e-9 and self.y + self.h <= 1 + 1e-9):
            raise MalformedPayloadError("scene region extends outside [0,1]")

    def pixel_rect(self, width: int, height: int) -> tuple[int, int, int, int]:
        """Half-open pixel bounds; rounding is part of the raster contract."""
        x0 = int(round(self.x * width))
        y0 = int(round(self.y * height))
        x1 = int(round((self.x + self.w) * width))
        y1 = int(round((self.y + self.h) * height))
        return (x0, y0, min(x1, width), min(y1, height))

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h}

    @classmethod
    def from_dict(cls, d: dict) -> "NormRect":
        return cls(d["x"], d["y"], d["w"], d["h"])


@dataclass(frozen=True)
class SceneObject:
    label: str
    region: NormRect
    style_tags: tuple[str, ...] = ()
    tone_tags: tuple[str, ...] = ()
    color_tags: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.label:
            raise MalformedPayloadError("scene object needs a label")
        object.__setattr__(self, "style_tags", tuple(_dedup(list(self.style_tags))))
        object.__setattr__(self, "tone_tags", tuple(_dedup(list(self.tone_tags))))
        object.__setattr__(self, "color_tags", tuple(_dedup(list(self.color_tags))))

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "region": self.region.to_dict(),
            "style_tags": list(self.style_tags),
            "tone_tags": list(self.tone_tags),
            "color_tags": list(self.color_tags),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SceneObject":
        return cls(
            label=d["label"],
            region=NormRect.from_dict(d["region"]),
            style_tags=tuple(d.get("style_tags", ())),
            tone_tags=tuple(d.get("tone_tags", ())),
            color_tags=tuple(d.get("color_tags", ())),
        )


@dataclass(frozen=True)
class SceneSpec:
    objects: tuple[SceneObject, ...]
    background_color_tag: str = ""
    render_seed: int = 0

    def to_dict(self) -> dict:
        return {
            "objects": [o.to_dict() for o in self.objects],
            "background_color_tag": self.background_color_tag,
            "render_seed": self.render_seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SceneSpec":
        return cls(
            objects=tuple(SceneObject.from_dict(o) for o in d.get("objects", ())),
            background_color_tag=d.get("background_color_tag", ""),
            render_seed=d.get("render_seed", 0),
        )

    def canonical_json(self) -> bytes:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")).encode("utf-8")


def stable_rgb(*parts) -> tuple[int, int, int]:
    payload = json.dumps([str(p) for p in parts], separators=(",", ":")).encode("utf-8")
    h = fnv1a64(payload)
    return ((h >> 16) & 0xFF, (h >> 8) & 0xFF, h & 0xFF)


def object_rgb(render_seed: int, obj: SceneObject) -> tuple[int, int, int]:
    first_style = obj.style_tags[0] if obj.style_tags else ""
    return stable_rgb(render_seed, obj.label, first_style)


def background_rgb(scene: SceneSpec) -> tuple[int, int, int]:
    return stable_rgb(scene.render_seed, "", scene.background_color_tag)


def render_scene(scene: SceneSpec, width: int, height: int) -> bytes:
    """RGBA bytes, row-major: background fill, then each object's pixel rect
    in object order."""
    r, g, b = background_rgb(scene)
    row = bytes((r, g, b, 255)) * width
    raster = bytearray(row * height)
    for obj in scene.objects:
        x0, y0, x1, y1 = obj.region.pixel_rect(width, height)
        if x1 <= x0 or y1 <= y0:
            continue
        orow = bytes(object_rgb(scene.render_seed, obj)) + b"\xff"
        fill = orow * (x1 - x0)
        for y in range(y0, y1):
            start = (y * width + x0) * 4
            raster[start : start + len(fill)] = fill
    return bytes(raster)


def layout_regions(count: int) -> list[NormRect]:
    """Equal full-height columns left to right; a single object sits centered
    at half size."""
    if count <= 0:
        return []
    if count == 1:
        return [NormRect(0.25, 0.25, 0.5, 0.5)]
    return [NormRect(i / count, 0.0, 1 / count, 1.0) for i in range(count)]
