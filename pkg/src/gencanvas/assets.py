"""Image assets and their provenance.

Asset ids are content hashes over raster bytes plus the canonical scene
serialization, so identical generations dedup and history can revert
bit-exactly by id.
"""

from __future__ import annotations

import base64
import hashlib
from dataclasses import dataclass, field

from .controls import GenerationControls
from .errors import MalformedPayloadError
from .fragments import Fragment
from .scene import SceneSpec


@dataclass(frozen=True)
class Provenance:
    prompt: str
    fragments: tuple[Fragment, ...] = ()
    parents: tuple[str, ...] = ()
    seed: int = 0
    controls: GenerationControls = field(default_factory=GenerationControls)
    adapter_id: str = "mock"
    created_at: int = 0  # ms on the session clock

    def to_dict(self) -> dict:
        return {
            "prompt": self.prompt,
            "fragments": [f.to_dict() for f in self.fragments],
            "parents": list(self.parents),
            "seed": self.seed,
            "controls": self.controls.to_dict(),
            "adapter_id": self.adapter_id,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Provenance":
        return cls(
            prompt=d["prompt"],
            fragments=tuple(Fragment.from_dict(f) for f in d.get("fragments", ())),
            parents=tuple(d.get("parents", ())),
            seed=d.get("seed", 0),
            controls=GenerationControls.from_dict(d["controls"]) if d.get("controls") else GenerationControls(),
            adapter_id=d.get("adapter_id", "mock"),
            created_at=d.get("created_at", 0),
        )


def asset_content_id(raster: bytes, scene: SceneSpec | None) -> str:
    h = hashlib.sha256()
    h.update(raster)
    h.update(b"\x00")
    if scene is not None:
        h.update(scene.canonical_json())
    return h.hexdigest()


@dataclass(frozen=True)
class ImageAsset:
    id: str
    width: int
    height: int
    raster: bytes  # RGBA, row-major
    scene: SceneSpec | None = None
    provenance: Provenance | None = None

    def __post_init__(self):
        if len(self.raster) != self.width * self.height * 4:
            raise MalformedPayloadError(
                f"raster length {len(self.raster)} != {self.width}x{self.height}x4"
            )

    def to_dict(self, include_raster: bool = True) -> dict:
        d = {
            "id": self.id,
            "width": self.width,
            "height": self.height,
            "scene": self.scene.to_dict() if self.scene else None,
            "provenance": self.provenance.to_dict() if self.provenance else None,
        }
        if include_raster:
            d["raster"] = base64.b64encode(self.raster).decode("ascii")
        return d

    @classmethod
    def from_dict(cls, d: dict, raster: bytes | None = None) -> "ImageAsset":
        if raster is None:
            raster = base64.b64decode(d["raster"])
        return cls(
            id=d["id"],
            width=d["width"],
            height=d["height"],
            raster=raster,
            scene=SceneSpec.from_dict(d["scene"]) if d.get("scene") else None,
            provenance=Provenance.from_dict(d["provenance"]) if d.get("provenance") else None,
        )


def make_asset(
    width: int,
    height: int,
    raster: bytes,
    scene: SceneSpec | None = None,
    provenance: Provenance | None = None,
) -> ImageAsset:
    return ImageAsset(
        id=asset_content_id(raster, scene),
        width=width,
        height=height,
        raster=raster,
        scene=scene,
        provenance=provenance,
    )
