"""Adapter-agnostic description of one generation job."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidRequestError
from .masks import Mask

OP_KINDS = ("txt2img", "img2img", "inpaint", "outpaint")


@dataclass(frozen=True)
class GenerationControls:
    content_weight: float = 0.5
    style_weight: float = 0.5
    denoise_strength: float = 0.75
    guidance: float = 7.0
    emphasis_weight: float = 1.0
    op_kind: str = "txt2img"

    def __post_init__(self):
        for name in ("content_weight", "style_weight", "denoise_strength"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidRequestError(f"{name} must be in [0,1], got {v}")
        if not self.guidance > 0:
            raise InvalidRequestError(f"guidance must be positive, got {self.guidance}")
        if not 1.0 <= self.emphasis_weight <= 2.0:
            raise InvalidRequestError(f"emphasis_weight must be in [1,2], got {self.emphasis_weight}")
        if self.op_kind not in OP_KINDS:
            raise InvalidRequestError(f"unknown op_kind {self.op_kind!r}")

    def to_dict(self) -> dict:
        return {
            "content_weight": self.content_weight,
            "style_weight": self.style_weight,
            "denoise_strength": self.denoise_strength,
            "guidance": self.guidance,
            "emphasis_weight": self.emphasis_weight,
            "op_kind": self.op_kind,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GenerationControls":
        return cls(**d)


@dataclass(frozen=True)
class GenerationRequest:
    prompt: str
    reference_assets: tuple[str, ...] = ()
    mask: Mask | None = None
    controls: GenerationControls = field(default_factory=GenerationControls)
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.seed, int):
            raise InvalidRequestError("seed must be an integer")
        if self.controls.op_kind == "inpaint":
            if self.mask is None:
                raise InvalidRequestError("inpaint needs a mask")
            if not self.reference_assets:
                raise InvalidRequestError("inpaint needs a reference asset")
        if self.controls.op_kind in ("img2img",) and not self.reference_assets:
            raise InvalidRequestError("img2img needs a reference asset")

    def to_dict(self) -> dict:
        return {
            "prompt": self.prompt,
            "reference_assets": list(self.reference_assets),
            "mask": self.mask.to_dict() if self.mask else None,
            "controls": self.controls.to_dict(),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GenerationRequest":
        mask = d.get("mask")
        return cls(
            prompt=d["prompt"],
            reference_assets=tuple(d.get("reference_assets", ())),
            mask=Mask.from_dict(mask) if mask else None,
            controls=GenerationControls.from_dict(d["controls"]),
            seed=d["seed"],
        )
