"""Adapter interfaces for language and image models.

Adapters are pure with respect to the document: reference assets are passed
in resolved, never looked up. They must be safe to call from multiple
workers at once.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Sequence

from ..assets import ImageAsset
from ..controls import GenerationRequest
from ..document import Grounding
from ..fragments import Fragment, FragmentEdit
from ..geometry import Rect
from ..masks import Mask


class LanguageAdapter(ABC):
    id: str = "language"

    @abstractmethod
    def decompose(self, prompt: str, max_fragments: int | None = None) -> list[Fragment]:
        """Break a prompt into [type, value] fragments."""

    @abstractmethod
    def vary_values(self, fragment: Fragment, context: str, k: int) -> list[Fragment]:
        """k same-type fragments with fresh values, none equal to the input."""

    @abstractmethod
    def suggest_types(
        self, prompt: str, existing: Sequence[Fragment], max_fragments: int = 5
    ) -> list[Fragment]:
        """One fragment per type not yet present."""

    @abstractmethod
    def compose(self, base_prompt: str, edits: Sequence[FragmentEdit]) -> str:
        """Canonical prompt for the edited fragment set."""

    @abstractmethod
    def describe(self, asset: ImageAsset) -> str:
        """Prompt-style description of an asset."""

    @abstractmethod
    def merge(self, prompts: Sequence[str]) -> str:
        """Single prompt covering all inputs."""

    @abstractmethod
    def extract(self, asset: ImageAsset, region: Rect | None, mode: str) -> str:
        """Style tags or content labels picked up from an asset."""

    @abstractmethod
    def derive_variant_prompts(self, prompt: str, grounding: Grounding, k: int = 4) -> list[str]:
        """k distinct prompts varying the prompt's dominant dimension."""


class ImageAdapter(ABC):
    id: str = "image"

    @abstractmethod
    def generate(
        self, request: GenerationRequest, references: Sequence[ImageAsset] = ()
    ) -> ImageAsset:
        """txt2img / img2img / outpaint per request.controls.op_kind."""

    @abstractmethod
    def inpaint(
        self, request: GenerationRequest, references: Sequence[ImageAsset] = ()
    ) -> ImageAsset:
        """Rewrite the masked region of the first reference."""

    @abstractmethod
    def segment(self, asset: ImageAsset, points: Sequence[tuple[float, float]]) -> Mask:
        """Mask of the dominant object under the control points."""
