"""Deterministic mock adapters.

Byte-identical outputs for identical inputs, across processes and platforms:
every choice routes through the lexicon tables or 64-bit FNV-1a hashing, and
"images" are scene metadata rendered by the fixed raster rule in
``gencanvas.scene``.
"""

from __future__ import annotations

from typing import Sequence

from ..assets import ImageAsset, make_asset
from ..controls import GenerationRequest
from ..document import Grounding
from ..errors import (
    EmptyPromptError,
    ExtractionEmptyError,
    InvalidRequestError,
    MaskMismatchError,
    NoMoreTypesError,
    NoSceneError,
    SegmentationEmptyError,
)
from ..fragments import Fragment, FragmentEdit, apply_edits, canon_text, join_fragments, sort_fragments
from ..geometry import Rect
from ..lexicon import Lexicon, load_lexicon, stable_hash_text
from ..masks import Mask
from ..scene import NormRect, SceneObject, SceneSpec, layout_regions, render_scene
from .base import ImageAdapter, LanguageAdapter


def classify_prompt(
    lexicon: Lexicon, prompt: str, origin: str = "decomposed", sort: bool = True
) -> list[Fragment]:
    """Lexicon classification of every non-stopword phrase; unknown words are
    dropped. Canonical order by default; appearance order with sort=False."""
    found: list[Fragment] = []
    seen: set[tuple[str, str]] = set()
    for phrase in lexicon.phrases(prompt):
        ftype = lexicon.classify(phrase)
        if ftype is None:
            continue
        key = (ftype, phrase)
        if key in seen:
            continue
        seen.add(key)
        found.append(Fragment(ftype, phrase, origin))
    return sort_fragments(found, lexicon) if sort else found


class MockLanguageAdapter(LanguageAdapter):
    id = "mock"

    def __init__(self, lexicon: Lexicon | None = None):
        self.lexicon = lexicon or load_lexicon()

    def decompose(self, prompt: str, max_fragments: int | None = None) -> list[Fragment]:
        if not prompt.strip():
            raise EmptyPromptError("cannot decompose an empty prompt")
        fragments = classify_prompt(self.lexicon, prompt)
        if max_fragments is not None:
            fragments = fragments[:max_fragments]
        return fragments

    def vary_values(self, fragment: Fragment, context: str, k: int) -> list[Fragment]:
        if k <= 0:
            return []
        if fragment.ftype == "content":
            values = self.lexicon.content_variations(fragment.value, k)
        else:
            values = self.lexicon.successors(fragment.ftype, fragment.value, k)
        return [Fragment(fragment.ftype, v, "suggested") for v in values]

    def suggest_types(
        self, prompt: str, existing: Sequence[Fragment], max_fragments: int = 5
    ) -> list[Fragment]:
        present = {f.ftype for f in existing}
        missing = [t for t in self.lexicon.types if t not in present]
        if not missing:
            raise NoMoreTypesError("every known fragment type is already present")
        out = []
        for ftype in missing[:max_fragments]:
            table = self.lexicon.values[ftype]
            value = table[stable_hash_text(canon_text(prompt), ftype) % len(table)]
            out.append(Fragment(ftype, value, "suggested"))
        return out

    def compose(self, base_prompt: str, edits: Sequence[FragmentEdit]) -> str:
        base = classify_prompt(self.lexicon, base_prompt) if base_prompt.strip() else []
        return join_fragments(apply_edits(base, list(edits)), self.lexicon)

    def describe(self, asset: ImageAsset) -> str:
        if asset.scene is not None:
            parts: list[str] = []
            for obj in asset.scene.objects:
                parts.append(obj.label)
            for family in ("style_tags", "tone_tags", "color_tags"):
                for obj in asset.scene.objects:
                    parts.extend(getattr(obj, family))
            return ", ".join(dict.fromkeys(parts))
        if asset.provenance is not None:
            return asset.provenance.prompt
        return ""

    def merge(self, prompts: Sequence[str]) -> str:
        return ", ".join(p.strip() for p in prompts if p.strip())

    def extract(self, asset: ImageAsset, region: Rect | None, mode: str) -> str:
        if asset.scene is None:
            raise ExtractionEmptyError("asset has no describable attributes")
        values: list[str] = []
        for obj in asset.scene.objects:
            if region is not None and not _object_touches(obj, region, asset.width, asset.height):
                continue
            if mode == "content":
                values.append(obj.label)
            else:
                values.extend(obj.style_tags)
        values = list(dict.fromkeys(values))
        if not values:
            raise ExtractionEmptyError(f"nothing to extract in mode {mode!r}")
        return ", ".join(values)

    def derive_variant_prompts(self, prompt: str, grounding: Grounding, k: int = 4) -> list[str]:
        base = classify_prompt(self.lexicon, prompt) if prompt.strip() else []
        grounded: list[Fragment] = []
        if grounding.source == "text" and grounding.prompt:
            grounded = classify_prompt(self.lexicon, grounding.prompt)
        elif grounding.source == "fragment" and grounding.fragment is not None:
            grounded = [grounding.fragment]
        # Asset groundings are folded in by the caller via describe(); accept
        # a described prompt there so this stays document-free.
        present_types = {f.ftype for f in base}
        merged = base + [f for f in grounded if f.ftype not in present_types]

        dominant = self._dominant_type(prompt, merged)
        if dominant is None:
            return self._fallback_variants(prompt, k)

        same_type = [f for f in merged if f.ftype == dominant]
        taken: set[str] = {f.value for f in same_type}
        if same_type:
            pivot = same_type[0]
            values = [
                v
                for v in self._variation_values(pivot, k + len(taken))
                if v not in taken
            ][:k]
            variants = []
            for v in values:
                replaced = [Fragment(dominant, v, "suggested") if f is pivot else f for f in merged]
                variants.append(join_fragments(replaced, self.lexicon))
        else:
            table = self.lexicon.values.get(dominant, [])
            if not table:
                return self._fallback_variants(prompt, k)
            start = stable_hash_text(canon_text(prompt), dominant) % len(table)
            variants = []
            for i in range(k):
                v = table[(start + i) % len(table)]
                variants.append(join_fragments(merged + [Fragment(dominant, v, "suggested")], self.lexicon))
        return variants

    def _variation_values(self, fragment: Fragment, k: int) -> list[str]:
        if fragment.ftype == "content":
            return self.lexicon.content_variations(fragment.value, k)
        return self.lexicon.successors(fragment.ftype, fragment.value, k)

    def _dominant_type(self, prompt: str, fragments: list[Fragment]) -> str | None:
        mentioned = self.lexicon.mentioned_types(prompt)
        if mentioned:
            return mentioned[0]
        if fragments:
            return sort_fragments(fragments, self.lexicon)[0].ftype
        return None

    def _fallback_variants(self, prompt: str, k: int) -> list[str]:
        table = self.lexicon.values["content"]
        start = stable_hash_text(canon_text(prompt)) % len(table)
        head = canon_text(prompt)
        out = []
        for i in range(k):
            value = table[(start + i) % len(table)]
            out.append(f"{head}, {value}" if head else value)
        return out


def _object_touches(obj: SceneObject, region: Rect, width: int, height: int) -> bool:
    x0, y0, x1, y1 = obj.region.pixel_rect(width, height)
    if x1 <= x0 or y1 <= y0:
        return False
    return Rect(x0, y0, x1 - x0, y1 - y0).intersection_area(region) > 0


class MockImageAdapter(ImageAdapter):
    id = "mock"

    def __init__(self, lexicon: Lexicon | None = None, default_size: tuple[int, int] = (512, 512)):
        self.lexicon = lexicon or load_lexicon()
        self.default_size = default_size

    # -- generate -----------------------------------------------------------

    def generate(
        self, request: GenerationRequest, references: Sequence[ImageAsset] = ()
    ) -> ImageAsset:
        op = request.controls.op_kind
        if op == "inpaint":
            return self.inpaint(request, references)
        width, height = self._output_dims(request, references)
        scene = self._scene_from_prompt(request, references)
        raster = render_scene(scene, width, height)
        return make_asset(width, height, raster, scene)

    def _output_dims(self, request: GenerationRequest, references: Sequence[ImageAsset]) -> tuple[int, int]:
        op = request.controls.op_kind
        if op == "img2img":
            if not references:
                raise InvalidRequestError("img2img needs a resolved reference")
            return references[0].width, references[0].height
        if op == "outpaint":
            if request.mask is not None:
                return request.mask.width, request.mask.height
            if references:
                return references[0].width, references[0].height
        return self.default_size

    def _scene_from_prompt(
        self, request: GenerationRequest, references: Sequence[ImageAsset]
    ) -> SceneSpec:
        fragments = classify_prompt(self.lexicon, request.prompt) if request.prompt.strip() else []
        by_type: dict[str, list[str]] = {}
        for f in fragments:
            by_type.setdefault(f.ftype, []).append(f.value)

        style_tags = list(by_type.get("style", []))
        if request.controls.style_weight >= 0.5:
            for ref in references:
                if ref.scene is not None:
                    for obj in ref.scene.objects:
                        style_tags.extend(obj.style_tags)
                    break
        style_tags = list(dict.fromkeys(style_tags))
        tone_tags = list(by_type.get("tone", []))
        color_tags = list(by_type.get("color", []))

        labels = by_type.get("content", [])
        regions = layout_regions(len(labels))
        objects = tuple(
            SceneObject(
                label=label,
                region=region,
                style_tags=tuple(style_tags),
                tone_tags=tuple(tone_tags),
                color_tags=tuple(color_tags),
            )
            for label, region in zip(labels, regions)
        )
        return SceneSpec(
            objects=objects,
            background_color_tag=color_tags[0] if color_tags else "",
            render_seed=request.seed,
        )

    # -- segment ------------------------------------------------------------

    def segment(self, asset: ImageAsset, points: Sequence[tuple[float, float]]) -> Mask:
        if asset.scene is None:
            raise NoSceneError("mock segmentation needs scene metadata")
        best = None  # (count, area, index)
        for index, obj in enumerate(asset.scene.objects):
            x0, y0, x1, y1 = obj.region.pixel_rect(asset.width, asset.height)
            count = sum(1 for px, py in points if x0 <= px < x1 and y0 <= py < y1)
            if count == 0:
                continue
            area = (x1 - x0) * (y1 - y0)
            key = (-count, area, index)
            if best is None or key < best[0]:
                best = (key, (x0, y0, x1, y1))
        if best is None:
            raise SegmentationEmptyError("no scene object under the control points")
        return Mask.from_pixel_rects(asset.width, asset.height, [best[1]])

    # -- inpaint ------------------------------------------------------------

    def inpaint(
        self, request: GenerationRequest, references: Sequence[ImageAsset] = ()
    ) -> ImageAsset:
        if not references:
            raise InvalidRequestError("inpaint needs a resolved reference")
        ref = references[0]
        mask = request.mask
        if mask is None or (mask.width, mask.height) != (ref.width, ref.height):
            raise MaskMismatchError("mask must match the reference dimensions")
        if mask.count() == 0:
            raise MaskMismatchError("mask selects no pixels")
        if ref.scene is None:
            raise NoSceneError("mock inpaint needs scene metadata")

        # Appearance order: the words the instrument contributed come first in
        # its crafted prompt, so they win the rewrite.
        fragments = (
            classify_prompt(self.lexicon, request.prompt, sort=False)
            if request.prompt.strip()
            else []
        )
        by_type: dict[str, list[str]] = {}
        for f in fragments:
            by_type.setdefault(f.ftype, []).append(f.value)
        style_mode = request.controls.style_weight > request.controls.content_weight

        rewritten = []
        for obj in ref.scene.objects:
            rect = obj.region.pixel_rect(ref.width, ref.height)
            if mask.overlap_fraction(rect) >= 0.5:
                rewritten.append(self._rewrite(obj, by_type, style_mode))
            else:
                rewritten.append(obj)
        scene = SceneSpec(
            objects=tuple(rewritten),
            background_color_tag=ref.scene.background_color_tag,
            render_seed=ref.scene.render_seed,
        )
        raster = render_scene(scene, ref.width, ref.height)
        return make_asset(ref.width, ref.height, raster, scene)

    @staticmethod
    def _rewrite(obj: SceneObject, by_type: dict[str, list[str]], style_mode: bool) -> SceneObject:
        if style_mode:
            # Tag families named in the prompt are replaced; labels and the
            # remaining families stay.
            return SceneObject(
                label=obj.label,
                region=obj.region,
                style_tags=tuple(by_type["style"]) if "style" in by_type else obj.style_tags,
                tone_tags=tuple(by_type["tone"]) if "tone" in by_type else obj.tone_tags,
                color_tags=tuple(by_type["color"]) if "color" in by_type else obj.color_tags,
            )
        label = by_type["content"][0] if by_type.get("content") else obj.label
        return SceneObject(
            label=label,
            region=obj.region,
            style_tags=obj.style_tags,
            tone_tags=obj.tone_tags,
            color_tags=obj.color_tags,
        )


def blank_scene_asset(width: int, height: int, seed: int = 0) -> ImageAsset:
    """Empty-scene asset; handy for grounding and extraction edge cases."""
    scene = SceneSpec(objects=(), background_color_tag="", render_seed=seed)
    return make_asset(width, height, render_scene(scene, width, height), scene)
