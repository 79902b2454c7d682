"""Transformative lenses: coverage over lower-z content, prompt merging,
preserve/generate masks, and stacking order."""

from __future__ import annotations

from dataclasses import dataclass

from .controls import GenerationControls, GenerationRequest
from .document import CanvasDocument, Element, ImagePayload, LensPayload
from .errors import BlankLensNoPromptError, MalformedPayloadError
from .geometry import Rect
from .masks import Mask


@dataclass
class LensComposition:
    covered: list[str]  # element ids, ascending z
    preserve_mask: Mask
    generate_mask: Mask
    composite_prompt: str
    reference_assets: list[str]


def _lens(doc: CanvasDocument, lens_id: str) -> Element:
    el = doc.element(lens_id)
    if el.kind != "lens":
        raise MalformedPayloadError(f"{lens_id} is not a lens")
    return el


def covered_elements(doc: CanvasDocument, lens_id: str) -> list[str]:
    """Image elements below the lens whose rect overlaps it with positive
    area, ascending z."""
    lens = _lens(doc, lens_id)
    out = []
    for el in doc.elements_by_z():
        if el.z >= lens.z or el.kind != "image":
            continue
        if el.rect.intersection_area(lens.rect) > 0:
            out.append(el.id)
    return out


def covered_content(doc: CanvasDocument, lens: Element) -> list[tuple[Element, str, str]]:
    """(element, asset id, prompt) for everything the lens consumes: covered
    images plus lower lenses that have generated a result. Never-generated
    lenses are skipped."""
    out = []
    for el in doc.elements_by_z():
        if el.z >= lens.z or el.rect.intersection_area(lens.rect) <= 0:
            continue
        if el.kind == "image" and isinstance(el.payload, ImagePayload) and el.payload.asset_id:
            asset = doc.asset(el.payload.asset_id)
            prompt = asset.provenance.prompt if asset.provenance else el.payload.prompt
            out.append((el, el.payload.asset_id, prompt))
        elif el.kind == "lens" and isinstance(el.payload, LensPayload) and el.payload.last_result:
            asset = doc.asset(el.payload.last_result)
            prompt = asset.provenance.prompt if asset.provenance else el.payload.prompt
            out.append((el, el.payload.last_result, prompt))
    return out


def lens_pixel_dims(rect: Rect) -> tuple[int, int]:
    return max(1, int(round(rect.w))), max(1, int(round(rect.h)))


def build_composition(doc: CanvasDocument, lens_id: str, language) -> LensComposition:
    lens = _lens(doc, lens_id)
    content = covered_content(doc, lens)
    if not content and not lens.payload.prompt.strip():
        raise BlankLensNoPromptError("a blank lens needs a prompt")

    width, height = lens_pixel_dims(lens.rect)
    pixel_rects = []
    for el, _asset_id, _prompt in content:
        inter = lens.rect.intersection(el.rect)
        if inter is None:
            continue
        x0 = int(round(inter.x - lens.rect.x))
        y0 = int(round(inter.y - lens.rect.y))
        x1 = int(round(inter.x2 - lens.rect.x))
        y1 = int(round(inter.y2 - lens.rect.y))
        pixel_rects.append((x0, y0, x1, y1))
    preserve = Mask.from_pixel_rects(width, height, pixel_rects)
    generate = preserve.complement()

    prompts = [lens.payload.prompt] + [prompt for _el, _aid, prompt in content]
    composite = language.merge(prompts)
    return LensComposition(
        covered=[el.id for el, _aid, _prompt in content],
        preserve_mask=preserve,
        generate_mask=generate,
        composite_prompt=composite,
        reference_assets=[aid for _el, aid, _prompt in content],
    )


def lens_request(doc: CanvasDocument, lens_id: str, language) -> GenerationRequest:
    """Outpaint request at lens dimensions: covered regions are preserved,
    the rest is synthesized from the merged prompt."""
    lens = _lens(doc, lens_id)
    comp = build_composition(doc, lens_id, language)
    controls = GenerationControls(
        content_weight=0.5,
        style_weight=0.8,
        op_kind="outpaint",
    )
    return GenerationRequest(
        prompt=comp.composite_prompt,
        reference_assets=tuple(comp.reference_assets),
        mask=comp.generate_mask,
        controls=controls,
        seed=lens.payload.seed or 0,
    )


def resolve_lens_stack(doc: CanvasDocument, region: Rect) -> list[str]:
    """Lenses intersecting the region, ascending z: the chaining order."""
    return [
        el.id
        for el in doc.elements_by_z()
        if el.kind == "lens" and el.rect.intersection_area(region) > 0
    ]


def lenses_affected_by(doc: CanvasDocument, element_id: str, *rects: Rect) -> list[str]:
    """Lenses above the element that intersect any of the given rects (a
    moved element reports both its old and new rect)."""
    el = doc.element(element_id)
    out = []
    for other in doc.elements_by_z():
        if other.kind != "lens" or other.z <= el.z:
            continue
        if any(other.rect.intersection_area(r) > 0 for r in rects):
            out.append(other.id)
    return out
