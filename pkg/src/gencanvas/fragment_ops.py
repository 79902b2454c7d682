"""Fragment operations over document elements: reveal, extend, vary."""

from __future__ import annotations

from .document import CanvasDocument, Element, ImagePayload
from .errors import MalformedPayloadError
from .fragments import Fragment, FragmentRow

MAX_FRAGMENTS = 5
EXPANSION_CAP = 8  # per value column


def _image(doc: CanvasDocument, element_id: str) -> Element:
    el = doc.element(element_id)
    if el.kind != "image":
        raise MalformedPayloadError(f"{element_id} is not an image element")
    return el


def element_prompt(doc: CanvasDocument, el: Element, language) -> str:
    """The prompt an image element answers to: provenance first, creation
    prompt next, a described scene as the fallback."""
    payload: ImagePayload = el.payload
    if payload.asset_id:
        asset = doc.asset(payload.asset_id)
        if asset.provenance and asset.provenance.prompt:
            return asset.provenance.prompt
        if payload.prompt:
            return payload.prompt
        return language.describe(asset)
    return payload.prompt


def reveal_fragments(doc: CanvasDocument, element_id: str, language) -> FragmentRow:
    """Build (or return the stored) fragment row for an image element."""
    el = _image(doc, element_id)
    payload: ImagePayload = el.payload
    if payload.fragment_row is not None:
        return payload.fragment_row

    prompt = element_prompt(doc, el, language)
    fragments = language.decompose(prompt, MAX_FRAGMENTS)
    base: list[Fragment] = []
    seen_types: set[str] = set()
    for frag in fragments:
        if frag.ftype in seen_types:
            continue
        seen_types.add(frag.ftype)
        base.append(frag)
    payload.fragment_row = FragmentRow(fragments=base)
    doc.revision += 1
    return payload.fragment_row


def extend_fragment_types(doc: CanvasDocument, element_id: str, language) -> list[Fragment]:
    """Append suggestions for types missing from the row."""
    row = reveal_fragments(doc, element_id, language)
    el = _image(doc, element_id)
    prompt = element_prompt(doc, el, language)
    suggestions = language.suggest_types(prompt, row.fragments, MAX_FRAGMENTS)
    row.fragments.extend(suggestions)
    doc.revision += 1
    return suggestions


def vary_fragment(doc: CanvasDocument, element_id: str, ftype: str, k: int, language) -> list[Fragment]:
    """Append k value variations to the type's expansion column (accumulating,
    deduped, capped)."""
    row = reveal_fragments(doc, element_id, language)
    base = next((f for f in row.fragments if f.ftype == ftype), None)
    if base is None:
        raise MalformedPayloadError(f"row has no base fragment of type {ftype!r}")
    el = _image(doc, element_id)
    variations = language.vary_values(base, element_prompt(doc, el, language), k)
    column = row.expansions.setdefault(ftype, [])
    existing = {f.value for f in column} | {base.value}
    for frag in variations:
        if frag.value in existing or len(column) >= EXPANSION_CAP:
            continue
        column.append(frag)
        existing.add(frag.value)
    doc.revision += 1
    return variations
