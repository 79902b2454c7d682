"""Palettes: meta-instruments that store or generate sets of instruments."""

from __future__ import annotations

from .document import (
    BrushPayload,
    CanvasDocument,
    Element,
    FragmentCardPayload,
    ImagePayload,
    LensPayload,
    PalettePayload,
)
from .errors import (
    BadIndexError,
    EmptyPromptError,
    MalformedPayloadError,
    UnsupportedKindError,
)
from .fragments import Fragment
from .lexicon import stable_hash_text

PALETTE_GENERATE_CAP = 8


def _palette(doc: CanvasDocument, palette_id: str) -> Element:
    el = doc.element(palette_id)
    if el.kind != "palette":
        raise MalformedPayloadError(f"{palette_id} is not a palette")
    return el


def snapshot_item(el: Element) -> dict:
    """Deep, immutable snapshot of a palette-able element."""
    if el.kind == "fragment":
        return {"kind": "fragment", "fragment": el.payload.fragment.to_dict()}
    if el.kind == "brush":
        return {"kind": "brush", "prompt": el.payload.prompt, "mode": el.payload.mode}
    if el.kind == "lens":
        return {"kind": "lens", "prompt": el.payload.prompt}
    if el.kind == "image":
        if not el.payload.asset_id:
            raise UnsupportedKindError("image has no asset to snapshot yet")
        return {"kind": "asset", "asset_id": el.payload.asset_id}
    raise UnsupportedKindError(f"{el.kind} elements cannot be palette items")


def add_to_palette(doc: CanvasDocument, palette_id: str, element_id: str) -> int:
    palette = _palette(doc, palette_id)
    item = snapshot_item(doc.element(element_id))
    payload: PalettePayload = palette.payload
    payload.items.append(item)
    doc.revision += 1
    return len(payload.items) - 1


def item_to_payload(item: dict, lens_seed: int | None = None):
    """(kind, payload) to instantiate a stored item as a live element."""
    kind = item.get("kind")
    if kind == "fragment":
        return ("fragment", FragmentCardPayload(fragment=Fragment.from_dict(item["fragment"])))
    if kind == "brush":
        return ("brush", BrushPayload(prompt=item["prompt"], mode=item["mode"]))
    if kind == "lens":
        return ("lens", LensPayload(prompt=item["prompt"], seed=lens_seed))
    if kind == "asset":
        return ("image", ImagePayload(asset_id=item["asset_id"]))
    raise MalformedPayloadError(f"unknown palette item kind {kind!r}")


def palette_item(doc: CanvasDocument, palette_id: str, index: int) -> dict:
    payload: PalettePayload = _palette(doc, palette_id).payload
    if not 0 <= index < len(payload.items):
        raise BadIndexError(f"palette index {index} outside 0..{len(payload.items) - 1}")
    return payload.items[index]


def generated_items(language, lexicon, prompt: str, kind: str, k: int) -> list[dict]:
    """k instrument snapshots parameterized from the task prompt."""
    if not prompt.strip():
        raise EmptyPromptError("palette generation needs a prompt")
    if kind not in ("fragments", "brushes"):
        raise MalformedPayloadError(f"unknown palette kind {kind!r}")
    if not 0 <= k <= PALETTE_GENERATE_CAP:
        raise MalformedPayloadError(f"palette generation capped at {PALETTE_GENERATE_CAP} items")
    if k == 0:
        return []

    mentioned = lexicon.mentioned_types(prompt)
    if mentioned:
        ftype = mentioned[0]
    else:
        fragments = language.decompose(prompt)
        ftype = fragments[0].ftype if fragments else "style"
    table = lexicon.values[ftype]
    if k > len(table):
        raise MalformedPayloadError(f"{ftype} table has only {len(table)} values")
    start = stable_hash_text(prompt, ftype) % len(table)
    values = [table[(start + i) % len(table)] for i in range(k)]

    if kind == "fragments":
        return [
            {"kind": "fragment", "fragment": Fragment(ftype, v, "suggested").to_dict()}
            for v in values
        ]
    mode = "content" if ftype == "content" else "style"
    return [{"kind": "brush", "prompt": v, "mode": mode} for v in values]
