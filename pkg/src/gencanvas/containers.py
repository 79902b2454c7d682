"""Generative containers: a prompt header over a fixed 2x2 grid of
variations, grounded by at most one example."""

from __future__ import annotations

from .controls import GenerationControls, GenerationRequest
from .document import CanvasDocument, ContainerPayload, Element, Grounding, ImagePayload
from .errors import (
    BadIndexError,
    EmptyCellError,
    EmptyContainerError,
    MalformedPayloadError,
    UnresolvableSourceError,
)
from .fragments import Fragment

GRID_CELLS = 4


def _container(doc: CanvasDocument, container_id: str) -> Element:
    el = doc.element(container_id)
    if el.kind != "container":
        raise MalformedPayloadError(f"{container_id} is not a container")
    return el


def ground_container(doc: CanvasDocument, container_id: str, grounding: Grounding) -> None:
    """Replace the grounding (single slot) and clear the grid."""
    el = _container(doc, container_id)
    if grounding.source == "asset":
        if grounding.asset_id not in doc.assets:
            raise UnresolvableSourceError(f"grounding asset {grounding.asset_id!r} not found")
    elif grounding.source == "text":
        if not (grounding.prompt or "").strip():
            raise UnresolvableSourceError("text grounding needs a non-empty prompt")
    payload: ContainerPayload = el.payload
    payload.grounding = grounding
    payload.cell_kind = "fragments" if grounding.source == "fragment" else "images"
    payload.cells = [None, None, None, None]
    doc.revision += 1


def check_generatable(payload: ContainerPayload) -> None:
    if not payload.prompt.strip() and payload.grounding.source == "none":
        raise EmptyContainerError("container has neither prompt nor grounding")


def container_request(payload: ContainerPayload, base_seed: int) -> GenerationRequest:
    """Umbrella request describing the grid job; per-cell requests are
    derived at execution time."""
    refs = (payload.grounding.asset_id,) if payload.grounding.source == "asset" else ()
    return GenerationRequest(
        prompt=payload.prompt,
        reference_assets=refs,
        controls=GenerationControls(
            content_weight=0.3,
            style_weight=0.8,
            op_kind="img2img" if refs else "txt2img",
        ),
        seed=base_seed,
    )


def derive_cell_prompts(payload: ContainerPayload, language, describe_asset) -> list[str]:
    """Four distinct prompts along the dominant dimension. Asset groundings
    are folded in as described text so the language adapter stays pure."""
    grounding = payload.grounding
    if grounding.source == "asset":
        grounding = Grounding(source="text", prompt=describe_asset(grounding.asset_id))
    prompts = language.derive_variant_prompts(payload.prompt, grounding, GRID_CELLS)
    if len(prompts) != GRID_CELLS or len(set(prompts)) != GRID_CELLS:
        raise MalformedPayloadError("variant prompts must be four and pairwise distinct")
    return prompts


def derive_cell_fragments(payload: ContainerPayload, language) -> list[Fragment]:
    fragment = payload.grounding.fragment
    variants = language.vary_values(fragment, payload.prompt, GRID_CELLS)
    if len(variants) != GRID_CELLS:
        raise MalformedPayloadError("fragment grounding must yield four variants")
    return variants


def fill_cells_with_assets(payload: ContainerPayload, asset_ids: list[str], base_seed: int) -> None:
    if len(asset_ids) != GRID_CELLS:
        raise MalformedPayloadError("grid fills atomically with four assets")
    payload.cells = [{"asset": aid} for aid in asset_ids]
    payload.cell_kind = "images"
    payload.base_seed = base_seed


def fill_cells_with_fragments(payload: ContainerPayload, fragments: list[Fragment], base_seed: int) -> None:
    if len(fragments) != GRID_CELLS:
        raise MalformedPayloadError("grid fills atomically with four fragments")
    payload.cells = [{"fragment": f.to_dict()} for f in fragments]
    payload.cell_kind = "fragments"
    payload.base_seed = base_seed


def cell_payload(doc: CanvasDocument, container_id: str, cell_index: int):
    """The (kind, payload) to instantiate when a cell is adopted."""
    el = _container(doc, container_id)
    if not 0 <= cell_index < GRID_CELLS:
        raise BadIndexError(f"cell index {cell_index} outside 0..3")
    cell = el.payload.cells[cell_index]
    if cell is None:
        raise EmptyCellError(f"cell {cell_index} is empty")
    if "asset" in cell:
        return ("image", ImagePayload(asset_id=cell["asset"]))
    from .document import FragmentCardPayload

    return ("fragment", FragmentCardPayload(fragment=Fragment.from_dict(cell["fragment"])))
